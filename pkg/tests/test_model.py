import numpy as np
import pytest

import pcadmm as pc


def two_block_problem():
    return pc.SeparableProblem(
        blocks=(
            pc.BlockSpec(theta=pc.Quadratic(np.eye(2), np.zeros(2)), set=pc.Free(), A=np.ones((1, 2))),
            pc.BlockSpec(theta=pc.WeightedL1(0.5), set=pc.NonNeg(), A=np.array([[1.0, -1.0]])),
        ),
        b=np.array([1.0]),
        sense=pc.EQ,
    )


def test_validate_well_formed():
    assert pc.validate_problem(two_block_problem()) == []


def test_validate_wrong_row_count():
    prob = pc.SeparableProblem(
        blocks=(
            pc.BlockSpec(theta=pc.Zero(), set=pc.Free(), A=np.ones((2, 2))),
            pc.BlockSpec(theta=pc.Zero(), set=pc.Free(), A=np.ones((1, 2))),
        ),
        b=np.zeros(2),
    )
    violations = pc.validate_problem(prob)
    assert len(violations) == 1
    assert "block 1" in violations[0] and "row count" in violations[0]


def test_validate_box_reversed():
    prob = pc.SeparableProblem(
        blocks=(
            pc.BlockSpec(
                theta=pc.Zero(),
                set=pc.Box(lo=np.array([1.0]), hi=np.array([0.0])),
                A=np.ones((1, 1)),
            ),
        ),
        b=np.zeros(1),
    )
    violations = pc.validate_problem(prob)
    assert len(violations) == 1
    assert "block 0" in violations[0]


def test_validate_reports_all_violations_at_once():
    prob = pc.SeparableProblem(
        blocks=(
            pc.BlockSpec(theta=pc.WeightedL1(-1.0), set=pc.Free(), A=np.ones((2, 2))),
            pc.BlockSpec(
                theta=pc.Quadratic(np.eye(3), np.zeros(2)),  # c has wrong length
                set=pc.Box(lo=np.ones(3), hi=np.zeros(3)),
                A=np.ones((1, 3)),
            ),
        ),
        b=np.zeros(2),
    )
    violations = pc.validate_problem(prob)
    assert len(violations) >= 3  # negative weight, row count, c length, box
    assert any("block 0" in v for v in violations)
    assert any("block 1" in v for v in violations)


def test_validate_asymmetric_quadratic():
    H = np.array([[1.0, 0.5], [0.0, 1.0]])
    prob = pc.SeparableProblem(
        blocks=(pc.BlockSpec(theta=pc.Quadratic(H, np.zeros(2)), set=pc.Free(), A=np.ones((1, 2))),),
        b=np.zeros(1),
    )
    assert any("symmetric" in v for v in pc.validate_problem(prob))


def test_lagrangian_hand_value():
    # p=1, theta = x^2/2, A = [1], b = [1]: L(2, 3) = 2 - 3*(2 - 1) = -1
    prob = pc.SeparableProblem(
        blocks=(pc.BlockSpec(theta=pc.Quadratic([[1.0]], [0.0]), set=pc.Free(), A=[[1.0]]),),
        b=[1.0],
    )
    assert pc.lagrangian_value(prob, [np.array([2.0])], np.array([3.0])) == pytest.approx(-1.0)


def test_lagrangian_zero_theta_feasible():
    prob = pc.SeparableProblem(
        blocks=(pc.BlockSpec(theta=pc.Zero(), set=pc.Free(), A=[[1.0]]),),
        b=[2.0],
    )
    assert pc.lagrangian_value(prob, [np.array([2.0])], np.zeros(1)) == 0.0


def test_lagrangian_saddle_equals_objective():
    prob, ref = pc.gen_eq_qp(2, [4, 3], 2, seed=5)
    val = pc.lagrangian_value(prob, ref.x, ref.lam)
    assert val == pytest.approx(ref.objective, abs=1e-9)


def test_lagrangian_affine_in_multiplier():
    rng = np.random.default_rng(3)
    prob = two_block_problem()
    for _ in range(20):
        x = [rng.standard_normal(2), rng.standard_normal(2)]
        l1, l2 = rng.standard_normal(1), rng.standard_normal(1)
        alpha = rng.uniform()
        mix = pc.lagrangian_value(prob, x, alpha * l1 + (1 - alpha) * l2)
        expect = alpha * pc.lagrangian_value(prob, x, l1) + (1 - alpha) * pc.lagrangian_value(prob, x, l2)
        assert mix == pytest.approx(expect, abs=1e-12)


def test_lagrangian_dimension_mismatch():
    prob = two_block_problem()
    with pytest.raises(ValueError):
        pc.lagrangian_value(prob, [np.zeros(2)], np.zeros(1))
    with pytest.raises(ValueError):
        pc.lagrangian_value(prob, [np.zeros(2), np.zeros(3)], np.zeros(1))


def test_feasibility_residual_equality_at_feasible_point():
    prob = two_block_problem()
    a = [np.array([0.6]), np.array([0.4])]
    assert pc.feasibility_residual(prob, a, np.array([5.0])) == (0.0, 0.0)


def test_feasibility_residual_inactive_inequality():
    prob = pc.SeparableProblem(
        blocks=(pc.BlockSpec(theta=pc.Zero(), set=pc.Free(), A=[[1.0]]),),
        b=[0.0],
        sense=pc.GE,
    )
    assert pc.feasibility_residual(prob, [np.array([2.0])], np.zeros(1)) == (0.0, 0.0)


def test_feasibility_residual_violated_inequality():
    prob = pc.SeparableProblem(
        blocks=(pc.BlockSpec(theta=pc.Zero(), set=pc.Free(), A=[[1.0]]),),
        b=[0.0],
        sense=pc.GE,
    )
    primal, compl = pc.feasibility_residual(prob, [np.array([-0.3])], np.array([1.0]))
    assert primal == pytest.approx(0.3)
    assert compl == pytest.approx(0.3)


def test_feasibility_residual_zero_at_oracle_saddles():
    for seed in range(3):
        prob, ref = pc.gen_eq_qp(2, [5, 5], 3, seed)
        primal, compl = pc.feasibility_residual(prob, ref.a, ref.lam)
        assert primal <= 1e-8 and compl <= 1e-8
        prob, ref = pc.gen_ineq_qp(2, [4, 4], 2, seed)
        primal, compl = pc.feasibility_residual(prob, ref.a, ref.lam)
        assert primal <= 1e-8 and compl <= 1e-8


def test_solver_config_validation():
    with pytest.raises(ValueError, match="nu must lie in"):
        pc.SolverConfig(nu=1.0)
    with pytest.raises(ValueError, match="nu must lie in"):
        pc.SolverConfig(nu=0.0)
    with pytest.raises(ValueError, match="beta"):
        pc.SolverConfig(beta=0.0)
    with pytest.raises(ValueError, match="variant"):
        pc.SolverConfig(variant="xx")


def test_json_round_trip():
    prob = pc.SeparableProblem(
        blocks=(
            pc.BlockSpec(theta=pc.Quadratic(np.eye(2), np.array([1.0, -1.0])), set=pc.Free(), A=np.ones((1, 2))),
            pc.BlockSpec(
                theta=pc.WeightedL1(0.25),
                set=pc.Box(lo=np.zeros(3), hi=np.ones(3)),
                A=np.arange(3.0).reshape(1, 3),
                ortho_scaled=False,
            ),
            pc.BlockSpec(theta=pc.Zero(), set=pc.NonNeg(), A=np.eye(1), ortho_scaled=True),
        ),
        b=np.array([2.0]),
        sense=pc.GE,
    )
    data = pc.problem_to_json(prob)
    back = pc.problem_from_json(data)
    assert back.sense == prob.sense
    assert back.p == prob.p and back.m == prob.m
    np.testing.assert_array_equal(back.b, prob.b)
    for orig, rt in zip(prob.blocks, back.blocks):
        np.testing.assert_array_equal(orig.A, rt.A)
        assert type(orig.theta) is type(rt.theta)
        assert type(orig.set) is type(rt.set)
        assert orig.ortho_scaled == rt.ortho_scaled


def test_json_malformed_names_key():
    with pytest.raises(ValueError, match="sense"):
        pc.problem_from_json({"sense": "neq", "b": [0.0], "blocks": []})
    with pytest.raises(ValueError, match="blocks"):
        pc.problem_from_json({"sense": "eq", "b": [0.0]})
    with pytest.raises(ValueError, match="tau"):
        pc.problem_from_json(
            {"sense": "eq", "b": [0.0], "blocks": [{"n": 1, "A": [[1.0]], "theta": {"type": "l1"}}]}
        )
