"""Acceptance gate: one test per release criterion, each printing a
single PASS/FAIL line (run with ``pytest -s`` to see them all).

The heavy fixtures (benchmark suites solved by both variants with
references attached) are shared module-wide so the whole gate stays
fast.
"""

import itertools
import time
from dataclasses import dataclass

import numpy as np
import pytest

import pcadmm as pc
from pcadmm.matrices import xi_from_aggregates
from pcadmm.solver import RunLog

NU_GRID = (0.01, 0.25, 0.5, 0.75, 0.99)
P_GRID = (1, 2, 3, 5)
M_GRID = (1, 2)


def _report(num, name, failures):
    status = "FAIL" if failures else "PASS"
    print(f"acceptance criterion {num:02d} ({name}): {status}")
    assert not failures, f"criterion {num} ({name}): " + "; ".join(str(f) for f in failures[:10])


@dataclass
class SuiteRun:
    name: str
    problem: pc.SeparableProblem
    ref: pc.ReferenceSolution
    variant: str
    config: pc.SolverConfig
    result: object


def _run_suite(instances, tol=1e-8):
    runs = []
    for name, problem, ref in instances:
        for variant in ("pd", "dp"):
            config = pc.SolverConfig(variant=variant, tol=tol, record_xi=True)
            result = pc.run(problem, config, reference=ref)
            runs.append(SuiteRun(name, problem, ref, variant, config, result))
    return runs


@pytest.fixture(scope="module")
def qp_suites():
    """10 seeded two-block QPs (n_i = 10, m = 5) and 10 seeded
    three-block QPs with direct KKT references, solved by both
    variants."""
    instances = []
    for seed in range(10):
        prob, ref = pc.gen_eq_qp(2, [10, 10], 5, seed)
        instances.append((f"eq-p2-s{seed}", prob, ref))
    for seed in range(10):
        prob, ref = pc.gen_eq_qp(3, [10, 10, 10], 5, seed)
        instances.append((f"eq-p3-s{seed}", prob, ref))
    t0 = time.monotonic()
    runs = _run_suite(instances)
    elapsed = time.monotonic() - t0
    return instances, runs, elapsed


@pytest.fixture(scope="module")
def ineq_suite():
    instances = []
    for seed in range(10):
        prob, ref = pc.gen_ineq_qp(2, [6, 6], 3, seed)
        instances.append((f"ge-s{seed}", prob, ref))
    runs = _run_suite(instances, tol=1e-6)
    return instances, runs


@pytest.fixture(scope="module")
def lasso_suite():
    instances = []
    for seed in range(5):
        prob, ref = pc.gen_lasso(20, 40, 0.5, seed)
        instances.append((f"lasso-s{seed}", prob, ref))
    runs = _run_suite(instances)
    return instances, runs


def test_criterion_01_matrix_condition_sweep():
    failures = []
    t0 = time.monotonic()
    for variant, p, m, nu in itertools.product(("pd", "dp"), P_GRID, M_GRID, NU_GRID):
        try:
            rep = pc.verify_framework(variant, p, m, nu)
        except pc.ClosedFormMismatchError as e:
            failures.append(f"{variant} p={p} m={m} nu={nu}: {e}")
            continue
        if rep.hm_eq_q_maxerr > 1e-13:
            failures.append(f"{variant} p={p} m={m} nu={nu}: HM-Q err {rep.hm_eq_q_maxerr:.2e}")
        for label, val in (("H", rep.h_min_eig), ("G", rep.g_min_eig), ("QtQ", rep.qtq_min_eig)):
            if val <= 0:
                failures.append(f"{variant} p={p} m={m} nu={nu}: min eig {label} = {val:.2e}")
    elapsed = time.monotonic() - t0
    if elapsed >= 5.0:
        failures.append(f"sweep took {elapsed:.1f}s (budget 5s)")
    _report(1, "matrix condition sweep", failures)


def test_criterion_02_closed_form_spot_values():
    failures = []
    H = pc.build_h("pd", 2, 1, 0.5)
    if not np.array_equal(H, np.array([[3.0, 3.0, 1.0], [3.0, 5.0, 1.0], [1.0, 1.0, 1.0]])):
        failures.append(f"H_pd(2,1,0.5) = {H.tolist()}")
    G = pc.build_g("dp", 2, 1, 0.5)
    if not np.array_equal(G, np.diag([0.5, 0.5, 1.0])):
        failures.append(f"G_dp(2,1,0.5) = {G.tolist()}")
    Q = pc.build_q("pd", 2, 1)
    if not np.array_equal(Q, np.array([[1.0, 0.0, 1.0], [1.0, 1.0, 1.0], [0.0, 0.0, 1.0]])):
        failures.append(f"Q_pd(2,1) = {Q.tolist()}")
    _report(2, "closed-form spot values", failures)


def test_criterion_03_skew_symmetry():
    failures = []
    rng = np.random.default_rng(2024)
    for trial in range(100):
        p = int(rng.integers(1, 4))
        dims = [int(rng.integers(2, 6)) for _ in range(p)]
        m = int(rng.integers(1, 5))
        blocks = [
            pc.BlockSpec(theta=pc.Zero(), set=pc.Free(), A=rng.standard_normal((m, n)))
            for n in dims
        ]
        prob = pc.SeparableProblem(blocks=tuple(blocks), b=rng.standard_normal(m))
        ntot = sum(dims) + m
        w1, w2 = rng.standard_normal(ntot), rng.standard_normal(ntot)
        val = abs(pc.check_skew(prob, w1, w2))
        bound = 1e-12 * (1 + np.linalg.norm(w1) * np.linalg.norm(w2))
        if val > bound:
            failures.append(f"trial {trial}: |skew| = {val:.2e} > {bound:.2e}")
    _report(3, "skew symmetry", failures)


def test_criterion_04_contraction(qp_suites):
    _, runs, _ = qp_suites
    failures = []
    for sr in runs:
        violations = pc.contraction_check(sr.result.log, sr.problem, sr.config, sr.ref)
        if violations:
            failures.append(f"{sr.name}/{sr.variant}: {len(violations)} violations")
        dist = np.array(sr.result.log.dist_h, dtype=float)
        if not np.all(np.diff(dist) <= 1e-9 * (1 + dist[:-1])):
            failures.append(f"{sr.name}/{sr.variant}: dist_H not nonincreasing")
    _report(4, "contraction inequality", failures)


def test_criterion_05_convergence_to_oracle(qp_suites):
    _, runs, elapsed = qp_suites
    failures = []
    for sr in runs:
        if sr.result.reason.kind != pc.CONVERGED or len(sr.result.log) > 10000:
            failures.append(f"{sr.name}/{sr.variant}: {sr.result.reason.kind} after {len(sr.result.log)}")
            continue
        if sr.result.log.primal_res[-1] > 1e-6:
            failures.append(f"{sr.name}/{sr.variant}: primal {sr.result.log.primal_res[-1]:.2e}")
        obj_err = abs(sr.result.log.objective[-1] - sr.ref.objective)
        if obj_err > 1e-6 * (1 + abs(sr.ref.objective)):
            failures.append(f"{sr.name}/{sr.variant}: objective error {obj_err:.2e}")
    if elapsed >= 30.0:
        failures.append(f"suite took {elapsed:.1f}s (budget 30s)")
    _report(5, "convergence to oracle", failures)


def test_criterion_06_inequality_kkt(ineq_suite):
    _, runs = ineq_suite
    failures = []
    for sr in runs:
        sol = sr.result.solution
        r = sum(sol.a_tilde) - sr.problem.b
        lam = sol.lambda_tilde
        if abs(lam @ r) > 1e-6:
            failures.append(f"{sr.name}/{sr.variant}: complementarity {abs(lam @ r):.2e}")
        if np.any(lam < 0):
            failures.append(f"{sr.name}/{sr.variant}: negative multiplier")
        if np.min(r) < -1e-6:
            failures.append(f"{sr.name}/{sr.variant}: infeasibility {np.min(r):.2e}")
    _report(6, "inequality KKT", failures)


def test_criterion_07_fixed_point_at_saddle(qp_suites, ineq_suite, lasso_suite):
    failures = []
    all_instances = list(qp_suites[0]) + list(ineq_suite[0]) + list(lasso_suite[0])
    for i in range(2):
        prob = pc.gen_toy_svm(3, seed=i)
        all_instances.append((f"svm-s{i}", prob, pc.active_set_oracle(prob)))
    for name, prob, ref in all_instances:
        for variant in ("pd", "dp"):
            config = pc.SolverConfig(variant=variant, max_iters=1)
            result = pc.run(prob, config, init=(ref.x, ref.lam))
            gap = result.log.pred_gap[0]
            if gap > 10 * config.inner_tol:
                failures.append(f"{name}/{variant}: pred_gap {gap:.2e}")
    _report(7, "fixed point at oracle saddle", failures)


def test_criterion_08_lasso_oracle_equivalence(lasso_suite):
    _, runs = lasso_suite
    failures = []
    for sr in runs:
        if sr.result.reason.kind != pc.CONVERGED:
            failures.append(f"{sr.name}/{sr.variant}: {sr.result.reason.kind}")
            continue
        obj_err = abs(sr.result.log.objective[-1] - sr.ref.objective)
        if obj_err > 1e-6 * (1 + abs(sr.ref.objective)):
            failures.append(f"{sr.name}/{sr.variant}: objective error {obj_err:.2e}")
    _report(8, "lasso oracle equivalence", failures)


def test_criterion_09_correction_matrix_bridge():
    failures = []
    rng = np.random.default_rng(99)
    for p in (1, 2, 3):
        prob, _ = pc.gen_eq_qp(p, [4] * p, 3, seed=60 + p)
        beta, nu = 1.5, 0.99
        P = pc.build_p(prob, beta)
        for variant, correct in (("pd", pc.correct_pd), ("dp", pc.correct_dp)):
            M = pc.build_m(variant, p, prob.m, nu)
            for trial in range(100):
                x = [rng.standard_normal(4) for _ in range(p)]
                xt = [rng.standard_normal(4) for _ in range(p)]
                lam, lt = rng.standard_normal(3), rng.standard_normal(3)
                state = pc.IterateState(
                    tuple(blk.A @ xi for blk, xi in zip(prob.blocks, x)), lam
                )
                pred = pc.PredictorState(
                    tuple(xt), tuple(blk.A @ xi for blk, xi in zip(prob.blocks, xt)), lt
                )
                new = correct(state, pred, nu, beta)
                xi_k = P @ pc.stack_blocks(x, lam)
                xi_t = P @ pc.stack_blocks(xt, lt)
                expect = xi_k - M @ (xi_k - xi_t)
                err = np.max(np.abs(xi_from_aggregates(new.a, new.lam, beta) - expect))
                if err > 1e-12:
                    failures.append(f"{variant} p={p} trial {trial}: err {err:.2e}")
    _report(9, "correction matrix bridge", failures)


def _corrupted_correct_pd(state, pred, nu, beta):
    # same as correct_pd but with the multiplier-row coefficient sign
    # flipped: lam + nu*beta*d_1 becomes lam - nu*beta*d_1
    good = pc.correct_pd(state, pred, nu, beta)
    d1 = state.a[0] - pred.a_tilde[0]
    return pc.IterateState(good.a, good.lam - 2 * nu * beta * d1)


def test_criterion_10_mutation_sensitivity(qp_suites):
    instances, _, _ = qp_suites
    flagged = 0
    for name, prob, ref in instances[:6]:
        config = pc.SolverConfig(variant="pd", record_xi=True)
        state = pc.IterateState(tuple(np.zeros(prob.m) for _ in prob.blocks), np.zeros(prob.m))
        log = RunLog()
        for k in range(200):
            xi_k = xi_from_aggregates(state.a, state.lam, config.beta)
            pred = pc.predict_pd(prob, state, config.beta, config.inner_tol)
            xi_t = xi_from_aggregates(pred.a_tilde, pred.lambda_tilde, config.beta)
            log.xi_states.append(xi_k)
            log.xi_preds.append(xi_t)
            log.append(k, 0, 0, float(np.linalg.norm(xi_k - xi_t)), None, 0)
            state = _corrupted_correct_pd(state, pred, config.nu, config.beta)
        log.xi_states.append(xi_from_aggregates(state.a, state.lam, config.beta))
        if pc.contraction_check(log, prob, config, ref):
            flagged += 1
    failures = [] if flagged > 0 else ["corrupted multiplier row produced no violations"]
    _report(10, "mutation sensitivity", failures)
