"""Problem and iterate data model shared by every solver variant.

A separable problem is

    min  sum_i theta_i(x_i)
    s.t. sum_i A_i x_i = b   (sense ``"eq"``)   or
         sum_i A_i x_i >= b  (sense ``"ge"``),
         x_i in X_i,

with closed proper convex block objectives ``theta_i`` and closed convex
sets ``X_i``.  For the equality sense the multiplier ranges over all of
R^m; for the inequality sense it is restricted to the nonnegative
orthant.

The solver recursion never needs the raw primal blocks after the start:
only the aggregates ``A_i x_i`` and the multiplier are carried from one
iteration to the next (:class:`IterateState`), while each prediction
sweep produces a full primal point (:class:`PredictorState`) that is the
reported solution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "EQ",
    "GE",
    "Quadratic",
    "WeightedL1",
    "Zero",
    "Custom",
    "Free",
    "NonNeg",
    "Box",
    "BlockSpec",
    "SeparableProblem",
    "IterateState",
    "PredictorState",
    "SolverConfig",
    "validate_problem",
    "theta_value",
    "objective_value",
    "lagrangian_value",
    "feasibility_residual",
    "problem_to_json",
    "problem_from_json",
]

# Constraint senses.  "eq" couples the blocks through equalities and
# leaves the multiplier unconstrained; "ge" uses inequalities and keeps
# the multiplier in the nonnegative orthant.
EQ = "eq"
GE = "ge"
_SENSES = (EQ, GE)

_SYM_TOL = 1e-12


def _as_vector(v, name="vector"):
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


# ---------------------------------------------------------------------------
# Block objective atoms


@dataclass(frozen=True)
class Quadratic:
    """theta(x) = 0.5 x'Hx + c'x with H symmetric positive semidefinite."""

    H: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "H", np.asarray(self.H, dtype=float))
        object.__setattr__(self, "c", _as_vector(self.c, "c"))


@dataclass(frozen=True)
class WeightedL1:
    """theta(x) = tau * ||x||_1 with tau >= 0."""

    tau: float


@dataclass(frozen=True)
class Zero:
    """theta(x) = 0."""


@dataclass(frozen=True)
class Custom:
    """User-supplied block objective.

    ``value(x)`` returns theta(x).  ``solve(request, inner_tol, x0)``
    must return the minimizer of ``theta(x) + (beta/2)||Ax - v||^2``
    over the block's set, where ``request`` is the
    :class:`~pcadmm.prox.SubproblemRequest` being dispatched.
    """

    value: Callable[[np.ndarray], float]
    solve: Callable


# ---------------------------------------------------------------------------
# Block constraint sets


@dataclass(frozen=True)
class Free:
    """No set constraint."""


@dataclass(frozen=True)
class NonNeg:
    """Componentwise x >= 0."""


@dataclass(frozen=True)
class Box:
    """Componentwise lo <= x <= hi."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", _as_vector(self.lo, "lo"))
        object.__setattr__(self, "hi", _as_vector(self.hi, "hi"))


@dataclass(frozen=True)
class BlockSpec:
    """One objective block: its atom, set, and coupling matrix A (m x n).

    ``ortho_scaled`` declares that A'A is a positive multiple of the
    identity, which unlocks closed-form subproblem solves; it is an
    explicit flag rather than something detected numerically at run
    time.
    """

    theta: object
    set: object = field(default_factory=Free)
    A: np.ndarray = None
    n: int = None
    ortho_scaled: bool = False

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.ndim != 2:
            raise ValueError(f"A must be a matrix, got shape {A.shape}")
        object.__setattr__(self, "A", A)
        if self.n is None:
            object.__setattr__(self, "n", A.shape[1])


@dataclass(frozen=True)
class SeparableProblem:
    """p objective blocks coupled by m linear constraints.

    ``p = 1`` is the augmented-Lagrangian setting, ``p = 2`` the
    classical two-block splitting, ``p >= 3`` the multi-block one; all
    three run through the same code paths, parameterized by p.
    """

    blocks: tuple
    b: np.ndarray
    sense: str = EQ

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "b", _as_vector(self.b, "b"))
        if self.sense not in _SENSES:
            raise ValueError(f"sense must be one of {_SENSES}, got {self.sense!r}")
        if len(self.blocks) < 1:
            raise ValueError("problem needs at least one block")

    @property
    def p(self) -> int:
        return len(self.blocks)

    @property
    def m(self) -> int:
        return self.b.size


@dataclass(frozen=True)
class IterateState:
    """Recursion state: the aggregates A_i x_i and the multiplier.

    This is the full state the correction step recurses on; primal
    points are not stored because the corrected aggregates need not be
    the image of any primal point.
    """

    a: tuple
    lam: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(np.asarray(ai, dtype=float) for ai in self.a))
        object.__setattr__(self, "lam", _as_vector(self.lam, "lam"))


@dataclass(frozen=True)
class PredictorState:
    """Output of one prediction sweep: primal blocks, their aggregates,
    and the predicted multiplier."""

    x_tilde: tuple
    a_tilde: tuple
    lambda_tilde: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x_tilde", tuple(np.asarray(x, dtype=float) for x in self.x_tilde))
        object.__setattr__(self, "a_tilde", tuple(np.asarray(a, dtype=float) for a in self.a_tilde))
        object.__setattr__(self, "lambda_tilde", _as_vector(self.lambda_tilde, "lambda_tilde"))


@dataclass(frozen=True)
class SolverConfig:
    """Run parameters.

    ``variant`` selects the update order: ``"pd"`` solves the primal
    blocks first and the multiplier last, ``"dp"`` updates the
    multiplier first.  The correction factor ``nu`` must lie strictly
    inside (0, 1); the contraction guarantee fails at nu = 1.
    ``record_xi`` stores per-iteration scaled-aggregate snapshots so a
    contraction audit can be run afterwards.
    """

    variant: str = "pd"
    beta: float = 1.0
    nu: float = 0.99
    max_iters: int = 10000
    tol: float = 1e-6
    inner_tol: float = 1e-10
    record_xi: bool = False

    def __post_init__(self):
        if self.variant not in ("pd", "dp"):
            raise ValueError(f"variant must be 'pd' or 'dp', got {self.variant!r}")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if not 0.0 < self.nu < 1.0:
            raise ValueError("nu must lie in (0,1)")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.tol < 0 or self.inner_tol < 0:
            raise ValueError("tolerances must be nonnegative")


# ---------------------------------------------------------------------------
# Operations


def validate_problem(problem: SeparableProblem) -> list:
    """Collect every structural violation of a problem description.

    Returns a list of human-readable messages, one per violation; an
    empty list means the problem is well formed.  Nothing is raised, so
    callers can report all defects at once.
    """
    out = []
    m = problem.m
    for i, blk in enumerate(problem.blocks):
        if blk.A.shape[0] != m:
            out.append(f"block {i}: A has wrong row count ({blk.A.shape[0]} != {m})")
        if blk.n < 1:
            out.append(f"block {i}: dimension must be at least 1")
        if blk.A.shape[1] != blk.n:
            out.append(f"block {i}: A has {blk.A.shape[1]} columns but n={blk.n}")
        th = blk.theta
        if isinstance(th, Quadratic):
            if th.H.shape != (blk.n, blk.n):
                out.append(f"block {i}: quadratic H has shape {th.H.shape}, expected {(blk.n, blk.n)}")
            elif np.max(np.abs(th.H - th.H.T)) > _SYM_TOL:
                out.append(f"block {i}: quadratic H is not symmetric")
            if th.c.shape != (blk.n,):
                out.append(f"block {i}: quadratic c has length {th.c.size}, expected {blk.n}")
        elif isinstance(th, WeightedL1):
            if th.tau < 0:
                out.append(f"block {i}: l1 weight must be nonnegative")
        elif isinstance(th, Custom):
            if not callable(th.value) or not callable(th.solve):
                out.append(f"block {i}: custom atom needs callable value and solve")
        elif not isinstance(th, Zero):
            out.append(f"block {i}: unknown objective atom {type(th).__name__}")
        st = blk.set
        if isinstance(st, Box):
            if st.lo.shape != (blk.n,) or st.hi.shape != (blk.n,):
                out.append(f"block {i}: box bounds do not match dimension {blk.n}")
            elif np.any(st.lo > st.hi):
                out.append(f"block {i}: box has lo > hi")
        elif not isinstance(st, (Free, NonNeg)):
            out.append(f"block {i}: unknown set {type(st).__name__}")
    return out


def theta_value(theta, x) -> float:
    """Evaluate one block objective atom at x."""
    x = np.asarray(x, dtype=float)
    if isinstance(theta, Quadratic):
        return float(0.5 * x @ theta.H @ x + theta.c @ x)
    if isinstance(theta, WeightedL1):
        return float(theta.tau * np.sum(np.abs(x)))
    if isinstance(theta, Zero):
        return 0.0
    if isinstance(theta, Custom):
        return float(theta.value(x))
    raise TypeError(f"unknown objective atom {type(theta).__name__}")


def objective_value(problem: SeparableProblem, x) -> float:
    """sum_i theta_i(x_i) for a list of block vectors."""
    _check_block_dims(problem, x)
    return float(sum(theta_value(blk.theta, xi) for blk, xi in zip(problem.blocks, x)))


def lagrangian_value(problem: SeparableProblem, x, lam) -> float:
    """L(x, lam) = sum_i theta_i(x_i) - lam'(sum_i A_i x_i - b).

    Set membership is not penalized here (it is enforced by the
    subproblem solvers); the value stays finite for diagnostics even at
    set-infeasible points.
    """
    _check_block_dims(problem, x)
    lam = _as_vector(lam, "lam")
    if lam.size != problem.m:
        raise ValueError(f"lam has length {lam.size}, expected {problem.m}")
    r = sum(blk.A @ np.asarray(xi, dtype=float) for blk, xi in zip(problem.blocks, x)) - problem.b
    return objective_value(problem, x) - float(lam @ r)


def feasibility_residual(problem: SeparableProblem, a, lam):
    """Constraint and complementarity residuals from aggregates.

    ``a`` holds the per-block aggregates A_i x_i.  For the equality
    sense the result is (||r||_2, 0) with r = sum_i a_i - b.  For the
    inequality sense the primal residual measures only the violated
    part, min(r, 0), and the complementarity residual is the larger of
    |lam'r| and the norm of the negative part of lam.
    """
    if len(a) != problem.p:
        raise ValueError(f"expected {problem.p} aggregates, got {len(a)}")
    a = [_as_vector(ai, f"a[{i}]") for i, ai in enumerate(a)]
    for i, ai in enumerate(a):
        if ai.size != problem.m:
            raise ValueError(f"a[{i}] has length {ai.size}, expected {problem.m}")
    lam = _as_vector(lam, "lam")
    if lam.size != problem.m:
        raise ValueError(f"lam has length {lam.size}, expected {problem.m}")
    r = sum(a) - problem.b
    if problem.sense == EQ:
        return float(np.linalg.norm(r)), 0.0
    primal = float(np.linalg.norm(np.minimum(r, 0.0)))
    compl = max(float(abs(lam @ r)), float(np.linalg.norm(np.minimum(lam, 0.0))))
    return primal, compl


def _check_block_dims(problem, x):
    if len(x) != problem.p:
        raise ValueError(f"expected {problem.p} block vectors, got {len(x)}")
    for i, (blk, xi) in enumerate(zip(problem.blocks, x)):
        xi = np.asarray(xi)
        if xi.shape != (blk.n,):
            raise ValueError(f"block {i}: vector has shape {xi.shape}, expected ({blk.n},)")


# ---------------------------------------------------------------------------
# JSON problem schema
#
# {"m": int, "sense": "eq"|"ge", "b": [...],
#  "blocks": [{"n": int, "A": [[...], ...],
#              "theta": {"type": "quadratic", "H": [[...]], "c": [...]}
#                     | {"type": "l1", "tau": float}
#                     | {"type": "zero"},
#              "set": {"type": "free"} | {"type": "nonneg"}
#                   | {"type": "box", "lo": [...], "hi": [...]},
#              "ortho_scaled": bool (optional)}, ...]}


def problem_to_json(problem: SeparableProblem) -> dict:
    """Serialize a problem to the plain-JSON schema above."""
    blocks = []
    for blk in problem.blocks:
        th = blk.theta
        if isinstance(th, Quadratic):
            theta = {"type": "quadratic", "H": th.H.tolist(), "c": th.c.tolist()}
        elif isinstance(th, WeightedL1):
            theta = {"type": "l1", "tau": float(th.tau)}
        elif isinstance(th, Zero):
            theta = {"type": "zero"}
        else:
            raise ValueError("custom objective atoms cannot be serialized")
        st = blk.set
        if isinstance(st, Free):
            setd = {"type": "free"}
        elif isinstance(st, NonNeg):
            setd = {"type": "nonneg"}
        elif isinstance(st, Box):
            setd = {"type": "box", "lo": st.lo.tolist(), "hi": st.hi.tolist()}
        else:
            raise ValueError(f"unknown set {type(st).__name__}")
        d = {"n": int(blk.n), "A": blk.A.tolist(), "theta": theta, "set": setd}
        if blk.ortho_scaled:
            d["ortho_scaled"] = True
        blocks.append(d)
    return {
        "m": int(problem.m),
        "sense": problem.sense,
        "b": problem.b.tolist(),
        "blocks": blocks,
    }


def problem_from_json(data: dict) -> SeparableProblem:
    """Build a problem from the JSON schema; raises ValueError naming
    the offending key on malformed input."""
    try:
        sense = data["sense"]
        b = data["b"]
        raw_blocks = data["blocks"]
    except (KeyError, TypeError) as e:
        raise ValueError(f"problem JSON is missing key {e}") from e
    if sense not in _SENSES:
        raise ValueError(f"key 'sense' must be 'eq' or 'ge', got {sense!r}")
    if not isinstance(raw_blocks, list):
        raise ValueError("key 'blocks' must be a list")
    blocks = []
    for i, rb in enumerate(raw_blocks):
        try:
            A = np.asarray(rb["A"], dtype=float)
            theta_d = rb["theta"]
            set_d = rb.get("set", {"type": "free"})
            kind = theta_d["type"]
        except (KeyError, TypeError) as e:
            raise ValueError(f"block {i}: missing key {e}") from e
        if kind == "quadratic":
            try:
                theta = Quadratic(np.asarray(theta_d["H"], dtype=float), theta_d["c"])
            except KeyError as e:
                raise ValueError(f"block {i}: quadratic theta missing key {e}") from e
        elif kind == "l1":
            try:
                theta = WeightedL1(float(theta_d["tau"]))
            except KeyError as e:
                raise ValueError(f"block {i}: l1 theta missing key {e}") from e
        elif kind == "zero":
            theta = Zero()
        else:
            raise ValueError(f"block {i}: unknown theta type {kind!r}")
        skind = set_d.get("type", "free")
        if skind == "free":
            st = Free()
        elif skind == "nonneg":
            st = NonNeg()
        elif skind == "box":
            try:
                st = Box(set_d["lo"], set_d["hi"])
            except KeyError as e:
                raise ValueError(f"block {i}: box set missing key {e}") from e
        else:
            raise ValueError(f"block {i}: unknown set type {skind!r}")
        blocks.append(
            BlockSpec(
                theta=theta,
                set=st,
                A=A,
                n=int(rb.get("n", A.shape[1])),
                ortho_scaled=bool(rb.get("ortho_scaled", False)),
            )
        )
    problem = SeparableProblem(blocks=tuple(blocks), b=np.asarray(b, dtype=float), sense=sense)
    if "m" in data and int(data["m"]) != problem.m:
        raise ValueError(f"key 'm' is {data['m']} but b has length {problem.m}")
    return problem
