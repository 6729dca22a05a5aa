"""Gauss-Seidel prediction sweeps.

One sweep visits the blocks in their given order; block i's target
vector folds in the fresh updates of blocks 1..i-1, so the sweep is
inherently sequential.  The two variants differ only in which
multiplier the block solves see:

* ``predict_pd``: blocks first using the current multiplier, then the
  multiplier from the predicted aggregates;
* ``predict_dp``: multiplier first from the current aggregates, then
  the blocks using the fresh multiplier.
"""

from __future__ import annotations

import numpy as np

from .model import IterateState, PredictorState, SeparableProblem
from .prox import (
    NonConvergenceError,
    SingularSystemError,
    SubproblemRequest,
    solve_block_subproblem,
    solve_lambda_subproblem,
)

__all__ = ["predict_pd", "predict_dp"]


def _sweep_blocks(problem, state, lam, beta, inner_tol, warm_start):
    """Sequential block solves sharing the multiplier vector ``lam``.

    Block i minimizes theta_i(x) + (beta/2)||A_i x - v_i||^2 with
    v_i = a_i - sum_{j<i}(a~_j - a_j) + lam/beta, which only needs the
    aggregates, never the raw primal blocks.
    """
    x_tilde, a_tilde = [], []
    drift = np.zeros(problem.m)
    shift = lam / beta
    for i, blk in enumerate(problem.blocks):
        v = state.a[i] - drift + shift
        req = SubproblemRequest(
            theta=blk.theta,
            set=blk.set,
            A=blk.A,
            beta=beta,
            v=v,
            ortho_scaled=blk.ortho_scaled,
        )
        x0 = warm_start[i] if warm_start is not None else None
        try:
            xi, ai = solve_block_subproblem(req, inner_tol, x0=x0)
        except (SingularSystemError, NonConvergenceError) as e:
            raise type(e)(f"block {i}: {e}") from e
        x_tilde.append(xi)
        a_tilde.append(ai)
        drift = drift + (ai - state.a[i])
    return x_tilde, a_tilde


def _check_state(problem, state):
    if len(state.a) != problem.p:
        raise ValueError(f"state has {len(state.a)} aggregates, expected {problem.p}")
    if state.lam.size != problem.m:
        raise ValueError(f"state multiplier has length {state.lam.size}, expected {problem.m}")


def predict_pd(
    problem: SeparableProblem,
    state: IterateState,
    beta: float,
    inner_tol: float,
    warm_start=None,
) -> PredictorState:
    """Primal-first prediction sweep: blocks 1..p, then the multiplier.

    Every block solve uses the incoming multiplier; the multiplier
    update then uses the freshly predicted aggregates.
    """
    _check_state(problem, state)
    x_tilde, a_tilde = _sweep_blocks(problem, state, state.lam, beta, inner_tol, warm_start)
    residual = sum(a_tilde) - problem.b
    lam_tilde = solve_lambda_subproblem(state.lam, residual, beta, problem.sense)
    return PredictorState(tuple(x_tilde), tuple(a_tilde), lam_tilde)


def predict_dp(
    problem: SeparableProblem,
    state: IterateState,
    beta: float,
    inner_tol: float,
    warm_start=None,
) -> PredictorState:
    """Multiplier-first prediction sweep.

    The multiplier is updated from the *current* aggregates before any
    block moves, and every block solve then sees the fresh multiplier.
    """
    _check_state(problem, state)
    residual = sum(state.a) - problem.b
    lam_tilde = solve_lambda_subproblem(state.lam, residual, beta, problem.sense)
    x_tilde, a_tilde = _sweep_blocks(problem, state, lam_tilde, beta, inner_tol, warm_start)
    return PredictorState(tuple(x_tilde), tuple(a_tilde), lam_tilde)
