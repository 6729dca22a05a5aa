"""Block-matrix factories and machine verification of the convergence
conditions.

The solver's convergence certificate rests on four dense
(p+1)m-square matrices per variant: the prediction weight Q, the
correction matrix M, a positive-definite metric H with H M = Q, and the
decrease matrix G = Q' + Q - M'HM, which must also be positive
definite.  Every factory assembles its matrix from exact block
templates (entries drawn from {0, +-1, +-nu, k/nu}), never by floating
accumulation, so H M = Q can be checked near machine exactness.

G is double-entry bookkeeping: it is computed from its definition and
cross-checked against the known closed form for the requested variant;
a mismatch signals a factory bug and raises
:class:`ClosedFormMismatchError`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import SeparableProblem

__all__ = [
    "ClosedFormMismatchError",
    "FrameworkMatrices",
    "FrameworkReport",
    "build_lie",
    "build_p",
    "build_q",
    "build_m",
    "build_h",
    "build_g",
    "build_framework",
    "verify_framework",
    "vi_operator",
    "check_skew",
    "xi_from_aggregates",
    "stack_blocks",
    "split_stacked",
]

HMQ_TOL = 1e-13
_VARIANTS = ("pd", "dp")


class ClosedFormMismatchError(AssertionError):
    """Definition-computed G disagrees with its closed form."""


@dataclass(frozen=True)
class FrameworkMatrices:
    """The four certificate matrices for one (variant, p, m, nu)."""

    variant: str
    p: int
    m: int
    nu: float
    Q: np.ndarray
    M: np.ndarray
    H: np.ndarray
    G: np.ndarray


@dataclass(frozen=True)
class FrameworkReport:
    """Numerical check of the convergence conditions for one case."""

    variant: str
    p: int
    m: int
    nu: float
    hm_eq_q_maxerr: float
    h_min_eig: float
    g_min_eig: float
    qtq_min_eig: float

    @property
    def passed(self) -> bool:
        return (
            self.hm_eq_q_maxerr <= HMQ_TOL
            and self.h_min_eig > 0.0
            and self.g_min_eig > 0.0
            and self.qtq_min_eig > 0.0
        )


def _check_variant(variant):
    if variant not in _VARIANTS:
        raise ValueError(f"variant must be one of {_VARIANTS}, got {variant!r}")


def _check_nu(nu):
    if not 0.0 < nu < 1.0:
        raise ValueError("nu must lie in (0,1)")


def build_lie(p: int, m: int):
    """The p x p block matrices L (lower triangle of identities) and I,
    plus the 1 x p block row E of identities.

    They satisfy L^{-1} = I - subdiagonal identities and
    L' + L = I + E'E, which the factories below lean on.
    """
    if p < 1 or m < 1:
        raise ValueError("p and m must be at least 1")
    eye_m = np.eye(m)
    L = np.kron(np.tril(np.ones((p, p))), eye_m)
    I = np.eye(p * m)
    E = np.kron(np.ones((1, p)), eye_m)
    return L, I, E


def _linv_t(p, m):
    # Transposed inverse of L: identity diagonal, -I on the superdiagonal.
    T = np.eye(p)
    T -= np.eye(p, k=1)
    return np.kron(T, np.eye(m))


def _llt(p, m):
    # (L L')_{ij} = min(i, j) identity blocks, 1-based.
    idx = np.arange(1, p + 1)
    return np.kron(np.minimum.outer(idx, idx).astype(float), np.eye(m))


def build_p(problem: SeparableProblem, beta: float) -> np.ndarray:
    """Block-diagonal scaling that maps a stacked point (x_1..x_p, lam)
    to the scaled aggregates (sqrt(beta) A_i x_i, lam/sqrt(beta))."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    m = problem.m
    sq = np.sqrt(beta)
    n_total = sum(blk.n for blk in problem.blocks)
    P = np.zeros(((problem.p + 1) * m, n_total + m))
    col = 0
    for i, blk in enumerate(problem.blocks):
        P[i * m : (i + 1) * m, col : col + blk.n] = sq * blk.A
        col += blk.n
    P[problem.p * m :, col:] = np.eye(m) / sq
    return P


def build_q(variant: str, p: int, m: int) -> np.ndarray:
    """Prediction weight matrix in scaled-aggregate coordinates; all
    entries are 0 or +-1.

    Primal-first: [[L, E'], [0, I_m]].  Multiplier-first:
    [[L, 0], [-E, I_m]].
    """
    _check_variant(variant)
    L, _, E = build_lie(p, m)
    eye_m = np.eye(m)
    if variant == "pd":
        return np.block([[L, E.T], [np.zeros((m, p * m)), eye_m]])
    return np.block([[L, np.zeros((p * m, m))], [-E, eye_m]])


def build_m(variant: str, p: int, m: int, nu: float) -> np.ndarray:
    """Correction matrix in scaled-aggregate coordinates.

    Primal-first: [[nu L^{-T}, 0], [-nu E L^{-T}, I]] with
    E L^{-T} = [I, 0, ..., 0].  Multiplier-first:
    [[nu L^{-T}, 0], [-E, I]].
    """
    _check_variant(variant)
    _check_nu(nu)
    linv_t = _linv_t(p, m)
    eye_m = np.eye(m)
    zeros = np.zeros((p * m, m))
    if variant == "pd":
        el_t = np.eye(m, p * m)  # E L^{-T} keeps only the first block
        return np.block([[nu * linv_t, zeros], [-nu * el_t, eye_m]])
    _, _, E = build_lie(p, m)
    return np.block([[nu * linv_t, zeros], [-E, eye_m]])


def build_h(variant: str, p: int, m: int, nu: float) -> np.ndarray:
    """Positive-definite metric with H M = Q.

    Primal-first: [[(1/nu) LL' + E'E, E'], [E, I]].  Multiplier-first:
    [[(1/nu) LL', 0], [0, I]].
    """
    _check_variant(variant)
    _check_nu(nu)
    llt = _llt(p, m) / nu
    eye_m = np.eye(m)
    if variant == "pd":
        _, _, E = build_lie(p, m)
        return np.block([[llt + E.T @ E, E.T], [E, eye_m]])
    return np.block([[llt, np.zeros((p * m, m))], [np.zeros((m, p * m)), eye_m]])


def _closed_form_g(variant, p, m, nu):
    eye_m = np.eye(m)
    if variant == "pd":
        _, _, E = build_lie(p, m)
        top = (1.0 - nu) * np.eye(p * m) + E.T @ E
        return np.block([[top, E.T], [E, eye_m]])
    diag = np.concatenate([np.full(p * m, 1.0 - nu), np.ones(m)])
    return np.diag(diag)


def build_g(variant: str, p: int, m: int, nu: float) -> np.ndarray:
    """Decrease matrix G = Q' + Q - M'HM, computed from the factories
    and asserted against its closed form.

    Closed forms: [[(1-nu)I + E'E, E'], [E, I]] for the primal-first
    variant and diag((1-nu)I_pm, I_m) for the multiplier-first one.
    Raises :class:`ClosedFormMismatchError` on disagreement beyond
    1e-13, which would indicate a factory bug.
    """
    Q = build_q(variant, p, m)
    M = build_m(variant, p, m, nu)
    H = build_h(variant, p, m, nu)
    # Associate as M'(HM): HM is exactly Q up to roundoff, which keeps
    # the intermediate entries O(1) and the final error tiny.
    G = (Q.T + Q) - M.T @ (H @ M)
    ref = _closed_form_g(variant, p, m, nu)
    err = float(np.max(np.abs(G - ref)))
    if err > HMQ_TOL:
        raise ClosedFormMismatchError(
            f"G mismatch {err:.3e} for variant={variant}, p={p}, m={m}, nu={nu}"
        )
    return G


def build_framework(variant: str, p: int, m: int, nu: float) -> FrameworkMatrices:
    """All four certificate matrices for one case."""
    return FrameworkMatrices(
        variant=variant,
        p=p,
        m=m,
        nu=nu,
        Q=build_q(variant, p, m),
        M=build_m(variant, p, m, nu),
        H=build_h(variant, p, m, nu),
        G=build_g(variant, p, m, nu),
    )


def verify_framework(variant: str, p: int, m: int, nu: float) -> FrameworkReport:
    """Machine-check the convergence conditions for one case.

    Reports max|HM - Q| and the smallest eigenvalues of H, G, and
    Q' + Q; the case passes when the first is at most 1e-13 and the
    minima are strictly positive.
    """
    _check_variant(variant)
    _check_nu(nu)
    fw = build_framework(variant, p, m, nu)
    maxerr = float(np.max(np.abs(fw.H @ fw.M - fw.Q)))
    h_min = float(np.linalg.eigvalsh((fw.H + fw.H.T) / 2.0)[0])
    g_min = float(np.linalg.eigvalsh((fw.G + fw.G.T) / 2.0)[0])
    qtq = fw.Q.T + fw.Q
    qtq_min = float(np.linalg.eigvalsh((qtq + qtq.T) / 2.0)[0])
    return FrameworkReport(
        variant=variant,
        p=p,
        m=m,
        nu=nu,
        hm_eq_q_maxerr=maxerr,
        h_min_eig=h_min,
        g_min_eig=g_min,
        qtq_min_eig=qtq_min,
    )


# ---------------------------------------------------------------------------
# Stacked-point utilities


def stack_blocks(x_blocks, lam) -> np.ndarray:
    """Concatenate block vectors and the multiplier into one point."""
    return np.concatenate([np.asarray(xi, dtype=float).ravel() for xi in x_blocks] + [np.asarray(lam, dtype=float).ravel()])


def split_stacked(problem: SeparableProblem, w):
    """Inverse of :func:`stack_blocks` for a given problem."""
    w = np.asarray(w, dtype=float)
    expected = sum(blk.n for blk in problem.blocks) + problem.m
    if w.size != expected:
        raise ValueError(f"stacked point has length {w.size}, expected {expected}")
    blocks, pos = [], 0
    for blk in problem.blocks:
        blocks.append(w[pos : pos + blk.n])
        pos += blk.n
    return blocks, w[pos:]


def vi_operator(problem: SeparableProblem, w) -> np.ndarray:
    """The first-order operator F(w) = (-A_i' lam ...; sum_i A_i x_i - b)
    on a stacked point."""
    x_blocks, lam = split_stacked(problem, w)
    parts = [-(blk.A.T @ lam) for blk in problem.blocks]
    parts.append(sum(blk.A @ xi for blk, xi in zip(problem.blocks, x_blocks)) - problem.b)
    return np.concatenate(parts)


def check_skew(problem: SeparableProblem, w1, w2) -> float:
    """(w1 - w2)'(F(w1) - F(w2)); identically zero in exact arithmetic
    because the linear part of F is skew-symmetric."""
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    return float((w1 - w2) @ (vi_operator(problem, w1) - vi_operator(problem, w2)))


def xi_from_aggregates(a, lam, beta) -> np.ndarray:
    """Scaled-aggregate coordinates (sqrt(beta) a_1, ..., lam/sqrt(beta))
    built straight from the aggregates."""
    sq = np.sqrt(beta)
    parts = [sq * np.asarray(ai, dtype=float) for ai in a]
    parts.append(np.asarray(lam, dtype=float) / sq)
    return np.concatenate(parts)
