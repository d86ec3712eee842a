"""Stationary distributions of row-stochastic matrices.

The stationary vector is the normalized left eigenvector with eigenvalue one.
It is computed by a direct linear solve of the balance equations with one row
replaced by the normalization constraint; an averaged power iteration serves
as fallback when the solve is ill-conditioned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import get_lapack_funcs, lu_factor, lu_solve
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import NonStochasticError, NoUniqueStationaryError

ROW_SUM_TOL = 1e-10
RESIDUAL_TOL = 1e-8
NEGATIVE_CLAMP = 1e-12
MIN_RCOND = 1e-12  # fall back when estimated condition number exceeds 1e12


@dataclass(frozen=True)
class CommunicatingClasses:
    """Strongly connected components of the positive-entry digraph."""

    classes: tuple
    closed: tuple

    @property
    def n_closed(self) -> int:
        return int(sum(self.closed))


def classify_support(matrix) -> CommunicatingClasses:
    """Communicating classes of a nonnegative matrix's support graph.

    A class is closed when no positive entry leads out of it; a unique
    stationary distribution exists iff exactly one class is closed.
    """
    adj = np.asarray(matrix, dtype=float) > 0
    n_comp, comp = connected_components(
        csr_matrix(adj), directed=True, connection="strong"
    )
    classes = []
    closed = []
    for c in range(n_comp):
        members = np.flatnonzero(comp == c)
        others = np.flatnonzero(comp != c)
        classes.append(tuple(int(i) for i in members))
        closed.append(not adj[np.ix_(members, others)].any())
    return CommunicatingClasses(tuple(classes), tuple(closed))


def _validated(matrix) -> np.ndarray:
    p = np.asarray(matrix, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise NonStochasticError(f"expected a square matrix, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise NonStochasticError("matrix contains non-finite entries")
    if np.any(p < 0):
        raise NonStochasticError(
            f"negative entry {p.min():.3e} in transition matrix"
        )
    row_err = np.abs(p.sum(axis=1) - 1.0).max()
    if row_err > ROW_SUM_TOL:
        raise NonStochasticError(
            f"row sums deviate from one by {row_err:.3e} (tolerance {ROW_SUM_TOL})"
        )
    return p


def _residual(pi: np.ndarray, p: np.ndarray) -> float:
    return float(np.abs(pi @ p - pi).max())


def _finalize(x: np.ndarray) -> np.ndarray | None:
    """Clamp eigenvector rounding noise and normalize, or reject."""
    if not np.isfinite(x).all():
        return None
    low = x.min()
    if low < -NEGATIVE_CLAMP:
        return None
    if low < 0:
        x = np.where(x < 0, 0.0, x)
    total = x.sum()
    if total <= 0:
        return None
    return x / total


def _solve_direct(p: np.ndarray) -> np.ndarray | None:
    """Solve (P^T - I) x = 0 with the last equation replaced by sum(x) = 1.

    The replaced equation is redundant (columns of P^T - I sum to zero), so
    the system is nonsingular exactly when the stationary vector is unique.
    A plain solve is attempted first and kept when its stationarity residual
    is good; otherwise the system is refactored with a condition estimate,
    and an estimated condition number above 1e12 defers to the fallback.
    """
    n = p.shape[0]
    a = p.T - np.eye(n)
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = _finalize(np.linalg.solve(a, b))
        if pi is not None and _residual(pi, p) <= RESIDUAL_TOL:
            return pi
    except np.linalg.LinAlgError:
        pass
    anorm = np.abs(a).sum(axis=0).max()  # 1-norm, needed by gecon
    try:
        lu, piv = lu_factor(a)
    except np.linalg.LinAlgError:
        return None
    (gecon,) = get_lapack_funcs(("gecon",), (a,))
    rcond, info = gecon(lu, anorm)
    if info != 0 or not np.isfinite(rcond) or rcond < MIN_RCOND:
        return None
    pi = _finalize(lu_solve((lu, piv), b))
    if pi is None or _residual(pi, p) > RESIDUAL_TOL:
        return None
    return pi


def _power_averaged(p: np.ndarray, max_iter: int = 200_000) -> np.ndarray | None:
    """Power iteration with iterate averaging.

    Each step averages the current iterate with its image, x <- (x + xP) / 2,
    which keeps periodic supports converging while preserving the fixed point.
    """
    n = p.shape[0]
    x = np.full(n, 1.0 / n)
    for k in range(max_iter):
        x_new = 0.5 * (x + x @ p)
        x_new /= x_new.sum()
        if k % 32 == 31 and _residual(x_new, p) <= RESIDUAL_TOL:
            return _finalize(x_new)
        x = x_new
    return None


def _stationary_core(p: np.ndarray) -> np.ndarray:
    """Solver body; assumes the row-stochastic contract already holds."""
    n = p.shape[0]
    if n == 1:
        return np.ones(1)
    # strictly positive matrices are irreducible; only check sparser supports
    if not (p > 0).all():
        support = classify_support(p)
        if support.n_closed != 1:
            raise NoUniqueStationaryError(
                f"support graph has {support.n_closed} closed communicating "
                "classes; the stationary distribution is not unique"
            )
    pi = _solve_direct(p)  # residual-checked internally
    if pi is None:
        pi = _power_averaged(p)
        if pi is None or _residual(pi, p) > RESIDUAL_TOL:
            raise NoUniqueStationaryError(
                "failed to resolve the stationary distribution to the required "
                "residual tolerance"
            )
    return pi


def stationary(matrix) -> np.ndarray:
    """Stationary distribution of a row-stochastic matrix.

    Parameters
    ----------
    matrix : array-like, shape (I, I)
        Nonnegative entries, rows summing to one within 1e-10.

    Returns
    -------
    ndarray, shape (I,)
        Nonnegative vector pi with ``pi @ matrix == pi`` within an
        infinity-norm residual of 1e-8 and ``pi.sum() == 1`` within 1e-12.

    Raises
    ------
    NonStochasticError
        If the matrix violates the row-stochastic contract.
    NoUniqueStationaryError
        If the support graph has more than one closed communicating class,
        or the vector could not be resolved numerically.
    """
    return _stationary_core(_validated(matrix))
