"""Dense linear solves and the Perron root of non-negative matrices."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.sparse.csgraph import connected_components

__all__ = ["SingularMatrixError", "SpectralRadius", "solve_linear", "spectral_radius"]


class SingularMatrixError(ArithmeticError):
    pass


def solve_linear(M, b) -> np.ndarray:
    """Solve ``M x = b`` by LU with partial pivoting.

    Raises
    ------
    SingularMatrixError
        If a pivot is negligible relative to ``M`` or the residual bound
        ``||Mx - b||_inf <= 1e-10 * max(1, ||b||_inf)`` cannot be met.
    """
    M = np.asarray(M, dtype=float)
    b = np.asarray(b, dtype=float)
    n = M.shape[0]
    if M.shape != (n, n) or b.shape != (n,):
        raise ValueError(f"shape mismatch: M {M.shape}, b {b.shape}")
    scale = max(np.abs(M).max(initial=0.0), np.finfo(float).tiny)
    with warnings.catch_warnings():
        # exact singularity is reported below as SingularMatrixError
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=True)
    if np.abs(np.diag(lu)).min(initial=np.inf) <= n * np.finfo(float).eps * scale:
        raise SingularMatrixError("matrix is singular to working precision")
    x = scipy.linalg.lu_solve((lu, piv), b)
    resid = np.abs(M @ x - b).max(initial=0.0)
    if not np.isfinite(resid) or resid > 1e-10 * max(1.0, np.abs(b).max(initial=0.0)):
        raise SingularMatrixError(f"residual {resid:.3e} exceeds bound; matrix is near singular")
    return x


_STABLE_SQUARINGS = 2
_MAX_REBALANCE = 4


@dataclass(frozen=True)
class SpectralRadius:
    """Perron root estimate with a Collatz-Wielandt bracket ``lower <= rho <= upper``."""

    rho: float
    converged: bool
    iterations: int
    lower: float
    upper: float

    def __float__(self):
        return self.rho


def _perron_block(C, tol, max_squarings):
    """Perron root of an irreducible non-negative block: ``(rho, converged, squarings, lower, upper)``."""
    n = C.shape[0]
    if n == 1:
        r = float(C[0, 0])
        return r, True, 0, r, r
    tiny = np.finfo(float).tiny
    lower, upper = 0.0, np.inf
    est = np.nan
    total = 0
    for _ in range(_MAX_REBALANCE):
        scale = C.max()
        Cs = C / scale
        P = Cs + np.eye(n)
        est, stable = np.nan, 0
        x = np.ones(n)
        for _ in range(max_squarings + 1):
            x = P.sum(axis=1)               # P e
            x = np.maximum(x / x.max(), tiny)
            y = Cs @ x
            ratio = y / x
            lower = max(lower, ratio.min() * scale)
            upper = min(upper, ratio.max() * scale)
            if upper - lower <= tol * max(upper, tiny):
                return 0.5 * (lower + upper), True, total, lower, upper
            prev, est = est, np.linalg.norm(y) / np.linalg.norm(x) * scale
            stable = stable + 1 if abs(est - prev) <= tol * est else 0
            total += 1
            if stable >= _STABLE_SQUARINGS:
                break
            P = P @ P
            P /= P.max()
        # the shift drowned rho in rounding: move to the similar matrix
        # diag(x)^-1 C diag(x), whose row sums are already close to rho
        C = C * x[None, :] / x[:, None]
    return float(np.clip(est, lower, upper)), False, total, lower, upper


def spectral_radius(B, tol: float = 1e-10, max_squarings: int = 64) -> SpectralRadius:
    """Spectral radius of an elementwise non-negative square matrix.

    ``B`` is split into strongly connected components; the spectral radius
    is the largest Perron root of the irreducible diagonal blocks. Each
    block is handled by power iteration on ``C + I`` (scaled) from the
    all-ones vector, accelerated by repeated squaring: after ``k``
    squarings the iterate is ``(C + I)^(2^k) e``. Products of non-negative
    matrices are free of cancellation, so squaring loses no accuracy, and
    the unit shift keeps periodic (e.g. bipartite) blocks from oscillating.

    Each iterate ``x > 0`` gives rigorous Collatz-Wielandt bounds
    ``min_i (Cx)_i/x_i <= rho <= max_i (Cx)_i/x_i``; a block is converged
    when they agree to relative tolerance ``tol``. When the estimate
    stagnates first (badly scaled blocks), the block is rebalanced by the
    diagonal similarity of the current iterate and the iteration restarts.
    ``iterations`` counts squarings over all blocks.
    """
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    if B.ndim != 2 or B.shape != (n, n):
        raise ValueError("B must be square")
    if np.any(B < 0) or not np.all(np.isfinite(B)):
        raise ValueError("spectral_radius requires a finite, elementwise non-negative matrix")
    if n == 0 or not B.any():
        return SpectralRadius(0.0, True, 0, 0.0, 0.0)

    n_comp, labels = connected_components(B > 0, directed=True, connection="strong")
    blocks = []
    for comp in range(n_comp):
        idx = np.flatnonzero(labels == comp)
        C = B[np.ix_(idx, idx)]
        if C.any():
            blocks.append(_perron_block(C, tol, max_squarings))
    if not blocks:
        # every block is a zero 1x1: B is nilpotent
        return SpectralRadius(0.0, True, 0, 0.0, 0.0)
    lower = max(b[3] for b in blocks)
    upper = max(b[4] for b in blocks)
    rho = max(b[0] for b in blocks)
    # an unconverged block only matters if it could hold the maximum
    converged = all(b[1] or b[4] < lower for b in blocks)
    return SpectralRadius(rho, converged, sum(b[2] for b in blocks), lower, upper)
