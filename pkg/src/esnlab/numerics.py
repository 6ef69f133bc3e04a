"""Minimal dense linear-algebra kernel.

Matrices and vectors are plain float64 numpy arrays with finite entries.
Only the operations the analysis layers need are provided, each with an
explicit tolerance contract:

* ``spectral_norm``   -- largest singular value, 1e-9 relative accuracy.
* ``spectral_radius`` -- largest eigenvalue modulus, 1e-6 relative accuracy.
* ``ridge_solve``     -- regularized least squares via the normal equations.

All randomness (power-iteration start vectors) is seeded internally; the
functions are pure and safe to call concurrently.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import DimensionMismatchError, InvalidInputError, SingularSystemError

_NORM_MAX_ITER = 10_000
_NORM_REL_TOL = 1e-12
_RADIUS_MAX_ITER = 1_000
_RADIUS_RESTARTS = 3
_RADIUS_DENSE_LIMIT = 512
_TINY = 1e-300


def require_finite(a, name: str = "array") -> np.ndarray:
    """Coerce to a float64 array, rejecting NaN/inf entries."""
    a = np.asarray(a, dtype=float)
    if a.size and not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return a


def require_matrix(a, name: str = "matrix", square: bool = False) -> np.ndarray:
    a = require_finite(a, name)
    if a.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-d, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {a.shape}")
    return a


def require_vector(a, name: str = "vector") -> np.ndarray:
    a = require_finite(a, name)
    if a.ndim != 1:
        raise DimensionMismatchError(f"{name} must be 1-d, got shape {a.shape}")
    return a


def spectral_norm(m) -> float:
    """Largest singular value of ``m``.

    Power iteration on the (smaller-sided) Gram matrix, stopping once
    successive estimates agree to 1e-12 relative.  Returns 0.0 for the
    zero matrix.
    """
    m = require_matrix(m, "m")
    if m.size == 0 or not m.any():
        return 0.0
    rows, cols = m.shape
    gram = m.T @ m if cols <= rows else m @ m.T
    dim = gram.shape[0]
    rng = np.random.default_rng(0x5EED)
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    sigma = -1.0
    for _ in range(_NORM_MAX_ITER):
        w = gram @ v
        lam = float(v @ w)  # Rayleigh quotient; v is unit
        sigma_new = math.sqrt(max(lam, 0.0))
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            # v landed in the numerical null space; restart from fresh noise.
            v = rng.standard_normal(dim)
            v /= np.linalg.norm(v)
            continue
        v = w / norm_w
        if sigma >= 0.0 and abs(sigma_new - sigma) <= _NORM_REL_TOL * max(sigma_new, _TINY):
            return float(sigma_new)
        sigma = sigma_new
    return float(sigma)


def _power_radius(m: np.ndarray, rng: np.random.Generator) -> tuple[float, bool]:
    """One power-iteration run; returns (estimate, converged).

    Convergence requires a small eigen-residual, which only a real simple
    dominant eigenvalue can satisfy; rotating (complex-pair) or defective
    iterations report not-converged.
    """
    n = m.shape[0]
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    log_growth: list[float] = []
    lam = 0.0
    for _ in range(_RADIUS_MAX_ITER):
        w = m @ v
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            # Iterate annihilated: inconclusive (nilpotent action or unlucky start).
            return 0.0, False
        lam = float(v @ w)
        log_growth.append(math.log(norm_w))
        residual = np.linalg.norm(w - lam * v)
        v = w / norm_w
        if abs(lam) > 0.0 and residual <= 1e-10 * abs(lam):
            return abs(lam), True
    # Best-effort estimate from the tail growth rate (handles rotating pairs).
    tail = log_growth[len(log_growth) // 2 :]
    return float(math.exp(np.mean(tail))) if tail else abs(lam), False


def spectral_radius(m) -> float:
    """Largest eigenvalue modulus of a square matrix.

    Power iteration with 3 seeded restarts; complex or defective dominant
    spectra defeat plain power iteration, so unconverged runs fall back to
    a dense eigendecomposition (exact at the sizes this library targets).
    """
    m = require_matrix(m, "m", square=True)
    if m.size == 0 or not m.any():
        return 0.0
    rng = np.random.default_rng(0xAD1)
    best = 0.0
    for _ in range(_RADIUS_RESTARTS):
        estimate, converged = _power_radius(m, rng)
        if converged:
            return estimate
        best = max(best, estimate)
    if m.shape[0] <= _RADIUS_DENSE_LIMIT:
        return float(np.max(np.abs(np.linalg.eigvals(m))))
    warnings.warn(
        "power iteration did not converge and the matrix is too large for the "
        "dense fallback; returning the tail growth-rate estimate",
        RuntimeWarning,
        stacklevel=2,
    )
    return best


def ridge_solve(x, y, mu: float) -> np.ndarray:
    """Solve ``argmin_W ||X W - Y||^2 + mu ||W||^2`` for W (n x p).

    Direct solve of the n x n normal equations ``(X'X + mu I) W = X'Y``;
    n is a reservoir dimension here, so a dense factorization is cheap and
    deterministic.  The solution is verified to satisfy the normal equations
    with residual <= 1e-8 * ||X'Y||; a violation (singular or near-singular
    system) raises SingularSystemError advising mu > 0.
    """
    x = require_matrix(x, "x")
    y = require_matrix(y, "y")
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatchError(
            f"x has {x.shape[0]} rows but y has {y.shape[0]}"
        )
    if x.shape[0] < 1:
        raise InvalidInputError("need at least one observation row")
    if not np.isfinite(mu) or mu < 0:
        raise InvalidInputError("mu must be a nonnegative real")
    gram = x.T @ x
    if mu:
        gram = gram + mu * np.eye(x.shape[1])
    rhs = x.T @ y
    try:
        w = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(
            "normal equations are singular; regularize with mu > 0"
        ) from exc
    residual = np.linalg.norm(gram @ w - rhs)
    if residual > 1e-8 * max(np.linalg.norm(rhs), _TINY):
        raise SingularSystemError(
            f"normal equations solved to residual {residual:.3e} only, "
            "the system is numerically singular; regularize with mu > 0"
        )
    return w
