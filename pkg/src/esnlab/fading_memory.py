"""Weighted sup-norm on input sequences, fading-memory verification, and
pullback ensemble-convergence checks.

The weighted norm discounts the past geometrically:

    ||u||_lam = max over t, k of lam^k ||u[t-k]||,   0 < lam < 1,

with k limited by the configured horizon and u[t-k] treated as zero for
k > t (causal zero-padding).  For a certified reservoir the input-to-state
filter is Lipschitz under this norm, which the empirical check verifies
trajectory by trajectory.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import certification
from .errors import InvalidInputError, UncertifiedReservoirError
from .reservoir import Reservoir, _as_input_array


@dataclass(frozen=True)
class WeightedNormConfig:
    lam: float  # decay factor, strictly inside (0, 1)
    horizon: int  # truncation depth for the past-discount index k

    def __post_init__(self):
        if not 0.0 < self.lam < 1.0:
            raise InvalidInputError("lam must lie strictly inside (0, 1)")
        if self.horizon < 1:
            raise InvalidInputError("horizon must be >= 1")


def weighted_norm(u, cfg: WeightedNormConfig) -> float:
    """Exponentially weighted sup-norm of a finite sequence of vectors.

    Accepts shape (T,) scalars or (T, m) vectors; the empty sequence maps
    to 0 by convention (with a warning).
    """
    arr = np.asarray(u, dtype=float)
    if arr.size == 0:
        warnings.warn("weighted_norm of an empty sequence is 0 by convention",
                      RuntimeWarning, stacklevel=2)
        return 0.0
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InvalidInputError(f"expected a (T,) or (T, m) sequence, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("sequence contains non-finite entries")
    norms = np.linalg.norm(arr, axis=1)
    t_len = len(norms)
    best = np.zeros(t_len)
    for k in range(min(cfg.horizon, t_len - 1) + 1):
        contrib = cfg.lam**k * norms[: t_len - k]
        np.maximum(best[k:], contrib, out=best[k:])
    return float(best.max())


@dataclass(frozen=True)
class FmpCheckReport:
    lhs: float  # terminal state distance under the two inputs
    rhs: float  # C * ||u - v||_lam
    holds: bool
    lam: float
    lipschitz_constant: float

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "lam": self.lam,
            "lipschitz_constant": self.lipschitz_constant,
        }


def empirical_fmp_check(
    res: Reservoir,
    u,
    v,
    lam: float,
    horizon: int,
) -> FmpCheckReport:
    """Verify the weighted-norm Lipschitz bound on one input pair.

    Drives the reservoir from a common zero state under u and v for
    ``horizon`` steps and checks

        ||x_T(u) - x_T(v)|| <= C ||u - v||_lam + 1e-9

    with C from the certificate.  Refuses uncertified reservoirs: the
    bound's hypotheses fail there.
    """
    cert = certification.certify_contraction(res)
    if not cert.passes:
        raise UncertifiedReservoirError(
            "empirical_fmp_check requires a certified (contractive) reservoir"
        )
    u = _as_input_array(u, res.m)
    v = _as_input_array(v, res.m)
    if len(u) < horizon or len(v) < horizon:
        raise InvalidInputError(f"both inputs must provide at least horizon={horizon} steps")
    constant = certification.fmp_lipschitz_constant(cert, lam)
    x0 = np.zeros(res.n)
    xu = res.drive(x0, u[:horizon]).states[-1]
    xv = res.drive(x0, v[:horizon]).states[-1]
    lhs = float(np.linalg.norm(xu - xv))
    cfg = WeightedNormConfig(lam=lam, horizon=horizon)
    rhs = constant * weighted_norm(u[:horizon] - v[:horizon], cfg)
    return FmpCheckReport(
        lhs=lhs,
        rhs=float(rhs),
        holds=bool(lhs <= rhs + 1e-9),
        lam=lam,
        lipschitz_constant=float(constant),
    )


@dataclass(frozen=True)
class PullbackReport:
    """Ensemble diameters per step and whether they collapsed to a point."""

    diameters: np.ndarray  # (T + 1,) max pairwise distance per step
    singleton: bool
    tol: float

    def to_dict(self) -> dict:
        return {
            "singleton": self.singleton,
            "tol": self.tol,
            "final_diameter": float(self.diameters[-1]),
            "steps": len(self.diameters) - 1,
        }


_EXACT_PAIRWISE_LIMIT = 64
_SAMPLED_PAIRS = 2048


def _ensemble_diameter(states: np.ndarray, pair_idx) -> float:
    """Max pairwise distance; exact for small ensembles, sampled above."""
    if pair_idx is None:
        gram = states @ states.T
        sq = np.diag(gram)
        d2 = sq[:, None] + sq[None, :] - 2.0 * gram
        return float(np.sqrt(max(d2.max(), 0.0)))
    i, j = pair_idx
    return float(np.linalg.norm(states[i] - states[j], axis=1).max())


def pullback_convergence(
    res: Reservoir,
    inputs,
    ensemble_size: int,
    init_box_radius: float,
    seed: int = 0,
    tol: float = 1e-9,
) -> PullbackReport:
    """Evolve an ensemble of initial states under one common input and track
    its diameter step by step.

    For a contractive reservoir the diameters decay geometrically and the
    ensemble collapses onto the single input-determined trajectory;
    ``singleton`` records whether the final diameter fell below ``tol``.
    """
    if ensemble_size < 2:
        raise InvalidInputError("ensemble_size must be >= 2")
    if init_box_radius <= 0:
        raise InvalidInputError("init_box_radius must be positive")
    inputs = _as_input_array(inputs, res.m)
    if len(inputs) == 0:
        raise InvalidInputError("empty input sequence")
    rng = np.random.default_rng(seed)
    states = rng.uniform(-init_box_radius, init_box_radius, (ensemble_size, res.n))
    pair_idx = None
    if ensemble_size > _EXACT_PAIRWISE_LIMIT:
        i = rng.integers(ensemble_size, size=_SAMPLED_PAIRS)
        j = rng.integers(ensemble_size, size=_SAMPLED_PAIRS)
        keep = i != j
        pair_idx = (i[keep], j[keep])
    diameters = np.empty(len(inputs) + 1)
    diameters[0] = _ensemble_diameter(states, pair_idx)
    a = res.leak_rate
    fn = res.activation.fn
    w_t = res.w.T
    w_in_t = res.w_in.T
    for t, u in enumerate(inputs):
        pre = states @ w_t + u @ w_in_t + res.b
        states = (1.0 - a) * states + a * fn(pre)
        diameters[t + 1] = _ensemble_diameter(states, pair_idx)
    return PullbackReport(
        diameters=diameters,
        singleton=bool(diameters[-1] < tol),
        tol=tol,
    )
