"""Algebraic and empirical echo-state-property tests.

The algebraic certificate checks the sufficient contraction condition
L_phi * sigma_max(W) < 1 (leak-adjusted); passing it guarantees both the
echo-state property (initial conditions wash out) and geometric fading
memory.  Failing gives no guarantee either way -- the empirical
two-trajectory test probes that regime, and the ReLU state bound covers
unbounded activations with controlled gain.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import InvalidInputError, UncertifiedReservoirError
from .reservoir import Reservoir

_DISTANCE_FLOOR = 1e-14


@dataclass(frozen=True)
class Certificate:
    """Result of the algebraic contraction test.

    ``contraction_factor`` is the leak-adjusted state Lipschitz bound
    (1 - alpha) + alpha * l_phi * w_norm; ``passes`` holds exactly when it
    is < 1.  ``l_u_bound`` bounds the update's sensitivity to the input,
    ``l_x_bound`` equals the contraction factor.  ``note`` carries the
    bounded-state caveat for unbounded activations.
    """

    l_phi: float
    w_norm: float
    spectral_radius: float
    contraction_factor: float
    passes: bool
    l_u_bound: float
    l_x_bound: float
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "l_phi": self.l_phi,
            "w_norm": self.w_norm,
            "spectral_radius": self.spectral_radius,
            "contraction_factor": self.contraction_factor,
            "passes": self.passes,
            "l_u_bound": self.l_u_bound,
            "l_x_bound": self.l_x_bound,
            "note": self.note,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def certify_contraction(res: Reservoir) -> Certificate:
    """Evaluate the spectral-norm contraction certificate for a reservoir.

    Uses the spectral norm (sufficient condition), not the popular
    spectral-radius rule; both are reported so callers can flag the gap.
    """
    l_phi = res.activation.lipschitz
    w_norm = numerics.spectral_norm(res.w)
    rho = numerics.spectral_radius(res.w)
    a = res.leak_rate
    factor = (1.0 - a) + a * l_phi * w_norm
    l_u = a * l_phi * numerics.spectral_norm(res.w_in)
    note = ""
    if not res.activation.bounded:
        note = (
            f"activation '{res.activation.kind}' is unbounded: the contraction "
            "factor alone does not bound the state; combine with "
            "relu_state_bound-style gain control for bounded inputs"
        )
    return Certificate(
        l_phi=float(l_phi),
        w_norm=float(w_norm),
        spectral_radius=float(rho),
        contraction_factor=float(factor),
        passes=bool(factor < 1.0),
        l_u_bound=float(l_u),
        l_x_bound=float(factor),
        note=note,
    )


def relu_state_bound(gamma: float, m_b: float, x0_norm: float, t: int) -> float:
    """State-norm envelope for a rectifier reservoir with gain gamma < 1.

    Iterating ||x_t|| <= gamma ||x_{t-1}|| + M_b gives

        ||x_t|| <= (||x_0|| - M_b / (1 - gamma)) gamma^t + M_b / (1 - gamma)

    where M_b = sigma_max(W_in) * M + ||b|| for inputs bounded by M
    (computed by the caller).
    """
    if not gamma < 1.0:
        raise InvalidInputError("gamma must be < 1; the bound is vacuous otherwise")
    if gamma < 0.0 or m_b < 0.0 or x0_norm < 0.0 or t < 0:
        raise InvalidInputError("gamma, m_b, x0_norm and t must be nonnegative")
    steady = m_b / (1.0 - gamma)
    return (x0_norm - steady) * gamma**t + steady


@dataclass(frozen=True)
class EspTestReport:
    """Outcome of the two-trajectory convergence probe.

    ``fitted_rate`` is the worst (largest) least-squares slope of
    log-distance vs. time across trials, fitted only over the window where
    distances stay above the 1e-14 numerical floor for at least 10 steps;
    NaN when no trial has such a window.  ``max_distances`` keeps the
    per-step worst-case distance for reporting.
    """

    converged: bool
    final_distance: float
    fitted_rate: float
    trials: int
    horizon: int
    max_distances: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "final_distance": self.final_distance,
            "fitted_rate": None if math.isnan(self.fitted_rate) else self.fitted_rate,
            "trials": self.trials,
            "horizon": self.horizon,
        }


def _fit_rate(distances: np.ndarray) -> float:
    """Slope of log distance vs. t over the pre-floor window (NaN if < 10 pts)."""
    below = np.nonzero(distances < _DISTANCE_FLOOR)[0]
    end = below[0] if len(below) else len(distances)
    if end < 10:
        return float("nan")
    t = np.arange(end)
    return float(np.polyfit(t, np.log(distances[:end]), 1)[0])


def empirical_esp_test(
    res: Reservoir,
    inputs,
    x0_pairs: int = 8,
    seed: int = 0,
    horizon: int = 2000,
    tol: float = 1e-6,
) -> EspTestReport:
    """Drive paired trajectories from random initial states and watch the gap.

    Initial states are sampled uniformly in [-1, 1]^n; both members of a
    pair see the same input.  ``converged`` requires every pair's final
    distance below ``tol``.  Non-convergence makes no chaoticity claim.
    """
    if horizon < 50:
        raise InvalidInputError("horizon must be >= 50")
    if x0_pairs < 1:
        raise InvalidInputError("need at least one pair of initial states")
    from .reservoir import _as_input_array

    inputs = _as_input_array(inputs, res.m)
    if len(inputs) < horizon:
        raise InvalidInputError(
            f"need at least horizon={horizon} inputs, got {len(inputs)}"
        )
    rng = np.random.default_rng(seed)
    worst = np.zeros(horizon + 1)
    finals = np.empty(x0_pairs)
    rates = []
    for pair in range(x0_pairs):
        x = rng.uniform(-1.0, 1.0, res.n)
        y = rng.uniform(-1.0, 1.0, res.n)
        dist = np.empty(horizon + 1)
        dist[0] = np.linalg.norm(x - y)
        for t in range(horizon):
            u = inputs[t]
            x = res.step(x, u)
            y = res.step(y, u)
            dist[t + 1] = np.linalg.norm(x - y)
        finals[pair] = dist[-1]
        np.maximum(worst, dist, out=worst)
        rate = _fit_rate(dist)
        if not math.isnan(rate):
            rates.append(rate)
    return EspTestReport(
        converged=bool(np.all(finals < tol)),
        final_distance=float(finals.max()),
        fitted_rate=float(max(rates)) if rates else float("nan"),
        trials=x0_pairs,
        horizon=horizon,
        max_distances=worst,
    )


def fmp_lipschitz_constant(cert: Certificate, lam: float) -> float:
    """Lipschitz constant of the input-to-state filter under the
    exponentially weighted sup-norm with decay ``lam``:

        C = L_u / (1 - beta / lam),   beta = contraction factor,

    valid for any lam strictly between beta and 1.
    """
    if not cert.passes:
        raise UncertifiedReservoirError(
            "the weighted-norm Lipschitz constant requires a passing certificate"
        )
    beta = cert.l_x_bound
    if not beta < lam < 1.0:
        raise InvalidInputError(
            f"lam must lie strictly between the contraction factor {beta:.6g} and 1"
        )
    return cert.l_u_bound / (1.0 - beta / lam)
