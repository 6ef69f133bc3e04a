"""Memory-capacity spectrum and information-processing capacity.

Capacity at delay tau is the held-out squared correlation between the
delayed input and its best affine reconstruction from the reservoir state.
Conventions shared by every estimator here:

* the input stream is centered once before driving the reservoir;
* state row i (the state after consuming input i-1) is paired with the
  target u[i - tau], so tau = 1 denotes the most recently consumed input;
* training uses a contiguous leading split, evaluation the trailing rest
  (shuffling would leak temporal structure);
* totals sum only capacities above a noise threshold, default
  4 / sqrt(test length), calibrated so shuffled-target controls fall below.

The nonlinear basis for IPC is the product of normalized Legendre
polynomials of delayed inputs, orthonormal for i.i.d. uniform input on
[-1, 1] -- hence ``ipc`` refuses inputs declared otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np
from numpy.polynomial import legendre as npleg

from . import numerics
from .errors import InvalidInputError
from .readout import default_ridge_mu
from .reservoir import Reservoir, default_washout

_MAX_FUNCTIONALS = 20_000
_CHUNK = 512


@dataclass(frozen=True)
class CapacitySpectrum:
    capacities: dict[int, float]  # tau -> C(tau), tau = 1..tau_max
    total: float  # sum of capacities above threshold
    threshold: float
    tau_max: int
    n: int
    test_length: int

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "threshold": self.threshold,
            "tau_max": self.tau_max,
            "n": self.n,
            "test_length": self.test_length,
        }


@dataclass(frozen=True)
class IpcReport:
    """Capacities keyed by (delays, degrees) tuples, e.g. ((1, 2), (1, 1))
    for the product of the two most recent inputs."""

    capacities: dict[tuple[tuple[int, ...], tuple[int, ...]], float]
    total_ipc: float
    max_degree: int
    max_delay: int
    threshold: float
    truncated: bool
    n: int
    test_length: int

    def to_dict(self) -> dict:
        return {
            "total_ipc": self.total_ipc,
            "max_degree": self.max_degree,
            "max_delay": self.max_delay,
            "threshold": self.threshold,
            "truncated": self.truncated,
            "functionals": len(self.capacities),
            "n": self.n,
            "test_length": self.test_length,
        }


def _drive_states(res: Reservoir, u: np.ndarray) -> np.ndarray:
    traj = res.drive(np.zeros(res.n), u.reshape(-1, 1), washout=0)
    return traj.states


def _held_out_capacities(
    x: np.ndarray, y: np.ndarray, mu: Optional[float], split: float
) -> tuple[np.ndarray, int]:
    """Centered-ridge fit on the leading split, squared correlation on the rest.

    Returns (capacities per target column, test length).
    """
    rows = len(x)
    if not 0.0 < split < 1.0:
        raise InvalidInputError("split must lie strictly inside (0, 1)")
    n_train = int(math.floor(split * rows))
    if n_train < 2 or rows - n_train < 2:
        raise InvalidInputError(
            f"{rows} usable rows leave a degenerate {n_train}/{rows - n_train} split"
        )
    x_tr, x_te = x[:n_train], x[n_train:]
    y_tr, y_te = y[:n_train], y[n_train:]
    x_mean = x_tr.mean(axis=0)
    y_mean = y_tr.mean(axis=0)
    xc = x_tr - x_mean
    if mu is None:
        mu = default_ridge_mu(xc)
    caps = np.empty(y.shape[1])
    for lo in range(0, y.shape[1], _CHUNK):
        hi = min(lo + _CHUNK, y.shape[1])
        w = numerics.ridge_solve(xc, y_tr[:, lo:hi] - y_mean[lo:hi], mu)
        pred = (x_te - x_mean) @ w + y_mean[lo:hi]
        caps[lo:hi] = _squared_correlation(y_te[:, lo:hi], pred)
    return caps, rows - n_train


def _squared_correlation(y: np.ndarray, pred: np.ndarray) -> np.ndarray:
    """Columnwise squared correlation; 0 where the prediction is constant,
    NaN where the target is (capacity of a constant target is undefined)."""
    yc = y - y.mean(axis=0)
    pc = pred - pred.mean(axis=0)
    var_y = np.mean(yc**2, axis=0)
    var_p = np.mean(pc**2, axis=0)
    cov = np.mean(yc * pc, axis=0)
    out = np.full(y.shape[1], float("nan"))
    ok = var_y > 0.0
    zero_pred = ok & (var_p == 0.0)
    good = ok & (var_p > 0.0)
    out[zero_pred] = 0.0
    out[good] = cov[good] ** 2 / (var_y[good] * var_p[good])
    return out


def _start_row(washout: int, tau: int, min_history: int) -> int:
    return max(washout + 1, tau, min_history)


def default_threshold(test_length: int) -> float:
    """Noise floor for thresholded capacity sums: 4 / sqrt(test length)."""
    return 4.0 / math.sqrt(test_length)


def delay_capacity(
    res: Reservoir,
    u,
    tau: int,
    mu: Optional[float] = None,
    split: float = 0.7,
    washout: Optional[int] = None,
    min_history: int = 0,
) -> float:
    """Capacity C(tau) in [0, 1] for reconstructing the input delayed by tau.

    ``min_history`` forces the usable rows to start no earlier than that
    state index, letting callers align row sets across different delays.
    """
    u = np.asarray(u, dtype=float).ravel()
    if tau < 1:
        raise InvalidInputError("delays start at tau = 1")
    if washout is None:
        washout = default_washout(res)
    start = _start_row(washout, tau, min_history)
    t_len = len(u)
    if start + 10 > t_len:
        raise InvalidInputError(
            f"tau={tau} with washout={washout} leaves fewer than 10 usable rows"
        )
    uc = u - u.mean()
    states = _drive_states(res, uc)
    x = states[start:]
    y = uc[start - tau : t_len + 1 - tau].reshape(-1, 1)
    caps, _ = _held_out_capacities(x, y, mu, split)
    return float(caps[0])


def capacity_spectrum(
    res: Reservoir,
    u,
    tau_max: int,
    mu: Optional[float] = None,
    split: float = 0.7,
    threshold: Optional[float] = None,
    washout: Optional[int] = None,
) -> CapacitySpectrum:
    """Per-delay capacities for tau = 1..tau_max plus their thresholded total.

    All delays share one simulation and one row alignment (rows from
    max(washout + 1, tau_max)), so a single threshold applies.
    """
    u = np.asarray(u, dtype=float).ravel()
    if washout is None:
        washout = default_washout(res)
    usable = len(u) - washout
    if tau_max < 1:
        raise InvalidInputError("tau_max must be >= 1")
    if tau_max > usable // 4:
        raise InvalidInputError(
            f"tau_max={tau_max} exceeds a quarter of the {usable} usable steps"
        )
    uc = u - u.mean()
    states = _drive_states(res, uc)
    start = _start_row(washout, tau_max, 0)
    t_len = len(u)
    x = states[start:]
    y = np.empty((len(x), tau_max))
    for tau in range(1, tau_max + 1):
        y[:, tau - 1] = uc[start - tau : t_len + 1 - tau]
    caps, test_length = _held_out_capacities(x, y, mu, split)
    if threshold is None:
        threshold = default_threshold(test_length)
    capacities = {tau: float(caps[tau - 1]) for tau in range(1, tau_max + 1)}
    total = float(sum(c for c in capacities.values() if c > threshold))
    return CapacitySpectrum(
        capacities=capacities,
        total=total,
        threshold=float(threshold),
        tau_max=tau_max,
        n=res.n,
        test_length=test_length,
    )


def _compositions(total: int, slots: int) -> Iterator[tuple[int, ...]]:
    if slots == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, slots - 1):
            yield (first,) + rest


def enumerate_functionals(
    max_degree: int, max_delay: int, cap: int = _MAX_FUNCTIONALS
) -> tuple[list[tuple[tuple[int, ...], tuple[int, ...]]], bool]:
    """All (delays, degrees) terms with total degree 1..max_degree over
    delays 1..max_delay, ordered by total degree then lexicographically.
    Enumeration stops at ``cap`` terms (the report flags truncation)."""
    terms: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for total in range(1, max_degree + 1):
        for comp in _compositions(total, max_delay):
            if len(terms) >= cap:
                return terms, True
            delays = tuple(i + 1 for i, d in enumerate(comp) if d > 0)
            degrees = tuple(d for d in comp if d > 0)
            terms.append((delays, degrees))
    return terms, False


def _normalized_legendre(u: np.ndarray, max_degree: int) -> list[np.ndarray]:
    """Values of sqrt(2d+1) * P_d(u) for d = 0..max_degree (orthonormal for
    uniform input on [-1, 1])."""
    vals = []
    for d in range(max_degree + 1):
        coeffs = np.zeros(d + 1)
        coeffs[d] = 1.0
        vals.append(math.sqrt(2 * d + 1) * npleg.legval(u, coeffs))
    return vals


def ipc(
    res: Reservoir,
    u,
    max_degree: int,
    max_delay: int,
    mu: Optional[float] = None,
    split: float = 0.7,
    threshold: Optional[float] = None,
    washout: Optional[int] = None,
    input_kind: str = "uniform_iid",
    max_functionals: int = _MAX_FUNCTIONALS,
) -> IpcReport:
    """Information-processing capacity over a truncated polynomial basis.

    Targets are products of normalized Legendre polynomials of delayed
    inputs; the basis is orthonormal only under i.i.d. uniform input on
    [-1, 1], so any other declared ``input_kind`` (or out-of-range samples)
    is refused.  Degree-1 singleton terms coincide with linear delay
    capacities.
    """
    if input_kind != "uniform_iid":
        raise InvalidInputError(
            f"ipc requires i.i.d. uniform input on [-1, 1]; got input_kind="
            f"{input_kind!r} (the Legendre basis is only orthonormal under "
            "the uniform product measure)"
        )
    u = np.asarray(u, dtype=float).ravel()
    if np.any(u < -1.0) or np.any(u > 1.0):
        raise InvalidInputError("ipc input samples must lie in [-1, 1]")
    if max_degree < 1 or max_delay < 1:
        raise InvalidInputError("max_degree and max_delay must be >= 1")
    if washout is None:
        washout = default_washout(res)
    t_len = len(u)
    start = _start_row(washout, max_delay, 0)
    if start + 10 > t_len:
        raise InvalidInputError("input too short for the requested washout/max_delay")
    terms, truncated = enumerate_functionals(max_degree, max_delay, max_functionals)
    uc = u - u.mean()
    states = _drive_states(res, uc)
    x = states[start:]
    rows = len(x)
    leg = _normalized_legendre(u, max_degree)
    y = np.empty((rows, len(terms)))
    for col, (delays, degrees) in enumerate(terms):
        target = np.ones(rows)
        for tau, deg in zip(delays, degrees):
            target *= leg[deg][start - tau : t_len + 1 - tau]
        y[:, col] = target
    caps, test_length = _held_out_capacities(x, y, mu, split)
    if threshold is None:
        threshold = default_threshold(test_length)
    capacities = {term: float(c) for term, c in zip(terms, caps)}
    total = float(sum(c for c in caps if c > threshold))
    return IpcReport(
        capacities=capacities,
        total_ipc=total,
        max_degree=max_degree,
        max_delay=max_delay,
        threshold=float(threshold),
        truncated=truncated,
        n=res.n,
        test_length=test_length,
    )
