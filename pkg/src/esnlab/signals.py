"""Seeded scalar input generators and target constructors.

All generators draw from numpy's PCG64 (``np.random.default_rng``); the
algorithm name is exported as ``RNG_ALGORITHM`` and recorded in output-file
metadata so fixtures can be reproduced elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, InvalidInputError

RNG_ALGORITHM = "numpy-pcg64"

_KINDS = ("uniform_iid", "constant", "impulse")


@dataclass(frozen=True)
class SignalSpec:
    """Description of a scalar input stream.

    kind: "uniform_iid" (lo, hi), "constant" (value) or "impulse"
    (t0, amplitude).  Generation is deterministic given seed.
    """

    kind: str
    length: int
    seed: int = 0
    lo: float = -1.0
    hi: float = 1.0
    value: float = 0.0
    t0: int = 0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidInputError(f"unknown signal kind {self.kind!r}")
        if self.length < 1:
            raise InvalidInputError("length must be >= 1")
        if self.kind == "uniform_iid" and not self.lo < self.hi:
            raise InvalidInputError("uniform_iid needs lo < hi")
        if self.kind == "impulse" and not 0 <= self.t0 < self.length:
            raise InvalidInputError("impulse time t0 must lie inside the sequence")


def generate(spec: SignalSpec) -> np.ndarray:
    """Generate the scalar sequence described by ``spec``."""
    if spec.kind == "constant":
        return np.full(spec.length, float(spec.value))
    if spec.kind == "impulse":
        u = np.zeros(spec.length)
        u[spec.t0] = spec.amplitude
        return u
    rng = np.random.default_rng(spec.seed)
    u = rng.uniform(spec.lo, spec.hi, spec.length)
    # Keep samples strictly inside (lo, hi); boundary hits are measure-zero
    # but would break downstream open-interval assumptions.
    bad = (u <= spec.lo) | (u >= spec.hi)
    while np.any(bad):
        u[bad] = rng.uniform(spec.lo, spec.hi, int(bad.sum()))
        bad = (u <= spec.lo) | (u >= spec.hi)
    return u


def delayed_target(u, tau: int) -> np.ndarray:
    """Delay-``tau`` reconstruction target.

    Returns the values ``u[t - tau]`` for t = tau .. len(u)-1, i.e. the
    returned array aligns with times starting at ``tau``.  Delays start at
    1; there is no zero-delay target.
    """
    u = np.asarray(u, dtype=float)
    if tau < 1:
        raise InvalidInputError("delays start at tau = 1")
    if tau >= len(u):
        raise InvalidInputError(f"tau={tau} leaves no aligned samples")
    return u[: len(u) - tau]


def product_target(u, delays: tuple[int, ...]) -> np.ndarray:
    """Pointwise product of delayed streams, aligned to t = max(delays)..len-1."""
    u = np.asarray(u, dtype=float)
    if not delays:
        raise InvalidInputError("need at least one delay")
    if min(delays) < 1:
        raise InvalidInputError("delays start at 1")
    dmax = max(delays)
    if dmax >= len(u):
        raise InvalidInputError(f"max delay {dmax} leaves no aligned samples")
    out = np.ones(len(u) - dmax)
    for d in delays:
        out *= u[dmax - d : len(u) - d]
    return out


def narma_target(u, order: int = 10) -> np.ndarray:
    """Standard NARMA recursion of the given order (default 10).

    y[t+1] = 0.3 y[t] + 0.05 y[t] * sum(y[t-order+1..t]) + 1.5 u[t-order+1] u[t] + 0.1

    Inputs must lie in [0, 0.5] to keep the recursion bounded; runs where
    any |y| exceeds 10 are rejected (resample the input with a new seed).
    """
    u = np.asarray(u, dtype=float)
    if order < 1:
        raise InvalidInputError("order must be >= 1")
    if len(u) <= order:
        raise InvalidInputError("input shorter than the recursion order")
    if np.any(u < 0.0) or np.any(u > 0.5):
        raise InvalidInputError("NARMA inputs must lie in [0, 0.5]")
    y = np.zeros(len(u))
    for t in range(order - 1, len(u) - 1):
        window = y[t - order + 1 : t + 1].sum()
        y[t + 1] = 0.3 * y[t] + 0.05 * y[t] * window + 1.5 * u[t - order + 1] * u[t] + 0.1
        if abs(y[t + 1]) > 10.0:
            raise DivergenceError(
                f"NARMA-{order} diverged at step {t + 1}; resample the input "
                "(new seed or shorter sequence)"
            )
    return y
