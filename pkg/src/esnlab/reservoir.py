"""Echo-state reservoir: activations with Lipschitz data, update rule, simulation.

The state update is the leaky recursion

    x_t = (1 - alpha) * x_{t-1} + alpha * phi(W_in u_t + W x_{t-1} + b)

with leak rate alpha in (0, 1]; alpha = 1 recovers the plain echo-state
update exactly.  Weights are fixed at construction; only readouts are ever
trained.  A Reservoir is immutable and safe to share across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import numerics
from .errors import DimensionMismatchError, InvalidInputError


def _tanh_deriv(z):
    t = np.tanh(z)
    return 1.0 - t * t


def _sigmoid(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _sigmoid_deriv(z):
    s = _sigmoid(z)
    return s * (1.0 - s)


def _softsign(z):
    return z / (1.0 + np.abs(z))


def _softsign_deriv(z):
    return 1.0 / (1.0 + np.abs(z)) ** 2


@dataclass(frozen=True)
class Activation:
    """Component-wise nonlinearity bundled with its derivative and global
    Lipschitz constant (the sup of |phi'|).

    ``params`` holds the constructor arguments (e.g. leaky-ReLU slope) so
    the activation can be serialized and rebuilt exactly.
    """

    kind: str
    fn: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    lipschitz: float
    bounded: bool
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}


def activation(kind: str, **params) -> Activation:
    """Build a named activation.

    Kinds: tanh, logistic_sigmoid, softsign, relu, leaky_relu(slope),
    elu(scale), identity.  Kink derivatives (ReLU family at 0) use the
    smaller one-sided slope so |phi'| never exceeds the Lipschitz constant.
    """
    if kind == "tanh":
        return Activation("tanh", np.tanh, _tanh_deriv, 1.0, True)
    if kind == "logistic_sigmoid":
        return Activation("logistic_sigmoid", _sigmoid, _sigmoid_deriv, 0.25, True)
    if kind == "softsign":
        return Activation("softsign", _softsign, _softsign_deriv, 1.0, True)
    if kind == "relu":
        return Activation(
            "relu",
            lambda z: np.maximum(z, 0.0),
            lambda z: (np.asarray(z) > 0).astype(float),
            1.0,
            False,
        )
    if kind == "leaky_relu":
        slope = float(params.pop("slope", 0.01))
        if params:
            raise InvalidInputError(f"unexpected parameters {sorted(params)} for leaky_relu")
        if not 0.0 < slope < 1.0:
            raise InvalidInputError("leaky_relu slope must lie in (0, 1)")
        return Activation(
            "leaky_relu",
            lambda z: np.where(np.asarray(z) >= 0, z, slope * np.asarray(z)),
            lambda z: np.where(np.asarray(z) > 0, 1.0, slope),
            1.0,
            False,
            {"slope": slope},
        )
    if kind == "elu":
        scale = float(params.pop("scale", 1.0))
        if params:
            raise InvalidInputError(f"unexpected parameters {sorted(params)} for elu")
        if scale <= 0.0:
            raise InvalidInputError("elu scale must be positive")

        def _elu(z, a=scale):
            z = np.asarray(z, dtype=float)
            return np.where(z >= 0, z, a * np.expm1(np.minimum(z, 0.0)))

        def _elu_deriv(z, a=scale):
            z = np.asarray(z, dtype=float)
            return np.where(z >= 0, 1.0, a * np.exp(np.minimum(z, 0.0)))

        return Activation("elu", _elu, _elu_deriv, max(1.0, scale), False, {"scale": scale})
    if kind == "identity":
        return Activation(
            "identity",
            lambda z: np.asarray(z, dtype=float),
            lambda z: np.ones_like(np.asarray(z, dtype=float)),
            1.0,
            False,
        )
    if params:
        raise InvalidInputError(f"unexpected parameters {sorted(params)} for {kind}")
    raise InvalidInputError(f"unknown activation kind {kind!r}")


ACTIVATION_KINDS = (
    "tanh",
    "logistic_sigmoid",
    "softsign",
    "relu",
    "leaky_relu",
    "elu",
    "identity",
)


@dataclass(frozen=True)
class Reservoir:
    """Fixed-weight echo-state core: input map, recurrence, bias, activation."""

    w_in: np.ndarray  # (n, m)
    w: np.ndarray  # (n, n)
    b: np.ndarray  # (n,)
    activation: Activation
    leak_rate: float = 1.0

    def __post_init__(self):
        w = numerics.require_matrix(self.w, "w", square=True)
        w_in = numerics.require_matrix(self.w_in, "w_in")
        b = numerics.require_vector(self.b, "b")
        n = w.shape[0]
        if w_in.shape[0] != n:
            raise DimensionMismatchError(f"w_in has {w_in.shape[0]} rows, expected {n}")
        if b.shape[0] != n:
            raise DimensionMismatchError(f"b has length {b.shape[0]}, expected {n}")
        if not (np.isfinite(self.leak_rate) and 0.0 < self.leak_rate <= 1.0):
            raise InvalidInputError("leak_rate must lie in (0, 1]")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "w_in", w_in)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "leak_rate", float(self.leak_rate))

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @property
    def m(self) -> int:
        return self.w_in.shape[1]

    def _check_state(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatchError(f"state must have shape ({self.n},), got {x.shape}")
        return x

    def _check_input(self, u) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if u.shape != (self.m,):
            raise DimensionMismatchError(f"input must have shape ({self.m},), got {u.shape}")
        return u

    def preactivation(self, x_prev, u) -> np.ndarray:
        x_prev = self._check_state(x_prev)
        u = self._check_input(u)
        return self.w_in @ u + self.w @ x_prev + self.b

    def step(self, x_prev, u) -> np.ndarray:
        """One state update.  Deterministic; leak_rate = 1 gives exactly
        phi(W_in u + W x_prev + b)."""
        pre = self.preactivation(x_prev, u)
        a = self.leak_rate
        return (1.0 - a) * np.asarray(x_prev, dtype=float) + a * self.activation.fn(pre)

    def activation_derivative_diag(self, x_prev, u) -> np.ndarray:
        """phi' evaluated component-wise at the pre-activation."""
        return self.activation.deriv(self.preactivation(x_prev, u))

    def drive(self, x0, inputs, washout: int = 0) -> "StateTrajectory":
        """Iterate the update over an input sequence.

        Returns the full trajectory (length len(inputs) + 1, row 0 = x0);
        the ``harvested`` view of the result drops rows 0..washout.
        """
        x0 = self._check_state(x0)
        inputs = _as_input_array(inputs, self.m)
        if len(inputs) == 0:
            raise InvalidInputError("empty input sequence")
        if not 0 <= washout < len(inputs):
            raise InvalidInputError(
                f"washout must lie in [0, {len(inputs) - 1}], got {washout}"
            )
        n_steps = len(inputs)
        states = np.empty((n_steps + 1, self.n))
        states[0] = x0
        x = x0
        a = self.leak_rate
        w_in_t = self.w_in.T
        w_t = self.w.T
        fn = self.activation.fn
        b = self.b
        for t in range(n_steps):
            pre = inputs[t] @ w_in_t + x @ w_t + b
            x = (1.0 - a) * x + a * fn(pre)
            states[t + 1] = x
        return StateTrajectory(states=states, inputs=inputs, washout=washout)

    def state_lipschitz_factor(self) -> float:
        """Leak-adjusted Lipschitz bound of the update in its state argument:
        (1 - alpha) + alpha * L_phi * sigma_max(W)."""
        a = self.leak_rate
        return (1.0 - a) + a * self.activation.lipschitz * numerics.spectral_norm(self.w)

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "activation": self.activation.to_dict(),
            "leak_rate": self.leak_rate,
            "w_in": self.w_in.ravel(order="C").tolist(),
            "w": self.w.ravel(order="C").tolist(),
            "b": self.b.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Reservoir":
        n, m = int(d["n"]), int(d["m"])
        act = activation(d["activation"]["kind"], **d["activation"].get("params", {}))
        return cls(
            w_in=np.asarray(d["w_in"], dtype=float).reshape(n, m),
            w=np.asarray(d["w"], dtype=float).reshape(n, n),
            b=np.asarray(d["b"], dtype=float),
            activation=act,
            leak_rate=float(d.get("leak_rate", 1.0)),
        )

    @classmethod
    def from_json(cls, s: str) -> "Reservoir":
        return cls.from_dict(json.loads(s))


def _as_input_array(inputs, m: int) -> np.ndarray:
    """Normalize an input sequence to shape (T, m); scalars allowed for m=1."""
    arr = np.asarray(inputs, dtype=float)
    if arr.ndim == 1:
        if m != 1:
            raise DimensionMismatchError(
                f"scalar input sequence given but the reservoir expects m={m}"
            )
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[1] != m:
        raise DimensionMismatchError(
            f"input sequence must have shape (T, {m}), got {arr.shape}"
        )
    if arr.size and not np.all(np.isfinite(arr)):
        raise InvalidInputError("input sequence contains non-finite entries")
    return arr


@dataclass(frozen=True)
class StateTrajectory:
    """Time-indexed reservoir states plus the input that produced them.

    ``states[t]`` for t >= 1 is the state after consuming ``inputs[t-1]``;
    row 0 is the initial state.
    """

    states: np.ndarray  # (T + 1, n)
    inputs: np.ndarray  # (T, m)
    washout: int

    def __post_init__(self):
        if len(self.states) != len(self.inputs) + 1:
            raise DimensionMismatchError(
                "trajectory must hold one more state than inputs"
            )
        if not 0 <= self.washout < len(self.inputs):
            raise InvalidInputError("washout out of range for this trajectory")

    @property
    def harvested(self) -> np.ndarray:
        """States with index > washout (the post-transient segment)."""
        return self.states[self.washout + 1 :]

    def __len__(self) -> int:
        return len(self.states)


def default_washout(res: Reservoir) -> int:
    """Washout long enough for geometric convergence to the input-determined
    trajectory: max(100, 10 * ceil(1 / (1 - factor))) when the contraction
    factor is < 1, else a conservative 500."""
    factor = res.state_lipschitz_factor()
    if factor < 1.0:
        return max(100, 10 * math.ceil(1.0 / (1.0 - factor)))
    return 500
