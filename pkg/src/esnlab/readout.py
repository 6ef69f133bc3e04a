"""Affine readout training on harvested states, with evaluation metrics.

Training minimizes mean-squared error plus a ridge penalty on the weights;
the intercept is never regularized (penalizing it would bias capacity
estimates at small mu).  This is implemented by centering states and
targets, ridge-solving the centered system, and recovering the intercept
from the means -- algebraically identical to an unpenalized bias column.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import DimensionMismatchError, InvalidInputError

_VAR_UNDEFINED = float("nan")


@dataclass(frozen=True)
class Readout:
    """Trained affine map y = W_out x + b_out."""

    w_out: np.ndarray  # (p, n)
    b_out: np.ndarray  # (p,)

    def __post_init__(self):
        w = numerics.require_matrix(self.w_out, "w_out")
        b = numerics.require_vector(self.b_out, "b_out")
        if w.shape[0] != b.shape[0]:
            raise DimensionMismatchError("w_out and b_out disagree on output count")
        object.__setattr__(self, "w_out", w)
        object.__setattr__(self, "b_out", b)

    def predict(self, states) -> np.ndarray:
        states = numerics.require_matrix(np.atleast_2d(np.asarray(states, dtype=float)), "states")
        return states @ self.w_out.T + self.b_out

    def to_dict(self) -> dict:
        p, n = self.w_out.shape
        return {
            "p": p,
            "n": n,
            "w_out": self.w_out.ravel(order="C").tolist(),
            "b_out": self.b_out.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Readout":
        p, n = int(d["p"]), int(d["n"])
        return cls(
            w_out=np.asarray(d["w_out"], dtype=float).reshape(p, n),
            b_out=np.asarray(d["b_out"], dtype=float),
        )

    @classmethod
    def from_json(cls, s: str) -> "Readout":
        return cls.from_dict(json.loads(s))


def default_ridge_mu(centered_states: np.ndarray) -> float:
    """Scale-aware default penalty: 1e-8 * trace(X'X) / n."""
    n = centered_states.shape[1]
    return 1e-8 * float((centered_states**2).sum()) / n


def _as_targets(targets) -> np.ndarray:
    t = np.asarray(targets, dtype=float)
    if t.ndim == 1:
        t = t.reshape(-1, 1)
    if t.ndim != 2:
        raise InvalidInputError(f"targets must be (T,) or (T, p), got shape {t.shape}")
    return t


def train_readout(states, targets, mu: float | None = None) -> Readout:
    """Fit the affine readout by ridge regression with an unregularized bias.

    ``mu`` defaults to the scale-aware 1e-8 * trace(X'X) / n on the
    centered state matrix.  Warns when there are no more rows than state
    dimensions (the fit is then interpolating).
    """
    states = numerics.require_matrix(np.asarray(states, dtype=float), "states")
    targets = _as_targets(targets)
    if states.shape[0] != targets.shape[0]:
        raise DimensionMismatchError(
            f"states have {states.shape[0]} rows but targets have {targets.shape[0]}"
        )
    t_len, n = states.shape
    if t_len <= n:
        warnings.warn(
            f"only {t_len} samples for {n} state dimensions; expect an "
            "interpolating (overfit) readout",
            RuntimeWarning,
            stacklevel=2,
        )
    x_mean = states.mean(axis=0)
    y_mean = targets.mean(axis=0)
    xc = states - x_mean
    yc = targets - y_mean
    if mu is None:
        mu = default_ridge_mu(xc)
    w = numerics.ridge_solve(xc, yc, mu)  # (n, p)
    b = y_mean - x_mean @ w
    return Readout(w_out=w.T, b_out=b)


@dataclass(frozen=True)
class EvalMetrics:
    """Per-output goodness-of-fit.

    ``nmse`` and ``squared_correlation`` are NaN where the target variance
    is zero (undefined, not silently 0); a constant prediction against a
    varying target scores squared_correlation 0 (it reconstructs nothing).
    """

    mse: float
    nmse: np.ndarray  # (p,)
    squared_correlation: np.ndarray  # (p,)


def evaluate(ro: Readout, states, targets) -> EvalMetrics:
    """Evaluate a readout: mse, per-output nmse and squared correlation."""
    targets = _as_targets(targets)
    pred = ro.predict(states)
    if pred.shape != targets.shape:
        raise DimensionMismatchError(
            f"prediction shape {pred.shape} does not match targets {targets.shape}"
        )
    resid = pred - targets
    mse = float(np.mean(resid**2))
    per_out_mse = np.mean(resid**2, axis=0)
    var_y = np.var(targets, axis=0)
    var_p = np.var(pred, axis=0)
    p = targets.shape[1]
    nmse = np.empty(p)
    sq_corr = np.empty(p)
    for j in range(p):
        if var_y[j] == 0.0:
            nmse[j] = _VAR_UNDEFINED
            sq_corr[j] = _VAR_UNDEFINED
            continue
        nmse[j] = per_out_mse[j] / var_y[j]
        if var_p[j] == 0.0:
            sq_corr[j] = 0.0
        else:
            cov = np.mean((targets[:, j] - targets[:, j].mean()) * (pred[:, j] - pred[:, j].mean()))
            sq_corr[j] = cov**2 / (var_y[j] * var_p[j])
    return EvalMetrics(mse=mse, nmse=nmse, squared_correlation=sq_corr)
