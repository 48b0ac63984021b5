"""Decision loss and trainable surrogates, each with a gradient in the predicted cost.

PG surrogates are finite differences of the plug-in value V(t) = min_z t.z
along the realized cost y:

    pgb: (V(t) - V(t - h*y)) / h        (pessimistic, upper-bounds the decision loss)
    pgc: (V(t + h*y) - V(t - h*y)) / 2h
    pgf: (V(t + h*y) - V(t)) / h        (optimistic, lower-bounds the decision loss)

Gradients come from the plug-in decisions at the perturbed points; at kinks
these are elements of the generalized gradient under the oracle's tie-break.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .oracle import OracleSpec, solve_batch

PG_TAGS = ("pgb", "pgc", "pgf")
ALL_TAGS = ("decision", "pgb", "pgc", "pgf", "spo-plus", "mse")


class LossError(ValueError):
    pass


@dataclass(frozen=True)
class LossEval:
    value: float
    grad_t: np.ndarray


@dataclass(frozen=True)
class LossKind:
    tag: str
    h: float | None = None

    def __post_init__(self):
        if self.tag not in ALL_TAGS:
            raise LossError(f"unknown loss tag {self.tag!r}")
        if self.tag in PG_TAGS:
            if self.h is None or not (self.h > 0):
                raise LossError(f"{self.tag} requires h > 0, got {self.h}")
        elif self.h is not None:
            raise LossError(f"{self.tag} takes no h")

    def with_h(self, h: float) -> "LossKind":
        return LossKind(self.tag, h)


def _check_pair(T, Y):
    T = np.atleast_2d(np.asarray(T, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if T.shape != Y.shape:
        raise LossError(f"shape mismatch between t {T.shape} and y {Y.shape}")
    return T, Y


def decision_loss_batch(spec, T, Y):
    T, Y = _check_pair(T, Y)
    Z, _ = solve_batch(spec, T)
    # piecewise constant in t: report a zero gradient, evaluation-only
    return np.einsum("ij,ij->i", Y, Z), np.zeros_like(T)


def _require_h(h):
    if h is None or not (h > 0):
        raise LossError(f"perturbation step h must be positive, got {h}")


def pgb_batch(spec, T, Y, h):
    _require_h(h)
    T, Y = _check_pair(T, Y)
    Z0, V0 = solve_batch(spec, T)
    Zm, Vm = solve_batch(spec, T - h * Y)
    return (V0 - Vm) / h, (Z0 - Zm) / h


def pgc_batch(spec, T, Y, h):
    _require_h(h)
    T, Y = _check_pair(T, Y)
    Zp, Vp = solve_batch(spec, T + h * Y)
    Zm, Vm = solve_batch(spec, T - h * Y)
    return (Vp - Vm) / (2 * h), (Zp - Zm) / (2 * h)


def pgf_batch(spec, T, Y, h):
    _require_h(h)
    T, Y = _check_pair(T, Y)
    Zp, Vp = solve_batch(spec, T + h * Y)
    Z0, V0 = solve_batch(spec, T)
    return (Vp - V0) / h, (Zp - Z0) / h


def spo_plus_batch(spec, T, Y):
    # value = -V(2t - y) + 2 t.pi(y) - V(y); subgradient 2(pi(y) - pi(2t - y))
    T, Y = _check_pair(T, Y)
    Zy, Vy = solve_batch(spec, Y)
    Z2, V2 = solve_batch(spec, 2 * T - Y)
    vals = -V2 + 2 * np.einsum("ij,ij->i", T, Zy) - Vy
    return vals, 2 * (Zy - Z2)


def mse_batch(T, Y):
    T, Y = _check_pair(T, Y)
    diff = T - Y
    return 0.5 * np.einsum("ij,ij->i", diff, diff), diff


def evaluate_batch(kind: LossKind, spec: OracleSpec, T, Y):
    """Dispatch on the loss tag; returns (values (n,), grads (n,d))."""
    if kind.tag == "decision":
        return decision_loss_batch(spec, T, Y)
    if kind.tag == "pgb":
        return pgb_batch(spec, T, Y, kind.h)
    if kind.tag == "pgc":
        return pgc_batch(spec, T, Y, kind.h)
    if kind.tag == "pgf":
        return pgf_batch(spec, T, Y, kind.h)
    if kind.tag == "spo-plus":
        return spo_plus_batch(spec, T, Y)
    return mse_batch(T, Y)


def _scalar(fn, *args) -> LossEval:
    v, g = fn(*args)
    return LossEval(value=float(v[0]), grad_t=g[0])


def decision_loss(spec, t, y) -> LossEval:
    return _scalar(decision_loss_batch, spec, t, y)


def pgb(spec, t, y, h) -> LossEval:
    return _scalar(pgb_batch, spec, t, y, h)


def pgc(spec, t, y, h) -> LossEval:
    return _scalar(pgc_batch, spec, t, y, h)


def pgf(spec, t, y, h) -> LossEval:
    return _scalar(pgf_batch, spec, t, y, h)


def spo_plus(spec, t, y) -> LossEval:
    return _scalar(spo_plus_batch, spec, t, y)


def mse(t, y) -> LossEval:
    return _scalar(mse_batch, t, y)
