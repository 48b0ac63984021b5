"""Linear hypothesis f(x) = Wx + b, chain-rule gradients, and a hand-rolled Adam."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
GAUSSIAN_INIT_STD = 0.01


@dataclass
class LinearModel:
    W: np.ndarray  # (d, p)
    b: np.ndarray  # (d,)

    @property
    def d(self) -> int:
        return self.W.shape[0]

    @property
    def p(self) -> int:
        return self.W.shape[1]

    def predict(self, x) -> np.ndarray:
        return self.W @ np.asarray(x, dtype=float) + self.b

    def predict_batch(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.W.T + self.b

    def copy(self) -> "LinearModel":
        return LinearModel(self.W.copy(), self.b.copy())

    def to_json(self) -> str:
        obj = {
            "d": self.d,
            "p": self.p,
            "W": [float(w) for w in self.W.ravel(order="C")],
            "b": [float(v) for v in self.b],
        }
        return json.dumps(obj, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "LinearModel":
        obj = json.loads(text)
        W = np.array(obj["W"], dtype=float).reshape(obj["d"], obj["p"])
        return cls(W=W, b=np.array(obj["b"], dtype=float))


def init_model(p: int, d: int, scheme: str = "zeros", seed: int = 0, other: LinearModel | None = None) -> LinearModel:
    if scheme == "zeros":
        return LinearModel(np.zeros((d, p)), np.zeros(d))
    if scheme == "gaussian":
        rng = np.random.default_rng(seed)
        return LinearModel(
            rng.normal(0.0, GAUSSIAN_INIT_STD, size=(d, p)),
            rng.normal(0.0, GAUSSIAN_INIT_STD, size=d),
        )
    if scheme == "uniform":
        # torch.nn.Linear default: U(-1/sqrt(fan_in), 1/sqrt(fan_in))
        rng = np.random.default_rng(seed)
        bound = 1.0 / np.sqrt(p)
        return LinearModel(
            rng.uniform(-bound, bound, size=(d, p)),
            rng.uniform(-bound, bound, size=d),
        )
    if scheme == "copy-of":
        if other is None:
            raise ValueError("copy-of initialization needs a source model")
        return other.copy()
    raise ValueError(f"unknown init scheme {scheme!r}")


def param_grad(grad_t, x):
    """Chain rule through f(x) = Wx + b: dW = grad_t x^T, db = grad_t."""
    grad_t = np.asarray(grad_t, dtype=float)
    x = np.asarray(x, dtype=float)
    return np.outer(grad_t, x), grad_t.copy()


def param_grad_batch(G, X):
    """Mean parameter gradient over a batch; G is (n,d), X is (n,p)."""
    G = np.asarray(G, dtype=float)
    X = np.asarray(X, dtype=float)
    n = G.shape[0]
    return G.T @ X / n, G.mean(axis=0)


@dataclass
class AdamState:
    mW: np.ndarray
    vW: np.ndarray
    mb: np.ndarray
    vb: np.ndarray
    step: int = 0

    @classmethod
    def zeros(cls, d: int, p: int) -> "AdamState":
        return cls(np.zeros((d, p)), np.zeros((d, p)), np.zeros(d), np.zeros(d))


def _adam_update(m, v, g, step, lr):
    m = ADAM_BETA1 * m + (1 - ADAM_BETA1) * g
    v = ADAM_BETA2 * v + (1 - ADAM_BETA2) * g * g
    m_hat = m / (1 - ADAM_BETA1**step)
    v_hat = v / (1 - ADAM_BETA2**step)
    return m, v, lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)


def adam_step(model: LinearModel, state: AdamState, dW, db, lr: float):
    """One Adam update; returns fresh (model, state), inputs untouched."""
    step = state.step + 1
    mW, vW, dxW = _adam_update(state.mW, state.vW, np.asarray(dW, dtype=float), step, lr)
    mb, vb, dxb = _adam_update(state.mb, state.vb, np.asarray(db, dtype=float), step, lr)
    new_model = LinearModel(model.W - dxW, model.b - dxb)
    return new_model, AdamState(mW, vW, mb, vb, step)
