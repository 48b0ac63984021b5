"""Seeded synthetic data generators for the experiment families, plus returns-CSV ingestion."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .oracle import GRID_ARCS, down_arc, right_arc

N_ASSETS = 12
MASK64 = (1 << 64) - 1

# planted paths on the 5x5 grid: two arc-disjoint monotone paths.
# safe ("red"): across the top row, then down the last column.
# risky ("blue"): down the first column, then across the bottom row.
RED_ARCS = tuple(right_arc(0, j) for j in range(4)) + tuple(down_arc(i, 4) for i in range(4))
BLUE_ARCS = tuple(down_arc(i, 0) for i in range(4)) + tuple(right_arc(4, j) for j in range(4))


class DataError(ValueError):
    pass


@dataclass
class Dataset:
    X: np.ndarray  # (n, p)
    Y: np.ndarray  # (n, d)
    f_star: np.ndarray | None = None  # (n, d), synthetic data only

    def __post_init__(self):
        if self.X.shape[0] != self.Y.shape[0]:
            raise DataError("X and Y row counts disagree")
        if self.f_star is not None and self.f_star.shape != self.Y.shape:
            raise DataError("f_star shape must match Y")

    def __len__(self) -> int:
        return self.X.shape[0]

    def rows(self, idx) -> "Dataset":
        return Dataset(
            self.X[idx], self.Y[idx], None if self.f_star is None else self.f_star[idx]
        )


@dataclass(frozen=True)
class NoiseSpec:
    kind: str  # 'asymmetric', 'mult-uniform', 'add-gaussian'
    alpha: float = 1.0  # asymmetric only
    width: float = 0.3  # mult-uniform half-width
    sigma: float = 0.3  # add-gaussian std

    def __post_init__(self):
        if self.kind not in ("asymmetric", "mult-uniform", "add-gaussian"):
            raise DataError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise DataError("alpha must lie in [0, 1]")
        if self.sigma <= 0:
            raise DataError("sigma must be positive")


def mix_seed(master_seed: int, index: int) -> int:
    """splitmix64 finalizer; derives independent per-trial seeds."""
    x = (master_seed + (index + 1) * 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def misspec_mean(x, m: float):
    """Piecewise-linear conditional mean with an elbow at 0.55."""
    x = np.asarray(x, dtype=float)
    return np.where(x < 0.55, -4.0 * x + 2.0, m * (x - 0.55) - 0.2)


def asymmetric_noise(rng, size, alpha: float):
    """Mean-zero, variance-0.25 mixture of a centered exponential and a Gaussian."""
    zeta = rng.exponential(scale=0.5, size=size)
    gamma = rng.normal(0.0, 0.5, size=size)
    return np.sqrt(alpha) * (zeta - 0.5) + np.sqrt(1.0 - alpha) * gamma


def gen_simple_misspec(n: int, m: float, alpha: float, seed: int, noise_scale: float = 1.0) -> Dataset:
    """Scalar binary-decision problem: X ~ Unif(0,2), elbow mean, asymmetric noise.

    noise_scale is a test hook; 0 gives the noiseless problem.
    """
    if not (-4.0 <= m <= 0.0):
        raise DataError("slope m must lie in [-4, 0]")
    if not (0.0 <= alpha <= 1.0):
        raise DataError("alpha must lie in [0, 1]")
    if n < 1:
        raise DataError("n must be at least 1")
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 2.0, size=n)
    f = misspec_mean(x, m)
    y = f + noise_scale * asymmetric_noise(rng, n, alpha)
    return Dataset(x[:, None], y[:, None], f[:, None])


def sample_bstar(bstar_seed: int) -> np.ndarray:
    """40x5 Bernoulli(0.5) arc-feature matrix, fixed across trials sharing the seed."""
    rng = np.random.default_rng(bstar_seed)
    return (rng.random((GRID_ARCS, 5)) < 0.5).astype(float)


def _arc_base_mean(B, X5):
    # (1/3.5^6) * [ ((B x)/sqrt(5) + 3)^6 + 1 ], always positive
    lin = X5 @ B.T / np.sqrt(5.0)
    return ((lin + 3.0) ** 6 + 1.0) / 3.5**6


def _apply_arc_noise(rng, f, noise: NoiseSpec):
    if noise.kind == "mult-uniform":
        eps = rng.uniform(-noise.width, noise.width, size=f.shape)
        return f * (1.0 + eps)
    if noise.kind == "add-gaussian":
        return f + rng.normal(0.0, noise.sigma, size=f.shape)
    raise DataError(f"noise kind {noise.kind!r} not supported for arc costs")


def gen_shortest_path(n: int, noise: NoiseSpec, seed: int, bstar_seed: int) -> Dataset:
    if n < 1:
        raise DataError("n must be at least 1")
    B = sample_bstar(bstar_seed)
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, 5))
    f = _arc_base_mean(B, X)
    Y = _apply_arc_noise(rng, f, noise)
    return Dataset(X, Y, f)


def planted_mean(X: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Arc means for the planted instance: safe path at 2, risky path driven by x6."""
    x6 = X[:, 5]
    f = _arc_base_mean(B, X[:, :5]) + 2.2
    f[:, RED_ARCS] = 2.0
    risky = np.where(x6 <= 0.55, 4.0 * x6, 2.2)
    f[:, BLUE_ARCS] = risky[:, None]
    return f


def gen_planted_path(n: int, noise: NoiseSpec, seed: int, bstar_seed: int) -> Dataset:
    if n < 1:
        raise DataError("n must be at least 1")
    B = sample_bstar(bstar_seed)
    rng = np.random.default_rng(seed)
    X = np.empty((n, 6))
    X[:, :5] = rng.standard_normal((n, 5))
    X[:, 5] = rng.uniform(0.0, 2.0, size=n)
    f = planted_mean(X, B)
    Y = _apply_arc_noise(rng, f, noise)
    return Dataset(X, Y, f)


def load_returns_csv(path, in_percent: bool = False) -> np.ndarray:
    """Monthly returns table: header row then rows of 12 numeric columns."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty file")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != N_ASSETS:
                raise DataError(f"{path}:{lineno}: expected {N_ASSETS} columns, got {len(row)}")
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: non-numeric entry ({exc})") from None
    out = np.array(rows, dtype=float)
    if in_percent:
        out = out / 100.0
    return out


def covariance_sqrt(sigma: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root; small negative eigenvalues are clamped to 0."""
    sym = 0.5 * (sigma + sigma.T)
    w, U = np.linalg.eigh(sym)
    if np.min(w) < -1e-8 * max(1.0, np.max(np.abs(w))):
        raise DataError("covariance is not positive semidefinite")
    return U @ np.diag(np.sqrt(np.clip(w, 0.0, None))) @ U.T


def gen_portfolio(returns: np.ndarray, n: int, seed: int, noise_scale: float = 0.5) -> Dataset:
    """Resample months: Y = -r_t (cost), X = r_{t-1} + N(0, noise_scale * Sigma)."""
    returns = np.asarray(returns, dtype=float)
    if returns.shape[0] < 2:
        raise DataError("need at least 2 return rows to lag")
    sigma = np.cov(returns, rowvar=False)
    root = covariance_sqrt(noise_scale * sigma) if noise_scale > 0 else None
    rng = np.random.default_rng(seed)
    t = rng.integers(1, returns.shape[0], size=n)
    Y = -returns[t]
    X = returns[t - 1].copy()
    if root is not None:
        X += rng.standard_normal((n, returns.shape[1])) @ root.T
    return Dataset(X, Y, None)


def synthetic_returns(T: int = 120, seed: int = 7) -> np.ndarray:
    """Bundled stand-in for the real monthly-returns file.

    Twelve assets driven by a common factor; the response to last month's factor
    is kinked (sign-flipping), so the conditional mean of next month's returns is
    nonlinear in the lagged observation and a linear hypothesis is misspecified.
    """
    rng = np.random.default_rng(seed)
    d = N_ASSETS
    drift = 0.004 + 0.004 * np.sin(np.arange(d))
    expo_now = 0.01 * (1 + (np.arange(d) % 4) / 3)
    expo_lag = 0.05 * np.cos(np.arange(d) * 1.3)
    idio = 0.003 * (1 + np.arange(d) / (d - 1))
    u = rng.standard_normal(T + 1)
    kinked = np.where(u < 0, u, -0.3 * u)
    r = np.empty((T, d))
    for t in range(T):
        r[t] = drift + expo_now * u[t + 1] + expo_lag * kinked[t] + idio * rng.standard_normal(d)
    return r


def dump_dataset_csv(ds: Dataset, path) -> None:
    """X columns, then Y columns, then f* columns when present."""
    p, d = ds.X.shape[1], ds.Y.shape[1]
    header = [f"x{j}" for j in range(p)] + [f"y{j}" for j in range(d)]
    cols = [ds.X, ds.Y]
    if ds.f_star is not None:
        header += [f"fstar{j}" for j in range(d)]
        cols.append(ds.f_star)
    mat = np.hstack(cols)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in mat:
            writer.writerow([repr(float(v)) for v in row])
