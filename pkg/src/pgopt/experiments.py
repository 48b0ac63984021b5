"""Experiment orchestration: regret evaluation, Monte-Carlo trials, CSV/JSON reporting."""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import datagen
from .datagen import Dataset, mix_seed
from .losses import PG_TAGS, LossKind, evaluate_batch
from .model import LinearModel
from .oracle import OracleSpec, binary_spec, capped_simplex_spec, grid_path_spec, solve_batch
from .train import TrainConfig, fit, pipeline, split_train_val

EXPERIMENTS = (
    "simple-misspec",
    "shortest-random",
    "shortest-planted",
    "portfolio",
    "zeroth-compare",
    "h-sensitivity",
)

DEFAULT_METHODS = ("eto", "spo-plus", "pgb", "pgc")
CSV_COLUMNS = ("experiment", "method", "n", "trial", "regret", "chosen_h", "wall_ms")
PORTFOLIO_CAP = 0.25


class ExperimentError(ValueError):
    pass


@dataclass(frozen=True)
class RegretReport:
    method: str
    n: int
    trials: int
    mean: float
    std: float
    ci95: float


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    methods: tuple = DEFAULT_METHODS
    n_list: tuple = (100,)
    trials: int = 20
    seed: int = 0
    test_size: int = 10000
    # simple-misspec / zeroth-compare
    m: float = 0.0
    alpha: float = 1.0
    noise_scale: float = 1.0  # test hook: 0 silences the noise
    # shortest-path families
    noise: str = "add-gaussian"  # or "mult-uniform"
    # portfolio
    returns_path: str | None = None
    returns_in_percent: bool = False
    portfolio_noise: float = 0.5
    # zeroth-compare
    zeroth_h: float = 0.5
    beta_step: float = 0.01
    # h-sensitivity
    h_list: tuple = (0.001, 0.035, 0.188, 0.434)
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ExperimentError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ExperimentError("trials must be at least 1")
        if self.test_size < 1:
            raise ExperimentError("test_size must be at least 1")
        for meth in self.methods:
            if meth not in ("eto", "spo-plus", "mse") + PG_TAGS:
                raise ExperimentError(f"unknown method {meth!r}")


def normalized_excess_regret(model: LinearModel, test: Dataset, spec: OracleSpec,
                             hindsight: bool = False) -> float:
    """Mean excess decision cost of the model's policy over the reference policy,
    normalized by |mean reference cost|.  The reference is the plug-in policy at
    the true conditional mean, or the per-sample hindsight optimum."""
    Z_hat, _ = solve_batch(spec, model.predict_batch(test.X))
    if hindsight:
        Z_ref, _ = solve_batch(spec, test.Y)
    else:
        if test.f_star is None:
            raise ExperimentError("regret needs f_star unless hindsight mode is used")
        Z_ref, _ = solve_batch(spec, test.f_star)
    num = float(np.einsum("ij,ij->i", test.Y, Z_hat - Z_ref).mean())
    den = abs(float(np.einsum("ij,ij->i", test.Y, Z_ref).mean()))
    if den < 1e-12:
        raise ExperimentError("reference policy has (near-)zero mean cost; regret undefined")
    return num / den


def _bstar_seed(config: ExperimentConfig) -> int:
    # B* and planted structure are fixed per experiment, shared by all trials
    return mix_seed(config.seed, 0xB57A)


def _noise_spec(config: ExperimentConfig) -> datagen.NoiseSpec:
    return datagen.NoiseSpec(config.noise)


def _portfolio_returns(config: ExperimentConfig) -> np.ndarray:
    if config.returns_path:
        return datagen.load_returns_csv(config.returns_path, config.returns_in_percent)
    return datagen.synthetic_returns(seed=mix_seed(config.seed, 0x5E7))


def _gen_pair(config: ExperimentConfig, n_rows: int, data_seed: int, test_seed: int):
    """(train+val dataset, test dataset, oracle spec, hindsight flag)."""
    exp = config.experiment
    if exp in ("simple-misspec", "zeroth-compare"):
        ds = datagen.gen_simple_misspec(n_rows, config.m, config.alpha, data_seed,
                                        noise_scale=config.noise_scale)
        test = datagen.gen_simple_misspec(config.test_size, config.m, config.alpha, test_seed,
                                          noise_scale=config.noise_scale)
        return ds, test, binary_spec(1), False
    if exp == "shortest-random":
        bs = _bstar_seed(config)
        ds = datagen.gen_shortest_path(n_rows, _noise_spec(config), data_seed, bs)
        test = datagen.gen_shortest_path(config.test_size, _noise_spec(config), test_seed, bs)
        return ds, test, grid_path_spec(), False
    if exp in ("shortest-planted", "h-sensitivity"):
        bs = _bstar_seed(config)
        ds = datagen.gen_planted_path(n_rows, _noise_spec(config), data_seed, bs)
        test = datagen.gen_planted_path(config.test_size, _noise_spec(config), test_seed, bs)
        return ds, test, grid_path_spec(), False
    if exp == "portfolio":
        returns = _portfolio_returns(config)
        ds = datagen.gen_portfolio(returns, n_rows, data_seed, config.portfolio_noise)
        test = datagen.gen_portfolio(returns, config.test_size, test_seed, config.portfolio_noise)
        return ds, test, capped_simplex_spec(datagen.N_ASSETS, PORTFOLIO_CAP), True
    raise ExperimentError(f"unknown experiment {exp!r}")


def zeroth_order_scan(data: Dataset, spec: OracleSpec, h: float, beta_step: float = 0.01,
                      tags=PG_TAGS) -> dict:
    """Argmin over the intercept grid of the empirical surrogate for the
    one-parameter plug-in class f(x) = -0.1 x + beta0, beta0 in [-1, 1]."""
    grid = np.round(np.arange(-1.0, 1.0 + beta_step / 2, beta_step), 10)
    x = data.X[:, 0]
    out = {}
    for tag in tags:
        kind = LossKind(tag, h)
        best_b, best_v = None, np.inf
        for b0 in grid:
            T = (-0.1 * x + b0)[:, None]
            vals, _ = evaluate_batch(kind, spec, T, data.Y)
            v = float(vals.mean())
            if v < best_v:
                best_b, best_v = float(b0), v
        out[tag] = best_b
    return out


def pgb_gap_estimate(h: float, n_samples: int, seed: int, m: float = 0.0,
                     alpha: float = 0.0, slope: float = -8.0) -> float:
    """Monte-Carlo estimate of E[pgb - decision loss] for a fixed linear predictor
    t = slope * (x - 0.5) in the scalar binary-decision setting."""
    ds = datagen.gen_simple_misspec(n_samples, m, alpha, seed)
    spec = binary_spec(1)
    T = slope * (ds.X - 0.5)
    pg_vals, _ = evaluate_batch(LossKind("pgb", h), spec, T, ds.Y)
    dl_vals, _ = evaluate_batch(LossKind("decision"), spec, T, ds.Y)
    return float((pg_vals - dl_vals).mean())


def _trial_seeds(config: ExperimentConfig, trial: int, n: int):
    base = mix_seed(mix_seed(config.seed, trial), n)
    return mix_seed(base, 1), mix_seed(base, 2), mix_seed(base, 3)


def run_trial(config: ExperimentConfig, trial_index: int) -> list[dict]:
    """One Monte-Carlo replication; returns one result row per (method, n) or,
    for h-sensitivity, per (h,)."""
    rows = []
    try:
        if config.experiment == "zeroth-compare":
            return _run_zeroth_trial(config, trial_index)
        if config.experiment == "h-sensitivity":
            return _run_h_sensitivity_trial(config, trial_index)
        for n in config.n_list:
            data_seed, test_seed, train_seed = _trial_seeds(config, trial_index, n)
            ds, test, spec, hindsight = _gen_pair(config, n + config.train.val_size,
                                                  data_seed, test_seed)
            tc = replace(config.train, seed=train_seed)
            for method in config.methods:
                t0 = time.perf_counter()
                report = pipeline(ds, method, spec, tc)
                regret = normalized_excess_regret(report.best_model, test, spec, hindsight)
                rows.append({
                    "experiment": config.experiment,
                    "method": method,
                    "n": n,
                    "trial": trial_index,
                    "regret": regret,
                    "chosen_h": report.chosen_h,
                    "wall_ms": (time.perf_counter() - t0) * 1e3,
                })
    except ExperimentError:
        raise
    except Exception as exc:
        raise ExperimentError(f"trial {trial_index} failed: {exc}") from exc
    return rows


def _run_zeroth_trial(config: ExperimentConfig, trial_index: int) -> list[dict]:
    rows = []
    tags = tuple(meth for meth in config.methods if meth in PG_TAGS) or PG_TAGS
    for n in config.n_list:
        data_seed, test_seed, _ = _trial_seeds(config, trial_index, n)
        ds, test, spec, _ = _gen_pair(config, n, data_seed, test_seed)
        t0 = time.perf_counter()
        chosen = zeroth_order_scan(ds, spec, config.zeroth_h, config.beta_step, tags)
        for tag in tags:
            model = LinearModel(W=np.array([[-0.1]]), b=np.array([chosen[tag]]))
            rows.append({
                "experiment": config.experiment,
                "method": tag,
                "n": n,
                "trial": trial_index,
                "regret": normalized_excess_regret(model, test, spec),
                "chosen_h": config.zeroth_h,
                "wall_ms": (time.perf_counter() - t0) * 1e3,
                "beta0": chosen[tag],
            })
    return rows


def _run_h_sensitivity_trial(config: ExperimentConfig, trial_index: int) -> list[dict]:
    """PGB at each fixed h (no model selection across h), warm-started from SPO+."""
    rows = []
    for n in config.n_list:
        data_seed, test_seed, train_seed = _trial_seeds(config, trial_index, n)
        ds, test, spec, _ = _gen_pair(config, n + config.train.val_size,
                                      data_seed, test_seed)
        tc = replace(config.train, seed=train_seed)
        train_data, val_data = split_train_val(ds, tc.val_size)
        warm = pipeline(ds, "spo-plus", spec, tc)
        for h in config.h_list:
            t0 = time.perf_counter()
            report = fit(train_data, val_data, LossKind("pgb", h), spec, tc, warm.best_model)
            rows.append({
                "experiment": config.experiment,
                "method": "pgb",
                "n": n,
                "trial": trial_index,
                "regret": normalized_excess_regret(report.best_model, test, spec),
                "chosen_h": h,
                "wall_ms": (time.perf_counter() - t0) * 1e3,
            })
    return rows


def _sort_key(row):
    h = row["chosen_h"]
    return (row["n"], row["method"], -1.0 if h is None else h, row["trial"])


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def summarize(rows: list[dict]) -> list[RegretReport]:
    groups = {}
    for row in rows:
        groups.setdefault((row["method"], row["n"]), []).append(row["regret"])
    reports = []
    for (method, n) in sorted(groups):
        vals = np.array(groups[(method, n)])
        std = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
        reports.append(RegretReport(method, n, len(vals), float(vals.mean()), std,
                                    1.96 * std / np.sqrt(len(vals))))
    return reports


def run_experiment(config: ExperimentConfig, out_dir: str, threads: int = 1) -> list[dict]:
    """Run all trials, write results.csv and summary.json, return the rows."""
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for chunk in pool.map(run_trial, [config] * config.trials, range(config.trials)):
                rows.extend(chunk)
    else:
        for trial in range(config.trials):
            rows.extend(run_trial(config, trial))
    rows.sort(key=_sort_key)

    csv_path = os.path.join(out_dir, "results.csv")
    with open(csv_path, "w", newline="") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in CSV_COLUMNS) + "\n")

    summary = {
        "experiment": config.experiment,
        "normalization": "hindsight" if config.experiment == "portfolio" else "f_star",
        "config": _config_dict(config),
        "reports": [asdict(r) for r in summarize(rows)],
    }
    if config.experiment == "zeroth-compare":
        summary["beta0"] = {
            tag: [r["beta0"] for r in rows if r["method"] == tag]
            for tag in sorted({r["method"] for r in rows})
        }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return rows


def _config_dict(config: ExperimentConfig) -> dict:
    obj = asdict(config)
    obj["methods"] = list(config.methods)
    obj["n_list"] = list(config.n_list)
    obj["h_list"] = list(config.h_list)
    return obj
