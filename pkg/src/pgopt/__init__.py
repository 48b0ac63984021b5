"""Perturbation-gradient surrogate losses for predict-then-optimize learning."""

from .datagen import Dataset, NoiseSpec, mix_seed
from .losses import LossEval, LossKind, decision_loss, mse, pgb, pgc, pgf, spo_plus
from .model import AdamState, LinearModel, adam_step, init_model, param_grad
from .oracle import (
    OracleSolution,
    OracleSpec,
    binary_spec,
    capped_simplex_spec,
    diameter_bound,
    enumerated_spec,
    grid_path_spec,
    interval_spec,
    solve,
    solve_batch,
)
from .train import TrainConfig, TrainReport, fit, fit_eto, pipeline, select_h
from .experiments import (
    ExperimentConfig,
    RegretReport,
    normalized_excess_regret,
    run_experiment,
    run_trial,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
