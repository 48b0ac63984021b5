"""Command-line entry point: run experiments from flags or a TOML config."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import fields, replace

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .experiments import EXPERIMENTS, ExperimentConfig, ExperimentError, run_experiment, summarize
from .train import TrainConfig

SEED_ENV_VAR = "PGOPT_SEED"


class ConfigError(ValueError):
    pass


def load_config(path: str) -> ExperimentConfig:
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: invalid TOML: {exc}") from None
    return config_from_dict(raw, source=path)


def config_from_dict(raw: dict, source: str = "<config>") -> ExperimentConfig:
    raw = dict(raw)
    train_raw = raw.pop("train", {})
    known = {f.name for f in fields(ExperimentConfig)} - {"train"}
    for key in raw:
        if key not in known:
            raise ConfigError(f"{source}: unknown key {key!r}")
    train_known = {f.name for f in fields(TrainConfig)}
    for key in train_raw:
        if key not in train_known:
            raise ConfigError(f"{source}: unknown key 'train.{key}'")
    for key in ("methods", "n_list", "h_list"):
        if key in raw:
            raw[key] = tuple(raw[key])
    try:
        return ExperimentConfig(train=TrainConfig(**train_raw), **raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pgopt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and write results.csv/summary.json")
    run.add_argument("--config", help="TOML config file")
    run.add_argument("--experiment", choices=EXPERIMENTS)
    run.add_argument("--methods", help="comma-separated method list")
    run.add_argument("--n", help="comma-separated training-set sizes")
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--test-size", type=int)
    run.add_argument("--m", type=float)
    run.add_argument("--alpha", type=float)
    run.add_argument("--noise", choices=("add-gaussian", "mult-uniform"))
    run.add_argument("--returns-path")
    run.add_argument("--returns-in-percent", action="store_true", default=None)
    run.add_argument("--zeroth-h", type=float)
    run.add_argument("--h-list", help="comma-separated h values (h-sensitivity)")
    run.add_argument("--epochs", type=int)
    run.add_argument("--out-dir", default="pgopt-results")
    run.add_argument("--threads", type=int, default=1)

    val = sub.add_parser("validate-config", help="parse a TOML config and report problems")
    val.add_argument("config")

    sub.add_parser("list-experiments", help="print the available experiment names")
    return parser


def _overrides_from_args(args) -> dict:
    out = {}
    if args.methods:
        out["methods"] = tuple(args.methods.split(","))
    if args.n:
        out["n_list"] = tuple(int(v) for v in args.n.split(","))
    if args.h_list:
        out["h_list"] = tuple(float(v) for v in args.h_list.split(","))
    for attr, key in (
        ("trials", "trials"), ("test_size", "test_size"), ("m", "m"), ("alpha", "alpha"),
        ("noise", "noise"), ("returns_path", "returns_path"),
        ("returns_in_percent", "returns_in_percent"), ("zeroth_h", "zeroth_h"),
    ):
        val = getattr(args, attr)
        if val is not None:
            out[key] = val
    return out


def _resolve_seed(args) -> int | None:
    # CLI flag wins over the environment variable
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None
    return None


def _cmd_run(args) -> int:
    if args.config:
        config = load_config(args.config)
        if args.experiment and args.experiment != config.experiment:
            raise ConfigError("--experiment contradicts the config file")
    elif args.experiment:
        config = ExperimentConfig(experiment=args.experiment)
    else:
        raise ConfigError("run needs --config or --experiment")
    overrides = _overrides_from_args(args)
    seed = _resolve_seed(args)
    if seed is not None:
        overrides["seed"] = seed
    if overrides:
        config = replace(config, **overrides)
    if args.epochs is not None:
        config = replace(config, train=replace(config.train, epochs=args.epochs))
    rows = run_experiment(config, args.out_dir, threads=args.threads)
    print(f"{'method':<10} {'n':>6} {'trials':>6} {'mean':>12} {'std':>12} {'ci95':>12}")
    for rep in summarize(rows):
        print(f"{rep.method:<10} {rep.n:>6} {rep.trials:>6} "
              f"{rep.mean:>12.6f} {rep.std:>12.6f} {rep.ci95:>12.6f}")
    print(f"wrote {os.path.join(args.out_dir, 'results.csv')}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "list-experiments":
            for name in EXPERIMENTS:
                print(name)
            return 0
        if args.command == "validate-config":
            config = load_config(args.config)
            print(f"ok: {config.experiment}")
            return 0
        return _cmd_run(args)
    except (ConfigError, ExperimentError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
