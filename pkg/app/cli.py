"""
Command-line entry point: simulate, verify and export.

Exit codes: 0 on success, 1 on I/O failure or failed checks, 2 on bad
arguments or parameters. Precedence of settings: flags, then the JSON file
given by --config, then REINFORCE_WALK_SEED (seed only), then defaults.
"""
import argparse
import json
import logging
import math
import sys
from functools import partial
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .config import APP_NAME, DEFAULT_THREADS, VERSION, get_default_seed, setup_logging
from .errors import ReinforceError, SimulationError
from .utils import walk
from .utils.export_utils import (
    cluster_table,
    export_table,
    open_output,
    reports_to_json,
    sample_table,
    trajectory_table,
    tree_table,
    urn_table,
)
from .utils.patree import grow_continuous, grow_discrete, percolate
from .utils.replicas import replica_rng, run_replicas
from .utils.srs import SRSConfig, SRSMethod, sample_paths, simulate_srs_replicas
from .utils.theory import Model, RegimeReport, regime
from .utils.urn import UrnModel, position_from_urn, replacement_rule, simulate_urn

logger = logging.getLogger(__name__)

MODEL_ALIASES = {
    "reinforced": Model.ERW1,
    "erw1": Model.ERW1,
    "strong": Model.ERW2,
    "erw2": Model.ERW2,
    "srs": Model.SRS,
}
SIMULATE_TARGETS = ("erw", "srs", "tree", "urn")


class RunConfig(BaseModel):
    """Fully resolved settings of one CLI invocation."""

    model_config = ConfigDict(extra="forbid")

    command: Literal["simulate", "verify", "regime", "list-checks"]
    target: Optional[str] = None
    model: Optional[str] = None
    b: float = Field(0.0, ge=0.0)
    p: float = Field(0.5, gt=0.0, lt=1.0)
    alpha: Optional[float] = Field(None, gt=0.0, le=2.0)
    dim: int = Field(1, ge=1)
    n: int = Field(1000, ge=1)
    n_grid: Optional[List[int]] = None
    t_grid: Optional[List[float]] = None
    replicas: int = Field(1, ge=1)
    seed: int
    method: Optional[str] = None
    output: Optional[str] = None
    format: Literal["csv", "json"] = "csv"
    threads: int = Field(DEFAULT_THREADS, ge=1)
    dump: bool = False
    continuous: bool = False

    @model_validator(mode="after")
    def check_combination(self) -> "RunConfig":
        if self.model is not None and self.model not in MODEL_ALIASES:
            raise ValueError(f"unknown model {self.model!r}; choose from {sorted(MODEL_ALIASES)}")
        if self.command == "simulate":
            if self.target not in SIMULATE_TARGETS:
                raise ValueError(f"simulate needs one of {SIMULATE_TARGETS}, got {self.target!r}")
            if self.target == "srs" and self.alpha is None:
                raise ValueError("simulate srs needs --alpha")
            if self.target in ("erw", "urn") and self.resolved_model is Model.SRS:
                raise ValueError(f"simulate {self.target} needs an ERW model, got {self.model!r}")
            allowed = {"erw": ("walk", "urn"), "srs": ("direct", "clusters")}.get(self.target)
            if self.method is not None and (allowed is None or self.method not in allowed):
                raise ValueError(f"--method {self.method!r} is not valid for simulate {self.target}")
            if self.n_grid is not None and (self.target != "srs" or self.method != "clusters"):
                raise ValueError("--n-grid is available for simulate srs --method clusters")
            if self.t_grid is not None and any(not 0.0 < t <= 1.0 for t in self.t_grid):
                raise ValueError("--t-grid values must lie in (0, 1]")
        if self.command == "regime" and self.model is None:
            raise ValueError("regime needs --model")
        if self.command == "verify" and not self.target:
            raise ValueError("verify needs a check name or 'all'")
        return self

    @property
    def resolved_model(self) -> Model:
        if self.command == "simulate" and self.target == "srs":
            return Model.SRS
        if self.model is None:
            return Model.ERW2
        return MODEL_ALIASES[self.model]


def _int_list(raw: str) -> List[int]:
    return [int(x) for x in raw.split(",") if x.strip()]


def _float_list(raw: str) -> List[float]:
    return [float(x) for x in raw.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    """Argument parser; unspecified options are left out so they cannot override --config."""
    suppress = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=suppress, help="Base seed")
    common.add_argument("--threads", type=int, default=suppress, help="Replica worker processes")
    common.add_argument("--config", dest="config_path", default=None, help="JSON settings file")
    common.add_argument("--output", "-o", default=suppress, help="Output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=suppress)
    common.add_argument("--log-level", default=None, help="Logging level (default LOG_LEVEL)")

    model_args = argparse.ArgumentParser(add_help=False)
    model_args.add_argument("--model", default=suppress, help=", ".join(MODEL_ALIASES))
    model_args.add_argument("--b", type=float, default=suppress, help="Reinforcement b >= 0")
    model_args.add_argument("--p", type=float, default=suppress, help="Memory p in (0, 1)")
    model_args.add_argument("--alpha", type=float, default=suppress, help="Stability index in (0, 2]")

    parser = argparse.ArgumentParser(prog="python -m app", description=f"{APP_NAME} {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", parents=[common, model_args], help="Simulate and export")
    sim.add_argument("target", choices=SIMULATE_TARGETS)
    sim.add_argument("--dim", type=int, default=suppress)
    sim.add_argument("--n", type=int, default=suppress, help="Horizon")
    sim.add_argument("--n-grid", dest="n_grid", type=_int_list, default=suppress)
    sim.add_argument("--t-grid", dest="t_grid", type=_float_list, default=suppress)
    sim.add_argument("--replicas", type=int, default=suppress)
    sim.add_argument("--method", default=suppress, help="walk|urn (erw), direct|clusters (srs)")
    sim.add_argument("--dump", action="store_true", default=suppress, help="Node rows for tree")
    sim.add_argument("--continuous", action="store_true", default=suppress)

    ver = sub.add_parser("verify", parents=[common], help="Run a named check or 'all'")
    ver.add_argument("target")

    sub.add_parser("regime", parents=[common, model_args], help="Print the regime report")
    sub.add_parser("list-checks", parents=[common], help="List registered checks")
    return parser


def load_config_file(path: str) -> Dict[str, Any]:
    """Read a JSON object of RunConfig fields."""
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return data


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags over the config file over the environment seed over defaults."""
    data: Dict[str, Any] = {}
    if args.config_path:
        data.update(load_config_file(args.config_path))
    flags = {k: v for k, v in vars(args).items() if k not in ("config_path", "log_level")}
    data.update(flags)
    data.setdefault("seed", get_default_seed())
    return RunConfig(**data)


def _emit_regime(report: RegimeReport) -> None:
    sys.stderr.write(report.model_dump_json() + "\n")


def _erw_path(config: walk.WalkConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    return walk.run(config, n, rng).positions[:, 0]


def _urn_path(model: UrnModel, b: float, p: float, n: int, rng: np.random.Generator) -> np.ndarray:
    rule = replacement_rule(model, b, p)
    masses = simulate_urn(rule, n, rng)
    positions = position_from_urn(rule, masses, np.arange(1, n + 1))
    return np.concatenate([[0.0], np.rint(positions)])


def _simulate_erw(cfg: RunConfig) -> tuple:
    model = cfg.resolved_model
    method = cfg.method or "walk"
    if method == "walk":
        rule = walk.UpdateRule.ON_MEMORY_ONLY if model is Model.ERW1 else walk.UpdateRule.ALWAYS
        fn = partial(_erw_path, walk.WalkConfig(p=cfg.p, b=cfg.b, rule=rule), cfg.n)
    else:
        urn_model = UrnModel.REINFORCED_ERW if model is Model.ERW1 else UrnModel.STRONG_ERW
        fn = partial(_urn_path, urn_model, cfg.b, cfg.p, cfg.n)
    paths = np.stack(run_replicas(fn, cfg.replicas, cfg.seed, cfg.threads))
    if cfg.t_grid is None:
        return trajectory_table(paths)
    steps = sorted({int(math.floor(t * cfg.n)) for t in cfg.t_grid})
    return trajectory_table(paths[:, steps], steps)


def _simulate_srs(cfg: RunConfig) -> tuple:
    config = SRSConfig(
        alpha=cfg.alpha, dim=cfg.dim, b=cfg.b, p=cfg.p, n=cfg.n, replicas=cfg.replicas, seed=cfg.seed
    )
    if cfg.n_grid is not None:
        grid = sorted(set(cfg.n_grid))
        return trajectory_table(sample_paths(config, grid, cfg.replicas, replica_rng(cfg.seed, 0)), grid)
    method = SRSMethod(cfg.method or "direct")
    return sample_table(simulate_srs_replicas(config, method, cfg.threads), name="S")


def _simulate_tree(cfg: RunConfig) -> tuple:
    rng = replica_rng(cfg.seed, 0)
    grow = grow_continuous if cfg.continuous else grow_discrete
    forest = percolate(grow(cfg.n, cfg.b, rng), cfg.p, rng)
    return tree_table(forest.rows()) if cfg.dump else cluster_table(forest)


def _simulate_urn(cfg: RunConfig) -> tuple:
    model = cfg.resolved_model
    urn_model = UrnModel.REINFORCED_ERW if model is Model.ERW1 else UrnModel.STRONG_ERW
    fn = partial(simulate_urn, replacement_rule(urn_model, cfg.b, cfg.p), cfg.n)
    return urn_table(np.stack(run_replicas(fn, cfg.replicas, cfg.seed, cfg.threads)))


SIMULATORS: Dict[str, Callable[[RunConfig], tuple]] = {
    "erw": _simulate_erw,
    "srs": _simulate_srs,
    "tree": _simulate_tree,
    "urn": _simulate_urn,
}


def cmd_simulate(cfg: RunConfig) -> int:
    """
    Report the regime of the simulated model on stderr, simulate and write the table.

    Trees carry no walk, so no regime is reported for them.
    """
    if cfg.target != "tree":
        alpha = cfg.alpha if cfg.target == "srs" else None
        _emit_regime(regime(cfg.resolved_model, cfg.b, cfg.p, alpha))
    header, rows = SIMULATORS[cfg.target](cfg)
    export_table(cfg.output, header, rows, cfg.format)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    """Run one check or all of them and write the MCReport JSON array."""
    from .checks import CHECKS

    names = sorted(CHECKS) if cfg.target == "all" else [cfg.target]
    unknown = [name for name in names if name not in CHECKS]
    if unknown:
        sys.stderr.write(f"unknown check {unknown[0]!r}; valid checks:\n")
        for name in sorted(CHECKS):
            sys.stderr.write(f"  {name}\n")
        return 2
    reports = []
    for name in names:
        logger.info("Running check %s (seed %d)", name, cfg.seed)
        batch = CHECKS[name]().run(cfg.seed, cfg.threads)
        failed = [r.name for r in batch if not r.passed]
        logger.info("Check %s: %d reports, %d failed", name, len(batch), len(failed))
        reports.extend(batch)
    with open_output(cfg.output) as sink:
        sink.write(reports_to_json(reports))
    return 0 if all(r.passed for r in reports) else 1


def cmd_regime(cfg: RunConfig) -> int:
    report = regime(cfg.resolved_model, cfg.b, cfg.p, cfg.alpha)
    with open_output(cfg.output) as sink:
        sink.write(report.model_dump_json(indent=2) + "\n")
    return 0


def cmd_list_checks(cfg: RunConfig) -> int:
    from .checks import CHECKS

    with open_output(cfg.output) as sink:
        for name in sorted(CHECKS):
            check = CHECKS[name].config
            sink.write(f"{name}\t{check.criterion}\t{check.description}\n")
    return 0


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "regime": cmd_regime,
    "list-checks": cmd_list_checks,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run the command and map failures onto exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    setup_logging(args.log_level)
    try:
        cfg = resolve_config(args)
        return COMMANDS[cfg.command](cfg)
    except ValidationError as exc:
        logger.error("Invalid arguments: %s", exc)
        return 2
    except SimulationError:
        logger.exception("Simulation invariant violated")
        return 1
    except (ReinforceError, ValueError) as exc:
        logger.error("%s", exc)
        return 2
    except OSError as exc:
        logger.error("I/O failure: %s", exc)
        return 1
