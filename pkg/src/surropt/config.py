"""Pipeline configuration: an INI file of nested key-value sections.

Example::

    [data]
    source = oracle          ; oracle | csv
    problem = zdt1           ; oracle source
    sampler = lhd            ; lhd | uniform
    n_samples = 1000
    ; csv source instead:
    ; path = designs.csv
    ; feature_columns = 28
    ; directions = minimize, minimize

    [run]
    seed = 42
    test_fraction = 0.2
    models = gbt, ensemble, mlp
    output_dir = out

    [tuning]
    budget = 10
    folds = 3

    [nsga2]
    pop_size = 100
    generations = 200
    crossover_prob = 0.9
    eta_c = 15
    eta_m = 20

    [validation]
    mode = oracle            ; oracle | none
    max_candidates = 200
    second_cycle = false

Unknown sections or keys are rejected so typos surface as config errors.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError

CONFIG_VERSION = 1

MODEL_KINDS = ("gbt", "ensemble", "mlp", "mlp2")

_KNOWN_KEYS = {
    "data": {"source", "problem", "sampler", "n_samples", "path", "feature_columns", "directions"},
    "run": {"seed", "test_fraction", "models", "output_dir", "threads"},
    "tuning": {"budget", "folds"},
    "nsga2": {
        "pop_size",
        "generations",
        "crossover_prob",
        "eta_c",
        "eta_m",
        "mutation_rate",
    },
    "validation": {"mode", "max_candidates", "second_cycle"},
}


@dataclass
class PipelineConfig:
    # data
    source: str = "oracle"
    problem: str = "zdt1"
    sampler: str = "lhd"
    n_samples: int = 1000
    csv_path: Optional[str] = None
    feature_columns: int = 0
    directions: Optional[tuple[str, ...]] = None
    # run
    seed: int = 0
    test_fraction: float = 0.2
    models: tuple[str, ...] = ("gbt",)
    output_dir: str = "out"
    threads: int = 1
    # tuning
    budget: int = 10
    folds: int = 3
    # nsga2
    pop_size: int = 100
    generations: int = 200
    crossover_prob: float = 0.9
    eta_c: float = 15.0
    eta_m: float = 20.0
    mutation_rate: Optional[float] = None
    # validation
    validation_mode: str = "oracle"
    max_candidates: int = 200
    second_cycle: bool = False

    def validate(self) -> "PipelineConfig":
        if self.source not in ("oracle", "csv"):
            raise ConfigError(f"data.source must be oracle or csv, got {self.source!r}")
        if self.source == "csv":
            if not self.csv_path:
                raise ConfigError("csv source needs data.path")
            if self.feature_columns < 1:
                raise ConfigError("csv source needs data.feature_columns >= 1")
        else:
            if self.sampler not in ("lhd", "uniform"):
                raise ConfigError(f"data.sampler must be lhd or uniform, got {self.sampler!r}")
            if self.n_samples < 4:
                raise ConfigError("data.n_samples must be >= 4")
        if not self.models:
            raise ConfigError("run.models must name at least one model kind")
        for kind in self.models:
            if kind not in MODEL_KINDS:
                raise ConfigError(f"unknown model kind {kind!r}; choose from {MODEL_KINDS}")
        if len(set(self.models)) != len(self.models):
            raise ConfigError("run.models contains duplicates")
        if not (0.0 < self.test_fraction < 1.0):
            raise ConfigError("run.test_fraction must lie in (0, 1)")
        if self.budget < 1:
            raise ConfigError("tuning.budget must be >= 1")
        if self.folds < 2:
            raise ConfigError("tuning.folds must be >= 2")
        if self.pop_size < 4 or self.pop_size % 2:
            raise ConfigError("nsga2.pop_size must be even and >= 4")
        if self.generations < 0:
            raise ConfigError("nsga2.generations must be >= 0")
        if self.validation_mode not in ("oracle", "none"):
            raise ConfigError("validation.mode must be oracle or none")
        if self.max_candidates < 1:
            raise ConfigError("validation.max_candidates must be >= 1")
        if self.threads < 1:
            raise ConfigError("run.threads must be >= 1")
        if self.directions is not None:
            for d in self.directions:
                if d not in ("minimize", "maximize"):
                    raise ConfigError(f"directions entries must be minimize/maximize, got {d!r}")
        return self


def _parse_models(raw: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in raw.split(",") if s.strip())


def load_config(path) -> PipelineConfig:
    """Parse and validate an INI config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser[section]:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    cfg = PipelineConfig()

    def get(section, key, cast, default):
        if parser.has_option(section, key):
            raw = parser.get(section, key).strip()
            try:
                return cast(raw)
            except ValueError as exc:
                raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from exc
        return default

    def as_bool(raw: str) -> bool:
        v = raw.strip().lower()
        if v in ("1", "true", "yes", "on"):
            return True
        if v in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")

    cfg.source = get("data", "source", str, cfg.source)
    cfg.problem = get("data", "problem", str, cfg.problem)
    cfg.sampler = get("data", "sampler", str, cfg.sampler)
    cfg.n_samples = get("data", "n_samples", int, cfg.n_samples)
    cfg.csv_path = get("data", "path", str, cfg.csv_path)
    cfg.feature_columns = get("data", "feature_columns", int, cfg.feature_columns)
    raw_dirs = get("data", "directions", str, None)
    if raw_dirs:
        cfg.directions = tuple(s.strip() for s in raw_dirs.split(",") if s.strip())

    cfg.seed = get("run", "seed", int, cfg.seed)
    cfg.test_fraction = get("run", "test_fraction", float, cfg.test_fraction)
    cfg.models = get("run", "models", _parse_models, cfg.models)
    cfg.output_dir = get("run", "output_dir", str, cfg.output_dir)
    cfg.threads = get("run", "threads", int, cfg.threads)

    cfg.budget = get("tuning", "budget", int, cfg.budget)
    cfg.folds = get("tuning", "folds", int, cfg.folds)

    cfg.pop_size = get("nsga2", "pop_size", int, cfg.pop_size)
    cfg.generations = get("nsga2", "generations", int, cfg.generations)
    cfg.crossover_prob = get("nsga2", "crossover_prob", float, cfg.crossover_prob)
    cfg.eta_c = get("nsga2", "eta_c", float, cfg.eta_c)
    cfg.eta_m = get("nsga2", "eta_m", float, cfg.eta_m)
    cfg.mutation_rate = get("nsga2", "mutation_rate", float, cfg.mutation_rate)

    cfg.validation_mode = get("validation", "mode", str, cfg.validation_mode)
    cfg.max_candidates = get("validation", "max_candidates", int, cfg.max_candidates)
    cfg.second_cycle = get("validation", "second_cycle", as_bool, cfg.second_cycle)

    return cfg.validate()


def config_to_dict(cfg: PipelineConfig) -> dict:
    """Flat, JSON-friendly echo of the configuration for the run report."""
    return {
        "config_version": CONFIG_VERSION,
        "data": {
            "source": cfg.source,
            "problem": cfg.problem if cfg.source == "oracle" else None,
            "sampler": cfg.sampler if cfg.source == "oracle" else None,
            "n_samples": cfg.n_samples if cfg.source == "oracle" else None,
            "path": cfg.csv_path,
            "feature_columns": cfg.feature_columns or None,
            "directions": list(cfg.directions) if cfg.directions else None,
        },
        "run": {
            "seed": cfg.seed,
            "test_fraction": cfg.test_fraction,
            "models": list(cfg.models),
            "output_dir": cfg.output_dir,
            "threads": cfg.threads,
        },
        "tuning": {"budget": cfg.budget, "folds": cfg.folds},
        "nsga2": {
            "pop_size": cfg.pop_size,
            "generations": cfg.generations,
            "crossover_prob": cfg.crossover_prob,
            "eta_c": cfg.eta_c,
            "eta_m": cfg.eta_m,
            "mutation_rate": cfg.mutation_rate,
        },
        "validation": {
            "mode": cfg.validation_mode,
            "max_candidates": cfg.max_candidates,
            "second_cycle": cfg.second_cycle,
        },
    }
