"""Config-driven orchestration: acquire, train, explain, optimize, validate,
and report, emitting plot-ready CSV artifacts plus a JSON run report.

Every stage derives its randomness from the config seed through fixed tags,
so two runs with the same config produce identical artifacts byte for byte
(timing fields aside).
"""

from __future__ import annotations

import json
import csv as _csv
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ._seeding import TAG_ENSEMBLE, TAG_MOO_INIT, TAG_SAMPLE, TAG_SPLIT, TAG_TRAIN, TAG_TUNE, TAG_XAI, seed_for
from .config import MODEL_KINDS, PipelineConfig, config_to_dict
from .dataset import TabularDataset, load_csv, split, write_csv
from .errors import StageError
from .indicators import RunFront, compare_runs, simulation_rate, write_indicators_csv
from .moo import Individual, nsga2_run, problem_from_surrogate
from .oracle import OracleProblem, generate_dataset, get_problem
from .surrogate import (
    RegressionMetrics,
    TrainedSurrogate,
    evaluate,
    train_ensemble,
    train_model,
    tune,
    wrap_ensemble,
)
from .surrogate.metrics import ZERO_TARGET_THRESHOLD
from .surrogate.tune import BASE_KIND, DEFAULT_SPACES, TuneResult
from .xai import gain_importance, partial_dependence, permutation_importance, write_importances_csv, write_pdp_csv

STAGES = ("acquire", "split", "train", "explain", "optimize", "validate", "indicators", "report")

ENSEMBLE_POOL_SIZE = 5
PDP_TOP_FEATURES = 3
PDP_GRID_SIZE = 20


@dataclass
class ValidationResult:
    """Outcome of re-evaluating predicted front candidates with the oracle."""

    candidate_ids: np.ndarray
    survivor_ids: np.ndarray
    X: np.ndarray
    predicted: np.ndarray
    validated: np.ndarray
    n_candidates: int
    n_infeasible: int
    rate: float
    mape_per_objective: list[Optional[float]]


@dataclass
class ModelRunResult:
    label: str
    surrogate: TrainedSurrogate
    tuning: Optional[TuneResult]
    metrics: list[RegressionMetrics]
    predicted_front: list[Individual] = field(default_factory=list)
    n_evaluations: int = 0
    n_nonfinite: int = 0
    validation: Optional[ValidationResult] = None
    cycles: int = 1


@dataclass
class RunReport:
    config: dict
    dataset_info: dict = field(default_factory=dict)
    models: dict = field(default_factory=dict)  # label -> ModelRunResult
    indicator_rows: list = field(default_factory=list)
    files: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    completed_stages: list = field(default_factory=list)
    failed_stage: Optional[str] = None


def _thin_candidates(P: np.ndarray, cap: int) -> np.ndarray:
    """Indices of at most ``cap`` points, removing the most crowded first.

    Works on range-normalized objective values; each step drops the point
    with the smallest nearest-neighbor distance (higher index on ties).
    """
    k = P.shape[0]
    if k <= cap:
        return np.arange(k, dtype=np.int64)
    span = P.max(axis=0) - P.min(axis=0)
    span = np.where(span > 0, span, 1.0)
    Q = (P - P.min(axis=0)) / span
    dist = np.sqrt(((Q[:, None, :] - Q[None, :, :]) ** 2).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    alive = np.ones(k, dtype=bool)
    nn_idx = dist.argmin(axis=1)
    nn = dist[np.arange(k), nn_idx]
    for _ in range(k - cap):
        cand = np.where(alive, nn, np.inf)
        victim = int(np.nonzero(cand == cand.min())[0][-1])
        alive[victim] = False
        dist[:, victim] = np.inf
        dist[victim, :] = np.inf
        stale = np.nonzero(alive & (nn_idx == victim))[0]
        for i in stale:
            nn_idx[i] = int(dist[i].argmin())
            nn[i] = dist[i, nn_idx[i]]
    return np.nonzero(alive)[0]


def _candidate_mape(predicted: np.ndarray, validated: np.ndarray) -> list[Optional[float]]:
    out: list[Optional[float]] = []
    for j in range(validated.shape[1]):
        y = validated[:, j]
        mask = np.abs(y) >= ZERO_TARGET_THRESHOLD
        if mask.any():
            out.append(100.0 * float((np.abs(y[mask] - predicted[mask, j]) / np.abs(y[mask])).mean()))
        else:
            out.append(None)
    return out


def validate_candidates(
    front: list[Individual], problem: OracleProblem, max_candidates: int = 200
) -> ValidationResult:
    """Re-evaluate predicted front candidates with the ground-truth oracle.

    Candidates beyond ``max_candidates`` are thinned by nearest-neighbor
    removal in predicted objective space. Infeasible candidates are dropped
    and counted; survivors carry predicted and validated objectives plus a
    per-objective MAPE between the two. An all-infeasible front yields rate
    0.0 rather than an error.
    """
    if not front:
        raise ValueError("predicted front is empty")
    X_all = np.array([ind.x for ind in front])
    P_all = np.array([ind.objectives for ind in front])
    ids = _thin_candidates(P_all, max_candidates)
    X, P = X_all[ids], P_all[ids]
    F, _ = problem.evaluate_matrix(X)
    ok = np.isfinite(F).all(axis=1)
    n_candidates = len(ids)
    n_infeasible = int((~ok).sum())
    rate = simulation_rate(n_candidates, n_candidates - n_infeasible)
    survivors = ids[ok]
    if ok.any():
        mape = _candidate_mape(P[ok], F[ok])
    else:
        mape = [None] * F.shape[1]
    return ValidationResult(
        candidate_ids=ids,
        survivor_ids=survivors,
        X=X[ok],
        predicted=P[ok],
        validated=F[ok],
        n_candidates=n_candidates,
        n_infeasible=n_infeasible,
        rate=rate,
        mape_per_objective=mape,
    )


# ---------------------------------------------------------------------------
# CSV artifact writers
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    return repr(float(v))


def _write_metrics_csv(metrics: list[RegressionMetrics], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _csv.writer(fh)
        w.writerow(["target", "mape", "mse", "excluded_zero_targets"])
        for m in metrics:
            w.writerow([m.target_name, _fmt(m.mape), _fmt(m.mse), m.excluded_zero_targets])


def _write_residuals_csv(metrics: list[RegressionMetrics], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _csv.writer(fh)
        w.writerow(["target", "index", "residual"])
        for m in metrics:
            for i, r in enumerate(m.residuals):
                w.writerow([m.target_name, i, _fmt(r)])


def _write_predicted_front_csv(front: list[Individual], objective_names, path) -> None:
    d = front[0].x.shape[0] if front else 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _csv.writer(fh)
        header = ["id"] + [f"x_{j}" for j in range(d)]
        header += [f"pred_{name}" for name in objective_names]
        w.writerow(header)
        for i, ind in enumerate(front):
            w.writerow([i] + [_fmt(v) for v in ind.x] + [_fmt(v) for v in ind.objectives])


def _write_validated_front_csv(res: ValidationResult, objective_names, path) -> None:
    d = res.X.shape[1] if res.X.size else 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _csv.writer(fh)
        header = ["id"] + [f"x_{j}" for j in range(d)]
        header += [f"pred_{name}" for name in objective_names]
        header += [f"true_{name}" for name in objective_names]
        w.writerow(header)
        for row, ind_id in enumerate(res.survivor_ids):
            w.writerow(
                [int(ind_id)]
                + [_fmt(v) for v in res.X[row]]
                + [_fmt(v) for v in res.predicted[row]]
                + [_fmt(v) for v in res.validated[row]]
            )


# ---------------------------------------------------------------------------
# The pipeline
# ---------------------------------------------------------------------------


class _Pipeline:
    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg.validate()
        self.out = Path(cfg.output_dir)
        self.report = RunReport(config=config_to_dict(cfg))
        self.dataset: Optional[TabularDataset] = None
        self.train_set: Optional[TabularDataset] = None
        self.test_set: Optional[TabularDataset] = None
        self.problem: Optional[OracleProblem] = None
        self._tune_cache: dict[str, TuneResult] = {}

    # -- helpers ----------------------------------------------------------

    def _record_file(self, name: str) -> Path:
        if name not in self.report.files:
            self.report.files.append(name)
        return self.out / name

    def _label_seed(self, tag: int, label: str) -> int:
        return seed_for(self.cfg.seed, tag, MODEL_KINDS.index(label))

    def _directions(self) -> tuple[str, ...]:
        if self.problem is not None:
            return self.problem.directions
        if self.cfg.directions is not None:
            return self.cfg.directions
        return tuple("minimize" for _ in self.dataset.target_names)

    def _tuned(self, kind: str) -> TuneResult:
        """Tune a base kind (gbt / mlp / mlp2) once per run."""
        if kind not in self._tune_cache:
            self._tune_cache[kind] = tune(
                self.train_set,
                kind,
                DEFAULT_SPACES[kind],
                self.cfg.budget,
                self.cfg.folds,
                self._label_seed(TAG_TUNE, kind),
            )
        return self._tune_cache[kind]

    # -- stages -----------------------------------------------------------

    def stage_acquire(self):
        cfg = self.cfg
        if cfg.source == "oracle":
            self.problem = get_problem(cfg.problem)
            self.dataset, dropped = generate_dataset(
                self.problem, cfg.sampler, cfg.n_samples, seed_for(cfg.seed, TAG_SAMPLE)
            )
            info = {
                "source": "oracle",
                "problem": cfg.problem,
                "sampler": cfg.sampler,
                "requested_rows": cfg.n_samples,
                "rows": self.dataset.n_rows,
                "dropped_rows": dropped,
            }
        else:
            self.dataset, dropped = load_csv(cfg.csv_path, cfg.feature_columns)
            info = {
                "source": "csv",
                "path": str(cfg.csv_path),
                "rows": self.dataset.n_rows,
                "dropped_rows": dropped,
            }
        self.report.dataset_info = info

    def stage_split(self):
        self.train_set, self.test_set = split(
            self.dataset, self.cfg.test_fraction, seed_for(self.cfg.seed, TAG_SPLIT)
        )
        self.report.dataset_info["n_train"] = self.train_set.n_rows
        self.report.dataset_info["n_test"] = self.test_set.n_rows

    def _build_ensemble(self, label: str) -> tuple[TrainedSurrogate, Optional[TuneResult]]:
        """Top configurations across the gbt/mlp searches, combined by
        holdout-learned weights, then refit on the full training set."""
        pool: list[tuple[float, str, dict]] = []
        for kind in ("gbt", "mlp"):
            for trial in self._tuned(kind).trials:
                if np.isfinite(trial.score):
                    pool.append((trial.score, kind, trial.hyperparameters))
        pool.sort(key=lambda t: (t[0], t[1]))
        pool = pool[:ENSEMBLE_POOL_SIZE]
        if len(pool) < 2:
            raise StageError("train", "ensemble needs at least 2 usable pool configurations")
        seed = self._label_seed(TAG_ENSEMBLE, label)
        fit_train, holdout = split(self.train_set, 0.2, seed_for(seed, 1))
        members = [
            train_model(fit_train, BASE_KIND[kind], hp, seed_for(seed, 2, i))
            for i, (_, kind, hp) in enumerate(pool)
        ]
        weights = train_ensemble(members, holdout).weights
        final_members = tuple(
            train_model(self.train_set, BASE_KIND[kind], hp, seed_for(seed, 2, i))
            for i, (_, kind, hp) in enumerate(pool)
        )
        from .surrogate.ensemble import EnsembleModel

        surrogate = wrap_ensemble(
            EnsembleModel(final_members, weights), self.train_set.target_names, seed, label
        )
        return surrogate, None

    def _train_one(self, label: str, train_set: TabularDataset) -> ModelRunResult:
        if label == "ensemble":
            surrogate, tuning = self._build_ensemble(label)
        else:
            tuning = self._tuned(label)
            surrogate = train_model(
                train_set,
                BASE_KIND[label],
                tuning.best,
                self._label_seed(TAG_TRAIN, label),
                label=label,
            )
            surrogate.record.cv_score = tuning.best_score
        metrics = evaluate(surrogate, self.test_set)
        return ModelRunResult(label, surrogate, tuning, metrics)

    def stage_train(self):
        for label in self.cfg.models:
            result = self._train_one(label, self.train_set)
            self.report.models[label] = result
            _write_metrics_csv(result.metrics, self._record_file(f"metrics_{label}.csv"))
            _write_residuals_csv(result.metrics, self._record_file(f"residuals_{label}.csv"))

    def stage_explain(self):
        rows = []
        for label in self.cfg.models:
            result = self.report.models[label]
            surrogate = result.surrogate
            importances = {}
            for j, target in enumerate(self.train_set.target_names):
                perm = permutation_importance(
                    surrogate,
                    self.train_set,
                    j,
                    repeats=5,
                    seed=self._label_seed(TAG_XAI, label),
                )
                importances[j] = perm.values
                for f, name in enumerate(self.train_set.feature_names):
                    rows.append((name, target, "permutation", perm.values[f], label))
                if surrogate.kind == "gbt":
                    gain = gain_importance(surrogate.model[j])
                    importances[j] = gain.values
                    for f, name in enumerate(self.train_set.feature_names):
                        rows.append((name, target, "gain", gain.values[f], label))
            for j, target in enumerate(self.train_set.target_names):
                top = np.argsort(-importances[j], kind="stable")[:PDP_TOP_FEATURES]
                for f in top:
                    curve = partial_dependence(surrogate, self.train_set, int(f), PDP_GRID_SIZE)
                    name = f"pdp_{label}_{target}_{self.train_set.feature_names[f]}.csv"
                    write_pdp_csv(curve, j, self._record_file(name))
        write_importances_csv(rows, self._record_file("importances.csv"))

    def _optimize_one(self, label: str, result: ModelRunResult):
        bounds = self.problem.bounds if self.problem is not None else self.dataset.feature_bounds()
        spec = problem_from_surrogate(
            result.surrogate, bounds, self.dataset.target_names, self._directions()
        )
        run = nsga2_run(
            spec,
            self.cfg.pop_size,
            self.cfg.generations,
            crossover_prob=self.cfg.crossover_prob,
            eta_c=self.cfg.eta_c,
            eta_m=self.cfg.eta_m,
            mutation_rate=self.cfg.mutation_rate,
            seed=self._label_seed(TAG_MOO_INIT, label),
        )
        result.predicted_front = run.front
        result.n_evaluations = run.n_evaluations
        result.n_nonfinite = run.n_nonfinite

    def stage_optimize(self):
        for label in self.cfg.models:
            result = self.report.models[label]
            self._optimize_one(label, result)
            _write_predicted_front_csv(
                result.predicted_front,
                self.dataset.target_names,
                self._record_file(f"front_predicted_{label}.csv"),
            )

    def _validation_enabled(self) -> bool:
        return self.cfg.validation_mode == "oracle" and self.problem is not None

    def stage_validate(self):
        if not self._validation_enabled():
            return
        for label in self.cfg.models:
            result = self.report.models[label]
            if not result.predicted_front:
                continue
            result.validation = validate_candidates(
                result.predicted_front, self.problem, self.cfg.max_candidates
            )
            if self.cfg.second_cycle and result.validation.survivor_ids.size:
                self._second_cycle(label, result)
            _write_validated_front_csv(
                result.validation,
                self.dataset.target_names,
                self._record_file(f"front_validated_{label}.csv"),
            )

    def _second_cycle(self, label: str, result: ModelRunResult):
        """Optional retraining cycle: fold validated candidates back into the
        training set, refit, re-optimize, re-validate."""
        v = result.validation
        augmented = TabularDataset(
            self.train_set.feature_names,
            self.train_set.target_names,
            np.vstack([self.train_set.features, v.X]),
            np.vstack([self.train_set.targets, v.validated]),
        )
        refreshed = self._train_one(label, augmented)
        result.surrogate = refreshed.surrogate
        result.metrics = refreshed.metrics
        self._optimize_one(label, result)
        result.validation = validate_candidates(
            result.predicted_front, self.problem, self.cfg.max_candidates
        )
        result.cycles = 2
        _write_metrics_csv(result.metrics, self._record_file(f"metrics_{label}.csv"))
        _write_residuals_csv(result.metrics, self._record_file(f"residuals_{label}.csv"))
        _write_predicted_front_csv(
            result.predicted_front,
            self.dataset.target_names,
            self._record_file(f"front_predicted_{label}.csv"),
        )

    def stage_indicators(self):
        if not self._validation_enabled():
            return
        runs = []
        for label in self.cfg.models:
            result = self.report.models[label]
            v = result.validation
            if v is None or v.validated.size == 0:
                continue
            runs.append(RunFront(label, v.validated, v.rate))
        if not runs:
            return
        self.report.indicator_rows = compare_runs(
            runs, self.dataset.targets, self._directions()
        )
        write_indicators_csv(self.report.indicator_rows, self._record_file("indicators.csv"))

    def stage_report(self):
        # the emitted file must already list this stage as completed
        self.report.completed_stages.append("report")
        self.report.timings.setdefault("report", 0.0)
        emit_report(self.report, self.out)

    def run(self, until: Optional[str] = None) -> RunReport:
        self.out.mkdir(parents=True, exist_ok=True)
        stages = {
            "acquire": self.stage_acquire,
            "split": self.stage_split,
            "train": self.stage_train,
            "explain": self.stage_explain,
            "optimize": self.stage_optimize,
            "validate": self.stage_validate,
            "indicators": self.stage_indicators,
            "report": self.stage_report,
        }
        if until is not None and until not in STAGES:
            raise ValueError(f"unknown stage {until!r}")
        for stage in STAGES:
            t0 = time.perf_counter()
            try:
                stages[stage]()
            except StageError:
                raise
            except Exception as exc:
                self.report.failed_stage = stage
                try:
                    emit_report(self.report, self.out)
                except OSError:
                    pass
                raise StageError(stage, str(exc)) from exc
            if stage != "report":
                self.report.timings[stage] = time.perf_counter() - t0
                self.report.completed_stages.append(stage)
            if until is not None and stage == until:
                break
        return self.report


def run(cfg: PipelineConfig, until: Optional[str] = None) -> RunReport:
    """Execute the pipeline (optionally stopping after a named stage)."""
    return _Pipeline(cfg).run(until)


def generate_to_csv(cfg: PipelineConfig) -> Path:
    """Oracle sampling only: write the generated database as dataset.csv."""
    pipe = _Pipeline(cfg)
    pipe.out.mkdir(parents=True, exist_ok=True)
    pipe.stage_acquire()
    path = pipe.out / "dataset.csv"
    write_csv(pipe.dataset, path)
    return path


# ---------------------------------------------------------------------------
# Report serialization
# ---------------------------------------------------------------------------


def _report_to_dict(report: RunReport) -> dict:
    models = {}
    for label, res in report.models.items():
        entry = {
            "kind": res.surrogate.kind,
            "hyperparameters": _plain(res.surrogate.record.hyperparameters),
            "cv_score": res.surrogate.record.cv_score,
            "trials": (
                [
                    {"index": t.index, "hyperparameters": _plain(t.hyperparameters), "score": _plain(t.score)}
                    for t in res.tuning.trials
                ]
                if res.tuning is not None
                else None
            ),
            "metrics": {
                m.target_name: {
                    "mape": m.mape,
                    "mse": m.mse,
                    "excluded_zero_targets": m.excluded_zero_targets,
                }
                for m in res.metrics
            },
            "n_front_candidates": len(res.predicted_front),
            "n_evaluations": res.n_evaluations,
            "n_nonfinite_evaluations": res.n_nonfinite,
            "cycles": res.cycles,
            "files": {
                "metrics": f"metrics_{label}.csv",
                "front_predicted": f"front_predicted_{label}.csv" if res.predicted_front else None,
                "front_validated": f"front_validated_{label}.csv" if res.validation else None,
            },
        }
        if res.validation is not None:
            v = res.validation
            entry["validation"] = {
                "n_candidates": v.n_candidates,
                "n_infeasible": v.n_infeasible,
                "simulation_rate": v.rate,
                "mape_per_objective": v.mape_per_objective,
            }
        models[label] = entry
    return {
        "config": report.config,
        "dataset": report.dataset_info,
        "models": models,
        "indicators": [
            {
                "label": r.label,
                "simulation_rate": r.simulation_rate,
                "gd": r.gd,
                "gd_plus": r.gd_plus,
                "hv": r.hv,
            }
            for r in report.indicator_rows
        ],
        "files": sorted(report.files),
        "completed_stages": list(report.completed_stages),
        "failed_stage": report.failed_stage,
        "timings": {k: v for k, v in report.timings.items()},
    }


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def emit_report(report: RunReport, out_dir) -> Path:
    """Write report.json (sorted keys, stable float formatting)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "report.json"
    if "report.json" not in report.files:
        report.files.append("report.json")
    payload = _report_to_dict(report)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path
