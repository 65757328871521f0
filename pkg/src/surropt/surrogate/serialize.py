"""Self-describing JSON serialization of trained surrogates.

Floats go through Python's shortest-roundtrip repr, so a serialize → load
cycle reproduces bit-identical predictions.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..dataset import Scaler
from .bundle import TrainedSurrogate, TrainingRecord
from .ensemble import EnsembleModel
from .gbt import GBTModel
from .mlp import MLPModel

FORMAT_VERSION = 1


def _scaler_to_dict(s: Scaler) -> dict:
    return {"shift": s.shift.tolist(), "scale": s.scale.tolist(), "kind": s.kind}


def _scaler_from_dict(d: dict) -> Scaler:
    return Scaler(np.asarray(d["shift"]), np.asarray(d["scale"]), d["kind"])


def _gbt_to_dict(g: GBTModel) -> dict:
    return {
        "n_features": g.n_features,
        "learning_rate": g.learning_rate,
        "base_prediction": g.base_prediction,
        "feature": g.feature.tolist(),
        "threshold": g.threshold.tolist(),
        "left": g.left.tolist(),
        "right": g.right.tolist(),
        "value": g.value.tolist(),
        "offsets": g.offsets.tolist(),
        "feature_gains": g.feature_gains.tolist(),
        "max_depth": g.max_depth,
        "train_mse_path": list(g.train_mse_path),
    }


def _gbt_from_dict(d: dict) -> GBTModel:
    return GBTModel(
        n_features=int(d["n_features"]),
        learning_rate=float(d["learning_rate"]),
        base_prediction=float(d["base_prediction"]),
        feature=np.asarray(d["feature"], dtype=np.int64),
        threshold=np.asarray(d["threshold"], dtype=np.float64),
        left=np.asarray(d["left"], dtype=np.int64),
        right=np.asarray(d["right"], dtype=np.int64),
        value=np.asarray(d["value"], dtype=np.float64),
        offsets=np.asarray(d["offsets"], dtype=np.int64),
        feature_gains=np.asarray(d["feature_gains"], dtype=np.float64),
        max_depth=int(d["max_depth"]),
        train_mse_path=tuple(d["train_mse_path"]),
    )


def _mlp_to_dict(m: MLPModel) -> dict:
    return {
        "layer_sizes": list(m.layer_sizes),
        "weights": [W.tolist() for W in m.weights],
        "biases": [b.tolist() for b in m.biases],
        "activation": m.activation,
        "input_scaler": _scaler_to_dict(m.input_scaler),
        "output_scaler": _scaler_to_dict(m.output_scaler),
    }


def _mlp_from_dict(d: dict) -> MLPModel:
    return MLPModel(
        layer_sizes=tuple(d["layer_sizes"]),
        weights=[np.asarray(W, dtype=np.float64) for W in d["weights"]],
        biases=[np.asarray(b, dtype=np.float64) for b in d["biases"]],
        activation=d["activation"],
        input_scaler=_scaler_from_dict(d["input_scaler"]),
        output_scaler=_scaler_from_dict(d["output_scaler"]),
    )


def model_to_dict(ts: TrainedSurrogate) -> dict:
    if ts.kind == "gbt":
        payload: object = [_gbt_to_dict(g) for g in ts.model]
    elif ts.kind == "mlp":
        payload = _mlp_to_dict(ts.model)
    elif ts.kind == "ensemble":
        payload = {
            "weights": ts.model.weights.tolist(),
            "members": [model_to_dict(member) for member in ts.model.members],
        }
    else:
        raise ValueError(f"cannot serialize kind {ts.kind!r}")
    record = ts.record
    return {
        "format_version": FORMAT_VERSION,
        "kind": ts.kind,
        "target_names": list(ts.target_names),
        "record": {
            "hyperparameters": _jsonable(record.hyperparameters),
            "seed": record.seed,
            "cv_score": record.cv_score,
            "wall_time_s": record.wall_time_s,
            "label": record.label,
        },
        "payload": payload,
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def model_from_dict(d: dict) -> TrainedSurrogate:
    if d.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {d.get('format_version')!r}")
    kind = d["kind"]
    if kind == "gbt":
        model: object = tuple(_gbt_from_dict(g) for g in d["payload"])
    elif kind == "mlp":
        model = _mlp_from_dict(d["payload"])
    elif kind == "ensemble":
        members = tuple(model_from_dict(md) for md in d["payload"]["members"])
        model = EnsembleModel(members, np.asarray(d["payload"]["weights"], dtype=np.float64))
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    r = d["record"]
    record = TrainingRecord(
        hyperparameters=r["hyperparameters"],
        seed=r["seed"],
        cv_score=r["cv_score"],
        wall_time_s=r["wall_time_s"],
        label=r["label"],
    )
    return TrainedSurrogate(kind, model, record, tuple(d["target_names"]))


def save_model(ts: TrainedSurrogate, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(ts), sort_keys=True), encoding="utf-8")


def load_model(path) -> TrainedSurrogate:
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
