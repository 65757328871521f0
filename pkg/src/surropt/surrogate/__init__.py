"""Surrogate regressors: boosted trees, MLPs, weighted ensembles, tuning."""

from .bundle import KINDS, TrainedSurrogate, TrainingRecord, train_model, wrap_ensemble
from .ensemble import EnsembleModel, simplex_project, train_ensemble
from .gbt import DEFAULT_GBT_HP, GBTModel, train_gbt
from .metrics import ZERO_TARGET_THRESHOLD, RegressionMetrics, evaluate
from .mlp import DEFAULT_MLP_HP, MLPModel, loss_and_gradients, train_mlp
from .serialize import load_model, model_from_dict, model_to_dict, save_model
from .tune import BASE_KIND, DEFAULT_SPACES, Trial, TuneResult, cross_validate, tune

__all__ = [
    "KINDS",
    "TrainedSurrogate",
    "TrainingRecord",
    "train_model",
    "wrap_ensemble",
    "EnsembleModel",
    "simplex_project",
    "train_ensemble",
    "DEFAULT_GBT_HP",
    "GBTModel",
    "train_gbt",
    "ZERO_TARGET_THRESHOLD",
    "RegressionMetrics",
    "evaluate",
    "DEFAULT_MLP_HP",
    "MLPModel",
    "loss_and_gradients",
    "train_mlp",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "save_model",
    "BASE_KIND",
    "DEFAULT_SPACES",
    "Trial",
    "TuneResult",
    "cross_validate",
    "tune",
]
