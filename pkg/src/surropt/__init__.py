"""surropt: surrogate-assisted multiobjective optimization toolkit.

Train and tune tabular surrogate regressors, explain them, drive NSGA-II
against their predictions, validate the resulting Pareto candidates with a
ground-truth oracle, and rank validated fronts with quality indicators.
"""

from .config import PipelineConfig, load_config
from .dataset import (
    FeatureBounds,
    Scaler,
    TabularDataset,
    apply_scaler,
    fit_scaler,
    invert_scaler,
    latin_hypercube,
    load_csv,
    split,
    uniform_random,
    write_csv,
)
from .indicators import (
    IndicatorRow,
    NormalizationSpec,
    RunFront,
    compare_runs,
    gd,
    gd_plus,
    hypervolume,
    normalize,
    simulation_rate,
)
from .kernels import USING_NUMBA
from .moo import (
    Individual,
    NSGA2Result,
    ProblemSpec,
    crowding_distance,
    dominance_ranks,
    fast_non_dominated_sort,
    nsga2_run,
    pareto_filter,
    polynomial_mutation,
    problem_from_oracle,
    problem_from_surrogate,
    sbx_crossover,
)
from .oracle import (
    EvaluationOutcome,
    OracleProblem,
    evaluate_batch,
    generate_dataset,
    get_problem,
    true_front,
)
from .pipeline import RunReport, ValidationResult, emit_report, run, validate_candidates
from .surrogate import (
    EnsembleModel,
    GBTModel,
    MLPModel,
    RegressionMetrics,
    TrainedSurrogate,
    cross_validate,
    evaluate,
    load_model,
    save_model,
    train_ensemble,
    train_gbt,
    train_mlp,
    train_model,
    tune,
)
from .xai import ImportanceVector, PDPCurve, gain_importance, partial_dependence, permutation_importance

__version__ = "0.1.0"
