"""Exception types shared across the toolkit."""


class SurroptError(Exception):
    """Base class for all toolkit errors."""


class DatasetFormatError(SurroptError):
    """Malformed dataset input: missing file contents, short header, bad shape."""


class EmptyDatasetError(SurroptError):
    """No usable rows remain after filtering."""


class HyperparameterError(SurroptError):
    """A hyperparameter value is outside its declared range."""


class TrainingDivergedError(SurroptError):
    """Training produced a non-finite loss or non-finite parameters."""


class UndefinedMAPEError(SurroptError):
    """Every target value is below the zero-exclusion threshold; MAPE is undefined."""


class UnsupportedDimensionError(SurroptError):
    """Indicator requested for an unsupported objective count."""


class ConfigError(SurroptError):
    """Invalid pipeline configuration."""


class StageError(SurroptError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage '{stage}' failed: {message}")
        self.stage = stage
