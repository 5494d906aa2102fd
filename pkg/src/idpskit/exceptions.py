"""Exception types raised by the pipeline stages."""


class IdpsError(Exception):
    """Base class for all idpskit errors."""


class FieldCountError(IdpsError, ValueError):
    """A record line does not have exactly 42 comma-separated fields."""


class EmptyLabelError(IdpsError, ValueError):
    """A record line carries an empty attack label."""


class NumericParseError(IdpsError, ValueError):
    """A continuous feature field could not be parsed as a number."""


class UnknownSymbolError(IdpsError, ValueError):
    """A symbolic feature value is absent from the schema code map (strict mode)."""


class EmptyDatasetError(IdpsError, ValueError):
    """A dataset file contained no records."""


class DegenerateSplitError(IdpsError, ValueError):
    """A requested split would leave at least one partition empty."""


class TrainingDivergedError(IdpsError, ArithmeticError):
    """Training produced a non-finite loss or parameter."""


class RangeExceededError(IdpsError, ValueError):
    """A network parameter does not fit the requested fixed-point format."""

    def __init__(self, layer: int, max_abs: float, limit: float):
        self.layer = layer
        self.max_abs = max_abs
        self.limit = limit
        super().__init__(
            f"layer {layer}: max |value| {max_abs:g} exceeds representable "
            f"limit {limit:g}"
        )


class DegenerateClassError(IdpsError, ValueError):
    """ROC requested for a score set with no positives or no negatives."""


class ModelFormatError(IdpsError, ValueError):
    """A model file is malformed or has an unsupported format version."""
