"""Exception types shared across the package."""


class CountEdmError(Exception):
    """Base class for all countedm errors."""


# --- series kernel ---

class NonPositiveConstantTerm(CountEdmError):
    """Series logarithm requires a strictly positive constant term."""


class IndexBeyondOrder(CountEdmError):
    """Coefficient index exceeds the truncation order of a series."""


# --- EDM families ---

class MeanOutOfDomain(CountEdmError):
    """Mean parameter lies outside the open mean domain of the family."""


class MeasureOverflow(CountEdmError):
    """Generating-measure entry left the representable/accurate range."""


class UnboundedMeasure(CountEdmError):
    """Total mass requested for a family whose measure has no finite mass."""


# --- baselines ---

class InvalidParameters(CountEdmError):
    """Baseline distribution parameters outside their valid range."""


# --- fitting ---

class EmptyData(CountEdmError):
    """Frequency table carries no observations."""


class NoInteriorMaximum(CountEdmError):
    """Profile likelihood is monotone over the expanded search bracket."""


class Underdispersed(CountEdmError):
    """Sample variance does not exceed the mean; moment equation unsolvable."""


class NonConvergence(CountEdmError):
    """Iterative optimiser exhausted its iteration budget."""


# --- goodness of fit ---

class DegeneratePooling(CountEdmError):
    """Cell pooling left too few cells for a meaningful test."""


class ModelZeroOnSupport(CountEdmError):
    """Model assigns zero probability to an observed value."""


# --- data ingestion ---

class ParseError(CountEdmError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class DuplicateValue(ParseError):
    """The same count value appears twice in the input."""


class NegativeCount(ParseError):
    """A frequency or value is negative."""
