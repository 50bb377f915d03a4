"""Exception types shared across the package."""


class CROError(Exception):
    """Base class for all croopt errors."""


class NonFiniteObjective(CROError):
    """The objective returned NaN or infinity for an in-bounds point."""


class BudgetExhausted(CROError):
    """Too few objective evaluations left to perform the requested reaction."""


class SameMolecule(CROError):
    """A two-molecule reaction was given the same molecule twice."""


class PopulationTooSmall(CROError):
    """The population cannot support the requested reaction."""


class DimensionMismatch(CROError):
    """Vector lengths disagree with the problem dimension."""


class InvalidConfig(CROError):
    """An algorithm configuration field is missing or out of range."""


class EnergyConservationError(CROError):
    """A successful reaction failed the total-energy ledger check."""


class FormatError(CROError):
    """A transform file is malformed or truncated."""


class ChecksumMismatch(CROError):
    """A transform file's checksum does not match its payload."""


class EmptyCell(CROError):
    """A summary cell has no run records."""


class ExperimentError(CROError):
    """A run inside an experiment failed; carries its (algorithm, benchmark, seed)."""

    def __init__(self, algorithm, benchmark, seed, cause):
        super().__init__(
            f"run failed for {algorithm} on {benchmark} (seed {seed}): {cause!r}"
        )
        self.algorithm = algorithm
        self.benchmark = benchmark
        self.seed = seed
        self.cause = cause
