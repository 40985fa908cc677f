"""Exception hierarchy shared by all modules.

Every error carries a short machine-readable ``kind`` used by the CLI when it
writes the error JSON to stderr.
"""


class TomoforgeError(Exception):
    kind = "error"

    def to_dict(self):
        return {"error": self.kind, "message": str(self)}


class InvalidInputError(TomoforgeError, ValueError):
    kind = "invalid-input"


class ShapeError(TomoforgeError, ValueError):
    kind = "shape"


class InvalidDimensionError(InvalidInputError):
    kind = "invalid-dimension"


class BasisIndexError(TomoforgeError, IndexError):
    kind = "index"


class DensityViolation(InvalidInputError):
    """A matrix failed one of the density-matrix invariants.

    Attributes:
        invariant: one of ``"hermitian"``, ``"psd"``, ``"trace"``.
        magnitude: size of the violation (deviation, or the offending
            eigenvalue for ``"psd"``).
    """

    kind = "density-violation"

    def __init__(self, invariant, magnitude, message=None):
        self.invariant = invariant
        self.magnitude = float(magnitude)
        super().__init__(message or f"{invariant} violated: {magnitude:.3e}")

    def to_dict(self):
        d = super().to_dict()
        d.update(invariant=self.invariant, magnitude=self.magnitude)
        return d


class ConsistencyError(TomoforgeError, RuntimeError):
    """An internal identity that must hold to tolerance did not."""

    kind = "internal-consistency"


class DataError(TomoforgeError, ValueError):
    """Measurement data is not a probability distribution."""

    kind = "data"


class NumericalDegeneracyError(TomoforgeError, ArithmeticError):
    kind = "numerical-degeneracy"


class PropertyViolation(TomoforgeError, AssertionError):
    kind = "property-violation"


class ConfigError(TomoforgeError, ValueError):
    kind = "config"


class UnderdeterminedError(TomoforgeError, ArithmeticError):
    """The design matrix does not pin down every unknown.

    Attributes:
        rank: numerical rank of the system block of the design.
        determined: orthonormal rows spanning the determined subspace of the
            unknown component vector, shape ``(rank, n_unknowns)``.
        values: projections of the least-squares solution onto those rows.
    """

    kind = "under-determined"

    def __init__(self, message, rank, determined, values):
        super().__init__(message)
        self.rank = rank
        self.determined = determined
        self.values = values

    def to_dict(self):
        d = super().to_dict()
        d.update(rank=int(self.rank), determined=[list(map(float, r)) for r in self.determined])
        return d


class AccuracyError(TomoforgeError, ArithmeticError):
    kind = "accuracy"


class NoInformationError(TomoforgeError, ValueError):
    kind = "no-information"


class DomainError(TomoforgeError, ValueError):
    kind = "domain"


class TruncationError(DomainError):
    kind = "domain-truncation"


class ResolutionError(TomoforgeError, ArithmeticError):
    kind = "resolution"


class PivotError(TomoforgeError, ArithmeticError):
    kind = "pivot"
