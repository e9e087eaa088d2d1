"""Exception types shared across the package."""


class TangentCatError(Exception):
    """Base class for all library errors."""


class RelationNotEquivalence(TangentCatError):
    """The nilpotency relation is not an equivalence relation with full diagonal."""


class ProductUndefined(TangentCatError):
    """Product requested for algebras that are not single powers of the dual numbers."""


class CompositionMismatch(TangentCatError):
    """Source/target of composed morphisms do not line up."""


class ArityMismatch(TangentCatError):
    """Polynomial morphism arities are incompatible."""


class DomainMismatch(TangentCatError):
    """Scalar domains of combined values differ."""


class PullbackUnavailable(TangentCatError):
    """A required pullback cannot be constructed in the concrete category."""


class NonLinearComparison(TangentCatError):
    """A comparison morphism is not linear, so invertibility cannot be decided."""


class ProviderBoundTooSmall(TangentCatError):
    """A pullback power beyond the provider's configured bound was requested."""


class NotOverBase(TangentCatError):
    """Morphism is not a member of the hom module over the bundle base."""


class NotAdditive(TangentCatError):
    """Bundle morphism is not additive, so no transformation can be induced."""


class NotADifferentialFunctor(TangentCatError):
    """Functor failed the structure-preservation checks required for evaluation."""


class ManifestParse(TangentCatError):
    """Manifest file is malformed.  Carries optional line/column diagnostics."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class UnknownBuiltin(TangentCatError):
    """Requested builtin category or fixture does not exist."""
