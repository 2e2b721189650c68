"""Exception hierarchy of the engine.

Every domain failure carries a ``witness`` payload (a plain dict of exact
values) so reports and the CLI can show what broke, not just that it broke.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all domain errors."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = dict(witness) if witness else {}


class ParseError(EngineError):
    """Malformed input document or expression."""


class PoleOrderError(EngineError):
    """Higgs field violates the allowed pole pattern."""


class NonSemisimpleLeading(EngineError):
    """Order-two coefficient at infinity is not semisimple."""


class NonSplitSpectrum(EngineError):
    """A required characteristic polynomial does not split over Q(i)."""


class CentralizerError(EngineError):
    """Order-one coefficient at infinity does not commute with the leading term."""


class NotNilpotent(EngineError):
    """weight_filtration called on a non-nilpotent matrix."""


class AssumptionViolated(EngineError):
    """A numbered item of the main spectral assumption fails."""


class NotAMorphism(EngineError):
    """The twisted Higgs field does not map the source lattice into the target."""


class SingularMatrix(EngineError):
    """det == 0 where injectivity was required (degree-zero hypercohomology appears)."""


class DegenerateTransform(EngineError):
    """Transformed rank is zero; the transform is refused."""


class InterpolationInconsistent(EngineError):
    """Fallback fiber samples do not fit the degree bound."""


class PoleOrderViolation(EngineError):
    """Computed transformed Higgs field exceeds the proven pole orders."""


class NotDecreasing(EngineError):
    """Computed transformed family violates the decreasing property."""


class AxiomViolation(EngineError):
    """A family fails the R-parabolic sheaf axioms."""
