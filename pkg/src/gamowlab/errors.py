"""Exception hierarchy for gamowlab.

Every failure mode of the numerical machinery maps to a dedicated class so
callers (and the CLI exit-code contract) can tell configuration mistakes,
domain violations, and quadrature breakdowns apart.
"""


class GamowLabError(Exception):
    """Base class for all gamowlab errors."""


class DomainError(GamowLabError):
    """Argument outside the mathematical domain of an operation."""


class PoleError(GamowLabError):
    """Evaluation requested at (or too close to) a zero of a Jost function."""


class BoundaryZeroError(GamowLabError):
    """A search-region boundary passes too close to a zero."""


class NonIntegerWindingError(GamowLabError):
    """Boundary quadrature did not produce a near-integer winding number."""


class ConvergenceError(GamowLabError):
    """Iterative refinement failed; partial results may be attached."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ResidueError(GamowLabError):
    """Contour residue quadrature failed its internal consistency check."""


class ExtrapolationError(GamowLabError):
    """Regulator-removal extrapolation did not contract."""


class FalloffError(GamowLabError):
    """Packet falloff certificate cannot dominate the integrand growth."""


class CertificateError(GamowLabError):
    """Evaluation requested beyond a packet's analyticity certificate."""


class SemigroupDomainError(GamowLabError):
    """Time-evolution factor requested outside its validity half-line."""


class RegulatorSignError(GamowLabError):
    """Regulator sign does not match the pole kind."""


class BackgroundDivergenceError(GamowLabError):
    """Background contour contributions failed to decay; diagnostics attached."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class WindowNotFoundError(GamowLabError):
    """No single-pole dominance window exists for the given packet."""


class NoPolesError(GamowLabError):
    """Operation requires at least one resonance pole."""


class ConfigError(GamowLabError):
    """Invalid run configuration."""
