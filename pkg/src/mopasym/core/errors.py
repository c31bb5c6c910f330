"""
Exception hierarchy for mopasym.

Every numerical module raises a subclass of MopAsymError so that the CLI can
map failures onto a single exit code with a machine-parseable reason.
"""

from __future__ import annotations


class MopAsymError(RuntimeError):
    """Base class for all library errors."""

    @property
    def name(self) -> str:
        return self.__class__.__name__


class InvalidDenominator(MopAsymError):
    """A hypergeometric denominator parameter is a nonpositive integer."""


class DivergentSeries(MopAsymError):
    """A nonterminating series was requested outside its disc of convergence."""


class DegenerateParameters(MopAsymError):
    """Parameters hit an excluded configuration (e.g. alpha_i - alpha_j integer)."""


class InvalidParameters(MopAsymError):
    """Family parameters violate their stated constraints."""


class OutOfDomain(MopAsymError):
    """An evaluation point lies outside the domain of the requested representation."""


class SingularMomentMatrix(MopAsymError):
    """The orthogonality system built from moments has no unique monic solution."""


class NonIntegrable(MopAsymError):
    """A weight has no finite moments for the given parameters."""


class ZeroCountMismatch(MopAsymError):
    """Fewer sign changes were detected than zeros were expected."""


class SearchExhausted(MopAsymError):
    """A zero scan reached its bound before finding the requested zeros."""


class DegenerateFit(MopAsymError):
    """A convergence-order fit received zero or too few error values."""


class ConfigError(MopAsymError):
    """A run configuration could not be parsed or validated."""
