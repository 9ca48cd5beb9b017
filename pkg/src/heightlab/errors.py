"""Exception hierarchy shared across the package.

Exit-code mapping used by the command line tool:

* ``ConfigError`` (and subclasses)  -> exit 2 (usage / configuration)
* ``ResourceLimitError``            -> exit 3 (guard tripped)
* everything else                   -> ordinary Python traceback
"""


class HeightLabError(Exception):
    """Base class for all package-specific errors."""


class FieldMismatchError(HeightLabError):
    """Operands live over different fields (or wrong characteristic)."""


class ZeroInputError(HeightLabError):
    """A value that must be nonzero (or a point with all coordinates zero)."""


class PoleError(HeightLabError):
    """A rational function was evaluated at a pole."""


class SingularFiberError(HeightLabError):
    """The discriminant vanishes at the requested parameter value."""


class FiberMismatchError(HeightLabError):
    """Group-law operands belong to different fibers or families."""


class NotOnCurveError(HeightLabError):
    """Affine coordinates do not satisfy the Weierstrass equation."""


class DomainError(HeightLabError):
    """A point lies outside the declared domain of a morphism."""


class BaseLocusError(DomainError):
    """All defining forms of a morphism vanished at the point."""


class RoundTripError(HeightLabError):
    """projection(section(P)) != P: the morphism pair is inconsistent."""


class ResourceLimitError(HeightLabError):
    """A resource guard tripped (size, depth, or enumeration cap)."""


class FactorizationError(ResourceLimitError):
    """Factoring exceeded its cap and the residual is not certified prime."""


class ConfigError(HeightLabError):
    """Invalid configuration file or command-line usage."""


class ExpressionError(ConfigError):
    """Syntax or semantic error in a coefficient expression.

    Carries the 0-based ``position`` of the offending token when known.
    """

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position
