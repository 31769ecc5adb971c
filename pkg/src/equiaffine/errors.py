"""Exception hierarchy shared by every module of the package."""


class EquiaffineError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(EquiaffineError, ValueError):
    """Evaluation outside the domain of a function (log of a negative, 1/0, ...)."""


class SingularSystem(EquiaffineError, ArithmeticError):
    """A small linear system is numerically singular."""


# -- expression language ----------------------------------------------------

class ParseError(EquiaffineError, ValueError):
    def __init__(self, message, offset, expected=(), text=None):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        self.text = text
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class UnknownIdentifier(EquiaffineError, ValueError):
    def __init__(self, name, offset=None):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r}")


class UnknownSurface(EquiaffineError, KeyError):
    def __str__(self):
        return f"unknown catalog surface {self.args[0]!r}"


# -- geometry ----------------------------------------------------------------

class GeometryError(EquiaffineError):
    """A pointwise geometric precondition failed."""

    status = "geometry-error"


class NotImmersed(GeometryError):
    status = "not-immersed"


class NotPositiveDefinite(GeometryError):
    status = "not-positive-definite"


class NotLocallyConvex(GeometryError):
    status = "not-locally-convex"


class DegenerateData(GeometryError):
    status = "degenerate"


class InflectionPoint(GeometryError):
    status = "inflection"


class SeedAtInflection(InflectionPoint):
    pass


class ZeroVector(GeometryError, ValueError):
    status = "zero-vector"


class ZeroCovector(ZeroVector):
    pass


class NotOnHypersurface(GeometryError):
    status = "not-on-hypersurface"


class NotConvexHypersurface(GeometryError):
    status = "not-convex-hypersurface"


class UnknownQuadric(EquiaffineError, KeyError):
    def __str__(self):
        return f"unknown quadric kind {self.args[0]!r}"
