"""Error types raised by meshlab."""


class MeshlabError(Exception):
    """Base class for domain errors."""


class ValidationError(MeshlabError, ValueError):
    """An input violates a documented invariant."""


class ParseError(MeshlabError, ValueError):
    """A scenario, layout or constraint file could not be parsed."""


class NoFeasibleLayout(MeshlabError):
    """Stress minimisation could not satisfy the distance constraints."""


class NoRoute(MeshlabError):
    """The layout admits no route between source and destination."""


class AllRoutesDepleted(MeshlabError):
    """Every candidate route contains a depleted battery-powered node."""


class MissingLayout(MeshlabError):
    """A scenario references a layout file that does not exist."""
