"""Exception types shared across the package."""


class LplabError(ValueError):
    """Base class for all package-specific rejections."""


class ValidationError(LplabError):
    """Input field violates a structural invariant (NaN/Inf, shape, decay)."""


class BandRangeError(LplabError):
    """Dyadic band index outside the range resolvable on the grid."""


class AliasingError(LplabError):
    """A pseudospectral product would lose or fold genuine spectral content."""


class GeometryError(LplabError):
    """Requested kernel or annulus does not fit inside the periodic box."""


class ConfigError(LplabError):
    """Malformed or inconsistent sweep/CLI configuration."""
