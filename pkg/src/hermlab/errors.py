"""Exception types shared across the library.

The CLI maps these onto its exit-code contract: config errors exit 2,
singular metrics exit 3, unsupported capabilities exit 4.
"""


class HermlabError(Exception):
    """Base class for all library errors."""


class SingularMetricError(HermlabError):
    """A metric value failed the Hermitian positive-definite requirement."""


class IndexCompatibilityError(HermlabError):
    """Tensor index extents or kinds are incompatible for the requested operation."""


class DomainError(HermlabError):
    """A chart point (or its finite-difference stencil) leaves the declared domain."""


class ResolutionError(HermlabError):
    """A discretization parameter is below the supported minimum."""


class UnsupportedGeometryError(HermlabError):
    """The requested capability is not available for this geometry."""


class ConfigError(HermlabError):
    """Malformed run configuration or input file."""
