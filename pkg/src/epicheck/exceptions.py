"""Exception types shared across the package."""


class NotPositiveDefiniteError(ValueError):
    """Cholesky factorization failed: the matrix is not positive definite."""


class DimensionError(ValueError):
    """Shape, size, or index-domain violation."""


class PreconditionError(ValueError):
    """A stated hypothesis of an inequality does not hold for the inputs."""


class DegenerateLawError(ValueError):
    """The operation would produce a distribution without a density."""


class ConfigError(ValueError):
    """Invalid suite configuration."""
