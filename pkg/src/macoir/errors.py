"""Exception types shared across the toolkit."""


class MacoirError(Exception):
    """Base class for all toolkit errors."""


class CatalogError(MacoirError):
    """Malformed, duplicate, or dangling records in an ontology file."""


class EmbeddingIOError(MacoirError):
    """Corrupt or inconsistent embedding files."""


class VectorLookupError(MacoirError):
    """A required row id is missing from an embedding matrix."""


class ConfigError(MacoirError):
    """Invalid algorithm configuration."""


class CodecError(MacoirError):
    """Invalid ssID vocabulary construction."""


class DecodeError(MacoirError):
    """Constrained decoding failed (e.g. a scorer produced a non-finite score)."""


class EvalError(MacoirError):
    """Inconsistent prediction/query/gold inputs during evaluation."""
