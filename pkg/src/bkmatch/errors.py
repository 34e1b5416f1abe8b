"""Exception hierarchy shared across the toolkit.

ConfigurationError covers bad invocations (missing files, inconsistent
options); DataError covers malformed inputs encountered while reading.
The CLI maps them to distinct exit codes.
"""


class BkMatchError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(BkMatchError):
    """Invalid configuration or invocation."""


class DataError(BkMatchError):
    """Malformed input data (triples, packs, vectors, alignments)."""
