"""Exception hierarchy shared across the toolkit.

``UserInputError`` subclasses signal problems a user can fix (bad arguments,
malformed configs, missing files); the CLI maps them to exit code 1 without a
stack trace. Everything else is treated as an internal failure (exit code 2).
"""


class NewsrecError(Exception):
    """Base class for all toolkit errors."""


class UserInputError(NewsrecError):
    """An error caused by user-supplied input rather than a toolkit bug."""


class UnknownDatasetError(UserInputError):
    pass


class DownloadError(NewsrecError):
    pass


class HashMismatchError(DownloadError):
    pass


class CorpusError(UserInputError):
    pass


class MissingCorpusError(CorpusError):
    pass


class SchemaVersionError(CorpusError):
    pass


class CorpusFormatError(CorpusError):
    pass


class ReferentialIntegrityError(CorpusError):
    pass


class ConfigError(UserInputError):
    pass


class ConfigNotFoundError(ConfigError):
    pass


class ConfigSyntaxError(ConfigError):
    pass


class ConfigKeyError(ConfigError):
    pass


class ConfigTypeError(ConfigError):
    pass


class ConfigValidationError(ConfigError):
    """Aggregate of every invariant violated by a configuration tree."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {v}" for v in self.violations))


class EmbeddingFileError(UserInputError):
    pass


class CheckpointError(UserInputError):
    pass


class FingerprintMismatchError(CheckpointError):
    pass


class MetricUndefinedError(NewsrecError):
    """A ranking metric is undefined for this impression (e.g. single-class AUC).

    This is a skip signal: callers exclude the impression from the aggregate
    instead of recording a made-up value.
    """
