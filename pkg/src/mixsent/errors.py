"""Exception hierarchy shared across the package.

The CLI maps these onto stable exit codes: ConfigError -> 1, DataError
(and subclasses) -> 2, anything else -> 3.
"""


class MixsentError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(MixsentError):
    """Invalid configuration: bad flag values, malformed config files."""


class DataError(MixsentError):
    """Invalid input data: corpora, resource files, model files."""


class CorpusFormatError(DataError):
    """Malformed corpus file. Carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmbeddingFormatError(DataError):
    """Malformed embedding file. Carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class LexiconFormatError(DataError):
    """Malformed lexicon or word-list file."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ModelFormatError(DataError):
    """Truncated or otherwise corrupt model file."""


class ModelVersionError(ModelFormatError):
    """Model file written by an unsupported format version."""


class ModelChecksumError(ModelFormatError):
    """Model file content does not match its embedded checksum."""


class FingerprintMismatchError(DataError):
    """A supplied resource file differs from the one used at fit time."""
