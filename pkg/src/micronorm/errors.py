"""Exception hierarchy shared across the toolkit."""


class MicronormError(Exception):
    """Base class for all toolkit errors."""


class EncodingError(MicronormError):
    """A token could not be phonetically encoded."""


class LexiconError(MicronormError):
    """Raw or compiled lexicon data is malformed."""


class SimilarityError(MicronormError):
    """Invalid input to a distance computation or search."""


class GateError(MicronormError):
    """Classifier training or corpus data is invalid."""


class ConfigError(MicronormError):
    """Inconsistent or unparsable configuration."""
