"""Exception types shared across the toolkit."""


class StructagError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(StructagError):
    """Operand shapes are not conformable for an operation."""


class CorpusFormatError(StructagError):
    """A corpus file is malformed (bad columns, invalid IOB, ...)."""


class ParseFileError(StructagError):
    """A dependency or graph parse file is malformed or inconsistent."""


class DataError(StructagError):
    """Corpus and parse inputs disagree (counts, lengths, alignment)."""


class ConfigError(StructagError):
    """A configuration value is out of its allowed range."""


class CheckpointError(StructagError):
    """A model checkpoint is missing, corrupted, or inconsistent."""


class TrainingDivergedError(StructagError):
    """Loss or a gradient became non-finite during training."""
