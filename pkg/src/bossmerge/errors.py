"""Exception hierarchy shared by all modules."""


class BossError(Exception):
    """Base class for every error raised by :mod:`bossmerge`."""


class MalformedGraphError(BossError, ValueError):
    """A BOSS graph breaks one of its structural invariants."""


class GraphCountMismatchError(MalformedGraphError):
    """Merge cursors ran past the end of an input, or did not reach it."""


class IncompatibleGraphsError(BossError, ValueError):
    """Two graphs cannot be merged (different k or sigma)."""


class FormatError(BossError):
    """A serialized file cannot be decoded."""


class BadMagicError(FormatError):
    pass


class UnsupportedVersionError(FormatError):
    pass


class TruncatedError(FormatError):
    pass


class InvalidGraphFileError(FormatError):
    """The file decodes, but the graph in it is not a valid BOSS graph."""
