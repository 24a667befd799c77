"""Typed failures for the extraction sidecar.

Every deliberate raise in this package uses one of these classes, so the
command line can map any of them to exit code 1 with a one-line message.
"""


class ExtractError(Exception):
    """Base class for everything fvextract raises on purpose."""


class BadConfig(ExtractError):
    """Configuration is missing, malformed, or inconsistent."""


class MissingWeights(ExtractError):
    """No usable weights for the requested backbone."""


class UnreadableImage(ExtractError):
    """An input image could not be decoded."""


class InconsistentWidth(ExtractError):
    """A backbone emitted rows of different widths within one run."""


class DuplicateStem(ExtractError):
    """Two input files share a filename stem, so their rows could not be told apart."""


class NoImages(ExtractError):
    """The input directory contains nothing extractable."""
