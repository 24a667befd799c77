"""Typed errors shared by all simdist modules.

The CLI maps any SimdistError to exit code 1 and prints the class name on
stderr; UsageError maps to exit code 2.
"""

from __future__ import annotations


class SimdistError(Exception):
    """Base class for every error this package raises deliberately."""


# --- feature-matrix file I/O ---

class BadMagic(SimdistError):
    """File does not start with the FVEC1 magic (or unsupported version)."""


class TruncatedFile(SimdistError):
    """Declared dimensions exceed the available payload bytes."""


class NonFinite(SimdistError):
    """A matrix contains NaN or infinity."""


class DimensionZero(SimdistError):
    """A matrix with zero rows or zero columns."""


class IoFailure(SimdistError):
    """Underlying OS-level read/write failure."""


class RaggedRows(SimdistError):
    """CSV rows do not all have the same number of fields."""


class ParseFailure(SimdistError):
    """Malformed cell, id block, or trailing garbage."""


# --- projection / distance ---

class DimensionMismatch(SimdistError):
    """Two matrices that must share a dimension do not."""


class TooManyComponents(SimdistError):
    """Requested component count outside [1, min(n+m, q)]."""


class DegenerateInput(SimdistError):
    """Reserved: zero-variance input yields zero projections, not an error."""


class EmptyInput(SimdistError):
    """An operation that needs at least one element got none."""


class MixedPrimary(SimdistError):
    """Reports being ranked were computed against different primaries."""


class KTooLarge(SimdistError):
    """Requested more extreme images than the report holds."""


class ZeroRow(SimdistError):
    """Reserved: all-zero table rows are flagged in place, not raised."""


# --- analysis ---

class BadK(SimdistError):
    """Split part count outside {2, 3} without an explicit override."""


class LengthMismatch(SimdistError):
    """Aligned vectors have different lengths."""


class ZeroWindow(SimdistError):
    """Explicit moving-average window smaller than 1."""


class DegenerateScale(SimdistError):
    """Min-max scaled series is degenerate (all inputs equal)."""


class InsufficientCandidates(SimdistError):
    """Fewer images inside the selection band than requested.

    Carries the number of available candidates.
    """

    def __init__(self, candidates: int, requested: int):
        super().__init__(
            f"{candidates} candidate(s) in band, {requested} requested"
        )
        self.candidates = candidates
        self.requested = requested


# --- pixel grids / ODS ---

class BadHeader(SimdistError):
    """Not a binary P5 PGM header."""


class TruncatedPayload(SimdistError):
    """PGM payload shorter than width*height."""


class UnsupportedMaxval(SimdistError):
    """PGM maxval outside [1, 255]."""


# --- synthetic data ---

class BadSpec(SimdistError):
    """Invalid synthetic-generator specification."""


# --- CLI ---

class UsageError(SimdistError):
    """Invalid flag combination; reported before any computation."""
