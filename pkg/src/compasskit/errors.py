"""Exception types raised across the toolkit.

Parsers, perception and scoring raise the specific class for the failure;
the pipeline wraps them with the failing stage name (StageFailure).
"""


class CompassError(Exception):
    """Base class for all toolkit errors."""


# --- structure parsing ---

class MalformedRecord(CompassError):
    """A record line matched its prefix but could not be parsed."""


class EmptyStructure(CompassError):
    """A parsed structure contains zero atoms."""


class CountsMismatch(CompassError):
    """SDF counts line disagrees with the actual atom/bond blocks."""


class UnknownElement(CompassError):
    """Element symbol not present in the element table."""


class MissingSection(CompassError):
    """Required MOL2 section absent."""


class IoFailure(CompassError):
    """File could not be written."""


# --- perception / geometry ---

class MissingParameters(CompassError):
    """An atom falls outside a parameter table (charges or force field)."""


class EmptyPocket(CompassError):
    """No protein residue within the pocket cutoff of the ligand."""


class CutoffExceedsCell(CompassError):
    """Neighbor query cutoff larger than the grid cell size."""


class DegenerateGeometry(CompassError):
    """Zero-length arm in an angle computation."""


# --- scoring ---

class MalformedWeightFile(CompassError):
    """Weight file line is not 'key = value'."""


class MissingSlot(CompassError):
    """Weight file lacks a required component slot."""


class LayoutMismatch(CompassError):
    """Fingerprints with different slot layouts cannot be compared."""


class LengthMismatch(CompassError):
    """Paired sequences differ in length."""


class EmptyInput(CompassError):
    """An operation requiring at least one element received none."""


class WeightOutOfRange(CompassError):
    """Loss mixing weight outside [0, 1]."""


# --- pipeline ---

class InvalidConfig(CompassError):
    """Configuration failed validation before any work started."""


class EmptyDataset(CompassError):
    """Audit directory contains no pair subfolders."""


class BackendFailure(CompassError):
    """Docking backend crashed or violated the wire contract."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


class StageFailure(CompassError):
    """An assessment stage failed; carries the stage name and the cause."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}': {cause}")
        self.stage = stage
        self.cause = cause
