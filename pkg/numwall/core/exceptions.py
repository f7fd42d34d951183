"""
Exception hierarchy for numwall
"""


class NumWallError(Exception):
    """Base class for all numwall errors"""


class ModulusError(NumWallError, ValueError):
    """The requested modulus is not a prime"""


class ModulusMismatchError(NumWallError, ValueError):
    """Two field elements from different fields were combined"""


class FieldDivisionError(NumWallError, ZeroDivisionError):
    """Inversion of the zero element"""


class SequenceDomainError(NumWallError, IndexError):
    """A sequence was read outside the interval on which it is defined"""


class SequenceFormatError(NumWallError, ValueError):
    """A sequence file could not be parsed"""


class ConfigurationError(NumWallError, ValueError):
    """Invalid parameters, systems or command-line values"""


class RegionError(NumWallError, ValueError):
    """A region is empty or lies outside the available data"""


class WallBuildError(NumWallError):
    """The wall builder hit a state the frame recurrence rules out"""


class WallConsistencyError(NumWallError):
    """The zero set of a wall is not a union of separated squares"""


class DiscoveryError(NumWallError):
    """
    Tiling discovery failed

    Attributes:
        stage (str): Pass that failed ("coding", "substitution", "closure", ...)
        coordinates (tuple or None): Offending lattice coordinates, when known
    """

    def __init__(self, message, stage, coordinates=None):
        super().__init__(message)
        self.stage = stage
        self.coordinates = coordinates


class VerificationError(NumWallError):
    """A verification obligation could not be evaluated"""
