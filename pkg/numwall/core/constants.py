"""
Constants for numwall
"""
import os
from enum import Enum, IntEnum, auto

# Application info
APP_NAME = "numwall"
APP_VERSION = "1.0.1"
APP_AUTHOR = "numwall developers"

# Environment
THREADS_ENV_VAR = "NW_THREADS"
HOME_ENV_VAR = "NUMWALL_HOME"
DEFAULT_HOME_DIR = os.path.join(os.path.expanduser('~'), '.numwall')

# Field defaults
DEFAULT_MODULUS = 3
INVERSE_TABLE_LIMIT = 1 << 16

# Wall defaults
SENTINEL_ROWS = 2
DEFAULT_STREAM_HISTORY = 64
DEFAULT_INVALID_GRAY = 127

# Continued fractions
DEFAULT_CF_SHIFTS = 64
DEFAULT_CF_PRECISION = 2048

# Discovery defaults and the reference run on the paper-folding wall over F_3
DEFAULT_K = 2
DEFAULT_TEL = 12
DEFAULT_CID = 8
REFERENCE_REGION = (-55, 2400, -5220, 5220)
REFERENCE_CLOSURE_LOWER = (-4, -326)
REFERENCE_CLOSURE_UPPER = (149, 325)
REFERENCE_TILE_COUNT = 2353
REFERENCE_TETRAD_COUNT = 6721
REFERENCE_SEEDS = {(0, 0): 1, (0, 1): 2, (1, 0): 3, (1, 1): 4}
REFERENCE_ZERO_TILE = 5
REFERENCE_SPECIAL_TILES = frozenset({1, 2, 6, 7, 12, 13, 20, 29})
REFERENCE_PHI_17 = ((35, 45), (47, 58))

# Census window for the pagoda wall over F_3, and the discovery run on it: the wall region
# and the (tel, cid) candidates tried in order, the first passing certificate being reported
PAGODA_CENSUS_REGION = (0, 499, -1000, 999)
PAGODA_DISCOVERY_REGION = (-60, 2400, -5220, 5220)
PAGODA_DISCOVERY_CANDIDATES = ((12, 8), (8, 4), (16, 8))

# Window of the paper-folding wall over F_3 used for images and cross-checks
SAMPLE_WALL_REGION = (-2, 39, -41, 41)

# Tiling T near the origin, rows -1..10 and columns -10..11
TILE_GRID_ORIGIN = (-1, -10)
TILE_GRID_SAMPLE = (
    (5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5),
    (12, 6, 29, 20, 7, 13, 29, 20, 12, 6, 1, 2, 7, 13, 1, 2, 12, 6, 1, 2, 7, 13),
    (41, 96, 80, 65, 52, 40, 30, 21, 14, 8, 3, 4, 9, 15, 22, 31, 41, 8, 3, 4, 9, 40),
    (134, 114, 97, 81, 66, 53, 42, 32, 23, 16, 10, 11, 17, 24, 33, 43, 54, 67, 10, 11, 115, 135),
    (156, 136, 116, 98, 82, 68, 55, 44, 34, 25, 18, 19, 26, 35, 45, 56, 69, 83, 99, 117, 137, 157),
    (179, 158, 138, 118, 100, 84, 70, 57, 46, 36, 27, 28, 37, 47, 58, 71, 85, 101, 119, 139, 159, 180),
    (204, 181, 160, 140, 120, 102, 86, 72, 59, 48, 38, 39, 49, 60, 73, 87, 103, 121, 141, 161, 182, 205),
    (230, 206, 183, 162, 142, 122, 104, 88, 74, 61, 50, 51, 62, 75, 89, 105, 123, 143, 163, 184, 207, 231),
    (256, 232, 208, 185, 164, 144, 124, 106, 90, 76, 63, 64, 77, 91, 107, 125, 145, 165, 186, 209, 233, 257),
    (70, 258, 234, 210, 105, 166, 146, 126, 108, 92, 78, 79, 93, 109, 127, 147, 167, 187, 211, 235, 259, 283),
    (86, 72, 260, 236, 212, 188, 168, 148, 128, 110, 94, 95, 111, 129, 149, 169, 189, 213, 237, 261, 284, 308),
    (104, 88, 285, 262, 238, 214, 190, 170, 150, 130, 112, 113, 131, 151, 171, 191, 215, 239, 263, 286, 309, 337),
)

# Zeroth-row tiles: tile -> (coded letter, bottom row of its image in coded letters, coding row)
ZEROTH_ROW_TABLE = {
    2: (0, (0, 2), "1100010011000"),
    13: (1, (0, 3), "1100010011100"),
    7: (2, (1, 6), "1100011011000"),
    12: (3, (1, 7), "1100011011100"),
    20: (4, (4, 2), "1110010011000"),
    6: (5, (4, 3), "1110010011100"),
    1: (6, (5, 6), "1110011011000"),
    29: (7, (5, 7), "1110011011100"),
}

# One-dimensional paper-folding system
PAPER_FOLDING_SUBSTITUTION = {0: (0, 2), 1: (0, 3), 2: (1, 2), 3: (1, 3)}
PAPER_FOLDING_CODING = {0: 0, 1: 1, 2: 0, 3: 1}
PAPER_FOLDING_SEEDS = (2, 0)
DEFAULT_SUBSTITUTION_WINDOW = 1 << 12
DEFAULT_COVER_SIDE = 7
DEFAULT_PATTERN_SAMPLES = 200
DEFAULT_ZEROTH_ROW_WIDTH = 10 ** 4

# Quadratic relations over F_2 as X² + (a/b)·X + c/d: (a, b, c, d), constant term first
QUADRATIC_RELATIONS = {
    "phi": ((1,), (1,), (0, 1), (1, 0, 0, 0, 1)),
    "pi": ((1, 0, 1), (0, 1), (1,), (0, 1)),
}

# Empirical deficiency scans
CONJECTURE_MODULI = (7, 11)
CONJECTURE_SIZE = 1000

class SequenceKind(Enum):
    """Enum for sequence generators"""
    PAPER_FOLDING = "paper-folding"
    PAGODA = "pagoda"
    THUE_MORSE = "thue-morse"
    CONSTANT = "constant"
    FILE = "file"
    SUBST_SYSTEM = "subst-system"

class CenteringMode(Enum):
    """Enum for the placement of coded blocks on the lattice"""
    TOP_LEFT = auto()
    CENTERED = auto()

class FrameCase(Enum):
    """Enum for the case of the frame recurrence that produced an entry"""
    SENTINEL = auto()
    SEQUENCE = auto()
    CROSS = auto()
    WINDOW = auto()
    INNER = auto()
    OUTER = auto()

class OutputFormat(Enum):
    """Enum for report formats on standard output"""
    JSON = "json"
    TEXT = "text"

class ExitCode(IntEnum):
    """Process exit codes"""
    OK = 0
    ERROR = 1
    USAGE = 2
    FAILED = 3
