"""
Windows of a Number Wall and the deficiency census
"""
import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from numwall.core.exceptions import RegionError, WallConsistencyError
from numwall.core.utils import Region

logger = logging.getLogger('numwall')

BROKEN = -1

@dataclass(frozen=True)
class WindowRecord:
    """
    A maximal zero block of the wall

    Unbroken windows are g x g squares of deficiency g + 1. A block cut by the
    region boundary is broken: deficiency -1 and height/width as observed.
    """
    top: int
    left: int
    height: int
    width: int
    broken: bool = False

    @property
    def side(self):
        return self.width if not self.broken else max(self.width, self.height)

    @property
    def deficiency(self):
        return BROKEN if self.broken else self.width + 1

    @property
    def region(self):
        return Region(self.top, self.top + self.height - 1, self.left, self.left + self.width - 1)

    def to_dict(self):
        return {"top": self.top, "left": self.left, "side": self.side,
                "deficiency": self.deficiency, "broken": self.broken}

@dataclass
class Census:
    """Windows found in a region, with the multiset of their deficiencies"""
    region: Region
    windows: list = field(default_factory=list)

    @property
    def deficiencies(self):
        return Counter(window.deficiency for window in self.windows)

    @property
    def max_deficiency(self):
        """Largest deficiency over unbroken windows starting on rows m >= 0, or 1 without any"""
        candidates = [w.deficiency for w in self.windows if not w.broken and w.top >= 0]
        return max(candidates, default=1)

    @property
    def max_side(self):
        return self.max_deficiency - 1

    def unbroken(self):
        return [window for window in self.windows if not window.broken]

    def find(self, top, left):
        for window in self.windows:
            if window.top == top and window.left == left:
                return window
        return None

    def to_dict(self, max_windows=None):
        """
        JSON-ready report

        Args:
            max_windows (int, optional): Cap on the listed windows; None lists all
        """
        windows = self.windows if max_windows is None else self.windows[:max_windows]
        return {
            "region": self.region.to_dict(),
            "deficiencies": {str(d): c for d, c in sorted(self.deficiencies.items())},
            "windows": [window.to_dict() for window in windows],
            "window_count": len(self.windows),
            "max_deficiency": self.max_deficiency,
        }

    def to_text(self):
        lines = [f"region {self.region}", f"windows {len(self.windows)} ({len(self.unbroken())} unbroken)"]
        for deficiency, count in sorted(self.deficiencies.items()):
            lines.append(f"  deficiency {deficiency}: {count}")
        lines.append(f"max deficiency {self.max_deficiency}")
        return "\n".join(lines)

def _beyond(wall, m, n):
    """Entry outside the region: sentinel rows, a valid wall entry, or None if unknown"""
    if m <= -1 and m < wall.m_lo:
        return 1 if m == -1 else 0
    if wall.is_valid(m, n):
        return wall.entry(m, n)
    return None

def _run_length(flags):
    """Number of leading True values"""
    stops = np.nonzero(~flags)[0]
    return int(stops[0]) if stops.size else int(flags.size)

def _check_region(wall, region):
    region = region or wall.region
    if not wall.region.contains_region(region):
        raise RegionError(f"{region} lies outside {wall}")
    if not wall.valid[region.m_lo - wall.m_lo:region.m_hi - wall.m_lo + 1,
                      region.n_lo - wall.n_lo:region.n_hi - wall.n_lo + 1].all():
        raise RegionError(f"{region} contains flagged sentinel entries of {wall}")
    return region

def census(wall, region=None):
    """
    Locate every window in region

    Each zero block is found from its top-left corner by running right and
    down. Blocks touching the region boundary where the wall continues with
    zeros (or is unknown) are broken; any other block must be a square.

    Args:
        wall (WallSegment): The wall
        region (Region, optional): Valid sub-rectangle; the whole segment by default

    Returns:
        Census: Windows in row-major order of their corners

    Raises:
        RegionError: If region is outside the valid wall
        WallConsistencyError: If an unbroken zero block is not square
    """
    region = _check_region(wall, region)
    zero = wall.window(region) == 0
    rows, cols = zero.shape

    up = np.zeros_like(zero)
    up[1:] = zero[:-1]
    left = np.zeros_like(zero)
    left[:, 1:] = zero[:, :-1]
    corners = np.argwhere(zero & ~up & ~left)

    result = Census(region)
    for i, j in corners:
        i, j = int(i), int(j)
        width = _run_length(zero[i, j:])
        height = _run_length(zero[i:, j])
        top, first = region.m_lo + i, region.n_lo + j

        cut = []
        if i == 0:
            cut.append(_beyond(wall, top - 1, first))
        if j == 0:
            cut.append(_beyond(wall, top, first - 1))
        if i + height == rows:
            cut.append(_beyond(wall, top + height, first))
        if j + width == cols:
            cut.append(_beyond(wall, top, first + width))
        broken = any(value is None or value == 0 for value in cut)

        if not broken and width != height:
            raise WallConsistencyError(
                f"Zero block at ({top},{first}) is {height}x{width}, not a square")
        result.windows.append(WindowRecord(top, first, height, width, broken))

    logger.debug(f"Census of {region}: {len(result.windows)} windows, "
                 f"deficiencies {dict(result.deficiencies)}")
    return result

def max_deficiency(wall, region=None):
    """Maximum deficiency over unbroken windows on rows m >= 0 (1 if there are none)"""
    return census(wall, region).max_deficiency

def validate_windows(wall, region=None, records=None):
    """
    Check that windows tile the zero set exactly

    The zero set of the region must be the disjoint union of the reported
    blocks, each block all zero, and every unbroken window surrounded by a
    nonzero ring (which also rules out adjacent windows).

    Returns:
        list: Violations as strings; empty when the window structure holds
    """
    region = _check_region(wall, region)
    if records is None:
        records = census(wall, region).windows

    values = wall.window(region)
    coverage = np.zeros(values.shape, dtype=np.int64)
    violations = []
    for window in records:
        rows = slice(window.top - region.m_lo, window.top - region.m_lo + window.height)
        cols = slice(window.left - region.n_lo, window.left - region.n_lo + window.width)
        if values[rows, cols].any():
            violations.append(f"Window at ({window.top},{window.left}) covers nonzero entries")
        coverage[rows, cols] += 1

        if window.broken:
            continue
        g = window.width
        ring = [(window.top - 1 + k, window.left - 1) for k in range(g + 2)]
        ring += [(window.top - 1 + k, window.left + g) for k in range(g + 2)]
        ring += [(window.top - 1, window.left + k) for k in range(g)]
        ring += [(window.top + g, window.left + k) for k in range(g)]
        for m, n in ring:
            value = _beyond(wall, m, n)
            if value == 0:
                violations.append(f"Inner frame of window at ({window.top},{window.left}) "
                                  f"vanishes at ({m},{n})")
                break

    overlap = np.argwhere(coverage > 1)
    if overlap.size:
        i, j = overlap[0]
        violations.append(f"Windows overlap at ({region.m_lo + int(i)},{region.n_lo + int(j)})")
    uncovered = np.argwhere((coverage == 0) & (values == 0))
    if uncovered.size:
        i, j = uncovered[0]
        violations.append(f"Zero at ({region.m_lo + int(i)},{region.n_lo + int(j)}) "
                          f"is outside every window")
    return violations
