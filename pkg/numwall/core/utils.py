"""
Utility functions for numwall
"""
import os
import re
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from numwall.core.exceptions import ConfigurationError, RegionError

logger = logging.getLogger('numwall')

_RANGE = re.compile(r"(-?\d+)\s*(?::|\.\.)\s*(-?\d+)")

@dataclass(frozen=True)
class Region:
    """
    Inclusive rectangle of wall or tiling coordinates

    Rows are indexed by m (downwards), columns by n.
    """
    m_lo: int
    m_hi: int
    n_lo: int
    n_hi: int

    def __post_init__(self):
        if self.m_lo > self.m_hi or self.n_lo > self.n_hi:
            raise RegionError(f"Empty region {self}")

    @property
    def shape(self):
        return (self.m_hi - self.m_lo + 1, self.n_hi - self.n_lo + 1)

    @property
    def rows(self):
        return range(self.m_lo, self.m_hi + 1)

    @property
    def columns(self):
        return range(self.n_lo, self.n_hi + 1)

    def contains(self, m, n):
        return self.m_lo <= m <= self.m_hi and self.n_lo <= n <= self.n_hi

    def contains_region(self, other):
        return (self.m_lo <= other.m_lo and other.m_hi <= self.m_hi
                and self.n_lo <= other.n_lo and other.n_hi <= self.n_hi)

    def to_dict(self):
        return {"m_lo": self.m_lo, "m_hi": self.m_hi, "n_lo": self.n_lo, "n_hi": self.n_hi}

def ceil_div(n, k):
    """
    Ceiling of n/k for integers (k > 0)

    Args:
        n (int or numpy.ndarray): Numerator
        k (int): Positive divisor

    Returns:
        int or numpy.ndarray: ⌈n/k⌉
    """
    return -((-n) // k)

def representative(n, k):
    """
    Representative of n modulo k taken in 1..k (so [0]_k = k)

    Args:
        n (int or numpy.ndarray): Index
        k (int): Modulus

    Returns:
        int or numpy.ndarray: Value in 1..k congruent to n
    """
    return (n - 1) % k + 1

def parse_range(text):
    """
    Parse an inclusive integer range written "lo:hi" or "lo..hi"

    Args:
        text (str): Range such as "0:39", "-41:41" or "-41..41"

    Returns:
        tuple: (lo, hi)
    """
    match = _RANGE.fullmatch(text.strip())
    if not match:
        raise ConfigurationError(f"Expected a range 'lo:hi' or 'lo..hi', got {text!r}")
    lo, hi = int(match.group(1)), int(match.group(2))
    if lo > hi:
        raise ConfigurationError(f"Range {text!r} has lo > hi")
    return lo, hi

def ensure_parent_dir(file_path):
    """Create the directory holding file_path if needed"""
    parent = os.path.dirname(os.path.abspath(file_path))
    Path(parent).mkdir(parents=True, exist_ok=True)

def split_bands(lo, hi, parts):
    """
    Split the inclusive range lo..hi into at most `parts` contiguous bands

    Returns:
        list: List of (band_lo, band_hi) pairs covering lo..hi in order
    """
    count = hi - lo + 1
    parts = max(1, min(parts, count))
    size, extra = divmod(count, parts)
    bands = []
    start = lo
    for index in range(parts):
        stop = start + size + (1 if index < extra else 0) - 1
        bands.append((start, stop))
        start = stop + 1
    return bands

def map_bands(function, bands, threads=1):
    """
    Apply function to every band, in parallel when threads > 1

    Results come back in band order whatever the thread count.

    Args:
        function (callable): Called as function(band_lo, band_hi)
        bands (list): Bands from split_bands
        threads (int, optional): Worker count

    Returns:
        list: One result per band
    """
    if threads <= 1 or len(bands) <= 1:
        return [function(lo, hi) for lo, hi in bands]

    with ThreadPoolExecutor(max_workers=threads) as executor:
        futures = [executor.submit(function, lo, hi) for lo, hi in bands]
        return [future.result() for future in futures]
