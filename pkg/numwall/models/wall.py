"""
Number Walls: the Toeplitz-determinant oracle and the row-by-row frame builder
"""
import logging
import re
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
from PIL import Image

from numwall.core.constants import DEFAULT_INVALID_GRAY, FrameCase
from numwall.core.exceptions import (
    ConfigurationError, FieldDivisionError, RegionError, SequenceFormatError, WallBuildError,
)
from numwall.core.utils import Region, ensure_parent_dir
from numwall.models.field import Modulus, determinant

logger = logging.getLogger('numwall')

_CSV_HEADER = re.compile(r'^wall\s+p=(\d+)\s+mlo=(-?\d+)\s+mhi=(-?\d+)\s+nlo=(-?\d+)\s+nhi=(-?\d+)\s*$')

def oracle_entry(source, m, n):
    """
    S_{m,n} as the (m+1)x(m+1) Toeplitz determinant with θ_n on the diagonal

    Row i, column j of the matrix holds θ_{n-i+j}. S is 1 on row -1 and 0 above it.

    Returns:
        FieldElement: The entry
    """
    modulus = source.modulus
    if m == -1:
        return modulus.element(1)
    if m < -1:
        return modulus.element(0)
    values = source.segment(n - m, n + m)
    steps = np.arange(m + 1)
    indices = m - steps[:, None] + steps[None, :]
    return modulus.element(determinant(values[indices], modulus))

@dataclass(frozen=True)
class FrameState:
    """
    Inner and outer frame of one window

    The window's zero square has top-left (top, left) and side g = deficiency - 1.
    Inner sequences A (top row), B (left column) run from the top-left corner,
    C (right column) and D (bottom row) from the bottom-right corner; E, F, G, H
    are the outer cells beyond A, B, C, D. Outer cells outside the segment are None.
    """
    top: int
    left: int
    deficiency: int
    inner: dict
    outer: dict
    ratios: dict

    def law_failures(self, modulus):
        """
        Frame laws that do not hold, as human-readable strings

        Checks the geometric progressions, P·S = (-1)^(δ-1)·Q·R,
        A_k·D_k = (-1)^((δ-1)k)·B_k·C_k and the outer-frame relation for 0 < k < δ.
        """
        p = modulus.p
        delta = self.deficiency
        A, B, C, D = (self.inner[name] for name in 'ABCD')
        P, Q, R, S = (self.ratios[name] for name in 'PQRS')
        failures = []

        for name, sequence, ratio in (('A', A, P), ('B', B, Q), ('C', C, R), ('D', D, S)):
            for k in range(delta):
                if sequence[k + 1] != sequence[k] * ratio % p:
                    failures.append(f"{name}_{k + 1} != {name}_{k}·ratio")

        if P * S % p != (-1) ** (delta - 1) * Q * R % p:
            failures.append("P·S != (-1)^(δ-1)·Q·R")

        for k in range(delta + 1):
            if A[k] * D[k] % p != (-1) ** ((delta - 1) * k) * B[k] * C[k] % p:
                failures.append(f"A_{k}·D_{k} != ±B_{k}·C_{k}")

        E, F, G, H = (self.outer[name] for name in 'EFGH')
        inverse = modulus.inverse
        for k in range(1, delta):
            if None in (E[k], F[k], G[k], H[k]):
                continue
            sign = (-1) ** k
            left = (Q * E[k] * inverse(A[k]) + sign * P * F[k] * inverse(B[k])) % p
            right = (R * H[k] * inverse(D[k]) + sign * S * G[k] * inverse(C[k])) % p
            if left != right:
                failures.append(f"outer-frame relation fails at k={k}")
        return failures

class WallSegment:
    """
    Rectangular piece of a Number Wall

    grid[i, j] holds S_{m_lo+i, n_lo+j}; valid[i, j] is False for cells outside the
    descent cone of the sequence data (held at zero as sentinels).
    """

    def __init__(self, modulus, m_lo, n_lo, grid, valid=None):
        self.modulus = modulus
        self.m_lo = m_lo
        self.n_lo = n_lo
        self.grid = np.asarray(grid).astype(modulus.dtype)
        self.grid.setflags(write=False)
        if valid is None:
            valid = np.ones(self.grid.shape, dtype=bool)
        self.valid = np.asarray(valid, dtype=bool)
        self.valid.setflags(write=False)
        if self.grid.ndim != 2 or self.grid.size == 0:
            raise RegionError("A wall segment needs at least one entry")

    @property
    def m_hi(self):
        return self.m_lo + self.grid.shape[0] - 1

    @property
    def n_hi(self):
        return self.n_lo + self.grid.shape[1] - 1

    @property
    def region(self):
        return Region(self.m_lo, self.m_hi, self.n_lo, self.n_hi)

    def __repr__(self):
        return (f"WallSegment({self.modulus}, rows {self.m_lo}..{self.m_hi}, "
                f"columns {self.n_lo}..{self.n_hi})")

    def contains(self, m, n):
        return self.m_lo <= m <= self.m_hi and self.n_lo <= n <= self.n_hi

    def is_valid(self, m, n):
        return self.contains(m, n) and bool(self.valid[m - self.m_lo, n - self.n_lo])

    def entry(self, m, n):
        """
        Residue S_{m,n}

        Rows above the segment follow the sentinel rule (1 on row -1, 0 above).

        Raises:
            RegionError: Outside the segment or on a flagged cell
        """
        if m < self.m_lo and m <= -1:
            return 1 if m == -1 else 0
        if not self.is_valid(m, n):
            raise RegionError(f"S_({m},{n}) is not a valid entry of {self}")
        return int(self.grid[m - self.m_lo, n - self.n_lo])

    def element(self, m, n):
        return self.modulus.element(self.entry(m, n))

    def row(self, m):
        """Row m as an array over columns n_lo..n_hi"""
        return self.grid[m - self.m_lo]

    def window(self, region):
        """Residues of a sub-rectangle as an array"""
        return self.grid[region.m_lo - self.m_lo:region.m_hi - self.m_lo + 1,
                         region.n_lo - self.n_lo:region.n_hi - self.n_lo + 1]

    def crop(self, region):
        """
        Sub-segment covering region

        Raises:
            RegionError: If region is not inside the segment
        """
        if not self.region.contains_region(region):
            raise RegionError(f"{region} lies outside {self}")
        rows = slice(region.m_lo - self.m_lo, region.m_hi - self.m_lo + 1)
        cols = slice(region.n_lo - self.n_lo, region.n_hi - self.n_lo + 1)
        return WallSegment(self.modulus, region.m_lo, region.n_lo,
                           self.grid[rows, cols], self.valid[rows, cols])

    def pruned(self):
        """The widest block of columns valid on every row"""
        full = np.nonzero(self.valid.all(axis=0))[0]
        if full.size == 0:
            raise RegionError(f"No column of {self} is valid on every row")
        return self.crop(Region(self.m_lo, self.m_hi,
                                self.n_lo + int(full[0]), self.n_lo + int(full[-1])))

    def frame_state(self, top, left, side):
        """
        Frame of the window with zero square [top, top+side) x [left, left+side)

        Raises:
            RegionError: If the inner frame is not inside the valid segment
        """
        g, delta = side, side + 1

        def cell(m, n, required):
            if m <= -1 and m < self.m_lo:
                return 1 if m == -1 else 0
            if self.is_valid(m, n):
                return self.entry(m, n)
            if required:
                raise RegionError(f"Frame cell ({m},{n}) of window at ({top},{left}) is outside {self}")
            return None

        inner = {
            'A': tuple(cell(top - 1, left - 1 + k, True) for k in range(delta + 1)),
            'B': tuple(cell(top - 1 + k, left - 1, True) for k in range(delta + 1)),
            'C': tuple(cell(top + g - k, left + g, True) for k in range(delta + 1)),
            'D': tuple(cell(top + g, left + g - k, True) for k in range(delta + 1)),
        }
        outer = {
            'E': tuple(cell(top - 2, left - 1 + k, False) for k in range(delta + 1)),
            'F': tuple(cell(top - 1 + k, left - 2, False) for k in range(delta + 1)),
            'G': tuple(cell(top + g - k, left + g + 1, False) for k in range(delta + 1)),
            'H': tuple(cell(top + g + 1, left + g - k, False) for k in range(delta + 1)),
        }
        inverse = self.modulus.inverse
        p = self.modulus.p
        ratios = {name: inner[seq][1] * inverse(inner[seq][0]) % p
                  for name, seq in (('P', 'A'), ('Q', 'B'), ('R', 'C'), ('S', 'D'))}
        return FrameState(top, left, delta, inner, outer, ratios)

class WallBuilder:
    """
    Computes wall rows from a sequence segment one row at a time

    Row m >= 1 is defined on the descent cone of the data, array columns
    m..width-1-m; everything outside is a zero sentinel and flagged invalid.
    Cells with S_{m-2,n} != 0 use the cross rule, vectorised per row; the rest
    go through the window walk (p up the column, q left and k right along the
    window's top zero row).
    """

    def __init__(self, source, m_hi, n_lo, n_hi, m_lo=-2, history=None):
        """
        Args:
            source (SequenceSource): The sequence θ
            m_hi (int): Last row to compute
            n_lo (int): First column of the target rectangle
            n_hi (int): Last column of the target rectangle
            m_lo (int, optional): First row kept (<= -2)
            history (int, optional): Rows retained while streaming; None keeps all
        """
        if m_lo > -2:
            raise ConfigurationError(f"m_lo must be <= -2 to include the sentinel rows, got {m_lo}")
        if m_hi < 0:
            raise ConfigurationError(f"m_hi must be >= 0, got {m_hi}")
        if n_lo > n_hi:
            raise ConfigurationError(f"Empty column range {n_lo}..{n_hi}")

        self.source = source
        self.modulus = source.modulus
        self.m_lo, self.m_hi = m_lo, m_hi
        self.n_lo, self.n_hi = n_lo, n_hi
        self.a = n_lo - m_hi
        self.b = n_hi + m_hi
        self.width = self.b - self.a + 1
        self.history = history
        self._rows = OrderedDict()
        self.case_counts = {case: 0 for case in FrameCase}
        source.check_domain(self.a, self.b)

    # Row storage

    def _store(self, m, row):
        self._rows[m] = row.astype(self.modulus.dtype)
        if self.history is not None:
            while len(self._rows) > self.history:
                self._rows.popitem(last=False)

    def _stored(self, m):
        row = self._rows.get(m)
        if row is None:
            raise WallBuildError(f"Row {m} dropped from the history; rebuild with a larger history")
        return row

    def _at(self, m, j):
        if m <= -2:
            return 0
        if m == -1:
            return 1
        if j < 0 or j >= self.width:
            return 0
        return int(self._stored(m)[j])

    def valid_span(self, m):
        """Array columns (lo, hi) of row m inside the descent cone"""
        if m <= 0:
            return 0, self.width - 1
        return m, self.width - 1 - m

    # Entry rules

    def _window_entry(self, m, j):
        """Entry below a zero at (m-2, j), following the window geometry"""
        p = self.modulus.p
        S = self._at
        inverse = self.modulus.inverse

        depth = 1
        while S(m - depth - 2, j) == 0:
            depth += 1
        top_zero = m - depth - 1

        q = 1
        while j - q >= top_zero and S(top_zero, j - q) == 0:
            q += 1
        k = 1
        while j + k <= self.width - 1 - top_zero and S(top_zero, j + k) == 0:
            k += 1
        delta = k + q

        if delta > depth + 2:
            self.case_counts[FrameCase.WINDOW] += 1
            return 0

        try:
            if delta == depth + 2:
                self.case_counts[FrameCase.INNER] += 1
                sign = -1 if ((delta - 1) * k) % 2 else 1
                return sign * S(m - q, j - q) * S(m - k, j + k) * inverse(S(m - delta, j - q + k)) % p

            if delta == depth + 1:
                self.case_counts[FrameCase.OUTER] += 1
                A = S(m - delta - 1, j + k - q)
                B = S(m - q - 1, j - q)
                C = S(m - k - 1, j + k)
                D = S(m - 1, j)
                P = A * inverse(S(m - delta - 1, j + k - q - 1))
                Q = B * inverse(S(m - q - 2, j - q))
                R = C * inverse(S(m - k, j + k))
                ratio_s = D * inverse(S(m - 1, j + 1))
                E = S(m - delta - 2, j + k - q)
                F = S(m - q - 1, j - q - 1)
                G = S(m - k - 1, j + k + 1)
                sign = -1 if k % 2 else 1
                bracket = Q * E * inverse(A) + sign * (P * F * inverse(B) - ratio_s * G * inverse(C))
                return D * inverse(R) * bracket % p
        except FieldDivisionError as e:
            raise WallBuildError(f"Frame rule divided by zero at S_({m},{self.a + j}): {e}")

        raise WallBuildError(
            f"Zero at S_({m - 2},{self.a + j}) has no consistent window (depth {depth}, δ {delta})")

    def _compute_row(self, m):
        width = self.width
        if m <= -2:
            self.case_counts[FrameCase.SENTINEL] += width
            return np.zeros(width, dtype=np.int64)
        if m == -1:
            self.case_counts[FrameCase.SENTINEL] += width
            return np.ones(width, dtype=np.int64)
        if m == 0:
            self.case_counts[FrameCase.SEQUENCE] += width
            return self.source.segment(self.a, self.b)

        p = self.modulus.p
        lo, hi = self.valid_span(m)
        above = self._stored(m - 1).astype(np.int64)
        above2 = self._stored(m - 2).astype(np.int64) if m >= 2 else np.ones(width, dtype=np.int64)

        numerator = (above[lo:hi + 1] ** 2 - above[lo + 1:hi + 2] * above[lo - 1:hi]) % p
        denominator = above2[lo:hi + 1]
        nonzero = denominator != 0

        row = np.zeros(width, dtype=np.int64)
        span = np.zeros(hi - lo + 1, dtype=np.int64)
        if nonzero.any():
            span[nonzero] = numerator[nonzero] * self.modulus.inverse_array(denominator[nonzero]) % p
        self.case_counts[FrameCase.CROSS] += int(nonzero.sum())
        row[lo:hi + 1] = span

        for offset in np.nonzero(~nonzero)[0]:
            j = lo + int(offset)
            row[j] = self._window_entry(m, j)
        return row

    def iter_rows(self):
        """
        Yield (m, row, (lo, hi)) for m = m_lo..m_hi

        row covers columns a..b = n_lo-m_hi..n_hi+m_hi; (lo, hi) is the valid span.
        """
        for m in range(self.m_lo, self.m_hi + 1):
            row = self._compute_row(m)
            if m >= 0:
                self._store(m, row)
            yield m, row, self.valid_span(m)
            if m > 0 and m % 256 == 0:
                logger.info(f"Wall row {m}/{self.m_hi} done")

    def build(self, prune=True):
        """
        Compute every row and assemble a WallSegment

        Args:
            prune (bool, optional): Return only the requested columns n_lo..n_hi
                (all valid); otherwise the full columns a..b with sentinel cells flagged

        Returns:
            WallSegment: The wall
        """
        rows = self.m_hi - self.m_lo + 1
        grid = np.zeros((rows, self.width), dtype=self.modulus.dtype)
        valid = np.zeros((rows, self.width), dtype=bool)
        for m, row, (lo, hi) in self.iter_rows():
            grid[m - self.m_lo] = row
            valid[m - self.m_lo, lo:hi + 1] = True

        logger.debug(f"Wall built for {self.source.name}: " +
                     ", ".join(f"{case.name.lower()}={count}" for case, count in self.case_counts.items()))
        wall = WallSegment(self.modulus, self.m_lo, self.a, grid, valid)
        if prune:
            wall = wall.crop(Region(self.m_lo, self.m_hi, self.n_lo, self.n_hi))
        return wall

def build(source, m_hi, n_lo, n_hi, m_lo=-2, prune=True):
    """
    Number Wall of source on rows m_lo..m_hi and columns n_lo..n_hi

    The sequence must be defined on n_lo-m_hi..n_hi+m_hi.

    Returns:
        WallSegment: Entry-for-entry equal to oracle_entry on every valid cell
    """
    logger.info(f"Building wall of {source.name} over {source.modulus}: "
                f"rows {m_lo}..{m_hi}, columns {n_lo}..{n_hi}")
    return WallBuilder(source, m_hi, n_lo, n_hi, m_lo).build(prune=prune)

# Output

def default_palette(modulus):
    """Zero black, nonzero residues spread from white downwards"""
    p = modulus.p
    palette = {0: 0}
    for residue in range(1, p):
        palette[residue] = 255 - (191 * (residue - 1)) // max(p - 2, 1)
    return palette

def grayscale(wall, palette=None, invalid_gray=DEFAULT_INVALID_GRAY):
    """
    Gray level per entry

    Returns:
        numpy.ndarray: uint8 array with the shape of the wall grid
    """
    palette = palette or default_palette(wall.modulus)
    palette = {int(key): int(value) for key, value in palette.items()}
    missing = [r for r in range(wall.modulus.p) if r not in palette]
    if missing:
        raise ConfigurationError(f"Palette lacks residues {missing}")
    if any(not 0 <= value <= 255 for value in palette.values()):
        raise ConfigurationError("Palette gray levels must lie in 0..255")

    lookup = np.array([palette[r] for r in range(wall.modulus.p)], dtype=np.uint8)
    gray = lookup[wall.grid.astype(np.int64)]
    gray[~wall.valid] = invalid_gray
    return gray

def render(wall, palette=None, invalid_gray=DEFAULT_INVALID_GRAY):
    """
    Portable graymap (P2) of a wall, one pixel per entry

    Returns:
        bytes: ASCII PGM image
    """
    gray = grayscale(wall, palette, invalid_gray)
    height, width = gray.shape
    lines = [f"P2\n{width} {height}\n255"]
    lines.extend(' '.join(str(v) for v in row) for row in gray)
    return ('\n'.join(lines) + '\n').encode('ascii')

def save_pgm(wall, file_path, palette=None, invalid_gray=DEFAULT_INVALID_GRAY):
    ensure_parent_dir(file_path)
    with open(file_path, 'wb') as f:
        f.write(render(wall, palette, invalid_gray))
    logger.info(f"Wrote {file_path}")

def save_image(wall, file_path, palette=None, scale=1, invalid_gray=DEFAULT_INVALID_GRAY):
    """Write the wall as an image in any Pillow format (PNG, binary PGM, ...)"""
    image = Image.fromarray(grayscale(wall, palette, invalid_gray))
    if scale > 1:
        image = image.resize((image.width * scale, image.height * scale), Image.NEAREST)
    ensure_parent_dir(file_path)
    image.save(file_path)
    logger.info(f"Wrote {file_path}")

def write_csv_rows(handle, modulus, m_lo, m_hi, n_lo, n_hi, rows):
    """Write the CSV header and (values, valid-mask) rows to an open file"""
    handle.write(f"wall p={modulus.p} mlo={m_lo} mhi={m_hi} nlo={n_lo} nhi={n_hi}\n")
    for values, valid in rows:
        handle.write(','.join(str(int(v)) if ok else '.' for v, ok in zip(values, valid)) + '\n')

def save_csv(wall, file_path):
    """Write the wall CSV format; flagged cells are written as '.'"""
    ensure_parent_dir(file_path)
    with open(file_path, 'w') as f:
        write_csv_rows(f, wall.modulus, wall.m_lo, wall.m_hi, wall.n_lo, wall.n_hi,
                       zip(wall.grid, wall.valid))
    logger.info(f"Wrote {file_path}")

def load_csv(file_path):
    """
    Read a wall CSV file

    Raises:
        SequenceFormatError: On a malformed header or row
    """
    with open(file_path, 'r') as f:
        header = f.readline().strip()
        match = _CSV_HEADER.match(header)
        if not match:
            raise SequenceFormatError(f"Bad wall header in {file_path}: {header!r}")
        p, m_lo, m_hi, n_lo, n_hi = (int(group) for group in match.groups())
        width = n_hi - n_lo + 1
        grid, valid = [], []
        for line in f:
            if not line.strip():
                continue
            cells = line.strip().split(',')
            if len(cells) != width:
                raise SequenceFormatError(f"Row of {len(cells)} cells in {file_path}, expected {width}")
            grid.append([0 if cell == '.' else int(cell) for cell in cells])
            valid.append([cell != '.' for cell in cells])
    if len(grid) != m_hi - m_lo + 1:
        raise SequenceFormatError(f"{file_path} holds {len(grid)} rows, expected {m_hi - m_lo + 1}")
    return WallSegment(Modulus(p), m_lo, n_lo, np.array(grid), np.array(valid))
