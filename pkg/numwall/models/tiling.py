"""
Two-dimensional uniform substitution tilings and codings with overlap
"""
import logging
import re
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from numwall.core.constants import CenteringMode
from numwall.core.exceptions import ConfigurationError, RegionError, SequenceFormatError
from numwall.core.utils import Region, ceil_div, ensure_parent_dir, representative

logger = logging.getLogger('numwall')

ORTHANTS = ((0, 0), (0, 1), (1, 0), (1, 1))

_TILE_RECORD = re.compile(r'^tile\s+(\d+)\s*$')
_TETRAD_RECORD = re.compile(r'^(tile|pattern)\s+(\d+):\s*(\d+)\s+(\d+)\s*/\s*(\d+)\s+(\d+)\s*$')

def prolongation_cell(orthant, k):
    """Cell of φ(s) that must equal s for an o-prolongable seed (0 maps to k, 1 to 1)"""
    return tuple(0 if o == 1 else k - 1 for o in orthant)

def centering_offset(l, r):
    """u = ⌊(l+1)/2⌋ - ⌈(l-r)/2⌉ + 1, the first row of the centred (l-r)-block inside an l-block"""
    return (l + 1) // 2 - ceil_div(l - r, 2) + 1

class TilingSystem:
    """
    A uniform k-substitution φ with orthant seeds, optionally with an l x l coding τ

    T(m, n) = φ(T(⌈m/k⌉, ⌈n/k⌉))([m]_k, [n]_k) with T(o) = s_o for o in {0,1}².
    Seeds may cover only some orthants; expanding outside them is an error.
    Decoding places the coded blocks on the (l-r)-spaced lattice; in centred
    mode block (i, j) contributes its central (l-r) x (l-r) square.
    """

    def __init__(self, images, seeds, codes=None, overlap=0, mode=CenteringMode.TOP_LEFT):
        """
        Args:
            images (dict): Tile -> k x k grid of tiles (φ)
            seeds (dict): Orthant (0|1, 0|1) -> seed tile
            codes (dict, optional): Tile -> l x l grid of residues (τ)
            overlap (int, optional): r with 0 <= r < l
            mode (CenteringMode, optional): Placement of the coded blocks
        """
        if not images:
            raise ConfigurationError("A substitution needs at least one tile")
        self.alphabet = tuple(sorted(int(tile) for tile in images))
        size = self.alphabet[-1] + 1

        first = np.asarray(next(iter(images.values())))
        self.k = int(first.shape[0])
        if self.k < 2:
            raise ConfigurationError(f"Substitution factor must be >= 2, got {self.k}")
        self.images = np.zeros((size, self.k, self.k), dtype=np.int64)
        for tile, image in images.items():
            image = np.asarray(image, dtype=np.int64)
            if image.shape != (self.k, self.k):
                raise ConfigurationError(f"Image of tile {tile} has shape {image.shape}, expected {(self.k, self.k)}")
            self.images[int(tile)] = image
        unknown = set(np.unique(self.images[list(self.alphabet)]).tolist()) - set(self.alphabet)
        if unknown:
            raise ConfigurationError(f"Images use tiles outside the alphabet: {sorted(unknown)}")

        self.seeds = {tuple(o): int(s) for o, s in seeds.items()}
        for orthant, seed in self.seeds.items():
            if orthant not in ORTHANTS:
                raise ConfigurationError(f"Unknown orthant {orthant}")
            if seed not in self.alphabet:
                raise ConfigurationError(f"Seed {seed} is not a tile")
            cell = prolongation_cell(orthant, self.k)
            if self.images[seed][cell] != seed:
                raise ConfigurationError(f"Seed {seed} is not {orthant}-prolongable")

        self.mode = mode
        self.overlap = overlap
        self.codes = None
        self.l = 1
        if codes is not None:
            missing = set(self.alphabet) - set(int(tile) for tile in codes)
            if missing:
                raise ConfigurationError(f"Coding undefined on tiles {sorted(missing)}")
            self.l = int(np.asarray(next(iter(codes.values()))).shape[0])
            self.codes = np.zeros((size, self.l, self.l), dtype=np.int64)
            for tile, code in codes.items():
                code = np.asarray(code, dtype=np.int64)
                if code.shape != (self.l, self.l):
                    raise ConfigurationError(f"Code of tile {tile} has shape {code.shape}, expected {(self.l, self.l)}")
                self.codes[int(tile)] = code
        if not 0 <= overlap < self.l:
            raise ConfigurationError(f"Overlap must satisfy 0 <= r < l = {self.l}, got {overlap}")
        if mode == CenteringMode.CENTERED and ((self.l - 1) % 2 or (self.l - overlap) % 2):
            raise ConfigurationError("Centred decoding needs even l-1 and even l-r")

        self._tile_at = lru_cache(maxsize=None)(self._tile_at_uncached)

    def __repr__(self):
        return (f"TilingSystem(tiles={len(self.alphabet)}, k={self.k}, l={self.l}, "
                f"r={self.overlap}, mode={self.mode.name})")

    @property
    def cid(self):
        """Lattice spacing l - r of the coded blocks"""
        return self.l - self.overlap

    @property
    def offset(self):
        """Row/column of the decoded square inside τ(s), 0-based"""
        if self.mode == CenteringMode.CENTERED:
            return centering_offset(self.l, self.overlap) - 1
        return 0

    def image(self, tile):
        return self.images[tile]

    def code(self, tile):
        return self.codes[tile]

    # Expansion

    def _seed(self, m, n):
        seed = self.seeds.get((m, n))
        if seed is None:
            raise ConfigurationError(f"No seed for orthant {(m, n)}")
        return seed

    def _tile_at_uncached(self, m, n):
        if m in (0, 1) and n in (0, 1):
            return self._seed(m, n)
        parent = self._tile_at(ceil_div(m, self.k), ceil_div(n, self.k))
        return int(self.images[parent, representative(m, self.k) - 1, representative(n, self.k) - 1])

    def tile_at(self, m, n):
        """Single tile T(m, n), memoised along its ancestry"""
        return self._tile_at(int(m), int(n))

    def ancestors(self, m, n):
        """
        Chain (m, n), (⌈m/k⌉, ⌈n/k⌉), ... down to the orthant cell in {0,1}²

        Returns:
            list: Coordinates, the last one being the orthant
        """
        chain = [(m, n)]
        while not (m in (0, 1) and n in (0, 1)):
            m, n = ceil_div(m, self.k), ceil_div(n, self.k)
            chain.append((m, n))
        return chain

    def expand(self, region):
        """
        Tiles T(m, n) on region, one substitution level at a time

        Returns:
            numpy.ndarray: int64 grid of shape region.shape
        """
        if region.m_lo >= 0 and region.m_hi <= 1 and region.n_lo >= 0 and region.n_hi <= 1:
            return np.array([[self._seed(m, n) for n in region.columns] for m in region.rows],
                            dtype=np.int64)

        k = self.k
        parent_region = Region(ceil_div(region.m_lo, k), ceil_div(region.m_hi, k),
                               ceil_div(region.n_lo, k), ceil_div(region.n_hi, k))
        parents = self.expand(parent_region)

        rows = np.arange(region.m_lo, region.m_hi + 1, dtype=np.int64)
        cols = np.arange(region.n_lo, region.n_hi + 1, dtype=np.int64)
        parent_tiles = parents[(ceil_div(rows, k) - parent_region.m_lo)[:, None],
                               (ceil_div(cols, k) - parent_region.n_lo)[None, :]]
        return self.images[parent_tiles,
                           (representative(rows, k) - 1)[:, None],
                           (representative(cols, k) - 1)[None, :]]

    def substitute(self, pattern):
        """φ(P) for a finite a x b pattern, a ka x kb grid"""
        pattern = np.asarray(pattern, dtype=np.int64)
        a, b = pattern.shape
        return self.images[pattern].transpose(0, 2, 1, 3).reshape(a * self.k, b * self.k)

    # Coding

    def _require_codes(self):
        if self.codes is None:
            raise ConfigurationError("This tiling system has no coding")

    def code_pattern(self, pattern, full=False):
        """
        Coded image of a finite pattern

        Args:
            pattern (array-like): a x b grid of tiles
            full (bool, optional): Include the overlap margin, giving the
                ((l-r)(a-1)+l) x ((l-r)(b-1)+l) union of the full τ images;
                otherwise the (l-r)a x (l-r)b grid of decoded squares

        Returns:
            numpy.ndarray: Residues
        """
        self._require_codes()
        pattern = np.asarray(pattern, dtype=np.int64)
        a, b = pattern.shape
        c = self.cid
        if not full:
            o = self.offset
            squares = self.codes[pattern][:, :, o:o + c, o:o + c]
            return squares.transpose(0, 2, 1, 3).reshape(a * c, b * c)

        result = np.zeros((c * (a - 1) + self.l, c * (b - 1) + self.l), dtype=np.int64)
        for i in range(a):
            for j in range(b):
                result[c * i:c * i + self.l, c * j:c * j + self.l] = self.codes[pattern[i, j]]
        return result

    def block_origin(self, i):
        """Wall row (or column) of the first entry of lattice block i"""
        return self.cid * (i - 1) + 1 - self.offset

    def decode(self, region):
        """
        Values of the coded tiling on a region of wall coordinates

        value(m, n) = τ(T(⌈m/c⌉, ⌈n/c⌉))([m]_c + o, [n]_c + o) with c = l - r and o the
        centring offset.

        Returns:
            numpy.ndarray: int64 residues of shape region.shape
        """
        self._require_codes()
        c, o = self.cid, self.offset
        rows = np.arange(region.m_lo, region.m_hi + 1, dtype=np.int64)
        cols = np.arange(region.n_lo, region.n_hi + 1, dtype=np.int64)
        tile_rows, tile_cols = ceil_div(rows, c), ceil_div(cols, c)
        tiles = self.expand(Region(int(tile_rows[0]), int(tile_rows[-1]),
                                   int(tile_cols[0]), int(tile_cols[-1])))
        grid = tiles[(tile_rows - tile_rows[0])[:, None], (tile_cols - tile_cols[0])[None, :]]
        return self.codes[grid,
                          (representative(rows, c) - 1 + o)[:, None],
                          (representative(cols, c) - 1 + o)[None, :]]

    def check_consistency(self, region):
        """
        Whether τ agrees on every overlap of adjacent tiles in a tile region

        Returns:
            tuple: (True, None) or (False, violation dict with both tile coordinates)
        """
        self._require_codes()
        r, c = self.overlap, self.cid
        if r == 0:
            return True, None

        tiles = self.expand(region)
        for axis, first, second in (('row', tiles[:, :-1], tiles[:, 1:]),
                                    ('column', tiles[:-1, :], tiles[1:, :])):
            if first.size == 0:
                continue
            pairs = np.unique(np.stack([first.ravel(), second.ravel()], axis=1), axis=0)
            if axis == 'row':
                agree = (self.codes[pairs[:, 0]][:, :, c:] == self.codes[pairs[:, 1]][:, :, :r]).all(axis=(1, 2))
            else:
                agree = (self.codes[pairs[:, 0]][:, c:, :] == self.codes[pairs[:, 1]][:, :r, :]).all(axis=(1, 2))
            if agree.all():
                continue

            left, right = pairs[np.argmin(agree)]
            i, j = (int(v) for v in np.argwhere((first == left) & (second == right))[0])
            m, n = region.m_lo + i, region.n_lo + j
            neighbour = (m, n + 1) if axis == 'row' else (m + 1, n)
            violation = {"axis": axis, "tile": (m, n), "neighbour": neighbour,
                         "tiles": (int(left), int(right))}
            logger.debug(f"Overlap mismatch: {violation}")
            return False, violation
        return True, None

def enumerate_patterns(grid, size):
    """
    All distinct size x size subgrids of grid, flattened row-major

    Returns:
        set: Tuples of length size²

    Raises:
        RegionError: If the grid is smaller than size x size
    """
    grid = np.asarray(grid)
    if size < 1 or grid.ndim != 2 or grid.shape[0] < size or grid.shape[1] < size:
        raise RegionError(f"Cannot take {size}-patterns of a grid of shape {grid.shape}")
    windows = sliding_window_view(grid, (size, size)).reshape(-1, size * size)
    return {tuple(int(v) for v in row) for row in np.unique(windows, axis=0)}

def closure_regions(lower, upper, k):
    """
    Small region (lower, upper] and its k-fold enlargement k(lower, upper], as Regions
    """
    if not (lower[0] < 0 < upper[0] and lower[1] < 0 < upper[1]):
        raise ConfigurationError(f"Closure bounds must straddle the origin, got {lower}, {upper}")
    small = Region(lower[0] + 1, upper[0], lower[1] + 1, upper[1])
    big = Region(k * lower[0] + 1, k * upper[0], k * lower[1] + 1, k * upper[1])
    return small, big

def two_pattern_closure(system, lower, upper):
    """
    Whether every 2-pattern of T on k(lower, upper] already occurs on (lower, upper]

    When it holds, every 2-pattern of the whole tiling occurs in the small region.
    """
    small, big = closure_regions(lower, upper, system.k)
    missing = enumerate_patterns(system.expand(big), 2) - enumerate_patterns(system.expand(small), 2)
    if missing:
        logger.debug(f"{len(missing)} 2-patterns of {big} are absent from {small}")
    return not missing

def cover_size(l, r, r_prime):
    """s(l, r, r') = 1 + ⌈(r' - (r+1)) / (l-r)⌉₊"""
    if not 0 <= r < l or r_prime < 1:
        raise ConfigurationError(f"Need 0 <= r < l and r' >= 1, got l={l}, r={r}, r'={r_prime}")
    return 1 + max(0, ceil_div(r_prime - (r + 1), l - r))

# Codes and tetrads files

def _format_residues(row):
    if all(0 <= int(v) < 10 for v in row):
        return ''.join(str(int(v)) for v in row)
    return ' '.join(str(int(v)) for v in row)

def write_codes(file_path, codes):
    """
    Write a codes file: `tile <id>` then l lines of residues, ids ascending

    Args:
        codes (dict): Tile -> l x l grid
    """
    ensure_parent_dir(file_path)
    with open(file_path, 'w') as f:
        for tile in sorted(codes):
            f.write(f"tile {tile}\n")
            for row in np.asarray(codes[tile]):
                f.write(_format_residues(row) + '\n')
    logger.info(f"Wrote {len(codes)} codes to {file_path}")

def read_codes(file_path):
    """
    Returns:
        dict: Tile -> int64 l x l array
    """
    codes = {}
    current = None
    with open(file_path, 'r') as f:
        for line_number, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            match = _TILE_RECORD.match(line)
            if match:
                current = int(match.group(1))
                codes[current] = []
                continue
            if current is None:
                raise SequenceFormatError(f"{file_path}:{line_number}: residues before any tile record")
            cells = line.split() if ' ' in line else list(line)
            codes[current].append([int(cell) for cell in cells])

    result = {}
    for tile, rows in codes.items():
        grid = np.array(rows, dtype=np.int64)
        if grid.ndim != 2 or grid.shape[0] != grid.shape[1]:
            raise SequenceFormatError(f"{file_path}: code of tile {tile} is not square")
        result[tile] = grid
    return result

def write_tetrads(file_path, images, extra=()):
    """
    Write a tetrads file: `tile <id>: a b / c d` per tile, then `pattern <n>: ...`
    for further observed 2-patterns, numbered after the tiles
    """
    ensure_parent_dir(file_path)
    with open(file_path, 'w') as f:
        for tile in sorted(images):
            (a, b), (c, d) = np.asarray(images[tile]).tolist()
            f.write(f"tile {tile}: {a} {b} / {c} {d}\n")
        for number, (a, b, c, d) in enumerate(extra, len(images) + 1):
            f.write(f"pattern {number}: {a} {b} / {c} {d}\n")
    logger.info(f"Wrote {len(images) + len(extra)} tetrads to {file_path}")

def read_tetrads(file_path):
    """
    Returns:
        tuple: (dict tile -> 2 x 2 tuple, list of extra 4-tuples in file order)
    """
    images, extra = {}, []
    with open(file_path, 'r') as f:
        for line_number, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            match = _TETRAD_RECORD.match(line)
            if not match:
                raise SequenceFormatError(f"{file_path}:{line_number}: bad tetrad record {line!r}")
            kind, number = match.group(1), int(match.group(2))
            a, b, c, d = (int(match.group(i)) for i in range(3, 7))
            if kind == 'tile':
                images[number] = ((a, b), (c, d))
            else:
                extra.append((a, b, c, d))
    return images, extra

def load_system(codes_path, tetrads_path, seeds, overlap, mode=CenteringMode.CENTERED):
    """TilingSystem from a codes file and a tetrads file"""
    images, _ = read_tetrads(tetrads_path)
    return TilingSystem(images, seeds, read_codes(codes_path), overlap, mode)
