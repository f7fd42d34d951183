"""
Automatic discovery of a substitution tiling from a wall segment
"""
import json
import logging
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from numwall.core.constants import DEFAULT_CID, DEFAULT_K, DEFAULT_TEL, REFERENCE_SEEDS, CenteringMode
from numwall.core.exceptions import ConfigurationError, DiscoveryError, RegionError
from numwall.core.utils import Region, ceil_div, ensure_parent_dir
from numwall.models.tiling import (
    ORTHANTS, TilingSystem, centering_offset, prolongation_cell, write_codes, write_tetrads,
)

logger = logging.getLogger('numwall')

@dataclass(frozen=True)
class DiscoveryParams:
    """
    Parameters of a discovery run

    tel = l - 1 is the tile edge length, cid = l - r the centre distance; the wall
    region is rows a..b, columns c..d.
    """
    a: int
    b: int
    c: int
    d: int
    k: int = DEFAULT_K
    tel: int = DEFAULT_TEL
    cid: int = DEFAULT_CID
    centered: bool = True

    def __post_init__(self):
        self.validate()

    @property
    def l(self):
        return self.tel + 1

    @property
    def r(self):
        return self.l - self.cid

    @property
    def mode(self):
        return CenteringMode.CENTERED if self.centered else CenteringMode.TOP_LEFT

    @property
    def offset(self):
        """Rows of a coded block above its decoded square"""
        return centering_offset(self.l, self.r) - 1 if self.centered else 0

    @property
    def region(self):
        return Region(self.a, self.b, self.c, self.d)

    @property
    def min_top_row(self):
        """Deepest first wall row still leaving room for the sentinel band, -⌈5(cid+tel)/2⌉"""
        return -ceil_div(5 * (self.cid + self.tel), 2)

    def validate(self):
        """
        Raises:
            ConfigurationError: If the parameters cannot drive a discovery run
        """
        if self.k < 2:
            raise ConfigurationError(f"k must be >= 2, got {self.k}")
        if self.tel < 1 or self.cid < 1:
            raise ConfigurationError("tel and cid must be positive")
        if self.centered and (self.tel % 2 or self.cid % 2):
            raise ConfigurationError(f"tel and cid must be even, got tel={self.tel}, cid={self.cid}")
        if self.cid > self.tel:
            raise ConfigurationError(f"cid must not exceed tel, got cid={self.cid}, tel={self.tel}")
        if self.a > self.min_top_row:
            raise ConfigurationError(f"The wall must start at row {self.min_top_row} or above, got a={self.a}")
        if self.a > self.b or self.c > self.d:
            raise ConfigurationError(f"Empty wall region {self.a}..{self.b} x {self.c}..{self.d}")

    def block_origin(self, i):
        """Wall row (or column) of the first entry of lattice block i"""
        return self.cid * (i - 1) + 1 - self.offset

    def block_center(self, i):
        return self.block_origin(i) + self.tel // 2

    def first_fitting(self, lo):
        """Least block index whose block starts at or after wall index lo"""
        return ceil_div(lo - 1 + self.offset, self.cid) + 1

    def last_fitting(self, hi):
        """Greatest block index whose block ends at or before wall index hi"""
        return (hi - self.tel - 1 + self.offset) // self.cid + 1

    def closure_bounds(self):
        """
        Bounds (lower, upper) of the small closure region (lower, upper] in tile coordinates

        lower_i = ⌈(lo_i + r)/(cid·k)⌉ - 1 and upper_i = ⌊(hi_i - r)/(cid·k)⌋, tightened until
        every block of the k-fold enlargement lies in columns c..d and on rows up to b.
        Rows above a are zero padding.
        """
        step, k = self.cid * self.k, self.k
        lower = (ceil_div(self.a + self.r, step) - 1,
                 max(ceil_div(self.c + self.r, step) - 1, ceil_div(self.first_fitting(self.c) - 1, k)))
        upper = (min((self.b - self.r) // step, self.last_fitting(self.b) // k),
                 min((self.d - self.r) // step, self.last_fitting(self.d) // k))
        if not (lower[0] < 0 < upper[0] and lower[1] < 0 < upper[1]):
            raise ConfigurationError(f"Wall region too small for a closure check: bounds {lower}, {upper}")
        return lower, upper

    def lattice_bounds(self):
        """
        First and last tile coordinates of the Pass-1 lattice

        Tiles with (lo_i + r)/cid <= i <= (hi_i - r)/cid whose blocks fit in the wall,
        widened to cover the k-fold enlargement of the closure region.
        """
        (low_row, low_col), (up_row, up_col) = self.closure_bounds()
        k = self.k
        first = (min(k * low_row + 1, ceil_div(self.a + self.r, self.cid)),
                 min(k * low_col + 1, max(ceil_div(self.c + self.r, self.cid), self.first_fitting(self.c))))
        last = (max(k * up_row, min((self.b - self.r) // self.cid, self.last_fitting(self.b))),
                max(k * up_col, min((self.d - self.r) // self.cid, self.last_fitting(self.d))))
        return first, last

    def to_dict(self):
        return {"k": self.k, "tel": self.tel, "cid": self.cid, "centered": self.centered,
                "a": self.a, "b": self.b, "c": self.c, "d": self.d}

    @classmethod
    def from_config(cls, config, **overrides):
        values = {name: config.get(f"discovery.{name}") for name in
                  ('a', 'b', 'c', 'd', 'k', 'tel', 'cid', 'centered')}
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

@dataclass
class DiscoveryResult:
    """
    Outcome of a successful discovery run

    Tile ids are 1..N; index 0 of the code and image tables is unused. lattice
    holds the tile grid of the whole Pass-1 lattice, whose first cell is lattice
    coordinate lattice_origin.
    """
    params: DiscoveryParams
    codes: np.ndarray
    images: np.ndarray
    seeds: dict
    lattice: np.ndarray
    lattice_origin: tuple
    lower: tuple
    upper: tuple
    patterns: set
    canonical: bool = False
    deltas: dict = field(default_factory=dict)

    @property
    def tile_count(self):
        return self.codes.shape[0] - 1

    @property
    def tiles(self):
        return range(1, self.tile_count + 1)

    @property
    def small_region(self):
        return Region(self.lower[0] + 1, self.upper[0], self.lower[1] + 1, self.upper[1])

    @property
    def tetrads(self):
        """φ-images in tile order, then the other observed 2-patterns in lexicographic order"""
        image_patterns = [tuple(int(v) for v in self.images[tile].ravel()) for tile in self.tiles]
        extra = sorted(self.patterns - set(image_patterns))
        return image_patterns + extra

    def tile_at(self, i, j):
        """Tile at lattice coordinate (i, j) of the discovered grid"""
        return int(self.lattice[i - self.lattice_origin[0], j - self.lattice_origin[1]])

    def to_system(self):
        """The discovered TilingSystem (φ, seeds, τ, r)"""
        images = {tile: self.images[tile] for tile in self.tiles}
        codes = {tile: self.codes[tile] for tile in self.tiles}
        return TilingSystem(images, self.seeds, codes, self.params.r, self.params.mode)

    def summary(self):
        return {
            "tiles": self.tile_count,
            "tetrads": len(self.tetrads),
            "seeds": {f"{o[0]},{o[1]}": tile for o, tile in sorted(self.seeds.items())},
            "closure_region": {"lower": list(self.lower), "upper": list(self.upper)},
            "canonical": self.canonical,
            "params": self.params.to_dict(),
        }

    def write_outputs(self, directory):
        """
        Write codes.txt, tetrads.txt and summary.json into directory

        Returns:
            dict: Written file paths by kind
        """
        tetrads = self.tetrads
        paths = {
            "codes": os.path.join(directory, "codes.txt"),
            "tetrads": os.path.join(directory, "tetrads.txt"),
            "summary": os.path.join(directory, "summary.json"),
        }
        write_codes(paths["codes"], {tile: self.codes[tile] for tile in self.tiles})
        write_tetrads(paths["tetrads"], {tile: self.images[tile] for tile in self.tiles},
                      tetrads[self.tile_count:])
        ensure_parent_dir(paths["summary"])
        with open(paths["summary"], 'w') as f:
            json.dump(self.summary(), f, indent=2)
        logger.info(f"Discovery outputs written to {directory}")
        return paths

def _padded_values(wall, params, lattice_lo, lattice_hi):
    """Wall entries under the Pass-1 lattice; rows above the wall are zero"""
    top = params.block_origin(lattice_lo[0])
    bottom = params.block_origin(lattice_hi[0]) + params.tel
    left = params.block_origin(lattice_lo[1])
    right = params.block_origin(lattice_hi[1]) + params.tel

    if bottom > params.b or left < params.c or right > params.d:
        raise DiscoveryError(
            f"Lattice blocks reach rows {top}..{bottom}, columns {left}..{right} "
            f"outside the wall region {params.region}", stage="region")

    values = np.zeros((bottom - top + 1, right - left + 1), dtype=wall.grid.dtype)
    first = max(top, params.a)
    values[first - top:] = wall.window(Region(first, bottom, left, right))
    return values

def _first_position(mask):
    return tuple(int(v) for v in np.argwhere(mask)[0])

def discover(wall, params):
    """
    Find a coding, a k-substitution and seeds reproducing a wall segment

    Pass 1 cuts the wall into l x l blocks on the (l-r)-spaced lattice and numbers
    the distinct blocks; Pass 2 reads every tile's k x k image off the tile grid;
    Pass 3 checks that every 2-pattern of the Pass-1 lattice already occurs in the
    small closure region.

    Args:
        wall (WallSegment): Wall covering params.region with valid entries
        params (DiscoveryParams): Run parameters

    Returns:
        DiscoveryResult: Tiles numbered by the lexicographic order of their codes

    Raises:
        DiscoveryError: On a contradiction, an incomplete closure or bad seeds
    """
    if not wall.region.contains_region(params.region):
        raise RegionError(f"{wall} does not cover the wall region {params.region}")
    if not wall.crop(params.region).valid.all():
        raise RegionError(f"{params.region} contains flagged entries of {wall}")
    if wall.m_lo > -2:
        raise RegionError("The wall must include the sentinel rows -2 and -1")

    k, l, cid = params.k, params.l, params.cid
    lower, upper = params.closure_bounds()
    lattice_lo, lattice_hi = params.lattice_bounds()

    # Pass 1: coding and tile grid
    values = _padded_values(wall, params, lattice_lo, lattice_hi)
    blocks = sliding_window_view(values, (l, l))[::cid, ::cid]
    rows, cols = blocks.shape[:2]
    flat = np.ascontiguousarray(blocks).reshape(rows * cols, l * l)
    distinct, inverse = np.unique(flat, axis=0, return_inverse=True)
    lattice = inverse.reshape(rows, cols).astype(np.int64) + 1
    tile_count = distinct.shape[0]
    codes = np.zeros((tile_count + 1, l, l), dtype=np.int64)
    codes[1:] = distinct.reshape(-1, l, l)
    logger.info(f"Pass 1: {tile_count} tiles on a {rows}x{cols} lattice")

    # Pass 2: substitution
    small_rows, small_cols = upper[0] - lower[0], upper[1] - lower[1]
    small = lattice[(lower[0] + 1) - lattice_lo[0]:upper[0] - lattice_lo[0] + 1,
                    (lower[1] + 1) - lattice_lo[1]:upper[1] - lattice_lo[1] + 1]
    enlarged = lattice[k * lower[0] + 1 - lattice_lo[0]:k * upper[0] - lattice_lo[0] + 1,
                       k * lower[1] + 1 - lattice_lo[1]:k * upper[1] - lattice_lo[1] + 1]
    quads = enlarged.reshape(small_rows, k, small_cols, k).transpose(0, 2, 1, 3).reshape(-1, k * k)
    records = np.unique(np.column_stack([small.ravel(), quads]), axis=0)
    tiles_seen, counts = np.unique(records[:, 0], return_counts=True)
    if (counts > 1).any():
        tile = int(tiles_seen[np.argmax(counts > 1)])
        clashing = records[records[:, 0] == tile][:2, 1:]
        where = [_first_position((small == tile) & (quads == image).all(axis=1).reshape(small.shape))
                 for image in clashing]
        coordinates = [(i + lower[0] + 1, j + lower[1] + 1) for i, j in where]
        raise DiscoveryError(f"Tile {tile} has two different images; not a {k}-substitution "
                             f"at these parameters", stage="substitution", coordinates=coordinates)
    images = np.zeros((tile_count + 1, k, k), dtype=np.int64)
    images[records[:, 0]] = records[:, 1:].reshape(-1, k, k)
    logger.info(f"Pass 2: images found for {len(tiles_seen)} tiles")

    # Pass 3: closure of the 2-patterns
    small_windows = sliding_window_view(small, (2, 2)).reshape(-1, 4)
    patterns = {tuple(int(v) for v in row) for row in np.unique(small_windows, axis=0)}
    big_windows = sliding_window_view(lattice, (2, 2)).reshape(-1, 4)
    big_distinct, big_first = np.unique(big_windows, axis=0, return_index=True)
    missing = [index for row, index in zip(big_distinct, big_first)
               if tuple(int(v) for v in row) not in patterns]
    if missing:
        i, j = divmod(int(min(missing)), cols - 1)
        raise DiscoveryError(f"Closure not reached: {len(missing)} 2-patterns of the Pass-1 "
                             f"lattice are absent from the small region; enlarge the region",
                             stage="closure", coordinates=[(i + lattice_lo[0], j + lattice_lo[1])])
    logger.info(f"Pass 3: {len(patterns)} 2-patterns, closure reached")

    without_image = sorted(set(range(1, tile_count + 1)) - set(int(t) for t in tiles_seen))
    if without_image:
        position = _first_position(lattice == without_image[0])
        raise DiscoveryError(f"Tiles {without_image[:10]} have no image", stage="totality",
                             coordinates=[(position[0] + lattice_lo[0], position[1] + lattice_lo[1])])

    seeds = {}
    for orthant in ORTHANTS:
        tile = int(lattice[orthant[0] - lattice_lo[0], orthant[1] - lattice_lo[1]])
        if images[tile][prolongation_cell(orthant, k)] != tile:
            raise DiscoveryError(f"Tile {tile} at {orthant} is not {orthant}-prolongable",
                                 stage="seeds", coordinates=[orthant])
        seeds[orthant] = tile

    return DiscoveryResult(params, codes, images, seeds, lattice, lattice_lo, lower, upper, patterns)

def delta_key(m, n, row_span, column_span):
    """
    10·b·c·dist(m, n) as an integer, dist(m, n) = |m| + |n| + m/(10b) + n/(10bc)

    Orders by ℓ1 distance from the origin, then by row, then by column.
    """
    scale = 10 * row_span * column_span
    return scale * (np.abs(m) + np.abs(n)) + m * column_span + n

def canonical_order(result, occurrences=None):
    """
    Renumber tiles 1..N by ascending Δ, the least dist over the centres of their occurrences

    Args:
        result (DiscoveryResult): Discovery output
        occurrences (tuple, optional): (tile grid, lattice origin); the Pass-1 lattice by default

    Returns:
        DiscoveryResult: The same system with canonical ids and exact Δ values
    """
    params = result.params
    grid, origin = occurrences if occurrences is not None else (result.lattice, result.lattice_origin)
    row_span, column_span = params.b - params.a, params.d - params.c

    centers_m = np.array([params.block_center(i) for i in range(origin[0], origin[0] + grid.shape[0])],
                         dtype=np.int64)
    centers_n = np.array([params.block_center(j) for j in range(origin[1], origin[1] + grid.shape[1])],
                         dtype=np.int64)
    keys = delta_key(centers_m[:, None], centers_n[None, :], row_span, column_span).ravel()

    order = np.argsort(keys, kind='stable')
    tiles, first = np.unique(grid.ravel()[order], return_index=True)
    absent = sorted(set(result.tiles) - set(int(t) for t in tiles))
    if absent:
        raise DiscoveryError(f"Tiles {absent[:10]} never occur in the grid", stage="ordering")
    min_keys = keys[order][first]

    renumber = np.zeros(result.tile_count + 1, dtype=np.int64)
    renumber[tiles[np.argsort(min_keys, kind='stable')]] = np.arange(1, len(tiles) + 1)

    codes = np.zeros_like(result.codes)
    codes[renumber[1:]] = result.codes[1:]
    images = np.zeros_like(result.images)
    images[renumber[1:]] = renumber[result.images[1:]]
    scale = 10 * row_span * column_span
    deltas = {int(renumber[tile]): Fraction(int(key), scale) for tile, key in zip(tiles, min_keys)}

    logger.info(f"Canonical order applied to {len(tiles)} tiles")
    return replace(
        result,
        codes=codes,
        images=images,
        seeds={orthant: int(renumber[tile]) for orthant, tile in result.seeds.items()},
        lattice=renumber[result.lattice],
        patterns={tuple(int(renumber[v]) for v in pattern) for pattern in result.patterns},
        canonical=True,
        deltas=deltas,
    )

def verify_initial_conditions(result):
    """Whether T(0,0)=1, T(0,1)=2, T(1,0)=3 and T(1,1)=4"""
    return result.canonical and result.seeds == REFERENCE_SEEDS
