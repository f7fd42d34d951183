"""
Machine-checkable obligations for a discovered wall tiling
"""
import json
import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from numwall.core.constants import (
    CONJECTURE_MODULI, CONJECTURE_SIZE, DEFAULT_COVER_SIDE, DEFAULT_PATTERN_SAMPLES, DEFAULT_SUBSTITUTION_WINDOW,
    DEFAULT_ZEROTH_ROW_WIDTH,
    SAMPLE_WALL_REGION, PAPER_FOLDING_SEEDS, SequenceKind,
)
from numwall.core.exceptions import DiscoveryError, VerificationError
from numwall.core.utils import Region, map_bands, split_bands
from numwall.models.field import Modulus
from numwall.models.sequences import SequenceSource, letters_1d, paper_folding_system
from numwall.models.tiling import cover_size, two_pattern_closure
from numwall.models.wall import WallSegment, build
from numwall.models.windows import census
from numwall.controllers.discovery import canonical_order, discover

logger = logging.getLogger('numwall')

ZERO_BLOCK_SIDE = 4
EXPECTED_MAX_SIDE = {SequenceKind.PAPER_FOLDING: 3, SequenceKind.PAGODA: 1}

@dataclass
class ObligationResult:
    """Outcome of one obligation; coordinates point at the first offending tiles or entries"""
    name: str
    passed: bool
    details: str = ""
    coordinates: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def to_dict(self):
        return {"passed": self.passed, "details": self.details,
                "coordinates": [list(c) if isinstance(c, tuple) else c for c in self.coordinates],
                "data": self.data}

@dataclass
class Certificate:
    """Pass/fail per obligation; the certificate passes iff every obligation passes"""
    source: str
    obligations: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.obligations) and all(o.passed for o in self.obligations.values())

    def add(self, result):
        self.obligations[result.name] = result
        status = "PASS" if result.passed else "FAIL"
        logger.info(f"{result.name}: {status} {result.details}")
        return result

    def to_dict(self):
        return {
            "source": self.source,
            "status": "PASS" if self.passed else "FAIL",
            "summary": self.summary,
            "obligations": {name: o.to_dict() for name, o in self.obligations.items()},
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, default=str)

@dataclass(frozen=True)
class SpecialTileSets:
    """S: tiles of the zeroth tiling row; S' = S with the zero tile"""
    special: frozenset
    zero_tile: int

    @property
    def special_prime(self):
        return self.special | {self.zero_tile}

def ones_row(system):
    """0-based row of τ(s), s in S, that carries wall row -1"""
    return system.cid + system.offset - 2

def special_tile_sets(system, side=ZERO_BLOCK_SIDE):
    """
    Recover S and the zero tile from the coding alone

    Raises:
        VerificationError: Without exactly one all-zero code, or for codes smaller than side
    """
    if system.l < side:
        raise VerificationError(f"Codes of side {system.l} cannot hold {side}x{side} zero blocks")
    tiles = np.array(system.alphabet, dtype=np.int64)
    codes = system.codes[tiles]
    zero = tiles[(codes == 0).all(axis=(1, 2))]
    if zero.size != 1:
        raise VerificationError(f"Expected exactly one all-zero code, found {zero.tolist()}")
    blocks = sliding_window_view(codes, (side, side), axis=(1, 2))
    has_zero_block = (blocks == 0).all(axis=(3, 4)).any(axis=(1, 2))
    special = frozenset(int(t) for t in tiles[has_zero_block]) - {int(zero[0])}
    return SpecialTileSets(special, int(zero[0]))

def verify_coding_structure(system, expected=None):
    """
    Zero-block structure of τ

    Every tile whose code holds an all-zero 4x4 block is in S'; τ(zero tile) is zero;
    each s in S has zero rows above the ones row and an all-ones ones row.

    Args:
        system (TilingSystem): Canonical system
        expected (frozenset, optional): Published S to compare against

    Returns:
        ObligationResult: With the recovered sets in data
    """
    try:
        sets = special_tile_sets(system)
    except VerificationError as e:
        return ObligationResult("coding-zero-structure", False, str(e))

    row = ones_row(system)
    bad = []
    for tile in sorted(sets.special):
        code = system.codes[tile]
        if code[:row].any() or not (code[row] == 1).all():
            bad.append(tile)

    data = {"S": sorted(sets.special), "zero_tile": sets.zero_tile, "ones_row": row + 1}
    if bad:
        return ObligationResult("coding-zero-structure", False,
                                f"Tiles without the sentinel rows: {bad[:10]}", bad[:10], data)
    if expected is not None and sets.special != frozenset(expected):
        return ObligationResult("coding-zero-structure", False,
                                f"S = {sorted(sets.special)} differs from {sorted(expected)}", [], data)
    return ObligationResult("coding-zero-structure", True,
                            f"|S| = {len(sets.special)}, zero tile {sets.zero_tile}", [], data)

def verify_substitution_structure(system, sets):
    """
    φ(zero tile) is all zero tiles; φ(s) for s in S has zero tiles above a row
    of S; a tile whose image meets S' is itself in S'
    """
    z = sets.zero_tile
    k = system.k
    special = np.array(sorted(sets.special), dtype=np.int64)

    if not (system.images[z] == z).all():
        return ObligationResult("substitution-structure", False,
                                f"Image of the zero tile {z} is not constant", [z])

    for tile in special:
        image = system.images[tile]
        if not (image[:k - 1] == z).all() or not np.isin(image[k - 1], special).all():
            return ObligationResult("substitution-structure", False,
                                    f"Image of tile {int(tile)} breaks the zeroth-row shape", [int(tile)])

    prime = np.array(sorted(sets.special_prime), dtype=np.int64)
    tiles = np.array(system.alphabet, dtype=np.int64)
    meets = np.isin(system.images[tiles], prime).any(axis=(1, 2))
    offenders = tiles[meets & ~np.isin(tiles, prime)]
    if offenders.size:
        return ObligationResult("substitution-structure", False,
                                f"Tiles outside S' with images meeting S': {offenders[:10].tolist()}",
                                offenders[:10].tolist())
    return ObligationResult("substitution-structure", True, f"checked {len(tiles)} images")

def verify_row_structure(system, sets, region, samples=1000, seed=0):
    """
    Rows <= -1 hold only the zero tile, row 0 only tiles of S, rows >= 1 nothing of S'

    Checked on a tile region (which must contain rows -1, 0 and 1) plus row -2 sampled
    at random columns.
    """
    if not (region.m_lo <= -1 and region.m_hi >= 1):
        raise VerificationError(f"{region} must contain tile rows -1, 0 and 1")
    tiles = system.expand(region)
    above = tiles[:-region.m_lo]
    zeroth = tiles[-region.m_lo]
    below = tiles[-region.m_lo + 1:]
    z = sets.zero_tile

    if (above != z).any():
        i, j = np.argwhere(above != z)[0]
        return ObligationResult("row-structure", False, "Nonzero tile above row 0",
                                [(region.m_lo + int(i), region.n_lo + int(j))])
    if not np.isin(zeroth, list(sets.special)).all():
        j = int(np.argmin(np.isin(zeroth, list(sets.special))))
        return ObligationResult("row-structure", False, "Row 0 tile outside S", [(0, region.n_lo + j)])
    inside = np.isin(below, list(sets.special_prime))
    if inside.any():
        i, j = np.argwhere(inside)[0]
        return ObligationResult("row-structure", False, "Tile of S' below row 0",
                                [(int(i) + 1, region.n_lo + int(j))])

    rng = np.random.default_rng(seed)
    width = max(abs(region.n_lo), abs(region.n_hi)) * 1000
    for n in rng.integers(-width, width, size=samples):
        if system.tile_at(-2, int(n)) != z:
            return ObligationResult("row-structure", False, "Row -2 sample is not the zero tile",
                                    [(-2, int(n))])
    return ObligationResult("row-structure", True, f"region {region.to_dict()} plus {samples} samples of row -2")

def _cross_violations(grid, p, first_row, last_row):
    """Rows first_row..last_row (grid indices) where S² ≠ S_below·S_above + S_right·S_left"""
    centre = grid[first_row:last_row + 1, 1:-1]
    above = grid[first_row - 1:last_row, 1:-1]
    below = grid[first_row + 1:last_row + 2, 1:-1]
    left = grid[first_row:last_row + 1, :-2]
    right = grid[first_row:last_row + 1, 2:]
    bad = (centre * centre - below * above - right * left) % p != 0
    positions = np.argwhere(bad)
    if positions.size == 0:
        return None
    i, j = positions[0]
    return first_row + int(i), int(j) + 1

def verify_frame_constraints(grid, m_lo, n_lo, modulus, threads=1):
    """
    Check a value grid against the Number Wall recurrences

    Sentinel rows (-1 ones, above it zeros), the cross identity on every interior
    entry, and for every window with complete frames: square shape, geometric
    inner frame with P·S = (-1)^(δ-1)·Q·R, A_k·D_k = (-1)^((δ-1)k)·B_k·C_k and the
    outer-frame relation. This is a checker only; it computes no wall entries.

    Args:
        grid (numpy.ndarray): Residues, grid[i, j] = S_{m_lo+i, n_lo+j}
        m_lo (int): Row of grid[0] (<= -1)
        n_lo (int): Column of grid[:, 0]
        modulus (Modulus): The field

    Returns:
        tuple: (True, None) or (False, (m, n, reason))
    """
    p = modulus.p
    grid = np.asarray(grid, dtype=np.int64) % p
    rows, cols = grid.shape
    if m_lo > -1:
        raise VerificationError("The grid must include the sentinel row -1")

    for i in range(min(rows, -m_lo)):
        m = m_lo + i
        expected = 1 if m == -1 else 0
        if (grid[i] != expected).any():
            j = int(np.argmax(grid[i] != expected))
            return False, (m, n_lo + j, "sentinel row")

    first = max(1, -m_lo)
    last = rows - 2
    if first <= last and cols >= 3:
        bands = split_bands(first, last, threads)
        found = [v for v in map_bands(lambda lo, hi: _cross_violations(grid, p, lo, hi), bands, threads) if v]
        if found:
            i, j = found[0]
            return False, (m_lo + i, n_lo + j, "cross identity")

    zero = grid == 0
    zero[:-m_lo] = False
    up = np.zeros_like(zero)
    up[1:] = zero[:-1]
    left = np.zeros_like(zero)
    left[:, 1:] = zero[:, :-1]
    inverse = modulus.inverse

    for i, j in np.argwhere(zero & ~up & ~left):
        i, j = int(i), int(j)
        g = int(np.argmin(np.append(zero[i, j:], False)))
        depth = int(np.argmin(np.append(zero[i:, j], False)))
        if i < 2 or j < 2 or i + g + 2 > rows or j + g + 2 > cols:
            continue
        m, n = m_lo + i, n_lo + j
        if g != depth or zero[i:i + g, j:j + g].sum() != g * g:
            return False, (m, n, "window is not square")
        delta = g + 1

        A = [grid[i - 1, j - 1 + t] for t in range(delta + 1)]
        B = [grid[i - 1 + t, j - 1] for t in range(delta + 1)]
        C = [grid[i + g - t, j + g] for t in range(delta + 1)]
        D = [grid[i + g, j + g - t] for t in range(delta + 1)]
        if 0 in A or 0 in B or 0 in C or 0 in D:
            return False, (m, n, "inner frame vanishes")
        P, Q = A[1] * inverse(A[0]) % p, B[1] * inverse(B[0]) % p
        R, S = C[1] * inverse(C[0]) % p, D[1] * inverse(D[0]) % p
        for sequence, ratio in ((A, P), (B, Q), (C, R), (D, S)):
            if any(sequence[t + 1] != sequence[t] * ratio % p for t in range(delta)):
                return False, (m, n, "inner frame is not geometric")
        if (P * S - (-1) ** (delta - 1) * Q * R) % p:
            return False, (m, n, "ratio law")
        for t in range(delta + 1):
            if (A[t] * D[t] - (-1) ** ((delta - 1) * t) * B[t] * C[t]) % p:
                return False, (m, n, "inner-frame law")

        for t in range(1, delta):
            E, F = grid[i - 2, j - 1 + t], grid[i - 1 + t, j - 2]
            G, H = grid[i + g - t, j + g + 1], grid[i + g + 1, j + g - t]
            sign = (-1) ** t
            lhs = Q * E * inverse(A[t]) + sign * P * F * inverse(B[t])
            rhs = R * H * inverse(D[t]) + sign * S * G * inverse(C[t])
            if (lhs - rhs) % p:
                return False, (m, n, f"outer-frame law at k={t}")
    return True, None

def verify_bounded_deficiency(grid, m_lo, n_lo, modulus, max_side=3):
    """
    Windows on rows >= 0 have side at most max_side and at least one reaches it
    """
    wall = WallSegment(modulus, m_lo, n_lo, grid)
    region = Region(max(0, m_lo), wall.m_hi, wall.n_lo, wall.n_hi)
    report = census(wall, region)
    sides = sorted({w.side for w in report.unbroken() if w.top >= 0})
    largest = sides[-1] if sides else 0
    data = {"max_side": largest, "max_deficiency": report.max_deficiency,
            "deficiencies": {str(d): c for d, c in sorted(report.deficiencies.items())}}
    if largest != max_side:
        return ObligationResult("bounded-deficiency", False,
                                f"largest window side {largest}, expected {max_side}", [], data)
    return ObligationResult("bounded-deficiency", True, f"largest window side {largest}", [], data)

def zeroth_row_letters(system, sets):
    """
    Code the tiles of S by their τ row at wall row 0

    Returns:
        tuple: (dict tile -> letter, list of the coding rows in letter order)
    """
    row = ones_row(system) + 1
    rows = {tile: tuple(int(v) for v in system.codes[tile][row]) for tile in sets.special}
    ordered = sorted(set(rows.values()))
    return {tile: ordered.index(value) for tile, value in rows.items()}, ordered

def verify_zeroth_row(system, sets, source, width=DEFAULT_ZEROTH_ROW_WIDTH,
                      window=DEFAULT_SUBSTITUTION_WINDOW):
    """
    Row 0 of the decoded tiling is the source sequence

    For the paper-folding sequence the reduction is checked letter by letter: the
    S tiles are coded by their row-0 codes, letters with equal decoded rows are
    identified, the result must be the paper-folding substitution ψ with τ'(φ(s)) =
    ρ(ψ^j(s)), seeds (2, 0) and T(ψ^j) = T(ψ). For any source the decoded row 0 is
    compared with the sequence on |n| <= width.
    """
    data = {}
    decoded = system.decode(Region(0, 0, -width, width))[0]
    expected = source.segment(-width, width)
    if not np.array_equal(decoded % source.modulus.p, expected):
        n = int(np.argmax(decoded % source.modulus.p != expected)) - width
        return ObligationResult("zeroth-row", False, "Decoded row 0 differs from the sequence", [(0, n)])
    if source.kind != SequenceKind.PAPER_FOLDING:
        return ObligationResult("zeroth-row", True, f"row 0 matches {source.name} on |n| <= {width}")

    letters, coding_rows = zeroth_row_letters(system, sets)
    c, o, k = system.cid, system.offset, system.k
    decoded_rows = [r[o:o + c] for r in coding_rows]
    data["coding_rows"] = [''.join(str(v) for v in r) for r in coding_rows]

    # identify letters whose decoded rows agree with an earlier letter
    representative = {}
    for letter, r in enumerate(decoded_rows):
        representative[letter] = decoded_rows.index(r)
    base = sorted(set(representative.values()))
    reduce = {letter: base.index(representative[letter]) for letter in representative}

    coded = {}
    for tile, letter in letters.items():
        if not all(int(t) in letters for t in system.images[tile][k - 1]):
            return ObligationResult("zeroth-row", False, f"Image of tile {tile} leaves S", [tile], data)
        bottom = tuple(reduce[letters[int(t)]] for t in system.images[tile][k - 1])
        if coded.setdefault(reduce[letter], bottom) != bottom:
            return ObligationResult("zeroth-row", False,
                                    f"Identified letters disagree on their images (tile {tile})", [tile], data)
    data["coded_substitution"] = {str(letter): list(image) for letter, image in sorted(coded.items())}

    psi = paper_folding_system(source.modulus)
    if coded != {letter: tuple(image) for letter, image in psi.substitution.items()}:
        return ObligationResult("zeroth-row", False, f"Coded substitution {coded} is not ψ", [], data)

    exponent = 1
    while psi.k ** exponent < k * c:
        exponent += 1
    if psi.k ** exponent != k * c:
        return ObligationResult("zeroth-row", False, f"k·(l-r) = {k * c} is not a power of {psi.k}", [], data)
    power = psi.power(exponent)
    coding = psi.coding_table()
    for tile, letter in sorted(letters.items(), key=lambda item: item[1]):
        reduced = reduce[letter]
        image_row = np.concatenate([system.codes[int(t)][ones_row(system) + 1][o:o + c]
                                    for t in system.images[tile][k - 1]])
        if not np.array_equal(image_row, coding[list(power.substitution[reduced])]):
            return ObligationResult("zeroth-row", False,
                                    f"τ'(φ({tile})) differs from ρ(ψ^{exponent}({reduced}))", [tile], data)

    seeds = (reduce[letters[system.seeds[(0, 0)]]], reduce[letters[system.seeds[(0, 1)]]])
    data["coded_seeds"] = list(seeds)
    if seeds != tuple(PAPER_FOLDING_SEEDS):
        return ObligationResult("zeroth-row", False, f"Coded seeds {seeds} are not {PAPER_FOLDING_SEEDS}", [], data)

    if not np.array_equal(letters_1d(power, -window, window), letters_1d(psi, -window, window)):
        return ObligationResult("zeroth-row", False, f"T(ψ^{exponent}) and T(ψ) differ", [], data)

    return ObligationResult("zeroth-row", True,
                            f"coded system is ψ; row 0 is paper-folding on |n| <= {width}", [], data)

def check_pattern_coding(system, region, size=3, samples=DEFAULT_PATTERN_SAMPLES, seed=0):
    """
    The decoded image of a pattern found at tile offset j sits at (l-r)·j in the decoded tiling

    Returns:
        ObligationResult: First mismatching pattern position on failure
    """
    if region.m_hi - region.m_lo + 2 <= size or region.n_hi - region.n_lo + 2 <= size:
        raise VerificationError(f"{region} is too small for {size}-patterns")
    rng = np.random.default_rng(seed)
    c = system.cid
    for _ in range(samples):
        i = int(rng.integers(region.m_lo - 1, region.m_hi - size + 1))
        j = int(rng.integers(region.n_lo - 1, region.n_hi - size + 1))
        pattern = system.expand(Region(i + 1, i + size, j + 1, j + size))
        decoded = system.decode(Region(c * i + 1, c * (i + size), c * j + 1, c * (j + size)))
        if not np.array_equal(system.code_pattern(pattern), decoded):
            return ObligationResult("pattern-coding", False, f"Pattern at {(i, j)} codes differently", [(i, j)])
    return ObligationResult("pattern-coding", True, f"{samples} patterns of size {size}")

def check_pattern_cover(system, region, r_prime=DEFAULT_COVER_SIDE, samples=DEFAULT_PATTERN_SAMPLES, seed=0):
    """
    Every r'-pattern of the decoded tiling lies inside the full coded image of an
    s(l, r, r')-pattern of tiles

    Windows are sampled so that their covering tiles stay inside the tile region.
    """
    rng = np.random.default_rng(seed)
    s = cover_size(system.l, system.overlap, r_prime)
    c, o = system.cid, system.offset
    lo_i, hi_i = region.m_lo + 1, region.m_hi - s + 1
    lo_j, hi_j = region.n_lo + 1, region.n_hi - s + 1
    if lo_i > hi_i or lo_j > hi_j:
        raise VerificationError(f"{region} is too small for {s}-patterns")

    for _ in range(samples):
        x = int(rng.integers(system.block_origin(lo_i), system.block_origin(hi_i) + c))
        y = int(rng.integers(system.block_origin(lo_j), system.block_origin(hi_j) + c))
        window = system.decode(Region(x, x + r_prime - 1, y, y + r_prime - 1))
        # last block starting at or before the window
        i, j = (x + o - 1) // c + 1, (y + o - 1) // c + 1
        pattern = system.expand(Region(i, i + s - 1, j, j + s - 1))
        image = system.code_pattern(pattern, full=True)
        dx, dy = x - system.block_origin(i), y - system.block_origin(j)
        if not np.array_equal(image[dx:dx + r_prime, dy:dy + r_prime], window):
            return ObligationResult("pattern-cover", False,
                                    f"{r_prime}-pattern at {(x, y)} not inside the image of its {s}-pattern",
                                    [(x, y)])
    return ObligationResult("pattern-cover", True, f"{samples} windows of side {r_prime}, cover size {s}")

def scan_conjecture(moduli=CONJECTURE_MODULI, size=CONJECTURE_SIZE, kinds=None, threads=1):
    """
    Measured maximum deficiency of paper-folding and pagoda walls over several fields

    The results are empirical observations on a size x size segment, not proofs.

    Returns:
        dict: {"label": "EMPIRICAL", "results": {kind: {p: max deficiency}}}
    """
    kinds = kinds or (SequenceKind.PAPER_FOLDING, SequenceKind.PAGODA)
    factories = {SequenceKind.PAPER_FOLDING: SequenceSource.paper_folding,
                 SequenceKind.PAGODA: SequenceSource.pagoda}
    jobs = [(kind, p) for kind in kinds for p in moduli]
    half = size // 2

    def run(lo, hi):
        measured = []
        for kind, p in jobs[lo:hi + 1]:
            wall = build(factories[kind](Modulus(p)), size - 1, -half, size - half - 1)
            measured.append(census(wall, Region(0, size - 1, -half, size - half - 1)).max_deficiency)
        return measured

    values = [v for band in map_bands(run, split_bands(0, len(jobs) - 1, threads), threads) for v in band]
    results = {}
    for (kind, p), value in zip(jobs, values):
        results.setdefault(kind.value, {})[p] = value
        logger.info(f"EMPIRICAL: {kind.value} over F_{p}, {size}x{size}: max deficiency {value}")
    return {"label": "EMPIRICAL", "size": size, "results": results}

def full_pipeline(source, params, threads=1, zeroth_row_width=DEFAULT_ZEROTH_ROW_WIDTH,
                  substitution_window=DEFAULT_SUBSTITUTION_WINDOW, check_region=None,
                  expected_special=None, wall=None):
    """
    Build the wall, discover and order the tiling, then run every obligation

    Args:
        source (SequenceSource): The sequence
        params (DiscoveryParams): Discovery parameters
        check_region (tuple, optional): (m_lo, m_hi, n_lo, n_hi) of the decoded region
            checked for frame constraints and window sizes; the sample wall window clipped
            to the wall region by default
        expected_special (frozenset, optional): Published S to compare against
        wall (WallSegment, optional): Prebuilt wall covering rows a..b and columns c..d

    Returns:
        Certificate: Aggregated results
    """
    certificate = Certificate(source.name)
    if wall is None:
        wall = build(source, params.b, params.c, params.d, m_lo=params.a)
    elif not wall.region.contains_region(params.region):
        raise VerificationError(f"{wall} does not cover {params.region}")

    try:
        result = canonical_order(discover(wall, params))
    except DiscoveryError as e:
        certificate.add(ObligationResult("discovery", False, f"{e.stage}: {e}", list(e.coordinates or [])))
        return certificate

    system = result.to_system()
    certificate.summary = result.summary()
    certificate.add(ObligationResult("discovery", True, f"{result.tile_count} tiles, "
                                                        f"{len(result.tetrads)} tetrads"))

    coding = certificate.add(verify_coding_structure(system, expected_special))
    sets = None
    if coding.passed:
        sets = special_tile_sets(system)
        certificate.add(verify_substitution_structure(system, sets))
        certificate.add(verify_row_structure(system, sets, result.small_region))

    ok, violation = system.check_consistency(result.small_region)
    certificate.add(ObligationResult("consistency", ok,
                                     f"{system.overlap}-consistent on {result.small_region.to_dict()}"
                                     if ok else str(violation),
                                     [] if ok else [violation["tile"]]))

    expected_side = EXPECTED_MAX_SIDE.get(source.kind)
    cover_side = DEFAULT_COVER_SIDE if expected_side is None else expected_side + 4
    for name, check, kwargs in (("pattern-coding", check_pattern_coding, {}),
                                ("pattern-cover", check_pattern_cover, {"r_prime": cover_side})):
        try:
            certificate.add(check(system, result.small_region, **kwargs))
        except VerificationError as e:
            certificate.add(ObligationResult(name, False, str(e)))

    closed = two_pattern_closure(system, result.lower, result.upper)
    certificate.add(ObligationResult("closure", closed, f"lower {result.lower}, upper {result.upper}"))

    if check_region is None:
        # sample window, clipped to the computed wall
        s_lo, s_hi, s_left, s_right = SAMPLE_WALL_REGION
        check_region = (max(s_lo, params.a), min(s_hi, params.b), max(s_left, params.c), min(s_right, params.d))
    m_lo, m_hi, n_lo, n_hi = check_region
    region = Region(m_lo, m_hi, n_lo, n_hi)
    decoded = system.decode(region)
    matches = np.array_equal(decoded, wall.window(region).astype(np.int64))
    certificate.add(ObligationResult("round-trip", matches, f"decoded tiling vs wall on {region.to_dict()}"))

    ok, violation = verify_frame_constraints(decoded, m_lo, n_lo, source.modulus, threads)
    certificate.add(ObligationResult("frame-constraints", ok, "" if ok else violation[2],
                                     [] if ok else [violation[:2]]))

    if expected_side is not None:
        certificate.add(verify_bounded_deficiency(decoded, m_lo, n_lo, source.modulus, expected_side))

    if sets is not None:
        certificate.add(verify_zeroth_row(system, sets, source, zeroth_row_width, substitution_window))

    logger.info(f"Certificate for {source.name}: {'PASS' if certificate.passed else 'FAIL'}")
    return certificate
