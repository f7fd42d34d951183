import json

import numpy as np
import pytest

from numwall.core.constants import SequenceKind
from numwall.core.exceptions import ConfigurationError, VerificationError
from numwall.core.utils import Region
from numwall.models.field import Modulus
from numwall.models.sequences import SequenceSource
from numwall.models.tiling import TilingSystem
from numwall.models.wall import build
from numwall.controllers.verify import (
    Certificate, ObligationResult, SpecialTileSets, check_pattern_cover, check_pattern_coding,
    ones_row, scan_conjecture, special_tile_sets, verify_bounded_deficiency, verify_frame_constraints,
    verify_row_structure, verify_substitution_structure,
)

@pytest.fixture(scope="module")
def paper_folding_grid():
    wall = build(SequenceSource.paper_folding(Modulus(3)), 39, -41, 41)
    return wall.grid.astype(np.int64), wall.m_lo, wall.n_lo

@pytest.fixture
def random_grid(random_source):
    wall = build(random_source(5, -60, 60, 11), 20, -30, 30)
    return wall.grid.astype(np.int64).copy(), wall.m_lo, wall.n_lo

def test_built_walls_satisfy_the_frame_constraints(paper_folding_grid, random_grid):
    grid, m_lo, n_lo = paper_folding_grid
    assert verify_frame_constraints(grid, m_lo, n_lo, Modulus(3)) == (True, None)
    assert verify_frame_constraints(grid, m_lo, n_lo, Modulus(3), threads=3) == (True, None)
    grid, m_lo, n_lo = random_grid
    assert verify_frame_constraints(grid, m_lo, n_lo, Modulus(5)) == (True, None)

def test_changed_entry_is_located(random_grid):
    grid, m_lo, n_lo = random_grid
    i, j = 10 - m_lo, 0 - n_lo
    value = int(grid[i, j])
    # new value with a different square mod 5
    grid[i, j] = (value + (2 if value == 2 else 1)) % 5
    ok, (m, n, reason) = verify_frame_constraints(grid, m_lo, n_lo, Modulus(5))
    assert not ok
    assert reason == "cross identity"
    assert abs(m - 10) <= 1 and abs(n) <= 1

def test_sentinel_rows_are_checked(random_grid):
    grid, m_lo, n_lo = random_grid
    grid[1, 5] = 2
    assert verify_frame_constraints(grid, m_lo, n_lo, Modulus(5)) == (False, (-1, n_lo + 5, "sentinel row"))
    with pytest.raises(VerificationError):
        verify_frame_constraints(grid[2:], 0, n_lo, Modulus(5))

def test_bounded_deficiency(paper_folding_grid):
    grid, m_lo, n_lo = paper_folding_grid
    result = verify_bounded_deficiency(grid, m_lo, n_lo, Modulus(3), max_side=3)
    assert result.passed
    assert result.data["max_deficiency"] == 4
    assert not verify_bounded_deficiency(grid, m_lo, n_lo, Modulus(3), max_side=2).passed

def test_pattern_coding_and_cover(constant_system):
    region = Region(-4, 4, -4, 4)
    assert check_pattern_coding(constant_system, region, samples=50).passed
    assert check_pattern_cover(constant_system, region, r_prime=3, samples=50).passed
    with pytest.raises(VerificationError):
        check_pattern_cover(constant_system, Region(0, 1, 0, 1), r_prime=3)

def mutated(system, images=None, seeds=None, codes=None):
    """Copy of system with some images, seeds or codes replaced"""
    return TilingSystem(
        {tile: (images or {}).get(tile, system.images[tile]) for tile in system.alphabet},
        {**system.seeds, **(seeds or {})},
        {tile: (codes or {}).get(tile, system.codes[tile]) for tile in system.alphabet},
        overlap=system.overlap, mode=system.mode)

def test_mutated_code_row_breaks_consistency(constant_system):
    code = constant_system.codes[1].copy()
    code[2] = [1, 1, 2]
    system = mutated(constant_system, codes={1: code})
    assert constant_system.check_consistency(Region(-2, 2, -3, 3)) == (True, None)
    ok, violation = system.check_consistency(Region(-2, 2, -3, 3))
    assert not ok
    assert violation["axis"] == "row"
    assert violation["tiles"] == (1, 1)
    assert violation["tile"] == (0, -3)
    assert (system.decode(Region(0, 0, -4, 4)) == 2).any()

def test_corrupted_zero_tile_image_is_reported(constant_system):
    system = mutated(constant_system, images={3: [[3, 3], [3, 1]]})
    result = verify_substitution_structure(system, SpecialTileSets(frozenset({1}), 3))
    assert not result.passed
    assert result.coordinates == [3]
    assert "zero tile" in result.details

def test_corrupted_seeds(constant_system):
    with pytest.raises(ConfigurationError):
        mutated(constant_system, seeds={(0, 0): 2})

    # the zero tile is prolongable everywhere, so the system builds but row 0 changes
    system = mutated(constant_system, seeds={(0, 1): 3})
    assert (constant_system.decode(Region(0, 0, 1, 6)) == 1).all()
    assert not system.decode(Region(0, 0, 1, 6)).any()
    result = verify_row_structure(system, SpecialTileSets(frozenset({1}), 3), Region(-1, 1, -3, 3), samples=5)
    assert not result.passed
    assert result.coordinates == [(0, 1)]

def test_pattern_coding_needs_room(constant_system):
    with pytest.raises(VerificationError):
        check_pattern_coding(constant_system, Region(0, 0, 0, 0))

def test_ones_row(constant_system):
    assert ones_row(constant_system) == 1
    assert (constant_system.code(1)[ones_row(constant_system)] == 1).all()

def test_special_tile_sets_need_one_zero_code():
    system = TilingSystem({1: [[1, 1], [1, 1]]}, {(0, 0): 1}, {1: np.ones((3, 3))}, overlap=1)
    with pytest.raises(VerificationError):
        special_tile_sets(system, side=2)

def test_zero_rows_below_the_zeroth_row_are_reported(constant_system):
    # the constant wall is zero below row 0, so S' reaches the positive rows
    sets = SpecialTileSets(frozenset({1}), 3)
    result = verify_substitution_structure(constant_system, sets)
    assert not result.passed
    assert result.coordinates == [2]

    result = verify_row_structure(constant_system, sets, Region(-3, 3, -3, 3), samples=20)
    assert not result.passed
    assert result.coordinates == [(2, -3)]
    with pytest.raises(VerificationError):
        verify_row_structure(constant_system, sets, Region(0, 3, -3, 3))

def test_certificate_aggregates_obligations():
    certificate = Certificate("const1")
    assert not certificate.passed
    certificate.add(ObligationResult("closure", True, "ok"))
    assert certificate.passed
    certificate.add(ObligationResult("consistency", False, "mismatch", [(0, 1)]))
    assert not certificate.passed
    data = json.loads(certificate.to_json())
    assert data["status"] == "FAIL"
    assert data["obligations"]["consistency"]["coordinates"] == [[0, 1]]

def test_conjecture_scan_is_labelled_empirical():
    report = scan_conjecture(moduli=(5,), size=30, kinds=(SequenceKind.PAGODA,))
    assert report["label"] == "EMPIRICAL"
    assert report["size"] == 30
    assert list(report["results"]) == ["pagoda"]
    assert report["results"]["pagoda"][5] >= 1
