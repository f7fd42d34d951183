import json
from fractions import Fraction

import numpy as np
import pytest

from numwall.core.exceptions import ConfigurationError, DiscoveryError, RegionError
from numwall.core.utils import Region, ceil_div
from numwall.models.field import Modulus
from numwall.models.sequences import SequenceSource
from numwall.models.wall import WallSegment, build
from numwall.controllers.discovery import (
    DiscoveryParams, canonical_order, delta_key, discover, verify_initial_conditions,
)

from conftest import A_TILE_CODE, B_TILE_CODE, ZERO_TILE_CODE

SMALL = dict(a=-10, b=20, c=-20, d=20, k=2, tel=2, cid=2)

@pytest.fixture(scope="module")
def constant_wall():
    return build(SequenceSource.constant(1, Modulus(3)), 20, -20, 20, m_lo=-10)

@pytest.fixture(scope="module")
def raw_result(constant_wall):
    return discover(constant_wall, DiscoveryParams(**SMALL))

def test_params_geometry():
    params = DiscoveryParams(**SMALL)
    assert (params.l, params.r, params.offset) == (3, 1, 1)
    assert params.min_top_row == -10
    assert params.block_origin(0) == -2
    assert params.block_center(1) == 1
    assert params.closure_bounds() == ((-3, -5), (4, 4))
    assert params.lattice_bounds() == ((-5, -9), (9, 9))

def test_params_validation():
    with pytest.raises(ConfigurationError):
        DiscoveryParams(**dict(SMALL, tel=3))
    with pytest.raises(ConfigurationError):
        DiscoveryParams(**dict(SMALL, a=-9))
    with pytest.raises(ConfigurationError):
        DiscoveryParams(**dict(SMALL, cid=4))
    with pytest.raises(ConfigurationError):
        DiscoveryParams(**dict(SMALL, k=1))
    with pytest.raises(ConfigurationError):
        DiscoveryParams(**dict(SMALL, b=3)).closure_bounds()

def test_lexicographic_numbering(raw_result):
    assert raw_result.tile_count == 3
    assert not raw_result.canonical
    assert np.array_equal(raw_result.codes[1], ZERO_TILE_CODE)
    assert np.array_equal(raw_result.codes[2], A_TILE_CODE)
    assert np.array_equal(raw_result.codes[3], B_TILE_CODE)
    assert raw_result.lattice_origin == (-5, -9)
    assert raw_result.lattice.shape == (15, 19)

def test_canonical_system(raw_result):
    result = canonical_order(raw_result)
    assert result.canonical
    assert np.array_equal(result.codes[1], A_TILE_CODE)
    assert np.array_equal(result.codes[2], B_TILE_CODE)
    assert np.array_equal(result.codes[3], ZERO_TILE_CODE)
    assert result.images[1].tolist() == [[3, 3], [1, 1]]
    assert result.images[2].tolist() == [[2, 2], [3, 3]]
    assert result.images[3].tolist() == [[3, 3], [3, 3]]
    assert result.seeds == {(0, 0): 1, (0, 1): 1, (1, 0): 2, (1, 1): 2}
    assert not verify_initial_conditions(result)

    assert result.tetrads == [(3, 3, 1, 1), (2, 2, 3, 3), (3, 3, 3, 3), (1, 1, 2, 2)]
    assert result.tile_at(0, 5) == 1
    assert result.tile_at(1, -9) == 2
    assert result.deltas[1] < result.deltas[2] < result.deltas[3]
    assert result.deltas[1] == Fraction(23959, 12000)

def test_discovered_system_decodes_to_the_wall(raw_result, constant_wall):
    system = canonical_order(raw_result).to_system()
    region = Region(-10, 20, -20, 20)
    assert np.array_equal(system.decode(region), constant_wall.window(region).astype(np.int64))

def test_write_outputs(tmp_path, raw_result):
    paths = canonical_order(raw_result).write_outputs(str(tmp_path))
    assert open(paths["codes"]).read().splitlines()[:4] == ["tile 1", "000", "111", "111"]
    assert open(paths["tetrads"]).read().splitlines()[-1] == "pattern 4: 1 1 / 2 2"
    with open(paths["summary"]) as f:
        summary = json.load(f)
    assert summary["tiles"] == 3
    assert summary["tetrads"] == 4
    assert summary["seeds"] == {"0,0": 1, "0,1": 1, "1,0": 2, "1,1": 2}
    assert summary["closure_region"] == {"lower": [-3, -5], "upper": [4, 4]}

def test_contradiction_is_reported():
    grid = np.zeros((31, 41), dtype=np.uint8)
    grid[3 + 10, 3 + 20] = 1
    wall = WallSegment(Modulus(3), -10, -20, grid)
    with pytest.raises(DiscoveryError) as info:
        discover(wall, DiscoveryParams(**SMALL))
    assert info.value.stage == "substitution"
    assert (1, 1) in info.value.coordinates

def test_wall_must_cover_the_region(constant_wall):
    with pytest.raises(RegionError):
        discover(constant_wall, DiscoveryParams(**dict(SMALL, d=30)))

def test_delta_key_order():
    # ℓ1 distance first, then row, then column
    keys = [delta_key(m, n, 30, 40) for m, n in [(0, 0), (-1, 0), (0, -1), (0, 1), (1, 0), (-2, 0)]]
    assert keys == sorted(keys)
    assert delta_key(-1, -1, 30, 40) == 23959

@pytest.mark.parametrize("tel, cid", [(6, 4), (4, 2), (12, 8)])
def test_lattice_blocks_fit_the_wall(tel, cid):
    params = DiscoveryParams(a=-ceil_div(5 * (tel + cid), 2), b=800, c=-1700, d=1700, tel=tel, cid=cid)
    (first_row, first_col), (last_row, last_col) = params.lattice_bounds()
    lower, upper = params.closure_bounds()
    assert params.block_origin(first_col) >= params.c
    assert params.block_origin(last_col) + params.tel <= params.d
    assert params.block_origin(last_row) + params.tel <= params.b
    assert first_row <= params.k * lower[0] + 1 and first_col <= params.k * lower[1] + 1
    assert last_row >= params.k * upper[0] and last_col >= params.k * upper[1]

def test_closure_bounds_respect_the_block_offset():
    params = DiscoveryParams(a=-25, b=800, c=-1700, d=1700, tel=6, cid=4)
    assert params.closure_bounds() == ((-3, -212), (99, 212))

def test_reference_bounds():
    params = DiscoveryParams(-55, 2400, -5220, 5220)
    assert params.closure_bounds() == ((-4, -326), (149, 325))
    assert params.lattice_bounds() == ((-7, -651), (299, 651))

def test_tight_columns_discover(constant_wall):
    result = discover(constant_wall, DiscoveryParams(**dict(SMALL, c=-19)))
    assert result.lower == (-3, -4)
    assert result.params.block_origin(result.lattice_origin[1]) >= -19

def test_discrepancy_past_the_enlarged_region_breaks_closure():
    grid = np.zeros((31, 41), dtype=np.uint8)
    grid[18 + 10, 0 + 20] = 1
    wall = WallSegment(Modulus(3), -10, -20, grid)
    with pytest.raises(DiscoveryError) as info:
        discover(wall, DiscoveryParams(**SMALL))
    assert info.value.stage == "closure"
    assert info.value.coordinates == [(8, -1)]
