import numpy as np
import pytest

from numwall.core.constants import CenteringMode
from numwall.core.exceptions import ConfigurationError, RegionError
from numwall.core.utils import Region
from numwall.models.sequences import thue_morse_bits
from numwall.models.tiling import (
    TilingSystem, centering_offset, closure_regions, cover_size, enumerate_patterns, load_system,
    prolongation_cell, read_codes, read_tetrads, two_pattern_closure, write_codes, write_tetrads,
)

def thue_morse_system():
    images = {0: [[0, 1], [1, 0]], 1: [[1, 0], [0, 1]]}
    return TilingSystem(images, {(1, 1): 0})

def test_prolongation_cells():
    assert prolongation_cell((0, 0), 2) == (1, 1)
    assert prolongation_cell((1, 1), 2) == (0, 0)
    assert prolongation_cell((0, 1), 3) == (2, 0)

def test_centering_offset():
    assert centering_offset(13, 5) == 4
    assert centering_offset(3, 1) == 2

def test_thue_morse_square():
    system = thue_morse_system()
    tiles = system.expand(Region(1, 8, 1, 8))
    t = thue_morse_bits(np.arange(8))
    assert np.array_equal(tiles, t[:, None] ^ t[None, :])
    assert system.tile_at(5, 7) == int(t[4] ^ t[6])
    assert system.ancestors(5, 7) == [(5, 7), (3, 4), (2, 2), (1, 1)]

def test_expanding_without_a_seed_raises():
    with pytest.raises(ConfigurationError):
        thue_morse_system().expand(Region(-2, 2, 1, 2))

def test_expand_is_a_fixed_point(constant_system):
    tiles = constant_system.expand(Region(-6, 9, -8, 7))
    parents = constant_system.expand(Region(-3, 5, -4, 4))
    assert np.array_equal(constant_system.substitute(parents)[1:-1, 1:-1], tiles)

def test_substitute_shape(constant_system):
    image = constant_system.substitute([[1, 2]])
    assert image.tolist() == [[3, 3, 2, 2], [1, 1, 3, 3]]

def test_invalid_systems():
    with pytest.raises(ConfigurationError):
        TilingSystem({0: [[0, 1], [1, 0]]}, {(1, 1): 0})
    with pytest.raises(ConfigurationError):
        TilingSystem({0: [[1, 0], [0, 0]], 1: [[1, 1], [1, 1]]}, {(0, 0): 1, (1, 1): 0})
    with pytest.raises(ConfigurationError):
        TilingSystem({0: [[0, 0], [0, 0]]}, {(1, 1): 0}, {0: np.zeros((3, 3))}, overlap=3)
    with pytest.raises(ConfigurationError):
        TilingSystem({0: [[0, 0], [0, 0]]}, {(1, 1): 0}, {0: np.zeros((4, 4))}, overlap=1,
                     mode=CenteringMode.CENTERED)

def test_decode_reproduces_the_constant_wall(constant_system):
    values = constant_system.decode(Region(-10, 20, -20, 20))
    expected = np.zeros((31, 41), dtype=np.int64)
    expected[-1 + 10] = 1
    expected[0 + 10] = 1
    assert np.array_equal(values, expected)

def test_code_pattern_matches_decode(constant_system):
    pattern = constant_system.expand(Region(0, 1, 0, 1))
    assert np.array_equal(constant_system.code_pattern(pattern), constant_system.decode(Region(-1, 2, -1, 2)))
    full = constant_system.code_pattern(pattern, full=True)
    assert full.shape == (5, 5)
    assert full[:, 0].tolist() == [0, 1, 1, 0, 0]

def test_consistency(constant_system):
    ok, violation = constant_system.check_consistency(Region(-5, 5, -5, 5))
    assert ok and violation is None

    codes = {tile: constant_system.code(tile).copy() for tile in constant_system.alphabet}
    codes[2][0, 1] = 2
    broken = TilingSystem({t: constant_system.image(t) for t in constant_system.alphabet},
                          constant_system.seeds, codes, overlap=1, mode=CenteringMode.CENTERED)
    ok, violation = broken.check_consistency(Region(-5, 5, -5, 5))
    assert not ok
    assert violation["axis"] == "column"
    assert violation["tiles"] == (1, 2)
    assert violation["tile"][0] == 0 and violation["neighbour"][0] == 1

def test_enumerate_patterns():
    grid = np.array([[1, 2, 1], [2, 1, 2]])
    assert enumerate_patterns(grid, 2) == {(1, 2, 2, 1), (2, 1, 1, 2)}
    with pytest.raises(RegionError):
        enumerate_patterns(grid, 3)

def test_two_pattern_closure(constant_system):
    assert two_pattern_closure(constant_system, (-3, -5), (4, 4))
    system = TilingSystem({0: [[0, 0], [0, 1]], 1: [[1, 1], [1, 1]]},
                          {(0, 0): 1, (0, 1): 0, (1, 0): 0, (1, 1): 0})
    assert not two_pattern_closure(system, (-1, -1), (1, 1))

def test_closure_regions():
    small, big = closure_regions((-4, -326), (149, 325), 2)
    assert small == Region(-3, 149, -325, 325)
    assert big == Region(-7, 298, -651, 650)
    with pytest.raises(ConfigurationError):
        closure_regions((0, -1), (1, 1), 2)

def test_cover_size():
    assert cover_size(13, 5, 1) == 1
    assert cover_size(13, 5, 6) == 1
    assert cover_size(13, 5, 7) == 2
    assert cover_size(13, 5, 14) == 2
    assert cover_size(13, 5, 15) == 3
    with pytest.raises(ConfigurationError):
        cover_size(5, 5, 1)

def test_codes_and_tetrads_files(tmp_path, constant_system):
    codes_path, tetrads_path = tmp_path / "codes.txt", tmp_path / "tetrads.txt"
    write_codes(codes_path, {t: constant_system.code(t) for t in constant_system.alphabet})
    write_tetrads(tetrads_path, {t: constant_system.image(t) for t in constant_system.alphabet}, [(1, 1, 2, 2)])

    assert codes_path.read_text().splitlines()[:4] == ["tile 1", "000", "111", "111"]
    assert tetrads_path.read_text().splitlines() == [
        "tile 1: 3 3 / 1 1", "tile 2: 2 2 / 3 3", "tile 3: 3 3 / 3 3", "pattern 4: 1 1 / 2 2"]

    codes = read_codes(codes_path)
    assert np.array_equal(codes[2], constant_system.code(2))
    images, extra = read_tetrads(tetrads_path)
    assert images[1] == ((3, 3), (1, 1)) and extra == [(1, 1, 2, 2)]

    system = load_system(codes_path, tetrads_path, constant_system.seeds, overlap=1)
    assert np.array_equal(system.decode(Region(-4, 4, -4, 4)), constant_system.decode(Region(-4, 4, -4, 4)))
