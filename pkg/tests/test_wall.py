import io

import numpy as np
import pytest
from PIL import Image

from numwall.core.constants import FrameCase, SAMPLE_WALL_REGION
from numwall.core.exceptions import ConfigurationError, RegionError, SequenceDomainError, WallBuildError
from numwall.core.utils import Region
from numwall.models.field import Modulus
from numwall.models.sequences import SequenceSource
from numwall.models.wall import (
    WallBuilder, WallSegment, build, default_palette, grayscale, load_csv, oracle_entry, render,
    save_csv, save_image, write_csv_rows,
)

def _assert_matches_oracle(source, wall):
    for m in range(0, wall.m_hi + 1):
        for n in range(wall.n_lo, wall.n_hi + 1):
            assert wall.entry(m, n) == int(oracle_entry(source, m, n)), f"S_({m},{n})"

@pytest.mark.parametrize("p", [2, 3, 5])
def test_builder_matches_toeplitz_oracle(p, random_source):
    for seed in range(4):
        source = random_source(p, -40, 40, seed)
        wall = build(source, 12, -20, 20)
        _assert_matches_oracle(source, wall)

@pytest.mark.slow
@pytest.mark.parametrize("p", [2, 3, 5])
def test_builder_matches_toeplitz_oracle_at_scale(p, random_source):
    for seed in range(50):
        source = random_source(p, -200, 200, seed)
        wall = build(source, 59, -60, 59)
        _assert_matches_oracle(source, wall)

def test_paper_folding_sample_window(f3):
    source = SequenceSource.paper_folding(f3)
    m_lo, m_hi, n_lo, n_hi = SAMPLE_WALL_REGION
    wall = build(source, m_hi, n_lo, n_hi, m_lo)
    assert wall.region == Region(m_lo, m_hi, n_lo, n_hi)
    assert (wall.row(-2) == 0).all() and (wall.row(-1) == 1).all()
    assert np.array_equal(wall.row(0), source.segment(n_lo, n_hi))
    assert wall.window(Region(0, 2, 0, 2)).tolist() == [[0, 0, 0]] * 3
    for m, n in [(5, 0), (17, -30), (39, 41), (25, 3)]:
        assert wall.entry(m, n) == int(oracle_entry(source, m, n))

def test_constant_wall_is_one_infinite_window(f3):
    wall = build(SequenceSource.constant(1, f3), 10, -5, 5)
    assert (wall.row(0) == 1).all()
    assert not wall.window(Region(1, 10, -5, 5)).any()

def test_case_counts_cover_every_rule(f3):
    builder = WallBuilder(SequenceSource.paper_folding(f3), 39, -41, 41)
    builder.build()
    for case in (FrameCase.SENTINEL, FrameCase.SEQUENCE, FrameCase.CROSS, FrameCase.WINDOW,
                 FrameCase.INNER, FrameCase.OUTER):
        assert builder.case_counts[case] > 0, case

def test_cross_identity_holds(random_source):
    wall = build(random_source(7, -40, 40, 3), 15, -20, 20)
    g = wall.grid.astype(np.int64)
    centre, above, below = g[1:-1, 1:-1], g[:-2, 1:-1], g[2:, 1:-1]
    left, right = g[1:-1, :-2], g[1:-1, 2:]
    assert not ((centre ** 2 - above * below - left * right) % 7).any()

def test_frame_laws_hold_on_every_window(f3):
    wall = build(SequenceSource.paper_folding(f3), 39, -41, 41)
    zero = wall.window(Region(0, 39, -41, 41)) == 0
    checked = 0
    for i, j in np.argwhere(zero):
        m, n = int(i), -41 + int(j)
        if (m > 0 and wall.entry(m - 1, n) == 0) or (n > -41 and wall.entry(m, n - 1) == 0):
            continue
        side = int(np.argmin(np.append(zero[i, j:], False)))
        if m < 2 or n - 2 < -41 or n + side + 1 > 41 or m + side + 1 > 39:
            continue
        state = wall.frame_state(m, n, side)
        assert state.law_failures(f3) == [], (m, n)
        checked += 1
    assert checked > 0

def test_short_history_raises(f3):
    builder = WallBuilder(SequenceSource.paper_folding(f3), 40, -10, 10, history=1)
    with pytest.raises(WallBuildError):
        for _ in builder.iter_rows():
            pass

def test_streamed_rows_match_the_built_wall(f3):
    source = SequenceSource.pagoda(f3)
    wall = build(source, 20, -10, 10, prune=False)
    builder = WallBuilder(source, 20, -10, 10, history=32)
    for m, row, (lo, hi) in builder.iter_rows():
        assert np.array_equal(row[lo:hi + 1], wall.grid[m - wall.m_lo, lo:hi + 1])

def test_bad_parameters(f3):
    source = SequenceSource.paper_folding(f3)
    with pytest.raises(ConfigurationError):
        WallBuilder(source, 10, 0, 5, m_lo=0)
    with pytest.raises(ConfigurationError):
        WallBuilder(source, 10, 5, 0)
    with pytest.raises(SequenceDomainError):
        WallBuilder(SequenceSource.thue_morse(Modulus(2)), 10, 0, 5)

def test_unpruned_wall_flags_the_cone(f3):
    wall = build(SequenceSource.paper_folding(f3), 5, 0, 4, prune=False)
    assert wall.n_lo == -5 and wall.n_hi == 9
    assert not wall.is_valid(5, -5) and wall.is_valid(5, 0)
    with pytest.raises(RegionError):
        wall.entry(5, -5)
    assert wall.pruned().region == Region(-2, 5, 0, 4)

def test_csv_round_trip(tmp_path, f3):
    wall = build(SequenceSource.paper_folding(f3), 8, -6, 6, prune=False)
    path = tmp_path / "wall.csv"
    save_csv(wall, path)
    loaded = load_csv(path)
    assert loaded.region == wall.region
    assert np.array_equal(loaded.valid, wall.valid)
    assert np.array_equal(loaded.grid[loaded.valid], wall.grid[wall.valid])
    assert path.read_text().splitlines()[0] == "wall p=3 mlo=-2 mhi=8 nlo=-14 nhi=14"

def test_csv_rows_writer(f3):
    handle = io.StringIO()
    write_csv_rows(handle, f3, 0, 1, 0, 2, [([1, 2, 0], [True, True, True]), ([0, 0, 0], [False, True, False])])
    assert handle.getvalue() == "wall p=3 mlo=0 mhi=1 nlo=0 nhi=2\n1,2,0\n.,0,.\n"

def test_plain_pgm_render(f3):
    wall = WallSegment(f3, 0, 0, [[0, 1], [2, 0]])
    text = render(wall).decode('ascii').split('\n')
    assert text[:3] == ["P2", "2 2", "255"]
    palette = default_palette(f3)
    assert text[3] == f"0 {palette[1]}"
    assert text[4] == f"{palette[2]} 0"

def test_palette_validation(f3):
    wall = WallSegment(f3, 0, 0, [[0, 1]])
    with pytest.raises(ConfigurationError):
        grayscale(wall, {0: 0, 1: 255})
    with pytest.raises(ConfigurationError):
        grayscale(wall, {0: 0, 1: 300, 2: 10})

def test_pillow_image(tmp_path, f3):
    wall = build(SequenceSource.paper_folding(f3), 10, -10, 10)
    path = tmp_path / "wall.png"
    save_image(wall, path, scale=2)
    with Image.open(path) as image:
        assert image.size == (42, 26)
        assert image.mode == 'L'
        assert image.getpixel((0, 0)) == 0
