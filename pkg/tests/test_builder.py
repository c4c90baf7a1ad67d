"""Gun characterization and frozen-configuration sanity checks.

Rebuilding a configuration from scratch takes ~30 s, so the full
pipeline is exercised indirectly: the frozen asset must satisfy every
geometric invariant the builder promises.
"""

import numpy as np

from lifelab.builder import GUN_ROTATION, characterize_gun
from lifelab.cli import load_builtin_config
from lifelab.engine import CONWAY, Grid, grid_hash, step
from lifelab.oracles import HEADING_STEP, track_gliders
from lifelab.patterns import builtin, placement_cells


def test_characterize_gun_all_headings():
    gun = builtin("p92_gun")
    for heading in ("SW", "NW", "NE", "SE"):
        si = characterize_gun(gun, heading)
        assert si.heading == heading
        assert si.period == 92
        assert si.transform.rotation == GUN_ROTATION[heading]
        assert sorted(si.ref_phases) == [0, 1, 2, 3]
        hx, hy = HEADING_STEP[heading]
        # consecutive refs advance one generation; positions move along
        # the heading by at most one cell per generation
        for a, b in zip(si.ref_positions, si.ref_positions[1:]):
            assert abs(b[0] - a[0]) <= 1 and abs(b[1] - a[1]) <= 1
        for cells in si.ref_cells:
            assert len(cells) == 5


def test_stream_prediction_matches_simulation():
    gun = builtin("p92_gun")
    si = characterize_gun(gun, "SE")
    base = (30, 30)
    grid = Grid.from_cells(
        320, 320, placement_cells(320, 320, _gun_placement(si, base))
    )
    for _ in range(si.ref_gen):
        grid = step(grid, CONWAY)
    live = grid.live_cells()
    lead = {(base[0] + dx, base[1] + dy) for dx, dy in si.ref_cells[0]}
    assert lead <= live
    # one full period later the next glider occupies the same reference
    # cells, and the previous one has moved 23 diagonal steps outward
    for _ in range(si.period):
        grid = step(grid, CONWAY)
    live = grid.live_cells()
    hx, hy = HEADING_STEP[si.heading]
    moved = {(x + 23 * hx, y + 23 * hy) for x, y in lead}
    assert lead <= live and moved <= live


def _gun_placement(si, base):
    from lifelab.patterns import Placement

    return Placement(builtin("p92_gun"), base, si.transform)




def test_frozen_config_geometry():
    cfg = load_builtin_config()
    assert (cfg.width, cfg.height) == (420, 200)
    assert cfg.gun_period == 92
    assert cfg.activation_travel > 0
    for name in ("primary", "backup"):
        s = cfg.section(name)
        cp = s.collision_point
        assert s.region.contains(*cp)
        assert cfg.corridor_region.contains(*cp)
        assert s.sentinel.x1 - s.sentinel.x0 == 2
        # boat and passive blinker sit behind the collision point, inside
        # the section
        own = placement_cells(cfg.width, cfg.height, s.reflector, cfg.rule)
        seed = placement_cells(cfg.width, cfg.height, s.passive_blinker, cfg.rule)
        for x, y in own | seed:
            assert s.region.contains(x, y)
        for x, y in seed:
            assert s.blinker_site.contains(x, y)
    assert cfg.primary.trigger_glider is not None
    assert cfg.backup.trigger_glider is None


def test_standby_cells_exclude_trigger():
    cfg = load_builtin_config()
    trig = placement_cells(
        cfg.width, cfg.height, cfg.primary.trigger_glider, cfg.rule
    )
    standby = cfg.standby_cells("primary")
    assert not (trig & standby)
    assert trig <= cfg.init_cells()


def test_init_cells_are_period_92_after_warmup():
    cfg = load_builtin_config()
    grid = Grid.from_cells(cfg.width, cfg.height, cfg.init_cells())
    for _ in range(6 * 92):
        grid = step(grid, CONWAY)
    h0 = grid_hash(grid)
    for _ in range(92):
        grid = step(grid, CONWAY)
    assert grid_hash(grid) == h0
