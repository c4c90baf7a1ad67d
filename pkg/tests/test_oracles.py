import pytest

from lifelab import engine, oracles
from lifelab.engine import CONWAY, Grid, Region
from lifelab.oracles import (
    NoPeriod,
    Placement,
    SearchSpec,
    classify_collision,
    detect_emission_period,
    detect_period,
    glider_shapes,
    residue_name,
    search_reactions,
    track_gliders,
)
from lifelab.patterns import Pattern, Transform, apply_transform, builtin, place


def test_detect_period_blinker():
    rep = detect_period(builtin("blinker"))
    assert rep.period == 2 and rep.displacement == (0, 0)
    assert not rep.is_spaceship


def test_detect_period_block():
    rep = detect_period(builtin("block"))
    assert rep.is_still_life


def test_detect_period_glider():
    rep = detect_period(builtin("glider"))
    assert rep.period == 4 and rep.displacement == (1, 1)
    assert rep.is_spaceship


def test_detect_period_phase_invariance():
    g = place(Grid.empty(30, 30), Placement(builtin("glider"), (12, 12)))
    for k in range(1, 4):
        g = engine.step(g, CONWAY)
        cells = g.live_cells()
        x0 = min(x for x, _ in cells)
        y0 = min(y for _, y in cells)
        p = Pattern(frozenset((x - x0, y - y0) for x, y in cells))
        assert detect_period(p).period == 4


def test_detect_period_failure():
    # r-pentomino does not repeat within a short horizon
    r = Pattern(frozenset({(1, 0), (2, 0), (0, 1), (1, 1), (1, 2)}))
    with pytest.raises(NoPeriod):
        detect_period(r, max_gens=30)


def test_glider_templates_distinct():
    shapes = glider_shapes()
    assert len(shapes) == 16  # 4 headings x 4 phases, all distinct


def test_track_empty():
    assert track_gliders(Grid.empty(10, 10)) == []


def test_track_placed_gliders_all_headings():
    for heading, t in oracles.HEADING_TRANSFORM.items():
        g = place(Grid.empty(30, 30), Placement(builtin("glider"), (13, 13), t))
        sightings = track_gliders(g)
        assert len(sightings) == 1
        assert sightings[0].heading == heading
        assert sightings[0].phase == 0


def test_track_lone_glider_phase_follows_generation():
    g = place(Grid.empty(60, 60), Placement(builtin("glider"), (5, 5)))
    for n in range(1, 40):
        g = engine.step(g, CONWAY)
        (s,) = track_gliders(g)
        assert s.heading == "SE"
        assert s.phase == n % 4
    # diagonal displacement: after 36 gens bbox origin advanced by (9, 9)
    g2 = place(Grid.empty(60, 60), Placement(builtin("glider"), (5, 5)))
    s0 = track_gliders(g2)[0]
    assert s.position == (s0.position[0] + 9 + 1, s0.position[1] + 9 + 1) or s.position[0] - s0.position[0] in (9, 10)


def test_track_ignores_debris():
    g = place(Grid.empty(30, 30), Placement(builtin("glider"), (5, 5)))
    g = place(g, Placement(builtin("block"), (20, 20)))
    g = place(g, Placement(builtin("blinker"), (24, 5)))
    sightings = track_gliders(g)
    assert len(sightings) == 1


def test_track_region_restriction():
    g = place(Grid.empty(40, 40), Placement(builtin("glider"), (5, 5)))
    assert track_gliders(g, Region(20, 20, 39, 39)) == []


def test_gosper_emission_period():
    assert detect_emission_period(builtin("gosper_gun")) == 30


def test_emission_error_for_non_gun():
    with pytest.raises(NoPeriod):
        detect_emission_period(builtin("blinker"), horizon=200)


def test_gosper_downstream_sightings():
    # 5 emissions in 150 gens; 4 gliders have cleared the gun area, the
    # newest is still forming inside it
    gun = builtin("gosper_gun")
    g = Grid.empty(150, 150)
    g = place(g, Placement(gun, (10, 10)))
    g = engine.step_n(g, CONWAY, 150)
    corridor = Region(0, 25, 149, 149)
    sightings = track_gliders(g, corridor)
    assert len(sightings) == 4
    assert all(s.heading == "SE" for s in sightings)
    diag = sorted(s.position[0] + s.position[1] for s in sightings)
    gaps = {b - a for a, b in zip(diag, diag[1:])}
    assert gaps == {15}  # half a cell per generation along the diagonal


def test_residue_names():
    assert residue_name(builtin("block").cells) == "block"
    assert residue_name(builtin("blinker").cells) == "blinker"
    assert residue_name({(0, 0), (1, 0), (0, 1)}) is None


def test_classify_miss_is_mess():
    # a glider that sails past a block leaves the block and departs
    out = classify_collision(
        Placement(builtin("block"), (0, 0)),
        Placement(builtin("glider"), (14, 0), oracles.HEADING_TRANSFORM["SE"]),
        horizon=300,
    )
    assert out.kind == "Mess"


def test_search_empty_window_ok():
    spec = SearchSpec(
        target=builtin("block"),
        projectile_heading="SE",
        offsets=Region(0, 0, 1, 1),  # overlapping/adjacent: all skipped
        want_kind="Reflection",
        horizon=150,
    )
    assert search_reactions(spec) == []
