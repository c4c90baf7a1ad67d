"""Behavioral analysis of patterns: periods, glider tracking, collisions.

These are the measurement instruments of the laboratory. Everything here
works by direct simulation on generously sized scratch grids, so results
are certificates: re-running a recorded reaction reproduces its outcome.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy import ndimage

from . import engine
from .engine import CONWAY, Grid, Region, Rule
from .patterns import (
    Pattern,
    Placement,
    PlacementError,
    Transform,
    apply_transform,
    builtin,
    emit_rle,
    parse_rle,
    place,
)

Coord = tuple[int, int]

HEADINGS = ("SE", "SW", "NE", "NW")

#: Transform taking the canonical SE-heading glider to each heading.
HEADING_TRANSFORM = {
    "SE": Transform(0, False),
    "SW": Transform(0, True),
    "NE": Transform(2, True),
    "NW": Transform(2, False),
}

#: Unit step of each heading, one cell per period quarter.
HEADING_STEP = {"SE": (1, 1), "SW": (-1, 1), "NE": (1, -1), "NW": (-1, -1)}


class BoundaryContact(RuntimeError):
    """A pattern under analysis reached the scratch-grid edge."""


class NoPeriod(RuntimeError):
    pass


class SettleError(RuntimeError):
    """A collision failed to settle within the horizon."""


@dataclass(frozen=True)
class OscillatorReport:
    period: int
    displacement: Coord

    @property
    def is_still_life(self) -> bool:
        return self.period == 1 and self.displacement == (0, 0)

    @property
    def is_spaceship(self) -> bool:
        return self.displacement != (0, 0)


@dataclass(frozen=True)
class GliderSighting:
    position: Coord  # bounding-box origin, absolute grid coordinates
    heading: str
    phase: int
    generation: int


@dataclass(frozen=True)
class CollisionOutcome:
    kind: str  # Annihilation | Reflection | Transformation | Mess
    residue: Pattern
    settle_generation: int
    residue_heading: str | None = None
    residue_name: str | None = None


@dataclass(frozen=True)
class SearchSpec:
    """Exhaustive glider-vs-target collision search space."""

    target: Pattern
    projectile_heading: str
    offsets: Region  # lattice offsets of projectile origin rel. target origin
    phases: tuple[int, ...] = (0, 1, 2, 3)
    horizon: int = 400
    want_kind: str = "Annihilation"
    want_residue: str | None = None
    want_heading: str | None = None


# -- scratch grid helpers -----------------------------------------------


def _bbox(cells) -> tuple[int, int, int, int]:
    xs = [x for x, _ in cells]
    ys = [y for _, y in cells]
    return min(xs), min(ys), max(xs), max(ys)


def scratch_for(p: Pattern, travel: int) -> Grid:
    """Empty grid sized 4x the pattern extent plus a travel margin."""
    side = 4 * max(p.width, p.height, 1) + 2 * travel
    return Grid.empty(side, side)


def _assert_inside(grid: Grid):
    a = grid.array
    if a[0, :].any() or a[-1, :].any() or a[:, 0].any() or a[:, -1].any():
        raise BoundaryContact("pattern reached the scratch-grid boundary")


# -- period / displacement ----------------------------------------------


def detect_period(p: Pattern, rule: Rule = CONWAY, max_gens: int = 64) -> OscillatorReport:
    """Smallest t >= 1 with generation-t cells a translate of generation 0."""
    if not p.cells:
        raise NoPeriod("empty pattern has no period")
    g = scratch_for(p, max_gens + 2)
    ox = oy = g.width // 2 - max(p.width, p.height) // 2
    g = place(g, Placement(p, (ox, oy)), rule)
    ref = p.cells
    ref_origin = _bbox(g.live_cells())[:2]
    cur = g
    for t in range(1, max_gens + 1):
        cur = engine.step(cur, rule)
        _assert_inside(cur)
        cells = cur.live_cells()
        if not cells:
            raise NoPeriod("pattern died out")
        x0, y0, _, _ = _bbox(cells)
        if frozenset((x - x0, y - y0) for x, y in cells) == ref:
            return OscillatorReport(t, (x0 - ref_origin[0], y0 - ref_origin[1]))
    raise NoPeriod(f"no period within {max_gens} generations")


# -- glider templates and tracking ----------------------------------------


def _glider_phase_shapes() -> dict[frozenset[Coord], tuple[str, int]]:
    shapes: dict[frozenset[Coord], tuple[str, int]] = {}
    base = builtin("glider")
    g = place(Grid.empty(16, 16), Placement(base, (6, 6)))
    for phase in range(4):
        cells = g.live_cells()
        x0, y0, _, _ = _bbox(cells)
        norm = frozenset((x - x0, y - y0) for x, y in cells)
        for heading, t in HEADING_TRANSFORM.items():
            shape = apply_transform(Pattern(norm), t).cells
            key = (heading, phase)
            prior = shapes.get(shape)
            assert prior is None or prior == key, "ambiguous glider template"
            shapes[shape] = key
        g = engine.step(g, CONWAY)
    return shapes


_GLIDER_SHAPES: dict[frozenset[Coord], tuple[str, int]] | None = None


def glider_shapes() -> dict[frozenset[Coord], tuple[str, int]]:
    global _GLIDER_SHAPES
    if _GLIDER_SHAPES is None:
        _GLIDER_SHAPES = _glider_phase_shapes()
    return _GLIDER_SHAPES


_LABEL_STRUCTURE = np.ones((3, 3), dtype=int)


def track_gliders(grid: Grid, r: Region | None = None) -> list[GliderSighting]:
    """All maximal 5-cell groups in ``r`` exactly matching a glider template."""
    if r is None:
        r = Region(0, 0, grid.width - 1, grid.height - 1)
    sub = grid.array[r.y0 : r.y1 + 1, r.x0 : r.x1 + 1]
    if not sub.any():
        return []
    shapes = glider_shapes()
    labels, n = ndimage.label(sub, structure=_LABEL_STRUCTURE)
    out = []
    slices = ndimage.find_objects(labels)
    for k, sl in enumerate(slices, start=1):
        ys, xs = np.nonzero(labels[sl] == k)
        if len(xs) != 5:
            continue
        shape = frozenset(zip((xs - xs.min()).tolist(), (ys - ys.min()).tolist()))
        hit = shapes.get(shape)
        if hit is None:
            continue
        heading, phase = hit
        pos = (r.x0 + sl[1].start + int(xs.min()), r.y0 + sl[0].start + int(ys.min()))
        out.append(GliderSighting(pos, heading, phase, grid.generation))
    out.sort(key=lambda s: (s.position[1], s.position[0]))
    return out


# -- emission period ------------------------------------------------------


def detect_emission_period(
    gun: Pattern,
    rule: Rule = CONWAY,
    sentinel_offset: int = 20,
    horizon: int = 700,
) -> int:
    """Constant inter-arrival gap of glider crossings past a sentinel radius.

    The sentinel is the Chebyshev distance ``sentinel_offset`` from the
    gun's bounding box; a crossing is a glider newly appearing in the
    band [offset, offset + 3]. Gaps must be constant after a warm-up of
    two emissions.
    """
    g = scratch_for(gun, horizon // 4 + sentinel_offset + 24)
    ox = oy = (g.width - max(gun.width, gun.height)) // 2
    g = place(g, Placement(gun, (ox, oy)), rule)
    gx0, gy0, gx1, gy1 = _bbox(g.live_cells())

    def band_distance(pos: Coord) -> int:
        x, y = pos
        dx = max(gx0 - x, 0, x - gx1)
        dy = max(gy0 - y, 0, y - gy1)
        return max(dx, dy)

    crossings: list[int] = []
    prev_band: set[Coord] = set()
    for _ in range(horizon):
        g = engine.step(g, rule)
        band = {
            s.position
            for s in track_gliders(g)
            if sentinel_offset <= band_distance(s.position) <= sentinel_offset + 3
        }
        fresh = {
            p
            for p in band
            if not any(abs(p[0] - q[0]) <= 1 and abs(p[1] - q[1]) <= 1 for q in prev_band)
        }
        if fresh:
            crossings.append(g.generation)
        prev_band = band
    if len(crossings) < 4:
        raise NoPeriod(
            f"only {len(crossings)} sentinel crossings within {horizon} generations"
        )
    gaps = [b - a for a, b in zip(crossings, crossings[1:])]
    steady = gaps[2:]
    if len(set(steady)) != 1:
        raise NoPeriod(f"non-constant emission gaps {gaps}")
    return steady[0]


# -- named residues --------------------------------------------------------

_NAMED_STILLS = {
    "block": "2o$2o!",
    "tub": "bo$obo$bo!",
    "boat": "2o$obo$bo!",
    "ship": "2o$obo$b2o!",
    "barge": "bo$obo$bobo$2bo!",
    "beehive": "b2o$o2bo$b2o!",
    "loaf": "b2o$o2bo$bobo$2bo!",
    "pond": "b2o$o2bo$o2bo$b2o!",
    "eater1": "2o$bo$bobo$2b2o!",
    "long_boat": "2o$obo$bobo$2bo!",
    "snake": "2obo$ob2o!",
}
_NAMED_OSCILLATORS = {
    "blinker": "3o!",
    "toad": "b3o$3o!",
    "beacon": "2o$o$3bo$2b2o!",
}


def _orientation_shapes(p: Pattern) -> set[frozenset[Coord]]:
    return {
        apply_transform(p, Transform(rot, flip)).cells
        for rot in range(4)
        for flip in (False, True)
    }


def _named_residue_table() -> dict[frozenset[Coord], str]:
    table: dict[frozenset[Coord], str] = {}
    for name, rle in {**_NAMED_STILLS, **_NAMED_OSCILLATORS}.items():
        try:
            p = parse_rle(rle)
        except Exception:
            continue
        phases = [p]
        if name in _NAMED_OSCILLATORS:
            rep = detect_period(p, max_gens=16)
            g = place(scratch_for(p, 20), Placement(p, (20, 20)))
            for _ in range(rep.period - 1):
                g = engine.step(g, CONWAY)
                cells = g.live_cells()
                x0, y0, _, _ = _bbox(cells)
                phases.append(Pattern(frozenset((x - x0, y - y0) for x, y in cells)))
        for ph in phases:
            for shape in _orientation_shapes(ph):
                table.setdefault(shape, name)
    return table


_RESIDUE_TABLE: dict[frozenset[Coord], str] | None = None


def residue_name(cells) -> str | None:
    """Name of a residue if it matches a known small still life/oscillator."""
    global _RESIDUE_TABLE
    if _RESIDUE_TABLE is None:
        _RESIDUE_TABLE = _named_residue_table()
    if not cells:
        return None
    x0, y0, _, _ = _bbox(cells)
    norm = frozenset((x - x0, y - y0) for x, y in cells)
    return _RESIDUE_TABLE.get(norm)


# -- collision classification ---------------------------------------------

#: How far the interaction neighborhood extends beyond the initial bbox.
NEIGHBORHOOD_MARGIN = 12
#: Outbound gliders must be this clear of the neighborhood to count as departed.
DEPART_CLEARANCE = 10


def classify_collision(
    a: Placement,
    b: Placement,
    rule: Rule = CONWAY,
    horizon: int = 400,
) -> CollisionOutcome:
    """Simulate two placements on a shared scratch grid and classify.

    Settling criterion: the grid restricted to the interaction
    neighborhood (initial joint bounding box + margin) is empty, still,
    or periodic with period <= 4, every cell outside the neighborhood
    belongs to a glider, and all such gliders are at least 10 cells clear
    of the neighborhood and outbound.
    """
    margin = horizon // 4 + 16
    # re-anchor both placements on a scratch grid with uniform margin
    all_cells = set(
        apply_transform(a.pattern, a.transform).translated(*a.origin)
    ) | set(apply_transform(b.pattern, b.transform).translated(*b.origin))
    x0, y0, x1, y1 = _bbox(all_cells)
    side = max(x1 - x0, y1 - y0) + 2 * margin + 2
    shift = (margin - x0, margin - y0)
    g = Grid.empty(side, side)
    g = place(g, Placement(a.pattern, (a.origin[0] + shift[0], a.origin[1] + shift[1]), a.transform, a.phase), rule)
    g = place(g, Placement(b.pattern, (b.origin[0] + shift[0], b.origin[1] + shift[1]), b.transform, b.phase), rule)

    hood = Region(
        max(x0 + shift[0] - NEIGHBORHOOD_MARGIN, 0),
        max(y0 + shift[1] - NEIGHBORHOOD_MARGIN, 0),
        min(x1 + shift[0] + NEIGHBORHOOD_MARGIN, side - 1),
        min(y1 + shift[1] + NEIGHBORHOOD_MARGIN, side - 1),
    )

    def split(grid: Grid):
        inside, outside = set(), set()
        for c in grid.live_cells():
            (inside if hood.contains(*c) else outside).add(c)
        return inside, outside

    def clearance(pos: Coord) -> int:
        x, y = pos
        dx = max(hood.x0 - x, 0, x - hood.x1)
        dy = max(hood.y0 - y, 0, y - hood.y1)
        return max(dx, dy)

    inside_hist: list[frozenset[Coord]] = []
    for _ in range(horizon):
        g = engine.step(g, rule)
        inside, outside = split(g)
        inside_hist.append(frozenset(inside))
        if len(inside_hist) < 9:
            continue
        periodic = any(
            inside_hist[-1] == inside_hist[-1 - p]
            and inside_hist[-2] == inside_hist[-2 - p]
            for p in range(1, 5)
        )
        if not periodic:
            continue
        if outside:
            sightings = track_gliders(g)
            out_sightings = [s for s in sightings if not hood.contains(*s.position)]
            covered = set()
            for s in out_sightings:
                shape = next(
                    sh for sh, hp in glider_shapes().items() if hp == (s.heading, s.phase)
                )
                covered |= {(s.position[0] + dx, s.position[1] + dy) for dx, dy in shape}
            if outside - covered:
                continue  # non-glider debris outside; not settled
            if any(clearance(s.position) < DEPART_CLEARANCE for s in out_sightings):
                continue
        else:
            out_sightings = []
        return _classify(inside, out_sightings, g.generation)
    raise SettleError(f"collision did not settle within {horizon} generations")


def _classify(inside, out_sightings, settle_gen) -> CollisionOutcome:
    kind = "Mess"
    residue = Pattern(frozenset(inside))
    heading = None
    name = None
    if not inside and not out_sightings:
        kind = "Annihilation"
        residue = Pattern(frozenset())
    elif not inside and len(out_sightings) == 1:
        kind = "Reflection"
        heading = out_sightings[0].heading
        residue = builtin("glider")
    elif inside and not out_sightings:
        name = residue_name(inside)
        if name is not None:
            kind = "Transformation"
    return CollisionOutcome(kind, residue, settle_gen, heading, name)


# -- exhaustive reaction search --------------------------------------------


def _iter_offsets(r: Region) -> Iterator[Coord]:
    for dy in range(r.y0, r.y1 + 1):
        for dx in range(r.x0, r.x1 + 1):
            yield dx, dy


def search_reactions(
    spec: SearchSpec, rule: Rule = CONWAY
) -> list[tuple[Coord, int, CollisionOutcome]]:
    """Enumerate offset x phase and return predicate matches.

    Results are ordered lexicographically by (offset.y, offset.x, phase)
    so frozen discovery output is reproducible. Candidates that overlap,
    leave bounds, or fail to settle are skipped.
    """
    glider = builtin("glider")
    t = HEADING_TRANSFORM[spec.projectile_heading]
    target_pl = Placement(spec.target, (0, 0))
    matches = []
    for off in _iter_offsets(spec.offsets):
        for phase in spec.phases:
            pl = Placement(glider, off, t, phase)
            try:
                outcome = classify_collision(target_pl, pl, rule, spec.horizon)
            except (PlacementError, SettleError, BoundaryContact):
                continue
            if outcome.kind != spec.want_kind:
                continue
            if spec.want_residue is not None and outcome.residue_name != spec.want_residue:
                continue
            if spec.want_heading is not None and outcome.residue_heading != spec.want_heading:
                continue
            matches.append((off, phase, outcome))
    return matches
