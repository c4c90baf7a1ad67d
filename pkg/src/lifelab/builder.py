"""Derive a complete failover configuration from a gun asset.

Everything geometric here is established by simulation rather than by
construction: gun streams are characterized empirically, the two gun pairs
are phase-aligned by a bounded search, the boat/blinker tail apparatus is
placed by trying catalog-guided candidates, and the finished layout is
replayed before it is accepted.
"""

from __future__ import annotations

import copy
from collections import Counter
from dataclasses import dataclass, replace

import numpy as np

from .engine import CONWAY, Grid, Region, Rule, grid_hash, step, step_raw
from .patterns import (
    Pattern,
    Placement,
    PlacementError,
    Transform,
    apply_transform,
    builtin,
    emit_rle,
    place,
    placement_cells,
)
from .oracles import HEADING_STEP, HEADING_TRANSFORM, track_gliders
from .failover import (
    ACTIVE,
    BLINKER_ACTIVATED,
    DESYNC_DETECTED,
    FailoverConfig,
    HEARTBEAT_ANNIHILATION,
    HEARTBEAT_LOST,
    PASSIVE,
    SectionLayout,
    Session,
    blinker_state,
    failover_bound,
    init,
    kill_primary,
    lane_of,
    reset_backup,
    step_session,
)

Coord = tuple[int, int]


class AlignmentError(RuntimeError):
    """No working geometry found within the search bounds."""


#: Gun orientation (quarter turns clockwise) per emitted stream heading,
#: for a natively SW-emitting gun. Checked empirically in characterize_gun.
GUN_ROTATION = {"SW": 0, "NW": 1, "NE": 2, "SE": 3}


@dataclass(frozen=True)
class StreamInfo:
    """Empirical description of one oriented gun's output stream.

    ``ref_positions``/``ref_phases`` give the emitted glider's bounding-box
    origin and template phase, relative to the gun placement origin, at
    generations ``ref_gen`` .. ``ref_gen + 3``. Every later glider follows
    by translation: the glider emitted ``j`` periods later sits at
    ``ref_positions[r] + q * HEADING_STEP[heading]`` at generation
    ``ref_gen + 92 j + 4 q + r``.
    """

    heading: str
    transform: Transform
    period: int
    ref_gen: int
    ref_positions: tuple[Coord, Coord, Coord, Coord]
    ref_phases: tuple[int, int, int, int]
    ref_cells: tuple[frozenset[Coord], ...]

    def glider_at(self, gen: int, steps_out: int) -> tuple[Coord, int]:
        """Position/phase of the stream glider ``steps_out`` diagonal steps
        past the reference point, for the glider occupying that slot at
        ``gen`` (caller is responsible for gen being late enough)."""
        r = (gen - self.ref_gen) % 4
        dx, dy = HEADING_STEP[self.heading]
        x, y = self.ref_positions[r]
        return (x + dx * steps_out, y + dy * steps_out), self.ref_phases[r]


def characterize_gun(gun: Pattern, heading: str, period: int = 92,
                     rule: Rule = CONWAY) -> StreamInfo:
    """Simulate one oriented gun in isolation and describe its stream."""
    t = Transform(GUN_ROTATION[heading], False)
    side = 4 * max(gun.width, gun.height) + 2 * period
    org = side // 2 - max(gun.width, gun.height) // 2
    g = Grid.empty(side, side)
    g = place(g, Placement(gun, (org, org), t), rule)
    body = apply_transform(gun, t)
    bx1, by1 = org + body.width - 1, org + body.height - 1
    refs: list[tuple[Coord, int]] = []
    ref_gen = None
    for gen in range(1, 3 * period):
        g = step(g, rule)
        if ref_gen is None:
            far = [
                s
                for s in track_gliders(g)
                if not (org - 4 <= s.position[0] <= bx1 + 4
                        and org - 4 <= s.position[1] <= by1 + 4)
            ]
            if far:
                if far[0].heading != heading:
                    raise AlignmentError(
                        f"gun oriented for {heading} emitted {far[0].heading}"
                    )
                ref_gen = gen
        if ref_gen is not None and len(refs) < 4:
            ss = [s for s in track_gliders(g) if s.heading == heading]
            ss.sort(key=lambda s: (abs(s.position[0] - org), abs(s.position[1] - org)))
            lead = max(
                ss,
                key=lambda s: (s.position[0] - org) * HEADING_STEP[heading][0]
                + (s.position[1] - org) * HEADING_STEP[heading][1],
            )
            lx, ly = lead.position
            cells = frozenset(
                (x - org, y - org)
                for x in range(lx, lx + 3)
                for y in range(ly, ly + 3)
                if g.array[y, x]
            )
            refs.append(((lx - org, ly - org), lead.phase, cells))
    if ref_gen is None or len(refs) < 4:
        raise AlignmentError(f"no stream found for heading {heading}")
    return StreamInfo(
        heading=heading,
        transform=t,
        period=period,
        ref_gen=ref_gen,
        ref_positions=tuple(p for p, _, _ in refs),
        ref_phases=tuple(ph for _, ph, _ in refs),
        ref_cells=tuple(c for _, _, c in refs),
    )


# ---------------------------------------------------------------------------
# Layout frame
# ---------------------------------------------------------------------------

GRID_WIDTH, GRID_HEIGHT = 420, 200
PRIMARY_REGION = Region(0, 0, 209, 199)
BACKUP_REGION = Region(210, 0, 419, 199)
REGIONS = {"primary": PRIMARY_REGION, "backup": BACKUP_REGION}

#: Stream headings per section. Each internal stream's leftover gliders
#: (once the one-shot reflector is consumed) exit through the owning
#: section's own grid edge, and each external stream's in-corridor segment
#: lies entirely in the peer's region, so killing a section never removes
#: gliders already counted by failover_bound.
HEADINGS = {
    "primary": {"internal": "NW", "external": "NE"},
    "backup": {"internal": "SE", "external": "SW"},
}

#: Internal gun anchors; every other coordinate follows from measured
#: stream arithmetic plus bounded searches.
INTERNAL_ORIGINS = {"primary": (108, 169), "backup": (241, 14)}

RUNWAY_STEPS = 16  # collision point: diagonal steps past the internal
                   # stream's first-sighting reference
SENTINEL_STEPS = 12  # sentinel: past the collision point, before the boat
TRIGGER_STEPS = 16  # startup glider slot, past the collision point
BOAT_STEPS = 20  # reflector: nominal distance past the collision point
TUB_STEPS = 10  # blinker seed: along the reflected lane


def _envelope(gun: Pattern, t: Transform, rule: Rule = CONWAY,
              period: int = 92) -> tuple[int, int, int, int]:
    """Bounding box, relative to the placement origin, of every cell the
    oriented gun touches over one period (sparks overshoot the body)."""
    body = apply_transform(gun, t)
    pad = 8
    g = Grid.empty(body.width + 2 * pad, body.height + 2 * pad)
    g = place(g, Placement(gun, (pad, pad), t), rule)
    env = np.zeros_like(g.array)
    for _ in range(period):
        env |= g.array
        g = step(g, rule)
    ys, xs = np.nonzero(env)
    return (int(xs.min()) - pad, int(ys.min()) - pad,
            int(xs.max()) - pad, int(ys.max()) - pad)


def _box_at(env: tuple[int, int, int, int], origin: Coord):
    ox, oy = origin
    return (ox + env[0], oy + env[1], ox + env[2], oy + env[3])


def _box_inside(box, region: Region, margin: int) -> bool:
    return (region.x0 + margin <= box[0] and box[2] <= region.x1 - margin
            and region.y0 + margin <= box[1] and box[3] <= region.y1 - margin)


def _boxes_clear(a, b, gap: int) -> bool:
    return (a[2] + gap < b[0] or b[2] + gap < a[0]
            or a[3] + gap < b[1] or b[3] + gap < a[1])


def _diag_cells(start: Coord, heading: str, steps: int, halo: int = 2):
    dx, dy = HEADING_STEP[heading]
    out = set()
    for m in range(steps + 1):
        for ax in range(-halo, halo + 1):
            for ay in range(-halo, halo + 1):
                out.add((start[0] + m * dx + ax, start[1] + m * dy + ay))
    return out


def _stream_cells(si: StreamInfo, base: Coord, steps: int) -> frozenset[Coord]:
    """Cells of the stream glider ``steps`` diagonal steps past the
    reference sighting, for a gun placed at ``base`` (sub-lattice 0)."""
    dx, dy = HEADING_STEP[si.heading]
    return frozenset(
        (base[0] + x + steps * dx, base[1] + y + steps * dy)
        for x, y in si.ref_cells[0]
    )


# ---------------------------------------------------------------------------
# Phase alignment
# ---------------------------------------------------------------------------


def align_close(gun: Pattern, si: StreamInfo, se: StreamInfo,
                rule: Rule = CONWAY, lane_range: int = 2) -> tuple[int, int]:
    """Find an external-gun phase and lane shift that annihilates cleanly.

    Both guns are placed a short, fixed runway (RUNWAY_STEPS) from the lane
    crossing and every phase x small lane shift is simulated. Success means
    the combined state is periodic and nothing ever leaks past the crossing
    on either lane. The result transfers to the real layout by sliding the
    external gun back along its own lane, adding 4 generations of phase per
    step.
    """
    period = si.period
    isx, isy = HEADING_STEP[si.heading]
    esx, esy = HEADING_STEP[se.heading]
    cx = si.ref_positions[0][0] + RUNWAY_STEPS * isx
    cy = si.ref_positions[0][1] + RUNWAY_STEPS * isy
    ox = cx - se.ref_positions[0][0] - RUNWAY_STEPS * esx
    oy = cy - se.ref_positions[0][1] - RUNWAY_STEPS * esy
    env_i = _envelope(gun, si.transform, rule, period)
    env_e = _envelope(gun, se.transform, rule, period)

    strip = set()
    for hx, hy in ((isx, isy), (esx, esy)):
        for m in range(6, 19):
            for ax in range(-2, 3):
                for ay in range(-2, 3):
                    strip.add((cx + m * hx + ax, cy + m * hy + ay))
    xs = [env_i[0], env_i[2], ox + env_e[0] - lane_range,
          ox + env_e[2] + lane_range] + [c[0] for c in strip]
    ys = [env_i[1], env_i[3], oy + env_e[1], oy + env_e[3]] + [
        c[1] for c in strip]
    pad = 10
    offx, offy = pad - min(xs), pad - min(ys)
    width, height = max(xs) + offx + pad + 1, max(ys) + offy + pad + 1
    strip_ix = (
        np.array([c[1] + offy for c in strip]),
        np.array([c[0] + offx for c in strip]),
    )
    base = placement_cells(
        width, height, Placement(gun, (offx, offy), si.transform), rule
    )
    # Strays from the internal stream's head start are gone well before 6
    # periods; periodicity is judged one period apart after 9.
    w1a = 6 * period
    w1b = w1a + period + 12
    s1, s2 = 9 * period, 10 * period
    total = s1 + period + 13

    for phase in range(period):
        for k in range(-lane_range, lane_range + 1):
            try:
                ext = placement_cells(
                    width, height,
                    Placement(gun, (ox + offx + k, oy + offy),
                              se.transform, phase),
                    rule,
                )
            except PlacementError:
                continue
            a = np.zeros((height, width), dtype=bool)
            for x, y in base:
                a[y, x] = True
            clash = False
            for x, y in ext:
                if a[y, x]:
                    clash = True
                    break
                a[y, x] = True
            if clash:
                continue
            good = True
            snap = None
            periodic = False
            for gen in range(1, total):
                a = step_raw(a, rule)
                if (w1a <= gen < w1b or s1 <= gen) and a[strip_ix].any():
                    good = False
                    break
                if gen == s1:
                    snap = a.copy()
                elif gen == s2:
                    periodic = np.array_equal(a, snap)
                    if not periodic:
                        good = False
                        break
            if good and periodic:
                return phase, k
    raise AlignmentError(
        f"no clean {si.heading}/{se.heading} crossing within "
        f"{period} phases x {2 * lane_range + 1} lanes"
    )


def _anchor_external(gun: Pattern, se: StreamInfo, collision: Coord,
                     delta: int, own_region: Region, avoid: list,
                     rule: Rule = CONWAY) -> tuple[Coord, int]:
    """Farthest placement of the sender's external gun on the aligned lane
    that keeps its whole envelope inside its own region and clear of the
    given boxes."""
    env = _envelope(gun, se.transform, rule, se.period)
    hx, hy = HEADING_STEP[se.heading]
    rx, ry = se.ref_positions[0]
    grid = Region(0, 0, GRID_WIDTH - 1, GRID_HEIGHT - 1)
    for k in range(160, RUNWAY_STEPS, -1):
        origin = (collision[0] - rx - k * hx + delta,
                  collision[1] - ry - k * hy)
        box = _box_at(env, origin)
        if not _box_inside(box, own_region, 2):
            continue
        if not _box_inside(box, grid, 2):
            continue
        if any(not _boxes_clear(box, b, 3) for b in avoid):
            continue
        return origin, k
    raise AlignmentError(
        f"no room for the {se.heading} external gun aiming at {collision}"
    )


# ---------------------------------------------------------------------------
# Steady state and tail apparatus
# ---------------------------------------------------------------------------


def _warmup_capture(cells, strips, rule: Rule, period: int,
                    periods: int = 16):
    """Run the guns-only layout to a steady state and capture it.

    Returns the captured cell set (at a multiple of the period) plus the
    one-period envelope, and verifies that the state is exactly periodic
    and that nothing leaks past either collision point.
    """
    a = np.zeros((GRID_HEIGHT, GRID_WIDTH), dtype=bool)
    for x, y in cells:
        a[y, x] = True
    for _ in range(periods * period):
        a = step_raw(a, rule)
    snap = a.copy()
    env = np.zeros_like(a)
    for _ in range(period):
        a = step_raw(a, rule)
        env |= a
    if not np.array_equal(a, snap):
        raise AlignmentError("combined gun layout is not period-locked")
    for ys, xs in strips:
        if env[ys, xs].any():
            raise AlignmentError("a stream leaks past a collision point")
    ys, xs = np.nonzero(snap)
    return frozenset(zip(xs.tolist(), ys.tolist())), env


_OPPOSITE = {"NW": "SE", "SE": "NW", "NE": "SW", "SW": "NE"}


def _collinear_triple(cells) -> bool:
    pts = sorted(cells)
    if len(pts) != 3:
        return False
    xs = {x for x, _ in pts}
    ys = {y for _, y in pts}
    if len(xs) == 1:
        return pts[2][1] - pts[0][1] == 2
    if len(ys) == 1:
        return pts[2][0] - pts[0][0] == 2
    return False


def _tail_search(si: StreamInfo, base: Coord, collision: Coord,
                 region: Region, rule: Rule = CONWAY) -> dict:
    """Place the boat and the passive blinker behind one collision point.

    A single stream glider is simulated against boat candidates (every
    orientation, small lane shifts) until one bounces it 90 degrees and
    dies doing so; then blinker-seed candidates are tried on the reflected
    lane until the bounced glider leaves exactly a blinker behind.
    """
    hx, hy = HEADING_STEP[si.heading]
    boat_nom = (collision[0] + BOAT_STEPS * hx, collision[1] + BOAT_STEPS * hy)
    glider = _stream_cells(si, base, RUNWAY_STEPS + 6)
    pad = 48
    px = [x for x, _ in glider] + [boat_nom[0]]
    py = [y for _, y in glider] + [boat_nom[1]]
    x0, y0 = min(px) - pad, min(py) - pad
    width, height = max(px) - x0 + pad + 1, max(py) - y0 + pad + 1
    boat = builtin("boat")
    tub = builtin("passive_blinker")

    def run(cell_sets, gens):
        a = np.zeros((height, width), dtype=bool)
        for cs in cell_sets:
            for x, y in cs:
                if a[y - y0, x - x0]:
                    return None
                a[y - y0, x - x0] = True
        for _ in range(gens):
            a = step_raw(a, rule)
        return a

    for rot in range(4):
        for flip in (False, True):
            t = Transform(rot, flip)
            body = apply_transform(boat, t)
            for j in (0, 1, -1, 2, -2, 3, -3):
                origin = (boat_nom[0] + j, boat_nom[1])
                bcells = frozenset(body.translated(*origin))
                a = run((glider, bcells), 180)
                if a is None or int(a.sum()) != 5:
                    continue
                g = Grid(a)
                seen = track_gliders(g)
                if len(seen) != 1:
                    continue
                h2 = seen[0].heading
                if h2 in (si.heading, _OPPOSITE[si.heading]):
                    continue
                gx, gy = seen[0].position
                gx, gy = gx + x0, gy + y0
                r2x, r2y = HEADING_STEP[h2]
                for rot2 in range(4):
                    for flip2 in (False, True):
                        t2 = Transform(rot2, flip2)
                        seed = apply_transform(tub, t2)
                        for jj in (0, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5, 6, -6):
                            tor = (gx + TUB_STEPS * r2x + jj,
                                   gy + TUB_STEPS * r2y)
                            tcells = frozenset(seed.translated(*tor))
                            if not all(
                                region.contains(x, y)
                                and x0 + 4 <= x < x0 + width - 4
                                and y0 + 4 <= y < y0 + height - 4
                                for x, y in tcells
                            ):
                                continue
                            a2 = run((glider, bcells, tcells), 340)
                            if a2 is None or int(a2.sum()) != 3:
                                continue
                            a3 = step_raw(step_raw(a2, rule), rule)
                            if not np.array_equal(a2, a3):
                                continue
                            ys, xs = np.nonzero(a2)
                            final = frozenset(
                                (int(x) + x0, int(y) + y0)
                                for y, x in zip(ys, xs)
                            )
                            if not _collinear_triple(final):
                                continue
                            sx = [x for x, _ in tcells | final]
                            sy = [y for _, y in tcells | final]
                            site = Region(min(sx) - 1, min(sy) - 1,
                                          max(sx) + 1, max(sy) + 1)
                            return {
                                "boat": Placement(boat, origin, t),
                                "boat_cells": bcells,
                                "tub": Placement(tub, tor, t2),
                                "tub_cells": tcells,
                                "site": site,
                                "reflected": h2,
                            }
    raise AlignmentError(
        f"no boat/blinker tail found behind {collision} ({si.heading})"
    )


def _trigger_placement(si: StreamInfo, base: Coord,
                       rule: Rule = CONWAY) -> tuple[Placement, frozenset]:
    """A glider placed as if the internal stream had already passed the
    collision point: it consumes the boat at startup and activates the
    primary blinker."""
    target = _stream_cells(si, base, RUNWAY_STEPS + TRIGGER_STEPS)
    glider = builtin("glider")
    t = HEADING_TRANSFORM[si.heading]
    tx = min(x for x, _ in target)
    ty = min(y for _, y in target)
    for phase in range(4):
        for ox in range(tx - 3, tx + 4):
            for oy in range(ty - 3, ty + 4):
                try:
                    c = placement_cells(
                        GRID_WIDTH, GRID_HEIGHT,
                        Placement(glider, (ox, oy), t, phase), rule,
                    )
                except PlacementError:
                    continue
                if c == target:
                    return Placement(glider, (ox, oy), t, phase), target
    raise AlignmentError("no placement reproduces the startup glider")


# ---------------------------------------------------------------------------
# Whole-configuration verification
# ---------------------------------------------------------------------------


def _run_until_failover(session: Session, limit: int) -> int:
    start = session.generation
    while not session.failover_fired:
        if session.generation - start > limit:
            raise AlignmentError(
                f"failover did not complete within {limit} generations"
            )
        step_session(session, 1)
    return session.generation - start


def _verify_healthy(cfg: FailoverConfig) -> None:
    period = cfg.gun_period
    s = init(Session(cfg))
    step_session(s, 6 * period)
    h = grid_hash(s.grid)
    step_session(s, period)
    if grid_hash(s.grid) != h:
        raise AlignmentError("full layout is not period-locked after startup")
    step_session(s, 3 * period)
    counts = Counter((e.kind, e.section) for e in s.events)
    problems = []
    if counts[(BLINKER_ACTIVATED, "backup")]:
        problems.append("backup blinker activated during healthy run")
    for name in ("primary", "backup"):
        if counts[(HEARTBEAT_LOST, name)]:
            problems.append(f"heartbeat lost on {name}")
        if counts[(HEARTBEAT_ANNIHILATION, name)] < 9:
            problems.append(
                f"only {counts[(HEARTBEAT_ANNIHILATION, name)]} "
                f"annihilations on {name}"
            )
        if counts[(DESYNC_DETECTED, name)]:
            problems.append(f"desync reported on {name}")
    if blinker_state(s, "primary") != ACTIVE:
        problems.append("primary blinker did not activate at startup")
    if blinker_state(s, "backup") != PASSIVE:
        problems.append("backup blinker is not passive")
    if problems:
        raise AlignmentError("; ".join(problems))


def _measure_travel(cfg: FailoverConfig) -> int:
    """Worst observed failover latency beyond the in-flight glider budget,
    over every kill offset modulo the gun period, in both directions."""
    period = cfg.gun_period
    travel = 0

    def sweep(base: Session) -> None:
        nonlocal travel
        for off in range(period):
            s = copy.deepcopy(base)
            step_session(s, off)
            budget = failover_bound(cfg, s) - cfg.activation_travel
            kill_primary(s)
            lat = _run_until_failover(s, budget + 15 * period)
            travel = max(travel, lat - budget)

    fresh = step_session(init(Session(cfg)), 4 * period)
    sweep(fresh)

    # Second direction: backup acting, primary restored and on standby.
    s2 = step_session(init(Session(cfg)), 4 * period)
    kill_primary(s2)
    _run_until_failover(s2, 20 * period)
    step_session(s2, (-s2.generation) % period)
    reset_backup(s2)
    step_session(s2, 12 * period)
    sweep(s2)
    return travel


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


def _exit_point(si: StreamInfo, origin: Coord) -> Coord:
    return origin[0] + si.ref_positions[0][0], origin[1] + si.ref_positions[0][1]


def _strip_indices(collision: Coord, headings) -> list:
    out = []
    for h in headings:
        hx, hy = HEADING_STEP[h]
        pts = [
            (collision[0] + m * hx + ax, collision[1] + m * hy + ay)
            for m in range(6, 19)
            for ax in range(-2, 3)
            for ay in range(-2, 3)
        ]
        pts = [
            (x, y) for x, y in pts
            if 0 <= x < GRID_WIDTH and 0 <= y < GRID_HEIGHT
        ]
        out.append(
            (np.array([y for _, y in pts]), np.array([x for x, _ in pts]))
        )
    return out


def build_config(gun: Pattern, reactions: dict,
                 rule: Rule = CONWAY) -> FailoverConfig:
    """Derive, verify and return a complete failover configuration.

    ``gun`` must be a period-92 gun; ``reactions`` is the reaction catalog
    and must contain the annihilation, reflection and activation entries
    the layout depends on.
    """
    for key in ("glider_glider_90", "glider_boat", "glider_passive_blinker"):
        if key not in reactions:
            raise ValueError(f"reaction catalog is missing {key!r}")
    period = 92
    streams = {
        h: characterize_gun(gun, h, period, rule)
        for h in ("NW", "NE", "SE", "SW")
    }

    collision = {}
    for name in ("primary", "backup"):
        si = streams[HEADINGS[name]["internal"]]
        ex, ey = _exit_point(si, INTERNAL_ORIGINS[name])
        hx, hy = HEADING_STEP[si.heading]
        collision[name] = (ex + RUNWAY_STEPS * hx, ey + RUNWAY_STEPS * hy)

    # Phase-align each external gun against the peer's internal stream at
    # close range, then slide it back into its own section.
    external = {}
    for sender in ("primary", "backup"):
        receiver = "backup" if sender == "primary" else "primary"
        sint = streams[HEADINGS[receiver]["internal"]]
        sext = streams[HEADINGS[sender]["external"]]
        p_close, lane_shift = align_close(gun, sint, sext, rule)
        own_int = streams[HEADINGS[sender]["internal"]]
        avoid = [
            _box_at(_envelope(gun, own_int.transform, rule, period),
                    INTERNAL_ORIGINS[sender])
        ]
        pcx, pcy = collision[sender]
        hx, hy = HEADING_STEP[own_int.heading]
        tx, ty = pcx + (BOAT_STEPS + 20) * hx, pcy + (BOAT_STEPS + 20) * hy
        avoid.append((min(pcx, tx) - 14, min(pcy, ty) - 14,
                      max(pcx, tx) + 14, max(pcy, ty) + 14))
        origin, k = _anchor_external(
            gun, sext, collision[receiver], lane_shift,
            REGIONS[sender], avoid, rule,
        )
        external[sender] = (origin, (p_close + 4 * (k - RUNWAY_STEPS)) % period)

    # Guns-only warmup to a period-locked steady state.
    placements = {}
    cells: set[Coord] = set()
    for name in ("primary", "backup"):
        pi = Placement(gun, INTERNAL_ORIGINS[name],
                       streams[HEADINGS[name]["internal"]].transform)
        eo, ephase = external[name]
        pe = Placement(gun, eo,
                       streams[HEADINGS[name]["external"]].transform, ephase)
        placements[name] = (pi, pe)
        for pl in (pi, pe):
            pc = placement_cells(GRID_WIDTH, GRID_HEIGHT, pl, rule)
            if cells & pc:
                raise AlignmentError("gun placements overlap")
            cells |= pc
    strips = []
    for name in ("primary", "backup"):
        peer = "backup" if name == "primary" else "primary"
        strips += _strip_indices(
            collision[name],
            (HEADINGS[name]["internal"], HEADINGS[peer]["external"]),
        )
    capture, env = _warmup_capture(cells, strips, rule, period)

    # Tail apparatus, placed where the steady state never reaches.
    tails = {
        name: _tail_search(
            streams[HEADINGS[name]["internal"]], INTERNAL_ORIGINS[name],
            collision[name], REGIONS[name], rule,
        )
        for name in ("primary", "backup")
    }
    trigger, trigger_cells = _trigger_placement(
        streams[HEADINGS["primary"]["internal"]],
        INTERNAL_ORIGINS["primary"], rule,
    )
    extra: set[Coord] = set()
    for name in ("primary", "backup"):
        extra |= tails[name]["boat_cells"] | tails[name]["tub_cells"]
    extra |= trigger_cells
    for x, y in extra:
        if env[y, x]:
            raise AlignmentError(
                "tail apparatus overlaps the steady-state envelope"
            )
    if extra & capture:
        raise AlignmentError("tail apparatus overlaps captured cells")
    init_cells = frozenset(capture | extra)

    sections = {}
    for name in ("primary", "backup"):
        ih = HEADINGS[name]["internal"]
        xh = HEADINGS[name]["external"]
        hx, hy = HEADING_STEP[ih]
        px, py = collision[name]
        sx, sy = px + SENTINEL_STEPS * hx, py + SENTINEL_STEPS * hy
        eo, _ = external[name]
        pi, pe = placements[name]
        sections[name] = SectionLayout(
            name=name,
            region=REGIONS[name],
            internal_gun=pi,
            external_gun=pe,
            reflector=tails[name]["boat"],
            passive_blinker=tails[name]["tub"],
            blinker_site=tails[name]["site"],
            collision_point=collision[name],
            sentinel=Region(sx - 1, sy - 1, sx + 1, sy + 1),
            stream_heading=xh,
            stream_lane=lane_of(xh, *_exit_point(streams[xh], eo)),
            trigger_glider=trigger if name == "primary" else None,
        )

    pts = list(collision.values()) + [
        _exit_point(streams[HEADINGS[n]["external"]], external[n][0])
        for n in ("primary", "backup")
    ]
    corridor = Region(
        max(0, min(x for x, _ in pts) - 6),
        max(0, min(y for _, y in pts) - 6),
        min(GRID_WIDTH - 1, max(x for x, _ in pts) + 6),
        min(GRID_HEIGHT - 1, max(y for _, y in pts) + 6),
    )

    ox = min(x for x, _ in init_cells)
    oy = min(y for _, y in init_cells)
    cfg = FailoverConfig(
        width=GRID_WIDTH,
        height=GRID_HEIGHT,
        rule=rule,
        gun_period=period,
        primary=sections["primary"],
        backup=sections["backup"],
        corridor_region=corridor,
        activation_travel=0,
        init_rle=emit_rle(Pattern(init_cells, name="failover_init")),
        init_origin=(ox, oy),
        offsets={
            f"{name}_gun_dx": abs(external[name][0][0] - INTERNAL_ORIGINS[name][0])
            for name in ("primary", "backup")
        }
        | {
            f"{name}_gun_dy": abs(external[name][0][1] - INTERNAL_ORIGINS[name][1])
            for name in ("primary", "backup")
        },
    )
    _verify_healthy(cfg)
    cfg = _record_window_phases(cfg)
    return replace(cfg, activation_travel=_measure_travel(cfg))


def _record_window_phases(cfg: FailoverConfig) -> FailoverConfig:
    """Freeze each window's legal activity schedule (residues mod period).

    In steady state every window is populated only at fixed generation
    residues; the monitor treats standby activity off this schedule as
    desynchronization. One residue of slack is added on each side.
    """
    session = Session(cfg)
    init(session)
    step_session(session, 6 * cfg.gun_period)
    masks: dict[str, set[int]] = {"primary": set(), "backup": set()}
    for _ in range(cfg.gun_period):
        step_session(session, 1)
        for name, mask in masks.items():
            w = cfg.section(name).window()
            if session.grid.array[w.y0 : w.y1 + 1, w.x0 : w.x1 + 1].any():
                mask.add(session.generation % cfg.gun_period)
    updates = {}
    for name, mask in masks.items():
        dilated = {(p + d) % cfg.gun_period for p in mask for d in (-1, 0, 1)}
        updates[name] = replace(
            cfg.section(name), window_phases=tuple(sorted(dilated))
        )
    return replace(cfg, primary=updates["primary"], backup=updates["backup"])
