"""Primary/backup failover sessions on a Life grid.

A 420x200 grid is split into two sections. Each section owns an internal
and an external glider gun. The external gun of each section fires a long
diagonal stream into the other section, where it crosses the receiver's
short internal stream at a fixed collision point; as long as both sections
are alive the two streams annihilate there every gun period (the
"heartbeat"). Behind each collision point sit a boat (one-shot 90-degree
reflector) and a passive blinker. When a section dies, its external stream
drains, the survivor's internal gliders sail past the collision point,
bounce off the boat, and strike the passive blinker, which becomes an
active blinker: the standby section has taken over.

Sessions wrap a grid plus per-generation monitors that turn raw cell
activity into events (heartbeat annihilations, heartbeat loss, blinker
activation, failover completion, desynchronization debris).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .engine import (
    CONWAY,
    Grid,
    Region,
    Rule,
    clear_region,
    grid_hash,
    population,
    step,
    write_region,
)
from .patterns import (
    IDENTITY,
    Pattern,
    Placement,
    Transform,
    builtin,
    emit_rle,
    parse_rle,
    placement_cells,
)
from .oracles import HEADING_STEP, track_gliders

Coord = tuple[int, int]

# Event kinds.
HEARTBEAT_ANNIHILATION = "HeartbeatAnnihilation"
HEARTBEAT_LOST = "HeartbeatLost"
BLINKER_ACTIVATED = "BlinkerActivated"
FAILOVER_COMPLETE = "FailoverComplete"
DESYNC_DETECTED = "DesyncDetected"
ACTION_APPLIED = "ActionApplied"

# Blinker site states.
PASSIVE = "Passive"
ACTIVE = "Active"
ABSENT = "Absent"
OTHER = "Other"

#: Peak window population that distinguishes a two-stream collision from a
#: single glider passing through (a lone glider never exceeds 5 cells).
ANNIHILATION_MIN_PEAK = 8

#: Collision window half-size around each collision point.
WINDOW_HALO = 5


class ResetError(ValueError):
    """Backup reset attempted off the N x gun_period schedule."""


@dataclass(frozen=True)
class MonitorEvent:
    generation: int
    kind: str
    section: str | None = None
    detail: str | None = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "generation": self.generation,
                "kind": self.kind,
                "section": self.section,
                "detail": self.detail,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "MonitorEvent":
        d = json.loads(line)
        return cls(d["generation"], d["kind"], d.get("section"), d.get("detail"))


def lane_of(heading: str, x: int, y: int) -> int:
    """Diagonal lane index of a glider at bbox origin (x, y).

    SE/NW streams ride x - y lanes; NE/SW streams ride x + y lanes.
    """
    if heading in ("SE", "NW"):
        return x - y
    return x + y


@dataclass(frozen=True)
class SectionLayout:
    """One section's equipment and monitoring geometry.

    ``collision_point`` is where the *peer's* external stream crosses this
    section's internal stream; ``sentinel`` lies just downstream of it on
    the internal lane, before the boat. ``stream_heading``/``stream_lane``
    describe this section's *outgoing* external stream.
    """

    name: str
    region: Region
    internal_gun: Placement
    external_gun: Placement
    reflector: Placement
    passive_blinker: Placement
    blinker_site: Region
    collision_point: Coord
    sentinel: Region
    stream_heading: str
    stream_lane: int
    trigger_glider: Placement | None = None
    #: Generation residues (mod gun_period) at which the collision window
    #: is allowed to hold live cells. In a synchronized configuration the
    #: window is only ever populated on this fixed schedule; activity at
    #: any other residue means a stream is out of phase.
    window_phases: tuple[int, ...] = ()

    def window(self) -> Region:
        x, y = self.collision_point
        return Region(
            x - WINDOW_HALO, y - WINDOW_HALO, x + WINDOW_HALO, y + WINDOW_HALO
        )


@dataclass(frozen=True)
class FailoverConfig:
    width: int
    height: int
    rule: Rule
    gun_period: int
    primary: SectionLayout
    backup: SectionLayout
    corridor_region: Region
    activation_travel: int
    init_rle: str
    init_origin: Coord = (0, 0)
    offsets: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        p, b = self.primary.region, self.backup.region
        if p.y0 != 0 or b.y0 != 0 or p.y1 != self.height - 1 or b.y1 != self.height - 1:
            raise ValueError("section regions must span full grid height")
        if p.x1 + 1 != b.x0 or p.x0 != 0 or b.x1 != self.width - 1:
            raise ValueError("section regions must partition the grid")
        if self.primary.trigger_glider is None:
            raise ValueError("primary section carries the trigger glider")
        if self.backup.trigger_glider is not None:
            raise ValueError("backup section has no trigger glider")

    def section(self, name: str) -> SectionLayout:
        if name == "primary":
            return self.primary
        if name == "backup":
            return self.backup
        raise KeyError(name)

    def init_cells(self) -> frozenset[Coord]:
        return frozenset(parse_rle(self.init_rle).translated(*self.init_origin))

    def standby_cells(self, name: str) -> frozenset[Coord]:
        """Generation-0 content of a section minus its trigger glider.

        This is what a reset writes back: guns at phase 0, boat, passive
        blinker, and the section's own in-flight stream gliders. The
        trigger is omitted -- a freshly reset section is standby, and its
        peer is already active.
        """
        s = self.section(name)
        cells = {c for c in self.init_cells() if s.region.contains(*c)}
        if s.trigger_glider is not None:
            cells -= placement_cells(self.width, self.height, s.trigger_glider, self.rule)
        return frozenset(cells)

    # -- serialization (bit-exact round trip) --------------------------

    def to_json(self) -> str:
        return json.dumps(_config_to_dict(self), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "FailoverConfig":
        return _config_from_dict(json.loads(text))


def _transform_to_dict(t: Transform) -> dict:
    return {"rotation": t.rotation, "flip": t.flip}


def _placement_to_dict(pl: Placement) -> dict:
    d: dict = {"origin": list(pl.origin), "phase": pl.phase,
               "transform": _transform_to_dict(pl.transform)}
    if pl.pattern.name is not None:
        d["pattern"] = pl.pattern.name
    else:
        d["rle"] = emit_rle(pl.pattern)
    return d


def _placement_from_dict(d: dict) -> Placement:
    if "pattern" in d:
        p = builtin(d["pattern"])
    else:
        p = parse_rle(d["rle"])
    t = Transform(d["transform"]["rotation"], d["transform"]["flip"])
    return Placement(p, tuple(d["origin"]), t, d["phase"])


def _region_to_dict(r: Region) -> list[int]:
    return [r.x0, r.y0, r.x1, r.y1]


def _section_to_dict(s: SectionLayout) -> dict:
    d = {
        "name": s.name,
        "region": _region_to_dict(s.region),
        "internal_gun": _placement_to_dict(s.internal_gun),
        "external_gun": _placement_to_dict(s.external_gun),
        "reflector": _placement_to_dict(s.reflector),
        "passive_blinker": _placement_to_dict(s.passive_blinker),
        "blinker_site": _region_to_dict(s.blinker_site),
        "collision_point": list(s.collision_point),
        "sentinel": _region_to_dict(s.sentinel),
        "stream_heading": s.stream_heading,
        "stream_lane": s.stream_lane,
        "trigger_glider": (
            None if s.trigger_glider is None else _placement_to_dict(s.trigger_glider)
        ),
        "window_phases": list(s.window_phases),
    }
    return d


def _section_from_dict(d: dict) -> SectionLayout:
    return SectionLayout(
        name=d["name"],
        region=Region(*d["region"]),
        internal_gun=_placement_from_dict(d["internal_gun"]),
        external_gun=_placement_from_dict(d["external_gun"]),
        reflector=_placement_from_dict(d["reflector"]),
        passive_blinker=_placement_from_dict(d["passive_blinker"]),
        blinker_site=Region(*d["blinker_site"]),
        collision_point=tuple(d["collision_point"]),
        sentinel=Region(*d["sentinel"]),
        stream_heading=d["stream_heading"],
        stream_lane=d["stream_lane"],
        trigger_glider=(
            None
            if d["trigger_glider"] is None
            else _placement_from_dict(d["trigger_glider"])
        ),
        window_phases=tuple(d.get("window_phases", ())),
    )


def _config_to_dict(c: FailoverConfig) -> dict:
    return {
        "v": 1,
        "width": c.width,
        "height": c.height,
        "rule": [c.rule.new_life, c.rule.over_population, c.rule.under_population],
        "gun_period": c.gun_period,
        "primary": _section_to_dict(c.primary),
        "backup": _section_to_dict(c.backup),
        "corridor_region": _region_to_dict(c.corridor_region),
        "activation_travel": c.activation_travel,
        "init_rle": c.init_rle,
        "init_origin": list(c.init_origin),
        "offsets": c.offsets,
    }


def _config_from_dict(d: dict) -> FailoverConfig:
    return FailoverConfig(
        width=d["width"],
        height=d["height"],
        rule=Rule(*d["rule"]),
        gun_period=d["gun_period"],
        primary=_section_from_dict(d["primary"]),
        backup=_section_from_dict(d["backup"]),
        corridor_region=Region(*d["corridor_region"]),
        activation_travel=d["activation_travel"],
        init_rle=d["init_rle"],
        init_origin=tuple(d["init_origin"]),
        offsets=dict(d["offsets"]),
    )


# -- session ------------------------------------------------------------


class _SectionMonitor:
    """Per-generation observation state for one section."""

    def __init__(self, layout: SectionLayout, passive_cells: frozenset[Coord]):
        self.layout = layout
        self.passive_cells = passive_cells
        self.win_prev_pop = 0
        self.win_peak = 0
        self.win_nonempty_since: int | None = None
        self.hb_lost_latched = False
        self.site_prev: frozenset[Coord] = frozenset()
        self.site_now: frozenset[Coord] = frozenset()
        self.last_blinker_state = ABSENT

    def resync(self, grid: Grid, generation: int):
        """Re-baseline after an action so edits are not misread as events."""
        pop = _region_pop(grid, self.layout.window())
        self.win_prev_pop = pop
        self.win_peak = pop
        self.win_nonempty_since = generation if pop > 0 else None
        self.hb_lost_latched = False
        site = _region_cells(grid, self.layout.blinker_site)
        self.site_prev = site
        self.site_now = site
        self.last_blinker_state = self.classify_site()

    def classify_site(self) -> str:
        site = self.site_now
        if not site:
            return ABSENT
        if site == self.passive_cells:
            return PASSIVE
        if (
            len(site) == 3
            and len(self.site_prev) == 3
            and site != self.site_prev
            and _collinear(site)
            and _collinear(self.site_prev)
        ):
            return ACTIVE
        return OTHER


def _region_pop(grid: Grid, r: Region) -> int:
    a = grid.array
    x0, y0 = max(r.x0, 0), max(r.y0, 0)
    x1, y1 = min(r.x1, grid.width - 1), min(r.y1, grid.height - 1)
    return int(a[y0 : y1 + 1, x0 : x1 + 1].sum())


def _region_cells(grid: Grid, r: Region) -> frozenset[Coord]:
    a = grid.array
    x0, y0 = max(r.x0, 0), max(r.y0, 0)
    x1, y1 = min(r.x1, grid.width - 1), min(r.y1, grid.height - 1)
    ys, xs = np.nonzero(a[y0 : y1 + 1, x0 : x1 + 1])
    return frozenset((int(x) + x0, int(y) + y0) for x, y in zip(xs, ys))


def _collinear(cells) -> bool:
    xs = {x for x, _ in cells}
    ys = {y for _, y in cells}
    return len(xs) == 1 or len(ys) == 1


class Session:
    """Single-owner failover session: grid + monitors + event log."""

    def __init__(self, config: FailoverConfig):
        self.config = config
        self.rule = config.rule
        self.grid = Grid.empty(config.width, config.height)
        self.generation = 0
        self.events: list[MonitorEvent] = []
        self.acting = "primary"
        self.failover_fired = False
        self.desync_fired = False
        self.failover_pending = False
        self._desync_after = int(config.gun_period * 3 // 2)
        self._window_phases = {
            name: frozenset(config.section(name).window_phases)
            for name in ("primary", "backup")
        }
        self._monitors = {
            name: _SectionMonitor(
                config.section(name),
                placement_cells(
                    config.width,
                    config.height,
                    config.section(name).passive_blinker,
                    config.rule,
                ),
            )
            for name in ("primary", "backup")
        }

    # -- helpers --------------------------------------------------------

    @property
    def standby(self) -> str:
        return "backup" if self.acting == "primary" else "primary"

    def _log(self, kind: str, section: str | None = None, detail: str | None = None):
        self.events.append(MonitorEvent(self.generation, kind, section, detail))

    def _resync_monitors(self):
        for m in self._monitors.values():
            m.resync(self.grid, self.generation)

    # -- monitor pass after each engine step ------------------------------

    def _observe(self):
        g = self.generation
        for name, m in self._monitors.items():
            lay = m.layout
            pop = _region_pop(self.grid, lay.window())
            if pop > 0 and m.win_prev_pop == 0:
                m.win_nonempty_since = g
                m.win_peak = pop
            elif pop > 0:
                m.win_peak = max(m.win_peak, pop)
            if pop == 0 and m.win_prev_pop > 0:
                if m.win_peak >= ANNIHILATION_MIN_PEAK:
                    self._log(HEARTBEAT_ANNIHILATION, name)
                    m.hb_lost_latched = False
                m.win_nonempty_since = None
                m.win_peak = 0
            if (
                pop > 0
                and not self.desync_fired
                and m.win_nonempty_since is not None
                and g - m.win_nonempty_since >= self._desync_after
            ):
                self._log(DESYNC_DETECTED, name)
                self.desync_fired = True
            # A live standby window is never legitimately populated off
            # its fixed schedule: the acting section's external stream
            # keeps protecting it. The check stands down while a failover
            # is in progress and while the standby section is dead
            # (peer gliders then pass through its window unopposed); it
            # re-arms at the next reset, which is exactly when a bad
            # offset can introduce mistimed streams.
            phases = self._window_phases[name]
            if (
                pop > 0
                and phases
                and name == self.standby
                and not self.failover_pending
                and not self.failover_fired
                and not self.desync_fired
                and g % self.config.gun_period not in phases
            ):
                self._log(DESYNC_DETECTED, name)
                self.desync_fired = True
            m.win_prev_pop = pop

            if not m.hb_lost_latched and _region_pop(self.grid, lay.sentinel) > 0:
                self._log(HEARTBEAT_LOST, name)
                m.hb_lost_latched = True

            m.site_prev = m.site_now
            m.site_now = _region_cells(self.grid, lay.blinker_site)
            state = m.classify_site()
            if state == ACTIVE and m.last_blinker_state != ACTIVE:
                self._log(BLINKER_ACTIVATED, name)
                if name == self.standby and not self.failover_fired:
                    self._log(FAILOVER_COMPLETE, name)
                    self.failover_fired = True
                    self.failover_pending = False
                    self.acting = name
            if state != ACTIVE or m.last_blinker_state != ACTIVE:
                m.last_blinker_state = state


# -- public operations ------------------------------------------------------


def init(session: Session) -> Session:
    """(Re)build the grid from the config; generation 0, fresh event log."""
    cfg = session.config
    session.grid = Grid.from_cells(cfg.width, cfg.height, cfg.init_cells())
    session.generation = 0
    session.events = []
    session.acting = "primary"
    session.failover_fired = False
    session.desync_fired = False
    session.failover_pending = False
    session._log(ACTION_APPLIED, None, "Init")
    session._resync_monitors()
    return session


def kill_primary(session: Session) -> Session:
    """Clear the acting-primary section's region."""
    region = session.config.section(session.acting).region
    session.grid = clear_region(session.grid, region)
    session._log(ACTION_APPLIED, session.acting, "KillPrimary")
    session.desync_fired = False
    session.failover_pending = True
    session._resync_monitors()
    return session


def reset_backup(session: Session, force: bool = False) -> Session:
    """Write the standby layout back into the standby section's region.

    Legal only at generations that are multiples of the gun period -- the
    surviving guns are then exactly at their generation-0 phase, so the
    rewritten section is synchronized by construction. ``force`` bypasses
    the check to reproduce desync behavior deliberately.
    """
    cfg = session.config
    if session.generation % cfg.gun_period != 0 and not force:
        raise ResetError(
            f"reset only at N x {cfg.gun_period} generations "
            f"(generation {session.generation}); use force to override"
        )
    target = session.standby
    session.grid = write_region(
        session.grid, cfg.section(target).region, cfg.standby_cells(target)
    )
    session._log(ACTION_APPLIED, target, "ResetBackup")
    session.failover_fired = False
    session.desync_fired = False
    session.failover_pending = False
    session._resync_monitors()
    return session


def step_session(session: Session, n: int) -> Session:
    """Advance n generations, running monitors after each."""
    if n < 0:
        raise ValueError("n must be >= 0")
    for _ in range(n):
        session.grid = step(session.grid, session.rule)
        session.generation += 1
        session._observe()
    return session


def blinker_state(session: Session, section: str) -> str:
    return session._monitors[section].classify_site()


def failover_bound(config: FailoverConfig, session: Session) -> int:
    """g x gun_period + activation_travel.

    g counts the acting section's external-stream gliders still in flight
    inside the corridor, upstream of the standby section's collision
    point. Each one buys the standby section one more period of heartbeat
    before its internal gliders run free.
    """
    sender = config.section(session.acting)
    receiver = config.section(
        "backup" if session.acting == "primary" else "primary"
    )
    h = sender.stream_heading
    dx, dy = HEADING_STEP[h]
    px, py = receiver.collision_point
    g = 0
    for s in track_gliders(session.grid, config.corridor_region):
        if s.heading != h:
            continue
        if abs(lane_of(h, *s.position) - sender.stream_lane) > 3:
            continue
        # still upstream of the collision point?
        if (px - s.position[0]) * dx + (py - s.position[1]) * dy > 0:
            g += 1
    return g * config.gun_period + config.activation_travel


def event_log(session: Session) -> str:
    """Line-delimited event log (one JSON object per line)."""
    return "".join(e.to_json() + "\n" for e in session.events)


def build_config(gun, reactions, rule: Rule = CONWAY) -> FailoverConfig:
    """Derive a verified configuration from a gun and a reactions catalog.

    Convenience re-export; the implementation lives in ``lifelab.builder``
    (imported lazily to avoid a module cycle).
    """
    from .builder import build_config as _build

    return _build(gun, reactions, rule)
