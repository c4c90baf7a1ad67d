"""Batch command-line surface: scenario runner, asset validator, discovery.

Subcommands:

``lifelab run <scenario.json> [--out DIR] [--frames g1,g2,...] [--seed-config FILE]``
    Build a session, apply timed actions, write the event log, frame
    dumps, and a metrics summary. Exit status 0 iff every invariant held.

``lifelab validate``
    Oracle-check every builtin pattern and every cataloged reaction;
    print a pass/fail table.

``lifelab discover <spec.json> [--out DIR]``
    Run a collision search and merge the result into a reactions catalog
    (deterministic: same spec, byte-identical catalog).

Scenario schema (JSON)::

    {
      "config": "builtin" | {"file": "path/to/config.json"},
      "generations": 2760,
      "actions": [{"at": 920, "name": "KillPrimary", "force": false}],
      "outputs": {"event_log": "events.jsonl",
                  "frames": [0, 920],
                  "metrics": "metrics.json"}
    }

Action names: Init, KillPrimary, ResetBackup. Frame dumps are RLE files
with ``#C generation=N``, ``#C grid=WxH`` and ``#C offset=X,Y`` comments so
they reload into an absolute grid position.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import failover, oracles
from .engine import CONWAY, Grid, Region, population
from .failover import (
    FailoverConfig,
    ResetError,
    Session,
    blinker_state,
    event_log,
    failover_bound,
    init,
    kill_primary,
    reset_backup,
    step_session,
)
from .oracles import (
    SearchSpec,
    classify_collision,
    detect_emission_period,
    detect_period,
    search_reactions,
)
from .patterns import (
    BUILTIN_NAMES,
    Pattern,
    Placement,
    builtin,
    emit_rle,
    parse_rle,
)

ACTION_NAMES = ("Init", "KillPrimary", "ResetBackup")


def load_builtin_config() -> FailoverConfig:
    text = (
        resources.files("lifelab.assets").joinpath("failover_config.json").read_text()
    )
    return FailoverConfig.from_json(text)


def _load_config(source) -> FailoverConfig:
    if source == "builtin":
        return load_builtin_config()
    if isinstance(source, dict) and "file" in source:
        return FailoverConfig.from_json(Path(source["file"]).read_text())
    raise ValueError(f"bad config source: {source!r}")


# -- frame dumps ----------------------------------------------------------


def dump_frame(grid: Grid) -> str:
    cells = grid.live_cells()
    if cells:
        ox = min(x for x, _ in cells)
        oy = min(y for _, y in cells)
    else:
        ox = oy = 0
    p = Pattern(frozenset((x - ox, y - oy) for x, y in cells))
    return emit_rle(
        p,
        comments=[
            f"generation={grid.generation}",
            f"grid={grid.width}x{grid.height}",
            f"offset={ox},{oy}",
        ],
    )


def load_frame(text: str) -> Grid:
    meta = {}
    for line in text.splitlines():
        if line.startswith("#C") and "=" in line:
            k, _, v = line[2:].strip().partition("=")
            meta[k] = v
    w, _, h = meta["grid"].partition("x")
    ox, _, oy = meta["offset"].partition(",")
    p = parse_rle(text)
    return Grid.from_cells(
        int(w),
        int(h),
        p.translated(int(ox), int(oy)),
        generation=int(meta.get("generation", 0)),
    )


# -- scenario runner ------------------------------------------------------


def _parse_scenario(path: Path) -> dict:
    s = json.loads(path.read_text())
    if "generations" not in s or s["generations"] < 0:
        raise ValueError("scenario needs a non-negative 'generations'")
    actions = s.get("actions", [])
    for a in actions:
        if a.get("name") not in ACTION_NAMES:
            raise ValueError(f"unknown action {a.get('name')!r}")
        if not (0 <= a.get("at", -1) <= s["generations"]):
            raise ValueError("action generations must lie in [0, generations]")
    if actions != sorted(actions, key=lambda a: a["at"]):
        raise ValueError("actions must be sorted by generation")
    return s


def _apply_action(session: Session, a: dict, metrics: dict):
    name = a["name"]
    if name == "Init":
        init(session)
    elif name == "KillPrimary":
        metrics["_pending_kill"] = {
            "kill_generation": session.generation,
            "bound": failover_bound(session.config, session),
        }
        kill_primary(session)
    elif name == "ResetBackup":
        force = bool(a.get("force", False))
        if force and session.generation % session.config.gun_period != 0:
            metrics["forced_desync"] = True
        reset_backup(session, force=force)


def run_scenario(scenario: dict, out_dir: Path, extra_frames=(), seed_config=None) -> int:
    config = (
        FailoverConfig.from_json(Path(seed_config).read_text())
        if seed_config
        else _load_config(scenario.get("config", "builtin"))
    )
    outputs = scenario.get("outputs", {})
    frame_gens = sorted(set(outputs.get("frames", [])) | set(extra_frames))
    total = scenario["generations"]
    actions = list(scenario.get("actions", []))

    out_dir.mkdir(parents=True, exist_ok=True)
    session = Session(config)
    init(session)
    metrics: dict = {"failovers": [], "forced_desync": False}

    def checkpoint():
        if session.generation in frame_gens:
            path = out_dir / f"frame_{session.generation:06d}.rle"
            path.write_text(dump_frame(session.grid))

    checkpoint()
    cursor = 0
    for a in actions + [{"at": total, "name": None}]:
        while session.generation < a["at"]:
            stride = 1 if frame_gens else a["at"] - session.generation
            if frame_gens:
                nxt = min((g for g in frame_gens if g > session.generation), default=a["at"])
                stride = min(nxt, a["at"]) - session.generation
            step_session(session, stride)
            checkpoint()
            _collect_failovers(session, metrics)
        if a["name"] is not None:
            _apply_action(session, a, metrics)
            checkpoint()
        cursor = a["at"]

    _collect_failovers(session, metrics)
    violations = _check_invariants(session, metrics)
    counts = {"primary": 0, "backup": 0}
    for e in session.events:
        if e.kind == failover.HEARTBEAT_ANNIHILATION and e.section in counts:
            counts[e.section] += 1
    summary = {
        "generations": session.generation,
        "heartbeat_counts": counts,
        "failovers": [
            {k: v for k, v in f.items()} for f in metrics["failovers"]
        ],
        "violations": violations,
    }

    if "event_log" in outputs:
        (out_dir / outputs["event_log"]).write_text(event_log(session))
    if "metrics" in outputs:
        (out_dir / outputs["metrics"]).write_text(
            json.dumps(summary, sort_keys=True, indent=1) + "\n"
        )
    for v in violations:
        print(f"violation: {v}", file=sys.stderr)
    return 0 if not violations else 1


def _collect_failovers(session: Session, metrics: dict):
    pending = metrics.get("_pending_kill")
    if pending is None:
        return
    for e in session.events:
        if (
            e.kind == failover.FAILOVER_COMPLETE
            and e.generation >= pending["kill_generation"]
        ):
            metrics["failovers"].append(
                {
                    "kill_generation": pending["kill_generation"],
                    "complete_generation": e.generation,
                    "latency": e.generation - pending["kill_generation"],
                    "bound": pending["bound"],
                }
            )
            metrics["_pending_kill"] = None
            return


def _check_invariants(session: Session, metrics: dict) -> list[str]:
    v = []
    for f in metrics["failovers"]:
        if f["latency"] > f["bound"]:
            v.append(
                f"failover latency {f['latency']} exceeds bound {f['bound']} "
                f"(kill at {f['kill_generation']})"
            )
    kills = {
        e.generation
        for e in session.events
        if e.kind == failover.ACTION_APPLIED and e.detail == "KillPrimary"
    }
    for e in session.events:
        if e.kind == failover.FAILOVER_COMPLETE and not any(
            g <= e.generation for g in kills
        ):
            v.append(f"FailoverComplete at {e.generation} without a KillPrimary")
        if e.kind == failover.DESYNC_DETECTED and not metrics["forced_desync"]:
            v.append(f"DesyncDetected at {e.generation} without a forced desync")
    return v


# -- validate -------------------------------------------------------------


def _catalog_path() -> Path:
    return Path(str(resources.files("lifelab.assets").joinpath("reactions.json")))


def validate_assets(catalog_path: Path | None = None) -> list[tuple[str, str, bool]]:
    """Oracle-check builtins and cataloged reactions; rows (name, got, ok)."""
    rows: list[tuple[str, str, bool]] = []

    def osc(name, period, disp=(0, 0)):
        try:
            r = detect_period(builtin(name))
            got = f"period {r.period}, displacement {r.displacement}"
            ok = r.period == period and r.displacement == disp
        except Exception as e:  # noqa: BLE001 - report, don't die
            got, ok = f"error: {e}", False
        rows.append((name, got, ok))

    def gun(name, period):
        try:
            got_p = detect_emission_period(builtin(name))
            rows.append((name, f"emission period {got_p}", got_p == period))
        except Exception as e:  # noqa: BLE001
            rows.append((name, f"error: {e}", False))

    osc("blinker", 2)
    osc("block", 1)
    osc("boat", 1)
    osc("glider", 4, (1, 1))
    osc("passive_blinker", 1)
    gun("gosper_gun", 30)
    gun("p92_gun", 92)

    path = catalog_path or _catalog_path()
    catalog = json.loads(path.read_text()) if path.exists() else {}
    for name in sorted(catalog):
        entry = catalog[name]
        try:
            outcome = _replay_reaction(entry)
            got = outcome.kind
            ok = outcome.kind == entry["kind"]
            if entry.get("residue_name"):
                got += f" -> {outcome.residue_name}"
                ok = ok and outcome.residue_name == entry["residue_name"]
            if entry["kind"] == "Reflection":
                turned = outcome.residue_heading not in (None, entry["projectile_heading"])
                got += f", heading {outcome.residue_heading}"
                ok = ok and turned
        except Exception as e:  # noqa: BLE001
            got, ok = f"error: {e}", False
        rows.append((name, got, ok))
    return rows


def _replay_reaction(entry: dict):
    target = parse_rle(entry["target_rle"])
    t = oracles.HEADING_TRANSFORM[entry["projectile_heading"]]
    proj = Placement(
        builtin("glider"),
        tuple(entry["offset"]),
        t,
        entry["phase"],
    )
    return classify_collision(
        Placement(target, (0, 0)), proj, horizon=entry.get("horizon", 400)
    )


def _print_table(rows):
    width = max(len(r[0]) for r in rows)
    for name, got, ok in rows:
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  {got}")


# -- discover -------------------------------------------------------------


def discover(spec_path: Path, out_dir: Path) -> int:
    spec = json.loads(spec_path.read_text())
    target = (
        builtin(spec["target"])
        if isinstance(spec["target"], str)
        else parse_rle(spec["target"]["rle"])
    )
    search = SearchSpec(
        target=target,
        projectile_heading=spec["projectile_heading"],
        offsets=Region(*spec["offsets"]),
        phases=tuple(spec.get("phases", (0, 1, 2, 3))),
        horizon=spec.get("horizon", 400),
        want_kind=spec.get("want_kind", "Annihilation"),
        want_residue=spec.get("want_residue"),
        want_heading=spec.get("want_heading"),
    )
    matches = search_reactions(search)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "reactions.json"
    catalog = json.loads(path.read_text()) if path.exists() else {}
    if matches:
        offset, phase, outcome = matches[0]
        catalog[spec["name"]] = {
            "target": spec["target"] if isinstance(spec["target"], str) else "inline",
            "target_rle": emit_rle(target),
            "projectile_heading": search.projectile_heading,
            "offset": list(offset),
            "phase": phase,
            "kind": outcome.kind,
            "settle_generation": outcome.settle_generation,
            "residue_name": outcome.residue_name,
            "residue_heading": outcome.residue_heading,
            "horizon": search.horizon,
            "match_count": len(matches),
        }
    path.write_text(json.dumps(catalog, sort_keys=True, indent=1) + "\n")
    print(f"{spec['name']}: {len(matches)} matches")
    return 0


# -- entry point ----------------------------------------------------------


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="lifelab")
    sub = ap.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run a scenario file")
    runp.add_argument("scenario", type=Path)
    runp.add_argument("--out", type=Path, default=Path("."))
    runp.add_argument("--frames", default="", help="comma-separated generations")
    runp.add_argument("--seed-config", default=None)

    sub.add_parser("validate", help="oracle-check builtin assets and reactions")

    disc = sub.add_parser("discover", help="run a reaction search")
    disc.add_argument("spec", type=Path)
    disc.add_argument("--out", type=Path, default=Path("."))

    args = ap.parse_args(argv)
    if args.command == "run":
        try:
            scenario = _parse_scenario(args.scenario)
            frames = [int(g) for g in args.frames.split(",") if g.strip()]
            return run_scenario(scenario, args.out, frames, args.seed_config)
        except (ResetError, ValueError) as e:
            print(f"error: {e}", file=sys.stderr)
            return 2
    if args.command == "validate":
        rows = validate_assets()
        _print_table(rows)
        return 0 if all(ok for _, _, ok in rows) else 1
    if args.command == "discover":
        return discover(args.spec, args.out)
    return 2


if __name__ == "__main__":
    sys.exit(main())
