import json

import pytest

from lifelab.cli import (
    dump_frame,
    load_builtin_config,
    load_frame,
    main,
    run_scenario,
    validate_assets,
)
from lifelab.engine import Grid


def test_validate_assets_all_pass():
    rows = validate_assets()
    assert rows, "no rows produced"
    bad = [(n, got) for n, got, ok in rows if not ok]
    assert not bad, bad


def test_frame_round_trip():
    cfg = load_builtin_config()
    grid = Grid.from_cells(cfg.width, cfg.height, cfg.init_cells(), generation=7)
    text = dump_frame(grid)
    back = load_frame(text)
    assert back.generation == 7
    assert (back.width, back.height) == (grid.width, grid.height)
    assert back.live_cells() == grid.live_cells()


def test_run_scenario_healthy(tmp_path):
    scenario = {
        "generations": 3 * 92,
        "actions": [],
        "outputs": {"event_log": "events.jsonl", "metrics": "metrics.json"},
    }
    rc = run_scenario(scenario, tmp_path)
    assert rc == 0
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["violations"] == []
    assert metrics["heartbeat_counts"]["primary"] >= 2
    assert metrics["heartbeat_counts"]["backup"] >= 2
    lines = (tmp_path / "events.jsonl").read_text().splitlines()
    assert all(json.loads(line)["kind"] for line in lines)


def test_run_scenario_kill_and_frames(tmp_path):
    scenario = {
        "generations": 10 * 92,
        "actions": [{"at": 2 * 92, "name": "KillPrimary"}],
        "outputs": {
            "event_log": "events.jsonl",
            "frames": [0, 2 * 92],
            "metrics": "metrics.json",
        },
    }
    rc = run_scenario(scenario, tmp_path)
    assert rc == 0
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert len(metrics["failovers"]) == 1
    f = metrics["failovers"][0]
    assert f["kill_generation"] == 2 * 92
    assert f["latency"] <= f["bound"]
    for g in (0, 2 * 92):
        frame = (tmp_path / f"frame_{g:06d}.rle").read_text()
        assert f"generation={g}" in frame


def test_run_scenario_rejects_bad_actions(tmp_path):
    cases = [
        {"generations": 92, "actions": [{"at": 10, "name": "Explode"}]},
        {"generations": 92, "actions": [{"at": 500, "name": "KillPrimary"}]},
        {
            "generations": 200,
            "actions": [
                {"at": 100, "name": "KillPrimary"},
                {"at": 50, "name": "Init"},
            ],
        },
    ]
    for s in cases:
        path = tmp_path / "s.json"
        path.write_text(json.dumps(s))
        assert main(["run", str(path), "--out", str(tmp_path)]) == 2


def test_main_validate_exit_code():
    assert main(["validate"]) == 0


def test_discover_merges_catalog(tmp_path):
    spec = {
        "name": "glider_glider_head_on",
        "target": "glider",
        "projectile_heading": "NE",
        "offsets": [-5, -4, -1, 0],
        "phases": [0, 1, 2, 3],
        "horizon": 200,
        "want_kind": "Annihilation",
    }
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    assert main(["discover", str(spec_path), "--out", str(tmp_path)]) == 0
    first = (tmp_path / "reactions.json").read_bytes()
    assert main(["discover", str(spec_path), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "reactions.json").read_bytes() == first
    catalog = json.loads(first)
    assert catalog["glider_glider_head_on"]["kind"] == "Annihilation"
