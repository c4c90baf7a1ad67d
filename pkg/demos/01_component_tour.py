#!/usr/bin/env python3
"""Tour of the component library through the analysis oracles.

Every number printed here is measured by simulation, not hard-coded:
periods and displacements come from detect_period, gun rates from
detect_emission_period, and the three signature reactions are replayed
from the frozen catalog.
"""

import json
from importlib import resources

from lifelab.oracles import (
    HEADING_TRANSFORM,
    classify_collision,
    detect_emission_period,
    detect_period,
)
from lifelab.patterns import BUILTIN_NAMES, Placement, builtin, parse_rle


def main():
    print("== still lifes and oscillators ==")
    for name in ("block", "boat", "blinker", "glider", "passive_blinker"):
        r = detect_period(builtin(name))
        kind = (
            "still life"
            if r.period == 1 and r.displacement == (0, 0)
            else "spaceship"
            if r.displacement != (0, 0)
            else "oscillator"
        )
        print(
            f"  {name:16s} period {r.period}, "
            f"displacement {r.displacement} -> {kind}"
        )

    print("\n== guns ==")
    for name in ("gosper_gun", "p92_gun"):
        print(f"  {name:16s} one glider every "
              f"{detect_emission_period(builtin(name))} generations")

    print("\n== signature reactions (replayed from the catalog) ==")
    catalog = json.loads(
        resources.files("lifelab.assets").joinpath("reactions.json").read_text()
    )
    for name in ("glider_glider_90", "glider_boat", "glider_passive_blinker"):
        e = catalog[name]
        outcome = classify_collision(
            Placement(parse_rle(e["target_rle"]), (0, 0)),
            Placement(
                builtin("glider"),
                tuple(e["offset"]),
                HEADING_TRANSFORM[e["projectile_heading"]],
                e["phase"],
            ),
            horizon=400,
        )
        extra = ""
        if outcome.residue_name:
            extra = f" -> {outcome.residue_name}"
        if outcome.residue_heading:
            extra = f", glider leaves heading {outcome.residue_heading}"
        print(
            f"  {name:24s} {outcome.kind}{extra} "
            f"(settled at generation {outcome.settle_generation})"
        )

    print(f"\nbuiltins available: {', '.join(BUILTIN_NAMES)}")


if __name__ == "__main__":
    main()
