#!/usr/bin/env python3
"""Why resets are only legal every 92 generations.

The surviving section's guns return to their generation-0 phase every 92
generations, so a section rebuilt at exactly such a boundary lines up with
the live streams by construction. Rebuilt at any other moment, its
streams are mistimed: the collisions that should annihilate cleanly miss,
and the monitor reports DesyncDetected.

This script first performs a correct reset, then a forced off-schedule
one, and prints the monitor's verdict for both.
"""

from lifelab.cli import load_builtin_config
from lifelab.failover import (
    DESYNC_DETECTED,
    ResetError,
    Session,
    init,
    kill_primary,
    reset_backup,
    step_session,
)

PERIOD = 92


def fail_over(session):
    step_session(session, PERIOD)
    kill_primary(session)
    while not session.failover_fired:
        step_session(session, 1)


def desyncs_within(session, generations):
    start = session.generation
    step_session(session, generations)
    return [
        e for e in session.events
        if e.generation > start and e.kind == DESYNC_DETECTED
    ]


def main():
    cfg = load_builtin_config()

    print("== correct reset, on the 92-generation schedule ==")
    session = Session(cfg)
    init(session)
    fail_over(session)
    step_session(session, (-session.generation) % PERIOD)
    reset_backup(session)
    hits = desyncs_within(session, 6 * PERIOD)
    print(f"  reset at generation {session.generation - 6 * PERIOD}; "
          f"desync events in the next 6 periods: {len(hits)}")

    print("\n== off-schedule reset is refused without force ==")
    session = Session(cfg)
    init(session)
    fail_over(session)
    step_session(session, (-session.generation) % PERIOD + 46)
    try:
        reset_backup(session)
    except ResetError as e:
        print(f"  refused: {e}")

    print("\n== forced off-schedule resets ==")
    for offset in (4, 46):
        session = Session(cfg)
        init(session)
        fail_over(session)
        step_session(session, (-session.generation) % PERIOD + offset)
        reset_at = session.generation
        reset_backup(session, force=True)
        hits = desyncs_within(session, 3 * PERIOD)
        when = f"after {hits[0].generation - reset_at} generations" if hits else "never"
        print(f"  offset +{offset:2d}: DesyncDetected {when}")


if __name__ == "__main__":
    main()
