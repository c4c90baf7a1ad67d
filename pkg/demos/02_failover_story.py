#!/usr/bin/env python3
"""The whole failover story in one run.

Acts:
  1. healthy operation -- both sections exchange glider heartbeats
  2. the primary dies -- its entire half of the grid is cleared
  3. the backup notices and takes over (its blinker activates)
  4. at the next 92-generation boundary the dead section is rebuilt
     and becomes the new standby

The script prints each monitor event as it happens, then checks the
measured failover latency against the configured bound.
"""

from lifelab.cli import load_builtin_config
from lifelab.failover import (
    FAILOVER_COMPLETE,
    Session,
    blinker_state,
    failover_bound,
    init,
    kill_primary,
    reset_backup,
    step_session,
)

PERIOD = 92


def drain(session, seen):
    for e in session.events[seen:]:
        where = f" [{e.section}]" if e.section else ""
        what = f" {e.detail}" if e.detail else ""
        print(f"  gen {e.generation:5d}  {e.kind}{where}{what}")
    return len(session.events)


def main():
    cfg = load_builtin_config()
    session = Session(cfg)
    init(session)
    seen = 0

    print("== act 1: healthy operation (5 heartbeat periods) ==")
    step_session(session, 5 * PERIOD)
    seen = drain(session, seen)
    print(f"  primary blinker: {blinker_state(session, 'primary')}, "
          f"backup blinker: {blinker_state(session, 'backup')}")

    print("\n== act 2: the primary dies ==")
    bound = failover_bound(cfg, session)
    killed_at = session.generation
    print(f"  killing at generation {killed_at}; "
          f"guaranteed takeover within {bound} generations")
    kill_primary(session)
    seen = drain(session, seen)

    print("\n== act 3: the backup takes over ==")
    while not session.failover_fired:
        step_session(session, 1)
    seen = drain(session, seen)
    done = [e for e in session.events if e.kind == FAILOVER_COMPLETE][-1]
    latency = done.generation - killed_at
    verdict = "within" if latency <= bound else "EXCEEDS"
    print(f"  measured latency: {latency} generations ({verdict} the bound)")

    print("\n== act 4: rebuild the dead section as the new standby ==")
    step_session(session, (-session.generation) % PERIOD)
    print(f"  resetting at generation {session.generation} "
          f"(a multiple of {PERIOD})")
    reset_backup(session)
    step_session(session, 5 * PERIOD)
    seen = drain(session, seen)
    print(f"  acting: {session.acting}, standby: {session.standby}; "
          f"standby blinker {blinker_state(session, session.standby)}")


if __name__ == "__main__":
    main()
