"""Interactive session host: line-delimited JSON over TCP.

One bidirectional stream per client; every message is a single JSON object
on its own line with a ``v`` (schema version) and ``type`` field. See
docs/protocol.md for byte-exact examples.

Server -> client message types: ``created``, ``status``, ``frame``,
``event``, ``rejected``, ``error``.
Client -> server message types: ``create``, ``subscribe``, ``action``,
``control``.

Each session owns exactly one authoritative stepping loop; actions are
queued and applied at generation boundaries, never mid-step. Frames may
skip generations under load, but events are never dropped and always
arrive in generation order.
"""

from __future__ import annotations

import argparse
import asyncio
import itertools
import json
import sys

from . import failover
from .cli import _load_config, dump_frame
from .failover import (
    ResetError,
    Session,
    init,
    kill_primary,
    reset_backup,
    step_session,
)
from .patterns import Pattern, emit_rle

V = 1

#: Stepping-loop tick length while playing.
TICK = 0.05


def _frame_rle(session: Session) -> str:
    return dump_frame(session.grid)


class HostedSession:
    """A session plus its subscribers, pacing state, and action queue."""

    def __init__(self, sid: str, session: Session):
        self.sid = sid
        self.session = session
        self.subscribers: set[asyncio.StreamWriter] = set()
        self.playing = False
        self.speed = 92.0  # generations per second
        self.actions: asyncio.Queue = asyncio.Queue()
        self.sent_events = 0
        self._step_debt = 0.0
        self.task: asyncio.Task | None = None

    # -- message builders ----------------------------------------------

    def status_msg(self) -> dict:
        s = self.session
        period = s.config.gun_period
        rem = (-s.generation) % period
        return {
            "v": V,
            "type": "status",
            "session": self.sid,
            "state": "running" if self.playing else "paused",
            "speed": self.speed,
            "generation": s.generation,
            "backup_role": (
                "Standby" if not s.failover_fired else "ActingPrimary"
            ),
            "next_reset_gen": s.generation + rem,
        }

    def frame_msg(self) -> dict:
        s = self.session
        return {
            "v": V,
            "type": "frame",
            "session": self.sid,
            "generation": s.generation,
            "width": s.config.width,
            "height": s.config.height,
            "rle": _frame_rle(s),
        }

    def event_msgs(self) -> list[dict]:
        events = self.session.events
        if self.sent_events > len(events):  # log was reset by Init
            self.sent_events = 0
        out = []
        for e in events[self.sent_events :]:
            out.append(
                {
                    "v": V,
                    "type": "event",
                    "session": self.sid,
                    "generation": e.generation,
                    "kind": e.kind,
                    "section": e.section,
                    "detail": e.detail,
                }
            )
        self.sent_events = len(events)
        return out

    # -- fan-out ---------------------------------------------------------

    def broadcast(self, msgs: list[dict]):
        if not msgs:
            return
        data = "".join(json.dumps(m, sort_keys=True) + "\n" for m in msgs).encode()
        for w in list(self.subscribers):
            try:
                w.write(data)
            except ConnectionError:
                self.subscribers.discard(w)

    def flush_state(self, extra: list[dict] | None = None):
        msgs = self.event_msgs()
        msgs.append(self.frame_msg())
        msgs.append(self.status_msg())
        if extra:
            msgs.extend(extra)
        self.broadcast(msgs)

    # -- the authoritative loop ------------------------------------------

    def _drain_actions(self) -> list[dict]:
        rejections = []
        while not self.actions.empty():
            msg, reply_to = self.actions.get_nowait()
            try:
                self._apply(msg)
            except (ResetError, ValueError, KeyError) as e:
                rejections.append(
                    {
                        "v": V,
                        "type": "rejected",
                        "session": self.sid,
                        "action": msg.get("name"),
                        "reason": str(e),
                    }
                )
        return rejections

    def _apply(self, msg: dict):
        name = msg.get("name")
        if name == "Init":
            init(self.session)
        elif name == "KillPrimary":
            kill_primary(self.session)
        elif name == "ResetBackup":
            reset_backup(self.session, force=bool(msg.get("force", False)))
        else:
            raise ValueError(f"unknown action {name!r}")

    async def run(self):
        while True:
            rejections = self._drain_actions()
            stepped = 0
            if self.playing:
                self._step_debt += self.speed * TICK
                n = int(self._step_debt)
                self._step_debt -= n
                if n:
                    step_session(self.session, n)
                    stepped = n
            if rejections or stepped or not self.actions.empty():
                self.flush_state(rejections)
            elif self.subscribers and self.session.events[self.sent_events :]:
                self.flush_state()
            await asyncio.sleep(TICK)

    def apply_now(self, msg: dict) -> list[dict]:
        """Queue an action and synchronously drain at this boundary."""
        self.actions.put_nowait((msg, None))
        rejections = self._drain_actions()
        self.flush_state(rejections)
        return rejections


class Server:
    def __init__(self):
        self.sessions: dict[str, HostedSession] = {}
        self._ids = itertools.count(1)

    def create(self, config_ref) -> HostedSession:
        config = _load_config(config_ref)
        session = Session(config)
        init(session)
        sid = f"s{next(self._ids)}"
        hosted = HostedSession(sid, session)
        self.sessions[sid] = hosted
        hosted.task = asyncio.get_running_loop().create_task(hosted.run())
        return hosted

    async def handle_client(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        try:
            async for line in _lines(reader):
                try:
                    msg = json.loads(line)
                except json.JSONDecodeError:
                    _send(writer, {"v": V, "type": "error", "reason": "bad json"})
                    continue
                await self.dispatch(msg, writer)
                await writer.drain()
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            for hosted in self.sessions.values():
                hosted.subscribers.discard(writer)
            writer.close()

    async def dispatch(self, msg: dict, writer: asyncio.StreamWriter):
        mtype = msg.get("type")
        if mtype == "create":
            hosted = self.create(msg.get("config", "builtin"))
            _send(writer, {"v": V, "type": "created", "session": hosted.sid})
            _send(writer, hosted.status_msg())
            return
        hosted = self.sessions.get(msg.get("session", ""))
        if hosted is None:
            _send(writer, {"v": V, "type": "error", "reason": "unknown session"})
            return
        if mtype == "subscribe":
            hosted.subscribers.add(writer)
            _send(writer, hosted.frame_msg())
            _send(writer, hosted.status_msg())
        elif mtype == "action":
            was_subscribed = writer in hosted.subscribers
            if not was_subscribed:
                hosted.subscribers.add(writer)
            hosted.apply_now(msg)
            if not was_subscribed:
                hosted.subscribers.discard(writer)
        elif mtype == "control":
            op = msg.get("op")
            if op == "play":
                hosted.playing = True
            elif op == "pause":
                hosted.playing = False
            elif op == "step":
                step_session(hosted.session, int(msg.get("n", 1)))
                hosted.flush_state()
            elif op == "speed":
                hosted.speed = float(msg.get("speed", hosted.speed))
            else:
                _send(writer, {"v": V, "type": "error", "reason": f"unknown op {op!r}"})
                return
            _send(writer, hosted.status_msg())
        else:
            _send(writer, {"v": V, "type": "error", "reason": f"unknown type {mtype!r}"})


async def _lines(reader: asyncio.StreamReader):
    while True:
        line = await reader.readline()
        if not line:
            return
        if line.strip():
            yield line


def _send(writer: asyncio.StreamWriter, msg: dict):
    writer.write((json.dumps(msg, sort_keys=True) + "\n").encode())


async def serve(host: str, port: int) -> asyncio.AbstractServer:
    server = Server()
    return await asyncio.start_server(server.handle_client, host, port)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="lifelab-service")
    ap.add_argument("--listen", default="127.0.0.1:7199", help="host:port")
    args = ap.parse_args(argv)
    host, _, port = args.listen.rpartition(":")

    async def run():
        srv = await serve(host or "127.0.0.1", int(port))
        addrs = ", ".join(str(s.getsockname()) for s in srv.sockets)
        print(f"listening on {addrs}", flush=True)
        async with srv:
            await srv.serve_forever()

    try:
        asyncio.run(run())
    except KeyboardInterrupt:
        pass
    return 0


if __name__ == "__main__":
    sys.exit(main())
