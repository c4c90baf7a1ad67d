import asyncio
import json


from lifelab.service import serve


async def _client(port):
    return await asyncio.open_connection("127.0.0.1", port)


async def _send(writer, msg):
    writer.write((json.dumps(msg) + "\n").encode())
    await writer.drain()


async def _recv(reader):
    line = await asyncio.wait_for(reader.readline(), timeout=10)
    assert line, "server closed the stream"
    return json.loads(line)


async def _recv_until(reader, mtype, limit=200):
    for _ in range(limit):
        msg = await _recv(reader)
        if msg["type"] == mtype:
            return msg
    raise AssertionError(f"no {mtype!r} message within {limit} lines")


def run(coro):
    return asyncio.run(coro)


async def _start():
    srv = await serve("127.0.0.1", 0)
    port = srv.sockets[0].getsockname()[1]
    return srv, port


def test_create_and_step():
    async def body():
        srv, port = await _start()
        reader, writer = await _client(port)
        await _send(writer, {"v": 1, "type": "create", "config": "builtin"})
        created = await _recv(reader)
        assert created["type"] == "created"
        sid = created["session"]
        status = await _recv(reader)
        assert status["type"] == "status"
        assert status["generation"] == 0
        assert status["backup_role"] == "Standby"

        await _send(writer, {"v": 1, "type": "subscribe", "session": sid})
        frame = await _recv(reader)
        assert frame["type"] == "frame" and frame["width"] == 420

        await _send(
            writer, {"v": 1, "type": "control", "session": sid, "op": "step", "n": 92}
        )
        status = await _recv_until(reader, "status")
        while status["generation"] < 92:
            status = await _recv_until(reader, "status")
        assert status["generation"] == 92
        assert status["next_reset_gen"] == 92

        writer.close()
        srv.close()
        await srv.wait_closed()

    run(body())


def test_reset_gating_and_kill():
    async def body():
        srv, port = await _start()
        reader, writer = await _client(port)
        await _send(writer, {"v": 1, "type": "create", "config": "builtin"})
        created = await _recv(reader)
        sid = created["session"]
        await _recv(reader)  # status
        await _send(writer, {"v": 1, "type": "subscribe", "session": sid})
        await _recv(reader)  # frame
        await _recv(reader)  # status

        # off-boundary reset without force is rejected
        await _send(
            writer,
            {"v": 1, "type": "control", "session": sid, "op": "step", "n": 46},
        )
        await _send(
            writer,
            {"v": 1, "type": "action", "session": sid, "name": "ResetBackup"},
        )
        rej = await _recv_until(reader, "rejected")
        assert rej["action"] == "ResetBackup"

        # kill works anywhere; failover completes within the bound
        await _send(
            writer,
            {"v": 1, "type": "action", "session": sid, "name": "KillPrimary"},
        )
        await _send(
            writer,
            {"v": 1, "type": "control", "session": sid, "op": "step", "n": 900},
        )
        done = None
        for _ in range(2000):
            msg = await _recv(reader)
            if msg["type"] == "event" and msg["kind"] == "FailoverComplete":
                done = msg
                break
        assert done is not None
        assert done["section"] == "backup"

        writer.close()
        srv.close()
        await srv.wait_closed()

    run(body())


def test_unknown_session_and_bad_json():
    async def body():
        srv, port = await _start()
        reader, writer = await _client(port)
        writer.write(b"this is not json\n")
        await writer.drain()
        err = await _recv(reader)
        assert err["type"] == "error" and err["reason"] == "bad json"
        await _send(writer, {"v": 1, "type": "subscribe", "session": "nope"})
        err = await _recv(reader)
        assert err["type"] == "error" and err["reason"] == "unknown session"
        writer.close()
        srv.close()
        await srv.wait_closed()

    run(body())


def test_service_matches_cli_event_log(tmp_path):
    """The same timed actions produce identical event sequences by both paths."""
    import json as _json

    from lifelab.cli import run_scenario

    kill_at = 2 * 92
    total = 10 * 92
    scenario = {
        "generations": total,
        "actions": [{"at": kill_at, "name": "KillPrimary"}],
        "outputs": {"event_log": "events.jsonl"},
    }
    run_scenario(scenario, tmp_path)
    cli_events = [
        _json.loads(line)
        for line in (tmp_path / "events.jsonl").read_text().splitlines()
    ]

    async def body():
        srv, port = await _start()
        reader, writer = await _client(port)
        await _send(writer, {"v": 1, "type": "create", "config": "builtin"})
        sid = (await _recv(reader))["session"]
        await _recv(reader)  # status
        await _send(writer, {"v": 1, "type": "subscribe", "session": sid})

        events = []

        async def pump_until(gen):
            while True:
                msg = await _recv(reader)
                if msg["type"] == "event":
                    events.append(msg)
                elif msg["type"] == "status" and msg["generation"] >= gen:
                    return

        await _send(
            writer,
            {"v": 1, "type": "control", "session": sid, "op": "step", "n": kill_at},
        )
        await pump_until(kill_at)
        await _send(
            writer, {"v": 1, "type": "action", "session": sid, "name": "KillPrimary"}
        )
        await _send(
            writer,
            {
                "v": 1,
                "type": "control",
                "session": sid,
                "op": "step",
                "n": total - kill_at,
            },
        )
        await pump_until(total)
        writer.close()
        srv.close()
        await srv.wait_closed()
        return events

    service_events = run(body())
    got = [(e["generation"], e["kind"], e["section"]) for e in service_events]
    want = [(e["generation"], e["kind"], e["section"]) for e in cli_events]
    assert got == want
