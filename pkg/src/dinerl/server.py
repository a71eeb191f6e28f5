"""Telemetry service: streams step records to clients, accepts control messages.

Fan-out model: the control loop (or trace replayer) runs in one thread and
pushes each record into the server sink; every subscribed client has its own
outbound queue drained by a writer thread, so a slow client cannot stall the
loop. Late subscribers first receive a backlog snapshot (last 500 records).

Inbound control messages cross to the loop thread via a ControlBus and are
applied only between steps.
"""

from __future__ import annotations

import json
import queue
import socket
import threading
import time
from collections import deque

import numpy as np

from . import dine
from .errors import DataError, UndefinedInputError
from .protocol import MessageSocket, decode_payload, hello_message
from .swimsim import ACTION_NAMES, CHANNEL_NAMES

BACKLOG_DEPTH = 500


class ControlBus:
    """Queued control messages plus their reply channels, applied between steps."""

    def __init__(self):
        self._queue: queue.Queue = queue.Queue()

    def submit(self, reply, message: dict) -> None:
        self._queue.put((reply, message))

    def service(self, loop) -> None:
        """Handle all pending messages; block briefly while the loop is paused."""
        while True:
            try:
                if loop.paused:
                    reply, message = self._queue.get(timeout=0.1)
                else:
                    reply, message = self._queue.get_nowait()
            except queue.Empty:
                return
            self._dispatch(loop, reply, message)

    def _dispatch(self, loop, reply, message: dict) -> None:
        kind = message.get("type")
        try:
            if kind == "set_threshold":
                which = message["kind"]
                value = float(message["value"])
                effective = loop.set_threshold(which, value)
                reply({
                    "type": "threshold_ack",
                    "kind": which,
                    "value": value,
                    "effective_from_step": effective,
                })
            elif kind == "msx_request":
                reply(loop.explanation_for_step(int(message["step"])))
            elif kind == "pause":
                loop.paused = True
            elif kind == "resume":
                loop.paused = False
            else:
                reply({"type": "error", "message": f"unknown message type: {kind!r}"})
        except (UndefinedInputError, DataError, KeyError, TypeError, ValueError) as exc:
            reply({"type": "error", "message": str(exc)})


class _Client:
    def __init__(self, conn: socket.socket, server: "TelemetryServer"):
        self.msock = MessageSocket(conn)
        self.server = server
        self.outbox: queue.Queue = queue.Queue()
        self.alive = True
        self._writer = threading.Thread(target=self._write_loop, daemon=True)
        self._reader = threading.Thread(target=self._read_loop, daemon=True)

    def start(self) -> None:
        self._writer.start()
        self._reader.start()

    def enqueue(self, message: dict) -> None:
        if self.alive:
            self.outbox.put(message)

    def _write_loop(self) -> None:
        while True:
            message = self.outbox.get()
            if message is None or not self.alive:
                break
            try:
                self.msock.send(message)
            except OSError:
                break
        self._drop()

    def _read_loop(self) -> None:
        while self.alive:
            try:
                message = self.msock.recv()
            except (OSError, DataError):
                break
            if message is None:
                break
            self.server.bus.submit(self.enqueue, message)
        self._drop()

    def _drop(self) -> None:
        if self.alive:
            self.alive = False
            self.outbox.put(None)
            self.server._detach(self)
            self.msock.close()


class TelemetryServer:
    """Accepts clients, replays the backlog to them, then fans out live records."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0, mode: str = "live"):
        self.mode = mode
        self.bus = ControlBus()
        self._lock = threading.Lock()
        self._clients: list[_Client] = []
        self._backlog: deque[dict] = deque(maxlen=BACKLOG_DEPTH)
        self._listener = socket.create_server((host, port))
        self.host, self.port = self._listener.getsockname()[:2]
        self._accepting = False
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)

    def start(self) -> "TelemetryServer":
        self._accepting = True
        self._accept_thread.start()
        return self

    def has_clients(self) -> bool:
        with self._lock:
            return bool(self._clients)

    def record_sink(self, message: dict) -> None:
        """Called from the loop thread for every emitted record."""
        with self._lock:
            self._backlog.append(message)
            clients = list(self._clients)
        for client in clients:
            client.enqueue(message)

    def _accept_loop(self) -> None:
        while self._accepting:
            try:
                conn, _ = self._listener.accept()
            except OSError:
                break
            client = _Client(conn, self)
            client.enqueue(hello_message(self.mode))
            with self._lock:
                for message in self._backlog:
                    client.enqueue(message)
                self._clients.append(client)
            client.start()

    def _detach(self, client: _Client) -> None:
        with self._lock:
            if client in self._clients:
                self._clients.remove(client)

    def stop(self) -> None:
        self._accepting = False
        try:
            self._listener.close()
        except OSError:
            pass
        with self._lock:
            clients = list(self._clients)
        for client in clients:
            client.alive = False
            client.outbox.put(None)
            client.msock.close()


class TraceReplayer:
    """Serves a recorded trace as if live; thresholds remain adjustable.

    A raised rho is applied by recomputing interaction events from each
    record's stored Q-matrix; a changed phi filters stored extremum events
    by margin. Lowering phi below the recording value cannot reveal events
    that were never recorded.
    """

    def __init__(self, path: str):
        self.header: dict | None = None
        self.records: list[dict] = []
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    message = decode_payload(line.encode("utf-8"))
                except DataError as exc:
                    raise DataError(f"{path}:{line_no}: {exc}") from exc
                if message["type"] == "header":
                    self.header = message
                elif message["type"] == "step_record":
                    self.records.append(message)
        if not self.records:
            raise DataError(f"{path}: no step records")
        self._by_step = {record["step"]: record for record in self.records}
        self._rho: float | None = None
        self._phi: float | None = None
        self._cursor = 0
        self.paused = False
        self.finished = False

    def set_threshold(self, kind: str, value: float) -> int:
        if kind not in ("rho", "phi"):
            raise UndefinedInputError(f"unknown threshold kind: {kind!r}")
        candidate = dine.DineThresholds(
            rho=float(value) if kind == "rho" else (self._rho if self._rho is not None else 0.0),
            phi=float(value) if kind == "phi" else (self._phi if self._phi is not None else 0.0),
        )
        candidate.validate()
        if kind == "rho":
            self._rho = float(value)
        else:
            self._phi = float(value)
        if self._cursor < len(self.records):
            return self.records[self._cursor]["step"]
        return self.records[-1]["step"] + 1

    def explanation_for_step(self, step: int) -> dict:
        record = self._by_step.get(step)
        if record is None:
            raise UndefinedInputError(f"step {step} not in the trace")
        channels = dine.minimal_sufficient_explanation(
            np.array(record["q_values"]), record["action"]
        )
        return {
            "type": "msx_reply",
            "step": step,
            "action": int(record["action"]),
            "action_name": ACTION_NAMES[record["action"]],
            "channels": channels,
            "channel_names": [CHANNEL_NAMES[c] for c in channels],
        }

    def _transform(self, record: dict) -> dict:
        if self._rho is None and self._phi is None:
            return record
        rho = self._rho if self._rho is not None else record["thresholds"]["rho"]
        phi = self._phi if self._phi is not None else record["thresholds"]["phi"]
        events: list[dict] = []
        if self._rho is not None:
            found = dine.detect_important_interactions(
                np.array(record["q_values"]), record["action"], rho, step=record["step"]
            )
            events.extend(
                dine.event_to_dict(e, list(ACTION_NAMES), list(CHANNEL_NAMES)) for e in found
            )
        else:
            events.extend(e for e in record["events"] if e["type"] == "important_interaction")
        for event in record["events"]:
            if event["type"] == "reward_channel_extremum":
                margin = event["margin"]
                if (margin >= phi) if phi > 0 else (margin > 0):
                    events.append(event)
            elif event["type"] == "reward_channel_dominance":
                events.append(event)
        out = dict(record)
        out["events"] = events
        out["thresholds"] = {"rho": rho, "phi": phi}
        return out

    def run(self, record_sink, bus: ControlBus | None = None, rate: float = 0.0) -> int:
        """Stream every record in order; returns the number sent."""
        delay = 1.0 / rate if rate > 0 else 0.0
        sent = 0
        while self._cursor < len(self.records):
            if bus is not None:
                bus.service(self)
                if self.paused:
                    continue
            record = self.records[self._cursor]
            self._cursor += 1
            record_sink(self._transform(record))
            sent += 1
            if delay:
                time.sleep(delay)
        self.finished = True
        return sent


def read_trace(path: str) -> tuple[dict | None, list[dict]]:
    """Load a trace file; returns (header, step records)."""
    header = None
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            message = json.loads(line)
            if message.get("type") == "header":
                header = message
            elif message.get("type") == "step_record":
                records.append(message)
    return header, records
