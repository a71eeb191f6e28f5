"""Wire protocol: length-delimited JSON messages over a byte stream.

Every message is one JSON object prefixed by a 4-byte big-endian length.
The object always carries a "type" field. Types sent by the service:
hello, step_record, threshold_ack, msx_reply, error. Types accepted from
clients: set_threshold, msx_request, pause, resume.

The same canonical JSON encoding is used for trace files (one object per
line), so a replayed trace and a live stream are byte-comparable.
"""

from __future__ import annotations

import json
import socket
import struct

from .errors import DataError

SCHEMA_VERSION = 1

MAX_MESSAGE_BYTES = 16 * 1024 * 1024

_LEN = struct.Struct(">I")


def canonical_json(obj: dict) -> str:
    """Deterministic serialization: sorted keys, no whitespace."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def encode_message(obj: dict) -> bytes:
    payload = canonical_json(obj).encode("utf-8")
    if len(payload) > MAX_MESSAGE_BYTES:
        raise DataError(f"message too large: {len(payload)} bytes")
    return _LEN.pack(len(payload)) + payload


def decode_payload(payload: bytes) -> dict:
    try:
        obj = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DataError(f"malformed message payload: {exc}") from exc
    if not isinstance(obj, dict) or "type" not in obj:
        raise DataError("message must be a JSON object with a 'type' field")
    return obj


def hello_message(mode: str) -> dict:
    return {"type": "hello", "schema_version": SCHEMA_VERSION, "mode": mode}


class MessageSocket:
    """Blocking framed-message reader/writer over a connected socket."""

    def __init__(self, sock: socket.socket):
        self.sock = sock

    def send(self, obj: dict) -> None:
        self.sock.sendall(encode_message(obj))

    def _recv_exact(self, n: int) -> bytes | None:
        chunks = []
        remaining = n
        while remaining > 0:
            chunk = self.sock.recv(remaining)
            if not chunk:
                return None
            chunks.append(chunk)
            remaining -= len(chunk)
        return b"".join(chunks)

    def recv(self) -> dict | None:
        """Next message, or None on orderly EOF at a frame boundary."""
        header = self._recv_exact(_LEN.size)
        if header is None:
            return None
        (length,) = _LEN.unpack(header)
        if length > MAX_MESSAGE_BYTES:
            raise DataError(f"incoming frame too large: {length} bytes")
        payload = self._recv_exact(length)
        if payload is None:
            raise DataError("connection closed mid-frame")
        return decode_payload(payload)

    def close(self) -> None:
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.sock.close()
