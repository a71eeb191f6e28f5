"""Wire-framing tests over an in-process socket pair."""

import socket
import struct

import pytest

from dinerl.errors import DataError
from dinerl.protocol import (
    MAX_MESSAGE_BYTES,
    MessageSocket,
    canonical_json,
    decode_payload,
    encode_message,
    hello_message,
)


def test_canonical_json_is_sorted_and_compact():
    assert canonical_json({"b": 1, "a": [1.5, None]}) == '{"a":[1.5,null],"b":1}'


def test_canonical_json_float_roundtrip():
    value = 0.1 + 0.2  # not representable as "0.3"
    out = canonical_json({"x": value})
    import json

    assert json.loads(out)["x"] == value


def test_encode_prepends_big_endian_length():
    blob = encode_message({"type": "ping"})
    (length,) = struct.unpack(">I", blob[:4])
    assert length == len(blob) - 4
    assert decode_payload(blob[4:]) == {"type": "ping"}


def test_decode_rejects_non_object_and_missing_type():
    with pytest.raises(DataError):
        decode_payload(b"[1,2]")
    with pytest.raises(DataError):
        decode_payload(b'{"a":1}')
    with pytest.raises(DataError):
        decode_payload(b"\xff\xfe")


def test_socket_roundtrip_and_eof():
    a, b = socket.socketpair()
    left, right = MessageSocket(a), MessageSocket(b)
    left.send({"type": "hello", "n": 1})
    left.send(hello_message("live"))
    assert right.recv() == {"type": "hello", "n": 1}
    msg = right.recv()
    assert msg["type"] == "hello" and msg["mode"] == "live"
    left.close()
    assert right.recv() is None  # clean EOF
    right.close()


def test_socket_reassembles_split_frames():
    a, b = socket.socketpair()
    right = MessageSocket(b)
    blob = encode_message({"type": "x", "pad": "y" * 5000})
    for i in range(0, len(blob), 777):  # dribble the frame through in pieces
        a.sendall(blob[i : i + 777])
    assert right.recv()["pad"] == "y" * 5000
    a.close()
    right.close()


def test_socket_rejects_oversized_frame():
    a, b = socket.socketpair()
    right = MessageSocket(b)
    a.sendall(struct.pack(">I", MAX_MESSAGE_BYTES + 1))
    with pytest.raises(DataError):
        right.recv()
    a.close()
    right.close()


def test_socket_truncated_frame_raises():
    # dying mid-frame is corruption, not a clean shutdown
    a, b = socket.socketpair()
    right = MessageSocket(b)
    a.sendall(struct.pack(">I", 100) + b'{"type"')
    a.close()
    with pytest.raises(DataError):
        right.recv()
    right.close()
