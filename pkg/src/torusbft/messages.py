"""Wire messages for the broadcast protocol and their canonical serialization.

The message alphabet is closed: goNorth, goEast, goWest, goSouth, done,
plus the frame envelope used by the fixed-message-size transport.  Every
message carries an instance tag so two protocol instances can share the
links without confusion (tag 0 for a standalone broadcast run).

Values are opaque: any hashable Python object with equality.  Column
payloads are tuples of (value, id) pairs; a column of None stands for a
reconstructed entry whose data is unknown (the bottom element).  Two
bottom columns compare equal exactly when the surrounding (l, id, r)
fields match, which plain dataclass equality gives us for free.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

GO_NORTH = "goNorth"
GO_EAST = "goEast"
GO_WEST = "goWest"
GO_SOUTH = "goSouth"
DONE = "done"
FRAME = "frame"

Pair = tuple[Any, int]
Column = tuple[Pair, ...]
Matrix = tuple  # tuple of Column-or-None


@dataclass(frozen=True)
class RowEntry:
    """One East-West record: a column plus the sender's own ring context."""

    column: Column | None
    left: int
    id: int
    right: int


@dataclass(frozen=True)
class Frame:
    """Constant-size block of a fragmented logical message."""

    kind: str
    origin: int
    stream: int
    seq: int
    total: int
    block: Any
    header: Any = None


@dataclass(frozen=True)
class Message:
    kind: str
    instance: int = 0
    value: Any = None
    origin: int | None = None
    entry: RowEntry | None = None
    matrix: Matrix | None = None
    frame: Frame | None = None


def go_north(value: Any, origin: int, instance: int = 0) -> Message:
    return Message(kind=GO_NORTH, instance=instance, value=value, origin=origin)


def go_east(entry: RowEntry, instance: int = 0) -> Message:
    return Message(kind=GO_EAST, instance=instance, entry=entry)


def go_west(entry: RowEntry, instance: int = 0) -> Message:
    return Message(kind=GO_WEST, instance=instance, entry=entry)


def go_south(matrix: Matrix, origin: int, instance: int = 0) -> Message:
    return Message(kind=GO_SOUTH, instance=instance, matrix=matrix, origin=origin)


def done(instance: int = 0) -> Message:
    return Message(kind=DONE, instance=instance)


def frame_message(frame: Frame, instance: int = 0) -> Message:
    return Message(kind=FRAME, instance=instance, frame=frame)


def jsonable(obj: Any) -> Any:
    """Lossy-but-stable view of an arbitrary payload for digests and traces."""
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, bytes):
        return {"bytes": obj.hex()}
    if isinstance(obj, RowEntry):
        return {
            "column": jsonable(obj.column),
            "left": obj.left,
            "id": obj.id,
            "right": obj.right,
        }
    if isinstance(obj, Frame):
        return {
            "kind": obj.kind,
            "origin": obj.origin,
            "stream": obj.stream,
            "seq": obj.seq,
            "total": obj.total,
            "block": jsonable(obj.block),
            "header": jsonable(obj.header),
        }
    if isinstance(obj, Message):
        out = {"kind": obj.kind, "instance": obj.instance}
        for name in ("value", "origin", "entry", "matrix", "frame"):
            v = getattr(obj, name)
            if v is not None:
                out[name] = jsonable(v)
        return out
    if isinstance(obj, (tuple, list)):
        return [jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    return {"repr": repr(obj)}


def payload_digest(obj: Any) -> str:
    blob = json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]
