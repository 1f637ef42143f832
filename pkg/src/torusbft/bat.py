"""The all-to-all broadcast state machine.

Four phases, driven entirely by receive actions after the initial send:

* North: send the input up; collect (value, id) pairs from below until
  the own pair comes back, then the column is complete.
* East-West: ship the column in both row directions, accumulate the
  neighbors' columns (head insertion from the left, tail insertion from
  the right), and reconcile the two directions when the own entry
  returns.
* South: a reconciled matrix travels down the column and is adopted by
  anyone still without one.
* Decision: done notes to the horizontal neighbors; stop on the first
  done received once a matrix is held.

Receive actions are link-qualified: a goNorth not arriving from down is
dropped, and likewise for the other kinds, so misrouted adversary
messages die at the transport.  Every handler is total; arbitrary
payloads are stored or forwarded verbatim and judged only by the
East-West reconciliation.
"""

from __future__ import annotations

from typing import Any

from .engine import Behavior, Delivery, RoundResult
from .matching import match_rows
from .messages import (
    DONE,
    GO_EAST,
    GO_NORTH,
    GO_SOUTH,
    GO_WEST,
    Matrix,
    Message,
    RowEntry,
    done,
    go_east,
    go_north,
    go_south,
    go_west,
)
from .topology import DOWN, LEFT, RIGHT, UP, Neighbors

OUTPUT_VIA_MATCH = "match"
OUTPUT_VIA_SOUTH = "south"


class BatProcess:
    """Per-process protocol state for one broadcast instance."""

    def __init__(self, pid: int, neighbors: Neighbors, input_value: Any, instance: int = 0):
        self.pid = pid
        self.neighbors = neighbors
        self.input_value = input_value
        self.instance = instance
        self.column: list[tuple[Any, int]] = []
        self.row_left: list[RowEntry] = []
        self.row_right: list[RowEntry] = []
        self.row_left_rounds: list[int] = []  # arrival annotations, debugging only
        self.row_right_rounds: list[int] = []
        self.matrix: Matrix | None = None
        self.output_via: str | None = None
        self.north_done = False
        self.north_done_round: int | None = None
        self.east_west_done = False
        self.stopped = False

    def self_entry(self) -> RowEntry:
        return RowEntry(
            column=tuple(self.column),
            left=self.neighbors.left,
            id=self.pid,
            right=self.neighbors.right,
        )

    def start(self) -> list[tuple[str, Message]]:
        """Initial action: seed the column and kick off the North Phase."""
        self.column.append((self.input_value, self.pid))
        return [(UP, go_north(self.input_value, self.pid, self.instance))]

    def handle(self, rnd: int, link: str, msg: Message) -> tuple[list, list]:
        """Dispatch one received message; returns (sends, events)."""
        if self.stopped:
            return [], []
        if msg.kind == GO_NORTH and link == DOWN:
            return self._on_go_north(rnd, msg)
        if msg.kind == GO_EAST and link == LEFT and msg.entry is not None:
            return self._on_row_entry(rnd, msg.entry, from_left=True)
        if msg.kind == GO_WEST and link == RIGHT and msg.entry is not None:
            return self._on_row_entry(rnd, msg.entry, from_left=False)
        if msg.kind == GO_SOUTH and link == UP:
            return self._on_go_south(msg)
        if msg.kind == DONE:
            return self._on_done()
        return [], []

    # -- North ----------------------------------------------------------

    def _on_go_north(self, rnd: int, msg: Message) -> tuple[list, list]:
        if self.north_done:
            return [], []
        if msg.origin != self.pid:
            self.column.append((msg.value, msg.origin))
            return [(UP, go_north(msg.value, msg.origin, self.instance))], []
        # own pair returned: the column is complete, open the East-West Phase
        self.north_done = True
        self.north_done_round = rnd
        entry = self.self_entry()
        sends = [
            (RIGHT, go_east(entry, self.instance)),
            (LEFT, go_west(entry, self.instance)),
        ]
        return sends, [{"type": "phase", "instance": self.instance, "name": "north_done"}]

    # -- East-West -------------------------------------------------------

    def _on_row_entry(self, rnd: int, entry: RowEntry, from_left: bool) -> tuple[list, list]:
        if entry.id != self.pid:
            if from_left:
                self.row_left.insert(0, entry)
                self.row_left_rounds.insert(0, rnd)
                return [(RIGHT, go_east(entry, self.instance))], []
            self.row_right.append(entry)
            self.row_right_rounds.append(rnd)
            return [(LEFT, go_west(entry, self.instance))], []

        if self.matrix is None:
            me = self.self_entry()
            m = match_rows([me] + self.row_left, [me] + self.row_right)
            if m:
                return self._take_matrix(m, OUTPUT_VIA_MATCH)
        return [], []

    # -- South -----------------------------------------------------------

    def _on_go_south(self, msg: Message) -> tuple[list, list]:
        if msg.origin == self.pid:
            return [], []
        sends = [(DOWN, go_south(msg.matrix, msg.origin, self.instance))]
        if self.matrix is None and isinstance(msg.matrix, tuple) and msg.matrix:
            more, events = self._take_matrix(msg.matrix, OUTPUT_VIA_SOUTH, announce_south=False)
            return sends + more, events
        return sends, []

    def _take_matrix(self, m: Matrix, via: str, announce_south: bool = True) -> tuple[list, list]:
        self.matrix = m
        self.output_via = via
        events = [{"type": "output", "instance": self.instance, "via": via, "matrix": m}]
        sends = []
        if announce_south:
            sends.append((DOWN, go_south(m, self.pid, self.instance)))
        sends.append((RIGHT, done(self.instance)))
        sends.append((LEFT, done(self.instance)))
        if self.east_west_done:
            self.stopped = True
            events.append({"type": "stop", "instance": self.instance})
        return sends, events

    # -- Decision ----------------------------------------------------------

    def _on_done(self) -> tuple[list, list]:
        if self.east_west_done:
            return [], []
        self.east_west_done = True
        if self.matrix is not None:
            self.stopped = True
            return [], [{"type": "stop", "instance": self.instance}]
        return [], []


class BatBehavior(Behavior):
    """Engine adapter running a single broadcast instance to completion."""

    def __init__(self, proc: BatProcess):
        self.proc = proc

    def on_round(self, rnd: int, batch: list[Delivery]) -> RoundResult:
        result = RoundResult()
        if rnd == 1:
            result.sends.extend(self.proc.start())
        for link, msg in batch:
            if self.proc.stopped:
                break
            if msg.instance != self.proc.instance:
                continue
            sends, events = self.proc.handle(rnd, link, msg)
            result.sends.extend(sends)
            result.events.extend(e for e in events if e["type"] != "stop")
        result.halt = self.proc.stopped
        return result
