"""Deterministic synchronous round engine.

Every round each live process receives the full batch of messages sent
to it in the previous round, runs its behavior, and emits messages that
will be delivered next round.  Delivery order to a process is fixed:
links in the order down, up, left, right, FIFO within each link (the
FIFO order is the order the sender emitted).  Processes are stepped in
ascending id order; since sends only become visible next round this is
invisible to the protocol, but it pins the trace byte-for-byte.

A halted process neither sends nor receives afterwards; deliveries to it
are recorded as dropped when full tracing is on.  Faulty senders are
clipped to a configurable number of messages per link per round so that
bounded adversary searches stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from .messages import Message
from .topology import DIRECTIONS, OPPOSITE, Color, TorusConfig

DEFAULT_LINK_CAP = 4

Send = tuple[str, Message]  # (direction, message)
Delivery = tuple[str, Message]  # (arrival link, message)


@dataclass
class RoundResult:
    sends: list[Send] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    halt: bool = False


class Behavior:
    """Interface a process behavior implements (duck-typed)."""

    def on_round(self, rnd: int, batch: list[Delivery]) -> RoundResult:
        raise NotImplementedError


@dataclass
class ProcessHarness:
    pid: int
    behavior: Behavior
    halted: bool = False


TRACE_EVENTS = "events"  # protocol events only
TRACE_SENDS = "sends"  # plus sends
TRACE_FULL = "full"  # plus deliveries and drops

_LEVELS = {TRACE_EVENTS: 0, TRACE_SENDS: 1, TRACE_FULL: 2}


class World:
    def __init__(
        self,
        config: TorusConfig,
        behaviors: dict[int, Behavior],
        colors: dict[int, Color] | None = None,
        link_cap: int = DEFAULT_LINK_CAP,
        trace_level: str = TRACE_SENDS,
    ):
        if set(behaviors) != set(config.ids):
            raise ValueError("behaviors must cover exactly the torus ids")
        self.config = config
        self.colors = colors or {pid: Color.WHITE for pid in config.ids}
        self.link_cap = link_cap
        self.trace_level = _LEVELS[trace_level]
        self.pids = sorted(config.ids)
        self.harnesses = {pid: ProcessHarness(pid, behaviors[pid]) for pid in self.pids}
        self.neighbor_map = {pid: config.neighbors(pid) for pid in self.pids}
        self.round = 0
        self.in_flight: dict[tuple[int, str], list[Message]] = {}
        self.trace: list[dict] = []

    # -- trace helpers -------------------------------------------------

    def _record(self, level: int, rec: dict) -> None:
        if self.trace_level >= level:
            self.trace.append(rec)

    def _record_event(self, pid: int, event: dict) -> None:
        rec = {"round": self.round, "process": pid}
        rec.update(event)
        self.trace.append(rec)

    # -- stepping ------------------------------------------------------

    def step(self) -> None:
        self.round += 1
        deliveries = self.in_flight
        self.in_flight = {}

        for pid in self.pids:
            harness = self.harnesses[pid]
            batch: list[Delivery] = []
            for link in DIRECTIONS:
                for msg in deliveries.get((pid, link), ()):
                    if harness.halted:
                        self._record(
                            2,
                            {
                                "round": self.round,
                                "type": "deliver_dropped",
                                "process": pid,
                                "link": link,
                                "kind": msg.kind,
                                "instance": msg.instance,
                                "payload": msg,
                            },
                        )
                    else:
                        self._record(
                            2,
                            {
                                "round": self.round,
                                "type": "deliver",
                                "process": pid,
                                "link": link,
                                "kind": msg.kind,
                                "instance": msg.instance,
                                "payload": msg,
                            },
                        )
                        batch.append((link, msg))
            if harness.halted:
                continue

            result = harness.behavior.on_round(self.round, batch)

            sends = result.sends
            if self.colors[pid] is Color.BLACK and self.link_cap is not None:
                sends = self._clip(sends)
            neighbors = self.neighbor_map[pid]
            for direction, msg in sends:
                self._record(
                    1,
                    {
                        "round": self.round,
                        "type": "send",
                        "process": pid,
                        "direction": direction,
                        "kind": msg.kind,
                        "instance": msg.instance,
                        "payload": msg,
                    },
                )
                dst = neighbors.in_direction(direction)
                key = (dst, OPPOSITE[direction])
                self.in_flight.setdefault(key, []).append(msg)

            for event in result.events:
                self._record_event(pid, event)
            if result.halt:
                harness.halted = True
                self._record_event(pid, {"type": "halt"})

    def _clip(self, sends: list[Send]) -> list[Send]:
        counts: dict[str, int] = {}
        kept = []
        for direction, msg in sends:
            counts[direction] = counts.get(direction, 0) + 1
            if counts[direction] <= self.link_cap:
                kept.append((direction, msg))
        return kept

    # -- queries -------------------------------------------------------

    def behavior_of(self, pid: int) -> Behavior:
        return self.harnesses[pid].behavior

    def halted_ids(self) -> set[int]:
        return {pid for pid in self.pids if self.harnesses[pid].halted}

    def all_halted(self, ids: Iterable[int]) -> bool:
        return all(self.harnesses[pid].halted for pid in ids)


@dataclass
class RunResult:
    met: bool
    rounds: int
    world: World
    trace: list[dict]
    vacuous: bool = False


def run_until(
    world: World,
    max_rounds: int,
    predicate: Callable[[World], bool] | None = None,
) -> RunResult:
    """Step until the predicate holds or max_rounds is exhausted.

    An exhausted bound is reported (met=False), not raised, so checkers
    can assert on bound violations.
    """
    if max_rounds < 1:
        raise ValueError(f"max_rounds must be >= 1, got {max_rounds}")
    met = False
    while world.round < max_rounds:
        world.step()
        if predicate is not None and predicate(world):
            met = True
            break
    if predicate is None:
        met = True
    return RunResult(met=met, rounds=world.round, world=world, trace=world.trace)
