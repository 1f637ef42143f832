"""Byzantine strategies driving the black processes.

A strategy is constructed with full knowledge of the scenario (topology,
colors, every input, the link cap) and emits messages as a deterministic
function of (round, black id, received batch).  Correct-process behavior
is itself a deterministic function of the scenario, so this scheduled
form is as strong as runtime omniscience.  Strategies control only black
processes and cannot forge arrival links: whatever they push onto a link
is received from that link's direction, the transport guarantees it.

The column-feed machinery used by several strategies: a black process b
whose up neighbor is correct fabricates the entire goNorth stream that
neighbor's column segment expects, one (value, id) pair per round in
ring order starting at b itself and ending with the pair that carries
the neighbor's own id.  Relayed up the segment, one stream completes the
North Phase of every correct process above b simultaneously; shifting
the emission schedule desynchronizes the whole segment by the same
offset.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any

from .engine import Behavior, Delivery, RoundResult, Send
from .messages import (
    DONE,
    GO_EAST,
    GO_NORTH,
    GO_SOUTH,
    GO_WEST,
    RowEntry,
    done,
    go_east,
    go_north,
    go_south,
    go_west,
)
from .topology import (
    DOWN,
    LEFT,
    RIGHT,
    UP,
    Color,
    ConfigurationError,
    FaultPlacement,
    TorusConfig,
)


@dataclass(frozen=True)
class ScenarioInfo:
    """Everything the adversary is allowed to know: all of it."""

    config: TorusConfig
    colors: dict[int, Color]
    faults: FaultPlacement
    inputs: dict[int, Any]
    link_cap: int

    def black_ids(self) -> list[int]:
        return sorted(pid for pid, c in self.colors.items() if c is Color.BLACK)


class AdversaryStrategy:
    name = "base"

    def __init__(self, info: ScenarioInfo):
        self.info = info

    def actions(self, rnd: int, pid: int, batch: list[Delivery]) -> list[Send]:
        raise NotImplementedError


class AdversaryBehavior(Behavior):
    def __init__(self, strategy: AdversaryStrategy, pid: int):
        self.strategy = strategy
        self.pid = pid

    def on_round(self, rnd: int, batch: list[Delivery]) -> RoundResult:
        return RoundResult(sends=list(self.strategy.actions(rnd, self.pid, batch)))


# -- helpers -------------------------------------------------------------


def column_stream(info: ScenarioInfo, black: int, value_for: dict[int, Any] | None = None):
    """The goNorth pair stream a black feeds upward, in emission order.

    Pairs cover the full column ring starting at the black itself and
    ending with the up neighbor's own pair (its completion trigger).
    `value_for` overrides the claimed value for chosen ids; everyone else
    is reported with their true input.
    """
    ring = info.config.column_ring_down(black)  # starts at the black, ends at up(black)
    overrides = value_for or {}
    return [(overrides.get(pid, self_input(info, pid)), pid) for pid in ring]


def self_input(info: ScenarioInfo, pid: int) -> Any:
    return info.inputs.get(pid, pid)


def claimed_column(info: ScenarioInfo, black: int, value_for: dict[int, Any] | None = None):
    """The column a black claims in its own East-West entry."""
    return tuple(column_stream(info, black, value_for))


def honest_entry(info: ScenarioInfo, black: int, value_for: dict[int, Any] | None = None) -> RowEntry:
    nb = info.config.neighbors(black)
    return RowEntry(column=claimed_column(info, black, value_for), left=nb.left, id=black, right=nb.right)


def relay_row_traffic(pid: int, batch: list[Delivery], instances=(0,)) -> list[Send]:
    """Forward East-West messages like a correct process would."""
    sends: list[Send] = []
    for link, msg in batch:
        if msg.instance not in instances or msg.entry is None:
            continue
        if msg.kind == GO_EAST and link == LEFT and msg.entry.id != pid:
            sends.append((RIGHT, msg))
        elif msg.kind == GO_WEST and link == RIGHT and msg.entry.id != pid:
            sends.append((LEFT, msg))
    return sends


# -- strategies ----------------------------------------------------------


class SilentStrategy(AdversaryStrategy):
    """Crash-like lower bound: black processes never send anything."""

    name = "silent"

    def actions(self, rnd, pid, batch):
        return []


class DesyncGreyStrategy(AdversaryStrategy):
    """Feed fabricated columns so correct column-mates complete the North
    Phase `offset` rounds away from everyone else.

    A negative offset bunches the first pairs into round one, so it is
    bounded by the per-link cap.  Values in the fabricated stream are the
    true inputs; this strategy attacks timing, not data.
    """

    name = "desyncGrey"

    def __init__(self, info: ScenarioInfo, offset: int):
        super().__init__(info)
        if offset == 0:
            raise ConfigurationError("desyncGrey offset must be nonzero")
        if offset < 0 and (-offset) + 1 > info.link_cap:
            raise ConfigurationError(
                f"offset {offset} needs {-offset + 1} first-round sends, cap is {info.link_cap}"
            )
        self.offset = offset
        self.schedule: dict[int, dict[int, list]] = {}
        for black in info.black_ids():
            up_id = info.config.neighbors(black).up
            if info.colors[up_id] is Color.BLACK:
                continue  # the black above runs its own stream
            per_round: dict[int, list] = {}
            for k, pair in enumerate(column_stream(info, black)):
                r = max(1, 1 + k + offset)
                per_round.setdefault(r, []).append(pair)
            self.schedule[black] = per_round

    def actions(self, rnd, pid, batch):
        pairs = self.schedule.get(pid, {}).get(rnd, ())
        return [(UP, go_north(v, origin, 0)) for v, origin in pairs]


class EquivocatingLeaderStrategy(AdversaryStrategy):
    """The faulty leader splits its claimed vote across rows.

    In split mode every correct column-mate is fed leader vote 0 while
    the blacks' own row entries claim leader vote 1, so reports of the
    leader's vote disagree between rows and the Decide stage must switch
    leaders.  In consistent mode the claimed vote is 1 everywhere: a lie,
    but a coherent one, which no one can or needs to detect.  Blacks
    relay row traffic faithfully so their rows still reconcile, and stay
    silent in the Confirm instance.
    """

    name = "equivocatingLeader"

    SPLIT = "split"
    CONSISTENT = "consistent"

    def __init__(self, info: ScenarioInfo, mode: str = SPLIT):
        super().__init__(info)
        if mode not in (self.SPLIT, self.CONSISTENT):
            raise ConfigurationError(f"unknown equivocatingLeader mode {mode!r}")
        self.mode = mode
        blacks = info.black_ids()
        self.leader = max(blacks) if blacks else None
        north_claim = {self.leader: 0 if mode == self.SPLIT else 1} if blacks else {}
        row_claim = {self.leader: 1} if blacks else {}

        self.north_schedule: dict[int, dict[int, list]] = {}
        self.ew_entries: dict[int, RowEntry] = {}
        self.ew_round = info.config.height + 1  # originate in step with the correct row
        for black in blacks:
            up_id = info.config.neighbors(black).up
            if info.colors[up_id] is not Color.BLACK:
                per_round: dict[int, list] = {}
                for k, pair in enumerate(column_stream(info, black, north_claim)):
                    per_round.setdefault(1 + k, []).append(pair)
                self.north_schedule[black] = per_round
            self.ew_entries[black] = honest_entry(info, black, row_claim)

    def actions(self, rnd, pid, batch):
        sends = [(UP, go_north(v, origin, 0)) for v, origin in self.north_schedule.get(pid, {}).get(rnd, ())]
        if rnd == self.ew_round:
            entry = self.ew_entries[pid]
            sends.append((RIGHT, go_east(entry, 0)))
            sends.append((LEFT, go_west(entry, 0)))
        sends.extend(relay_row_traffic(pid, batch, instances=(0,)))
        return sends


class RandomByzantineStrategy(AdversaryStrategy):
    """Seeded fuzzing over a grammar of well-formed and malformed messages.

    Ids in fabricated payloads are drawn from the black's own id, its
    neighbor ids, and fresh negative ids; far-away ids are deliberately
    not forgeable, mirroring what a real attacker positioned at the fault
    could plausibly learn, and keeping the fuzzer within the behaviors
    the round-bound analysis covers.
    """

    name = "randomByzantine"

    KINDS = (GO_NORTH, GO_EAST, GO_WEST, GO_SOUTH, DONE)
    DIRECTIONS = (UP, DOWN, LEFT, RIGHT)

    def __init__(self, info: ScenarioInfo, seed: int, per_link_max: int | None = None):
        super().__init__(info)
        self.seed = seed
        self.per_link_max = min(info.link_cap, per_link_max or 2)

    def actions(self, rnd, pid, batch):
        sends: list[Send] = []
        for direction in self.DIRECTIONS:
            rng = random.Random(f"{self.seed}/{pid}/{rnd}/{direction}")
            for _ in range(rng.randint(0, self.per_link_max)):
                sends.append((direction, self._random_message(rng, pid)))
        return sends

    def _id_pool(self, rng: random.Random, pid: int) -> int:
        nb = self.info.config.neighbors(pid)
        pool = (pid, nb.up, nb.down, nb.left, nb.right, -rng.randint(1, 999))
        return pool[rng.randrange(len(pool))]

    def _random_column(self, rng: random.Random, pid: int):
        if rng.random() < 0.15:
            return None
        length = rng.randint(0, self.info.config.height + 2)
        return tuple((rng.randint(0, 1), self._id_pool(rng, pid)) for _ in range(length))

    def _random_message(self, rng: random.Random, pid: int):
        kind = self.KINDS[rng.randrange(len(self.KINDS))]
        instance = (0, 0, 0, 1, 7)[rng.randrange(5)]
        if kind == GO_NORTH:
            return go_north(rng.randint(0, 1), self._id_pool(rng, pid), instance)
        if kind in (GO_EAST, GO_WEST):
            entry = RowEntry(
                column=self._random_column(rng, pid),
                left=self._id_pool(rng, pid),
                id=self._id_pool(rng, pid),
                right=self._id_pool(rng, pid),
            )
            return go_east(entry, instance) if kind == GO_EAST else go_west(entry, instance)
        if kind == GO_SOUTH:
            ncols = rng.randint(0, 2)
            matrix = tuple(self._random_column(rng, pid) for _ in range(ncols))
            return go_south(matrix, self._id_pool(rng, pid), instance)
        return done(instance)


class ScriptedStrategy(AdversaryStrategy):
    """Replay a finite per-round decision script from a bounded menu.

    Action ids index the menu below; rounds beyond the script fall back
    to silence.  This is the backing for the bounded-exhaustive search:
    the per-round choice space is small by construction and every script
    is a deterministic adversary.

    Menu: 0 silent; 1 feed the next pair of the honest column stream;
    2 feed the up neighbor's completion pair immediately (early North);
    3 honest East-West origination (true column claim).
    """

    name = "enumerated"

    MENU_SIZE = 4

    def __init__(self, info: ScenarioInfo, script: list[int] | tuple[int, ...]):
        super().__init__(info)
        self.script = tuple(script)
        self.cursors: dict[int, int] = {}
        self.streams: dict[int, list] = {}
        self.returns: dict[int, tuple] = {}
        self.entries: dict[int, RowEntry] = {}
        for black in info.black_ids():
            stream = column_stream(info, black)
            self.streams[black] = stream
            self.returns[black] = stream[-1]
            self.cursors[black] = 0
            self.entries[black] = honest_entry(info, black)

    def action_emissions(self, action: int, rnd: int, pid: int, peek: bool = False) -> list[Send]:
        if pid not in self.streams:
            return []
        if action == 1:
            cursor = self.cursors[pid]
            if cursor >= len(self.streams[pid]):
                return []
            v, origin = self.streams[pid][cursor]
            if not peek:
                self.cursors[pid] = cursor + 1
            return [(UP, go_north(v, origin, 0))]
        if action == 2:
            v, origin = self.returns[pid]
            return [(UP, go_north(v, origin, 0))]
        if action == 3:
            entry = self.entries[pid]
            return [(RIGHT, go_east(entry, 0)), (LEFT, go_west(entry, 0))]
        return []

    def actions(self, rnd, pid, batch):
        action = self.script[rnd - 1] if rnd - 1 < len(self.script) else 0
        return self.action_emissions(action, rnd, pid)


STRATEGY_NAMES = (
    SilentStrategy.name,
    DesyncGreyStrategy.name,
    EquivocatingLeaderStrategy.name,
    RandomByzantineStrategy.name,
    ScriptedStrategy.name,
)


def build_strategy(name: str, params: dict, info: ScenarioInfo) -> AdversaryStrategy:
    if name == SilentStrategy.name:
        return SilentStrategy(info)
    if name == DesyncGreyStrategy.name:
        return DesyncGreyStrategy(info, offset=int(params.get("offset", -1)))
    if name == EquivocatingLeaderStrategy.name:
        mode = params.get("mode", EquivocatingLeaderStrategy.SPLIT)
        if mode == "silent":
            return SilentStrategy(info)
        return EquivocatingLeaderStrategy(info, mode=mode)
    if name == RandomByzantineStrategy.name:
        return RandomByzantineStrategy(info, seed=int(params.get("seed", 0)))
    if name == ScriptedStrategy.name:
        return ScriptedStrategy(info, script=tuple(params.get("script", ())))
    raise ConfigurationError(f"unknown adversary strategy {name!r}")
