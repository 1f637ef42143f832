"""Consensus by two chained broadcast instances plus a local decide step.

Stage Broadcast (instance 0) spreads the input bits; every process ends
up holding a vote matrix.  Stage Confirm (instance 1) spreads each
process's whole vote matrix, yielding a matrix of reported matrices.
Decide then runs locally: pick the highest id seen in the vote matrix as
leader, assemble what every reporter claims the leader's vote was, and
if those claims are inconsistent across two or more non-leader columns
(two columns with unknown entries, or two columns voting 0 against two
voting 1), switch to the highest id outside the leader's column and
re-assemble.  The output is the majority claim outside the final
leader's column.

The paper leaves the stage composition implicit; here a process starts
the Confirm instance at round (2H + 2 + W) + 1 computed from the column
height and matrix width it learned in Broadcast.  All processes in
fault-free columns learn the true dimensions and so start in lockstep.
Processes desynchronized by faulty neighbors join on their own skewed
schedule, or never; they still relay Confirm traffic, which is all the
fault-free columns need.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .bat import BatBehavior, BatProcess
from .engine import Behavior, Delivery, RoundResult
from .messages import Matrix
from .topology import Neighbors

BROADCAST_INSTANCE = 0
CONFIRM_INSTANCE = 1


def stage_start_round(height: int, width: int) -> int:
    """First round of the Confirm instance given the learned dimensions."""
    return (2 * height + 2 + width) + 1


def _vote_of(value: Any) -> int | None:
    return value if value in (0, 1) else None


def _find_entries(matrix: Any, pid: int) -> list[Any]:
    """All values attributed to pid inside a reported vote matrix."""
    hits = []
    if isinstance(matrix, tuple):
        for col in matrix:
            if not isinstance(col, tuple):
                continue
            for pair in col:
                if isinstance(pair, tuple) and len(pair) == 2 and pair[1] == pid:
                    hits.append(pair[0])
    return hits


def _reported_vote(reported_matrix: Any, leader: int) -> int | None:
    hits = _find_entries(reported_matrix, leader)
    if len(hits) != 1:
        return None
    return _vote_of(hits[0])


def _ids_by_column(m_b: Matrix) -> dict[int, int]:
    """Map id -> column index of first occurrence, scanning east order."""
    seen: dict[int, int] = {}
    for j, col in enumerate(m_b):
        if not isinstance(col, tuple):
            continue
        for pair in col:
            if isinstance(pair, tuple) and len(pair) == 2 and pair[1] not in seen:
                seen[pair[1]] = j
    return seen


@dataclass
class DecideResult:
    decision: int
    leader: int | None
    initial_leader: int | None
    leader_changed: bool
    flags: list[str] = field(default_factory=list)


def decide(m_b: Matrix | None, m_c: Matrix | None) -> DecideResult:
    """The Decide stage, total over arbitrary (possibly forged) matrices.

    Ids inside the vote matrix participate in leader selection exactly as
    reported, including forged ids in a faulty column; all processes in
    fault-free columns hold identical matrices, so they agree regardless.
    """
    flags: list[str] = []
    if not isinstance(m_b, tuple) or not isinstance(m_c, tuple) or not m_b or not m_c:
        return DecideResult(0, None, None, False, ["degenerate-input"])

    positions = _ids_by_column(m_b)
    if not positions:
        return DecideResult(0, None, None, False, ["degenerate-input"])

    leader = max(positions)
    initial_leader = leader
    leader_col = positions[leader]

    votes = _leader_votes(m_c, leader)
    changed = False
    if _inconsistent(votes, leader_col):
        outside = {pid: col for pid, col in positions.items() if col != leader_col}
        if outside:
            leader = max(outside)
            leader_col = outside[leader]
            votes = _leader_votes(m_c, leader)
            changed = True
        else:
            flags.append("no-alternate-leader")

    decision = _majority(votes, leader_col, flags)
    return DecideResult(decision, leader, initial_leader, changed, flags)


def _leader_votes(m_c: Matrix, leader: int) -> list[list[int | None] | None]:
    """Per reporter column, the leader vote each reporter claims (None = unknown).

    A whole reporting column dropped by the broadcast contributes None,
    standing for a column of unknown entries.
    """
    votes: list[list[int | None] | None] = []
    for col in m_c:
        if not isinstance(col, tuple):
            votes.append(None)
            continue
        votes.append([_reported_vote(reported, leader) for reported, _rid in _pairs(col)])
    return votes


def _pairs(col: tuple) -> list[tuple[Any, int]]:
    return [p for p in col if isinstance(p, tuple) and len(p) == 2]


def _inconsistent(votes: list, leader_col: int) -> bool:
    bot_cols: set[int] = set()
    zero_cols: set[int] = set()
    one_cols: set[int] = set()
    for j, col in enumerate(votes):
        if j == leader_col:
            continue
        if col is None:
            bot_cols.add(j)
            continue
        for v in col:
            if v is None:
                bot_cols.add(j)
            elif v == 0:
                zero_cols.add(j)
            else:
                one_cols.add(j)
    if len(bot_cols) >= 2:
        return True
    return len(zero_cols) >= 2 and len(one_cols) >= 2


def _majority(votes: list, leader_col: int, flags: list[str]) -> int:
    heights = [len(col) for col in votes if col is not None]
    believed_h = max(heights, default=1)
    counts = {0: 0, 1: 0, None: 0}
    for j, col in enumerate(votes):
        if j == leader_col:
            continue
        if col is None:
            counts[None] += believed_h
            continue
        for v in col:
            counts[v] += 1
    if counts[None] > counts[0] and counts[None] > counts[1]:
        flags.append("bottom-majority")
        return 0
    if counts[0] == counts[1]:
        if counts[0] > 0 or counts[1] > 0 or counts[None] > 0:
            flags.append("tie")
        return 0
    return 0 if counts[0] > counts[1] else 1


class CbatProcess:
    """Two chained broadcast instances plus the decide bookkeeping."""

    def __init__(self, pid: int, neighbors: Neighbors, input_bit: int):
        self.pid = pid
        self.input_bit = input_bit
        self.broadcast = BatProcess(pid, neighbors, input_bit, instance=BROADCAST_INSTANCE)
        self.confirm = BatProcess(pid, neighbors, None, instance=CONFIRM_INSTANCE)
        self.confirm_started = False
        self.decision: int | None = None
        self.decide_result: DecideResult | None = None

    @property
    def vote_matrix(self) -> Matrix | None:
        return self.broadcast.matrix

    @property
    def confirm_matrix(self) -> Matrix | None:
        return self.confirm.matrix

    def believed_dimensions(self) -> tuple[int, int] | None:
        m = self.broadcast.matrix
        if not isinstance(m, tuple) or not m:
            return None
        if self.broadcast.north_done:
            height = len(self.broadcast.column)
        else:
            height = max((len(c) for c in m if isinstance(c, tuple)), default=0)
        if height < 1:
            return None
        return height, len(m)


class CbatBehavior(Behavior):
    """Engine adapter: routes by instance tag and schedules the stages."""

    def __init__(self, proc: CbatProcess):
        self.proc = proc

    def on_round(self, rnd: int, batch: list[Delivery]) -> RoundResult:
        proc = self.proc
        result = RoundResult()
        if rnd == 1:
            result.sends.extend(proc.broadcast.start())

        for link, msg in batch:
            if msg.instance == BROADCAST_INSTANCE:
                inner = proc.broadcast
            elif msg.instance == CONFIRM_INSTANCE:
                inner = proc.confirm
            else:
                continue  # unknown instance tag: adversary noise
            if inner.stopped:
                continue
            sends, events = inner.handle(rnd, link, msg)
            result.sends.extend(sends)
            result.events.extend(e for e in events if e["type"] != "stop")

        if not proc.confirm_started:
            dims = proc.believed_dimensions()
            if dims is not None and rnd >= stage_start_round(*dims):
                proc.confirm.input_value = proc.broadcast.matrix
                result.sends.extend(proc.confirm.start())
                proc.confirm_started = True

        if proc.decision is None and proc.confirm.stopped:
            outcome = decide(proc.broadcast.matrix, proc.confirm.matrix)
            proc.decision = outcome.decision
            proc.decide_result = outcome
            result.events.append(
                {
                    "type": "decision",
                    "value": outcome.decision,
                    "leader": outcome.leader,
                    "initial_leader": outcome.initial_leader,
                    "leader_changed": outcome.leader_changed,
                    "flags": list(outcome.flags),
                }
            )
        result.halt = proc.decision is not None
        return result
