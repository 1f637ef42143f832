"""Torus grid topology, process identities, and fault coloring.

The network is an H x W torus grid: a rectangular grid with wraparound
edges on both axes, so every process has exactly four neighbor slots
(up, down, left, right).  Neighbor slots may repeat ids when H <= 2 or
W <= 2, including the degenerate 1x1 torus whose process is its own
neighbor in all four directions.

Faults are confined to a single column.  A faulty process is black; a
correct process sharing a column with at least one black process is
grey; every other correct process is white.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

UP = "up"
DOWN = "down"
LEFT = "left"
RIGHT = "right"
DIRECTIONS = (DOWN, UP, LEFT, RIGHT)  # fixed within-round delivery order

OPPOSITE = {UP: DOWN, DOWN: UP, LEFT: RIGHT, RIGHT: LEFT}


class ConfigurationError(ValueError):
    """Raised for invalid torus dimensions, ids, or fault placements."""


class Color(Enum):
    WHITE = "white"
    GREY = "grey"
    BLACK = "black"


@dataclass(frozen=True)
class Neighbors:
    up: int
    down: int
    left: int
    right: int

    def in_direction(self, direction: str) -> int:
        return getattr(self, direction)


@dataclass(frozen=True)
class TorusConfig:
    """Immutable torus layout: dimensions plus the coordinate->id bijection.

    `ids` is stored row-major: ids[row * width + col].  Protocol code never
    reads this object; each process is handed only its own id, its four
    neighbor ids, and its input.
    """

    height: int
    width: int
    ids: tuple[int, ...]

    def id_at(self, row: int, col: int) -> int:
        return self.ids[(row % self.height) * self.width + (col % self.width)]

    def coord_of(self, pid: int) -> tuple[int, int]:
        idx = self.ids.index(pid)
        return divmod(idx, self.width)

    def neighbors(self, pid: int) -> Neighbors:
        row, col = self.coord_of(pid)
        return Neighbors(
            up=self.id_at(row - 1, col),
            down=self.id_at(row + 1, col),
            left=self.id_at(row, col - 1),
            right=self.id_at(row, col + 1),
        )

    def column_ids(self, col: int) -> tuple[int, ...]:
        return tuple(self.id_at(r, col) for r in range(self.height))

    def row_ids(self, row: int) -> tuple[int, ...]:
        return tuple(self.id_at(row, c) for c in range(self.width))

    def column_ring_down(self, pid: int) -> tuple[int, ...]:
        """Column ids starting at pid and walking down (the order a
        completed North Phase column takes)."""
        row, col = self.coord_of(pid)
        return tuple(self.id_at(row + k, col) for k in range(self.height))

    def row_ring_east(self, pid: int) -> tuple[int, ...]:
        """Row ids starting at pid and walking east."""
        row, col = self.coord_of(pid)
        return tuple(self.id_at(row, col + k) for k in range(self.width))


def build_torus(
    height: int,
    width: int,
    ids: list[int] | tuple[int, ...] | None = None,
    id_seed: int | None = None,
) -> TorusConfig:
    """Build a torus config with a row-major id layout.

    By default ids are consecutive integers starting at 1.  An explicit id
    list places ids row-major (used e.g. to put the highest id in a chosen
    column); `id_seed` instead shuffles the default ids deterministically.
    """
    if height < 1 or width < 1:
        raise ConfigurationError(f"torus dimensions must be positive, got {height}x{width}")
    n = height * width
    if ids is not None:
        ids = tuple(ids)
        if len(ids) != n:
            raise ConfigurationError(f"expected {n} ids, got {len(ids)}")
        if len(set(ids)) != n:
            raise ConfigurationError("duplicate process ids")
    else:
        base = list(range(1, n + 1))
        if id_seed is not None:
            random.Random(id_seed).shuffle(base)
        ids = tuple(base)
    return TorusConfig(height=height, width=width, ids=ids)


@dataclass(frozen=True)
class FaultPlacement:
    """Byzantine faults: a set of rows within one column.

    `allow_full_column` permits the impossibility-demonstration scenario
    where every process of the column is faulty (no grey processes exist);
    standard scenarios require at least one fault-free row.
    """

    column: int | None = None
    rows: frozenset[int] = frozenset()
    allow_full_column: bool = False

    @property
    def fault_count(self) -> int:
        return len(self.rows)

    def validate(self, config: TorusConfig) -> None:
        if not self.rows:
            return
        if self.column is None:
            raise ConfigurationError("fault rows given without a fault column")
        if not 0 <= self.column < config.width:
            raise ConfigurationError(f"fault column {self.column} out of range")
        for r in self.rows:
            if not 0 <= r < config.height:
                raise ConfigurationError(f"fault row {r} out of range")
        if len(self.rows) == config.height and not self.allow_full_column:
            raise ConfigurationError(
                "fully faulty column requires allow_full_column (demonstration only)"
            )

    def black_ids(self, config: TorusConfig) -> frozenset[int]:
        if not self.rows or self.column is None:
            return frozenset()
        return frozenset(config.id_at(r, self.column) for r in self.rows)


NO_FAULTS = FaultPlacement()


def classify(config: TorusConfig, faults: FaultPlacement) -> dict[int, Color]:
    """Assign white/grey/black per the fault placement.

    Black iff at a faulty (row, column) position; grey iff correct but in
    the faulty column; white otherwise.  With no faults every process is
    white.
    """
    faults.validate(config)
    blacks = faults.black_ids(config)
    colors: dict[int, Color] = {}
    for pid in config.ids:
        if pid in blacks:
            colors[pid] = Color.BLACK
        elif blacks and config.coord_of(pid)[1] == faults.column:
            colors[pid] = Color.GREY
        else:
            colors[pid] = Color.WHITE
    return colors


def east_range(config: TorusConfig, pid: int, count: int) -> tuple[int, ...]:
    """The `count` processes east of pid, pid excluded, tail farthest east."""
    row, col = config.coord_of(pid)
    return tuple(config.id_at(row, col + k) for k in range(1, count + 1))


def west_range(config: TorusConfig, pid: int, count: int) -> tuple[int, ...]:
    """The `count` processes west of pid, pid excluded, tail farthest west."""
    row, col = config.coord_of(pid)
    return tuple(config.id_at(row, col - k) for k in range(1, count + 1))


def east_distance(config: TorusConfig, src: int, dst: int) -> int:
    """Hops from src to dst walking east along the shared row.

    This is the reading we use for the round-distance the analysis calls
    rd(p, u); src and dst must share a row.
    """
    srow, scol = config.coord_of(src)
    drow, dcol = config.coord_of(dst)
    if srow != drow:
        raise ConfigurationError(f"{src} and {dst} are not in the same row")
    return (dcol - scol) % config.width
