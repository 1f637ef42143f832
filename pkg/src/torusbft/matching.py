"""Row reconciliation: repairing and cross-checking East-West sequences.

During the East-West Phase each process accumulates the row entries that
arrived from its left and from its right.  Both accumulations, read as
flat sequences prefixed with the process's own entry, should spell out
the row ring in east order.  A single out-of-sync process (the grey one,
which may start the phase early, late, or never) shows up as one entry
that is missing, or present but displaced.

`repair_candidates` enumerates every ring that can be reached from the
observed sequence with at most one removal and at most one insertion,
where an inserted entry carries a bottom column and neighbor fields
forced by its ring position.  Candidates are kept only at the minimal
repair cost, so an intact ring is never second-guessed.

A displaced entry can admit two tied repairs (drop the displaced entry,
or drop the neighbor it displaced), and the two readings cannot be told
apart from one direction alone.  `match_rows` therefore intersects the
candidate sets of the two directions and accepts only a unique common
ring; the displacement skews opposite ways in the two arrival orders, so
the impostor readings differ between directions while the true ring
survives in both.
"""

from __future__ import annotations

from .messages import Column, RowEntry

# Mutation hook for verification experiments: disabling the adjacency
# check degrades consistent() to the identity and match() to a literal
# comparison, which the adversary search must be able to defeat.
_adjacency_check_enabled = True


def set_adjacency_check(enabled: bool) -> None:
    global _adjacency_check_enabled
    _adjacency_check_enabled = enabled


def adjacency_check_enabled() -> bool:
    return _adjacency_check_enabled


def ring_adjacent(seq: tuple[RowEntry, ...]) -> bool:
    """True when consecutive entries chain cyclically: id_i = l_j, r_i = id_j."""
    if not seq:
        return False
    n = len(seq)
    for i in range(n):
        a = seq[i]
        b = seq[(i + 1) % n]
        if a.id != b.left or a.right != b.id:
            return False
    return True


def _forced_entry(pred: RowEntry, succ: RowEntry) -> RowEntry | None:
    # The gap entry is fully determined by its neighbors or does not exist.
    if pred.right != succ.left:
        return None
    return RowEntry(column=None, left=pred.id, id=pred.right, right=succ.id)


def _ids_unique(seq) -> bool:
    ids = [e.id for e in seq]
    return len(ids) == len(set(ids))


def repair_candidates(seq) -> list[tuple[RowEntry, ...]]:
    """All distinct minimal-cost rings reachable by <=1 removal + <=1 insertion.

    The first element is the caller's own entry and is never removed;
    insertions never go in front of it (cyclically that slot is the tail).
    Returns [] when ids repeat or no repair yields a ring.
    """
    seq = tuple(seq)
    if not seq or not _ids_unique(seq):
        return []
    if not _adjacency_check_enabled:
        return [seq]

    # (cost, removal_idx desc, insert_idx asc) orders the candidates; the
    # list keeps only the lowest cost level actually populated.
    found: list[tuple[int, int, int, tuple[RowEntry, ...]]] = []
    best_cost = 3

    def consider(cost: int, removed: int, inserted: int, ring: tuple[RowEntry, ...]) -> None:
        nonlocal best_cost
        if cost > best_cost:
            return
        if not ring_adjacent(ring) or not _ids_unique(ring):
            return
        if cost < best_cost:
            best_cost = cost
            found.clear()
        found.append((cost, -removed, inserted, ring))

    consider(0, -1, -1, seq)

    variants: list[tuple[int, int, tuple[RowEntry, ...]]] = [(0, -1, seq)]
    for i in range(1, len(seq)):
        cminus = seq[:i] + seq[i + 1 :]
        variants.append((1, i, cminus))
        consider(1, i, -1, cminus)

    for base_cost, removed, cminus in variants:
        if not cminus:
            continue
        n = len(cminus)
        for j in range(1, n + 1):
            entry = _forced_entry(cminus[j - 1], cminus[j % n])
            if entry is None:
                continue
            consider(base_cost + 1, removed, j, cminus[:j] + (entry,) + cminus[j:])

    found.sort(key=lambda item: (item[0], item[1], item[2]))
    rings: list[tuple[RowEntry, ...]] = []
    for _, _, _, ring in found:
        if ring not in rings:
            rings.append(ring)
    return rings


def consistent_sequence(seq) -> tuple[RowEntry, ...]:
    """Single-result repair: the canonical minimal ring, or () if none.

    When several minimal repairs exist the one removing the latest
    position wins; that is the reading that drops the out-of-order
    late-arriving duplicate rather than a well-placed neighbor.
    """
    candidates = repair_candidates(seq)
    if not candidates:
        return ()
    return candidates[0]


def match_rows(rleft, rright) -> tuple[Column | None, ...]:
    """Cross-check the two directions; both must agree on a single ring.

    Returns the ring's columns in east order starting at the caller
    (its own column first), or () when no unique agreement exists.
    """
    left_rings = repair_candidates(rleft)
    if not left_rings:
        return ()
    right_rings = repair_candidates(rright)
    common = [ring for ring in left_rings if ring in right_rings]
    if len(common) != 1:
        return ()
    return tuple(entry.column for entry in common[0])
