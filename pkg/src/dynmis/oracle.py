"""Ground truth for tests: exact MIS, offline greedy, OPT trajectories.

Also holds the flat-list ARQS reference model and a grid-hash independence
checker; both are deliberately naive and share no code with the structures
they check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import InstanceTooLarge, UpdateError
from .geometry import FatObject, ShapeClass, intersects
from .updates import Update, apply_update

EXACT_LIMIT = 40


@dataclass
class Instance:
    objects: list
    dimension: int = 2
    shape_class: Optional[ShapeClass] = None

    def __post_init__(self):
        ids = [o.id for o in self.objects]
        if len(set(ids)) != len(ids):
            raise ValueError("instance ids must be distinct")
        if any(o.dim != self.dimension for o in self.objects):
            raise ValueError("all objects must share the instance dimension")


def _objects(inst) -> list:
    return list(inst.objects) if isinstance(inst, Instance) else list(inst)


def is_independent(objects: Sequence[FatObject]) -> bool:
    objs = list(objects)
    return not any(intersects(a, b) for a, b in itertools.combinations(objs, 2))


def _clique_cover_bound(P: int, adj: list) -> int:
    count = 0
    while P:
        low = P & -P
        v = low.bit_length() - 1
        cand = P & adj[v]
        clique = low
        while cand:
            w_bit = cand & -cand
            clique |= w_bit
            cand &= adj[w_bit.bit_length() - 1]
        P &= ~clique
        count += 1
    return count


def _max_independent_mask(adj: list, n: int) -> int:
    best_size, best_mask = -1, 0

    def rec(P: int, mask: int, size: int) -> None:
        nonlocal best_size, best_mask
        # vertices of degree <= 1 belong to some maximum solution
        changed = True
        while changed:
            changed = False
            Q = P
            while Q:
                low = Q & -Q
                Q ^= low
                v = low.bit_length() - 1
                if (adj[v] & P).bit_count() <= 1:
                    mask |= low
                    size += 1
                    P &= ~(low | adj[v])
                    Q &= P
                    changed = True
        if not P:
            if size > best_size:
                best_size, best_mask = size, mask
            return
        if size + _clique_cover_bound(P, adj) <= best_size:
            return
        v, vdeg = -1, -1
        Q = P
        while Q:
            low = Q & -Q
            Q ^= low
            u = low.bit_length() - 1
            deg = (adj[u] & P).bit_count()
            if deg > vdeg:
                v, vdeg = u, deg
        vb = 1 << v
        rec(P & ~vb & ~adj[v], mask | vb, size + 1)
        rec(P & ~vb, mask, size)

    rec((1 << n) - 1, 0, 0)
    return best_mask


def exact_mis(inst) -> tuple[int, frozenset]:
    """Maximum independent set by branch and bound; returns (size, witness ids)."""
    objs = _objects(inst)
    n = len(objs)
    if n > EXACT_LIMIT:
        raise InstanceTooLarge(f"exact MIS limited to {EXACT_LIMIT} objects, got {n}")
    if n == 0:
        return 0, frozenset()
    adj = [0] * n
    for i, j in itertools.combinations(range(n), 2):
        if intersects(objs[i], objs[j]):
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    mask = _max_independent_mask(adj, n)
    witness = frozenset(objs[i].id for i in range(n) if mask >> i & 1)
    return len(witness), witness


def offline_greedy(inst) -> list:
    """Scan in object order; keep an object iff it misses everything kept so far."""
    chosen: list = []
    for o in sorted(_objects(inst), key=lambda o: o.key):
        if not any(intersects(o, c) for c in chosen):
            chosen.append(o)
    return chosen


def opt_trajectory(updates: Iterable[Update]) -> list:
    """Exact OPT after each prefix of ``updates``."""
    contents: dict = {}
    out = []
    for u in updates:
        apply_update(contents, u)
        out.append(exact_mis(list(contents.values()))[0])
    return out


class FlatArqs:
    """Reference ARQS: a dict of objects and a set of marked ids."""

    def __init__(self):
        self.objects: dict = {}
        self.marked: set = set()

    def __len__(self):
        return len(self.objects)

    def insert(self, o: FatObject) -> None:
        if o.id in self.objects:
            raise UpdateError(f"duplicate id {o.id}")
        self.objects[o.id] = o

    def delete(self, oid: int) -> None:
        if oid not in self.objects:
            raise UpdateError(f"unknown id {oid}")
        del self.objects[oid]
        self.marked.discard(oid)

    def unmark_all(self) -> None:
        self.marked.clear()

    def mark_intersecting(self, q: FatObject) -> None:
        for oid, o in self.objects.items():
            if intersects(o, q):
                self.marked.add(oid)

    def smallest_unmarked(self) -> Optional[FatObject]:
        cands = [o for oid, o in self.objects.items() if oid not in self.marked]
        return min(cands, key=lambda o: o.key, default=None)

    def marked_ids(self) -> set:
        return set(self.marked)


class IndependenceChecker:
    """Incrementally maintained set that detects intersecting pairs on insertion.

    Objects are bucketed by the grid cells their bounding boxes overlap, so a
    candidate is tested only against objects sharing a cell.
    """

    def __init__(self, cell: float = 0.05):
        self.cell = cell
        self._grid: dict = {}
        self._members: dict = {}

    def __len__(self):
        return len(self._members)

    def __contains__(self, o: FatObject) -> bool:
        return self._members.get(o) is not None

    def _cells(self, o: FatObject):
        ranges = [
            range(math.floor(lo / self.cell), math.floor(hi / self.cell) + 1)
            for lo, hi in zip(o.bbox_lo, o.bbox_hi)
        ]
        return list(itertools.product(*ranges))

    def conflicts(self, o: FatObject) -> list:
        seen, out = set(), []
        for c in self._cells(o):
            for other in self._grid.get(c, ()):
                if other.id not in seen:
                    seen.add(other.id)
                    if intersects(o, other):
                        out.append(other)
        return out

    def add(self, o: FatObject) -> list:
        """Insert ``o``; return the members it intersects (empty if independent)."""
        clash = self.conflicts(o)
        cells = self._cells(o)
        for c in cells:
            self._grid.setdefault(c, []).append(o)
        self._members[o] = cells
        return clash

    def remove(self, o: FatObject) -> None:
        for c in self._members.pop(o):
            bucket = self._grid[c]
            bucket.remove(o)
            if not bucket:
                del self._grid[c]
