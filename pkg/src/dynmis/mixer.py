"""Separator for two overlaid independent sets and the MIX schedule built on it.

All heavy work is written as generators that yield integer work units every
``_CHUNK`` object touches, so a caller can stop mid-computation and resume
later. The MIX recursion is a stack of nested generators; a frame computes its
separator only when the schedule first reaches it.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import IO, Iterator, NamedTuple, Optional, Sequence

from .errors import MixError
from .geometry import EnclosingCube, FatObject, Placement, classify_vs_cube, intersects

_CHUNK = 60
ADD = "add"
REMOVE = "remove"


class MixStep(NamedTuple):
    op: str
    obj: FatObject


@dataclass(frozen=True)
class SeparatorResult:
    cube: EnclosingCube
    s1_in: tuple
    s1_out: tuple
    s1_on: tuple
    s2_in: tuple
    s2_out: tuple
    s2_on: tuple
    candidates: int = 1
    work: int = 0

    @property
    def crossing(self) -> int:
        return len(self.s1_on) + len(self.s2_on)


def _chunks(seq: Sequence):
    for s in range(0, len(seq), _CHUNK):
        yield seq[s:s + _CHUNK]


def _select(items: list, k: int):
    """k-th smallest (0-based) of distinct items by median of medians."""
    while True:
        n = len(items)
        if n <= 20:
            yield n
            return sorted(items)[k]
        medians = []
        for block in _chunks(items):
            for j in range(0, len(block), 5):
                g = sorted(block[j:j + 5])
                medians.append(g[(len(g) - 1) // 2])
            yield len(block)
        pivot = yield from _select(medians, (len(medians) - 1) // 2)
        lo, hi = [], []
        for block in _chunks(items):
            for x in block:
                if x < pivot:
                    lo.append(x)
                elif x > pivot:
                    hi.append(x)
            yield len(block)
        if k < len(lo):
            items = lo
        elif k >= n - len(hi):
            k -= n - len(hi)
            items = hi
        else:
            return pivot


def _dth_root(n: int, d: int) -> float:
    x = n ** (1.0 / d)
    rx = round(x)
    return float(rx) if rx ** d == n else x


def _separator(S1: Sequence[FatObject], S2: Sequence[FatObject]):
    if not S1:
        raise ValueError("separator needs a nonempty first set")
    d = S1[0].dim
    m = len(S1)
    centers = [o.cube.center for o in S1]

    # shrink a box through per-axis quartiles of S1's representative points
    P = list(range(m))
    box = []
    for j in range(d):
        pts = []
        for block in _chunks(P):
            pts.extend((centers[i][j], i) for i in block)
            yield len(block)
        q = len(pts) - 1
        t1 = yield from _select(pts, q // 4)
        t2 = yield from _select(pts, q // 2)
        t3 = yield from _select(pts, (3 * q) // 4)
        a, b = (t1, t2) if t2[0] - t1[0] <= t3[0] - t2[0] else (t2, t3)
        box.append((a[0], b[0]))
        P = []
        for block in _chunks(pts):
            P.extend(t[1] for t in block if a <= t <= b)
            yield len(block)

    r = max(hi - lo for lo, hi in box)
    c = tuple((lo + hi) / 2 for lo, hi in box)
    n = m + len(S2)
    x = _dth_root(n, d)
    mc = max(1, math.floor(x / 2))
    if r > 0:
        # candidate sides r + i*step, i = 1..mc; mc <= x/2 keeps them within [r, 2r]
        step = 2 * r / x
        spacing = step / 2
        loads = [0] * (mc + 1)
        everything = list(itertools.chain(S1, S2))
        for block in _chunks(everything):
            for o in block:
                if o.cube.size < spacing:
                    dist = max(abs(u - v) for u, v in zip(o.cube.center, c))
                    i = round((dist - r / 2) / spacing)
                    if 1 <= i <= mc:
                        loads[i] += 1
            yield len(block)
        best = min(range(1, mc + 1), key=lambda i: (loads[i], i))
        side = r + best * step
    else:
        side = 0.0
    cube = EnclosingCube(c, side)

    parts = []
    for S in (S1, S2):
        ins, outs, ons = [], [], []
        for block in _chunks(S):
            for o in block:
                p = classify_vs_cube(o, cube)
                (ins if p is Placement.INSIDE else outs if p is Placement.OUTSIDE else ons).append(o)
            yield len(block)
        parts.append((tuple(ins), tuple(outs), tuple(ons)))
    (i1, o1, c1), (i2, o2, c2) = parts
    return SeparatorResult(cube, i1, o1, c1, i2, o2, c2, candidates=mc)


def find_separator(S1: Sequence[FatObject], S2: Sequence[FatObject]) -> SeparatorResult:
    """Hypercube splitting S1 in a balanced way while crossing few objects of S1 and S2."""
    gen = _separator(list(S1), list(S2))
    work = 0
    try:
        while True:
            work += next(gen)
    except StopIteration as stop:
        res = stop.value
    return SeparatorResult(res.cube, res.s1_in, res.s1_out, res.s1_on,
                           res.s2_in, res.s2_out, res.s2_on, res.candidates, work)


@dataclass(frozen=True)
class Plateau:
    """Frame-local set size right after the first recursive side was mixed."""

    step: int
    depth: int
    size: int
    floor: int
    global_size: int


class MixState:
    """Incremental MIX from independent set ``A`` to independent set ``B``.

    Every object of ``A`` is removed once and every object of ``B`` added once,
    so a full schedule has ``len(A) + len(B)`` steps.
    """

    def __init__(self, A: Sequence[FatObject], B: Sequence[FatObject], validate: bool = True):
        self.A = sorted(A, key=lambda o: o.key)
        self.B = sorted(B, key=lambda o: o.key)
        dims = {o.dim for o in itertools.chain(self.A, self.B)}
        if len(dims) > 1:
            raise MixError("mixed dimensions")
        self.dim = dims.pop() if dims else 2
        self._small = 4 ** self.dim
        self.validate = validate
        self.total_steps = len(self.A) + len(self.B)
        self.emitted = 0
        self.work = 0
        self.current: dict = dict.fromkeys(self.A)
        self.min_size = len(self.A)
        self.plateaus: list = []
        self._gen: Optional[Iterator] = None

    @property
    def done(self) -> bool:
        return self.emitted >= self.total_steps

    def __len__(self):
        return len(self.current)

    def _next(self):
        if self._gen is None:
            self._gen = self._mix(self.A, self.B, 0)
        item = next(self._gen)
        if isinstance(item, MixStep):
            self._apply(item)
        else:
            self.work += item
        return item

    def _apply(self, step: MixStep) -> None:
        if step.op == REMOVE:
            del self.current[step.obj]
        else:
            if step.obj in self.current:
                raise MixError(f"object {step.obj.id} added twice")
            self.current[step.obj] = None
        self.emitted += 1
        self.work += 1
        if len(self.current) < self.min_size:
            self.min_size = len(self.current)

    def advance(self) -> MixStep:
        if self.done:
            raise MixError("MIX schedule already exhausted")
        while True:
            item = self._next()
            if isinstance(item, MixStep):
                return item

    def run(self, max_steps: Optional[int] = None, max_units: Optional[int] = None) -> list:
        """Advance until drained, ``max_steps`` steps, or ``max_units`` work units spent."""
        steps = []
        start = self.work
        while not self.done:
            if max_steps is not None and len(steps) >= max_steps:
                break
            if max_units is not None and self.work - start >= max_units:
                break
            item = self._next()
            if isinstance(item, MixStep):
                steps.append(item)
        return steps

    # ---- schedule ----

    def _mix(self, S1: list, S2: list, depth: int):
        if not S2:
            for o in S1:
                yield MixStep(REMOVE, o)
            return
        if not S1:
            for o in S2:
                yield MixStep(ADD, o)
            return
        if len(S1) < 2 or len(S1) + len(S2) < self._small:
            yield from self._base(S1, S2)
            return
        sep = yield from _separator(S1, S2)
        if max(len(sep.s1_in), len(sep.s1_out)) == len(S1):
            # no progress on S1; only reachable when inputs break the contract
            yield from self._base(S1, S2)
            return
        for o in sep.s1_on:
            yield MixStep(REMOVE, o)
        if len(sep.s1_in) + len(sep.s2_out) <= len(sep.s1_out) + len(sep.s2_in):
            s1a, s2a, s1b, s2b = sep.s1_in, sep.s2_in, sep.s1_out, sep.s2_out
        else:
            s1a, s2a, s1b, s2b = sep.s1_out, sep.s2_out, sep.s1_in, sep.s2_in
        yield from self._mix(list(s1a), list(s2a), depth + 1)
        self.plateaus.append(Plateau(
            step=self.emitted, depth=depth, size=len(s2a) + len(s1b),
            floor=min(len(s1a) + len(s1b), len(s2a) + len(s2b)),
            global_size=len(self.current),
        ))
        yield from self._mix(list(s1b), list(s2b), depth + 1)
        for o in sep.s2_on:
            yield MixStep(ADD, o)

    def _base(self, S1: list, S2: list):
        """Small frame: add what fits, then remove S1 one by one, adding as room frees up."""
        if self.validate and len(S1) + len(S2) < self._small:
            for S in (S1, S2):
                for a, b in itertools.combinations(S, 2):
                    if intersects(a, b):
                        raise MixError(f"input set not independent: {a.id} meets {b.id}")
            yield len(S1) * len(S1) + len(S2) * len(S2)
        blockers = []
        waiting: dict = {}
        for block_start in range(0, len(S2), _CHUNK):
            for j in range(block_start, min(block_start + _CHUNK, len(S2))):
                b = S2[j]
                bl = {i for i, a in enumerate(S1) if intersects(a, b)}
                blockers.append(bl)
                for i in bl:
                    waiting.setdefault(i, []).append(j)
            yield len(S1) * min(_CHUNK, len(S2) - block_start)
        for j, b in enumerate(S2):
            if not blockers[j]:
                yield MixStep(ADD, b)
        for i, a in enumerate(S1):
            yield MixStep(REMOVE, a)
            for j in waiting.get(i, ()):
                blockers[j].discard(i)
                if not blockers[j]:
                    yield MixStep(ADD, S2[j])


def mix_new(A: Sequence[FatObject], B: Sequence[FatObject]) -> MixState:
    return MixState(A, B)


def advance(state: MixState) -> MixStep:
    return state.advance()


def mix_work_counter(state: MixState) -> int:
    return state.work


def size_floor(a_size: int, b_size: int, d: int) -> float:
    """Lower bound on every intermediate size: min - log_{4^d/(4^d-1)}|A| * n^(1-1/d)."""
    base = 4 ** d / (4 ** d - 1)
    loss = math.log(a_size, base) * (a_size + b_size) ** (1 - 1 / d) if a_size > 1 else 0.0
    return min(a_size, b_size) - loss


def schedule_records(state: MixState) -> Iterator[dict]:
    """Drain ``state``, yielding one JSON-ready record per step."""
    while not state.done:
        step = state.advance()
        yield {"step": state.emitted, "op": step.op, "id": step.obj.id, "size": len(state.current)}


def dump_schedule(A: Sequence[FatObject], B: Sequence[FatObject], fp: IO[str]) -> int:
    state = MixState(A, B)
    for rec in schedule_records(state):
        fp.write(json.dumps(rec) + "\n")
    return state.emitted
