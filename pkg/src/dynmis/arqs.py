"""Augmented range query structure over a dynamic kd-tree.

Each object is stored as one node keyed by its ``2d``-dimensional lift
``(*bbox_lo, *bbox_hi)``. A stored box meets a query box ``[qlo, qhi]`` iff
``lo'[k] <= qhi[k]`` and ``hi'[k] >= qlo[k]`` on every axis, which is an
orthogonal range in lifted space, so subtrees are pruned by the bounding
box of their lifted points.

Nodes carry lazy ``MARK``/``UNMARK`` markers that are pushed to the children
whenever a node is touched, plus the order-minimum live object and the
order-minimum unmarked object of their subtree.

Balance is kept by partial rebuilding (scapegoat style): after an insert,
the highest node on the search path with a child heavier than ``alpha`` times
its own size is rebuilt; deletes leave tombstones, and a subtree whose
tombstones exceed half its nodes is rebuilt.

Balls are stored by their bounding boxes; the kd-tree only filters, and an
exact test decides at each candidate node.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .errors import DimensionError, UpdateError
from .geometry import FatObject, ShapeClass, intersects

_MARK = 1
_UNMARK = 2


class _Node:
    __slots__ = (
        "obj", "pt", "axis", "left", "right", "size", "live", "dead",
        "marked", "pending", "min_live", "min_unmarked", "bmin", "bmax",
    )

    def __init__(self, obj: FatObject, axis: int, marked: bool = False):
        self.obj = obj
        self.pt = obj.lift
        self.axis = axis
        self.left = None
        self.right = None
        self.dead = False
        self.marked = marked
        self.pending = 0
        self.size = 1
        self.live = 1
        self.min_live = obj
        self.min_unmarked = None if marked else obj
        self.bmin = list(self.pt)
        self.bmax = list(self.pt)


def _min(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a if a.key < b.key else b


def _apply(n: _Node, m: int) -> None:
    n.pending = m
    if m == _MARK:
        n.marked = True
        n.min_unmarked = None
    else:
        n.marked = False
        n.min_unmarked = n.min_live


def _push(n: _Node) -> None:
    m = n.pending
    if m:
        if n.left is not None:
            _apply(n.left, m)
        if n.right is not None:
            _apply(n.right, m)
        n.pending = 0


def _pull(n: _Node) -> None:
    """Recompute aggregates of ``n`` from its own state and its children."""
    size = 1
    live = 0
    own_live = None
    if not n.dead:
        live = 1
        own_live = n.obj
    min_live = own_live
    min_unmarked = own_live if not n.marked else None
    bmin = list(n.pt)
    bmax = list(n.pt)
    for c in (n.left, n.right):
        if c is None:
            continue
        size += c.size
        live += c.live
        min_live = _min(min_live, c.min_live)
        min_unmarked = _min(min_unmarked, c.min_unmarked)
        cmin, cmax = c.bmin, c.bmax
        for k in range(len(bmin)):
            if cmin[k] < bmin[k]:
                bmin[k] = cmin[k]
            if cmax[k] > bmax[k]:
                bmax[k] = cmax[k]
    n.size, n.live = size, live
    n.min_live, n.min_unmarked = min_live, min_unmarked
    n.bmin, n.bmax = bmin, bmax


class Arqs:
    """Dynamic kd-tree supporting mark-intersecting and smallest-unmarked.

    ``alpha`` is the weight-balance parameter in (1/2, 1).
    """

    def __init__(self, shape_class: Optional[ShapeClass] = None, dim: Optional[int] = None,
                 alpha: float = 0.7):
        if not 0.5 < alpha < 1:
            raise ValueError("alpha must lie in (1/2, 1)")
        if dim is None:
            dim = shape_class.dim if shape_class is not None else None
        self.shape_class = shape_class
        self.dim = dim
        self.alpha = alpha
        self._root: Optional[_Node] = None
        self._objects: dict = {}
        self._balls = 0
        self._dead = 0
        self._work = 0
        self.rebuilds = 0

    @classmethod
    def bulk(cls, objects: Iterable[FatObject], shape_class=None, dim=None, alpha=0.7) -> "Arqs":
        """Build a perfectly balanced tree over ``objects`` in one pass."""
        objs = list(objects)
        if dim is None and shape_class is None and objs:
            dim = objs[0].dim
        t = cls(shape_class, dim, alpha)
        for o in objs:
            t._admit(o)
        t._root = t._build([(o, False) for o in objs], 0)
        return t

    # ---- bookkeeping ----

    def __len__(self):
        return len(self._objects)

    def __contains__(self, oid) -> bool:
        return oid in self._objects

    def get(self, oid) -> Optional[FatObject]:
        return self._objects.get(oid)

    def objects(self) -> list:
        return list(self._objects.values())

    def work_counter(self) -> int:
        """Node visits performed since construction."""
        return self._work

    @property
    def _k(self) -> int:
        return 2 * self.dim

    def _admit(self, o: FatObject) -> None:
        if self.dim is None:
            self.dim = o.dim
        if o.dim != self.dim:
            raise DimensionError(f"object {o.id} has dimension {o.dim}, structure has {self.dim}")
        if o.id in self._objects:
            raise UpdateError(f"duplicate id {o.id}")
        self._objects[o.id] = o
        if not o.is_rect:
            self._balls += 1

    def _build(self, items: list, axis: int) -> Optional[_Node]:
        if not items:
            return None
        self._work += len(items)
        items.sort(key=lambda it: (it[0].lift[axis], it[0].key))
        m = len(items) // 2
        obj, marked = items[m]
        node = _Node(obj, axis, marked)
        nxt = (axis + 1) % self._k
        node.left = self._build(items[:m], nxt)
        node.right = self._build(items[m + 1:], nxt)
        _pull(node)
        return node

    def _collect(self, n: Optional[_Node], out: list) -> None:
        if n is None:
            return
        self._work += 1
        _push(n)
        if not n.dead:
            out.append((n.obj, n.marked))
        self._collect(n.left, out)
        self._collect(n.right, out)

    def _rebuild_at(self, path: list, i: int) -> None:
        """Rebuild the subtree rooted at ``path[i]`` and refresh its ancestors."""
        n = path[i]
        items: list = []
        self._collect(n, items)
        self._dead -= n.size - n.live
        new = self._build(items, n.axis)
        self.rebuilds += 1
        if i == 0:
            self._root = new
        else:
            parent = path[i - 1]
            if parent.left is n:
                parent.left = new
            else:
                parent.right = new
            for a in reversed(path[:i]):
                _pull(a)

    # ---- updates ----

    def insert(self, o: FatObject) -> None:
        self._admit(o)
        self._work += 1
        if self._root is None:
            self._root = _Node(o, 0)
            return
        key = o.key
        pt = o.lift
        path = []
        n = self._root
        while True:
            self._work += 1
            _push(n)
            path.append(n)
            a = n.axis
            if (pt[a], key) < (n.pt[a], n.obj.key):
                if n.left is None:
                    n.left = _Node(o, (a + 1) % self._k)
                    break
                n = n.left
            else:
                if n.right is None:
                    n.right = _Node(o, (a + 1) % self._k)
                    break
                n = n.right
        for a_node in reversed(path):
            _pull(a_node)
        alpha = self.alpha
        for i, a_node in enumerate(path):
            heavy = max(a_node.left.size if a_node.left else 0,
                        a_node.right.size if a_node.right else 0)
            if heavy > alpha * a_node.size:
                self._rebuild_at(path, i)
                break

    def delete(self, oid) -> FatObject:
        o = self._objects.get(oid)
        if o is None:
            raise UpdateError(f"unknown id {oid}")
        key = o.key
        pt = o.lift
        path = []
        n = self._root
        while True:
            if n is None:
                raise AssertionError(f"object {oid} missing from kd-tree")
            self._work += 1
            _push(n)
            path.append(n)
            if n.obj is o and not n.dead:
                break
            a = n.axis
            n = n.left if (pt[a], key) < (n.pt[a], n.obj.key) else n.right
        n.dead = True
        del self._objects[oid]
        if not o.is_rect:
            self._balls -= 1
        self._dead += 1
        for a_node in reversed(path):
            _pull(a_node)
        if self._root.live == 0:
            self._root = None
            self._dead = 0
            return o
        for i, a_node in enumerate(path):
            if 2 * (a_node.size - a_node.live) > a_node.size:
                self._rebuild_at(path, i)
                break
        return o

    # ---- marking ----

    def unmark_all(self) -> None:
        self._work += 1
        if self._root is not None:
            _apply(self._root, _UNMARK)

    def mark_all(self) -> None:
        self._work += 1
        if self._root is not None:
            _apply(self._root, _MARK)

    def mark_intersecting(self, q: FatObject) -> None:
        """Mark exactly the stored objects that intersect ``q``."""
        if self._root is None:
            return
        if q.dim != self.dim:
            raise DimensionError(f"query has dimension {q.dim}, structure has {self.dim}")
        exact = q.is_rect and self._balls == 0
        self._mark(self._root, q, q.bbox_lo, q.bbox_hi, exact, self.dim)

    def _mark(self, n: _Node, q, qlo, qhi, exact: bool, d: int) -> None:
        self._work += 1
        if n.min_unmarked is None:
            return
        bmin, bmax = n.bmin, n.bmax
        full = exact
        for k in range(d):
            if bmin[k] > qhi[k] or bmax[d + k] < qlo[k]:
                return
            if full and (bmax[k] > qhi[k] or bmin[d + k] < qlo[k]):
                full = False
        if full:
            _apply(n, _MARK)
            return
        _push(n)
        if not n.dead and not n.marked and intersects(n.obj, q):
            n.marked = True
        if n.left is not None:
            self._mark(n.left, q, qlo, qhi, exact, d)
        if n.right is not None:
            self._mark(n.right, q, qlo, qhi, exact, d)
        _pull(n)

    def smallest_unmarked(self) -> Optional[FatObject]:
        self._work += 1
        return self._root.min_unmarked if self._root is not None else None

    def smallest(self) -> Optional[FatObject]:
        return self._root.min_live if self._root is not None else None

    def marked_ids(self) -> set:
        """Push every marker to the leaves and read the per-node flags."""
        out: set = set()

        def walk(n):
            if n is None:
                return
            _push(n)
            if not n.dead and n.marked:
                out.add(n.obj.id)
            walk(n.left)
            walk(n.right)

        walk(self._root)
        return out

    # ---- diagnostics ----

    def height(self) -> int:
        def h(n):
            return 0 if n is None else 1 + max(h(n.left), h(n.right))
        return h(self._root)

    @property
    def node_count(self) -> int:
        return self._root.size if self._root is not None else 0

    def check_invariants(self) -> None:
        """Assert ordering, counts and augmentation; does not mutate the tree."""
        seen: set = set()

        def walk(n, marker, lo_bounds, hi_bounds):
            # lo_bounds/hi_bounds: per-axis (value, key) limits from ancestors
            if n is None:
                return 0, 0, None, None
            for axis, bound in lo_bounds:
                assert (n.pt[axis], n.obj.key) >= bound, "kd order violated (left bound)"
            for axis, bound in hi_bounds:
                assert (n.pt[axis], n.obj.key) < bound, "kd order violated (right bound)"
            marked = n.marked if marker == 0 else marker == _MARK
            child_marker = marker or n.pending
            split = (n.axis, (n.pt[n.axis], n.obj.key))
            ls, ll, lmin, lmu = walk(n.left, child_marker, lo_bounds, hi_bounds + [split])
            rs, rl, rmin, rmu = walk(n.right, child_marker, lo_bounds + [split], hi_bounds)
            own = None if n.dead else n.obj
            if own is not None:
                assert own.id not in seen
                seen.add(own.id)
            size = 1 + ls + rs
            live = (0 if n.dead else 1) + ll + rl
            assert n.size == size and n.live == live, "subtree counts stale"
            mn = _min(_min(own, lmin), rmin)
            mu = _min(_min(None if (own is None or marked) else own, lmu), rmu)
            assert n.min_live is mn, "min_live stale"
            if marker == 0:
                assert n.min_unmarked is mu, "min_unmarked stale"
            return size, live, mn, mu

        walk(self._root, 0, [], [])
        assert seen == set(self._objects), "stored ids disagree with the tree"
