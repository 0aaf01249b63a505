import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from dynmis.geometry import ShapeClass, ball, hypercube, intersects, rect
from dynmis.oracle import IndependenceChecker

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SHAPES = [ShapeClass.squares(), ShapeClass.disks(), ShapeClass.hypercubes(3)]


def random_object(rng, sc, oid, smin=0.02, smax=0.3):
    size = rng.uniform(smin, smax)
    d = sc.dim
    if sc.uses_balls:
        return ball(oid, [rng.random() for _ in range(d)], size / 2)
    return hypercube(oid, [rng.random() for _ in range(d)], size)


def random_instance(rng, sc, n, smin=0.02, smax=0.3, start=0):
    return [random_object(rng, sc, start + i, smin, smax) for i in range(n)]


def disjoint_squares(rng, n, smin=0.005, smax=0.06, start=0, tries=50):
    """Up to ``n`` pairwise disjoint random squares in the unit square."""
    chk = IndependenceChecker(cell=0.06)
    out = []
    oid = start
    for _ in range(n * tries):
        if len(out) >= n:
            break
        s = rng.uniform(smin, smax)
        o = hypercube(oid, [rng.uniform(0, 1 - s), rng.uniform(0, 1 - s)], s)
        if not chk.conflicts(o):
            chk.add(o)
            out.append(o)
            oid += 1
    return out


def brute_mis(objs):
    """Largest independent subset by exhaustive search (tiny inputs only)."""
    n = len(objs)
    best = 0
    for mask in range(1 << n):
        chosen = [objs[i] for i in range(n) if mask >> i & 1]
        if len(chosen) > best and all(not intersects(a, b) for i, a in enumerate(chosen)
                                      for b in chosen[i + 1:]):
            best = len(chosen)
    return best


coord = st.integers(0, 12).map(float)
side = st.integers(1, 5).map(float)


@st.composite
def grid_rects(draw, oid):
    lo = (draw(coord), draw(coord))
    return rect(oid, lo, (lo[0] + draw(side), lo[1] + draw(side)))


@st.composite
def grid_objects(draw, oid):
    """Rects and balls on a coarse integer grid, so touching and ties are common."""
    if draw(st.booleans()):
        return draw(grid_rects(oid))
    return ball(oid, (draw(coord), draw(coord)), draw(side) / 2)


@pytest.fixture
def rng():
    return random.Random(12345)
