import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynmis.bench import hashtag
from dynmis.errors import InstanceTooLarge, UpdateError
from dynmis.geometry import ShapeClass, hypercube, intersects, rect, square
from dynmis.oracle import (FlatArqs, IndependenceChecker, Instance, exact_mis, is_independent,
                           offline_greedy, opt_trajectory)
from dynmis.updates import Update

from conftest import SHAPES, brute_mis, grid_objects, random_instance


def test_two_disjoint_squares():
    assert exact_mis([square(0, (0, 0), 1), square(1, (3, 3), 1)])[0] == 2


def test_empty_instance():
    assert exact_mis(Instance([])) == (0, frozenset())


def test_hashtag_3x3():
    h, v = hashtag(3)
    objs = h + v
    assert brute_mis(objs) == 3
    size, witness = exact_mis(objs)
    assert size == 3
    assert is_independent([o for o in objs if o.id in witness])


def test_too_large():
    with pytest.raises(InstanceTooLarge):
        exact_mis([square(i, (3 * i, 0), 1) for i in range(41)])


def test_instance_validation():
    with pytest.raises(ValueError):
        Instance([square(0, (0, 0), 1), square(0, (5, 5), 1)])
    with pytest.raises(ValueError):
        Instance([hypercube(0, (0, 0, 0), 1)], dimension=2)


def test_greedy_prefers_small():
    small, big = square(0, (1, 1), 1), square(1, (0, 0), 3)
    assert offline_greedy([big, small]) == [small]
    a, b = square(0, (0, 0), 1), square(1, (5, 5), 1)
    assert offline_greedy([b, a]) == [a, b]


def test_greedy_quarter_of_opt_on_30_squares():
    rng = random.Random(7)
    for _ in range(20):
        inst = random_instance(rng, ShapeClass.squares(), 30)
        assert 4 * len(offline_greedy(inst)) >= exact_mis(inst)[0]


def test_trajectory_intervals():
    u1, u2 = rect(1, (1,), (4,)), rect(2, (2,), (3,))
    seq = [Update.insert(u1), Update.insert(u2), Update.delete(u1)]
    assert opt_trajectory(seq) == [1, 1, 1]


def test_trajectory_disjoint_and_stacked():
    seq = [Update.insert(square(i, (2 * i, 0), 1)) for i in range(5)]
    assert opt_trajectory(seq) == [1, 2, 3, 4, 5]
    seq = [Update.insert(square(0, (0, 0), 1)), Update.insert(square(1, (0, 0), 1))]
    assert opt_trajectory(seq) == [1, 1]


def test_trajectory_rejects_bad_delete():
    with pytest.raises(UpdateError):
        opt_trajectory([Update.delete(square(0, (0, 0), 1))])


@settings(max_examples=60)
@given(st.lists(st.integers(0, 10 ** 6), min_size=0, max_size=11), st.sampled_from(SHAPES))
def test_exact_matches_brute_force(seeds, sc):
    rng = random.Random(sum(seeds) + len(seeds))
    objs = random_instance(rng, sc, len(seeds), 0.1, 0.5)
    size, witness = exact_mis(objs)
    assert size == brute_mis(objs)
    assert is_independent([o for o in objs if o.id in witness])


@given(st.lists(st.integers(0, 12), max_size=25).flatmap(
    lambda xs: st.tuples(*[grid_objects(i) for i in range(len(xs))])))
def test_greedy_is_maximal_and_independent(objs):
    g = offline_greedy(list(objs))
    assert is_independent(g)
    ids = {o.id for o in g}
    for o in objs:
        assert o.id in ids or any(intersects(o, c) for c in g)


def test_flat_arqs_basics():
    f = FlatArqs()
    a, b = square(0, (0, 0), 1), square(1, (0.5, 0.5), 2)
    f.insert(a)
    f.insert(b)
    assert f.smallest_unmarked() == a
    f.mark_intersecting(square(2, (0.9, 0.9), 0.01))
    assert f.marked_ids() == {0, 1}
    assert f.smallest_unmarked() is None
    f.unmark_all()
    f.delete(0)
    assert f.smallest_unmarked() == b
    with pytest.raises(UpdateError):
        f.insert(b)


@given(st.lists(st.integers(0, 12), max_size=30).flatmap(
    lambda xs: st.tuples(*[grid_objects(i) for i in range(len(xs))])))
def test_checker_agrees_with_pairwise(objs):
    chk = IndependenceChecker(cell=1.0)
    kept = []
    for o in objs:
        clash = chk.conflicts(o)
        assert sorted(c.id for c in clash) == sorted(k.id for k in kept if intersects(k, o))
        if not clash:
            chk.add(o)
            kept.append(o)
    for o in kept[::2]:
        chk.remove(o)
    assert len(chk) == len(kept) - len(kept[::2])
