import math
import random

import pytest
from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.stateful import RuleBasedStateMachine, invariant, precondition, rule

from dynmis.arqs import Arqs
from dynmis.errors import DimensionError, UpdateError
from dynmis.geometry import ShapeClass, ball, hypercube, intersects, square
from dynmis.oracle import FlatArqs

from conftest import grid_objects, random_instance


def test_insert_into_empty():
    t = Arqs(ShapeClass.squares())
    o = square(0, (0, 0), 1)
    t.insert(o)
    assert len(t) == 1 and t.smallest_unmarked() == o


def test_height_after_100_inserts():
    rng = random.Random(1)
    t = Arqs(ShapeClass.squares())
    for o in random_instance(rng, ShapeClass.squares(), 100):
        t.insert(o)
    assert len(t) == 100
    assert t.height() <= math.log(100, 1 / 0.7) + 3
    t.check_invariants()


def test_duplicate_and_missing_ids():
    t = Arqs(ShapeClass.squares())
    t.insert(square(0, (0, 0), 1))
    with pytest.raises(UpdateError):
        t.insert(square(0, (5, 5), 1))
    with pytest.raises(UpdateError):
        t.delete(7)
    with pytest.raises(DimensionError):
        t.insert(hypercube(1, (0, 0, 0), 1))


def test_insert_delete_empties():
    t = Arqs(ShapeClass.squares())
    t.insert(square(0, (0, 0), 1))
    t.delete(0)
    assert len(t) == 0 and t.smallest_unmarked() is None
    with pytest.raises(UpdateError):
        t.delete(0)


def test_delete_half_then_min():
    rng = random.Random(2)
    objs = random_instance(rng, ShapeClass.squares(), 50)
    t = Arqs(ShapeClass.squares())
    for o in objs:
        t.insert(o)
    gone = set(rng.sample(range(50), 25))
    for i in gone:
        t.delete(i)
    survivors = [o for o in objs if o.id not in gone]
    assert t.smallest_unmarked() == min(survivors, key=lambda o: o.key)
    t.check_invariants()


def test_unmark_all_restores_min():
    rng = random.Random(3)
    objs = random_instance(rng, ShapeClass.squares(), 40)
    t = Arqs.bulk(objs)
    t.mark_all()
    assert t.smallest_unmarked() is None
    t.unmark_all()
    assert t.smallest_unmarked() == min(objs, key=lambda o: o.key)
    Arqs(ShapeClass.squares()).unmark_all()


def test_mark_disjoint_and_reflexive():
    objs = [square(i, (3 * i, 0), 1) for i in range(10)]
    t = Arqs.bulk(objs)
    t.mark_intersecting(square(99, (100, 100), 1))
    assert t.marked_ids() == set()
    t.mark_intersecting(objs[4])
    assert t.marked_ids() == {4}


def test_mark_matches_scan():
    rng = random.Random(4)
    for sc in (ShapeClass.squares(), ShapeClass.disks()):
        objs = random_instance(rng, sc, 200, 0.01, 0.2)
        t = Arqs(sc)
        for o in objs:
            t.insert(o)
        for k in range(20):
            q = random_instance(rng, sc, 1, 0.01, 0.3, start=1000 + k)[0]
            t.unmark_all()
            t.mark_intersecting(q)
            assert t.marked_ids() == {o.id for o in objs if intersects(o, q)}


def test_smallest_unmarked_sizes():
    objs = [square(i, (5 * i, 0), s) for i, s in enumerate((3, 1, 2))]
    t = Arqs.bulk(objs)
    assert t.smallest_unmarked().id == 1


def test_work_counter_deterministic():
    def replay():
        rng = random.Random(5)
        t = Arqs(ShapeClass.squares())
        assert t.work_counter() == 0
        objs = random_instance(rng, ShapeClass.squares(), 300)
        for o in objs:
            t.insert(o)
        for o in objs[::3]:
            t.delete(o.id)
        for o in objs[1::7]:
            t.mark_intersecting(o)
            t.smallest_unmarked()
        return t.work_counter()

    first = replay()
    assert first > 0 and first == replay()


def test_ball_box_corner_is_not_a_hit():
    t = Arqs(dim=2)
    t.insert(ball(0, (0, 0), 1))
    t.insert(square(1, (0.8, 0.8), 1))
    # inside the ball's bounding box, outside the ball itself
    t.mark_intersecting(square(2, (0.8, -1), 0.1))
    assert t.marked_ids() == set()
    t.mark_intersecting(square(3, (0.5, -0.5), 0.1))
    assert t.marked_ids() == {0}


class ArqsModel(RuleBasedStateMachine):
    """Drive the kd-tree and the flat reference with the same operations."""

    def __init__(self):
        super().__init__()
        self.tree = Arqs(dim=2)
        self.flat = FlatArqs()
        self.next_id = 0

    @rule(data=st.data())
    def insert(self, data):
        o = data.draw(grid_objects(self.next_id))
        self.next_id += 1
        self.tree.insert(o)
        self.flat.insert(o)

    @precondition(lambda self: len(self.flat) > 0)
    @rule(data=st.data())
    def delete(self, data):
        oid = data.draw(st.sampled_from(sorted(self.flat.objects)))
        self.tree.delete(oid)
        self.flat.delete(oid)

    @rule()
    def unmark_all(self):
        self.tree.unmark_all()
        self.flat.unmark_all()

    @rule(data=st.data())
    def mark(self, data):
        q = data.draw(grid_objects(-1))
        self.tree.mark_intersecting(q)
        self.flat.mark_intersecting(q)

    @rule()
    def smallest(self):
        assert self.tree.smallest_unmarked() == self.flat.smallest_unmarked()

    @invariant()
    def agree(self):
        assert len(self.tree) == len(self.flat)
        assert self.tree.marked_ids() == self.flat.marked_ids()
        self.tree.check_invariants()


ArqsModel.TestCase.settings = settings(max_examples=60, stateful_step_count=60, deadline=None)
TestArqsModel = ArqsModel.TestCase
