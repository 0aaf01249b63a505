import math
import random

import pytest

from dynmis.amortized import AmortizedMis, eps_prime_of
from dynmis.bench import Pattern, Workload, generate
from dynmis.errors import UpdateError
from dynmis.geometry import ShapeClass, square
from dynmis.oracle import is_independent, opt_trajectory
from dynmis.updates import Update

SQ = ShapeClass.squares()


def test_eps_prime_values():
    assert eps_prime_of(0.5) == pytest.approx(1 / 3)
    assert eps_prime_of(2 / 3) == pytest.approx(0.5)
    assert eps_prime_of(1e-6) == pytest.approx(0, abs=1e-6)
    for eps in (0.1, 0.3, 0.5):
        ep = eps_prime_of(eps)
        assert (1 - ep) / (1 + ep) == pytest.approx(1 - eps)


@pytest.mark.parametrize("eps", [0, 1, -0.1, 1.5])
def test_eps_prime_range(eps):
    with pytest.raises(ValueError):
        eps_prime_of(eps)


def test_first_insert_rebuilds():
    m = AmortizedMis(SQ, 0.2)
    o = square(0, (0, 0), 1)
    delta = m.update(Update.insert(o))
    assert delta.added == (o,) and delta.removed == ()
    assert m.independent_set == [o]


def test_malformed_update_leaves_state():
    m = AmortizedMis(SQ, 0.2)
    m.update(Update.insert(square(0, (0, 0), 1)))
    with pytest.raises(UpdateError):
        m.update(Update.insert(square(0, (3, 3), 1)))
    with pytest.raises(UpdateError):
        m.update(Update.delete(square(4, (3, 3), 1)))
    assert len(m) == 1 and len(m.independent_set) == 1


def test_deleting_member_reported():
    m = AmortizedMis(SQ, 0.1)
    objs = [square(i, (2 * i, 0), 1) for i in range(30)]
    for o in objs:
        m.update(Update.insert(o))
    assert m.threshold >= 2
    before = {o.id for o in m.independent_set}
    victim = next(o for o in objs if o.id in before)
    delta = m.update(Update.delete(victim))
    assert victim in delta.removed
    assert victim not in m.independent_set


def test_threshold_rule():
    m = AmortizedMis(SQ, 0.3)
    for i in range(50):
        m.update(Update.insert(square(i, (2 * i, 0), 1)))
    assert m.threshold == max(1, math.ceil(m.I_old_size * eps_prime_of(0.3)))


def test_bound_500_updates():
    w = Workload(21, SQ, 40, 500, Pattern("churn", 0.4))
    seq = generate(w)
    opts = opt_trajectory(seq)
    m = AmortizedMis(SQ, 0.2)
    view: set = set()
    for u, opt in zip(seq, opts):
        m.update(u).apply(view)
        assert view == set(m.independent_set)
        assert len(view) >= 0.8 * 0.25 * opt
    assert is_independent(m.independent_set)


def test_dense_sequences_keep_bound():
    rng = random.Random(22)
    for trial in range(10):
        live, seq, nid = [], [], 0
        for _ in range(150):
            if live and (len(live) >= 30 or rng.random() < 0.35):
                seq.append(Update.delete(live.pop(rng.randrange(len(live)))))
            else:
                s = rng.uniform(0.05, 0.3)
                o = square(nid, (rng.random(), rng.random()), s)
                nid += 1
                live.append(o)
                seq.append(Update.insert(o))
        m = AmortizedMis(SQ, 0.1)
        for u, opt in zip(seq, opt_trajectory(seq)):
            m.update(u)
            assert 4 * len(m.independent_set) >= 0.9 * opt - 1e-9
