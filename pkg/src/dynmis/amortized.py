"""Fully dynamic approximate MIS with amortized update time.

Updates are forwarded to a DISQS. The displayed set ``I`` loses deleted
members immediately and is replaced by a fresh DISQS query once the number
of updates since the last rebuild reaches ``max(1, ceil(eps' * |I_old|))``.
With ``(1 - eps') / (1 + eps') = 1 - eps`` this keeps ``|I| >= (1 - eps) * beta * OPT``.
"""

from __future__ import annotations

import math

from .disqs import Disqs
from .geometry import ShapeClass
from .updates import Delta, Update, apply_update


def eps_prime_of(eps: float) -> float:
    """The eps' solving ``(1 - eps') / (1 + eps') = 1 - eps``."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return eps / (2 - eps)


class AmortizedMis:
    def __init__(self, shape_class: ShapeClass, eps: float, alpha: float = 0.7):
        self.eps = eps
        self.eps_prime = eps_prime_of(eps)
        self.shape_class = shape_class
        self.beta = shape_class.beta
        self.disqs = Disqs(shape_class, alpha=alpha)
        self.contents: dict = {}
        self._I: dict = {}
        self.I_old_size = 0
        self.i = 0
        self.rebuilds = 0

    @property
    def independent_set(self) -> list:
        return sorted(self._I.values(), key=lambda o: o.key)

    def __len__(self):
        return len(self.contents)

    @property
    def threshold(self) -> int:
        return max(1, math.ceil(self.I_old_size * self.eps_prime))

    def work_counter(self) -> int:
        return self.disqs.work_counter()

    def update(self, u: Update) -> Delta:
        apply_update(self.contents, u)
        self.disqs.update(u)
        self.i += 1
        if self.i >= self.threshold:
            new = self.disqs.query()
            delta = Delta.between(self._I.values(), new)
            self._I = {o.id: o for o in new}
            self.I_old_size = len(new)
            self.i = 0
            self.rebuilds += 1
            return delta
        o = u.obj
        if not u.is_insert and self._I.get(o.id) == o:
            del self._I[o.id]
            return Delta(removed=(o,))
        return Delta()
