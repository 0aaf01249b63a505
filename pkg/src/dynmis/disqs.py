"""Dynamic independent set query structure backed by an ARQS.

Updates pass straight through; a query runs the smallest-first greedy with
one mark-intersecting call per reported object, so its cost is proportional
to the size of the answer.
"""

from __future__ import annotations

from typing import Iterator, Optional

from .arqs import Arqs
from .errors import UpdateError
from .geometry import FatObject, ShapeClass
from .updates import Update


class Disqs:
    def __init__(self, shape_class: ShapeClass, alpha: float = 0.7):
        self.shape_class = shape_class
        self.beta = shape_class.beta
        self.arqs = Arqs(shape_class, alpha=alpha)

    def __len__(self):
        return len(self.arqs)

    def update(self, u: Update) -> None:
        o = u.obj
        if u.is_insert:
            self.arqs.insert(o)
        else:
            stored = self.arqs.get(o.id)
            if stored is None:
                raise UpdateError(f"delete of absent id {o.id}")
            if stored != o:
                raise UpdateError(f"delete of id {o.id} does not match the stored object")
            self.arqs.delete(o.id)

    def iter_query(self) -> Iterator[FatObject]:
        """Yield the greedy answer one object at a time.

        Marks are scratch state, so the structure must not be updated while
        the iterator is live.
        """
        arqs = self.arqs
        arqs.unmark_all()
        while True:
            x: Optional[FatObject] = arqs.smallest_unmarked()
            if x is None:
                return
            arqs.mark_intersecting(x)
            yield x

    def query(self) -> list:
        return list(self.iter_query())

    def work_counter(self) -> int:
        return self.arqs.work_counter()

    def contents(self) -> list:
        return self.arqs.objects()
