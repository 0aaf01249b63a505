"""Updates to the stored set and update sets reported back to the caller."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal

from .errors import UpdateError
from .geometry import FatObject, from_json, to_json

INSERT = "insert"
DELETE = "delete"


@dataclass(frozen=True)
class Update:
    op: Literal["insert", "delete"]
    obj: FatObject

    def __post_init__(self):
        if self.op not in (INSERT, DELETE):
            raise UpdateError(f"unknown update op {self.op!r}")

    @classmethod
    def insert(cls, obj: FatObject) -> "Update":
        return cls(INSERT, obj)

    @classmethod
    def delete(cls, obj: FatObject) -> "Update":
        return cls(DELETE, obj)

    @property
    def is_insert(self) -> bool:
        return self.op == INSERT

    def to_json(self) -> dict:
        return {"op": self.op, "object": to_json(self.obj)}

    @classmethod
    def from_json(cls, d: dict) -> "Update":
        return cls(d["op"], from_json(d["object"]))


def apply_update(contents: dict, u: Update) -> None:
    """Apply ``u`` to an ``id -> object`` map, enforcing the update contract."""
    o = u.obj
    if u.is_insert:
        if o.id in contents:
            raise UpdateError(f"insert of present id {o.id}")
        contents[o.id] = o
    else:
        cur = contents.get(o.id)
        if cur is None:
            raise UpdateError(f"delete of absent id {o.id}")
        if cur != o:
            raise UpdateError(f"delete of id {o.id} does not match the stored object")
        del contents[o.id]


@dataclass(frozen=True)
class Delta:
    """Symmetric difference between consecutive displayed independent sets."""

    added: tuple = ()
    removed: tuple = ()

    def __len__(self):
        return len(self.added) + len(self.removed)

    def __bool__(self):
        return bool(self.added or self.removed)

    def objects(self) -> frozenset:
        return frozenset(self.added) | frozenset(self.removed)

    def apply(self, view: set) -> None:
        """Apply to a caller-side set of objects, checking consistency."""
        for o in self.removed:
            if o not in view:
                raise UpdateError(f"delta removes {o.id}, which is not displayed")
            view.remove(o)
        for o in self.added:
            if o in view:
                raise UpdateError(f"delta adds {o.id}, which is already displayed")
            view.add(o)

    @classmethod
    def between(cls, old: Iterable[FatObject], new: Iterable[FatObject]) -> "Delta":
        old_s, new_s = set(old), set(new)
        key = lambda o: o.key
        return cls(tuple(sorted(new_s - old_s, key=key)), tuple(sorted(old_s - new_s, key=key)))


class DeltaBuilder:
    """Accumulates adds/removes within one update, cancelling opposite pairs."""

    def __init__(self):
        self._ops: dict[FatObject, str] = {}

    def add(self, o: FatObject) -> None:
        if self._ops.get(o) == "remove":
            del self._ops[o]
        else:
            self._ops[o] = "add"

    def remove(self, o: FatObject) -> None:
        if self._ops.get(o) == "add":
            del self._ops[o]
        else:
            self._ops[o] = "remove"

    def build(self) -> Delta:
        added = tuple(o for o, op in self._ops.items() if op == "add")
        removed = tuple(o for o, op in self._ops.items() if op == "remove")
        return Delta(added, removed)
