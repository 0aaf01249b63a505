"""Workload generation, instrumented runs, trace verification and scaling reports."""

from __future__ import annotations

import csv
import json
import math
import random
import statistics
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional, Sequence

from .amortized import AmortizedMis
from .arqs import Arqs
from .deamortized import DeamortizedMis, budget_params
from .errors import InstanceTooLarge, UpdateError
from .geometry import FatObject, ShapeClass, ball, from_json, hypercube, rect
from .oracle import IndependenceChecker, exact_mis
from .updates import Update, apply_update

SIZE_RANGE = (1e-3, 1e-1)


@dataclass(frozen=True)
class Pattern:
    kind: str  # insert | churn | hashtag | growshrink
    p_delete: float = 0.0

    @classmethod
    def parse(cls, text: str) -> "Pattern":
        name, _, arg = text.partition(":")
        if name == "churn":
            p = float(arg) if arg else 0.5
            if not 0 <= p <= 1:
                raise ValueError("churn probability must lie in [0, 1]")
            return cls("churn", p)
        if name in ("insert", "hashtag", "growshrink") and not arg:
            return cls(name)
        raise ValueError(f"unknown pattern {text!r}")

    def __str__(self):
        return f"churn:{self.p_delete}" if self.kind == "churn" else self.kind


@dataclass(frozen=True)
class Workload:
    seed: int
    shape_class: ShapeClass
    n_target: int
    length: int
    pattern: Pattern

    @property
    def dimension(self) -> int:
        return self.shape_class.dim


def random_object(rng: random.Random, shape_class: ShapeClass, oid: int) -> FatObject:
    """Object inside [0,1]^d whose enclosing cube size is log-uniform in SIZE_RANGE."""
    lo_exp, hi_exp = (math.log10(s) for s in SIZE_RANGE)
    size = 10 ** rng.uniform(lo_exp, hi_exp)
    d = shape_class.dim
    if shape_class.uses_balls:
        r = size / 2
        return ball(oid, [rng.uniform(r, 1 - r) for _ in range(d)], r)
    return hypercube(oid, [rng.uniform(0, 1 - size) for _ in range(d)], size)


def hashtag(n: int, width: Optional[float] = None) -> tuple:
    """``n`` horizontal and ``n`` vertical bars; each bar meets every bar of the other family."""
    w = width if width is not None else 1 / (4 * n)
    if not 0 < w < 1 / n:
        raise ValueError("bar width must lie in (0, 1/n)")
    horiz = [rect(i, (0.0, i / n), (1.0, i / n + w)) for i in range(n)]
    vert = [rect(n + i, (i / n, 0.0), (i / n + w, 1.0)) for i in range(n)]
    return horiz, vert


def generate(w: Workload) -> list:
    rng = random.Random(w.seed)
    out: list = []
    if w.pattern.kind == "hashtag":
        horiz, vert = hashtag(max(1, w.n_target))
        script = [Update.insert(o) for o in horiz] + [Update.insert(o) for o in vert]
        script += [Update.delete(o) for o in horiz]
        return script[:w.length]

    live: list = []
    next_id = 0

    def insert():
        nonlocal next_id
        o = random_object(rng, w.shape_class, next_id)
        next_id += 1
        live.append(o)
        out.append(Update.insert(o))

    def delete():
        i = rng.randrange(len(live))
        live[i], live[-1] = live[-1], live[i]
        out.append(Update.delete(live.pop()))

    for step in range(w.length):
        if w.pattern.kind == "insert":
            insert()
        elif w.pattern.kind == "growshrink":
            if step < (w.length + 1) // 2 or not live:
                insert()
            else:
                delete()
        else:
            if live and (len(live) >= w.n_target or rng.random() < w.pattern.p_delete):
                delete()
            else:
                insert()
    return out


def write_updates(updates: Iterable[Update], fp: IO[str]) -> None:
    for u in updates:
        fp.write(json.dumps(u.to_json()) + "\n")


def read_updates(fp: IO[str]) -> list:
    return [Update.from_json(json.loads(line)) for line in fp if line.strip()]


# ---- runs ----

@dataclass
class RunReport:
    records: list = field(default_factory=list)
    rounds: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    independent_set: list = field(default_factory=list)
    contents: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def write_csv(self, fp: IO[str]) -> None:
        if not self.records:
            return
        writer = csv.DictWriter(fp, fieldnames=list(self.records[0]))
        writer.writeheader()
        writer.writerows(self.records)


def fit_exponent(ns: Sequence[float], values: Sequence[float]) -> Optional[float]:
    """Slope of log(value) against log(n); None with fewer than two distinct n."""
    pairs = [(math.log(n), math.log(v)) for n, v in zip(ns, values) if n > 0 and v > 0]
    if len({x for x, _ in pairs}) < 2:
        return None
    slope, _ = statistics.linear_regression([x for x, _ in pairs], [y for _, y in pairs])
    return slope


def _bucketed_exponent(records: list) -> Optional[float]:
    buckets: dict = {}
    for r in records:
        if r["s_size"] >= 16:
            buckets.setdefault(r["s_size"].bit_length(), []).append(r["work_units"])
    ns = [2 ** (b - 1) for b in sorted(buckets)]
    meds = [statistics.median(buckets[b]) for b in sorted(buckets)]
    return fit_exponent(ns, meds)


def _make(kind: str, shape_class: ShapeClass, eps: float, event_log=None):
    if kind == "amortized":
        return AmortizedMis(shape_class, eps)
    if kind == "deamortized":
        return DeamortizedMis(shape_class, eps, event_log=event_log)
    raise ValueError(f"unknown structure {kind!r}")


def run(kind: str, w: Workload, eps: float, updates: Optional[list] = None,
        trace: Optional[IO[str]] = None, oracle_prefix: int = 40,
        event_log: Optional[IO[str]] = None) -> RunReport:
    """Feed a workload through a structure and check every invariant on the way."""
    seq = generate(w) if updates is None else updates
    struct = _make(kind, w.shape_class, eps, event_log)
    f = w.shape_class.fatness
    phi = budget_params(eps, w.shape_class.beta).phi if kind == "deamortized" else None
    report = RunReport()
    if trace is not None:
        header = {"type": "header", "structure": kind, "shape": str(w.shape_class), "eps": eps,
                  "fatness": f, "phi": phi, "seed": w.seed, "pattern": str(w.pattern),
                  "n_target": w.n_target, "length": len(seq)}
        trace.write(json.dumps(header) + "\n")

    contents: dict = {}
    shown: dict = {}
    checker = IndependenceChecker()
    for idx, u in enumerate(seq):
        apply_update(contents, u)
        before = struct.work_counter() if kind == "amortized" else 0
        delta = struct.update(u)
        if kind == "amortized":
            work = struct.work_counter() - before
        else:
            last = struct.records[-1]
            work = last.disqs_units + last.mix_units
        for o in delta.removed:
            if shown.pop(o.id, None) is None:
                report.violations.append(f"update {idx}: removed {o.id} not displayed")
            else:
                checker.remove(o)
        if not u.is_insert and u.obj.id in shown:
            report.violations.append(f"update {idx}: deleted {u.obj.id} still displayed")
            checker.remove(shown.pop(u.obj.id))
        for o in delta.added:
            if contents.get(o.id) != o:
                report.violations.append(f"update {idx}: added {o.id} not in S")
            if checker.add(o):
                report.violations.append(f"update {idx}: added {o.id} intersects the displayed set")
            shown[o.id] = o
        if phi is not None and len(delta) > phi + 1:
            report.violations.append(f"update {idx}: |delta| = {len(delta)} exceeds phi + 1")
        rec = {"index": idx, "op": u.op, "id": u.obj.id, "work_units": work,
               "delta_size": len(delta), "i_size": len(shown), "s_size": len(contents),
               "opt": "", "ratio": ""}
        if len(contents) <= oracle_prefix:
            try:
                opt = exact_mis(list(contents.values()))[0]
            except InstanceTooLarge:
                opt = None
            if opt:
                rec["opt"] = opt
                rec["ratio"] = len(shown) * f / opt
        report.records.append(rec)
        if trace is not None:
            trace.write(json.dumps({
                "type": "update", "index": idx, **u.to_json(),
                "added": [o.id for o in delta.added], "removed": [o.id for o in delta.removed],
                "delta_size": len(delta), "work": work,
            }) + "\n")

    final = {o.id: o for o in struct.independent_set}
    if final != shown:
        report.violations.append("displayed set differs from the structure's own set")
    if any(contents.get(k) != o for k, o in final.items()):
        report.violations.append("final independent set not contained in S")
    report.independent_set = list(final.values())
    report.contents = contents
    if kind == "deamortized":
        report.rounds = struct.round_stats_dicts()
    ratios = [r["ratio"] for r in report.records if r["ratio"] != ""]
    report.summary = {
        "structure": kind, "shape": str(w.shape_class), "pattern": str(w.pattern), "eps": eps,
        "updates": len(seq), "max_delta": max((r["delta_size"] for r in report.records), default=0),
        "phi": phi, "work_exponent": _bucketed_exponent(report.records),
        "min_ratio": min(ratios, default=None), "final_i": len(final), "final_s": len(contents),
        "violations": len(report.violations),
    }
    return report


# ---- verification ----

def verify(fp: IO[str], oracle_prefix: int = 0) -> list:
    """Replay a trace and return a list of invariant violations (empty if clean)."""
    lines = [json.loads(line) for line in fp if line.strip()]
    if not lines or lines[0].get("type") != "header":
        return ["trace has no header line"]
    header = lines[0]
    phi = header.get("phi")
    f = header.get("fatness")
    eps = header.get("eps")
    problems: list = []
    contents: dict = {}
    shown: dict = {}
    checker = IndependenceChecker()
    for rec in lines[1:]:
        idx = rec.get("index")
        try:
            u = Update(rec["op"], from_json(rec["object"]))
            apply_update(contents, u)
        except (KeyError, ValueError, UpdateError) as exc:
            problems.append(f"update {idx}: malformed ({exc})")
            continue
        for oid in rec.get("removed", []):
            o = shown.pop(oid, None)
            if o is None:
                problems.append(f"update {idx}: removed {oid} not displayed")
            else:
                checker.remove(o)
        if not u.is_insert and u.obj.id in shown:
            problems.append(f"update {idx}: deleted {u.obj.id} still displayed")
            checker.remove(shown.pop(u.obj.id))
        for oid in rec.get("added", []):
            o = contents.get(oid)
            if o is None:
                problems.append(f"update {idx}: added {oid} not in S")
                continue
            if oid in shown:
                problems.append(f"update {idx}: added {oid} twice")
                continue
            if checker.add(o):
                problems.append(f"update {idx}: added {oid} intersects the displayed set")
            shown[oid] = o
        size = len(rec.get("added", [])) + len(rec.get("removed", []))
        if phi is not None and size > phi + 1:
            problems.append(f"update {idx}: |delta| = {size} exceeds phi + 1")
        if (oracle_prefix and f and header.get("structure") == "amortized"
                and len(contents) <= oracle_prefix):
            opt = exact_mis(list(contents.values()))[0]
            if len(shown) * f < (1 - eps) * opt - 1e-9:
                problems.append(f"update {idx}: |I| = {len(shown)} below (1 - eps) OPT / f")
    return problems


# ---- scaling ----

def scaling_report(ns: Sequence[int], shape_class: Optional[ShapeClass] = None, seed: int = 0,
                   probes: int = 200) -> dict:
    """Median ARQS query work (unmark-all, mark-intersecting, smallest-unmarked) per n."""
    sc = shape_class or ShapeClass.squares()
    rows = []
    for n in ns:
        rng = random.Random(seed * 1_000_003 + n)
        t = Arqs(sc)
        for i in range(n):
            t.insert(random_object(rng, sc, i))
        costs = []
        for j in range(probes):
            q = random_object(rng, sc, n + j)
            before = t.work_counter()
            t.unmark_all()
            t.mark_intersecting(q)
            t.smallest_unmarked()
            costs.append(t.work_counter() - before)
        rows.append({"n": n, "median_work": statistics.median(costs), "max_work": max(costs),
                     "height": t.height()})
    exponent = fit_exponent([r["n"] for r in rows], [r["median_work"] for r in rows])
    return {"shape": str(sc), "rows": rows, "exponent": exponent}


def write_scaling_csv(report: dict, fp: IO[str]) -> None:
    writer = csv.DictWriter(fp, fieldnames=["n", "median_work", "max_work", "height"])
    writer.writeheader()
    writer.writerows(report["rows"])
    fp.write(f"# shape={report['shape']} exponent={report['exponent']:.4f}\n")
