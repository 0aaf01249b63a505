"""Worst-case variant: constant-size update sets via rounds and slow mixing.

Updates are grouped into rounds. During round ``t`` three things happen in
the background, a bounded amount per update:

* round ``t-1``'s archived updates are replayed into a DISQS that lags the
  live set, followed by the query that yields the snapshot ``Î_{t-1}``;
* a MIX from ``Î_{t-3}`` to ``Î_{t-2}`` is advanced and its steps, filtered
  against the live set, are applied to the displayed set ``I``;
* round ``t``'s own updates are archived for round ``t+1``.

All budgets are counted in deterministic work units: ARQS node visits for
the DISQS and mixer object touches for MIX.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import asdict, dataclass
from typing import IO, Optional

from .disqs import Disqs
from .errors import FeasibilityError
from .geometry import ShapeClass
from .mixer import REMOVE, MixState
from .updates import Delta, DeltaBuilder, Update, apply_update


@dataclass(frozen=True)
class Calibration:
    """Work-unit constants, measured once on random reference instances and frozen.

    ``f_scale * (n + 2) ** (1 - 1/(2d)) + f_base`` bounds the ARQS units of one
    update or one greedy pick; ``gamma_scale * log2(size)`` bounds mixer units
    per Advance.
    """

    f_scale: float = 1.0
    f_base: float = 64.0
    gamma_scale: float = 16.0


CALIBRATION = Calibration()


@dataclass(frozen=True)
class BudgetParams:
    eps: float
    beta: float
    g: float
    h: float
    phi: float


def budget_params(eps: float, beta: float) -> BudgetParams:
    if not 0 < eps <= 0.25:
        raise ValueError(f"eps must lie in (0, 1/4], got {eps}")
    if not 0 < beta <= 1:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    root = math.sqrt(max(0.0, 1 - 4 * eps))
    g = (1 + root) / 2
    h = (3 - root) / 2
    phi = 16 * h * h / (eps * beta * g ** 3)
    return BudgetParams(eps, beta, g, h, phi)


@dataclass
class UpdateRecord:
    index: int
    round: int
    delta_size: int
    disqs_units: int
    mix_units: int
    mix_steps: int
    i_size: int
    s_size: int


@dataclass
class RoundStats:
    """Per-round record; ``i_hat_size`` is the snapshot the round's catch-up produced."""

    round: int
    length: int
    start_index: int
    end_index: int = -1
    i_hat_size: int = 0
    mix_total_steps: int = 0
    mix_steps_emitted: int = 0
    mix_units: int = 0
    disqs_units: int = 0
    max_delta: int = 0
    mix_done_at: Optional[int] = None
    catchup_done_at: Optional[int] = None
    mix_done: bool = False
    catchup_done: bool = False
    s_size_at_end: int = 0

    @property
    def feasible(self) -> bool:
        return self.mix_done and self.catchup_done


class DeamortizedMis:
    def __init__(self, shape_class: ShapeClass, eps: float, alpha: float = 0.7,
                 calibration: Calibration = CALIBRATION, strict: bool = True,
                 event_log: Optional[IO[str]] = None):
        self.shape_class = shape_class
        self.dim = shape_class.dim
        self.eps = eps
        self.params = budget_params(eps, shape_class.beta)
        self.calibration = calibration
        self.strict = strict
        self.event_log = event_log
        self.disqs = Disqs(shape_class, alpha=alpha)
        self.S: dict = {}
        self.I: dict = {}
        self.Q: deque = deque()
        self.i_hat_prev3: list = []
        self.i_hat_prev2: list = []
        self.t = 0
        self.pos = 0
        self.R = 1
        self.updates_seen = 0
        self.records: list = []
        self._rounds: list = []
        self.misses: list = []
        self._start_round()

    # ---- budgets ----

    def f_units(self, n: int) -> float:
        c = self.calibration
        return c.f_scale * (n + 2) ** (1 - 1 / (2 * self.dim)) + c.f_base

    def disqs_budget(self, n: int) -> float:
        p = self.params
        return (1 + 2 * p.h / (p.beta * p.eps)) * self.f_units(n)

    @property
    def mix_step_cap(self) -> int:
        return math.floor(self.params.phi)

    def mix_unit_cap(self) -> float:
        size = len(self.i_hat_prev3) + len(self.i_hat_prev2)
        return self.params.phi * self.calibration.gamma_scale * math.ceil(math.log2(size + 2))

    # ---- rounds ----

    def _start_round(self) -> None:
        self.t += 1
        self.pos = 0
        self.R = max(1, math.floor(self.eps * len(self.i_hat_prev2)))
        self.mix = MixState(self.i_hat_prev3, self.i_hat_prev2, validate=False)
        self._catchup = self._catchup_gen(self.t - 1)
        self._catchup_result: Optional[list] = None
        self._stats = RoundStats(round=self.t, length=self.R, start_index=self.updates_seen,
                                 mix_total_steps=self.mix.total_steps)
        self._rounds.append(self._stats)

    def _catchup_gen(self, upto: int):
        while self.Q and self.Q[0][0] <= upto:
            _, u = self.Q.popleft()
            self.disqs.update(u)
            yield
        out = []
        for x in self.disqs.iter_query():
            out.append(x)
            yield
        return out

    def _step_catchup(self, budget: float) -> int:
        start = self.disqs.work_counter()
        while self._catchup_result is None and self.disqs.work_counter() - start < budget:
            try:
                next(self._catchup)
            except StopIteration as stop:
                self._catchup_result = stop.value
                self._stats.catchup_done_at = self.pos
        return self.disqs.work_counter() - start

    def _finish_catchup(self) -> None:
        while self._catchup_result is None:
            self._step_catchup(math.inf)

    def _end_round(self, builder: DeltaBuilder) -> None:
        st = self._stats
        st.end_index = self.updates_seen - 1
        st.s_size_at_end = len(self.S)
        st.mix_done = self.mix.done
        st.catchup_done = self._catchup_result is not None
        st.mix_steps_emitted = self.mix.emitted
        if not st.feasible:
            msg = (f"round {self.t}: mix {'done' if st.mix_done else 'unfinished'}, "
                   f"catch-up {'done' if st.catchup_done else 'unfinished'}")
            if self.strict:
                raise FeasibilityError(msg)
            self.misses.append(msg)
            self._finish_catchup()
            self._drain_mix(builder)
        st.i_hat_size = len(self._catchup_result)
        self.i_hat_prev3 = self.i_hat_prev2
        self.i_hat_prev2 = self._catchup_result
        self._start_round()

    # ---- mixing ----

    def _apply_steps(self, steps, builder: DeltaBuilder) -> None:
        for step in steps:
            o = step.obj
            if step.op == REMOVE:
                if self.I.get(o.id) == o:
                    del self.I[o.id]
                    builder.remove(o)
            elif self.S.get(o.id) == o:
                self.I[o.id] = o
                builder.add(o)

    def _drain_mix(self, builder: DeltaBuilder) -> None:
        self._apply_steps(self.mix.run(), builder)

    # ---- public ----

    @property
    def independent_set(self) -> list:
        return sorted(self.I.values(), key=lambda o: o.key)

    def __len__(self):
        return len(self.S)

    def update(self, u: Update) -> Delta:
        apply_update(self.S, u)
        builder = DeltaBuilder()
        o = u.obj
        if not u.is_insert and self.I.get(o.id) == o:
            del self.I[o.id]
            builder.remove(o)
        self.Q.append((self.t, u))

        disqs_units = self._step_catchup(self.disqs_budget(len(self.S)))

        mix_start = self.mix.work
        steps = self.mix.run(max_steps=self.mix_step_cap, max_units=self.mix_unit_cap())
        self._apply_steps(steps, builder)
        mix_units = self.mix.work - mix_start

        st = self._stats
        st.disqs_units += disqs_units
        st.mix_units += mix_units
        if self.mix.done and st.mix_done_at is None:
            st.mix_done_at = self.pos
        index, round_no = self.updates_seen, self.t
        self.updates_seen += 1
        self.pos += 1
        if self.pos >= self.R:
            self._end_round(builder)

        delta = builder.build()
        st.max_delta = max(st.max_delta, len(delta))
        rec = UpdateRecord(index, round_no, len(delta), disqs_units, mix_units,
                           len(steps), len(self.I), len(self.S))
        self.records.append(rec)
        if self.event_log is not None:
            self.event_log.write(json.dumps({
                "update_index": rec.index, "round": rec.round, "delta_size": rec.delta_size,
                "disqs_units": disqs_units, "mix_units": mix_units, "I": rec.i_size,
            }) + "\n")
        return delta

    def round_stats(self) -> list:
        """Records of completed rounds, oldest first."""
        return [r for r in self._rounds if r.end_index >= 0]

    def round_stats_dicts(self) -> list:
        return [asdict(r) for r in self.round_stats()]
