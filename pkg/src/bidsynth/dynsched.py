"""Contract scheduling with predictions that arrive over time.

A schedule is a sequence of contract lengths executed back to back. Each time
a prediction u_hat for the interruption deadline arrives (always at a contract
completion), a new epoch prefix is synthesized by solving one LP per candidate
length j: maximize the largest contract x_j finishable before u_hat, subject
to robustness inequalities offset by the time T already spent, the budget
sum <= u_hat - T, extendability of the combined schedule, monotonicity, and
the carry-over cap x_0 <= r*last - T. The reported consistency of an epoch is
u_hat divided by the largest contract completed by the deadline.

A fresh schedule uses a virtual completed contract of length 1, which turns
the carry-over cap into x_0 <= r, mirroring the bidding first-bid cap; the
same virtual unit anchors acceleration_ratio before the first completion.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

from .core import FEAS_TOL, ValidationError, _as_r, zeta_roots
from .lpcore import LinearProgram, lp_solve

# relative tie tolerance when two epoch lengths give the same largest contract
_TIE_TOL = 1e-12


@dataclass(frozen=True)
class ScheduleState:
    """Executed epochs so far plus the robustness budget.

    T_now is derived as the exact sum of all executed contracts, and `last` is
    the most recently completed one (the virtual unit contract when fresh).
    """

    r: float
    epochs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "r", _as_r(self.r))
        zeta_roots(self.r)  # validates r >= 4
        eps = tuple(tuple(float(c) for c in ep) for ep in self.epochs)
        object.__setattr__(self, "epochs", eps)
        for ep in eps:
            if not ep:
                raise ValidationError("empty epoch")
            prev = 0.0
            for c in ep:
                if c <= 0.0:
                    raise ValidationError(f"non-positive contract: {c}")
                if c < prev:
                    raise ValidationError("contracts must increase within an epoch")
                prev = c

    @classmethod
    def fresh(cls, r) -> "ScheduleState":
        return cls(r=_as_r(r), epochs=())

    @property
    def contracts(self) -> tuple:
        return tuple(c for ep in self.epochs for c in ep)

    @property
    def T_now(self) -> float:
        return sum(self.contracts)

    @property
    def last(self) -> float:
        return self.epochs[-1][-1] if self.epochs else 1.0

    def advance(self, epoch: tuple) -> "ScheduleState":
        return ScheduleState(r=self.r, epochs=self.epochs + (tuple(epoch),))


class EpochResult(NamedTuple):
    contracts: tuple
    consistency: float


def _epoch_lp(T: float, last: float, u_hat: float, r: float, j: int) -> LinearProgram:
    """Maximize x_j over prefixes x_0..x_j appended at time T after `last`."""
    zeta2 = zeta_roots(r).zeta2
    n = j + 1
    obj = [0.0] * n
    obj[j] = -1.0  # minimize -x_j

    rows, rhs = [], []

    def row(coeffs, b):
        rows.append(tuple(coeffs))
        rhs.append(b)

    for i in range(1, n):
        co = [0.0] * n
        for q in range(i):
            co[q] += 1.0
        co[i - 1] -= r
        co[i] += 1.0
        row(co, -T)

    row([1.0] * n, u_hat - T)

    co = [1.0] * n
    co[j] -= zeta2
    row(co, -T)

    for q in range(j):
        co = [0.0] * n
        co[q] = 1.0
        co[q + 1] = -1.0
        row(co, 0.0)

    co = [0.0] * n
    co[0] = 1.0
    row(co, r * last - T)

    return LinearProgram(objective=tuple(obj), rows=tuple(rows), rhs=tuple(rhs))


def _j_cap(u_hat: float, r: float) -> int:
    z1p = max(zeta_roots(r).zeta1, 1.05)
    return math.ceil(math.log(max(u_hat, 1.0)) / math.log(z1p)) + 2


def schedule_update(state: ScheduleState, u_hat: float) -> EpochResult:
    """Synthesize the next epoch prefix for a newly arrived prediction.

    Solves the length-j LP for each candidate j, keeps the prefix whose final
    contract is largest (ties to the shortest prefix), and reports consistency
    u_hat / x_j*.
    """
    u_hat = float(u_hat)
    T = state.T_now
    if u_hat <= T + FEAS_TOL:
        raise ValidationError(
            f"prediction must exceed current time: u_hat={u_hat}, T={T}"
        )
    r = state.r
    best = None  # (x_j, contracts)
    for j in range(_j_cap(u_hat, r) + 1):
        out = lp_solve(_epoch_lp(T, state.last, u_hat, r, j))
        if not out.is_optimal:
            continue
        xj = -out.value
        if xj <= FEAS_TOL:
            continue
        if best is None or xj > best[0] * (1.0 + _TIE_TOL) + _TIE_TOL:
            best = (xj, out.point)
    if best is None:
        raise ValidationError("infeasible update: no epoch length admits a schedule")
    xj, point = best
    return EpochResult(contracts=tuple(point), consistency=u_hat / xj)


def acceleration_ratio(contracts) -> float:
    """Worst-case ratio of elapsed time to largest completed contract.

    Interruption happens just before each completion; before the first
    completion the virtual unit contract stands in for the largest one.
    """
    xs = tuple(float(c) for c in contracts)
    if len(xs) < 2:
        raise ValidationError("acceleration ratio needs at least two contracts")
    if any(c <= 0.0 for c in xs):
        raise ValidationError("non-positive contract")
    worst = 0.0
    elapsed = 0.0
    largest = 1.0  # virtual unit contract
    for c in xs:
        elapsed += c
        worst = max(worst, elapsed / largest)
        largest = max(largest, c)
    return worst


def run_scenario(r, u_hats) -> tuple:
    """Apply schedule_update for each prediction in turn.

    Returns (list of EpochResult, final ScheduleState). Each prediction is
    taken to arrive at the completion of the previous epoch's full prefix.
    """
    state = ScheduleState.fresh(r)
    results = []
    for u_hat in u_hats:
        res = schedule_update(state, u_hat)
        results.append(res)
        state = state.advance(res.contracts)
    return results, state


def scenario_from_json(text: str) -> tuple:
    """Parse {"r": N, "predictions": [{"u_hat": N}, ...]} into (r, u_hats)."""
    doc = json.loads(text)
    try:
        r = float(doc["r"])
        u_hats = [float(p["u_hat"]) for p in doc["predictions"]]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed scenario document: {exc}")
    return r, u_hats
