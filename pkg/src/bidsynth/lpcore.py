"""Dense two-phase primal simplex for small inequality-form LPs.

Problems are stated as

    minimize    c . x
    subject to  A x <= b        (row-wise)
                x  >= lower     (default 0, per variable)
                x  <= upper     (optional, per variable)

which covers every LP family in this package (at most ~150 variables and
~400 rows). The solver is deliberately self-contained and deterministic:
Bland's rule everywhere (entering column = smallest index with negative
reduced cost, leaving row = ratio test with smallest-basis-index ties), so
identical inputs produce identical outputs bit for bit and cycling cannot
occur. numpy supplies the array arithmetic only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# pivot feasibility tolerance / post-check tolerance
PIVOT_TOL = 1e-9
CHECK_TOL = 1e-7
MAX_ITER = 20_000


class NumericalFailure(RuntimeError):
    """Raised when pivoting fails to terminate or the result fails its post-check."""


@dataclass(frozen=True)
class LinearProgram:
    """min objective . x  s.t.  rows . x <= rhs,  lower <= x (<= upper)."""

    objective: tuple
    rows: tuple  # tuple of coefficient tuples
    rhs: tuple
    lower: tuple | None = None  # defaults to all zeros
    upper: tuple | None = None  # entries may be None for unbounded-above

    def __post_init__(self):
        c = tuple(float(v) for v in self.objective)
        rows = tuple(tuple(float(v) for v in row) for row in self.rows)
        rhs = tuple(float(v) for v in self.rhs)
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "rhs", rhs)
        n = len(c)
        if len(rows) != len(rhs):
            raise ValueError("row/rhs count mismatch")
        for row in rows:
            if len(row) != n:
                raise ValueError("row length differs from variable count")
        for row in rows:
            for v in row:
                if not np.isfinite(v):
                    raise ValueError("non-finite constraint coefficient")
        if not all(np.isfinite(v) for v in c):
            raise ValueError("non-finite objective coefficient")
        lower = self.lower
        if lower is None:
            lower = (0.0,) * n
        else:
            lower = tuple(float(v) for v in lower)
            if len(lower) != n:
                raise ValueError("lower-bound length mismatch")
        object.__setattr__(self, "lower", lower)
        if self.upper is not None:
            upper = tuple(None if v is None else float(v) for v in self.upper)
            if len(upper) != n:
                raise ValueError("upper-bound length mismatch")
            object.__setattr__(self, "upper", upper)

    @property
    def n_vars(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LpOutcome:
    """Tagged result: status is 'optimal', 'infeasible', or 'unbounded'."""

    status: str
    point: tuple | None = None
    value: float | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"

    @classmethod
    def optimal(cls, point, value) -> "LpOutcome":
        return cls("optimal", tuple(float(v) for v in point), float(value))

    @classmethod
    def infeasible(cls) -> "LpOutcome":
        return cls("infeasible")

    @classmethod
    def unbounded(cls) -> "LpOutcome":
        return cls("unbounded")


def lp_dump(lp: LinearProgram) -> str:
    """Plain-text rendering: objective row, then one constraint row per line."""
    lines = ["min " + " ".join(f"{v:+.12g}" for v in lp.objective)]
    for row, b in zip(lp.rows, lp.rhs):
        lines.append("  " + " ".join(f"{v:+.12g}" for v in row) + f" <= {b:.12g}")
    lines.append("  lower " + " ".join(f"{v:.12g}" for v in lp.lower))
    if lp.upper is not None:
        lines.append(
            "  upper " + " ".join("inf" if v is None else f"{v:.12g}" for v in lp.upper)
        )
    return "\n".join(lines)


def _bland_pivot(T, basis, cost_row, n_cols):
    """Run simplex iterations on tableau T in place. Returns 'optimal' or 'unbounded'."""
    m = len(basis)
    for _ in range(MAX_ITER):
        # entering: smallest column index with reduced cost < -PIVOT_TOL
        enter = -1
        for j in range(n_cols):
            if cost_row[j] < -PIVOT_TOL:
                enter = j
                break
        if enter < 0:
            return "optimal"
        # leaving: min ratio, ties broken by smallest basis variable index
        leave = -1
        best = np.inf
        for i in range(m):
            a = T[i, enter]
            if a > PIVOT_TOL:
                ratio = T[i, -1] / a
                if ratio < best - PIVOT_TOL or (
                    ratio < best + PIVOT_TOL
                    and (leave < 0 or basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        # pivot
        piv = T[leave, enter]
        T[leave] /= piv
        for i in range(m):
            if i != leave and T[i, enter] != 0.0:
                T[i] -= T[i, enter] * T[leave]
        cost_row -= cost_row[enter] * T[leave]
        basis[leave] = enter
    raise NumericalFailure("numerical failure: simplex iteration cap reached")


def lp_solve(lp: LinearProgram) -> LpOutcome:
    """Solve to within CHECK_TOL, or classify as infeasible/unbounded."""
    n = lp.n_vars
    lower = np.asarray(lp.lower, dtype=float)

    rows = [np.asarray(r, dtype=float) for r in lp.rows]
    rhs = list(lp.rhs)
    if lp.upper is not None:
        for i, u in enumerate(lp.upper):
            if u is not None:
                e = np.zeros(n)
                e[i] = 1.0
                rows.append(e)
                rhs.append(float(u))

    # shift to x = lower + x', x' >= 0
    A = np.vstack(rows) if rows else np.zeros((0, n))
    b = np.asarray(rhs, dtype=float) - A @ lower
    c = np.asarray(lp.objective, dtype=float)
    m = len(b)

    # rows with negative rhs get their slack negated and an artificial variable
    neg = b < 0
    A = np.where(neg[:, None], -A, A)
    b = np.abs(b)
    n_art = int(neg.sum())
    art_cols = {}
    total = n + m + n_art
    T = np.zeros((m, total + 1))
    T[:, :n] = A
    basis = [0] * m
    k = 0
    for i in range(m):
        slack = n + i
        T[i, slack] = -1.0 if neg[i] else 1.0
        if neg[i]:
            col = n + m + k
            T[i, col] = 1.0
            art_cols[i] = col
            basis[i] = col
            k += 1
        else:
            basis[i] = slack
        T[i, -1] = b[i]

    if n_art:
        # phase 1: minimize the artificial sum
        cost = np.zeros(total + 1)
        for col in art_cols.values():
            cost[col] = 1.0
        for i in art_cols:
            cost -= T[i]  # eliminate the basic artificials from the cost row
        status = _bland_pivot(T, basis, cost, total)
        if status != "optimal":
            raise NumericalFailure("numerical failure: phase 1 unbounded")
        if -cost[-1] > 1e-7:
            return LpOutcome.infeasible()
        # drive remaining artificials out of the basis
        art_set = set(art_cols.values())
        for i in range(m):
            if basis[i] in art_set:
                pivoted = False
                for j in range(n + m):
                    if abs(T[i, j]) > PIVOT_TOL:
                        piv = T[i, j]
                        T[i] /= piv
                        for ii in range(m):
                            if ii != i and T[ii, j] != 0.0:
                                T[ii] -= T[ii, j] * T[i]
                        basis[i] = j
                        pivoted = True
                        break
                if not pivoted:
                    basis[i] = -1  # redundant row; keep it inert

    # phase 2 on the original objective; the entering scan stops at n_cols,
    # so artificial columns can never re-enter
    n_cols = n + m
    cost = np.zeros(total + 1)
    cost[:n] = c
    for i in range(m):
        if 0 <= basis[i] < n_cols and cost[basis[i]] != 0.0:
            cost -= cost[basis[i]] * T[i]
    status = _bland_pivot(T, basis, cost, n_cols)
    if status == "unbounded":
        return LpOutcome.unbounded()

    x_shift = np.zeros(n)
    for i in range(m):
        if 0 <= basis[i] < n:
            x_shift[basis[i]] = T[i, -1]
    x = lower + x_shift
    value = float(c @ x)

    # post-check every constraint at the claimed point
    for row, bb in zip(lp.rows, lp.rhs):
        if float(np.dot(row, x)) > bb + CHECK_TOL:
            raise NumericalFailure("numerical failure: optimal point violates a row")
    if np.any(x < lower - CHECK_TOL):
        raise NumericalFailure("numerical failure: optimal point violates a bound")
    if lp.upper is not None:
        for i, u in enumerate(lp.upper):
            if u is not None and x[i] > u + CHECK_TOL:
                raise NumericalFailure("numerical failure: optimal point violates a bound")
    return LpOutcome.optimal(x, value)
