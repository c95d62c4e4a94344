"""Linear search on the line with signed distributional predictions.

A searcher starts at the origin and alternates excursions between the two
half-lines: excursion i goes to distance x_i on side (-1)^(i+delta) and back.
Finding a target at position h costs |h| plus twice every earlier excursion.
A strategy is r-robust iff its magnitudes satisfy the bidding-style growth
inequalities with rho = (r-1)/2 in place of r (plus the first-excursion cap
x_0 <= r), so the tight-extension and extendability machinery carries over
with rho; r >= 9 corresponds to rho >= 4, the feasibility threshold.

Synthesis enumerates the search parity, the valid discovery orderings (each
next discovered point is the current left or right frontier), and the
excursion indices locating each point, then solves one LP per combination.
Randomized search mirrors the bidding family with phase s ~ U[delta, 2) and
a parity aligned to the predicted side.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import FEAS_TOL, ValidationError
from .lpcore import LinearProgram, NumericalFailure, lp_solve

# relative objective ties across (parity, ordering, configuration) winners
_TIE_TOL = 1e-12


def rho_of(r: float) -> float:
    """Growth budget for excursion magnitudes: rho = (r-1)/2."""
    return (float(r) - 1.0) / 2.0


@dataclass(frozen=True)
class SearchStrategy:
    """Excursion magnitudes plus the side parity.

    Excursion i visits (-1)^(i+parity_delta) * x_i. Magnitudes must be
    non-decreasing within each parity class. With extended=True the sequence
    continues by the tight rho-extension (rho required).
    """

    parity_delta: int
    magnitudes: tuple
    extended: bool = False
    rho: float | None = None

    def __post_init__(self):
        mags = tuple(float(m) for m in self.magnitudes)
        object.__setattr__(self, "magnitudes", mags)
        if self.parity_delta not in (0, 1):
            raise ValidationError(f"parity must be 0 or 1: {self.parity_delta}")
        if not mags:
            raise ValidationError("empty magnitude sequence")
        for m in mags:
            if m <= 0.0:
                raise ValidationError(f"non-positive magnitude: {m}")
        for i in range(len(mags) - 2):
            if mags[i] > mags[i + 2] * (1.0 + 1e-12):
                raise ValidationError("magnitudes must be non-decreasing per parity")
        if self.extended and self.rho is None:
            raise ValidationError("extension flag requires rho")
        if self.rho is not None:
            object.__setattr__(self, "rho", float(self.rho))

    def side(self, i: int) -> int:
        return -1 if (i + self.parity_delta) % 2 else 1

    def magnitude(self, i: int) -> float:
        if i < 0:
            raise IndexError(i)
        if i < len(self.magnitudes):
            return self.magnitudes[i]
        if not self.extended:
            raise IndexError(i)
        mags = self.magnitudes
        rho = self.rho
        prev2 = mags[-1]
        prev1 = rho * mags[-1] - sum(mags)
        for _ in range(len(mags), i):
            prev2, prev1 = prev1, rho * (prev1 - prev2)
        return prev1


@dataclass(frozen=True)
class SignedPrediction:
    """Finite distribution over signed target positions, |position| >= 1.

    Points are ordered by non-decreasing absolute position (both signs may
    share a magnitude); probabilities sum to 1.
    """

    points: tuple

    def __post_init__(self):
        pts = tuple((float(v), float(p)) for v, p in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValidationError("prediction needs at least one point")
        total = 0.0
        prev = 0.0
        seen = set()
        for v, p in pts:
            if abs(v) < 1.0:
                raise ValidationError(f"position magnitude below 1: {v}")
            if abs(v) < prev - 1e-12:
                raise ValidationError("positions must be sorted by absolute value")
            if v in seen:
                raise ValidationError(f"duplicate position: {v}")
            if p < -FEAS_TOL or p > 1.0 + FEAS_TOL:
                raise ValidationError(f"probability outside [0,1]: {p}")
            seen.add(v)
            prev = abs(v)
            total += p
        if abs(total - 1.0) > FEAS_TOL:
            raise ValidationError(f"probabilities sum to {total}, not 1")

    @property
    def positions(self) -> tuple:
        return tuple(v for v, _ in self.points)

    @property
    def probs(self) -> tuple:
        return tuple(p for _, p in self.points)

    @property
    def k(self) -> int:
        return len(self.points)

    def expected_abs(self) -> float:
        return sum(abs(v) * p for v, p in self.points)


def search_cost(S: SearchStrategy, h: float) -> float:
    """|h| plus twice every excursion before the one that finds h."""
    h = float(h)
    target = abs(h)
    sign = 1 if h > 0 else -1
    if target < 1.0:
        raise ValidationError(f"target magnitude below 1: {h}")
    spent = 0.0
    i = 0
    while True:
        try:
            m = S.magnitude(i)
        except IndexError:
            raise ValidationError(f"target unreachable: no excursion covers {h}")
        if S.side(i) == sign and m >= target:
            return target + 2.0 * spent
        spent += m
        i += 1
        if i > 100_000:
            raise ValidationError(f"target unreachable: no excursion covers {h}")


def search_consistency(S: SearchStrategy, mu: SignedPrediction) -> float:
    """Expected cost over the prediction divided by the expected distance."""
    num = sum(p * search_cost(S, v) for v, p in mu.points)
    return num / mu.expected_abs()


def _partially_robust_rho(mags: tuple, rho: float, r: float) -> bool:
    if mags[0] > r + FEAS_TOL * (1.0 + r):
        return False
    total = mags[0]
    for i in range(1, len(mags)):
        if mags[i] + total - rho * mags[i - 1] > FEAS_TOL * (
            1.0 + total + rho * mags[i - 1]
        ):
            return False
        total += mags[i]
    return True


def search_robust_check(S: SearchStrategy, r: float) -> bool:
    """Growth inequalities with rho = (r-1)/2 plus the cap x_0 <= r.

    With the extension flag set the magnitudes must additionally be
    rho-extendable, certifying every continuation excursion.
    """
    r = float(r)
    rho = rho_of(r)
    if rho <= 1.0:
        return False
    mags = S.magnitudes
    if not _partially_robust_rho(mags, rho, r):
        return False
    if S.extended:
        if rho < 4.0:
            return False
        z2 = 0.5 * (rho + math.sqrt(rho * (rho - 4.0)))
        total = sum(mags)
        return total - z2 * mags[-1] <= FEAS_TOL * (1.0 + total)
    return True


# -------------------------------------------------------------------------
# synthesis
# -------------------------------------------------------------------------

def _search_chain(r: float, rho: float, need: float) -> list:
    """Max-growth magnitudes: tight rho-chain started from the cap r."""
    h = [r, r * (rho - 1.0)]
    while h[-1] < need:
        nxt = rho * (h[-1] - h[-2])
        if nxt <= h[-1]:
            raise NumericalFailure("numerical failure: growth chain degenerated")
        h.append(nxt)
        if len(h) > 10_000:
            raise NumericalFailure("numerical failure: growth chain too long")
    return h


def _orderings(mu: SignedPrediction):
    """All discovery orders: merges of the left and right frontier sequences."""
    left = [i for i, v in enumerate(mu.positions) if v < 0]
    right = [i for i, v in enumerate(mu.positions) if v > 0]

    def merge(ls, rs):
        if not ls and not rs:
            yield ()
            return
        if ls:
            for rest in merge(ls[1:], rs):
                yield (ls[0],) + rest
        if rs:
            for rest in merge(ls, rs[1:]):
                yield (rs[0],) + rest

    yield from merge(left, right)


def _search_lp(order, exc, mu: SignedPrediction, r: float, margin: float):
    """LP over magnitudes x_0..x_{e_last}: cheapest strategy discovering the
    ordered points at the given excursion indices."""
    rho = rho_of(r)
    z2 = 0.5 * (rho + math.sqrt(rho * (rho - 4.0)))
    n = exc[-1] + 1
    const = sum(mu.probs[i] * abs(mu.positions[i]) for i in order)

    obj = [0.0] * n
    for idx, e in zip(order, exc):
        p = mu.probs[idx]
        for q in range(e):
            obj[q] += 2.0 * p

    rows, rhs = [], []

    def row(coeffs, b):
        rows.append(tuple(coeffs))
        rhs.append(b)

    for i in range(1, n):
        co = [0.0] * n
        for q in range(i):
            co[q] += 1.0
        co[i - 1] -= rho
        co[i] += 1.0
        row(co, 0.0)

    co = [1.0] * n
    co[n - 1] -= z2
    row(co, 0.0)

    for idx, e in zip(order, exc):
        v = abs(mu.positions[idx])
        co = [0.0] * n
        co[e] = -1.0
        row(co, -(v + margin * (1.0 + v)))  # x_e >= |mu|
        if e - 2 >= 0:
            co = [0.0] * n
            co[e - 2] = 1.0
            row(co, v)  # previous same-side excursion misses

    for q in range(n - 2):
        co = [0.0] * n
        co[q] = 1.0
        co[q + 2] = -1.0
        row(co, 0.0)

    co = [0.0] * n
    co[0] = 1.0
    row(co, r)

    return LinearProgram(objective=tuple(obj), rows=tuple(rows), rhs=tuple(rhs)), const


def _config_candidates(
    order, delta: int, mu: SignedPrediction, r: float, cap: int, slack: int
):
    """Non-decreasing excursion vectors with the right parity per point.

    Each index is windowed to [floor, floor + 2*slack] above the growth-chain
    floor and the previous point's index; the caller escalates the window
    when nothing in it is feasible.
    """
    rho = rho_of(r)
    maxabs = max(abs(v) for v in mu.positions)
    chain = _search_chain(r, rho, maxabs)
    floors = []
    parities = []
    for idx in order:
        v = mu.positions[idx]
        par = (delta + (0 if v > 0 else 1)) % 2
        parities.append(par)
        f = next(e for e, hh in enumerate(chain) if hh >= abs(v))
        if f % 2 != par:
            f += 1
        floors.append(f)

    out = []

    def rec(prefix):
        i = len(prefix)
        if i == len(order):
            out.append(tuple(prefix))
            return
        lo = floors[i]
        if prefix:
            lo = max(lo, prefix[-1])
            if lo % 2 != parities[i]:
                lo += 1
        for e in range(lo, min(lo + 2 * slack, cap) + 1, 2):
            rec(prefix + [e])

    rec([])
    return out


def synthesize_search(
    mu: SignedPrediction, r: float, *, slack: int = 3, escalations: int = 3
) -> SearchStrategy:
    """Cheapest r-robust search strategy for the prediction.

    Enumerates parity, discovery ordering, and windowed excursion
    configurations; solves one LP per combination; ties broken
    deterministically by (parity, configuration, ordering). The window
    doubles when no configuration in it is feasible.
    """
    r = float(r)
    if r < 9.0:
        raise ValidationError(f"r below 9: {r}")
    rho = rho_of(r)
    z1 = 0.5 * (rho - math.sqrt(rho * (rho - 4.0)))
    z1p = max(z1, 1.05)
    maxabs = max(abs(v) for v in mu.positions)
    base_cap = (
        math.ceil(math.log(maxabs) / math.log(z1p))
        + math.ceil(math.log(r) / math.log(z1p))
        + 2
    )

    best = None  # (value, delta, exc, order, point)
    for esc in range(escalations + 1):
        sl = slack * (2**esc)
        cap = base_cap * (2**esc)
        for delta in (0, 1):
            for order in _orderings(mu):
                for exc in _config_candidates(order, delta, mu, r, cap, sl):
                    try:
                        lp, const = _search_lp(order, exc, mu, r, margin=0.0)
                        out = lp_solve(lp)
                    except NumericalFailure:
                        continue
                    if not out.is_optimal:
                        continue
                    value = out.value + const
                    key = (delta, exc, order)
                    if (
                        best is None
                        or value < best[0] - _TIE_TOL * max(1.0, abs(best[0]))
                        or (
                            value <= best[0] + _TIE_TOL * max(1.0, abs(best[0]))
                            and key < (best[1], best[2], best[3])
                        )
                    ):
                        best = (value, delta, exc, order, out.point)
        if best is not None:
            break
    if best is None:
        raise NumericalFailure("no feasible configuration")
    _, delta, exc, order, point = best

    # re-solve the winner with a hair of margin so the discovery excursions
    # strictly cover their points despite solver slop
    lp, _ = _search_lp(order, exc, mu, r, margin=FEAS_TOL)
    refined = lp_solve(lp)
    if refined.is_optimal:
        point = refined.point

    mags = [max(m, 1e-12) for m in point]
    return SearchStrategy(
        parity_delta=delta, magnitudes=tuple(mags), extended=True, rho=rho
    )


# -------------------------------------------------------------------------
# randomized search and curves
# -------------------------------------------------------------------------

class QStar(NamedTuple):
    a_star: float
    q: float


def q_star() -> QStar:
    """Minimize 1 + (1+a)/ln(a): the optimal randomized competitive ratio."""

    def f(a):
        return 1.0 + (1.0 + a) / math.log(a)

    lo, hi = 1.0 + 1e-9, 50.0
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(200):
        if f1 > f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
    a = 0.5 * (lo + hi)
    return QStar(a_star=a, q=f(a))


def _check_search_params(delta: float, a: float):
    if not (0.0 <= delta <= 2.0):
        raise ValidationError(f"delta outside [0,2]: {delta}")
    if not a > 1.0:
        raise ValidationError(f"a must exceed 1: {a}")


def search_rob_bound(delta: float, a: float) -> float:
    """Worst-case expected cost ratio of the randomized search strategy."""
    _check_search_params(delta, a)
    if 2.0 - delta < 1e-9:
        return 1.0 + 2.0 * a * a / (a - 1.0)
    return 1.0 + 2.0 * (a * a - a**delta) / ((2.0 - delta) * (a - 1.0) * math.log(a))


def search_cons_bound(delta: float, a: float) -> float:
    """Expected cost ratio at the predicted position."""
    _check_search_params(delta, a)
    if 2.0 - delta < 1e-9:
        return 1.0 + 2.0 / (a - 1.0)
    return 1.0 + 2.0 * (a * a - a**delta) / (
        a**delta * (2.0 - delta) * (a - 1.0) * math.log(a)
    )


def _F(T: float) -> float:
    return math.log(T * (math.log(T) + math.log(math.log(T))))


def search_lower_bound(r: float, xi: float) -> float:
    """Consistency lower bound for r-robust search strategies."""
    r = float(r)
    if xi <= 0.0:
        raise ValidationError(f"xi must be positive: {xi}")
    T = (r - 1.0) / math.e
    if T <= math.e:
        raise ValidationError(f"r too small: {r} (needs (r-1)/e > e)")
    y = math.exp(_F(T))
    return 1.0 + 2.0 / ((1.0 + xi) * y * _F(y))


def mc_search_ratio(u_hat: float, delta: float, a: float, h: float, trials: int, rng):
    """Monte Carlo (mean, 95% half-width) of cost/|h| for randomized search.

    The strategy's excursions are lam*a^(i+s) with s ~ U[delta, 2); parity is
    aligned so the excursion locating the prediction heads toward its side.
    The cost of the infinitely many vanishing startup excursions is the exact
    geometric tail, so the estimate carries no truncation bias.
    """
    _check_search_params(delta, a)
    if trials < 1:
        raise ValidationError(f"trials must be >= 1: {trials}")
    if u_hat == 0 or h == 0:
        raise ValidationError("positions must be nonzero")
    j = math.floor(math.log(abs(u_hat), a) - delta)
    lam = abs(u_hat) / a ** (j + delta)
    # side(i) = (-1)^(d+i); the prediction's side is searched at index j
    d = j % 2 if u_hat > 0 else (j + 1) % 2
    sign = 1 if h > 0 else -1

    s = delta + (2.0 - delta) * rng.random(trials)
    k0 = np.ceil(np.log(abs(h) / lam) / math.log(a) - s)
    side_k0 = np.where((d + k0.astype(np.int64)) % 2 == 0, 1, -1)
    istar = np.where(side_k0 == sign, k0, k0 + 1.0)
    cost = abs(h) + 2.0 * lam * a ** (istar + s) / (a - 1.0)
    ratio = cost / abs(h)
    mean = float(ratio.mean())
    if trials < 2:
        return mean, 0.0
    half = 1.96 * float(ratio.std(ddof=1)) / math.sqrt(trials)
    return mean, half


# -------------------------------------------------------------------------
# interface documents
# -------------------------------------------------------------------------

def signed_prediction_from_json(text: str) -> SignedPrediction:
    """Parse {"points": [{"position": v, "prob": p}, ...]}."""
    doc = json.loads(text)
    try:
        pts = tuple((pt["position"], pt["prob"]) for pt in doc["points"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed prediction document: {exc}")
    return SignedPrediction(pts)


def search_strategy_to_json(S: SearchStrategy, consistency: float | None = None) -> str:
    doc = {
        "parity": S.parity_delta,
        "magnitudes": list(S.magnitudes),
    }
    if consistency is not None:
        doc["consistency"] = consistency
    return json.dumps(doc, indent=2)
