"""Pareto-optimal strategy synthesis for distributional predictions.

The synthesis engine enumerates configurations (index vectors locating each
predicted value between consecutive bids), solves one small LP per
configuration for the cheapest partially robust, extendable bid prefix
realizing it, and returns the globally best prefix together with its tight
r-extension.

Enumeration bounds. Everything rests on the maximal-growth chain h: the tight
r-extension of the single-bid prefix (r), i.e. h = (r, r(r-1), r^2(r-2), ...).
Any partially r-robust sequence satisfies x_{m+g} <= x_m * h_g / h_0 (starting
a tight chain from (x, S=x) dominates every reachable state, which has S >= x),
which yields two sound prunes:

  * absolute floor: a configuration entry j_i needs h_{j_i+1} >= mu_i, since
    no robust strategy bids above h at any index;
  * relative gap: consecutive entries need h_{j_{i+1}-j_i+1} >= r * mu_{i+1}/mu_i,
    since the bid below mu_i caps how fast later bids can grow.

The public enumerator applies only those two (the result is a superset of all
valid configurations up to the cap). `synthesize` additionally windows each
entry to a small band above its lower frontier; wider bands only add
strategies that reach each target with strictly more, individually larger
detour bids. The window is validated by escalation: whenever the winning
configuration touches a band edge or the cap, the search doubles the band and
the cap margin and re-runs, at most three times, then warns.

LPs for distinct configurations are independent; calls here are pure and safe
to run concurrently. The experiment harness parallelizes across instances
rather than inside a single synthesis call.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

from .core import (
    FEAS_TOL,
    BidSequence,
    DiscretePrediction,
    ValidationError,
    _as_r,
    consistency,
    zeta_roots,
)
from .lpcore import LinearProgram, NumericalFailure, lp_solve

Configuration = tuple  # (j_1, ..., j_k), integers >= -1, non-decreasing

# objective ties closer than this (relative) are broken lexicographically
TIE_TOL = 1e-12


@dataclass(frozen=True)
class QuantizationSpec:
    """Support [m, M] and precision constant c for log-scale quantization."""

    m: float
    M: float
    c: float

    def __post_init__(self):
        if not (self.M > self.m >= 1.0):
            raise ValidationError(f"need M > m >= 1, got m={self.m}, M={self.M}")
        if not self.c >= 1.0:
            raise ValidationError(f"need c >= 1, got {self.c}")


@dataclass(frozen=True)
class SynthesisResult:
    """Winning strategy plus the metadata of its configuration LP."""

    strategy: BidSequence
    configuration: Configuration
    consistency: float
    objective: float  # expected cost at the LP optimum


def config_of(X: BidSequence, mu: DiscretePrediction) -> Configuration:
    """Index vector j with x_{j_i} < mu_i <= x_{j_i+1} (sentinel x_{-1} = 0)."""
    out = []
    for v in mu.values:
        j = 0
        while True:
            try:
                b = X.bid(j)
            except IndexError:
                raise ValidationError(f"target unreachable: no bid covers {v}")
            if b >= v:
                out.append(j - 1)
                break
            j += 1
            if j > 100_000:
                raise ValidationError(f"target unreachable: no bid covers {v}")
    return tuple(out)


def _max_chain(r: float, need: float) -> list:
    """Prefix of the maximal-growth chain h, long enough that h[-1] >= need."""
    h = [r, r * (r - 1.0)]
    while h[-1] < need:
        nxt = r * (h[-1] - h[-2])
        if nxt <= h[-1]:  # cannot happen for r >= 4; guard divergence anyway
            raise NumericalFailure("numerical failure: growth chain degenerated")
        h.append(nxt)
        if len(h) > 10_000:
            raise NumericalFailure("numerical failure: growth chain too long")
    return h


def _abs_floor(chain: list, v: float) -> int:
    """Smallest admissible j for a value v: j = -1 iff v <= h_0 = r."""
    if v <= chain[0]:
        return -1
    for j, h in enumerate(chain[1:]):
        if h >= v:
            return j
    raise NumericalFailure("numerical failure: chain shorter than requested")


def _min_gap(chain: list, r: float, ratio: float) -> int:
    """Smallest gap g with h_{g+1} >= r * ratio."""
    need = r * ratio
    for g, h in enumerate(chain[1:]):
        if h >= need:
            return g
    raise NumericalFailure("numerical failure: chain shorter than requested")


def _l_max(mu: DiscretePrediction, r: float) -> int:
    z1p = max(zeta_roots(r).zeta1, 1.05)
    lg = math.log(z1p)
    return math.ceil(math.log(mu.values[-1]) / lg) + math.ceil(math.log(r) / lg) + 2


def enumerate_configurations(mu: DiscretePrediction, r, l_max: int | None = None):
    """Yield every candidate configuration up to the cap, in lexicographic order.

    Applies only the sound absolute-floor and relative-gap prunes, so the
    output is a superset of all configurations realizable by an r-robust
    strategy whose entries stay within the cap.
    """
    r = _as_r(r)
    zeta_roots(r)  # validates r >= 4
    cap = _l_max(mu, r) if l_max is None else int(l_max)
    values = mu.values
    chain = _max_chain(r, max(r * values[-1], values[-1]))
    floors = [_abs_floor(chain, v) for v in values]
    gaps = [
        _min_gap(chain, r, values[i + 1] / values[i]) for i in range(len(values) - 1)
    ]

    def rec(prefix):
        i = len(prefix)
        if i == len(values):
            yield tuple(prefix)
            return
        if i == 0:
            lo = floors[0]
        elif prefix[-1] < 0:
            lo = floors[i]
        else:
            lo = max(floors[i], prefix[-1] + gaps[i - 1])
        for j in range(lo, cap + 1):
            yield from rec(prefix + [j])

    yield from rec([])


def _windowed_configurations(mu, r, chain, slack: int, cap: int):
    """(configuration, touched) pairs for the banded search inside synthesize.

    Every index sits on its anchored floor plus a share of one dawdle budget
    of `slack` steps common to the whole configuration, so the candidate
    count stays polynomial in the number of predicted points. A
    configuration is touched when it exhausts the budget or hits the index
    cap; the caller escalates the budget in that case.
    """
    values = mu.values
    floors = [_abs_floor(chain, v) for v in values]
    gaps = [
        _min_gap(chain, r, values[i + 1] / values[i]) for i in range(len(values) - 1)
    ]
    out = []

    def rec(prefix, left, capped):
        i = len(prefix)
        if i == len(values):
            out.append((tuple(prefix), capped or left == 0))
            return
        if i == 0:
            lo = floors[0]
        elif prefix[-1] < 0:
            lo = floors[i]
        else:
            lo = max(floors[i], prefix[-1] + gaps[i - 1])
        for d in range(left + 1):
            j = lo + d
            if j > cap:
                break
            rec(prefix + [j], left - d, capped or j == cap)

    rec([], slack, False)
    return out


def _config_lp(j, mu: DiscretePrediction, r: float, margin: float) -> LinearProgram:
    zeta2 = zeta_roots(r).zeta2
    jk = j[-1]
    n = jk + 2
    values, probs = mu.values, mu.probs

    obj = [0.0] * n
    for ji, p in zip(j, probs):
        for q in range(ji + 2):
            obj[q] += p

    rows, rhs = [], []

    def row(coeffs, b):
        rows.append(tuple(coeffs))
        rhs.append(b)

    for i in range(1, n):
        # sum_{q<i} x_q + x_i - r*x_{i-1} <= 0
        co = [0.0] * n
        for q in range(i):
            co[q] += 1.0
        co[i - 1] -= r
        co[i] += 1.0
        row(co, 0.0)

    co = [1.0] * n
    co[n - 1] -= zeta2
    row(co, 0.0)

    for ji, v in zip(j, values):
        if ji >= 0:
            co = [0.0] * n
            co[ji] = 1.0
            row(co, v)  # x_{j_i} <= mu_i
        co = [0.0] * n
        co[ji + 1] = -1.0
        row(co, -(v + margin * (1.0 + v)))  # mu_i <= x_{j_i+1}

    for q in range(jk + 1):
        co = [0.0] * n
        co[q] = 1.0
        co[q + 1] = -1.0
        row(co, 0.0)

    co = [0.0] * n
    co[0] = 1.0
    row(co, r)

    return LinearProgram(objective=tuple(obj), rows=tuple(rows), rhs=tuple(rhs))


def build_lp(j: Configuration, mu: DiscretePrediction, r) -> LinearProgram:
    """LP for one configuration: cheapest partial strategy realizing it.

    Variables x_0..x_{j_k+1}; expected-cost objective; per-step robustness
    rows, the extendability row at the last variable, the two covering rows
    per prediction point (left one skipped for the sentinel -1), monotonicity,
    and the first-bid cap x_0 <= r.
    """
    return _config_lp(j, mu, _as_r(r), margin=0.0)


def synthesize(
    mu: DiscretePrediction, r, *, slack: int = 3, escalations: int = 3
) -> SynthesisResult:
    """Best r-robust strategy for the prediction, with its tight extension.

    Solves one LP per candidate configuration, keeps the cheapest (ties broken
    by lexicographically smallest configuration), and escalates the search
    bands when the winner touches an enumeration edge.
    """
    r = _as_r(r)
    zeta_roots(r)
    chain = _max_chain(r, max(r * mu.values[-1], mu.values[-1]))
    base_cap = _l_max(mu, r)

    winner = None
    for esc in range(escalations + 1):
        sl = slack * (1 << esc)
        cap = base_cap * (1 << esc)
        sols = []
        for cfg, touched in _windowed_configurations(mu, r, chain, sl, cap):
            out = lp_solve(build_lp(cfg, mu, r))
            if out.is_optimal:
                sols.append((out.value, cfg, out.point, touched))
        if not sols:
            if esc < escalations:
                continue
            raise NumericalFailure("no feasible configuration")
        best_val = min(s[0] for s in sols)
        tol = TIE_TOL * max(1.0, abs(best_val))
        tied = sorted((s for s in sols if s[0] <= best_val + tol), key=lambda s: s[1])
        winner = tied[0]
        if not winner[3]:
            break
        if esc == escalations:
            warnings.warn(
                "configuration search hit its enumeration edge; "
                "result may be conservative",
                RuntimeWarning,
            )
    value, cfg, point, _ = winner

    # Re-solve the winner with a hair of margin above each covering row so the
    # output strictly covers every predicted value; otherwise solver-precision
    # slop just below a value would shift the covering index seen by config_of.
    refined = lp_solve(_config_lp(cfg, mu, r, margin=FEAS_TOL))
    if refined.is_optimal:
        point = refined.point

    bids = []
    prev = 0.0
    for b in point:
        b = max(b, prev + 1e-12)
        bids.append(b)
        prev = b
    strategy = BidSequence(tuple(bids), extended=True, r=r)
    return SynthesisResult(
        strategy=strategy,
        configuration=cfg,
        consistency=consistency(strategy, mu),
        objective=value,
    )


# -------------------------------------------------------------------------
# quantization
# -------------------------------------------------------------------------

def quantize(cdf, spec: QuantizationSpec) -> DiscretePrediction:
    """Quantize a distribution given by its cdf onto log-scale levels.

    Levels are m*e^(i/c) for i = 1..ceil(c*ln(M/m)), the last clamped to M;
    each level receives the cdf mass of the interval ending at it, so mass
    only ever moves up. Zero-mass levels are dropped.
    """
    m, M, c = spec.m, spec.M, spec.c

    def f(t):
        return float(cdf(min(t, M)))

    if abs(f(m)) > FEAS_TOL:
        raise ValidationError(f"invalid cdf: cdf(m) = {f(m)}, expected 0")
    if abs(f(M) - 1.0) > FEAS_TOL:
        raise ValidationError(f"invalid cdf: cdf(M) = {f(M)}, expected 1")

    k = math.ceil(c * math.log(M / m))
    levels = [min(m * math.exp(i / c), M) for i in range(1, k + 1)]
    pts = []
    lo = f(m)
    for lv in levels:
        hi = f(lv)
        p = hi - lo
        if p < -1e-12:
            raise ValidationError("invalid cdf: not non-decreasing")
        if p > 0.0:
            pts.append((lv, p))
        lo = hi
    if not pts:
        raise ValidationError("invalid cdf: no probability mass on (m, M]")
    total = sum(p for _, p in pts)
    if abs(total - 1.0) > 1e-12:
        pts = [(v, p / total) for v, p in pts]
    return DiscretePrediction(tuple(pts))


def step_cdf(mu: DiscretePrediction):
    """Right-continuous step cdf of a discrete prediction."""
    def f(t):
        return sum(p for v, p in mu.points if v <= t)
    return f


def quantize_prediction(mu: DiscretePrediction, c: float) -> DiscretePrediction:
    """Quantize a discrete prediction onto the level grid for constant c.

    The support lower end is placed a hair below the smallest value so the
    cdf vanishes there; that requires the smallest value to lie above 1.
    """
    m = mu.values[0] * (1.0 - 1e-9)
    if m < 1.0:
        raise ValidationError("invalid cdf: smallest value must exceed 1 to quantize")
    return quantize(step_cdf(mu), QuantizationSpec(m=m, M=mu.values[-1], c=c))


# -------------------------------------------------------------------------
# interface documents
# -------------------------------------------------------------------------

def prediction_from_json(text: str) -> DiscretePrediction:
    """Parse {"points": [{"value": v, "prob": p}, ...]}."""
    doc = json.loads(text)
    try:
        pts = tuple((pt["value"], pt["prob"]) for pt in doc["points"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed prediction document: {exc}")
    return DiscretePrediction(pts)


def result_to_json(res: SynthesisResult) -> str:
    return json.dumps(
        {
            "bids": list(res.strategy.bids),
            "configuration": list(res.configuration),
            "consistency": res.consistency,
            "robustness": res.strategy.r,
        },
        indent=2,
    )
