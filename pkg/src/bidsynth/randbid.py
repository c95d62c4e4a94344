"""Randomized bidding strategies and their analytical envelope.

The two-parameter family R_{delta,a} bids lambda*a^(i+s) for a random phase
s ~ U[delta,1), with lambda chosen so the predicted target lands exactly at
phase delta of bid index j. Closed-form consistency/robustness bounds, the
optimizer that maximizes the consistency advantage subject to a robustness
budget, the hard-instance target distribution that certifies the e lower
bound, and the comparison curves all live here.

The bid index is conceptually bi-infinite (arbitrarily small bids before
index 0); cost closed forms sum the full geometric series below the covering
bid. All stochastic operations take an explicit numpy Generator and are
deterministic given its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import BidSequence, ValidationError, zeta_roots

# switch to analytic delta->1 limit formulas inside this distance of 1
_LIMIT_EPS = 1e-9
# keep the optimizer's delta strictly inside [0, 1)
_DELTA_CAP = 1.0 - 1e-12


@dataclass(frozen=True)
class RandParams:
    """Phase floor delta in [0,1) and geometric base a > 1."""

    delta: float
    a: float

    def __post_init__(self):
        if not (0.0 <= self.delta < 1.0):
            raise ValidationError(f"delta outside [0,1): {self.delta}")
        if not self.a > 1.0:
            raise ValidationError(f"a must exceed 1: {self.a}")


@dataclass(frozen=True)
class RealizedStrategy:
    """One sampled member of R_{delta,a}: bids lam * a^(i+s) for i in Z.

    The prediction sits at phase delta of index j: u_hat = lam * a^(j+delta),
    so every phase draw s >= delta covers u_hat by index j.
    """

    lam: float
    j: int
    s: float
    a: float
    u_hat: float

    def bid(self, i: int) -> float:
        return self.lam * self.a ** (i + self.s)

    def cost(self, u: float) -> float:
        """Sum of all bids up to the first one covering u (bi-infinite sum)."""
        a = self.a
        k = math.ceil(math.log(u / self.lam, a) - self.s)
        return self.bid(k) * a / (a - 1.0)

    def ratio(self, u: float) -> float:
        return self.cost(u) / u


def realize(u_hat: float, p: RandParams, rng) -> RealizedStrategy:
    """Draw the random phase and locate the prediction on the bid grid."""
    u_hat = float(u_hat)
    if u_hat < 1.0:
        raise ValidationError(f"prediction below 1: {u_hat}")
    j = math.floor(math.log(u_hat, p.a) - p.delta)
    lam = u_hat / p.a ** (j + p.delta)
    s = p.delta + (1.0 - p.delta) * float(rng.random())
    return RealizedStrategy(lam=lam, j=j, s=s, a=p.a, u_hat=u_hat)


def rob_bound(p: RandParams) -> float:
    """Worst-case expected cost ratio over all targets."""
    a, d = p.a, p.delta
    if 1.0 - d < _LIMIT_EPS:
        return a * a / (a - 1.0)
    return a * (a - a**d) / ((a - 1.0) * (1.0 - d) * math.log(a))


def cons_bound(p: RandParams) -> float:
    """Expected cost ratio at the predicted target."""
    a, d = p.a, p.delta
    if 1.0 - d < _LIMIT_EPS:
        return a / (a - 1.0)
    return rob_bound(p) / a**d


class RStarResult(NamedTuple):
    delta_star: float
    a_star: float
    cons_star: float


def _delta_max(a: float, r: float) -> float | None:
    """Largest admissible delta for base a, or None when even delta=0 fails.

    rob_bound is increasing in delta from a/ln(a) toward a^2/(a-1), so the
    boundary is a bisection root.
    """
    lo_params = RandParams(0.0, a)
    if rob_bound(lo_params) > r:
        return None
    if rob_bound(RandParams(_DELTA_CAP, a)) <= r:
        return _DELTA_CAP
    lo, hi = 0.0, _DELTA_CAP
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if rob_bound(RandParams(mid, a)) <= r:
            lo = mid
        else:
            hi = mid
    return lo


def optimize_rstar(r: float) -> RStarResult:
    """Maximize a^delta subject to rob_bound(delta, a) <= r.

    Nested search: a coarse scan over a in (1, 20], then golden-section
    refinement; delta resolved by bisection at each a. The returned pair
    satisfies rob_bound <= r + 1e-6.
    """
    r = float(r)
    if r < math.e:
        raise ValidationError(f"robustness below e: {r}")

    evals: dict = {}

    def gain(a: float) -> float:
        a = float(a)
        if a not in evals:
            d = _delta_max(a, r)
            evals[a] = -math.inf if d is None else d * math.log(a)
        return evals[a]

    # include a = e exactly: near r = e the feasible window in a is tiny
    grid = np.sort(np.append(np.linspace(1.0 + 1e-6, 20.0, 400), [math.e]))
    vals = [gain(a) for a in grid]
    best = int(np.argmax(vals))
    if vals[best] == -math.inf:
        raise ValidationError(f"robustness below e: {r}")
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = gain(x1), gain(x2)
    for _ in range(120):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = gain(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = gain(x1)
    # the best point actually evaluated is always feasible
    a_star = max(evals, key=evals.get)
    delta_star = _delta_max(a_star, r)
    p = RandParams(delta_star, a_star)
    return RStarResult(
        delta_star=float(delta_star), a_star=a_star, cons_star=float(cons_bound(p))
    )


def mc_ratio(u_hat: float, p: RandParams, u: float, trials: int, rng):
    """Monte Carlo (mean, 95% half-width) of cost/u over the phase draw."""
    if trials < 1:
        raise ValidationError(f"trials must be >= 1: {trials}")
    a, d = p.a, p.delta
    j = math.floor(math.log(u_hat, a) - d)
    lam = u_hat / a ** (j + d)
    s = d + (1.0 - d) * rng.random(trials)
    k = np.ceil(np.log(u / lam) / math.log(a) - s)
    ratio = lam * a ** (k + s) * a / (a - 1.0) / u
    mean = float(ratio.mean())
    if trials < 2:
        return mean, 0.0
    half = 1.96 * float(ratio.std(ddof=1)) / math.sqrt(trials)
    return mean, half


# -------------------------------------------------------------------------
# hard-instance target distribution
# -------------------------------------------------------------------------

@dataclass(frozen=True)
class AdversaryParams:
    """Target distribution with density eps/t on [1, R) and an atom at R."""

    epsilon: float

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise ValidationError(f"epsilon outside (0,1): {self.epsilon}")

    @property
    def R(self) -> float:
        return math.exp((1.0 - self.epsilon) / self.epsilon)


def _bids_to_R(X: BidSequence, R: float) -> list:
    """Bids of X truncated at the first one reaching R, that one clamped to R."""
    out = []
    i = 0
    while True:
        try:
            b = X.bid(i)
        except IndexError:
            raise ValidationError(f"strategy does not reach R: {R}")
        if b >= R * (1.0 - 1e-12):
            out.append(R)
            return out
        out.append(b)
        i += 1
        if i > 100_000:
            raise ValidationError(f"strategy does not reach R: {R}")


def adversary_expected_ratio(X: BidSequence, adv: AdversaryParams) -> float:
    """eps * sum of consecutive bid ratios, the closed form of E[cost/u].

    The sum telescopes multiplicatively to R, so by AM-GM it is at least
    (1-eps)*e for every strategy, with equality for equal-ratio geometrics.
    """
    bids = _bids_to_R(X, adv.R)
    prev = 1.0
    total = 0.0
    for b in bids:
        total += b / prev
        prev = b
    return adv.epsilon * total


def adversary_integral_check(X: BidSequence, adv: AdversaryParams) -> float:
    """E[cost/u] computed directly against the density; cross-checks the sum.

    Exact piecewise integration of cost(u)/u * eps/u over [1, R) plus the atom.
    Matches adversary_expected_ratio exactly when x_0 >= 1 (the density puts
    no mass below 1, where the closed form still charges the early bids).
    """
    eps, R = adv.epsilon, adv.R
    bids = _bids_to_R(X, R)
    total = 0.0
    acc = 0.0
    prev = 1.0
    for b in bids:
        acc += b
        lo = max(1.0, prev)
        hi = max(1.0, b)
        if hi > lo:
            total += eps * acc * (1.0 / lo - 1.0 / hi)
        prev = b
    total += eps * acc / R  # atom at R; acc is the full truncated cost
    return total


def adversary_sample(adv: AdversaryParams, trials: int, rng) -> np.ndarray:
    """Draw targets: inverse-cdf on the continuous part, Bernoulli atom at R."""
    if trials < 1:
        raise ValidationError(f"trials must be >= 1: {trials}")
    eps = adv.epsilon
    u = np.exp(rng.random(trials) * (1.0 - eps) / eps)
    atom = rng.random(trials) < eps
    u[atom] = adv.R
    return u


# -------------------------------------------------------------------------
# comparison curves
# -------------------------------------------------------------------------

@dataclass(frozen=True)
class LowerBoundParams:
    """Slack constant xi > 0 in the consistency lower bound."""

    xi: float = 1e-6

    def __post_init__(self):
        if not self.xi > 0.0:
            raise ValidationError(f"xi must be positive: {self.xi}")


def _F(T: float) -> float:
    return math.log(T * (math.log(T) + math.log(math.log(T))))


def lower_bound_curve(r: float, lb: LowerBoundParams = LowerBoundParams()) -> float:
    """Consistency lower bound 1 + 1/((1+xi) * r * F(r)) for any r-robust strategy."""
    r = float(r)
    if r <= math.e:
        raise ValidationError(f"r too small: {r} (needs r > e)")
    return 1.0 + 1.0 / ((1.0 + lb.xi) * r * _F(r))


def det_pareto_cons(r: float) -> float:
    """Best deterministic consistency at robustness r: zeta2/(zeta2 - 1)."""
    z2 = zeta_roots(r).zeta2
    return z2 / (z2 - 1.0)
