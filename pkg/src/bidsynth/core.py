"""Domain types and exact cost arithmetic for online bidding.

A bidding strategy is an increasing sequence of positive bids. Submitting bids
x_0, x_1, ... until one reaches the hidden target u costs the sum of all bids
up to and including the covering one. A strategy is r-robust when that total
never exceeds r times the target, which is equivalent to the per-step
inequalities

    x_0 <= r,    x_{i+1} <= r*x_i - sum_{j<=i} x_j.

Finite prefixes can be continued forever by the tight r-extension, the unique
continuation that satisfies every inequality with equality; a prefix admits
some valid continuation iff it is partially r-robust and its sum-to-last-bid
ratio stays below zeta2, the larger root of t^2 - r*t + r = 0.

All functions here are pure; tolerances follow the module-wide constants below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# absolute tolerance for feasibility comparisons, relative for recurrence checks
FEAS_TOL = 1e-9
REC_RTOL = 1e-6
# consecutive bids closer than this count as ties and get perturbed upward
TIE_EPS = 1e-12


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


def _as_r(r) -> float:
    """Accept either a RobustnessReq or a bare number."""
    if isinstance(r, RobustnessReq):
        return r.r
    return float(r)


@dataclass(frozen=True)
class RobustnessReq:
    """Robustness budget. No r-robust bidding strategy exists below r = 4."""

    r: float

    def __post_init__(self):
        if not math.isfinite(self.r) or self.r < 4.0:
            raise ValidationError(f"r below 4: {self.r}")


@dataclass(frozen=True)
class RootPair:
    """Roots of t^2 - r*t + r = 0; zeta1*zeta2 = zeta1 + zeta2 = r."""

    zeta1: float
    zeta2: float

    def __iter__(self):
        return iter((self.zeta1, self.zeta2))


def zeta_roots(r) -> RootPair:
    r = _as_r(r)
    if r < 4.0:
        raise ValidationError(f"r below 4: {r}")
    disc = math.sqrt(r * (r - 4.0))
    return RootPair(0.5 * (r - disc), 0.5 * (r + disc))


@dataclass(frozen=True)
class DiscretePrediction:
    """Finite distribution over target values: ((value, prob), ...).

    Values are strictly increasing and >= 1; probabilities sum to 1 within
    FEAS_TOL.
    """

    points: tuple

    def __post_init__(self):
        pts = tuple((float(v), float(p)) for v, p in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValidationError("prediction needs at least one point")
        total = 0.0
        prev = 0.0
        for v, p in pts:
            if v < 1.0:
                raise ValidationError(f"prediction value below 1: {v}")
            if v <= prev:
                raise ValidationError("prediction values must be strictly increasing")
            if p < -FEAS_TOL or p > 1.0 + FEAS_TOL:
                raise ValidationError(f"probability outside [0,1]: {p}")
            prev = v
            total += p
        if abs(total - 1.0) > FEAS_TOL:
            raise ValidationError(f"probabilities sum to {total}, not 1")

    @property
    def values(self) -> tuple:
        return tuple(v for v, _ in self.points)

    @property
    def probs(self) -> tuple:
        return tuple(p for _, p in self.points)

    @property
    def k(self) -> int:
        return len(self.points)

    def expected_value(self) -> float:
        return sum(v * p for v, p in self.points)


@dataclass(frozen=True)
class BidSequence:
    """Finite bid prefix, optionally continued by the tight r-extension.

    With extended=True the sequence conceptually continues forever past the
    prefix; `bid(i)` materializes continuation terms on demand (r required).
    Consecutive ties within TIE_EPS are tolerated on input and perturbed only
    when an extension is computed.
    """

    bids: tuple
    extended: bool = False
    r: float | None = None

    def __post_init__(self):
        bids = tuple(float(b) for b in self.bids)
        object.__setattr__(self, "bids", bids)
        if not bids:
            raise ValidationError("empty bid sequence")
        prev = 0.0
        for b in bids:
            if b <= 0.0:
                raise ValidationError(f"non-positive bid: {b}")
            if b <= prev - TIE_EPS:
                raise ValidationError("bids must be increasing")
            prev = b
        if self.extended and self.r is None:
            raise ValidationError("extension flag requires r")
        if self.r is not None:
            object.__setattr__(self, "r", float(self.r))

    def __len__(self) -> int:
        return len(self.bids)

    def bid(self, i: int) -> float:
        """i-th bid, materializing tight-extension terms when flagged."""
        if i < 0:
            raise IndexError(i)
        if i < len(self.bids):
            return self.bids[i]
        if not self.extended:
            raise IndexError(i)
        return self.prefix(i + 1)[i]

    def prefix(self, n: int) -> tuple:
        """First n bids, extending tightly past the finite prefix if flagged."""
        if n <= len(self.bids):
            return self.bids[:n]
        if not self.extended:
            raise ValidationError("target unreachable: finite sequence exhausted")
        ext = tight_extension(
            BidSequence(self.bids, extended=False), self.r, n - len(self.bids)
        )
        return ext.bids[:n]


def _perturb_ties(bids: tuple) -> tuple:
    """Nudge tied consecutive bids upward by TIE_EPS so extension sees strict growth."""
    out = []
    prev = 0.0
    for b in bids:
        if b <= prev:
            b = prev + TIE_EPS
        out.append(b)
        prev = b
    return tuple(out)


def _partially_robust(bids: tuple, r: float, tol: float = FEAS_TOL) -> bool:
    """x_0 <= r plus the per-step inequalities over the finite prefix.

    The slack scales with the magnitudes involved so sequences at large scale
    are judged by the same relative standard as unit-scale ones.
    """
    if bids[0] > r + tol * (1.0 + r):
        return False
    total = bids[0]
    for i in range(1, len(bids)):
        if bids[i] + total - r * bids[i - 1] > tol * (1.0 + total + r * bids[i - 1]):
            return False
        total += bids[i]
    return True


def is_extendable(Y: BidSequence, r) -> bool:
    """Whether Y admits an infinite r-robust continuation.

    Holds iff Y is partially r-robust and sum(y_i)/y_last <= zeta2.
    """
    r = _as_r(r)
    if r < 4.0:
        return False
    bids = Y.bids if isinstance(Y, BidSequence) else tuple(map(float, Y))
    if not _partially_robust(bids, r):
        return False
    zeta2 = zeta_roots(r).zeta2
    total = sum(bids)
    return total - zeta2 * bids[-1] <= FEAS_TOL * (1.0 + total)


def robustness_check(X: BidSequence, r) -> bool:
    """Check x_0 <= r and x_{i+1} <= r*x_i - sum_{j<=i} x_j over the prefix.

    When the extension flag is set the prefix must additionally be extendable,
    which certifies every continuation term as well.
    """
    r = _as_r(r)
    if r < 4.0:
        return False
    if not _partially_robust(X.bids, r):
        return False
    if X.extended:
        return is_extendable(BidSequence(X.bids), r)
    return True


def tight_extension(Y: BidSequence, r, count: int) -> BidSequence:
    """Append `count` terms of the tight r-extension to Y.

    Each appended term satisfies z_i = r*z_{i-1} - (all earlier terms) with
    equality; equivalently z_i = r*(z_{i-1} - z_{i-2}) with z_{-1} = y_last.
    """
    r = _as_r(r)
    if not is_extendable(Y, r):
        raise ValidationError("not extendable")
    bids = _perturb_ties(Y.bids)
    out = list(bids)
    if count > 0:
        prev2 = bids[-1]  # z_{-1}
        prev1 = r * bids[-1] - sum(bids)  # z_0
        out.append(prev1)
        for _ in range(count - 1):
            z = r * (prev1 - prev2)
            out.append(z)
            prev2, prev1 = prev1, z
    return BidSequence(tuple(out), extended=Y.extended, r=Y.r if Y.extended else None)


def extension_closed_form(Y: BidSequence, r: float, n: int) -> float:
    """Closed form for tight-extension term z_{n-2}, used as a test oracle.

    Requires r strictly above 4 (distinct roots). The derivation normalizes
    sum(y) = r; other scales are handled by the degree-1 homogeneity of the
    recurrence. The n=2 base reproduces z_0 = r*y_last - sum(y).
    """
    r = float(r)
    if r <= 4.0:
        raise ValidationError("degenerate r=4: closed form needs distinct roots")
    if n < 2:
        raise ValidationError(f"n must be >= 2, got {n}")
    bids = Y.bids if isinstance(Y, BidSequence) else tuple(map(float, Y))
    total = sum(bids)
    scale = total / r  # evaluate at sum = r, then scale back
    y_l = bids[-1] / scale
    roots = zeta_roots(r)
    rprime = roots.zeta2 - roots.zeta1  # sqrt(r(r-4))
    z = ((y_l - roots.zeta1) * roots.zeta2**n + (roots.zeta2 - y_l) * roots.zeta1**n) / rprime
    return z * scale


def bidding_cost(X: BidSequence, u: float) -> float:
    """Total spent until a bid covers the target: sum_{j<=i} x_j, i = min{i : x_i >= u}.

    A target at or below x_0 costs x_0 (sentinel x_{-1} = 0).
    """
    u = float(u)
    total = 0.0
    for b in X.bids:
        total += b
        if b >= u:
            return total
    if not X.extended:
        raise ValidationError(f"target unreachable: no bid covers {u}")
    r = X.r
    bids = _perturb_ties(X.bids)
    prev2 = bids[-1]
    prev1 = r * bids[-1] - sum(bids)
    # the extension grows geometrically (ratio >= zeta1 > 1 analytically; guard anyway)
    for _ in range(10_000):
        z = prev1
        total += z
        if z >= u:
            return total
        z_next = r * (prev1 - prev2)
        if z_next <= prev1:
            raise ValidationError(f"target unreachable: extension degenerates below {u}")
        prev2, prev1 = prev1, z_next
    raise ValidationError(f"target unreachable: {u} not covered in 10000 terms")


def consistency(X: BidSequence, mu: DiscretePrediction) -> float:
    """Expected cost over the prediction divided by the expected target value."""
    num = sum(p * bidding_cost(X, v) for v, p in mu.points)
    return num / mu.expected_value()
