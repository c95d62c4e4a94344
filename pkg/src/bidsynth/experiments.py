"""Benchmark harness: datasets, geometric heuristics, adversarial instances.

Datasets are small discrete predictions drawn from seeded generators.
Heuristic strategies are geometric bid sequences with the growth base tied
to the robustness budget; the scale factor is optimized exactly over the
finite breakpoint set of the piecewise-linear expected cost. The harness
sweeps robustness budgets over datasets, compares the synthesized optimum
against the heuristics, and emits a CSV (canonical) plus SVG error-bar
plots.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    BidSequence,
    DiscretePrediction,
    ValidationError,
    bidding_cost,
    consistency,
    zeta_roots,
)
from .pareto import synthesize

PROB_MODES = ("uniform-equal", "iid-uniform-normalized")
VALUE_MODES = ("uniform", "gaussian-narrow", "gaussian-wide")
HEURISTIC_BASES = ("zeta1", "half-r", "zeta2")

# sigma as a fraction of the support's upper end, per value mode
_SIGMA_FRACTION = {"gaussian-narrow": 0.2, "gaussian-wide": 0.4}


@dataclass(frozen=True)
class DatasetSpec:
    """Recipe for one family of random discrete predictions."""

    prob_mode: str = "uniform-equal"
    value_mode: str = "uniform"
    k: int = 4
    low: float = 1.0
    high: float = 1e4
    samples: int = 10

    def __post_init__(self):
        if self.prob_mode not in PROB_MODES:
            raise ValidationError(f"unknown prob mode: {self.prob_mode}")
        if self.value_mode not in VALUE_MODES:
            raise ValidationError(f"unknown value mode: {self.value_mode}")
        if self.k < 1:
            raise ValidationError(f"k must be positive: {self.k}")
        if not 1.0 <= self.low < self.high:
            raise ValidationError(f"bad support: [{self.low}, {self.high}]")
        if self.samples < 1:
            raise ValidationError(f"samples must be positive: {self.samples}")

    @property
    def label(self) -> str:
        return f"{self.prob_mode}/{self.value_mode}"


def default_grid() -> tuple:
    """The six standard dataset recipes: 2 prob modes x 3 value modes."""
    return tuple(
        DatasetSpec(prob_mode=pm, value_mode=vm)
        for pm in PROB_MODES
        for vm in VALUE_MODES
    )


def _draw_values(spec: DatasetSpec, rng) -> tuple:
    while True:
        if spec.value_mode == "uniform":
            vals = rng.uniform(spec.low, spec.high, size=spec.k)
        else:
            center = 0.5 * (spec.low + spec.high)
            sigma = _SIGMA_FRACTION[spec.value_mode] * spec.high
            vals = np.empty(spec.k)
            for i in range(spec.k):
                while True:
                    v = rng.normal(center, sigma)
                    if spec.low <= v <= spec.high:
                        vals[i] = v
                        break
        vals = np.sort(vals)
        if all(b - a > 1e-9 * b for a, b in zip(vals, vals[1:])):
            return tuple(float(v) for v in vals)


def _draw_probs(spec: DatasetSpec, rng) -> tuple:
    if spec.prob_mode == "uniform-equal":
        return (1.0 / spec.k,) * spec.k
    while True:
        raw = rng.uniform(0.0, 1.0, size=spec.k)
        total = raw.sum()
        if total > 1e-9 and raw.min() / total > 1e-12:
            return tuple(float(p / total) for p in raw)


def gen_dataset(spec: DatasetSpec, rng) -> list:
    """`spec.samples` independent predictions from the recipe."""
    out = []
    for _ in range(spec.samples):
        values = _draw_values(spec, rng)
        probs = _draw_probs(spec, rng)
        out.append(DiscretePrediction(tuple(zip(values, probs))))
    return out


# -------------------------------------------------------------------------
# geometric heuristics
# -------------------------------------------------------------------------

@dataclass(frozen=True)
class HeuristicKind:
    """Which growth base a geometric heuristic uses."""

    base_choice: str

    def __post_init__(self):
        if self.base_choice not in HEURISTIC_BASES:
            raise ValidationError(f"unknown heuristic base: {self.base_choice}")

    def base(self, r: float) -> float:
        roots = zeta_roots(r)
        if self.base_choice == "zeta1":
            return roots.zeta1
        if self.base_choice == "half-r":
            return r / 2.0
        return roots.zeta2


def _lambda_candidates(ratio: float, mu: DiscretePrediction, r: float) -> list:
    """Breakpoints of the piecewise-linear expected cost, capped at r.

    For each predicted value, scales mu_i/ratio^j from the first one at or
    below r down to the first one below mu_1; anything smaller is dominated
    by its ratio-fold shift, which is also a candidate.
    """
    first = mu.values[0]
    cands = {r}
    for v in mu.values:
        j = max(0, math.ceil(math.log(v / r) / math.log(ratio) - 1e-12))
        while True:
            lam = v / ratio**j
            if lam <= 0.0:
                break
            if lam <= r:
                cands.add(lam)
                if lam < first:
                    break
            j += 1
    return sorted(cands, reverse=True)


def _geometric_prefix(lam: float, ratio: float, top: float) -> BidSequence:
    bids = [lam]
    while bids[-1] < top:
        bids.append(bids[-1] * ratio)
    return BidSequence(tuple(bids))


def heuristic_strategy(
    kind: HeuristicKind, mu: DiscretePrediction, r: float
) -> BidSequence:
    """Geometric bids lam*ratio^i with lam minimizing the expected cost.

    Ties go to the largest scale factor.
    """
    ratio = kind.base(float(r))
    best = None
    for lam in _lambda_candidates(ratio, mu, float(r)):
        X = _geometric_prefix(lam, ratio, mu.values[-1])
        exp_cost = sum(p * bidding_cost(X, v) for v, p in mu.points)
        if best is None or exp_cost < best[0] * (1.0 - 1e-12):
            best = (exp_cost, X)
    return best[1]


# -------------------------------------------------------------------------
# adversarial instances
# -------------------------------------------------------------------------

ADVERSARIAL_KINDS = ("half-r", "zeta2", "gap")


def adversarial_prediction(kind: str, r: float, gap_R: float = 2.0) -> DiscretePrediction:
    """Two-point predictions that stress geometric heuristics.

    half-r and zeta2 place the second point just past the heuristic's bid
    after 5000; gap concentrates mass near 1 with a rare far point at
    2*gap_R, separating the synthesized optimum from every
    budget-proportional heuristic once r >= (2*gap_R)^2.
    """
    r = float(r)
    if kind == "half-r":
        second = 2500.0 + (r / 4.0) * 5000.0
        return DiscretePrediction(((5000.0, 0.5), (second, 0.5)))
    if kind == "zeta2":
        z2 = zeta_roots(r).zeta2
        second = 2500.0 + (z2 / 2.0) * 5000.0
        return DiscretePrediction(((5000.0, 0.5), (second, 0.5)))
    if kind == "gap":
        delta = 2.0 * float(gap_R)
        if r < delta * delta:
            raise ValidationError(
                f"gap construction requires r >= (2R)^2 = {delta * delta}: {r}"
            )
        return DiscretePrediction(((1.0, 1.0 - 1.0 / delta), (delta, 1.0 / delta)))
    raise ValidationError(f"unknown adversarial kind: {kind}")


# -------------------------------------------------------------------------
# batch runs
# -------------------------------------------------------------------------

ALGORITHMS = ("optimal", "zeta1", "half-r", "zeta2")


def _fmt(v: float) -> str:
    return f"{v:.10g}"


def instance_consistencies(mu: DiscretePrediction, r: float, algorithms) -> dict:
    out = {}
    for algo in algorithms:
        if algo == "optimal":
            out[algo] = synthesize(mu, r).consistency
        else:
            X = heuristic_strategy(HeuristicKind(algo), mu, r)
            out[algo] = consistency(X, mu)
    return out


def run_experiment(config: dict, out_dir, threads: int = 1) -> dict:
    """Sweep r over seeded datasets and write experiment.csv plus SVG plots.

    Returns {"csv": path, "svg": [paths], "rows": aggregate rows}. Rows and
    files are byte-stable for a fixed seed regardless of thread count.
    """
    seed = int(config.get("seed", 0))
    r_values = [float(r) for r in config.get("r_values", range(4, 13))]
    algorithms = tuple(config.get("algorithms", ALGORITHMS))
    plots = bool(config.get("plots", True))
    if "datasets" in config:
        specs = [DatasetSpec(**d) for d in config["datasets"]]
    else:
        specs = list(default_grid())

    datasets = []
    for i, spec in enumerate(specs):
        rng = np.random.default_rng([seed, i])
        datasets.append(gen_dataset(spec, rng))

    tasks = []
    for di, (spec, preds) in enumerate(zip(specs, datasets)):
        for r in r_values:
            for si, mu in enumerate(preds):
                tasks.append((di, r, si, mu))

    def work(task):
        _, r, _, mu = task
        return instance_consistencies(mu, r, algorithms)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, tasks))
    else:
        results = [work(t) for t in tasks]

    per_cell = {}
    for (di, r, si, _), res in zip(tasks, results):
        for algo, val in res.items():
            per_cell.setdefault((di, r, algo), {})[si] = val

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    max_samples = max(spec.samples for spec in specs)

    rows = []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["dataset", "r", "algorithm", "mean", "stddev"]
        + [f"v{i + 1}" for i in range(max_samples)]
    )
    for di, spec in enumerate(specs):
        for r in r_values:
            for algo in algorithms:
                cell = per_cell[(di, r, algo)]
                vals = [cell[si] for si in range(spec.samples)]
                mean = float(np.mean(vals))
                std = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
                rows.append(
                    {
                        "dataset": spec.label,
                        "r": r,
                        "algorithm": algo,
                        "mean": mean,
                        "stddev": std,
                        "values": vals,
                    }
                )
                writer.writerow(
                    [spec.label, _fmt(r), algo, _fmt(mean), _fmt(std)]
                    + [_fmt(v) for v in vals]
                    + [""] * (max_samples - len(vals))
                )
    csv_path = out_dir / "experiment.csv"
    csv_path.write_text(buf.getvalue())

    svg_paths = []
    if plots:
        svg_paths = _write_plots(specs, r_values, algorithms, rows, out_dir)

    return {"csv": csv_path, "svg": svg_paths, "rows": rows}


def _write_plots(specs, r_values, algorithms, rows, out_dir: Path) -> list:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    by_key = {(row["dataset"], row["r"], row["algorithm"]): row for row in rows}
    paths = []
    for spec in specs:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for algo in algorithms:
            means = [by_key[(spec.label, r, algo)]["mean"] for r in r_values]
            stds = [by_key[(spec.label, r, algo)]["stddev"] for r in r_values]
            ax.errorbar(r_values, means, yerr=stds, marker="o", capsize=3, label=algo)
        ax.set_xlabel("robustness budget r")
        ax.set_ylabel("consistency")
        ax.set_title(spec.label)
        ax.legend()
        fig.tight_layout()
        path = out_dir / f"experiment-{spec.label.replace('/', '-')}.svg"
        fig.savefig(path, format="svg")
        plt.close(fig)
        paths.append(path)
    return paths
