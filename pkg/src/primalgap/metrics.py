"""Monte Carlo estimators of generalisation errors, stability and capacities.

Every estimator draws trial datasets from seeds derived from
``(master_seed, trial, role)`` so estimators run with the same ``McSpec`` see
the same datasets and per-trial identities hold exactly.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .algorithms import AlgoConfig, run_algorithm
from .core import (Estimate, MinimaxProblem, Point, derive_seed, neighboring_dataset,
                   sample_dataset)
from .solvers import exact_inner_max, min_norm_argmax, min_norm_argmin, primal_minimize, primal_risk


@dataclass(frozen=True)
class McSpec:
    trials: int = 100
    n: int = 100
    master_seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.trials < 2:
            raise ValueError("at least two trials are needed for a standard error")
        if self.n < 1:
            raise ValueError("n must be >= 1")

    def seed(self, trial: int, role: str = "data") -> int:
        return derive_seed(self.master_seed, trial, role)


def map_trials(fn: Callable[[int], object], mc: McSpec) -> list:
    """[fn(0), ..., fn(M-1)], optionally on a thread pool; order is by trial index."""
    if mc.threads <= 1:
        return [fn(t) for t in range(mc.trials)]
    with ThreadPoolExecutor(max_workers=mc.threads) as pool:
        return list(pool.map(fn, range(mc.trials)))


def _estimate(values, mc: McSpec) -> Estimate:
    return Estimate.from_values(values, mc.master_seed)


# ---------------------------------------------------------------------------
# primal risk / primal gap


def population_primal_gap(problem: MinimaxProblem, w, r_min: Optional[float] = None) -> float:
    """Delta(w) = r(w) - min r."""
    if r_min is None:
        r_min = primal_minimize(problem, None)[1]
    return primal_risk(problem, None, w) - r_min


def empirical_primal_gap(problem: MinimaxProblem, d, w, r_min: Optional[float] = None) -> float:
    if r_min is None:
        r_min = primal_minimize(problem, d)[1]
    return primal_risk(problem, d, w) - r_min


@dataclass(frozen=True)
class PrimalTrials:
    """Per-trial primal quantities on shared datasets."""

    r: np.ndarray          # r(w_S^A)
    r_S: np.ndarray        # r_S(w_S^A)
    min_r_S: np.ndarray    # min_w r_S(w)
    min_r: float           # min_w r(w)

    @property
    def gen_primal(self) -> np.ndarray:
        return self.r - self.r_S

    @property
    def primal_min_error(self) -> np.ndarray:
        return self.min_r_S - self.min_r

    @property
    def gap(self) -> np.ndarray:
        return self.r - self.min_r

    @property
    def gap_S(self) -> np.ndarray:
        return self.r_S - self.min_r_S

    @property
    def gen_gap(self) -> np.ndarray:
        return self.gap - self.gap_S


def primal_trials(problem: MinimaxProblem, algo: Optional[AlgoConfig], mc: McSpec) -> PrimalTrials:
    """Run the learner on M datasets (``algo=None`` uses the exact empirical minimiser)."""
    min_r = primal_minimize(problem, None)[1]

    def one(t):
        d = sample_dataset(problem, mc.n, mc.seed(t))
        w_min, v_min = primal_minimize(problem, d)
        w = w_min if algo is None else run_algorithm(problem, d, algo).output().w
        return primal_risk(problem, None, w), primal_risk(problem, d, w), v_min

    rows = np.array(map_trials(one, mc), dtype=float)
    return PrimalTrials(rows[:, 0], rows[:, 1], rows[:, 2], float(min_r))


def estimate_gen_error_primal_risk(problem, algo, mc: McSpec) -> Estimate:
    """zeta^P = E[r(w_S^A) - r_S(w_S^A)]."""
    return _estimate(primal_trials(problem, algo, mc).gen_primal, mc)


def estimate_gen_error_primal_gap(problem, algo, mc: McSpec) -> Estimate:
    """zeta^PG = E[Delta(w_S^A) - Delta_S(w_S^A)]."""
    return _estimate(primal_trials(problem, algo, mc).gen_gap, mc)


def estimate_primal_min_error(problem, mc: McSpec) -> Estimate:
    """E[min r_S - min r]."""
    min_r = primal_minimize(problem, None)[1]

    def one(t):
        return primal_minimize(problem, sample_dataset(problem, mc.n, mc.seed(t)))[1] - min_r

    return _estimate(map_trials(one, mc), mc)


def estimate_population_gap(problem, algo, mc: McSpec) -> Estimate:
    """E[Delta(w_S^A)]; ``algo=None`` measures the empirical minimiser."""
    return _estimate(primal_trials(problem, algo, mc).gap, mc)


def estimate_sum_interval_probability(problem, lo: float, hi: float, mc: McSpec) -> Estimate:
    """Pr(lo <= |sum z_i| <= hi) for scalar samples."""

    def one(t):
        s = abs(float(np.sum(sample_dataset(problem, mc.n, mc.seed(t)).samples)))
        return float(lo <= s <= hi)

    return _estimate(map_trials(one, mc), mc)


# ---------------------------------------------------------------------------
# primal-dual risk


def pd_risk(problem: MinimaxProblem, source, p: Point) -> float:
    """max_th' r(w, th') - min_w' r(w', th) (empirical when ``source`` is a dataset)."""
    _, upper = exact_inner_max(problem, source, p.w)
    _, lower = min_norm_argmin(problem, source, p.theta)
    return float(upper - lower)


def estimate_gen_error_pd(problem, algo: AlgoConfig, mc: McSpec) -> Estimate:
    def one(t):
        d = sample_dataset(problem, mc.n, mc.seed(t))
        p = run_algorithm(problem, d, algo).output()
        return pd_risk(problem, None, p) - pd_risk(problem, d, p)

    return _estimate(map_trials(one, mc), mc)


# ---------------------------------------------------------------------------
# stability


@dataclass(frozen=True)
class StabilityEstimate:
    w: Estimate
    theta: Estimate
    joint: Estimate


def stability_distances(problem, algo: AlgoConfig, n: int, mc: McSpec) -> np.ndarray:
    """Per-trial (||w_S - w_S'||, ||th_S - th_S'||, joint) on neighbouring datasets."""

    def one(t):
        d = sample_dataset(problem, n, mc.seed(t))
        i = int(np.random.default_rng(mc.seed(t, "index")).integers(0, n))
        d2 = neighboring_dataset(d, i, problem, mc.seed(t, "replace"))
        p, q = run_algorithm(problem, d, algo).output(), run_algorithm(problem, d2, algo).output()
        dw, dt = float(np.linalg.norm(p.w - q.w)), float(np.linalg.norm(p.theta - q.theta))
        return dw, dt, float(np.hypot(dw, dt))

    return np.array(map_trials(one, mc), dtype=float)


def estimate_stability(problem, algo: AlgoConfig, n: int, mc: McSpec) -> StabilityEstimate:
    dist = stability_distances(problem, algo, n, mc)
    return StabilityEstimate(*(_estimate(dist[:, k], mc) for k in range(3)))


# ---------------------------------------------------------------------------
# capacities


def _grid(dset, points: int, rng) -> np.ndarray:
    if dset.dim == 1 and dset.bounded:
        if dset.kind == "ball":
            lo, hi = dset.center[0] - dset.radius, dset.center[0] + dset.radius
        else:
            lo, hi = dset.lower[0], dset.upper[0]
        return np.linspace(lo, hi, points)[:, None]
    return np.vstack([dset.reference_point()[None], dset.sample(rng, points - 1)])


def estimate_capacity(problem: MinimaxProblem, which: str, mc: McSpec, grid_points: int = 101) -> Estimate:
    """Grid/sample maximum of best-response norms.

    Cp, Cpw use population best responses; Ce, Cew maximise additionally over
    ``mc.trials`` sampled datasets.  The result is a lower-bound estimate of the
    capacity (``mean`` is the maximum found, ``std_error`` is 0).
    """
    if which not in ("Cp", "Ce", "Cpw", "Cew"):
        raise ValueError(f"unknown capacity {which!r}")
    over_w = which in ("Cp", "Ce")
    grid = _grid(problem.w_set if over_w else problem.theta_set, grid_points,
                 np.random.default_rng(mc.seed(0, "capacity-grid")))

    def best(source):
        if over_w:
            return max(float(np.linalg.norm(min_norm_argmax(problem, source, x))) for x in grid)
        return max(float(np.linalg.norm(min_norm_argmin(problem, source, x)[0])) for x in grid)

    if which in ("Cp", "Cpw"):
        value = best(None)
    else:
        value = max(map_trials(lambda t: best(sample_dataset(problem, mc.n, mc.seed(t))), mc))
    return Estimate(float(value), 0.0, mc.trials, mc.master_seed)
