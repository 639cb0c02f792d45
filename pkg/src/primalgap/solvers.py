"""Inner maximisation, approximate maximisers, min-norm selection and primal minimisation.

``source`` arguments are either a :class:`~primalgap.core.Dataset` (or a raw
sample array) for empirical quantities, or ``None`` for population quantities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .core import DecisionSet, MinimaxProblem, QuadForm, _samples


class UnboundedInnerProblem(ValueError):
    """The inner maximisation has no finite solution."""


# ---------------------------------------------------------------------------
# schedules and oracle rates


@dataclass(frozen=True)
class AscentSchedule:
    """Projected gradient-ascent schedule: ``base`` every step or ``base / t``.

    ``base=None`` with the constant kind means stepsize 1/ell_tt.
    """

    kind: str = "constant"
    base: Optional[float] = None
    steps: int = 0

    def __post_init__(self):
        if self.kind not in ("constant", "diminishing"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if self.base is not None and not self.base > 0:
            raise ValueError("base stepsize must be positive")

    def stepsize(self, t: int, ell_tt: Optional[float] = None) -> float:
        """Stepsize at step t (t counts from 1)."""
        base = self.base
        if base is None:
            if self.kind == "diminishing" or not ell_tt:
                raise ValueError("stepsize 1/ell_tt requested but ell_tt is undeclared")
            base = 1.0 / ell_tt
        return base / t if self.kind == "diminishing" else base


@dataclass(frozen=True)
class OracleRateSpec:
    """Declared oracle rate: D/s (sublinear) or D eta^s (linear)."""

    kind: str
    D: float
    eta: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("sublinear", "linear"):
            raise ValueError(f"unknown rate kind {self.kind!r}")
        if not self.D > 0:
            raise ValueError("D must be positive")
        if self.kind == "linear" and not (self.eta is not None and 0 < self.eta < 1):
            raise ValueError("linear rate needs eta in (0, 1)")

    def steps(self, gamma: float) -> int:
        if not gamma > 0:
            raise ValueError("gamma must be positive")
        if self.kind == "sublinear":
            return max(math.ceil(self.D / gamma), 0)
        return max(math.ceil(math.log(self.D / gamma) / math.log(1.0 / self.eta)), 0)

    def error(self, s: int) -> float:
        if self.kind == "sublinear":
            return self.D / s if s > 0 else math.inf
        return self.D * self.eta ** s


# ---------------------------------------------------------------------------
# exact quadratic maximisation


def exact_quadratic_max(a: float, b: float, lo: float, hi: float) -> tuple:
    """Maximise a t^2 + b t over [lo, hi] (a <= 0); ties go to the smallest |t|."""
    if lo > hi:
        raise ValueError("empty interval")
    if a > 0:
        raise ValueError("a must be nonpositive")
    if a < 0:
        t = min(max(-b / (2 * a), lo), hi)
    elif b > 0:
        t = hi
    elif b < 0:
        t = lo
    else:
        t = min(max(0.0, lo), hi)
    if not math.isfinite(t):
        raise UnboundedInnerProblem("linear objective is unbounded on the interval")
    return t, a * t * t + b * t


def _linear_max(g: np.ndarray, dset: DecisionSet, tol: float = 0.0) -> np.ndarray:
    """Min-norm maximiser of g'x over a set."""
    zero = dset.project(np.zeros(dset.dim))
    if dset.kind == "whole":
        if np.any(np.abs(g) > tol):
            raise UnboundedInnerProblem("linear objective over the whole space")
        return zero
    if dset.kind == "ball":
        ng = np.linalg.norm(g)
        if ng <= tol:
            return zero
        return dset.center + dset.radius * g / ng
    x = np.where(g > tol, dset.upper, np.where(g < -tol, dset.lower, zero))
    if not np.all(np.isfinite(x)):
        raise UnboundedInnerProblem("linear objective unbounded on the box")
    return x


def maximize_concave_quadratic(C: np.ndarray, g: np.ndarray, dset: DecisionSet,
                               tol: float = 1e-13, max_iter: int = 200_000) -> np.ndarray:
    """Min-norm maximiser of -1/2 x'Cx + g'x over ``dset`` (C symmetric psd)."""
    C = np.atleast_2d(C)
    g = np.atleast_1d(g)
    scale = float(np.linalg.norm(C, 2)) if C.size else 0.0
    if scale <= 1e-15:
        return _linear_max(g, dset)
    x = np.linalg.pinv(C, rcond=1e-12, hermitian=True) @ g
    consistent = np.allclose(C @ x, g, atol=1e-10 * (1 + np.linalg.norm(g)))
    if consistent and dset.contains(x, tol=1e-12):
        return x
    if not consistent and not dset.bounded:
        raise UnboundedInnerProblem("concave quadratic unbounded above")
    # projected accelerated ascent from the projection of 0
    step = 1.0 / scale
    x = dset.project(np.zeros(dset.dim))
    y, t = x.copy(), 1.0
    for _ in range(max_iter):
        x_new = dset.project(y + step * (g - C @ y))
        t_new = 0.5 * (1 + math.sqrt(1 + 4 * t * t))
        y = x_new + ((t - 1) / t_new) * (x_new - x)
        if np.linalg.norm(x_new - x) <= tol * (1 + np.linalg.norm(x_new)):
            x = x_new
            break
        x = x_new
    return x


def minimize_convex_quadratic(A, g, dset: DecisionSet, **kw) -> np.ndarray:
    """Min-norm minimiser of 1/2 x'Ax + g'x over ``dset``."""
    return maximize_concave_quadratic(A, -np.atleast_1d(g), dset, **kw)


def saddle_point(qf: QuadForm, w_set: DecisionSet, theta_set: DecisionSet,
                 tol: float = 1e-12, max_iter: int = 500_000) -> tuple:
    """Saddle point of a convex-concave quadratic over W x Theta."""
    dw = qf.A.shape[0]
    M = np.block([[qf.A, qf.K], [qf.K.T, -qf.C]])
    rhs = -np.concatenate([qf.bw, qf.bt])
    z, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    w, th = z[:dw], z[dw:]
    if np.allclose(M @ z, rhs, atol=1e-10 * (1 + np.linalg.norm(rhs))) and \
            w_set.contains(w) and theta_set.contains(th):
        return w, th
    # extragradient on the monotone operator (grad_w, -grad_theta)
    ell = float(np.linalg.norm(M, 2))
    eta = 0.5 / max(ell, 1e-15)
    w = w_set.project(np.zeros(dw))
    th = theta_set.project(np.zeros(qf.C.shape[0]))
    for _ in range(max_iter):
        wh = w_set.project(w - eta * qf.grad_w(w, th))
        th_h = theta_set.project(th + eta * qf.grad_theta(w, th))
        wn = w_set.project(w - eta * qf.grad_w(wh, th_h))
        tn = theta_set.project(th + eta * qf.grad_theta(wh, th_h))
        moved = math.hypot(np.linalg.norm(wn - w), np.linalg.norm(tn - th))
        w, th = wn, tn
        if moved <= tol * (1 + math.hypot(np.linalg.norm(w), np.linalg.norm(th))):
            break
    return w, th


# ---------------------------------------------------------------------------
# risk helpers


def _Z(source):
    return None if source is None else _samples(source)


def risk(problem: MinimaxProblem, source, w, theta) -> float:
    """r_S(w, theta) for a dataset source, r(w, theta) for ``None``."""
    w, theta = np.atleast_1d(np.asarray(w, float)), np.atleast_1d(np.asarray(theta, float))
    Z = _Z(source)
    if Z is not None:
        return float(np.mean(problem.loss(w, theta, Z)))
    cf = problem.closed_forms
    if cf.pop_risk is not None:
        return float(cf.pop_risk(w, theta))
    raise ValueError(f"{problem.name}: population risk has no closed form")


def theta_gradient(problem: MinimaxProblem, source, w, theta) -> np.ndarray:
    Z = _Z(source)
    if Z is not None:
        return np.mean(problem.grad_theta(w, theta, Z), axis=0)
    cf = problem.closed_forms
    if cf.theta_quadratic is not None:
        a, b, _ = cf.theta_quadratic(w, None)
        return np.array([2 * a * float(theta[0]) + b])
    if cf.saddle_quadratic is not None:
        return cf.saddle_quadratic(None).grad_theta(w, theta)
    raise ValueError(f"{problem.name}: population theta-gradient has no closed form")


def w_gradient(problem: MinimaxProblem, source, w, theta) -> np.ndarray:
    Z = _Z(source)
    if Z is not None:
        return np.mean(problem.grad_w(w, theta, Z), axis=0)
    cf = problem.closed_forms
    if cf.saddle_quadratic is not None:
        return cf.saddle_quadratic(None).grad_w(w, theta)
    raise ValueError(f"{problem.name}: population w-gradient has no closed form")


# ---------------------------------------------------------------------------
# inner maximisation


@dataclass(frozen=True)
class InnerSpec:
    """How max over theta is computed: ``exact`` or ``iterative`` to within ``gamma``."""

    mode: str = "exact"
    gamma: Optional[float] = None
    max_steps: int = 1_000_000

    def __post_init__(self):
        if self.mode not in ("exact", "iterative"):
            raise ValueError(f"unknown inner mode {self.mode!r}")


EXACT = InnerSpec()


def _as_inner(inner) -> InnerSpec:
    if inner is None:
        return EXACT
    if isinstance(inner, InnerSpec):
        return inner
    if isinstance(inner, str):
        return InnerSpec(inner)
    mode, gamma = inner
    return InnerSpec(mode, gamma)


def exact_inner_max(problem: MinimaxProblem, source, w) -> tuple:
    """(min-norm argmax theta, max value) of theta -> r(w, theta)."""
    w = np.atleast_1d(np.asarray(w, float))
    Z = _Z(source)
    cf = problem.closed_forms
    T = problem.theta_set
    if cf.theta_quadratic is not None:
        a, b, c = cf.theta_quadratic(w, Z)
        lo = float(T.lower[0]) if T.kind != "whole" else -math.inf
        hi = float(T.upper[0]) if T.kind != "whole" else math.inf
        if T.kind == "ball":
            lo, hi = float(T.center[0] - T.radius), float(T.center[0] + T.radius)
        if a == 0 and not (math.isfinite(lo) and math.isfinite(hi)) and b != 0:
            raise UnboundedInnerProblem(f"{problem.name}: inner max unbounded at w={w}")
        t, val = exact_quadratic_max(a, b, lo, hi)
        return np.array([t]), val + c
    if cf.saddle_quadratic is not None:
        qf = cf.saddle_quadratic(Z)
        g = qf.K.T @ w + qf.bt
        th = maximize_concave_quadratic(qf.C, g, T)
        return th, qf.value(w, th)
    if cf.argmax is not None:
        th = np.asarray(cf.argmax(w, Z), float)
        return th, risk(problem, source, w, th)
    raise ValueError(f"{problem.name}: no exact inner maximiser available")


def iterative_inner_max(problem: MinimaxProblem, source, w, gamma: float,
                        max_steps: int = 1_000_000) -> tuple:
    """Projected accelerated ascent with step 1/ell_tt, run long enough for gamma accuracy."""
    ell_tt = problem.constants.ell_tt
    if not ell_tt:
        raise ValueError(f"{problem.name}: iterative inner max needs a declared ell_tt")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    w = np.atleast_1d(np.asarray(w, float))
    T = problem.theta_set
    R = problem.closed_forms.capacities.get("Ce") if source is not None else \
        problem.closed_forms.capacities.get("Cp")
    if R is None:
        R = T.max_norm
    x = T.project(np.zeros(T.dim))
    if math.isfinite(R):
        # accelerated rate 2 ell_tt ||x0 - x*||^2 / s^2 <= gamma
        steps = min(max_steps, math.ceil(math.sqrt(2 * ell_tt * (R + np.linalg.norm(x)) ** 2 / gamma)) + 1)
    else:
        steps = max_steps
    y, t = x.copy(), 1.0
    for _ in range(steps):
        x_new = T.project(y + theta_gradient(problem, source, w, y) / ell_tt)
        t_new = 0.5 * (1 + math.sqrt(1 + 4 * t * t))
        y = x_new + ((t - 1) / t_new) * (x_new - x)
        done = np.linalg.norm(x_new - x) <= 1e-15 * (1 + np.linalg.norm(x_new))
        x = x_new
        if done:
            break
    return x, risk(problem, source, w, x)


def inner_max(problem: MinimaxProblem, source, w, inner=None) -> tuple:
    inner = _as_inner(inner)
    if inner.mode == "exact":
        return exact_inner_max(problem, source, w)
    gamma = inner.gamma
    if gamma is None:
        gamma = 1e-8
    return iterative_inner_max(problem, source, w, gamma, inner.max_steps)


def primal_risk(problem: MinimaxProblem, source, w, inner=None) -> float:
    """max over theta of r_S(w, theta) (dataset) or r(w, theta) (``None``)."""
    inner = _as_inner(inner)
    cf = problem.closed_forms
    if inner.mode == "exact" and cf.primal is not None:
        return float(cf.primal(np.atleast_1d(np.asarray(w, float)), _Z(source)))
    return float(inner_max(problem, source, w, inner)[1])


def empirical_primal_risk(problem: MinimaxProblem, d, w, inner=None) -> float:
    return primal_risk(problem, d, w, inner)


def population_primal_risk(problem: MinimaxProblem, w, inner=None) -> float:
    return primal_risk(problem, None, w, inner)


def min_norm_argmax(problem: MinimaxProblem, d, w) -> np.ndarray:
    """Minimum-norm element of argmax_theta r_S(w, theta) (population if ``d`` is None)."""
    cf = problem.closed_forms
    if cf.theta_quadratic is None and cf.saddle_quadratic is None and cf.argmax is not None:
        # the maximiser is known even where the risk value is not
        return np.asarray(cf.argmax(np.atleast_1d(np.asarray(w, float)), _Z(d)), float)
    th, val = exact_inner_max(problem, d, w)
    if not np.isfinite(val):
        raise UnboundedInnerProblem(f"{problem.name}: argmax value is not finite")
    return th


def min_norm_argmin(problem: MinimaxProblem, d, theta) -> tuple:
    """(min-norm argmin over w of r(w, theta), value)."""
    theta = np.atleast_1d(np.asarray(theta, float))
    Z = _Z(d)
    cf = problem.closed_forms
    if cf.saddle_quadratic is not None:
        qf = cf.saddle_quadratic(Z)
        w = minimize_convex_quadratic(qf.A, qf.K @ theta + qf.bw, problem.w_set)
        return w, qf.value(w, theta)
    if cf.argmin is not None:
        w = np.asarray(cf.argmin(theta, Z), float)
        return w, risk(problem, d, w, theta)
    raise ValueError(f"{problem.name}: no exact minimiser over w available")


# ---------------------------------------------------------------------------
# approximate maximiser (gradient ascent from 0)


def approx_maximizer(problem: MinimaxProblem, source, w, schedule: AscentSchedule) -> np.ndarray:
    """Iterate after ``schedule.steps`` projected ascent steps on theta -> r(w, theta) from P(0)."""
    w = np.atleast_1d(np.asarray(w, float))
    T = problem.theta_set
    th = T.project(np.zeros(T.dim))
    ell_tt = problem.constants.ell_tt
    if schedule.kind == "constant" and schedule.base is None and not ell_tt:
        raise ValueError(f"{problem.name}: stepsize 1/ell_tt requested but ell_tt is undeclared")
    for t in range(1, schedule.steps + 1):
        th = T.project(th + schedule.stepsize(t, ell_tt) * theta_gradient(problem, source, w, th))
    return th


# ---------------------------------------------------------------------------
# primal minimisation


def grid_minimize_1d(f, lo: float, hi: float, points: int = 1024) -> tuple:
    """Grid search followed by bounded scalar refinement around the best node."""
    grid = np.linspace(lo, hi, points)
    vals = np.array([f(x) for x in grid])
    i = int(np.argmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, points - 1)]
    if b <= a:
        return float(grid[i]), float(vals[i])
    res = minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": 1e-12})
    if vals[i] <= res.fun:
        return float(grid[i]), float(vals[i])
    return float(res.x), float(res.fun)


def primal_minimize(problem: MinimaxProblem, source=None, inner=None,
                    grid_points: int = 1024) -> tuple:
    """(argmin_w, min_w) of the primal risk for a dataset source or ``None`` (population)."""
    cf = problem.closed_forms
    Z = _Z(source)
    if cf.minimizer is not None:
        w, v = cf.minimizer(Z)
        return np.atleast_1d(np.asarray(w, float)), float(v)
    if cf.saddle_quadratic is not None and problem.convex_concave:
        w, _ = saddle_point(cf.saddle_quadratic(Z), problem.w_set, problem.theta_set)
        return w, primal_risk(problem, source, w, inner)
    W = problem.w_set
    if W.dim == 1 and W.bounded:
        lo = float(W.lower[0]) if W.kind != "ball" else float(W.center[0] - W.radius)
        hi = float(W.upper[0]) if W.kind != "ball" else float(W.center[0] + W.radius)
        x, v = grid_minimize_1d(lambda x: primal_risk(problem, source, [x], inner), lo, hi, grid_points)
        return np.array([x]), v
    raise ValueError(f"{problem.name}: no applicable primal minimisation method")
