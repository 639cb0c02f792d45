"""Projected GDA, GDMax and the proximal point method, each returning a full trajectory."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import Dataset, DecisionSet, MinimaxProblem, Point, QuadForm, empirical_grads
from .solvers import InnerSpec, _as_inner, exact_inner_max, inner_max, risk, saddle_point

KINDS = ("gda", "gdmax", "ppa")


@dataclass(frozen=True)
class AlgoConfig:
    """Learner configuration.

    Diminishing schedules use alpha0/t and beta0/t with t = 1, 2, ...;
    ``c0 = max(alpha0, beta0)``.  ``restricted_theta`` optionally declares a set
    the theta iterates are expected to stay in; trajectories flag exits.
    """

    kind: str = "gda"
    T: int = 1
    alpha0: float = 0.1
    beta0: Optional[float] = None
    schedule: str = "constant"
    inner: InnerSpec = field(default_factory=InnerSpec)
    prox_step: float = 1.0
    prox_tol: float = 1e-10
    prox_max_iter: int = 10_000
    restricted_theta: Optional[DecisionSet] = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown algorithm {self.kind!r}")
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if self.schedule not in ("constant", "diminishing"):
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if not self.alpha0 > 0 or (self.beta0 is not None and not self.beta0 > 0):
            raise ValueError("stepsizes must be positive")
        if not self.prox_step > 0:
            raise ValueError("prox_step must be positive")
        object.__setattr__(self, "inner", _as_inner(self.inner))

    @property
    def beta(self) -> float:
        return self.alpha0 if self.beta0 is None else self.beta0

    @property
    def c0(self) -> float:
        return max(self.alpha0, self.beta)

    def steps(self, t: int) -> tuple:
        """(alpha_t, beta_t) for t >= 1."""
        if self.schedule == "diminishing":
            return self.alpha0 / t, self.beta / t
        return self.alpha0, self.beta


@dataclass(frozen=True, eq=False)
class Trajectory:
    points: list
    averaged: Optional[Point] = None
    left_restricted_set: bool = False

    @property
    def final(self) -> Point:
        return self.points[-1]

    @property
    def T(self) -> int:
        return len(self.points) - 1

    @property
    def theta_norm_envelope(self) -> float:
        return max(float(np.linalg.norm(p.theta)) for p in self.points)

    def output(self) -> Point:
        """The learner's reported point: averaged iterate when available, else the last."""
        return self.averaged if self.averaged is not None else self.final

    def rows(self) -> list:
        """CSV-ready rows (t, w..., theta..., ||theta||)."""
        return [[t, *p.w.tolist(), *p.theta.tolist(), float(np.linalg.norm(p.theta))]
                for t, p in enumerate(self.points)]

    def header(self) -> list:
        p = self.points[0]
        return (["t"] + [f"w{i}" for i in range(p.w.size)]
                + [f"theta{i}" for i in range(p.theta.size)] + ["theta_norm"])


def _origin(problem: MinimaxProblem, start: Optional[Point] = None) -> tuple:
    if start is None:
        start = Point(np.zeros(problem.d_w), np.zeros(problem.d_theta))
    return problem.w_set.project(start.w), problem.theta_set.project(start.theta)


def _finish(points, cfg: AlgoConfig, averaged=None) -> Trajectory:
    left = False
    if cfg.restricted_theta is not None:
        left = any(not cfg.restricted_theta.contains(p.theta, tol=1e-9) for p in points)
    return Trajectory(points, averaged, left)


def run_gda(problem: MinimaxProblem, d: Dataset, cfg: AlgoConfig,
            start: Optional[Point] = None) -> Trajectory:
    """Simultaneous projected gradient descent-ascent from the projected origin (or ``start``)."""
    W, Th = problem.w_set, problem.theta_set
    w, th = _origin(problem, start)
    points = [Point(w, th)]
    for t in range(1, cfg.T + 1):
        a, b = cfg.steps(t)
        gw, gt = empirical_grads(problem, d, w, th)
        w, th = W.project(w - a * gw), Th.project(th + b * gt)
        points.append(Point(w, th))
    return _finish(points, cfg)


def best_response(problem: MinimaxProblem, d, w, inner: Optional[InnerSpec] = None,
                  tau: float = 1e-9) -> np.ndarray:
    """Argmax of r_S(w, .) used by GDMax.

    Among maximisers the one that is the limit of min-norm maximisers along
    w + tau (w_ref - w), tau -> 0+, is preferred, where w_ref is the reference
    point of W; this singles out the branch the argmax map follows from the
    interior of W.  When that limit does not maximise at w itself, the plain
    min-norm maximiser is returned.
    """
    inner = _as_inner(inner)
    if inner.mode != "exact":
        return inner_max(problem, d, w, inner)[0]
    w = np.atleast_1d(np.asarray(w, float))
    th_a, best = exact_inner_max(problem, d, w)
    ref = problem.w_set.reference_point()
    w_tau = problem.w_set.project(w + tau * (ref - w))
    if np.array_equal(w_tau, w):
        return th_a
    th_b, _ = exact_inner_max(problem, d, w_tau)
    if np.linalg.norm(th_b - th_a) <= 1e-6 * (1 + np.linalg.norm(th_a)):
        return th_a
    if risk(problem, d, w, th_b) >= best - 1e-9 * (1 + abs(best)):
        return th_b
    return th_a


def run_gdmax(problem: MinimaxProblem, d: Dataset, cfg: AlgoConfig,
              start: Optional[Point] = None) -> Trajectory:
    """Gradient descent on w with the maximiser over theta recomputed after every step.

    The first w-step uses the best response to the initial w.
    """
    W = problem.w_set
    w, th0 = _origin(problem, start)
    points = [Point(w, th0)]
    th = best_response(problem, d, w, cfg.inner)
    for t in range(1, cfg.T + 1):
        a, _ = cfg.steps(t)
        gw, _ = empirical_grads(problem, d, w, th)
        w = W.project(w - a * gw)
        th = best_response(problem, d, w, cfg.inner)
        points.append(Point(w, th))
    return _finish(points, cfg)


def _prox_quadratic(qf: QuadForm, w0, th0, eta: float) -> QuadForm:
    dw, dt = qf.A.shape[0], qf.C.shape[0]
    return QuadForm(qf.A + np.eye(dw) / eta, qf.K, qf.C + np.eye(dt) / eta,
                    qf.bw - w0 / eta, qf.bt + th0 / eta)


def prox_step(problem: MinimaxProblem, d, w0, th0, eta: float, tol: float = 1e-10,
              max_iter: int = 10_000) -> tuple:
    """Saddle point of r_S(w, th) + |w - w0|^2/(2 eta) - |th - th0|^2/(2 eta) over W x Theta."""
    W, Th = problem.w_set, problem.theta_set
    qfun = problem.closed_forms.saddle_quadratic
    if qfun is not None:
        Z = None if d is None else (d.samples if isinstance(d, Dataset) else np.asarray(d))
        return saddle_point(_prox_quadratic(qfun(Z), w0, th0, eta), W, Th)
    # damped fixed point of the implicit prox equations
    w, th = w0.copy(), th0.copy()
    rho, prev = 1.0, math.inf
    for _ in range(max_iter):
        gw, gt = empirical_grads(problem, d, w, th)
        wn = (1 - rho) * w + rho * W.project(w0 - eta * gw)
        tn = (1 - rho) * th + rho * Th.project(th0 + eta * gt)
        moved = math.hypot(np.linalg.norm(wn - w), np.linalg.norm(tn - th))
        if not np.isfinite(moved):
            raise RuntimeError("proximal fixed-point iteration diverged")
        w, th = wn, tn
        if moved <= tol:
            return w, th
        if moved > prev:
            rho = max(0.5 * rho, 1e-3)
        prev = moved
    raise RuntimeError(f"proximal subproblem did not reach tol={tol} in {max_iter} iterations")


def run_ppa(problem: MinimaxProblem, d: Dataset, cfg: AlgoConfig,
            start: Optional[Point] = None) -> Trajectory:
    """Proximal point iterations with running averages of points 1..T."""
    w, th = _origin(problem, start)
    points = [Point(w, th)]
    for _ in range(cfg.T):
        w, th = prox_step(problem, d, w, th, cfg.prox_step, cfg.prox_tol, cfg.prox_max_iter)
        points.append(Point(w, th))
    avg = Point(np.mean([p.w for p in points[1:]], axis=0), np.mean([p.theta for p in points[1:]], axis=0))
    return _finish(points, cfg, avg)


def averaged_points(traj: Trajectory) -> list:
    """Running averages (w-bar^t, theta-bar^t) for t = 1..T."""
    W = np.cumsum([p.w for p in traj.points[1:]], axis=0)
    Th = np.cumsum([p.theta for p in traj.points[1:]], axis=0)
    k = np.arange(1, len(W) + 1)[:, None]
    return [Point(a, b) for a, b in zip(W / k, Th / k)]


RUNNERS = {"gda": run_gda, "gdmax": run_gdmax, "ppa": run_ppa}


def run_algorithm(problem: MinimaxProblem, d: Dataset, cfg: AlgoConfig,
                  start: Optional[Point] = None) -> Trajectory:
    return RUNNERS[cfg.kind](problem, d, cfg, start)


def gradient_norm_at_origin(problem: MinimaxProblem, d) -> float:
    """L_0 = max over samples of the joint gradient norm at (0, 0)."""
    Z = d.samples if isinstance(d, Dataset) else np.asarray(d)
    w, th = np.zeros(problem.d_w), np.zeros(problem.d_theta)
    g = np.concatenate([problem.grad_w(w, th, Z), problem.grad_theta(w, th, Z)], axis=1)
    return float(np.max(np.linalg.norm(g, axis=1)))
