"""Problem abstraction, datasets, risk evaluation and projections.

Losses are vectorised over samples: ``loss(w, theta, Z)`` takes parameter
vectors ``w`` and ``theta`` (1-D arrays) and a stacked batch of samples ``Z``
(leading axis indexes samples) and returns one value per sample.  Gradients
follow the same convention and return arrays of shape ``(n, dim)``.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Optional

import numpy as np

Array = np.ndarray


# ---------------------------------------------------------------------------
# seeds


def derive_seed(master_seed: int, trial: int, role: str = "data") -> int:
    """Deterministic 63-bit seed from (master, trial index, role tag)."""
    ss = np.random.SeedSequence([int(master_seed) & 0xFFFFFFFF, int(trial), zlib.crc32(role.encode())])
    hi, lo = ss.generate_state(2, dtype=np.uint32)
    return int((int(hi) << 32 | int(lo)) & 0x7FFFFFFFFFFFFFFF)


# ---------------------------------------------------------------------------
# constraint sets


@dataclass(frozen=True, eq=False)
class DecisionSet:
    """Closed convex set: interval, box, Euclidean ball or the whole space."""

    kind: str
    dim: int
    lower: Optional[Array] = None
    upper: Optional[Array] = None
    center: Optional[Array] = None
    radius: Optional[float] = None

    KINDS = ("interval", "box", "ball", "whole")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown set kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if self.kind in ("interval", "box"):
            if np.any(self.lower > self.upper):
                raise ValueError("empty box: lower > upper")
        if self.kind == "ball" and not self.radius >= 0:
            raise ValueError("ball radius must be nonnegative")

    @classmethod
    def interval(cls, lo: float, hi: float) -> "DecisionSet":
        return cls("interval", 1, lower=np.array([float(lo)]), upper=np.array([float(hi)]))

    @classmethod
    def box(cls, lower, upper) -> "DecisionSet":
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        if lower.shape != upper.shape:
            raise ValueError("box bounds have different shapes")
        return cls("box", lower.size, lower=lower, upper=upper)

    @classmethod
    def ball(cls, center, radius: float) -> "DecisionSet":
        center = np.atleast_1d(np.asarray(center, dtype=float))
        return cls("ball", center.size, center=center, radius=float(radius))

    @classmethod
    def whole(cls, dim: int) -> "DecisionSet":
        return cls("whole", int(dim))

    @property
    def bounded(self) -> bool:
        if self.kind == "ball":
            return True
        if self.kind == "whole":
            return False
        return bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))

    @property
    def diameter(self) -> float:
        if self.kind == "ball":
            return 2.0 * self.radius
        if not self.bounded:
            return np.inf
        return float(np.linalg.norm(self.upper - self.lower))

    @property
    def max_norm(self) -> float:
        """sup of ||x|| over the set (M(W) for the minimisation set)."""
        if self.kind == "ball":
            return float(np.linalg.norm(self.center) + self.radius)
        if not self.bounded:
            return np.inf
        return float(np.linalg.norm(np.maximum(np.abs(self.lower), np.abs(self.upper))))

    def reference_point(self) -> Array:
        """A point of the set used as 'interior direction' anchor."""
        if self.kind == "ball":
            return self.center.copy()
        if self.kind == "whole":
            return np.zeros(self.dim)
        lo, hi = self.lower, self.upper
        mid = np.where(np.isfinite(lo) & np.isfinite(hi), 0.5 * (lo + hi), 0.0)
        return self.project(mid)

    def project(self, v) -> Array:
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if v.shape != (self.dim,):
            raise ValueError(f"dimension mismatch: expected ({self.dim},), got {v.shape}")
        if self.kind == "whole":
            return v.copy()
        if self.kind == "ball":
            d = v - self.center
            nrm = np.linalg.norm(d)
            if nrm <= self.radius:
                return v.copy()
            return self.center + d * (self.radius / nrm)
        return np.clip(v, self.lower, self.upper)

    def contains(self, v, tol: float = 1e-12) -> bool:
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if self.kind == "whole":
            return bool(np.all(np.isfinite(v)))
        if self.kind == "ball":
            return bool(np.linalg.norm(v - self.center) <= self.radius * (1 + tol) + tol)
        return bool(np.all(v >= self.lower - tol) and np.all(v <= self.upper + tol))

    def sample(self, rng: np.random.Generator, size: int, shrink: float = 1.0, scale: float = 1.0) -> Array:
        """Uniform-ish points of the (shrunken) set; whole space uses N(0, scale^2)."""
        if self.kind == "whole":
            return rng.normal(scale=scale, size=(size, self.dim))
        if self.kind == "ball":
            dirs = rng.normal(size=(size, self.dim))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
            rad = self.radius * shrink * rng.random(size) ** (1.0 / self.dim)
            return self.center + dirs * rad[:, None]
        lo = np.where(np.isfinite(self.lower), self.lower, -scale)
        hi = np.where(np.isfinite(self.upper), self.upper, scale)
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo) * shrink
        return mid + half * rng.uniform(-1.0, 1.0, size=(size, self.dim))


def project(dset: DecisionSet, v) -> Array:
    return dset.project(v)


# ---------------------------------------------------------------------------
# problem description


@dataclass(frozen=True, eq=False)
class QuadForm:
    """r(w, th) = 1/2 w'Aw + w'K th - 1/2 th'C th + bw'w + bt'th + const."""

    A: Array
    K: Array
    C: Array
    bw: Array
    bt: Array
    const: float = 0.0

    def value(self, w, th) -> float:
        return float(0.5 * w @ self.A @ w + w @ self.K @ th - 0.5 * th @ self.C @ th
                     + self.bw @ w + self.bt @ th + self.const)

    def grad_w(self, w, th) -> Array:
        return self.A @ w + self.K @ th + self.bw

    def grad_theta(self, w, th) -> Array:
        return self.K.T @ w - self.C @ th + self.bt


@dataclass(frozen=True)
class ClosedForms:
    """Optional analytic structure of a problem.

    Every callable taking ``Z`` treats ``Z=None`` as the population (expectation
    over the sampling distribution) and an array of samples as the empirical
    average over that dataset.
    """

    pop_risk: Optional[Callable[[Array, Array], float]] = None
    primal: Optional[Callable[[Array, Optional[Array]], float]] = None
    minimizer: Optional[Callable[[Optional[Array]], tuple]] = None
    argmax: Optional[Callable[[Array, Optional[Array]], Array]] = None
    argmin: Optional[Callable[[Array, Optional[Array]], Array]] = None
    # scalar theta: r(w, th) = a th^2 + b th + c
    theta_quadratic: Optional[Callable[[Array, Optional[Array]], tuple]] = None
    saddle_quadratic: Optional[Callable[[Optional[Array]], QuadForm]] = None
    capacities: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Constants:
    """Declared problem constants; ``None`` means unknown."""

    L: Optional[float] = None
    ell: Optional[float] = None
    ell_tt: Optional[float] = None
    L_theta_star: Optional[float] = None
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class MinimaxProblem:
    name: str
    loss: Callable[[Array, Array, Array], Array]
    grad_w: Callable[[Array, Array, Array], Array]
    grad_theta: Callable[[Array, Array, Array], Array]
    sampler: Callable[[np.random.Generator, int], Array]
    w_set: DecisionSet
    theta_set: DecisionSet
    closed_forms: ClosedForms = field(default_factory=ClosedForms)
    constants: Constants = field(default_factory=Constants)
    params: dict = field(default_factory=dict)
    convex_concave: bool = False
    concave: bool = True

    @property
    def d_w(self) -> int:
        return self.w_set.dim

    @property
    def d_theta(self) -> int:
        return self.theta_set.dim

    def with_constants(self, **kw) -> "MinimaxProblem":
        return replace(self, constants=replace(self.constants, **kw))


@dataclass(frozen=True, eq=False)
class Dataset:
    samples: Array
    seed: int

    def __post_init__(self):
        s = np.array(self.samples, copy=True)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        if len(s) < 1:
            raise ValueError("dataset must contain at least one sample")

    @property
    def n(self) -> int:
        return len(self.samples)

    def replace(self, index: int, value) -> "Dataset":
        if not 0 <= index < self.n:
            raise IndexError(f"index {index} out of range for n={self.n}")
        s = np.array(self.samples, copy=True)
        s[index] = value
        return Dataset(s, self.seed)

    def __eq__(self, other):
        return (isinstance(other, Dataset) and self.samples.shape == other.samples.shape
                and bool(np.array_equal(self.samples, other.samples)))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Point:
    w: Array
    theta: Array

    def __post_init__(self):
        object.__setattr__(self, "w", np.atleast_1d(np.asarray(self.w, dtype=float)))
        object.__setattr__(self, "theta", np.atleast_1d(np.asarray(self.theta, dtype=float)))

    def stacked(self) -> Array:
        return np.concatenate([self.w, self.theta])


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    trials: int
    seed: int

    @classmethod
    def from_values(cls, values, seed: int = 0) -> "Estimate":
        v = np.asarray(values, dtype=float)
        if v.size < 1:
            raise ValueError("no values")
        se = float(np.std(v, ddof=1) / np.sqrt(v.size)) if v.size >= 2 else 0.0
        return cls(float(np.mean(v)), se, int(v.size), int(seed))

    def within(self, target: float, k: float = 2.0) -> bool:
        return abs(self.mean - target) <= k * self.std_error


# ---------------------------------------------------------------------------
# operations


def sample_dataset(problem: MinimaxProblem, n: int, seed: int) -> Dataset:
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    return Dataset(problem.sampler(rng, n), seed)


def neighboring_dataset(d: Dataset, index: int, problem: MinimaxProblem, seed: int) -> Dataset:
    """Copy of ``d`` with sample ``index`` replaced by a fresh independent draw."""
    if not 0 <= index < d.n:
        raise IndexError(f"index {index} out of range for n={d.n}")
    fresh = problem.sampler(np.random.default_rng(seed), 1)[0]
    return d.replace(index, fresh)


def _samples(data) -> Array:
    return data.samples if isinstance(data, Dataset) else np.asarray(data)


def empirical_risk(problem: MinimaxProblem, d, p: Point) -> float:
    return float(np.mean(problem.loss(p.w, p.theta, _samples(d))))


def empirical_grads(problem: MinimaxProblem, d, w, theta) -> tuple:
    Z = _samples(d)
    return (np.mean(problem.grad_w(w, theta, Z), axis=0),
            np.mean(problem.grad_theta(w, theta, Z), axis=0))


@dataclass(frozen=True)
class EvalSpec:
    mode: str = "auto"  # auto | closed-form | monte-carlo
    n_eval: int = 100_000
    seed: int = 0


def population_risk(problem: MinimaxProblem, p: Point, spec: EvalSpec = EvalSpec()) -> Estimate:
    cf = problem.closed_forms.pop_risk
    mode = spec.mode
    if mode == "auto":
        mode = "closed-form" if cf is not None else "monte-carlo"
    if mode == "closed-form":
        if cf is None:
            raise ValueError(f"{problem.name}: no closed-form population risk declared")
        return Estimate(float(cf(p.w, p.theta)), 0.0, 1, spec.seed)
    if mode != "monte-carlo":
        raise ValueError(f"unknown evaluation mode {spec.mode!r}")
    Z = problem.sampler(np.random.default_rng(spec.seed), spec.n_eval)
    return Estimate.from_values(problem.loss(p.w, p.theta, Z), spec.seed)


def finite_diff_check(problem: MinimaxProblem, p: Point, z, h: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients."""
    if h <= 0:
        raise ValueError("h must be positive")
    Z = np.asarray(z)[None]
    w, th = p.w, p.theta
    analytic = np.concatenate([problem.grad_w(w, th, Z)[0], problem.grad_theta(w, th, Z)[0]])
    x0 = np.concatenate([w, th])
    dw = w.size

    def f(x):
        return float(problem.loss(x[:dw], x[dw:], Z)[0])

    numeric = np.empty_like(x0)
    for i in range(x0.size):
        e = np.zeros_like(x0)
        e[i] = h
        numeric[i] = (f(x0 + e) - f(x0 - e)) / (2 * h)
    return float(np.max(np.abs(analytic - numeric) / (np.abs(analytic) + 1e-12)))


def empirical_distribution(problem: MinimaxProblem, d: Dataset) -> MinimaxProblem:
    """The problem whose sampling distribution is uniform over ``d``."""
    S = d.samples

    def sampler(rng, size):
        return S[rng.integers(0, len(S), size=size)]

    def pop_risk(w, th):
        return float(np.mean(problem.loss(w, th, S)))

    return replace(problem, name=f"{problem.name}|P(S)", sampler=sampler,
                   closed_forms=ClosedForms(pop_risk=pop_risk))


def as_vector(x: Any) -> Array:
    return np.atleast_1d(np.asarray(x, dtype=float))
