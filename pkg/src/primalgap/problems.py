"""Built-in minimax problems with closed forms and declared constants."""
from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .core import ClosedForms, Constants, DecisionSet, MinimaxProblem, QuadForm


def _scalar(x) -> float:
    return float(np.asarray(x, dtype=float).reshape(-1)[0])


# ---------------------------------------------------------------------------
# truncated Gaussian counterexample


def make_truncated_gaussian(n: int = 100, lam: float = 4.0) -> MinimaxProblem:
    """Primal risk generalises while the learned model does not.

    f(w, th; z) = w^2/2 - (th^2/(2 n^2) - z th + 1) w on W = [0, 1],
    Theta = [-lam n, lam n], with z a N(0, 1/n) variable clamped to
    +-lam log(n)/sqrt(n).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not lam > 2:
        raise ValueError("lam must exceed 2")
    n2 = float(n) ** 2
    clamp = lam * math.log(n) / math.sqrt(n)

    def sampler(rng, size):
        y = rng.normal(0.0, 1.0 / math.sqrt(n), size=size)
        return np.clip(y, -clamp, clamp)

    def loss(w, th, Z):
        w, t = _scalar(w), _scalar(th)
        return 0.5 * w * w - (t * t / (2 * n2) - Z * t + 1.0) * w

    def grad_w(w, th, Z):
        w, t = _scalar(w), _scalar(th)
        return (w - (t * t / (2 * n2) - Z * t + 1.0))[:, None]

    def grad_theta(w, th, Z):
        w, t = _scalar(w), _scalar(th)
        return (-(t / n2 - Z) * w)[:, None]

    def v_of(Z):
        s = float(np.sum(Z))
        return s * s / 2 if abs(s) <= lam else lam * abs(s) - lam * lam / 2

    def pop_risk(w, th):
        w, t = _scalar(w), _scalar(th)
        return 0.5 * w * w - (t * t / (2 * n2) + 1.0) * w

    def theta_quadratic(w, Z=None):
        w = _scalar(w)
        zbar = 0.0 if Z is None else float(np.mean(Z))
        return -w / (2 * n2), w * zbar, 0.5 * w * w - w

    def primal(w, Z=None):
        w = _scalar(w)
        v = 0.0 if Z is None else v_of(Z)
        return 0.5 * w * w - w + w * v

    def minimizer(Z=None):
        v = 0.0 if Z is None else v_of(Z)
        ws = min(max(1.0 - v, 0.0), 1.0)
        return np.array([ws]), 0.5 * ws * ws - (1.0 - v) * ws

    def argmax(w, Z=None):
        w = _scalar(w)
        if w == 0.0 or Z is None:
            return np.zeros(1)
        return np.array([min(max(n * float(np.sum(Z)), -lam * n), lam * n)])

    def argmin(th, Z=None):
        t = _scalar(th)
        zbar = 0.0 if Z is None else float(np.mean(Z))
        c = t * t / (2 * n2) - zbar * t + 1.0
        return np.array([min(max(c, 0.0), 1.0)])

    b = lam / n + clamp
    ell = math.sqrt(1.0 + b * b)
    # L on W x B(0, 2 C_p + 1) with C_p = 0
    gw = 1.0 + 1.0 / (2 * n2) + clamp
    gt = 1.0 / n2 + clamp
    return MinimaxProblem(
        name="trunc-gauss",
        loss=loss, grad_w=grad_w, grad_theta=grad_theta, sampler=sampler,
        w_set=DecisionSet.interval(0.0, 1.0),
        theta_set=DecisionSet.interval(-lam * n, lam * n),
        closed_forms=ClosedForms(
            pop_risk=pop_risk, primal=primal, minimizer=minimizer, argmax=argmax,
            argmin=argmin, theta_quadratic=theta_quadratic,
            capacities={"Cp": 0.0, "Ce": lam * n, "Cpw": 1.0, "Cew": 1.0},
        ),
        constants=Constants(L=math.hypot(gw, gt), ell=ell, ell_tt=1.0 / n2,
                            L_theta_star=clamp, extra={"clamp": clamp}),
        params={"n": n, "lam": lam},
    )


# ---------------------------------------------------------------------------
# GDMax with constant primal-risk generalisation error


def make_gdmax_failure(n: int = 100) -> MinimaxProblem:
    """f(w, th; z) = (w/n^2 - z) th - th^2/(2 n^2), z uniform on {+-1/sqrt(n)}.

    W = [-n sqrt(n), n sqrt(n)], Theta = R.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    n2 = float(n) ** 2
    zabs = 1.0 / math.sqrt(n)
    wmax = n * math.sqrt(n)

    def sampler(rng, size):
        return zabs * (2.0 * rng.integers(0, 2, size=size) - 1.0)

    def loss(w, th, Z):
        w, t = _scalar(w), _scalar(th)
        return (w / n2 - Z) * t - t * t / (2 * n2)

    def grad_w(w, th, Z):
        t = _scalar(th)
        return np.full((len(Z), 1), t / n2)

    def grad_theta(w, th, Z):
        w, t = _scalar(w), _scalar(th)
        return (w / n2 - Z - t / n2)[:, None]

    def pop_risk(w, th):
        w, t = _scalar(w), _scalar(th)
        return (w / n2) * t - t * t / (2 * n2)

    def theta_quadratic(w, Z=None):
        zbar = 0.0 if Z is None else float(np.mean(Z))
        return -1.0 / (2 * n2), _scalar(w) / n2 - zbar, 0.0

    def primal(w, Z=None):
        zbar = 0.0 if Z is None else float(np.mean(Z))
        return 0.5 * n2 * (_scalar(w) / n2 - zbar) ** 2

    def minimizer(Z=None):
        ws = 0.0 if Z is None else n * float(np.sum(Z))
        ws = min(max(ws, -wmax), wmax)
        return np.array([ws]), primal(ws, Z)

    def argmax(w, Z=None):
        zbar = 0.0 if Z is None else float(np.mean(Z))
        return np.array([_scalar(w) - n2 * zbar])

    def argmin(th, Z=None):
        t = _scalar(th)
        return np.array([-wmax if t > 0 else (wmax if t < 0 else 0.0)])

    return MinimaxProblem(
        name="gdmax-failure",
        loss=loss, grad_w=grad_w, grad_theta=grad_theta, sampler=sampler,
        w_set=DecisionSet.interval(-wmax, wmax),
        theta_set=DecisionSet.whole(1),
        closed_forms=ClosedForms(
            pop_risk=pop_risk, primal=primal, minimizer=minimizer, argmax=argmax,
            argmin=argmin, theta_quadratic=theta_quadratic,
            capacities={"Cp": wmax, "Ce": 2 * wmax},
        ),
        # block-column Lipschitz bound of the constant Hessian [[0, 1], [1, -1]] / n^2;
        # L is the gradient bound along the best-response graph
        constants=Constants(L=2 * math.sqrt(2) / math.sqrt(n), ell=math.sqrt(2) / n2,
                            ell_tt=1.0 / n2, L_theta_star=None),
        params={"n": n},
    )


# ---------------------------------------------------------------------------
# adversarial training (max and expectation interchange)


def make_interchange_example(eps0: float = 0.25, support: int = 5,
                             w_bound: float = 2.0) -> MinimaxProblem:
    """Adversarial least squares over a finite sample support.

    A sample is an index k into the support points a_k; the adversary holds
    one perturbed copy th_k in [a_k - eps0, a_k + eps0] per support point and
    f(w, th; k) = (w - th_k)^2.  Each sample only sees its own coordinate so
    maximisation and expectation commute.
    """
    if eps0 < 0:
        raise ValueError("eps0 must be nonnegative")
    a = np.linspace(-1.0, 1.0, support) if support > 1 else np.zeros(1)
    K = a.size

    def sampler(rng, size):
        return rng.integers(0, K, size=size)

    def loss(w, th, Z):
        return (_scalar(w) - np.asarray(th)[Z]) ** 2

    def grad_w(w, th, Z):
        return (2.0 * (_scalar(w) - np.asarray(th)[Z]))[:, None]

    def grad_theta(w, th, Z):
        g = np.zeros((len(Z), K))
        g[np.arange(len(Z)), Z] = -2.0 * (_scalar(w) - np.asarray(th)[Z])
        return g

    def _points(Z):
        return a if Z is None else a[np.asarray(Z)]

    def pop_risk(w, th):
        return float(np.mean((_scalar(w) - np.asarray(th)) ** 2))

    def primal(w, Z=None):
        return float(np.mean((np.abs(_scalar(w) - _points(Z)) + eps0) ** 2))

    def minimizer(Z=None):
        pts = _points(Z)
        cands = [-w_bound, w_bound]
        knots = np.unique(np.concatenate([[-w_bound, w_bound], np.clip(pts, -w_bound, w_bound)]))
        for lo, hi in zip(knots[:-1], knots[1:]):
            mid = 0.5 * (lo + hi)
            s = np.sign(mid - pts)
            cands.append(min(max(float(np.mean(pts) - eps0 * np.mean(s)), lo), hi))
        cands.extend(knots.tolist())
        vals = [primal(c, Z) for c in cands]
        i = int(np.argmin(vals))
        return np.array([cands[i]]), vals[i]

    def argmax(w, Z=None):
        w = _scalar(w)
        lo, hi = a - eps0, a + eps0
        th = np.clip(0.0, lo, hi)  # unused coordinates: whole interval, take min-norm
        seen = np.zeros(K, bool)
        seen[np.unique(np.arange(K) if Z is None else np.asarray(Z))] = True
        far = np.where(w > a, lo, np.where(w < a, hi, np.where(np.abs(lo) <= np.abs(hi), lo, hi)))
        if eps0 == 0:
            far = a.copy()
        th = np.where(seen, far, th)
        return th

    def argmin(th, Z=None):
        th = np.asarray(th)
        m = float(np.mean(th if Z is None else th[np.asarray(Z)]))
        return np.array([min(max(m, -w_bound), w_bound)])

    wmax = w_bound + 1.0 + eps0
    return MinimaxProblem(
        name="interchange",
        loss=loss, grad_w=grad_w, grad_theta=grad_theta, sampler=sampler,
        w_set=DecisionSet.interval(-w_bound, w_bound),
        theta_set=DecisionSet.box(a - eps0, a + eps0),
        closed_forms=ClosedForms(pop_risk=pop_risk, primal=primal, minimizer=minimizer,
                                 argmax=argmax, argmin=argmin),
        constants=Constants(L=2 * math.sqrt(2) * wmax, ell=2 * math.sqrt(2), ell_tt=2.0,
                            extra={"L_bar": 2 * wmax}),
        params={"eps0": eps0, "support": support, "w_bound": w_bound},
        concave=False,
    )


# ---------------------------------------------------------------------------
# convex-concave quadratic saddle


def _random_psd(rng, d, floor, top=1.0):
    q, _ = np.linalg.qr(rng.normal(size=(d, d)))
    eig = rng.uniform(floor, top, size=d)
    return (q * eig) @ q.T


def quadratic_saddle(A, B, C, mu_w=None, mu_theta=None, sigma: float = 0.0,
                     sigma_coupling: float = 0.0, radius_w: Optional[float] = None,
                     radius_theta: Optional[float] = None, box: bool = False,
                     name: str = "quad-saddle") -> MinimaxProblem:
    """f = 1/2 w'Aw + w'(B + Z)th - 1/2 th'C th + z_w'w + z_th'th.

    z_w ~ mu_w + U[-sigma, sigma], z_th ~ mu_th + U[-sigma, sigma] and the
    coupling noise Z has iid U[-sigma_coupling, sigma_coupling] entries.
    Sets are balls (or boxes when ``box``) of the given radii, or the whole
    space when a radius is None.
    """
    A, B, C = (np.atleast_2d(np.asarray(x, dtype=float)) for x in (A, B, C))
    dw, dt = B.shape
    mu_w = np.zeros(dw) if mu_w is None else np.asarray(mu_w, dtype=float)
    mu_t = np.zeros(dt) if mu_theta is None else np.asarray(mu_theta, dtype=float)
    D = dw + dt + dw * dt

    def unpack(Z):
        Z = np.atleast_2d(Z)
        return Z[:, :dw], Z[:, dw:dw + dt], Z[:, dw + dt:].reshape(-1, dw, dt)

    def sampler(rng, size):
        out = np.empty((size, D))
        out[:, :dw] = mu_w + rng.uniform(-sigma, sigma, size=(size, dw))
        out[:, dw:dw + dt] = mu_t + rng.uniform(-sigma, sigma, size=(size, dt))
        out[:, dw + dt:] = rng.uniform(-sigma_coupling, sigma_coupling, size=(size, dw * dt))
        return out

    def loss(w, th, Z):
        zw, zt, Zc = unpack(Z)
        return (0.5 * w @ A @ w + w @ B @ th - 0.5 * th @ C @ th
                + np.einsum("i,nij,j->n", w, Zc, th) + zw @ w + zt @ th)

    def grad_w(w, th, Z):
        zw, zt, Zc = unpack(Z)
        return A @ w + B @ th + np.einsum("nij,j->ni", Zc, th) + zw

    def grad_theta(w, th, Z):
        zw, zt, Zc = unpack(Z)
        return B.T @ w - C @ th + np.einsum("i,nij->nj", w, Zc) + zt

    def saddle_quadratic(Z=None):
        if Z is None:
            return QuadForm(A, B, C, mu_w, mu_t)
        zw, zt, Zc = unpack(Z)
        return QuadForm(A, B + Zc.mean(axis=0), C, zw.mean(axis=0), zt.mean(axis=0))

    def pop_risk(w, th):
        return saddle_quadratic(None).value(np.asarray(w, float), np.asarray(th, float))

    def _set(d, r):
        if r is None:
            return DecisionSet.whole(d)
        if box:
            return DecisionSet.box(-r * np.ones(d), r * np.ones(d))
        return DecisionSet.ball(np.zeros(d), r)

    w_set, t_set = _set(dw, radius_w), _set(dt, radius_theta)
    nA, nC = np.linalg.norm(A, 2), np.linalg.norm(C, 2)
    kbar = np.linalg.norm(B, 2) + sigma_coupling * math.sqrt(dw * dt)
    ell = max(math.hypot(nA, kbar), math.hypot(kbar, nC))
    lin = float(np.linalg.norm(np.concatenate([np.abs(mu_w), np.abs(mu_t)]) + sigma))
    L = Lts = None
    if w_set.bounded and t_set.bounded:
        L = ell * (w_set.max_norm + t_set.max_norm) + lin
    extra = {"kbar": kbar, "lin": lin, "sigma": sigma, "sigma_coupling": sigma_coupling}
    if t_set.bounded:
        # theta-Lipschitz constant of f(w*, . ; z) on Theta, w* the population primal minimiser
        from .solvers import saddle_point  # local import: solvers depends on core only
        ws, _ = saddle_point(saddle_quadratic(None), w_set, t_set)
        Lts = kbar * float(np.linalg.norm(ws)) + nC * t_set.max_norm + float(
            np.linalg.norm(np.abs(mu_t) + sigma))
        extra["w_star"] = ws
    return MinimaxProblem(
        name=name, loss=loss, grad_w=grad_w, grad_theta=grad_theta, sampler=sampler,
        w_set=w_set, theta_set=t_set,
        closed_forms=ClosedForms(pop_risk=pop_risk, saddle_quadratic=saddle_quadratic),
        constants=Constants(L=L, ell=ell, ell_tt=nC if nC > 0 else None,
                            L_theta_star=Lts, extra=extra),
        params={"d_w": dw, "d_theta": dt, "A": A, "B": B, "C": C, "mu_w": mu_w,
                "mu_theta": mu_t, "radius_w": radius_w, "radius_theta": radius_theta},
        convex_concave=True,
    )


def make_quadratic_saddle(d_w: int = 2, d_theta: int = 2, seed: int = 0,
                          conditioning: float = 0.1, sigma: float = 0.5,
                          sigma_coupling: float = 0.1, radius_w: Optional[float] = 5.0,
                          radius_theta: Optional[float] = 5.0, coupling: float = 0.5,
                          box: bool = False) -> MinimaxProblem:
    """Random convex-concave quadratic with eigenvalues of A, C in [conditioning, 1]."""
    if d_w < 1 or d_theta < 1:
        raise ValueError("dimensions must be >= 1")
    if not 0 < conditioning <= 1:
        raise ValueError("conditioning floor must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    A = _random_psd(rng, d_w, conditioning)
    C = _random_psd(rng, d_theta, conditioning)
    B = coupling * rng.normal(size=(d_w, d_theta)) / math.sqrt(max(d_w, d_theta))
    mu_w = 0.5 * rng.normal(size=d_w)
    mu_t = 0.5 * rng.normal(size=d_theta)
    p = quadratic_saddle(A, B, C, mu_w, mu_t, sigma=sigma, sigma_coupling=sigma_coupling,
                         radius_w=radius_w, radius_theta=radius_theta, box=box)
    p.params.update(seed=seed, conditioning=conditioning)
    return p


def make_bilinear(bound: float = 1.0, noise: float = 0.0) -> MinimaxProblem:
    """f = w th (plus optional linear noise) on [-bound, bound]^2."""
    return quadratic_saddle([[0.0]], [[1.0]], [[0.0]], sigma=noise, radius_w=bound,
                            radius_theta=bound, box=True, name="bilinear")


# ---------------------------------------------------------------------------
# linear-discriminator GAN


def make_linear_gan(n: int = 64, m: Optional[int] = None, feature_seed: int = 0,
                    w_radius: float = 0.5) -> MinimaxProblem:
    """GAN with a linear discriminator D(x) = Phi(x)'v + b0 and log link.

    A sample is a pair of feature vectors (Phi(x), Phi(y)) with iid N(0, 1/m)
    entries; the generator shifts fake features, Phi(G_w(y)) = Phi(y) + w, so
    w* = 0 reproduces the real distribution.  theta = (v, b0).
    """
    m = 4 * n if m is None else m
    if m <= 2 * n:
        raise ValueError("linear GAN needs m > 2n for a full-column-rank feature matrix")
    scale = 1.0 / math.sqrt(m)

    def sampler(rng, size):
        return rng.normal(0.0, scale, size=(size, 2, m))

    def _parts(w, th, Z):
        Z = np.asarray(Z)
        v, b0 = np.asarray(th[:m]), float(th[m])
        fake = Z[:, 1, :] + np.asarray(w)
        return Z[:, 0, :], fake, v, b0, Z[:, 0, :] @ v + b0, fake @ v + b0

    def loss(w, th, Z):
        _, _, _, _, dr, df = _parts(w, th, Z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(dr > 0, np.log(np.where(dr > 0, dr, 1.0)), -np.inf)
            out = out + np.where(df < 1, np.log(np.where(df < 1, 1 - df, 1.0)), -np.inf)
        return out

    def grad_w(w, th, Z):
        _, _, v, _, _, df = _parts(w, th, Z)
        return -v[None, :] / (1 - df)[:, None]

    def grad_theta(w, th, Z):
        real, fake, _, _, dr, df = _parts(w, th, Z)
        gv = real / dr[:, None] - fake / (1 - df)[:, None]
        gb = 1 / dr - 1 / (1 - df)
        return np.concatenate([gv, gb[:, None]], axis=1)

    # Gaussian features are unbounded, so any v != 0 puts D outside (0, 1) with
    # positive probability; the population value is finite only for v = 0.
    def pop_risk(w, th):
        v, b0 = np.asarray(th[:m]), float(th[m])
        if np.any(v != 0) or not 0 < b0 < 1:
            return -np.inf
        return math.log(b0) + math.log(1 - b0)

    def argmax(w, Z=None):
        if Z is None:
            return np.concatenate([np.zeros(m), [0.5]])
        v = gan_min_norm_discriminator(Z, w)
        return np.concatenate([v, [0.5]])

    def primal(w, Z=None):
        if Z is None:
            return -2 * math.log(2)
        gan_min_norm_discriminator(Z, w)  # raises when no perfect separator exists
        return 0.0

    def minimizer(Z=None):
        w = np.zeros(m)
        return w, primal(w, Z)

    return MinimaxProblem(
        name="linear-gan", loss=loss, grad_w=grad_w, grad_theta=grad_theta, sampler=sampler,
        w_set=DecisionSet.ball(np.zeros(m), w_radius),
        theta_set=DecisionSet.whole(m + 1),
        closed_forms=ClosedForms(pop_risk=pop_risk, primal=primal, minimizer=minimizer, argmax=argmax,
                                 capacities={"Cp": 0.5}),
        constants=Constants(),
        params={"n": n, "m": m, "feature_seed": feature_seed},
        concave=True,
    )


def gan_labels(n: int, b0: float = 0.5) -> np.ndarray:
    """u - b0 e with u = (1,...,1, 0,...,0) in R^{2n}."""
    u = np.concatenate([np.ones(n), np.zeros(n)])
    return u - b0


def gan_min_norm_discriminator(Z, w=None, b0: float = 0.5) -> np.ndarray:
    """Min-norm v with Q_S' v = u - b0 e (perfect separation of the two samples)."""
    Z = np.asarray(Z)
    n, m = Z.shape[0], Z.shape[2]
    fake = Z[:, 1, :] + (0.0 if w is None else np.asarray(w))
    Q = np.concatenate([Z[:, 0, :], fake], axis=0).T  # m x 2n
    if np.linalg.matrix_rank(Q) < 2 * n:
        raise np.linalg.LinAlgError("feature matrix Q_S is rank deficient; resample features")
    v, *_ = np.linalg.lstsq(Q.T, gan_labels(n, b0), rcond=None)
    return v


def gan_capacity_probe(n: int, m: Optional[int] = None, seed: int = 0) -> dict:
    """Norm of the empirical best-response discriminator at w* versus C_p."""
    from .core import sample_dataset

    prob = make_linear_gan(n, m, feature_seed=seed)
    d = sample_dataset(prob, n, seed)
    theta = prob.closed_forms.argmax(np.zeros(prob.d_w), d.samples)
    return {
        "n": n, "m": prob.params["m"],
        "theta_norm": float(np.linalg.norm(theta)),
        "v_norm": float(np.linalg.norm(theta[:-1])),
        "label_norm": float(np.linalg.norm(gan_labels(n))),
        "Cp_point_norm": 0.5,
    }


# ---------------------------------------------------------------------------

REGISTRY = {
    "trunc-gauss": make_truncated_gaussian,
    "gdmax-failure": make_gdmax_failure,
    "interchange": make_interchange_example,
    "linear-gan": make_linear_gan,
    "quad-saddle": make_quadratic_saddle,
    "bilinear": make_bilinear,
}


def make_problem(name: str, **params) -> MinimaxProblem:
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; choose from {sorted(REGISTRY)}") from None
    return factory(**params)
