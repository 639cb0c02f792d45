"""Closed-form generalisation bounds evaluated from a ledger of problem constants."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, fields
from typing import Callable, Optional, Union

from .core import Estimate


class MissingBoundInput(ValueError):
    """A bound needs a constant that was not supplied."""


@dataclass(frozen=True)
class BoundInputs:
    """Constants feeding the bound formulas; ``None`` means not available.

    ``L`` is the Lipschitz constant on whatever set the caller deems relevant
    (for the GDA bounds, the set visited by the theta iterates).  ``L_bar`` is
    the Lipschitz constant of the per-sample max loss used in the
    interchangeable case.
    """

    L: Optional[float] = None
    ell: Optional[float] = None
    ell_tt: Optional[float] = None
    mu: Optional[float] = None
    Cp: Optional[float] = None
    Ce: Optional[float] = None
    Cpw: Optional[float] = None
    Cew: Optional[float] = None
    L_theta_star: Optional[float] = None
    M_W: Optional[float] = None
    L0: Optional[float] = None
    c0: Optional[float] = None
    n: Optional[float] = None
    T: Optional[float] = None
    eps: Optional[float] = None
    lambda_p: Optional[float] = None
    lambda_e: Optional[float] = None
    gamma: Optional[float] = None
    delta: Optional[float] = None
    L_bar: Optional[float] = None

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                v = float(v)
                if not v >= 0:
                    raise ValueError(f"{f.name} must be nonnegative, got {v}")
                object.__setattr__(self, f.name, v)
        if self.n is not None and self.n == 0:
            raise ValueError("n must be positive")

    def need(self, *names) -> tuple:
        missing = [k for k in names if getattr(self, k) is None]
        if missing:
            raise MissingBoundInput(f"missing bound input(s): {', '.join(missing)}")
        return tuple(getattr(self, k) for k in names)

    @property
    def kappa(self) -> Optional[float]:
        if self.mu is None or self.mu == 0 or self.L is None:
            return None
        return self.L / self.mu

    def replace(self, **kw) -> "BoundInputs":
        return BoundInputs(**{**asdict(self), **kw})

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# nonconvex-concave


def bound_primal_risk_ncc(b: BoundInputs) -> float:
    """sqrt(4 L ell Cp^2) sqrt(eps) + eps L."""
    L, ell, Cp, eps = b.need("L", "ell", "Cp", "eps")
    return math.sqrt(4 * L * ell * Cp * Cp) * math.sqrt(eps) + eps * L


def ncc_s_objective(b: BoundInputs, s: float) -> float:
    """eps L s ell/ell_tt + ell_tt Cp^2/s + eps L, minimised over s > 0 by the closed form."""
    L, ell, ell_tt, Cp, eps = b.need("L", "ell", "ell_tt", "Cp", "eps")
    if not s > 0:
        raise ValueError("s must be positive")
    return eps * L * s * ell / ell_tt + ell_tt * Cp * Cp / s + eps * L


def ncc_optimal_s(b: BoundInputs) -> float:
    L, ell, ell_tt, Cp, eps = b.need("L", "ell", "ell_tt", "Cp", "eps")
    if eps * L * ell == 0:
        return math.inf
    return ell_tt * Cp / math.sqrt(eps * L * ell)


def bound_min_gap(b: BoundInputs) -> float:
    """4 L_theta* Ce / sqrt(n)."""
    Lts, Ce, n = b.need("L_theta_star", "Ce", "n")
    return 4 * Lts * Ce / math.sqrt(n)


def bound_primal_gap_ncc(b: BoundInputs) -> float:
    return bound_primal_risk_ncc(b) + bound_min_gap(b)


def bound_interchange(b: BoundInputs) -> float:
    """L_bar eps for problems where max and expectation commute."""
    L_bar, eps = b.need("L_bar", "eps")
    return L_bar * eps


# ---------------------------------------------------------------------------
# convex-concave primal-dual risk


def bound_pd_cc(b: BoundInputs) -> float:
    """(sqrt(4 L ell Cp^2) + sqrt(4 L ell Cpw^2)) sqrt(eps) + 2 eps L."""
    L, ell, Cp, Cpw, eps = b.need("L", "ell", "Cp", "Cpw", "eps")
    return (math.sqrt(4 * L * ell * Cp * Cp) + math.sqrt(4 * L * ell * Cpw * Cpw)) * math.sqrt(eps) + 2 * eps * L


# ---------------------------------------------------------------------------
# nonconvex-nonconcave with oracles


def bound_ncnc(b: BoundInputs) -> dict:
    L, lp, le, eps, n = b.need("L", "lambda_p", "lambda_e", "eps", "n")
    primal = L * eps + math.sqrt(L * lp) * math.sqrt(eps)
    return {"primal": primal, "gap": primal + math.sqrt(L * le) / math.sqrt(n)}


# ---------------------------------------------------------------------------
# GDA


def _growth(b: BoundInputs) -> float:
    T, c0, ell = b.need("T", "c0", "ell")
    return T ** (c0 * ell)


def bound_gda_stability(b: BoundInputs) -> float:
    """2 L T^(c0 ell) / (n ell)."""
    L, ell, n = b.need("L", "ell", "n")
    return 2 * L * _growth(b) / (n * ell)


def bound_gda_iterate_norm(b: BoundInputs) -> float:
    """T^(c0 ell) L0 / ell."""
    L0, ell = b.need("L0", "ell")
    return _growth(b) * L0 / ell


def bound_gda_gen(b: BoundInputs) -> float:
    """L^(3/2) sqrt(8 Cp^2/ell) sqrt(T^(c0 ell)/n) + 2 L^2 T^(c0 ell)/(n ell)."""
    L, Cp, ell, n = b.need("L", "Cp", "ell", "n")
    g = _growth(b)
    return L ** 1.5 * math.sqrt(8 * Cp * Cp / ell) * math.sqrt(g / n) + 2 * L * L * g / (n * ell)


def bound_populated_primal_gap(b: BoundInputs, phi: Optional[Callable[[float], float]],
                               psi: Optional[Callable[[float], float]], Ce_restricted: float,
                               delta: float, zeta_p: Union[float, Estimate]) -> dict:
    """Optimisation + min-gap + primal-risk generalisation + restriction-failure terms."""
    if phi is None or psi is None:
        raise MissingBoundInput("convergence rate functions phi and psi must be declared")
    M_W, T = b.need("M_W", "T")
    Lts, n = b.need("L_theta_star", "n")
    zeta = zeta_p.mean if isinstance(zeta_p, Estimate) else float(zeta_p)
    terms = {
        "optimization": (phi(M_W) + phi(Ce_restricted)) / psi(T),
        "min_gap": 4 * Lts * Ce_restricted / math.sqrt(n),
        "zeta_p": zeta,
        "delta": float(delta),
    }
    terms["total"] = sum(terms.values())
    return terms


# ---------------------------------------------------------------------------
# proximal point


def bound_ppa(b: BoundInputs, c1: float = 1.0, c2: float = 1.0) -> dict:
    """gen = c1 sqrt(T/n) + c2 T/n (declared multipliers), rate = ell (Ce^2 + Cew^2)/T."""
    T, n, ell, Ce, Cew = b.need("T", "n", "ell", "Ce", "Cew")
    if T == 0:
        raise ValueError("T must be positive")
    gen = c1 * math.sqrt(T / n) + c2 * T / n
    rate = ell * (Ce * Ce + Cew * Cew) / T
    return {"gen": gen, "rate": rate, "population": rate + gen,
            "multipliers": {"c1": c1, "c2": c2}, "multipliers_declared": True}


# ---------------------------------------------------------------------------
# strongly concave baselines


def bound_strongly_concave(b: BoundInputs) -> dict:
    L, eps, mu = b.need("L", "eps", "mu")
    if mu == 0:
        raise ValueError("strong-concavity modulus mu is 0; kappa-based bounds are undefined")
    k = L / mu
    return {"farnia": L * math.sqrt(k * k + 1) * eps,
            "lei_primal": L * (1 + k) * eps,
            "lei_pd": math.sqrt(2) * L * (1 + k) * eps}


# ---------------------------------------------------------------------------
# report


TABLE_ROWS = [
    # (bound name, location tag, evaluator)
    ("sc-primal-risk (farnia)", "sc/primal-risk", lambda b: bound_strongly_concave(b)["farnia"]),
    ("sc-primal-risk (lei)", "sc/primal-risk", lambda b: bound_strongly_concave(b)["lei_primal"]),
    ("sc-pd-risk (lei)", "sc/pd-risk", lambda b: bound_strongly_concave(b)["lei_pd"]),
    ("nc-c primal risk", "nc-c/primal-risk", bound_primal_risk_ncc),
    ("nc-c primal gap", "nc-c/primal-gap", bound_primal_gap_ncc),
    ("c-c pd risk", "c-c/pd-risk", bound_pd_cc),
    ("nc-nc primal risk", "nc-nc/primal-risk", lambda b: bound_ncnc(b)["primal"]),
    ("nc-nc primal gap", "nc-nc/primal-gap", lambda b: bound_ncnc(b)["gap"]),
    ("interchange primal risk", "interchange/primal-risk", bound_interchange),
    ("min gap", "nc-c/min-gap", bound_min_gap),
    ("gda stability", "gda/stability", bound_gda_stability),
    ("gda iterate norm", "gda/iterate-norm", bound_gda_iterate_norm),
    ("gda primal risk", "gda/primal-risk", bound_gda_gen),
    ("ppa gen", "ppa/pd-gen", lambda b: bound_ppa(b)["gen"]),
    ("ppa rate", "ppa/pd-rate", lambda b: bound_ppa(b)["rate"]),
    ("ppa population", "ppa/pd-population", lambda b: bound_ppa(b)["population"]),
]


def table1_report(b: BoundInputs) -> list:
    """One row per bound: value, or ``n/a (...)`` naming what is missing or undefined."""
    rows = []
    digest = b.digest()
    for name, loc, fn in TABLE_ROWS:
        try:
            value = fn(b)
        except MissingBoundInput as e:
            value = f"n/a ({str(e).split(': ', 1)[-1]})"
        except ValueError as e:
            value = f"n/a ({e})"
        rows.append({"bound_name": name, "paper_location": loc, "inputs_digest": digest, "value": value})
    return rows


def min_gap_display_note(b: BoundInputs, lam: float) -> dict:
    """Min-gap term for the truncated-Gaussian constants next to the shortcut 4 log n."""
    n, = b.need("n")
    return {"formula": bound_min_gap(b), "four_lambda_sq_log_n": 4 * lam * lam * math.log(n),
            "four_log_n_shortcut": 4 * math.log(n)}
