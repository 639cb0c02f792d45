"""Named experiments, configuration, output files and the command-line entry point."""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__
from .algorithms import AlgoConfig, averaged_points, gradient_norm_at_origin, run_algorithm, run_gda
from .bounds import (BoundInputs, bound_gda_iterate_norm, bound_gda_stability, bound_min_gap,
                     bound_ppa, min_gap_display_note, table1_report)
from .core import Estimate, sample_dataset
from .metrics import (McSpec, estimate_capacity, map_trials, pd_risk, primal_trials,
                      stability_distances)
from .problems import (gan_capacity_probe, make_gdmax_failure, make_interchange_example,
                       make_quadratic_saddle, make_truncated_gaussian)
from .solvers import (AscentSchedule, approx_maximizer, exact_inner_max, min_norm_argmax,
                      min_norm_argmin, primal_risk, risk)


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    """Flat, serialisable experiment configuration.

    ``trials``/``n``/``T`` left as ``None`` take the experiment's defaults;
    ``params`` carries experiment-specific keys.
    """

    experiment: str = "example31"
    trials: Optional[int] = None
    n: Optional[int] = None
    T: Optional[int] = None
    seed: int = 0
    threads: int = 1
    out: str = "results"
    params: dict = field(default_factory=dict)

    def canonical(self) -> dict:
        """Configuration fields that determine the numbers (not threads or output path)."""
        d = asdict(self)
        d.pop("threads")
        d.pop("out")
        return d

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def get(self, key, default):
        return self.params.get(key, default)


def load_config(path) -> dict:
    """Read a flat JSON object of key/value pairs."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    for k, v in data.items():
        if isinstance(v, dict):
            raise ValueError(f"config key {k!r}: nested objects are not allowed")
    return data


def make_config(values: dict) -> ExperimentConfig:
    names = {f.name for f in fields(ExperimentConfig)} - {"params"}
    known = {k: v for k, v in values.items() if k in names and v is not None}
    params = {k: v for k, v in values.items() if k not in names and v is not None}
    params.update(values.get("params") or {})
    return ExperimentConfig(**known, params=params)


# ---------------------------------------------------------------------------
# results


@dataclass
class ExperimentResult:
    rows: list = field(default_factory=list)          # (metric, trial, value, n, T)
    aggregates: dict = field(default_factory=dict)    # metric -> (Estimate, n, T)
    checks: dict = field(default_factory=dict)        # name -> bool
    info: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)        # file stem -> (header, rows)

    def add_trials(self, metric: str, values, n, T, seed) -> Estimate:
        values = np.asarray(values, dtype=float)
        for i, v in enumerate(values):
            self.rows.append((metric, i, float(v), n, T))
        est = Estimate.from_values(values, seed)
        self.aggregates[metric] = (est, n, T)
        return est

    def add_value(self, metric: str, value: float, n, T, seed) -> None:
        self.rows.append((metric, 0, float(value), n, T))
        self.aggregates[metric] = (Estimate(float(value), 0.0, 1, seed), n, T)


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return "" if x is None else str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(format(x, ".17g")) if math.isfinite(x) else str(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


# ---------------------------------------------------------------------------
# experiments


def _mc(cfg: ExperimentConfig, trials: int, n: int) -> McSpec:
    return McSpec(trials=trials, n=n, master_seed=cfg.seed, threads=cfg.threads)


def exp_example31(cfg: ExperimentConfig) -> ExperimentResult:
    """Truncated-Gaussian constants at the empirical minimiser."""
    n, M = cfg.n or 100, cfg.trials or 5000
    lam = float(cfg.get("lam", 4.0))
    prob = make_truncated_gaussian(n, lam)
    mc = _mc(cfg, M, n)
    res = ExperimentResult()
    s = map_trials(lambda t: float(np.sum(sample_dataset(prob, n, mc.seed(t)).samples)), mc)
    a = np.abs(np.asarray(s))
    p05 = res.add_trials("prob_sum_in_[0.5,lam]", (a >= 0.5) & (a <= lam), n, 0, cfg.seed)
    p2 = res.add_trials("prob_sum_in_[2,lam]", (a >= 2) & (a <= lam), n, 0, cfg.seed)
    pt = primal_trials(prob, None, mc)
    gap = res.add_trials("population_gap_at_erm", pt.gap, n, 0, cfg.seed)
    pme = res.add_trials("primal_min_error", pt.primal_min_error, n, 0, cfg.seed)
    zp = res.add_trials("gen_error_primal_risk", pt.gen_primal, n, 0, cfg.seed)
    res.checks = {
        "prob_[0.5,lam] > 0.40": p05.mean > 0.40 - 2 * p05.std_error,
        "prob_[2,lam] > 0.01": p2.mean > 0.01 - 2 * p2.std_error,
        "population_gap >= 0.02": gap.mean >= 0.02 - 2 * gap.std_error,
        "primal_min_error >= 0.005": pme.mean >= 0.005 - 2 * pme.std_error,
        "gen_error_primal_risk <= 0": zp.mean <= 2 * zp.std_error,
    }
    return res


def exp_example41(cfg: ExperimentConfig) -> ExperimentResult:
    """One GDMax step on the constant-gap example for several n."""
    ns = cfg.get("ns", [cfg.n] if cfg.n else [25, 100])
    M = cfg.trials or 2000
    res = ExperimentResult()
    for n in ns:
        prob = make_gdmax_failure(n)
        algo = AlgoConfig("gdmax", T=1, alpha0=float(n) ** 2)
        pt = primal_trials(prob, algo, _mc(cfg, M, n))
        z = res.add_trials(f"gen_error_primal_risk[n={n}]", pt.gen_primal, n, 1, cfg.seed)
        res.add_trials(f"empirical_primal_risk[n={n}]", pt.r_S, n, 1, cfg.seed)
        res.checks[f"zeta_P in [0.45,0.55] (n={n})"] = 0.45 <= z.mean <= 0.55
        res.checks[f"r_S(w_S) == 0 every trial (n={n})"] = bool(np.max(np.abs(pt.r_S)) <= 1e-9)
    return res


def exp_gda_vs_gdmax(cfg: ExperimentConfig) -> ExperimentResult:
    """Population gap decomposition after one step of GDA and of GDMax (stepsize 1)."""
    n, M = cfg.n or 100, cfg.trials or 5000
    lam = float(cfg.get("lam", 4.0))
    steps = cfg.T or 1
    prob = make_truncated_gaussian(n, lam)
    mc = _mc(cfg, M, n)
    res = ExperimentResult()
    gaps = {}
    for kind in ("gda", "gdmax"):
        pt = primal_trials(prob, AlgoConfig(kind, T=steps, alpha0=1.0), mc)
        gaps[kind] = pt.gap
        res.add_trials(f"{kind}:population_gap", pt.gap, n, steps, cfg.seed)
        res.add_trials(f"{kind}:empirical_gap", pt.gap_S, n, steps, cfg.seed)
        res.add_trials(f"{kind}:gen_error_primal_risk", pt.gen_primal, n, steps, cfg.seed)
        res.add_trials(f"{kind}:primal_min_error", pt.primal_min_error, n, steps, cfg.seed)
    diff = res.add_trials("gap_difference_gdmax_minus_gda", gaps["gdmax"] - gaps["gda"], n, steps, cfg.seed)
    c = prob.constants
    b = BoundInputs(L_theta_star=c.L_theta_star, Ce=prob.closed_forms.capacities["Ce"], n=n)
    note = min_gap_display_note(b, lam)
    res.add_value("min_gap_term", bound_min_gap(b), n, steps, cfg.seed)
    res.info["min_gap"] = note
    res.checks["gdmax gap exceeds gda gap by >= 0.001"] = diff.mean >= 0.001
    return res


def _stability_bound(prob, algo: AlgoConfig, n: int) -> float:
    c = prob.constants
    return bound_gda_stability(BoundInputs(L=c.L, ell=c.ell, n=n, T=algo.T, c0=algo.c0))


def exp_stability_scan(cfg: ExperimentConfig) -> ExperimentResult:
    """Measured GDA stability on a quadratic saddle against the 2 L T^(c0 ell)/(n ell) bound."""
    ns = cfg.get("ns", [50, 100, 200])
    Ts = cfg.get("Ts", [5, 10, 20])
    M = cfg.trials or 300
    prob = make_quadratic_saddle(int(cfg.get("d_w", 2)), int(cfg.get("d_theta", 2)),
                                 seed=int(cfg.get("instance_seed", 0)))
    c0 = float(cfg.get("c0", 0.25 / prob.constants.ell))
    res = ExperimentResult()
    table = {}
    for T in Ts:
        algo = AlgoConfig("gda", T=T, alpha0=c0, beta0=c0, schedule="diminishing")
        for n in ns:
            dist = stability_distances(prob, algo, n, _mc(cfg, M, n))
            est = res.add_trials(f"stability_joint[n={n},T={T}]", dist[:, 2], n, T, cfg.seed)
            bound = _stability_bound(prob, algo, n)
            res.add_value(f"stability_bound[n={n},T={T}]", bound, n, T, cfg.seed)
            table[(n, T)] = est.mean
            res.checks[f"eps <= bound (n={n},T={T})"] = est.mean <= bound
    for T in Ts:
        for n1, n2 in zip(ns[:-1], ns[1:]):
            if n2 == 2 * n1:
                ratio = table[(n2, T)] / table[(n1, T)]
                res.add_value(f"doubling_ratio[n={n1}->{n2},T={T}]", ratio, n2, T, cfg.seed)
                res.checks[f"doubling ratio in [0.35,0.65] (n={n1},T={T})"] = 0.35 <= ratio <= 0.65
    res.info["c0"] = c0
    return res


def ppa_rate_curve(prob, d, T: int) -> tuple:
    """(empirical PD gap at averaged iterates, rate bound from realised best-response norms)."""
    ell = prob.constants.ell
    traj = run_algorithm(prob, d, AlgoConfig("ppa", T=T, prox_step=1.0 / (2 * ell)))
    gaps, bounds = [], []
    for t, p in enumerate(averaged_points(traj), start=1):
        th_best = min_norm_argmax(prob, d, p.w)
        w_best, _ = min_norm_argmin(prob, d, p.theta)
        gaps.append(pd_risk(prob, d, p))
        bounds.append(ell * (float(th_best @ th_best) + float(w_best @ w_best)) / t)
    return np.array(gaps), np.array(bounds)


def exp_ppa_rate(cfg: ExperimentConfig) -> ExperimentResult:
    """Empirical PD gap of averaged PPA iterates against ell (Ce^2 + Cew^2)/T."""
    instances = cfg.trials or 10
    n, T = cfg.n or 50, cfg.T or 200
    res = ExperimentResult()
    worst_ratio, min_gap = 0.0, math.inf
    for k in range(instances):
        prob = make_quadratic_saddle(int(cfg.get("d_w", 3)), int(cfg.get("d_theta", 2)),
                                     seed=cfg.seed * 1000 + k, radius_w=2.0, radius_theta=2.0)
        d = sample_dataset(prob, n, cfg.seed * 1000 + k)
        gaps, bounds = ppa_rate_curve(prob, d, T)
        for t in (1, 10, 50, T):
            if t <= T:
                res.add_value(f"pd_gap[instance={k},T={t}]", gaps[t - 1], n, t, cfg.seed)
                res.add_value(f"rate_bound[instance={k},T={t}]", bounds[t - 1], n, t, cfg.seed)
        worst_ratio = max(worst_ratio, float(np.max(gaps / bounds)))
        min_gap = min(min_gap, float(np.min(gaps)))
    res.add_value("max_gap_to_bound_ratio", worst_ratio, n, T, cfg.seed)
    res.add_value("min_pd_gap", min_gap, n, T, cfg.seed)
    res.checks["pd gap <= rate bound for all T"] = worst_ratio <= 1.0
    res.checks["pd gap nonnegative"] = min_gap >= -1e-12
    return res


def exp_gan_capacity(cfg: ExperimentConfig) -> ExperimentResult:
    """Growth of the empirical best-response discriminator norm with n (m = 4n)."""
    ns = cfg.get("ns", [16, 32, 64, 128, 256, 512])
    reps = cfg.trials or 3
    res = ExperimentResult()
    means, label_ok = [], True
    for n in ns:
        norms = []
        for r in range(reps):
            out = gan_capacity_probe(n, 4 * n, seed=cfg.seed * 100_003 + 1000 * r + n)
            norms.append(out["theta_norm"])
            label_ok &= math.isclose(out["label_norm"], math.sqrt(2 * n) / 2, rel_tol=1e-12)
        est = res.add_trials(f"theta_norm[n={n}]", norms, n, 0, cfg.seed) if reps >= 2 else None
        means.append(float(np.mean(norms)) if est is None else est.mean)
    slope = float(np.polyfit(np.log(ns), np.log(means), 1)[0])
    res.add_value("loglog_slope", slope, 0, 0, cfg.seed)
    res.add_value("population_capacity_point_norm", 0.5, 0, 0, cfg.seed)
    res.checks["slope in [0.35,0.65]"] = 0.35 <= slope <= 0.65
    res.checks["label norm == sqrt(2n)/2"] = bool(label_ok)
    return res


def exp_bounds_report(cfg: ExperimentConfig) -> ExperimentResult:
    """Evaluate every bound on the declared truncated-Gaussian and quadratic-saddle constants."""
    n = cfg.n or 100
    lam = float(cfg.get("lam", 4.0))
    eps = float(cfg.get("eps", 0.01))
    T = cfg.T or 10
    res = ExperimentResult()
    tg = make_truncated_gaussian(n, lam)
    c, cap = tg.constants, tg.closed_forms.capacities
    qs = make_quadratic_saddle(2, 2, seed=0)
    cq = qs.constants
    mc = _mc(cfg, 2, n)
    qcap = {k: estimate_capacity(qs, k, mc).mean for k in ("Cp", "Ce", "Cpw", "Cew")}
    ie = make_interchange_example()
    ledgers = {
        "trunc-gauss": BoundInputs(L=c.L, ell=c.ell, ell_tt=c.ell_tt, Cp=cap["Cp"], Ce=cap["Ce"],
                                   Cpw=cap["Cpw"], Cew=cap["Cew"], L_theta_star=c.L_theta_star,
                                   n=n, T=T, eps=eps, c0=0.5, L0=1.0, M_W=1.0),
        "quad-saddle": BoundInputs(L=cq.L, ell=cq.ell, ell_tt=cq.ell_tt, Cp=qcap["Cp"], Ce=qcap["Ce"],
                                   Cpw=qcap["Cpw"], Cew=qcap["Cew"], L_theta_star=cq.L_theta_star,
                                   n=n, T=T, eps=eps, c0=0.25 / cq.ell, L0=cq.extra["lin"],
                                   M_W=qs.w_set.max_norm),
        "interchange": BoundInputs(L_bar=ie.constants.extra["L_bar"], eps=eps),
    }
    header = ["ledger", "bound_name", "paper_location", "inputs_digest", "value"]
    rows = []
    for name, b in ledgers.items():
        for r in table1_report(b):
            rows.append([name, r["bound_name"], r["paper_location"], r["inputs_digest"], r["value"]])
            if isinstance(r["value"], float):
                res.add_value(f"{name}:{r['bound_name']}", r["value"], n, T, cfg.seed)
    note = min_gap_display_note(ledgers["trunc-gauss"], lam)
    res.info["min_gap"] = note
    res.add_value("trunc-gauss:min_gap_4_lambda_sq_log_n", note["four_lambda_sq_log_n"], n, T, cfg.seed)
    res.add_value("trunc-gauss:min_gap_4_log_n_shortcut", note["four_log_n_shortcut"], n, T, cfg.seed)
    res.tables["bounds"] = (header, rows)
    res.checks["min gap formula equals 4 lambda^2 log n"] = math.isclose(
        note["formula"], note["four_lambda_sq_log_n"], rel_tol=1e-12)
    return res


def lemma_suite_counts(instances: int = 100, seed: int = 0, s_values=(1, 2, 5, 10, 20),
                       pairs: int = 5, n: int = 20, slack: float = 1e-9) -> dict:
    """Violation counts of the approximate-maximiser and iterate-envelope inequalities."""
    rng = np.random.default_rng(seed)
    counts = {"lipschitz": 0, "suboptimality": 0, "neighbour": 0, "envelope": 0, "checked": 0}
    for k in range(instances):
        dw, dt = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        prob = make_quadratic_saddle(dw, dt, seed=seed * 7919 + k, conditioning=0.05 + 0.5 * rng.random(),
                                     radius_w=float(rng.uniform(0.5, 3)), radius_theta=float(rng.uniform(0.5, 3)))
        c = prob.constants
        for s in s_values:
            sched = AscentSchedule("constant", None, s)
            for _ in range(pairs):
                w1, w2 = prob.w_set.sample(rng, 2)
                t1 = approx_maximizer(prob, None, w1, sched)
                t2 = approx_maximizer(prob, None, w2, sched)
                counts["lipschitz"] += np.linalg.norm(t1 - t2) > s * c.ell / c.ell_tt * np.linalg.norm(w1 - w2) + slack
                th_star = min_norm_argmax(prob, None, w1)
                sub = primal_risk(prob, None, w1) - risk(prob, None, w1, t1)
                counts["suboptimality"] += sub > c.ell_tt * float(th_star @ th_star) / s + slack
                counts["checked"] += 1
            d = sample_dataset(prob, n, seed * 7919 + k)
            i = int(rng.integers(0, n))
            d2 = d.replace(i, prob.sampler(rng, 1)[0])
            ws = c.extra["w_star"]
            diff = np.linalg.norm(approx_maximizer(prob, d, ws, sched) - approx_maximizer(prob, d2, ws, sched))
            counts["neighbour"] += diff > 2 * s * c.L_theta_star / (n * c.ell_tt) + slack
        for T in (5, 20, 100):
            algo = AlgoConfig("gda", T=T, alpha0=0.25 / c.ell, schedule="diminishing")
            d = sample_dataset(prob, n, seed * 7919 + k + 1)
            env = run_gda(prob, d, algo).theta_norm_envelope
            bound = bound_gda_iterate_norm(BoundInputs(T=T, c0=algo.c0, ell=c.ell,
                                                       L0=gradient_norm_at_origin(prob, d)))
            counts["envelope"] += env > bound + slack
    return {k: int(v) for k, v in counts.items()}


def exp_lemma_suites(cfg: ExperimentConfig) -> ExperimentResult:
    """Batch run of the approximate-maximiser and envelope property suites."""
    counts = lemma_suite_counts(cfg.trials or 100, cfg.seed)
    res = ExperimentResult()
    for k, v in counts.items():
        res.add_value(f"violations:{k}" if k != "checked" else "pairs_checked", v, 0, 0, cfg.seed)
        if k != "checked":
            res.checks[f"no {k} violations"] = v == 0
    return res


EXPERIMENTS: dict = {
    "example31": exp_example31,
    "example41": exp_example41,
    "gda-vs-gdmax": exp_gda_vs_gdmax,
    "stability-scan": exp_stability_scan,
    "ppa-rate": exp_ppa_rate,
    "gan-capacity": exp_gan_capacity,
    "bounds-report": exp_bounds_report,
    "lemma-suites": exp_lemma_suites,
}


# ---------------------------------------------------------------------------
# running and writing


RESULT_COLUMNS = ["experiment", "metric", "trial", "value", "n", "T", "seed", "config_digest"]


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> tuple:
    """Run a named experiment; returns (result, paths written)."""
    try:
        fn: Callable = EXPERIMENTS[cfg.experiment]
    except KeyError:
        raise KeyError(f"unknown experiment {cfg.experiment!r}; choose from {sorted(EXPERIMENTS)}") from None
    t0 = time.perf_counter()
    result = fn(cfg)
    wall = time.perf_counter() - t0
    if not write:
        return result, {}
    return result, write_outputs(cfg, result, wall)


def write_outputs(cfg: ExperimentConfig, result: ExperimentResult, wall: float) -> dict:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    digest = cfg.digest()
    stem = cfg.experiment
    paths = {"results": out / f"{stem}.csv", "summary": out / f"{stem}.summary.json",
             "manifest": out / f"{stem}.manifest.json"}
    with open(paths["results"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for metric, trial, value, n, T in result.rows:
            w.writerow([stem, metric, trial, fmt(value), n, T, cfg.seed, digest])
        for metric, (est, n, T) in result.aggregates.items():
            w.writerow([stem, metric, "mean", fmt(est.mean), n, T, cfg.seed, digest])
            w.writerow([stem, metric, "std_error", fmt(est.std_error), n, T, cfg.seed, digest])
    summary = {
        "experiment": stem,
        "config_digest": digest,
        "estimates": [{"metric": m, "mean": e.mean, "std_error": e.std_error, "trials": e.trials,
                       "seed": e.seed, "config_digest": digest}
                      for m, (e, _, _) in result.aggregates.items()],
        "checks": result.checks,
        "info": result.info,
    }
    paths["summary"].write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
    for name, (header, rows) in result.tables.items():
        p = out / f"{stem}.{name}.csv"
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows([[fmt(x) for x in r] for r in rows])
        paths[name] = p
    manifest = {"config": cfg.canonical(), "digest": digest, "wall_time_s": wall,
                "library_version": __version__, "threads": cfg.threads,
                "files": sorted(p.name for p in paths.values())}
    paths["manifest"].write_text(json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n")
    return paths


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="primalgap", description="Run a named generalisation experiment.")
    p.add_argument("--experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("--config", help="flat JSON object of settings; flags override it")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--out")
    p.add_argument("--check", action="store_true", help="exit with status 2 if any acceptance check fails")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    values = load_config(args.config) if args.config else {}
    for k in ("experiment", "seed", "trials", "n", "T", "threads", "out"):
        v = getattr(args, k)
        if v is not None:
            values[k] = v
    if "experiment" not in values:
        print("error: --experiment is required (or set 'experiment' in --config)", file=sys.stderr)
        return 1
    cfg = make_config(values)
    try:
        result, paths = run_experiment(cfg)
    except KeyError as e:
        print(f"error: {e.args[0]}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: cannot write outputs: {e}", file=sys.stderr)
        return 1
    for metric, (est, _, _) in result.aggregates.items():
        se = f" +- {est.std_error:.3g}" if est.trials > 1 else ""
        print(f"{metric:55s} {est.mean:.6g}{se}")
    failed = [k for k, ok in result.checks.items() if not ok]
    for k, ok in result.checks.items():
        print(f"[{'PASS' if ok else 'FAIL'}] {k}")
    print(f"wrote {paths['results']}")
    if args.check and failed:
        return 2
    return 0
