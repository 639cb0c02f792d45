import itertools
import math

import numpy as np
import pytest

from primalgap.core import Dataset, EvalSpec, Point, empirical_risk, population_risk, sample_dataset
from primalgap.metrics import pd_risk
from primalgap.algorithms import AlgoConfig, run_ppa
from primalgap.problems import (REGISTRY, gan_capacity_probe, gan_labels, gan_min_norm_discriminator,
                                make_bilinear, make_gdmax_failure, make_interchange_example,
                                make_linear_gan, make_problem, make_quadratic_saddle,
                                make_truncated_gaussian, quadratic_saddle)
from primalgap.solvers import exact_inner_max, grid_minimize_1d, primal_minimize, primal_risk, risk, saddle_point


def theta_grid_primal(p, d, w, points=10_001):
    lo, hi = p.theta_set.lower[0], p.theta_set.upper[0]
    grid = np.linspace(lo, hi, points)
    return max(risk(p, d, [w], [t]) for t in grid)


def sum_dataset(n, total):
    return Dataset(np.full(n, total / n), 0)


# -- truncated Gaussian -------------------------------------------------------

class TestTruncatedGaussian:
    n, lam = 100, 4.0

    @pytest.fixture
    def prob(self):
        return make_truncated_gaussian(self.n, self.lam)

    def test_population_minimum(self, prob):
        w, v = primal_minimize(prob, None)
        assert w[0] == 1.0 and v == -0.5

    def test_sum_one_case(self, prob):
        d = sum_dataset(self.n, 1.0)
        w, v = primal_minimize(prob, d)
        assert w[0] == pytest.approx(0.5)
        # r_S(w) = w^2/2 - w + w v with v = 1/2
        assert v == pytest.approx(-0.125)
        assert theta_grid_primal(prob, d, 0.5) == pytest.approx(-0.125, abs=1e-6)

    def test_closed_form_matches_theta_grid(self, prob):
        rng = np.random.default_rng(0)
        for k in range(100):
            d = sample_dataset(prob, self.n, k)
            w = float(rng.uniform(0, 1))
            exact = prob.closed_forms.primal(np.array([w]), d.samples)
            assert exact == pytest.approx(theta_grid_primal(prob, d, w), abs=1e-6)

    def test_minimizer_matches_w_grid(self, prob):
        for k in range(100):
            d = sample_dataset(prob, self.n, 1000 + k)
            w_cf, v_cf = prob.closed_forms.minimizer(d.samples)
            # brute force: inner max from the theta-quadratic, outer grid + refinement
            f = lambda x: exact_inner_max(prob, d, [x])[1]
            w_g, v_g = grid_minimize_1d(f, 0.0, 1.0)
            assert v_cf == pytest.approx(v_g, abs=1e-6)
            assert w_cf[0] == pytest.approx(w_g, abs=1e-5)

    def test_empirical_primal_dominates_population(self, prob):
        rng = np.random.default_rng(3)
        for k in range(300):
            d = sample_dataset(prob, self.n, k)
            w = rng.uniform(0, 1)
            assert primal_risk(prob, d, [w]) >= primal_risk(prob, None, [w])

    @pytest.mark.parametrize("s", [0.5, 1.0, 2.0, 3.0, 4.0, -0.7, -4.0])
    def test_interval_implies_gap(self, prob, s):
        d = sum_dataset(self.n, s)
        w_s, _ = primal_minimize(prob, d)
        assert w_s[0] <= 0.9 + 1e-12
        gap = primal_risk(prob, None, w_s) - (-0.5)
        assert gap >= 0.005 - 1e-12

    def test_outside_interval_branch(self, prob):
        s = 6.0
        d = sum_dataset(self.n, s)
        v = self.lam * s - self.lam ** 2 / 2
        assert prob.closed_forms.primal(np.array([0.4]), d.samples) == pytest.approx(0.08 - 0.4 + 0.4 * v)
        assert primal_minimize(prob, d) == (np.array([0.0]), 0.0)

    def test_declared_capacities(self, prob):
        cap = prob.closed_forms.capacities
        assert cap["Ce"] == self.lam * self.n and cap["Cp"] == 0.0
        assert prob.constants.L_theta_star == pytest.approx(self.lam * math.log(self.n) / math.sqrt(self.n))

    def test_argmax_clipping(self, prob):
        d = sum_dataset(self.n, 10.0)
        assert prob.closed_forms.argmax(np.array([0.5]), d.samples)[0] == self.lam * self.n

    def test_invalid(self):
        with pytest.raises(ValueError):
            make_truncated_gaussian(1)
        with pytest.raises(ValueError):
            make_truncated_gaussian(100, 2.0)


# -- GDMax failure example --------------------------------------------------------

class TestGDMaxFailure:

    @pytest.mark.parametrize("n", [1, 4, 25])
    def test_empirical_minimum_is_zero(self, n):
        p = make_gdmax_failure(n)
        d = sample_dataset(p, n, 5)
        w, v = primal_minimize(p, d)
        assert w[0] == pytest.approx(n * d.samples.sum())
        assert v == pytest.approx(0.0, abs=1e-15)
        assert primal_risk(p, d, w, "iterative") == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize("n", [1, 2, 4, 8])
    def test_expected_population_risk_is_half(self, n):
        # exact enumeration over all 2^n datasets
        p = make_gdmax_failure(n)
        vals = []
        for signs in itertools.product([-1.0, 1.0], repeat=n):
            Z = np.array(signs) / math.sqrt(n)
            w, _ = p.closed_forms.minimizer(Z)
            vals.append(primal_risk(p, None, w))
        assert np.mean(vals) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("sign", [-1, 1])
    def test_all_equal_samples(self, sign):
        n = 9
        p = make_gdmax_failure(n)
        d = Dataset(np.full(n, sign / math.sqrt(n)), 0)
        w, v = primal_minimize(p, d)
        assert w[0] == pytest.approx(sign * n * math.sqrt(n))
        wmax = n * math.sqrt(n)
        w_g, v_g = grid_minimize_1d(lambda x: primal_risk(p, d, [x], "iterative"), -wmax, wmax)
        assert w_g == pytest.approx(w[0], abs=1e-5)
        assert v_g == pytest.approx(v, abs=1e-6)

    def test_primal_closed_forms(self):
        n = 10
        p = make_gdmax_failure(n)
        d = sample_dataset(p, n, 2)
        for w in np.linspace(-30, 30, 13):
            assert primal_risk(p, None, [w]) == pytest.approx(w * w / (2 * n * n))
            assert primal_risk(p, d, [w]) == pytest.approx(exact_inner_max(p, d, [w])[1], abs=1e-12)

    def test_smoothness_constant(self):
        n = 5
        p = make_gdmax_failure(n)
        assert p.constants.ell == pytest.approx(math.sqrt(2) / n ** 2)
        # with ell = 1/n^2 the inequality fails along a pure theta displacement
        z = np.array([0.2])
        g = lambda w, t: np.concatenate([p.grad_w([w], [t], z)[0], p.grad_theta([w], [t], z)[0]])
        diff = np.linalg.norm(g(0.0, 1.0) - g(0.0, 0.0))
        assert diff > 1.0 / n ** 2
        assert diff <= p.constants.ell * 1.0 + 1e-15

    def test_gradient_bound_on_best_response_graph(self):
        for n in (4, 16, 64):
            p = make_gdmax_failure(n)
            d = sample_dataset(p, n, 0)
            wmax = n * math.sqrt(n)
            for w in np.linspace(-wmax, wmax, 21):
                th = exact_inner_max(p, d, [w])[0]
                g = np.hstack([p.grad_w([w], th, d.samples), p.grad_theta([w], th, d.samples)])
                assert np.max(np.linalg.norm(g, axis=1)) <= p.constants.L + 1e-12
            assert p.constants.L * math.sqrt(n) == pytest.approx(2 * math.sqrt(2))


# -- adversarial training / interchange -----------------------------------------------

class TestInterchange:

    def test_zero_radius_is_least_squares(self):
        p = make_interchange_example(eps0=0.0)
        d = sample_dataset(p, 30, 1)
        pts = np.linspace(-1, 1, 5)[d.samples]
        w, v = primal_minimize(p, d)
        assert w[0] == pytest.approx(pts.mean())
        assert v == pytest.approx(np.mean((pts - pts.mean()) ** 2))

    def test_value_at_sample_point(self):
        eps0 = 0.3
        p = make_interchange_example(eps0=eps0)
        d = Dataset(np.array([2]), 0)  # support point a_2 = 0
        th, v = exact_inner_max(p, d, [0.0])
        assert v == pytest.approx(eps0 ** 2)
        assert abs(th[2]) == pytest.approx(eps0)

    def test_per_sample_max_matches_brute_force(self):
        p = make_interchange_example()
        rng = np.random.default_rng(0)
        lo, hi = p.theta_set.lower, p.theta_set.upper
        for k in range(50):
            d = sample_dataset(p, 15, k)
            w = rng.uniform(-2, 2)
            # each sample only sees its own coordinate: brute-force each interval
            per_coord = [max((w - t) ** 2 for t in np.linspace(lo[j], hi[j], 2001)) for j in range(5)]
            brute = float(np.mean([per_coord[j] for j in d.samples]))
            assert primal_risk(p, d, [w]) == pytest.approx(brute, abs=1e-9)
            assert exact_inner_max(p, d, [w])[1] == pytest.approx(brute, abs=1e-12)

    def test_minimizer_matches_grid(self):
        p = make_interchange_example()
        for k in range(30):
            d = sample_dataset(p, 12, k)
            w, v = primal_minimize(p, d)
            w_g, v_g = grid_minimize_1d(lambda x: primal_risk(p, d, [x]), -2, 2)
            assert v == pytest.approx(v_g, abs=1e-9)
            assert v <= v_g + 1e-15

    def test_population_min_not_above_expected_empirical_min(self):
        p = make_interchange_example()
        _, v_pop = primal_minimize(p, None)
        assert primal_risk(p, None, [0.0]) >= v_pop


# -- linear GAN ---------------------------------------------------------------------

class TestLinearGan:

    def test_population_capacity_point(self):
        p = make_linear_gan(8)
        th = p.closed_forms.argmax(np.zeros(p.d_w), None)
        assert th[-1] == 0.5 and np.all(th[:-1] == 0)
        assert p.closed_forms.capacities["Cp"] == 0.5

    @pytest.mark.parametrize("n", [4, 16, 64])
    def test_label_norm(self, n):
        assert np.linalg.norm(gan_labels(n)) == pytest.approx(math.sqrt(2 * n) / 2, rel=1e-15)
        assert np.linalg.norm(gan_labels(n)) >= math.sqrt(n) / 2

    def test_min_norm_solution_interpolates(self):
        n = 10
        p = make_linear_gan(n)
        d = sample_dataset(p, n, 3)
        v = gan_min_norm_discriminator(d.samples)
        Q = np.concatenate([d.samples[:, 0, :], d.samples[:, 1, :]], axis=0).T
        np.testing.assert_allclose(Q.T @ v, gan_labels(n), atol=1e-10)
        # min norm: v lies in the column space of Q
        coef, *_ = np.linalg.lstsq(Q, v, rcond=None)
        np.testing.assert_allclose(Q @ coef, v, atol=1e-10)

    def test_probe_reports(self):
        out = gan_capacity_probe(16)
        assert out["m"] == 64 and out["Cp_point_norm"] == 0.5
        assert out["theta_norm"] >= out["v_norm"]

    def test_primal_closed_forms(self):
        n = 8
        p = make_linear_gan(n)
        rng = np.random.default_rng(0)
        for w in p.w_set.sample(rng, 5):
            assert primal_risk(p, None, w) == pytest.approx(-2 * math.log(2))
            d = sample_dataset(p, n, int(rng.integers(1000)))
            th = p.closed_forms.argmax(w, d.samples)
            # perfect separation puts every log term at its upper bound 0
            assert empirical_risk(p, d, Point(w, th)) == pytest.approx(0.0, abs=1e-12)
            assert primal_risk(p, d, w) == 0.0
        assert p.closed_forms.pop_risk(np.zeros(p.d_w), np.r_[np.zeros(p.d_w), 0.5]) == pytest.approx(
            2 * math.log(0.5))
        assert p.closed_forms.pop_risk(np.zeros(p.d_w), np.r_[np.full(p.d_w, 1e-3), 0.5]) == -np.inf

    def test_population_value_matches_monte_carlo(self):
        p = make_linear_gan(8)
        th = np.r_[np.zeros(p.d_w), 0.3]
        mc = population_risk(p, Point(np.full(p.d_w, 0.01), th), EvalSpec("monte-carlo", 2000, seed=1))
        assert mc.mean == pytest.approx(math.log(0.3) + math.log(0.7))

    def test_needs_overparametrisation(self):
        with pytest.raises(ValueError):
            make_linear_gan(10, m=20)

    def test_rank_deficiency_detected(self):
        n = 3
        Z = np.zeros((n, 2, 8))
        with pytest.raises(np.linalg.LinAlgError):
            gan_min_norm_discriminator(Z)


# -- quadratic saddles ----------------------------------------------------------------

class TestQuadraticSaddle:

    def test_identity_instance_saddle_at_origin(self):
        p = quadratic_saddle(np.eye(2), np.zeros((2, 2)), np.eye(2), radius_w=1, radius_theta=1)
        w, th = saddle_point(p.closed_forms.saddle_quadratic(None), p.w_set, p.theta_set)
        np.testing.assert_allclose(w, 0, atol=1e-15)
        np.testing.assert_allclose(th, 0, atol=1e-15)

    def test_bilinear_pd_risk_at_saddle(self):
        p = make_bilinear()
        w, th = saddle_point(p.closed_forms.saddle_quadratic(None), p.w_set, p.theta_set)
        assert pd_risk(p, None, Point(w, th)) == pytest.approx(0.0, abs=1e-12)

    def test_saddle_matches_ppa_limit(self):
        p = make_quadratic_saddle(3, 2, seed=5)
        d = sample_dataset(p, 40, 0)
        w, th = saddle_point(p.closed_forms.saddle_quadratic(d.samples), p.w_set, p.theta_set)
        traj = run_ppa(p, d, AlgoConfig("ppa", T=1000, prox_step=1.0))
        np.testing.assert_allclose(traj.final.w, w, atol=1e-6)
        np.testing.assert_allclose(traj.final.theta, th, atol=1e-6)

    def test_constrained_saddle_is_saddle(self):
        p = make_quadratic_saddle(2, 2, seed=3, radius_w=0.3, radius_theta=0.3)
        w, th = saddle_point(p.closed_forms.saddle_quadratic(None), p.w_set, p.theta_set)
        assert pd_risk(p, None, Point(w, th)) == pytest.approx(0.0, abs=1e-9)

    def test_invalid(self):
        with pytest.raises(ValueError):
            make_quadratic_saddle(0, 2)
        with pytest.raises(ValueError):
            make_quadratic_saddle(2, 2, conditioning=0.0)


# -- shared invariants ---------------------------------------------------------------

SMOOTH = [
    ("trunc-gauss", lambda: make_truncated_gaussian(100)),
    ("gdmax-failure", lambda: make_gdmax_failure(9)),
    ("interchange", make_interchange_example),
    ("quad-saddle", lambda: make_quadratic_saddle(3, 2, seed=1)),
    ("bilinear", make_bilinear),
]


@pytest.mark.parametrize("name,factory", SMOOTH, ids=[s[0] for s in SMOOTH])
def test_declared_gradient_lipschitz(name, factory):
    p = factory()
    ell = p.constants.ell
    rng = np.random.default_rng(0)
    for _ in range(1000):
        z = p.sampler(rng, 1)
        w1, w2 = p.w_set.sample(rng, 2)
        t1, t2 = p.theta_set.sample(rng, 2, scale=5.0)
        g1 = np.hstack([p.grad_w(w1, t1, z)[0], p.grad_theta(w1, t1, z)[0]])
        g2 = np.hstack([p.grad_w(w2, t2, z)[0], p.grad_theta(w2, t2, z)[0]])
        rhs = ell * (np.linalg.norm(w1 - w2) + np.linalg.norm(t1 - t2))
        assert np.linalg.norm(g1 - g2) <= rhs * (1 + 1e-12) + 1e-15


def test_registry():
    assert {"trunc-gauss", "gdmax-failure", "interchange", "linear-gan", "quad-saddle"} <= set(REGISTRY)
    assert make_problem("trunc-gauss", n=50).params["n"] == 50
    with pytest.raises(KeyError):
        make_problem("mnist-gan")
