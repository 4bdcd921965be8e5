import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from dataamp.distributions import DistributionModel, draw
from dataamp.knn import (
    EstimationError,
    averaged_kld,
    kld_variance,
    knn_entropy,
    knn_kld,
    knn_log_density_variance,
    trigamma,
)
from dataamp.knn import _kth_cross, _kth_within
from dataamp.transforms import TransformSpec, forward

NORMAL = DistributionModel.normal()
LOGNORMAL = DistributionModel.lognormal()


def rng(seed):
    return np.random.default_rng(seed)


def brute_within(x, k):
    d = np.abs(x[:, None] - x[None, :])
    np.fill_diagonal(d, np.inf)
    return np.sort(d, axis=1)[:, k - 1]


def brute_cross(x, y, k):
    return np.sort(np.abs(x[:, None] - y[None, :]), axis=1)[:, k - 1]


class TestSpecialFunctions:
    @pytest.mark.parametrize("k", [1, 2, 4, 10, 37])
    def test_trigamma_matches_mpmath(self, k):
        assert trigamma(k) == pytest.approx(float(mpmath.polygamma(1, k)), rel=1e-12)

    def test_trigamma_constants(self):
        assert trigamma(1) == pytest.approx(math.pi**2 / 6, rel=1e-12)
        assert trigamma(4) == pytest.approx(0.2838, abs=1e-4)


class TestNeighbourSearch:
    @given(hnp.arrays(np.float64, st.integers(6, 60), unique=True,
                      elements=st.floats(-50, 50, allow_nan=False)), st.integers(1, 5))
    @settings(max_examples=100, deadline=None)
    def test_within_matches_brute_force(self, x, k):
        xs = np.sort(x)
        np.testing.assert_allclose(_kth_within(xs, k), brute_within(xs, k), rtol=0, atol=1e-12)

    @given(hnp.arrays(np.float64, st.integers(1, 40), elements=st.floats(-50, 50, allow_nan=False)),
           hnp.arrays(np.float64, st.integers(6, 40), elements=st.floats(-50, 50, allow_nan=False)),
           st.integers(1, 5))
    @settings(max_examples=100, deadline=None)
    def test_cross_matches_brute_force(self, x, y, k):
        xs, ys = np.sort(x), np.sort(y)
        np.testing.assert_allclose(_kth_cross(xs, ys, k), brute_cross(xs, ys, k), rtol=0, atol=1e-12)


class TestEntropy:
    def test_uniform(self):
        x = draw(DistributionModel.uniform(), 100_000, rng(1))
        assert knn_entropy(x, k=1) == pytest.approx(0.0, abs=0.02)

    def test_normal(self):
        x = draw(NORMAL, 100_000, rng(2))
        assert knn_entropy(x, k=1) == pytest.approx(math.log(math.sqrt(2 * math.pi * math.e)), abs=0.02)

    @pytest.mark.parametrize("k", [2, 4])
    def test_higher_k(self, k):
        x = draw(LOGNORMAL, 50_000, rng(3))
        assert knn_entropy(x, k=k) == pytest.approx(0.5 * math.log(2 * math.pi * math.e), abs=0.03)

    def test_variance_model(self):
        n = 10_000
        est = [knn_entropy(draw(NORMAL, n, rng(100 + s)), k=1) for s in range(200)]
        predicted = (0.5 + 1.645) / n
        assert np.var(est, ddof=1) == pytest.approx(predicted, rel=0.3)

    def test_duplicates_are_split(self):
        x = np.r_[draw(NORMAL, 500, rng(4)), np.full(5, 0.25)]
        assert math.isfinite(knn_entropy(x))

    def test_all_identical(self):
        with pytest.raises(EstimationError):
            knn_entropy(np.ones(10))

    def test_too_small(self):
        with pytest.raises(ValueError):
            knn_entropy([1.0, 2.0], k=2)

    def test_plugin_log_density_variance(self):
        x = draw(LOGNORMAL, 50_000, rng(5))
        assert knn_log_density_variance(x) == pytest.approx(1.5, rel=0.05)


class TestKld:
    def test_same_law(self):
        p = draw(NORMAL, 100_000, rng(6))
        q = draw(NORMAL, 100_000, rng(7))
        assert knn_kld(p, q, k=4) == pytest.approx(0.0, abs=0.01)

    def test_shifted_normal(self):
        p = draw(NORMAL, 100_000, rng(8))
        q = draw(DistributionModel.normal(1, 1), 100_000, rng(9))
        assert knn_kld(p, q, k=4) == pytest.approx(0.5, abs=0.02)

    def test_identical_samples_fail(self):
        x = draw(NORMAL, 100, rng(10))
        with pytest.raises(EstimationError):
            knn_kld(x, x)

    def test_symmetric_for_equal_width_normals(self):
        n = 20_000
        p = draw(NORMAL, n, rng(11))
        q = draw(DistributionModel.normal(0.2, 1), n, rng(12))
        sd = math.sqrt(2 * kld_variance(n))
        assert abs(knn_kld(p, q) - knn_kld(q, p)) < 3 * sd

    def test_invariant_under_monotone_map(self):
        n = 20_000
        p = draw(LOGNORMAL, n, rng(13))
        q = draw(DistributionModel.lognormal(0.2, 1), n, rng(14))
        spec = TransformSpec("box_cox", 0.0)
        direct = knn_kld(p, q)
        mapped = knn_kld(forward(spec, p), forward(spec, q))
        sd = math.sqrt(kld_variance(n, var_log_p=1.5) + kld_variance(n))
        assert abs(direct - mapped) < 3 * sd

    @pytest.mark.parametrize("n", [500, 2000])
    def test_empirical_variance(self, n):
        est = [knn_kld(draw(NORMAL, n, rng(1000 + 2 * s)), draw(NORMAL, n, rng(1001 + 2 * s)))
               for s in range(150)]
        ratio = np.var(est, ddof=1) / kld_variance(n)
        assert 0.5 <= ratio <= 2.0

    def test_k4_steadier_than_k1_on_lognormal(self):
        n = 2000
        pairs = [(draw(LOGNORMAL, n, rng(3000 + 2 * s)), draw(LOGNORMAL, n, rng(3001 + 2 * s)))
                 for s in range(100)]
        v1 = np.var([knn_kld(p, q, k=1) for p, q in pairs])
        v4 = np.var([knn_kld(p, q, k=4) for p, q in pairs])
        assert v4 < v1


class TestVarianceModel:
    def test_examples(self):
        assert kld_variance(2000, 1) == pytest.approx(3.47e-3, rel=2e-3)
        assert kld_variance(2000, 16) == pytest.approx(4.51e-4, rel=2e-3)

    def test_iteration_ratio(self):
        ratio = math.sqrt(kld_variance(2000, 1) / kld_variance(2000, 16))
        assert ratio == pytest.approx(2.77, abs=0.01)

    def test_floor(self):
        assert math.sqrt(kld_variance(2000, 10**9)) == pytest.approx(math.sqrt(0.5 / 2000), rel=1e-6)

    def test_resolution_floor(self):
        assert kld_variance(90_000, 10**9, n_resolution=2000) == pytest.approx(0.5 / 2000, rel=1e-6)

    @given(st.integers(2, 10**7), st.integers(1, 1000), st.floats(-1, 1), st.integers(1, 10))
    def test_positive_and_decreasing(self, n, n_iter, rho, k):
        v = kld_variance(n, n_iter, rho, k=k)
        assert v > 0
        assert kld_variance(n, n_iter + 1, rho, k=k) < v

    def test_invalid(self):
        with pytest.raises(ValueError):
            kld_variance(1)
        with pytest.raises(ValueError):
            kld_variance(100, 0)


class TestAveraged:
    def test_single_iteration_is_plain_call(self):
        def gen(rng_):
            return draw(NORMAL, 300, rng_)

        est = averaged_kld(gen, gen, n_iter=1, seed=5)
        child = np.random.SeedSequence(5).spawn(1)[0]
        r = np.random.default_rng(child)
        p, q = gen(r), gen(r)
        assert est.value_nats == knn_kld(p, q)
        assert est.n_iterations == 1 and est.predicted_sd_nats > 0

    def test_directions(self):
        def p_gen(r):
            return draw(NORMAL, 400, r)

        def q_gen(r):
            return draw(DistributionModel.normal(0.5, 1), 400, r)

        a = averaged_kld(p_gen, q_gen, n_iter=2, seed=1, direction="p||q")
        b = averaged_kld(p_gen, q_gen, n_iter=2, seed=1, direction="q||p")
        c = averaged_kld(p_gen, q_gen, n_iter=2, seed=1, direction="symmetric")
        assert c.value_nats == pytest.approx(0.5 * (a.value_nats + b.value_nats))
        with pytest.raises(ValueError):
            averaged_kld(p_gen, q_gen, n_iter=1, direction="sideways")

    def test_consistency_same_law(self):
        inside = 0
        for s in range(100):
            est = averaged_kld(lambda r: draw(NORMAL, 2000, r), lambda r: draw(NORMAL, 2000, r),
                               n_iter=4, seed=s)
            inside += abs(est.value_nats) < 3 * est.predicted_sd_nats
        assert inside >= 95

    def test_too_many_failures(self):
        x = draw(NORMAL, 50, rng(0))
        with pytest.raises(EstimationError):
            averaged_kld(lambda r: x, lambda r: x, n_iter=4)

    def test_bits(self):
        est = averaged_kld(lambda r: draw(NORMAL, 200, r), lambda r: draw(NORMAL, 200, r), n_iter=2)
        assert est.value_bits == pytest.approx(est.value_nats / math.log(2))
        assert est.predicted_sd_bits == pytest.approx(est.predicted_sd_nats / math.log(2))
