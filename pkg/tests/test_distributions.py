import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special, stats

from dataamp.distributions import (
    Cusp,
    DistributionModel,
    DivergenceError,
    ModelError,
    autocorr_second_derivative,
    differential_entropy,
    draw,
    normalization,
    parse_model,
    renyi_differential,
    sample,
    shape_F,
    song_S,
    theoretical_A,
)

ALL = ["uniform(0,1)", "normal(0,1)", "lognormal(0,1)", "moyal", "exponential(1)"]


def moyal_cdf(x):
    return special.erfc(np.exp(-x / 2) / math.sqrt(2))


class TestModelConstruction:
    @pytest.mark.parametrize("text,kind,params", [
        ("normal(0,1)", "normal", (0.0, 1.0)),
        (" lognormal( 0.5 , 2 ) ", "lognormal", (0.5, 2.0)),
        ("uniform(-1,3)", "uniform", (-1.0, 3.0)),
        ("moyal", "moyal", ()),
        ("exponential(2)", "exponential", (2.0,)),
    ])
    def test_parse(self, text, kind, params):
        m = parse_model(text)
        assert m.kind == kind and m.params == params

    @pytest.mark.parametrize("text", ["normal(0,-1)", "uniform(1,0)", "exponential(0)",
                                      "cauchy(0,1)", "normal(0)", "normal(a,b)", "moyal(1)"])
    def test_invalid_parameters(self, text):
        with pytest.raises(ModelError):
            parse_model(text)

    def test_str_round_trip(self):
        for text in ALL:
            assert parse_model(str(parse_model(text))) == parse_model(text)


class TestDensities:
    @pytest.mark.parametrize("text", ALL)
    def test_normalised_and_nonnegative(self, text):
        m = parse_model(text)
        assert normalization(m) == pytest.approx(1.0, abs=1e-6)
        lo, hi = m.support
        grid = np.linspace(lo, hi, 10_000)
        assert np.all(m.pdf(grid) >= 0)

    @pytest.mark.parametrize("text", ALL)
    def test_cdf_is_integral_of_pdf(self, text):
        m = parse_model(text)
        lo, _ = m.support
        for x in np.quantile(draw(m, 1000, np.random.default_rng(1)), [0.1, 0.5, 0.9]):
            val, _ = integrate.quad(lambda t: float(m.pdf(t)), lo, x, limit=200)
            assert m.cdf(x) == pytest.approx(val, abs=1e-7)

    @pytest.mark.parametrize("text", ["normal(0.3,1.7)", "lognormal(0.2,0.6)", "moyal"])
    def test_dpdf_matches_finite_difference(self, text):
        m = parse_model(text)
        for x in (0.5, 1.0, 2.5):
            h = 1e-6
            fd = (m.pdf(x + h) - m.pdf(x - h)) / (2 * h)
            assert float(m.dpdf(x)) == pytest.approx(fd, rel=1e-5, abs=1e-9)

    def test_moyal_cdf_closed_form(self):
        m = DistributionModel.moyal()
        for x in (-1.0, 0.0, 1.0, 5.0):
            assert float(m.cdf(x)) == pytest.approx(moyal_cdf(x), abs=1e-12)

    def test_mean_matches_quadrature(self):
        for text in ALL:
            m = parse_model(text)
            lo, hi = m.support
            val, _ = integrate.quad(lambda t: t * float(m.pdf(t)), lo, hi, limit=500,
                                    points=[0.0, 2.0, 10.0] if m.kind == "moyal" else None)
            assert m.mean() == pytest.approx(val, abs=1e-6)


class TestSampling:
    def test_uniform_support(self):
        s = sample(DistributionModel.uniform(), 4, seed=3)
        assert s.n == 4 and np.all((s.values >= 0) & (s.values < 1))

    def test_normal_moments(self):
        x = sample(DistributionModel.normal(), 100_000, seed=7).values
        assert abs(x.mean()) < 0.02 and abs(x.std() - 1) < 0.02

    def test_moyal_ks(self):
        x = draw(DistributionModel.moyal(), 1_000_000, np.random.default_rng(11))
        assert stats.kstest(x, moyal_cdf).statistic < 0.002

    def test_moyal_mean(self):
        x = draw(DistributionModel.moyal(), 1_000_000, np.random.default_rng(12))
        se = x.std() / math.sqrt(x.size)
        assert abs(x.mean() - DistributionModel.moyal().mean()) < 3 * se

    def test_seed_reproducible(self):
        m = DistributionModel.lognormal()
        a = sample(m, 50, seed=5)
        b = sample(m, 50, seed=5)
        assert np.array_equal(a.values, b.values)
        assert a.provenance == "simulated" and a.seed_lineage == [5]

    def test_bad_size(self):
        with pytest.raises(ModelError):
            sample(DistributionModel.normal(), 0, seed=1)


class TestEntropyAndShape:
    def test_closed_form_entropies(self):
        assert differential_entropy(DistributionModel.uniform(0, 1)) == 0.0
        assert math.exp(differential_entropy(DistributionModel.normal())) == pytest.approx(4.1327, abs=1e-4)
        # scipy's standard Moyal is the law of -2 ln|Z|
        assert differential_entropy(DistributionModel.moyal()) == pytest.approx(
            stats.moyal().entropy(), abs=1e-8)

    @pytest.mark.parametrize("text", ALL)
    def test_entropy_matches_scipy(self, text):
        m = parse_model(text)
        ref = {
            "uniform": stats.uniform(0, 1), "normal": stats.norm(0, 1),
            "lognormal": stats.lognorm(1.0), "moyal": stats.moyal(),
            "exponential": stats.expon(),
        }[m.kind]
        assert differential_entropy(m) == pytest.approx(float(ref.entropy()), abs=1e-7)

    def test_normal_autocorr_curvature(self):
        for sigma in (0.5, 1.0, 2.0):
            got = autocorr_second_derivative(DistributionModel.normal(0, sigma))
            assert got == pytest.approx(-1 / (4 * math.sqrt(math.pi) * sigma**3), rel=1e-12)

    def test_curvature_by_quadrature_agrees_with_closed_form(self):
        m = DistributionModel.normal(0, 1.3)
        lo, hi = m.support
        val, _ = integrate.quad(lambda x: float(m.dpdf(x)) ** 2, lo, hi, limit=500)
        assert autocorr_second_derivative(m) == pytest.approx(-val, rel=1e-8)

    def test_cusps(self):
        assert isinstance(autocorr_second_derivative(DistributionModel.uniform()), Cusp)
        assert isinstance(autocorr_second_derivative(DistributionModel.exponential()), Cusp)
        with pytest.raises(ValueError):
            theoretical_A(DistributionModel.exponential())

    def test_theoretical_A_values(self):
        assert theoretical_A(DistributionModel.uniform()) == 0.0
        assert theoretical_A(DistributionModel.normal()) == pytest.approx(0.83, abs=0.01)
        assert theoretical_A(DistributionModel.lognormal()) == pytest.approx(11.80, abs=0.02)

    @given(st.floats(0.05, 20.0), st.floats(-5, 5))
    @settings(max_examples=30, deadline=None)
    def test_normal_A_scale_free(self, sigma, mu):
        a = theoretical_A(DistributionModel.normal(mu, sigma))
        assert a == pytest.approx(theoretical_A(DistributionModel.normal()), rel=1e-9)

    def test_renyi_closed_forms(self):
        for q in (0.0, 0.5, 2.0, 3.0):
            assert renyi_differential(DistributionModel.uniform(0, 1), q) == 0.0
        n = DistributionModel.normal()
        assert differential_entropy(n) - renyi_differential(n, 2) == pytest.approx(0.5 * (1 - math.log(2)))
        ln = DistributionModel.lognormal()
        assert differential_entropy(ln) - renyi_differential(ln, 2) == pytest.approx(
            0.5 * (1 - math.log(2)) + 0.25)

    @pytest.mark.parametrize("text", ["normal(0.5,2)", "lognormal(0.3,0.7)", "exponential(1.5)"])
    @pytest.mark.parametrize("q", [0.5, 2.0, 3.0])
    def test_renyi_closed_form_vs_quadrature(self, text, q):
        m = parse_model(text)
        lo, hi = m.support
        val, _ = integrate.quad(lambda x: float(m.pdf(x)) ** q, lo, hi, limit=1000,
                                points=[math.exp(m.params[0])] if m.kind == "lognormal" else None)
        assert renyi_differential(m, q) == pytest.approx(math.log(val) / (1 - q), abs=1e-6)

    def test_renyi_q0_diverges_on_unbounded_support(self):
        with pytest.raises(DivergenceError):
            renyi_differential(DistributionModel.normal(), 0.0)

    def test_renyi_nonincreasing_in_q(self):
        for text in ALL[1:]:
            m = parse_model(text)
            vals = [renyi_differential(m, q) for q in (0.5, 1.0, 2.0, 3.0)]
            assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_table_values(self):
        assert shape_F(DistributionModel.uniform()) == 1.0
        assert song_S(DistributionModel.uniform()) == 0.0
        assert shape_F(DistributionModel.exponential()) == pytest.approx(math.exp(1 - math.log(2)))
        assert song_S(DistributionModel.exponential()) == 1.0
        assert shape_F(DistributionModel.normal()) == pytest.approx(1.1658, abs=5e-5)
        assert shape_F(DistributionModel.lognormal()) == pytest.approx(1.4969, abs=5e-5)
        assert song_S(DistributionModel.lognormal()) == 1.5
        assert shape_F(DistributionModel.moyal()) == pytest.approx(1.2414, abs=5e-4)

    def test_song_S_by_monte_carlo(self):
        for text in ("normal(0,1)", "moyal", "lognormal(0,0.8)"):
            m = parse_model(text)
            x = draw(m, 400_000, np.random.default_rng(3))
            lp = np.log(m.pdf(x))
            assert song_S(m) == pytest.approx(lp.var(), rel=0.03)

    @pytest.mark.parametrize("text", ALL)
    def test_F_at_least_one(self, text):
        f = shape_F(parse_model(text))
        if text.startswith("uniform"):
            assert f == 1.0
        else:
            assert f > 1.0

    @pytest.mark.parametrize("text", ALL)
    def test_F_near_one_plus_third_S(self, text):
        m = parse_model(text)
        if song_S(m) <= 1:
            assert shape_F(m) == pytest.approx(1 + song_S(m) / 3, rel=0.10)
