import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dataamp.amplifier import (
    AmplificationReport,
    audit,
    chain_bound,
    chain_m_eff,
    gain_for_meff,
    gencopy,
    m_eff,
    max_gain,
    meff_grid,
    reference_histogram,
)
from dataamp.distributions import DistributionModel, differential_entropy, sample
from dataamp.histogram import bin_index, build, shannon_entropy

H_NORMAL = differential_entropy(DistributionModel.normal())


@pytest.fixture(scope="module")
def training():
    return sample(DistributionModel.normal(), 2000, seed=21)


class TestArithmetic:
    def test_m_eff_examples(self):
        assert m_eff(1000, 50_000) == pytest.approx(3.13, abs=0.005)
        assert m_eff(777, 777) == 2.0
        assert m_eff(2000, 90_000) == pytest.approx(3.0, abs=0.005)

    def test_m_eff_rejects_shrinking(self):
        with pytest.raises(ValueError):
            m_eff(100, 50)

    def test_max_gain_examples(self):
        assert max_gain(2000) == 45
        assert max_gain(2000, 2.5) == 7
        assert max_gain(500) == 22

    def test_gain_ladder(self):
        assert [gain_for_meff(2000, m) for m in (2, 2.5, 3, 3.5, 4)] == [1, 7, 45, 299, 2000]

    @pytest.mark.parametrize("n", [500, 2000, 10**5])
    def test_max_gain_hits_bound(self, n):
        assert m_eff(n, max_gain(n) * n) == pytest.approx(3.0, abs=0.01)

    def test_chain(self):
        assert chain_m_eff(2, 2.7) == pytest.approx(2.7)
        assert chain_m_eff(2.446, 3) == pytest.approx(2.453, abs=5e-4)
        assert chain_bound(3) == 2.0
        with pytest.raises(ValueError):
            chain_m_eff(3, 2.5)

    @given(st.integers(2, 10**6), st.integers(1, 10**4))
    def test_m_eff_monotone_in_gain(self, n, g):
        assert m_eff(n, (g + 1) * n) > m_eff(n, g * n) >= 2.0

    def test_grid(self):
        grid = meff_grid(2000)
        gains = [g for g, _ in grid]
        assert gains[:45] == list(range(1, 46))
        assert gains[-1] == 2000
        assert all(b > a for a, b in zip(gains, gains[1:]))
        tail = [me for g, me in grid if g > 45]
        assert tail == pytest.approx([3.1, 3.2, 3.3, 3.4, 3.5, 3.6, 3.7, 3.8, 3.9, 4.0], abs=0.01)


class TestGenCopy:
    def test_size_and_provenance(self, training):
        out = gencopy(training, 45, H_NORMAL, seed=3)
        assert out.n == 90_000 and out.provenance == "generated"
        assert out.seed_lineage == [21, 3]

    def test_gain_one_preserves_bins(self, training):
        out = gencopy(training, 1, H_NORMAL, seed=4)
        ref = reference_histogram(training, H_NORMAL)
        counts = np.bincount(bin_index(ref, out), minlength=ref.n_bins)
        assert np.array_equal(counts, ref.counts)

    @given(st.integers(0, 2**32 - 1), st.integers(1, 12))
    @settings(max_examples=25, deadline=None)
    def test_counts_scale_exactly(self, seed, gain):
        x = sample(DistributionModel.lognormal(), 1200, seed=seed % 1000)
        ref = reference_histogram(x, 1.4189)
        out = gencopy(x, gain, 1.4189, seed=seed)
        counts = np.bincount(bin_index(ref, out), minlength=ref.n_bins)
        assert np.array_equal(counts, gain * ref.counts)
        assert out.values.min() >= ref.x_start
        assert out.values.max() < ref.x_start + ref.n_bins * ref.delta

    def test_entropy_conserved(self, training):
        ref = reference_histogram(training, H_NORMAL)
        out = gencopy(training, 7, H_NORMAL, seed=5)
        amp = build(out, ref.delta, x_start=ref.x_start)
        assert shannon_entropy(amp) == pytest.approx(shannon_entropy(ref), abs=1e-9)

    def test_deterministic(self, training):
        a = gencopy(training, 5, H_NORMAL, seed=9)
        b = gencopy(training, 5, H_NORMAL, seed=9)
        assert a.values.tobytes() == b.values.tobytes()
        c = gencopy(training, 5, H_NORMAL, seed=10)
        assert not np.array_equal(a.values, c.values)

    def test_copies_are_independent_streams(self, training):
        # the first copies do not depend on how many copies follow
        a = gencopy(training, 2, H_NORMAL, seed=9).values
        b = gencopy(training, 5, H_NORMAL, seed=9).values
        assert np.array_equal(a, b[: a.size])

    def test_rejects_fractional_and_small_gain(self, training):
        with pytest.raises(ValueError):
            gencopy(training, 2.5, H_NORMAL)
        with pytest.raises(ValueError):
            gencopy(training, 0, H_NORMAL)

    def test_small_training_warns(self):
        x = sample(DistributionModel.normal(), 200, seed=1)
        with pytest.warns(RuntimeWarning):
            gencopy(x, 2, H_NORMAL)

    def test_default_entropy_from_knn(self, training):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            out = gencopy(training, 2, seed=1)
        assert out.n == 4000

    def test_bin_variance_inflation(self):
        # replicate-histogram spread grows as gain, not sqrt(gain)
        edges = np.linspace(-2, 2, 9)
        g = 20
        amp, full = [], []
        for s in range(60):
            x = sample(DistributionModel.normal(), 1000, seed=s)
            amp.append(np.histogram(gencopy(x, g, H_NORMAL, seed=s).values, edges)[0])
            full.append(np.histogram(sample(DistributionModel.normal(), g * 1000, seed=10_000 + s).values,
                                     edges)[0])
        ratio = np.sqrt(np.var(amp, axis=0, ddof=1).mean() / np.var(full, axis=0, ddof=1).mean())
        assert ratio == pytest.approx(math.sqrt(g), rel=0.25)


class TestAudit:
    def test_examples(self):
        r = audit(1000, 50_000)
        assert r.m_eff == pytest.approx(3.13, abs=0.005) and r.verdict == "exceeds"
        r = audit(100, 1000)
        assert r.m_eff == pytest.approx(3.0) and r.verdict == "at_bound"
        r = audit(2000, 2000)
        assert r.m_eff == 2.0 and r.verdict == "within" and r.gain == 1

    def test_resolution(self):
        r = audit(10_000, 20_000, h_nats=0.0, h_source="supplied")
        assert r.resolution_delta == pytest.approx(0.01)
        assert r.h_source == "supplied"

    def test_counts_validated(self):
        with pytest.raises(ValueError):
            audit(1, 10)

    def test_json(self):
        d = json.loads(audit(1000, 50_000).to_json())
        assert d["verdict"] == "exceeds" and "kld_nats" not in d
        assert isinstance(AmplificationReport(**d), AmplificationReport)
