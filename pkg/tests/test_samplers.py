import numpy as np
import pytest
from scipy import stats

from fdrcontrol.exceptions import ParameterError
from fdrcontrol.samplers import MixtureDraw, Seed, TruthAssignment, sample_equicorrelated, sample_mixture


@pytest.fixture
def truth10():
    return TruthAssignment.trailing_alternatives(10, 6, 2.5)


class TestSeed:
    def test_determinism_bit_identical(self, truth10):
        a = sample_equicorrelated(truth10, 0.3, Seed(123, 7))
        b = sample_equicorrelated(truth10, 0.3, Seed(123, 7))
        assert np.array_equal(a, b)

    def test_streams_differ(self, truth10):
        a = sample_equicorrelated(truth10, 0.3, Seed(123, 7))
        b = sample_equicorrelated(truth10, 0.3, Seed(123, 8))
        assert not np.array_equal(a, b)

    def test_negative_seed_rejected(self):
        with pytest.raises(ParameterError):
            Seed(-1)


class TestTruthAssignment:
    def test_partition_enforced(self):
        with pytest.raises(ParameterError):
            TruthAssignment(3, (0, 1), (1, 2), 1.0)
        with pytest.raises(ParameterError):
            TruthAssignment(3, (0,), (2,), 1.0)

    def test_masks_and_shifts(self, truth10):
        assert truth10.n0 == 6 and truth10.n1 == 4
        assert truth10.null_mask().sum() == 6
        mu = truth10.shifts()
        assert np.all(mu[:6] == 0.0) and np.all(mu[6:] == 2.5)

    def test_all_null_allowed(self):
        t = TruthAssignment.trailing_alternatives(5, 5, 1.0)
        assert t.n1 == 0

    def test_no_null_allowed(self):
        t = TruthAssignment.trailing_alternatives(5, 0, 1.0)
        assert t.n0 == 0


class TestEquicorrelated:
    def test_independent_mean_and_variance(self):
        truth = TruthAssignment.trailing_alternatives(1, 1, 1.0)
        draws = np.array([sample_equicorrelated(truth, 0.0, Seed(9, i))[0] for i in range(10000)])
        assert abs(draws.mean()) <= 4 / np.sqrt(10000)
        assert abs(draws.var() - 1.0) <= 0.05

    def test_pairwise_correlation(self):
        truth = TruthAssignment.trailing_alternatives(2, 2, 1.0)
        draws = np.array([sample_equicorrelated(truth, 0.5, Seed(21, i)) for i in range(8000)])
        corr = np.corrcoef(draws[:, 0], draws[:, 1])[0, 1]
        assert abs(corr - 0.5) <= 0.03

    def test_alternative_location_shift(self):
        truth = TruthAssignment.trailing_alternatives(4, 2, 2.5)
        draws = np.array([sample_equicorrelated(truth, 0.4, Seed(33, i)) for i in range(4000)])
        assert abs(draws[:, 3].mean() - 2.5) <= 4 / np.sqrt(4000)
        assert abs(draws[:, 0].mean()) <= 4 / np.sqrt(4000)

    def test_rho_out_of_range(self, truth10):
        for rho in (-0.1, 1.0, 1.5):
            with pytest.raises(ParameterError):
                sample_equicorrelated(truth10, rho, Seed(1))

    def test_shift_override(self, truth10):
        mu = np.full(10, 7.0)
        x = sample_equicorrelated(truth10, 0.0, Seed(5), shifts=mu)
        base = sample_equicorrelated(truth10, 0.0, Seed(5), shifts=np.zeros(10))
        assert np.allclose(x - base, 7.0)

    def test_order_statistics_invariant_under_permutation(self):
        # order statistics ignore index order by construction: exact equality
        truth = TruthAssignment.trailing_alternatives(6, 6, 1.0)
        rng = np.random.default_rng(0)
        perm = rng.permutation(6)
        mins, perm_mins = [], []
        for i in range(500):
            x = sample_equicorrelated(truth, 0.5, Seed(77, i))
            mins.append(np.sort(x))
            perm_mins.append(np.sort(x[perm]))
        assert np.array_equal(np.asarray(mins), np.asarray(perm_mins))

    def test_exchangeable_marginals_at_null_point(self):
        # distribution of any fixed component matches any other (independent streams)
        truth = TruthAssignment.trailing_alternatives(5, 5, 1.0)
        a = np.array([sample_equicorrelated(truth, 0.5, Seed(88, i))[0] for i in range(3000)])
        b = np.array([sample_equicorrelated(truth, 0.5, Seed(99, i))[3] for i in range(3000)])
        assert stats.ks_2samp(a, b).pvalue > 0.01

    def test_rho_zero_matches_direct_normal_sampler(self):
        truth = TruthAssignment.trailing_alternatives(3, 3, 1.0)
        ours = np.array([sample_equicorrelated(truth, 0.0, Seed(13, i)) for i in range(6000)]).ravel()
        direct = np.random.default_rng(14).standard_normal(18000)
        assert abs(ours.mean() - direct.mean()) <= 0.05
        assert abs(ours.var() - direct.var()) <= 0.06
        assert stats.ks_2samp(ours, direct).pvalue > 0.01


class TestMixtureSampler:
    def test_pi0_one_all_nulls(self):
        draw = sample_mixture(50, 1.0, 2.0, 0.0, Seed(3))
        assert isinstance(draw, MixtureDraw)
        assert np.all(draw.h == 0)

    def test_pi0_zero_all_alternatives(self):
        draw = sample_mixture(50, 0.0, 2.0, 0.0, Seed(3))
        assert np.all(draw.h == 1)

    def test_null_fraction(self):
        fractions = [
            1.0 - sample_mixture(100, 0.7, 2.0, 0.0, Seed(41, i)).h.mean() for i in range(2000)
        ]
        assert abs(np.mean(fractions) - 0.7) == pytest.approx(0.0, abs=4 * np.sqrt(0.7 * 0.3 / 100 / 2000) + 1e-3)

    def test_alternatives_are_shifted(self):
        xs, hs = [], []
        for i in range(2000):
            d = sample_mixture(20, 0.5, 2.5, 0.0, Seed(55, i))
            xs.append(d.x)
            hs.append(d.h)
        x = np.concatenate(xs)
        h = np.concatenate(hs)
        assert abs(x[h == 1].mean() - 2.5) <= 0.05
        assert abs(x[h == 0].mean()) <= 0.05

    def test_determinism(self):
        a = sample_mixture(30, 0.4, 1.5, 0.5, Seed(8, 2))
        b = sample_mixture(30, 0.4, 1.5, 0.5, Seed(8, 2))
        assert np.array_equal(a.x, b.x) and np.array_equal(a.h, b.h)

    def test_parameter_validation(self):
        with pytest.raises(ParameterError):
            sample_mixture(10, 1.2, 1.0, 0.0, Seed(1))
        with pytest.raises(ParameterError):
            sample_mixture(10, 0.5, 1.0, 1.0, Seed(1))
        with pytest.raises(ParameterError):
            sample_mixture(10, 0.5, -1.0, 0.0, Seed(1))
