import math

import numpy as np
import pytest

from fdrcontrol.distributions import std_normal_sf
from fdrcontrol.exceptions import ParameterError, UndefinedConditionalRateError
from fdrcontrol.mixture import (
    MixtureConfig,
    estimate_pfdr_for_thresholds,
    estimate_pfdr_pfnr,
    mixture_fdr_bound,
    posterior_alt_given_accept,
    posterior_null_given_accept,
    posterior_null_given_exceed,
    q_value,
)
from fdrcontrol.samplers import Seed


def cfg(n=20, pi0=0.5, delta=2.0, rho=0.0, t=1.5):
    return MixtureConfig(n=n, pi0=pi0, delta=delta, rho=rho, t=t)


class TestPosteriors:
    def test_pi0_near_one(self):
        assert posterior_null_given_exceed(cfg(pi0=1 - 1e-12)) == pytest.approx(1.0, abs=1e-9)
        assert posterior_alt_given_accept(cfg(pi0=1 - 1e-12)) == pytest.approx(0.0, abs=1e-9)

    def test_delta_zero_components_indistinguishable(self):
        assert posterior_null_given_exceed(cfg(pi0=0.37, delta=0.0, t=1.1)) == pytest.approx(0.37, abs=1e-14)
        assert posterior_alt_given_accept(cfg(pi0=0.37, delta=0.0, t=-0.4)) == pytest.approx(0.63, abs=1e-14)

    def test_likelihood_ratio_three(self):
        # delta frozen from the bisection oracle so that the alternative tail is
        # exactly 3x the null tail at t = 1
        c = cfg(pi0=0.5, delta=0.9397186099649101, t=1.0)
        assert posterior_null_given_exceed(c) == pytest.approx(0.25, abs=1e-9)

    def test_accept_posteriors_complement(self):
        c = cfg(pi0=0.42, delta=1.3, t=0.8)
        total = posterior_null_given_accept(c) + posterior_alt_given_accept(c)
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_undefined_at_infinite_threshold(self):
        with pytest.raises(ParameterError):
            posterior_null_given_exceed(cfg(t=math.inf))

    def test_requires_open_pi0(self):
        with pytest.raises(ParameterError):
            posterior_null_given_exceed(cfg(pi0=1.0))


class TestQValue:
    def test_infimum_attained_at_right_endpoint(self):
        for t in (0.5, 1.0, 2.0):
            c = cfg(pi0=0.5, delta=2.0, t=t)
            assert q_value(c) == pytest.approx(posterior_null_given_exceed(c), abs=1e-9)
            assert q_value(c) <= posterior_null_given_exceed(c) + 1e-15

    def test_delta_zero_gives_pi0(self):
        assert q_value(cfg(pi0=0.6, delta=0.0, t=1.0)) == pytest.approx(0.6, abs=1e-12)

    def test_nonincreasing_in_t(self):
        qs = [q_value(cfg(t=t)) for t in (0.0, 0.5, 1.0, 2.0, 3.0)]
        assert all(a >= b - 1e-12 for a, b in zip(qs, qs[1:]))


class TestMonteCarloConditionalRates:
    def test_iid_pfdr_matches_posterior(self):
        c = cfg(n=50, pi0=0.6, delta=2.0, rho=0.0, t=1.8)
        pfdr, pfnr = estimate_pfdr_pfnr(c, 2500, Seed(314))
        assert abs(pfdr.estimate - posterior_null_given_exceed(c)) <= 3 * pfdr.standard_error
        assert abs(pfnr.estimate - posterior_alt_given_accept(c)) <= 3 * pfnr.standard_error
        assert pfdr.conditioning_count <= 2500

    def test_dependent_pfdr_bounded_by_posterior(self):
        for rho in (0.2, 0.5, 0.8):
            c = cfg(n=50, pi0=0.6, delta=2.0, rho=rho, t=1.8)
            pfdr, pfnr = estimate_pfdr_pfnr(c, 1500, Seed(159))
            assert pfdr.estimate <= posterior_null_given_exceed(c) + 3 * pfdr.standard_error
            assert pfnr.estimate <= posterior_alt_given_accept(c) + 3 * pfnr.standard_error

    def test_determinism(self):
        c = cfg(n=10)
        a = estimate_pfdr_pfnr(c, 200, Seed(7))
        b = estimate_pfdr_pfnr(c, 200, Seed(7))
        assert a == b

    def test_undefined_conditional_rate_signaled(self):
        c = cfg(n=5, t=50.0)  # nothing is ever rejected
        with pytest.raises(UndefinedConditionalRateError):
            estimate_pfdr_pfnr(c, 50, Seed(3))

    def test_threshold_grid_shares_draws(self):
        c = cfg(n=30, pi0=0.5, delta=2.0, rho=0.5, t=2.0)
        rates = estimate_pfdr_for_thresholds(c, [1.0, 1.5, 2.0], 800, Seed(11))
        assert len(rates) == 3
        assert all(r is not None for r in rates)
        # threshold grid pFDR under dependence stays below the iid q-value
        q = q_value(c)
        inf_est = min(r.estimate for r in rates)
        worst_se = max(r.standard_error for r in rates)
        assert inf_est <= q + 3 * worst_se


class TestMixtureFdrBound:
    def test_reduces_to_posterior_times_rejection_probability(self):
        c = cfg(n=30, pi0=0.7, delta=2.0, rho=0.0, t=2.0)
        marginal = 0.7 * std_normal_sf(2.0) + 0.3 * std_normal_sf(0.0)
        expected = posterior_null_given_exceed(c) * (1.0 - (1.0 - marginal) ** 30)
        assert mixture_fdr_bound(c) == pytest.approx(expected, abs=1e-10)

    def test_single_test_reduction(self):
        c = cfg(n=1, pi0=0.4, delta=1.0, rho=0.0, t=1.2)
        marginal = 0.4 * std_normal_sf(1.2) + 0.6 * std_normal_sf(0.2)
        assert mixture_fdr_bound(c) == pytest.approx(posterior_null_given_exceed(c) * marginal, abs=1e-12)

    def test_monte_carlo_fdr_matches_bound_iid(self):
        c = cfg(n=20, pi0=0.6, delta=2.0, rho=0.0, t=2.0)
        rhs = mixture_fdr_bound(c)
        fdps = []
        for i in range(3000):
            from fdrcontrol.samplers import sample_mixture

            draw = sample_mixture(c.n, c.pi0, c.delta, c.rho, Seed(271, i))
            rejected = draw.x >= c.t
            r = int(rejected.sum())
            v = int((rejected & (draw.h == 0)).sum())
            fdps.append(v / r if r else 0.0)
        mean = float(np.mean(fdps))
        se = float(np.std(fdps, ddof=1) / math.sqrt(len(fdps)))
        assert abs(mean - rhs) <= 3 * se

    def test_dependence_refused(self):
        with pytest.raises(ParameterError):
            mixture_fdr_bound(cfg(rho=0.5))
