import dataclasses
import math

import numpy as np
import pytest
from scipy import integrate

from retrowpt import (AnnulusSpec, CcdfQuery, ExperimentConfig, Policy,
                      asymptotic_limits, ccdf_total, lambda_term, q_dbb,
                      q_dib, q_fb_retro, q_pbb, qbar_re,
                      run_policy_experiment, substream)


class TestLambdaTerm:
    def test_reference_value(self, default_params):
        value = lambda_term(AnnulusSpec(2.0, 30.0), default_params)
        assert value == pytest.approx(1.0 / 960.0, rel=1e-14)

    def test_monte_carlo_oracle(self, default_params):
        # uniform points on the annulus, averaged path gain
        rng = substream(50, 0, 0)
        d = np.sqrt(rng.uniform(4.0, 900.0, size=1_000_000))
        mc = float(np.mean(d ** -3.0))
        assert lambda_term(AnnulusSpec(2.0, 30.0), default_params) == pytest.approx(
            mc, rel=0.02)

    def test_linear_in_radiated_power(self, default_params):
        doubled = dataclasses.replace(default_params,
                                      tx_power=2 * default_params.tx_power)
        spec = AnnulusSpec(2.0, 30.0)
        assert lambda_term(spec, doubled) == pytest.approx(
            2 * lambda_term(spec, default_params), rel=1e-14)

    def test_farther_slice_harvests_less(self, default_params):
        full = lambda_term(AnnulusSpec(2.0, 30.0), default_params)
        for delta in (5.0, 10.0, 20.0):
            assert lambda_term(AnnulusSpec(delta, 30.0), default_params) < full

    def test_annulus_spec_validation(self):
        with pytest.raises(ValueError):
            AnnulusSpec(0.5, 30.0)
        with pytest.raises(ValueError):
            AnnulusSpec(10.0, 10.0)


class TestQdib:
    def test_reference_value(self, default_params):
        assert q_dib(default_params) == pytest.approx(0.019544612989664166,
                                                      rel=1e-12)

    def test_retro_share_linear_in_antennas(self, default_params):
        base = lambda_term(AnnulusSpec(2.0, 30.0), default_params)
        one = dataclasses.replace(default_params, n_antennas=1)
        assert (q_dib(one) - base) * 500 == pytest.approx(
            q_dib(default_params) - base, rel=1e-12)

    def test_dense_network_degenerates_to_omni(self, default_params):
        dense = dataclasses.replace(default_params, er_density=100.0)
        base = lambda_term(AnnulusSpec(2.0, 30.0), dense)
        assert q_dib(dense) == pytest.approx(base, rel=0.002)

    def test_requires_more_than_one_receiver(self, default_params):
        sparse = dataclasses.replace(default_params, er_density=1e-5)
        with pytest.raises(ValueError):
            q_dib(sparse)

    def test_against_monte_carlo(self, default_params):
        config = ExperimentConfig(params=default_params,
                                  policy=Policy(kind="dib"),
                                  trials=30_000, seed=51)
        result = run_policy_experiment(config)
        assert result.estimate.mean == pytest.approx(q_dib(default_params),
                                                     rel=0.03)


class TestCcdf:
    def test_bottom_of_support_is_certain(self, default_params):
        floor = default_params.tx_power * 15.0 ** -3.0
        q = CcdfQuery(x=floor, d=15.0, reflector_inner=2.0, density=0.01)
        assert ccdf_total(q, default_params) == pytest.approx(1.0, abs=1e-12)

    def test_top_of_support_is_void_probability(self, default_params):
        params = dataclasses.replace(default_params, noise_power=0.0)
        floor = params.tx_power * 15.0 ** -3.0
        top = (params.n_antennas + 1) * floor
        for inner in (2.0, 10.0):
            q = CcdfQuery(x=top, d=15.0, reflector_inner=inner, density=0.01)
            void = math.exp(-0.01 * math.pi * (900.0 - inner ** 2))
            assert ccdf_total(q, params) == pytest.approx(void, rel=1e-9)

    def test_out_of_support_rejected(self, default_params):
        floor = default_params.tx_power * 15.0 ** -3.0
        for x in (0.5 * floor, 502.0 * floor):
            with pytest.raises(ValueError, match="support"):
                ccdf_total(CcdfQuery(x=x, d=15.0, reflector_inner=2.0,
                                     density=0.01), default_params)

    def test_reflector_inner_must_lie_in_annulus(self, default_params):
        floor = default_params.tx_power * 15.0 ** -3.0
        with pytest.raises(ValueError):
            ccdf_total(CcdfQuery(x=2 * floor, d=15.0, reflector_inner=1.0,
                                 density=0.01), default_params)

    def test_monotone_and_bounded(self, default_params):
        floor = default_params.tx_power * 15.0 ** -3.0
        ts = np.linspace(1.0, 501.0, 100)
        values = [ccdf_total(CcdfQuery(x=t * floor, d=15.0, reflector_inner=2.0,
                                       density=0.01), default_params)
                  for t in ts]
        values = np.array(values)
        assert np.all((values >= 0.0) & (values <= 1.0))
        assert np.all(np.diff(values) <= 1e-12)


class TestQbarRe:
    def test_no_interference_no_noise_is_full_gain(self, default_params):
        params = dataclasses.replace(default_params, noise_power=0.0)
        expected = params.n_antennas * params.tx_power * 30.0 ** -3.0
        assert qbar_re(30.0, 2.0, 0.0, params) == pytest.approx(expected,
                                                                rel=1e-9)

    def test_bounded(self, default_params):
        value = qbar_re(15.0, 2.0, 0.01, default_params)
        cap = default_params.n_antennas * default_params.tx_power * 15.0 ** -3.0
        assert 0.0 < value < cap

    def test_decreasing_in_density(self, default_params):
        values = [qbar_re(15.0, 2.0, dens, default_params)
                  for dens in (0.005, 0.01, 0.02, 0.04)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_distance_must_lie_in_annulus(self, default_params):
        with pytest.raises(ValueError):
            qbar_re(1.0, 2.0, 0.01, default_params)

    def test_against_independent_scipy_quadrature(self, default_params):
        d, inner, density = 15.0, 2.0, 0.01
        params = default_params
        m = params.n_antennas
        d2a = d ** (2 * params.path_loss_exp)

        def ccdf(t):
            if t >= m + 1.0:
                return 0.0
            y_stat = (t - 1.0) * d2a / (m + 1.0 - t)
            if y_stat <= 0.0:
                return 1.0
            noise_exp = y_stat * params.noise_power / (
                params.rf_dc_efficiency * params.tx_power
                * params.waveform_duration)
            radial, _ = integrate.quad(
                lambda r: r / (1.0 + r ** 6 / y_stat), inner,
                params.cell_radius, limit=200)
            return math.exp(-noise_exp) * math.exp(-2 * math.pi * density * radial)

        ref, _ = integrate.quad(ccdf, 1.0, m + 1.0, limit=400)
        ref *= params.tx_power * d ** -3.0
        assert qbar_re(d, inner, density, params) == pytest.approx(ref, rel=1e-6)

    def test_against_tagged_monte_carlo(self, default_params):
        config = ExperimentConfig(params=default_params,
                                  policy=Policy(kind="fb"), trials=30_000,
                                  seed=52, tagged_distance=30.0)
        result = run_policy_experiment(config, keep_samples=True)
        omni = default_params.tx_power * 30.0 ** -3.0
        mc_retro = result.estimate.mean - omni
        assert mc_retro == pytest.approx(
            qbar_re(30.0, 2.0, 0.01, default_params), rel=0.03)


class TestQfbRetro:
    def test_zero_width_annulus(self, default_params):
        assert q_fb_retro(30.0, 0.01, default_params) == 0.0

    def test_tolerance_self_consistency(self, default_params):
        coarse = q_fb_retro(2.0, 0.01, default_params, rel_tol=1e-8)
        fine = q_fb_retro(2.0, 0.01, default_params, rel_tol=5e-9)
        assert abs(fine - coarse) / fine < 1e-3

    def test_against_pooled_monte_carlo(self, default_params):
        analytic = (lambda_term(AnnulusSpec(2.0, 30.0), default_params)
                    + q_fb_retro(2.0, 0.01, default_params))
        config = ExperimentConfig(params=default_params,
                                  policy=Policy(kind="fb"), trials=30_000,
                                  seed=53)
        result = run_policy_experiment(config)
        assert result.estimate.mean == pytest.approx(analytic, rel=0.03)


class TestBinaryPolicyMeans:
    def test_dbb_endpoints(self, default_params):
        base = lambda_term(AnnulusSpec(2.0, 30.0), default_params)
        everyone = base + q_fb_retro(2.0, 0.01, default_params)
        assert q_dbb(2.0, default_params) == pytest.approx(everyone, rel=1e-10)
        assert q_dbb(30.0, default_params) == pytest.approx(base, rel=1e-12)

    def test_dbb_mixture_identity(self, default_params):
        delta = 10.0
        eps = (delta ** 2 - 4.0) / (900.0 - 4.0)
        assert eps == pytest.approx(96.0 / 896.0, rel=1e-14)
        expected = (eps * lambda_term(AnnulusSpec(2.0, delta), default_params)
                    + (1 - eps) * (lambda_term(AnnulusSpec(delta, 30.0),
                                               default_params)
                                   + q_fb_retro(delta, 0.01, default_params)))
        assert q_dbb(delta, default_params) == pytest.approx(expected, rel=1e-12)

    def test_dbb_range_check(self, default_params):
        with pytest.raises(ValueError):
            q_dbb(1.0, default_params)

    def test_pbb_endpoints(self, default_params):
        base = lambda_term(AnnulusSpec(2.0, 30.0), default_params)
        assert q_pbb(0.0, default_params) == base
        full = base + q_fb_retro(2.0, 0.01, default_params)
        assert q_pbb(1.0, default_params) == pytest.approx(full, rel=1e-12)
        with pytest.raises(ValueError):
            q_pbb(-0.1, default_params)

    def test_pbb_is_continuous(self, default_params):
        values = [q_pbb(p, default_params) for p in (0.499, 0.5, 0.501)]
        spread = max(values) - min(values)
        assert spread < 0.01 * values[1]

    def test_pbb_against_monte_carlo(self, default_params):
        config = ExperimentConfig(params=default_params,
                                  policy=Policy(kind="pbb", p=0.5),
                                  trials=30_000, seed=54)
        result = run_policy_experiment(config)
        assert result.estimate.mean == pytest.approx(
            q_pbb(0.5, default_params), rel=0.03)


class TestLimits:
    def test_values(self, default_params):
        dense, sparse = asymptotic_limits(default_params)
        assert dense == pytest.approx(1.0 / 960.0, rel=1e-14)
        assert sparse == pytest.approx(500.0 / 960.0, rel=1e-14)
        assert sparse / dense == pytest.approx(500.0, rel=1e-14)
