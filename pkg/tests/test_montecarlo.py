import dataclasses

import numpy as np
import pytest

from retrowpt import (AnnulusSpec, ExperimentConfig, Policy, lambda_term,
                      run_policy_experiment, satisfaction_fraction)


def _config(params, policy, trials=1000, seed=0, **kw):
    return ExperimentConfig(params=params, policy=policy, trials=trials,
                            seed=seed, **kw)


class TestValidation:
    def test_bad_policy_kind(self, default_params):
        with pytest.raises(ValueError):
            _config(default_params, Policy(kind="beam")).validate()

    def test_dbb_needs_delta(self, default_params):
        with pytest.raises(ValueError):
            _config(default_params, Policy(kind="dbb")).validate()
        with pytest.raises(ValueError):
            _config(default_params, Policy(kind="dbb", delta=50.0)).validate()

    def test_pbb_needs_probability(self, default_params):
        with pytest.raises(ValueError):
            _config(default_params, Policy(kind="pbb", p=1.5)).validate()

    def test_htb_needs_target(self, default_params):
        with pytest.raises(ValueError):
            _config(default_params, Policy(kind="htb")).validate()
        with pytest.raises(ValueError):
            _config(default_params,
                    Policy(kind="htb", gamma=1e-3, max_iter=0)).validate()

    def test_trials_and_tagged_bounds(self, default_params):
        with pytest.raises(ValueError):
            _config(default_params, Policy(kind="fb"), trials=0).validate()
        with pytest.raises(ValueError):
            _config(default_params, Policy(kind="fb"),
                    tagged_distance=1.0).validate()
        with pytest.raises(ValueError):
            ExperimentConfig(params=default_params, policy=Policy(kind="fb"),
                             trials=10, seed=0, channel_mode="both").validate()


class TestEstimates:
    def test_silent_policy_matches_omni_mean(self, default_params):
        result = run_policy_experiment(
            _config(default_params, Policy(kind="none"), trials=20_000, seed=60))
        expected = lambda_term(AnnulusSpec(2.0, 30.0), default_params)
        assert result.estimate.mean == pytest.approx(expected, rel=0.02)
        assert result.metadata["estimator"] == "pooled_per_er"

    def test_full_csi_benchmark_mean(self, default_params):
        result = run_policy_experiment(
            _config(default_params, Policy(kind="perfect_bf"), trials=20_000,
                    seed=61))
        expected = 500.0 * lambda_term(AnnulusSpec(2.0, 30.0), default_params)
        assert result.estimate.mean == pytest.approx(expected, rel=0.02)

    def test_estimate_fields_are_consistent(self, default_params):
        result = run_policy_experiment(
            _config(default_params, Policy(kind="dib"), trials=2000, seed=62))
        est = result.estimate
        assert est.ci95[0] <= est.mean <= est.ci95[1]
        assert est.stderr >= 0.0
        assert est.n > 0

    def test_stderr_shrinks_like_root_trials(self, default_params):
        small = run_policy_experiment(
            _config(default_params, Policy(kind="fb"), trials=1000, seed=63))
        large = run_policy_experiment(
            _config(default_params, Policy(kind="fb"), trials=4000, seed=63))
        ratio = small.estimate.stderr / large.estimate.stderr
        assert ratio == pytest.approx(2.0, rel=0.2)

    def test_empty_trials_are_skipped_and_counted(self, default_params):
        # the pooled omni sample is heavy-tailed, so the tolerance is loose
        sparse = dataclasses.replace(default_params, er_density=2e-4)
        result = run_policy_experiment(
            _config(sparse, Policy(kind="none"), trials=12_000, seed=64))
        assert result.empty_trials > 0
        expected = lambda_term(AnnulusSpec(2.0, 30.0), sparse)
        assert result.estimate.mean == pytest.approx(expected, rel=0.25)

    def test_all_empty_raises(self, default_params):
        void = dataclasses.replace(default_params, er_density=0.0)
        with pytest.raises(RuntimeError, match="empty"):
            run_policy_experiment(_config(void, Policy(kind="none"), trials=5))

    def test_tagged_receiver_survives_empty_network(self, default_params):
        void = dataclasses.replace(default_params, er_density=0.0)
        result = run_policy_experiment(
            _config(void, Policy(kind="fb"), trials=50, seed=65,
                    tagged_distance=15.0), keep_samples=True)
        assert result.estimate.n == 50
        assert result.metadata["estimator"] == "tagged_er"

    def test_tagged_samples_are_one_per_trial(self, default_params):
        result = run_policy_experiment(
            _config(default_params, Policy(kind="fb"), trials=200, seed=66,
                    tagged_distance=15.0), keep_samples=True)
        assert result.samples.shape == (200,)

    def test_full_mode_agrees_with_reduced_on_average(self, default_params):
        params = dataclasses.replace(default_params, n_antennas=128)
        reduced = run_policy_experiment(
            _config(params, Policy(kind="fb"), trials=800, seed=67))
        full = run_policy_experiment(
            _config(params, Policy(kind="fb"), trials=800, seed=67,
                    channel_mode="full"))
        assert full.estimate.mean == pytest.approx(reduced.estimate.mean,
                                                   rel=0.25)
        assert full.metadata["evaluation"] == "two_phase"


class TestDeterminism:
    @pytest.mark.parametrize("workers", [2, 8])
    def test_worker_count_does_not_change_samples(self, default_params, workers):
        config = _config(default_params, Policy(kind="pbb", p=0.3),
                         trials=400, seed=68)
        serial = run_policy_experiment(config, workers=1, keep_samples=True)
        parallel = run_policy_experiment(config, workers=workers,
                                         keep_samples=True)
        assert np.array_equal(serial.samples, parallel.samples)
        assert serial.estimate == parallel.estimate

    def test_same_seed_same_result(self, default_params):
        config = _config(default_params, Policy(kind="htb", gamma=1e-4),
                         trials=60, seed=69)
        a = run_policy_experiment(config, keep_samples=True)
        b = run_policy_experiment(config, keep_samples=True)
        assert np.array_equal(a.samples, b.samples)


class TestSatisfaction:
    def test_zero_target_fully_satisfied(self, default_params):
        config = _config(default_params, Policy(kind="htb", gamma=0.0),
                         trials=50, seed=70)
        result = satisfaction_fraction(config)
        assert result.htb_fraction == 1.0
        assert result.fb_fraction == 1.0

    def test_impossible_target_never_satisfied(self, default_params):
        cap = (default_params.n_antennas * default_params.tx_power
               * default_params.exclusion_radius ** -3.0)
        config = _config(default_params, Policy(kind="htb", gamma=2 * cap),
                         trials=50, seed=71)
        result = satisfaction_fraction(config)
        assert result.htb_fraction == 0.0
        assert result.fb_fraction == 0.0

    def test_requires_htb_policy(self, default_params):
        with pytest.raises(ValueError, match="htb"):
            satisfaction_fraction(_config(default_params, Policy(kind="fb")))

    def test_target_tracking_beats_full_reflection(self, default_params):
        config = _config(default_params, Policy(kind="htb", gamma=1e-3),
                         trials=300, seed=72)
        result = satisfaction_fraction(config)
        assert result.htb_fraction >= result.fb_fraction
        assert result.n_receivers > 0

    def test_fraction_drops_when_density_doubles(self, default_params):
        base = satisfaction_fraction(
            _config(default_params, Policy(kind="htb", gamma=1e-3),
                    trials=300, seed=73))
        crowded = satisfaction_fraction(
            _config(dataclasses.replace(default_params, er_density=0.02),
                    Policy(kind="htb", gamma=1e-3), trials=300, seed=73))
        slack = 3.0 * (base.htb_stderr + crowded.htb_stderr)
        assert crowded.htb_fraction <= base.htb_fraction + slack

    def test_workers_do_not_change_fractions(self, default_params):
        config = _config(default_params, Policy(kind="htb", gamma=1e-4),
                         trials=120, seed=74)
        serial = satisfaction_fraction(config, workers=1)
        parallel = satisfaction_fraction(config, workers=4)
        assert serial == parallel
