"""Seeded Monte Carlo engine over deployments, channels, and policies.

Every trial derives its own random substreams from (master seed, trial index,
purpose), so results are independent of worker count and scheduling. Samples
are collected in trial order and reduced with numpy's pairwise summation on
identically-ordered arrays, which makes repeated runs bit-identical.

Two estimators:

* population -- per-receiver totals pooled across trials (the ratio estimator
  sum(q) / sum(count)); unbiased for the typical-receiver mean. Trials with no
  receivers contribute nothing and are counted separately.
* tagged     -- one sample per trial from a receiver pinned at a fixed
  distance, appended to the drawn deployment (conditioning on its presence).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .harvest import ReflectionProfile, harvested_energy_asymptotic, simulate_two_phase
from .model import (CHANNEL_MODES, NetworkRealization, SystemParams,
                    draw_channels, sample_network, substream)
from .policies import (HtbTargets, dbb_profile, dib_profile, fb_profile,
                       htb_iterate, pbb_profile)

POLICY_KINDS = ("none", "dib", "fb", "dbb", "pbb", "htb", "perfect_bf")

# substream purposes
_NETWORK, _CHANNELS, _POLICY, _BEAM = 0, 1, 2, 3


@dataclass(frozen=True)
class Policy:
    """A reflection policy choice plus its parameters.

    kind      one of POLICY_KINDS; "none" keeps every receiver silent and
              "perfect_bf" is the full-CSI beamforming benchmark (per-receiver
              harvest eff * P * M * d^-a, no simulation).
    delta     threshold distance for "dbb" (m)
    p         reflection probability for "pbb"
    gamma     common retro-component target for "htb" (W)
    max_iter  iteration budget for "htb"
    """

    kind: str
    delta: float | None = None
    p: float | None = None
    gamma: float | None = None
    max_iter: int = 100

    def validate(self, params: SystemParams) -> None:
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind == "dbb":
            if self.delta is None:
                raise ValueError("dbb policy requires delta")
            if not params.exclusion_radius <= self.delta <= params.cell_radius:
                raise ValueError("delta must lie within the deployment annulus")
        if self.kind == "pbb":
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError("pbb policy requires p in [0, 1]")
        if self.kind == "htb":
            if self.gamma is None or self.gamma < 0.0:
                raise ValueError("htb policy requires a nonnegative gamma")
            if self.max_iter < 1:
                raise ValueError("htb policy requires max_iter >= 1")


@dataclass(frozen=True)
class ExperimentConfig:
    params: SystemParams
    policy: Policy
    trials: int
    seed: int
    channel_mode: str = "reduced"
    tagged_distance: float | None = None

    def validate(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.channel_mode not in CHANNEL_MODES:
            raise ValueError(f"channel_mode must be one of {CHANNEL_MODES}")
        self.policy.validate(self.params)
        if self.tagged_distance is not None:
            lo, hi = self.params.exclusion_radius, self.params.cell_radius
            if not lo <= self.tagged_distance <= hi:
                raise ValueError(
                    f"tagged_distance must lie in [{lo}, {hi}], "
                    f"got {self.tagged_distance}")


@dataclass(frozen=True)
class EstimateWithCI:
    mean: float
    stderr: float
    ci95: tuple[float, float]
    n: int


@dataclass(frozen=True)
class ExperimentResult:
    estimate: EstimateWithCI
    empty_trials: int
    metadata: dict = field(default_factory=dict)
    samples: np.ndarray | None = None


@dataclass(frozen=True)
class SatisfactionResult:
    """Fractions of receivers meeting the target, pooled across trials.

    The benchmark fraction is evaluated on the identical realizations with
    everyone fully reflecting. Standard errors use the pooled binomial
    approximation and ignore the weak within-trial correlation.
    """

    htb_fraction: float
    fb_fraction: float
    n_receivers: int
    trials_used: int

    @property
    def htb_stderr(self) -> float:
        return _binomial_stderr(self.htb_fraction, self.n_receivers)

    @property
    def fb_stderr(self) -> float:
        return _binomial_stderr(self.fb_fraction, self.n_receivers)


def _binomial_stderr(fraction: float, n: int) -> float:
    if n <= 0:
        return 0.0
    return math.sqrt(max(fraction * (1.0 - fraction), 0.0) / n)


def _build_profile(config: ExperimentConfig, net: NetworkRealization,
                   channels, trial: int) -> ReflectionProfile:
    params, policy = config.params, config.policy
    if policy.kind == "none":
        return ReflectionProfile(np.zeros(net.count))
    if policy.kind == "dib":
        return dib_profile(params, net)
    if policy.kind == "fb":
        return fb_profile(net)
    if policy.kind == "dbb":
        return dbb_profile(params, net, policy.delta)
    if policy.kind == "pbb":
        rng = substream(config.seed, trial, _POLICY)
        return pbb_profile(net, policy.p, rng)
    if policy.kind == "htb":
        targets = HtbTargets.common(policy.gamma, net.count)
        return htb_iterate(params, net, channels, targets,
                           max_iter=policy.max_iter).profile
    raise ValueError(f"unknown policy kind {policy.kind!r}")


def _trial_totals(config: ExperimentConfig, trial: int) -> np.ndarray | None:
    """Per-receiver harvested totals for one trial, or None if skipped."""
    params = config.params
    net = sample_network(params, substream(config.seed, trial, _NETWORK))
    if config.tagged_distance is not None:
        net = net.with_extra(config.tagged_distance)
    if net.count == 0:
        return None

    if config.policy.kind == "perfect_bf":
        totals = (params.rf_dc_efficiency * params.tx_power * params.n_antennas
                  * net.distances ** (-params.path_loss_exp))
    else:
        channels = draw_channels(params, net, config.channel_mode,
                                 substream(config.seed, trial, _CHANNELS))
        profile = _build_profile(config, net, channels, trial)
        if config.channel_mode == "full":
            report = simulate_two_phase(params, net, channels, profile,
                                        substream(config.seed, trial, _BEAM))
        else:
            report = harvested_energy_asymptotic(params, net, channels, profile)
        totals = report.total

    if config.tagged_distance is not None:
        return totals[-1:]
    return totals


def _chunk_bounds(trials: int, chunks: int) -> list[tuple[int, int]]:
    edges = np.linspace(0, trials, min(chunks, trials) + 1, dtype=int)
    return [(int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]


def _run_range(config: ExperimentConfig, lo: int, hi: int):
    parts, empty = [], 0
    for trial in range(lo, hi):
        totals = _trial_totals(config, trial)
        if totals is None:
            empty += 1
        else:
            parts.append(totals)
    return parts, empty


def _map_chunks(config: ExperimentConfig, workers: int, runner):
    if workers <= 1:
        return [runner(config, 0, config.trials)]
    bounds = _chunk_bounds(config.trials, workers * 4)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda span: runner(config, *span), bounds))


def run_policy_experiment(config: ExperimentConfig, workers: int = 1,
                          keep_samples: bool = False) -> ExperimentResult:
    """Estimate the mean harvested total power under one policy.

    Deterministic for a fixed seed regardless of `workers`. Returns the
    population (pooled per-receiver) estimate, or the tagged-receiver estimate
    when a tagged distance is pinned; per-sample values are attached when
    keep_samples is set.
    """
    config.validate()
    chunked = _map_chunks(config, workers, _run_range)
    parts: list[np.ndarray] = []
    empty = 0
    for chunk_parts, chunk_empty in chunked:
        parts.extend(chunk_parts)
        empty += chunk_empty
    samples = np.concatenate(parts) if parts else np.empty(0)
    if samples.size == 0:
        raise RuntimeError("no samples were produced; all trials were empty")

    n = int(samples.size)
    mean = float(np.sum(samples)) / n
    if n > 1:
        stderr = math.sqrt(float(np.sum((samples - mean) ** 2)) / (n - 1) / n)
    else:
        stderr = 0.0
    estimate = EstimateWithCI(mean=mean, stderr=stderr,
                              ci95=(mean - 1.96 * stderr, mean + 1.96 * stderr),
                              n=n)
    metadata = {
        "estimator": ("tagged_er" if config.tagged_distance is not None
                      else "pooled_per_er"),
        "evaluation": ("closed_benchmark" if config.policy.kind == "perfect_bf"
                       else ("two_phase" if config.channel_mode == "full"
                             else "asymptotic")),
        "policy": config.policy.kind,
    }
    return ExperimentResult(estimate=estimate, empty_trials=empty,
                            metadata=metadata,
                            samples=samples if keep_samples else None)


def _satisfaction_range(config: ExperimentConfig, lo: int, hi: int):
    params = config.params
    gamma = config.policy.gamma
    htb_hits = fb_hits = receivers = used = 0
    for trial in range(lo, hi):
        net = sample_network(params, substream(config.seed, trial, _NETWORK))
        if config.tagged_distance is not None:
            net = net.with_extra(config.tagged_distance)
        if net.count == 0:
            continue
        channels = draw_channels(params, net, config.channel_mode,
                                 substream(config.seed, trial, _CHANNELS))
        targets = HtbTargets.common(gamma, net.count)
        outcome = htb_iterate(params, net, channels, targets,
                              max_iter=config.policy.max_iter)
        htb_hits += int(np.count_nonzero(outcome.satisfied))
        fb_report = harvested_energy_asymptotic(params, net, channels,
                                                fb_profile(net))
        fb_hits += int(np.count_nonzero(
            fb_report.retro >= gamma * (1.0 - 1e-9)))
        receivers += net.count
        used += 1
    return htb_hits, fb_hits, receivers, used


def satisfaction_fraction(config: ExperimentConfig,
                          workers: int = 1) -> SatisfactionResult:
    """Fraction of receivers whose retro component reaches the common target.

    Runs the target-tracking policy, pools per-receiver satisfaction across
    trials, and evaluates the full-reflection benchmark on the identical
    deployments and channels.
    """
    config.validate()
    if config.policy.kind != "htb":
        raise ValueError("satisfaction_fraction requires an htb policy")
    chunked = _map_chunks(config, workers, _satisfaction_range)
    htb_hits = sum(c[0] for c in chunked)
    fb_hits = sum(c[1] for c in chunked)
    receivers = sum(c[2] for c in chunked)
    used = sum(c[3] for c in chunked)
    if receivers == 0:
        raise RuntimeError("no receivers were drawn across all trials")
    return SatisfactionResult(htb_fraction=htb_hits / receivers,
                              fb_fraction=fb_hits / receivers,
                              n_receivers=receivers, trials_used=used)
