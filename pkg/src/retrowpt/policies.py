"""Reflection policies: how each receiver picks its reflection coefficient.

Five strategies with different coordination costs:

* DIB  -- distance-inversion: beta grows with distance so the retro component
          is location-fair, full reflection at the cell edge.
* FB   -- full backscattering: everyone reflects everything.
* DBB  -- distance-based binary: reflect iff farther than a threshold.
* PBB  -- probabilistic binary: reflect with a common probability.
* HTB  -- harvesting-target: per-receiver targets met by a distributed
          power-control style fixed-point iteration, with a closed-form
          linear-system solution for the feasible case.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .harvest import ReflectionProfile, harvested_energy_asymptotic
from .model import ChannelRealization, NetworkRealization, SystemParams

# A target counts as satisfied when the retro component reaches it up to this
# relative slack.
TARGET_REL_TOL = 1e-9


def dib_profile(params: SystemParams, net: NetworkRealization) -> ReflectionProfile:
    """beta_i = (d_i / cell_radius)^(2a): reflection grows with distance."""
    return ReflectionProfile(
        (net.distances / params.cell_radius) ** (2.0 * params.path_loss_exp))


def fb_profile(net: NetworkRealization) -> ReflectionProfile:
    """Everyone fully reflects."""
    return ReflectionProfile(np.ones(net.count))


def dbb_profile(params: SystemParams, net: NetworkRealization,
                delta: float) -> ReflectionProfile:
    """Reflect fully iff strictly farther than `delta`, else stay silent."""
    if not params.exclusion_radius <= delta <= params.cell_radius:
        raise ValueError(
            f"delta must lie in [{params.exclusion_radius}, {params.cell_radius}], "
            f"got {delta}")
    return ReflectionProfile((net.distances > delta).astype(float))


def pbb_profile(net: NetworkRealization, p: float,
                rng: np.random.Generator) -> ReflectionProfile:
    """Reflect fully with probability `p`, independently per receiver."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return ReflectionProfile((rng.random(net.count) < p).astype(float))


@dataclass(frozen=True)
class HtbTargets:
    """Per-receiver retro-component harvesting targets (W, nonnegative)."""

    gammas: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gammas", np.asarray(self.gammas, dtype=float))
        if self.gammas.size and np.min(self.gammas) < 0.0:
            raise ValueError("targets must be nonnegative")

    @classmethod
    def common(cls, gamma: float, count: int) -> "HtbTargets":
        return cls(np.full(count, float(gamma)))


@dataclass(frozen=True)
class HtbOutcome:
    profile: ReflectionProfile
    converged: bool
    iterations: int
    satisfied: np.ndarray  # per-receiver: retro >= target within TARGET_REL_TOL


@dataclass(frozen=True)
class HtbSolution:
    """Closed-form result: a feasible profile, or an infeasibility report."""

    profile: ReflectionProfile | None
    feasible: bool
    reason: str = ""


def _retro_coefficients(params: SystemParams, net: NetworkRealization,
                        channels: ChannelRealization):
    """Per-receiver beam share coefficients of the large-array retro formula.

    retro_i = gain_i * beta_i / (sum_j load_j * beta_j + noise), with
    gain_i = eff P M d_i^-3a |g_i|^2 and load_j = d_j^-2a |g_j|^2.
    """
    a = params.path_loss_exp
    d = net.distances
    g2 = channels.gain_powers
    gain = (params.rf_dc_efficiency * params.tx_power * params.n_antennas
            * d ** (-3.0 * a) * g2)
    load = d ** (-2.0 * a) * g2
    return gain, load


def htb_iterate(params: SystemParams, net: NetworkRealization,
                channels: ChannelRealization, targets: HtbTargets,
                max_iter: int = 100, tol: float = 1e-10) -> HtbOutcome:
    """Distributed target-tracking iteration on the reflection coefficients.

    Synchronous update from an all-ones start:
        beta_i <- min(1, target_i / retro_i(beta) * beta_i)
    which for beta_i > 0 reduces to the numerically benign form
        beta_i <- min(1, target_i * (sum_j load_j beta_j + noise) / gain_i).
    A receiver at beta_i = 0 with a positive target gets beta_i = 1 (the
    target/0 = infinity convention); zero targets collapse to beta_i = 0.
    Channel gains are held fixed across iterations.
    """
    if targets.gammas.size != net.count:
        raise ValueError("one target per receiver is required")
    gain, load = _retro_coefficients(params, net, channels)
    noise = params.retro_noise
    gammas = targets.gammas

    betas = np.ones(net.count)
    iterations = 0
    converged = net.count == 0
    for _ in range(max_iter):
        iterations += 1
        interference = float(np.dot(load, betas)) + noise
        with np.errstate(divide="ignore", invalid="ignore"):
            new = np.minimum(1.0, gammas * interference / gain)
        zero = betas == 0.0
        new[zero & (gammas > 0.0)] = 1.0
        new[gammas == 0.0] = 0.0
        delta = float(np.max(np.abs(new - betas))) if net.count else 0.0
        betas = new
        if delta < tol:
            converged = True
            break

    profile = ReflectionProfile(betas)
    report = harvested_energy_asymptotic(params, net, channels, profile)
    satisfied = report.retro >= gammas * (1.0 - TARGET_REL_TOL)
    return HtbOutcome(profile=profile, converged=converged,
                      iterations=iterations, satisfied=satisfied)


def htb_closed_form(params: SystemParams, net: NetworkRealization,
                    channels: ChannelRealization,
                    targets: HtbTargets) -> HtbSolution:
    """Solve the targets-met condition retro_i(beta) = target_i exactly.

    Setting the retro component equal to the target for every receiver gives
    the linear system
        gain_i beta_i - target_i * sum_j load_j beta_j = target_i * noise,
    i.e. (diag(gain) - outer(target, load)) beta = target * noise. The
    solution is feasible iff every beta_i lies in (0, 1], where beta_i = 0 is
    acceptable exactly when target_i = 0.
    """
    if net.count == 0:
        raise ValueError("at least one receiver is required")
    if targets.gammas.size != net.count:
        raise ValueError("one target per receiver is required")
    gain, load = _retro_coefficients(params, net, channels)
    gammas = targets.gammas

    system = np.diag(gain) - np.outer(gammas, load)
    rhs = gammas * params.retro_noise
    try:
        betas = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        return HtbSolution(profile=None, feasible=False, reason="singular system")

    positive_ok = (betas > 0.0) | (gammas == 0.0)
    if np.any(betas > 1.0) or np.any(betas < 0.0) or not np.all(positive_ok):
        return HtbSolution(profile=None, feasible=False,
                           reason="solution leaves the unit interval")
    betas = np.where(gammas == 0.0, 0.0, betas)
    return HtbSolution(profile=ReflectionProfile(betas), feasible=True)
