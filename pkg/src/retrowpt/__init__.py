"""Retrodirective energy beamforming over backscatter networks.

A transmitter with a large antenna array broadcasts a sensing tone, receivers
passively reflect a tunable fraction of it, and the array retransmits the
phase conjugate of what it heard, beaming power back toward the reflectors.
The package simulates this end to end over random deployments, evaluates the
matching closed forms and quadrature expressions, and optimises the reflection
policies.
"""
from .analysis import (AnnulusSpec, CcdfQuery, asymptotic_limits, ccdf_total,
                       lambda_term, q_dbb, q_dib, q_fb_retro, q_pbb, qbar_re)
from .harvest import (HarvestReport, ReflectionProfile, conjugate_beam,
                      harvested_energy_asymptotic, simulate_two_phase)
from .model import (ChannelRealization, NetworkRealization, SystemParams,
                    draw_channels, sample_network, substream, validate_params)
from .montecarlo import (EstimateWithCI, ExperimentConfig, ExperimentResult,
                         Policy, SatisfactionResult, run_policy_experiment,
                         satisfaction_fraction)
from .optimize import OptResult, delta_star, p_star
from .policies import (HtbOutcome, HtbSolution, HtbTargets, dbb_profile,
                       dib_profile, fb_profile, htb_closed_form, htb_iterate,
                       pbb_profile)
from .quadrature import integrate_adaptive

__version__ = "0.1.0"

__all__ = [
    "AnnulusSpec", "CcdfQuery", "ChannelRealization", "EstimateWithCI",
    "ExperimentConfig", "ExperimentResult", "HarvestReport", "HtbOutcome",
    "HtbSolution", "HtbTargets", "NetworkRealization", "OptResult", "Policy",
    "ReflectionProfile", "SatisfactionResult", "SystemParams",
    "asymptotic_limits", "ccdf_total", "conjugate_beam", "dbb_profile",
    "delta_star", "dib_profile", "draw_channels", "fb_profile",
    "harvested_energy_asymptotic", "htb_closed_form", "htb_iterate",
    "integrate_adaptive", "lambda_term", "p_star", "pbb_profile", "q_dbb",
    "q_dib", "q_fb_retro", "q_pbb", "qbar_re", "run_policy_experiment",
    "sample_network", "satisfaction_fraction", "simulate_two_phase",
    "substream", "validate_params",
]
