"""System parameters, random receiver deployment, and fading channels.

All quantities are strict SI (watts, metres, seconds). The transmitter sits at
the origin with a large antenna array; energy receivers are dropped by a
homogeneous Poisson point process on an annulus between an exclusion radius
(no receiver may be closer) and the cell radius. Fading is Rayleigh block
fading: independent across receivers and redrawn on every call.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

CHANNEL_MODES = ("full", "reduced")


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of one deployment.

    n_antennas        transmit array size (>= 1)
    er_density        receiver density per m^2 (>= 0)
    exclusion_radius  inner keep-out radius in m (> 1)
    cell_radius       outer cell radius in m (> exclusion_radius)
    path_loss_exp     path-loss exponent (> 2; the closed forms are singular at 2)
    tx_power          transmit power in W (> 0)
    noise_power       noise power in W (>= 0)
    waveform_duration sensing waveform duration in s (> 0)
    rf_dc_efficiency  RF-to-DC conversion efficiency in (0, 1]
    carrier_freq      carrier frequency in Hz; recorded only, enters no formula
                      (the model is baseband)
    """

    n_antennas: int
    er_density: float
    exclusion_radius: float
    cell_radius: float
    path_loss_exp: float
    tx_power: float
    noise_power: float
    waveform_duration: float
    rf_dc_efficiency: float = 1.0
    carrier_freq: float = 900e6

    def __post_init__(self):
        if self.n_antennas < 1:
            raise ValueError(f"n_antennas must be >= 1, got {self.n_antennas}")
        if self.er_density < 0:
            raise ValueError(f"er_density must be >= 0, got {self.er_density}")
        if not self.exclusion_radius > 1.0:
            raise ValueError(
                f"exclusion_radius must exceed 1 m, got {self.exclusion_radius}")
        if not self.cell_radius > self.exclusion_radius:
            raise ValueError(
                f"cell_radius ({self.cell_radius}) must exceed the exclusion "
                f"radius ({self.exclusion_radius})")
        if not self.path_loss_exp > 2.0:
            raise ValueError(
                f"path_loss_exp must exceed 2, got {self.path_loss_exp}")
        if not self.tx_power > 0:
            raise ValueError(f"tx_power must be positive, got {self.tx_power}")
        if self.noise_power < 0:
            raise ValueError(f"noise_power must be >= 0, got {self.noise_power}")
        if not self.waveform_duration > 0:
            raise ValueError(
                f"waveform_duration must be positive, got {self.waveform_duration}")
        if not 0.0 < self.rf_dc_efficiency <= 1.0:
            raise ValueError(
                f"rf_dc_efficiency must lie in (0, 1], got {self.rf_dc_efficiency}")
        if self.carrier_freq <= 0:
            raise ValueError(f"carrier_freq must be positive, got {self.carrier_freq}")
        # Sensing and retransmission stay orthogonal only while the waveform is
        # shorter than the shortest round trip.
        round_trip = 2.0 * self.exclusion_radius / SPEED_OF_LIGHT
        if self.waveform_duration >= round_trip:
            warnings.warn(
                f"waveform_duration {self.waveform_duration:g} s is not shorter "
                f"than the shortest round-trip delay {round_trip:g} s; sensing "
                "and retransmission overlap in time",
                UserWarning,
                stacklevel=2,
            )

    @property
    def annulus_area(self) -> float:
        return math.pi * (self.cell_radius ** 2 - self.exclusion_radius ** 2)

    @property
    def expected_er_count(self) -> float:
        return self.er_density * self.annulus_area

    @property
    def retro_noise(self) -> float:
        """Effective noise term in the retro-component denominator (per antenna
        count, normalised by tx power and waveform duration)."""
        return self.n_antennas * self.noise_power / (
            self.tx_power * self.waveform_duration)


def validate_params(raw_params: Mapping[str, float]) -> SystemParams:
    """Build validated SystemParams from a mapping of SI-valued fields."""
    known = SystemParams.__dataclass_fields__
    unknown = set(raw_params) - set(known)
    if unknown:
        raise ValueError(f"unknown parameter fields: {sorted(unknown)}")
    kwargs = dict(raw_params)
    if "n_antennas" in kwargs:
        kwargs["n_antennas"] = int(kwargs["n_antennas"])
    return SystemParams(**kwargs)


@dataclass(frozen=True)
class NetworkRealization:
    """One deployment draw: per-receiver distances and bearing angles.

    Only distances enter the energy formulas; angles are kept for plotting
    and debugging.
    """

    distances: np.ndarray
    angles: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "distances", np.asarray(self.distances, dtype=float))
        object.__setattr__(self, "angles", np.asarray(self.angles, dtype=float))
        if self.distances.shape != self.angles.shape:
            raise ValueError("distances and angles must have matching shapes")

    @property
    def count(self) -> int:
        return int(self.distances.size)

    def with_extra(self, distance: float, angle: float = 0.0) -> "NetworkRealization":
        """Copy with one pinned receiver appended (conditioning on a tagged node)."""
        return NetworkRealization(
            distances=np.append(self.distances, float(distance)),
            angles=np.append(self.angles, float(angle)),
        )


@dataclass(frozen=True)
class ChannelRealization:
    """Per-receiver fading for one block.

    mode "full" carries the complex fading vectors (count x n_antennas) and the
    derived combined-gain powers |g_i|^2 where g_i is the sum over antennas;
    mode "reduced" carries only the gain powers, drawn from their exact
    distribution (exponential with mean n_antennas).
    """

    mode: str
    gain_powers: np.ndarray
    vectors: np.ndarray | None = None

    def __post_init__(self):
        if self.mode not in CHANNEL_MODES:
            raise ValueError(f"mode must be one of {CHANNEL_MODES}, got {self.mode!r}")
        object.__setattr__(self, "gain_powers",
                           np.asarray(self.gain_powers, dtype=float))
        if self.mode == "full" and self.vectors is None:
            raise ValueError("full mode requires the fading vectors")

    @property
    def count(self) -> int:
        return int(self.gain_powers.size)


def substream(seed: int, *key: int) -> np.random.Generator:
    """Child generator for (seed, *key).

    This is the package-wide stream-splitting rule: every random draw belongs
    to a (trial index, purpose) key derived from one master seed, so results
    are reproducible independently of scheduling or worker count.
    """
    return np.random.default_rng(np.random.SeedSequence((int(seed),) + tuple(int(k) for k in key)))


def sample_network(params: SystemParams, rng: np.random.Generator) -> NetworkRealization:
    """Draw one Poisson deployment on the annulus.

    The count is Poisson with mean density * annulus area; given the count,
    positions are i.i.d. uniform on the annulus (radial density proportional
    to the radius).
    """
    count = int(rng.poisson(params.expected_er_count))
    radii_sq = rng.uniform(params.exclusion_radius ** 2, params.cell_radius ** 2,
                           size=count)
    angles = rng.uniform(0.0, 2.0 * math.pi, size=count)
    return NetworkRealization(distances=np.sqrt(radii_sq), angles=angles)


def draw_channels(params: SystemParams, net: NetworkRealization,
                  mode: str = "reduced",
                  rng: np.random.Generator | None = None) -> ChannelRealization:
    """Draw one fading block for every receiver in the realization.

    Full mode draws unit-variance circularly-symmetric complex Gaussian
    vectors; the gain power accessor is then exactly |sum of entries|^2.
    Reduced mode draws the gain powers directly (exponential, mean n_antennas),
    which is their exact law and is much cheaper when the vectors are unused.
    """
    if rng is None:
        raise ValueError("an explicit random generator is required")
    k, m = net.count, params.n_antennas
    if mode == "full":
        vectors = (rng.standard_normal((k, m)) + 1j * rng.standard_normal((k, m)))
        vectors *= 1.0 / math.sqrt(2.0)
        combined = vectors.sum(axis=1)
        return ChannelRealization(mode="full",
                                  gain_powers=np.abs(combined) ** 2,
                                  vectors=vectors)
    if mode == "reduced":
        return ChannelRealization(mode="reduced",
                                  gain_powers=rng.exponential(scale=float(m), size=k))
    raise ValueError(f"mode must be one of {CHANNEL_MODES}, got {mode!r}")
