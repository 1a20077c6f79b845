import pytest

from retrowpt import SystemParams


@pytest.fixture
def default_params() -> SystemParams:
    """Baseline configuration used throughout the experiments."""
    return SystemParams(
        n_antennas=500,
        er_density=0.01,
        exclusion_radius=2.0,
        cell_radius=30.0,
        path_loss_exp=3.0,
        tx_power=1.0,
        noise_power=1e-18,
        waveform_duration=1e-8,
        rf_dc_efficiency=1.0,
        carrier_freq=900e6,
    )
