import pytest

from retrowpt.units import dbm_to_watts, watts_to_dbm


@pytest.mark.parametrize("dbm,watts", [
    (30.0, 1.0),
    (40.0, 10.0),
    (0.0, 1e-3),
    (-150.0, 1e-18),
])
def test_reference_points(dbm, watts):
    assert dbm_to_watts(dbm) == pytest.approx(watts, rel=1e-12)
    assert watts_to_dbm(watts) == pytest.approx(dbm, abs=1e-9)


def test_round_trip():
    for dbm in (-120.5, -3.0, 17.25, 46.0):
        assert watts_to_dbm(dbm_to_watts(dbm)) == pytest.approx(dbm, abs=1e-9)


def test_nonpositive_power_rejected():
    with pytest.raises(ValueError):
        watts_to_dbm(0.0)
    with pytest.raises(ValueError):
        watts_to_dbm(-1.0)
