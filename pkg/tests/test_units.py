import math

import pytest

from te_casimir import CONSTANTS, PlateGeometry, thermal_frequency


def test_constants_cgs():
    assert CONSTANTS.hbar == pytest.approx(1.054571e-27, rel=1e-6)
    assert CONSTANTS.c == pytest.approx(2.997925e10, rel=1e-6)
    assert CONSTANTS.k_boltzmann == pytest.approx(1.380649e-16, rel=1e-6)


def test_thermal_frequency_300k():
    assert thermal_frequency(300.0) == pytest.approx(3.9276e13, rel=1e-4)
    assert thermal_frequency(0.0) == 0.0
    with pytest.raises(ValueError):
        thermal_frequency(-1.0)


def test_geometry_defaults_and_validation():
    g = PlateGeometry()
    assert (g.separation_a, g.temperature_T, g.film_thickness_d) == (1e-4, 300.0, 1e-4)
    for bad in ({"separation_a": 0.0}, {"temperature_T": -1.0}, {"film_thickness_d": -1e-4},
                {"separation_a": math.nan}):
        with pytest.raises(ValueError):
            PlateGeometry(**bad)
