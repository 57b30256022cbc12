"""Physical constants and plate geometry (Gaussian-CGS: cm, s, K, erg)."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysConstants:
    hbar: float = 1.054571e-27  # erg s
    c: float = 2.997925e10  # cm/s
    k_boltzmann: float = 1.380649e-16  # erg/K


CONSTANTS = PhysConstants()


@dataclass(frozen=True)
class PlateGeometry:
    """Two identical plates in vacuum.

    ``film_thickness_d`` is only used by the skin-depth diagnostics; the
    spectral densities treat the plates as half-spaces.
    """

    separation_a: float = 1e-4
    temperature_T: float = 300.0
    film_thickness_d: float = 1e-4

    def __post_init__(self):
        if not self.separation_a > 0:
            raise ValueError(f"separation_a must be > 0, got {self.separation_a}")
        if not self.temperature_T >= 0:
            raise ValueError(f"temperature_T must be >= 0, got {self.temperature_T}")
        if not self.film_thickness_d > 0:
            raise ValueError(f"film_thickness_d must be > 0, got {self.film_thickness_d}")


def thermal_frequency(T: float) -> float:
    """Angular frequency kT/hbar in s^-1."""
    if T < 0:
        raise ValueError(f"temperature must be >= 0, got {T}")
    return CONSTANTS.k_boltzmann * T / CONSTANTS.hbar
