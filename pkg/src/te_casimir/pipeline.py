"""Frequency sweeps, integrated totals and the model-comparison ratios."""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .lifshitz import (
    BoundaryModel,
    Dielectric,
    PerfectConductor,
    SpectralSample,
    SurfaceImpedance,
    spectral_density,
)
from .quadrature import (
    DEFAULT_SETTINGS,
    QuadratureError,
    QuadratureSettings,
    integrate_log_samples,
    log_grid,
)
from .units import CONSTANTS, PlateGeometry

# Upper cutoffs sit far enough into the Bose tail (hbar w / kT ~ 50) that the
# totals are converged; see README for the impedance-model cutoff discussion.
DEFAULT_RANGES = {
    "perfect": (1e9, 2e15),
    "dielectric": (1e9, 2e15),
    "impedance": (1e9, 2e15),
}
# Above this the conducting-metal boundary condition is no longer justified.
IMPEDANCE_VALIDITY_LIMIT = 1e14

PREFACTOR_MODES = ("pi2", "pi")


def prefactor(mode: str) -> float:
    """hbar/(pi^2 c^3) ("pi2") or hbar/(pi c^3) ("pi")."""
    if mode == "pi2":
        return CONSTANTS.hbar / (math.pi**2 * CONSTANTS.c**3)
    if mode == "pi":
        return CONSTANTS.hbar / (math.pi * CONSTANTS.c**3)
    raise ValueError(f"prefactor_mode must be one of {PREFACTOR_MODES}, got {mode!r}")


def settings_fingerprint(model: dict, geometry: PlateGeometry, settings: QuadratureSettings,
                         omega_range) -> str:
    payload = {
        "model": model,
        "geometry": asdict(geometry),
        "settings": settings.to_dict(),
        "omega_range": [float(omega_range[0]), float(omega_range[1])],
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class SpectrumResult:
    model: dict
    geometry: PlateGeometry
    settings: QuadratureSettings
    omega_range: tuple
    samples: list
    total_c1: float
    total_c2: float
    err_c1: float = 0.0
    err_c2: float = 0.0
    prefactor_mode: str = "pi2"
    meta: dict = field(default_factory=dict)
    fingerprint: str = ""

    def __post_init__(self):
        if not self.fingerprint:
            self.fingerprint = self.expected_fingerprint()
        omegas = [s.omega for s in self.samples]
        if any(b <= a for a, b in zip(omegas, omegas[1:])):
            raise ValueError("samples must be strictly ascending in omega")

    def expected_fingerprint(self) -> str:
        return settings_fingerprint(self.model, self.geometry, self.settings, self.omega_range)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([s.omega for s in self.samples])

    @property
    def f_c1(self) -> np.ndarray:
        return np.array([s.f_c1 for s in self.samples])

    @property
    def f_c2(self) -> np.ndarray:
        return np.array([s.f_c2 for s in self.samples])

    def recompute_totals(self) -> tuple[tuple[float, float], tuple[float, float]]:
        """((total_c1, err_c1), (total_c2, err_c2)) from the stored samples."""
        if not self.samples:
            return (0.0, 0.0), (0.0, 0.0)
        w = self.omegas
        return integrate_log_samples(w, self.f_c1), integrate_log_samples(w, self.f_c2)


class SweepError(QuadratureError):
    def __init__(self, omega, exc: QuadratureError):
        super().__init__(str(exc), exc.value, exc.error, exc.worst_interval)
        self.omega = omega


def _sample(args):
    model, omega, geom, settings = args
    try:
        return spectral_density(model, omega, geom, settings)
    except QuadratureError as exc:
        raise SweepError(omega, exc) from None


def sweep(
    model: BoundaryModel,
    geom: PlateGeometry,
    omega_lo: float,
    omega_hi: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    *,
    prefactor_mode: str = "pi2",
    workers: int = 1,
) -> SpectrumResult:
    """Spectral densities on the outer log grid and their integrated totals."""
    prefactor(prefactor_mode)
    grid = log_grid(omega_lo, omega_hi, settings.outer_grid_points_per_decade)
    jobs = [(model, float(w), geom, settings) for w in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(_sample, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        samples = [_sample(job) for job in jobs]
    result = SpectrumResult(model.describe(), geom, settings, (float(omega_lo), float(omega_hi)),
                            samples, 0.0, 0.0, prefactor_mode=prefactor_mode)
    (result.total_c1, result.err_c1), (result.total_c2, result.err_c2) = result.recompute_totals()
    return result


def total_force(result: SpectrumResult) -> float:
    """Thermal TE force per unit area (dyn/cm^2); positive means attractive."""
    return (result.total_c1 + result.total_c2) * prefactor(result.prefactor_mode)


def ideal_te_reference(a: float) -> float:
    """TE half of the ideal zero-temperature Casimir pressure, pi^2 hbar c / (480 a^4)."""
    if not a > 0:
        raise ValueError("a must be > 0")
    return math.pi**2 * CONSTANTS.hbar * CONSTANTS.c / (480.0 * a**4)


@dataclass
class RatioReport:
    r_dielectric_c1: float
    r_dielectric_c2: float
    r_impedance_c2_over_c1: float
    r_impedance_total: float
    fingerprint: str
    omega_ranges: dict
    totals: dict = field(default_factory=dict)
    models: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def ratios(self) -> dict:
        return {
            "r_dielectric_c1": self.r_dielectric_c1,
            "r_dielectric_c2": self.r_dielectric_c2,
            "r_impedance_c2_over_c1": self.r_impedance_c2_over_c1,
            "r_impedance_total": self.r_impedance_total,
        }


def _ratio(num, den, name):
    if den == 0 or not math.isfinite(den):
        raise ZeroDivisionError(f"{name}: denominator is {den}")
    return num / den


def ratios_from_results(perfect: SpectrumResult, dielectric: SpectrumResult,
                        impedance: SpectrumResult, meta: dict | None = None) -> RatioReport:
    pc1 = perfect.total_c1
    imp_total = impedance.total_c1 + impedance.total_c2
    blob = "|".join(r.fingerprint for r in (perfect, dielectric, impedance))
    return RatioReport(
        r_dielectric_c1=_ratio(dielectric.total_c1, pc1, "r_dielectric_c1"),
        r_dielectric_c2=_ratio(dielectric.total_c2, pc1, "r_dielectric_c2"),
        r_impedance_c2_over_c1=_ratio(impedance.total_c2, impedance.total_c1, "r_impedance_c2_over_c1"),
        r_impedance_total=_ratio(imp_total, pc1, "r_impedance_total"),
        fingerprint=hashlib.sha256(blob.encode()).hexdigest()[:16],
        omega_ranges={r.model["kind"]: list(r.omega_range) for r in (perfect, dielectric, impedance)},
        totals={r.model["kind"]: {"total_c1": r.total_c1, "total_c2": r.total_c2,
                                  "err_c1": r.err_c1, "err_c2": r.err_c2}
                for r in (perfect, dielectric, impedance)},
        models={r.model["kind"]: r.model for r in (perfect, dielectric, impedance)},
        meta=dict(meta or {}),
    )


def ratio_report(
    geom: PlateGeometry = PlateGeometry(),
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    *,
    dielectric: Dielectric = Dielectric(),
    impedance: SurfaceImpedance = SurfaceImpedance(),
    ranges: dict | None = None,
    workers: int = 1,
) -> RatioReport:
    """Sweep all three boundary models and form the four comparison ratios:

    dielectric C1 / perfect C1, dielectric C2 / perfect C1,
    impedance C2 / impedance C1, impedance (C1 + C2) / perfect C1.
    """
    r = dict(DEFAULT_RANGES)
    r.update(ranges or {})
    perfect = sweep(PerfectConductor(), geom, *r["perfect"], settings, workers=workers)
    diel = sweep(dielectric, geom, *r["dielectric"], settings, workers=workers)
    imp = sweep(impedance, geom, *r["impedance"], settings, workers=workers)
    return ratios_from_results(perfect, diel, imp, {"geometry": asdict(geom), "settings": settings.to_dict()})


from .storage import load, save  # noqa: E402  (re-export; storage imports this module)
