"""Thermal TE-mode correction to the Casimir force between metal plates.

Spectral densities on the real (propagating) and imaginary (evanescent)
contours of the Lifshitz p-integral, for perfectly conducting plates,
a Drude-like dielectric, and a metallic surface-impedance boundary.
All quantities are Gaussian-CGS.
"""

from .units import CONSTANTS, PhysConstants, PlateGeometry, thermal_frequency
from .optics import (
    ConductorParams,
    DrudeLikeParams,
    TabulatedEps2,
    ValidityReport,
    drude_like_eps,
    kk_eps1,
    skin_depth,
    validity_report,
)
from .quadrature import (
    QuadratureError,
    QuadratureSettings,
    integrate_finite,
    integrate_log_grid,
    integrate_pv,
    integrate_semi_infinite,
)
from .lifshitz import (
    ContourPoint,
    Dielectric,
    PerfectConductor,
    SpectralSample,
    SurfaceImpedance,
    g_te,
    lifshitz_s,
    spectral_density,
    spectral_integrand,
    surface_alpha,
    te_ratio_dielectric,
    te_ratio_impedance,
    thermal_g,
)
from .pipeline import (
    RatioReport,
    SpectrumResult,
    ideal_te_reference,
    load,
    ratio_report,
    save,
    sweep,
    total_force,
)

__version__ = "0.1.0"
