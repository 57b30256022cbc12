"""TE-mode integrands of the Lifshitz thermal spectrum.

The spectral density at real angular frequency w is

    F_w = w^3 g(w) Re int_C p^2 dp / (R e^{-2 i p w a / c} - 1)

with g the Bose factor and R the squared inverse TE reflection amplitude:
1 for a perfect conductor, ((s+p)/(s-p))^2 for a dielectric half-space,
((alpha + i w p/c)/(alpha - i w p/c))^2 for the surface-impedance wall.
C1 runs over real p from 1 to 0 (propagating waves), C2 over p = i q,
q from 0 to infinity (evanescent waves).

The bracket is formed as (R - 1) e^z + expm1(z) with R - 1 computed in
closed form, which keeps full relative precision when the bracket is
small (low frequency, nearly perfect reflection).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from .optics import ConductorParams, DrudeLikeParams, TabulatedEps2, drude_like_eps, kk_eps1
from .quadrature import (
    DEFAULT_SETTINGS,
    QuadratureError,
    QuadratureSettings,
    integrate_finite,
    integrate_semi_infinite,
)
from .units import CONSTANTS, PlateGeometry

EXP_GUARD = 700.0


def thermal_g(omega, T: float):
    """Bose occupation 1/(exp(hbar w / kT) - 1); exactly 0 past the overflow guard."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0) or not T > 0:
        raise ValueError("need omega > 0 and T > 0")
    x = CONSTANTS.hbar * omega / (CONSTANTS.k_boltzmann * T)
    with np.errstate(over="ignore"):
        g = np.where(x > EXP_GUARD, 0.0, 1.0 / np.expm1(np.minimum(x, EXP_GUARD)))
    return g[()] if g.ndim == 0 else g


def lifshitz_s(eps, p):
    """sqrt(eps - 1 + p^2) on the branch Im s >= 0 (Re s >= 0 when Im s == 0).

    With exp(-i w t) time dependence this makes exp(i w s z / c) decay
    into the plate.
    """
    s = np.sqrt(np.asarray(eps - 1.0 + np.asarray(p) ** 2, dtype=complex))
    flip = (s.imag < 0) | ((s.imag == 0) & (s.real < 0))
    s = np.where(flip, -s, s)
    return s[()] if s.ndim == 0 else s


def te_ratio_dielectric(s, p):
    """((s+p)/(s-p))^2."""
    s = np.asarray(s, dtype=complex)
    p = np.asarray(p, dtype=complex)
    if np.any(s == p):
        raise ZeroDivisionError("s == p: plate indistinguishable from vacuum")
    r = ((s + p) / (s - p)) ** 2
    return r[()] if r.ndim == 0 else r


def surface_alpha(omega, cond: ConductorParams = ConductorParams()):
    """Boundary coefficient in dH/dz = +-alpha H for a good conductor, in cm^-1.

    alpha = i sqrt(w / 8 pi sigma) (w/c) (1 - i) = (1 + i) sqrt(w / 8 pi sigma) w/c.
    Valid while the displacement current in the metal is negligible; a
    warning is issued for omega >= sigma/10.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("omega must be > 0")
    if np.any(omega >= cond.sigma / 10.0):
        warnings.warn(f"omega >= sigma/10 (sigma = {cond.sigma:g}): displacement current no longer negligible",
                      RuntimeWarning, stacklevel=2)
    alpha = np.asarray(1j * np.sqrt(omega / (8.0 * math.pi * cond.sigma)) * (omega / CONSTANTS.c) * (1.0 - 1j))
    return alpha[()] if alpha.ndim == 0 else alpha


def te_ratio_impedance(alpha, omega, p):
    """((alpha + i w p/c)/(alpha - i w p/c))^2."""
    k = 1j * np.asarray(omega, dtype=float) * np.asarray(p, dtype=complex) / CONSTANTS.c
    if np.any(alpha == k):
        raise ZeroDivisionError("alpha == i w p / c: pole of the impedance reflection factor")
    r = ((alpha + k) / (alpha - k)) ** 2
    return r[()] if r.ndim == 0 else r


def _cexpm1(z):
    # exp(z) - 1 without cancellation for small |z|
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    with np.errstate(over="ignore", invalid="ignore"):
        re = np.expm1(x) * np.cos(y) - 2.0 * np.sin(0.5 * y) ** 2
        im = np.exp(x) * np.sin(y)
    return re + 1j * im


def g_te(K, alpha, a: float):
    """Mode function ((alpha+K)/(alpha-K))^2 exp(-2 K a) - 1 of the impedance cavity.

    Its zeros are the TE eigenvalues K between walls obeying dH/dz = -alpha H
    at z = 0 and +alpha H at z = a (outward normals, exp(-i w t)). With
    K = i w p / c it is exactly the bracket of the impedance spectral density.
    """
    K = np.asarray(K, dtype=complex)
    alpha = np.asarray(alpha, dtype=complex)
    if np.any(alpha == K):
        raise ZeroDivisionError("alpha == K: pole of the mode function")
    excess = 4.0 * alpha * K / (alpha - K) ** 2
    z = -2.0 * K * a
    out = excess * np.exp(z) + _cexpm1(z)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------- models


@dataclass(frozen=True)
class PerfectConductor:
    kind = "perfect"

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class Dielectric:
    """Bulk permittivity half-space: Drude-like fit, or eps2 table + Kramers-Kronig."""

    source: Union[DrudeLikeParams, TabulatedEps2] = DrudeLikeParams()
    kind = "dielectric"

    def permittivity(self, omega: float, settings: QuadratureSettings = DEFAULT_SETTINGS) -> complex:
        if isinstance(self.source, TabulatedEps2):
            eps2 = float(self.source.interpolate(omega))
            return complex(kk_eps1(self.source, omega, settings), eps2)
        return complex(drude_like_eps(omega, self.source))

    def describe(self) -> dict:
        if isinstance(self.source, TabulatedEps2):
            return {"kind": self.kind, "source": "tabulated", **self.source.descriptor()}
        return {"kind": self.kind, "source": "drude_like", **self.source.to_dict()}


@dataclass(frozen=True)
class SurfaceImpedance:
    cond: ConductorParams = ConductorParams()
    kind = "impedance"

    def describe(self) -> dict:
        return {"kind": self.kind, **self.cond.to_dict()}


BoundaryModel = Union[PerfectConductor, Dielectric, SurfaceImpedance]


@dataclass(frozen=True)
class ContourPoint:
    """Point on C1 (p = t, 0 <= t <= 1) or C2 (p = i t, t >= 0)."""

    path: str
    t: float

    def __post_init__(self):
        if self.path not in ("C1", "C2"):
            raise ValueError(f"path must be 'C1' or 'C2', got {self.path!r}")
        if self.t < 0 or (self.path == "C1" and self.t > 1):
            raise ValueError(f"t = {self.t} outside the {self.path} range")

    @property
    def p(self) -> complex:
        return complex(self.t) if self.path == "C1" else 1j * self.t


@dataclass(frozen=True)
class SpectralSample:
    omega: float
    f_c1: float
    f_c2: float
    err_c1: float = 0.0
    err_c2: float = 0.0
    model: str = ""


def _excess_factory(model, omega, settings):
    """Return (p -> R - 1) for the model at fixed omega, plus scale hints."""
    if isinstance(model, PerfectConductor):
        return (lambda p: np.zeros(np.shape(p), dtype=complex)), {}
    if isinstance(model, Dielectric):
        eps = model.permittivity(omega, settings)

        def excess(p):
            s = lifshitz_s(eps, p)
            if np.any(s == p):
                raise ZeroDivisionError("s == p: plate indistinguishable from vacuum")
            return 4.0 * s * p / (s - p) ** 2

        return excess, {"q": [math.sqrt(abs(eps - 1.0))]}
    if isinstance(model, SurfaceImpedance):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            alpha = surface_alpha(omega, model.cond)
        w_c = omega / CONSTANTS.c

        def excess(p):
            k = 1j * w_c * np.asarray(p, dtype=complex)
            if np.any(alpha == k):
                raise ZeroDivisionError("alpha == i w p / c")
            return 4.0 * alpha * k / (alpha - k) ** 2

        p_star = abs(alpha) / w_c
        return excess, {"p": [p_star], "q": [p_star], "delta": 4.0 * p_star}
    raise TypeError(f"unknown boundary model {model!r}")


def _integrand(excess, omega, p, a):
    p = np.asarray(p, dtype=complex)
    z = -2j * p * omega * a / CONSTANTS.c
    with np.errstate(over="ignore"):
        bracket = excess(p) * np.exp(z) + _cexpm1(z)
    return p * p / bracket


def spectral_integrand(model: BoundaryModel, omega: float, point, geom: PlateGeometry,
                       settings: QuadratureSettings = DEFAULT_SETTINGS):
    """p^2 / (R exp(-2 i p w a / c) - 1) at a ContourPoint or complex p (array ok)."""
    p = point.p if isinstance(point, ContourPoint) else point
    excess, _ = _excess_factory(model, omega, settings)
    out = _integrand(excess, omega, p, geom.separation_a)
    return out[()] if np.ndim(out) == 0 else out


def spectral_density(model: BoundaryModel, omega: float, geom: PlateGeometry,
                     settings: QuadratureSettings = DEFAULT_SETTINGS) -> SpectralSample:
    """C1 and C2 contributions to F_w (units s^-3, prefactor hbar/pi^2 c^3 omitted).

    C1 is traversed from p = 1 to 0, which makes the perfect-conductor value
    w^3 g / 6 > 0 (attractive).
    """
    if not omega > 0:
        raise ValueError("omega must be > 0")
    T = geom.temperature_T
    weight = omega**3 * thermal_g(omega, T) if T > 0 else 0.0
    if weight == 0.0:
        return SpectralSample(omega, 0.0, 0.0, 0.0, 0.0, model.kind)

    a = geom.separation_a
    x = omega * a / CONSTANTS.c
    excess, hints = _excess_factory(model, omega, settings)

    def c1(t):
        return _integrand(excess, omega, t, a).real

    def c2(q):
        return (1j * _integrand(excess, omega, 1j * q, a)).real

    p_pts = list(hints.get("p", []))
    if "delta" in hints:
        p_pts.append(math.sqrt(hints["delta"] / (2.0 * x)))
    q_pts = list(hints.get("q", [])) + [1.0 / x]
    try:
        v1, e1 = integrate_finite(c1, 0.0, 1.0, settings, phase_span=2.0 * x, points=p_pts)
        v2, e2 = integrate_semi_infinite(c2, 2.0 * x, settings, points=q_pts)
    except QuadratureError as exc:
        raise QuadratureError(f"omega = {omega:.6g}: {exc}", exc.value, exc.error, exc.worst_interval) from exc
    return SpectralSample(float(omega), float(-weight * v1), float(weight * v2),
                          float(weight * e1), float(weight * e2), model.kind)
