"""Plate material models: Drude-like permittivity fit, Kramers-Kronig
transform of tabulated eps2, skin depth and regime diagnostics."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .quadrature import DEFAULT_SETTINGS, QuadratureSettings, integrate_pv, log_grid
from .units import CONSTANTS, PlateGeometry

BOYER_LIMIT = 4e14  # s^-1, evaluated value of omega << eta^2 rho / 4 pi for Au
MEAN_FREE_PATH_AU = 3e-6  # cm, 300 K


@dataclass(frozen=True)
class DrudeLikeParams:
    """eps1 = -amp1/(1+(w/w0)^2),  eps2 = amp2/(w (1+(w/w0)^2))."""

    amp1: float = 1.48e4
    amp2: float = 1.8e18
    omega0: float = 3.3e13

    def __post_init__(self):
        if not (self.amp1 > 0 and self.amp2 > 0 and self.omega0 > 0):
            raise ValueError("amp1, amp2 and omega0 must all be > 0")

    @classmethod
    def kk_consistent(cls, amp2: float = 1.8e18, omega0: float = 3.3e13) -> DrudeLikeParams:
        """eps1 amplitude that the Kramers-Kronig transform of eps2 implies (amp2/omega0)."""
        return cls(amp1=amp2 / omega0, amp2=amp2, omega0=omega0)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ConductorParams:
    sigma: float = 3e17  # s^-1
    mu: float = 1.0

    def __post_init__(self):
        if not (self.sigma > 0 and self.mu > 0):
            raise ValueError("sigma and mu must be > 0")

    def to_dict(self) -> dict:
        return asdict(self)


# sigma implied by the low-frequency limit of eps2 = 4 pi sigma / omega
SIGMA_FROM_EPS2 = ConductorParams(sigma=DrudeLikeParams().amp2 / (4 * math.pi))


def drude_like_eps(omega, params: DrudeLikeParams = DrudeLikeParams()):
    """Complex permittivity eps1 + i eps2 of the low-frequency Au fit."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("omega must be > 0 (eps2 diverges at 0)")
    d = 1.0 + (omega / params.omega0) ** 2
    eps = -params.amp1 / d + 1j * params.amp2 / (omega * d)
    return eps[()] if eps.ndim == 0 else eps


class TableError(ValueError):
    """Malformed eps2 table; ``line`` is the 1-based file line when known."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True, eq=False)
class TabulatedEps2:
    """Imaginary permittivity sampled on a strictly increasing omega grid."""

    omega: np.ndarray
    eps2: np.ndarray
    _lines: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        omega = np.array(self.omega, dtype=float)
        eps2 = np.array(self.eps2, dtype=float)
        if omega.ndim != 1 or omega.shape != eps2.shape:
            raise TableError("omega and eps2 must be 1-d arrays of equal length")
        if len(omega) < 4:
            raise TableError(f"need at least 4 samples, got {len(omega)}")
        lines = self._lines or tuple(range(1, len(omega) + 1))
        for i in range(len(omega)):
            if not omega[i] > 0:
                raise TableError(f"omega must be > 0, got {omega[i]}", lines[i])
            if not eps2[i] >= 0:
                raise TableError(f"eps2 must be >= 0 (passive medium), got {eps2[i]}", lines[i])
            if i and not omega[i] > omega[i - 1]:
                raise TableError(f"omega not strictly increasing ({omega[i]} after {omega[i - 1]})", lines[i])
        omega.flags.writeable = False
        eps2.flags.writeable = False
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "eps2", eps2)

    @classmethod
    def from_function(cls, func, omega) -> TabulatedEps2:
        omega = np.asarray(omega, dtype=float)
        return cls(omega, func(omega))

    @classmethod
    def from_csv(cls, path) -> TabulatedEps2:
        """Read an ``omega,eps2`` CSV; lines starting with '#' are comments."""
        omega, eps2, lines = [], [], []
        header_seen = False
        with open(path, newline="") as fh:
            for lineno, raw in enumerate(fh, start=1):
                text = raw.strip()
                if not text or text.startswith("#"):
                    continue
                row = [c.strip() for c in next(csv.reader([text]))]
                if not header_seen:
                    if row[:2] != ["omega", "eps2"]:
                        raise TableError(f"expected header 'omega,eps2', got {text!r}", lineno)
                    header_seen = True
                    continue
                if len(row) != 2:
                    raise TableError(f"expected 2 columns, got {len(row)}", lineno)
                try:
                    omega.append(float(row[0]))
                    eps2.append(float(row[1]))
                except ValueError:
                    raise TableError(f"non-numeric value in {text!r}", lineno) from None
                lines.append(lineno)
        if not header_seen:
            raise TableError("missing header 'omega,eps2'")
        return cls(np.array(omega), np.array(eps2), tuple(lines))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("omega,eps2\n")
            for w, e in zip(self.omega, self.eps2):
                fh.write(f"{float(w)!r},{float(e)!r}\n")

    def interpolate(self, omega):
        """Piecewise power law between samples (linear in log-log), linear
        on segments touching eps2 == 0. Constant beyond the table ends."""
        x = np.clip(np.asarray(omega, dtype=float), self.omega[0], self.omega[-1])
        i = np.clip(np.searchsorted(self.omega, x, side="right") - 1, 0, len(self.omega) - 2)
        x0, x1 = self.omega[i], self.omega[i + 1]
        y0, y1 = self.eps2[i], self.eps2[i + 1]
        positive = (y0 > 0) & (y1 > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = np.log(np.where(positive, y1, 1.0) / np.where(positive, y0, 1.0)) / np.log(x1 / x0)
            power = y0 * (x / x0) ** slope
        linear = y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        out = np.where(positive, power, linear)
        return out[()] if out.ndim == 0 else out

    def descriptor(self) -> dict:
        import hashlib

        digest = hashlib.sha256(self.omega.tobytes() + self.eps2.tobytes()).hexdigest()[:16]
        return {"n_samples": len(self.omega), "omega_min": float(self.omega[0]),
                "omega_max": float(self.omega[-1]), "sha256": digest}


def _low_tail(c0, x0, omega):
    # int_0^x0 x (c0/x) / (x^2 - w^2) dx, x0 < w
    return c0 / (2.0 * omega) * math.log((omega - x0) / (omega + x0))


def _high_tail(c1, xn, omega):
    # int_xn^inf x (c1/x^3) / (x^2 - w^2) dx, w < xn
    r = omega / xn
    if r < 1e-3:
        series = r * r / 3.0 + r**4 / 5.0 + r**6 / 7.0
    else:
        series = math.atanh(r) / r - 1.0
    return c1 / (omega * omega * xn) * series


def kk_eps1(
    table: TabulatedEps2,
    omega: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    *,
    extrapolate: bool = True,
) -> float:
    """Real permittivity from tabulated eps2 by the Kramers-Kronig relation

        eps1(w) = 1 + (2/pi) PV int_0^inf x eps2(x) / (x^2 - w^2) dx.

    eps2 is interpolated linearly in log-log coordinates between samples. With ``extrapolate`` the
    table is continued by eps2 ~ 1/x below the first sample and ~ 1/x^3
    above the last one; both tails are integrated in closed form.
    """
    x = table.omega
    x0, xn = float(x[0]), float(x[-1])
    if xn / x0 < 1e2:
        raise ValueError(f"table spans only {xn / x0:.3g}x in omega; supply data covering at least two decades")
    if omega == x0 or omega == xn:
        raise ValueError(f"omega {omega:g} coincides with a table endpoint")
    if not x0 < omega < xn:
        raise ValueError(f"omega {omega:g} outside table support [{x0:g}, {xn:g}]")

    def f(t):
        return t * table.interpolate(t) / (t + omega)

    # x/(x^2-w^2) = [x/(x+w)] / (x-w): regular factor times the Cauchy kernel
    pv, _ = integrate_pv(f, omega, x0, xn, settings, points=x)
    total = pv
    if extrapolate:
        total += _low_tail(table.eps2[0] * x0, x0, omega)
        total += _high_tail(table.eps2[-1] * xn**3, xn, omega)
    return float(1.0 + 2.0 / math.pi * total)


def skin_depth(omega, cond: ConductorParams = ConductorParams()):
    """Field penetration depth c / sqrt(2 pi mu sigma omega), in cm."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("omega must be > 0")
    delta = CONSTANTS.c / np.sqrt(2.0 * math.pi * cond.mu * cond.sigma * omega)
    return delta[()] if delta.ndim == 0 else delta


@dataclass
class ValidityReport:
    skin_depth_curve: list  # [(omega, delta_cm), ...]
    mean_free_path: float
    dielectric_model_fails_above: float | None
    boyer_limit: float
    thick_film_above: float | None
    film_thickness_d: float
    cond: ConductorParams

    def to_dict(self) -> dict:
        return {
            "skin_depth_curve": [[float(w), float(d)] for w, d in self.skin_depth_curve],
            "mean_free_path": self.mean_free_path,
            "dielectric_model_fails_above": self.dielectric_model_fails_above,
            "boyer_limit": self.boyer_limit,
            "thick_film_above": self.thick_film_above,
            "film_thickness_d": self.film_thickness_d,
            "conductor": self.cond.to_dict(),
        }


def validity_report(
    cond: ConductorParams,
    geom: PlateGeometry,
    omega_range: tuple[float, float],
    *,
    mean_free_path: float = MEAN_FREE_PATH_AU,
    points_per_decade: int = 40,
) -> ValidityReport:
    """Flag where a local permittivity stops describing the metal.

    The dielectric description fails once the skin depth drops to the
    electron mean free path; the half-space approximation needs the skin
    depth below the film thickness. Thresholds are the first grid point
    meeting each condition (None if never met in range).
    """
    lo, hi = omega_range
    if not 0 < lo < hi:
        raise ValueError(f"need 0 < lo < hi, got {omega_range}")
    grid = log_grid(lo, hi, points_per_decade)
    delta = skin_depth(grid, cond)

    def first(mask):
        idx = np.flatnonzero(mask)
        return float(grid[idx[0]]) if idx.size else None

    return ValidityReport(
        skin_depth_curve=list(zip(grid.tolist(), delta.tolist())),
        mean_free_path=mean_free_path,
        dielectric_model_fails_above=first(delta <= mean_free_path),
        boyer_limit=BOYER_LIMIT,
        thick_film_above=first(delta < geom.film_thickness_d),
        film_thickness_d=geom.film_thickness_d,
        cond=cond,
    )
