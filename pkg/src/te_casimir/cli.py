"""Command-line front end.

Exit codes: 0 success, 2 configuration/input error, 3 numerical failure.
Precedence of settings: command-line flags > ``--config`` JSON > defaults.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .lifshitz import Dielectric, PerfectConductor, SurfaceImpedance
from .optics import (
    MEAN_FREE_PATH_AU,
    ConductorParams,
    DrudeLikeParams,
    TableError,
    TabulatedEps2,
    kk_eps1,
    validity_report,
)
from .pipeline import (
    DEFAULT_RANGES,
    IMPEDANCE_VALIDITY_LIMIT,
    ideal_te_reference,
    prefactor,
    ratios_from_results,
    sweep,
    total_force,
)
from .quadrature import QuadratureError, QuadratureSettings
from .storage import atomic_write_text, save
from .units import PlateGeometry

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SIGMA_PRESETS = {"au": 3e17, "eps2-limit": DrudeLikeParams().amp2 / (4 * math.pi)}
REFERENCE_VALUES = {
    "r_dielectric_c1": 0.95,
    "r_dielectric_c2": -169.0,
    "r_impedance_c2_over_c1": 1.47,
    "r_impedance_total": 1.75,
}

_LENGTH_UNITS = {"nm": 1e-7, "um": 1e-4, "μm": 1e-4, "µm": 1e-4, "mm": 0.1, "cm": 1.0, "m": 100.0}


class ConfigError(ValueError):
    pass


def parse_length(text) -> float:
    """'1um', '0.5 mm', '1e-4cm' -> cm. A unit suffix is required."""
    m = re.fullmatch(r"\s*([-+0-9.eE]+)\s*([a-zA-Zμµ]+)\s*", str(text))
    if not m or m.group(2) not in _LENGTH_UNITS:
        raise ConfigError(f"length {text!r} needs a unit suffix ({', '.join(_LENGTH_UNITS)})")
    try:
        value = float(m.group(1)) * _LENGTH_UNITS[m.group(2)]
    except ValueError:
        raise ConfigError(f"bad number in length {text!r}") from None
    if not value > 0:
        raise ConfigError(f"length {text!r} must be > 0")
    return value


def parse_temperature(text) -> float:
    m = re.fullmatch(r"\s*([-+0-9.eE]+)\s*K?\s*", str(text))
    try:
        value = float(m.group(1)) if m else float("nan")
    except ValueError:
        value = float("nan")
    if not value >= 0:
        raise ConfigError(f"temperature {text!r} must be a number >= 0 (kelvin)")
    return value


def _add_common(p):
    p.add_argument("--config", help="flat JSON file of option values (flags override it)")
    p.add_argument("--separation", default="1um", help="plate separation with unit, e.g. 1um (default)")
    p.add_argument("--temperature", default="300", help="temperature in K (default 300)")
    p.add_argument("--film-thickness", default="1um", help="film thickness with unit (diagnostics only)")
    q = p.add_argument_group("quadrature")
    d = QuadratureSettings()
    q.add_argument("--rel-tol", type=float, default=d.rel_tol)
    q.add_argument("--abs-tol", type=float, default=d.abs_tol)
    q.add_argument("--max-subdivisions", type=int, default=d.max_subdivisions)
    q.add_argument("--c2-cutoff-eps", type=float, default=d.c2_cutoff_eps)
    q.add_argument("--outer-rel-tol", type=float, default=d.outer_rel_tol)
    q.add_argument("--points-per-decade", type=int, default=d.outer_grid_points_per_decade)
    p.add_argument("--prefactor", choices=("pi2", "pi"), default="pi2",
                   help="hbar/(pi^2 c^3) (default) or hbar/(pi c^3)")
    p.add_argument("--workers", type=int, default=1, help="processes for the omega sweep")


def _add_model(p, with_model=True):
    if with_model:
        p.add_argument("--model", choices=("perfect", "dielectric", "impedance"),
                       help="boundary model (required)")
    m = p.add_argument_group("material")
    d = DrudeLikeParams()
    m.add_argument("--permittivity", choices=("fit", "drude-kk"), default="fit",
                   help="dielectric eps: printed low-frequency fit, or eps1 amplitude implied by eps2 (amp2/omega0)")
    m.add_argument("--amp1", type=float, default=d.amp1)
    m.add_argument("--amp2", type=float, default=d.amp2)
    m.add_argument("--omega0", type=float, default=d.omega0)
    m.add_argument("--eps-table", help="omega,eps2 CSV; eps1 from Kramers-Kronig")
    m.add_argument("--sigma", type=float, default=None, help="conductivity in s^-1 (default 3e17)")
    m.add_argument("--sigma-preset", choices=tuple(SIGMA_PRESETS), default="au")
    m.add_argument("--mu", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="te-casimir", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="spectral densities on both contours -> CSV/JSON (+SVG)")
    _add_common(p)
    _add_model(p)
    p.add_argument("--omega-min", type=float, default=None)
    p.add_argument("--omega-max", type=float, default=None)
    p.add_argument("--output", default=None, help="CSV path (JSON companion written alongside)")
    p.add_argument("--svg", default=None, help="write a log-log plot here")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("force", help="integrated thermal TE force for one model")
    _add_common(p)
    _add_model(p)
    p.add_argument("--omega-min", type=float, default=None)
    p.add_argument("--omega-max", type=float, default=None)
    p.add_argument("--output", default=None, help="JSON summary path")
    p.set_defaults(func=cmd_force)

    p = sub.add_parser("compare", help="the four model-comparison ratios, with cutoff sensitivity")
    _add_common(p)
    _add_model(p, with_model=False)
    p.add_argument("--omega-min", type=float, default=None, help="lower cutoff for all models")
    p.add_argument("--omega-max", type=float, default=None, help="upper cutoff for all models")
    p.add_argument("--impedance-omega-max", type=float, default=None,
                   help="upper cutoff for the impedance model only")
    p.add_argument("--output", default=None, help="RatioReport JSON path")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("kk", help="Kramers-Kronig eps1 from a tabulated eps2 CSV")
    p.add_argument("--config")
    p.add_argument("--input", help="omega,eps2 CSV")
    p.add_argument("--output", help="omega,eps1,eps2 CSV")
    p.add_argument("--grid", default=None, help="log grid 'lo:hi:n' in s^-1 (default: table nodes)")
    p.add_argument("--no-extrapolate", action="store_true", help="drop the 1/x and 1/x^3 tails")
    p.set_defaults(func=cmd_kk)

    p = sub.add_parser("validate", help="skin depth and model-validity regimes")
    _add_common(p)
    _add_model(p, with_model=False)
    p.add_argument("--omega-min", type=float, default=1e9)
    p.add_argument("--omega-max", type=float, default=1e15)
    p.add_argument("--mean-free-path", type=float, default=MEAN_FREE_PATH_AU, help="cm")
    p.add_argument("--output", default=None, help="JSON report path")
    p.set_defaults(func=cmd_validate)
    return parser


# ------------------------------------------------------------ resolution


def _settings(args) -> QuadratureSettings:
    try:
        return QuadratureSettings(
            rel_tol=args.rel_tol, abs_tol=args.abs_tol, max_subdivisions=args.max_subdivisions,
            c2_cutoff_eps=args.c2_cutoff_eps, outer_rel_tol=args.outer_rel_tol,
            outer_grid_points_per_decade=args.points_per_decade,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _geometry(args) -> PlateGeometry:
    try:
        return PlateGeometry(parse_length(args.separation), parse_temperature(args.temperature),
                             parse_length(args.film_thickness))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _conductor(args, sigma=None) -> ConductorParams:
    if sigma is None:
        sigma = args.sigma if args.sigma is not None else SIGMA_PRESETS[args.sigma_preset]
    try:
        return ConductorParams(sigma=sigma, mu=args.mu)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _dielectric(args) -> Dielectric:
    if args.eps_table:
        try:
            return Dielectric(TabulatedEps2.from_csv(args.eps_table))
        except (OSError, TableError) as exc:
            raise ConfigError(f"{args.eps_table}: {exc}") from None
    try:
        if args.permittivity == "drude-kk":
            return Dielectric(DrudeLikeParams.kk_consistent(args.amp2, args.omega0))
        return Dielectric(DrudeLikeParams(args.amp1, args.amp2, args.omega0))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _model(args):
    if args.model is None:
        raise ConfigError("--model is required")
    if args.model == "perfect":
        return PerfectConductor()
    if args.model == "dielectric":
        return _dielectric(args)
    return SurfaceImpedance(_conductor(args))


def _range(args, kind):
    lo, hi = DEFAULT_RANGES[kind]
    lo = args.omega_min if args.omega_min is not None else lo
    hi = args.omega_max if args.omega_max is not None else hi
    if not 0 < lo < hi:
        raise ConfigError(f"need 0 < omega-min < omega-max, got [{lo}, {hi}]")
    return lo, hi


def _resolved(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _load_config(path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: expected a flat JSON object")
    return {k.replace("-", "_"): v for k, v in cfg.items()}


# ------------------------------------------------------------ commands


def cmd_spectrum(args) -> int:
    model = _model(args)
    geom, settings = _geometry(args), _settings(args)
    lo, hi = _range(args, model.kind)
    res = sweep(model, geom, lo, hi, settings, prefactor_mode=args.prefactor, workers=args.workers)
    res.meta["config"] = _resolved(args)
    out = Path(args.output or f"spectrum_{model.kind}.csv")
    for written in save(res, out):
        print(f"wrote {written}")
    if args.svg:
        from .plotting import plot_spectrum_svg

        plot_spectrum_svg(res, args.svg)
        print(f"wrote {args.svg}")
    peak = int(np.argmax(np.abs(res.f_c2))) if np.any(res.f_c2) else None
    print(f"total_c1 = {res.total_c1:.6e}  total_c2 = {res.total_c2:.6e}  (s^-4, prefactor-free)")
    if peak is not None:
        print(f"|f_c2| peaks at omega = {res.omegas[peak]:.3e} s^-1")
    return 0


def cmd_force(args) -> int:
    model = _model(args)
    geom, settings = _geometry(args), _settings(args)
    lo, hi = _range(args, model.kind)
    res = sweep(model, geom, lo, hi, settings, prefactor_mode=args.prefactor, workers=args.workers)
    force = total_force(res)
    ref = ideal_te_reference(geom.separation_a)
    summary = {
        "model": res.model,
        "omega_range": [lo, hi],
        "prefactor_mode": args.prefactor,
        "prefactor": prefactor(args.prefactor),
        "total_c1": res.total_c1,
        "total_c2": res.total_c2,
        "force_per_area_dyn_cm2": force,
        "ideal_te_zero_point_dyn_cm2": ref,
        "fingerprint": res.fingerprint,
        "config": _resolved(args),
    }
    print(f"thermal TE force ({model.kind}): {force:.6e} dyn/cm^2 "
          f"({'attractive' if force > 0 else 'repulsive'})")
    print(f"  C1 part {res.total_c1 * prefactor(args.prefactor):.6e}, "
          f"C2 part {res.total_c2 * prefactor(args.prefactor):.6e}")
    print(f"ideal T=0 TE pressure pi^2 hbar c/(480 a^4): {ref:.6e} dyn/cm^2  (ratio {force / ref:.4g})")
    if args.output:
        atomic_write_text(args.output, json.dumps(summary, indent=1) + "\n")
        print(f"wrote {args.output}")
    return 0


def _compare_ranges(args):
    ranges = {}
    for kind in DEFAULT_RANGES:
        ranges[kind] = _range(args, kind)
    if args.impedance_omega_max is not None:
        ranges["impedance"] = (ranges["impedance"][0], args.impedance_omega_max)
        if not ranges["impedance"][0] < ranges["impedance"][1]:
            raise ConfigError("impedance-omega-max must exceed omega-min")
    return ranges


def cmd_compare(args) -> int:
    geom, settings = _geometry(args), _settings(args)
    ranges = _compare_ranges(args)
    diel = _dielectric(args)
    run = dict(settings=settings, prefactor_mode=args.prefactor, workers=args.workers)
    perfect = sweep(PerfectConductor(), geom, *ranges["perfect"], **run)
    dres = sweep(diel, geom, *ranges["dielectric"], **run)

    sigmas = [("requested", _conductor(args).sigma)]
    if args.sigma is None and args.sigma_preset == "au":
        sigmas.append(("eps2-limit", SIGMA_PRESETS["eps2-limit"]))
    elif args.sigma is None:
        sigmas.append(("au", SIGMA_PRESETS["au"]))

    reports = []
    for label, sigma in sigmas:
        imp = sweep(SurfaceImpedance(_conductor(args, sigma)), geom, *ranges["impedance"], **run)
        rep = ratios_from_results(perfect, dres, imp, {"geometry": asdict(geom), "settings": settings.to_dict(),
                                                       "sigma_label": label, "config": _resolved(args)})
        reports.append((label, sigma, rep, imp))

    print(f"a = {geom.separation_a:g} cm, T = {geom.temperature_T:g} K, prefactor-free totals")
    for kind, (lo, hi) in ranges.items():
        print(f"  {kind:<10} omega in [{lo:.3g}, {hi:.3g}] s^-1")
    print(f"{'ratio':<26}{'reference':>12}" + "".join(f"{'sigma=' + format(s, '.3g'):>16}" for _, s, _, _ in reports))
    for key, ref in REFERENCE_VALUES.items():
        print(f"{key:<26}{ref:>12.3g}" + "".join(f"{rep.ratios()[key]:>16.4g}" for _, _, rep, _ in reports))

    print("cutoff sensitivity:")
    pc1 = perfect.total_c1
    for lo in (1e8, 1e9, 1e10):
        d = dres if lo == ranges["dielectric"][0] else sweep(diel, geom, lo, ranges["dielectric"][1], **run)
        print(f"  dielectric C2 / perfect C1 with omega-min {lo:.0e}: {d.total_c2 / pc1:.4g}")
    sigma0 = reports[0][1]
    for hi in sorted({IMPEDANCE_VALIDITY_LIMIT, ranges["impedance"][1]}):
        imp = sweep(SurfaceImpedance(_conductor(args, sigma0)), geom, ranges["impedance"][0], hi, **run)
        print(f"  impedance (sigma={sigma0:.3g}) omega-max {hi:.0e}: C2/C1 = {imp.total_c2 / imp.total_c1:.4g}, "
              f"total/perfect C1 = {(imp.total_c1 + imp.total_c2) / pc1:.4g}")

    if args.output:
        out = Path(args.output)
        save(reports[0][2], out)
        print(f"wrote {out}")
        for label, _, rep, _ in reports[1:]:
            extra = out.with_name(f"{out.stem}_{label}{out.suffix or '.json'}")
            save(rep, extra)
            print(f"wrote {extra}")
    return 0


def _parse_grid(text):
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise ConfigError(f"--grid expects 'lo:hi:n', got {text!r}") from None
    if not (0 < lo < hi and n >= 2):
        raise ConfigError(f"--grid needs 0 < lo < hi and n >= 2, got {text!r}")
    return np.geomspace(lo, hi, n)


def cmd_kk(args) -> int:
    if not args.input or not args.output:
        raise ConfigError("kk needs --input and --output")
    try:
        table = TabulatedEps2.from_csv(args.input)
    except OSError as exc:
        raise ConfigError(f"{args.input}: {exc.strerror}") from None
    except TableError as exc:
        raise ConfigError(f"{args.input}: {exc}") from None
    grid = _parse_grid(args.grid) if args.grid else table.omega[1:-1]
    lines = [f"# kk of {args.input}; extrapolate={not args.no_extrapolate}", "omega,eps1,eps2"]
    for w in grid:
        try:
            e1 = kk_eps1(table, float(w), extrapolate=not args.no_extrapolate)
        except ValueError as exc:
            raise ConfigError(f"omega = {w:g}: {exc}") from None
        lines.append(f"{float(w)!r},{e1!r},{float(table.interpolate(w))!r}")
    atomic_write_text(args.output, "\n".join(lines) + "\n")
    print(f"wrote {args.output} ({len(grid)} points)")
    return 0


def cmd_validate(args) -> int:
    geom = _geometry(args)
    cond = _conductor(args)
    if not 0 < args.omega_min < args.omega_max:
        raise ConfigError("need 0 < omega-min < omega-max")
    rep = validity_report(cond, geom, (args.omega_min, args.omega_max), mean_free_path=args.mean_free_path)

    def fmt(v):
        return "not reached in range" if v is None else f"{v:.3e} s^-1"

    print(f"sigma = {cond.sigma:.3g} s^-1, mu = {cond.mu:g}, film d = {geom.film_thickness_d:g} cm")
    print(f"skin depth <= mean free path ({rep.mean_free_path:g} cm), dielectric model fails above: "
          f"{fmt(rep.dielectric_model_fails_above)}")
    print(f"Boyer limit (conductor boundary conditions needed well below): {rep.boyer_limit:.1e} s^-1")
    print(f"skin depth < film thickness (half-space treatment) above: {fmt(rep.thick_film_above)}")
    doc = {"type": "validity_report", **rep.to_dict(), "config": _resolved(args)}
    if args.output:
        atomic_write_text(args.output, json.dumps(doc, indent=1) + "\n")
        print(f"wrote {args.output}")
    else:
        print(json.dumps({k: v for k, v in doc.items() if k not in ("skin_depth_curve", "config")}))
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        try:
            cfg = _load_config(known.config)
        except ConfigError as exc:
            print(f"te-casimir: error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
        cmd = next((a for a in argv if a in subparsers.choices), None)
        if cmd is not None:
            sp = subparsers.choices[cmd]
            dests = {a.dest for a in sp._actions}
            unknown = sorted(set(cfg) - dests)
            if unknown:
                print(f"te-casimir: error: unknown config keys for {cmd}: {', '.join(unknown)}", file=sys.stderr)
                return EXIT_CONFIG
            sp.set_defaults(**cfg)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
        subparsers.choices[args.command].print_usage(sys.stderr)
        print(f"te-casimir: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadratureError as exc:
        print(f"te-casimir: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
