"""Result files.

Spectra are written as CSV (``omega,f_c1,f_c2`` with a ``# key: json``
metadata block) plus a JSON companion with the same content. Ratio
reports are JSON. Stored totals are prefactor-free.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import warnings
from dataclasses import asdict
from pathlib import Path

from .lifshitz import SpectralSample
from .pipeline import RatioReport, SpectrumResult, settings_fingerprint
from .quadrature import QuadratureSettings
from .units import PlateGeometry

CSV_HEADER = "omega,f_c1,f_c2"
_META_KEYS = ("type", "model", "geometry", "settings", "omega_range", "prefactor_mode",
              "total_c1", "total_c2", "err_c1", "err_c2", "fingerprint", "meta", "sample_errors")


class ResultFileError(ValueError):
    pass


class FingerprintWarning(UserWarning):
    pass


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _spectrum_meta(res: SpectrumResult) -> dict:
    return {
        "type": "spectrum",
        "model": res.model,
        "geometry": asdict(res.geometry),
        "settings": res.settings.to_dict(),
        "omega_range": list(res.omega_range),
        "prefactor_mode": res.prefactor_mode,
        "total_c1": res.total_c1,
        "total_c2": res.total_c2,
        "err_c1": res.err_c1,
        "err_c2": res.err_c2,
        "fingerprint": res.fingerprint,
        "meta": res.meta,
    }


def spectrum_to_json(res: SpectrumResult) -> str:
    doc = _spectrum_meta(res)
    doc["samples"] = {
        "omega": [s.omega for s in res.samples],
        "f_c1": [s.f_c1 for s in res.samples],
        "f_c2": [s.f_c2 for s in res.samples],
        "err_c1": [s.err_c1 for s in res.samples],
        "err_c2": [s.err_c2 for s in res.samples],
    }
    return json.dumps(doc, indent=1) + "\n"


def spectrum_to_csv(res: SpectrumResult) -> str:
    meta = _spectrum_meta(res)
    meta["sample_errors"] = [[s.err_c1, s.err_c2] for s in res.samples]
    lines = [f"# {key}: {json.dumps(meta[key])}" for key in _META_KEYS]
    lines.append(CSV_HEADER)
    lines += [f"{float(s.omega)!r},{float(s.f_c1)!r},{float(s.f_c2)!r}" for s in res.samples]
    return "\n".join(lines) + "\n"


def report_to_json(rep: RatioReport) -> str:
    doc = {"type": "ratio_report", **asdict(rep)}
    return json.dumps(doc, indent=1) + "\n"


def save(obj, path) -> list[Path]:
    """Write a SpectrumResult (CSV + JSON companion, or JSON only for a
    ``.json`` path) or a RatioReport (JSON). Returns the paths written."""
    path = Path(path)
    if isinstance(obj, SpectrumResult):
        if path.suffix == ".json":
            atomic_write_text(path, spectrum_to_json(obj))
            return [path]
        companion = path.with_suffix(".json")
        atomic_write_text(path, spectrum_to_csv(obj))
        atomic_write_text(companion, spectrum_to_json(obj))
        return [path, companion]
    if isinstance(obj, RatioReport):
        atomic_write_text(path, report_to_json(obj))
        return [path]
    raise TypeError(f"cannot save {type(obj).__name__}")


def _build_spectrum(meta: dict, rows: list, errors: list, where: str) -> SpectrumResult:
    try:
        samples = [SpectralSample(w, f1, f2, e1, e2, meta["model"].get("kind", ""))
                   for (w, f1, f2), (e1, e2) in zip(rows, errors)]
        res = SpectrumResult(
            model=meta["model"],
            geometry=PlateGeometry(**meta["geometry"]),
            settings=QuadratureSettings(**meta["settings"]),
            omega_range=tuple(meta["omega_range"]),
            samples=samples,
            total_c1=meta["total_c1"],
            total_c2=meta["total_c2"],
            err_c1=meta["err_c1"],
            err_c2=meta["err_c2"],
            prefactor_mode=meta["prefactor_mode"],
            meta=meta.get("meta", {}),
            fingerprint=meta["fingerprint"],
        )
    except KeyError as exc:
        raise ResultFileError(f"{where}: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ResultFileError(f"{where}: {exc}") from None
    expected = res.expected_fingerprint()
    if expected != res.fingerprint:
        warnings.warn(f"{where}: stored fingerprint {res.fingerprint} does not match "
                      f"its settings ({expected})", FingerprintWarning, stacklevel=3)
    return res


def _load_spectrum_csv(path: Path) -> SpectrumResult:
    meta, rows = {}, []
    header_line = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.rstrip("\n")
            if not text.strip():
                continue
            if text.startswith("#"):
                if header_line is not None:
                    continue
                key, sep, value = text[1:].partition(":")
                if not sep:
                    continue
                try:
                    meta[key.strip()] = json.loads(value)
                except json.JSONDecodeError as exc:
                    raise ResultFileError(f"{path}: line {lineno}: bad metadata value ({exc.msg})") from None
                continue
            if header_line is None:
                if text.strip() != CSV_HEADER:
                    raise ResultFileError(f"{path}: line {lineno}: expected header {CSV_HEADER!r}")
                header_line = lineno
                continue
            cols = text.split(",")
            if len(cols) != 3:
                raise ResultFileError(f"{path}: line {lineno}: expected 3 columns, got {len(cols)}")
            try:
                rows.append(tuple(float(c) for c in cols))
            except ValueError:
                raise ResultFileError(f"{path}: line {lineno}: non-numeric value") from None
    if header_line is None:
        raise ResultFileError(f"{path}: no data header found (file truncated?)")
    errors = meta.get("sample_errors", [[0.0, 0.0]] * len(rows))
    if len(errors) != len(rows):
        raise ResultFileError(f"{path}: {len(rows)} data rows but {len(errors)} error entries "
                              f"(file truncated after line {header_line + len(rows)}?)")
    return _build_spectrum(meta, rows, errors, str(path))


def _load_json(path: Path):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ResultFileError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    kind = doc.get("type")
    if kind == "spectrum":
        s = doc.get("samples") or {}
        try:
            rows = list(zip(s["omega"], s["f_c1"], s["f_c2"]))
            errors = list(zip(s["err_c1"], s["err_c2"]))
        except KeyError as exc:
            raise ResultFileError(f"{path}: samples missing {exc.args[0]!r}") from None
        return _build_spectrum(doc, rows, errors, str(path))
    if kind == "ratio_report":
        doc = dict(doc)
        doc.pop("type")
        try:
            rep = RatioReport(**doc)
        except TypeError as exc:
            raise ResultFileError(f"{path}: {exc}") from None
        _check_report_fingerprint(rep, str(path))
        return rep
    raise ResultFileError(f"{path}: unknown document type {kind!r}")


def _check_report_fingerprint(rep: RatioReport, where: str) -> None:
    geometry, settings = rep.meta.get("geometry"), rep.meta.get("settings")
    if geometry is None or settings is None:
        return
    geom = PlateGeometry(**geometry)
    qs = QuadratureSettings(**settings)
    parts = [settings_fingerprint(rep.models[k], geom, qs, rep.omega_ranges[k])
             for k in ("perfect", "dielectric", "impedance")]
    expected = hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]
    if expected != rep.fingerprint:
        warnings.warn(f"{where}: stored fingerprint {rep.fingerprint} does not match "
                      f"its settings ({expected})", FingerprintWarning, stacklevel=3)


def load(path):
    """Read a file written by :func:`save`."""
    path = Path(path)
    if path.suffix == ".csv":
        return _load_spectrum_csv(path)
    return _load_json(path)
