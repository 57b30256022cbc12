import json
import math
import warnings

import numpy as np
import pytest

from te_casimir import CONSTANTS, PlateGeometry, QuadratureSettings
from te_casimir.lifshitz import Dielectric, PerfectConductor, SurfaceImpedance
from te_casimir.pipeline import (
    DEFAULT_RANGES,
    RatioReport,
    SpectrumResult,
    ideal_te_reference,
    prefactor,
    ratio_report,
    ratios_from_results,
    sweep,
    total_force,
)
from te_casimir.storage import FingerprintWarning, ResultFileError, load, save

GEOM = PlateGeometry()
COARSE = QuadratureSettings(outer_grid_points_per_decade=12)


@pytest.fixture(scope="module")
def spectra():
    return {m.kind: sweep(m, GEOM, *DEFAULT_RANGES[m.kind], COARSE)
            for m in (PerfectConductor(), Dielectric(), SurfaceImpedance())}


def test_sweep_ascending_and_totals(spectra):
    for res in spectra.values():
        assert np.all(np.diff(res.omegas) > 0)
        (t1, _), (t2, _) = res.recompute_totals()
        assert (t1, t2) == (res.total_c1, res.total_c2)


def test_perfect_total_analytic():
    # int omega^3 g / 6 d omega = (pi^4/90) (kT/hbar)^4 over (0, inf)
    wt = CONSTANTS.k_boltzmann * 300.0 / CONSTANTS.hbar
    res = sweep(PerfectConductor(), GEOM, 1e9, 2e15)
    assert res.total_c1 == pytest.approx(math.pi**4 / 90 * wt**4, rel=1e-4)
    assert res.total_c2 == 0.0


def test_parallel_sweep_identical():
    a = sweep(Dielectric(), GEOM, 1e10, 1e14, COARSE)
    b = sweep(Dielectric(), GEOM, 1e10, 1e14, COARSE, workers=2)
    assert np.array_equal(a.f_c1, b.f_c1) and np.array_equal(a.f_c2, b.f_c2)
    assert a.fingerprint == b.fingerprint


def test_prefactor_modes(spectra):
    assert prefactor("pi") / prefactor("pi2") == pytest.approx(math.pi)
    res = spectra["perfect"]
    alt = SpectrumResult(res.model, res.geometry, res.settings, res.omega_range, res.samples,
                         res.total_c1, res.total_c2, prefactor_mode="pi")
    assert total_force(alt) / total_force(res) == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        prefactor("pi3")


def test_ratios_invariant_under_rescaling(spectra):
    base = ratios_from_results(spectra["perfect"], spectra["dielectric"], spectra["impedance"])
    scaled = []
    for res in (spectra["perfect"], spectra["dielectric"], spectra["impedance"]):
        scaled.append(SpectrumResult(res.model, res.geometry, res.settings, res.omega_range, res.samples,
                                     7.5 * res.total_c1, 7.5 * res.total_c2, prefactor_mode="pi"))
    other = ratios_from_results(*scaled)
    for k, v in base.ratios().items():
        assert other.ratios()[k] == pytest.approx(v, rel=1e-14)


def test_ratio_report_defaults_embed_cutoffs():
    rep = ratio_report(GEOM, COARSE, ranges={"impedance": (1e9, 1e14)})
    assert rep.omega_ranges["impedance"] == [1e9, 1e14]
    assert rep.omega_ranges["dielectric"] == list(DEFAULT_RANGES["dielectric"])
    assert set(rep.ratios()) == {"r_dielectric_c1", "r_dielectric_c2",
                                 "r_impedance_c2_over_c1", "r_impedance_total"}


def test_ideal_reference():
    a = 1e-4
    assert ideal_te_reference(a) == pytest.approx(math.pi**2 * CONSTANTS.hbar * CONSTANTS.c / 480 / a**4)
    assert ideal_te_reference(2 * a) == pytest.approx(ideal_te_reference(a) / 16)
    with pytest.raises(ValueError):
        ideal_te_reference(0.0)


def test_spectrum_round_trip_csv_and_json(tmp_path, spectra):
    res = spectra["impedance"]
    res.meta["note"] = "x"
    paths = save(res, tmp_path / "imp.csv")
    assert [p.name for p in paths] == ["imp.csv", "imp.json"]
    for p in paths:
        back = load(p)
        assert back.fingerprint == res.fingerprint
        assert back.model == res.model and back.geometry == res.geometry and back.settings == res.settings
        assert np.array_equal(back.f_c1, res.f_c1) and np.array_equal(back.f_c2, res.f_c2)
        assert [s.err_c2 for s in back.samples] == [s.err_c2 for s in res.samples]
        (t1, _), (t2, _) = back.recompute_totals()
        assert t1 == pytest.approx(res.total_c1, rel=res.settings.outer_rel_tol)
        assert t2 == pytest.approx(res.total_c2, rel=res.settings.outer_rel_tol)
        assert back.meta == res.meta


def test_report_round_trip(tmp_path, spectra):
    rep = ratios_from_results(spectra["perfect"], spectra["dielectric"], spectra["impedance"],
                              {"geometry": {"separation_a": 1e-4, "temperature_T": 300.0,
                                            "film_thickness_d": 1e-4},
                               "settings": COARSE.to_dict()})
    save(rep, tmp_path / "r.json")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        back = load(tmp_path / "r.json")
    assert isinstance(back, RatioReport) and back == rep


def test_truncated_csv_names_line(tmp_path, spectra):
    path = tmp_path / "s.csv"
    save(spectra["dielectric"], path)
    lines = path.read_text().splitlines()
    header = lines.index("omega,f_c1,f_c2")
    path.write_text("\n".join(lines[: header + 5]) + "\n1e12,3.0")
    with pytest.raises(ResultFileError, match=f"line {header + 6}"):
        load(path)
    path.write_text("\n".join(lines[:3]) + '\n# settings: {"rel_tol": 1e-8,')
    with pytest.raises(ResultFileError, match="line 4"):
        load(path)


def test_truncated_json_names_line(tmp_path, spectra):
    path = tmp_path / "s.json"
    save(spectra["dielectric"], path)
    text = path.read_text()
    path.write_text(text[: len(text) // 2])
    with pytest.raises(ResultFileError, match="line"):
        load(path)


def test_fingerprint_mismatch_warns_but_loads(tmp_path, spectra):
    path = tmp_path / "s.json"
    save(spectra["perfect"], path)
    doc = json.loads(path.read_text())
    doc["settings"]["rel_tol"] = 1e-6
    path.write_text(json.dumps(doc))
    with pytest.warns(FingerprintWarning):
        back = load(path)
    assert np.array_equal(back.f_c1, spectra["perfect"].f_c1)
