import math

import numpy as np
import pytest
from scipy import integrate as sint

from te_casimir import PlateGeometry
from te_casimir.optics import (
    BOYER_LIMIT,
    SIGMA_FROM_EPS2,
    ConductorParams,
    DrudeLikeParams,
    TableError,
    TabulatedEps2,
    drude_like_eps,
    kk_eps1,
    skin_depth,
    validity_report,
)

A, W0 = 1.8e18, 3.3e13
TAU = 1.0 / W0


def drude_eps2(x):
    return A / (x * (1.0 + (x * TAU) ** 2))


def drude_eps1(w):
    return 1.0 - A * TAU / (1.0 + (w * TAU) ** 2)


@pytest.fixture(scope="module")
def drude_table():
    return TabulatedEps2.from_function(drude_eps2, np.geomspace(1e9, 1e17, 481))


def test_fit_at_omega0():
    eps = drude_like_eps(W0)
    assert eps.real == pytest.approx(-7.4e3, rel=1e-3)
    assert eps.imag == pytest.approx(2.727e4, rel=1e-3)


def test_fit_low_frequency_limit():
    assert drude_like_eps(1.0).real == pytest.approx(-1.48e4, rel=1e-9)


def test_fit_ratios_at_twice_omega0():
    lo, hi = drude_like_eps(W0), drude_like_eps(2 * W0)
    assert hi.imag / lo.imag == pytest.approx((1 * 2) / (2 * 5), rel=1e-12)
    assert hi.real / lo.real == pytest.approx(0.4, rel=1e-12)


def test_fit_passivity_and_monotonicity():
    w = np.geomspace(1e6, 1e17, 500)
    eps = drude_like_eps(w)
    assert np.all(eps.imag > 0) and np.all(eps.real < 0)
    for seq in (np.abs(eps.real), w * eps.imag):
        assert np.all(np.diff(seq) <= 4 * np.finfo(float).eps * seq[1:]) and seq[-1] < seq[0]
    with pytest.raises(ValueError):
        drude_like_eps(0.0)


def test_kk_consistent_amplitude():
    p = DrudeLikeParams.kk_consistent()
    assert p.amp1 == pytest.approx(A / W0)
    assert SIGMA_FROM_EPS2.sigma == pytest.approx(A / (4 * math.pi))


@pytest.mark.parametrize("w", np.geomspace(1e10, 1e13, 13))
def test_kk_drude_closure(drude_table, w):
    assert kk_eps1(drude_table, w) == pytest.approx(drude_eps1(w), rel=5e-3)


def test_kk_drude_at_omega0(drude_table):
    assert kk_eps1(drude_table, W0) == pytest.approx(-2.73e4, rel=5e-3)


def test_kk_zero_table_is_vacuum():
    t = TabulatedEps2(np.geomspace(1e9, 1e15, 50), np.zeros(50))
    for w in (1e10, 3.7e12, 1e14):
        assert kk_eps1(t, w) == 1.0


def test_kk_spike_above_raises_eps1():
    ws, width = 1e14, 1e12
    spike = lambda x: np.exp(-0.5 * ((x - ws) / width) ** 2)  # noqa: E731
    grid = np.unique(np.concatenate([np.geomspace(1e11, 1e16, 200), np.linspace(ws - 8 * width, ws + 8 * width, 801)]))
    table = TabulatedEps2.from_function(spike, grid)
    w = 1e12
    brute, _ = sint.quad(lambda x: x * spike(x) / (x * x - w * w), ws - 10 * width, ws + 10 * width,
                         epsabs=0, epsrel=1e-12, limit=200)
    expected = 1.0 + 2.0 / math.pi * brute
    got = kk_eps1(table, w, extrapolate=False)
    assert got > 1.0
    assert got == pytest.approx(expected, rel=1e-3)


def test_kk_domain_errors(drude_table):
    with pytest.raises(ValueError, match="endpoint"):
        kk_eps1(drude_table, 1e9)
    with pytest.raises(ValueError, match="outside"):
        kk_eps1(drude_table, 1e18)
    short = TabulatedEps2.from_function(drude_eps2, np.geomspace(1e10, 5e11, 10))
    with pytest.raises(ValueError, match="decades"):
        kk_eps1(short, 1e11)


def test_table_csv_round_trip(tmp_path, drude_table):
    path = tmp_path / "eps.csv"
    drude_table.to_csv(path)
    back = TabulatedEps2.from_csv(path)
    assert np.array_equal(back.omega, drude_table.omega)
    assert np.array_equal(back.eps2, drude_table.eps2)
    assert back.descriptor() == drude_table.descriptor()


@pytest.mark.parametrize("body,line,match", [
    ("omega,eps2\n1e9,1\n1e11,1\n1e10,1\n1e12,1\n", 4, "increasing"),
    ("omega,eps2\n1e9,1\n1e10,abc\n", 3, "non-numeric"),
    ("# comment\nomega,eps2\n1e9,-1\n1e10,1\n1e11,1\n1e12,1\n", 3, "passive"),
    ("omega,eps2\n1e9,1,2\n", 2, "columns"),
    ("w,e\n1,2\n", 1, "header"),
])
def test_table_csv_errors_name_line(tmp_path, body, line, match):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(TableError, match=match) as info:
        TabulatedEps2.from_csv(path)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_skin_depth_values():
    assert skin_depth(1e11) == pytest.approx(6.905e-5, rel=1e-3)
    w = np.geomspace(1e9, 1e15, 7)
    assert np.allclose(skin_depth(w, ConductorParams(mu=4.0)), 0.5 * skin_depth(w))
    assert skin_depth(4e11) == pytest.approx(0.5 * skin_depth(1e11))


def test_validity_report_au_defaults():
    rep = validity_report(ConductorParams(), PlateGeometry(), (1e9, 1e15))
    assert rep.dielectric_model_fails_above == pytest.approx(5e13, rel=0.2)
    assert abs(math.log10(rep.thick_film_above / 1e11)) < 0.5
    assert rep.boyer_limit == BOYER_LIMIT == 4e14
    assert set(rep.to_dict()) >= {"skin_depth_curve", "dielectric_model_fails_above", "thick_film_above"}


def test_validity_report_monotonicity():
    base = validity_report(ConductorParams(), PlateGeometry(), (1e9, 1e17))
    stiff = validity_report(ConductorParams(sigma=3e19), PlateGeometry(), (1e9, 1e17))
    thin = validity_report(ConductorParams(), PlateGeometry(film_thickness_d=1e-6), (1e9, 1e17))
    assert stiff.dielectric_model_fails_above < base.dielectric_model_fails_above
    assert thin.thick_film_above > base.thick_film_above
