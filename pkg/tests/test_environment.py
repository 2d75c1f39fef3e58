import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from _support import bundled, spectrum
from spaddcr.environment import (
    BELT_TABLE,
    DAY,
    YEAR,
    ArtificialBelt,
    HaneScenario,
    OrbitEnvironment,
    OrbitName,
    belt_fluence,
    belt_total_fluence,
    natural_fluence,
    prompt_fluence,
    prompt_totals,
    shape_spectrum,
)
from spaddcr.errors import DataError
from spaddcr.physics_data import Particle, Spectrum

# 4.66e8 cm^-2 s^-1 * 100 d * 86400 s/d
LEO_ASYMPTOTE = 4.02624e15


def shape(name):
    return shape_spectrum(Spectrum(bundled(name), 1.0))


@pytest.fixture(scope="module")
def shapes():
    return {
        "n": shape("shape_neutron_watt_u235.csv"),
        "g": shape("shape_gamma_prompt_u235.csv"),
        "b": shape("shape_beta_u235_fp.csv"),
    }


@pytest.fixture(scope="module")
def leo():
    p = Spectrum(bundled("flux_proton_LEO_polar_800km.csv"), YEAR)
    e = Spectrum(bundled("flux_electron_LEO_polar_800km.csv"), YEAR)
    return OrbitEnvironment("LEO_polar_800km", p, e)


def test_natural_fluence_linear(leo):
    zero = natural_fluence(leo, 0.0)
    assert all(sp.total() == 0 for sp in zero.values())
    one, two = natural_fluence(leo, YEAR), natural_fluence(leo, 2 * YEAR)
    for particle in (Particle.PROTON, Particle.ELECTRON):
        np.testing.assert_allclose(two[particle].values, 2 * one[particle].values, rtol=1e-15)
        assert one[particle].is_fluence


def test_annual_basis_reproduces_file(leo):
    raw = bundled("flux_proton_LEO_polar_800km.csv")
    np.testing.assert_array_equal(natural_fluence(leo, YEAR)[Particle.PROTON].values, raw.values * YEAR)


def test_orbit_environment_checks(leo):
    with pytest.raises(DataError, match="expected a proton"):
        OrbitEnvironment("custom", leo.electron_spectrum, leo.electron_spectrum)
    with pytest.raises(DataError):
        OrbitEnvironment("custom", leo.proton_spectrum, leo.electron_spectrum, averaging_period=0)


def test_prompt_examples(shapes):
    n, g = prompt_totals(1.0, 100.0)
    assert n == pytest.approx(1.6e11, rel=1e-12)
    assert g == pytest.approx(9.9e10, rel=1e-12)
    assert prompt_totals(1.0, 1000.0)[0] == pytest.approx(1.6e9, rel=1e-12)
    assert prompt_totals(0.0, 100.0) == (0.0, 0.0)
    with pytest.raises(DataError):
        prompt_totals(1.0, 0.0)
    sc = HaneScenario(1.0, 100.0, shapes["n"], shapes["g"])
    nf, gf = prompt_fluence(sc)
    assert nf.total() == pytest.approx(1.6e11, rel=1e-9)
    assert gf.total() == pytest.approx(9.9e10, rel=1e-9)
    assert nf.particle is Particle.NEUTRON and gf.particle is Particle.GAMMA


@given(st.floats(0, 100), st.floats(1, 1e5), st.floats(1, 1e5))
def test_prompt_inverse_square_and_linear_in_yield(y, r1, r2):
    n1, g1 = prompt_totals(y, r1)
    n2, g2 = prompt_totals(y, r2)
    assert n1 * r1**2 == pytest.approx(n2 * r2**2, rel=1e-12, abs=1e-300)
    assert g1 * r1**2 == pytest.approx(g2 * r2**2, rel=1e-12, abs=1e-300)
    assert prompt_totals(2 * y, r1)[0] == pytest.approx(2 * n1, rel=1e-15, abs=1e-300)


def test_shapes_must_be_normalised(shapes):
    with pytest.raises(DataError, match="integrate to 1"):
        HaneScenario(1.0, 100.0, shapes["n"].scaled(2.0), shapes["g"])
    with pytest.raises(DataError, match="neutron"):
        HaneScenario(1.0, 100.0, shapes["g"], shapes["g"])
    with pytest.raises(DataError):
        HaneScenario(-1.0, 100.0, shapes["n"], shapes["g"])


def test_belt_table_defaults():
    leo, meo, geo = (BELT_TABLE[o] for o in (OrbitName.LEO_POLAR_800KM, OrbitName.MEO_20200KM, OrbitName.GEO_35786KM))
    assert (leo.l_shell, leo.volume, leo.flux_0, leo.mean_lifetime_days) == (1.125, 1.17e17, 4.66e8, 100.0)
    assert (meo.l_shell, meo.volume, meo.flux_0, meo.mean_lifetime_days) == (4.167, 2.54e20, 1.11e5, 10.0)
    assert (geo.l_shell, geo.volume, geo.flux_0, geo.mean_lifetime_days) == (6.58, 1.77e21, 1.26e4, 5.0)
    assert (leo.latitude, meo.latitude, geo.latitude) == (5.0, 51.2, 57.9)


def test_belt_from_table_scaling(shapes):
    b = ArtificialBelt.from_table("LEO_polar_800km", shapes["b"])
    assert b.flux_0 == 4.66e8 and b.mean_lifetime == 100 * DAY and b.trapping_efficiency == 0.1
    half = ArtificialBelt.from_table("LEO_polar_800km", shapes["b"], trapping_efficiency=0.05, volume=2.34e17)
    assert half.flux_0 == pytest.approx(4.66e8 / 4, rel=1e-15)
    fixed = ArtificialBelt.from_table("GEO_35786km", shapes["b"], flux_0=1.0, mean_lifetime_days=2.0)
    assert (fixed.flux_0, fixed.mean_lifetime_days) == (1.0, 2.0)


def test_belt_invariants(shapes):
    with pytest.raises(DataError):
        ArtificialBelt(-1.0, 10.0, shapes["b"])
    with pytest.raises(DataError):
        ArtificialBelt(1.0, 0.0, shapes["b"])
    with pytest.raises(DataError):
        ArtificialBelt(1.0, 10.0, shapes["b"], trapping_efficiency=1.5)


def test_belt_examples(shapes):
    b = ArtificialBelt.from_table("LEO_polar_800km", shapes["b"])
    assert belt_fluence(b, 0.0).total() == 0.0
    assert belt_total_fluence(b.flux_0, b.mean_lifetime, 1e3 * b.mean_lifetime) == pytest.approx(LEO_ASYMPTOTE, rel=1e-12)
    at_tau = belt_total_fluence(b.flux_0, b.mean_lifetime, b.mean_lifetime)
    assert at_tau == pytest.approx((1 - math.exp(-1)) * LEO_ASYMPTOTE, rel=1e-12)
    assert belt_fluence(b, b.mean_lifetime).total() == pytest.approx(at_tau, rel=1e-9)


def test_belt_start_offset_shifts_window():
    tau = 10.0
    assert belt_total_fluence(1.0, tau, 5.0, start=5.0) == pytest.approx(
        belt_total_fluence(1.0, tau, 10.0) - belt_total_fluence(1.0, tau, 5.0), rel=1e-12)
    with pytest.raises(DataError):
        belt_total_fluence(1.0, tau, -1.0)


@given(st.floats(0, 1e9), st.floats(0, 1e9), st.floats(0, 1))
def test_belt_monotone_concave_bounded(t1, t2, lam):
    f = lambda t: belt_total_fluence(4.66e8, 100 * DAY, t)
    a, b = sorted((t1, t2))
    assert f(a) <= f(b) <= LEO_ASYMPTOTE * (1 + 1e-12)
    mid = lam * a + (1 - lam) * b
    assert f(mid) >= (lam * f(a) + (1 - lam) * f(b)) * (1 - 1e-12)


def test_shape_spectrum():
    sp = shape_spectrum(spectrum([1, 2, 4], [4, 2, 1], "electron", fluence=False))
    assert sp.is_fluence and sp.total() == pytest.approx(1.0, rel=1e-14)
