#!/usr/bin/env python3
"""Regenerate the CSV tables bundled in ``src/spaddcr/data``.

Material tables (NIEL in silicon, CSDA ranges and photon attenuation in
aluminium) are rounded reference values typed in by hand.  The fission
spectrum shapes come from standard closed forms.  The orbit flux spectra
are SYNTHETIC: smooth AP8/AE8-like shapes whose amplitudes were scaled so
that the -10 °C natural-environment DCRs land within roughly a factor of
a few of the published reference table.  Replace them with real AP8/AE8
exports for any engineering use.

    python scripts/make_bundled_data.py
"""
from pathlib import Path

import numpy as np

from spaddcr.physics_data import EnergyTable, dump_energy_table

OUT = Path(__file__).resolve().parents[1] / "src" / "spaddcr" / "data"


def grid(lo, hi, per_decade=10):
    n = int(round(np.log10(hi / lo) * per_decade)) + 1
    return np.geomspace(lo, hi, n)


def write(name, kind, particle, e, v, source, comments=(), interp="log_log"):
    t = EnergyTable(kind, particle, e, v, interp, source_label=source)
    (OUT / name).write_text(dump_energy_table(t, comments), encoding="utf-8")
    print(f"wrote {name} ({len(t)} rows)")


# ------------------------------------------------------------- NIEL in Si
PROTON_NIEL = [
    (1e-3, 0.45), (1e-2, 0.35), (0.1, 0.11), (0.5, 0.034), (1, 0.019), (2, 0.011),
    (5, 5.5e-3), (10, 3.6e-3), (20, 2.4e-3), (50, 1.8e-3), (100, 1.5e-3),
    (200, 1.4e-3), (500, 1.3e-3), (1000, 1.3e-3),
]
ELECTRON_NIEL = [
    (0.21, 0.0), (0.25, 2.0e-6), (0.3, 4.5e-6), (0.5, 1.25e-5), (1, 2.5e-5), (2, 4.0e-5),
    (5, 6.0e-5), (10, 7.5e-5), (20, 9.0e-5), (50, 1.1e-4), (100, 1.25e-4), (200, 1.4e-4),
]
NEUTRON_NIEL = [
    (1e-3, 3.0e-5), (1e-2, 1.5e-4), (0.1, 6.0e-4), (0.3, 1.1e-3), (0.5, 1.4e-3),
    (1, 2.04e-3), (2, 2.5e-3), (5, 2.7e-3), (10, 3.0e-3), (14, 3.3e-3), (20, 3.5e-3),
]
GAMMA_NIEL = [(1.173, 3.0e-9), (1.332, 3.4e-9)]

# ---------------------------------------------------- CSDA ranges in Al
PROTON_RANGE = [
    (1e-3, 3.0e-6), (2e-3, 5.0e-6), (5e-3, 1.0e-5), (1e-2, 1.7e-5), (2e-2, 3.0e-5),
    (5e-2, 6.6e-5), (0.1, 2.0e-4), (0.2, 4.5e-4), (0.5, 1.5e-3), (1, 3.97e-3),
    (2, 1.20e-2), (5, 5.9e-2), (10, 0.170), (20, 0.580), (50, 2.92), (100, 9.98),
    (200, 32.0), (500, 150.0), (1000, 420.0),
]
ELECTRON_RANGE = [
    (1e-3, 7.0e-6), (2e-3, 2.2e-5), (5e-3, 8.5e-5), (1e-2, 2.7e-4), (2e-2, 8.7e-4),
    (5e-2, 4.3e-3), (0.1, 1.5e-2), (0.2, 4.7e-2), (0.5, 0.200), (1, 0.5546),
    (2, 1.219), (5, 2.89), (10, 5.30), (20, 9.20), (50, 17.0), (100, 24.0),
]

# ------------------------------------- photon mass attenuation in Al (cm2/g)
PHOTON_MU = [
    (0.01, 26.2), (0.015, 7.955), (0.02, 3.441), (0.03, 1.128), (0.04, 0.5685),
    (0.05, 0.3681), (0.06, 0.2778), (0.08, 0.2018), (0.1, 0.1704), (0.15, 0.1378),
    (0.2, 0.1223), (0.3, 0.1042), (0.4, 0.09276), (0.5, 0.08445), (0.6, 0.07802),
    (0.8, 0.06841), (1.0, 0.06146), (1.25, 0.05496), (1.5, 0.05006), (2.0, 0.04324),
    (3.0, 0.03541), (4.0, 0.03106), (5.0, 0.02836), (6.0, 0.02655), (8.0, 0.02437),
    (10.0, 0.02318), (15.0, 0.02195), (20.0, 0.02168), (30.0, 0.02200),
    (50.0, 0.02300), (100.0, 0.02440),
]


def pairs(name, kind, particle, rows, source, **kw):
    e, v = zip(*rows)
    write(name, kind, particle, np.array(e), np.array(v), source, **kw)


def fission_shapes():
    e = grid(1e-3, 20.0, 12)
    watt = np.exp(-e / 0.988) * np.sinh(np.sqrt(2.249 * e))
    write("shape_neutron_watt_u235.csv", "differential_flux", "neutron", e, watt / np.trapezoid(watt, e),
          "Watt fission spectrum a=0.988 MeV b=2.249/MeV (U-235)")

    e = grid(0.1, 10.5, 16)
    g = np.where(e < 0.6, 38.13 * np.clip(e - 0.085, 1e-6, None) * np.exp(1.648 * e),
                 np.where(e < 1.5, 26.8 * np.exp(-2.3 * e), 8.0 * np.exp(-1.1 * e)))
    write("shape_gamma_prompt_u235.csv", "differential_flux", "gamma", e, g / np.trapezoid(g, e),
          "prompt fission gamma spectrum (three-piece exponential fit; U-235)")

    e = grid(0.01, 10.0, 12)
    beta = np.exp(-0.575 * e - 0.055 * e**2)
    write("shape_beta_u235_fp.csv", "differential_flux", "electron", e, beta / np.trapezoid(beta, e),
          "fission-product beta spectrum exp(-0.575E-0.055E^2) (U-235)")


SYNTH = "SYNTHETIC illustrative annual-average spectrum (not AP8/AE8 output)"


def orbit_spectra():
    # inner-belt protons: soft component plus a hard ~90 MeV tail up to 400 MeV
    e = grid(0.1, 400.0, 10)
    p = 2.0e3 * e**-1.2 * np.exp(-e / 5.0) + 22.0 * np.exp(-e / 90.0)
    write("flux_proton_LEO_polar_800km.csv", "differential_flux", "proton", e, p, f"{SYNTH}; LEO 800 km polar")

    e = grid(0.04, 7.0, 10)
    write("flux_electron_LEO_polar_800km.csv", "differential_flux", "electron", e,
          9.0e6 * np.exp(-e / 0.25), f"{SYNTH}; LEO 800 km polar")

    # outer-belt protons stop below 5 MeV
    for orbit, amp in (("MEO_20200km", 3.0e6), ("GEO_35786km", 1.0e6)):
        e = grid(0.1, 5.0, 10)
        write(f"flux_proton_{orbit}.csv", "differential_flux", "proton", e,
              amp * e**-2.5 * np.exp(-e / 1.0), f"{SYNTH}; {orbit}")

    e = grid(0.04, 7.0, 10)
    write("flux_electron_MEO_20200km.csv", "differential_flux", "electron", e,
          6.0e7 * np.exp(-e / 0.55), f"{SYNTH}; MEO 20200 km")
    write("flux_electron_GEO_35786km.csv", "differential_flux", "electron", e,
          1.2e7 * np.exp(-e / 0.45), f"{SYNTH}; GEO 35786 km")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    pairs("niel_proton_si.csv", "niel", "proton", PROTON_NIEL, "proton NIEL in Si (rounded literature values)")
    pairs("niel_electron_si.csv", "niel", "electron", ELECTRON_NIEL,
          "electron NIEL in Si (rounded literature values; threshold 0.21 MeV)")
    pairs("niel_neutron_si.csv", "niel", "neutron", NEUTRON_NIEL, "neutron NIEL in Si (rounded literature values)")
    pairs("niel_gamma_si.csv", "niel", "gamma", GAMMA_NIEL, "Co-60 gamma effective NIEL in Si (two lines only; order-of-magnitude value)")
    pairs("range_proton_al.csv", "csda_range", "proton", PROTON_RANGE, "proton CSDA range in Al (PSTAR-style rounded)")
    pairs("range_electron_al.csv", "csda_range", "electron", ELECTRON_RANGE,
          "electron CSDA range in Al (ESTAR-style rounded)")
    pairs("mu_photon_al.csv", "mass_attenuation", "gamma", PHOTON_MU,
          "photon mass attenuation in Al incl. coherent (XCOM-style)")
    fission_shapes()
    orbit_spectra()


if __name__ == "__main__":
    main()
