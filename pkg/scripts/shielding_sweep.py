#!/usr/bin/env python3
"""Transmitted fluence and DCR against aluminium thickness for one orbit.

Shows the proton hardening, the electron cutoff and the persistence of
bremsstrahlung photons as the shell thickens.

    python scripts/shielding_sweep.py --orbit MEO_20200km
"""
import argparse
import warnings

import numpy as np

from spaddcr import damage, environment as env, shielding
from spaddcr.physics_data import Spectrum, read_energy_table
from spaddcr.scenario import bundled_path


def load(name, kind=None):
    return read_energy_table(bundled_path(name), kind)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--orbit", default="LEO_polar_800km", choices=[o.value for o in env.OrbitName if o.value != "custom"])
    ap.add_argument("--thickness", type=float, nargs="+", default=[0.0, 0.5, 1, 2, 5, 10, 20])
    args = ap.parse_args(argv)

    protons = Spectrum(load(f"flux_proton_{args.orbit}.csv"), env.YEAR).to_fluence(env.YEAR)
    electrons = Spectrum(load(f"flux_electron_{args.orbit}.csv"), env.YEAR).to_fluence(env.YEAR)
    ranges = (load("range_proton_al.csv", "csda_range"), load("range_electron_al.csv", "csda_range"),
              load("mu_photon_al.csv", "mass_attenuation"))
    niel = {p: load(f"niel_{p}_si.csv", "niel") for p in ("proton", "electron", "gamma")}
    det = damage.DetectorModel()

    print(f"{'mm':>5} {'p fluence':>11} {'<E_p> MeV':>10} {'e fluence':>11} {'photons':>11} "
          f"{'DCR p':>10} {'DCR e':>10} {'DCR brems':>10}")
    for mm in args.thickness:
        s = shielding.ShieldSpec(mm, *ranges)
        p = shielding.degrade_proton_spectrum(protons, s).transmitted
        e = shielding.transmit_electron_spectrum(electrons, s)
        ph = shielding.attenuate_photon_spectrum(e.secondary_photons, s.with_thickness(mm / 2)).transmitted
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rates = [damage.dose_to_dcr(damage.niel_dose(sp, niel[k]), det).rate
                     for sp, k in ((p, "proton"), (e.transmitted, "electron"), (ph, "gamma"))]
        mean = p.mean_energy() if p.total() > 0 else np.nan
        print(f"{mm:5g} {p.total():11.3e} {mean:10.3g} {e.transmitted.total():11.3e} {ph.total():11.3e} "
              + " ".join(f"{r:10.3e}" for r in rates))


if __name__ == "__main__":
    main()
