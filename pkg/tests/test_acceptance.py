"""Acceptance criteria, one test per criterion.

Each criterion records a PASS/FAIL line that is printed in the pytest
terminal summary.  Running this file directly prints the same lines:

    python tests/test_acceptance.py
"""
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from _support import aluminium, bundled, spectrum, table, trapezoid_oracle  # noqa: E402
from spaddcr import damage, environment as env, link, physics_data as pd, shielding  # noqa: E402
from spaddcr.scenario import (  # noqa: E402
    ENVIRONMENTS,
    bundled_path,
    parse_config,
    read_config,
    render_outputs,
    run_scenario,
    table2_csv,
)

RESULTS = []

TEMPS = (-10, -40, -60, -80)
COLUMNS = ("LEO (1 mm)", "LEO (10 mm)", "MEO (1 mm)", "MEO (10 mm)", "GEO (1 mm)", "GEO (10 mm)")
# published DCR increases (counts/s); blocks follow ENVIRONMENTS, rows follow TEMPS
PUBLISHED_DCR = {
    "natural": [
        [7.39e6, 1.96e6, 7.49e7, 2.13e3, 6.10e6, 2.05e2],
        [3.96e5, 1.05e5, 4.01e6, 1.14e2, 3.27e5, 1.10e1],
        [5.62e4, 1.49e4, 5.69e5, 1.62e1, 4.64e4, 1.56e0],
        [7.98e3, 2.12e3, 8.09e4, 2.30e0, 6.60e3, 2.21e-1],
    ],
    "natural+prompt": [
        [7.64e6, 2.21e6, 7.49e7, 2.28e3, 6.10e6, 2.56e2],
        [4.09e5, 1.18e5, 4.01e6, 1.22e2, 3.27e5, 1.37e1],
        [5.81e4, 1.68e4, 5.69e5, 1.74e1, 4.64e4, 1.95e0],
        [8.26e3, 2.39e3, 8.09e4, 2.47e0, 6.60e3, 2.77e-1],
    ],
    "natural+belt": [
        [5.80e9, 8.29e7, 7.50e7, 4.11e3, 6.11e6, 3.17e2],
        [3.11e8, 4.44e6, 4.02e6, 2.20e2, 3.27e5, 1.70e1],
        [4.41e7, 6.30e5, 5.71e5, 3.13e1, 4.65e4, 2.41e0],
        [6.27e6, 8.96e4, 8.11e4, 4.44e0, 6.60e3, 3.43e-1],
    ],
    "natural+prompt+belt": [
        [5.80e9, 8.31e7, 7.50e7, 4.26e3, 6.11e6, 3.68e2],
        [3.11e8, 4.45e6, 4.02e6, 2.28e2, 3.27e5, 1.97e1],
        [4.41e7, 6.32e5, 5.71e5, 3.24e1, 4.65e4, 2.80e0],
        [6.27e6, 8.98e4, 8.11e4, 4.61e0, 6.60e3, 3.98e-1],
    ],
}


def record(number, title, ok, detail):
    RESULTS.append((number, title, bool(ok), detail))
    return ok


def rel(a, b):
    return abs(a - b) / abs(b)


# ------------------------------------------------------------------ 1


def criterion_1():
    t0 = time.perf_counter()
    worst = 0.0
    det = damage.DetectorModel()
    for block in PUBLISHED_DCR.values():
        for row, t in zip(block[1:], TEMPS[1:]):
            for ref, value in zip(block[0], row):
                expected = math.exp(-damage.ALPHA * (-10 - t))
                worst = max(worst, rel(value / ref, expected))
                scaled = damage.scale_dcr(damage.DcrComponent(ref, -10.0, "proton"), t, det).rate
                worst = max(worst, rel(scaled, value))
    elapsed = time.perf_counter() - t0
    ok = worst <= 0.01 and elapsed < 1.0
    return ok, f"72 ratios, worst deviation {worst:.3%} (limit 1%), {elapsed * 1e3:.1f} ms"


# ------------------------------------------------------------------ 2


def criterion_2():
    det = damage.DetectorModel()
    anchor = damage.dose_to_dcr(damage.DamageDose(36.26, "proton"), det)
    rng = np.random.default_rng(2)
    doses = 10 ** rng.uniform(-3, 12, 10)
    worst = max(rel(damage.dose_to_dcr(damage.DamageDose(d, "proton"), det).rate, d / 36.26) for d in doses)
    a, b = rng.uniform(0, 10, 2)
    mix = damage.dose_to_dcr(damage.DamageDose(a * doses[0] + b * doses[1], "proton"), det).rate
    worst = max(worst, rel(mix, a * doses[0] / 36.26 + b * doses[1] / 36.26))
    ok = anchor.rate == 1.0 and anchor.reference_temperature == -10.0 and worst <= 1e-12
    return ok, f"36.26 -> {anchor.rate!r} /s at {anchor.reference_temperature:g} C; linearity worst {worst:.1e}"


# ------------------------------------------------------------------ 3


def criterion_3():
    t0 = time.perf_counter()
    n, g = env.prompt_totals(1.0, 100.0)
    worst = 0.0
    for r in np.geomspace(100, 40_000, 200):
        rn, rg = env.prompt_totals(1.0, float(r))
        worst = max(worst, rel(rn * r**2, n * 100**2), rel(rg * r**2, g * 100**2))
    elapsed = time.perf_counter() - t0
    ok = rel(n, 1.6e11) <= 1e-12 and rel(g, 9.9e10) <= 1e-12 and worst <= 1e-12 and elapsed < 1.0
    return ok, f"phi_n={n:.4e}, phi_g={g:.4e}; phi R^2 spread {worst:.1e}; {elapsed * 1e3:.1f} ms"


# ------------------------------------------------------------------ 4


def criterion_4():
    b = link.LinkBudget(source_rate=1e7, loss_db=30, gate_width=1e-9, gate_rate=1e7, dcr_free_running=110_000)
    p = link.link_fidelity(b)
    r = link.protocol_threshold_check(p, link.Protocol.BB84)
    ok = abs(p.fidelity - 0.9009) <= 1e-4 and abs(p.fidelity - 10_000 / 11_100) < 1e-15 and r.passed \
        and p.qber <= 0.11
    return ok, f"fidelity {p.fidelity:.6f}, QBER {p.qber:.4f}, BB84 {r.status}"


# ------------------------------------------------------------------ 5


def criterion_5():
    ranges = pd.read_energy_table(bundled_path("range_proton_al.csv"), "csda_range")
    meo = pd.Spectrum(bundled("flux_proton_MEO_20200km.csv"), env.YEAR).to_fluence(env.YEAR)
    rng = np.random.default_rng(5)
    trials = [meo] + [
        spectrum(np.geomspace(0.1, 5.0, 8), 10 ** rng.uniform(-2, 6, 8)) for _ in range(10)
    ]
    worst = 0.0
    for sp in trials:
        assert sp.domain[1] <= 5.0
        for mm in (1.0, 1.5, 3.0, 10.0):
            s = shielding.ShieldSpec(mm, ranges, aluminium(0).electron_range_table, aluminium(0).photon_mu_table)
            worst = max(worst, shielding.degrade_proton_spectrum(sp, s).transmitted.total())
    return worst == 0.0, f"{len(trials)} spectra <= 5 MeV, 4 thicknesses >= 1 mm, max transmitted {worst:g}"


# ------------------------------------------------------------------ 6


def criterion_6():
    flux, tau = 4.66e8, 100 * env.DAY
    asymptote = flux * tau
    t = np.concatenate([[0.0], np.geomspace(1.0, 50 * tau, 400)])
    f = np.array([env.belt_total_fluence(flux, tau, float(x)) for x in t])
    monotone = np.all(np.diff(f) >= 0)
    # concavity on a uniform grid: second differences never positive
    u = np.linspace(0, 10 * tau, 401)
    fu = np.array([env.belt_total_fluence(flux, tau, float(x)) for x in u])
    concave = np.all(np.diff(fu, 2) <= 1e-12 * asymptote)
    bounded = np.all(f <= 4.03e15)
    at_tau = env.belt_total_fluence(flux, tau, tau)
    err = rel(at_tau, (1 - math.exp(-1)) * asymptote)
    ok = monotone and concave and bounded and err <= 1e-9 and abs(at_tau / asymptote - 0.632) < 5e-4
    return ok, (f"asymptote {asymptote:.4e} <= 4.03e15; Phi(tau)/asymptote = {at_tau / asymptote:.6f} "
                f"(rel err vs 1-1/e {err:.1e}); monotone={monotone}, concave={concave}")


# ------------------------------------------------------------------ 7


def _random_pair(rng):
    while True:
        parts = []
        for kind in ("differential_flux", "niel"):
            n = int(rng.integers(2, 11))
            e = np.sort(rng.choice(np.geomspace(1e-2, 1e3, 500), n, replace=False))
            parts.append(table(e, 10 ** rng.uniform(-3, 3, n), kind))
        a, b = parts
        if max(a.energies[0], b.energies[0]) < min(a.energies[-1], b.energies[-1]):
            return pd.Spectrum(a, is_fluence=True), b


def _falling(particle, lo, hi, rng, n=9):
    e = np.geomspace(lo, hi, n) * np.exp(rng.uniform(-0.1, 0.1, n))
    e[0], e[-1] = lo, hi
    return spectrum(np.sort(e), 10 ** np.cumsum(-rng.uniform(0, 2.5, n)), particle)


def criterion_7():
    details, ok = [], True

    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        sp, curve = _random_pair(rng)
        worst = max(worst, rel(pd.integrate_product(sp, curve), trapezoid_oracle(sp.table, curve)))
    ok &= worst <= 1e-9
    details.append(f"quadrature worst {worst:.1e}")

    thicknesses = (1.0, 5.0, 20.0)
    violations = 0
    for _ in range(100):
        p = _falling("proton", 0.1, 400.0, rng)
        e = _falling("electron", 0.04, 7.0, rng)
        g = spectrum(np.geomspace(0.02, 50, 9), 10 ** rng.uniform(-3, 3, 9), "gamma")
        for sp, fn in ((p, shielding.degrade_proton_spectrum), (e, shielding.transmit_electron_spectrum),
                       (g, shielding.attenuate_photon_spectrum)):
            prev = sp.total()
            for mm in thicknesses:
                out = fn(sp, aluminium(mm)).transmitted
                n = out.total()
                violations += n > prev * (1 + 1e-9)
                prev = n
                if sp is p and n > 0:
                    lo, hi = out.domain
                    lo = max(lo, p.domain[0])
                    incident_mean = pd.energy_moment(p.table, lo, hi) / pd.integrate(p.table, lo, hi)
                    violations += out.mean_energy() < incident_mean * (1 - 1e-9)
    ok &= violations == 0
    details.append(f"monotonicity/hardening violations {violations}/1200")

    worst = 0.0
    for _ in range(50):
        g = spectrum(np.geomspace(0.02, 50, 9), 10 ** rng.uniform(-3, 3, 9), "gamma")
        t1, t2 = rng.uniform(0, 30, 2)
        two = shielding.attenuate_photon_spectrum(
            shielding.attenuate_photon_spectrum(g, aluminium(t1)).transmitted, aluminium(t2)).transmitted
        one = shielding.attenuate_photon_spectrum(g, aluminium(t1 + t2)).transmitted
        worst = max(worst, float(np.max(np.abs(two.values - one.values) / one.values)))
    ok &= worst <= 1e-12
    details.append(f"photon composition {worst:.1e}")

    worst = 0.0
    for _ in range(200):
        t0, t1, t2 = rng.uniform(-100, 40, 3)
        c = damage.DcrComponent(float(10 ** rng.uniform(0, 9)), float(t0), "proton")
        worst = max(worst, rel(damage.scale_dcr(damage.scale_dcr(c, t1), t2).rate, damage.scale_dcr(c, t2).rate))
        worst = max(worst, rel(damage.scale_dcr(c, t0).rate, c.rate))
    ok &= worst <= 1e-12
    details.append(f"temperature group law {worst:.1e}")

    config = read_config(bundled_path("table2.toml"))
    rep = run_scenario(config)
    worst = 0.0
    for r in rep.rows:
        if r.environment == "natural+prompt":
            nat = rep.row(r.orbit, "natural", r.shield_mm, r.temperature_c).total
            worst = max(worst, rel(r.total - nat, r.by_source()["prompt"]))
    ok &= worst <= 1e-9
    details.append(f"additivity {worst:.1e}")

    with tempfile.TemporaryDirectory() as tmp:
        a = render_outputs(run_scenario(config), config, Path(tmp) / "a")
        b = render_outputs(run_scenario(config), config, Path(tmp) / "b")
        same = all(x.read_bytes() == y.read_bytes() for x, y in zip(sorted(a), sorted(b))) and len(a) == len(b)
    ok &= same
    details.append(f"byte-identical outputs={same}")
    return ok, "; ".join(details)


# ------------------------------------------------------------------ 8


def criterion_8():
    rep = run_scenario(read_config(bundled_path("table2.toml")))
    lines = table2_csv(rep).splitlines()
    header = lines[0].split(",")
    body = [l.split(",") for l in lines[1:]]
    shape_ok = header[2:] == list(COLUMNS) and len(body) == 16 and all(len(r) == 8 and all(r[2:]) for r in body)
    blocks_ok = [r[0] for r in body] == [e for e in ENVIRONMENTS for _ in TEMPS]
    temps_ok = [float(r[1]) for r in body] == [float(t) for _ in ENVIRONMENTS for t in TEMPS]
    want = ("GammaNielClampWarning", "SpeciesCalibrationWarning")
    warn_ok = all(any(w.startswith(k) for w in rep.warnings) for k in want) and len(set(rep.warnings)) == len(rep.warnings)
    ok = shape_ok and blocks_ok and temps_ok and warn_ok
    return ok, f"pivot {len(header) - 2} columns x {len(body)} rows; warnings: {', '.join(w.split(':')[0] for w in rep.warnings)}"


CRITERIA = [
    (1, "temperature-scaling golden test", criterion_1),
    (2, "conversion anchor", criterion_2),
    (3, "prompt fluence", criterion_3),
    (4, "link worked example", criterion_4),
    (5, "outer-belt proton cutoff", criterion_5),
    (6, "belt saturation", criterion_6),
    (7, "property suite", criterion_7),
    (8, "end-to-end structural reproduction", criterion_8),
]


@pytest.mark.parametrize("number, title, fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn):
    ok, detail = fn()
    record(number, title, ok, detail)
    assert ok, detail


def format_result(number, title, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"


if __name__ == "__main__":
    failed = 0
    for number, title, fn in CRITERIA:
        ok, detail = fn()
        failed += not ok
        print(format_result(number, title, ok, detail))
    sys.exit(1 if failed else 0)
