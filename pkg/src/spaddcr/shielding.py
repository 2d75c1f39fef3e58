"""Straight-ahead slab transport through a spherical aluminium shell.

The shell is collapsed to normal incidence on a 1D slab.  Charged
particles follow the continuous-slowing-down approximation (no straggling,
no angular scattering); electrons travel ``electron_detour`` times the
geometric path.  Photons are attenuated exponentially with no buildup.
Stopping electrons radiate bremsstrahlung with the radiative-yield
approximation ``y(E) = Z E / (Z E + 800)`` and a thin-target ``1/k``
spectrum.

Charged particles whose residual energy drops below the first energy of
the range table are counted as absorbed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DomainError
from .physics_data import (
    EnergyTable,
    Interp,
    Particle,
    Spectrum,
    TableKind,
    cumulative_integral,
    energy_moment,
    integrate,
    inverse_lookup,
    lookup,
)

ALUMINIUM_DENSITY = 2.699  # g cm^-3
ALUMINIUM_Z = 13
ELECTRON_DETOUR = 1.3
BREMS_K_MIN = 0.01  # MeV

# output grid density of the push-forward, points per decade of energy
_POINTS_PER_DECADE = 24


@dataclass(frozen=True, eq=False)
class ShieldSpec:
    thickness: float  # mm
    proton_range_table: EnergyTable
    electron_range_table: EnergyTable
    photon_mu_table: EnergyTable
    density: float = ALUMINIUM_DENSITY
    atomic_number: int = ALUMINIUM_Z
    electron_detour: float = ELECTRON_DETOUR
    k_min: float = BREMS_K_MIN

    def __post_init__(self):
        if self.thickness < 0:
            raise DataError("shield thickness must be >= 0")
        if self.density <= 0:
            raise DataError("shield density must be > 0")
        if self.electron_detour < 1:
            raise DataError("electron detour factor must be >= 1")
        for name, table, kind in (
            ("proton_range_table", self.proton_range_table, TableKind.CSDA_RANGE),
            ("electron_range_table", self.electron_range_table, TableKind.CSDA_RANGE),
            ("photon_mu_table", self.photon_mu_table, TableKind.MASS_ATTENUATION),
        ):
            if table.kind is not kind:
                raise DataError(f"{name} must be a {kind.value} table")
        for name in ("proton_range_table", "electron_range_table"):
            if np.any(np.diff(getattr(self, name).values) <= 0):
                raise DataError(f"{name} must increase strictly with energy")

    @property
    def areal_density(self):
        """g cm^-2."""
        return self.thickness / 10.0 * self.density

    def with_thickness(self, thickness):
        from dataclasses import replace

        return replace(self, thickness=thickness)


@dataclass(frozen=True, eq=False)
class TransmissionResult:
    transmitted: Spectrum
    secondary_photons: Spectrum | None = None
    energy_deposited_fraction: float = 0.0


def radiative_yield(energy, z=ALUMINIUM_Z):
    """Fraction of an electron's energy loss radiated as bremsstrahlung."""
    ze = z * np.asarray(energy, dtype=float)
    return ze / (ze + 800.0)


def _require_within(spectrum, table, what):
    lo, hi = spectrum.domain
    tlo, thi = table.domain
    if lo < tlo or hi > thi:
        raise DomainError(f"{spectrum.particle.value} spectrum [{lo:.6g}, {hi:.6g}] MeV exceeds the {what}", (tlo, thi))


def _zero_like(spectrum, label):
    tab = spectrum.table.with_values(np.zeros(len(spectrum.table)), source_label=label)
    return Spectrum(tab, spectrum.duration_basis, spectrum.is_fluence)


def _log_grid(lo, hi):
    n = max(2, int(np.ceil(np.log10(hi / lo) * _POINTS_PER_DECADE)) + 1)
    return np.geomspace(lo, hi, n)


def _dedupe(grid):
    grid = np.unique(grid)
    keep = np.concatenate([[True], np.diff(grid) > 1e-10 * grid[1:]])
    return grid[keep]


def _log_slope(table, e):
    """d ln(value) / d ln(E) of a log-log table on the interval holding e."""
    x, y = table.energies, table.values
    i = np.clip(np.searchsorted(x, e, side="right") - 1, 0, x.size - 2)
    return np.log(y[i + 1] / y[i]) / np.log(x[i + 1] / x[i])


def _range_derivative(table, e):
    if table.interpolation is Interp.LOG_LOG:
        return lookup(table, e) * _log_slope(table, e) / e
    x, y = table.energies, table.values
    i = np.clip(np.searchsorted(x, e, side="right") - 1, 0, x.size - 2)
    return (y[i + 1] - y[i]) / (x[i + 1] - x[i])


class _CsdaMap:
    """E -> E' = R^-1(R(E) - path) for one range table and path length."""

    def __init__(self, range_table, path):
        self.table = range_table
        self.path = path
        self.e_floor = range_table.domain[0]
        self.r_floor = float(range_table.values[0])
        self.r_max = float(range_table.values[-1])
        target = self.r_floor + path
        self.cutoff = inverse_lookup(range_table, target) if target <= self.r_max else np.inf

    def forward(self, e):
        """Residual energy; NaN where the particle is absorbed."""
        e = np.asarray(e, dtype=float)
        r = np.atleast_1d(lookup(self.table, e) - self.path)
        out = np.full(r.shape, np.nan)
        alive = r >= self.r_floor
        if np.any(alive):
            out[alive] = inverse_lookup(self.table, r[alive])
        return out.reshape(e.shape)

    def backward(self, e_out):
        """Incident energy that leaves with ``e_out``."""
        return inverse_lookup(self.table, lookup(self.table, e_out) + self.path)


def _push_forward(incident, range_table, path):
    """CSDA transmission of a charged-particle spectrum.

    Returns ``(table, csda_map)``; ``table`` is None when everything is
    absorbed.  The transmitted count is renormalised to the incident count
    above the cutoff energy.
    """
    csda = _CsdaMap(range_table, path)
    e_lo_in, e_hi_in = incident.domain
    start = max(csda.cutoff, e_lo_in)
    if not start < e_hi_in:
        return None, csda

    out_lo = csda.e_floor if start == csda.cutoff else float(csda.forward(start))
    out_hi = float(csda.forward(e_hi_in))
    knots_in = incident.energies[(incident.energies > start) & (incident.energies < e_hi_in)]
    mapped = csda.forward(knots_in) if knots_in.size else np.empty(0)
    grid_out = _dedupe(np.concatenate([_log_grid(out_lo, out_hi), mapped[np.isfinite(mapped)], [out_lo, out_hi]]))
    grid_out = grid_out[(grid_out >= out_lo) & (grid_out <= out_hi)]
    grid_in = np.clip(csda.backward(grid_out), start, e_hi_in)
    grid_in[0], grid_in[-1] = start, e_hi_in

    jacobian = _range_derivative(range_table, grid_out) / _range_derivative(range_table, grid_in)
    values = lookup(incident.table, grid_in) * jacobian
    table = EnergyTable(
        TableKind.DIFFERENTIAL_FLUX,
        incident.particle,
        grid_out,
        values,
        Interp.LOG_LOG,
        source_label=f"{incident.table.source_label} | CSDA {path:.4g} g/cm2",
    )
    expected = integrate(incident.table, start, e_hi_in)
    got = integrate(table)
    if got > 0:
        table = table.with_values(table.values * (expected / got))
    return table, csda


def _transmit_charged(incident, range_table, path):
    if path == 0:
        return TransmissionResult(incident, None, 0.0), None
    table, csda = _push_forward(incident, range_table, path)
    if table is None:
        transmitted = _zero_like(incident, f"{incident.table.source_label} | absorbed")
    else:
        transmitted = Spectrum(table, incident.duration_basis, incident.is_fluence)
    e_in = energy_moment(incident.table)
    e_out = energy_moment(transmitted.table)
    frac = (e_in - e_out) / e_in if e_in > 0 else 0.0
    return TransmissionResult(transmitted, None, float(frac)), csda


def degrade_proton_spectrum(incident, shield):
    """Slow protons down through the shield (CSDA, straight ahead)."""
    if incident.particle is not Particle.PROTON:
        raise DataError(f"expected a proton spectrum, got {incident.particle.value}")
    _require_within(incident, shield.proton_range_table, "proton range table")
    result, _ = _transmit_charged(incident, shield.proton_range_table, shield.areal_density)
    return result


def _bremsstrahlung(incident, csda, shield):
    """Photon spectrum radiated by electrons losing energy in the shield."""
    k_min = shield.k_min
    e_lo, e_hi = incident.domain
    label = f"bremsstrahlung from {incident.table.source_label}"
    if e_hi <= k_min or csda is None:
        grid = _log_grid(k_min, max(e_hi, 2 * k_min))
        tab = EnergyTable(TableKind.DIFFERENTIAL_FLUX, Particle.GAMMA, grid, np.zeros(grid.size), source_label=label)
        return Spectrum(tab, incident.duration_basis, incident.is_fluence)

    def source(e):
        # photon number weight per unit electron energy, times 1/k gives dN/dk
        e = np.asarray(e, dtype=float)
        out = np.zeros_like(e)
        inside = (e >= e_lo) & (e <= e_hi) & (e > k_min)
        if not np.any(inside):
            return out
        ei = e[inside]
        residual = csda.forward(ei)
        lost = np.where(np.isnan(residual), ei, ei - np.nan_to_num(residual))
        out[inside] = lookup(incident.table, ei) * radiative_yield(ei, shield.atomic_number) * lost / (ei - k_min)
        return out

    extra = [incident.energies[incident.energies > k_min]]
    if k_min < csda.cutoff < e_hi:
        extra.append([csda.cutoff])
    if e_lo > k_min:
        extra.append([e_lo])
    grid = _dedupe(np.concatenate([_log_grid(k_min, e_hi), *extra]))
    grid = grid[(grid >= k_min) & (grid <= e_hi)]
    cum = cumulative_integral(source, grid)
    tail = np.maximum(cum[-1] - cum, 0.0)
    tab = EnergyTable(TableKind.DIFFERENTIAL_FLUX, Particle.GAMMA, grid, tail / grid, Interp.LOG_LOG, source_label=label)
    return Spectrum(tab, incident.duration_basis, incident.is_fluence)


def transmit_electron_spectrum(incident, shield):
    """Electron CSDA transmission plus the bremsstrahlung it generates.

    The photon spectrum is the one created in the shield; self-attenuation
    inside the shell is left to the caller.
    """
    if incident.particle is not Particle.ELECTRON:
        raise DataError(f"expected an electron spectrum, got {incident.particle.value}")
    _require_within(incident, shield.electron_range_table, "electron range table")
    path = shield.areal_density * shield.electron_detour
    result, csda = _transmit_charged(incident, shield.electron_range_table, path)
    photons = _bremsstrahlung(incident, csda, shield)
    return TransmissionResult(result.transmitted, photons, result.energy_deposited_fraction)


def attenuate_photon_spectrum(incident, shield):
    """Narrow-beam exponential attenuation, energies unchanged."""
    if incident.particle is not Particle.GAMMA:
        raise DataError(f"expected a gamma spectrum, got {incident.particle.value}")
    _require_within(incident, shield.photon_mu_table, "photon attenuation table")
    if shield.areal_density == 0:
        return TransmissionResult(incident, None, 0.0)
    factor = np.exp(-lookup(shield.photon_mu_table, incident.energies) * shield.areal_density)
    tab = incident.table.with_values(incident.values * factor)
    out = Spectrum(tab, incident.duration_basis, incident.is_fluence)
    e_in = energy_moment(incident.table)
    frac = 1.0 - energy_moment(tab) / e_in if e_in > 0 else 0.0
    return TransmissionResult(out, None, float(frac))
