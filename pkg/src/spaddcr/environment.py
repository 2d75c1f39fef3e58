"""Radiation fluence seen by the detector: natural belts and HANE effects.

Three sources are modelled:

* natural trapped protons and electrons, as annual-average flux spectra
  scaled linearly with exposure time;
* prompt neutrons and gammas from a high-altitude nuclear explosion,
  ``phi_n = 1.6e15 Y / R^2`` and ``phi_g = 9.9e14 Y / R^2`` (Y in MT,
  R in km, cm^-2), spread over normalised fission spectrum shapes;
* the artificial electron belt, whose flux decays as ``exp(-t / tau)``
  with a constant spectrum shape.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from .errors import DataError
from .physics_data import Particle, Spectrum

DAY = 86400.0
HOUR = 3600.0
YEAR = 365.25 * DAY

PROMPT_NEUTRON_COEFF = 1.6e15  # n cm^-2 km^2 MT^-1
PROMPT_GAMMA_COEFF = 9.9e14  # gamma cm^-2 km^2 MT^-1

DEFAULT_TRAPPING_EFFICIENCY = 0.10
# flux_0 in the belt table is referenced to this epoch after detonation
BELT_REFERENCE_EPOCH = 1.0 * HOUR

_SHAPE_TOL = 1e-6


class OrbitName(str, enum.Enum):
    LEO_POLAR_800KM = "LEO_polar_800km"
    MEO_20200KM = "MEO_20200km"
    GEO_35786KM = "GEO_35786km"
    CUSTOM = "custom"


@dataclass(frozen=True)
class BeltParameters:
    """One column of the artificial-belt table (1 MT at 100 km, 1 h after)."""

    latitude: float  # deg, North America; metadata only
    l_shell: float
    volume: float  # m^3
    flux_0: float  # cm^-2 s^-1
    mean_lifetime_days: float


BELT_TABLE = {
    OrbitName.LEO_POLAR_800KM: BeltParameters(5.0, 1.125, 1.17e17, 4.66e8, 100.0),
    OrbitName.MEO_20200KM: BeltParameters(51.2, 4.167, 2.54e20, 1.11e5, 10.0),
    OrbitName.GEO_35786KM: BeltParameters(57.9, 6.58, 1.77e21, 1.26e4, 5.0),
}


@dataclass(frozen=True, eq=False)
class OrbitEnvironment:
    name: OrbitName
    proton_spectrum: Spectrum
    electron_spectrum: Spectrum
    averaging_period: float = YEAR

    def __post_init__(self):
        object.__setattr__(self, "name", OrbitName(self.name))
        if self.averaging_period <= 0:
            raise DataError("averaging_period must be > 0")
        for sp, want in ((self.proton_spectrum, Particle.PROTON), (self.electron_spectrum, Particle.ELECTRON)):
            if sp.particle is not want:
                raise DataError(f"orbit {self.name.value}: expected a {want.value} spectrum, got {sp.particle.value}")
            if sp.is_fluence:
                raise DataError(f"orbit {self.name.value}: belt spectra must be fluxes, not fluences")


def _check_shape(shape, particle, what):
    if shape.particle is not particle:
        raise DataError(f"{what} must be a {particle.value} spectrum")
    total = shape.total()
    if abs(total - 1.0) > _SHAPE_TOL:
        raise DataError(f"{what} must integrate to 1 (got {total:.9g}); use Spectrum.normalized()")


def shape_spectrum(spectrum):
    """Normalised, fluence-typed copy of a spectrum, for use as a shape."""
    spectrum = replace(spectrum, is_fluence=True)
    return spectrum.normalized()


@dataclass(frozen=True, eq=False)
class ArtificialBelt:
    flux_0: float  # cm^-2 s^-1 at the reference epoch
    mean_lifetime_days: float
    spectrum_shape: Spectrum
    l_shell: float = float("nan")
    volume: float = float("nan")  # m^3
    trapping_efficiency: float = DEFAULT_TRAPPING_EFFICIENCY
    latitude: float = float("nan")

    def __post_init__(self):
        if self.flux_0 < 0:
            raise DataError("belt flux_0 must be >= 0")
        if not self.mean_lifetime_days > 0:
            raise DataError("belt mean lifetime must be > 0")
        if not 0 <= self.trapping_efficiency <= 1:
            raise DataError("trapping efficiency must be within [0, 1]")
        _check_shape(self.spectrum_shape, Particle.ELECTRON, "belt spectrum shape")

    @property
    def mean_lifetime(self):
        """Seconds."""
        return self.mean_lifetime_days * DAY

    @classmethod
    def from_table(cls, orbit, spectrum_shape, trapping_efficiency=DEFAULT_TRAPPING_EFFICIENCY,
                   volume=None, flux_0=None, mean_lifetime_days=None):
        """Belt defaults for a named orbit.

        Unless ``flux_0`` is given explicitly, the tabulated flux is scaled
        by ``trapping_efficiency / 0.10`` and by ``volume_table / volume``.
        """
        p = BELT_TABLE[OrbitName(orbit)]
        vol = p.volume if volume is None else float(volume)
        if vol <= 0:
            raise DataError("belt volume must be > 0")
        if flux_0 is None:
            flux_0 = p.flux_0 * (trapping_efficiency / DEFAULT_TRAPPING_EFFICIENCY) * (p.volume / vol)
        return cls(
            flux_0=flux_0,
            mean_lifetime_days=p.mean_lifetime_days if mean_lifetime_days is None else mean_lifetime_days,
            spectrum_shape=spectrum_shape,
            l_shell=p.l_shell,
            volume=vol,
            trapping_efficiency=trapping_efficiency,
            latitude=p.latitude,
        )


@dataclass(frozen=True, eq=False)
class HaneScenario:
    yield_mt: float
    distance_km: float
    neutron_spectrum_shape: Spectrum
    gamma_spectrum_shape: Spectrum
    belt: ArtificialBelt | None = None
    burst_altitude_km: float = 100.0
    notes: tuple = field(default=())

    def __post_init__(self):
        if self.yield_mt < 0:
            raise DataError("yield must be >= 0")
        if not self.distance_km > 0:
            raise DataError("distance to the burst must be > 0 km")
        _check_shape(self.neutron_spectrum_shape, Particle.NEUTRON, "prompt neutron shape")
        _check_shape(self.gamma_spectrum_shape, Particle.GAMMA, "prompt gamma shape")


def natural_fluence(env, duration):
    """Proton and electron fluence spectra after ``duration`` seconds on orbit."""
    if duration < 0:
        raise DataError("duration must be >= 0")
    return {
        Particle.PROTON: env.proton_spectrum.to_fluence(duration),
        Particle.ELECTRON: env.electron_spectrum.to_fluence(duration),
    }


def prompt_totals(yield_mt, distance_km):
    """Total prompt (neutron, gamma) fluence in cm^-2."""
    if not distance_km > 0:
        raise DataError("distance to the burst must be > 0 km")
    k = yield_mt / distance_km**2
    return PROMPT_NEUTRON_COEFF * k, PROMPT_GAMMA_COEFF * k


def prompt_fluence(scenario):
    """Unshielded prompt neutron and gamma fluence spectra at the satellite."""
    n_tot, g_tot = prompt_totals(scenario.yield_mt, scenario.distance_km)
    return (
        scenario.neutron_spectrum_shape.scaled(n_tot),
        scenario.gamma_spectrum_shape.scaled(g_tot),
    )


def belt_total_fluence(flux_0, mean_lifetime, duration, start=0.0):
    """∫ flux_0 exp(-t/tau) dt over [start, start + duration] (seconds)."""
    if duration < 0 or start < 0:
        raise DataError("belt exposure start and duration must be >= 0")
    tau = mean_lifetime
    return flux_0 * tau * math.exp(-start / tau) * -math.expm1(-duration / tau)


def belt_fluence(belt, duration, start=0.0):
    """Electron fluence spectrum collected in the belt.

    ``start`` and ``duration`` are seconds measured from the epoch to which
    ``belt.flux_0`` refers.
    """
    total = belt_total_fluence(belt.flux_0, belt.mean_lifetime, duration, start)
    return belt.spectrum_shape.scaled(total)
