"""Displacement damage dose, dark-count conversion and temperature scaling.

Fluence spectra are folded with NIEL curves into a damage value carried in
the units the conversion factor is quoted in ("MeV cm^2 g^-1"), then
divided by ``k_conv`` to get a permanent dark count rate increase at the
reference temperature.

Temperature scaling is ``DCR(T) = DCR(T_ref) * exp(|alpha| * (T - T_ref))``:
cooling by 30 °C at alpha = 0.09757 multiplies the rate by 0.0536.  One
decade corresponds to ~23.6 °C, close to the "factor 10 per 20 °C" rule
of thumb.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

from .errors import DataError, DomainError, GammaNielClampWarning, LowTemperatureWarning
from .physics_data import Particle, TableKind, constant_extension, integrate_product

ALPHA = 0.09757  # per °C
K_CONV = 36.26  # MeV cm^2 g^-1 per count/s
REFERENCE_TEMPERATURE = -10.0  # °C
VALIDITY_FLOOR = -100.0  # °C, lowest measured temperature
DOSE_UNITS = "MeV cm^2 g^-1"


@dataclass(frozen=True)
class DamageDose:
    value: float
    particle: Particle
    duration: float = 0.0
    units: str = DOSE_UNITS

    def __post_init__(self):
        object.__setattr__(self, "particle", Particle(self.particle))
        if self.value < 0 or self.duration < 0:
            raise DataError("damage dose and duration must be >= 0")

    def __add__(self, other):
        if other.particle is not self.particle:
            raise DataError("cannot add doses of different species")
        return DamageDose(self.value + other.value, self.particle, self.duration + other.duration)


@dataclass(frozen=True)
class DetectorModel:
    alpha: float = -ALPHA
    k_conv: float = K_CONV
    reference_temperature: float = REFERENCE_TEMPERATURE
    reference_bias_note: str = "bias at breakdown voltage"

    def __post_init__(self):
        if not self.k_conv > 0:
            raise DataError("k_conv must be > 0")
        if self.alpha == 0:
            raise DataError("alpha must be non-zero")


@dataclass(frozen=True)
class DcrComponent:
    rate: float  # counts/s at reference_temperature
    reference_temperature: float
    particle: str
    label: str = "natural"

    def __post_init__(self):
        if self.rate < 0:
            raise DataError("DCR rate must be >= 0")


def niel_dose(fluence, niel, duration=0.0, clamp=None):
    """Fold a fluence spectrum with a NIEL curve.

    The fold runs over the intersection of the two domains; fluence below
    the NIEL curve's first energy (the damage threshold) contributes
    nothing.  Gamma NIEL curves only cover the Co-60 lines, so by default
    they are held constant outside their domain, with a
    :class:`GammaNielClampWarning`.
    """
    if not fluence.is_fluence:
        raise DataError("niel_dose needs a time-integrated fluence spectrum")
    if niel.kind is not TableKind.NIEL:
        raise DataError(f"expected a niel table, got {niel.kind.value}")
    if fluence.particle is not niel.particle:
        raise DataError(f"species mismatch: {fluence.particle.value} fluence vs {niel.particle.value} NIEL")
    if clamp is None:
        clamp = niel.particle is Particle.GAMMA
    f_lo, f_hi = fluence.domain
    n_lo, n_hi = niel.domain
    if clamp and (f_lo < n_lo or f_hi > n_hi):
        warnings.warn(
            f"gamma NIEL held at its endpoint values outside [{n_lo:g}, {n_hi:g}] MeV",
            GammaNielClampWarning,
            stacklevel=2,
        )
        niel = constant_extension(niel, f_lo, f_hi)
        n_lo, n_hi = niel.domain
    if f_hi <= n_lo:
        return DamageDose(0.0, fluence.particle, duration)
    if f_lo >= n_hi:
        raise DomainError(f"{fluence.particle.value} fluence lies entirely above the NIEL table", (n_lo, n_hi))
    value = integrate_product(fluence, niel)
    return DamageDose(max(value, 0.0), fluence.particle, duration)


def dose_to_dcr(dose, det=DetectorModel(), label="natural", species=None):
    """Permanent DCR increase at the detector's reference temperature.

    ``species`` overrides the dose's particle name in the component (the
    scenario reports bremsstrahlung photons separately from prompt gammas).
    """
    name = species or dose.particle.value
    return DcrComponent(dose.value / det.k_conv, det.reference_temperature, name, label)


def temperature_factor(from_t, to_t, alpha=ALPHA):
    """Multiplicative DCR change going from ``from_t`` to ``to_t`` (°C)."""
    return math.exp(abs(alpha) * (to_t - from_t))


def scale_dcr(component, target_temperature, det=DetectorModel()):
    if target_temperature < VALIDITY_FLOOR:
        warnings.warn(
            f"temperature scaling extrapolated to {target_temperature:g} °C, below the "
            f"{VALIDITY_FLOOR:g} °C validity floor",
            LowTemperatureWarning,
            stacklevel=2,
        )
    f = temperature_factor(component.reference_temperature, target_temperature, det.alpha)
    return replace(component, rate=component.rate * f, reference_temperature=float(target_temperature))


def total_dcr(components, at, det=DetectorModel()):
    # math.fsum keeps the sum independent of component order
    return math.fsum(scale_dcr(c, at, det).rate for c in components)
