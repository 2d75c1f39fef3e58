"""Config-driven pipeline: environment -> shielding -> damage -> DCR -> link.

A scenario config is a TOML document with the sections ``[orbit]``,
``[shield]``, ``[detector]``, ``[hane]``, ``[link]`` and ``[output]``.  Only
``[orbit]``, ``[shield]`` and ``[detector]`` are required; every physics
table defaults to the bundled data.  File references are paths relative to
the config file, or ``bundled:<file>`` for packaged tables.

The report is the orbit x shielding x environment x temperature matrix,
with per-species and per-source breakdowns.  The environment combinations
are ``natural``, ``natural+prompt``, ``natural+belt`` and
``natural+prompt+belt`` (only ``natural`` without a ``[hane]`` section).
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import damage, environment as env_mod, link as link_mod, shielding
from .errors import (
    ConfigError,
    DataError,
    PipelineError,
    SpadDcrWarning,
    SpeciesCalibrationWarning,
)
from .physics_data import Particle, Spectrum, TableKind, read_energy_table

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

BUNDLED_PREFIX = "bundled:"

SPECIES = ("proton", "electron", "bremsstrahlung", "neutron", "gamma")
SOURCES = ("natural", "prompt", "belt")
ENVIRONMENTS = {
    "natural": ("natural",),
    "natural+prompt": ("natural", "prompt"),
    "natural+belt": ("natural", "belt"),
    "natural+prompt+belt": ("natural", "prompt", "belt"),
}
SHORT_ORBIT = {
    env_mod.OrbitName.LEO_POLAR_800KM.value: "LEO",
    env_mod.OrbitName.MEO_20200KM.value: "MEO",
    env_mod.OrbitName.GEO_35786KM.value: "GEO",
}
BELT_KEY = {
    env_mod.OrbitName.LEO_POLAR_800KM.value: env_mod.OrbitName.LEO_POLAR_800KM,
    env_mod.OrbitName.MEO_20200KM.value: env_mod.OrbitName.MEO_20200KM,
    env_mod.OrbitName.GEO_35786KM.value: env_mod.OrbitName.GEO_35786KM,
}
# slant range from a 100 km burst directly below the satellite's orbit
DEFAULT_BURST_DISTANCE_KM = {
    env_mod.OrbitName.LEO_POLAR_800KM.value: 700.0,
    env_mod.OrbitName.MEO_20200KM.value: 20100.0,
    env_mod.OrbitName.GEO_35786KM.value: 35686.0,
}

DEFAULT_TABLES = {
    "proton_range": "bundled:range_proton_al.csv",
    "electron_range": "bundled:range_electron_al.csv",
    "photon_mu": "bundled:mu_photon_al.csv",
    "proton_niel": "bundled:niel_proton_si.csv",
    "electron_niel": "bundled:niel_electron_si.csv",
    "neutron_niel": "bundled:niel_neutron_si.csv",
    "gamma_niel": "bundled:niel_gamma_si.csv",
    "neutron_spectrum": "bundled:shape_neutron_watt_u235.csv",
    "gamma_spectrum": "bundled:shape_gamma_prompt_u235.csv",
    "beta_spectrum": "bundled:shape_beta_u235_fp.csv",
}

NOTES = (
    "shell transport is 1D straight-ahead CSDA at normal incidence; absolute MCNP agreement is not claimed",
    "bremsstrahlung photons are attenuated through half the shield thickness",
    "prompt neutrons and gammas reach the detector unshielded",
    "NIEL dose units follow the conversion-factor convention (MeV cm^2 g^-1)",
)


def bundled_path(name):
    return Path(resources.files("spaddcr") / "data" / name)


def list_bundled_tables():
    """(file name, kind, particle, source label) for every packaged data file.

    Scenario configs are listed with kind ``config``; their label is the
    first comment line.
    """
    out = []
    for p in sorted(bundled_path("").iterdir()):
        if p.suffix == ".csv":
            t = read_energy_table(p)
            out.append((p.name, t.kind.value, t.particle.value, t.source_label))
        elif p.suffix == ".toml":
            first = p.read_text(encoding="utf-8").splitlines()[0]
            out.append((p.name, "config", "-", first.lstrip("# ").strip()))
    return out


# ---------------------------------------------------------------- config


@dataclass
class OrbitConfig:
    name: str
    proton_spectrum: Path
    electron_spectrum: Path
    averaging_period: float = env_mod.YEAR  # s
    distance_km: float | None = None
    belt_flux: float | None = None
    belt_lifetime_days: float | None = None
    belt_volume: float | None = None

    @property
    def label(self):
        return SHORT_ORBIT.get(self.name, self.name)


@dataclass
class ShieldConfig:
    thicknesses: list
    density: float = shielding.ALUMINIUM_DENSITY
    atomic_number: int = shielding.ALUMINIUM_Z
    electron_detour: float = shielding.ELECTRON_DETOUR
    k_min: float = shielding.BREMS_K_MIN
    proton_range: Path = None
    electron_range: Path = None
    photon_mu: Path = None


@dataclass
class DetectorConfig:
    temperatures: list
    model: damage.DetectorModel = field(default_factory=damage.DetectorModel)
    niel: dict = field(default_factory=dict)  # particle name -> Path


@dataclass
class HaneConfig:
    yield_mt: float = 1.0
    burst_altitude_km: float = 100.0
    start_offset: float = env_mod.HOUR  # s after detonation
    exposure_duration: float | None = None  # s, defaults to the mission duration
    trapping_efficiency: float = env_mod.DEFAULT_TRAPPING_EFFICIENCY
    shield_prompt_gammas: bool = False
    neutron_spectrum: Path = None
    gamma_spectrum: Path = None
    beta_spectrum: Path = None


@dataclass
class LinkConfig:
    budget: link_mod.LinkBudget
    detection_efficiency: float = 1.0
    convention: link_mod.Convention = link_mod.Convention.SIGNAL_FRACTION
    protocol: link_mod.Protocol = link_mod.Protocol.BB84


@dataclass
class OutputConfig:
    directory: Path
    formats: tuple = ("csv",)


@dataclass
class ScenarioConfig:
    orbits: list
    shield: ShieldConfig
    detector: DetectorConfig
    mission_duration: float  # s
    hane: HaneConfig | None = None
    link: LinkConfig | None = None
    output: OutputConfig | None = None
    base_dir: Path = Path(".")


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


class _Section:
    """Typed accessor over one TOML table that tracks unused keys."""

    def __init__(self, data, location):
        if not isinstance(data, dict):
            raise ConfigError("expected a table", location)
        self.data = data
        self.location = location
        self.used = set()

    def loc(self, key):
        return f"{self.location}.{key}"

    def get(self, key, kind, default=None, required=False):
        self.used.add(key)
        if key not in self.data:
            if required:
                raise ConfigError("missing required key", self.loc(key))
            return default
        value = self.data[key]
        try:
            if kind is float:
                if not _is_number(value):
                    raise TypeError
                value = float(value)
            elif kind is int:
                if isinstance(value, bool) or not isinstance(value, int):
                    raise TypeError
            elif kind is bool:
                if not isinstance(value, bool):
                    raise TypeError
            elif kind is str:
                if not isinstance(value, str):
                    raise TypeError
            elif kind == "float_list":
                if not isinstance(value, list):
                    value = [value]
                if not value or not all(_is_number(v) for v in value):
                    raise TypeError
                value = [float(v) for v in value]
            elif kind == "str_list":
                if isinstance(value, str):
                    value = [value]
                if not isinstance(value, list) or not value or not all(isinstance(v, str) for v in value):
                    raise TypeError
        except (TypeError, ValueError):
            raise ConfigError(f"invalid value {value!r} (expected {getattr(kind, '__name__', kind)})",
                              self.loc(key)) from None
        return value

    def sub(self, key):
        self.used.add(key)
        return _Section(self.data[key], self.loc(key))

    def finish(self):
        for key in self.data:
            if key in self.used:
                continue
            raise ConfigError("unknown key", self.loc(key))


def _resolve_file(value, base_dir, location):
    if value.startswith(BUNDLED_PREFIX):
        path = bundled_path(value[len(BUNDLED_PREFIX):])
    else:
        path = Path(value)
        if not path.is_absolute():
            path = base_dir / path
    if not path.is_file():
        raise ConfigError(f"file not found: {path}", location)
    return path


def _table_path(section, key, base_dir, default):
    value = section.get(key, str, default)
    return _resolve_file(value, base_dir, section.loc(key))


def _positive(value, location, allow_zero=False):
    if value is None:
        return value
    if value < 0 or (value == 0 and not allow_zero):
        raise ConfigError(f"must be {'>=' if allow_zero else '>'} 0, got {value:g}", location)
    return value


def _parse_orbit(sec, base_dir):
    names = sec.get("name", "str_list")
    if names is None:
        names = sec.get("names", "str_list", required=True)
    elif "names" in sec.data:
        raise ConfigError("give either 'name' or 'names', not both", sec.location)
    if len(set(names)) != len(names):
        raise ConfigError("duplicate orbit names", sec.loc("names"))
    days = sec.get("mission_duration_days", float)
    seconds = sec.get("mission_duration_s", float)
    if days is not None and seconds is not None:
        raise ConfigError("give mission_duration_days or mission_duration_s, not both", sec.location)
    if seconds is not None:
        mission = seconds
    elif days is not None:
        mission = days * env_mod.DAY
    else:
        mission = env_mod.YEAR
    _positive(mission, sec.loc("mission_duration"), allow_zero=True)

    orbits = []
    for name in names:
        known = name in SHORT_ORBIT
        o = sec.sub(name) if name in sec.data else _Section({}, sec.loc(name))
        default_p = f"bundled:flux_proton_{name}.csv" if known else None
        default_e = f"bundled:flux_electron_{name}.csv" if known else None
        p = o.get("proton_spectrum", str, default_p, required=not known)
        e = o.get("electron_spectrum", str, default_e, required=not known)
        orbits.append(OrbitConfig(
            name=name,
            proton_spectrum=_resolve_file(p, base_dir, o.loc("proton_spectrum")),
            electron_spectrum=_resolve_file(e, base_dir, o.loc("electron_spectrum")),
            averaging_period=_positive(o.get("averaging_period_days", float, 365.25), o.loc("averaging_period_days"))
            * env_mod.DAY,
            distance_km=_positive(o.get("distance_km", float), o.loc("distance_km")),
            belt_flux=_positive(o.get("belt_flux", float), o.loc("belt_flux"), allow_zero=True),
            belt_lifetime_days=_positive(o.get("belt_lifetime_days", float), o.loc("belt_lifetime_days")),
            belt_volume=_positive(o.get("belt_volume_m3", float), o.loc("belt_volume_m3")),
        ))
        o.finish()
    sec.finish()
    return orbits, mission


def _parse_shield(sec, base_dir):
    thk = sec.get("thickness_mm", "float_list", required=True)
    for t in thk:
        _positive(t, sec.loc("thickness_mm"), allow_zero=True)
    cfg = ShieldConfig(
        thicknesses=thk,
        density=_positive(sec.get("density", float, shielding.ALUMINIUM_DENSITY), sec.loc("density")),
        atomic_number=sec.get("atomic_number", int, shielding.ALUMINIUM_Z),
        electron_detour=sec.get("electron_detour", float, shielding.ELECTRON_DETOUR),
        k_min=_positive(sec.get("k_min_mev", float, shielding.BREMS_K_MIN), sec.loc("k_min_mev")),
        proton_range=_table_path(sec, "proton_range", base_dir, DEFAULT_TABLES["proton_range"]),
        electron_range=_table_path(sec, "electron_range", base_dir, DEFAULT_TABLES["electron_range"]),
        photon_mu=_table_path(sec, "photon_mu", base_dir, DEFAULT_TABLES["photon_mu"]),
    )
    if cfg.electron_detour < 1:
        raise ConfigError("must be >= 1", sec.loc("electron_detour"))
    sec.finish()
    return cfg


def _parse_detector(sec, base_dir):
    temps = sec.get("temperatures_c", "float_list", required=True)
    try:
        model = damage.DetectorModel(
            alpha=sec.get("alpha", float, -damage.ALPHA),
            k_conv=sec.get("k_conv", float, damage.K_CONV),
            reference_temperature=sec.get("reference_temperature_c", float, damage.REFERENCE_TEMPERATURE),
        )
    except DataError as exc:
        raise ConfigError(str(exc), sec.location) from None
    niel = {
        p: _table_path(sec, f"{p}_niel", base_dir, DEFAULT_TABLES[f"{p}_niel"])
        for p in ("proton", "electron", "neutron", "gamma")
    }
    sec.finish()
    return DetectorConfig(temps, model, niel)


def _parse_hane(sec, base_dir):
    eta = sec.get("trapping_efficiency", float, env_mod.DEFAULT_TRAPPING_EFFICIENCY)
    if not 0 <= eta <= 1:
        raise ConfigError("must be within [0, 1]", sec.loc("trapping_efficiency"))
    exposure = sec.get("exposure_days", float)
    cfg = HaneConfig(
        yield_mt=_positive(sec.get("yield_mt", float, 1.0), sec.loc("yield_mt"), allow_zero=True),
        burst_altitude_km=sec.get("burst_altitude_km", float, 100.0),
        start_offset=_positive(sec.get("start_offset_hours", float, 1.0), sec.loc("start_offset_hours"),
                               allow_zero=True) * env_mod.HOUR,
        exposure_duration=None if exposure is None else _positive(exposure, sec.loc("exposure_days"),
                                                                   allow_zero=True) * env_mod.DAY,
        trapping_efficiency=eta,
        shield_prompt_gammas=sec.get("shield_prompt_gammas", bool, False),
        neutron_spectrum=_table_path(sec, "neutron_spectrum", base_dir, DEFAULT_TABLES["neutron_spectrum"]),
        gamma_spectrum=_table_path(sec, "gamma_spectrum", base_dir, DEFAULT_TABLES["gamma_spectrum"]),
        beta_spectrum=_table_path(sec, "beta_spectrum", base_dir, DEFAULT_TABLES["beta_spectrum"]),
    )
    sec.finish()
    return cfg


def _parse_link(sec):
    source_rate = sec.get("source_rate", float, 1e7)
    try:
        budget = link_mod.LinkBudget(
            source_rate=source_rate,
            loss_db=sec.get("loss_db", float, 30.0),
            gate_width=sec.get("gate_ns", float, 1.0) * 1e-9,
            gate_rate=sec.get("gate_rate", float, source_rate),
        )
        cfg = LinkConfig(
            budget=budget,
            detection_efficiency=sec.get("detection_efficiency", float, 1.0),
            convention=link_mod.Convention(sec.get("convention", str, "signal_fraction")),
            protocol=link_mod.Protocol(sec.get("protocol", str, "BB84")),
        )
    except (DataError, ValueError) as exc:
        raise ConfigError(str(exc), sec.location) from None
    if not 0 < cfg.detection_efficiency <= 1:
        raise ConfigError("must be in (0, 1]", sec.loc("detection_efficiency"))
    sec.finish()
    return cfg


def _parse_output(sec, base_dir):
    directory = Path(sec.get("directory", str, "out"))
    if not directory.is_absolute():
        directory = base_dir / directory
    formats = tuple(sec.get("formats", "str_list", ["csv"]))
    bad = set(formats) - {"csv", "svg"}
    if bad:
        raise ConfigError(f"unknown format(s) {sorted(bad)}", sec.loc("formats"))
    sec.finish()
    return OutputConfig(directory, formats)


def parse_config(source, base_dir=None):
    """Parse and validate a scenario config (bytes, str, or binary file)."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"config is not valid UTF-8: {exc}") from None
    try:
        data = tomllib.loads(source)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    base_dir = Path(base_dir) if base_dir is not None else Path(".")
    root = _Section(data, "config")
    for required in ("orbit", "shield", "detector"):
        if required not in data:
            raise ConfigError("missing required section", f"[{required}]")
    orbits, mission = _parse_orbit(root.sub("orbit"), base_dir)
    shield = _parse_shield(root.sub("shield"), base_dir)
    detector = _parse_detector(root.sub("detector"), base_dir)
    hane = _parse_hane(root.sub("hane"), base_dir) if "hane" in data else None
    link = _parse_link(root.sub("link")) if "link" in data else None
    output = _parse_output(root.sub("output"), base_dir) if "output" in data else None
    root.finish()
    if hane is not None:
        for o in orbits:
            if o.name not in SHORT_ORBIT and (o.distance_km is None or o.belt_flux is None
                                              or o.belt_lifetime_days is None):
                raise ConfigError("custom orbits with [hane] need distance_km, belt_flux and belt_lifetime_days",
                                  f"orbit.{o.name}")
    return ScenarioConfig(orbits, shield, detector, mission, hane, link, output, base_dir)


def read_config(path):
    path = Path(path)
    with open(path, "rb") as fh:
        return parse_config(fh, base_dir=path.parent)


# ---------------------------------------------------------------- report


@dataclass
class ReportRow:
    orbit: str
    environment: str
    shield_mm: float
    temperature_c: float
    breakdown: dict  # (species, source) -> counts/s
    fidelity: link_mod.FidelityPoint | None = None
    threshold: link_mod.ThresholdResult | None = None

    @property
    def total(self):
        return math.fsum(self.breakdown.values())

    def by_species(self):
        out = {}
        for (species, _), v in sorted(self.breakdown.items()):
            out[species] = out.get(species, 0.0) + v
        return out

    def by_source(self):
        out = {}
        for (_, source), v in sorted(self.breakdown.items()):
            out[source] = out.get(source, 0.0) + v
        return out


@dataclass
class Cell:
    """Reference-temperature components of one orbit x shielding case."""

    orbit: str
    shield_mm: float
    components: list
    mission_duration: float
    belt_lifetime: float | None = None
    belt_start: float = 0.0
    belt_duration: float = 0.0


@dataclass
class ScenarioReport:
    rows: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    cells: list = field(default_factory=list)
    columns: list = field(default_factory=list)  # (orbit, orbit label, shield_mm)
    environments: list = field(default_factory=list)
    temperatures: list = field(default_factory=list)

    def row(self, orbit, environment, shield_mm, temperature_c):
        for r in self.rows:
            if (r.orbit, r.environment, r.shield_mm, r.temperature_c) == (orbit, environment, shield_mm, temperature_c):
                return r
        raise KeyError((orbit, environment, shield_mm, temperature_c))


# -------------------------------------------------------------- pipeline


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except PipelineError:
        raise
    except DataError as exc:
        raise PipelineError(name, exc) from exc


def _load(kind, path, stage):
    return _stage(stage, read_energy_table, path, kind)


def _load_spectrum(path, stage, particle, duration_basis=None, shape=False):
    table = _load(None, path, stage)
    if table.particle is not particle:
        raise PipelineError(stage, DataError(f"{path.name}: expected a {particle.value} spectrum"))
    if table.kind is TableKind.INTEGRAL_FLUX:
        sp = _stage(stage, Spectrum.from_integral, table, duration_basis or 1.0, shape)
    elif table.kind is TableKind.DIFFERENTIAL_FLUX:
        sp = Spectrum(table, duration_basis or 1.0, shape)
    else:
        raise PipelineError(stage, DataError(f"{path.name}: not a flux table ({table.kind.value})"))
    return _stage(stage, env_mod.shape_spectrum, sp) if shape else sp


class _Tables:
    def __init__(self, config):
        s, d = config.shield, config.detector
        self.proton_range = _load(TableKind.CSDA_RANGE, s.proton_range, "load shield tables")
        self.electron_range = _load(TableKind.CSDA_RANGE, s.electron_range, "load shield tables")
        self.photon_mu = _load(TableKind.MASS_ATTENUATION, s.photon_mu, "load shield tables")
        self.niel = {}
        for name, path in d.niel.items():
            t = _load(TableKind.NIEL, path, "load NIEL tables")
            if t.particle.value != name:
                raise PipelineError("load NIEL tables", DataError(f"{path.name}: expected {name} NIEL"))
            self.niel[name] = t

    def shield(self, config, thickness):
        s = config.shield
        return _stage("shield spec", shielding.ShieldSpec, thickness, self.proton_range, self.electron_range,
                      self.photon_mu, s.density, s.atomic_number, s.electron_detour, s.k_min)


def _dcr(fluence, niel, det, source, species=None, duration=0.0):
    dose = damage.niel_dose(fluence, niel, duration)
    return damage.dose_to_dcr(dose, det, source, species)


def _electron_components(fluence, shield, tables, det, source, stage):
    res = _stage(f"{stage}: electron transport", shielding.transmit_electron_spectrum, fluence, shield)
    half = shield.with_thickness(shield.thickness / 2)
    photons = _stage(f"{stage}: bremsstrahlung attenuation", shielding.attenuate_photon_spectrum,
                     res.secondary_photons, half).transmitted
    return [
        _stage(f"{stage}: electron damage", _dcr, res.transmitted, tables.niel["electron"], det, source),
        _stage(f"{stage}: bremsstrahlung damage", _dcr, photons, tables.niel["gamma"], det, source,
               "bremsstrahlung"),
    ]


def _cell_components(config, tables, orbit_cfg, natural, prompt, belt, thickness):
    det = config.detector.model
    shield = tables.shield(config, thickness)
    stage = f"{orbit_cfg.name} / {thickness:g} mm"
    comps = []
    protons = _stage(f"{stage}: proton transport", shielding.degrade_proton_spectrum,
                     natural[Particle.PROTON], shield)
    comps.append(_stage(f"{stage}: proton damage", _dcr, protons.transmitted, tables.niel["proton"], det, "natural"))
    comps += _electron_components(natural[Particle.ELECTRON], shield, tables, det, "natural", stage)
    if prompt is not None:
        neutrons, gammas = prompt
        if config.hane.shield_prompt_gammas:
            gammas = _stage(f"{stage}: prompt gamma attenuation", shielding.attenuate_photon_spectrum,
                            gammas, shield).transmitted
        comps.append(_stage(f"{stage}: prompt neutron damage", _dcr, neutrons, tables.niel["neutron"], det, "prompt"))
        comps.append(_stage(f"{stage}: prompt gamma damage", _dcr, gammas, tables.niel["gamma"], det, "prompt"))
    if belt is not None:
        comps += _electron_components(belt, shield, tables, det, "belt", stage)
    return comps


def _expand_rows(config, cell, environments):
    det = config.detector.model
    rows = []
    index = {(c.particle, c.label): c for c in cell.components}
    for env_name in environments:
        sources = ENVIRONMENTS[env_name]
        for t in config.detector.temperatures:
            breakdown = {}
            for (species, source), comp in sorted(index.items()):
                if source in sources:
                    breakdown[(species, source)] = damage.scale_dcr(comp, t, det).rate
            rows.append(ReportRow(cell.orbit, env_name, cell.shield_mm, t, breakdown))
    return rows


def _annotate_link(config, rows):
    lc = config.link
    for r in rows:
        b = link_mod.LinkBudget(lc.budget.source_rate, lc.budget.loss_db, lc.budget.gate_width,
                                lc.budget.gate_rate, r.total)
        r.fidelity = link_mod.link_fidelity(b, lc.detection_efficiency, lc.convention)
        r.threshold = link_mod.protocol_threshold_check(r.fidelity, lc.protocol)


def _run(config):
    tables = _Tables(config)
    hane = config.hane
    environments = list(ENVIRONMENTS) if hane is not None else ["natural"]
    report = ScenarioReport(environments=environments, temperatures=list(config.detector.temperatures),
                            notes=list(NOTES))
    if hane is not None:
        neutron_shape = _load_spectrum(hane.neutron_spectrum, "load HANE spectra", Particle.NEUTRON, shape=True)
        gamma_shape = _load_spectrum(hane.gamma_spectrum, "load HANE spectra", Particle.GAMMA, shape=True)
        beta_shape = _load_spectrum(hane.beta_spectrum, "load HANE spectra", Particle.ELECTRON, shape=True)

    for o in config.orbits:
        stage = f"{o.name}: environment"
        env = _stage(stage, env_mod.OrbitEnvironment,
                     env_mod.OrbitName(o.name) if o.name in SHORT_ORBIT else env_mod.OrbitName.CUSTOM,
                     _load_spectrum(o.proton_spectrum, stage, Particle.PROTON, o.averaging_period),
                     _load_spectrum(o.electron_spectrum, stage, Particle.ELECTRON, o.averaging_period),
                     o.averaging_period)
        natural = env_mod.natural_fluence(env, config.mission_duration)
        prompt = belt = None
        belt_args = {}
        if hane is not None:
            distance = o.distance_km or DEFAULT_BURST_DISTANCE_KM[o.name]
            if o.name in BELT_KEY:
                ab = _stage(stage, env_mod.ArtificialBelt.from_table, BELT_KEY[o.name], beta_shape,
                            hane.trapping_efficiency, o.belt_volume, o.belt_flux, o.belt_lifetime_days)
            else:
                ab = _stage(stage, env_mod.ArtificialBelt, o.belt_flux, o.belt_lifetime_days, beta_shape,
                            trapping_efficiency=hane.trapping_efficiency)
            scenario = _stage(stage, env_mod.HaneScenario, hane.yield_mt, distance, neutron_shape, gamma_shape, ab,
                              hane.burst_altitude_km)
            prompt = env_mod.prompt_fluence(scenario)
            duration = config.mission_duration if hane.exposure_duration is None else hane.exposure_duration
            # the belt forms at the flux reference epoch; exposure before it collects nothing
            start = hane.start_offset - env_mod.BELT_REFERENCE_EPOCH
            if start < 0:
                duration = max(0.0, duration + start)
                start = 0.0
            belt = env_mod.belt_fluence(ab, duration, start)
            belt_args = dict(belt_lifetime=ab.mean_lifetime, belt_start=start, belt_duration=duration)
        for thk in config.shield.thicknesses:
            comps = _cell_components(config, tables, o, natural, prompt, belt, thk)
            cell = Cell(o.name, thk, comps, config.mission_duration, **belt_args)
            report.cells.append(cell)
            report.columns.append((o.name, o.label, thk))
            report.rows += _expand_rows(config, cell, environments)

    if any(c.rate > 0 and c.particle != "proton" for cell in report.cells for c in cell.components):
        warnings.warn(
            "the NIEL-to-DCR conversion was calibrated on proton irradiations only; it is applied "
            "unchanged to electrons, neutrons and photons",
            SpeciesCalibrationWarning,
            stacklevel=2,
        )
    if config.link is not None:
        _annotate_link(config, report.rows)
    return report


def run_scenario(config):
    """Evaluate a parsed config into a :class:`ScenarioReport`.

    Modelling caveats raised as :class:`SpadDcrWarning` during the run are
    collected into ``report.warnings``, each distinct message once.
    """
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", SpadDcrWarning)
        report = _run(config)
    seen = []
    for w in caught:
        if not issubclass(w.category, SpadDcrWarning):
            warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
            continue
        text = f"{w.category.__name__}: {w.message}"
        if text not in seen:
            seen.append(text)
    report.warnings = seen
    return report


def dcr_time_series(cell, times, temperature, det=damage.DetectorModel()):
    """Total DCR of one cell after each exposure time (s), by source.

    Natural damage grows linearly in time and the belt contribution follows
    its decaying-flux integral; prompt damage is a step at t = 0.  Every
    stage of the pipeline is linear in fluence, so the mission-end
    components are simply rescaled.
    """
    out = {s: [] for s in SOURCES}
    for t in times:
        for source in SOURCES:
            if source == "natural":
                f = t / cell.mission_duration if cell.mission_duration > 0 else 0.0
            elif source == "prompt":
                f = 1.0
            else:
                if cell.belt_lifetime is None or cell.belt_duration <= 0:
                    f = 0.0
                else:
                    full = env_mod.belt_total_fluence(1.0, cell.belt_lifetime, cell.belt_duration, cell.belt_start)
                    f = env_mod.belt_total_fluence(1.0, cell.belt_lifetime, min(t, 1e3 * cell.belt_lifetime),
                                                   cell.belt_start) / full
            comps = [c for c in cell.components if c.label == source]
            out[source].append(f * damage.total_dcr(comps, temperature, det))
    return out


# -------------------------------------------------------------- rendering


def _num(x):
    return f"{x:.5e}"


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def report_csv(report):
    rows = []
    for r in report.rows:
        for (species, source), v in sorted(r.breakdown.items(), key=lambda kv: (SPECIES.index(kv[0][0])
                                                                               if kv[0][0] in SPECIES else 99,
                                                                               kv[0])):
            rows.append([r.orbit, r.environment, f"{r.shield_mm:g}", f"{r.temperature_c:g}", species, source, _num(v)])
    return _csv_text(["orbit", "environment", "shield_mm", "temperature_c", "species", "source", "dcr"], rows)


def _column_label(label, thk):
    return f"{label} ({thk:g} mm)"


def table2_csv(report):
    """Pivot: one row per environment x temperature, one column per orbit x shield."""
    columns = list(report.columns)
    if not columns:
        seen = []
        for r in report.rows:
            key = (r.orbit, SHORT_ORBIT.get(r.orbit, r.orbit), r.shield_mm)
            if key not in seen:
                seen.append(key)
        columns = seen
    envs = report.environments or list(dict.fromkeys(r.environment for r in report.rows))
    temps = report.temperatures or list(dict.fromkeys(r.temperature_c for r in report.rows))
    header = ["environment", "temperature_c"] + [_column_label(lbl, t) for _, lbl, t in columns]
    lookup = {(r.orbit, r.environment, r.shield_mm, r.temperature_c): r for r in report.rows}
    rows = []
    for e in envs:
        for t in temps:
            cells = [lookup.get((o, e, thk, t)) for o, _, thk in columns]
            if all(c is None for c in cells):
                continue
            rows.append([e, f"{t:g}"] + ["" if c is None else _num(c.total) for c in cells])
    return _csv_text(header, rows)


def fidelity_csv(report):
    rows = []
    for r in report.rows:
        if r.fidelity is None:
            continue
        rows.append([r.orbit, r.environment, f"{r.shield_mm:g}", f"{r.temperature_c:g}", _num(r.total),
                     _num(r.fidelity.fidelity), _num(r.fidelity.qber), r.threshold.protocol.value, r.threshold.status])
    return _csv_text(["orbit", "environment", "shield_mm", "temperature_c", "dcr", "fidelity", "qber", "protocol",
                      "status"], rows)


def _svg_plots(report, config, out_dir):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    import numpy as np

    files = []
    ref = config.detector.model.reference_temperature
    with matplotlib.rc_context({"svg.hashsalt": "spaddcr", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        times = np.geomspace(env_mod.DAY / 24, max(config.mission_duration, env_mod.DAY), 60)
        for cell in report.cells:
            series = dcr_time_series(cell, times, ref, config.detector.model)
            nat = np.array(series["natural"])
            if np.any(nat > 0):
                ax.plot(times / env_mod.DAY, nat, label=f"{SHORT_ORBIT.get(cell.orbit, cell.orbit)} "
                        f"{cell.shield_mm:g} mm natural")
            belt = np.array(series["belt"])
            if np.any(belt > 0):
                ax.plot(times / env_mod.DAY, belt, "--", label=f"{SHORT_ORBIT.get(cell.orbit, cell.orbit)} "
                        f"{cell.shield_mm:g} mm belt")
        ax.set(xscale="log", yscale="log", xlabel="exposure time (days)", ylabel=f"DCR increase at {ref:g} °C (1/s)")
        ax.legend(fontsize=6)
        files.append(_save(fig, out_dir / "dcr_vs_time.svg"))

        fig, ax = plt.subplots(figsize=(6, 4))
        for o in config.orbits:
            xs = list(config.shield.thicknesses)
            ys = [report.row(o.name, "natural", t, config.detector.temperatures[0]).total for t in xs]
            ax.plot(xs, ys, "o-", label=o.label)
        ax.set(yscale="log", xlabel="aluminium thickness (mm)",
               ylabel=f"natural DCR at {config.detector.temperatures[0]:g} °C (1/s)")
        ax.legend(fontsize=7)
        files.append(_save(fig, out_dir / "dcr_vs_shielding.svg"))

        if config.link is not None:
            fig, ax = plt.subplots(figsize=(6, 4))
            rows = link_mod.fidelity_curve([1e2, 1e3, 1e4, 1e5, 1e6], (0.0, 60.0), 121, config.link.budget,
                                           config.link.detection_efficiency, config.link.convention)
            for dcr in sorted({d for _, d, _ in rows}):
                pts = [(l, p.fidelity) for l, d, p in rows if d == dcr]
                ax.plot(*zip(*pts), label=f"DCR {dcr:.0e} /s")
            ax.axhline(link_mod.GENERIC_MIN_FIDELITY, color="red", ls="--", lw=1)
            ax.set(xlabel="link attenuation (dB)", ylabel="fidelity", ylim=(0, 1.05))
            ax.legend(fontsize=7)
            files.append(_save(fig, out_dir / "fidelity.svg"))
    return files


def _save(fig, path):
    import matplotlib.pyplot as plt

    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def render_outputs(report, config=None, out_dir=None):
    """Write report.csv, table2.csv, warnings.txt and optional files; return the paths."""
    if out_dir is None:
        if config is None or config.output is None:
            raise ValueError("no output directory given")
        out_dir = config.output.directory
    out_dir = Path(out_dir)
    formats = config.output.formats if config is not None and config.output is not None else ("csv",)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name, text):
        p = out_dir / name
        with open(p, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        written.append(p)

    put("report.csv", report_csv(report))
    put("table2.csv", table2_csv(report))
    put("warnings.txt", "".join(f"{w}\n" for w in report.warnings + [f"note: {n}" for n in report.notes]))
    if any(r.fidelity is not None for r in report.rows):
        put("fidelity.csv", fidelity_csv(report))
    if config is not None and "svg" in formats and report.cells:
        written += _svg_plots(report, config, out_dir)
    return written
