"""Tabulated energy-dependent physics data.

Everything downstream (spectra, NIEL curves, CSDA ranges, photon mass
attenuation) is an :class:`EnergyTable`: a strictly increasing energy grid
in MeV with non-negative values and an interpolation policy.  Policies:

``log_log``
    ln(value) linear in ln(E).  Falls back to ``lin_lin`` on any interval
    where one of the bracketing values is zero.
``lin_log``
    value linear in ln(E) (ENDF "linear-log" convention).
``lin_lin``
    value linear in E.

No table is ever extrapolated: :func:`lookup` raises :class:`DomainError`
outside the grid.
"""
from __future__ import annotations

import csv
import enum
import io
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import DataError, DomainError, IntegralSpectrumWarning

# relative slack accepted at table endpoints, absorbs float round trips
_EDGE_RTOL = 1e-12

# Gauss-Legendre panels used by the composite quadrature
_SUBPANELS = 4
_GL_ORDER = 10
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)


class TableKind(str, enum.Enum):
    DIFFERENTIAL_FLUX = "differential_flux"
    INTEGRAL_FLUX = "integral_flux"
    NIEL = "niel"
    CSDA_RANGE = "csda_range"
    MASS_ATTENUATION = "mass_attenuation"


class Particle(str, enum.Enum):
    PROTON = "proton"
    ELECTRON = "electron"
    NEUTRON = "neutron"
    GAMMA = "gamma"


class Interp(str, enum.Enum):
    LOG_LOG = "log_log"
    LIN_LOG = "lin_log"
    LIN_LIN = "lin_lin"


DEFAULT_UNITS = {
    TableKind.DIFFERENTIAL_FLUX: "cm^-2 s^-1 MeV^-1",
    TableKind.INTEGRAL_FLUX: "cm^-2 s^-1",
    TableKind.NIEL: "MeV cm^2 g^-1",
    TableKind.CSDA_RANGE: "g cm^-2",
    TableKind.MASS_ATTENUATION: "cm^2 g^-1",
}


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class EnergyTable:
    """A tabulated function of particle energy (MeV)."""

    kind: TableKind
    particle: Particle
    energies: np.ndarray
    values: np.ndarray
    interpolation: Interp = Interp.LOG_LOG
    source_label: str = ""
    units: str = ""

    def __post_init__(self):
        kind = TableKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "particle", Particle(self.particle))
        object.__setattr__(self, "interpolation", Interp(self.interpolation))
        if not self.units:
            object.__setattr__(self, "units", DEFAULT_UNITS[kind])
        e = _readonly(self.energies)
        v = _readonly(self.values)
        if e.ndim != 1 or e.shape != v.shape:
            raise DataError("energies and values must be 1-D arrays of equal length")
        if e.size < 2:
            raise DataError("a table needs at least 2 points")
        if not (np.all(np.isfinite(e)) and np.all(np.isfinite(v))):
            raise DataError("table contains non-finite numbers")
        if np.any(e <= 0):
            raise DataError("energies must be > 0")
        if np.any(np.diff(e) <= 0):
            raise DataError("energies must be strictly increasing")
        if np.any(v < 0):
            raise DataError("values must be >= 0")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "values", v)

    @property
    def domain(self):
        return float(self.energies[0]), float(self.energies[-1])

    def __len__(self):
        return self.energies.size

    def __repr__(self):
        lo, hi = self.domain
        return (
            f"EnergyTable({self.kind.value}, {self.particle.value}, n={len(self)}, "
            f"[{lo:.4g}, {hi:.4g}] MeV, {self.interpolation.value})"
        )

    def with_values(self, values, **changes):
        return replace(self, values=values, **changes)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """A differential particle spectrum.

    When ``is_fluence`` is false the values are a flux (cm^-2 s^-1 MeV^-1)
    averaged over ``duration_basis`` seconds; otherwise they are a
    time-integrated fluence (cm^-2 MeV^-1).
    """

    table: EnergyTable
    duration_basis: float | None = None
    is_fluence: bool = False
    notes: tuple = field(default=())

    def __post_init__(self):
        if self.table.kind is not TableKind.DIFFERENTIAL_FLUX:
            raise DataError(f"a Spectrum needs a differential_flux table, got {self.table.kind.value}")
        if not self.is_fluence and not (self.duration_basis and self.duration_basis > 0):
            raise DataError("a flux spectrum needs duration_basis > 0")

    @property
    def particle(self):
        return self.table.particle

    @property
    def energies(self):
        return self.table.energies

    @property
    def values(self):
        return self.table.values

    @property
    def domain(self):
        return self.table.domain

    def total(self):
        """Integral over the whole grid (cm^-2 s^-1, or cm^-2 for fluences)."""
        return integrate(self.table)

    def mean_energy(self):
        n = self.total()
        if n <= 0:
            return 0.0
        return energy_moment(self.table) / n

    def scaled(self, factor):
        if factor < 0:
            raise DataError("spectrum scale factor must be >= 0")
        return replace(self, table=self.table.with_values(self.table.values * factor))

    def to_fluence(self, duration):
        """Time-integrate a constant flux over ``duration`` seconds."""
        if self.is_fluence:
            raise DataError("spectrum is already a fluence")
        if duration < 0:
            raise DataError("duration must be >= 0")
        return replace(
            self,
            table=self.table.with_values(self.table.values * duration),
            is_fluence=True,
        )

    def normalized(self):
        """Rescale to unit integral (shape spectra)."""
        n = self.total()
        if n <= 0:
            raise DataError("cannot normalise a spectrum with zero integral")
        return self.scaled(1.0 / n)

    @classmethod
    def from_integral(cls, table, duration_basis=None, is_fluence=False):
        """Differentiate an integral spectrum N(>E) by finite differences.

        Each bin's mean differential value is assigned to its geometric
        mid-point; the result covers the mid-point range only.
        """
        if table.kind is not TableKind.INTEGRAL_FLUX:
            raise DataError("from_integral needs an integral_flux table")
        e, n = table.energies, table.values
        if np.any(np.diff(n) > 0):
            raise DataError("integral spectrum must be non-increasing in energy")
        mid = np.sqrt(e[:-1] * e[1:])
        if mid.size < 2:
            raise DataError("integral spectrum needs at least 3 points to differentiate")
        diff = (n[:-1] - n[1:]) / (e[1:] - e[:-1])
        warnings.warn(
            f"integral spectrum '{table.source_label}' differentiated by finite differences",
            IntegralSpectrumWarning,
            stacklevel=2,
        )
        dtab = EnergyTable(
            TableKind.DIFFERENTIAL_FLUX,
            table.particle,
            mid,
            diff,
            table.interpolation,
            source_label=f"{table.source_label} (differentiated)",
        )
        return cls(dtab, duration_basis, is_fluence, notes=("differentiated integral spectrum",))


def _segment_values(x0, x1, y0, y1, x, policy):
    """Evaluate the interpolant on brackets [x0, x1] (all arrays)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        lin = y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        if policy is Interp.LIN_LIN:
            return lin
        t = np.log(x / x0) / np.log(x1 / x0)
        if policy is Interp.LIN_LOG:
            return y0 + (y1 - y0) * t
        positive = (y0 > 0) & (y1 > 0)
        loglog = np.exp(np.log(np.where(positive, y0, 1.0)) * (1 - t) + np.log(np.where(positive, y1, 1.0)) * t)
        return np.where(positive, loglog, lin)


def _check_domain(table, e):
    lo, hi = table.domain
    if np.any(e < lo * (1 - _EDGE_RTOL)) or np.any(e > hi * (1 + _EDGE_RTOL)):
        bad = e[(e < lo) | (e > hi)]
        raise DomainError(f"energy {bad.flat[0]:.6g} MeV outside {table!r}", (lo, hi))
    return np.clip(e, lo, hi)


def _evaluate(table, e):
    x = table.energies
    y = table.values
    i = np.clip(np.searchsorted(x, e, side="right") - 1, 0, x.size - 2)
    out = _segment_values(x[i], x[i + 1], y[i], y[i + 1], e, table.interpolation)
    # grid points are exact regardless of policy
    hit = x[i] == e
    out = np.where(hit, y[i], out)
    return np.maximum(out, 0.0)


def lookup(table, energy):
    """Interpolated value of ``table`` at ``energy`` (scalar or array, MeV).

    Raises
    ------
    DomainError
        If any energy lies outside the table's grid.
    """
    scalar = np.ndim(energy) == 0
    e = _check_domain(table, np.asarray(energy, dtype=float))
    out = _evaluate(table, e)
    return float(out) if scalar else out


def inverse_lookup(table, value):
    """Energy at which a monotonically increasing table reaches ``value``.

    Used to invert CSDA range tables.  Only ``log_log`` and ``lin_lin``
    tables are supported; both are closed under axis swap.
    """
    if table.interpolation is Interp.LIN_LOG:
        raise DataError("inverse_lookup does not support lin_log tables")
    if np.any(np.diff(table.values) <= 0):
        raise DataError(f"{table!r} is not strictly increasing in value")
    swapped = EnergyTable(
        table.kind,
        table.particle,
        table.values,
        table.energies,
        table.interpolation,
    ) if table.values[0] > 0 else None
    scalar = np.ndim(value) == 0
    v = np.asarray(value, dtype=float)
    lo, hi = float(table.values[0]), float(table.values[-1])
    if np.any(v < lo * (1 - _EDGE_RTOL)) or np.any(v > hi * (1 + _EDGE_RTOL)):
        raise DomainError(f"value outside the range of {table!r}", table.domain)
    v = np.clip(v, lo, hi)
    if swapped is None:
        # zero first value: log axis undefined, invert the first interval linearly
        x, y = table.values, table.energies
        i = np.clip(np.searchsorted(x, v, side="right") - 1, 0, x.size - 2)
        out = y[i] + (y[i + 1] - y[i]) * (v - x[i]) / (x[i + 1] - x[i])
    else:
        out = _evaluate(swapped, v)
    return float(out) if scalar else out


def _quadrature_nodes(knots):
    """Nodes and weights for ∫ f(E) dE over consecutive knot intervals.

    Each interval is split into ``_SUBPANELS`` panels uniform in ln(E), each
    with a Gauss-Legendre rule in ln(E); the change of variables puts the
    factor E into the weights.
    """
    u = np.log(knots)
    edges = np.concatenate(
        [np.linspace(a, b, _SUBPANELS + 1)[:-1] for a, b in zip(u[:-1], u[1:])] + [u[-1:]]
    )
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes_u = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    e = np.exp(nodes_u)
    w = half[:, None] * _GL_WEIGHTS[None, :] * e
    # keep nodes inside the closed domain despite exp(log()) round off
    return np.clip(e.ravel(), knots[0], knots[-1]), w.ravel()


def _as_table(obj):
    return obj.table if isinstance(obj, Spectrum) else obj


def _resolve_range(tables, lo, hi):
    lo_dom = max(t.domain[0] for t in tables)
    hi_dom = min(t.domain[1] for t in tables)
    if lo_dom >= hi_dom:
        raise DomainError("table domains do not intersect")
    lo = lo_dom if lo is None else float(lo)
    hi = hi_dom if hi is None else float(hi)
    if not lo < hi:
        raise DomainError(f"inverted or empty integration range [{lo:.6g}, {hi:.6g}]")
    if lo < lo_dom * (1 - _EDGE_RTOL) or hi > hi_dom * (1 + _EDGE_RTOL):
        raise DomainError(f"range [{lo:.6g}, {hi:.6g}] outside the common domain", (lo_dom, hi_dom))
    return max(lo, lo_dom), min(hi, hi_dom)


def _knots(tables, lo, hi):
    grid = np.concatenate([t.energies for t in tables] + [[lo, hi]])
    grid = np.unique(grid[(grid >= lo) & (grid <= hi)])
    return grid


def integrate_product(spectrum, curve, lo=None, hi=None):
    """∫ spectrum(E)·curve(E) dE over ``[lo, hi]``.

    The range defaults to the intersection of the two domains.  Quadrature
    runs on the union of both grids so every panel sees a single
    interpolation segment of each table.
    """
    a, b = _as_table(spectrum), _as_table(curve)
    lo, hi = _resolve_range((a, b), lo, hi)
    e, w = _quadrature_nodes(_knots((a, b), lo, hi))
    return float(np.sum(w * _evaluate(a, e) * _evaluate(b, e)))


def integrate(table, lo=None, hi=None):
    """∫ table(E) dE."""
    t = _as_table(table)
    lo, hi = _resolve_range((t,), lo, hi)
    e, w = _quadrature_nodes(_knots((t,), lo, hi))
    return float(np.sum(w * _evaluate(t, e)))


def energy_moment(table, lo=None, hi=None):
    """∫ E·table(E) dE."""
    t = _as_table(table)
    lo, hi = _resolve_range((t,), lo, hi)
    e, w = _quadrature_nodes(_knots((t,), lo, hi))
    return float(np.sum(w * e * _evaluate(t, e)))


def cumulative_integral(func, knots):
    """Running integral of a callable at each knot (first entry is 0)."""
    knots = np.asarray(knots, dtype=float)
    e, w = _quadrature_nodes(knots)
    per_node = w * func(e)
    per_interval = per_node.reshape(knots.size - 1, -1).sum(axis=1)
    return np.concatenate([[0.0], np.cumsum(per_interval)])


def constant_extension(table, lo, hi):
    """Copy of ``table`` extended to [lo, hi] by holding its endpoint values."""
    e, v = list(table.energies), list(table.values)
    if lo < e[0]:
        e.insert(0, lo)
        v.insert(0, v[0])
    if hi > e[-1]:
        e.append(hi)
        v.append(v[-1])
    return replace(table, energies=e, values=v)


# ---------------------------------------------------------------- CSV I/O

_HEADER_KEYS = ("kind", "particle", "interp", "units")
_OPTIONAL_KEYS = ("source",)


def _parse_header(line):
    if not line.startswith("#"):
        raise DataError("missing '#kind=...' header line", row=1)
    fields = {}
    for item in line[1:].strip().split(","):
        if "=" not in item:
            raise DataError(f"malformed header field {item!r}", row=1)
        k, v = (s.strip() for s in item.split("=", 1))
        if k not in _HEADER_KEYS + _OPTIONAL_KEYS:
            raise DataError(f"unknown header key {k!r}", row=1)
        fields[k] = v
    missing = [k for k in _HEADER_KEYS if k not in fields]
    if missing:
        raise DataError(f"header missing {', '.join(missing)}", row=1)
    try:
        kind = TableKind(fields["kind"])
        particle = Particle(fields["particle"])
        interp = Interp(fields["interp"])
    except ValueError as exc:
        raise DataError(f"malformed header: {exc}", row=1) from None
    energy_unit, _, value_unit = fields["units"].partition("/")
    if energy_unit.strip() != "MeV":
        raise DataError(f"energy unit must be MeV, got {energy_unit!r}", row=1)
    return kind, particle, interp, value_unit.strip(), fields.get("source", "")


def load_energy_table(source, expected_kind=None, label=None):
    """Parse a table from the package CSV format.

    ``source`` may be bytes, str, or a binary/text file object.  Line 1 is
    ``#kind=<kind>,particle=<p>,interp=<policy>,units=MeV/<unit>``, line 2
    the column header ``energy,value``; further ``#`` lines are comments.
    Rows are sorted by energy; duplicates are rejected.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise DataError(f"not valid UTF-8: {exc}") from None
    lines = source.splitlines()
    if not lines:
        raise DataError("empty table source", row=1)
    kind, particle, interp, value_unit, src = _parse_header(lines[0].strip())
    if expected_kind is not None and kind is not TableKind(expected_kind):
        raise DataError(f"expected kind {TableKind(expected_kind).value}, file declares {kind.value}", row=1)

    rows = []
    header_seen = False
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            cols = [c.strip().lower() for c in line.split(",")]
            if cols != ["energy", "value"]:
                raise DataError(f"expected column header 'energy,value', got {line!r}", row=lineno)
            header_seen = True
            continue
        cells = next(csv.reader([line]))
        if len(cells) != 2:
            raise DataError(f"expected 2 columns, got {len(cells)}", row=lineno)
        try:
            e, v = float(cells[0]), float(cells[1])
        except ValueError:
            raise DataError(f"non-numeric cell in {line!r}", row=lineno) from None
        if not (math.isfinite(e) and math.isfinite(v)):
            raise DataError("non-finite number", row=lineno)
        if e <= 0:
            raise DataError(f"non-positive energy {e:g}", row=lineno)
        if v < 0:
            raise DataError(f"negative value {v:g}", row=lineno)
        rows.append((e, v, lineno))
    if not header_seen:
        raise DataError("missing column header 'energy,value'", row=2)
    if len(rows) < 2:
        raise DataError(f"need at least 2 data rows, got {len(rows)}")

    rows.sort(key=lambda r: r[0])
    for (e0, _, _), (e1, _, line1) in zip(rows, rows[1:]):
        if e1 == e0:
            raise DataError(f"duplicate energy {e1:g} MeV", row=line1)
    return EnergyTable(
        kind,
        particle,
        [r[0] for r in rows],
        [r[1] for r in rows],
        interp,
        source_label=src or (label or ""),
        units=value_unit or DEFAULT_UNITS[kind],
    )


def read_energy_table(path, expected_kind=None):
    path = Path(path)
    with open(path, "rb") as fh:
        try:
            return load_energy_table(fh, expected_kind, label=path.name)
        except DataError as exc:
            raise DataError(f"{path}: {exc}") from None


def dump_energy_table(table, comments=()):
    """Serialise a table to the CSV format read by :func:`load_energy_table`."""
    buf = io.StringIO()
    head = (
        f"#kind={table.kind.value},particle={table.particle.value},"
        f"interp={table.interpolation.value},units=MeV/{table.units}"
    )
    if table.source_label:
        head += ",source=" + table.source_label.replace(",", ";")
    buf.write(head + "\n")
    for c in comments:
        buf.write(f"# {c}\n")
    buf.write("energy,value\n")
    for e, v in zip(table.energies, table.values):
        buf.write(f"{e:.6e},{v:.6e}\n")
    return buf.getvalue()
