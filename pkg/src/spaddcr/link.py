"""Dark counts to link fidelity and QBER.

Signal counts are ``source_rate * 10^(-loss_dB/10) * efficiency``; noise is
the free-running dark count rate times the gate duty cycle.  The default
fidelity is the signal fraction ``S / (S + N)``.  The ``depolarizing``
convention, ``1 - N / (2 (S + N))``, treats every dark count as a random
bit so pure noise gives 0.5 instead of 0.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DataError


class Convention(str, enum.Enum):
    SIGNAL_FRACTION = "signal_fraction"
    DEPOLARIZING = "depolarizing"


class Protocol(str, enum.Enum):
    BB84 = "BB84"
    SARG04 = "SARG04"
    GENERIC_0_9 = "generic_0_9"


BB84_MAX_QBER = 0.11
SARG04_PASS_QBER = 0.10
SARG04_MAX_QBER = 0.15
GENERIC_MIN_FIDELITY = 0.9


@dataclass(frozen=True)
class LinkBudget:
    source_rate: float = 1e7  # pulses/s
    loss_db: float = 30.0
    gate_width: float = 1e-9  # s
    gate_rate: float | None = None  # gates/s, defaults to source_rate
    dcr_free_running: float = 0.0  # counts/s

    def __post_init__(self):
        if self.gate_rate is None:
            object.__setattr__(self, "gate_rate", self.source_rate)
        if not self.source_rate > 0:
            raise DataError("source_rate must be > 0")
        if self.loss_db < 0:
            raise DataError("loss_db must be >= 0")
        if self.dcr_free_running < 0:
            raise DataError("dcr_free_running must be >= 0")
        duty = self.duty_cycle
        if not 0 < duty <= 1:
            raise DataError(f"gate duty cycle must be in (0, 1], got {duty:g}")

    @property
    def duty_cycle(self):
        return self.gate_width * self.gate_rate


@dataclass(frozen=True)
class FidelityPoint:
    fidelity: float
    qber: float
    signal_rate: float
    noise_rate_in_gates: float


@dataclass(frozen=True)
class ThresholdResult:
    protocol: Protocol
    status: str  # "pass", "marginal" or "fail"
    margin: float  # positive = headroom below the failing QBER/fidelity

    @property
    def passed(self):
        return self.status == "pass"


def link_fidelity(budget, detection_efficiency=1.0, convention=Convention.SIGNAL_FRACTION):
    if not 0 < detection_efficiency <= 1:
        raise DataError("detection efficiency must be in (0, 1]")
    signal = budget.source_rate * 10 ** (-budget.loss_db / 10) * detection_efficiency
    noise = budget.dcr_free_running * budget.duty_cycle
    if signal == 0 and noise == 0:
        raise DataError("fidelity undefined: no signal and no noise counts")
    if Convention(convention) is Convention.DEPOLARIZING:
        f = 1.0 - noise / (2 * (signal + noise))
    else:
        f = signal / (signal + noise)
    return FidelityPoint(f, 1.0 - f, signal, noise)


def loss_at_fidelity(budget, fidelity, detection_efficiency=1.0):
    """Channel loss (dB) at which the signal-fraction fidelity equals ``fidelity``."""
    if not 0 < fidelity < 1:
        raise DataError("target fidelity must be in (0, 1)")
    noise = budget.dcr_free_running * budget.duty_cycle
    if noise == 0:
        return math.inf
    signal = noise * fidelity / (1 - fidelity)
    return 10 * math.log10(budget.source_rate * detection_efficiency / signal)


def fidelity_curve(dcr_values, loss_range, steps, template=LinkBudget(), detection_efficiency=1.0,
                   convention=Convention.SIGNAL_FRACTION):
    """Rows ``(loss_db, dcr, FidelityPoint)`` over a loss sweep, one block per DCR."""
    dcr_values = list(dcr_values)
    if not dcr_values:
        raise DataError("fidelity_curve needs at least one DCR value")
    lo, hi = loss_range
    if steps < 2 or not lo < hi:
        raise DataError("fidelity_curve needs steps >= 2 and loss_lo < loss_hi")
    rows = []
    for dcr in dcr_values:
        for loss in np.linspace(lo, hi, steps):
            b = replace(template, loss_db=float(loss), dcr_free_running=float(dcr))
            rows.append((float(loss), float(dcr), link_fidelity(b, detection_efficiency, convention)))
    return rows


def curve_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["loss_db", "dcr", "fidelity", "qber"])
    for loss, dcr, p in rows:
        w.writerow([f"{loss:.5e}", f"{dcr:.5e}", f"{p.fidelity:.5e}", f"{p.qber:.5e}"])
    return buf.getvalue()


def protocol_threshold_check(point, protocol):
    protocol = Protocol(protocol)
    q = point.qber
    if protocol is Protocol.BB84:
        return ThresholdResult(protocol, "pass" if q <= BB84_MAX_QBER else "fail", BB84_MAX_QBER - q)
    if protocol is Protocol.SARG04:
        if q <= SARG04_PASS_QBER:
            status = "pass"
        elif q <= SARG04_MAX_QBER:
            status = "marginal"
        else:
            status = "fail"
        return ThresholdResult(protocol, status, SARG04_PASS_QBER - q)
    ok = point.fidelity >= GENERIC_MIN_FIDELITY
    return ThresholdResult(protocol, "pass" if ok else "fail", point.fidelity - GENERIC_MIN_FIDELITY)
