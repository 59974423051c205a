"""Unit-cell physics: device constants, resonator elements and the design constraints.

Everything here is in SI units.  The only place where quantities are made
dimensionless is :func:`normalize`, which is the single conversion boundary
used by the dispersion and mixing code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AtPole, NegativeCapacitance, NonPositiveInput, ZeroDenominator

FLUX_QUANTUM = 2.067833848e-15  # Wb
POLE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class DeviceParams:
    """Junction line constants.  Derived quantities are computed on access."""

    critical_current: float
    junction_capacitance: float
    n_cells: int
    line_impedance: float
    flux_quantum: float = FLUX_QUANTUM

    def __post_init__(self):
        for name in ("critical_current", "junction_capacitance", "line_impedance", "flux_quantum"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise NonPositiveInput(f"{name} must be a positive finite number, got {value!r}")
        if isinstance(self.n_cells, bool) or int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise NonPositiveInput(f"n_cells must be an integer >= 1, got {self.n_cells!r}")

    @property
    def josephson_inductance(self) -> float:
        return self.flux_quantum / (2 * math.pi * self.critical_current)

    @property
    def plasma_frequency(self) -> float:
        """Angular plasma frequency in rad/s."""
        return 1.0 / math.sqrt(self.josephson_inductance * self.junction_capacitance)

    @property
    def josephson_energy(self) -> float:
        return self.critical_current * self.flux_quantum / (2 * math.pi)

    @property
    def c_effective(self) -> float:
        """Shunt capacitance that makes the cell impedance equal to ``line_impedance``."""
        return self.josephson_inductance / self.line_impedance**2


def derive_device(critical_current, junction_capacitance, n_cells, line_impedance) -> DeviceParams:
    return DeviceParams(
        critical_current=critical_current,
        junction_capacitance=junction_capacitance,
        n_cells=n_cells,
        line_impedance=line_impedance,
    )


@dataclass(frozen=True)
class ResonatorParams:
    c_ground: float
    c_coupling: float
    c_resonator: float
    l_resonator: float

    def __post_init__(self):
        for name in ("c_ground", "c_coupling", "c_resonator", "l_resonator"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise NegativeCapacitance(f"{name} must be finite and >= 0, got {value!r}")

    @property
    def resonance_frequency(self) -> float:
        """Angular frequency of the resonator pole, rad/s."""
        product = (self.c_coupling + self.c_resonator) * self.l_resonator
        if product == 0:
            raise ZeroDenominator("resonator has zero (C_c + C_r) * L_r")
        return 1.0 / math.sqrt(product)

    @property
    def c_effective(self) -> float:
        return self.c_ground + self.c_coupling


@dataclass(frozen=True)
class NormalizedCell:
    """Element values in junction units (capacitances / C_J, inductance / L_J)."""

    c0: float
    cc: float
    cr: float
    lr: float

    def __post_init__(self):
        for name in ("c0", "cc", "cr", "lr"):
            if not getattr(self, name) >= 0:
                raise NonPositiveInput(f"normalized {name} must be >= 0")


def solve_constraints(device: DeviceParams, target_resonance, c_coupling, c_resonator) -> ResonatorParams:
    """Complete a unit cell from the two free capacitances.

    ``target_resonance`` is the angular resonance frequency (rad/s).  C_0 is
    fixed by the line impedance (C_0 + C_c = L_J / Z_0**2) and L_r by the
    resonance condition.
    """
    if not target_resonance > 0:
        raise NonPositiveInput(f"target_resonance must be > 0, got {target_resonance!r}")
    if c_coupling < 0 or c_resonator < 0:
        raise NegativeCapacitance(
            f"capacitances must be >= 0 (C_c={c_coupling!r}, C_r={c_resonator!r})"
        )
    c_eff = device.c_effective
    if c_coupling > c_eff:
        raise NegativeCapacitance(
            f"C_c = {c_coupling:.6g} F exceeds C_eff = {c_eff:.6g} F; C_0 would be negative"
        )
    c_total = c_coupling + c_resonator
    if c_total == 0:
        raise ZeroDenominator("C_c + C_r = 0 leaves the resonator inductance undefined")
    return ResonatorParams(
        c_ground=c_eff - c_coupling,
        c_coupling=float(c_coupling),
        c_resonator=float(c_resonator),
        l_resonator=1.0 / (target_resonance**2 * c_total),
    )


def _pole_denominator(res: ResonatorParams, omega):
    return 1.0 - omega**2 * (res.c_coupling + res.c_resonator) * res.l_resonator


def effective_admittance(res: ResonatorParams, omega):
    """Shunt admittance of C_0 in parallel with the C_c-coupled LC branch (siemens)."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise NonPositiveInput("omega must be > 0")
    denominator = _pole_denominator(res, omega)
    if res.c_coupling > 0 and np.any(np.abs(denominator) < POLE_TOLERANCE):
        raise AtPole("frequency coincides with the resonator pole")
    branch = 1.0 - omega**2 * res.c_resonator * res.l_resonator
    with np.errstate(divide="ignore", invalid="ignore"):
        loaded = np.where(res.c_coupling > 0, res.c_coupling * branch / denominator, 0.0)
    admittance = 1j * omega * (res.c_ground + loaded)
    return admittance[()] if admittance.ndim == 0 else admittance


def effective_impedance(res: ResonatorParams, omega):
    """Complex shunt impedance of the unit cell at angular frequency ``omega``."""
    admittance = effective_admittance(res, omega)
    if np.any(admittance == 0):
        raise ZeroDenominator("shunt admittance vanishes; impedance is unbounded")
    return 1.0 / admittance


def impedance_approximation_error(res: ResonatorParams, omega):
    """Relative gap between the exact shunt capacitance and the static C_0 + C_c.

    Diagnostic only: the constant approximation is used for the impedance
    constraint and nowhere else.
    """
    omega = np.asarray(omega, dtype=float)
    exact = np.imag(effective_admittance(res, omega)) / omega
    return np.abs(exact - res.c_effective) / res.c_effective


def normalize(device: DeviceParams, res: ResonatorParams) -> NormalizedCell:
    cj = device.junction_capacitance
    return NormalizedCell(
        c0=res.c_ground / cj,
        cc=res.c_coupling / cj,
        cr=res.c_resonator / cj,
        lr=res.l_resonator / device.josephson_inductance,
    )


def denormalize(device: DeviceParams, cell: NormalizedCell) -> ResonatorParams:
    cj = device.junction_capacitance
    return ResonatorParams(
        c_ground=cell.c0 * cj,
        c_coupling=cell.cc * cj,
        c_resonator=cell.cr * cj,
        l_resonator=cell.lr * device.josephson_inductance,
    )
