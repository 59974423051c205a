"""Linear dispersion of the resonator-loaded junction line.

Eliminating the resonator flux from the linearized field equations gives, per
unit cell and in junction units,

    k(w)**2 * (1 - w**2) = w**2 * c_eff(w),
    c_eff(w) = c0 + cc * (1 - w**2 cr lr) / (1 - w**2 (cc + cr) lr),

where ``w`` is the angular frequency divided by the plasma frequency.  c_eff is
the same shunt capacitance as :func:`rpmtwpa.circuit.effective_admittance`
expressed in units of C_J.

All functions accept scalars or numpy arrays.  The raising variants fail if any
element is outside the propagating band; :func:`wavenumber_masked` is the
array-friendly variant used by the sweeps.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .circuit import POLE_TOLERANCE, DeviceParams, NormalizedCell, ResonatorParams, normalize
from .errors import AtPole, NonPositiveInput, Stopband


class BandStatus(enum.IntEnum):
    OK = 0
    STOPBAND = 1
    POLE = 2


@dataclass(frozen=True)
class DispersionContext:
    cell: NormalizedCell
    plasma_frequency: float

    @classmethod
    def from_physical(cls, device: DeviceParams, res: ResonatorParams) -> "DispersionContext":
        return cls(cell=normalize(device, res), plasma_frequency=device.plasma_frequency)

    def to_norm(self, omega):
        """Convert angular frequency in rad/s to units of the plasma frequency."""
        return np.asarray(omega, dtype=float) / self.plasma_frequency

    @property
    def pole_norm(self) -> float:
        c = self.cell
        product = (c.cc + c.cr) * c.lr
        return np.inf if product == 0 else 1.0 / np.sqrt(product)


def _as_array(omega_norm):
    w = np.asarray(omega_norm, dtype=float)
    if np.any(~(w > 0)):
        raise NonPositiveInput("normalized frequency must be > 0")
    return w


def _unwrap(a):
    return a[()] if np.ndim(a) == 0 else a


def _pole_denominator(cell: NormalizedCell, w):
    return 1.0 - w**2 * (cell.cc + cell.cr) * cell.lr


def _at_pole(cell: NormalizedCell, w):
    if cell.cc == 0:
        return np.zeros(np.shape(w), dtype=bool)
    return np.abs(_pole_denominator(cell, w)) < POLE_TOLERANCE


def _c_eff(cell: NormalizedCell, w):
    if cell.cc == 0:
        return np.full(np.shape(w), cell.c0, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return cell.c0 + cell.cc * (1.0 - w**2 * cell.cr * cell.lr) / _pole_denominator(cell, w)


def effective_capacitance_norm(ctx: DispersionContext, omega_norm):
    """Frequency-dependent shunt capacitance in units of C_J."""
    w = _as_array(omega_norm)
    if np.any(_at_pole(ctx.cell, w)):
        raise AtPole("frequency coincides with the resonator pole")
    return _unwrap(_c_eff(ctx.cell, w))


def band_status(ctx: DispersionContext, omega_norm):
    """Classify each frequency as propagating, stopband, or at the resonator pole."""
    w = _as_array(omega_norm)
    pole = _at_pole(ctx.cell, w)
    with np.errstate(divide="ignore", invalid="ignore"):
        radicand = _c_eff(ctx.cell, w) / (1.0 - w**2)
    evanescent = (w >= 1.0) | ~(radicand >= 0)
    status = np.full(w.shape, BandStatus.OK, dtype=np.int8)
    status[evanescent] = BandStatus.STOPBAND
    status[pole] = BandStatus.POLE
    return status


def wavenumber_masked(ctx: DispersionContext, omega_norm):
    """Return ``(k, status)``; ``k`` is NaN wherever ``status`` is not OK."""
    w = _as_array(omega_norm)
    status = band_status(ctx, w)
    ok = status == BandStatus.OK
    k = np.full(w.shape, np.nan)
    radicand = _c_eff(ctx.cell, w[ok]) / (1.0 - w[ok] ** 2)
    k[ok] = w[ok] * np.sqrt(radicand)
    return k, status


def _raise_for(status):
    if np.any(status == BandStatus.POLE):
        raise AtPole("frequency coincides with the resonator pole")
    if np.any(status == BandStatus.STOPBAND):
        raise Stopband("frequency lies in a stopband (no propagating solution)")


def wavenumber(ctx: DispersionContext, omega_norm):
    """Phase advance per unit cell (radians) of a propagating wave."""
    k, status = wavenumber_masked(ctx, omega_norm)
    _raise_for(status)
    return _unwrap(k)


def _three_wavenumbers(ctx, omega_signal_norm, omega_pump_norm):
    ws = _as_array(omega_signal_norm)
    wp = _as_array(omega_pump_norm)
    wi = _as_array(2.0 * wp - ws)
    return wavenumber(ctx, ws), wavenumber(ctx, wi), wavenumber(ctx, wp)


def linear_mismatch(ctx: DispersionContext, omega_signal_norm, omega_pump_norm):
    """2 k(w_p) - k(w) - k(2 w_p - w)."""
    ks, ki, kp = _three_wavenumbers(ctx, omega_signal_norm, omega_pump_norm)
    return 2.0 * kp - (ks + ki)


def total_mismatch(ctx: DispersionContext, omega_signal_norm, omega_pump_norm, beta):
    """Linear mismatch dressed by self- and cross-phase modulation from the pump."""
    if np.any(np.asarray(beta) < 0):
        raise NonPositiveInput("beta must be >= 0")
    kp = wavenumber(ctx, omega_pump_norm)
    dk_linear = linear_mismatch(ctx, omega_signal_norm, omega_pump_norm)
    b2 = np.asarray(beta, dtype=float) ** 2
    return _unwrap((1.0 + 2.0 * b2) * dk_linear - 2.0 * b2 * kp)
