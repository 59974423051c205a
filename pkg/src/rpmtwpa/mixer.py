"""Closed-form degenerate four-wave mixing: gain, output loss and squeezing.

The signal amplitude after ``x`` cells is ``u a_s(0) + i v a_i(0)^dagger`` with

    u = cosh(g x) + i (dk / 2g) sinh(g x)
    v = (beta**2 / g) sqrt(k_s k_i) sinh(g x)
    g = sqrt(beta**4 k_s k_i - (dk / 2)**2)

``g`` is taken as the principal complex square root so the same expressions
cover the amplifying (real ``g``) and oscillating (imaginary ``g``) regimes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dispersion import BandStatus, DispersionContext, _raise_for, wavenumber_masked
from .errors import DegeneratePump, NonPositiveInput

# below this |g x| the series for sinh(gx)/g is used
SERIES_THRESHOLD = 1e-3
DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class PumpConfig:
    pump_current: float
    pump_frequency: float  # Hz
    critical_current: float

    def __post_init__(self):
        if not self.pump_frequency > 0:
            raise NonPositiveInput("pump_frequency must be > 0")
        if not self.critical_current > 0:
            raise NonPositiveInput("critical_current must be > 0")
        if not 0 <= self.pump_current < self.critical_current:
            raise NonPositiveInput("pump_current must satisfy 0 <= I_p < I_c")

    @classmethod
    def from_beta(cls, beta: float, pump_frequency: float, critical_current: float = 1.0) -> "PumpConfig":
        return cls(4.0 * beta * critical_current, pump_frequency, critical_current)

    @property
    def beta(self) -> float:
        return self.pump_current / (4.0 * self.critical_current)

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.pump_frequency


@dataclass(frozen=True)
class LossModel:
    """Output beam splitter with power transmission ``eta``."""

    eta: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise NonPositiveInput(f"eta must lie in [0, 1], got {self.eta!r}")


@dataclass(frozen=True)
class ModeCoefficients:
    """Coupled-mode solution at one position; fields may be scalars or equal-shape arrays."""

    u: complex
    v: complex
    g: complex
    delta_k: float
    delta_k_linear: float
    position: float
    degenerate: bool = False


class SqueezingExtrema(NamedTuple):
    min_db: float
    max_db: float
    theta_min: float
    theta_max: float

    @property
    def abs_db(self):
        """Magnitude of the squeezed-quadrature level, the quantity usually plotted."""
        return np.abs(self.min_db)


def _unwrap(a):
    return a[()] if np.ndim(a) == 0 else a


def _sinhc(g, x):
    """sinh(g x) / g with the removable singularity at g = 0 filled in."""
    gx = g * x
    small = np.abs(gx) < SERIES_THRESHOLD
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.sinh(gx) / g
    gx2 = gx * gx
    series = x * (1.0 + gx2 / 6.0 + gx2 * gx2 / 120.0)
    return np.where(small, series, direct)


def solve_modes(ks, ki, kp, beta, x):
    """Evaluate u, v, g and both mismatches from the three wavenumbers."""
    b2 = beta * beta
    dk_linear = 2.0 * kp - (ks + ki)
    dk = (1.0 + 2.0 * b2) * dk_linear - 2.0 * b2 * kp
    coupling = b2 * np.sqrt(ks * ki)
    half = dk / 2.0
    g = np.sqrt((coupling - half) * (coupling + half) + 0j)
    sinhc = _sinhc(g, x)
    u = np.cosh(g * x) + 1j * half * sinhc
    v = coupling * sinhc
    return u, v, g, dk, dk_linear


def mode_coefficients_masked(ctx: DispersionContext, beta, omega_signal_norm, omega_pump_norm, x):
    """Array evaluation returning ``(ModeCoefficients, status)``.

    Entries whose signal, idler or pump frequency is outside the propagating
    band are NaN and carry the worst status of the three (pole over stopband).
    """
    ws = np.atleast_1d(np.asarray(omega_signal_norm, dtype=float))
    wp = float(omega_pump_norm)
    ks, s_status = wavenumber_masked(ctx, ws)
    ki, i_status = wavenumber_masked(ctx, 2.0 * wp - ws)
    kp, p_status = wavenumber_masked(ctx, wp)
    status = np.maximum(np.maximum(s_status, i_status), p_status)
    u, v, g, dk, dk_linear = solve_modes(ks, ki, kp, beta, x)
    coeffs = ModeCoefficients(
        u=u,
        v=v,
        g=g,
        delta_k=dk,
        delta_k_linear=dk_linear,
        position=x,
        degenerate=np.abs(ws - wp) <= DEGENERATE_RTOL * wp,
    )
    return coeffs, status.astype(np.int8)


def coefficients(ctx: DispersionContext, pump: PumpConfig, omega_signal, position) -> ModeCoefficients:
    """Coupled-mode coefficients at angular signal frequency ``omega_signal`` (rad/s).

    ``position`` is measured in unit cells.  Raises Stopband / AtPole if any of
    signal, idler or pump does not propagate.
    """
    if not position >= 0:
        raise NonPositiveInput("position must be >= 0")
    scalar = np.ndim(omega_signal) == 0
    coeffs, status = mode_coefficients_masked(
        ctx, pump.beta, ctx.to_norm(omega_signal), ctx.to_norm(pump.omega), float(position)
    )
    _raise_for(status)
    if not scalar:
        return coeffs
    return ModeCoefficients(
        *(_unwrap(np.asarray(getattr(coeffs, f))[0]) for f in ("u", "v", "g", "delta_k", "delta_k_linear")),
        position=coeffs.position,
        degenerate=bool(coeffs.degenerate[0]),
    )


def gain_db(coeffs: ModeCoefficients):
    return 10.0 * np.log10(np.abs(coeffs.u) ** 2)


def lossy_gain_db(coeffs: ModeCoefficients, loss: LossModel):
    """Coherent signal gain seen after the output beam splitter."""
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(loss.eta * np.abs(coeffs.u) ** 2)


def _check_degenerate(coeffs, allow_degenerate):
    if not allow_degenerate and np.any(coeffs.degenerate):
        raise DegeneratePump("signal equals pump frequency; quadrature angle is undefined")


def squeezing_spectrum(coeffs: ModeCoefficients, loss: LossModel, theta, allow_degenerate=False):
    """Output quadrature noise spectrum at angle ``theta``, vacuum = 1."""
    _check_degenerate(coeffs, allow_degenerate)
    eta = loss.eta
    u, v = coeffs.u, coeffs.v
    cross = np.real(1j * u * v * np.exp(-1j * np.asarray(theta)))
    return 1.0 + 2.0 * eta * np.abs(v) ** 2 + 2.0 * eta * cross


def squeezing_at_half_pi(coeffs: ModeCoefficients, loss: LossModel, allow_degenerate=False):
    """Spectrum at theta = pi/2, i.e. 1 + 2 eta |v|^2 + 2 eta Re(u v)."""
    _check_degenerate(coeffs, allow_degenerate)
    u, v = coeffs.u, coeffs.v
    return 1.0 + 2.0 * loss.eta * np.abs(v) ** 2 + 2.0 * loss.eta * np.real(u * v)


def squeezing_extrema(coeffs: ModeCoefficients, loss: LossModel, allow_degenerate=False):
    """Linear (S_min, S_max) over all quadrature angles.

    The spectrum is ``A + B cos(theta - theta0)`` with ``A = 1 + 2 eta |v|^2``
    and ``B = 2 eta |u v|``.  S_min is written as ``1 - 2 eta |v| / (|u| + |v|)``
    (using |u|^2 - |v|^2 = 1) to avoid cancellation at high gain.
    """
    _check_degenerate(coeffs, allow_degenerate)
    au, av = np.abs(coeffs.u), np.abs(coeffs.v)
    eta = loss.eta
    total = au + av
    s_min = 1.0 - 2.0 * eta * av / total
    s_max = 1.0 + 2.0 * eta * av * total
    return s_min, s_max


def _wrap(angle):
    return np.pi - np.mod(np.pi - angle, 2.0 * np.pi)


def device_squeezing(coeffs: ModeCoefficients, loss: LossModel, allow_degenerate=False) -> SqueezingExtrema:
    """Squeezed and anti-squeezed quadrature levels in dB with their angles in (-pi, pi]."""
    s_min, s_max = squeezing_extrema(coeffs, loss, allow_degenerate)
    phase = np.angle(coeffs.u * coeffs.v)
    return SqueezingExtrema(
        min_db=10.0 * np.log10(s_min),
        max_db=10.0 * np.log10(s_max),
        theta_min=_wrap(phase - np.pi / 2),
        theta_max=_wrap(phase + np.pi / 2),
    )
