"""Frequency spectra and resonator-parameter sweeps.

Grid cells are evaluated independently by the same per-cell routine, whatever
the thread count, so results are bit-for-bit reproducible.  Points that cannot
be evaluated carry a flag and NaN, never a zero.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import DeviceParams, ResonatorParams, solve_constraints
from .dispersion import BandStatus, DispersionContext
from .errors import EmptyBand, InvalidCell, NegativeCapacitance, NonPositiveInput, ZeroDenominator
from .mixer import LossModel, ModeCoefficients, PumpConfig, lossy_gain_db, gain_db, mode_coefficients_masked, squeezing_extrema

OK = "ok"
STOPBAND = "stopband"
POLE_SKIPPED = "pole-skipped"
INVALID = "invalid"

_STATUS_FLAGS = {BandStatus.OK: OK, BandStatus.STOPBAND: STOPBAND, BandStatus.POLE: POLE_SKIPPED}


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform signal-frequency grid in Hz."""

    start: float = 1e9
    stop: float = 11e9
    n_points: int = 2001
    exclusion_margin: float = 0.0

    def __post_init__(self):
        if not self.start < self.stop:
            raise NonPositiveInput("grid start must be below stop")
        if self.start <= 0:
            raise NonPositiveInput("grid frequencies must be positive")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise NonPositiveInput("grid needs at least two points")
        if not self.exclusion_margin >= 0:
            raise NonPositiveInput("exclusion_margin must be >= 0")

    def frequencies(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.n_points))


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    frequencies: np.ndarray
    gain_db: np.ndarray
    lossy_gain_db: np.ndarray
    squeeze_min_db: np.ndarray
    squeeze_max_db: np.ndarray
    flags: np.ndarray
    eta: float = 1.0

    @property
    def abs_squeeze_db(self) -> np.ndarray:
        return np.abs(self.squeeze_min_db)

    @property
    def ok(self) -> np.ndarray:
        return self.flags == OK

    def quantity(self, name: str) -> np.ndarray:
        """Look up a plotted quantity: ``gain`` (after output loss) or ``squeeze``."""
        if name == "gain":
            return self.lossy_gain_db
        if name == "squeeze":
            return self.abs_squeeze_db
        raise ValueError(f"unknown spectrum quantity {name!r}")


@dataclass(frozen=True, eq=False)
class SweepGrid2D:
    """Scalar field over (C_r, C_c); rows follow ``cr_values``, columns ``cc_values``."""

    cc_values: np.ndarray
    cr_values: np.ndarray
    field: np.ndarray
    flags: np.ndarray
    metric_name: str


@dataclass(frozen=True)
class Metric:
    """Scalar figure of merit for a single unit-cell design.

    ``kind`` is ``gain`` or ``squeeze`` (evaluated at ``frequency``), or
    ``bandwidth`` (total width in Hz of the part of ``band`` where
    ``quantity`` exceeds ``threshold_db``).
    """

    kind: str
    frequency: float | None = None
    threshold_db: float | None = None
    band: tuple[float, float] | None = None
    quantity: str = "gain"

    def __post_init__(self):
        if self.kind in ("gain", "squeeze"):
            if self.frequency is None or not self.frequency > 0:
                raise ValueError(f"{self.kind} metric needs a positive frequency")
        elif self.kind == "bandwidth":
            if self.threshold_db is None or not math.isfinite(self.threshold_db):
                raise ValueError("bandwidth metric needs a finite threshold_db")
            if self.band is None or not self.band[0] < self.band[1]:
                raise ValueError("bandwidth metric needs a band (f_lo, f_hi) with f_lo < f_hi")
            if self.quantity not in ("gain", "squeeze"):
                raise ValueError(f"unknown bandwidth quantity {self.quantity!r}")
        else:
            raise ValueError(f"unknown metric kind {self.kind!r}")

    @property
    def name(self) -> str:
        return f"bandwidth_{self.quantity}" if self.kind == "bandwidth" else self.kind


def map_ordered(fn, items, threads: int = 1) -> list:
    """``list(map(fn, items))``, optionally on a thread pool; output order is input order."""
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def check_cell(device: DeviceParams, res: ResonatorParams) -> None:
    """Raise InvalidCell unless ``res`` satisfies the impedance and resonance constraints."""
    target = device.c_effective
    if not math.isclose(res.c_effective, target, rel_tol=1e-9):
        raise InvalidCell(
            f"C_0 + C_c = {res.c_effective:.6g} F does not match L_J / Z_0^2 = {target:.6g} F"
        )
    if res.l_resonator <= 0 or res.c_coupling + res.c_resonator <= 0:
        raise InvalidCell("resonator needs L_r > 0 and C_c + C_r > 0")


def _mode_solution(device, res, pump, frequencies, exclusion_margin=0.0):
    ctx = DispersionContext.from_physical(device, res)
    freqs = np.asarray(frequencies, dtype=float)
    coeffs, status = mode_coefficients_masked(
        ctx, pump.beta, ctx.to_norm(2 * np.pi * freqs), ctx.to_norm(pump.omega), float(device.n_cells)
    )
    if exclusion_margin > 0:
        f_r = res.resonance_frequency / (2 * np.pi)
        idler = 2.0 * pump.pump_frequency - freqs
        near = (np.abs(freqs - f_r) <= exclusion_margin) | (np.abs(idler - f_r) <= exclusion_margin)
        status = np.where(near, np.int8(BandStatus.POLE), status)
    return coeffs, status


def _assemble(freqs, coeffs: ModeCoefficients, status, loss: LossModel) -> SpectrumResult:
    ok = status == BandStatus.OK
    gain = gain_db(coeffs)
    lossy = lossy_gain_db(coeffs, loss)
    s_min, s_max = squeezing_extrema(coeffs, loss, allow_degenerate=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        sq_min = 10.0 * np.log10(s_min)
        sq_max = 10.0 * np.log10(s_max)
    arrays = [np.where(ok, a, np.nan) for a in (gain, lossy, sq_min, sq_max)]
    flags = np.array([_STATUS_FLAGS[BandStatus(s)] for s in status], dtype=object)
    return SpectrumResult(np.asarray(freqs, dtype=float), *arrays, flags=flags, eta=loss.eta)


def spectrum(
    device: DeviceParams,
    resonator: ResonatorParams,
    pump: PumpConfig,
    loss: LossModel = LossModel(),
    grid: FrequencyGrid = FrequencyGrid(),
) -> SpectrumResult:
    """Gain and squeezing at every grid frequency for one unit-cell design."""
    check_cell(device, resonator)
    freqs = grid.frequencies()
    coeffs, status = _mode_solution(device, resonator, pump, freqs, grid.exclusion_margin)
    return _assemble(freqs, coeffs, status, loss)


def invalid_spectrum(grid: FrequencyGrid, eta: float = 1.0) -> SpectrumResult:
    freqs = grid.frequencies()
    nan = np.full(freqs.shape, np.nan)
    flags = np.full(freqs.shape, INVALID, dtype=object)
    return SpectrumResult(freqs, nan, nan.copy(), nan.copy(), nan.copy(), flags, eta)


def bandwidth_above(result: SpectrumResult, threshold_db: float, band, quantity: str = "gain") -> float:
    """Total width (Hz) of the part of ``band`` where ``quantity`` exceeds ``threshold_db``.

    Crossings between grid points are located by linear interpolation and
    disjoint intervals are summed.  Flagged points count as below threshold.
    """
    f_lo, f_hi = band
    freqs = result.frequencies
    inside = (freqs >= f_lo) & (freqs <= f_hi)
    if not np.any(inside):
        raise EmptyBand(f"no grid points in band [{f_lo:.6g}, {f_hi:.6g}] Hz")
    f = freqs[inside]
    values = np.where(result.ok, result.quantity(quantity), -np.inf)[inside]
    if f.size < 2:
        return 0.0
    a = values[:-1] - threshold_db
    b = values[1:] - threshold_db
    with np.errstate(divide="ignore", invalid="ignore"):
        falling = a / (a - b)
        rising = b / (b - a)
    fraction = np.select(
        [(a >= 0) & (b >= 0), (a >= 0) & (b < 0), (a < 0) & (b >= 0)],
        [1.0, falling, rising],
        default=0.0,
    )
    return float(np.sum(fraction * np.diff(f)))


def evaluate_metric(
    device: DeviceParams,
    resonator: ResonatorParams,
    pump: PumpConfig,
    loss: LossModel,
    metric: Metric,
    grid: FrequencyGrid = FrequencyGrid(),
) -> tuple[float, str]:
    """Evaluate ``metric`` for one valid cell; returns ``(value, flag)`` with NaN when flagged."""
    if metric.kind == "bandwidth":
        result = spectrum(device, resonator, pump, loss, grid)
        return bandwidth_above(result, metric.threshold_db, metric.band, metric.quantity), OK
    coeffs, status = _mode_solution(device, resonator, pump, [metric.frequency], grid.exclusion_margin)
    result = _assemble([metric.frequency], coeffs, status, loss)
    return float(result.quantity(metric.kind)[0]), str(result.flags[0])


def evaluate_design(device, pump, loss, resonance_frequency, cc, cr, metric, grid=FrequencyGrid()):
    """Complete the cell from (C_c, C_r) and evaluate ``metric``; infeasible pairs are flagged."""
    try:
        res = solve_constraints(device, 2 * np.pi * resonance_frequency, cc, cr)
    except (NegativeCapacitance, ZeroDenominator):
        return math.nan, INVALID
    return evaluate_metric(device, res, pump, loss, metric, grid)


def sweep_1d(
    device: DeviceParams,
    pump: PumpConfig,
    loss: LossModel,
    fixed: tuple[str, float],
    varied: Sequence[float],
    resonance_frequency: float,
    grid: FrequencyGrid = FrequencyGrid(),
    threads: int = 1,
) -> list[SpectrumResult]:
    """Spectra along one capacitance axis with the other held at ``fixed = (name, value)``.

    ``name`` is ``"cc"`` or ``"cr"``; ``varied`` runs along the other axis.
    """
    name, value = fixed
    if name not in ("cc", "cr"):
        raise ValueError("fixed axis must be 'cc' or 'cr'")

    def one(x):
        cc, cr = (value, x) if name == "cc" else (x, value)
        try:
            res = solve_constraints(device, 2 * np.pi * resonance_frequency, cc, cr)
        except (NegativeCapacitance, ZeroDenominator):
            return invalid_spectrum(grid, loss.eta)
        return spectrum(device, res, pump, loss, grid)

    return map_ordered(one, varied, threads)


def sweep_2d(
    device: DeviceParams,
    pump: PumpConfig,
    loss: LossModel,
    cc_values: Sequence[float],
    cr_values: Sequence[float],
    metric: Metric,
    resonance_frequency: float,
    grid: FrequencyGrid = FrequencyGrid(),
    threads: int = 1,
) -> SweepGrid2D:
    cc_values = np.asarray(cc_values, dtype=float)
    cr_values = np.asarray(cr_values, dtype=float)
    if np.any(cc_values <= 0) or np.any(cr_values <= 0):
        raise NonPositiveInput("capacitance ranges must be positive")
    cells = [(cc, cr) for cr in cr_values for cc in cc_values]
    out = map_ordered(
        lambda p: evaluate_design(device, pump, loss, resonance_frequency, p[0], p[1], metric, grid),
        cells,
        threads,
    )
    shape = (cr_values.size, cc_values.size)
    values = np.array([v for v, _ in out], dtype=float).reshape(shape)
    flags = np.array([f for _, f in out], dtype=object).reshape(shape)
    return SweepGrid2D(cc_values, cr_values, values, flags, metric.name)


@dataclass(frozen=True, eq=False)
class LossSweep:
    etas: np.ndarray
    spectra: list = field(default_factory=list)
    squeezing_monotone: bool = True
    gain_monotone: bool = True


def loss_sweep(
    device: DeviceParams,
    resonator: ResonatorParams,
    pump: PumpConfig,
    eta_values: Sequence[float],
    grid: FrequencyGrid = FrequencyGrid(),
) -> LossSweep:
    """Spectra for each output transmission in ``eta_values`` plus monotonicity checks.

    The checks confirm, at every unflagged frequency, that less transmission
    never gives deeper squeezing or higher gain.
    """
    check_cell(device, resonator)
    etas = np.asarray(eta_values, dtype=float)
    freqs = grid.frequencies()
    coeffs, status = _mode_solution(device, resonator, pump, freqs, grid.exclusion_margin)
    spectra = [_assemble(freqs, coeffs, status, LossModel(float(eta))) for eta in etas]

    order = np.argsort(etas, kind="stable")
    ok = status == BandStatus.OK
    sq_ok = gain_ok = True
    for lo, hi in zip(order[:-1], order[1:]):
        a, b = spectra[lo], spectra[hi]
        sq_ok &= bool(np.all(a.squeeze_min_db[ok] >= b.squeeze_min_db[ok]))
        gain_ok &= bool(np.all(a.lossy_gain_db[ok] <= b.lossy_gain_db[ok]))
    return LossSweep(etas, spectra, sq_ok, gain_ok)
