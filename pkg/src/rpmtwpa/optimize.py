"""Search over the two free resonator capacitances (C_c, C_r).

The search is a coarse grid scan followed by a bounded Nelder-Mead
refinement started from the best grid cell.  Internally the coordinates are
scaled to fF (C_c) and pF (C_r) so the simplex tolerance reads naturally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.optimize import minimize

from .circuit import DeviceParams, ResonatorParams, solve_constraints
from .errors import (
    AtPole,
    InvalidCell,
    NegativeCapacitance,
    NoFeasiblePoint,
    NonPositiveInput,
    Stopband,
    TwpaError,
    ZeroDenominator,
)
from .mixer import LossModel, PumpConfig
from .sweep import OK, POLE_SKIPPED, FrequencyGrid, Metric, evaluate_metric, map_ordered

CC_SCALE = 1e15  # F -> fF
CR_SCALE = 1e12  # F -> pF
SIMPLEX_TOLERANCE = 0.1  # fF along C_c, pF along C_r
MAX_REFINE_EVALUATIONS = 200
_PENALTY = 1e30

OBJECTIVE_KINDS = {
    "gain_at_frequency": "gain",
    "abs_squeezing_at_frequency": "squeeze",
    "bandwidth_above_threshold": "bandwidth",
}


@dataclass(frozen=True)
class Objective:
    kind: str
    frequency: float | None = None
    threshold_db: float | None = None
    band: tuple[float, float] | None = None
    quantity: str = "gain"
    loss: LossModel = LossModel()

    def __post_init__(self):
        if self.kind not in OBJECTIVE_KINDS:
            raise ValueError(f"unknown objective kind {self.kind!r}")
        self.metric  # validates the required fields

    @property
    def metric(self) -> Metric:
        return Metric(
            kind=OBJECTIVE_KINDS[self.kind],
            frequency=self.frequency,
            threshold_db=self.threshold_db,
            band=self.band,
            quantity=self.quantity,
        )


@dataclass(frozen=True)
class SearchSpace:
    """Box of (C_c, C_r) in farads.  Equal lower and upper bounds pin that axis."""

    cc_bounds: tuple[float, float]
    cr_bounds: tuple[float, float]
    coarse_grid: tuple[int, int] = (21, 21)
    c_effective: float | None = None

    def __post_init__(self):
        for name in ("cc_bounds", "cr_bounds"):
            lo, hi = getattr(self, name)
            if not (lo > 0 and hi > 0):
                raise NonPositiveInput(f"{name} must be positive")
            if lo > hi:
                raise NonPositiveInput(f"{name} lower bound exceeds upper bound")
        if any(int(n) != n or n < 1 for n in self.coarse_grid):
            raise NonPositiveInput("coarse_grid counts must be integers >= 1")
        if self.c_effective is not None and self.cc_bounds[1] > self.c_effective:
            raise NegativeCapacitance(
                f"upper C_c bound {self.cc_bounds[1]:.6g} F exceeds C_eff = {self.c_effective:.6g} F"
            )

    @classmethod
    def for_device(cls, device: DeviceParams, cc_bounds, cr_bounds, coarse_grid=(21, 21)) -> "SearchSpace":
        return cls(tuple(cc_bounds), tuple(cr_bounds), tuple(coarse_grid), device.c_effective)

    @staticmethod
    def _axis(bounds, n):
        lo, hi = bounds
        return np.array([lo]) if lo == hi else np.linspace(lo, hi, int(n))

    @property
    def cc_values(self) -> np.ndarray:
        return self._axis(self.cc_bounds, self.coarse_grid[0])

    @property
    def cr_values(self) -> np.ndarray:
        return self._axis(self.cr_bounds, self.coarse_grid[1])

    def points(self) -> list[tuple[float, float]]:
        """Coarse grid in row-major order: C_r outer, C_c inner."""
        return [(float(cc), float(cr)) for cr in self.cr_values for cc in self.cc_values]


@dataclass(eq=False)
class OptimizationReport:
    best_point: tuple[float, float]
    best_value: float
    derived_cell: ResonatorParams | None
    trace: list = field(default_factory=list)
    n_evaluations: int = 0
    best_coarse_value: float = math.nan


@dataclass(frozen=True)
class ParetoPoint:
    cc: float
    cr: float
    value1: float
    value2: float


ObjectiveLike = Union[Objective, Callable[[float, float], float]]


def evaluate_objective(
    device: DeviceParams,
    pump: PumpConfig,
    objective: Objective,
    cc: float,
    cr: float,
    resonance_frequency: float,
    grid: FrequencyGrid = FrequencyGrid(),
) -> float:
    """Objective value of the design (C_c, C_r); higher is better.

    Raises InvalidCell for infeasible pairs and Stopband / AtPole when a point
    metric's frequency does not propagate.
    """
    try:
        res = solve_constraints(device, 2 * math.pi * resonance_frequency, cc, cr)
    except (NegativeCapacitance, ZeroDenominator) as exc:
        raise InvalidCell(str(exc)) from exc
    value, flag = evaluate_metric(device, res, pump, objective.loss, objective.metric, grid)
    if flag == POLE_SKIPPED:
        raise AtPole(f"objective frequency is at the resonator pole for ({cc:.6g}, {cr:.6g})")
    if flag != OK:
        raise Stopband(f"objective frequency is in a stopband for ({cc:.6g}, {cr:.6g})")
    return value


def _as_function(device, pump, objective, resonance_frequency, grid):
    if isinstance(objective, Objective):
        return lambda cc, cr: evaluate_objective(device, pump, objective, cc, cr, resonance_frequency, grid)
    if callable(objective):
        return objective
    raise TypeError("objective must be an Objective or a callable (cc, cr) -> float")


def _safe(fn, cc, cr) -> float:
    try:
        value = float(fn(cc, cr))
    except TwpaError:
        return math.nan
    return value if math.isfinite(value) else math.nan


def _rank_key(entry):
    (cc, cr), value = entry
    return (-value, cc, cr)


def _best(entries):
    feasible = [e for e in entries if not math.isnan(e[1])]
    return min(feasible, key=_rank_key) if feasible else None


def optimize(
    device: DeviceParams,
    pump: PumpConfig,
    objective: ObjectiveLike,
    space: SearchSpace,
    resonance_frequency: float,
    grid: FrequencyGrid = FrequencyGrid(),
    threads: int = 1,
) -> OptimizationReport:
    """Maximize ``objective`` over ``space``.

    ``objective`` may also be a plain callable ``(cc, cr) -> float`` in farads.
    The trace lists every evaluation in order, coarse grid first; infeasible
    evaluations are recorded with a NaN value.
    """
    fn = _as_function(device, pump, objective, resonance_frequency, grid)
    points = space.points()
    values = map_ordered(lambda p: _safe(fn, *p), points, threads)
    trace = list(zip(points, values))
    coarse_best = _best(trace)
    if coarse_best is None:
        raise NoFeasiblePoint("no grid cell of the search space gives a finite objective")

    lower = np.array([space.cc_bounds[0] * CC_SCALE, space.cr_bounds[0] * CR_SCALE])
    upper = np.array([space.cc_bounds[1] * CC_SCALE, space.cr_bounds[1] * CR_SCALE])
    free = np.flatnonzero(upper > lower)
    start = np.array([coarse_best[0][0] * CC_SCALE, coarse_best[0][1] * CR_SCALE])

    if free.size:
        def unscale(z):
            full = start.copy()
            full[free] = np.clip(z, lower[free], upper[free])
            return float(full[0] / CC_SCALE), float(full[1] / CR_SCALE)

        def negated(z):
            point = unscale(z)
            value = _safe(fn, *point)
            trace.append((point, value))
            return _PENALTY if math.isnan(value) else -value

        counts = np.array([len(space.cc_values), len(space.cr_values)])
        step = np.where(counts > 1, (upper - lower) / np.maximum(counts - 1, 1), 0.1 * (upper - lower))
        z0 = start[free]
        simplex = [z0]
        for j, axis in enumerate(free):
            vertex = z0.copy()
            delta = step[axis]
            vertex[j] = z0[j] + delta if z0[j] + delta <= upper[axis] else z0[j] - delta
            simplex.append(vertex)
        minimize(
            negated,
            z0,
            method="Nelder-Mead",
            bounds=list(zip(lower[free], upper[free])),
            options={
                "initial_simplex": np.array(simplex),
                "xatol": SIMPLEX_TOLERANCE,
                "fatol": np.inf,
                "maxfev": MAX_REFINE_EVALUATIONS,
            },
        )

    (best_point, best_value) = _best(trace)
    try:
        cell = solve_constraints(device, 2 * math.pi * resonance_frequency, *best_point)
    except TwpaError:
        cell = None
    return OptimizationReport(
        best_point=best_point,
        best_value=best_value,
        derived_cell=cell,
        trace=trace,
        n_evaluations=len(trace),
        best_coarse_value=coarse_best[1],
    )


def non_dominated(values1, values2) -> np.ndarray:
    """Boolean mask of points not dominated under maximization of both values."""
    a = np.asarray(values1, dtype=float)[:, None]
    b = np.asarray(values2, dtype=float)[:, None]
    geq = (a.T >= a) & (b.T >= b)
    strict = (a.T > a) | (b.T > b)
    return ~np.any(geq & strict, axis=1)


def pareto_scan(
    device: DeviceParams,
    pump: PumpConfig,
    objectives: tuple[ObjectiveLike, ObjectiveLike],
    space: SearchSpace,
    resonance_frequency: float,
    grid: FrequencyGrid = FrequencyGrid(),
    threads: int = 1,
) -> list[ParetoPoint]:
    """Non-dominated coarse-grid designs for a pair of objectives, in grid order."""
    first, second = (_as_function(device, pump, o, resonance_frequency, grid) for o in objectives)
    points = space.points()
    pairs = map_ordered(lambda p: (_safe(first, *p), _safe(second, *p)), points, threads)
    feasible = [(p, v) for p, v in zip(points, pairs) if not (math.isnan(v[0]) or math.isnan(v[1]))]
    if not feasible:
        raise NoFeasiblePoint("no grid cell gives finite values for both objectives")
    mask = non_dominated([v[0] for _, v in feasible], [v[1] for _, v in feasible])
    return [ParetoPoint(p[0], p[1], v[0], v[1]) for (p, v), keep in zip(feasible, mask) if keep]
