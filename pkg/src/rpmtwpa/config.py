"""INI run configuration with unit-suffixed keys.

Grammar (every section optional except one of ``[resonator]`` / ``[search]``)::

    [device]     ic_ua, cj_ff, n_cells, z0_ohm
    [pump]       ip_ua, fp_ghz
    [resonator]  fr_ghz, cc_ff, cr_pf
    [search]     fr_ghz, cc_min_ff, cc_max_ff, cr_min_pf, cr_max_pf, n_cc, n_cr
    [loss]       eta, eta_values (comma list; spectrum only)
    [grid]       f_start_ghz, f_stop_ghz, points, exclusion_mhz
    [metrics]    names, frequency_ghz, threshold_db, band_ghz        (sweep)
    [objective]  kind, frequency_ghz, threshold_db, band_ghz, pareto,
                 target_cc_ff, target_cr_pf                          (optimize)
    [output]     directory, formats

Missing keys take the defaults below.  Defaults reproduce the reference
device: 2000 cells, 50 ohm, I_c = 2.75 uA, C_J = 39.5 fF, I_p = 1.37 uA,
f_p = 6 GHz, f_r = 6.06 GHz.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass

from .circuit import DeviceParams
from .errors import ConfigError, TwpaError
from .mixer import LossModel, PumpConfig
from .optimize import Objective, SearchSpace
from .sweep import FrequencyGrid, Metric

DEFAULTS = {
    "device": {"ic_ua": "2.75", "cj_ff": "39.5", "n_cells": "2000", "z0_ohm": "50"},
    "pump": {"ip_ua": "1.37", "fp_ghz": "6"},
    "resonator": {"fr_ghz": "6.06", "cc_ff": "20", "cr_pf": "11"},
    "search": {
        "fr_ghz": "6.06",
        "cc_min_ff": "1",
        "cc_max_ff": "47",
        "cr_min_pf": "1",
        "cr_max_pf": "100",
        "n_cc": "21",
        "n_cr": "21",
    },
    "loss": {"eta": "1", "eta_values": ""},
    "grid": {"f_start_ghz": "1", "f_stop_ghz": "11", "points": "2001", "exclusion_mhz": "0"},
    "metrics": {"names": "gain, squeeze", "frequency_ghz": "5", "threshold_db": "16", "band_ghz": "1, 11"},
    "objective": {
        "kind": "gain",
        "frequency_ghz": "5",
        "threshold_db": "16",
        "band_ghz": "1, 11",
        "pareto": "",
        "target_cc_ff": "20",
        "target_cr_pf": "11",
    },
    "output": {"directory": "twpa_out", "formats": "csv, svg"},
}

METRIC_NAMES = ("gain", "squeeze", "bandwidth_gain", "bandwidth_squeeze")
OBJECTIVE_NAMES = METRIC_NAMES + ("quadratic",)
FORMATS = ("csv", "svg")


@dataclass(frozen=True)
class RunConfig:
    device: DeviceParams
    pump: PumpConfig
    resonance_frequency: float  # Hz
    design: tuple[float, float] | None  # (C_c, C_r) in F
    search: SearchSpace | None
    loss: LossModel
    eta_values: tuple[float, ...]
    grid: FrequencyGrid
    metrics: tuple[Metric, ...]
    objective: str
    pareto: str
    quadratic_target: tuple[float, float]  # (C_c, C_r) in F
    output_dir: str
    formats: tuple[str, ...]
    resolved: dict

    def echo(self) -> list[str]:
        """Fully resolved configuration as INI lines."""
        lines = []
        for section, values in self.resolved.items():
            lines.append(f"[{section}]")
            lines.extend(f"{key} = {value}" for key, value in values.items())
        return lines


def _float(section, key, raw, *, positive=True, allow_zero=False):
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"[{section}] {key}: must be finite")
    if positive and not (value > 0 or (allow_zero and value == 0)):
        raise ConfigError(f"[{section}] {key}: must be {'>= 0' if allow_zero else 'positive'}, got {raw!r}")
    return value


def _int(section, key, raw):
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected an integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"[{section}] {key}: must be >= 1")
    return value


def _list(raw):
    return [item.strip() for item in raw.split(",") if item.strip()]


def _band(section, key, raw):
    parts = _list(raw)
    if len(parts) != 2:
        raise ConfigError(f"[{section}] {key}: expected 'low, high' in GHz")
    lo, hi = (_float(section, key, p) * 1e9 for p in parts)
    if not lo < hi:
        raise ConfigError(f"[{section}] {key}: low must be below high")
    return lo, hi


def _metric(name, values, section="metrics") -> Metric:
    if name in ("gain", "squeeze"):
        return Metric(name, frequency=_float(section, "frequency_ghz", values["frequency_ghz"]) * 1e9)
    return Metric(
        "bandwidth",
        threshold_db=_float(section, "threshold_db", values["threshold_db"], positive=False),
        band=_band(section, "band_ghz", values["band_ghz"]),
        quantity=name.split("_", 1)[1],
    )


def objective_from_name(name: str, values: dict, loss: LossModel) -> Objective:
    metric = _metric(name, values, "objective")
    kind = {"gain": "gain_at_frequency", "squeeze": "abs_squeezing_at_frequency"}.get(
        metric.kind, "bandwidth_above_threshold"
    )
    return Objective(kind, metric.frequency, metric.threshold_db, metric.band, metric.quantity, loss)


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None

    sections = parser.sections()
    for section in sections:
        if section not in DEFAULTS:
            raise ConfigError(f"{source}: unknown section [{section}]")
        for key in parser[section]:
            if key not in DEFAULTS[section]:
                raise ConfigError(f"{source}: [{section}] unknown key {key!r}")

    has_res, has_search = "resonator" in sections, "search" in sections
    if has_res == has_search:
        raise ConfigError(f"{source}: exactly one of [resonator] or [search] must be present")

    resolved = {}
    for section, defaults in DEFAULTS.items():
        if section in ("resonator", "search") and section not in sections:
            continue
        merged = dict(defaults)
        if section in sections:
            merged.update({k: v.strip() for k, v in parser[section].items()})
        resolved[section] = merged

    try:
        return _build(resolved, has_res)
    except ConfigError:
        raise
    except TwpaError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def _build(r: dict, has_res: bool) -> RunConfig:
    d, p = r["device"], r["pump"]
    n_cells = _int("device", "n_cells", d["n_cells"])
    device = DeviceParams(
        critical_current=_float("device", "ic_ua", d["ic_ua"]) * 1e-6,
        junction_capacitance=_float("device", "cj_ff", d["cj_ff"]) * 1e-15,
        n_cells=n_cells,
        line_impedance=_float("device", "z0_ohm", d["z0_ohm"]),
    )
    ip = _float("pump", "ip_ua", p["ip_ua"], allow_zero=True) * 1e-6
    if ip >= device.critical_current:
        raise ConfigError("[pump] ip_ua: pump current must be below the critical current")
    pump = PumpConfig(ip, _float("pump", "fp_ghz", p["fp_ghz"]) * 1e9, device.critical_current)

    design = search = None
    if has_res:
        s = r["resonator"]
        f_r = _float("resonator", "fr_ghz", s["fr_ghz"]) * 1e9
        design = (
            _float("resonator", "cc_ff", s["cc_ff"], allow_zero=True) * 1e-15,
            _float("resonator", "cr_pf", s["cr_pf"], allow_zero=True) * 1e-12,
        )
    else:
        s = r["search"]
        f_r = _float("search", "fr_ghz", s["fr_ghz"]) * 1e9
        cc = (_float("search", "cc_min_ff", s["cc_min_ff"]) * 1e-15, _float("search", "cc_max_ff", s["cc_max_ff"]) * 1e-15)
        cr = (_float("search", "cr_min_pf", s["cr_min_pf"]) * 1e-12, _float("search", "cr_max_pf", s["cr_max_pf"]) * 1e-12)
        if cc[0] > cc[1] or cr[0] > cr[1]:
            raise ConfigError("[search] minimum exceeds maximum")
        # the C_eff bound is checked by the commands, where it maps to exit code 3/4
        search = SearchSpace(cc, cr, (_int("search", "n_cc", s["n_cc"]), _int("search", "n_cr", s["n_cr"])))

    lo = r["loss"]
    eta = _float("loss", "eta", lo["eta"], allow_zero=True)
    eta_values = tuple(_float("loss", "eta_values", v, allow_zero=True) for v in _list(lo["eta_values"]))
    for value in (eta,) + eta_values:
        if value > 1:
            raise ConfigError(f"[loss] eta must lie in [0, 1], got {value!r}")

    g = r["grid"]
    grid = FrequencyGrid(
        start=_float("grid", "f_start_ghz", g["f_start_ghz"]) * 1e9,
        stop=_float("grid", "f_stop_ghz", g["f_stop_ghz"]) * 1e9,
        n_points=_int("grid", "points", g["points"]),
        exclusion_margin=_float("grid", "exclusion_mhz", g["exclusion_mhz"], allow_zero=True) * 1e6,
    )
    if grid.n_points < 2 or not grid.start < grid.stop:
        raise ConfigError("[grid] needs f_start_ghz < f_stop_ghz and at least 2 points")

    m = r["metrics"]
    names = _list(m["names"])
    if not names:
        raise ConfigError("[metrics] names: at least one metric is required")
    for name in names:
        if name not in METRIC_NAMES:
            raise ConfigError(f"[metrics] names: unknown metric {name!r}; choose from {', '.join(METRIC_NAMES)}")
    metrics = tuple(_metric(name, m) for name in names)

    o = r["objective"]
    if o["kind"] not in OBJECTIVE_NAMES:
        raise ConfigError(f"[objective] kind: unknown objective {o['kind']!r}")
    if o["pareto"] and o["pareto"] not in OBJECTIVE_NAMES:
        raise ConfigError(f"[objective] pareto: unknown objective {o['pareto']!r}")
    for name in (o["kind"], o["pareto"]):
        if name in METRIC_NAMES:
            _metric(name, o, "objective")
    target = (
        _float("objective", "target_cc_ff", o["target_cc_ff"]) * 1e-15,
        _float("objective", "target_cr_pf", o["target_cr_pf"]) * 1e-12,
    )

    out = r["output"]
    formats = tuple(_list(out["formats"]))
    for fmt in formats:
        if fmt not in FORMATS:
            raise ConfigError(f"[output] formats: unknown format {fmt!r}")

    return RunConfig(
        device=device,
        pump=pump,
        resonance_frequency=f_r,
        design=design,
        search=search,
        loss=LossModel(eta),
        eta_values=eta_values,
        grid=grid,
        metrics=metrics,
        objective=o["kind"],
        pareto=o["pareto"],
        quadratic_target=target,
        output_dir=out["directory"],
        formats=formats,
        resolved=r,
    )


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, source=str(path))
