"""``twpa`` command line: spectrum, sweep and optimize runs driven by an INI file."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .circuit import solve_constraints
from .config import RunConfig, load_config, objective_from_name
from .errors import (
    ConfigError,
    InvalidCell,
    NegativeCapacitance,
    NoFeasiblePoint,
    NonPositiveInput,
    ZeroDenominator,
)
from .optimize import SearchSpace, optimize, pareto_scan
from .sweep import loss_sweep, spectrum, sweep_1d, sweep_2d

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NO_FEASIBLE_POINT = 4


def fmt(x) -> str:
    """12 significant digits; NaN becomes an empty field."""
    x = float(x)
    if math.isnan(x):
        return ""
    return f"{x:.12g}"


def _json_number(x):
    x = float(x)
    return float(f"{x:.12g}") if math.isfinite(x) else None


def write_csv(path: Path, header: list[str], columns: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


class Run:
    """Shared state of one command invocation."""

    def __init__(self, command: str, config: RunConfig, out_dir: Path, formats, threads: int):
        self.command = command
        self.config = config
        self.out_dir = out_dir
        self.formats = formats
        self.threads = threads
        self.header = [f"twpa {command} (rpmtwpa {__version__})"] + config.echo()
        self.description = "\n".join(self.header)
        out_dir.mkdir(parents=True, exist_ok=True)

    def wants(self, fmt_name):
        return fmt_name in self.formats

    def csv(self, name, columns, rows):
        if self.wants("csv"):
            write_csv(self.out_dir / name, self.header, columns, rows)

    def svg(self, name, plot, *args, **kwargs):
        if self.wants("svg"):
            plot(*args, path=self.out_dir / name, description=self.description, **kwargs)


def _spectrum_rows(result):
    for i, f in enumerate(result.frequencies):
        flag = result.flags[i]
        values = (
            result.gain_db[i],
            result.lossy_gain_db[i],
            result.squeeze_min_db[i],
            result.squeeze_max_db[i],
            result.abs_squeeze_db[i],
        )
        yield [fmt(f)] + [fmt(v) for v in values] + [flag]


SPECTRUM_COLUMNS = [
    "frequency_hz",
    "gain_db",
    "lossy_gain_db",
    "squeeze_min_db",
    "squeeze_max_db",
    "abs_squeeze_db",
    "flag",
]


def run_spectrum(run: Run) -> int:
    from . import plotting

    cfg = run.config
    if cfg.design is None:
        raise ConfigError("spectrum needs a [resonator] section")
    res = solve_constraints(cfg.device, 2 * math.pi * cfg.resonance_frequency, *cfg.design)
    result = spectrum(cfg.device, res, cfg.pump, cfg.loss, cfg.grid)
    run.csv("spectrum.csv", SPECTRUM_COLUMNS, _spectrum_rows(result))
    run.svg("spectrum.svg", plotting.plot_spectrum, result)

    if cfg.eta_values:
        sweep = loss_sweep(cfg.device, res, cfg.pump, cfg.eta_values, cfg.grid)
        rows = (
            [fmt(eta)] + row
            for eta, r in zip(sweep.etas, sweep.spectra)
            for row in _spectrum_rows(r)
        )
        run.csv("loss_sweep.csv", ["eta"] + SPECTRUM_COLUMNS, rows)
        run.svg("loss_sweep.svg", plotting.plot_loss_sweep, sweep)
        if not (sweep.squeezing_monotone and sweep.gain_monotone):
            print("warning: loss sweep is not monotone in eta", file=sys.stderr)
    return EXIT_OK


def _value_label(metric):
    if metric.kind == "bandwidth":
        return f"Bandwidth of {metric.quantity} above {metric.threshold_db:g} dB (GHz)", 1e-9
    label = "Gain" if metric.kind == "gain" else "|Squeezing|"
    return f"{label} at {metric.frequency / 1e9:g} GHz (dB)", 1.0


def run_sweep(run: Run) -> int:
    from . import plotting

    cfg = run.config
    if cfg.search is None:
        raise ConfigError("sweep needs a [search] section")
    cc_values, cr_values = cfg.search.cc_values, cfg.search.cr_values
    for metric in cfg.metrics:
        grid2d = sweep_2d(
            cfg.device, cfg.pump, cfg.loss, cc_values, cr_values, metric,
            cfg.resonance_frequency, cfg.grid, run.threads,
        )
        rows = (
            [fmt(cc), fmt(cr), fmt(grid2d.field[i, j]), grid2d.flags[i, j]]
            for i, cr in enumerate(cr_values)
            for j, cc in enumerate(cc_values)
        )
        run.csv(f"sweep2d_{metric.name}.csv", ["cc_f", "cr_f", "value", "flag"], rows)
        label, scale = _value_label(metric)
        run.svg(f"sweep2d_{metric.name}.svg", plotting.plot_heatmap, grid2d, value_label=label, value_scale=scale)

    if len(cc_values) == 1 or len(cr_values) == 1:
        if len(cc_values) == 1:
            fixed, varied, axis, scale, label = ("cc", cc_values[0]), cr_values, "cr_f", 1e12, "C_r (pF)"
        else:
            fixed, varied, axis, scale, label = ("cr", cr_values[0]), cc_values, "cc_f", 1e15, "C_c (fF)"
        spectra = sweep_1d(
            cfg.device, cfg.pump, cfg.loss, fixed, varied, cfg.resonance_frequency, cfg.grid, run.threads
        )
        rows = ([fmt(x)] + row for x, s in zip(varied, spectra) for row in _spectrum_rows(s))
        run.csv("sweep1d_spectra.csv", [axis] + SPECTRUM_COLUMNS, rows)
        run.svg("sweep1d_spectra.svg", plotting.plot_spectral_map, spectra, varied * scale, label)
    return EXIT_OK


def _objective(cfg: RunConfig, name: str):
    if name == "quadratic":
        a, b = cfg.quadratic_target

        def quadratic(cc, cr):
            return -(((cc - a) * 1e15) ** 2 + ((cr - b) * 1e12) ** 2)

        return quadratic
    return objective_from_name(name, cfg.resolved["objective"], cfg.loss)


def run_optimize(run: Run) -> int:
    from . import plotting

    cfg = run.config
    if cfg.search is None:
        raise ConfigError("optimize needs a [search] section")
    c_eff = cfg.device.c_effective
    cc_lo, cc_hi = cfg.search.cc_bounds
    if cc_lo > c_eff:
        raise NoFeasiblePoint(f"every C_c in the search space exceeds C_eff = {c_eff:.6g} F")
    space = SearchSpace(
        (cc_lo, min(cc_hi, c_eff)), cfg.search.cr_bounds, cfg.search.coarse_grid, c_eff
    )
    objective = _objective(cfg, cfg.objective)
    report = optimize(
        cfg.device, cfg.pump, objective, space, cfg.resonance_frequency, cfg.grid, run.threads
    )
    cell = report.derived_cell
    payload = {
        "command": "optimize",
        "objective": cfg.objective,
        "best_point": {"cc_f": _json_number(report.best_point[0]), "cr_f": _json_number(report.best_point[1])},
        "best_value": _json_number(report.best_value),
        "best_coarse_value": _json_number(report.best_coarse_value),
        "derived_cell": None
        if cell is None
        else {
            "c_ground_f": _json_number(cell.c_ground),
            "c_coupling_f": _json_number(cell.c_coupling),
            "c_resonator_f": _json_number(cell.c_resonator),
            "l_resonator_h": _json_number(cell.l_resonator),
        },
        "n_evaluations": report.n_evaluations,
        "trace": [
            {"cc_f": _json_number(p[0]), "cr_f": _json_number(p[1]), "value": _json_number(v)}
            for p, v in report.trace
        ],
        "config": cfg.resolved,
    }
    with open(run.out_dir / "report.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")

    if cfg.pareto:
        front = pareto_scan(
            cfg.device, cfg.pump, (objective, _objective(cfg, cfg.pareto)), space,
            cfg.resonance_frequency, cfg.grid, run.threads,
        )
        names = [cfg.objective, cfg.pareto]
        rows = ([fmt(p.cc), fmt(p.cr), fmt(p.value1), fmt(p.value2)] for p in front)
        run.csv("front.csv", ["cc_f", "cr_f"] + names, rows)
        run.svg(
            "front.svg", plotting.plot_front,
            [p.cc for p in front], [p.cr for p in front],
            [p.value1 for p in front], [p.value2 for p in front], names,
        )
    return EXIT_OK


COMMANDS = {"spectrum": run_spectrum, "sweep": run_sweep, "optimize": run_optimize}


def _threads(arg) -> int:
    raw = arg if arg is not None else os.environ.get("TWPA_THREADS", "1")
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"threads must be an integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError("threads must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twpa", description=__doc__)
    parser.add_argument("--version", action="version", version=f"rpmtwpa {__version__}")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="INI run configuration")
    parser.add_argument("--out", help="output directory (overrides [output] directory)")
    parser.add_argument("--threads", help="worker threads (default: $TWPA_THREADS or 1)")
    parser.add_argument("--format", dest="formats", help="comma list of csv,svg (overrides [output] formats)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        threads = _threads(args.threads)
        formats = config.formats
        if args.formats is not None:
            formats = tuple(f.strip() for f in args.formats.split(",") if f.strip())
            bad = [f for f in formats if f not in ("csv", "svg")]
            if bad:
                raise ConfigError(f"--format: unknown format(s) {', '.join(bad)}")
        out_dir = Path(args.out if args.out is not None else config.output_dir)
        run = Run(args.command, config, out_dir, formats, threads)
        return COMMANDS[args.command](run)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidCell, NegativeCapacitance, ZeroDenominator, NonPositiveInput) as exc:
        print(f"infeasible cell: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NoFeasiblePoint as exc:
        print(f"no feasible point: {exc}", file=sys.stderr)
        return EXIT_NO_FEASIBLE_POINT


if __name__ == "__main__":
    sys.exit(main())
