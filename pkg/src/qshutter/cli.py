"""Command-line driver: ``qshutter {poles,density,diagnose,verify}``."""

import argparse
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .barrier import CompletenessError, PoleSearchError, PoleTable, find_poles
from .config import ConfigError, load_config
from .diagnostics import (IntegrationError, NoInteriorPeakError, UndefinedFrequencyError,
                          density_series, diagnose, find_peak)
from .faddeeva import FaddeevaOverflowError
from .propagator import IllConditionedTermError, TransmittedWave
from .verification import run_checks

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

_NUMERIC_ERRORS = (FaddeevaOverflowError, PoleSearchError, CompletenessError,
                   IntegrationError, NoInteriorPeakError, UndefinedFrequencyError,
                   IllConditionedTermError, FloatingPointError)


class NumericError(RuntimeError):
    pass


def _note(msg):
    print(f"qshutter: {msg}", file=sys.stderr)


def _header_matches(table, cfg):
    return (table.params == cfg.barrier
            and table.count_per_quadrant == cfg.count_per_quadrant)


def obtain_poles(cfg, cache=None):
    """Load the pole table from ``cache`` if its header matches, else compute
    (and write the cache when a path is given)."""
    if cache and os.path.exists(cache):
        with open(cache) as fh:
            try:
                table = PoleTable.from_json(fh.read())
            except (ValueError, KeyError) as exc:
                _note(f"ignoring unreadable pole cache {cache}: {exc}")
                table = None
        if table is not None and _header_matches(table, cfg):
            _note(f"cache hit: {cache}")
            return table
        _note(f"pole cache {cache} does not match config; recomputing")
    table = find_poles(cfg.barrier, cfg.count_per_quadrant)
    if cache:
        with open(cache, "w") as fh:
            fh.write(table.to_json())
    return table


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _fmt(x):
    return format(float(x), ".11e")


def density_csv(series):
    buf = io.StringIO()
    buf.write("t_fs,t_over_tf,psi_re,psi_im,density\n")
    for t, s, p, dens in zip(series.times, series.t_over_tf, series.psi, series.density):
        buf.write(",".join(_fmt(v) for v in (t, s, p.real, p.imag, dens)) + "\n")
    return buf.getvalue()


def density_json(series):
    rows = [{"t_fs": float(t), "t_over_tf": float(s), "psi_re": float(p.real),
             "psi_im": float(p.imag), "density": float(d)}
            for t, s, p, d in zip(series.times, series.t_over_tf, series.psi, series.density)]
    return json.dumps({"mode": series.mode, "x_nm": series.x, "rows": rows}, indent=1) + "\n"


def _wave(cfg, args):
    table = obtain_poles(cfg, args.poles_cache)
    return TransmittedWave(cfg.barrier, cfg.packet, table)


def _evaluate(wave, grid, x):
    with np.errstate(over="raise", invalid="raise"):
        series = density_series(wave, grid, x)
    bad = ~np.isfinite(series.psi)
    if bad.any():
        raise NumericError(f"non-finite wave function at t = {grid[bad][0]:.6g} fs")
    return series


def cmd_poles(cfg, args):
    table = obtain_poles(cfg, args.poles_cache)
    _emit(table.to_json(), args.output or cfg.output_path)
    return EXIT_OK


def cmd_density(cfg, args):
    wave = _wave(cfg, args)
    grid = cfg.time_grid()
    series = _evaluate(wave, grid, cfg.x)
    fmt = args.format or cfg.output_format or "csv"
    _emit(density_csv(series) if fmt == "csv" else density_json(series),
          args.output or cfg.output_path)
    if args.plot:
        from .plotting import plot_density

        peak = None
        try:
            peak = find_peak(series, wave)
        except NoInteriorPeakError:
            pass
        asym = None
        if wave.mode == "cutoff":
            from .barrier import transmission_amplitude

            asym = abs(complex(transmission_amplitude(cfg.packet.k0, cfg.barrier))) ** 2
        plot_density(series, args.plot, peak=peak, asymptote=asym)
    return EXIT_OK


def cmd_diagnose(cfg, args):
    wave = _wave(cfg, args)
    report = diagnose(wave, cfg.time_grid(), cfg.x)
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.output or cfg.output_path)
    if args.plot:
        from .plotting import plot_density

        series = density_series(wave, cfg.time_grid(), cfg.x)
        peak = find_peak(series, wave)
        plot_density(series, args.plot, peak=peak, asymptote=report.get("asymptotic_density"))
    return EXIT_OK


def cmd_verify(cfg, args):
    table = obtain_poles(cfg, args.poles_cache)
    checks = run_checks(cfg, table, include_grid=not args.skip_grid)
    lines = [c.line() for c in checks]
    failed = [c for c in checks if not c.passed]
    lines.append(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    _emit("\n".join(lines) + "\n", args.output or cfg.output_path)
    return EXIT_OK if not failed else EXIT_VERIFY


def build_parser():
    ap = argparse.ArgumentParser(
        prog="qshutter",
        description="Transient tunneling through a rectangular barrier (quantum shutter).")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, formats=False, plot=False):
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--output", help="output file (default: stdout)")
        p.add_argument("--poles-cache", help="read/write the pole table here")
        if formats:
            p.add_argument("--format", choices=("csv", "json"))
        if plot:
            p.add_argument("--plot", metavar="PATH", help="also render a figure (png/pdf/svg)")
        return p

    common(sub.add_parser("poles", help="compute the pole/residue table"))
    common(sub.add_parser("density", help="scan |Psi(x,t)|^2 over time"), formats=True, plot=True)
    common(sub.add_parser("diagnose", help="resonance peak and frequency report"), plot=True)
    v = common(sub.add_parser("verify", help="run the oracle-equivalence suite"))
    v.add_argument("--skip-grid", action="store_true",
                   help="skip the Crank-Nicolson comparison")
    return ap


_COMMANDS = {"poles": cmd_poles, "density": cmd_density, "diagnose": cmd_diagnose,
             "verify": cmd_verify}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        _note(f"config error: {exc}")
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        _note(f"config error: {exc}")
        return EXIT_CONFIG
    except (NumericError, *_NUMERIC_ERRORS) as exc:
        _note(f"numeric error: {exc}")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
