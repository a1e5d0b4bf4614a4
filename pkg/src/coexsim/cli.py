"""``coexsim`` command-line interface.

Exit codes: 0 success, 2 invalid input, 3 numeric failure, 4 an acceptance
property embedded in the ``all`` report failed.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import __version__, harness
from .errors import InvalidInputError, NumericError
from .scenario import PRESET_NAMES, U64_MAX

EXIT_INVALID = 2
EXIT_NUMERIC = 3
EXIT_ACCEPTANCE = 4

_NORMALIZE = {"fixed": "fixed_K", "peak": "peak"}


def _scenario_options(f):
    f = click.option("--normalize", type=click.Choice(sorted(_NORMALIZE)), default=None,
                     help="Beampattern scaling: fixed K = 1/M^2 or peak over the grid.")(f)
    f = click.option("--seed", type=click.IntRange(0, U64_MAX), default=None,
                     help="Monte Carlo seed (overrides the scenario).")(f)
    f = click.option("--out", "out_dir", type=click.Path(file_okay=False), default="out",
                     show_default=True, help="Output directory.")(f)
    f = click.option("--scenario", "scenario_file", type=click.Path(dir_okay=False), default=None,
                     help="TOML scenario file; its keys override the preset.")(f)
    f = click.option("--preset", type=click.Choice(PRESET_NAMES), default=None,
                     help="Built-in scenario (default fig1a when no file is given).")(f)
    return f


def _run(fn):
    """Invoke ``fn`` mapping package errors onto exit codes."""
    try:
        return fn()
    except InvalidInputError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    except NumericError as exc:
        click.echo(f"numeric failure: {exc}", err=True)
        sys.exit(EXIT_NUMERIC)


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Radar/cellular coexistence simulator: nulling, beampatterns and detection."""


@main.command()
@_scenario_options
@click.option("--method", type=click.Choice(harness.METHODS), default="eigen", show_default=True)
def beampattern(preset, scenario_file, out_dir, seed, normalize, method):
    """Write the composite beampattern of one nulling method."""
    def go():
        s = harness.resolve_scenario(preset, scenario_file, seed, _NORMALIZE.get(normalize))
        result = harness.run_beampattern(s, method, out_dir)
        path = Path(out_dir) / f"beampattern_{method}.csv"
        if not result.defined:
            raise NumericError(f"steering direction fully nulled; {path} holds nan gaps")
        click.echo(f"wrote {path}")

    _run(go)


@main.command()
@_scenario_options
@click.option("--method", type=click.Choice(harness.METHODS), default="eigen", show_default=True)
@click.option("--sweep", "sweep_mode", type=click.Choice(harness.SWEEPS), default="angle", show_default=True,
              help="Abscissa: look angle at the scenario SNR, or SNR at the target angle.")
@click.option("--mc-trials", type=click.IntRange(0), default=0, show_default=True,
              help="Monte Carlo trials per point (0 leaves the pd_mc column as nan).")
@click.option("--workers", type=click.IntRange(1), default=1, show_default=True,
              help="Threads for Monte Carlo; results do not depend on it.")
def detection(preset, scenario_file, out_dir, seed, normalize, method, sweep_mode, mc_trials, workers):
    """Write the probability-of-detection curve of one nulling method."""
    def go():
        s = harness.resolve_scenario(preset, scenario_file, seed, _NORMALIZE.get(normalize))
        harness.run_detection(s, method, out_dir, sweep_mode, mc_trials, workers)
        click.echo(f"wrote {Path(out_dir) / f'detection_{method}_{sweep_mode}.csv'}")

    _run(go)


@main.command(name="all")
@_scenario_options
@click.option("--mc-trials", type=click.IntRange(0), default=0, show_default=True,
              help="Monte Carlo trials per point (0 leaves the pd_mc column as nan).")
@click.option("--workers", type=click.IntRange(1), default=1, show_default=True)
def run_all(preset, scenario_file, out_dir, seed, normalize, mc_trials, workers):
    """Run every experiment and method and write report.json."""
    def go():
        s = harness.resolve_scenario(preset, scenario_file, seed, _NORMALIZE.get(normalize))
        return harness.run_all(s, out_dir, mc_trials, workers)

    report = _run(go)
    for name, passed in report.properties:
        click.echo(f"{'PASS' if passed else 'FAIL'}  {name}")
    for err in report.errors:
        click.echo(f"error: {err}", err=True)
    click.echo(f"wrote {len(report.output_paths)} files to {out_dir}")
    if not report.ok:
        sys.exit(EXIT_ACCEPTANCE)


if __name__ == "__main__":  # pragma: no cover
    main()
