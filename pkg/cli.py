"""Toric syzygy weights and cap-centroid regions - command line tool"""
import logging
import sys
from fractions import Fraction

import click
from rich.console import Console
from rich.table import Table

from src.config import (
    DEFAULT_BLOCK_LIMIT,
    DEFAULT_DIRECTIONS,
    DEFAULT_GRID,
    DEFAULT_LOG_LEVEL,
    DEFAULT_PRIME,
    DEFAULT_SEED,
    DEFAULT_TOL,
    DEFAULT_WORKERS,
    build_run_config,
)
from src.errors import (
    BlockLimitError,
    ConfigError,
    PointOutsideError,
    PolytopeFormatError,
    ToricSyzygyError,
    WedgeLimitError,
)
from src.pipeline import ToricRunner
from src.utils import format_float, format_rational

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_LIMIT = 3


def setup_logging(level: str, log_file=None):
    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def common_options(func):
    """Flags every command accepts"""
    options = [
        click.option('--polytope', required=True, help='Builtin name (segment, square, simplex2, simplex3) or file'),
        click.option('--out', default=None, help='CSV output path'),
        click.option('--svg', default=None, help='SVG output path (planar polytopes)'),
        click.option('--exact', is_flag=True, help='Exact rational ranks instead of the prime field'),
        click.option('--cross-check', is_flag=True, help='Run both rank modes and compare'),
        click.option('--prime', default=DEFAULT_PRIME, show_default=True, type=int),
        click.option('--block-limit', default=DEFAULT_BLOCK_LIMIT, show_default=True, type=int),
        click.option('--seed', default=DEFAULT_SEED, show_default=True, type=int),
        click.option('--workers', default=DEFAULT_WORKERS, show_default=True, type=int),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _parse_point(value):
    if value is None:
        return None
    return tuple(part.strip() for part in value.split(',') if part.strip())


def _console() -> Console:
    return Console(highlight=False, soft_wrap=True)


def _execute(command: str, **values):
    """Validate, run and map failures onto exit codes"""
    try:
        config = build_run_config(command=command, **values)
        return ToricRunner(config).run()
    except (ConfigError, PolytopeFormatError, PointOutsideError) as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(EXIT_CONFIG)
    except (BlockLimitError, WedgeLimitError) as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(EXIT_LIMIT)
    except ToricSyzygyError as e:
        logger.error(f"{command} failed: {e}")
        click.echo(f"Error: {e}", err=True)
        sys.exit(EXIT_FAILURE)


def _report_files(console: Console, results):
    for key in ('csv_path', 'slack_csv_path', 'svg_path'):
        if key in results:
            console.print(f"Wrote {results[key]}")


@click.group()
@click.option('--verbose', '-v', is_flag=True, help='INFO level logging')
@click.option('--log-level', default=None, help=f'Logging level (default {DEFAULT_LOG_LEVEL})')
@click.option('--log-file', default=None, help='Also log to this file')
def cli(verbose, log_level, log_file):
    """Torus weights of toric syzygies, cap-centroid regions and tau."""
    level = log_level or ('INFO' if verbose else DEFAULT_LOG_LEVEL)
    setup_logging(level, log_file)


@cli.command()
@common_options
@click.option('--d', default=1, show_default=True, type=int, help='Dilation of the polytope')
@click.option('--q', default=1, show_default=True, type=int)
@click.option('--p-min', default=1, show_default=True, type=int)
@click.option('--p-max', default=None, type=int, help='Defaults to r_d')
@click.option('--p-cap', default=None, type=int, help='Hard ceiling on p, recorded in the header')
@click.option('--window-a', default=None, type=float, help='Lower end of a p / r_d window')
@click.option('--window-b', default=None, type=float, help='Upper end of a p / r_d window')
@click.option('--directions', default=DEFAULT_DIRECTIONS, show_default=True, type=int)
@click.option('--tol', default=DEFAULT_TOL, show_default=True, type=float)
def syzygy(**values):
    """Weight clouds of K_{p,q} for a range of p."""
    results = _execute('syzygy', **values)
    console = _console()
    if 'window' in results:
        window = results['window']
        report = results['region_report']
        console.print(f"{len(window)} normalized weights from p in "
                      f"{sorted({p for p, _ in window.sources})}, r_d = {results['r_d']}")
        console.print(f"{report.inside}/{report.total} lie in Delta({report.a})")
    else:
        table = Table(title=f"K_p,{values['q']} at d = {values['d']} (r_d = {results['r_d']})")
        table.add_column('p', justify='right')
        table.add_column('weights', justify='right')
        table.add_column('dim', justify='right')
        for cloud in results['clouds']:
            table.add_row(str(cloud.p), str(len(cloud)), str(cloud.total()))
        console.print(table)
        if not values['out']:
            for cloud in results['clouds']:
                for weight, mult in cloud.entries.items():
                    normal = ', '.join(format_rational(Fraction(c, cloud.divisor)) for c in weight) \
                        if cloud.divisor else '-'
                    console.print(f"p={cloud.p} weight={weight} normalized=({normal}) multiplicity={mult}")
    _report_files(console, results)


@cli.command()
@common_options
@click.option('--d', default=1, show_default=True, type=int)
@click.option('--q', default=1, show_default=True, type=int, help='Rows q = 0..Q')
@click.option('--p-min', default=0, show_default=True, type=int)
@click.option('--p-max', default=None, type=int, help='Defaults to r_d')
def betti(**values):
    """Betti table dim K_{p,q}."""
    results = _execute('betti', **values)
    console = _console()
    table_data = results['table']
    p_values = sorted({p for p, _ in table_data})
    table = Table(title=f"Betti table, d = {values['d']} (r_d = {results['r_d']})")
    table.add_column('q \\ p')
    for p in p_values:
        table.add_column(str(p), justify='right')
    for q in sorted({q for _, q in table_data}):
        table.add_row(str(q), *(str(table_data[(p, q)]) for p in p_values))
    console.print(table)
    _report_files(console, results)


@cli.command()
@common_options
@click.option('--a', default=0.1, show_default=True, type=float, help='Volume fraction')
@click.option('--directions', default=DEFAULT_DIRECTIONS, show_default=True, type=int)
@click.option('--tol', default=DEFAULT_TOL, show_default=True, type=float)
def region(**values):
    """Boundary of Delta(a) from cap centroids."""
    results = _execute('region', **values)
    console = _console()
    boundary = results['boundary']
    distinct = len(set(boundary.points()))
    console.print(f"Delta({values['a']}): {len(boundary.samples)} samples, {distinct} distinct points")
    if distinct == 1:
        console.print('point: ' + ', '.join(format_float(float(c)) for c in boundary.points()[0]))
    _report_files(console, results)


@cli.command()
@common_options
@click.option('--x', 'x', required=True, help='Comma separated coordinates')
@click.option('--directions', default=DEFAULT_DIRECTIONS, show_default=True, type=int)
@click.option('--grid', default=DEFAULT_GRID, show_default=True, type=int)
@click.option('--tol', default=DEFAULT_TOL, show_default=True, type=float)
def tau(x, **values):
    """tau_x / vol(Delta) by direction sweep and by grid LP."""
    results = _execute('tau', x=_parse_point(x), **values)
    console = _console()
    table = Table(title=f"tau at ({x})")
    table.add_column('method')
    table.add_column('tau / vol', justify='right')
    table.add_column('error bound', justify='right')
    table.add_column('flags')
    for estimate in results['estimates']:
        table.add_row(estimate.method, format_float(estimate.tau_over_vol, 6),
                      format_float(estimate.error_bound, 6), ','.join(estimate.flags))
    console.print(table)
    _report_files(console, results)


@cli.command()
@common_options
@click.option('--q', default=1, show_default=True, type=int)
@click.option('--d-max', default=2, show_default=True, type=int)
@click.option('--samples', default=100, show_default=True, type=int)
@click.option('--p-cap', default=None, type=int, help='Hard ceiling on p, recorded in the header')
@click.option('--upper-bound', is_flag=True, help='Also report tau slack of every weight')
@click.option('--directions', default=180, show_default=True, type=int, help='Directions for the slack taus')
def density(**values):
    """Empirical covering radius of the normalized weights."""
    results = _execute('density', **values)
    console = _console()
    report = results['report']
    console.print(f"{len(report.samples)} samples, {report.weight_count} weights, "
                  f"covering radius {format_float(report.covering_radius, 6)}")
    for restriction in report.restrictions:
        console.print(f"restricted: {restriction}")
    if 'upper_bound' in results:
        for level, fraction in sorted(results['upper_bound'].fractions.items()):
            console.print(f"slack >= -{level}: {format_float(fraction, 4)}")
    _report_files(console, results)


@cli.command()
@common_options
@click.option('--x', 'x', required=True, help='Comma separated centre of mass')
@click.option('--target', required=True, type=float, help='Volume of the cube union')
@click.option('--grid', default=DEFAULT_GRID, show_default=True, type=int)
def shapes(x, **values):
    """Cube union inside Delta with a prescribed centre of mass."""
    results = _execute('shapes', x=_parse_point(x), **values)
    console = _console()
    shape = results['shape']
    console.print(f"{len(shape.cubes)} cubes, volume {format_rational(shape.total_volume)} "
                  f"({format_float(float(shape.total_volume), 6)})")
    console.print('centre of mass: ' + ', '.join(format_rational(c) for c in shape.center_of_mass))
    _report_files(console, results)


if __name__ == '__main__':
    cli()
