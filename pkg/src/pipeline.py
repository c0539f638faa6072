"""Command runner: resolves a RunConfig into computations, tables and figures"""
import logging
from fractions import Fraction
from pathlib import Path
from typing import Dict, List

from . import reports
from .asymptotics import density_report, upper_bound_check, window_region_report
from .cap_body import region_boundary, shape_for, tau_direction_sweep, tau_grid_lp
from .config import RunConfig
from .errors import ConfigError, GeometryError, PointOutsideError
from .exact_geometry import as_point, contains, lattice_count_vs_volume
from .koszul_syzygy import betti_table, engine_for, window_cloud
from .polytope_io import load_polytope
from .utils import format_float, write_file

logger = logging.getLogger(__name__)


def slack_table_path(out: str) -> Path:
    """Per-weight slack table written next to the density table"""
    path = Path(out)
    return path.with_name(f"{path.stem}_slack{path.suffix or '.csv'}")


class ToricRunner:
    """Runs one command end to end and returns a plain result dict"""

    def __init__(self, config: RunConfig):
        self.config = config
        self.delta = load_polytope(config.polytope)
        self.settings = config.engine_settings()

    def run(self) -> Dict:
        logger.info(f"Running {self.config.command} on {self.config.polytope}")
        handler = getattr(self, f"_{self.config.command}")
        results = handler()
        results['command'] = self.config.command
        self._write(results)
        return results

    # helpers

    def _point(self):
        if not self.config.x:
            raise ConfigError(f"{self.config.command} needs --x")
        try:
            x = as_point(self.config.x)
        except GeometryError as e:
            raise ConfigError(f"bad --x: {e}")
        if len(x) != self.delta.dim:
            raise ConfigError(f"--x has {len(x)} coordinates, polytope is {self.delta.dim}-dimensional")
        if not contains(self.delta, x):
            raise PointOutsideError(f"point {','.join(self.config.x)} lies outside {self.config.polytope}")
        return x

    def _lattice_header(self, d: int) -> Dict:
        count, proxy = lattice_count_vs_volume(self.delta, d)
        return {'r_d': count - 1, 'volume_proxy': format_float(float(proxy))}

    def _write(self, results: Dict):
        if self.config.out:
            write_file(Path(self.config.out), results['csv'])
            results['csv_path'] = self.config.out
            if results.get('slack_csv'):
                slack_path = slack_table_path(self.config.out)
                write_file(slack_path, results['slack_csv'])
                results['slack_csv_path'] = str(slack_path)
        if self.config.svg:
            if results.get('svg'):
                write_file(Path(self.config.svg), results['svg'])
                results['svg_path'] = self.config.svg
            else:
                logger.warning("no SVG for this run (planar polytopes only)")

    # commands

    def _syzygy(self) -> Dict:
        cfg = self.config
        engine = engine_for(self.delta, cfg.d, self.settings)
        extra = self._lattice_header(cfg.d)
        if cfg.window_a is not None:
            return self._window(engine.r_d, extra)
        p_max = cfg.p_max if cfg.p_max is not None else engine.r_d
        if cfg.p_cap is not None and p_max > cfg.p_cap:
            extra['restriction'] = f"p <= {cfg.p_cap} of r_d = {engine.r_d}"
            logger.warning(f"restricting p to <= {cfg.p_cap}")
            p_max = cfg.p_cap
        clouds = [engine.kpq_weights(p, cfg.q, cfg.rank_mode) for p in range(cfg.p_min, p_max + 1)]
        totals = {cloud.p: cloud.total() for cloud in clouds}
        points = [point for cloud in clouds for point, _ in cloud.normalized()]
        title = f"Normalized weights of K_p,{cfg.q} for {self.delta.name or 'polytope'}, d = {cfg.d}"
        return {
            'clouds': clouds,
            'totals': totals,
            'r_d': engine.r_d,
            'csv': reports.syzygy_csv(cfg.header(extra), clouds, self.delta.dim),
            'svg': reports.scatter_svg(self.delta, set(points), title),
        }

    def _window(self, r_d: int, extra: Dict) -> Dict:
        cfg = self.config
        cloud = window_cloud(self.delta, cfg.d, cfg.q, cfg.window_a, cfg.window_b, cfg.rank_mode,
                             self.settings, cfg.p_cap)
        if cfg.p_cap is not None:
            extra['restriction'] = f"p <= {cfg.p_cap} of r_d = {r_d}"
        region = window_region_report(self.delta, cloud, cfg.window_a, cfg.directions, cfg.tol)
        extra['window_in_region'] = f"{region.inside}/{region.total}"
        title = f"Window ({cfg.window_a}, {cfg.window_b}) for {self.delta.name or 'polytope'}, d = {cfg.d}"
        return {
            'window': cloud,
            'region_report': region,
            'r_d': r_d,
            'csv': reports.window_csv(cfg.header(extra), cloud),
            'svg': reports.scatter_svg(self.delta, cloud.points, title),
        }

    def _betti(self) -> Dict:
        cfg = self.config
        engine = engine_for(self.delta, cfg.d, self.settings)
        p_max = cfg.p_max if cfg.p_max is not None else engine.r_d
        q_values = range(0, cfg.q + 1)
        table = betti_table(self.delta, cfg.d, range(cfg.p_min, p_max + 1), q_values, cfg.rank_mode, self.settings)
        return {
            'table': table,
            'r_d': engine.r_d,
            'csv': reports.betti_csv(cfg.header(self._lattice_header(cfg.d)), cfg.d, table),
        }

    def _region(self) -> Dict:
        cfg = self.config
        boundary = region_boundary(self.delta, Fraction(str(cfg.a)), cfg.directions, cfg.tol, cfg.workers)
        title = f"Delta({cfg.a}) for {self.delta.name or 'polytope'}"
        return {
            'boundary': boundary,
            'csv': reports.region_csv(cfg.header(), boundary, self.delta.dim),
            'svg': reports.region_svg(self.delta, boundary, title),
        }

    def _tau(self) -> Dict:
        cfg = self.config
        x = self._point()
        estimates = [tau_direction_sweep(self.delta, x, cfg.directions, cfg.tol, cfg.workers),
                     tau_grid_lp(self.delta, x, cfg.grid)]
        return {
            'estimates': estimates,
            'csv': reports.tau_csv(cfg.header(), estimates),
        }

    def _density(self) -> Dict:
        cfg = self.config
        report = density_report(self.delta, cfg.q, cfg.d_max, cfg.samples, cfg.seed, self.settings,
                                cfg.p_cap, cfg.rank_mode)
        extra = {'covering_radius': format_float(report.covering_radius), 'weights': report.weight_count}
        for i, restriction in enumerate(report.restrictions):
            extra[f"restriction_{i}"] = restriction
        results = {'report': report}
        if cfg.upper_bound:
            clouds = self._clouds_up_to(cfg.d_max)
            slack = upper_bound_check(self.delta, clouds, cfg.directions, cfg.tol, workers=cfg.workers)
            for level, fraction in sorted(slack.fractions.items()):
                extra[f"slack_fraction_{level}"] = format_float(fraction, 6)
            results['upper_bound'] = slack
            results['slack_csv'] = reports.slack_csv(cfg.header(extra), slack, self.delta.dim)
        results['csv'] = reports.density_csv(cfg.header(extra), report, self.delta.dim)
        title = f"Normalized weights of K_p,{cfg.q} for {self.delta.name or 'polytope'}, d <= {cfg.d_max}"
        results['svg'] = reports.scatter_svg(self.delta, report.weights, title)
        return results

    def _clouds_up_to(self, d_max: int) -> List:
        clouds = []
        for d in range(1, d_max + 1):
            engine = engine_for(self.delta, d, self.settings)
            top = engine.r_d if self.config.p_cap is None else min(engine.r_d, self.config.p_cap)
            clouds.extend(engine.kpq_weights(p, self.config.q, self.config.rank_mode) for p in range(1, top + 1))
        return clouds

    def _shapes(self) -> Dict:
        cfg = self.config
        x = self._point()
        if cfg.target is None:
            raise ConfigError("shapes needs --target")
        shape = shape_for(self.delta, x, Fraction(str(cfg.target)), cfg.grid)
        extra = {'center_of_mass': ','.join(format_float(float(c)) for c in shape.center_of_mass),
                 'total_volume': format_float(float(shape.total_volume))}
        return {
            'shape': shape,
            'csv': reports.shape_csv(cfg.header(extra), shape),
            'svg': reports.shape_svg(self.delta, shape, f"Cube union around {','.join(cfg.x)}"),
        }


def run_command(config: RunConfig) -> Dict:
    return ToricRunner(config).run()
