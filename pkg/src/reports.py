"""CSV tables and SVG figures for clouds, regions, tau values and density runs"""
import csv
import io
import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .asymptotics import DensityReport, UpperBoundReport
from .cap_body import RegionBoundary, ShapeSpec, TauEstimate
from .exact_geometry import Point, Polytope
from .koszul_syzygy import NormalizedCloud, WeightCloud
from .utils import format_decimal, format_float, format_rational

logger = logging.getLogger(__name__)

SVG_SIZE = 400
SVG_MARGIN = 20


def _table(header: str, columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow(row)
    return header + buffer.getvalue()


def _axes(prefix: str, dim: int) -> List[str]:
    return [f"{prefix}_{i}" for i in range(1, dim + 1)]


def syzygy_csv(header: str, clouds: Sequence[WeightCloud], dim: int) -> str:
    """p,q,d,w_*,multiplicity,nw_* (exact) and nw_*_decimal"""
    columns = ['p', 'q', 'd'] + _axes('w', dim) + ['multiplicity'] + _axes('nw', dim) \
        + [f"{c}_decimal" for c in _axes('nw', dim)]
    rows = []
    for cloud in clouds:
        for weight, mult in cloud.entries.items():
            if cloud.divisor:
                normal = [format_rational(Fraction(c, cloud.divisor)) for c in weight]
                decimal = [format_decimal(Fraction(c, cloud.divisor)) for c in weight]
            else:
                normal = [''] * dim
                decimal = [''] * dim
            rows.append([cloud.p, cloud.q, cloud.d, *weight, mult, *normal, *decimal])
    return _table(header, columns, rows)


def window_csv(header: str, cloud: NormalizedCloud) -> str:
    columns = ['q'] + _axes('nw', cloud.dim) + [f"{c}_decimal" for c in _axes('nw', cloud.dim)] + ['multiplicity']
    rows = [[cloud.q, *(format_rational(c) for c in point), *(format_decimal(c) for c in point),
             cloud.points[point]] for point in cloud.sorted_points()]
    return _table(header, columns, rows)


def betti_csv(header: str, d: int, table: Dict[Tuple[int, int], int]) -> str:
    rows = [[p, q, d, dim] for (p, q), dim in sorted(table.items(), key=lambda kv: (kv[0][1], kv[0][0]))]
    return _table(header, ['p', 'q', 'd', 'dim'], rows)


def region_csv(header: str, boundary: RegionBoundary, dim: int) -> str:
    """theta (planar) or v components, then c_v and x_v"""
    lead = ['theta'] if dim == 2 else _axes('v', dim)
    rows = []
    for sample in boundary.samples:
        if dim == 2:
            head = [format_float(sample.direction.theta)]
        else:
            head = [format_float(c) for c in sample.direction.vector]
        level = format_decimal(sample.level) if sample.level is not None else ''
        rows.append(head + [level] + [format_decimal(c) for c in sample.point])
    return _table(header, lead + ['c_v'] + _axes('xv', dim), rows)


def tau_csv(header: str, estimates: Sequence[TauEstimate]) -> str:
    dim = len(estimates[0].x) if estimates else 0
    rows = [[e.method, *(format_decimal(c) for c in e.x), format_float(e.tau_over_vol), e.resolution,
             format_float(e.error_bound), ';'.join(e.flags)] for e in estimates]
    return _table(header, ['method'] + _axes('x', dim) + ['tau_over_vol', 'resolution', 'error_bound', 'flags'],
                  rows)


def density_csv(header: str, report: DensityReport, dim: int) -> str:
    rows = []
    for i, sample in enumerate(report.samples):
        nearest = [format_rational(c) for c in sample.nearest] if sample.nearest else [''] * dim
        rows.append([i, *(format_float(c) for c in sample.x), *nearest, format_float(sample.distance)])
    return _table(header, ['index'] + _axes('x', dim) + _axes('nearest', dim) + ['distance'], rows)


def shape_csv(header: str, shape: ShapeSpec) -> str:
    dim = len(shape.center_of_mass)
    rows = [[*(format_decimal(c) for c in cube.center), format_float(cube.side), format_rational(cube.volume)]
            for cube in shape.cubes]
    return _table(header, _axes('center', dim) + ['side', 'volume'], rows)


def slack_csv(header: str, report: UpperBoundReport, dim: int) -> str:
    rows = [[e.p, e.q, e.d, *(format_rational(c) for c in e.weight), format_float(e.tau_over_vol),
             format_float(e.slack)] for e in report.entries]
    return _table(header, ['p', 'q', 'd'] + _axes('nw', dim) + ['tau_over_vol', 'slack'], rows)


# SVG

class _Frame:
    """Maps the bounding box of Delta onto the drawing square, y up"""

    def __init__(self, delta: Polytope):
        lo, hi = delta.bounding_box()
        self.lo = [float(c) for c in lo]
        span = max(float(b - a) for a, b in zip(lo, hi)) or 1.0
        self.scale = (SVG_SIZE - 2 * SVG_MARGIN) / span

    def __call__(self, point: Sequence) -> Tuple[float, float]:
        x = SVG_MARGIN + (float(point[0]) - self.lo[0]) * self.scale
        y = SVG_SIZE - SVG_MARGIN - (float(point[1]) - self.lo[1]) * self.scale
        return round(x, 4), round(y, 4)


def _path(frame: _Frame, points: Sequence, closed: bool) -> str:
    coords = ' '.join(f"{x},{y}" for x, y in (frame(p) for p in points))
    tag = 'polygon' if closed else 'polyline'
    return f'<{tag} points="{coords}"'


def _svg(body: List[str], title: str) -> str:
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
             f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
             f'<title>{title}</title>',
             f'<rect width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white"/>']
    lines.extend(body)
    lines.append('</svg>')
    return '\n'.join(lines) + '\n'


def _require_planar(delta: Polytope):
    if delta.dim != 2:
        logger.warning(f"SVG output needs a planar polytope, got dimension {delta.dim}")
        return False
    return True


def scatter_svg(delta: Polytope, points: Iterable[Point], title: str) -> Optional[str]:
    """Normalized weights as dots inside the outline of Delta"""
    if not _require_planar(delta):
        return None
    frame = _Frame(delta)
    body = [_path(frame, delta.vertices, True) + ' fill="none" stroke="black" stroke-width="1.5"/>']
    for point in sorted(points):
        x, y = frame(point)
        body.append(f'<circle cx="{x}" cy="{y}" r="2" fill="#1f4e9c"/>')
    return _svg(body, title)


def region_svg(delta: Polytope, boundary: RegionBoundary, title: str) -> Optional[str]:
    """Delta with the sampled boundary of Delta(a) on top"""
    if not _require_planar(delta):
        return None
    frame = _Frame(delta)
    body = [_path(frame, delta.vertices, True) + ' fill="none" stroke="black" stroke-width="1.5"/>']
    points = boundary.points()
    if len(set(points)) == 1:
        x, y = frame(points[0])
        body.append(f'<circle cx="{x}" cy="{y}" r="3" fill="#b22222"/>')
    else:
        body.append(_path(frame, points, boundary.closed) + ' fill="none" stroke="#b22222" stroke-width="1"/>')
    return _svg(body, title)


def shape_svg(delta: Polytope, shape: ShapeSpec, title: str) -> Optional[str]:
    if not _require_planar(delta):
        return None
    frame = _Frame(delta)
    body = [_path(frame, delta.vertices, True) + ' fill="none" stroke="black" stroke-width="1.5"/>']
    for cube in shape.cubes:
        half = cube.side / 2
        cx, cy = (float(c) for c in cube.center)
        corners = [(cx - half, cy - half), (cx + half, cy - half), (cx + half, cy + half), (cx - half, cy + half)]
        body.append(_path(frame, corners, True) + ' fill="#8fbc8f" stroke="none"/>')
    x, y = frame(shape.center_of_mass)
    body.append(f'<circle cx="{x}" cy="{y}" r="3" fill="#b22222"/>')
    return _svg(body, title)
