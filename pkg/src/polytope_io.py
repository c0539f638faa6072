"""Polytope text format and the named builtin polytopes"""
import logging
from pathlib import Path
from typing import List

from .errors import GeometryError, PolytopeFormatError
from .exact_geometry import HalfSpace, Polytope, as_rational

logger = logging.getLogger(__name__)

BUILTINS = {
    'segment': [(0,), (1,)],
    'square': [(0, 0), (1, 0), (1, 1), (0, 1)],
    'simplex2': [(0, 0), (1, 0), (0, 1)],
    'simplex3': [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)],
}


def builtin(name: str) -> Polytope:
    """Named builtin polytope (segment, square, simplex2, simplex3)"""
    try:
        vertices = BUILTINS[name]
    except KeyError:
        raise PolytopeFormatError(f"unknown builtin polytope '{name}' (known: {', '.join(sorted(BUILTINS))})")
    return Polytope.from_vertices(vertices, name=name)


def parse_polytope(text: str, name: str = '') -> Polytope:
    """Parse `dim n`, `v a_1 .. a_n` and optional `h a_1 .. a_n b` lines.

    Blank lines and lines starting with '#' are skipped.
    """
    dim = None
    vertices: List[tuple] = []
    facets: List[HalfSpace] = []
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        parts = line.split()
        tag, values = parts[0], parts[1:]
        if tag == 'dim':
            if dim is not None or len(values) != 1:
                raise PolytopeFormatError("expected a single 'dim n' line", line_no)
            try:
                dim = int(values[0])
            except ValueError:
                raise PolytopeFormatError(f"bad dimension '{values[0]}'", line_no)
            if dim < 1:
                raise PolytopeFormatError(f"dimension must be positive, got {dim}", line_no)
            continue
        if dim is None:
            raise PolytopeFormatError("'dim n' must come first", line_no)
        try:
            numbers = [as_rational(v) for v in values]
        except GeometryError as e:
            raise PolytopeFormatError(str(e), line_no)
        if tag == 'v':
            if len(numbers) != dim:
                raise PolytopeFormatError(f"vertex needs {dim} coordinates, got {len(numbers)}", line_no)
            vertices.append(tuple(numbers))
        elif tag == 'h':
            if len(numbers) != dim + 1:
                raise PolytopeFormatError(f"facet needs {dim + 1} numbers, got {len(numbers)}", line_no)
            try:
                facets.append(HalfSpace(tuple(numbers[:-1]), numbers[-1]))
            except GeometryError as e:
                raise PolytopeFormatError(str(e), line_no)
        else:
            raise PolytopeFormatError(f"unknown line tag '{tag}'", line_no)
    if dim is None:
        raise PolytopeFormatError("missing 'dim n' line")
    if not vertices:
        if not facets:
            raise PolytopeFormatError("no vertices or facets given")
        return _full_dimensional(Polytope.from_halfspaces(dim, facets, name=name))
    try:
        polytope = Polytope.from_vertices(vertices, facets or None, name=name)
    except GeometryError as e:
        raise PolytopeFormatError(str(e))
    problems = polytope.validate()
    if problems:
        raise PolytopeFormatError("inconsistent description: " + '; '.join(problems[:3]))
    return _full_dimensional(polytope)


def _full_dimensional(polytope: Polytope) -> Polytope:
    if polytope.is_empty:
        raise PolytopeFormatError("polytope is empty")
    if polytope.degenerate:
        raise PolytopeFormatError(f"polytope is not full-dimensional in dimension {polytope.dim}")
    return polytope


def format_polytope(polytope: Polytope) -> str:
    lines = [f"dim {polytope.dim}"]
    for v in polytope.vertices:
        lines.append('v ' + ' '.join(str(c) for c in v))
    for h in polytope.facets:
        lines.append('h ' + ' '.join(str(c) for c in h.normal) + f" {h.offset}")
    return '\n'.join(lines) + '\n'


def load_polytope(source: str) -> Polytope:
    """Builtin name or path to a polytope text file"""
    if source in BUILTINS:
        return builtin(source)
    path = Path(source)
    if not path.is_file():
        raise PolytopeFormatError(f"'{source}' is neither a builtin polytope nor a readable file")
    logger.info(f"Loading polytope from {path}")
    try:
        text = path.read_text(encoding='utf-8')
    except (IOError, PermissionError) as e:
        raise PolytopeFormatError(f"cannot read {path}: {e}")
    return parse_polytope(text, name=path.stem)
