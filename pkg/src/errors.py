"""Exception hierarchy for the geometry, syzygy and cap-body engines"""


class ToricSyzygyError(Exception):
    """Base class for every error raised by this package"""


class ConfigError(ToricSyzygyError):
    """Invalid run configuration or parameter range"""


# Geometry

class GeometryError(ToricSyzygyError):
    pass


class DimensionMismatchError(GeometryError):
    def __init__(self, expected, got):
        super().__init__(f"dimension mismatch: expected {expected}, got {got}")
        self.expected = expected
        self.got = got


class UnboundedPolytopeError(GeometryError):
    pass


class DegenerateCentroidError(GeometryError):
    def __init__(self, message="degenerate centroid"):
        super().__init__(message)


class PointOutsideError(GeometryError):
    """A query point that does not lie in the polytope"""


class PolytopeFormatError(GeometryError):
    """Malformed polytope text or unknown builtin name"""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


# Syzygies

class SyzygyError(ToricSyzygyError):
    pass


class BlockLimitError(SyzygyError):
    """A weight block whose middle term exceeds the configured basis limit"""

    def __init__(self, p, q, weight, sizes, limit):
        left, middle, right = sizes
        super().__init__(
            f"block limit exceeded at p={p}, q={q}, weight={tuple(weight)}: "
            f"basis sizes left={left} middle={middle} right={right} (limit {limit})"
        )
        self.p = p
        self.q = q
        self.weight = tuple(weight)
        self.sizes = sizes
        self.limit = limit


class PrimeUnluckyError(SyzygyError):
    def __init__(self, weight, prime_rank, exact_rank):
        super().__init__(
            f"prime unlucky, rerun: weight {tuple(weight)} has rank {prime_rank} "
            f"mod p but {exact_rank} over QQ"
        )
        self.weight = tuple(weight)


class WedgeLimitError(SyzygyError):
    def __init__(self, count, limit):
        super().__init__(
            f"{count} index subsets exceed the exact-mode limit {limit}; "
            f"use sampled mode instead"
        )
        self.count = count
        self.limit = limit


# Cap bodies

class CapBodyError(ToricSyzygyError):
    pass


class CapLevelError(CapBodyError):
    pass


class ShapeError(CapBodyError):
    pass


class LinearProgramError(ToricSyzygyError):
    """Malformed linear program or an exhausted pivot budget"""
