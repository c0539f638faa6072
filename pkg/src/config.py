"""Environment defaults and validated run configuration"""
import json
import os
from typing import Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ValidationError, field_validator, model_validator
from sympy import isprime

from . import __version__
from .errors import ConfigError

load_dotenv()

DEFAULT_PRIME = int(os.getenv('TORIC_PRIME', '1000003'))
DEFAULT_BLOCK_LIMIT = int(os.getenv('TORIC_BLOCK_LIMIT', '200000'))
DEFAULT_WEDGE_LIMIT = int(os.getenv('TORIC_WEDGE_LIMIT', '2000000'))
DEFAULT_WORKERS = int(os.getenv('TORIC_WORKERS', '1'))
DEFAULT_TOL = float(os.getenv('TORIC_TOL', '1e-9'))
DEFAULT_DIRECTIONS = int(os.getenv('TORIC_DIRECTIONS', '720'))
DEFAULT_GRID = int(os.getenv('TORIC_GRID', '64'))
DEFAULT_SEED = int(os.getenv('TORIC_SEED', '7'))
DEFAULT_LOG_LEVEL = os.getenv('TORIC_LOG_LEVEL', 'WARNING')

RANK_MODES = ('prime', 'exact', 'both')
COMMANDS = ('syzygy', 'betti', 'region', 'tau', 'density', 'shapes')


def _check_prime(value: int) -> int:
    if value < 3 or not isprime(value):
        raise ValueError(f"{value} is not an odd prime")
    return value


class EngineSettings(BaseModel):
    """Knobs shared by the Koszul engine and the harnesses"""
    prime: int = DEFAULT_PRIME
    block_limit: int = DEFAULT_BLOCK_LIMIT
    wedge_limit: int = DEFAULT_WEDGE_LIMIT
    workers: int = DEFAULT_WORKERS
    mode: str = 'prime'

    @field_validator('prime')
    @classmethod
    def check_prime(cls, value):
        return _check_prime(value)

    @field_validator('block_limit', 'wedge_limit', 'workers')
    @classmethod
    def check_positive(cls, value):
        if value < 1:
            raise ValueError("must be at least 1")
        return value

    @field_validator('mode')
    @classmethod
    def check_mode(cls, value):
        if value not in RANK_MODES:
            raise ValueError(f"mode must be one of {RANK_MODES}")
        return value


class RunConfig(BaseModel):
    """Resolved command-line configuration, echoed into every output header"""
    command: str
    polytope: str
    d: int = 1
    q: int = 1
    p_min: int = 1
    p_max: Optional[int] = None
    window_a: Optional[float] = None
    window_b: Optional[float] = None
    a: float = 0.1
    tol: float = DEFAULT_TOL
    directions: int = DEFAULT_DIRECTIONS
    grid: int = DEFAULT_GRID
    x: Optional[Tuple[str, ...]] = None
    target: Optional[float] = None
    samples: int = 100
    epsilon: float = 0.05
    d_max: int = 2
    seed: int = DEFAULT_SEED
    out: Optional[str] = None
    svg: Optional[str] = None
    exact: bool = False
    cross_check: bool = False
    p_cap: Optional[int] = None
    upper_bound: bool = False
    prime: int = DEFAULT_PRIME
    block_limit: int = DEFAULT_BLOCK_LIMIT
    workers: int = DEFAULT_WORKERS
    version: str = __version__

    @field_validator('command')
    @classmethod
    def check_command(cls, value):
        if value not in COMMANDS:
            raise ValueError(f"unknown command '{value}'")
        return value

    @field_validator('d', 'd_max')
    @classmethod
    def check_positive_int(cls, value):
        if value < 1:
            raise ValueError("must be a positive integer")
        return value

    @field_validator('p_cap')
    @classmethod
    def check_p_cap(cls, value):
        if value is not None and value < 1:
            raise ValueError("must be a positive integer")
        return value

    @field_validator('q', 'p_min', 'samples', 'seed')
    @classmethod
    def check_nonnegative(cls, value):
        if value < 0:
            raise ValueError("must be nonnegative")
        return value

    @field_validator('a')
    @classmethod
    def check_fraction(cls, value):
        if not 0 <= value <= 1:
            raise ValueError("volume fraction must lie in [0, 1]")
        return value

    @field_validator('tol', 'epsilon')
    @classmethod
    def check_tolerance(cls, value):
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @field_validator('directions', 'grid')
    @classmethod
    def check_at_least_four(cls, value):
        if value < 4:
            raise ValueError("must be at least 4")
        return value

    @field_validator('prime')
    @classmethod
    def check_prime(cls, value):
        return _check_prime(value)

    @field_validator('block_limit', 'workers')
    @classmethod
    def check_limits(cls, value):
        if value < 1:
            raise ValueError("must be at least 1")
        return value

    @model_validator(mode='after')
    def check_ranges(self):
        if self.p_max is not None and self.p_max < self.p_min:
            raise ValueError(f"p range [{self.p_min}, {self.p_max}] is empty")
        if (self.window_a is None) != (self.window_b is None):
            raise ValueError("window needs both --window-a and --window-b")
        if self.window_a is not None and not 0 <= self.window_a < self.window_b <= 1:
            raise ValueError("window needs 0 <= a < b <= 1")
        if self.target is not None and self.target < 0:
            raise ValueError("target volume must be nonnegative")
        return self

    def engine_settings(self) -> EngineSettings:
        return EngineSettings(prime=self.prime, block_limit=self.block_limit, workers=self.workers,
                              mode=self.rank_mode)

    @property
    def rank_mode(self) -> str:
        if self.cross_check:
            return 'both'
        return 'exact' if self.exact else 'prime'

    def header(self, extra: Optional[dict] = None) -> str:
        """Comment line(s) encoding the config and artifact version"""
        payload = self.model_dump()
        lines = [f"# toric-syzygy {self.version}", f"# config: {json.dumps(payload, sort_keys=True)}"]
        for key, value in sorted((extra or {}).items()):
            lines.append(f"# {key}: {value}")
        return '\n'.join(lines) + '\n'


def build_run_config(**values) -> RunConfig:
    """RunConfig from keyword values; validation failures become ConfigError"""
    try:
        return RunConfig(**values)
    except ValidationError as e:
        problems = '; '.join(f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
                             for err in e.errors())
        raise ConfigError(problems) from e


def build_engine_settings(**values) -> EngineSettings:
    try:
        return EngineSettings(**values)
    except ValidationError as e:
        raise ConfigError(str(e)) from e
