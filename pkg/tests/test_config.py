"""Tests for run configuration and formatting helpers"""
import json
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src import __version__
from src.config import EngineSettings, build_engine_settings, build_run_config
from src.errors import ConfigError
from src.utils import format_decimal, format_float, format_rational, write_file


def test_defaults_and_rank_mode():
    config = build_run_config(command='syzygy', polytope='square')
    assert config.rank_mode == 'prime'
    assert config.engine_settings().mode == 'prime'
    assert build_run_config(command='syzygy', polytope='square', exact=True).rank_mode == 'exact'
    both = build_run_config(command='syzygy', polytope='square', exact=True, cross_check=True)
    assert both.engine_settings().mode == 'both'


@pytest.mark.parametrize('values,field', [
    ({'d': 0}, 'd'),
    ({'q': -1}, 'q'),
    ({'a': 1.5}, 'a'),
    ({'tol': 0}, 'tol'),
    ({'directions': 3}, 'directions'),
    ({'prime': 9}, 'prime'),
    ({'p_cap': 0}, 'p_cap'),
    ({'command': 'plot'}, 'command'),
])
def test_invalid_fields_name_the_field(values, field):
    base = {'command': 'syzygy', 'polytope': 'square'}
    base.update(values)
    with pytest.raises(ConfigError, match=field):
        build_run_config(**base)


def test_cross_field_checks():
    with pytest.raises(ConfigError, match="empty"):
        build_run_config(command='syzygy', polytope='square', p_min=3, p_max=2)
    with pytest.raises(ConfigError, match="both --window-a and --window-b"):
        build_run_config(command='syzygy', polytope='square', window_b=0.5)
    with pytest.raises(ConfigError, match="0 <= a < b <= 1"):
        build_run_config(command='syzygy', polytope='square', window_a=0.6, window_b=0.5)
    with pytest.raises(ConfigError, match="nonnegative"):
        build_run_config(command='shapes', polytope='square', target=-1)


def test_header_lines():
    config = build_run_config(command='region', polytope='square', a=0.25)
    header = config.header({'zeta': 1, 'alpha': 'x'})
    lines = header.splitlines()
    assert lines[0] == f"# toric-syzygy {__version__}"
    payload = json.loads(lines[1][len('# config: '):])
    assert payload['a'] == 0.25
    assert list(payload) == sorted(payload)
    assert lines[2:] == ['# alpha: x', '# zeta: 1']
    assert header.endswith('\n')


def test_engine_settings():
    assert EngineSettings().mode == 'prime'
    assert build_engine_settings(prime=7, block_limit=10).prime == 7
    with pytest.raises(ConfigError):
        build_engine_settings(mode='fast')
    with pytest.raises(ConfigError):
        build_engine_settings(workers=0)


def test_format_rational():
    assert format_rational(Fraction(6, 3)) == '2'
    assert format_rational(Fraction(-1, 3)) == '-1/3'
    assert format_rational(0) == '0'


def test_format_decimal():
    assert format_decimal(Fraction(1, 3)) == '0.333333333333'
    assert format_decimal(Fraction(-1, 8)) == '-0.125000000000'
    assert format_decimal(Fraction(1, 8), 2) == '0.12'
    assert format_decimal(Fraction(3, 8), 2) == '0.38'
    assert format_decimal(7) == '7.000000000000'


def test_format_float():
    assert format_float(0.5) == '0.500000000000'
    assert format_float(-1e-20) == '0.000000000000'
    assert format_float(2.0, 3) == '2.000'


def test_write_file_creates_parents(tmp_path):
    path = tmp_path / 'nested' / 'out.csv'
    write_file(path, 'a,b\n1,2\n')
    assert path.read_text(encoding='utf-8') == 'a,b\n1,2\n'
