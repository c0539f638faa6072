"""Tests for the command line interface"""
import json
import sys
from pathlib import Path

import pytest
from click.testing import CliRunner

sys.path.insert(0, str(Path(__file__).parent.parent))

from cli import cli
from src import __version__


@pytest.fixture
def runner():
    return CliRunner()


def test_syzygy_prints_weights(runner):
    result = runner.invoke(cli, ['syzygy', '--polytope', 'segment', '--d', '2'])
    assert result.exit_code == 0, result.output
    assert 'p=1 weight=(2,) normalized=(1/2) multiplicity=1' in result.output


def test_syzygy_csv(runner, tmp_path):
    out = tmp_path / 'conic.csv'
    result = runner.invoke(cli, ['syzygy', '--polytope', 'segment', '--d', '2', '--out', str(out)])
    assert result.exit_code == 0, result.output
    lines = out.read_text(encoding='utf-8').splitlines()
    assert lines[0] == f'# toric-syzygy {__version__}'
    config = json.loads(lines[1][len('# config: '):])
    assert config['command'] == 'syzygy'
    assert config['d'] == 2
    assert 'p,q,d,w_1,multiplicity,nw_1,nw_1_decimal' in lines
    assert '1,1,2,2,1,1/2,0.500000000000' in lines


def test_outputs_are_reproducible(runner, tmp_path):
    """Same flags and seed give byte-identical files"""
    out = tmp_path / 'density.csv'
    args = ['density', '--polytope', 'segment', '--d-max', '2', '--samples', '10',
            '--seed', '3', '--out', str(out)]
    contents = []
    for _ in range(2):
        result = runner.invoke(cli, args)
        assert result.exit_code == 0, result.output
        contents.append(out.read_bytes())
    assert contents[0] == contents[1]


def test_betti_csv(runner, tmp_path):
    out = tmp_path / 'betti.csv'
    result = runner.invoke(cli, ['betti', '--polytope', 'segment', '--d', '3', '--out', str(out)])
    assert result.exit_code == 0, result.output
    lines = out.read_text(encoding='utf-8').splitlines()
    assert '1,1,3,3' in lines
    assert '2,1,3,2' in lines
    assert '0,0,3,1' in lines


def test_region_centroid(runner, tmp_path):
    svg = tmp_path / 'region.svg'
    result = runner.invoke(cli, ['region', '--polytope', 'square', '--a', '1', '--directions', '16',
                                 '--svg', str(svg)])
    assert result.exit_code == 0, result.output
    assert '1 distinct points' in result.output
    assert 'point: 0.500000000000, 0.500000000000' in result.output
    assert svg.read_text(encoding='utf-8').startswith('<svg')


def test_tau_table(runner):
    result = runner.invoke(cli, ['tau', '--polytope', 'square', '--x', '0.5,0.5', '--directions', '16',
                                 '--grid', '8'])
    assert result.exit_code == 0, result.output
    assert 'direction_sweep' in result.output
    assert 'grid_lp' in result.output
    assert '1.000000' in result.output


def test_shapes(runner):
    result = runner.invoke(cli, ['shapes', '--polytope', 'square', '--x', '0.25,0.25', '--target', '0.2',
                                 '--grid', '8'])
    assert result.exit_code == 0, result.output
    assert 'volume 1/5' in result.output
    assert 'centre of mass: 1/4, 1/4' in result.output


@pytest.mark.parametrize('args', [
    ['syzygy', '--polytope', 'hexagon'],
    ['syzygy', '--polytope', 'segment', '--d', '0'],
    ['syzygy', '--polytope', 'segment', '--prime', '4'],
    ['syzygy', '--polytope', 'segment', '--window-a', '0.2'],
    ['tau', '--polytope', 'square', '--x', '2,2'],
    ['tau', '--polytope', 'square', '--x', '0.5'],
    ['region', '--polytope', 'square', '--a', '1.5'],
    ['syzygy'],
])
def test_bad_configuration_exits_2(runner, args):
    result = runner.invoke(cli, args)
    assert result.exit_code == 2


def test_block_limit_exits_3(runner):
    result = runner.invoke(cli, ['syzygy', '--polytope', 'simplex2', '--d', '2', '--block-limit', '1'])
    assert result.exit_code == 3
    assert 'block limit exceeded' in result.output


def test_shape_failure_exits_1(runner):
    result = runner.invoke(cli, ['shapes', '--polytope', 'square', '--x', '0.25,0.25', '--target', '0.9',
                                 '--grid', '8'])
    assert result.exit_code == 1
    assert 'exceeds tau' in result.output


def test_flat_polytope_file_exits_2(runner, tmp_path):
    path = tmp_path / 'diag.txt'
    path.write_text("dim 2\nv 0 0\nv 1 1\nh 1 -1 0\nh -1 1 0\nh 1 0 1\nh -1 0 0\n", encoding='utf-8')
    result = runner.invoke(cli, ['density', '--polytope', str(path), '--d-max', '2', '--samples', '5'])
    assert result.exit_code == 2
    assert 'not full-dimensional' in result.output
