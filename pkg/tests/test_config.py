import json
import math
from pathlib import Path

import pytest

from errors import ConfigError
from experiment_config import load_config, parse_config
from systems import CatMap, SolenoidMap

CONFIG_DIR = Path(__file__).resolve().parent.parent / 'configs'


def test_defaults():
    config = parse_config({})
    assert config.system.kind == 'cat'
    assert config.system.matrix == (2, 1, 1, 1)
    assert config.n_max == 12
    assert config.refinement.max_spacing == 1e-2
    assert config.refinement.max_points == 200_000_000
    assert config.pressure.epsilon == 0.125
    assert config.oracle.all_periods == (14,)
    assert [ball.radius for ball in config.balls] == [1.0 / 3.0, 1.0 / 3.0]
    assert [F.name for F in config.test_potentials()] == ['F1', 'F2', 'F3']
    assert isinstance(config.system.build(), CatMap)


def test_solenoid_has_no_default_balls():
    config = parse_config({'system': {'kind': 'solenoid'}})
    assert config.balls == ()
    assert config.seed.x == (0.0, 0.0, 0.0)
    assert isinstance(config.system.build(), SolenoidMap)


def test_misspelled_key_names_the_field():
    with pytest.raises(ConfigError) as excinfo:
        parse_config({'system': {'matrx': [2, 1, 1, 1]}})
    assert excinfo.value.field == 'system.matrx'
    assert 'system.matrx' in str(excinfo.value)


def test_unknown_top_level_key():
    with pytest.raises(ConfigError) as excinfo:
        parse_config({'iterations': 4})
    assert excinfo.value.field == 'iterations'


def test_elliptic_matrix_rejected_at_build():
    config = parse_config({'system': {'matrix': [0, 1, -1, 0]}})
    with pytest.raises(ConfigError) as excinfo:
        config.system.build()
    assert excinfo.value.field == 'system'


@pytest.mark.parametrize('raw, field', [
    ({'system': {'matrix': [2, 1, 1]}}, 'system.matrix'),
    ({'system': {'matrix': [2, 1.5, 1, 1]}}, 'system.matrix[1]'),
    ({'system': {'kind': 'henon'}}, 'system.kind'),
    ({'system': {'kind': 'solenoid', 'burn_in': 10}}, 'system.burn_in'),
    ({'system': {'contraction': 0.2}}, 'system.contraction'),
    ({'potential': {'kind': 'fourier'}}, 'potential.modes'),
    ({'potential': {'kind': 'fourier', 'modes': [[0.5, 0, 1.0]]}}, 'potential.modes[0][0]'),
    ({'seed': {'delta': 0}}, 'seed.delta'),
    ({'seed': {'kind': 'waypoints', 'points': [[0.1, 0.1]]}}, 'seed.points'),
    ({'balls': [{'center': [0.0, 0.0], 'radius': 0.6}]}, 'balls[0].radius'),
    ({'refinement': {'max_spacing': -1}}, 'refinement'),
    ({'n_max': 0}, 'n_max'),
    ({'threads': 'many'}, 'threads'),
])
def test_invalid_fields(raw, field):
    with pytest.raises(ConfigError) as excinfo:
        parse_config(raw)
    assert excinfo.value.field == field


def test_potential_parsing():
    config = parse_config({'potential': {'kind': 'fourier', 'modes': [[1, 0, 0.1, 0.25]], 'offset': 2.0}})
    G = config.potential.build()
    assert G.modes[0].phase == 0.25
    assert G.offset == 2.0


def test_bad_json(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"n_max": 3,', encoding='utf-8')
    with pytest.raises(ConfigError) as excinfo:
        load_config(path)
    assert excinfo.value.field == 'config'


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / 'absent.json')


def test_source_kept_verbatim(tmp_path):
    text = json.dumps({'n_max': 3})
    path = tmp_path / 'small.json'
    path.write_text(text, encoding='utf-8')
    assert load_config(path).source == text


@pytest.mark.parametrize('path', sorted(CONFIG_DIR.glob('*.json')), ids=lambda p: p.stem)
def test_shipped_configs_load(path):
    config = load_config(path)
    config.system.build()
    config.potential.build()
    assert config.output_dir.startswith('results/')


def test_figure_configs():
    figure3b = load_config(CONFIG_DIR / 'figure3b.json')
    assert figure3b.potential.modes == ((1, 0, 0.1, 0.25),)
    figure3a = load_config(CONFIG_DIR / 'figure3a.json')
    assert all(ball.radius == pytest.approx(1.0 / 3.0) for ball in figure3a.balls)
    assert math.pi * figure3a.balls[0].radius ** 2 == pytest.approx(math.pi / 9)
