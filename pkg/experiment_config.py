"""JSON experiment configuration.

Every section is parsed into a frozen dataclass; unknown keys anywhere are
rejected with a ConfigError naming the dotted path of the field.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

from curves import RefinementPolicy
from errors import ConfigError, UnstableGibbsError
from gibbs import BallSpec
from potentials import FOURIER, UNSTABLE_EXPANSION, ZERO, FourierMode, Potential
from systems import CatMap, SolenoidMap

logger = logging.getLogger(__name__)

DEFAULT_BALLS = (((0.0, 0.0), 1.0 / 3.0), ((0.5, 0.5), 1.0 / 3.0))
DEFAULT_TEST_FUNCTIONS = ((1, 0, 1.0, 0.0), (0, 1, 1.0, 0.25), (1, 1, 1.0, 0.0))


def _section(value, path, allowed):
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(path or 'config', "expected an object")
    for key in value:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}" if path else key, "unknown key")
    return value


def _number(value, path, kind=float, minimum=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if kind is int and int(value) != value:
        raise ConfigError(path, f"expected an integer, got {value!r}")
    value = kind(value)
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be at least {minimum}")
    return value


def _vector(value, path, length=None):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(path, "expected a list of numbers")
    if length is not None and len(value) != length:
        raise ConfigError(path, f"expected {length} numbers, got {len(value)}")
    return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(value))


@dataclass(frozen=True)
class SystemConfig:
    kind: str = 'cat'
    matrix: Tuple[int, int, int, int] = (2, 1, 1, 1)
    contraction: float = 0.1
    variant: str = 'corrected'
    burn_in: int = 30

    def build(self):
        try:
            if self.kind == 'cat':
                return CatMap(*self.matrix)
            return SolenoidMap(self.contraction, self.variant)
        except UnstableGibbsError as e:
            raise ConfigError('system', str(e)) from e


@dataclass(frozen=True)
class PotentialConfig:
    kind: str = ZERO
    modes: Tuple[Tuple[float, ...], ...] = ()
    offset: float = 0.0

    def build(self):
        if self.kind == ZERO:
            return Potential.zero().shifted(self.offset)
        if self.kind == UNSTABLE_EXPANSION:
            return Potential.unstable_expansion().shifted(self.offset)
        return Potential.fourier([FourierMode(*m) for m in self.modes], offset=self.offset)


@dataclass(frozen=True)
class SeedConfig:
    kind: str = 'segment'
    x: Tuple[float, ...] = (0.0, 0.0)
    delta: float = 1.0
    points: Tuple[Tuple[float, ...], ...] = ()


@dataclass(frozen=True)
class PressureConfig:
    epsilon: float = 0.125
    grid_size: Optional[int] = None
    separated_n_max: int = 8


@dataclass(frozen=True)
class OracleConfig:
    period: int = 14
    periods: Tuple[int, ...] = ()
    max_period: int = 16

    @property
    def all_periods(self):
        return self.periods or (self.period,)


@dataclass(frozen=True)
class ExperimentConfig:
    system: SystemConfig = field(default_factory=SystemConfig)
    potential: PotentialConfig = field(default_factory=PotentialConfig)
    seed: SeedConfig = field(default_factory=SeedConfig)
    n_max: int = 12
    balls: Tuple[BallSpec, ...] = ()
    test_functions: Tuple[Tuple[float, ...], ...] = DEFAULT_TEST_FUNCTIONS
    refinement: RefinementPolicy = field(default_factory=RefinementPolicy)
    threads: Optional[int] = None
    output_dir: Optional[str] = None
    pressure: PressureConfig = field(default_factory=PressureConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    source: str = field(default='{}', repr=False, compare=False)

    def test_potentials(self):
        return [Potential(kind=FOURIER, modes=(FourierMode(*mode),), name=f"F{i + 1}")
                for i, mode in enumerate(self.test_functions)]


def _parse_system(raw):
    raw = _section(raw, 'system', {'kind', 'matrix', 'contraction', 'variant', 'burn_in'})
    kind = raw.get('kind', 'cat')
    if kind == 'cat':
        if {'contraction', 'variant', 'burn_in'} & set(raw):
            extra = sorted({'contraction', 'variant', 'burn_in'} & set(raw))[0]
            raise ConfigError(f"system.{extra}", "not a CAT map parameter")
        matrix = raw.get('matrix', [2, 1, 1, 1])
        if not isinstance(matrix, list) or len(matrix) != 4:
            raise ConfigError('system.matrix', "expected four integers a, b, c, d")
        entries = tuple(_number(v, f"system.matrix[{i}]", int) for i, v in enumerate(matrix))
        return SystemConfig(kind='cat', matrix=entries)
    if kind == 'solenoid':
        if 'matrix' in raw:
            raise ConfigError('system.matrix', "not a solenoid parameter")
        variant = raw.get('variant', 'corrected')
        if variant not in ('corrected', 'verbatim'):
            raise ConfigError('system.variant', f"unknown variant '{variant}'")
        return SystemConfig(kind='solenoid',
                            contraction=_number(raw.get('contraction', 0.1), 'system.contraction'),
                            variant=variant,
                            burn_in=_number(raw.get('burn_in', 30), 'system.burn_in', int, 30))
    raise ConfigError('system.kind', f"unknown system kind '{kind}'")


def _parse_potential(raw):
    raw = _section(raw, 'potential', {'kind', 'modes', 'offset'})
    kind = raw.get('kind', ZERO)
    if kind not in (ZERO, UNSTABLE_EXPANSION, FOURIER):
        raise ConfigError('potential.kind', f"unknown potential kind '{kind}'")
    modes = tuple(_parse_mode(m, f"potential.modes[{i}]") for i, m in enumerate(raw.get('modes', [])))
    if kind == FOURIER and not modes:
        raise ConfigError('potential.modes', "fourier potential needs at least one mode")
    if kind != FOURIER and modes:
        raise ConfigError('potential.modes', f"modes are not used by the '{kind}' potential")
    return PotentialConfig(kind=kind, modes=modes, offset=_number(raw.get('offset', 0.0), 'potential.offset'))


def _parse_mode(raw, path):
    values = _vector(raw, path)
    if len(values) not in (3, 4):
        raise ConfigError(path, "expected [kx, ky, amplitude] or [kx, ky, amplitude, phase]")
    for i in (0, 1):
        if int(values[i]) != values[i]:
            raise ConfigError(f"{path}[{i}]", "wave numbers must be integers")
    return (int(values[0]), int(values[1])) + values[2:]


def _parse_seed(raw, dimension):
    raw = _section(raw, 'seed', {'kind', 'x', 'delta', 'points'})
    kind = raw.get('kind', 'segment')
    if kind == 'segment':
        if 'points' in raw:
            raise ConfigError('seed.points', "segment seeds take x and delta")
        delta = _number(raw.get('delta', 1.0), 'seed.delta')
        if not delta > 0:
            raise ConfigError('seed.delta', "must be positive")
        default_x = [0.0] * dimension
        return SeedConfig(kind='segment', x=_vector(raw.get('x', default_x), 'seed.x', dimension), delta=delta)
    if kind == 'waypoints':
        if {'x', 'delta'} & set(raw):
            raise ConfigError('seed.x' if 'x' in raw else 'seed.delta', "waypoint seeds take points")
        points = raw.get('points')
        if not isinstance(points, list) or len(points) < 2:
            raise ConfigError('seed.points', "at least two waypoints are required")
        return SeedConfig(kind='waypoints',
                          points=tuple(_vector(p, f"seed.points[{i}]", dimension) for i, p in enumerate(points)))
    raise ConfigError('seed.kind', f"unknown seed kind '{kind}'")


def _parse_balls(raw, system_config):
    if raw is None:
        if system_config.kind != 'cat':
            return ()
        raw = [{'center': list(c), 'radius': r} for c, r in DEFAULT_BALLS]
    if not isinstance(raw, list):
        raise ConfigError('balls', "expected a list")
    dimension = 2 if system_config.kind == 'cat' else 3
    metric = 'torus-euclidean' if system_config.kind == 'cat' else 'solenoid'
    balls = []
    for i, entry in enumerate(raw):
        path = f"balls[{i}]"
        entry = _section(entry, path, {'center', 'radius', 'name'})
        if 'center' not in entry or 'radius' not in entry:
            raise ConfigError(path, "needs center and radius")
        try:
            balls.append(BallSpec(_vector(entry['center'], f"{path}.center", dimension),
                                  _number(entry['radius'], f"{path}.radius"), metric,
                                  name=str(entry.get('name', f"B{i + 1}"))))
        except ValueError as e:
            raise ConfigError(f"{path}.radius", str(e)) from e
    return tuple(balls)


def _parse_refinement(raw):
    raw = _section(raw, 'refinement', {'max_spacing', 'max_points', 'insertion'})
    try:
        return RefinementPolicy(
            max_spacing=_number(raw.get('max_spacing', 1e-2), 'refinement.max_spacing'),
            max_points=_number(raw.get('max_points', 200_000_000), 'refinement.max_points', int),
            insertion=raw.get('insertion', 'midpoint-preimage'))
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError('refinement', str(e)) from e


def _parse_pressure(raw):
    raw = _section(raw, 'pressure', {'epsilon', 'grid_size', 'separated_n_max'})
    grid_size = raw.get('grid_size')
    return PressureConfig(
        epsilon=_number(raw.get('epsilon', 0.125), 'pressure.epsilon'),
        grid_size=None if grid_size is None else _number(grid_size, 'pressure.grid_size', int, 2),
        separated_n_max=_number(raw.get('separated_n_max', 8), 'pressure.separated_n_max', int, 1))


def _parse_oracle(raw):
    raw = _section(raw, 'oracle', {'period', 'periods', 'max_period'})
    periods = raw.get('periods', [])
    if not isinstance(periods, list):
        raise ConfigError('oracle.periods', "expected a list of integers")
    return OracleConfig(
        period=_number(raw.get('period', 14), 'oracle.period', int, 1),
        periods=tuple(_number(p, f"oracle.periods[{i}]", int, 1) for i, p in enumerate(periods)),
        max_period=_number(raw.get('max_period', 16), 'oracle.max_period', int, 1))


TOP_LEVEL_KEYS = {'system', 'potential', 'seed', 'n_max', 'balls', 'test_functions', 'refinement',
                  'threads', 'output_dir', 'pressure', 'oracle'}


def parse_config(raw, source=None):
    """Build an ExperimentConfig from a decoded JSON object"""
    raw = _section(raw, '', TOP_LEVEL_KEYS)
    system = _parse_system(raw.get('system'))
    dimension = 2 if system.kind == 'cat' else 3
    threads = raw.get('threads')
    output_dir = raw.get('output_dir')
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigError('output_dir', "expected a path string")
    test_functions = raw.get('test_functions')
    if test_functions is None:
        test_functions = DEFAULT_TEST_FUNCTIONS
    elif not isinstance(test_functions, list):
        raise ConfigError('test_functions', "expected a list of modes")
    else:
        test_functions = tuple(_parse_mode(m, f"test_functions[{i}]") for i, m in enumerate(test_functions))

    config = ExperimentConfig(
        system=system,
        potential=_parse_potential(raw.get('potential')),
        seed=_parse_seed(raw.get('seed'), dimension),
        n_max=_number(raw.get('n_max', 12), 'n_max', int, 1),
        balls=_parse_balls(raw.get('balls'), system),
        test_functions=tuple(test_functions),
        refinement=_parse_refinement(raw.get('refinement')),
        threads=None if threads is None else _number(threads, 'threads', int, 1),
        output_dir=output_dir,
        pressure=_parse_pressure(raw.get('pressure')),
        oracle=_parse_oracle(raw.get('oracle')),
        source=source if source is not None else json.dumps(raw, sort_keys=True))
    logger.debug("Parsed config: %s", config)
    return config


def load_config(path):
    """Read and parse a JSON config file"""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError('config', f"cannot read {path}: {e.strerror}") from e
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError('config', f"invalid JSON at line {e.lineno}: {e.msg}") from e
    return parse_config(raw, source=text)
