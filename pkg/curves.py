"""Pieces of unstable manifold and their forward images under adaptive refinement.

A curve is sampled at parameters of its seed parametrisation. Every sample keeps
its parameter, so the backward orbit of any sample is recovered by replaying the
seed forward; refinement inserts parameter midpoints and never moves existing
samples, which keeps those anchors exact.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
import pandas as pd
from scipy.integrate import fixed_quad
from scipy.optimize import brentq

from errors import BadDelta, BadSeed, InvalidPoint, MissingHistory, PointBudgetExceeded, TangentToStable
from parallel import fixed_order_sum, map_chunks
from systems import CatMap, OrbitHistory, SolenoidMap

logger = logging.getLogger(__name__)

DEFAULT_MAX_SPACING = 1e-2
DEFAULT_MAX_POINTS = 200_000_000
DEFAULT_BURN_IN = 30
STABLE_ANGLE_TOLERANCE = 1e-3
ARC_PANEL = 0.25
ARC_NODES = 32


@dataclass(frozen=True)
class RefinementPolicy:
    max_spacing: float = DEFAULT_MAX_SPACING
    max_points: int = DEFAULT_MAX_POINTS
    insertion: str = 'midpoint-preimage'

    def __post_init__(self):
        if not self.max_spacing > 0:
            raise ValueError(f"max_spacing must be positive, got {self.max_spacing}")
        if self.max_points < 2:
            raise ValueError(f"max_points must be at least 2, got {self.max_points}")
        if self.insertion != 'midpoint-preimage':
            raise ValueError(f"unsupported insertion rule '{self.insertion}'")


# Seed parametrisations. evaluate(params) -> (points, unit tangents, speed |gamma'(s)|);
# volume is the exact length of the seed, independent of how it is sampled.

@dataclass(frozen=True, eq=False)
class LineSeed:
    system: object
    origin: np.ndarray
    direction: np.ndarray
    length: float

    @property
    def volume(self):
        return self.length

    def evaluate(self, params):
        params = np.asarray(params, dtype=np.float64)
        points = self.system.wrap(self.origin[None, :] + params[:, None] * self.direction[None, :])
        tangents = np.tile(self.direction, (len(params), 1))
        return points, tangents, np.ones(len(params))

    def vertex_params(self):
        return np.array([0.0, self.length])


@dataclass(frozen=True, eq=False)
class PolylineSeed:
    """Piecewise-linear seed through lifted waypoints, parametrised by arclength"""
    system: object
    waypoints: np.ndarray
    cumulative: np.ndarray = field(init=False)
    directions: np.ndarray = field(init=False)

    def __post_init__(self):
        steps = np.diff(self.waypoints, axis=0)
        lengths = np.sqrt((steps * steps).sum(axis=1))
        if np.any(lengths <= 0.0):
            raise BadSeed("consecutive waypoints coincide")
        object.__setattr__(self, 'cumulative', np.concatenate([[0.0], np.cumsum(lengths)]))
        object.__setattr__(self, 'directions', steps / lengths[:, None])

    @property
    def length(self):
        return float(self.cumulative[-1])

    @property
    def volume(self):
        return self.length

    def evaluate(self, params):
        params = np.asarray(params, dtype=np.float64)
        segment = np.clip(np.searchsorted(self.cumulative, params, side='right') - 1,
                          0, len(self.directions) - 1)
        offset = params - self.cumulative[segment]
        points = self.system.wrap(self.waypoints[segment] + offset[:, None] * self.directions[segment])
        return points, self.directions[segment].copy(), np.ones(len(params))

    def vertex_params(self):
        return self.cumulative.copy()


@dataclass(frozen=True, eq=False)
class SolenoidArcSeed:
    """Arc through f^m(z) obtained by pushing the theta-interval [theta_z, theta_z + s 2^-m] forward m steps.

    The parameter s is the theta-offset at the end point and runs over [0, extent];
    the arc winds once in theta when extent is 1.
    """
    system: SolenoidMap
    anchor: np.ndarray
    burn_in: int
    extent: float = 1.0
    thetas: np.ndarray = field(init=False)

    def __post_init__(self):
        thetas = [float(self.anchor[0])]
        current = self.anchor[None, :]
        for _ in range(self.burn_in):
            current = self.system.apply(current)
            thetas.append(float(current[0, 0]))
        object.__setattr__(self, 'thetas', np.array(thetas))

    def evaluate(self, params):
        params = np.asarray(params, dtype=np.float64)
        m = self.burn_in
        count = len(params)
        x = np.full(count, self.anchor[1])
        y = np.full(count, self.anchor[2])
        tangents = np.zeros((count, 3))
        tangents[:, 0] = 2.0 ** (-m)
        for j in range(m):
            theta = self.thetas[j] + params * 2.0 ** (j - m)
            theta = theta - np.floor(theta)
            tangents = self.system.tangent_map(np.column_stack([theta, x, y]), tangents)
            x, y = self.system.fiber(theta, x, y)
        theta = self.thetas[m] + params
        points = np.column_stack([theta - np.floor(theta), x, y])
        points[:, 0] = np.where(points[:, 0] >= 1.0, 0.0, points[:, 0])
        speed = np.sqrt((tangents * tangents).sum(axis=1))
        return points, tangents / speed[:, None], speed

    def arclength_to(self, extent):
        """Length of the arc over [0, extent], Gauss-Legendre on panels of width <= ARC_PANEL"""
        if extent <= 0.0:
            return 0.0
        panels = max(1, int(math.ceil(extent / ARC_PANEL)))
        edges = np.linspace(0.0, extent, panels + 1)

        def speed(s):
            return self.evaluate(s)[2]

        return math.fsum(fixed_quad(speed, a, b, n=ARC_NODES)[0] for a, b in zip(edges[:-1], edges[1:]))

    def extent_for(self, length):
        """theta-extent whose arc has the given length; the theta speed is 1, so extent <= length"""
        return brentq(lambda t: self.arclength_to(t) - length, 0.0, length, xtol=1e-15, rtol=1e-15)

    @cached_property
    def volume(self):
        return self.arclength_to(self.extent)

    def vertex_params(self):
        return np.array([0.0, self.extent])


def replay(system, seed, params, steps, visit=None):
    """Evaluate the seed at params and push forward `steps` times.

    visit(k, points, tangents) is called at every generation k < steps before the
    step is taken. Returns points, unit tangents, accumulated log stretch and seed
    speed at generation `steps`.
    """
    points, tangents, speed = seed.evaluate(params)
    log_stretch = np.zeros(len(params))
    for k in range(steps):
        if visit is not None:
            visit(k, points, tangents)
        points, tangents, log_stretch = system.step(points, tangents, log_stretch)
    return points, tangents, log_stretch, speed


def _frozen(array):
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class UnstableCurve:
    system: object
    seed: object
    params: np.ndarray
    points: np.ndarray
    tangents: np.ndarray
    log_stretch: np.ndarray
    speed: np.ndarray
    birth: np.ndarray
    generation: int = 0
    non_invariant: bool = False

    def __post_init__(self):
        for name in ('params', 'points', 'tangents', 'log_stretch', 'speed', 'birth'):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    def __len__(self):
        return len(self.params)

    def gaps(self):
        """Phase-space distance between consecutive samples"""
        return self.system.distance(self.points[:-1], self.points[1:])

    def arclength(self):
        return fixed_order_sum(self.gaps())

    def seed_elements(self):
        """Trapezoidal volume elements of the seed, one per sample, summing to seed.volume"""
        steps = np.diff(self.params) * 0.5
        elements = np.zeros(len(self.params))
        elements[:-1] += steps * self.speed[:-1]
        elements[1:] += steps * self.speed[1:]
        return elements * (self.seed.volume / fixed_order_sum(elements))

    def transported_length(self):
        """Length of the image computed as sum of seed elements times accumulated stretch"""
        return fixed_order_sum(self.seed_elements() * np.exp(self.log_stretch))

    def at_generation(self, g):
        """The curve as it was after g advances: samples born by then, replayed g steps"""
        if g > self.generation:
            raise MissingHistory(f"curve is at generation {self.generation}, {g} requested")
        if g == self.generation:
            return self
        keep = self.birth <= g
        params = self.params[keep]
        points, tangents, log_stretch, speed = replay(self.system, self.seed, params, g)
        return UnstableCurve(self.system, self.seed, params, points, tangents, log_stretch,
                             speed, self.birth[keep], g, self.non_invariant)

    def ancestors(self, g):
        """Positions of every sample after g steps from the seed (g <= generation)"""
        if g > self.generation:
            raise MissingHistory(f"curve is at generation {self.generation}, {g} requested")
        return replay(self.system, self.seed, self.params, g)[0]

    def history(self, index):
        """Backward orbit of sample `index` as an OrbitHistory, oldest first"""
        points, tangents = [], []

        def record(k, p, t):
            points.append(p[0].copy())
            tangents.append(t[0].copy())

        replay(self.system, self.seed, self.params[index:index + 1], self.generation, visit=record)
        dim = self.system.dimension
        return OrbitHistory(np.array(points).reshape(-1, dim), np.array(tangents).reshape(-1, dim))

    def to_frame(self):
        names = ['x', 'y'] if self.system.dimension == 2 else ['theta', 'x', 'y']
        frame = pd.DataFrame(self.points, columns=names)
        frame.insert(0, 'param', self.params)
        frame.insert(0, 'generation', self.generation)
        return frame


def _refine(curve, policy, threads):
    params = curve.params
    arrays = [curve.points, curve.tangents, curve.log_stretch, curve.speed, curve.birth]
    rounds = 0
    while True:
        points = arrays[0]
        too_far = np.flatnonzero(curve.system.distance(points[:-1], points[1:]) > policy.max_spacing)
        if too_far.size == 0:
            break
        if len(params) + too_far.size > policy.max_points:
            raise PointBudgetExceeded(
                f"refinement needs {len(params) + too_far.size} points, cap is {policy.max_points}")
        middle = 0.5 * (params[too_far] + params[too_far + 1])
        if np.any((middle <= params[too_far]) | (middle >= params[too_far + 1])):
            raise PointBudgetExceeded("parameter resolution exhausted during refinement")

        def replay_chunk(chunk):
            return replay(curve.system, curve.seed, chunk, curve.generation)

        new_points, new_tangents, new_stretch, new_speed = map_chunks(replay_chunk, [middle], threads)
        new_birth = np.full(middle.size, curve.generation, dtype=np.int16)
        where = too_far + 1
        params = np.insert(params, where, middle)
        arrays = [np.insert(a, where, b, axis=0) for a, b in
                  zip(arrays, [new_points, new_tangents, new_stretch, new_speed, new_birth])]
        rounds += 1
    if rounds:
        logger.debug("Generation %d refined in %d rounds to %d samples",
                     curve.generation, rounds, len(params))
    return UnstableCurve(curve.system, curve.seed, params, *arrays,
                         generation=curve.generation, non_invariant=curve.non_invariant)


def _initial_curve(system, seed, policy, non_invariant, threads=1):
    params = np.unique(seed.vertex_params())
    points, tangents, speed = seed.evaluate(params)
    curve = UnstableCurve(system, seed, params, points, tangents, np.zeros(len(params)), speed,
                          np.zeros(len(params), dtype=np.int16), 0, non_invariant)
    return _refine(curve, policy, threads)


def seed_segment(system, x, delta, policy=None, burn_in=DEFAULT_BURN_IN, threads=1):
    """Local unstable segment of length delta starting at x.

    On the solenoid x is the point z whose forward orbit of `burn_in` steps lands
    near the attractor; the curve is the arc of arclength delta through f^burn_in(z)
    along the pushed-forward theta-direction.
    """
    policy = policy or RefinementPolicy()
    if not delta > 0:
        raise BadDelta(f"delta must be positive, got {delta}")
    start = np.asarray(getattr(x, 'as_array', lambda: x)(), dtype=np.float64)
    if isinstance(system, SolenoidMap):
        if not bool(system.contains(start)[0]):
            raise InvalidPoint(f"{start.tolist()} lies outside the solid torus")
        if burn_in < 1:
            raise ValueError("burn_in must be at least 1")
        unit = SolenoidArcSeed(system, start, int(burn_in))
        seed = SolenoidArcSeed(system, start, int(burn_in), unit.extent_for(float(delta)))
    else:
        seed = LineSeed(system, system.wrap(start), np.asarray(system.unstable_vector), float(delta))
    curve = _initial_curve(system, seed, policy, non_invariant=False, threads=threads)
    logger.info("Seeded %s segment with %d samples", system.name, len(curve))
    return curve


def seed_arbitrary(system, waypoints, policy=None, threads=1):
    """Polyline seed through lifted waypoints; transported as a non-invariant curve"""
    policy = policy or RefinementPolicy()
    waypoints = np.array([getattr(w, 'as_array', lambda w=w: w)() for w in waypoints], dtype=np.float64)
    if waypoints.ndim != 2 or len(waypoints) < 2:
        raise BadSeed("at least two waypoints are required")
    if waypoints.shape[1] != system.dimension:
        raise BadSeed(f"waypoints must have {system.dimension} coordinates")
    if isinstance(system, SolenoidMap) and not np.all(system.contains(waypoints)):
        raise InvalidPoint("waypoint lies outside the solid torus")
    seed = PolylineSeed(system, waypoints)
    if isinstance(system, CatMap):
        stable = np.asarray(system.stable_vector)
        cosines = np.clip(np.abs(seed.directions @ stable), 0.0, 1.0)
        angles = np.arccos(cosines)
        if np.any(angles < STABLE_ANGLE_TOLERANCE):
            raise TangentToStable(
                f"segment {int(np.argmin(angles))} is within {STABLE_ANGLE_TOLERANCE} rad of the stable direction")
    curve = _initial_curve(system, seed, policy, non_invariant=True, threads=threads)
    logger.info("Seeded %s polyline through %d waypoints with %d samples",
                system.name, len(waypoints), len(curve))
    return curve


def advance(curve, system=None, policy=None, threads=1):
    """Image of the curve under one application of f, refined to the spacing policy"""
    system = system or curve.system
    policy = policy or RefinementPolicy()

    def step_chunk(points, tangents, log_stretch):
        return system.step(points, tangents, log_stretch)

    points, tangents, log_stretch = map_chunks(
        step_chunk, [curve.points, curve.tangents, curve.log_stretch], threads)
    image = UnstableCurve(system, curve.seed, curve.params, points, tangents, log_stretch,
                          curve.speed, curve.birth, curve.generation + 1, curve.non_invariant)
    refined = _refine(image, policy, threads)
    logger.debug("Advanced to generation %d: %d samples", refined.generation, len(refined))
    return refined


def grow(curve, generations, system=None, policy=None, threads=1):
    """Advance `generations` times"""
    for _ in range(generations):
        curve = advance(curve, system, policy, threads)
    return curve


def arclength_elements(curve):
    """Trapezoidal split of the chord lengths, one element per sample"""
    if len(curve) < 2:
        raise ValueError("curve needs at least two samples")
    halves = 0.5 * curve.gaps()
    elements = np.zeros(len(curve))
    elements[:-1] += halves
    elements[1:] += halves
    return elements


def theta_winding(curve):
    """Total signed theta travelled along a solenoid curve, in turns"""
    steps = np.diff(curve.points[:, 0])
    return fixed_order_sum(steps - np.round(steps))


def expansion_rate(curve):
    """(1/n) log of the transported length relative to the seed length"""
    if curve.generation == 0:
        return math.nan
    seed_length = fixed_order_sum(curve.seed_elements())
    return math.log(curve.transported_length() / seed_length) / curve.generation
