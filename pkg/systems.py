"""Hyperbolic maps: the Arnol'd CAT family on the 2-torus and the solenoid on the solid torus.

Points are handled as numpy arrays of shape (N, d) by the map classes; the
module-level operations also accept the TorusPoint / SolenoidPoint value types
and return the same type they were given. Angles are stored in turns.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from errors import DegenerateTangent, InvalidPoint, InvalidSystem, NoHistory

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
SOLENOID_VARIANTS = ('corrected', 'verbatim')
POWER_ITERATION_STEPS = 20
HISTORY_TOLERANCE = 1e-10


def wrap_unit(values):
    """Reduce to [0, 1) by subtracting the floor"""
    values = np.asarray(values, dtype=np.float64)
    reduced = values - np.floor(values)
    # tiny negatives round up to exactly 1.0
    return np.where(reduced >= 1.0, 0.0, reduced)


def wrap_signed(values):
    """Reduce to the nearest representative in [-1/2, 1/2]"""
    values = np.asarray(values, dtype=np.float64)
    return values - np.round(values)


@dataclass(frozen=True)
class TorusPoint:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, 'x', float(wrap_unit(self.x)))
        object.__setattr__(self, 'y', float(wrap_unit(self.y)))

    def as_array(self):
        return np.array([self.x, self.y], dtype=np.float64)


@dataclass(frozen=True)
class SolenoidPoint:
    theta: float
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, 'theta', float(wrap_unit(self.theta)))
        if self.x * self.x + self.y * self.y > 1.0 + 1e-12:
            raise InvalidPoint(f"({self.x}, {self.y}) lies outside the unit disc")

    def as_array(self):
        return np.array([self.theta, self.x, self.y], dtype=np.float64)


@dataclass(frozen=True)
class TangentVector:
    components: Tuple[float, ...]
    base: Optional[object] = None

    def as_array(self):
        return np.asarray(self.components, dtype=np.float64)

    @property
    def norm(self):
        return float(np.sqrt(np.sum(self.as_array() ** 2)))


@dataclass(frozen=True, eq=False)
class OrbitHistory:
    """Stored backward orbit of a point: oldest first, last entry is the preimage."""
    points: np.ndarray
    tangents: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.points)

    def preimage(self, steps=1):
        if steps > len(self.points):
            raise NoHistory(f"history holds {len(self.points)} steps, {steps} requested")
        return self.points[-steps]


def _row_norms(vectors):
    return np.sqrt((vectors * vectors).sum(axis=1))


class HyperbolicMap:
    """Shared tangent-cocycle machinery for the built-in systems."""

    dimension = 0
    periodic = ()
    is_linear = False
    name = 'map'

    def wrap(self, points):
        points = np.array(points, dtype=np.float64, copy=True)
        for axis in self.periodic:
            points[..., axis] = wrap_unit(points[..., axis])
        return points

    def displacement(self, p, q):
        """Shortest displacement q - p, periodic coordinates wrapped"""
        delta = np.asarray(q, dtype=np.float64) - np.asarray(p, dtype=np.float64)
        delta = np.array(delta, copy=True)
        for axis in self.periodic:
            delta[..., axis] = wrap_signed(delta[..., axis])
        return delta

    def distance(self, p, q):
        delta = self.displacement(p, q)
        return np.sqrt((delta * delta).sum(axis=-1))

    def log_stretch(self, points, tangents):
        """log |Df u| / |u| and the normalised image tangent, row by row"""
        points = np.atleast_2d(points)
        tangents = np.atleast_2d(np.asarray(tangents, dtype=np.float64))
        lengths = _row_norms(tangents)
        if np.any(lengths < 1e-300):
            raise DegenerateTangent("tangent vector has (near) zero length")
        image = self.tangent_map(points, tangents)
        image_lengths = _row_norms(image)
        if np.any(image_lengths < 1e-300):
            raise DegenerateTangent("tangent image has (near) zero length")
        return np.log(image_lengths / lengths), image / image_lengths[:, None]

    def step(self, points, tangents, log_stretch):
        """One application of f to points, unit tangents and accumulated log stretch"""
        increment, image_tangents = self.log_stretch(points, tangents)
        return self.apply(points), image_tangents, log_stretch + increment


@dataclass(frozen=True)
class CatMap(HyperbolicMap):
    """Linear hyperbolic toral automorphism (x, y) -> (ax + by, cx + dy) mod 1."""
    a: int = 2
    b: int = 1
    c: int = 1
    d: int = 1
    eigenvalue_u: float = field(init=False, repr=False)
    lambda_u: float = field(init=False, repr=False)
    slope_u: float = field(init=False, repr=False)
    slope_s: float = field(init=False, repr=False)
    unstable_vector: Tuple[float, float] = field(init=False, repr=False)
    stable_vector: Tuple[float, float] = field(init=False, repr=False)

    dimension = 2
    periodic = (0, 1)
    is_linear = True
    name = 'cat'

    def __post_init__(self):
        for label in ('a', 'b', 'c', 'd'):
            value = getattr(self, label)
            if int(value) != value:
                raise InvalidSystem(f"matrix entry {label}={value} is not an integer")
            object.__setattr__(self, label, int(value))
        if self.a * self.d - self.b * self.c != 1:
            raise InvalidSystem(f"determinant of {self.entries} is not 1")
        trace = self.a + self.d
        if abs(trace) <= 2:
            raise InvalidSystem(f"|trace| = {abs(trace)} gives no hyperbolic splitting")

        root = math.sqrt(trace * trace - 4)
        eigenvalue_u = (trace + math.copysign(root, trace)) / 2.0
        eigenvalue_s = 1.0 / eigenvalue_u
        unstable = self._eigenvector(eigenvalue_u)
        stable = self._eigenvector(eigenvalue_s)
        object.__setattr__(self, 'eigenvalue_u', eigenvalue_u)
        object.__setattr__(self, 'lambda_u', abs(eigenvalue_u))
        object.__setattr__(self, 'unstable_vector', unstable)
        object.__setattr__(self, 'stable_vector', stable)
        object.__setattr__(self, 'slope_u', unstable[1] / unstable[0] if unstable[0] else math.inf)
        object.__setattr__(self, 'slope_s', stable[1] / stable[0] if stable[0] else math.inf)

    def _eigenvector(self, eigenvalue):
        first = (float(self.b), eigenvalue - self.a)
        second = (eigenvalue - self.d, float(self.c))
        vector = first if math.hypot(*first) >= math.hypot(*second) else second
        norm = math.hypot(*vector)
        vx, vy = vector[0] / norm, vector[1] / norm
        if vx < 0 or (vx == 0 and vy < 0):
            vx, vy = -vx, -vy
        return (vx, vy)

    @property
    def entries(self):
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self):
        return self.a + self.d

    @property
    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.float64)

    @property
    def inverse_entries(self):
        return (self.d, -self.b, -self.c, self.a)

    @property
    def log_expansion(self):
        return math.log(self.lambda_u)

    def matrix_power(self, n):
        """Exact integer entries of A^n (n >= 0) as Python ints"""
        result = (1, 0, 0, 1)
        base = self.entries
        power = int(n)
        while power:
            if power & 1:
                result = _multiply(result, base)
            base = _multiply(base, base)
            power >>= 1
        return result

    def apply(self, points):
        points = np.asarray(points, dtype=np.float64)
        x, y = points[..., 0], points[..., 1]
        return np.stack([wrap_unit(self.a * x + self.b * y),
                         wrap_unit(self.c * x + self.d * y)], axis=-1)

    def apply_inverse(self, points, history=None):
        points = np.asarray(points, dtype=np.float64)
        x, y = points[..., 0], points[..., 1]
        ia, ib, ic, id_ = self.inverse_entries
        return np.stack([wrap_unit(ia * x + ib * y),
                         wrap_unit(ic * x + id_ * y)], axis=-1)

    def apply_exact(self, numerators, denominator, power=1):
        """Act on rational points numerators / denominator with exact integer arithmetic"""
        a, b, c, d = self.matrix_power(power)
        numerators = np.asarray(numerators, dtype=np.int64)
        nx, ny = numerators[..., 0], numerators[..., 1]
        return np.stack([(a * nx + b * ny) % denominator,
                         (c * nx + d * ny) % denominator], axis=-1)

    def tangent_map(self, points, tangents):
        tangents = np.asarray(tangents, dtype=np.float64)
        u, v = tangents[..., 0], tangents[..., 1]
        return np.stack([self.a * u + self.b * v, self.c * u + self.d * v], axis=-1)

    def default_tangent(self, points):
        points = np.atleast_2d(points)
        return np.tile(np.asarray(self.unstable_vector), (len(points), 1))

    def contains(self, points):
        points = np.atleast_2d(points)
        return np.all((points >= 0.0) & (points < 1.0), axis=1)

    def sample_grid(self, resolution):
        ticks = np.arange(resolution, dtype=np.float64) / resolution
        xs, ys = np.meshgrid(ticks, ticks, indexing='ij')
        return np.column_stack([xs.ravel(), ys.ravel()])

    def make_point(self, coordinates):
        return TorusPoint(*coordinates)


def _multiply(left, right):
    a, b, c, d = left
    e, f, g, h = right
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


@dataclass(frozen=True)
class SolenoidMap(HyperbolicMap):
    """Smale-Williams solenoid on the solid torus {(theta, x, y) : x^2 + y^2 <= 1}.

    corrected: (2 theta, c x + cos(2 pi theta)/2, c y + sin(2 pi theta)/2)
    verbatim:  (2 theta, c x + cos(theta)/2,      c x + sin(theta)/2)
    """
    contraction: float = 0.1
    variant: str = 'corrected'

    dimension = 3
    periodic = (0,)
    is_linear = False
    name = 'solenoid'

    def __post_init__(self):
        if not 0.0 < self.contraction < 0.5:
            raise InvalidSystem(f"contraction {self.contraction} must lie in (0, 1/2)")
        if self.variant not in SOLENOID_VARIANTS:
            raise InvalidSystem(f"unknown solenoid variant '{self.variant}'")
        if not self.maps_into_interior(resolution=8):
            raise InvalidSystem("image of the solid torus leaves its interior")

    def fiber(self, theta, x, y):
        """Cross-section part of the map for a given base angle"""
        c = self.contraction
        if self.variant == 'corrected':
            return c * x + np.cos(TWO_PI * theta) / 2.0, c * y + np.sin(TWO_PI * theta) / 2.0
        return c * x + np.cos(theta) / 2.0, c * x + np.sin(theta) / 2.0

    def apply(self, points):
        points = np.asarray(points, dtype=np.float64)
        theta, x, y = points[..., 0], points[..., 1], points[..., 2]
        new_x, new_y = self.fiber(theta, x, y)
        return np.stack([wrap_unit(2.0 * theta), new_x, new_y], axis=-1)

    def apply_inverse(self, points, history=None):
        if history is None or len(history) == 0:
            raise NoHistory("solenoid points are inverted from stored orbit histories only")
        preimage = np.asarray(history.preimage(1), dtype=np.float64)
        if float(np.max(self.distance(self.apply(preimage), points))) > HISTORY_TOLERANCE:
            raise NoHistory("stored history does not end at this point")
        return preimage

    def tangent_map(self, points, tangents):
        points = np.asarray(points, dtype=np.float64)
        tangents = np.asarray(tangents, dtype=np.float64)
        theta = points[..., 0]
        dt, dx, dy = tangents[..., 0], tangents[..., 1], tangents[..., 2]
        c = self.contraction
        if self.variant == 'corrected':
            return np.stack([2.0 * dt,
                             -math.pi * np.sin(TWO_PI * theta) * dt + c * dx,
                             math.pi * np.cos(TWO_PI * theta) * dt + c * dy], axis=-1)
        return np.stack([2.0 * dt,
                         -np.sin(theta) / 2.0 * dt + c * dx,
                         np.cos(theta) / 2.0 * dt + c * dx], axis=-1)

    def default_tangent(self, points):
        points = np.atleast_2d(points)
        tangents = np.zeros((len(points), 3))
        tangents[:, 0] = 1.0
        return tangents

    def unstable_tangent(self, points, steps=POWER_ITERATION_STEPS):
        """Push (1, 0, 0) forward `steps` iterates from points.

        Returns the end points f^steps(points), the renormalised tangents there and
        the orbit (steps, N, 3) leading up to them.
        """
        current = np.atleast_2d(np.asarray(points, dtype=np.float64))
        tangents = self.default_tangent(current)
        stretch = np.zeros(len(current))
        orbit = []
        for _ in range(steps):
            orbit.append(current)
            current, tangents, stretch = self.step(current, tangents, stretch)
        return current, tangents, np.array(orbit)

    def contains(self, points):
        points = np.atleast_2d(points)
        return points[:, 1] ** 2 + points[:, 2] ** 2 <= 1.0

    def sample_grid(self, resolution):
        ticks = np.arange(resolution, dtype=np.float64) / resolution
        radii = np.linspace(0.0, 1.0, resolution)
        theta, radius, angle = np.meshgrid(ticks, radii, ticks, indexing='ij')
        return np.column_stack([theta.ravel(),
                                (radius * np.cos(TWO_PI * angle)).ravel(),
                                (radius * np.sin(TWO_PI * angle)).ravel()])

    def maps_into_interior(self, resolution=64):
        """f(M) inside int(M), checked on a resolution^3 sample grid"""
        image = self.apply(self.sample_grid(resolution))
        return bool(np.all(image[:, 1] ** 2 + image[:, 2] ** 2 < 1.0))

    def make_point(self, coordinates):
        return SolenoidPoint(*coordinates)


def _coordinates(p):
    if isinstance(p, (TorusPoint, SolenoidPoint)):
        return p.as_array()
    return np.asarray(p, dtype=np.float64)


def _same_kind(system, template, coordinates):
    if isinstance(template, (TorusPoint, SolenoidPoint)):
        return system.make_point(coordinates)
    return coordinates


def _tangent_array(u):
    if isinstance(u, TangentVector):
        return u.as_array()
    return np.asarray(u, dtype=np.float64)


def apply(system, p):
    """Image of a single point"""
    return _same_kind(system, p, system.apply(_coordinates(p)))


def apply_inverse(system, p, history=None):
    """Preimage of a single point; solenoid points need their stored history"""
    return _same_kind(system, p, system.apply_inverse(_coordinates(p), history=history))


def unstable_log_jacobian(system, p, u):
    """log of the stretch of Df at p along u, i.e. -Phi(p); also the normalised image tangent"""
    coordinates = _coordinates(p)
    value, image = system.log_stretch(coordinates[None, :], _tangent_array(u)[None, :])
    image_point = _same_kind(system, p, system.apply(coordinates))
    return float(value[0]), TangentVector(tuple(float(v) for v in image[0]), base=image_point)


def birkhoff_sum(system, G, p, n, direction='forward', history=None, tangent=None):
    """Orbit sum of the potential G.

    forward:  sum_{i=0}^{n-1} G(f^i p)
    backward: sum_{i=1}^{n}   G(f^{-i} p)
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return 0.0
    current = _coordinates(p)[None, :]
    tangents = (system.default_tangent(current) if tangent is None
                else _tangent_array(tangent)[None, :])
    tangents = tangents / _row_norms(tangents)[:, None]

    if direction == 'forward':
        terms = []
        stretch = np.zeros(1)
        for _ in range(n):
            terms.append(G.evaluate(current, system=system, tangents=tangents)[0])
            current, tangents, stretch = system.step(current, tangents, stretch)
        return float(math.fsum(terms))

    if direction != 'backward':
        raise ValueError(f"unknown direction '{direction}'")

    if isinstance(system, SolenoidMap):
        if history is None or len(history) < n:
            raise NoHistory(f"backward sum over {n} steps needs {n} stored preimages")
        points = np.asarray(history.points[-n:], dtype=np.float64)
        past_tangents = (np.asarray(history.tangents[-n:], dtype=np.float64)
                         if history.tangents is not None else None)
        values = G.evaluate(points, system=system, tangents=past_tangents)
        return float(math.fsum(values))

    terms = []
    for _ in range(n):
        current = system.apply_inverse(current)
        terms.append(G.evaluate(current, system=system)[0])
    return float(math.fsum(terms))
