"""Gibbs densities on unstable curves, their push-forwards and Cesaro averages.

lambda_n lives on the seed with density exp(sum_{i<n} (G - Phi)(f^i y)) against the
seed volume. Since -sum Phi along a sample equals its accumulated log stretch,
the log weight of sample j is

    log seed_element_j + sum_{i<n} G(f^i y_j) + log_stretch_j

and the atoms are placed at the image points f^n y_j.
"""
import logging
import operator
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from scipy.special import logsumexp

from curves import grow, replay
from errors import MissingHistory
from parallel import fixed_order_sum, map_chunks, weighted_sum
from potentials import FOURIER, UNSTABLE_EXPANSION, ZERO, FourierMode, Potential
from systems import wrap_signed

logger = logging.getLogger(__name__)

MASS_TOLERANCE = 1e-10
METRICS = ('torus-euclidean', 'solenoid')


@dataclass(frozen=True, eq=False)
class WeightedAtoms:
    points: np.ndarray
    weights: np.ndarray
    generations: Optional[np.ndarray] = None
    normalized: bool = False

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        weights = np.asarray(self.weights, dtype=np.float64)
        if len(points) != len(weights):
            raise ValueError(f"{len(points)} atoms but {len(weights)} weights")
        if np.any(weights < 0.0):
            raise ValueError("weights must be nonnegative")
        if self.normalized and abs(fixed_order_sum(weights) - 1.0) > MASS_TOLERANCE:
            raise ValueError(f"normalized atoms carry mass {fixed_order_sum(weights)}")
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'weights', weights)

    @classmethod
    def from_log_weights(cls, points, log_weights, generations=None):
        """Normalise exp(log_weights) with max subtraction"""
        log_weights = np.asarray(log_weights, dtype=np.float64)
        weights = np.exp(log_weights - logsumexp(log_weights))
        # renormalise away the rounding left by exp
        weights = weights / fixed_order_sum(weights)
        return cls(points, weights, generations, normalized=True)

    def __len__(self):
        return len(self.weights)

    def total_mass(self):
        return fixed_order_sum(self.weights)

    def to_frame(self):
        names = ['x', 'y'] if self.points.shape[1] == 2 else ['theta', 'x', 'y']
        frame = pd.DataFrame(self.points, columns=names)
        frame['weight'] = self.weights
        if self.generations is not None:
            frame['generation'] = self.generations
        return frame


@dataclass(frozen=True)
class BallSpec:
    """Open ball in the wrap-around metric.

    Radii of 1/2 and above are only accepted with allow_wrap, for whole-space queries.
    """
    center: tuple
    radius: float
    metric: str = 'torus-euclidean'
    allow_wrap: bool = False
    name: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'center', tuple(float(c) for c in self.center))
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.radius >= 0.5 and not self.allow_wrap:
            raise ValueError(f"radius {self.radius} does not give an embedded disk")
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric '{self.metric}'")

    def contains(self, points):
        delta = np.atleast_2d(points) - np.asarray(self.center)[None, :]
        periodic = delta.shape[1] if self.metric == 'torus-euclidean' else 1
        delta[:, :periodic] = wrap_signed(delta[:, :periodic])
        return np.sqrt((delta * delta).sum(axis=1)) < self.radius


def _birkhoff_exponents(curve, G, n, threads=1):
    """sum_{i<n} G(f^i y) + log_stretch for every sample of a generation-n curve"""
    if G.kind == UNSTABLE_EXPANSION:
        # G - Phi cancels term by term
        return np.full(len(curve), n * G.offset)
    if G.kind == ZERO:
        return n * G.offset + curve.log_stretch

    system = curve.system

    def sums_chunk(params):
        totals = np.zeros(len(params))

        def accumulate(k, points, tangents):
            totals[:] += G.evaluate(points, system=system, tangents=tangents)

        replay(system, curve.seed, params, n, visit=accumulate)
        return totals

    return map_chunks(sums_chunk, [np.asarray(curve.params)], threads) + curve.log_stretch


def log_density(curve, G, threads=1):
    """Unnormalised log weights: log seed element + Birkhoff exponent"""
    elements = curve.seed_elements()
    with np.errstate(divide='ignore'):
        return np.log(elements) + _birkhoff_exponents(curve, G, curve.generation, threads)


def density_weights(curve, G, n=None, threads=1):
    """lambda_n as atoms at the generation-n points of the curve"""
    if n is None:
        n = curve.generation
    if n > curve.generation:
        raise MissingHistory(f"curve carries {curve.generation} generations, {n} requested")
    curve = curve.at_generation(n)
    atoms = WeightedAtoms.from_log_weights(curve.points, log_density(curve, G, threads),
                                           np.full(len(curve), n))
    logger.debug("Density for %s at n=%d over %d atoms", G.label, n, len(atoms))
    return atoms


class PushforwardChain(Sequence):
    """f^k_* lambda_n for k < n, built one element at a time.

    Every element carries the lambda_n weights of all samples of the generation-n
    curve unchanged; element k places them at the k-th iterates of the seed
    samples. Iteration advances one element with f, indexing replays from the seed.
    """

    def __init__(self, curve, G, threads=1):
        if curve.generation < 1:
            raise ValueError("chain needs a curve of generation at least 1")
        self.system = curve.system
        self.seed = curve.seed
        self.params = np.asarray(curve.params)
        self.weights = density_weights(curve, G, threads=threads).weights
        self.n = curve.generation
        self.threads = threads

    def __len__(self):
        return self.n

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[k] for k in range(*index.indices(self.n))]
        k = operator.index(index)
        if k < 0:
            k += self.n
        if not 0 <= k < self.n:
            raise IndexError(f"chain has {self.n} elements, index {index} requested")
        return self._element(k, self.positions(k))

    def __iter__(self):
        points = self.positions(0)
        for k in range(self.n):
            if k:
                points = map_chunks(self.system.apply, [points], self.threads)
            yield self._element(k, points)

    def positions(self, k):
        """Seed samples replayed k steps"""
        def replay_chunk(params):
            return replay(self.system, self.seed, params, k)[0]

        return map_chunks(replay_chunk, [self.params], self.threads)

    def _element(self, k, points):
        return WeightedAtoms(points, self.weights, np.full(len(self.weights), k), normalized=True)


def chain_from_curve(curve, G, threads=1):
    """f^k_* lambda_n for k < n from a generation-n curve"""
    return PushforwardChain(curve, G, threads)


def pushforward_chain(seed, system, G, n, policy=None, threads=1):
    """[f^0_* lambda_n, ..., f^{n-1}_* lambda_n] starting from a generation-0 seed curve"""
    if n < 1:
        raise ValueError("n must be at least 1")
    curve = grow(seed, n - seed.generation, system, policy, threads) if seed.generation < n else seed
    if curve.generation != n:
        curve = curve.at_generation(n)
    return chain_from_curve(curve, G, threads)


def cesaro(chain):
    """(1/n) sum of the chain elements as one set of atoms"""
    chain = list(chain)
    if not chain:
        raise ValueError("chain is empty")
    n = len(chain)
    if n == 1:
        return chain[0]
    points = np.concatenate([element.points for element in chain])
    weights = np.concatenate([element.weights for element in chain]) / n
    generations = np.concatenate([
        element.generations if element.generations is not None else np.full(len(element), k)
        for k, element in enumerate(chain)])
    return WeightedAtoms(points, weights, generations, normalized=True)


@dataclass(frozen=True)
class CesaroSummary:
    """Statistics of mu_n = (1/n) sum_k e_k, aligned with the balls and functions asked for"""
    n: int
    ball_measures: Tuple[float, ...]
    integrals: Tuple[float, ...]
    defects: Tuple[float, ...]


def _mean(terms, n):
    if n == 0:
        raise ValueError("chain is empty")
    return fixed_order_sum(np.array(terms, dtype=np.float64)) / n


def cesaro_summary(chain, balls=(), functions=(), system=None, threads=1):
    """Ball measures, integrals and invariance defects of the Cesaro average in one pass.

    The defect of F is |sum_k int F de_k - sum_k int F o f de_k| / n; defects are
    only computed when a system is given.
    """
    ball_terms = [[] for _ in balls]
    before = [[] for _ in functions]
    after = [[] for _ in functions]
    n = 0
    for element in chain:
        n += 1
        for terms, ball in zip(ball_terms, balls):
            terms.append(measure_of_ball(element, ball, threads))
        for terms, F in zip(before, functions):
            terms.append(integrate(element, F, system))
        if system is not None and functions:
            image = map_chunks(system.apply, [element.points], threads)
            for terms, F in zip(after, functions):
                terms.append(weighted_sum(element.weights, F.evaluate(image, system=system)))
    if n == 0:
        raise ValueError("chain is empty")
    integrals = tuple(_mean(terms, n) for terms in before)
    defects = tuple(abs(_mean(b, n) - _mean(a, n)) for b, a in zip(before, after)) if system is not None else ()
    return CesaroSummary(n, tuple(_mean(terms, n) for terms in ball_terms), integrals, defects)


def average_measure_of_ball(chain, ball, threads=1):
    """mu_n(B) without materialising mu_n"""
    terms = [measure_of_ball(element, ball, threads) for element in chain]
    return _mean(terms, len(terms))


def average_integral(chain, F, system=None):
    terms = [integrate(element, F, system) for element in chain]
    return _mean(terms, len(terms))


def measure_of_ball(mu, ball, threads=1):
    inside = map_chunks(ball.contains, [mu.points], threads)
    return weighted_sum(mu.weights, inside)


def integrate(mu, F, system=None):
    return weighted_sum(mu.weights, F.evaluate(mu.points, system=system))


def invariance_defect(chain, system, F, threads=1):
    """|int F d mu_n - int F o f d mu_n| for the Cesaro average of the chain"""
    return cesaro_summary(chain, functions=[F], system=system, threads=threads).defects[0]


def invariance_bound(F, system, n):
    return 2.0 * F.sup_norm(system) / n


def fourier_test_family():
    """Test functions 1, cos 2pi x, sin 2pi y, cos 2pi (x + y)"""
    return [
        Potential.constant(1.0),
        Potential(kind=FOURIER, modes=(FourierMode(1, 0, 1.0),), name='cos2pix'),
        Potential(kind=FOURIER, modes=(FourierMode(0, 1, 1.0, 0.25),), name='sin2piy'),
        Potential(kind=FOURIER, modes=(FourierMode(1, 1, 1.0),), name='cos2pi(x+y)'),
    ]
