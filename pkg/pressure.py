"""Pressure estimators: curve growth, (n, epsilon)-separated sets and volume growth.

Each estimator returns a PressureSeries of (n, (1/n) log Z_n) entries.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
import pandas as pd
from scipy.special import logsumexp

from curves import advance
from errors import GridTooCoarse, UnsupportedSystem
from gibbs import log_density
from potentials import Potential
from systems import CatMap

logger = logging.getLogger(__name__)

METHODS = ('curve-growth', 'volume-growth', 'separated-sets', 'periodic-orbits')
MAX_SEPARATED_N = 10
DEFAULT_GRID_SIZE = 1024
FITS = ('richardson', 'slope')
SLOPE_MIN_N = 3


@dataclass(frozen=True)
class PressureSeries:
    """(n, value) entries of one estimator.

    fit='richardson' cancels a C/n term using the last two entries. fit='slope' is the
    least-squares slope of n v_n against n over the entries with n >= SLOPE_MIN_N, for
    counts whose log carries a bounded, non-smooth offset (separated sets on a grid).
    """
    method: str
    entries: Tuple[Tuple[int, float], ...] = ()
    label: str = ''
    fit: str = 'richardson'

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown pressure method '{self.method}'")
        if self.fit not in FITS:
            raise ValueError(f"unknown extrapolation '{self.fit}'")
        entries = tuple(sorted((int(n), float(v)) for n, v in self.entries))
        if any(n < 1 for n, _ in entries):
            raise ValueError("entries need n >= 1")
        object.__setattr__(self, 'entries', entries)

    @property
    def extrapolated(self):
        if not self.entries:
            return math.nan
        if len(self.entries) == 1:
            return self.entries[-1][1]
        if self.fit == 'slope':
            tail = [(n, v) for n, v in self.entries if n >= SLOPE_MIN_N]
            if len(tail) >= 2:
                ns = np.array([n for n, _ in tail], dtype=np.float64)
                vs = np.array([v for _, v in tail])
                return float(np.polyfit(ns, ns * vs, 1)[0])
        (n0, v0), (n1, v1) = self.entries[-2], self.entries[-1]
        return (n1 * v1 - n0 * v0) / (n1 - n0)

    @property
    def last(self):
        return self.entries[-1][1] if self.entries else math.nan

    def to_frame(self):
        frame = pd.DataFrame(self.entries, columns=['n', 'value'])
        frame.insert(0, 'method', self.method)
        frame['extrapolated'] = self.extrapolated
        return frame


def _log_partition_of(curve, G, threads=1):
    return float(logsumexp(log_density(curve, G, threads)))


def log_partition(seed, system, G, n, policy=None, threads=1):
    """log of int_{W} exp(sum_{i<n} (G - Phi)(f^i y)) d lambda(y)"""
    curve = seed
    while curve.generation < n:
        curve = advance(curve, system, policy, threads)
    if curve.generation > n:
        curve = curve.at_generation(n)
    return _log_partition_of(curve, G, threads)


def _growth_series(seed, system, estimates, n_max, policy, threads):
    """One sequence of advances feeding several (method, potential) estimates"""
    if n_max < 2:
        raise ValueError("n_max must be at least 2 for extrapolation")
    if seed.generation != 0:
        raise ValueError("growth estimates start from a generation-0 seed")
    curve = seed
    entries = {method: [] for method, _ in estimates}
    for n in range(1, n_max + 1):
        curve = advance(curve, system, policy, threads)
        for method, G in estimates:
            value = _log_partition_of(curve, G, threads) / n
            entries[method].append((n, value))
            logger.info("%s n=%d: %.10f (%d samples)", method, n, value, len(curve))
    return [PressureSeries(method, tuple(entries[method]), G.label) for method, G in estimates]


def pressure_curve_growth(seed, system, G, n_max, policy=None, threads=1):
    return _growth_series(seed, system, [('curve-growth', G)], n_max, policy, threads)[0]


def entropy_volume_growth(seed, system, n_max, policy=None, threads=1):
    """(1/n) log of the transported length of f^n W; the G = 0 case of curve growth"""
    return _growth_series(seed, system, [('volume-growth', Potential.zero())], n_max, policy, threads)[0]


def curve_growth_estimates(seed, system, G, n_max, policy=None, threads=1):
    """Curve-growth pressure of G and volume-growth entropy from the same advances"""
    return _growth_series(seed, system, [('curve-growth', G), ('volume-growth', Potential.zero())],
                          n_max, policy, threads)


def _torus_norm(coordinates, m):
    folded = np.minimum(coordinates, m - coordinates).astype(np.float64) / m
    return np.sqrt((folded * folded).sum(axis=1))


def _is_dyadic(epsilon):
    exponent = math.log2(1.0 / epsilon)
    return epsilon > 0 and abs(exponent - round(exponent)) < 1e-12


def pressure_separated_sets(system, G, n_max, epsilon, grid_size=None, threads=1):
    """Greedy maximal (n, epsilon)-separated sets on the grid (1/m) Z^2.

    Candidates are visited in descending order of their Birkhoff sum, ties in
    row-major order. The Bowen ball around a grid point x is x + D where D is
    computed once per n with exact integer arithmetic mod m.
    """
    if not isinstance(system, CatMap):
        raise UnsupportedSystem("separated sets are enumerated for CAT maps only")
    if not 1 <= n_max <= MAX_SEPARATED_N:
        raise ValueError(f"n_max must lie in [1, {MAX_SEPARATED_N}]")
    if not _is_dyadic(epsilon):
        raise ValueError(f"epsilon {epsilon} is not of the form 1/2^k")
    m = int(grid_size) if grid_size else max(DEFAULT_GRID_SIZE, int(math.ceil(4.0 / epsilon)))
    if 1.0 / m > epsilon / 4.0:
        raise GridTooCoarse(f"grid pitch 1/{m} exceeds epsilon/4 = {epsilon / 4.0}")

    a, b, c, d = system.entries
    index = np.arange(m * m, dtype=np.int64)
    grid = np.column_stack([index // m, index % m])
    orbit = grid.copy()
    offsets = grid.copy()
    bowen_radius = np.zeros(m * m)
    sums = np.zeros(m * m)
    entries = []

    for n in range(1, n_max + 1):
        sums += G.evaluate(orbit.astype(np.float64) / m, system=system)
        bowen_radius = np.maximum(bowen_radius, _torus_norm(offsets, m))
        orbit = np.column_stack([(a * orbit[:, 0] + b * orbit[:, 1]) % m,
                                 (c * orbit[:, 0] + d * orbit[:, 1]) % m])
        offsets = np.column_stack([(a * offsets[:, 0] + b * offsets[:, 1]) % m,
                                   (c * offsets[:, 0] + d * offsets[:, 1]) % m])

        ball = grid[bowen_radius <= epsilon]
        order = np.argsort(-sums, kind='stable')
        blocked = np.zeros(m * m, dtype=bool)
        selected = []
        for candidate in order.tolist():
            if blocked[candidate]:
                continue
            selected.append(candidate)
            row, col = divmod(candidate, m)
            blocked[((row + ball[:, 0]) % m) * m + (col + ball[:, 1]) % m] = True
        value = float(logsumexp(sums[selected])) / n
        entries.append((n, value))
        logger.info("separated-sets n=%d eps=%g: %d points, %.10f", n, epsilon, len(selected), value)
    return PressureSeries('separated-sets', tuple(entries), G.label, fit='slope')
