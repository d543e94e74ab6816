"""Exact periodic points of CAT maps and the periodic-orbit Gibbs estimator.

Fixed points of A^n on the torus are the solutions of (A^n - I) v in Z^2. With the
Smith form U (A^n - I) V = diag(d1, d2) they are V (k1/d1, k2/d2) mod 1, which
are stored as integer numerators over the common denominator d1 d2.
"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.special import logsumexp
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_smith_normal_form

from errors import PeriodTooLarge, UnsupportedSystem
from gibbs import WeightedAtoms
from parallel import map_chunks
from systems import CatMap

logger = logging.getLogger(__name__)

DEFAULT_MAX_PERIOD = 16


@dataclass(frozen=True, eq=False)
class PeriodicOrbitSet:
    period: int
    numerators: np.ndarray
    denominator: int

    @property
    def count(self):
        return len(self.numerators)

    def points(self):
        return self.numerators.astype(np.float64) / self.denominator

    def to_frame(self):
        return pd.DataFrame({'num_x': self.numerators[:, 0], 'num_y': self.numerators[:, 1],
                             'denominator': self.denominator})


def smith_normal_form(matrix):
    """U, (d1, d2), V with U M V = diag(d1, d2), d1 | d2, d_i >= 0, for an integer 2x2 M.

    matrix is (a, b, c, d) row-major; U and V are unimodular and returned the same way.
    """
    m = [[int(matrix[0]), int(matrix[1])], [int(matrix[2]), int(matrix[3])]]
    u = [[1, 0], [0, 1]]
    v = [[1, 0], [0, 1]]

    def swap_rows():
        m.reverse()
        u.reverse()

    def swap_cols():
        for rows in (m, v):
            for row in rows:
                row.reverse()

    def add_row(target, source, factor):
        for rows in (m, u):
            rows[target] = [t + factor * s for t, s in zip(rows[target], rows[source])]

    def add_col(target, source, factor):
        for rows in (m, v):
            for row in rows:
                row[target] += factor * row[source]

    if all(entry == 0 for row in m for entry in row):
        return _flat(u), (0, 0), _flat(v)

    while True:
        # smallest nonzero entry to the pivot
        _, i, j = min((abs(m[i][j]), i, j) for i in range(2) for j in range(2) if m[i][j])
        if i:
            swap_rows()
        if j:
            swap_cols()
        pivot = m[0][0]
        if m[1][0]:
            add_row(1, 0, -(m[1][0] // pivot))
            continue
        if m[0][1]:
            add_col(1, 0, -(m[0][1] // pivot))
            continue
        if m[1][1] % pivot:
            add_row(0, 1, 1)
            continue
        break

    for index in (0, 1):
        if m[index][index] < 0:
            m[index][index] = -m[index][index]
            u[index] = [-entry for entry in u[index]]
    return _flat(u), (m[0][0], m[1][1]), _flat(v)


def _flat(rows):
    return (rows[0][0], rows[0][1], rows[1][0], rows[1][1])


def _check_with_sympy(matrix, diagonal):
    reference = sympy_smith_normal_form(Matrix(2, 2, list(matrix)), domain=ZZ)
    expected = sorted(abs(int(reference[i, i])) for i in range(2))
    if expected != sorted(diagonal):
        raise ArithmeticError(f"Smith form {diagonal} disagrees with sympy {expected}")


def fixed_point_count(catmap, n):
    """|det(A^n - I)| = |trace(A^n) - 2|"""
    a, _, _, d = catmap.matrix_power(n)
    return abs(a + d - 2)


def _validate(catmap, n, max_period):
    if not isinstance(catmap, CatMap):
        raise UnsupportedSystem("periodic orbits are enumerated for CAT maps only")
    if n < 1:
        raise ValueError(f"period must be at least 1, got {n}")
    if n > max_period:
        raise PeriodTooLarge(f"period {n} exceeds the cap {max_period}")


def enumerate_fixed_points(catmap, n, max_period=DEFAULT_MAX_PERIOD):
    """All x in T^2 with A^n x = x, as exact rationals sorted lexicographically"""
    _validate(catmap, n, max_period)
    a, b, c, d = catmap.matrix_power(n)
    shifted = (a - 1, b, c, d - 1)
    u, (d1, d2), v = smith_normal_form(shifted)
    _check_with_sympy(shifted, (d1, d2))
    denominator = d1 * d2

    k1 = np.repeat(np.arange(d1, dtype=np.int64), d2) * d2
    k2 = np.tile(np.arange(d2, dtype=np.int64), d1) * d1
    v00, v01, v10, v11 = v
    numerators = np.column_stack([(v00 * k1 + v01 * k2) % denominator,
                                  (v10 * k1 + v11 * k2) % denominator])
    order = np.lexsort((numerators[:, 1], numerators[:, 0]))
    numerators = numerators[order]

    if not np.array_equal(catmap.apply_exact(numerators, denominator, power=n), numerators):
        raise ArithmeticError(f"enumerated points are not fixed by A^{n}")
    logger.info("Period %d: %d fixed points over denominator %d", n, len(numerators), denominator)
    return PeriodicOrbitSet(n, numerators, denominator)


def orbit_sums(catmap, G, orbit, threads=1):
    """sum_{i<n} G(A^i x) along each periodic point, iterated exactly"""
    denominator = orbit.denominator

    def sums_chunk(numerators):
        totals = np.zeros(len(numerators))
        for _ in range(orbit.period):
            totals += G.evaluate(numerators.astype(np.float64) / denominator, system=catmap)
            numerators = catmap.apply_exact(numerators, denominator)
        return totals

    return map_chunks(sums_chunk, [orbit.numerators], threads)


def periodic_gibbs_estimate(catmap, G, n, max_period=DEFAULT_MAX_PERIOD, threads=1, orbit=None):
    """Fixed points of A^n weighted proportionally to exp(S_n G)"""
    orbit = orbit or enumerate_fixed_points(catmap, n, max_period)
    sums = orbit_sums(catmap, G, orbit, threads)
    return WeightedAtoms.from_log_weights(orbit.points(), sums)


def periodic_pressure(catmap, G, n, max_period=DEFAULT_MAX_PERIOD, threads=1, orbit=None):
    """(1/n) log sum over fixed points of exp(S_n G)"""
    orbit = orbit or enumerate_fixed_points(catmap, n, max_period)
    return float(logsumexp(orbit_sums(catmap, G, orbit, threads))) / n
