"""Potentials G and test functions F on phase space."""
import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)

ZERO = 'zero'
UNSTABLE_EXPANSION = 'unstable-expansion'
FOURIER = 'fourier'
CUSTOM = 'custom'
KINDS = (ZERO, UNSTABLE_EXPANSION, FOURIER, CUSTOM)


@dataclass(frozen=True)
class FourierMode:
    """amplitude * cos(2 pi (kx x + ky y - phase)), phase in turns"""
    kx: int
    ky: int
    amplitude: float
    phase: float = 0.0

    def __post_init__(self):
        if int(self.kx) != self.kx or int(self.ky) != self.ky:
            raise ValueError(f"wave numbers ({self.kx}, {self.ky}) must be integers")
        object.__setattr__(self, 'kx', int(self.kx))
        object.__setattr__(self, 'ky', int(self.ky))

    def evaluate(self, points):
        points = np.atleast_2d(points)
        argument = self.kx * points[:, 0] + self.ky * points[:, 1] - self.phase
        return self.amplitude * np.cos(2.0 * math.pi * argument)

    @property
    def label(self):
        return f"{self.amplitude:g}cos2pi({self.kx}x+{self.ky}y-{self.phase:g})"


@dataclass(frozen=True)
class Potential:
    """Continuous real function on phase space.

    On the solenoid Fourier modes read the first two coordinates (theta, x).
    The unstable-expansion kind is -log|Df|E^u| and needs the system plus a unit
    tangent at each point; without tangents the system's default direction is used.
    """
    kind: str = ZERO
    modes: Tuple[FourierMode, ...] = ()
    offset: float = 0.0
    function: Optional[Callable] = None
    name: str = ''

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown potential kind '{self.kind}'")
        if self.kind == CUSTOM and self.function is None:
            raise ValueError("custom potential needs a function")
        object.__setattr__(self, 'modes', tuple(
            m if isinstance(m, FourierMode) else FourierMode(*m) for m in self.modes))
        object.__setattr__(self, 'offset', float(self.offset))

    @classmethod
    def zero(cls):
        return cls(kind=ZERO, name='zero')

    @classmethod
    def constant(cls, value):
        return cls(kind=ZERO, offset=value, name=f'constant {value:g}')

    @classmethod
    def unstable_expansion(cls):
        return cls(kind=UNSTABLE_EXPANSION, name='unstable-expansion')

    @classmethod
    def fourier(cls, modes, offset=0.0, name=''):
        return cls(kind=FOURIER, modes=tuple(modes), offset=offset, name=name or 'fourier')

    @classmethod
    def custom(cls, function, name='custom'):
        return cls(kind=CUSTOM, function=function, name=name)

    @property
    def is_constant(self):
        return self.kind == ZERO

    @property
    def label(self):
        if self.name:
            return self.name
        if self.kind == FOURIER:
            return '+'.join(m.label for m in self.modes) or 'fourier'
        return self.kind

    def shifted(self, c):
        """G + c"""
        return replace(self, offset=self.offset + float(c))

    def evaluate(self, points, system=None, tangents=None):
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if self.kind == ZERO:
            values = np.zeros(len(points))
        elif self.kind == FOURIER:
            values = np.zeros(len(points))
            for mode in self.modes:
                values = values + mode.evaluate(points)
        elif self.kind == CUSTOM:
            values = np.asarray(self.function(points), dtype=np.float64)
        else:
            if system is None:
                raise ValueError("unstable-expansion potential needs its system")
            if tangents is None:
                tangents = system.default_tangent(points)
            stretch, _ = system.log_stretch(points, tangents)
            values = -stretch
        return values + self.offset

    def sup_norm(self, system, resolution=64):
        """max |G| estimated on a regular sample grid"""
        values = self.evaluate(system.sample_grid(resolution), system=system)
        return float(np.max(np.abs(values)))
