"""Rectangular cavity with one oscillating side wall: geometry, mode lattice, couplings.

Natural units with c = 1. Only the TE-like family with E along z and no z
dependence is modelled, so a mode is labelled by the pair (kx, ky) of
positive integers.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

#: Above this amplitude the first-order treatment is flagged as questionable.
EPSILON_WARN = 0.01
#: Hard upper bound on the wall amplitude.
EPSILON_MAX = 0.1
#: Default ceiling on kx_max * ky_max for dense coupling matrices.
MAX_MODES = 10_000


class Wall(str, enum.Enum):
    RIGHT = "right"
    LEFT = "left"


@dataclass(frozen=True)
class CavityGeometry:
    """Static box dimensions Lx, Ly, Lz."""

    Lx: float
    Ly: float
    Lz: float = 1.0

    def __post_init__(self):
        for name in ("Lx", "Ly", "Lz"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite length, got {value!r}")


@dataclass(frozen=True)
class WallMotion:
    """Sinusoidal wall oscillation q(t) = L (1 + epsilon sin(Omega t + phase)) for 0 < t < T.

    For ``wall=Wall.LEFT`` the same expression is read as the instantaneous
    cavity width, i.e. the left wall sits at x = -Lx epsilon sin(Omega t + phase).
    """

    epsilon: float
    Omega: float
    duration_T: float
    phase: float = 0.0
    wall: Wall = Wall.RIGHT

    def __post_init__(self):
        object.__setattr__(self, "wall", Wall(self.wall))
        if not (0.0 <= self.epsilon < EPSILON_MAX):
            raise ValueError(f"epsilon must be < {EPSILON_MAX} and >= 0, got {self.epsilon!r}")
        if self.epsilon > EPSILON_WARN:
            warnings.warn(
                f"epsilon={self.epsilon} exceeds {EPSILON_WARN}; results are first order in epsilon",
                stacklevel=3,
            )
        if not (math.isfinite(self.Omega) and self.Omega > 0):
            raise ValueError(f"Omega must be > 0, got {self.Omega!r}")
        if not (math.isfinite(self.duration_T) and self.duration_T > 0):
            raise ValueError(f"duration_T must be > 0, got {self.duration_T!r}")
        if not math.isfinite(self.phase):
            raise ValueError(f"phase must be finite, got {self.phase!r}")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.Omega


@dataclass(frozen=True, order=True)
class ModeIndex:
    kx: int
    ky: int

    def __post_init__(self):
        for name in ("kx", "ky"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ValueError(f"mode index {name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    def __iter__(self):
        return iter((self.kx, self.ky))

    def __str__(self):
        return f"{self.kx}:{self.ky}"


@dataclass(frozen=True)
class ModeSet:
    """Truncated mode lattice 1..kx_max by 1..ky_max.

    Modes are ordered row-major with kx fastest, so every ky row is a
    contiguous slice of length kx_max: ``modes[(ky - 1) * kx_max + (kx - 1)]``.
    """

    geometry: CavityGeometry
    kx_max: int
    ky_max: int
    modes: tuple[ModeIndex, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kx_max < 1 or self.ky_max < 1:
            raise ValueError("kx_max and ky_max must be positive")
        modes = tuple(
            ModeIndex(kx, ky)
            for ky in range(1, self.ky_max + 1)
            for kx in range(1, self.kx_max + 1)
        )
        object.__setattr__(self, "modes", modes)

    def __len__(self) -> int:
        return len(self.modes)

    def __iter__(self) -> Iterator[ModeIndex]:
        return iter(self.modes)

    def __contains__(self, mode) -> bool:
        return 1 <= mode.kx <= self.kx_max and 1 <= mode.ky <= self.ky_max

    def index(self, mode: ModeIndex) -> int:
        if mode not in self:
            raise ValueError(f"mode {mode} is outside the truncation {self.kx_max}x{self.ky_max}")
        return (mode.ky - 1) * self.kx_max + (mode.kx - 1)

    def row_slice(self, ky: int) -> slice:
        """Positions of all modes sharing ``ky``."""
        start = (ky - 1) * self.kx_max
        return slice(start, start + self.kx_max)

    @property
    def kx_array(self) -> np.ndarray:
        return np.array([m.kx for m in self.modes])

    @property
    def ky_array(self) -> np.ndarray:
        return np.array([m.ky for m in self.modes])

    def wavenumbers(self) -> tuple[np.ndarray, np.ndarray]:
        g = self.geometry
        return self.kx_array * math.pi / g.Lx, self.ky_array * math.pi / g.Ly

    def frequencies(self) -> np.ndarray:
        kxb, kyb = self.wavenumbers()
        return np.hypot(kxb, kyb)


@dataclass(frozen=True)
class CouplingMatrix:
    values: np.ndarray
    mode_set: ModeSet = field(repr=False)

    @property
    def shape(self):
        return self.values.shape


def wavenumber(mode: ModeIndex, geom: CavityGeometry) -> tuple[float, float]:
    return mode.kx * math.pi / geom.Lx, mode.ky * math.pi / geom.Ly


def mode_frequency(mode: ModeIndex, geom: CavityGeometry) -> float:
    kxb, kyb = wavenumber(mode, geom)
    return math.hypot(kxb, kyb)


def fundamental_frequency(geom: CavityGeometry) -> float:
    """omega_(1,1), the lowest cavity frequency."""
    return mode_frequency(ModeIndex(1, 1), geom)


def coupling_coefficient(j: ModeIndex, k: ModeIndex) -> float:
    """Intermode coupling g_jk; zero for equal x indices or different y indices."""
    if j.kx == k.kx or j.ky != k.ky:
        return 0.0
    sign = -1.0 if (j.kx + k.kx) % 2 else 1.0
    return sign * 2.0 * j.kx * k.kx / (k.kx**2 - j.kx**2)


def build_coupling_matrix(ms: ModeSet, max_modes: int = MAX_MODES) -> CouplingMatrix:
    size = len(ms)
    if size > max_modes:
        raise ValueError(
            f"truncation of {size} modes exceeds max_modes={max_modes}; raise the limit explicitly"
        )
    kx = ms.kx_array
    ky = ms.ky_array
    J, K = np.meshgrid(kx, kx, indexing="ij")
    same_row = ky[:, None] == ky[None, :]
    mask = same_row & (J != K)
    values = np.zeros((size, size))
    sign = np.where((J + K) % 2 == 1, -1.0, 1.0)
    values[mask] = (sign * 2.0 * J * K)[mask] / (K**2 - J**2)[mask]
    values.setflags(write=False)
    return CouplingMatrix(values=values, mode_set=ms)


def wall_position(t: float, geom: CavityGeometry, motion: WallMotion) -> float:
    if t < 0 or t > motion.duration_T:
        raise ValueError(f"t={t} outside the drive interval [0, {motion.duration_T}]")
    return geom.Lx * (1.0 + motion.epsilon * math.sin(motion.Omega * t + motion.phase))
