"""First-order (in the wall amplitude) closed forms.

Conventions match :func:`casimir_cavity.dynamics.extract_bogoliubov`: the
post-drive amplitude is sqrt(2 w_k) Q_k = alpha_k e^{-i w_k t} + beta_k e^{+i w_k t},
and a drive phase p enters the s = +/- branches as e^{+/- i p}.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .cavity import (
    CavityGeometry,
    ModeIndex,
    ModeSet,
    Wall,
    WallMotion,
    coupling_coefficient,
    fundamental_frequency,
    mode_frequency,
    wavenumber,
)

UNIT_NORMALIZED = "(eps*Omega*T/2)^2"
UNIT_ABSOLUTE = "absolute"

#: |Delta T| below which the kernel switches to its Taylor series.
_KERNEL_SERIES = 1e-6
#: Distance of n_x from the nearest integer above which a parity warning is raised.
PARITY_WARN = 0.25


def _sign(value, name):
    if value not in (1, -1):
        raise ValueError(f"{name} must be +1 or -1, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class WIndices:
    k: ModeIndex
    n: ModeIndex
    sigma: int
    sigma_prime: int
    s: int

    def __post_init__(self):
        for name in ("sigma", "sigma_prime", "s"):
            object.__setattr__(self, name, _sign(getattr(self, name), name))


@dataclass(frozen=True)
class TwoWallConfig:
    left: WallMotion
    right: WallMotion

    def __post_init__(self):
        if self.left.wall is not Wall.LEFT:
            raise ValueError("left motion must have wall=left")
        if self.right.wall is not Wall.RIGHT:
            raise ValueError("right motion must have wall=right")

    @property
    def phase_difference(self) -> float:
        return self.left.phase - self.right.phase

    @property
    def coherent(self) -> bool:
        """True when both walls share a frequency within the finite-time kernel width."""
        width = 2.0 * math.pi / min(self.left.duration_T, self.right.duration_T)
        return abs(self.left.Omega - self.right.Omega) < width


Drive = Union[WallMotion, TwoWallConfig]


def w_coefficient(idx: WIndices, Omega: float, geom: CavityGeometry) -> float:
    k, n = idx.k, idx.n
    wk = mode_frequency(k, geom)
    wn = mode_frequency(n, geom)
    g = coupling_coefficient(k, n)
    value = Omega * g * math.sqrt(wn / wk) * (idx.s * Omega / (4.0 * wn) + idx.sigma_prime / 2.0)
    if k == n:
        kxb, _ = wavenumber(k, geom)
        value -= idx.s * kxb**2 / (2.0 * wk)
    return idx.sigma * value


def finite_time_kernel(Delta, T: float):
    """Integral of exp(-i Delta t) over 0 < t < T; accepts scalars or arrays."""
    if T <= 0:
        raise ValueError("T must be positive")
    D = np.asarray(Delta, dtype=float)
    x = D * T
    small = np.abs(x) < _KERNEL_SERIES
    safe = np.where(small, 1.0, x)
    # (1 - e^{-ix}) / (i Delta) written as T e^{-ix/2} sin(x/2) / (x/2), free of cancellation
    exact = T * np.exp(-0.5j * x) * np.sin(0.5 * safe) / (0.5 * safe)
    series = T * (1.0 - 0.5j * x - x * x / 6.0)
    out = np.where(small, series, exact)
    return complex(out) if out.ndim == 0 else out


def first_order_amplitude(
    n: ModeIndex, k: ModeIndex, t: float, Omega: float, geom: CavityGeometry, phase: float = 0.0
) -> complex:
    """Q^(1)_nk(t), all four (sigma, s) branches kept."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return 0j
    wk = mode_frequency(k, geom)
    wn = mode_frequency(n, geom)
    total = 0j
    for sigma in (1, -1):
        for s in (1, -1):
            w = w_coefficient(WIndices(k, n, sigma, -1, s), Omega, geom)
            if w == 0.0:
                continue
            kern = finite_time_kernel(sigma * wk - s * Omega + wn, t)
            total += w * np.exp(1j * (sigma * wk * t + s * phase)) / math.sqrt(2.0 * wk) * kern
    return total


def beta_analytic(n: ModeIndex, k: ModeIndex, motion: WallMotion, geom: CavityGeometry) -> complex:
    """Leading resonant beta_nk = eps w^+_{k+,n-} K(w_k + w_n - Omega, T) e^{i phase}."""
    if motion.wall is not Wall.RIGHT:
        raise ValueError("beta_analytic is defined for the right wall")
    w = w_coefficient(WIndices(k, n, 1, -1, 1), motion.Omega, geom)
    if w == 0.0:
        return 0j
    detuning = mode_frequency(k, geom) + mode_frequency(n, geom) - motion.Omega
    return motion.epsilon * w * finite_time_kernel(detuning, motion.duration_T) * np.exp(1j * motion.phase)


def beta_first_order(n: ModeIndex, k: ModeIndex, motion: WallMotion, geom: CavityGeometry) -> complex:
    """Full first-order beta_nk: the resonant branch plus the s = - branch."""
    w = w_coefficient(WIndices(k, n, 1, -1, -1), motion.Omega, geom)
    extra = 0j
    if w != 0.0:
        detuning = mode_frequency(k, geom) + mode_frequency(n, geom) + motion.Omega
        extra = motion.epsilon * w * finite_time_kernel(detuning, motion.duration_T) * np.exp(-1j * motion.phase)
    return beta_analytic(n, k, motion, geom) + extra


def _partner_sq(kx_bar, ky_bar, Omega):
    kx_bar = np.asarray(kx_bar, dtype=float)
    ky_bar = np.asarray(ky_bar, dtype=float)
    omega = np.hypot(kx_bar, ky_bar)
    radicand = kx_bar**2 - 2.0 * Omega * omega + Omega**2
    ok = (omega < Omega) & (radicand > 0)
    return omega, radicand, ok


def resonance_partner(kx_bar: float, ky_bar: float, Omega: float) -> Optional[float]:
    """x wavenumber of the mode paired with (kx_bar, ky_bar), or None if there is none."""
    if kx_bar <= 0 or ky_bar <= 0:
        raise ValueError("wavenumbers must be positive")
    _, radicand, ok = _partner_sq(kx_bar, ky_bar, Omega)
    return math.sqrt(float(radicand)) if bool(ok) else None


def _photon_number_array(kx_bar, ky_bar, motion: WallMotion, normalized: bool):
    Omega = motion.Omega
    omega, radicand, ok = _partner_sq(kx_bar, ky_bar, Omega)
    kx_bar = np.asarray(kx_bar, dtype=float)
    denom = np.where(ok, omega * (Omega - omega), 1.0)
    shape = kx_bar**2 * np.where(ok, radicand, 0.0) / denom
    if normalized:
        return shape / Omega**2 if motion.epsilon > 0 else np.zeros_like(shape)
    return (motion.epsilon * motion.duration_T / 2.0) ** 2 * shape


def photon_number(kx_bar: float, ky_bar: float, motion: WallMotion, normalized: bool = False) -> float:
    """Created photon number N_k in the continuum form.

    With ``normalized=True`` the result is in units of (eps Omega T / 2)^2.
    """
    if kx_bar <= 0 or ky_bar <= 0:
        raise ValueError("wavenumbers must be positive")
    return float(_photon_number_array(kx_bar, ky_bar, motion, normalized))


def discrete_photon_number(k: ModeIndex, motion: WallMotion, ms: ModeSet) -> float:
    """sum_n |beta_analytic(n, k)|^2 over the truncated lattice."""
    geom = ms.geometry
    return float(sum(abs(beta_analytic(n, k, motion, geom)) ** 2 for n in ms if n.ky == k.ky))


def nearest_partner_index(nx_bar: float, geom: CavityGeometry, warn: bool = True) -> tuple[int, float]:
    """Integer x mode closest to a continuous partner wavenumber, and its distance."""
    exact = nx_bar * geom.Lx / math.pi
    nx = max(1, int(round(exact)))
    distance = abs(exact - nx)
    if warn and distance > PARITY_WARN:
        warnings.warn(
            f"resonance partner n_x={exact:.3f} is {distance:.2f} from an integer; parity is ambiguous",
            stacklevel=2,
        )
    return nx, distance


@dataclass(frozen=True)
class TwoWallResult:
    N: float
    N_left: float
    N_right: float
    coherent: bool
    kx: Optional[int]
    nx: Optional[int]
    parity: int
    gamma: float

    def __float__(self):
        return self.N


def photon_number_two_walls(
    kx_bar: float, ky_bar: float, cfg: TwoWallConfig, geom: CavityGeometry, normalized: bool = False
) -> TwoWallResult:
    """Photon number with both side walls driven, including the interference term.

    In normalized mode everything is expressed in the right wall's (eps Omega T / 2)^2.
    """
    right = cfg.right
    N_right = photon_number(kx_bar, ky_bar, right)
    N_left = photon_number(kx_bar, ky_bar, cfg.left)
    gamma = right.Omega / fundamental_frequency(geom)
    scale = (right.epsilon * right.Omega * right.duration_T / 2.0) ** 2 if normalized else 1.0
    kx = nx = None
    parity = 1
    if cfg.coherent:
        partner = resonance_partner(kx_bar, ky_bar, right.Omega)
        if partner is None:
            return TwoWallResult(0.0, 0.0, 0.0, True, None, None, 1, gamma)
        kx = max(1, int(round(kx_bar * geom.Lx / math.pi)))
        nx, _ = nearest_partner_index(partner, geom)
        parity = -1 if (kx + nx) % 2 else 1
        cross = 2.0 * math.sqrt(N_left * N_right) * math.cos(cfg.phase_difference)
        total = N_left + N_right - parity * cross
    else:
        total = N_left + N_right
    if scale == 0.0:
        return TwoWallResult(0.0, 0.0, 0.0, cfg.coherent, kx, nx, parity, gamma)
    return TwoWallResult(
        max(total, 0.0) / scale, N_left / scale, N_right / scale, cfg.coherent, kx, nx, parity, gamma
    )


@dataclass(frozen=True)
class ScanGrid:
    """Rectangular grid of (kx_bar, ky_bar) points given by inclusive ranges."""

    kx_min: float
    kx_max: float
    kx_count: int
    ky_min: float
    ky_max: float
    ky_count: int

    def __post_init__(self):
        for axis in ("kx", "ky"):
            lo, hi, n = (getattr(self, f"{axis}_{p}") for p in ("min", "max", "count"))
            if n < 1:
                raise ValueError(f"{axis}_count must be at least 1")
            if lo <= 0 or hi < lo:
                raise ValueError(f"{axis} range must satisfy 0 < min <= max")

    @classmethod
    def default(cls, Omega: float, count: int = 200, ky_floor: float = 1e-4):
        """kx on Omega * i / count (contains Omega / 2 for even counts); ky starts near zero."""
        return cls(Omega / count, Omega, count, ky_floor * Omega, Omega, count)

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.linspace(self.kx_min, self.kx_max, self.kx_count),
            np.linspace(self.ky_min, self.ky_max, self.ky_count),
        )

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened points, ky outer and kx inner."""
        kx, ky = self.axes()
        KY, KX = np.meshgrid(ky, kx, indexing="ij")
        return KX.ravel(), KY.ravel()


@dataclass(frozen=True)
class PhotonSpectrum:
    kx_bar: np.ndarray
    ky_bar: np.ndarray
    values: np.ndarray
    unit: str

    def __post_init__(self):
        if not (len(self.kx_bar) == len(self.ky_bar) == len(self.values)):
            raise ValueError("grid and values must have the same length")

    def __len__(self):
        return len(self.values)


def _evaluate(kx, ky, drive: Drive, geom, normalized):
    if isinstance(drive, TwoWallConfig):
        if geom is None:
            raise ValueError("a geometry is needed for the two-wall parity")
        return np.array(
            [photon_number_two_walls(a, b, drive, geom, normalized).N for a, b in zip(kx, ky)]
        )
    return _photon_number_array(kx, ky, drive, normalized)


def spectrum_scan(
    grid,
    drive: Drive,
    geom: Optional[CavityGeometry] = None,
    normalized: bool = True,
    threads: int = 1,
) -> PhotonSpectrum:
    """Tabulate N_k over a :class:`ScanGrid` or an explicit ``(kx_bar, ky_bar)`` pair of arrays."""
    if isinstance(grid, ScanGrid):
        kx, ky = grid.points()
    else:
        kx, ky = (np.atleast_1d(np.asarray(a, dtype=float)) for a in grid)
    if kx.size == 0:
        raise ValueError("empty scan grid")
    if np.any(kx <= 0) or np.any(ky <= 0):
        raise ValueError("scan points must have positive wavenumbers")
    if threads > 1 and kx.size > threads:
        chunks = np.array_split(np.arange(kx.size), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = pool.map(lambda idx: _evaluate(kx[idx], ky[idx], drive, geom, normalized), chunks)
            values = np.concatenate(list(parts))
    else:
        values = _evaluate(kx, ky, drive, geom, normalized)
    values = np.maximum(np.asarray(values, dtype=float), 0.0)
    return PhotonSpectrum(kx, ky, values, UNIT_NORMALIZED if normalized else UNIT_ABSOLUTE)


def peak_location(spec: PhotonSpectrum) -> tuple[float, float]:
    """Argmax of the spectrum; ties go to the smallest ky_bar, then the smallest kx_bar."""
    if len(spec) == 0:
        raise ValueError("empty spectrum")
    top = spec.values.max()
    cand = np.flatnonzero(spec.values == top)
    best = min(cand, key=lambda i: (spec.ky_bar[i], spec.kx_bar[i]))
    return float(spec.kx_bar[best]), float(spec.ky_bar[best])
