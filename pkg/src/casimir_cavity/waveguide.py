"""Classical waves in a waveguide (Ly -> infinity) with an oscillating side wall.

An incident right-going packet sum_n f_n N_n cos(ny y - w_n t) sin(nx x) leaves
the drive region as a right-going part weighted by alpha and a generated
left-going part weighted by beta. To leading order the left-going amplitude
at k is f(partner of k) * beta_k, so its intensity is f(partner)^2 N_k.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .cavity import CavityGeometry, Wall, WallMotion
from .perturbation import (
    TwoWallConfig,
    _partner_sq,
    _photon_number_array,
    nearest_partner_index,
    photon_number_two_walls,
)


@dataclass(frozen=True)
class WavePacket:
    """Real amplitude distribution f sampled on a strictly increasing ky_bar grid.

    ``kx=None`` means f does not depend on the transverse mode, which is
    what a ``ky_bar,f`` table describes. With an integer ``kx`` the packet
    occupies that transverse mode only.
    """

    ky_samples: np.ndarray
    f_values: np.ndarray
    kx: Optional[int] = None

    def __post_init__(self):
        ky = np.asarray(self.ky_samples, dtype=float)
        f = np.asarray(self.f_values, dtype=float)
        if ky.ndim != 1 or ky.size == 0:
            raise ValueError("packet needs at least one ky sample")
        if ky.shape != f.shape:
            raise ValueError("ky_samples and f_values differ in length")
        if np.any(ky <= 0):
            raise ValueError("ky samples must be positive")
        if np.any(np.diff(ky) <= 0):
            raise ValueError("ky samples must be strictly increasing")
        if not np.all(np.isfinite(f)):
            raise ValueError("f values must be finite")
        if self.kx is not None and (int(self.kx) != self.kx or self.kx < 1):
            raise ValueError("kx must be a positive integer or None")
        object.__setattr__(self, "ky_samples", ky)
        object.__setattr__(self, "f_values", f)

    @classmethod
    def from_csv(cls, path, kx: Optional[int] = None) -> "WavePacket":
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or set(reader.fieldnames) != {"ky_bar", "f"}:
                raise ValueError(f"{path}: expected header 'ky_bar,f', got {reader.fieldnames}")
            rows = [(float(r["ky_bar"]), float(r["f"])) for r in reader]
        if not rows:
            raise ValueError(f"{path}: packet file has no samples")
        ky, f = zip(*rows)
        return cls(np.array(ky), np.array(f), kx)

    def scaled(self, factor: float) -> "WavePacket":
        return WavePacket(self.ky_samples, factor * self.f_values, self.kx)

    def f_at(self, ky_bar) -> np.ndarray:
        """Linear interpolation of f; zero outside the sampled band."""
        ky_bar = np.asarray(ky_bar, dtype=float)
        if self.ky_samples.size == 1:
            return np.where(np.isclose(ky_bar, self.ky_samples[0], rtol=1e-12, atol=0.0), self.f_values[0], 0.0)
        return np.interp(ky_bar, self.ky_samples, self.f_values, left=0.0, right=0.0)


@dataclass(frozen=True)
class ScatteredWaves:
    """Per-mode amplitudes after the drive, one row per (kx, ky_bar) point."""

    kx: np.ndarray
    kx_bar: np.ndarray
    ky_bar: np.ndarray
    omega: np.ndarray
    right_going: np.ndarray
    left_going: np.ndarray
    photon_number: np.ndarray
    ky_weights: np.ndarray
    f_partner: np.ndarray

    @property
    def left_intensity(self) -> np.ndarray:
        # f(partner)^2 N_k directly, so f = 1 returns N_k bit for bit
        return self.f_partner**2 * self.photon_number

    @property
    def right_intensity(self) -> np.ndarray:
        return np.abs(self.right_going) ** 2

    @property
    def amplification(self) -> np.ndarray:
        return 1.0 + self.photon_number


def normalization(omega, geom: CavityGeometry):
    """Mode normalization sqrt(2 / (w pi Lx Lz))."""
    return np.sqrt(2.0 / (np.asarray(omega) * math.pi * geom.Lx * geom.Lz))


def _quadrature_weights(ky: np.ndarray) -> np.ndarray:
    if ky.size == 1:
        return np.ones(1)
    w = np.zeros_like(ky)
    d = np.diff(ky)
    w[:-1] += d / 2.0
    w[1:] += d / 2.0
    return w


def _right_motion(drive) -> WallMotion:
    if isinstance(drive, TwoWallConfig):
        return drive.right
    if drive.wall is not Wall.RIGHT:
        raise ValueError("single-wall waveguide runs need the right wall")
    return drive


def _partner_parity(kx_bar, ky_bar, Omega, geom):
    """(-1)^(kx + nx) with nx the nearest integer partner; +1 where there is none."""
    _, radicand, ok = _partner_sq(kx_bar, ky_bar, Omega)
    parity = np.ones_like(kx_bar)
    nx = np.zeros(kx_bar.shape, dtype=int)
    kx = np.rint(kx_bar * geom.Lx / math.pi).astype(int)
    for i in np.flatnonzero(ok):
        nx[i], _ = nearest_partner_index(math.sqrt(radicand[i]), geom, warn=False)
        parity[i] = -1.0 if (kx[i] + nx[i]) % 2 else 1.0
    return parity, nx, ok


def generated_wave_spectrum(
    packet: WavePacket,
    drive: Union[WallMotion, TwoWallConfig],
    geom: CavityGeometry,
    out_grid: Sequence[float],
    out_kx: Optional[Sequence[int]] = None,
) -> ScatteredWaves:
    """Right- and left-going spectra on transverse modes ``out_kx`` times ``out_grid``.

    ``out_kx`` defaults to every transverse mode with kx_bar < Omega. The
    left-going amplitude is f(partner) times the resonant beta,
    -(-1)^(kx+nx) sqrt(N_k) e^{i phase}; for two walls its modulus carries
    the interference-corrected N_k.
    """
    motion = _right_motion(drive)
    ky = np.asarray(out_grid, dtype=float)
    if ky.ndim != 1 or ky.size == 0:
        raise ValueError("out_grid must be a non-empty list of ky_bar values")
    if np.any(ky <= 0):
        raise ValueError("out_grid values must be positive")
    if out_kx is None:
        top = int(math.ceil(motion.Omega * geom.Lx / math.pi)) - 1
        out_kx = range(1, max(top, 1) + 1)
    kx_modes = np.asarray(list(out_kx), dtype=int)
    if np.any(kx_modes < 1):
        raise ValueError("out_kx entries must be positive integers")

    KX, KY = np.meshgrid(kx_modes, ky, indexing="ij")
    kx_idx = KX.ravel()
    ky_bar = KY.ravel()
    kx_bar = kx_idx * math.pi / geom.Lx
    omega = np.hypot(kx_bar, ky_bar)
    weights = np.tile(_quadrature_weights(ky), kx_modes.size)

    if isinstance(drive, TwoWallConfig):
        N = np.array([photon_number_two_walls(a, b, drive, geom).N for a, b in zip(kx_bar, ky_bar)])
    else:
        N = _photon_number_array(kx_bar, ky_bar, motion, normalized=False)
    parity, nx, ok = _partner_parity(kx_bar, ky_bar, motion.Omega, geom)

    # the partner shares ky_bar with k, so f is looked up at ky_bar
    f_partner = packet.f_at(ky_bar)
    if packet.kx is not None:
        f_partner = np.where(ok & (nx == packet.kx), f_partner, 0.0)
    beta = -parity * np.sqrt(N) * np.exp(1j * motion.phase)
    left = f_partner * beta

    f_incident = packet.f_at(ky_bar)
    if packet.kx is not None:
        f_incident = np.where(kx_idx == packet.kx, f_incident, 0.0)
    right = f_incident.astype(complex)

    return ScatteredWaves(
        kx=kx_idx,
        kx_bar=kx_bar,
        ky_bar=ky_bar,
        omega=omega,
        right_going=right,
        left_going=left,
        photon_number=N,
        ky_weights=weights,
        f_partner=f_partner,
    )


def amplification_estimate(packet: WavePacket, drive, geom: CavityGeometry, k) -> float:
    """Order-of-magnitude intensity gain 1 + N_k of the incident wave at k = (kx_bar, ky_bar)."""
    kx_bar, ky_bar = k
    motion = _right_motion(drive)
    if isinstance(drive, TwoWallConfig):
        N = photon_number_two_walls(kx_bar, ky_bar, drive, geom).N
    else:
        N = float(_photon_number_array(kx_bar, ky_bar, motion, normalized=False))
    return 1.0 + N


def reconstruct_field(waves: ScatteredWaves, x, y, t: float, geom: CavityGeometry):
    """Post-drive vector potential A(x, y, t).

    Complex amplitudes a enter as Re(a e^{i(ky y -/+ w t)}), which reduces to
    a cos(ky y -/+ w t) for real a. The ky integral uses trapezoid weights
    (unit weight for a single sample).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    norm = normalization(waves.omega, geom) * waves.ky_weights
    phase_y = np.multiply.outer(y, waves.ky_bar)
    wt = waves.omega * t
    right = np.real(waves.right_going * np.exp(1j * (phase_y - wt)))
    left = np.real(waves.left_going * np.exp(1j * (phase_y + wt)))
    profile = np.sin(np.multiply.outer(x, waves.kx_bar))
    field = np.sum(norm * (right + left) * profile, axis=-1)
    return float(field) if field.ndim == 0 else field
