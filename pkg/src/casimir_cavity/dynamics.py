"""Direct integration of the coupled mode equations and Bogoliubov extraction.

The amplitudes Q_nk(t) of the instantaneous basis obey, to first order in
the wall amplitude epsilon,

    Qdd_k = -w_k^2 Q_k + 2 eps kx_bar^2 sin(Wt+p) Q_k
            + 2 eps W cos(Wt+p) sum_j g_kj Qd_j - eps W^2 sin(Wt+p) sum_j g_kj Q_j

with W the drive frequency and p its phase. The system is linear with
coefficients periodic in t, so the classical RK4 map over one drive period is
the same for every period. :func:`bogoliubov_matrix` exploits that: it steps
the basis once over a period, raises the resulting map to the number of whole
periods and steps the remainder, which reproduces fixed-step RK4 on the same
time grid at a fraction of the cost.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .cavity import (
    MAX_MODES,
    CavityGeometry,
    CouplingMatrix,
    ModeIndex,
    ModeSet,
    Wall,
    WallMotion,
    build_coupling_matrix,
)

#: Target for the accumulated RK4 phase error of the fastest mode in default_dt.
DEFAULT_DT_TOL = 1e-9


class IntegrationDiverged(RuntimeError):
    def __init__(self, t: float):
        super().__init__(f"non-finite state encountered at t={t:.6g}")
        self.t = t


@dataclass(frozen=True)
class EomParams:
    geometry: CavityGeometry
    motion: WallMotion
    mode_set: ModeSet
    coupling: CouplingMatrix
    omega: np.ndarray = field(init=False, repr=False, compare=False)
    kx_bar2: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.mode_set)
        if self.coupling.shape != (n, n):
            raise ValueError(f"coupling shape {self.coupling.shape} does not match {n} modes")
        if self.motion.wall is not Wall.RIGHT:
            raise ValueError("the mode equations are only defined for an oscillating right wall")
        if self.mode_set.geometry != self.geometry:
            raise ValueError("mode_set was built for a different geometry")
        kxb, _ = self.mode_set.wavenumbers()
        object.__setattr__(self, "omega", self.mode_set.frequencies())
        object.__setattr__(self, "kx_bar2", kxb**2)

    @classmethod
    def build(cls, geometry, motion, kx_max, ky_max, max_modes=MAX_MODES):
        ms = ModeSet(geometry, kx_max, ky_max)
        return cls(geometry, motion, ms, build_coupling_matrix(ms, max_modes=max_modes))

    @property
    def omega_max(self) -> float:
        return float(self.omega.max())


@dataclass(frozen=True)
class TrajectoryState:
    """Amplitudes and velocities at time t.

    ``Q`` may be a vector over the mode set or a matrix whose columns are
    independent trajectories (the equations are linear).
    """

    t: float
    Q: np.ndarray
    Qdot: np.ndarray

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=complex)
        Qdot = np.asarray(self.Qdot, dtype=complex)
        if Q.shape != Qdot.shape:
            raise ValueError(f"Q shape {Q.shape} != Qdot shape {Qdot.shape}")
        if not (np.all(np.isfinite(Q)) and np.all(np.isfinite(Qdot))):
            raise ValueError("state contains non-finite entries")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "Qdot", Qdot)


@dataclass(frozen=True)
class BogoliubovMatrix:
    """alpha[n, k] and beta[n, k] in mode-set order; n labels the initial mode."""

    alpha: np.ndarray
    beta: np.ndarray
    at_time_T: float
    mode_set: ModeSet = field(repr=False)

    def entry(self, n: ModeIndex, k: ModeIndex) -> tuple[complex, complex]:
        i, j = self.mode_set.index(n), self.mode_set.index(k)
        return complex(self.alpha[i, j]), complex(self.beta[i, j])


def initial_condition(n: ModeIndex, ms: ModeSet) -> TrajectoryState:
    """Pure positive-frequency start e^{-i w t}/sqrt(2w) in mode n at t = 0."""
    i = ms.index(n)
    omega = ms.frequencies()[i]
    Q = np.zeros(len(ms), dtype=complex)
    Qdot = np.zeros(len(ms), dtype=complex)
    Q[i] = 1.0 / math.sqrt(2.0 * omega)
    Qdot[i] = -1j * math.sqrt(omega / 2.0)
    return TrajectoryState(0.0, Q, Qdot)


def _column(a: np.ndarray, ndim: int) -> np.ndarray:
    return a.reshape(a.shape + (1,) * (ndim - a.ndim))


def _make_accel(omega, kx_bar2, G, motion: WallMotion):
    """Acceleration closure; ``omega``/``kx_bar2`` share the leading axes of Q."""
    eps, W, phase = motion.epsilon, motion.Omega, motion.phase
    omega2 = omega**2

    def accel(t, Q, V):
        s = math.sin(W * t + phase)
        c = math.cos(W * t + phase)
        diag = _column(-omega2 + 2.0 * eps * s * kx_bar2, Q.ndim)
        out = diag * Q
        if eps != 0.0:
            out = out + G @ ((2.0 * eps * W * c) * V - (eps * W * W * s) * Q)
        return out

    return accel


def eom_rhs(state: TrajectoryState, params: EomParams) -> tuple[np.ndarray, np.ndarray]:
    if state.Q.shape[0] != len(params.mode_set):
        raise ValueError("state dimension does not match the mode set")
    accel = _make_accel(params.omega, params.kx_bar2, params.coupling.values, params.motion)
    return state.Qdot.copy(), accel(state.t, state.Q, state.Qdot)


def _step_count(span: float, h: float) -> tuple[int, float]:
    n = int(math.floor(span / h + 1e-9))
    rem = span - n * h
    if rem <= 1e-12 * max(h, abs(span)):
        rem = 0.0
    return n, max(rem, 0.0)


def _rk4_run(accel, Q, V, t0, t_end, h, observer=None, check_every=1):
    """Classical RK4 from t0 to t_end with step h; the final step is shortened."""
    n, rem = _step_count(t_end - t0, h)
    steps = [h] * n + ([rem] if rem > 0.0 else [])
    t = t0
    # overflow is reported as IntegrationDiverged, not as numpy warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for i, dt in enumerate(steps):
            half = 0.5 * dt
            a1 = accel(t, Q, V)
            Q2 = Q + half * V
            V2 = V + half * a1
            a2 = accel(t + half, Q2, V2)
            Q3 = Q + half * V2
            V3 = V + half * a2
            a3 = accel(t + half, Q3, V3)
            Q4 = Q + dt * V3
            V4 = V + dt * a3
            a4 = accel(t + dt, Q4, V4)
            Q = Q + (dt / 6.0) * (V + 2.0 * V2 + 2.0 * V3 + V4)
            V = V + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            t = t0 + (i + 1) * h if i < n else t_end
            if (i + 1) % check_every == 0 or i == len(steps) - 1:
                if not (np.all(np.isfinite(Q)) and np.all(np.isfinite(V))):
                    raise IntegrationDiverged(t)
            if observer is not None:
                observer(t, Q, V)
    return Q, V


def max_stable_dt(params: EomParams) -> float:
    """Largest step allowed: 64 steps per drive period and 16 per fastest mode period."""
    return min(params.motion.period / 64.0, 2.0 * math.pi / (16.0 * params.omega_max))


def default_dt(params: EomParams, span: Optional[float] = None, tol: float = DEFAULT_DT_TOL) -> float:
    """Step size for a run of length ``span`` (default: the drive duration).

    On top of :func:`max_stable_dt` the step keeps the accumulated RK4 phase
    error of the fastest free mode, span * w^5 * h^4 / 120, below ``tol``.
    """
    if span is None:
        span = params.motion.duration_T
    w = params.omega_max
    accuracy = (120.0 * tol / (span * w**5)) ** 0.25
    return min(max_stable_dt(params), accuracy)


def integrate(
    init: TrajectoryState,
    params: EomParams,
    t_end: float,
    dt: Optional[float] = None,
    observer: Optional[Callable[[float, np.ndarray, np.ndarray], None]] = None,
) -> TrajectoryState:
    """Fixed-step RK4 integration of :func:`eom_rhs` from ``init.t`` to ``t_end``.

    ``observer(t, Q, Qdot)`` is called after every step.
    """
    if dt is None:
        dt = default_dt(params, t_end - init.t)
    if dt <= 0:
        raise ValueError("dt must be positive")
    limit = max_stable_dt(params)
    if dt > limit * (1 + 1e-12):
        raise ValueError(f"dt={dt:.6g} exceeds the resolution limit {limit:.6g}")
    if t_end < init.t:
        raise ValueError("t_end precedes the initial time")
    if init.Q.shape[0] != len(params.mode_set):
        raise ValueError("state dimension does not match the mode set")
    accel = _make_accel(params.omega, params.kx_bar2, params.coupling.values, params.motion)
    if observer is not None:
        observer(init.t, init.Q, init.Qdot)
    Q, V = _rk4_run(accel, init.Q, init.Qdot, init.t, t_end, dt, observer=observer)
    return TrajectoryState(t_end, Q, V)


def extract_bogoliubov(final: TrajectoryState, ms: ModeSet) -> tuple[np.ndarray, np.ndarray]:
    """Project a post-drive state onto static positive/negative-frequency modes.

    Works column-wise when ``final.Q`` is a matrix of trajectories.
    """
    return _project(final.Q, final.Qdot, ms.frequencies(), final.t)


def _project(Q, Qdot, omega, T):
    omega = _column(omega, Q.ndim)
    plus = np.sqrt(omega / 2.0) * Q
    minus = 1j * Qdot / np.sqrt(2.0 * omega)
    return np.exp(1j * omega * T) * (plus + minus), np.exp(-1j * omega * T) * (plus - minus)


def unitarity_defect(bog: BogoliubovMatrix, k: ModeIndex) -> float:
    j = bog.mode_set.index(k)
    return float(np.sum(np.abs(bog.alpha[:, j]) ** 2 - np.abs(bog.beta[:, j]) ** 2) - 1.0)


def unitarity_defects(bog: BogoliubovMatrix) -> np.ndarray:
    """Defect of every column k at once."""
    return np.sum(np.abs(bog.alpha) ** 2 - np.abs(bog.beta) ** 2, axis=0) - 1.0


def _row_propagator(params: EomParams, ky: int, h: float, span_periods: int, remainder: float):
    """Real 2M x 2M RK4 propagator of one ky row of the lattice over the drive."""
    ms = params.mode_set
    sl = ms.row_slice(ky)
    omega = params.omega[sl]
    kx2 = params.kx_bar2[sl]
    G = np.ascontiguousarray(params.coupling.values[sl, sl])
    m = len(omega)
    accel = _make_accel(omega, kx2, G, params.motion)
    eye = np.eye(2 * m)
    period = params.motion.period

    def run(span):
        Q, V = _rk4_run(accel, eye[:m].copy(), eye[m:].copy(), 0.0, span, h, check_every=256)
        return np.vstack([Q, V])

    prop = np.linalg.matrix_power(run(period), span_periods) if span_periods else eye
    if remainder > 0.0:
        prop = run(remainder) @ prop
    return prop


def bogoliubov_matrix(params: EomParams, dt: Optional[float] = None, threads: int = 1) -> BogoliubovMatrix:
    """Evolve every initial mode through the drive and extract alpha, beta.

    Entries between different ky rows vanish by the selection rule of g, so
    each row of the lattice is propagated on its own.
    """
    ms = params.mode_set
    motion = params.motion
    T = motion.duration_T
    if dt is None:
        dt = default_dt(params, T)
    limit = max_stable_dt(params)
    if dt > limit * (1 + 1e-12):
        raise ValueError(f"dt={dt:.6g} exceeds the resolution limit {limit:.6g}")
    period = motion.period
    h = period / math.ceil(period / dt - 1e-9)
    whole, remainder = _step_count(T, period)

    def one_row(ky):
        sl = ms.row_slice(ky)
        omega = params.omega[sl]
        m = len(omega)
        prop = _row_propagator(params, ky, h, whole, remainder)
        Y0 = np.zeros((2 * m, m), dtype=complex)
        idx = np.arange(m)
        Y0[idx, idx] = 1.0 / np.sqrt(2.0 * omega)
        Y0[m + idx, idx] = -1j * np.sqrt(omega / 2.0)
        Y = prop @ Y0
        if not np.all(np.isfinite(Y)):
            raise IntegrationDiverged(T)
        a, b = _project(Y[:m], Y[m:], omega, T)
        return sl, a.T, b.T

    size = len(ms)
    alpha = np.zeros((size, size), dtype=complex)
    beta = np.zeros((size, size), dtype=complex)
    rows = range(1, ms.ky_max + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one_row, rows))
    else:
        results = [one_row(ky) for ky in rows]
    for sl, a, b in results:
        alpha[sl, sl] = a
        beta[sl, sl] = b
    return BogoliubovMatrix(alpha=alpha, beta=beta, at_time_T=T, mode_set=ms)

