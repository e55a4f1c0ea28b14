import math
import time
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from casimir_cavity import (
    CavityGeometry,
    EomParams,
    ModeIndex,
    ModeSet,
    ScanGrid,
    TwoWallConfig,
    WIndices,
    WallMotion,
    beta_analytic,
    bogoliubov_matrix,
    discrete_photon_number,
    finite_time_kernel,
    first_order_amplitude,
    mode_frequency,
    nearest_partner_index,
    peak_location,
    photon_number,
    photon_number_two_walls,
    resonance_partner,
    spectrum_scan,
    w_coefficient,
)

PI = math.pi
N11, N21 = ModeIndex(1, 1), ModeIndex(2, 1)


def motion(eps=1e-3, Omega=10.0, T=20.0, phase=0.0, wall="right"):
    return WallMotion(epsilon=eps, Omega=Omega, duration_T=T, phase=phase, wall=wall)


def trapezoid_kernel(Delta, T, n=200_001):
    t = np.linspace(0.0, T, n)
    return np.trapezoid(np.exp(-1j * Delta * t), t)


class TestWCoefficient:
    def test_diagonal(self, square):
        k = ModeIndex(3, 2)
        w = w_coefficient(WIndices(k, k, 1, -1, 1), 5.0, square)
        assert w == pytest.approx(-9.0 / (2 * math.sqrt(13.0)), rel=1e-14)

    def test_selection_rule(self, square):
        assert w_coefficient(WIndices(ModeIndex(2, 1), ModeIndex(1, 2), 1, -1, 1), 5.0, square) == 0.0

    def test_resonant_pair_by_hand(self, square):
        wn, wk = math.sqrt(2.0), math.sqrt(5.0)
        Omega = wn + wk
        expected = Omega * (4 / 3) * math.sqrt(wn / wk) * (Omega / (4 * wn) - 0.5)
        assert w_coefficient(WIndices(N21, N11, 1, -1, 1), Omega, square) == pytest.approx(expected, rel=1e-14)
        # on resonance the combination collapses to (-1)^(kx+nx+1) kx nx / (2 sqrt(wk wn))
        assert expected == pytest.approx(2.0 / (2 * math.sqrt(wk * wn)), rel=1e-14)

    @given(st.sampled_from([1, -1]), st.sampled_from([1, -1]), st.sampled_from([1, -1]))
    def test_sign_structure(self, sigma, sp, s):
        geom = CavityGeometry(Lx=1.2, Ly=0.9)
        plus = w_coefficient(WIndices(N21, N11, 1, sp, s), 4.0, geom)
        assert w_coefficient(WIndices(N21, N11, sigma, sp, s), 4.0, geom) == sigma * plus

    def test_sign_validation(self):
        with pytest.raises(ValueError):
            WIndices(N11, N11, 0, 1, 1)


class TestKernel:
    def test_examples(self):
        assert finite_time_kernel(0.0, 3.0) == 3.0
        assert abs(finite_time_kernel(2 * PI / 3.0, 3.0)) < 1e-15
        assert abs(finite_time_kernel(PI / 3.0, 3.0)) == pytest.approx(2 / (PI / 3.0), rel=1e-14)

    @given(st.floats(-50, 50), st.floats(0.01, 20))
    def test_sinc_modulus(self, Delta, T):
        x = Delta * T / 2
        sinc = 1.0 if x == 0 else math.sin(x) / x
        assert abs(finite_time_kernel(Delta, T)) == pytest.approx(T * abs(sinc), rel=1e-9, abs=1e-12)

    @pytest.mark.parametrize("Delta", [0.0, 1e-9, 3e-7, 0.37, -2.4, 11.0])
    def test_against_quadrature(self, Delta):
        T = 4.3
        assert finite_time_kernel(Delta, T) == pytest.approx(trapezoid_kernel(Delta, T), abs=1e-8)

    @pytest.mark.parametrize("x", [1e-9, 0.999e-6, 1.001e-6, 1e-4])
    def test_small_argument_accuracy(self, x):
        # T e^{-ix/2} sinc(x/2) has no cancellation
        T = 2.0
        stable = T * np.exp(-0.5j * x) * math.sin(x / 2) / (x / 2)
        assert finite_time_kernel(x / T, T) == pytest.approx(stable, rel=1e-11)

    def test_vectorized(self):
        out = finite_time_kernel(np.array([0.0, 1.0]), 2.0)
        assert out.shape == (2,) and out[0] == 2.0


class TestFirstOrderAmplitude:
    def test_zero_at_start(self, square):
        assert first_order_amplitude(N11, N21, 0.0, 3.65, square) == 0j

    def test_resonant_branch_grows_linearly(self, square):
        Omega = math.sqrt(2) + math.sqrt(5)
        a1 = abs(first_order_amplitude(N11, N21, 100.0, Omega, square))
        a2 = abs(first_order_amplitude(N11, N21, 200.0, Omega, square))
        assert a2 / a1 == pytest.approx(2.0, rel=0.02)

    def test_off_resonance_bounded(self, square):
        Omega = 1.1 * (math.sqrt(2) + math.sqrt(5))
        values = [abs(first_order_amplitude(N11, N21, t, Omega, square)) for t in (100.0, 300.0, 1000.0)]
        assert max(values) < 5.0

    def test_quadrature_oracle(self, square):
        # direct integral of the first-order source against the closed form
        Omega, t_end, phase = 3.1, 7.0, 0.4
        wk, wn = math.sqrt(5.0), math.sqrt(2.0)
        t = np.linspace(0.0, t_end, 400_001)
        total = 0j
        for sigma in (1, -1):
            for s in (1, -1):
                w = w_coefficient(WIndices(N21, N11, sigma, -1, s), Omega, square)
                integral = np.trapezoid(np.exp(-1j * (sigma * wk - s * Omega + wn) * t), t)
                total += w * np.exp(1j * (sigma * wk * t_end + s * phase)) / math.sqrt(2 * wk) * integral
        got = first_order_amplitude(N11, N21, t_end, Omega, square, phase=phase)
        assert got == pytest.approx(total, rel=1e-8)


class TestBetaAnalytic:
    def test_exact_resonance(self, square, resonant_motion):
        w = w_coefficient(WIndices(N21, N11, 1, -1, 1), resonant_motion.Omega, square)
        expected = resonant_motion.epsilon * resonant_motion.duration_T * abs(w)
        assert abs(beta_analytic(N11, N21, resonant_motion, square)) == pytest.approx(expected, rel=1e-12)

    def test_kernel_zero_detuning(self, square):
        T = 50.0
        m = motion(Omega=math.sqrt(2) + math.sqrt(5) - 2 * PI / T, T=T)
        assert abs(beta_analytic(N11, N21, m, square)) < 1e-15

    def test_selection_rule(self, square, resonant_motion):
        assert beta_analytic(ModeIndex(1, 2), N21, resonant_motion, square) == 0j

    def test_left_wall_rejected(self, square):
        with pytest.raises(ValueError):
            beta_analytic(N11, N21, motion(wall="left"), square)

    def test_off_resonance_bound_chain_free(self, square, resonant_motion):
        # every pair of a lattice without second-order resonant chains
        p = EomParams.build(square, resonant_motion, 2, 1)
        bog = bogoliubov_matrix(p)
        floor = resonant_motion.epsilon**2 * resonant_motion.duration_T * resonant_motion.Omega
        for n in p.mode_set:
            for k in p.mode_set:
                ode = abs(bog.entry(n, k)[1])
                ana = abs(beta_analytic(n, k, resonant_motion, square))
                assert abs(ode - ana) <= max(0.1 * ana, floor)


class TestResonancePartner:
    def test_self_partner(self):
        assert resonance_partner(5.0, 1e-9, 10.0) == pytest.approx(5.0, rel=1e-9)

    def test_none_above_drive(self):
        assert resonance_partner(8.0, 7.0, 10.0) is None

    def test_none_negative_radicand(self):
        # w ~ 6.08 < Omega but 1 - 2 * 10 * 6.08 + 100 < 0
        assert resonance_partner(1.0, 6.0, 10.0) is None

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            resonance_partner(0.0, 1.0, 2.0)

    @given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.1, 20))
    def test_partner_frequency(self, kx, ky, Omega):
        nx = resonance_partner(kx, ky, Omega)
        if nx is not None:
            assert math.hypot(nx, ky) == pytest.approx(Omega - math.hypot(kx, ky), rel=1e-9, abs=1e-9)


class TestPhotonNumber:
    def test_peak_value(self):
        m = motion()
        assert photon_number(5.0, 1e-9, m, normalized=True) == pytest.approx(0.25, abs=1e-9)
        absolute = photon_number(5.0, 1e-9, m)
        assert absolute == pytest.approx((1e-3 * 20.0 / 2) ** 2 * 100 / 4, rel=1e-8)

    def test_zero_without_partner(self):
        assert photon_number(8.0, 7.0, motion()) == 0.0

    def test_zero_drive(self):
        m = motion(eps=0.0)
        assert photon_number(5.0, 0.1, m) == 0.0
        assert photon_number(5.0, 0.1, m, normalized=True) == 0.0

    def test_discrete_lattice_agrees(self):
        geom = CavityGeometry(Lx=PI, Ly=50 * PI)
        k, n = ModeIndex(1, 7), ModeIndex(2, 7)
        Omega = mode_frequency(k, geom) + mode_frequency(n, geom)
        m = motion(Omega=Omega, T=200 * PI / Omega)
        ms = ModeSet(geom, 30, 10)
        kxb, kyb = 1.0, 7 / 50
        continuum = photon_number(kxb, kyb, m)
        assert discrete_photon_number(k, m, ms) == pytest.approx(continuum, rel=0.10)
        assert abs(beta_analytic(n, k, m, geom)) ** 2 == pytest.approx(continuum, rel=1e-10)

    @given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(1e-5, 5e-3), st.floats(0.5, 100))
    def test_scaling(self, kx, ky, eps, T):
        m1 = motion(eps=eps, T=T)
        n1 = photon_number(kx, ky, m1)
        assert n1 >= 0.0
        if math.hypot(kx, ky) >= 10.0:
            assert n1 == 0.0
        assert photon_number(kx, ky, motion(eps=2 * eps, T=T)) == pytest.approx(4 * n1, rel=1e-12)
        assert photon_number(kx, ky, motion(eps=eps, T=2 * T)) == pytest.approx(4 * n1, rel=1e-12)


class TestScan:
    def test_default_grid_peak(self):
        m = motion()
        grid = ScanGrid.default(10.0)
        spec = spectrum_scan(grid, m)
        kx, ky = peak_location(spec)
        step = 10.0 / 200
        assert abs(kx - 5.0) <= step
        assert ky == grid.ky_min
        assert spec.values.max() == pytest.approx(0.25, abs=1e-6)
        assert np.all(spec.values >= 0)

    def test_grid_with_peak_point(self):
        m = motion()
        kx = np.array([1.0, 5.0, 3.0, 5.0, 7.0])
        ky = np.array([1e-3, 1e-3, 1e-3, 2.0, 1e-3])
        assert peak_location(spectrum_scan((kx, ky), m)) == (5.0, 1e-3)

    def test_zero_drive_scan(self):
        spec = spectrum_scan(ScanGrid.default(10.0, count=20), motion(eps=0.0))
        assert np.all(spec.values == 0.0)

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            spectrum_scan((np.array([]), np.array([])), motion())

    def test_single_point(self):
        spec = spectrum_scan((np.array([2.0]), np.array([3.0])), motion())
        assert peak_location(spec) == (2.0, 3.0)

    def test_tie_break(self):
        spec = spectrum_scan((np.array([3.0, 1.0, 2.0]), np.array([9.0, 9.0, 9.5])), motion())
        assert np.all(spec.values == 0.0)
        assert peak_location(spec) == (1.0, 9.0)

    def test_lattice_peak(self, square):
        Omega = 2 * math.sqrt(2.0)
        kx, ky = np.meshgrid(np.arange(1.0, 4.0), np.arange(1.0, 4.0))
        spec = spectrum_scan((kx.ravel(), ky.ravel()), motion(Omega=Omega))
        assert peak_location(spec) == (1.0, 1.0)

    def test_threads_identical(self):
        grid = ScanGrid.default(10.0, count=50)
        a = spectrum_scan(grid, motion())
        b = spectrum_scan(grid, motion(), threads=4)
        np.testing.assert_array_equal(a.values, b.values)

    def test_fast(self):
        start = time.perf_counter()
        spectrum_scan(ScanGrid.default(10.0), motion())
        assert time.perf_counter() - start < 1.0


def two_walls(phi=0.0, Omega_left=10.0, eps_left=1e-3, T=20.0):
    return TwoWallConfig(
        left=motion(eps=eps_left, Omega=Omega_left, T=T, phase=phi, wall="left"),
        right=motion(T=T),
    )


class TestTwoWalls:
    def test_destructive_and_constructive(self, square):
        N0 = photon_number(5.0, 1e-3, motion())
        r0 = photon_number_two_walls(5.0, 1e-3, two_walls(0.0), square)
        assert r0.parity == 1 and r0.kx == 5 and r0.nx == 5
        assert r0.N == 0.0
        rpi = photon_number_two_walls(5.0, 1e-3, two_walls(PI), square)
        assert rpi.N == pytest.approx(4 * N0, rel=1e-12)
        assert rpi.gamma == pytest.approx(10.0 / math.sqrt(2.0))

    def test_odd_parity_flips(self, square):
        # kx = 4 with partner nx = 3: Omega = w(4, ky) + w(3, ky)
        ky = 0.5
        Omega = math.hypot(4, ky) + math.hypot(3, ky)
        cfg = TwoWallConfig(motion(Omega=Omega, wall="left"), motion(Omega=Omega))
        r = photon_number_two_walls(4.0, ky, cfg, square)
        assert (r.kx, r.nx, r.parity) == (4, 3, -1)
        assert r.N == pytest.approx(4 * r.N_right, rel=1e-12)

    def test_detuned_sum(self, square):
        cfg = two_walls(0.7, Omega_left=10.0 + 2 * PI / 20.0 * 1.5)
        r = photon_number_two_walls(4.0, 1.0, cfg, square)
        assert not r.coherent
        assert r.N == pytest.approx(r.N_left + r.N_right, rel=1e-12)

    def test_no_partner(self, square):
        assert photon_number_two_walls(9.0, 9.0, two_walls(), square).N == 0.0

    def test_normalized_units(self, square):
        r = photon_number_two_walls(5.0, 1e-9, two_walls(PI), square, normalized=True)
        assert r.N == pytest.approx(1.0, abs=1e-8)
        assert r.N_right == pytest.approx(0.25, abs=1e-8)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TwoWallConfig(motion(), motion())

    @given(st.floats(0, 2 * PI), st.floats(0.1, 9.9), st.floats(0.01, 9.9), st.floats(1e-5, 9e-3))
    @settings(max_examples=200)
    def test_bounds(self, phi, kx, ky, eps_left):
        geom = CavityGeometry(Lx=1.0, Ly=1.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            r = photon_number_two_walls(kx, ky, two_walls(phi, eps_left=eps_left), geom)
        upper = (math.sqrt(r.N_left) + math.sqrt(r.N_right)) ** 2
        assert 0.0 <= r.N <= upper * (1 + 1e-12) + 1e-300

    def test_parity_warning(self):
        geom = CavityGeometry(Lx=1.0, Ly=1.0)
        with pytest.warns(UserWarning, match="parity"):
            nearest_partner_index(1.5 * PI, geom)
        assert nearest_partner_index(2.1 * PI, geom, warn=False) == (2, pytest.approx(0.1))
