import math

import numpy as np
import pytest

from spinpump.drive import (
    DriveParams,
    LabFrameParams,
    field_derivatives,
    field_vectors,
    hamiltonian_lab,
    hamiltonian_primed,
    hamiltonian_rot,
    omega_prime,
    theta,
)
from spinpump.errors import InvalidArgumentError
from spinpump.pauli import SIGMA_X, SIGMA_Y, SIGMA_Z, pauli_matrix
from spinpump.topology import min_gap

TWO_PI = 2 * math.pi
DEFAULTS = DriveParams()  # eta=(2pi)1e6, omega=(2pi){50, 80.9} kHz, phi=(pi/10, 0), m=0.9


def as_matrix(coeffs):
    return pauli_matrix(coeffs)


def test_band_touching_point_field_cancels():
    p = DriveParams(phi01=0.0, phi02=0.0, m=2.0)
    h1, h2 = field_vectors(0.0, p)
    total = np.array(h1) + np.array(h2)
    assert np.abs(total).max() == 0.0


def test_field_exact_trig_values():
    p = DriveParams(eta=1.0, phi01=math.pi / 2, phi02=0.0, m=0.0)
    h1, h2 = field_vectors(0.0, p)
    assert h1 == pytest.approx((1.0, 0.0, 0.0), abs=1e-15)
    assert h2 == pytest.approx((0.0, 0.0, -1.0), abs=1e-15)


def test_field_matches_high_precision_reference():
    # frozen 50-digit evaluation at t = 13.7 us, default params
    t = 13.7e-6
    h1, h2 = field_vectors(t, DEFAULTS)
    ref1 = (-6255300.308380916, 0.0, 3418733.359757156)
    ref2 = (0.0, 3954034.3653762657, -2055601.5125026375)
    for got, want in zip(h1 + h2, ref1 + ref2):
        assert got == pytest.approx(want, rel=1e-12)


def test_field_phase_periodicity():
    t = 3.3e-6
    base = field_vectors(t, DEFAULTS)
    import dataclasses

    shifted = field_vectors(
        t, dataclasses.replace(DEFAULTS, phi01=DEFAULTS.phi01 + TWO_PI)
    )
    for a, b in zip(base, shifted):
        assert np.allclose(a, b, rtol=1e-12, atol=1e-6 * DEFAULTS.eta * 1e-6)


def test_derivative_zero_phase():
    p = DriveParams(eta=1.0, phi01=0.0, phi02=0.0)
    dh1, dh2 = field_derivatives(0.0, p)
    assert dh1 == pytest.approx((p.omega1, 0.0, 0.0), abs=1e-12)
    assert dh2 == pytest.approx((0.0, p.omega2, 0.0), abs=1e-12)


def test_derivative_quarter_phase():
    p = DriveParams(eta=1.0, phi01=math.pi / 2, phi02=0.0)
    dh1, _ = field_derivatives(0.0, p)
    assert dh1 == pytest.approx((0.0, 0.0, p.omega1), abs=1e-9)


def test_derivative_central_difference_oracle():
    step = 1e-12 * TWO_PI / DEFAULTS.omega1
    for t in (1.1e-6, 13.7e-6, 177.2e-6):
        dh1, dh2 = field_derivatives(t, DEFAULTS)
        tp, tm = t + step, t - step  # realized float step, used as denominator
        h1p, h2p = field_vectors(tp, DEFAULTS)
        h1m, h2m = field_vectors(tm, DEFAULTS)
        fd1 = (np.array(h1p) - np.array(h1m)) / (tp - tm)
        fd2 = (np.array(h2p) - np.array(h2m)) / (tp - tm)
        scale1 = DEFAULTS.eta * DEFAULTS.omega1
        scale2 = DEFAULTS.eta * DEFAULTS.omega2
        assert np.abs(fd1 - np.array(dh1)).max() < 1e-4 * scale1
        assert np.abs(fd2 - np.array(dh2)).max() < 1e-4 * scale2


def test_rot_zero_phase_value():
    p = DriveParams(phi01=0.0, phi02=0.0, m=0.9)
    h = hamiltonian_rot(0.0, p, 0.0)
    assert h.a0 == 0.0
    assert h.ax == pytest.approx(0.0, abs=1e-12)
    assert h.ay == pytest.approx(0.0, abs=1e-12)
    assert h.az == pytest.approx(p.eta * (p.m - 2.0), rel=1e-12)


def test_rot_noise_shifts_az_exactly():
    delta = 7.0710678e6  # one sigma at T2* = 0.1 us
    t = 2.2e-6
    clean = hamiltonian_rot(t, DEFAULTS, 0.0)
    noisy = hamiltonian_rot(t, DEFAULTS, delta)
    assert noisy.az - clean.az == delta
    assert (noisy.a0, noisy.ax, noisy.ay) == (clean.a0, clean.ax, clean.ay)


def test_rot_is_field_sum():
    t = 5.13e-6
    h1, h2 = field_vectors(t, DEFAULTS)
    h = hamiltonian_rot(t, DEFAULTS, 1234.5)
    assert h.ax == pytest.approx(h1.hx + h2.hx, rel=1e-12)
    assert h.ay == pytest.approx(h1.hy + h2.hy, rel=1e-12)
    assert h.az == pytest.approx(h1.hz + h2.hz + 1234.5, rel=1e-12)


def test_primed_zero_phase_value():
    p = DriveParams(eta=1.0, phi01=0.0, phi02=0.0, m=0.0)
    h = hamiltonian_primed(0.0, p, 0.0)
    assert (h.a0, h.ax, h.ay) == (0.0, 0.0, 0.0)
    assert h.az == pytest.approx(2.0, rel=1e-15)


def test_primed_conjugation_identity():
    # sx H' sx equals the rotating-frame generator with the noise negated
    rng = np.random.default_rng(5)
    for _ in range(50):
        t = rng.uniform(0, 100e-6)
        delta = rng.uniform(-1e7, 1e7)
        lhs = SIGMA_X @ as_matrix(hamiltonian_primed(t, DEFAULTS, delta)) @ SIGMA_X
        rhs = as_matrix(hamiltonian_rot(t, DEFAULTS, -delta))
        assert np.abs(lhs - rhs).max() <= 1e-9 * DEFAULTS.eta


def test_cycle_average_identity():
    # (H1 + sx H1' sx)/2 is exactly the noise-free generator
    rng = np.random.default_rng(6)
    for _ in range(50):
        t = rng.uniform(0, 100e-6)
        delta = rng.uniform(-1e7, 1e7)
        h1 = as_matrix(hamiltonian_rot(t, DEFAULTS, delta))
        h2 = SIGMA_X @ as_matrix(hamiltonian_primed(t, DEFAULTS, delta)) @ SIGMA_X
        clean = as_matrix(hamiltonian_rot(t, DEFAULTS, 0.0))
        assert np.abs(0.5 * (h1 + h2) - clean).max() <= 1e-9 * DEFAULTS.eta


def test_omega_prime_analytic_limit():
    p = DriveParams(phi01=0.0, phi02=0.0, m=0.9)
    assert omega_prime(0.0, p) == pytest.approx(2 * p.eta * (p.m - 2.0), rel=1e-12)
    # series and direct form agree across the switch threshold
    t_small = 1e-8 / p.omega1
    assert omega_prime(t_small, p) == pytest.approx(
        omega_prime(t_small * 1.001, p), rel=1e-6
    )


def test_omega_prime_period_kills_first_bracket():
    t = TWO_PI / DEFAULTS.omega1
    # at omega1 t = 2pi the tone-1 bracket vanishes for any phase
    expected = 2 * DEFAULTS.eta * DEFAULTS.m - 0.0 - (
        2 * DEFAULTS.eta / (DEFAULTS.omega2 * t)
        * (math.sin(DEFAULTS.omega2 * t + DEFAULTS.phi02) - math.sin(DEFAULTS.phi02))
    )
    assert omega_prime(t, DEFAULTS) == pytest.approx(expected, rel=1e-12)


def test_omega_prime_frozen_reference():
    assert omega_prime(13.7e-6, DEFAULTS) == pytest.approx(13983133.42700695, rel=1e-12)


def test_omega_prime_negative_time():
    with pytest.raises(InvalidArgumentError):
        omega_prime(-1e-9, DEFAULTS)


LAB = LabFrameParams(omega0=TWO_PI * 50e6, drive=DEFAULTS)


def test_theta_zero_and_identity():
    assert theta(0.0, LAB) == 0.0
    rng = np.random.default_rng(8)
    for _ in range(50):
        t = rng.uniform(1e-9, 50e-6)
        th = theta(t, LAB)
        ident = 0.5 * (LAB.omega0 - omega_prime(t, LAB.drive)) * t
        assert th == pytest.approx(ident, rel=1e-10)


def test_theta_frozen_reference():
    assert theta(13.7e-6, LAB) == pytest.approx(2056.2065037340108, rel=1e-12)


def test_lab_tiny_drive_leaves_carrier():
    lab = LabFrameParams(
        omega0=TWO_PI * 50e6, drive=DriveParams(eta=1e-30, m=0.9)
    )
    h = hamiltonian_lab(1.0e-6, lab)
    assert h.az == 0.5 * lab.omega0
    assert abs(h.ax) <= 2e-30
    assert h.ay == 0.0


def test_lab_t0_carrier_phase():
    h = hamiltonian_lab(0.0, LAB)
    assert h.ax == pytest.approx(2 * DEFAULTS.eta * math.sin(DEFAULTS.phi01), rel=1e-12)
    assert h.az == 0.5 * LAB.omega0


def test_lab_frame_transform_reproduces_rotating_hamiltonian():
    # U0 H U0^dag + i (dU0/dt) U0^dag minus the counter-rotating part
    # must equal the rotating-frame generator at every sample.
    rng = np.random.default_rng(9)
    p = DEFAULTS
    for _ in range(25):
        t = rng.uniform(0, 20e-6)
        th = theta(t, LAB)
        u0 = np.diag([np.exp(1j * th), np.exp(-1j * th)])
        hlab = as_matrix(hamiltonian_lab(t, LAB))
        a1 = p.omega1 * t + p.phi01
        a2 = p.omega2 * t + p.phi02
        # d(theta)/dt is the integrand of the frame angle, independent of theta()
        theta_dot = 0.5 * LAB.omega0 - p.eta * (
            p.m - math.cos(a1) - math.cos(a2)
        )
        transformed = u0 @ hlab @ u0.conj().T - theta_dot * SIGMA_Z
        four = 4.0 * th
        ctr = p.eta * math.sin(a1) * (
            math.cos(four) * SIGMA_X - math.sin(four) * SIGMA_Y
        ) - p.eta * math.sin(a2) * (
            math.sin(four) * SIGMA_X + math.cos(four) * SIGMA_Y
        )
        rot = as_matrix(hamiltonian_rot(t, p, 0.0))
        assert np.abs(transformed - ctr - rot).max() <= 1e-8 * LAB.omega0


def test_field_magnitude_hits_gap():
    # at zero phase of both tones |h| equals eta |m - 2|; the dense-grid
    # minimum reproduces the closed-form gap
    for m in (0.9, 1.8, -1.5, 2.4):
        p = DriveParams(phi01=0.0, phi02=0.0, m=m)
        h1, h2 = field_vectors(0.0, p)
        total = np.array(h1) + np.array(h2)
        assert np.linalg.norm(total) == pytest.approx(
            p.eta * abs(m - 2.0), rel=1e-12, abs=1e-6
        )
        q = np.linspace(0, TWO_PI, 400, endpoint=False)
        s1, s2 = np.sin(q)[:, None], np.sin(q)[None, :]
        c1, c2 = np.cos(q)[:, None], np.cos(q)[None, :]
        mag = p.eta * np.sqrt(s1**2 + s2**2 + (m - c1 - c2) ** 2)
        assert mag.min() == pytest.approx(
            min_gap(m, p.eta), rel=3e-3, abs=1e-3 * p.eta
        )


def test_param_validation():
    with pytest.raises(InvalidArgumentError):
        DriveParams(eta=-1.0)
    with pytest.raises(InvalidArgumentError):
        DriveParams(omega1=TWO_PI * 50e3, omega2=TWO_PI * 50e3)
    with pytest.raises(InvalidArgumentError):
        LabFrameParams(omega0=-1.0, drive=DEFAULTS)


def test_common_period_and_horizon_warning():
    assert DEFAULTS.common_period() == pytest.approx(0.01, rel=1e-9)
    with pytest.warns(UserWarning):
        DEFAULTS.check_horizon(0.02)


def test_lab_params_warns_when_carrier_small():
    with pytest.warns(UserWarning):
        LabFrameParams(omega0=5 * DEFAULTS.eta, drive=DEFAULTS)
