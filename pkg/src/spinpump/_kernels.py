"""Hot propagation loops, jitted when numba is available.

The loops are plain scalar float/complex arithmetic so the jitted and
interpreted paths compute the same IEEE operations; numba only removes
the interpreter overhead (~two orders of magnitude on the trajectory
loop).  Keep these free of Python objects: parameters come in as
scalars and preallocated arrays.
"""

from __future__ import annotations

import numpy as np

try:  # pragma: no cover
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


@njit(cache=True)
def propagate_drive(
    eta: float,
    w1: float,
    w2: float,
    ph1: float,
    ph2: float,
    m: float,
    delta: np.ndarray,
    seg: np.ndarray,
    dt: float,
    sample_mid: bool,
    c0_init: complex,
    c1_init: complex,
    rec_idx: np.ndarray,
    renorm_interval: int,
):
    """Step the (possibly toggled) rotating-frame state and accumulate work.

    delta[k-1] is the noise value applied during step k (1-based);
    seg[k-1] = 1 marks a primed (toggled-frame) step, which enters the
    effective generator as a sign flip of the noise term only.  The
    returned states are toggling-frame states, so work and fidelity are
    always evaluated against the unprimed drive operators.

    Returns (states[R,2], e1[R], e2[R], flags[R], renorm_max) with R =
    rec_idx.size; rec_idx must start at 0 and increase.
    """
    n = delta.size
    nrec = rec_idx.size
    states = np.zeros((nrec, 2), dtype=np.complex128)
    e1_out = np.zeros(nrec)
    e2_out = np.zeros(nrec)
    flags = np.zeros(nrec, dtype=np.int8)
    c0 = c0_init
    c1 = c1_init
    states[0, 0] = c0
    states[0, 1] = c1
    e1 = 0.0
    e2 = 0.0
    renorm_max = 0.0
    j = 1
    for k in range(1, n + 1):
        th = (k - 0.5) * dt if sample_mid else k * dt
        a1 = w1 * th + ph1
        a2 = w2 * th + ph2
        s1 = np.sin(a1)
        cc1 = np.cos(a1)
        s2 = np.sin(a2)
        cc2 = np.cos(a2)
        sgn = -1.0 if seg[k - 1] == 1 else 1.0
        hx = eta * s1
        hy = eta * s2
        hz = eta * (m - cc1 - cc2) + sgn * delta[k - 1]
        r = np.sqrt(hx * hx + hy * hy + hz * hz)
        if r > 0.0:
            nx = hx / r
            ny = hy / r
            nz = hz / r
        else:
            nx = 0.0
            ny = 0.0
            nz = 0.0
        cr = np.cos(r * dt)
        sr = np.sin(r * dt)
        u00 = cr - 1j * sr * nz
        u01 = -1j * sr * (nx - 1j * ny)
        u10 = -1j * sr * (nx + 1j * ny)
        u11 = cr + 1j * sr * nz
        c0, c1 = u00 * c0 + u01 * c1, u10 * c0 + u11 * c1
        if k % renorm_interval == 0:
            nrm = np.sqrt(abs(c0) ** 2 + abs(c1) ** 2)
            dev = abs(nrm - 1.0)
            if dev > renorm_max:
                renorm_max = dev
            c0 /= nrm
            c1 /= nrm
        # work increment: state at t_k against the tone derivatives at t_k
        t = k * dt
        b1 = w1 * t + ph1
        b2 = w2 * t + ph2
        cross = np.conj(c0) * c1
        sx = 2.0 * cross.real
        sy = 2.0 * cross.imag
        sz = abs(c0) ** 2 - abs(c1) ** 2
        e1 += eta * w1 * (np.cos(b1) * sx + np.sin(b1) * sz) * dt
        e2 += eta * w2 * (np.cos(b2) * sy + np.sin(b2) * sz) * dt
        if j < nrec and k == rec_idx[j]:
            states[j, 0] = c0
            states[j, 1] = c1
            e1_out[j] = e1
            e2_out[j] = e2
            flags[j] = seg[k - 1]
            j += 1
    return states, e1_out, e2_out, flags, renorm_max


@njit(cache=True)
def propagate_lab(
    eta: float,
    omega0: float,
    w1: float,
    w2: float,
    ph1: float,
    ph2: float,
    m: float,
    sin_ph1: float,
    sin_ph2: float,
    n_steps: int,
    dt: float,
    sample_mid: bool,
    c0_init: complex,
    c1_init: complex,
    rec_idx: np.ndarray,
    renorm_interval: int,
):
    """Step the lab-frame state under the carrier plus modulated sx tones.

    The carrier argument is evaluated as 2 theta(t) from the closed-form
    frame angle, avoiding the 0/0 of the chirp formula at t = 0.
    """
    nrec = rec_idx.size
    states = np.zeros((nrec, 2), dtype=np.complex128)
    c0 = c0_init
    c1 = c1_init
    states[0, 0] = c0
    states[0, 1] = c1
    renorm_max = 0.0
    j = 1
    for k in range(1, n_steps + 1):
        t = (k - 0.5) * dt if sample_mid else k * dt
        th = (
            0.5 * omega0 * t
            - eta * m * t
            + eta / w1 * (np.sin(w1 * t + ph1) - sin_ph1)
            + eta / w2 * (np.sin(w2 * t + ph2) - sin_ph2)
        )
        chi = 2.0 * th
        ax = 2.0 * eta * (
            np.sin(w1 * t + ph1) * np.cos(chi) - np.sin(w2 * t + ph2) * np.sin(chi)
        )
        az = 0.5 * omega0
        r = np.sqrt(ax * ax + az * az)
        nx = ax / r
        nz = az / r
        cr = np.cos(r * dt)
        sr = np.sin(r * dt)
        u00 = cr - 1j * sr * nz
        u01 = -1j * sr * nx
        u11 = cr + 1j * sr * nz
        c0, c1 = u00 * c0 + u01 * c1, u01 * c0 + u11 * c1
        if k % renorm_interval == 0:
            nrm = np.sqrt(abs(c0) ** 2 + abs(c1) ** 2)
            dev = abs(nrm - 1.0)
            if dev > renorm_max:
                renorm_max = dev
            c0 /= nrm
            c1 /= nrm
        if j < nrec and k == rec_idx[j]:
            states[j, 0] = c0
            states[j, 1] = c1
            j += 1
    return states, renorm_max
