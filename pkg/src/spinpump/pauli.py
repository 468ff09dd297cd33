"""Exact 2x2 algebra over the Pauli basis.

A Hermitian operator is held as four real coefficients
``a0*I + ax*sx + ay*sy + az*sz`` (:class:`PauliCoeffs`, all in rad/s).
States are plain complex ndarrays of shape (2,), unitaries complex
ndarrays of shape (2, 2).  The propagator uses the closed-form Pauli
exponential, which is branch-free and exact up to rounding; it is the
innermost operation of every simulation and is evaluated ~1e4-1e7 times
per trajectory.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DegeneracyError, InvalidArgumentError

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

#: Status interval of the trajectory loop: trajectories renormalise the
#: propagated state every RENORM_INTERVAL steps and record the largest
#: correction they had to apply.
RENORM_INTERVAL = 10_000


class PauliCoeffs(NamedTuple):
    """Real coefficients of ``a0*I + ax*sx + ay*sy + az*sz`` (rad/s)."""

    a0: float
    ax: float
    ay: float
    az: float


def pauli_matrix(h: PauliCoeffs) -> np.ndarray:
    """Dense 2x2 Hermitian matrix for the given coefficients."""
    a0, ax, ay, az = h
    return np.array(
        [[a0 + az, ax - 1j * ay], [ax + 1j * ay, a0 - az]], dtype=complex
    )


def _require_finite(h: PauliCoeffs) -> None:
    if not all(math.isfinite(c) for c in h):
        raise InvalidArgumentError(f"non-finite Pauli coefficients: {h}")


def expm_pauli(h: PauliCoeffs, dt: float) -> np.ndarray:
    """Propagator ``exp(-i (a0*I + a.sigma) dt)`` in closed form.

    Uses ``exp(-i a0 dt) (cos(|a| dt) I - i sin(|a| dt) a_hat.sigma)``;
    the |a| = 0 limit is the pure phase ``exp(-i a0 dt) I``.

    Parameters
    ----------
    h : PauliCoeffs
        Generator coefficients in rad/s.
    dt : float
        Step duration in seconds, >= 0.

    Returns
    -------
    ndarray (2, 2) complex
        Unitary to within a few float eps per entry.
    """
    _require_finite(h)
    if not math.isfinite(dt) or dt < 0.0:
        raise InvalidArgumentError(f"dt must be finite and >= 0, got {dt}")
    a0, ax, ay, az = h
    phase = complex(math.cos(a0 * dt), -math.sin(a0 * dt))
    r = math.sqrt(ax * ax + ay * ay + az * az)
    if r == 0.0:
        return phase * IDENTITY.copy()
    nx, ny, nz = ax / r, ay / r, az / r
    c = math.cos(r * dt)
    s = math.sin(r * dt)
    return phase * np.array(
        [
            [c - 1j * s * nz, -1j * s * (nx - 1j * ny)],
            [-1j * s * (nx + 1j * ny), c + 1j * s * nz],
        ]
    )


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Gauge fix: make the larger-magnitude component real and >= 0.

    Ties go to the first component, so the result is deterministic and
    fidelity comparisons are reproducible across runs.
    """
    idx = 0 if abs(v[0]) >= abs(v[1]) else 1
    ref = v[idx]
    mag = abs(ref)
    if mag == 0.0:
        return v
    return v * (ref.conjugate() / mag)


def eig_pauli(
    h: PauliCoeffs, gap_floor: float | None = None
) -> tuple[float, float, np.ndarray, np.ndarray]:
    """Eigendecomposition of ``a0*I + a.sigma``.

    Returns ``(e_plus, e_minus, v_plus, v_minus)`` with eigenvalues
    ``a0 +- |a|`` and normalised eigenvectors under the fixed phase
    convention of :func:`_fix_phase`.

    Raises
    ------
    DegeneracyError
        When ``|a|`` falls below the gap floor (default
        ``1e-6 * max(1, |a0|)``).  Band touchings are physical here and
        must not silently return an arbitrary basis.
    """
    _require_finite(h)
    a0, ax, ay, az = h
    r = math.sqrt(ax * ax + ay * ay + az * az)
    floor = gap_floor if gap_floor is not None else 1e-6 * max(1.0, abs(a0))
    if r <= floor:
        raise DegeneracyError(
            f"band touching: |a| = {r:.3e} <= gap floor {floor:.3e}"
        )
    # Pick the algebraically safe branch: the discarded form has norm
    # ~ 2r(r - |az|) and loses precision when a is nearly +-z.
    if az >= 0.0:
        v_plus = np.array([az + r, ax + 1j * ay], dtype=complex)
        v_minus = np.array([-(ax - 1j * ay), az + r], dtype=complex)
    else:
        v_plus = np.array([-(ax - 1j * ay), az - r], dtype=complex)
        v_minus = np.array([az - r, ax + 1j * ay], dtype=complex)
    v_plus = _fix_phase(v_plus / np.linalg.norm(v_plus))
    v_minus = _fix_phase(v_minus / np.linalg.norm(v_minus))
    return a0 + r, a0 - r, v_plus, v_minus


def normalize_state(psi: np.ndarray) -> np.ndarray:
    """Return psi scaled to unit norm."""
    nrm = np.linalg.norm(psi)
    if nrm == 0.0:
        raise InvalidArgumentError("cannot normalise the zero state")
    return psi / nrm
