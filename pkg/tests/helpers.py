"""Shared test oracles, independent of the library's fast paths."""

from __future__ import annotations

import numpy as np

from spinpump.drive import hamiltonian_primed, hamiltonian_rot
from spinpump.pauli import SIGMA_X, pauli_matrix


def taylor_expm(mat: np.ndarray, terms: int = 35) -> np.ndarray:
    """Scaled-and-squared Taylor series for exp(mat), >= 30 terms."""
    norm = np.linalg.norm(mat, np.inf)
    squarings = 0
    while norm > 0.5:
        mat = mat / 2.0
        norm /= 2.0
        squarings += 1
    out = np.eye(2, dtype=complex)
    term = np.eye(2, dtype=complex)
    for k in range(1, terms + 1):
        term = term @ mat / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def taylor_propagator(h, dt: float) -> np.ndarray:
    """exp(-i H dt) through the Taylor oracle."""
    return taylor_expm(-1j * pauli_matrix(h) * dt)


def literal_dd_reference(p, delta, dt, steps_per_segment, psi0, sampling="mid"):
    """Decoupled evolution exactly as the pulse sequence reads.

    Evolves the physical state under the primed generator between
    explicit sx pulses and records the toggling-frame state at every
    step.  Slow but structurally independent of the production kernel,
    which never applies a pulse at all.
    """
    from spinpump.pauli import expm_pauli

    n = delta.size
    psi = np.asarray(psi0, dtype=complex).copy()
    toggled = False
    out = np.empty((n + 1, 2), dtype=complex)
    out[0] = psi
    for k in range(1, n + 1):
        block = ((k - 1) // steps_per_segment) % 2
        if block == 1 and not toggled:
            psi = SIGMA_X @ psi  # pi pulse entering the primed segment
            toggled = True
        elif block == 0 and toggled:
            psi = SIGMA_X @ psi  # pi pulse closing the cycle
            toggled = False
        th = (k - 0.5) * dt if sampling == "mid" else k * dt
        gen = hamiltonian_primed if block == 1 else hamiltonian_rot
        psi = expm_pauli(gen(th, p, delta[k - 1]), dt) @ psi
        out[k] = SIGMA_X @ psi if block == 1 else psi
    return out
