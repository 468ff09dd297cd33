"""Time-dependent Hamiltonians of the two-tone drive.

Everything is phrased in angular frequency (rad/s).  The rotating-frame
generator is

    H(t) = eta [ sin(w1 t + phi01) sx + sin(w2 t + phi02) sy
                 + (m - cos(w1 t + phi01) - cos(w2 t + phi02)) sz ] + delta sz,

split into per-tone field vectors h1 + h2.  The "primed" variant flips
the sy and sz drive terms (but not the noise term) and is what runs
between the pi pulses of the decoupling sequence.  The lab-frame
Hamiltonian with carrier w0 and chirped phase exists purely to validate
the rotating-wave reduction numerically.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import InvalidArgumentError
from .pauli import PauliCoeffs

TWO_PI = 2.0 * math.pi

#: Below this phase advance |w t| the chirp formula switches to its
#: series expansion; the direct form divides by w t.
_SERIES_THRESHOLD = 1e-8


class FieldVector(NamedTuple):
    """Cartesian effective-field components in rad/s."""

    hx: float
    hy: float
    hz: float


@dataclass(frozen=True)
class DriveParams:
    """The five drive constants plus the gap parameter m.

    eta
        Overall drive energy scale in rad/s (default pairs with the
        microwave amplitude 2*eta = (2pi) 2 MHz).
    omega1, omega2
        Tone angular frequencies in rad/s; must differ.
    phi01, phi02
        Initial phases in rad.
    m
        Dimensionless gap parameter; |m| < 2 is the topological region.
    """

    eta: float = TWO_PI * 1e6
    omega1: float = TWO_PI * 50e3
    omega2: float = TWO_PI * 80.9e3
    phi01: float = math.pi / 10
    phi02: float = 0.0
    m: float = 0.9

    def __post_init__(self) -> None:
        for name in ("eta", "omega1", "omega2", "phi01", "phi02", "m"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgumentError(f"{name} must be finite")
        if self.eta <= 0.0:
            raise InvalidArgumentError("eta must be > 0")
        if self.omega1 <= 0.0 or self.omega2 <= 0.0:
            raise InvalidArgumentError("omega1 and omega2 must be > 0")
        if self.omega1 == self.omega2:
            raise InvalidArgumentError("omega1 and omega2 must differ")

    def common_period(self, max_denominator: int = 100_000) -> float | None:
        """Common period of the two tones, or None if effectively incommensurate.

        A rational ratio p/q (found within 1e-9 relative) gives period
        q * 2pi/omega1.  Simulated horizons should stay below this; the
        default tone pair repeats after 10 ms.
        """
        ratio = self.omega2 / self.omega1
        frac = Fraction(ratio).limit_denominator(max_denominator)
        if frac.denominator == 0:
            return None
        if abs(float(frac) - ratio) > 1e-9 * ratio:
            return None
        return frac.denominator * TWO_PI / self.omega1

    def check_horizon(self, t_final: float) -> None:
        """Warn when the horizon exceeds the common period of the tones."""
        period = self.common_period()
        if period is not None and t_final > period:
            warnings.warn(
                f"horizon {t_final:.3e} s exceeds the common drive period "
                f"{period:.3e} s; the phase-space sampling repeats",
                stacklevel=2,
            )


@dataclass(frozen=True)
class LabFrameParams:
    """Carrier splitting omega0 (rad/s) plus the drive constants."""

    omega0: float
    drive: DriveParams

    def __post_init__(self) -> None:
        if not math.isfinite(self.omega0) or self.omega0 <= 0.0:
            raise InvalidArgumentError("omega0 must be finite and > 0")
        if self.omega0 < 10.0 * self.drive.eta:
            warnings.warn(
                "omega0 < 10*eta: the rotating-wave reduction will be poor",
                stacklevel=2,
            )


def field_vectors(t: float, p: DriveParams) -> tuple[FieldVector, FieldVector]:
    """Per-tone field vectors h1(t), h2(t); their sum is the Zeeman field."""
    a1 = p.omega1 * t + p.phi01
    a2 = p.omega2 * t + p.phi02
    h1 = FieldVector(
        p.eta * math.sin(a1), 0.0, p.eta * (0.5 * p.m - math.cos(a1))
    )
    h2 = FieldVector(
        0.0, p.eta * math.sin(a2), p.eta * (0.5 * p.m - math.cos(a2))
    )
    return h1, h2


def field_derivatives(t: float, p: DriveParams) -> tuple[FieldVector, FieldVector]:
    """Exact time derivatives dh1/dt, dh2/dt (rad/s^2)."""
    a1 = p.omega1 * t + p.phi01
    a2 = p.omega2 * t + p.phi02
    dh1 = FieldVector(
        p.eta * p.omega1 * math.cos(a1), 0.0, p.eta * p.omega1 * math.sin(a1)
    )
    dh2 = FieldVector(
        0.0, p.eta * p.omega2 * math.cos(a2), p.eta * p.omega2 * math.sin(a2)
    )
    return dh1, dh2


def hamiltonian_rot(t: float, p: DriveParams, delta: float = 0.0) -> PauliCoeffs:
    """Rotating-frame generator; delta (rad/s) is the longitudinal noise value."""
    if not math.isfinite(delta):
        raise InvalidArgumentError("delta must be finite")
    h1, h2 = field_vectors(t, p)
    return PauliCoeffs(0.0, h1.hx + h2.hx, h1.hy + h2.hy, h1.hz + h2.hz + delta)


def hamiltonian_primed(t: float, p: DriveParams, delta: float = 0.0) -> PauliCoeffs:
    """Sign-engineered inter-pulse generator.

    The sy and sz drive terms are negated relative to
    :func:`hamiltonian_rot` while the noise term keeps its sign, so
    conjugation by sx maps this onto the rotating-frame generator with
    the noise negated -- which is exactly what makes the pulse pair
    cancel slow dephasing while preserving the drive.
    """
    if not math.isfinite(delta):
        raise InvalidArgumentError("delta must be finite")
    h1, h2 = field_vectors(t, p)
    return PauliCoeffs(
        0.0,
        h1.hx + h2.hx,
        -(h1.hy + h2.hy),
        -(h1.hz + h2.hz) + delta,
    )


def _chirp_term(w: float, phi: float, t: float, eta: float) -> float:
    """2 eta [sin(w t + phi) - sin(phi)] / (w t), series-expanded near t = 0."""
    x = w * t
    if abs(x) < _SERIES_THRESHOLD:
        # [sin(x+phi)-sin(phi)]/x = cos(phi) - (x/2) sin(phi) - (x^2/6) cos(phi) + O(x^3)
        return 2.0 * eta * (
            math.cos(phi) - 0.5 * x * math.sin(phi) - x * x / 6.0 * math.cos(phi)
        )
    return 2.0 * eta * (math.sin(x + phi) - math.sin(phi)) / x


def omega_prime(t: float, p: DriveParams) -> float:
    """Instantaneous carrier offset omega'(t) of the modulated microwave (rad/s).

    At t = 0 this is the analytic limit
    ``2 eta (m - cos(phi01) - cos(phi02))``.
    """
    if not math.isfinite(t) or t < 0.0:
        raise InvalidArgumentError("t must be finite and >= 0")
    return (
        2.0 * p.eta * p.m
        - _chirp_term(p.omega1, p.phi01, t, p.eta)
        - _chirp_term(p.omega2, p.phi02, t, p.eta)
    )


def theta(t: float, lab: LabFrameParams) -> float:
    """Accumulated frame angle theta(t) (rad); equals (omega0 - omega'(t)) t / 2."""
    if not math.isfinite(t) or t < 0.0:
        raise InvalidArgumentError("t must be finite and >= 0")
    p = lab.drive
    return (
        0.5 * lab.omega0 * t
        - p.eta * p.m * t
        + p.eta / p.omega1 * (math.sin(p.omega1 * t + p.phi01) - math.sin(p.phi01))
        + p.eta / p.omega2 * (math.sin(p.omega2 * t + p.phi02) - math.sin(p.phi02))
    )


def hamiltonian_lab(t: float, lab: LabFrameParams) -> PauliCoeffs:
    """Lab-frame generator: carrier sz term plus two modulated sx tones.

    The carrier argument (omega0 - omega'(t)) t is evaluated as
    2 theta(t), which is the same quantity without the 0/0 at t = 0.
    """
    if not math.isfinite(t) or t < 0.0:
        raise InvalidArgumentError("t must be finite and >= 0")
    p = lab.drive
    chi = 2.0 * theta(t, lab)
    ax = 2.0 * p.eta * (
        math.sin(p.omega1 * t + p.phi01) * math.cos(chi)
        - math.sin(p.omega2 * t + p.phi02) * math.sin(chi)
    )
    return PauliCoeffs(0.0, ax, 0.0, 0.5 * lab.omega0)
