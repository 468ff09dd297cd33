"""Ornstein-Uhlenbeck dephasing traces.

The longitudinal noise delta(t) follows the exact stationary update

    delta(t) = delta(t - dt) exp(-dt/tau) + y sqrt(v (1 - exp(-2 dt/tau))),

with y a fresh standard-normal deviate, v the variance (rad^2/s^2) and
tau the correlation time.  delta(0) is itself drawn from N(0, v).  The
dephasing time maps as T2* = 1/sqrt(2 v).

Deviates come from numpy's PCG64 bit generator (ziggurat normals),
which is documented and stream-stable across platforms for a given
numpy version; a trace is fully determined by (seed, dt, length).
Traces are generated up front, one per ensemble instance, so the
propagation loop never touches the RNG and decoupled segments share a
single trace.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, InvalidArgumentError

try:  # pragma: no cover - exercised implicitly by every import
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(fn):
            return fn

        return wrap if not (args and callable(args[0])) else args[0]


_TRACE_MAGIC = b"OUTRACE\x01"


@dataclass(frozen=True)
class NoiseParams:
    """OU variance v (rad^2/s^2), correlation time tau (s) and RNG seed."""

    variance: float
    tau: float
    seed: int = 0

    def __post_init__(self) -> None:
        if not math.isfinite(self.variance) or self.variance < 0.0:
            raise InvalidArgumentError("variance must be finite and >= 0")
        if not math.isfinite(self.tau) or self.tau <= 0.0:
            raise InvalidArgumentError("tau must be finite and > 0")
        if not (0 <= int(self.seed) < 2**64):
            raise InvalidArgumentError("seed must fit in 64 unsigned bits")


@dataclass
class NoiseTrace:
    """Pre-generated noise samples; samples[k] is delta((k+1) dt) in rad/s.

    init holds the delta(0) value the chain was started from (purely
    informational; steps only ever see samples[...]).
    """

    dt: float
    samples: np.ndarray
    seed: int | None = field(default=None)
    init: float = 0.0

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise InvalidArgumentError("dt must be > 0")
        self.samples = np.asarray(self.samples, dtype=float)


def variance_from_t2star(t2star: float) -> float:
    """Variance v = 1/(2 T2*^2) for a given dephasing time (s)."""
    if not math.isfinite(t2star) or t2star <= 0.0:
        raise InvalidArgumentError("t2star must be finite and > 0")
    return 1.0 / (2.0 * t2star * t2star)


def t2star_from_variance(variance: float) -> float:
    """Inverse of :func:`variance_from_t2star`."""
    if not math.isfinite(variance) or variance <= 0.0:
        raise InvalidArgumentError("variance must be finite and > 0")
    return 1.0 / math.sqrt(2.0 * variance)


def make_rng(seed: int) -> np.random.Generator:
    """The package-wide PRNG construction: PCG64 seeded directly."""
    return np.random.Generator(np.random.PCG64(seed))


def _ou_coeffs(dt: float, p: NoiseParams) -> tuple[float, float]:
    rho = math.exp(-dt / p.tau)
    return rho, math.sqrt(p.variance * (1.0 - rho * rho))


def ou_init(p: NoiseParams, rng: np.random.Generator) -> float:
    """Initial value delta(0) ~ N(0, v); exactly 0 for v = 0."""
    if p.variance == 0.0:
        return 0.0
    return rng.standard_normal() * math.sqrt(p.variance)


def ou_step(prev: float, dt: float, p: NoiseParams, rng: np.random.Generator) -> float:
    """One exact OU update over dt, consuming one standard-normal draw."""
    if dt <= 0.0:
        raise InvalidArgumentError("dt must be > 0")
    rho, s = _ou_coeffs(dt, p)
    return prev * rho + rng.standard_normal() * s


@njit(cache=True)
def _ou_chain(y: np.ndarray, rho: float, s: float, first: float) -> np.ndarray:
    out = np.empty(y.size)
    prev = first
    for i in range(y.size):
        prev = prev * rho + y[i] * s
        out[i] = prev
    return out


def generate_trace(p: NoiseParams, dt: float, n_steps: int) -> NoiseTrace:
    """Trace of n_steps samples delta(dt), ..., delta(n_steps * dt).

    Bit-identical to chaining :func:`ou_init` plus n_steps calls of
    :func:`ou_step` on a generator seeded with p.seed; the chain is just
    run over pre-drawn deviates for speed.
    """
    if n_steps < 0:
        raise InvalidArgumentError("n_steps must be >= 0")
    rng = make_rng(p.seed)
    first = ou_init(p, rng)
    rho, s = _ou_coeffs(dt, p)
    y = rng.standard_normal(n_steps)
    return NoiseTrace(
        dt=dt, samples=_ou_chain(y, rho, s, first), seed=p.seed, init=first
    )


def zero_trace(dt: float, n_steps: int) -> NoiseTrace:
    """Noise-free stand-in trace (all samples zero)."""
    return NoiseTrace(dt=dt, samples=np.zeros(n_steps), seed=None)


def save_trace(path, trace: NoiseTrace) -> None:
    """Dump a trace for debugging: 32-byte header then float64 samples.

    Header layout: 8-byte magic, float64 dt, uint64 count, uint64 seed
    (all little-endian; seed 2**64-1 marks "unknown").
    """
    seed = trace.seed if trace.seed is not None else 2**64 - 1
    header = _TRACE_MAGIC + struct.pack(
        "<dQQ", trace.dt, trace.samples.size, seed
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.asarray(trace.samples, dtype="<f8").tobytes())


def load_trace(path) -> NoiseTrace:
    """Read a trace written by :func:`save_trace`."""
    with open(path, "rb") as fh:
        header = fh.read(32)
        if len(header) != 32 or header[:8] != _TRACE_MAGIC:
            raise ContractError(f"{path}: not a trace dump")
        dt, count, seed = struct.unpack("<dQQ", header[8:])
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != count:
        raise ContractError(
            f"{path}: header promises {count} samples, file holds {data.size}"
        )
    return NoiseTrace(
        dt=dt, samples=data.copy(), seed=None if seed == 2**64 - 1 else seed
    )
