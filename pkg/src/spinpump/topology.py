"""Band topology of the drive torus.

The two drive phases live on a torus (q1, q2) = (omega1 t + phi01,
omega2 t + phi02); the invariant of a band is computed with the lattice
field-strength construction: U(1) link variables from eigenvector
overlaps between neighbouring grid points, plaquette phases from the
principal log of the link product, and the integer as their sum over
the torus divided by 2 pi.  The construction is gauge invariant and
returns exact integers already on coarse grids, away from the critical
gap parameters {-2, 0, 2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .drive import DriveParams
from .errors import (
    ContractError,
    CriticalPointError,
    DegeneracyError,
    InvalidArgumentError,
)
from .noise import NoiseTrace

TWO_PI = 2.0 * math.pi

_CRITICAL_MS = (-2.0, 0.0, 2.0)

#: chern_fhs refuses gap parameters closer than this to a transition;
#: the lattice integer is unreliable when the gap collapses under the
#: grid resolution.
CRITICAL_MARGIN = 0.05

#: Fixed, deliberately skew ray direction for the crossing-parity test.
_RAY = np.array([0.12908249, 0.54133089, 0.83082886])
_RAY = _RAY / np.linalg.norm(_RAY)


@dataclass(frozen=True)
class FloquetZoneGrid:
    """Uniform n x n grid over the phase torus, optionally offset."""

    n: int = 24
    offsets: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if self.n < 8:
            raise InvalidArgumentError("grid needs n >= 8")

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        q1 = self.offsets[0] + np.arange(self.n) * TWO_PI / self.n
        q2 = self.offsets[1] + np.arange(self.n) * TWO_PI / self.n
        return q1, q2


def analytic_chern(m: float) -> int:
    """Closed-form invariant of the lower band: -1, +1 or 0 by gap parameter."""
    if not math.isfinite(m):
        raise InvalidArgumentError("m must be finite")
    if any(abs(m - c) < 1e-12 for c in _CRITICAL_MS):
        raise CriticalPointError(f"m = {m} sits on a topological transition")
    if -2.0 < m < 0.0:
        return -1
    if 0.0 < m < 2.0:
        return 1
    return 0


def min_gap(m: float, eta: float) -> float:
    """Minimum spectral gap eta * min(||m|-2|, |m|) over the torus (rad/s)."""
    if not math.isfinite(m):
        raise InvalidArgumentError("m must be finite")
    if not math.isfinite(eta) or eta <= 0.0:
        raise InvalidArgumentError("eta must be finite and > 0")
    return eta * min(abs(abs(m) - 2.0), abs(m))


def _torus_field(p: DriveParams, q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Field components on the (q1, q2) grid, shape (n1, n2, 3)."""
    a1 = q1[:, None] + p.phi01
    a2 = q2[None, :] + p.phi02
    hx = np.broadcast_to(np.sin(a1), (q1.size, q2.size)).copy()
    hy = np.broadcast_to(np.sin(a2), (q1.size, q2.size)).copy()
    hz = p.m - np.cos(a1) - np.cos(a2)
    return p.eta * np.stack([hx, hy, np.broadcast_to(hz, hx.shape)], axis=-1)


def _band_vectors(h: np.ndarray, band: str) -> np.ndarray:
    """Normalised eigenvectors of h.sigma on a grid, branch-switched for stability."""
    hx, hy, hz = h[..., 0], h[..., 1], h[..., 2]
    r = np.sqrt(hx * hx + hy * hy + hz * hz)
    v = np.zeros(h.shape[:-1] + (2,), dtype=complex)
    pos = hz >= 0.0
    neg = ~pos
    if band == "lower":
        v[pos, 0] = -(hx[pos] - 1j * hy[pos])
        v[pos, 1] = hz[pos] + r[pos]
        v[neg, 0] = hz[neg] - r[neg]
        v[neg, 1] = hx[neg] + 1j * hy[neg]
    elif band == "upper":
        v[pos, 0] = hz[pos] + r[pos]
        v[pos, 1] = hx[pos] + 1j * hy[pos]
        v[neg, 0] = -(hx[neg] - 1j * hy[neg])
        v[neg, 1] = hz[neg] - r[neg]
    else:
        raise InvalidArgumentError("band must be 'lower' or 'upper'")
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def chern_fhs(p: DriveParams, grid: FloquetZoneGrid, band: str = "lower") -> int:
    """Integer band invariant from link variables and plaquette phases."""
    for c in _CRITICAL_MS:
        if abs(p.m - c) < CRITICAL_MARGIN:
            raise CriticalPointError(
                f"m = {p.m} is within {CRITICAL_MARGIN} of the transition at {c}; "
                "the lattice invariant is unreliable there"
            )
    q1, q2 = grid.axes()
    h = _torus_field(p, q1, q2)
    r = np.linalg.norm(h, axis=-1)
    if float(r.min()) < 1e-9 * p.eta:
        raise DegeneracyError(
            "band touching on the grid; shift the grid offsets"
        )
    v = _band_vectors(h, band)
    u1 = np.sum(np.conj(v) * np.roll(v, -1, axis=0), axis=-1)
    u2 = np.sum(np.conj(v) * np.roll(v, -1, axis=1), axis=-1)
    u1 /= np.abs(u1)
    u2 /= np.abs(u2)
    plaq = u1 * np.roll(u2, -1, axis=0) * np.conj(np.roll(u1, -1, axis=1)) * np.conj(u2)
    total = float(np.sum(np.angle(plaq))) / TWO_PI
    nearest = round(total)
    if abs(total - nearest) > 0.01:
        raise DegeneracyError(
            f"plaquette sum {total:.4f} is not integer; refine the grid"
        )
    return int(nearest)


def h_trajectory_sample(
    p: DriveParams,
    t_final: float,
    stride: int,
    noise: NoiseTrace | None = None,
    dt: float = 5e-9,
) -> tuple[np.ndarray, np.ndarray]:
    """Sample the summed field along the physical phase trajectory.

    Returns (times, vectors) with vectors of shape (n, 3) in rad/s,
    sampled every stride integration steps; the noise value (when a
    trace is supplied) is added on the z component.
    """
    if stride < 1:
        raise InvalidArgumentError("stride must be >= 1")
    if t_final < dt:
        raise InvalidArgumentError("t_final must be >= dt")
    n_steps = int(round(t_final / dt))
    idx = np.arange(0, n_steps + 1, stride, dtype=np.int64)
    times = idx * dt
    a1 = p.omega1 * times + p.phi01
    a2 = p.omega2 * times + p.phi02
    hx = p.eta * np.sin(a1)
    hy = p.eta * np.sin(a2)
    hz = p.eta * (p.m - np.cos(a1) - np.cos(a2))
    if noise is not None:
        if noise.samples.size < n_steps:
            raise ContractError(
                f"noise trace holds {noise.samples.size} samples, need {n_steps}"
            )
        dz = np.empty(idx.size)
        dz[0] = noise.init
        dz[1:] = noise.samples[idx[1:] - 1]
        hz = hz + dz
    return times, np.stack([hx, hy, hz], axis=-1)


def h_surface(p: DriveParams, n: int = 64) -> np.ndarray:
    """The closed 2-torus surface {h1(a) + h2(b)} on an n x n phase grid."""
    if n < 8:
        raise InvalidArgumentError("surface grid needs n >= 8")
    a = np.arange(n) * TWO_PI / n
    s1 = np.sin(a + p.phi01)
    c1 = np.cos(a + p.phi01)
    s2 = np.sin(a + p.phi02)
    c2 = np.cos(a + p.phi02)
    hx = np.broadcast_to(p.eta * s1[:, None], (n, n))
    hy = np.broadcast_to(p.eta * s2[None, :], (n, n))
    hz = p.eta * (p.m - c1[:, None] - c2[None, :])
    return np.stack([hx, hy, hz], axis=-1)


def _surface_triangles(surface: np.ndarray) -> np.ndarray:
    """Triangulate the periodic grid; returns (2 n^2, 3, 3) vertex array."""
    n = surface.shape[0]
    i = np.arange(n)
    ip = (i + 1) % n
    p00 = surface[i[:, None], i[None, :]]
    p10 = surface[ip[:, None], i[None, :]]
    p01 = surface[i[:, None], ip[None, :]]
    p11 = surface[ip[:, None], ip[None, :]]
    tri_a = np.stack([p00, p10, p11], axis=-2).reshape(-1, 3, 3)
    tri_b = np.stack([p00, p11, p01], axis=-2).reshape(-1, 3, 3)
    return np.concatenate([tri_a, tri_b], axis=0)


def point_inside_surface(point: np.ndarray, surface: np.ndarray) -> bool:
    """Crossing parity of a fixed ray from the point against the surface.

    Odd parity means the point is enclosed by the sampled manifold.
    Uses Moller-Trumbore over the triangulated periodic grid.
    """
    tri = _surface_triangles(surface)
    v0 = tri[:, 0]
    e1 = tri[:, 1] - v0
    e2 = tri[:, 2] - v0
    d = _RAY
    pvec = np.cross(np.broadcast_to(d, e2.shape), e2)
    det = np.einsum("ij,ij->i", e1, pvec)
    ok = np.abs(det) > 1e-18
    inv = np.zeros_like(det)
    inv[ok] = 1.0 / det[ok]
    tvec = point - v0
    u = np.einsum("ij,ij->i", tvec, pvec) * inv
    qvec = np.cross(tvec, e1)
    v = np.einsum("ij,ij->i", np.broadcast_to(d, qvec.shape), qvec) * inv
    t = np.einsum("ij,ij->i", e2, qvec) * inv
    hits = ok & (u >= 0.0) & (v >= 0.0) & (u + v <= 1.0) & (t > 1e-12)
    return bool(np.count_nonzero(hits) % 2 == 1)


def origin_enclosed(p: DriveParams, n: int = 64) -> bool:
    """Whether the degeneracy point h = 0 lies inside the drive manifold."""
    return point_inside_surface(np.zeros(3), h_surface(p, n))


def write_htraj_csv(times: np.ndarray, vectors: np.ndarray, path) -> None:
    """Field trajectory as CSV with columns t, hx, hy, hz (s and rad/s)."""
    lines = [
        "# field trajectory: t [s]; hx, hy, hz [rad/s]",
        "t,hx,hy,hz",
    ]
    for i in range(times.size):
        lines.append(
            f"{float(times[i])!r},{float(vectors[i, 0])!r},"
            f"{float(vectors[i, 1])!r},{float(vectors[i, 2])!r}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
