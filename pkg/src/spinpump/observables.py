"""Measured quantities: accumulated work, pumping rates, fidelity.

The work done by tone k up to time t is the Riemann sum of
``<psi(t_n)| dh_k(t_n).sigma |psi(t_n)> dt`` over full-resolution steps;
the trajectory loop accumulates it inline (states are only recorded at
the stride), so the record here just repackages those sums.  The
time-averaged pumping rates come from an ordinary least-squares line
through each work series, and the topological invariant is extracted
as ``pi (P1 - P2) / (omega1 omega2)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .drive import DriveParams, hamiltonian_rot
from .errors import ContractError, DegeneracyError, InvalidArgumentError
from .pauli import eig_pauli
from .propagation import Trajectory

#: CSV energy unit: work values are divided by (2 pi) * 1 MHz, which puts
#: the quantised 250 us accumulation at order one.
WORK_UNIT = 2.0 * math.pi * 1e6

BANDS = ("lower", "upper")


@dataclass
class WorkRecord:
    """Accumulated work per tone and (optionally) fidelity, per record time."""

    times: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    fidelity: Optional[np.ndarray]
    drive: DriveParams

    def __post_init__(self) -> None:
        n = self.times.size
        if self.e1.size != n or self.e2.size != n:
            raise ContractError("work series lengths differ from times")
        if self.fidelity is not None and self.fidelity.size != n:
            raise ContractError("fidelity length differs from times")


@dataclass(frozen=True)
class PumpingFit:
    """Fitted rates (rad/s^2), their standard errors, and the extracted invariant."""

    p1: float
    p2: float
    stderr1: float
    stderr2: float
    chern_estimate: float


def rate_quantum(p: DriveParams) -> float:
    """Quantised pumping rate omega1*omega2/(2 pi) in rad/s^2."""
    return p.omega1 * p.omega2 / (2.0 * math.pi)


def accumulate_work(traj: Trajectory, p: DriveParams, dt: float) -> WorkRecord:
    """Package the trajectory's inline work sums as a record.

    The sums were accumulated at every integration step with the state
    and tone derivatives evaluated at the step end; they are exactly
    real because the expectation values are computed from the Pauli
    components of a Hermitian operator.
    """
    if traj.kind == "lab":
        raise ContractError("lab-frame trajectories carry no work data")
    if traj.drive != p:
        raise ContractError("trajectory was produced with different drive params")
    if abs(traj.dt - dt) > 1e-15 * dt:
        raise ContractError(f"trajectory dt {traj.dt} does not match {dt}")
    return WorkRecord(
        times=traj.times.copy(),
        e1=traj.e1.copy(),
        e2=traj.e2.copy(),
        fidelity=None,
        drive=p,
    )


def _ols(t: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Slope and its standard error for y ~ a + b t."""
    tc = t - t.mean()
    stt = float(tc @ tc)
    slope = float(tc @ (y - y.mean()) / stt)
    resid = y - y.mean() - slope * tc
    dof = t.size - 2
    var = float(resid @ resid) / dof / stt if dof > 0 else 0.0
    return slope, math.sqrt(max(var, 0.0))


def pumping_rate(
    rec: WorkRecord, fit_window: Optional[tuple[float, float]] = None
) -> PumpingFit:
    """Least-squares pumping rates over the window (default: whole record)."""
    if fit_window is None:
        mask = np.ones(rec.times.size, dtype=bool)
    else:
        lo, hi = fit_window
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
            raise InvalidArgumentError("fit window must be a finite interval")
        mask = (rec.times >= lo) & (rec.times <= hi)
    if int(mask.sum()) < 100:
        raise ContractError(
            f"fit window holds {int(mask.sum())} samples; at least 100 required"
        )
    t = rec.times[mask]
    p1, se1 = _ols(t, rec.e1[mask])
    p2, se2 = _ols(t, rec.e2[mask])
    chern = math.pi * (p1 - p2) / (rec.drive.omega1 * rec.drive.omega2)
    return PumpingFit(p1=p1, p2=p2, stderr1=se1, stderr2=se2, chern_estimate=chern)


def fidelity(traj: Trajectory, p: DriveParams, band: str = "lower") -> np.ndarray:
    """Overlap with the instantaneous eigenstate of the noise-free generator.

    The reference is always the noise-free rotating-frame generator,
    also for noisy or decoupled runs (whose states are toggling-frame
    states, i.e. live in the same frame).  A sample where the bands
    touch is marked NaN instead of aborting; callers decide.
    """
    if band not in BANDS:
        raise InvalidArgumentError(f"band must be one of {BANDS}")
    if traj.kind == "lab":
        raise ContractError("map lab-frame states into the rotating frame first")
    out = np.empty(traj.times.size)
    for i, t in enumerate(traj.times):
        try:
            _, _, v_plus, v_minus = eig_pauli(hamiltonian_rot(t, p, 0.0))
        except DegeneracyError:
            out[i] = math.nan
            continue
        ref = v_minus if band == "lower" else v_plus
        out[i] = abs(np.vdot(ref, traj.states[i])) ** 2
    return out


def initial_state(p: DriveParams, band: str = "lower") -> np.ndarray:
    """Eigenstate of the noise-free generator at t = 0 (the default psi0)."""
    if band not in BANDS:
        raise InvalidArgumentError(f"band must be one of {BANDS}")
    _, _, v_plus, v_minus = eig_pauli(hamiltonian_rot(0.0, p, 0.0))
    return v_minus if band == "lower" else v_plus


# ---------------------------------------------------------------------------
# serialisation

def write_work_csv(rec: WorkRecord, path) -> None:
    """Work/fidelity series as CSV; see header comments for units."""
    lines = [
        "# work record: accumulated work per drive tone and eigenstate fidelity",
        "# t_us: time [1e-6 s]",
        f"# e1_2pimhz, e2_2pimhz: accumulated work / (2*pi*1e6 rad/s) = {WORK_UNIT!r}",
        "# fidelity: |<eigenstate|state>|^2, dimensionless; nan when not computed",
        "t_us,e1_2pimhz,e2_2pimhz,fidelity",
    ]
    fid = rec.fidelity
    for i in range(rec.times.size):
        f = float(fid[i]) if fid is not None else math.nan
        lines.append(
            f"{float(rec.times[i] * 1e6)!r},{float(rec.e1[i] / WORK_UNIT)!r},"
            f"{float(rec.e2[i] / WORK_UNIT)!r},{f!r}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def fit_to_dict(fit: PumpingFit) -> dict:
    return {
        "p1_rad_s2": fit.p1,
        "p2_rad_s2": fit.p2,
        "stderr1_rad_s2": fit.stderr1,
        "stderr2_rad_s2": fit.stderr2,
        "chern_estimate": fit.chern_estimate,
    }


def write_fit_json(fit: PumpingFit, p: DriveParams, path) -> None:
    payload = fit_to_dict(fit)
    payload["rate_quantum_rad_s2"] = rate_quantum(p)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
