"""Monte Carlo averaging over noise realisations and parameter sweeps.

Instances are independent work units: instance i derives its noise seed
as base_seed XOR i, builds its own trace, propagates, and fits its own
pumping rates.  A sweep reuses the same base seed for every parameter
value, so all points see identical noise paths (variance reduction:
differences across the sweep are not masked by seed scatter).

Aggregation is a fixed-order pairwise tree over instance indices, which
makes ensemble results independent of the worker count; the worker pool
is an implementation detail, the determinism contract is not.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .drive import DriveParams
from .errors import ContractError, DegeneracyError, InvalidArgumentError
from .noise import NoiseParams, generate_trace
from .observables import (
    BANDS,
    PumpingFit,
    WorkRecord,
    accumulate_work,
    fidelity,
    initial_state,
    pumping_rate,
    rate_quantum,
)
from .propagation import (
    DDConfig,
    IntegrationConfig,
    _record_indices,
    evolve_dd,
    evolve_plain,
)

WORKERS_ENV = "SPINPUMP_WORKERS"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one ensemble needs: drive, noise, integration, sequence."""

    drive: DriveParams
    noise: Optional[NoiseParams] = None
    integration: IntegrationConfig = IntegrationConfig()
    dd: Optional[DDConfig] = None
    band: str = "lower"
    instances: int = 100
    base_seed: int = 12345

    def __post_init__(self) -> None:
        if self.band not in BANDS:
            raise InvalidArgumentError(f"band must be one of {BANDS}")
        if self.instances < 1:
            raise InvalidArgumentError("instances must be >= 1")
        if not (0 <= int(self.base_seed) < 2**64):
            raise InvalidArgumentError("base_seed must fit in 64 unsigned bits")
        if self.noise is None and self.instances != 1:
            # a noise-free run is deterministic; more instances add nothing
            object.__setattr__(self, "instances", 1)


@dataclass
class EnsembleResult:
    """Mean series, per-instance fits and their across-instance summary."""

    times: np.ndarray
    mean_e1: np.ndarray
    mean_e2: np.ndarray
    mean_fidelity: np.ndarray
    fits: list[PumpingFit]
    mean_fit: PumpingFit
    chern_stderr: float
    fit_of_means: PumpingFit
    n_instances: int
    n_failed: int


def _pairwise(arrays: Sequence[np.ndarray]) -> np.ndarray:
    """Sum a sequence of equal-shape arrays as a balanced binary tree."""
    items = list(arrays)
    if not items:
        raise InvalidArgumentError("nothing to reduce")
    while len(items) > 1:
        nxt = []
        for i in range(0, len(items) - 1, 2):
            nxt.append(items[i] + items[i + 1])
        if len(items) % 2 == 1:
            nxt.append(items[-1])
        items = nxt
    return items[0]


def _instance_seed(base_seed: int, index: int) -> int:
    return (int(base_seed) ^ index) & (2**64 - 1)


def _run_instance(
    cfg: ExperimentConfig, index: int, fit_window
) -> tuple[int, Optional[tuple[np.ndarray, np.ndarray, np.ndarray, PumpingFit]]]:
    """One Monte Carlo instance; returns None payload when it failed."""
    try:
        psi0 = initial_state(cfg.drive, cfg.band)
        trace = None
        if cfg.noise is not None:
            params = dataclasses.replace(
                cfg.noise, seed=_instance_seed(cfg.base_seed, index)
            )
            trace = generate_trace(params, cfg.integration.dt, cfg.integration.n_steps)
        if cfg.dd is not None:
            traj = evolve_dd(cfg.drive, trace, psi0, cfg.integration, cfg.dd)
        else:
            traj = evolve_plain(cfg.drive, trace, psi0, cfg.integration)
        rec = accumulate_work(traj, cfg.drive, cfg.integration.dt)
        fid = fidelity(traj, cfg.drive, cfg.band)
        if np.isnan(fid).any():
            return index, None
        fit = pumping_rate(rec, fit_window)
    except DegeneracyError:
        return index, None
    return index, (rec.e1, rec.e2, fid, fit)


def run_ensemble(
    cfg: ExperimentConfig,
    workers: Optional[int] = None,
    fit_window: Optional[tuple[float, float]] = None,
) -> EnsembleResult:
    """Average cfg.instances noise realisations.

    Failing instances (degenerate fidelity reference at some sample) are
    excluded and counted; more than 10% failures aborts the ensemble.
    Results are identical for any worker count.
    """
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    indices = list(range(cfg.instances))
    if workers > 1 and cfg.instances > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            raw = list(
                pool.map(
                    _run_instance,
                    [cfg] * len(indices),
                    indices,
                    [fit_window] * len(indices),
                    chunksize=max(1, len(indices) // (4 * workers)),
                )
            )
    else:
        raw = [_run_instance(cfg, i, fit_window) for i in indices]
    raw.sort(key=lambda item: item[0])
    payloads = [payload for _, payload in raw if payload is not None]
    n_failed = cfg.instances - len(payloads)
    if n_failed > 0.1 * cfg.instances:
        raise DegeneracyError(
            f"{n_failed}/{cfg.instances} instances failed on a degenerate "
            "fidelity reference"
        )
    n = len(payloads)
    mean_e1 = _pairwise([pl[0] for pl in payloads]) / n
    mean_e2 = _pairwise([pl[1] for pl in payloads]) / n
    mean_fid = _pairwise([pl[2] for pl in payloads]) / n
    fits = [pl[3] for pl in payloads]
    p1s = np.array([f.p1 for f in fits])
    p2s = np.array([f.p2 for f in fits])
    cherns = np.array([f.chern_estimate for f in fits])
    if n == 1:
        # degenerate ensemble: keep the instance fit, residual errors and all
        mean_fit = fits[0]
        chern_stderr = 0.0
    else:
        mean_fit = PumpingFit(
            p1=float(_pairwise(list(p1s)) / n),
            p2=float(_pairwise(list(p2s)) / n),
            stderr1=float(p1s.std(ddof=1) / math.sqrt(n)),
            stderr2=float(p2s.std(ddof=1) / math.sqrt(n)),
            chern_estimate=float(_pairwise(list(cherns)) / n),
        )
        chern_stderr = float(cherns.std(ddof=1) / math.sqrt(n))
    # the same record grid holds for every instance
    times = (
        _record_indices(cfg.integration.n_steps, cfg.integration.record_stride)
        * cfg.integration.dt
    )
    mean_rec = WorkRecord(
        times=times, e1=mean_e1, e2=mean_e2, fidelity=mean_fid, drive=cfg.drive
    )
    fom = pumping_rate(mean_rec, fit_window)
    return EnsembleResult(
        times=times,
        mean_e1=mean_e1,
        mean_e2=mean_e2,
        mean_fidelity=mean_fid,
        fits=fits,
        mean_fit=mean_fit,
        chern_stderr=chern_stderr,
        fit_of_means=fom,
        n_instances=n,
        n_failed=n_failed,
    )


def sweep_m(
    cfg: ExperimentConfig,
    m_values: Sequence[float],
    workers: Optional[int] = None,
    fit_window: Optional[tuple[float, float]] = None,
) -> list[tuple[float, EnsembleResult]]:
    """One ensemble per gap parameter, identical noise paths across points."""
    if not m_values:
        raise InvalidArgumentError("m_values must be nonempty")
    out = []
    for m in m_values:
        drive = dataclasses.replace(cfg.drive, m=float(m))
        out.append(
            (float(m), run_ensemble(dataclasses.replace(cfg, drive=drive), workers, fit_window))
        )
    return out


def sweep_correlation_time(
    cfg: ExperimentConfig,
    taus: Sequence[float],
    workers: Optional[int] = None,
    fit_window: Optional[tuple[float, float]] = None,
) -> list[tuple[float, EnsembleResult]]:
    """One ensemble per noise correlation time; requires decoupling enabled."""
    if not taus:
        raise InvalidArgumentError("taus must be nonempty")
    if cfg.dd is None:
        raise ContractError("correlation-time sweeps require the pulse sequence")
    if cfg.noise is None:
        raise ContractError("correlation-time sweeps require noise")
    out = []
    for tau in taus:
        noise = dataclasses.replace(cfg.noise, tau=float(tau))
        out.append(
            (float(tau), run_ensemble(dataclasses.replace(cfg, noise=noise), workers, fit_window))
        )
    return out


# ---------------------------------------------------------------------------
# serialisation

def write_sweep_csv(
    rows: list[tuple[float, EnsembleResult]],
    drive: DriveParams,
    path,
    param: str = "m",
) -> None:
    """One row per sweep point: mean rates, errors and invariant estimates."""
    q = rate_quantum(drive)
    lines = [
        "# sweep result: one row per parameter value",
        f"# {param}: sweep parameter; p1/p2 [rad/s^2]; stderr across instances",
        "# chern_mean: mean per-instance invariant; chern_fom: fit of mean series",
        f"# rate_quantum_rad_s2 = {q!r}",
        f"{param},p1,p1_stderr,p2,p2_stderr,chern_mean,chern_stderr,"
        "chern_fom,n_instances,n_failed,rate_quantum",
    ]
    for value, res in rows:
        mf = res.mean_fit
        lines.append(
            f"{value!r},{mf.p1!r},{mf.stderr1!r},{mf.p2!r},{mf.stderr2!r},"
            f"{mf.chern_estimate!r},{res.chern_stderr!r},"
            f"{res.fit_of_means.chern_estimate!r},{res.n_instances},"
            f"{res.n_failed},{q!r}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_fidelity_matrix_csv(
    rows: list[tuple[float, EnsembleResult]], path, param: str = "m"
) -> None:
    """Mean fidelity series per sweep point, one column per value."""
    labels = [f"fid_{param}_{value:g}" for value, _ in rows]
    times = rows[0][1].times
    lines = [
        "# mean eigenstate fidelity per sweep point",
        "# t_us: time [1e-6 s]; columns are dimensionless fidelities",
        "t_us," + ",".join(labels),
    ]
    for i in range(times.size):
        vals = ",".join(repr(float(res.mean_fidelity[i])) for _, res in rows)
        lines.append(f"{float(times[i] * 1e6)!r},{vals}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def sweep_to_json(
    rows: list[tuple[float, EnsembleResult]],
    config_echo: dict,
    path,
    param: str = "m",
) -> None:
    """Sweep summary plus the full configuration echo, for provenance."""
    payload = {
        "param": param,
        "config": config_echo,
        "points": [
            {
                param: value,
                "p1": res.mean_fit.p1,
                "p2": res.mean_fit.p2,
                "p1_stderr": res.mean_fit.stderr1,
                "p2_stderr": res.mean_fit.stderr2,
                "chern_mean": res.mean_fit.chern_estimate,
                "chern_stderr": res.chern_stderr,
                "chern_fit_of_means": res.fit_of_means.chern_estimate,
                "n_instances": res.n_instances,
                "n_failed": res.n_failed,
            }
            for value, res in rows
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
