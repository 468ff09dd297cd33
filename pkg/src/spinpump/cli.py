"""Command-line front end.

Subcommands map onto the experiment families:

    trajectory   one run (noisy and/or decoupled per config): work CSV + fit
    sweep-m      ensembles across the gap parameter: rates + fidelity CSVs
    sweep-tau    ensembles across the noise correlation time (needs dd)
    chern        lattice invariant of the configured drive
    gap          minimum spectral gap of the configured drive
    htraj        effective-field trajectory samples for 3-d plotting

Every run writes a manifest.json echoing the full canonical config, the
code version, timestamps, seeds and all output files.  With a fixed
config and seed the CSV outputs are byte-identical between runs on one
platform.

Exit codes: 0 success, 2 config error, 3 degeneracy/critical point,
4 numeric contract violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import RunConfig, parse_config, parse_config_text, serialize_config
from .ensemble import (
    _instance_seed,
    run_ensemble,
    sweep_correlation_time,
    sweep_m,
    sweep_to_json,
    write_fidelity_matrix_csv,
    write_sweep_csv,
)
from .errors import (
    ConfigError,
    ContractError,
    DegeneracyError,
    InvalidArgumentError,
)
from .noise import generate_trace
from .observables import (
    accumulate_work,
    fidelity,
    initial_state,
    pumping_rate,
    write_fit_json,
    write_work_csv,
)
from .propagation import evolve_dd, evolve_plain
from .topology import (
    FloquetZoneGrid,
    analytic_chern,
    chern_fhs,
    h_trajectory_sample,
    min_gap,
    write_htraj_csv,
)

EXIT_CONFIG = 2
EXIT_DEGENERACY = 3
EXIT_CONTRACT = 4


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class RunManifest:
    """Provenance record written next to every run's outputs."""

    config_echo: str
    code_version: str
    started_at: str
    finished_at: str
    outputs: tuple[str, ...]
    seeds: tuple[int, ...]
    instance_seed_rule: str = "base_seed XOR instance_index"

    def write(self, out_dir: Path) -> Path:
        path = out_dir / "manifest.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(dataclasses.asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def _write_manifest(
    out_dir: Path, rc: RunConfig, outputs: list[str], seeds: list[int], started: str
) -> Path:
    manifest = RunManifest(
        config_echo=serialize_config(rc),
        code_version=__version__,
        started_at=started,
        finished_at=_now(),
        outputs=tuple(sorted(outputs)),
        seeds=tuple(seeds),
    )
    return manifest.write(out_dir)


def _config_echo_dict(rc: RunConfig) -> dict:
    return {"ini": serialize_config(rc)}


def _cmd_trajectory(rc: RunConfig, out_dir: Path) -> list[str]:
    exp = rc.experiment
    trace = None
    seeds: list[int] = []
    if exp.noise is not None:
        seed = _instance_seed(exp.base_seed, 0)
        seeds = [seed]
        params = dataclasses.replace(exp.noise, seed=seed)
        trace = generate_trace(params, exp.integration.dt, exp.integration.n_steps)
    psi0 = initial_state(exp.drive, exp.band)
    if exp.dd is not None:
        traj = evolve_dd(exp.drive, trace, psi0, exp.integration, exp.dd)
    else:
        traj = evolve_plain(exp.drive, trace, psi0, exp.integration)
    rec = accumulate_work(traj, exp.drive, exp.integration.dt)
    rec.fidelity = fidelity(traj, exp.drive, exp.band)
    fit = pumping_rate(rec, rc.fit_window)
    write_work_csv(rec, out_dir / "trajectory.csv")
    write_fit_json(fit, exp.drive, out_dir / "trajectory_fit.json")
    print(
        f"trajectory: P1 = {fit.p1:.6g} rad/s^2, P2 = {fit.p2:.6g} rad/s^2, "
        f"C_est = {fit.chern_estimate:.4f}"
    )
    return ["trajectory.csv", "trajectory_fit.json"], seeds


def _cmd_sweep_m(rc: RunConfig, out_dir: Path) -> tuple[list[str], list[int]]:
    rows = sweep_m(rc.experiment, rc.m_values, rc.workers, rc.fit_window)
    write_sweep_csv(rows, rc.experiment.drive, out_dir / "sweep_m.csv", param="m")
    write_fidelity_matrix_csv(rows, out_dir / "fidelity_m.csv", param="m")
    sweep_to_json(rows, _config_echo_dict(rc), out_dir / "sweep_m.json", param="m")
    for m, res in rows:
        print(
            f"m = {m:+.3f}: C_mean = {res.mean_fit.chern_estimate:+.4f} "
            f"+- {res.chern_stderr:.4f} ({res.n_instances} instances)"
        )
    return ["sweep_m.csv", "fidelity_m.csv", "sweep_m.json"], [rc.experiment.base_seed]


def _cmd_sweep_tau(rc: RunConfig, out_dir: Path) -> tuple[list[str], list[int]]:
    rows = sweep_correlation_time(rc.experiment, rc.tau_values, rc.workers, rc.fit_window)
    write_sweep_csv(rows, rc.experiment.drive, out_dir / "sweep_tau.csv", param="tau_s")
    write_fidelity_matrix_csv(rows, out_dir / "fidelity_tau.csv", param="tau_s")
    sweep_to_json(rows, _config_echo_dict(rc), out_dir / "sweep_tau.json", param="tau_s")
    for tau, res in rows:
        print(
            f"tau = {tau:.3e} s: C_mean = {res.mean_fit.chern_estimate:+.4f} "
            f"+- {res.chern_stderr:.4f}"
        )
    return ["sweep_tau.csv", "fidelity_tau.csv", "sweep_tau.json"], [
        rc.experiment.base_seed
    ]


def _cmd_chern(rc: RunConfig, out_dir: Path) -> tuple[list[str], list[int]]:
    exp = rc.experiment
    grid = FloquetZoneGrid(n=rc.chern_grid_n)
    c = chern_fhs(exp.drive, grid, exp.band)
    print(f"C = {c}")
    payload = {
        "m": exp.drive.m,
        "band": exp.band,
        "grid_n": rc.chern_grid_n,
        "chern": c,
        "analytic": analytic_chern(exp.drive.m),
    }
    with open(out_dir / "chern.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return ["chern.json"], []


def _cmd_gap(rc: RunConfig, out_dir: Path) -> tuple[list[str], list[int]]:
    exp = rc.experiment
    gap = min_gap(exp.drive.m, exp.drive.eta)
    print(f"gap = {gap:.6g} rad/s")
    payload = {"m": exp.drive.m, "eta_rad_per_s": exp.drive.eta, "gap_rad_per_s": gap}
    with open(out_dir / "gap.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return ["gap.json"], []


def _cmd_htraj(rc: RunConfig, out_dir: Path) -> tuple[list[str], list[int]]:
    exp = rc.experiment
    trace = None
    seeds: list[int] = []
    if exp.noise is not None:
        seed = _instance_seed(exp.base_seed, 0)
        seeds = [seed]
        params = dataclasses.replace(exp.noise, seed=seed)
        trace = generate_trace(params, exp.integration.dt, exp.integration.n_steps)
    times, vectors = h_trajectory_sample(
        exp.drive,
        exp.integration.t_final,
        rc.htraj_stride,
        trace,
        dt=exp.integration.dt,
    )
    write_htraj_csv(times, vectors, out_dir / "htraj.csv")
    print(f"htraj: {times.size} samples")
    return ["htraj.csv"], seeds


_COMMANDS = {
    "trajectory": _cmd_trajectory,
    "sweep-m": _cmd_sweep_m,
    "sweep-tau": _cmd_sweep_tau,
    "chern": _cmd_chern,
    "gap": _cmd_gap,
    "htraj": _cmd_htraj,
}


def run_subcommand(name: str, rc: RunConfig, out_dir) -> Path:
    """Execute one experiment family; returns the manifest path."""
    if name not in _COMMANDS:
        raise ConfigError(f"unknown subcommand {name!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = _now()
    rc.experiment.drive.check_horizon(rc.experiment.integration.t_final)
    outputs, seeds = _COMMANDS[name](rc, out)
    return _write_manifest(out, rc, outputs, seeds, started)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spinpump",
        description="two-tone driven spin simulator: quantised pumping, "
        "dephasing noise, pulsed decoupling",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="INI config file (defaults when omitted)")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument(
            "--workers",
            type=int,
            default=None,
            help=f"ensemble worker processes (default: ${'{'}SPINPUMP_WORKERS{'}'} or 1)",
        )
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        rc = parse_config(args.config) if args.config else parse_config_text("")
        if args.workers is not None:
            rc = dataclasses.replace(rc, workers=args.workers)
        run_subcommand(args.command, rc, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegeneracyError as exc:
        print(f"degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERACY
    except (ContractError, InvalidArgumentError) as exc:
        print(f"numeric contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
