"""Config file parsing and canonical serialisation.

Experiments carry ~15 parameters, so runs are described by a plain-text
INI file with typed sections rather than flag soup.  Frequencies accept
two spellings: ``*_two_pi_hz`` (multiplied by 2 pi on load, matching how
drive and noise figures are usually quoted) and ``*_rad_per_s``; giving
both is an error.  An empty file parses to the full default experiment
(clean drive, 250 us horizon, 5 ns steps).

The canonical serialisation writes every key explicitly with 17
significant digits in the rad/s spelling; parsing it back yields an
identical configuration, which is what the run manifest relies on.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass
from typing import Optional

from .drive import DriveParams
from .ensemble import ExperimentConfig
from .errors import ConfigError
from .noise import NoiseParams, variance_from_t2star
from .propagation import DDConfig, IntegrationConfig

TWO_PI = 2.0 * math.pi

_DEFAULT_M_SWEEP = (-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9)
_DEFAULT_TAU_SWEEP = (100e-9, 1e-6, 20e-6, 1e-3)

# section -> key -> type tag ('float', 'int', 'bool', 'str', 'floats')
_SCHEMA: dict[str, dict[str, str]] = {
    "drive": {
        "eta_two_pi_hz": "float",
        "eta_rad_per_s": "float",
        "omega1_two_pi_hz": "float",
        "omega1_rad_per_s": "float",
        "omega2_two_pi_hz": "float",
        "omega2_rad_per_s": "float",
        "phi01_rad": "float",
        "phi02_rad": "float",
        "m": "float",
    },
    "noise": {
        "enabled": "bool",
        "t2star_s": "float",
        "variance_rad2_s2": "float",
        "tau_s": "float",
    },
    "integration": {
        "dt_s": "float",
        "t_final_s": "float",
        "record_stride": "int",
        "sampling": "str",
    },
    "dd": {
        "enabled": "bool",
        "delta_t_s": "float",
        "pulse_axis": "str",
    },
    "ensemble": {
        "instances": "int",
        "base_seed": "int",
        "workers": "int",
    },
    "run": {
        "band": "str",
        "fit_start_s": "float",
        "fit_end_s": "float",
    },
    "sweep": {
        "m_values": "floats",
        "tau_values_s": "floats",
    },
    "chern": {
        "grid_n": "int",
    },
    "htraj": {
        "stride": "int",
    },
}

_FREQ_KEYS = ("eta", "omega1", "omega2")


@dataclass(frozen=True)
class RunConfig:
    """Parsed experiment plus run-level extras the CLI needs."""

    experiment: ExperimentConfig
    workers: Optional[int] = None
    fit_window: Optional[tuple[float, float]] = None
    m_values: tuple[float, ...] = _DEFAULT_M_SWEEP
    tau_values: tuple[float, ...] = _DEFAULT_TAU_SWEEP
    chern_grid_n: int = 24
    htraj_stride: int = 100


def _typed(section: str, key: str, raw: str):
    kind = _SCHEMA[section][key]
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "bool":
            low = raw.strip().lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(raw)
        if kind == "floats":
            return tuple(float(tok) for tok in raw.split(",") if tok.strip())
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from exc


def _load_sections(text: str) -> dict[str, dict[str, object]]:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keep key case as written
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc
    unknown = []
    out: dict[str, dict[str, object]] = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            unknown.append(f"[{section}]")
            continue
        out[section] = {}
        for key, raw in cp[section].items():
            if key not in _SCHEMA[section]:
                unknown.append(f"[{section}] {key}")
                continue
            out[section][key] = _typed(section, key, raw)
    if unknown:
        raise ConfigError("unknown config entries: " + ", ".join(sorted(unknown)))
    return out


def _freq(sec: dict[str, object], name: str, default_two_pi_hz: float) -> float:
    k_hz = f"{name}_two_pi_hz"
    k_rad = f"{name}_rad_per_s"
    if k_hz in sec and k_rad in sec:
        raise ConfigError(
            f"ambiguous units: give either {k_hz} or {k_rad}, not both"
        )
    if k_rad in sec:
        return float(sec[k_rad])  # type: ignore[arg-type]
    if k_hz in sec:
        return TWO_PI * float(sec[k_hz])  # type: ignore[arg-type]
    return TWO_PI * default_two_pi_hz


def parse_config_text(text: str) -> RunConfig:
    """Parse config text into a typed run configuration (defaults filled in)."""
    sections = _load_sections(text)
    dsec = sections.get("drive", {})
    drive = DriveParams(
        eta=_freq(dsec, "eta", 1e6),
        omega1=_freq(dsec, "omega1", 50e3),
        omega2=_freq(dsec, "omega2", 80.9e3),
        phi01=float(dsec.get("phi01_rad", math.pi / 10)),
        phi02=float(dsec.get("phi02_rad", 0.0)),
        m=float(dsec.get("m", 0.9)),
    )
    isec = sections.get("integration", {})
    integration = IntegrationConfig(
        dt=float(isec.get("dt_s", 5e-9)),
        t_final=float(isec.get("t_final_s", 250e-6)),
        record_stride=int(isec.get("record_stride", 100)),
        sampling=str(isec.get("sampling", "mid")),
    )
    esec = sections.get("ensemble", {})
    base_seed = int(esec.get("base_seed", 12345))
    nsec = sections.get("noise", {})
    noise_on = bool(nsec.get("enabled", bool(nsec)))
    noise = None
    if noise_on:
        if "t2star_s" in nsec and "variance_rad2_s2" in nsec:
            raise ConfigError(
                "ambiguous noise strength: give t2star_s or variance_rad2_s2"
            )
        if "t2star_s" in nsec:
            variance = variance_from_t2star(float(nsec["t2star_s"]))  # type: ignore[arg-type]
        elif "variance_rad2_s2" in nsec:
            variance = float(nsec["variance_rad2_s2"])  # type: ignore[arg-type]
        else:
            raise ConfigError(
                "[noise] enabled but neither t2star_s nor variance_rad2_s2 given"
            )
        noise = NoiseParams(
            variance=variance,
            tau=float(nsec.get("tau_s", 1e-3)),
            seed=base_seed,
        )
    ddsec = sections.get("dd", {})
    dd_on = bool(ddsec.get("enabled", bool(ddsec)))
    dd = None
    if dd_on:
        dd = DDConfig(
            delta_t=float(ddsec.get("delta_t_s", 50e-9)),
            pulse_axis=str(ddsec.get("pulse_axis", "x")),
        )
    rsec = sections.get("run", {})
    fit_window = None
    if "fit_start_s" in rsec or "fit_end_s" in rsec:
        fit_window = (
            float(rsec.get("fit_start_s", 0.0)),
            float(rsec.get("fit_end_s", integration.t_final)),
        )
    experiment = ExperimentConfig(
        drive=drive,
        noise=noise,
        integration=integration,
        dd=dd,
        band=str(rsec.get("band", "lower")),
        instances=int(esec.get("instances", 100 if noise is not None else 1)),
        base_seed=base_seed,
    )
    ssec = sections.get("sweep", {})
    workers = int(esec["workers"]) if "workers" in esec else None
    return RunConfig(
        experiment=experiment,
        workers=workers,
        fit_window=fit_window,
        m_values=tuple(ssec.get("m_values", _DEFAULT_M_SWEEP)),
        tau_values=tuple(ssec.get("tau_values_s", _DEFAULT_TAU_SWEEP)),
        chern_grid_n=int(sections.get("chern", {}).get("grid_n", 24)),
        htraj_stride=int(sections.get("htraj", {}).get("stride", 100)),
    )


def parse_config(path) -> RunConfig:
    """Parse a config file; missing sections fall back to the defaults."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def serialize_config(rc: RunConfig) -> str:
    """Canonical INI text; parsing it back gives an equal RunConfig."""
    exp = rc.experiment
    d = exp.drive
    buf = io.StringIO()
    buf.write("[drive]\n")
    buf.write(f"eta_rad_per_s = {_fmt(d.eta)}\n")
    buf.write(f"omega1_rad_per_s = {_fmt(d.omega1)}\n")
    buf.write(f"omega2_rad_per_s = {_fmt(d.omega2)}\n")
    buf.write(f"phi01_rad = {_fmt(d.phi01)}\n")
    buf.write(f"phi02_rad = {_fmt(d.phi02)}\n")
    buf.write(f"m = {_fmt(d.m)}\n\n")
    buf.write("[noise]\n")
    buf.write(f"enabled = {'true' if exp.noise is not None else 'false'}\n")
    if exp.noise is not None:
        buf.write(f"variance_rad2_s2 = {_fmt(exp.noise.variance)}\n")
        buf.write(f"tau_s = {_fmt(exp.noise.tau)}\n")
    buf.write("\n[integration]\n")
    buf.write(f"dt_s = {_fmt(exp.integration.dt)}\n")
    buf.write(f"t_final_s = {_fmt(exp.integration.t_final)}\n")
    buf.write(f"record_stride = {exp.integration.record_stride}\n")
    buf.write(f"sampling = {exp.integration.sampling}\n\n")
    buf.write("[dd]\n")
    buf.write(f"enabled = {'true' if exp.dd is not None else 'false'}\n")
    if exp.dd is not None:
        buf.write(f"delta_t_s = {_fmt(exp.dd.delta_t)}\n")
        buf.write(f"pulse_axis = {exp.dd.pulse_axis}\n")
    buf.write("\n[ensemble]\n")
    buf.write(f"instances = {exp.instances}\n")
    buf.write(f"base_seed = {exp.base_seed}\n")
    if rc.workers is not None:
        buf.write(f"workers = {rc.workers}\n")
    buf.write("\n[run]\n")
    buf.write(f"band = {exp.band}\n")
    if rc.fit_window is not None:
        buf.write(f"fit_start_s = {_fmt(rc.fit_window[0])}\n")
        buf.write(f"fit_end_s = {_fmt(rc.fit_window[1])}\n")
    buf.write("\n[sweep]\n")
    buf.write("m_values = " + ",".join(_fmt(v) for v in rc.m_values) + "\n")
    buf.write("tau_values_s = " + ",".join(_fmt(v) for v in rc.tau_values) + "\n")
    buf.write("\n[chern]\n")
    buf.write(f"grid_n = {rc.chern_grid_n}\n")
    buf.write("\n[htraj]\n")
    buf.write(f"stride = {rc.htraj_stride}\n")
    return buf.getvalue()
