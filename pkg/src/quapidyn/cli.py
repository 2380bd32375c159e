"""Scenario configuration, named presets, and CSV/manifest output.

Config files are sectioned key = value text.  Every physical value
carries a unit suffix on the value side (``kappa0 = 210 cm-1``) and is
rejected without it; dimensionless keys take bare numbers.  Each
``[scenario:<name>]`` section describes one run; ``[sweep:<name>]``
sections expand a base scenario along one numeric axis, one output file
per point.  Exit codes: 0 success, 2 configuration error, 3 numerical
error.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .bath import (
    BathSpec,
    QuadratureError,
    influence_coefficients,
    response_table,
)
from .driven_system import BareParameters, SystemHamiltonian, estimate_drive_strength
from .quapi_engine import NumericalBlowupError, Trajectory, initial_state, propagate
from .reference_solvers import unitary_evolution

CSV_COLUMNS = ("re_rho_HH", "re_rho_BB", "re_rho_HB", "im_rho_HB", "abs_rho_HB")
SOLVERS = ("quapi", "markov", "unitary")

# key -> unit suffix (None = dimensionless, bare number required)
_BARE_KEYS = {
    "eps0": "cm-1",
    "epsH": "cm-1",
    "epsB": "cm-1",
    "epsHB": "cm-1",
    "J0": "cm-1",
    "kappa0": "cm-1",
    "gamma1": "fs-2",
    "gamma2": "fs-2",
    "t1": "fs",
}
_BATH_KEYS = {"s": None, "xi": None, "omega_c": "cm-1", "T": "K"}
_RUN_KEYS = {"dt": "fs", "t_end": "fs", "dk_max": None}
_NUMERIC_KEYS = {**_BARE_KEYS, **_BATH_KEYS, **_RUN_KEYS}


class ConfigError(ValueError):
    """Config file failed to parse or validate."""


@dataclass(frozen=True)
class Scenario:
    """One named propagation: drive + bath + grid + solver + columns."""

    name: str
    bare: BareParameters
    bath: BathSpec
    dt: float = 5.0
    t_end: float = 600.0
    dk_max: int = 3
    solver: str = "quapi"
    outputs: tuple[str, ...] = CSV_COLUMNS

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("scenario name must be non-empty")
        if not self.dt > 0.0:
            raise ValueError(f"{self.name}: dt must be positive")
        if self.t_end < self.dt:
            raise ValueError(f"{self.name}: t_end must be >= dt")
        if self.dk_max < 0:
            raise ValueError(f"{self.name}: dk_max must be >= 0")
        if self.solver not in SOLVERS:
            raise ValueError(f"{self.name}: solver must be one of {SOLVERS}")
        bad = [c for c in self.outputs if c not in CSV_COLUMNS]
        if bad or not self.outputs:
            raise ValueError(f"{self.name}: outputs must be a non-empty subset of {CSV_COLUMNS}")
        # canonical column order regardless of config order
        ordered = tuple(c for c in CSV_COLUMNS if c in self.outputs)
        object.__setattr__(self, "outputs", ordered)
        n = round(self.t_end / self.dt)
        if abs(n * self.dt - self.t_end) > 1e-9 * self.t_end:
            raise ValueError(f"{self.name}: t_end must be an integer multiple of dt")

    @property
    def n_steps(self) -> int:
        return round(self.t_end / self.dt)


@dataclass(frozen=True)
class SweepSpec:
    """Expansion of a base scenario along one numeric parameter."""

    base: Scenario
    axis: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.axis not in _NUMERIC_KEYS:
            raise ValueError(f"sweep axis {self.axis!r} is not a numeric parameter")
        if not self.values:
            raise ValueError("sweep values must be non-empty")

    def points(self) -> list[Scenario]:
        return [
            _apply_axis(self.base, self.axis, v, f"{self.base.name}_{self.axis}_{_fmt_value(v)}")
            for v in self.values
        ]


@dataclass(frozen=True)
class TableJob:
    """Bath response table Re/Im C(t) instead of a propagation."""

    name: str
    bath: BathSpec
    dt: float
    t_end: float


@dataclass(frozen=True)
class EstimateJob:
    """Dipole/field chain for the peak drive strength."""

    name: str


def _fmt_value(v: float) -> str:
    return f"{v:g}".replace(".", "p").replace("-", "m")


def _apply_axis(base: Scenario, axis: str, value: float, name: str) -> Scenario:
    if axis in _BARE_KEYS:
        field = {"gamma1": "Gamma1", "gamma2": "Gamma2"}.get(axis, axis)
        return replace(base, name=name, bare=replace(base.bare, **{field: value}))
    if axis in _BATH_KEYS:
        return replace(base, name=name, bath=replace(base.bath, **{axis: value}))
    if axis == "dk_max":
        return replace(base, name=name, dk_max=int(value))
    return replace(base, name=name, **{axis: value})


# ---------------------------------------------------------------- config i/o


def _parse_quantity(section: str, key: str, raw: str, unit: str | None) -> float:
    parts = raw.split()
    if unit is None:
        if len(parts) != 1:
            raise ConfigError(
                f"[{section}] {key}: expected a bare number, got {raw!r}"
            )
    else:
        if len(parts) != 2 or parts[1] != unit:
            raise ConfigError(
                f"[{section}] {key}: expected '<number> {unit}', got {raw!r}"
            )
    try:
        return float(parts[0])
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from exc


def _scenario_from_section(name: str, sec: configparser.SectionProxy) -> Scenario:
    section = f"scenario:{name}"
    known = set(_NUMERIC_KEYS) | {"solver", "outputs"}
    unknown = set(sec) - known
    if unknown:
        raise ConfigError(f"[{section}] unknown keys: {sorted(unknown)}")
    vals: dict[str, float] = {}
    for key, unit in _NUMERIC_KEYS.items():
        if key in sec:
            vals[key] = _parse_quantity(section, key, sec[key], unit)
    missing = [k for k in list(_BARE_KEYS) + list(_BATH_KEYS) if k not in vals and k != "epsHB"]
    if missing:
        raise ConfigError(f"[{section}] missing keys: {missing}")
    bare = BareParameters(
        eps0=vals["eps0"], epsH=vals["epsH"], epsB=vals["epsB"],
        J0=vals["J0"], kappa0=vals["kappa0"],
        Gamma1=vals["gamma1"], Gamma2=vals["gamma2"], t1=vals["t1"],
        epsHB=vals.get("epsHB", 0.0),
    )
    bath = BathSpec(s=vals["s"], xi=vals["xi"], omega_c=vals["omega_c"], T=vals["T"])
    extra: dict = {}
    if "solver" in sec:
        extra["solver"] = sec["solver"].strip()
    if "outputs" in sec:
        cols = tuple(c.strip() for c in sec["outputs"].split(",") if c.strip())
        extra["outputs"] = cols
    try:
        return Scenario(
            name=name, bare=bare, bath=bath,
            dt=vals.get("dt", 5.0), t_end=vals.get("t_end", 600.0),
            dk_max=int(vals.get("dk_max", 3)), **extra,
        )
    except ValueError as exc:
        raise ConfigError(f"[{section}] {exc}") from exc


def load_config(path: str | Path) -> tuple[list[Scenario], list[SweepSpec]]:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keys are case-sensitive (epsH vs epsB)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc

    scenarios: dict[str, Scenario] = {}
    sweeps: list[SweepSpec] = []
    for section in parser.sections():
        if section.startswith("scenario:"):
            name = section.split(":", 1)[1]
            if name in scenarios:
                raise ConfigError(f"duplicate scenario name {name!r}")
            scenarios[name] = _scenario_from_section(name, parser[section])
    for section in parser.sections():
        if section.startswith("scenario:"):
            continue
        if not section.startswith("sweep:"):
            raise ConfigError(f"unknown section [{section}]")
        name = section.split(":", 1)[1]
        sec = parser[section]
        for key in ("base", "axis", "values"):
            if key not in sec:
                raise ConfigError(f"[{section}] missing key {key!r}")
        base_name = sec["base"].strip()
        if base_name not in scenarios:
            raise ConfigError(f"[{section}] base {base_name!r} is not a scenario in this file")
        axis = sec["axis"].strip()
        if axis not in _NUMERIC_KEYS:
            raise ConfigError(f"[{section}] axis {axis!r} is not a numeric parameter")
        unit = _NUMERIC_KEYS[axis]
        values = tuple(
            _parse_quantity(section, "values", item.strip(), unit)
            for item in sec["values"].split(",") if item.strip()
        )
        try:
            sweeps.append(SweepSpec(base=replace(scenarios[base_name], name=name), axis=axis, values=values))
        except ValueError as exc:
            raise ConfigError(f"[{section}] {exc}") from exc

    out_names = [s.name for s in scenarios.values()]
    for sw in sweeps:
        out_names.extend(p.name for p in sw.points())
    dup = {n for n in out_names if out_names.count(n) > 1}
    if dup:
        raise ConfigError(f"duplicate output names: {sorted(dup)}")
    return list(scenarios.values()), sweeps


def format_scenario(sc: Scenario) -> str:
    """Config-format section; parsing it back yields an identical Scenario."""
    lines = [f"[scenario:{sc.name}]"]

    def q(key: str, value: float) -> str:
        unit = _NUMERIC_KEYS[key]
        num = f"{value:.17g}"
        return f"{key} = {num} {unit}" if unit else f"{key} = {num}"

    b = sc.bare
    for key, val in (
        ("eps0", b.eps0), ("epsH", b.epsH), ("epsB", b.epsB), ("epsHB", b.epsHB),
        ("J0", b.J0), ("kappa0", b.kappa0),
        ("gamma1", b.Gamma1), ("gamma2", b.Gamma2), ("t1", b.t1),
    ):
        lines.append(q(key, val))
    for key, val in (("s", sc.bath.s), ("xi", sc.bath.xi),
                     ("omega_c", sc.bath.omega_c), ("T", sc.bath.T)):
        lines.append(q(key, val))
    lines.append(q("dt", sc.dt))
    lines.append(q("t_end", sc.t_end))
    lines.append(f"dk_max = {sc.dk_max}")
    lines.append(f"solver = {sc.solver}")
    lines.append(f"outputs = {', '.join(sc.outputs)}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------- file output


def _atomic_write_text(path: Path, data: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trajectory_csv(traj: Trajectory, outputs: tuple[str, ...] = CSV_COLUMNS) -> str:
    series = {
        "re_rho_HH": traj.rho_hh,
        "re_rho_BB": traj.rho_bb,
        "re_rho_HB": traj.re_rho_hb,
        "im_rho_HB": traj.im_rho_hb,
        "abs_rho_HB": traj.abs_rho_hb,
    }
    cols = [traj.times] + [series[c] for c in outputs]
    lines = [", ".join(["t_fs"] + list(outputs))]
    for row in zip(*cols):
        lines.append(", ".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def response_csv(times: np.ndarray, values: np.ndarray) -> str:
    lines = ["t_fs, re_C_cm-2, im_C_cm-2"]
    for t, c in zip(times, values):
        lines.append(f"{t:.17g}, {c.real:.17g}, {c.imag:.17g}")
    return "\n".join(lines) + "\n"


def _sha256(data: str) -> str:
    return hashlib.sha256(data.encode("utf-8")).hexdigest()


# ------------------------------------------------------------------- presets

_OHMIC_77 = BathSpec(s=1.0, xi=0.75, omega_c=2000.0, T=77.0)
_REFERENCE_BARE = BareParameters(
    eps0=10570.0, epsH=12108.0, epsB=12000.0, J0=20.0,
    kappa0=210.0, Gamma1=3e-6, Gamma2=3e-6, t1=30.0,
)
_REFERENCE = Scenario(name="fig2a", bare=_REFERENCE_BARE, bath=_OHMIC_77)

# inputs of the drive-strength estimate: band dipole strength 40 D^2,
# absorbance ratio 0.5, band-shape factor 1.1, band centers 750/800 nm,
# pulse fluence 1.3e-4 J/cm^2 over 40 fs in a medium of index 2
_ESTIMATE_INPUTS = dict(
    n=2.0, eps_ratio=0.5, delta_ratio=1.1, D_B=40.0,
    lambda_H=750.0, lambda_B=800.0, power=1.3e-4, duration=40.0,
)


def _preset_jobs() -> dict[str, tuple[str, list]]:
    ref = _REFERENCE
    split = [
        _apply_axis(ref, "epsH", ref.bare.epsB + d, f"fig4_splitting_{_fmt_value(d)}")
        for d in (108.0, 118.0, 158.0)
    ]
    coupling = [
        _apply_axis(ref, "J0", j, f"fig5_J0_{_fmt_value(j)}")
        for j in (20.0, 5.0, 0.01)
    ]
    drive = [
        _apply_axis(ref, "kappa0", k, f"fig6_kappa_{_fmt_value(k)}")
        for k in (170.0, 210.0, 250.0)
    ]
    return {
        "fig1": ("bath response function Re/Im C(t), Ohmic 77 K, 0-100 fs",
                 [TableJob(name="fig1", bath=_OHMIC_77, dt=1.0, t_end=100.0)]),
        "fig2a": ("coherence decay, Ohmic bath at 77 K", [ref]),
        "fig2b": ("coherence decay, Ohmic bath at 180 K",
                  [replace(ref, name="fig2b", bath=replace(_OHMIC_77, T=180.0))]),
        "fig3a_subohmic": ("sub-Ohmic bath s = 1/2, xi = 0.07, 77 K",
                           [replace(ref, name="fig3a_subohmic",
                                    bath=replace(_OHMIC_77, s=0.5, xi=0.07))]),
        "fig3a_superohmic": ("super-Ohmic bath s = 2, xi = 50, 77 K",
                             [replace(ref, name="fig3a_superohmic",
                                      bath=replace(_OHMIC_77, s=2.0, xi=50.0))]),
        "fig3b_markov": ("memoryless baseline (dk_max = 0) on the 77 K parameters",
                         [replace(ref, name="fig3b_markov", dk_max=0, solver="markov")]),
        "fig4_splitting": ("site-splitting sweep epsH-epsB = 108, 118, 158 cm-1",
                           split),
        "fig5_J0": ("site-coupling sweep J0 = 20, 5, 0.01 cm-1", coupling),
        "fig6_kappa": ("drive-strength sweep kappa0 = 170, 210, 250 cm-1",
                       drive),
        "kappa0_estimate": ("dipole/field estimate of the peak drive strength",
                            [EstimateJob(name="kappa0_estimate")]),
    }


def list_presets() -> list[tuple[str, str]]:
    return [(name, desc) for name, (desc, _) in _preset_jobs().items()]


# -------------------------------------------------------------------- runner


def _estimate_csv() -> str:
    est = estimate_drive_strength(**_ESTIMATE_INPUTS)
    rows = [
        ("kappa0_cm-1", est.kappa0_wavenumber),
        ("mu_debye", est.mu_debye),
        ("D_H_debye2", est.d_h_debye2),
        ("D_B_debye2", est.d_b_debye2),
        ("E0_V_per_cm", est.e0_v_per_cm),
        ("E_rms_V_per_cm", est.e_rms_v_per_cm),
        ("intensity_W_per_cm2", est.intensity_w_per_cm2),
    ]
    lines = ["quantity, value"] + [f"{k}, {v:.17g}" for k, v in rows]
    return "\n".join(lines) + "\n"


def _job_csv(job, kernels: dict) -> str:
    try:
        return _job_csv_inner(job, kernels)
    except (QuadratureError, NumericalBlowupError, FloatingPointError) as exc:
        raise type(exc)(f"{job.name}: {exc}") from exc


def _job_csv_inner(job, kernels: dict) -> str:
    if isinstance(job, TableJob):
        times = job.dt * np.arange(round(job.t_end / job.dt) + 1)
        return response_csv(times, response_table(job.bath, times))
    if isinstance(job, EstimateJob):
        return _estimate_csv()
    sc: Scenario = job
    rho0 = initial_state()
    sys_h = SystemHamiltonian.from_bare(sc.bare)
    if sc.solver == "unitary":
        grid = sc.dt * np.arange(sc.n_steps + 1)
        traj = unitary_evolution(sys_h, rho0, sc.t_end, t_eval=grid)
    else:
        dk = 0 if sc.solver == "markov" else sc.dk_max
        traj = propagate(sys_h, kernels[_kernel_key(sc)], rho0, sc.dt, sc.n_steps, dk)
    return trajectory_csv(traj, sc.outputs)


def _kernel_key(sc: Scenario):
    return (sc.bath, sc.dt)


def _build_kernels(jobs: list) -> dict:
    # one kernel per (bath, dt), wide enough for every job sharing it
    need: dict = {}
    for job in jobs:
        if not isinstance(job, Scenario) or job.solver == "unitary":
            continue
        dk = 0 if job.solver == "markov" else min(job.dk_max, job.n_steps)
        key = _kernel_key(job)
        need[key] = max(need.get(key, 0), dk)
    return {
        key: influence_coefficients(key[0], key[1], dk, 1)
        for key, dk in need.items()
    }


def run_jobs(jobs: list, out_dir: str | Path, threads: int = 1) -> dict[str, str]:
    """Execute jobs, write one CSV each into out_dir; return name -> sha256."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    kernels = _build_kernels(jobs)
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            texts = list(pool.map(lambda j: _job_csv(j, kernels), jobs))
    else:
        texts = [_job_csv(j, kernels) for j in jobs]
    checksums: dict[str, str] = {}
    for job, text in zip(jobs, texts):
        fname = f"{job.name}.csv"
        _atomic_write_text(out / fname, text)
        checksums[fname] = _sha256(text)
    return checksums


def write_manifest(out_dir: str | Path, inputs: dict, checksums: dict[str, str]) -> Path:
    manifest = {
        "code_version": __version__,
        "inputs": inputs,
        "outputs": dict(sorted(checksums.items())),
    }
    path = Path(out_dir) / "manifest.json"
    _atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


# ----------------------------------------------------------------------- cli


def _cmd_run(args) -> int:
    scenarios, sweeps = load_config(args.config)
    jobs: list = list(scenarios)
    for sw in sweeps:
        jobs.extend(sw.points())
    checksums = run_jobs(jobs, args.out, args.threads)
    with open(args.config, encoding="utf-8") as fh:
        cfg_sha = _sha256(fh.read())
    write_manifest(args.out, {"config": str(args.config), "config_sha256": cfg_sha}, checksums)
    print(f"wrote {len(checksums)} file(s) + manifest.json to {args.out}")
    return 0


def _cmd_preset(args) -> int:
    presets = _preset_jobs()
    if args.name not in presets:
        raise ConfigError(f"unknown preset {args.name!r}; see 'quapidyn list'")
    _, jobs = presets[args.name]
    checksums = run_jobs(jobs, args.out, args.threads)
    write_manifest(args.out, {"preset": args.name}, checksums)
    print(f"wrote {len(checksums)} file(s) + manifest.json to {args.out}")
    return 0


def _cmd_list(_args) -> int:
    for name, desc in list_presets():
        print(f"{name:18s} {desc}")
    return 0


def _cmd_kernel(args) -> int:
    scenarios, _ = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    checksums: dict[str, str] = {}
    for sc in scenarios:
        dk = min(sc.dk_max, sc.n_steps)
        kern = influence_coefficients(sc.bath, sc.dt, dk, sc.n_steps)
        fname = f"{sc.name}_kernel.txt"
        text = kern.cache_text()
        _atomic_write_text(out / fname, text)
        checksums[fname] = _sha256(text)
    with open(args.config, encoding="utf-8") as fh:
        cfg_sha = _sha256(fh.read())
    write_manifest(args.out, {"config": str(args.config), "config_sha256": cfg_sha}, checksums)
    print(f"wrote {len(checksums)} kernel table(s) + manifest.json to {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quapidyn",
        description="laser-driven two-level system in a harmonic bath: "
                    "memory-windowed path-sum trajectories",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute every scenario/sweep in a config file")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.add_argument("--threads", type=int, default=1, help="sweep parallelism")
    p_run.set_defaults(func=_cmd_run)

    p_pre = sub.add_parser("preset", help="run a named preset")
    p_pre.add_argument("name")
    p_pre.add_argument("--out", default=".", help="output directory")
    p_pre.add_argument("--threads", type=int, default=1, help="sweep parallelism")
    p_pre.set_defaults(func=_cmd_preset)

    p_list = sub.add_parser("list", help="list presets")
    p_list.set_defaults(func=_cmd_list)

    p_ker = sub.add_parser("kernel", help="tabulate influence kernels for a config")
    p_ker.add_argument("config")
    p_ker.add_argument("--out", default=".", help="output directory")
    p_ker.set_defaults(func=_cmd_kernel)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, NumericalBlowupError, FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
