"""Command-line interface: deterministic CSV/JSON artifacts per subcommand.

Exit codes: 0 success (for `report`: all checks pass), 1 computation error
(typed error serialized as JSON on stderr) or failed report checks,
2 usage error. Identical config + seed give byte-identical CSV/JSON.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from . import __version__, gates, lattice, motional, plots, qubit_control
from .config import RunConfig, default_config, load_config
from .decoherence import (
    coupling_mu,
    dressed_gap,
    monte_carlo_decoherence,
    shielding_requirement,
    tau1,
)
from .errors import RamanqcError
from .lattice import Branch, CoupledPair
from .report import run_report
from .units import AU_ANGULAR_FREQUENCY, BOHR_RADIUS_M, Dimension, Quantity

ENV_OUTPUT = "RAMANQC_OUTPUT"

COMMANDS = (
    "potentials",
    "optimize-delta",
    "dressed-states",
    "address-map",
    "pulse",
    "cnot-budget",
    "motional",
    "noise",
    "report",
)


def _fmt(x: Any) -> str:
    return format(x, ".17g") if isinstance(x, float) else str(x)


def _write_csv(path: Path, meta: dict[str, Any], header: list[str], rows: Iterable[Iterable]) -> None:
    lines = [f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in sorted(meta.items())]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _flatten(prefix: str, obj: Any, out: list[tuple[str, Any]]) -> None:
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], out)
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, obj))


def _write_report(path: Path, payload: dict[str, Any], meta: dict[str, Any], fmt: str | None) -> None:
    """Scalar report: JSON always; a flattened key,value CSV twin on request."""
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if fmt == "csv":
        pairs: list[tuple[str, Any]] = []
        _flatten("", {k: v for k, v in payload.items() if k != "meta"}, pairs)
        _write_csv(path.with_suffix(".csv"), meta, ["key", "value"], pairs)


def _outdir(cfg: RunConfig) -> Path:
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    return out


def _au_energy_to_mhz(u_au: np.ndarray) -> np.ndarray:
    return u_au * AU_ANGULAR_FREQUENCY / (2 * math.pi) / 1e6


def cmd_potentials(cfg: RunConfig, fmt: str | None = None, **_: Any) -> int:
    out = _outdir(cfg)
    p = cfg.lattice
    lam = p.species.wavelength_au
    z = np.linspace(0.0, lam, 1000, endpoint=False)  # two lambda/2 periods
    rows = []
    for pair in (CoupledPair.PAIR_A, CoupledPair.PAIR_B):
        if p.detuning_is_optimal(pair):
            up, um = lattice.potential_optimal(p, pair, z)
        else:
            up, um = lattice.potential_general(p, pair, z)
        for zi, upi, umi in zip(z, up, um):
            rows.append((zi * BOHR_RADIUS_M, float(upi), float(umi), pair.value))
    meta = cfg.metadata() | {"columns": "z_m, U_plus_au, U_minus_au, pair"}
    _write_csv(out / "potentials.csv", meta, ["z_m", "U_plus_au", "U_minus_au", "pair"], rows)
    _write_report(
        out / "potentials.meta.json",
        {
            "meta": cfg.metadata(),
            "alpha_rad_s": p.alpha.value,
            "raman_delta_rad_s": p.raman_detuning_delta.value,
            "wavelength_m": p.species.wavelength.value,
        },
        cfg.metadata(),
        None,
    )
    popt = p.with_delta(p.optimal_delta(CoupledPair.PAIR_A))
    up, um = lattice.potential_optimal(popt, CoupledPair.PAIR_A, z)
    wells = lattice.well_geometry(popt)
    plots.potentials_figure(
        out / "potentials.png",
        z * BOHR_RADIUS_M,
        _au_energy_to_mhz(up),
        _au_energy_to_mhz(um),
        [(s.position * BOHR_RADIUS_M, s.branch.value) for s in wells.minima],
    )
    return 0


def cmd_optimize_delta(cfg: RunConfig, fmt: str | None = None, **_: Any) -> int:
    out = _outdir(cfg)
    p = cfg.lattice
    payload: dict[str, Any] = {"meta": cfg.metadata()}
    for pair in (CoupledPair.PAIR_A, CoupledPair.PAIR_B):
        d = lattice.optimize_detuning(p, pair)
        payload[pair.value] = {
            "delta_star_rad_s": d.value,
            "delta_star_over_alpha": d.value / p.alpha.value,
        }
    _write_report(out / "optimize_delta.json", payload, cfg.metadata(), fmt)
    return 0


def cmd_dressed_states(cfg: RunConfig, fmt: str | None = None, **_: Any) -> int:
    out = _outdir(cfg)
    p = cfg.lattice
    payload: dict[str, Any] = {"meta": cfg.metadata()}
    for pair in (CoupledPair.PAIR_A, CoupledPair.PAIR_B):
        pp = p.with_delta(p.optimal_delta(pair))
        plus, minus = lattice.dressed_states(pp, pair, b0=cfg.field.b0)
        payload[pair.value] = {
            state.branch.value: {
                "bare_m": list(state.bare_m),
                "amplitudes_re": [a.real for a in state.amplitudes],
                "amplitudes_im": [a.imag for a in state.amplitudes],
                "phase_energies_au": list(state.phase_energies),
                "moment_J_per_T": gates.state_moment(p.species, state).value,
            }
            for state in (plus, minus)
        }
    _write_report(out / "dressed_states.json", payload, cfg.metadata(), fmt)
    return 0


def cmd_address_map(cfg: RunConfig, fmt: str | None = None, n_sites: int = 100, **_: Any) -> int:
    out = _outdir(cfg)
    entries = qubit_control.address_map(cfg.field, n_sites)
    payload = {
        "meta": cfg.metadata(),
        "sites": [
            {
                "site": e.site,
                "z_m": e.position.value,
                "omega_Hz": e.omega_z.value / (2 * math.pi),
            }
            for e in entries
        ],
    }
    _write_report(out / "address_map.json", payload, cfg.metadata(), fmt)
    return 0


def cmd_pulse(cfg: RunConfig, fmt: str | None = None, **_: Any) -> int:
    out = _outdir(cfg)
    ps = cfg.pulse
    omega_r = Quantity(ps.rabi_rad_s, Dimension.ANGULAR_FREQUENCY)
    duration = (
        Quantity(ps.duration_s, Dimension.TIME)
        if ps.duration_s is not None
        else qubit_control.pi_pulse(omega_r)
    )
    transition = Quantity(cfg.field.omega_z0, Dimension.ANGULAR_FREQUENCY)
    carrier = Quantity(transition.value + ps.detuning_rad_s, Dimension.ANGULAR_FREQUENCY)
    times = np.linspace(0.0, duration.value, ps.n_samples + 1)
    probs = [0.0]
    for t in times[1:]:
        pulse = qubit_control.Pulse(carrier, omega_r, Quantity(float(t), Dimension.TIME), ps.phase_rad)
        probs.append(qubit_control.transfer_probability(pulse, transition))
    probs = np.array(probs)
    meta = cfg.metadata() | {"columns": "t_s, p_transfer"}
    _write_csv(out / "pulse.csv", meta, ["t_s", "p_transfer"], zip(times.tolist(), probs.tolist()))
    _write_report(
        out / "pulse.json",
        {
            "meta": cfg.metadata(),
            "rabi_rad_s": ps.rabi_rad_s,
            "detuning_rad_s": ps.detuning_rad_s,
            "duration_s": duration.value,
            "p_transfer_final": float(probs[-1]),
        },
        cfg.metadata(),
        fmt,
    )
    plots.pulse_figure(out / "pulse.png", times, probs)
    return 0


def cmd_cnot_budget(cfg: RunConfig, fmt: str | None = None, **_: Any) -> int:
    out = _outdir(cfg)
    budget = gates.cnot_budget(cfg.lattice, cfg.field)
    _write_report(
        out / "cnot_budget.json",
        {
            "R_m": budget.separation.value,
            "deltaB_T": budget.delta_b.value,
            "delta_omega_rad_s": budget.delta_omega.value,
            "tau_cnot_s": budget.tau_cnot.value,
            "margin": budget.addressing_margin,
            "meta": cfg.metadata(),
        },
        cfg.metadata(),
        fmt,
    )
    return 0


def cmd_motional(cfg: RunConfig, fmt: str | None = None, **_: Any) -> int:
    out = _outdir(cfg)
    p = cfg.lattice
    t2 = motional.tau2(p)
    curve = motional.inverted_well_escape(
        p, 2, Quantity(8.0 * t2.value, Dimension.TIME), grid=cfg.grid
    )
    meta = cfg.metadata() | {"columns": "t_s, norm, energy_au, P0"}
    rows = zip(
        curve.times_s.tolist(),
        curve.norms.tolist(),
        curve.energies_au.tolist(),
        curve.survival.tolist(),
    )
    _write_csv(out / "motional.csv", meta, ["t_s", "norm", "energy_au", "P0"], rows)
    site = lattice.branch_minima(p, Branch.PLUS)[0]
    eta = motional.lamb_dicke(p)
    _write_report(
        out / "motional.json",
        {
            "meta": cfg.metadata(),
            "tau2_s": t2.value,
            "omega_osc_rad_s": lattice.harmonic_frequency(p, site).value,
            "eta": eta.eta,
            "lamb_dicke_regime": eta.in_regime,
        },
        cfg.metadata(),
        fmt,
    )
    plots.escape_figure(out / "motional.png", curve.times_s, curve.survival, t2.value)
    return 0


def cmd_noise(cfg: RunConfig, fmt: str | None = None, **_: Any) -> int:
    out = _outdir(cfg)
    p = cfg.lattice
    pa = p.with_delta(p.optimal_delta(CoupledPair.PAIR_A))
    mu = coupling_mu(p.species, lattice.dressed_states(pa, CoupledPair.PAIR_A))
    gap = dressed_gap(p)
    t1 = tau1(mu, cfg.noise, gap)
    t2 = motional.tau2(p)
    thr = shielding_requirement(mu, gap, Quantity(10.0, Dimension.TIME))
    _write_report(
        out / "noise.json",
        {
            "tau1_s": t1.value,
            "tau2_s": t2.value,
            "gap_rad_s": gap.value,
            "shielding_T_per_sqrtHz": thr,
            "meta": cfg.metadata(),
        },
        cfg.metadata(),
        fmt,
    )
    tc = cfg.noise.tau_c.value
    t_final = cfg.mc_t_final_s if cfg.mc_t_final_s is not None else 60.0 * tc
    curve = monte_carlo_decoherence(
        p, cfg.noise, Quantity(t_final, Dimension.TIME), cfg.mc_ensemble, cfg.seed
    )
    meta = cfg.metadata() | {"columns": "t_s, p_mean, p_stderr"}
    _write_csv(
        out / "noise_pt.csv",
        meta,
        ["t_s", "p_mean", "p_stderr"],
        zip(curve.times_s.tolist(), curve.p_mean.tolist(), curve.p_stderr.tolist()),
    )
    plots.noise_figure(
        out / "noise.png", curve.times_s, curve.p_mean, curve.p_stderr, 1.0 / t1.value
    )
    return 0


def cmd_report(cfg: RunConfig, fmt: str | None = None, **_: Any) -> int:
    out = _outdir(cfg)
    result = run_report(cfg)
    _write_report(
        out / "report.json",
        {"meta": cfg.metadata()} | result.as_dict(),
        cfg.metadata(),
        fmt,
    )
    cmd_potentials(cfg)
    cmd_motional(cfg)
    cmd_noise(cfg)
    for c in result.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}")
    print(
        f"report: {'all checks passed' if result.all_pass else 'CHECKS FAILED'} "
        f"({result.runtime_s:.1f} s)"
    )
    return 0 if result.all_pass else 1


_DISPATCH = {
    "potentials": cmd_potentials,
    "optimize-delta": cmd_optimize_delta,
    "dressed-states": cmd_dressed_states,
    "address-map": cmd_address_map,
    "pulse": cmd_pulse,
    "cnot-budget": cmd_cnot_budget,
    "motional": cmd_motional,
    "noise": cmd_noise,
    "report": cmd_report,
}


def dispatch(command: str, cfg: RunConfig, fmt: str | None = None, **kwargs: Any) -> int:
    """Run one subcommand against a validated config; returns the exit code."""
    if command not in _DISPATCH:
        print(f"unknown command: {command}\ncommands: {', '.join(COMMANDS)}", file=sys.stderr)
        return 2
    try:
        return _DISPATCH[command](cfg, fmt=fmt, **kwargs)
    except RamanqcError as exc:
        json.dump(
            {"error": {"type": type(exc).__name__, "message": str(exc)}},
            sys.stderr,
        )
        sys.stderr.write("\n")
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ramanqc",
        description="Quarter-wavelength Raman-lattice qubit calculator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=str, default=None, help="JSON config path")
        sp.add_argument("--output", type=str, default=None, help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="master seed override")
        sp.add_argument(
            "--format",
            choices=("csv", "json"),
            default=None,
            help="also write scalar reports as flattened key,value CSV",
        )
        if name == "address-map":
            sp.add_argument("--sites", type=int, default=100)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else default_config()
        overrides: dict[str, Any] = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        out = args.output or os.environ.get(ENV_OUTPUT)
        if out is not None:
            overrides["output_dir"] = Path(out)
        if overrides:
            cfg = dataclasses.replace(cfg, **overrides)
    except RamanqcError as exc:
        json.dump({"error": {"type": type(exc).__name__, "message": str(exc)}}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    kwargs: dict[str, Any] = {}
    if args.command == "address-map":
        kwargs["n_sites"] = args.sites
    return dispatch(args.command, cfg, fmt=args.format, **kwargs)


if __name__ == "__main__":
    sys.exit(main())
