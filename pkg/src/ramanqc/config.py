"""Run configuration: strict JSON ingestion with a built-in default profile.

Every omitted section falls back to the Al profile (309 nm line, g = 4/3,
alpha = 2*pi*1e7 rad/s, 1 kHz/site addressing increment); the provenance
of every value ("config", "default" or "derived") is recorded and embedded
in output metadata. Unknown keys anywhere are rejected.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError, RamanqcError
from .lattice import AtomSpecies, CoupledPair, LatticeParams
from .decoherence import NoiseKind, NoiseModel, dressed_gap
from .motional import Grid, default_grid
from .qubit_control import FieldProfile, gradient_for_increment
from .units import (
    ATOMIC_MASS_KG,
    BOHR_MAGNETON_SI,
    HBAR_SI,
    UNIT_CONVENTIONS,
    Dimension,
    Quantity,
)

_SCHEMA: dict[str, Any] = {
    "species": {"name", "mass_amu", "lande_g", "j_ground", "j_excited", "wavelength_nm"},
    "lattice": {
        "alpha_rad_s",
        "chi_rad_s",
        "one_photon_detuning_rad_s",
        "raman_delta_rad_s",
    },
    "field": {"b0_tesla", "gradient_t_per_m", "increment_hz_per_site"},
    "noise": {"kind", "sigma_tesla", "tau_c_s", "table", "mc_ensemble", "mc_t_final_s"},
    "grid": {"periods", "n_points"},
    "pulse": {"rabi_rad_s", "detuning_rad_s", "duration_s", "phase_rad", "n_samples"},
    "seed": None,
    "output_dir": None,
}


@dataclass(frozen=True)
class PulseSettings:
    rabi_rad_s: float
    detuning_rad_s: float
    duration_s: float | None  # None -> resonant pi pulse
    phase_rad: float
    n_samples: int


@dataclass(frozen=True)
class RunConfig:
    species: AtomSpecies
    lattice: LatticeParams
    field: FieldProfile
    noise: NoiseModel
    grid: Grid
    pulse: PulseSettings
    mc_ensemble: int
    mc_t_final_s: float | None
    seed: int
    output_dir: Path
    provenance: dict[str, str] = field(default_factory=dict)
    config_hash: str = ""

    def metadata(self) -> dict[str, Any]:
        """Header block embedded in every output file."""
        return {
            "config_hash": self.config_hash,
            "unit_conventions": UNIT_CONVENTIONS,
            "seed": self.seed,
            "provenance": self.provenance,
        }


def _reject_unknown_keys(raw: dict[str, Any]) -> None:
    for key, sub in raw.items():
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key '{key}' in config")
        allowed = _SCHEMA[key]
        if allowed is None:
            continue
        if not isinstance(sub, dict):
            raise ConfigError(f"config section '{key}' must be an object")
        for k in sub:
            if k not in allowed:
                raise ConfigError(f"unknown key '{k}' in config section '{key}'")


def _get(section: dict[str, Any], key: str, default: Any, prov: dict[str, str], tag: str):
    if key in section and section[key] is not None:
        prov[tag] = "config"
        return section[key]
    prov[tag] = "default"
    return default


def _canonical_hash(raw: dict[str, Any]) -> str:
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def build_config(raw: dict[str, Any]) -> RunConfig:
    """Validate a parsed config dict and fill defaults from the Al profile."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    _reject_unknown_keys(raw)
    prov: dict[str, str] = {}
    try:
        sp_raw = raw.get("species", {}) or {}
        species = AtomSpecies(
            name=_get(sp_raw, "name", "Al", prov, "species.name"),
            mass=Quantity(
                float(_get(sp_raw, "mass_amu", 26.9815385, prov, "species.mass_amu"))
                * ATOMIC_MASS_KG,
                Dimension.MASS,
            ),
            lande_g=float(_get(sp_raw, "lande_g", 4.0 / 3.0, prov, "species.lande_g")),
            j_ground=float(_get(sp_raw, "j_ground", 1.5, prov, "species.j_ground")),
            j_excited=float(_get(sp_raw, "j_excited", 2.5, prov, "species.j_excited")),
            wavelength=Quantity(
                float(_get(sp_raw, "wavelength_nm", 309.0, prov, "species.wavelength_nm"))
                * 1e-9,
                Dimension.LENGTH,
            ),
        )

        lat_raw = raw.get("lattice", {}) or {}
        delta_spec = _get(lat_raw, "raman_delta_rad_s", "optimal-pair-a", prov, "lattice.raman_delta_rad_s")
        if "alpha_rad_s" in lat_raw and lat_raw["alpha_rad_s"] is not None:
            if "chi_rad_s" in lat_raw and lat_raw["chi_rad_s"] is not None:
                raise ConfigError("lattice: give alpha_rad_s or chi_rad_s, not both")
            prov["lattice.alpha_rad_s"] = "config"
            alpha = float(lat_raw["alpha_rad_s"])
            det = float(
                _get(
                    lat_raw,
                    "one_photon_detuning_rad_s",
                    2 * math.pi * 1e11,
                    prov,
                    "lattice.one_photon_detuning_rad_s",
                )
            )
            lattice = LatticeParams.from_alpha(
                Quantity(alpha, Dimension.ANGULAR_FREQUENCY),
                species,
                raman_delta=Quantity(0.0, Dimension.ANGULAR_FREQUENCY),
                one_photon_detuning=Quantity(det, Dimension.ANGULAR_FREQUENCY),
            )
        else:
            chi = float(_get(lat_raw, "chi_rad_s", 2 * math.pi * 1e9, prov, "lattice.chi_rad_s"))
            det = float(
                _get(
                    lat_raw,
                    "one_photon_detuning_rad_s",
                    2 * math.pi * 1e11,
                    prov,
                    "lattice.one_photon_detuning_rad_s",
                )
            )
            lattice = LatticeParams(
                rabi_chi=Quantity(chi, Dimension.ANGULAR_FREQUENCY),
                one_photon_detuning=Quantity(det, Dimension.ANGULAR_FREQUENCY),
                raman_detuning_delta=Quantity(0.0, Dimension.ANGULAR_FREQUENCY),
                species=species,
            )
        if delta_spec == "optimal-pair-a":
            lattice = lattice.with_delta(lattice.optimal_delta(CoupledPair.PAIR_A))
        elif delta_spec == "optimal-pair-b":
            lattice = lattice.with_delta(lattice.optimal_delta(CoupledPair.PAIR_B))
        else:
            lattice = lattice.with_delta(
                Quantity(float(delta_spec), Dimension.ANGULAR_FREQUENCY)
            )

        fld_raw = raw.get("field", {}) or {}
        spacing = Quantity(species.wavelength.value / 4.0, Dimension.LENGTH)
        # B0 default pins the Zeeman frequency to 2*pi x 1 GHz
        b0_default = 2 * math.pi * 1e9 * HBAR_SI / (species.lande_g * BOHR_MAGNETON_SI)
        b0 = float(_get(fld_raw, "b0_tesla", b0_default, prov, "field.b0_tesla"))
        if prov["field.b0_tesla"] == "default":
            prov["field.b0_tesla"] = "derived (omega_Z = 2*pi x 1 GHz)"
        if "gradient_t_per_m" in fld_raw and fld_raw["gradient_t_per_m"] is not None:
            prov["field.gradient_t_per_m"] = "config"
            gradient = float(fld_raw["gradient_t_per_m"])
        else:
            inc_hz = float(
                _get(fld_raw, "increment_hz_per_site", 1000.0, prov, "field.increment_hz_per_site")
            )
            gradient = gradient_for_increment(
                species, spacing, Quantity(2 * math.pi * inc_hz, Dimension.ANGULAR_FREQUENCY)
            )
            prov["field.gradient_t_per_m"] = f"derived ({inc_hz:g} Hz/site)"
        profile = FieldProfile(
            species=species,
            b0=Quantity(b0, Dimension.MAGNETIC_FIELD),
            gradient_t_per_m=gradient,
            site_spacing=spacing,
        )

        noise_raw = raw.get("noise", {}) or {}
        kind = NoiseKind(
            _get(noise_raw, "kind", "ornstein_uhlenbeck", prov, "noise.kind")
        )
        gap = dressed_gap(lattice).value
        tau_c_default = 1.0 / gap if gap > 0 else 1e-7
        tau_c = float(_get(noise_raw, "tau_c_s", tau_c_default, prov, "noise.tau_c_s"))
        if prov["noise.tau_c_s"] == "default":
            prov["noise.tau_c_s"] = "derived (gap*tau_c = 1)"
        # default sigma puts sqrt(S(gap)) at the 3e-12 T/sqrt(Hz) shielding scale
        sigma_default = 3e-12 * math.sqrt((1.0 + (gap * tau_c) ** 2) / (2.0 * tau_c))
        sigma = float(_get(noise_raw, "sigma_tesla", sigma_default, prov, "noise.sigma_tesla"))
        if prov["noise.sigma_tesla"] == "default":
            prov["noise.sigma_tesla"] = "derived (sqrt(S(gap)) = 3e-12 T/sqrt(Hz))"
        if kind is NoiseKind.TABULATED:
            table = noise_raw.get("table")
            if table is None:
                raise ConfigError("noise.kind = tabulated requires noise.table")
            prov["noise.table"] = "config"
            noise = NoiseModel(kind=kind, table=np.asarray(table, dtype=float))
        else:
            noise = NoiseModel(
                kind=kind,
                sigma=Quantity(sigma, Dimension.MAGNETIC_FIELD),
                tau_c=Quantity(tau_c, Dimension.TIME),
            )
        mc_ensemble = int(_get(noise_raw, "mc_ensemble", 400, prov, "noise.mc_ensemble"))
        mc_t_final = noise_raw.get("mc_t_final_s")
        prov["noise.mc_t_final_s"] = "config" if mc_t_final is not None else "derived (60 tau_c)"

        grid_raw = raw.get("grid", {}) or {}
        grid = default_grid(
            lattice,
            periods=int(_get(grid_raw, "periods", 8, prov, "grid.periods")),
            n_points=int(_get(grid_raw, "n_points", 2048, prov, "grid.n_points")),
        )

        pulse_raw = raw.get("pulse", {}) or {}
        pulse = PulseSettings(
            rabi_rad_s=float(
                _get(pulse_raw, "rabi_rad_s", 2 * math.pi * 100.0, prov, "pulse.rabi_rad_s")
            ),
            detuning_rad_s=float(
                _get(pulse_raw, "detuning_rad_s", 0.0, prov, "pulse.detuning_rad_s")
            ),
            duration_s=pulse_raw.get("duration_s"),
            phase_rad=float(_get(pulse_raw, "phase_rad", 0.0, prov, "pulse.phase_rad")),
            n_samples=int(_get(pulse_raw, "n_samples", 200, prov, "pulse.n_samples")),
        )
        prov["pulse.duration_s"] = (
            "config" if pulse_raw.get("duration_s") is not None else "derived (pi pulse)"
        )

        seed = int(_get(raw, "seed", 42, prov, "seed"))
        out = raw.get("output_dir")
        prov["output_dir"] = "config" if out is not None else "default"
        output_dir = Path(out) if out is not None else Path("out")
    except RamanqcError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc

    return RunConfig(
        species=species,
        lattice=lattice,
        field=profile,
        noise=noise,
        grid=grid,
        pulse=pulse,
        mc_ensemble=mc_ensemble,
        mc_t_final_s=mc_t_final,
        seed=seed,
        output_dir=output_dir,
        provenance=prov,
        config_hash=_canonical_hash(raw),
    )


def load_config(path: str | Path) -> RunConfig:
    """Read, strictly parse and validate a JSON config file."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        raw = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return build_config(raw)


def default_config() -> RunConfig:
    return build_config({})
