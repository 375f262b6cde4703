"""Unit system and physical constants.

All numerics inside the package run in Hartree atomic units
(hbar = e = m_e = 1). Frequencies are stored as angular frequencies, so
energy and angular frequency share one internal scale. A `Quantity` is the
SI-facing record; `to_internal` / `from_internal` bridge the two systems.

Conventions fixed here and recorded in every output's metadata:

* values quoted in plain Hz are ordinary frequencies and pick up the exact
  factor 2*pi on ingestion;
* the atomic unit of magnetic moment is e*hbar/m_e = 2 Bohr magnetons,
  so mu_B = 1/2 internally;
* magnetic-noise spectral densities S(omega) are two-sided in angular
  frequency with SI unit T^2/Hz (equivalently T^2 s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from scipy.constants import physical_constants as _pc

from .errors import UnitError

# CODATA values (via scipy.constants)
BOHR_RADIUS_M = _pc["Bohr radius"][0]
HARTREE_J = _pc["Hartree energy"][0]
AU_TIME_S = _pc["atomic unit of time"][0]
AU_FIELD_T = _pc["atomic unit of mag. flux density"][0]
ELECTRON_MASS_KG = _pc["electron mass"][0]
BOHR_MAGNETON_SI = _pc["Bohr magneton"][0]  # J/T
ATOMIC_MASS_KG = _pc["atomic mass constant"][0]
FINE_STRUCTURE = _pc["fine-structure constant"][0]
HBAR_SI = _pc["reduced Planck constant"][0]

# Derived internal constants
MU_B_AU = 0.5  # Bohr magneton in atomic units (e*hbar/2m_e)
AMU_TO_ME = ATOMIC_MASS_KG / ELECTRON_MASS_KG
AU_ANGULAR_FREQUENCY = 1.0 / AU_TIME_S  # rad/s per atomic unit


class Dimension(Enum):
    ENERGY = "energy"
    ANGULAR_FREQUENCY = "angular_frequency"
    ORDINARY_FREQUENCY = "ordinary_frequency"
    LENGTH = "length"
    TIME = "time"
    MAGNETIC_FIELD = "magnetic_field"
    MASS = "mass"
    MAGNETIC_MOMENT = "magnetic_moment"
    SPECTRAL_DENSITY_B = "spectral_density_B"


# SI value of one internal unit, per dimension. Energy and angular frequency
# deliberately share the internal scale (hbar = 1); ordinary frequency
# differs from angular by exactly 2*pi.
_SI_PER_INTERNAL = {
    Dimension.ENERGY: HARTREE_J,
    Dimension.ANGULAR_FREQUENCY: 1.0 / AU_TIME_S,
    Dimension.ORDINARY_FREQUENCY: 1.0 / (2.0 * math.pi * AU_TIME_S),
    Dimension.LENGTH: BOHR_RADIUS_M,
    Dimension.TIME: AU_TIME_S,
    Dimension.MAGNETIC_FIELD: AU_FIELD_T,
    Dimension.MASS: ELECTRON_MASS_KG,
    Dimension.MAGNETIC_MOMENT: 2.0 * BOHR_MAGNETON_SI,
    Dimension.SPECTRAL_DENSITY_B: AU_FIELD_T**2 * AU_TIME_S,
}

_SI_UNIT_NAME = {
    Dimension.ENERGY: "J",
    Dimension.ANGULAR_FREQUENCY: "rad/s",
    Dimension.ORDINARY_FREQUENCY: "Hz",
    Dimension.LENGTH: "m",
    Dimension.TIME: "s",
    Dimension.MAGNETIC_FIELD: "T",
    Dimension.MASS: "kg",
    Dimension.MAGNETIC_MOMENT: "J/T",
    Dimension.SPECTRAL_DENSITY_B: "T^2/Hz",
}


@dataclass(frozen=True)
class Quantity:
    """A dimensioned scalar, value in the SI unit of its dimension."""

    value: float
    dimension: Dimension

    def __post_init__(self) -> None:
        if not isinstance(self.dimension, Dimension):
            raise UnitError(f"unsupported dimension: {self.dimension!r}")
        if not math.isfinite(self.value):
            raise UnitError(f"non-finite value: {self.value!r}")

    @property
    def si_unit(self) -> str:
        return _SI_UNIT_NAME[self.dimension]

    def __repr__(self) -> str:  # compact: Quantity(3.09e-07 m)
        return f"Quantity({self.value!r} {self.si_unit})"


def to_internal(q: Quantity) -> float:
    """SI-valued Quantity -> bare float in atomic units.

    Angular and ordinary frequency both land on the shared internal
    (angular) scale; ordinary frequency is multiplied by 2*pi.
    """
    if not isinstance(q, Quantity):
        raise UnitError(f"expected Quantity, got {type(q).__name__}")
    return q.value / _SI_PER_INTERNAL[q.dimension]


def from_internal(value: float, dimension: Dimension) -> Quantity:
    """Bare atomic-unit float -> SI-valued Quantity. Inverse of to_internal."""
    if not isinstance(dimension, Dimension):
        raise UnitError(f"unsupported dimension: {dimension!r}")
    if not math.isfinite(value):
        raise UnitError(f"non-finite value: {value!r}")
    return Quantity(value * _SI_PER_INTERNAL[dimension], dimension)


def convert(q: Quantity, dimension: Dimension) -> Quantity:
    """Re-express a quantity on a compatible dimension.

    Only the frequency/energy family is mutually convertible; the shared
    internal scale makes the conversion a round trip through to_internal.
    """
    family = {Dimension.ENERGY, Dimension.ANGULAR_FREQUENCY, Dimension.ORDINARY_FREQUENCY}
    if q.dimension not in family or dimension not in family:
        raise UnitError(
            f"cannot convert {q.dimension.value} to {dimension.value}; "
            "only energy/frequency conversions are supported"
        )
    return from_internal(to_internal(q), dimension)


UNIT_CONVENTIONS = (
    "internal: Hartree atomic units (hbar=e=m_e=1); frequencies stored as "
    "angular; plain-Hz inputs are ordinary frequencies multiplied by 2*pi; "
    "mu_B = 1/2 a.u.; S(omega) two-sided in angular frequency, T^2/Hz"
)
