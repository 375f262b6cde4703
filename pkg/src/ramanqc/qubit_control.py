"""Single-qubit control: Zeeman spectrum, site addressing, microwave pulses.

All microwave dynamics use the rotating-wave approximation; each resonance
line is treated as an isolated two-level system. SI units (rad/s, s, T)
throughout this module.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

from .errors import AddressingError, ParameterError
from .lattice import AtomSpecies
from .units import BOHR_MAGNETON_SI, HBAR_SI, Dimension, Quantity


@dataclass(frozen=True)
class FieldProfile:
    """Offset field plus gradient defining per-site Zeeman frequencies."""

    species: AtomSpecies
    b0: Quantity
    gradient_t_per_m: float
    site_spacing: Quantity

    def __post_init__(self) -> None:
        if self.b0.dimension is not Dimension.MAGNETIC_FIELD:
            raise ParameterError("field.b0 must be a magnetic field")
        if self.site_spacing.dimension is not Dimension.LENGTH or self.site_spacing.value <= 0:
            raise ParameterError("field.site_spacing must be a positive length")

    @property
    def zeeman_rate(self) -> float:
        """g * mu_B / hbar in rad/(s*T)."""
        return self.species.lande_g * BOHR_MAGNETON_SI / HBAR_SI

    @property
    def omega_z0(self) -> float:
        """Zeeman angular frequency at the origin, rad/s."""
        return self.zeeman_rate * self.b0.value

    @property
    def increment(self) -> float:
        """Adjacent-site Zeeman frequency step, rad/s."""
        return self.zeeman_rate * self.gradient_t_per_m * self.site_spacing.value


def gradient_for_increment(
    species: AtomSpecies, site_spacing: Quantity, increment: Quantity
) -> float:
    """Field gradient (T/m) producing the requested per-site frequency step."""
    if increment.dimension is not Dimension.ANGULAR_FREQUENCY:
        raise ParameterError("increment must be an angular frequency")
    rate = species.lande_g * BOHR_MAGNETON_SI / HBAR_SI
    return increment.value / (rate * site_spacing.value)


@dataclass(frozen=True)
class Pulse:
    """Rectangular microwave pulse."""

    carrier: Quantity
    rabi_amplitude: Quantity
    duration: Quantity
    phase: float = 0.0

    def __post_init__(self) -> None:
        if self.carrier.dimension is not Dimension.ANGULAR_FREQUENCY:
            raise ParameterError("pulse.carrier must be an angular frequency")
        if self.rabi_amplitude.dimension is not Dimension.ANGULAR_FREQUENCY:
            raise ParameterError("pulse.rabi_amplitude must be an angular frequency")
        if self.rabi_amplitude.value < 0:
            raise ParameterError("pulse.rabi_amplitude must be >= 0")
        if self.duration.dimension is not Dimension.TIME or self.duration.value <= 0:
            raise ParameterError("pulse.duration must be a positive time")


@dataclass(frozen=True)
class TwoLevelState:
    """Amplitudes on the two dressed qubit states."""

    c: complex
    c_prime: complex

    def __post_init__(self) -> None:
        norm = abs(self.c) ** 2 + abs(self.c_prime) ** 2
        if abs(norm - 1.0) > 1e-6:
            raise ParameterError(f"two-level state not normalized: |c|^2+|c'|^2 = {norm!r}")

    @property
    def populations(self) -> tuple[float, float]:
        return abs(self.c) ** 2, abs(self.c_prime) ** 2


@dataclass(frozen=True)
class ResonanceSpectrum:
    """Three microwave resonance lines of the dressed-state manifold."""

    omega_z: Quantity
    omega_z_plus_delta: Quantity
    omega_z_minus_delta: Quantity

    @property
    def transitions(self) -> dict[str, Quantity]:
        return {
            "M=-1/2 <-> M=+1/2": self.omega_z,
            "M=-3/2 <-> M=-1/2": self.omega_z_plus_delta,
            "M=+1/2 <-> M=+3/2": self.omega_z_minus_delta,
        }


def resonance_spectrum(
    species: AtomSpecies, b0: Quantity, delta: Quantity
) -> ResonanceSpectrum:
    """Resonances at omega_Z and omega_Z +/- delta.

    omega_Z = g*mu_B*B0/hbar drives M=-1/2 <-> +1/2; the shifted lines
    drive the outer transitions. Which sign goes with which outer
    transition is a labeling convention.
    """
    if b0.dimension is not Dimension.MAGNETIC_FIELD or b0.value <= 0:
        raise ParameterError("b0 must be a positive magnetic field")
    if delta.dimension is not Dimension.ANGULAR_FREQUENCY:
        raise ParameterError("delta must be an angular frequency")
    wz = species.lande_g * BOHR_MAGNETON_SI / HBAR_SI * b0.value
    mk = lambda v: Quantity(v, Dimension.ANGULAR_FREQUENCY)
    return ResonanceSpectrum(mk(wz), mk(wz + delta.value), mk(wz - delta.value))


@dataclass(frozen=True)
class AddressEntry:
    site: int
    position: Quantity
    omega_z: Quantity


def address_map(profile: FieldProfile, n_sites: int) -> list[AddressEntry]:
    """Per-site working frequencies omega_Z(z_n), strictly monotonic."""
    if n_sites < 1:
        raise ParameterError("n_sites must be >= 1")
    if profile.gradient_t_per_m == 0:
        raise AddressingError("zero field gradient: sites are spectrally indistinguishable")
    spacing = profile.site_spacing.value
    entries = []
    for n in range(n_sites):
        z = n * spacing
        b = profile.b0.value + profile.gradient_t_per_m * z
        entries.append(
            AddressEntry(
                site=n,
                position=Quantity(z, Dimension.LENGTH),
                omega_z=Quantity(profile.zeeman_rate * b, Dimension.ANGULAR_FREQUENCY),
            )
        )
    return entries


def rabi_evolve(
    initial: TwoLevelState, pulse: Pulse, transition_freq: Quantity
) -> TwoLevelState:
    """Apply the rotating-frame unitary of a rectangular pulse.

    Detuning Delta = carrier - transition; generalized Rabi frequency
    Omega_eff = sqrt(Omega_R^2 + Delta^2); starting from (1, 0) the
    transfer probability is (Omega_R^2/Omega_eff^2) sin^2(Omega_eff t / 2).
    """
    if transition_freq.dimension is not Dimension.ANGULAR_FREQUENCY:
        raise ParameterError("transition_freq must be an angular frequency")
    omega_r = pulse.rabi_amplitude.value
    if transition_freq.value > 0 and omega_r / transition_freq.value > 0.01:
        warnings.warn(
            "rabi amplitude exceeds 1% of the transition frequency; "
            "rotating-wave approximation degrading",
            stacklevel=2,
        )
    delta = pulse.carrier.value - transition_freq.value
    t = pulse.duration.value
    omega_eff = math.hypot(omega_r, delta)
    if omega_eff == 0.0:
        return initial
    half = omega_eff * t / 2.0
    c, s = math.cos(half), math.sin(half)
    ph = cmath.exp(1j * pulse.phase)
    u00 = c + 1j * (delta / omega_eff) * s
    u01 = -1j * (omega_r / omega_eff) * s * ph
    u10 = -1j * (omega_r / omega_eff) * s / ph
    u11 = c - 1j * (delta / omega_eff) * s
    return TwoLevelState(
        c=u00 * initial.c + u01 * initial.c_prime,
        c_prime=u10 * initial.c + u11 * initial.c_prime,
    )


def pi_pulse(rabi_amplitude: Quantity) -> Quantity:
    """Duration of a resonant pi pulse, pi / Omega_R."""
    if rabi_amplitude.dimension is not Dimension.ANGULAR_FREQUENCY:
        raise ParameterError("rabi_amplitude must be an angular frequency")
    if rabi_amplitude.value <= 0:
        raise ParameterError("rabi_amplitude must be > 0 for a pi pulse")
    return Quantity(math.pi / rabi_amplitude.value, Dimension.TIME)


def crosstalk_bound(pulse: Pulse, neighbor_detuning: Quantity) -> float:
    """Worst-case transfer probability on a detuned neighbor.

    Max over time of the detuned Rabi oscillation,
    Omega_R^2 / (Omega_R^2 + Delta^2); monotone decreasing in |Delta|.
    """
    if neighbor_detuning.dimension is not Dimension.ANGULAR_FREQUENCY:
        raise ParameterError("neighbor_detuning must be an angular frequency")
    if neighbor_detuning.value == 0:
        return 1.0
    omega_r = pulse.rabi_amplitude.value
    return omega_r**2 / (omega_r**2 + neighbor_detuning.value**2)


def transfer_probability(pulse: Pulse, transition_freq: Quantity) -> float:
    """Closed-form |0> -> |1> transfer for a pulse on the given transition."""
    final = rabi_evolve(TwoLevelState(1.0 + 0j, 0j), pulse, transition_freq)
    return abs(final.c_prime) ** 2
