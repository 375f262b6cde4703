"""Two-qubit CNOT physics: dipole moments, conditional shift, gate budget.

The qubit states carry permanent magnetic moments +/- (g/2) mu_B; the
on-axis dipolar field of the control atom shifts the target's resonance by
+/- delta_omega_CNOT/2 depending on the control state, and frequency
selectivity of the microwave pulse implements the conditioning.

The dipolar formulas are literal in atomic units: the field of a moment mu
at on-axis distance R is dB = 2 * alpha_fs^2 * mu / R^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError
from .lattice import (
    CoupledPair,
    DressedState,
    LatticeParams,
    AtomSpecies,
    dressed_states,
)
from .qubit_control import FieldProfile, Pulse, TwoLevelState, rabi_evolve
from .units import (
    FINE_STRUCTURE,
    MU_B_AU,
    Dimension,
    Quantity,
    from_internal,
    to_internal,
)


@dataclass(frozen=True)
class QubitMoments:
    mu_one: Quantity
    mu_zero: Quantity


def state_moment(species: AtomSpecies, state: DressedState) -> Quantity:
    """Expectation of mu_z in a dressed state; mu_z|M> = -g * M * mu_B |M>."""
    g = species.lande_g
    val = sum(
        abs(a) ** 2 * (-g * m * MU_B_AU)
        for a, m in zip(state.amplitudes, state.bare_m)
    )
    return from_internal(val, Dimension.MAGNETIC_MOMENT)


def default_qubit_states(p: LatticeParams) -> tuple[DressedState, DressedState]:
    """(|1>, |0>) for a plus-branch well: the two quadruplets' plus states."""
    one = dressed_states(p, CoupledPair.PAIR_A)[0]
    zero = dressed_states(p.with_delta(p.optimal_delta(CoupledPair.PAIR_B)), CoupledPair.PAIR_B)[0]
    return one, zero


def qubit_moments(
    species: AtomSpecies, one_state: DressedState, zero_state: DressedState
) -> QubitMoments:
    """Permanent moments of the two qubit states; +/- (g/2) mu_B, well-independent."""
    return QubitMoments(
        mu_one=state_moment(species, one_state),
        mu_zero=state_moment(species, zero_state),
    )


def dipolar_field(r: Quantity, mu: Quantity) -> Quantity:
    """On-axis magnetic field of a point dipole at distance R.

    dB = 2 * alpha_fs^2 * mu / R^3 in atomic units.
    """
    if r.dimension is not Dimension.LENGTH:
        raise ParameterError("r must be a length")
    if mu.dimension is not Dimension.MAGNETIC_MOMENT:
        raise ParameterError("mu must be a magnetic moment")
    if r.value <= 0:
        raise ParameterError("dipolar field singular: separation R must be > 0")
    r_au = to_internal(r)
    db_au = 2.0 * FINE_STRUCTURE**2 * to_internal(mu) / r_au**3
    return from_internal(db_au, Dimension.MAGNETIC_FIELD)


def cnot_shift(species: AtomSpecies, r: Quantity) -> Quantity:
    """Conditional resonance shift (32/9) * alpha_fs^2 * mu_B^2 / R^3.

    Equals the difference in the target's transition frequency between the
    two control states: moment difference g*mu_B times twice the dipolar
    field of one qubit moment (g/2)*mu_B.
    """
    if r.dimension is not Dimension.LENGTH:
        raise ParameterError("r must be a length")
    if r.value <= 0:
        raise ParameterError("cnot shift singular: separation R must be > 0")
    r_au = to_internal(r)
    # (32/9) alpha^2 mu_B^2 / R^3 holds for g = 4/3; keep the general chain
    g = species.lande_g
    mu_state = (g / 2.0) * MU_B_AU
    db_au = 2.0 * FINE_STRUCTURE**2 * mu_state / r_au**3
    shift_au = g * MU_B_AU * 2.0 * db_au
    return from_internal(shift_au, Dimension.ANGULAR_FREQUENCY)


@dataclass(frozen=True)
class GateBudget:
    separation: Quantity
    delta_b: Quantity
    delta_omega: Quantity
    tau_cnot: Quantity
    addressing_margin: float


def cnot_budget(p: LatticeParams, profile: FieldProfile) -> GateBudget:
    """CNOT timing budget at neighbor separation R = lambda/4.

    tau_CNOT = 1/delta_omega_CNOT (bare resolution time, no safety factor;
    pair with cnot_simulate to pick one). addressing_margin is
    delta_omega_CNOT over the per-site Zeeman increment.
    """
    r = Quantity(p.species.wavelength.value / 4.0, Dimension.LENGTH)
    one, _zero = default_qubit_states(p)
    mu_one = state_moment(p.species, one)
    db = dipolar_field(r, mu_one)
    shift = cnot_shift(p.species, r)
    # consistency of the closed form with the reconstructed chain
    chain = p.species.lande_g * MU_B_AU * 2.0 * to_internal(db)
    if abs(chain - to_internal(shift)) > 1e-12 * abs(to_internal(shift)):
        raise ParameterError("cnot shift inconsistent with dipolar-field chain")
    increment = profile.increment
    margin = shift.value / increment if increment != 0 else math.inf
    return GateBudget(
        separation=r,
        delta_b=db,
        delta_omega=shift,
        tau_cnot=Quantity(1.0 / shift.value, Dimension.TIME),
        addressing_margin=margin,
    )


@dataclass(frozen=True)
class ConditionalTransfer:
    p_flip_control_one: float
    p_flip_control_zero: float


def cnot_simulate(
    p: LatticeParams, profile: FieldProfile, pulse_duration: Quantity
) -> ConditionalTransfer:
    """Conditional target flip probabilities for a frequency-selective pulse.

    The target resonance sits at omega_Z +/- delta_omega_CNOT/2 according
    to the control state; the pulse carrier is set on the control=1
    resonance and Omega_R = pi/duration makes it a resonant pi pulse.
    Control=0 then sees a detuning of the full delta_omega_CNOT.
    """
    if pulse_duration.dimension is not Dimension.TIME or pulse_duration.value <= 0:
        raise ParameterError("pulse_duration must be a positive time")
    shift = cnot_shift(p.species, Quantity(p.species.wavelength.value / 4.0, Dimension.LENGTH))
    omega_target = profile.omega_z0
    carrier = Quantity(omega_target + shift.value / 2.0, Dimension.ANGULAR_FREQUENCY)
    pulse = Pulse(
        carrier=carrier,
        rabi_amplitude=Quantity(math.pi / pulse_duration.value, Dimension.ANGULAR_FREQUENCY),
        duration=pulse_duration,
    )
    ground = TwoLevelState(1.0 + 0j, 0j)
    res_one = Quantity(omega_target + shift.value / 2.0, Dimension.ANGULAR_FREQUENCY)
    res_zero = Quantity(omega_target - shift.value / 2.0, Dimension.ANGULAR_FREQUENCY)
    p_one = abs(rabi_evolve(ground, pulse, res_one).c_prime) ** 2
    p_zero = abs(rabi_evolve(ground, pulse, res_zero).c_prime) ** 2
    return ConditionalTransfer(p_flip_control_one=p_one, p_flip_control_zero=p_zero)
