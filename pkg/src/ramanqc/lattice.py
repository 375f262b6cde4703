"""Optical potentials and dressed states of the quarter-wavelength lattice.

Two counter-propagating sigma+/sigma- Raman pairs couple the J=3/2 ground
manifold into two independent two-level subsystems, (M=-3/2, M'=+1/2) and
(M=+3/2, M'=-1/2). Each subsystem sees a pair of light-shift potentials

    U_pm(z) = -alpha/3 +/- (1/30) * sqrt(u^2 + 3 alpha^2 cos^2(2kz)),

with u = alpha + 15*delta for pair A and u = alpha - 15*delta for pair B,
alpha = chi^2 / Delta the reduced dynamic polarizability and delta the
two-photon Raman detuning. At the detuning that zeroes u the two branches
become the degenerate smooth pair

    U_pm(z) = -alpha/3 +/- (alpha / (10*sqrt(3))) * cos(2kz)

whose minima interleave with spacing lambda/4. The signed cosine (rather
than |cos|) is the adiabatic-coupling-free branch choice and is only used
at the optimal detuning.

Positions and returned potential arrays are in atomic units (bohr /
hartree); dimensioned scalar results are returned as Quantity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DetuningError, OptimizationError, ParameterError
from .units import (
    AMU_TO_ME,
    ATOMIC_MASS_KG,
    MU_B_AU,
    Dimension,
    Quantity,
    from_internal,
    to_internal,
)

SQRT3 = math.sqrt(3.0)

# Magnetic quantum numbers of the J=3/2 manifold, ascending.
ZEEMAN_M = (-1.5, -0.5, 0.5, 1.5)


@dataclass(frozen=True)
class AtomSpecies:
    """Atom carrying the J=3/2 lower and J=5/2 upper manifold."""

    name: str
    mass: Quantity
    lande_g: float
    j_ground: float
    j_excited: float
    wavelength: Quantity

    def __post_init__(self) -> None:
        if self.mass.dimension is not Dimension.MASS or self.mass.value <= 0:
            raise ParameterError(f"species.mass must be a positive mass, got {self.mass!r}")
        if self.wavelength.dimension is not Dimension.LENGTH or self.wavelength.value <= 0:
            raise ParameterError(
                f"species.wavelength must be a positive length, got {self.wavelength!r}"
            )
        if self.j_ground != 1.5:
            raise ParameterError(
                f"species.j_ground must be 3/2 for this architecture, got {self.j_ground}"
            )

    @property
    def mass_au(self) -> float:
        return to_internal(self.mass)

    @property
    def wavelength_au(self) -> float:
        return to_internal(self.wavelength)

    @property
    def wavevector_au(self) -> float:
        return 2.0 * math.pi / self.wavelength_au


def aluminum() -> AtomSpecies:
    """Default species: metastable J=3/2 state of Al, 309 nm cooling line."""
    return AtomSpecies(
        name="Al",
        mass=Quantity(26.9815385 * ATOMIC_MASS_KG, Dimension.MASS),
        lande_g=4.0 / 3.0,
        j_ground=1.5,
        j_excited=2.5,
        wavelength=Quantity(309e-9, Dimension.LENGTH),
    )


class CoupledPair(Enum):
    """The two optically coupled Zeeman pairs."""

    PAIR_A = "pair_a"  # M = -3/2 coupled to M' = +1/2
    PAIR_B = "pair_b"  # M = +3/2 coupled to M' = -1/2

    @property
    def bare_m(self) -> tuple[float, float]:
        return (-1.5, 0.5) if self is CoupledPair.PAIR_A else (1.5, -0.5)

    @property
    def detuning_sign(self) -> float:
        """Sign s in u = alpha + s*15*delta."""
        return 1.0 if self is CoupledPair.PAIR_A else -1.0


class Branch(Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def other(self) -> "Branch":
        return Branch.MINUS if self is Branch.PLUS else Branch.PLUS


DEFAULT_ONE_PHOTON_DETUNING = Quantity(2 * math.pi * 1e11, Dimension.ANGULAR_FREQUENCY)


@dataclass(frozen=True)
class LatticeParams:
    """Raman lattice drive parameters.

    alpha = chi^2 / Delta is derived; delta is the two-photon detuning of
    the pair-A quadruplet (the second quadruplet carries -delta implicitly).
    """

    rabi_chi: Quantity
    one_photon_detuning: Quantity
    raman_detuning_delta: Quantity
    species: AtomSpecies

    def __post_init__(self) -> None:
        for field_name, q in (
            ("rabi_chi", self.rabi_chi),
            ("one_photon_detuning", self.one_photon_detuning),
            ("raman_detuning_delta", self.raman_detuning_delta),
        ):
            if q.dimension is not Dimension.ANGULAR_FREQUENCY:
                raise ParameterError(f"lattice.{field_name} must be an angular frequency")
        if self.one_photon_detuning.value == 0:
            raise ParameterError("lattice.one_photon_detuning must be nonzero")
        if not math.isfinite(self.rabi_chi.value**2 / self.one_photon_detuning.value):
            raise ParameterError("lattice: derived alpha = chi^2/Delta is not finite")

    @classmethod
    def from_alpha(
        cls,
        alpha: Quantity,
        species: AtomSpecies,
        raman_delta: Quantity | None = None,
        one_photon_detuning: Quantity = DEFAULT_ONE_PHOTON_DETUNING,
    ) -> "LatticeParams":
        """Build params from a target polarizability; chi = sqrt(alpha*Delta).

        raman_delta defaults to pair A's optimum -alpha/15.
        """
        if alpha.dimension is not Dimension.ANGULAR_FREQUENCY:
            raise ParameterError("alpha must be an angular frequency")
        prod = alpha.value * one_photon_detuning.value
        if prod < 0:
            raise ParameterError("alpha and one-photon detuning must share a sign")
        if raman_delta is None:
            raman_delta = Quantity(-alpha.value / 15.0, Dimension.ANGULAR_FREQUENCY)
        return cls(
            rabi_chi=Quantity(math.sqrt(prod), Dimension.ANGULAR_FREQUENCY),
            one_photon_detuning=one_photon_detuning,
            raman_detuning_delta=raman_delta,
            species=species,
        )

    def with_delta(self, raman_delta: Quantity) -> "LatticeParams":
        return replace(self, raman_detuning_delta=raman_delta)

    @property
    def alpha(self) -> Quantity:
        return Quantity(
            self.rabi_chi.value**2 / self.one_photon_detuning.value,
            Dimension.ANGULAR_FREQUENCY,
        )

    @property
    def alpha_au(self) -> float:
        return to_internal(self.alpha)

    @property
    def delta_au(self) -> float:
        return to_internal(self.raman_detuning_delta)

    @property
    def k_au(self) -> float:
        return self.species.wavevector_au

    def optimal_delta(self, pair: CoupledPair) -> Quantity:
        """Detuning that makes the pair's branches degenerate: -s*alpha/15."""
        return Quantity(
            -pair.detuning_sign * self.alpha.value / 15.0, Dimension.ANGULAR_FREQUENCY
        )

    def detuning_is_optimal(self, pair: CoupledPair, rtol: float = 1e-9) -> bool:
        target = to_internal(self.optimal_delta(pair))
        scale = abs(self.alpha_au)
        return abs(self.delta_au - target) <= rtol * scale


def potential_general(
    p: LatticeParams, pair: CoupledPair, z: float | np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Both light-shift branches at arbitrary detuning (square-root form).

    z in bohr; returns (U_plus, U_minus) in hartree, elementwise over z.
    """
    z = np.asarray(z, dtype=float)
    alpha = p.alpha_au
    u = alpha + pair.detuning_sign * 15.0 * p.delta_au
    root = np.sqrt(u**2 + 3.0 * alpha**2 * np.cos(2.0 * p.k_au * z) ** 2) / 30.0
    base = -alpha / 3.0
    return base + root, base - root


def potential_optimal(
    p: LatticeParams, pair: CoupledPair, z: float | np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Degenerate smooth branches at the pair's optimal detuning.

    Uses the signed cosine, so each branch is smooth through the
    degeneracy points (no |cos| kink). Raises DetuningError away from the
    optimum, where this form does not apply.
    """
    if not p.detuning_is_optimal(pair):
        raise DetuningError(
            f"raman detuning {p.raman_detuning_delta.value:g} rad/s is not the "
            f"{pair.name} optimum {p.optimal_delta(pair).value:g} rad/s; "
            "use potential_general"
        )
    z = np.asarray(z, dtype=float)
    alpha = p.alpha_au
    mod = (alpha / (10.0 * SQRT3)) * np.cos(2.0 * p.k_au * z)
    base = -alpha / 3.0
    return base + mod, base - mod


def branch_potential(p: LatticeParams, branch: Branch, z: float | np.ndarray) -> np.ndarray:
    """Single optimal-detuning branch, convenience for the motional solver."""
    plus, minus = potential_optimal(p, CoupledPair.PAIR_A, z)
    return plus if branch is Branch.PLUS else minus


@dataclass(frozen=True)
class EffectiveHamiltonian:
    """Real-symmetric 2x2 optical Hamiltonian of one coupled pair at z.

    Reverse-constructed so that its trace and discriminant reproduce the
    closed-form branch potentials: diagonal -alpha/3 +/- u/30, off-diagonal
    (alpha/(10*sqrt(3))) * cos(2kz). Entries in hartree.
    """

    diag: tuple[float, float]
    offdiag: float
    z: float

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.diag[0], self.offdiag], [self.offdiag, self.diag[1]]], dtype=float
        )

    def eigenvalues(self) -> tuple[float, float]:
        """(U_plus, U_minus), descending."""
        lo, hi = np.linalg.eigvalsh(self.matrix())
        return float(hi), float(lo)


def effective_hamiltonian(
    p: LatticeParams, pair: CoupledPair, z: float
) -> EffectiveHamiltonian:
    alpha = p.alpha_au
    u = alpha + pair.detuning_sign * 15.0 * p.delta_au
    base = -alpha / 3.0
    off = (alpha / (10.0 * SQRT3)) * math.cos(2.0 * p.k_au * z)
    return EffectiveHamiltonian(diag=(base + u / 30.0, base - u / 30.0), offdiag=off, z=z)


@dataclass(frozen=True)
class DressedState:
    """Branch eigenstate of one coupled pair at the optimal detuning.

    amplitudes are on the bare Zeeman basis `bare_m`; phase_energies are
    the per-component phase rates E_M -/+ delta/2 in hartree.
    """

    pair: CoupledPair
    branch: Branch
    bare_m: tuple[float, float]
    amplitudes: tuple[complex, complex]
    phase_energies: tuple[float, float]

    def __post_init__(self) -> None:
        norm = abs(self.amplitudes[0]) ** 2 + abs(self.amplitudes[1]) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ParameterError(f"dressed-state amplitudes not normalized: {norm!r}")

    def overlap(self, other: "DressedState") -> complex:
        if self.bare_m != other.bare_m:
            return 0j
        return sum(
            a.conjugate() * b for a, b in zip(self.amplitudes, other.amplitudes)
        )


def zeeman_ladder(species: AtomSpecies, b0: Quantity) -> np.ndarray:
    """Energies E_M = g * mu_B * B0 * M for M = -3/2 .. +3/2, in hartree."""
    if b0.dimension is not Dimension.MAGNETIC_FIELD:
        raise ParameterError("b0 must be a magnetic field")
    b_au = to_internal(b0)
    return np.array([species.lande_g * MU_B_AU * b_au * m for m in ZEEMAN_M])


def _ladder_energy(species: AtomSpecies, b0: Quantity | None, m: float) -> float:
    if b0 is None:
        return 0.0
    ladder = zeeman_ladder(species, b0)
    return float(ladder[ZEEMAN_M.index(m)])


def dressed_states(
    p: LatticeParams, pair: CoupledPair, b0: Quantity | None = None
) -> tuple[DressedState, DressedState]:
    """(plus, minus) eigenstates at the pair's optimal detuning.

    There the amplitudes are z-independent, (1/sqrt2, -/+1/sqrt2). Away
    from the optimum they would acquire z dependence, which this module
    does not model; a DetuningError is raised instead.
    """
    if not p.detuning_is_optimal(pair):
        raise DetuningError(
            f"dressed states are z-independent only at the {pair.name} optimal "
            f"detuning {p.optimal_delta(pair).value:g} rad/s"
        )
    delta_au = to_internal(p.optimal_delta(pair))
    m1, m2 = pair.bare_m
    e1 = _ladder_energy(p.species, b0, m1) - delta_au / 2.0
    e2 = _ladder_energy(p.species, b0, m2) + delta_au / 2.0
    inv = 1.0 / math.sqrt(2.0)
    plus = DressedState(pair, Branch.PLUS, (m1, m2), (inv + 0j, -inv + 0j), (e1, e2))
    minus = DressedState(pair, Branch.MINUS, (m1, m2), (inv + 0j, inv + 0j), (e1, e2))
    return plus, minus


def _barrier_general(p: LatticeParams, pair: CoupledPair, delta_au: float) -> float:
    """Intersite barrier of the adiabatic upper branch at arbitrary delta."""
    alpha = p.alpha_au
    u = alpha + pair.detuning_sign * 15.0 * delta_au
    return (math.sqrt(u**2 + 3.0 * alpha**2) - abs(u)) / 30.0


def optimize_detuning(p: LatticeParams, pair: CoupledPair) -> Quantity:
    """Numerically locate the detuning maximizing the intersite barrier.

    The same point makes the two branches energetically equivalent (the
    z-independent diagonal splitting u vanishes); the equivalence residual
    is checked after the search and reported on failure.
    """
    alpha = p.alpha_au
    if alpha == 0:
        raise ParameterError("optimize_detuning requires alpha != 0")
    scale = abs(alpha)
    res = minimize_scalar(
        lambda d: -_barrier_general(p, pair, d),
        bounds=(-scale, scale),
        method="bounded",
        options={"xatol": 1e-10 * scale, "maxiter": 500},
    )
    if not res.success:
        raise OptimizationError(f"detuning search did not converge: {res.message}")
    delta_star = float(res.x)
    # energetic-equivalence residual: |u| / alpha at the found optimum
    residual = abs(alpha + pair.detuning_sign * 15.0 * delta_star) / scale
    if residual > 1e-7:
        raise OptimizationError(
            f"branches not energetically equivalent at found detuning; "
            f"residual |u|/|alpha| = {residual:.3e}"
        )
    return from_internal(delta_star, Dimension.ANGULAR_FREQUENCY)


@dataclass(frozen=True)
class WellSite:
    """One potential minimum: position in bohr, owning branch."""

    position: float
    branch: Branch
    pair: CoupledPair


@dataclass(frozen=True)
class WellGeometry:
    minima: tuple[WellSite, ...]
    spacing: Quantity
    barrier: Quantity


def well_geometry(p: LatticeParams, n_periods: int = 2) -> WellGeometry:
    """Interleaved minima of the two optimal-detuning branches.

    Covers z in [0, n_periods * lambda). Minima of one branch sit at the
    other branch's maxima; neighbors alternate branch and are lambda/4
    apart. Which branch owns z = 0 follows from the sign of alpha: for
    alpha > 0 the minus branch (signed-cosine form) is lowest at cos = +1.
    Both quadruplets produce coinciding potential sets at their own optima,
    so the pair label is reported as pair A throughout.
    """
    if not (
        p.detuning_is_optimal(CoupledPair.PAIR_A)
        or p.detuning_is_optimal(CoupledPair.PAIR_B)
    ):
        raise DetuningError(
            "well geometry is defined at the optimal detuning "
            "(either pair; the second quadruplet carries the opposite sign)"
        )
    lam = p.species.wavelength_au
    alpha = p.alpha_au
    # branch owning z = 0 (where cos(2kz) = +1)
    branch_at_zero = Branch.MINUS if alpha > 0 else Branch.PLUS
    sites = []
    for n in range(4 * n_periods):
        z = n * lam / 4.0
        branch = branch_at_zero if n % 2 == 0 else branch_at_zero.other
        sites.append(WellSite(position=z, branch=branch, pair=CoupledPair.PAIR_A))
    return WellGeometry(
        minima=tuple(sites),
        spacing=from_internal(lam / 4.0, Dimension.LENGTH),
        barrier=from_internal(abs(alpha) / (5.0 * SQRT3), Dimension.ENERGY),
    )


def branch_minima(p: LatticeParams, branch: Branch, n_periods: int = 2) -> tuple[WellSite, ...]:
    """The subset of well_geometry minima belonging to one branch."""
    return tuple(s for s in well_geometry(p, n_periods).minima if s.branch is branch)


def harmonic_frequency(p: LatticeParams, well: WellSite) -> Quantity:
    """Small-oscillation frequency at a well bottom.

    The analytic curvature of the signed-cosine branch at its minimum is
    U'' = 4 k^2 |alpha| / (10*sqrt(3)), giving
    omega = 2k * sqrt(|alpha| / (10*sqrt(3)*M)).
    """
    alpha = abs(p.alpha_au)
    if alpha == 0:
        raise ParameterError("harmonic_frequency requires alpha != 0")
    m = p.species.mass_au
    k = p.k_au
    # curvature sanity: the site must be a genuine minimum of its branch
    sign = 1.0 if well.branch is Branch.PLUS else -1.0
    curv = -sign * (p.alpha_au / (10.0 * SQRT3)) * 4.0 * k**2 * math.cos(2.0 * k * well.position)
    if curv <= 0:
        raise ParameterError(
            f"site at z={well.position:g} bohr is not a minimum of branch {well.branch.name}"
        )
    omega_au = 2.0 * k * math.sqrt(alpha / (10.0 * SQRT3 * m))
    return from_internal(omega_au, Dimension.ANGULAR_FREQUENCY)
