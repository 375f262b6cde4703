"""Center-of-mass wavepacket dynamics on a single potential branch.

The two branch wavefunctions obey decoupled Schrodinger equations
(the dressed states are z-independent at the optimal detuning, so the
kinetic operator has no cross term); this module therefore never mixes
branches: each propagation reads exactly one branch potential.

Integration is unitary second-order Strang splitting on a periodic
power-of-two grid: half potential step in position space, full kinetic
step in momentum space (FFT), half potential step. Ground states come
from imaginary-time propagation with per-step renormalization, restricted
to a single well by clamping the potential at its barrier top outside the
well region so the converged state is localized (Wannier-like) rather
than the delocalized band minimum.

Positions, energies and times in this module are atomic units unless a
Quantity says otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, GridError, ParameterError, StabilityError
from .lattice import (
    Branch,
    LatticeParams,
    WellSite,
    branch_minima,
    branch_potential,
    harmonic_frequency,
    well_geometry,
)
from .units import AU_TIME_S, Dimension, Quantity, from_internal, to_internal

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class Grid:
    """Uniform periodic 1D grid, power-of-two sized."""

    z_min: float
    z_max: float
    n_points: int

    def __post_init__(self) -> None:
        if self.z_max <= self.z_min:
            raise GridError("grid.z_max must exceed grid.z_min")
        if self.n_points < 256:
            raise GridError("grid.n_points must be >= 256")
        if self.n_points & (self.n_points - 1):
            raise GridError("grid.n_points must be a power of two")

    @property
    def length(self) -> float:
        return self.z_max - self.z_min

    @property
    def dz(self) -> float:
        return self.length / self.n_points

    @property
    def z(self) -> np.ndarray:
        return self.z_min + self.dz * np.arange(self.n_points)

    @property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dz)


def default_grid(p: LatticeParams, periods: int = 8, n_points: int = 2048) -> Grid:
    """Grid spanning `periods` lattice periods (lambda/2 each), centered at 0."""
    if periods < 4:
        raise GridError("grid must span at least 4 lattice periods")
    half = periods * p.species.wavelength_au / 4.0
    return Grid(z_min=-half, z_max=half, n_points=n_points)


def _check_grid_span(grid: Grid, p: LatticeParams) -> None:
    if grid.length < 2.0 * p.species.wavelength_au - 1e-9:
        raise GridError("grid must span at least 4 lattice periods (2 wavelengths)")


@dataclass
class Wavepacket:
    """Complex amplitudes on a grid, tied to the branch whose potential drives it."""

    grid: Grid
    amplitudes: np.ndarray
    branch: Branch

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.dz)

    def normalized(self) -> "Wavepacket":
        return Wavepacket(self.grid, self.amplitudes / math.sqrt(self.norm()), self.branch)

    def position_expectation(self) -> float:
        w = np.abs(self.amplitudes) ** 2
        return float(np.sum(self.grid.z * w) * self.grid.dz / self.norm())

    def position_variance(self) -> float:
        w = np.abs(self.amplitudes) ** 2 * self.grid.dz
        mean = float(np.sum(self.grid.z * w)) / float(np.sum(w))
        return float(np.sum((self.grid.z - mean) ** 2 * w)) / float(np.sum(w))

    def overlap(self, other: "Wavepacket") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes) * self.grid.dz)


def gaussian_wavepacket(
    grid: Grid, center: float, sigma: float, branch: Branch, momentum: float = 0.0
) -> Wavepacket:
    """Normalized Gaussian, width sigma (position-space standard deviation)."""
    z = grid.z
    psi = np.exp(-((z - center) ** 2) / (4.0 * sigma**2) + 1j * momentum * z)
    psi = psi.astype(complex)
    w = Wavepacket(grid, psi, branch)
    return w.normalized()


def energy_expectation(w: Wavepacket, p: LatticeParams) -> float:
    """<T + U_branch> in hartree."""
    u = branch_potential(p, w.branch, w.grid.z)
    psi = w.amplitudes
    psi_k = np.fft.fft(psi)
    kin_k = (w.grid.k**2 / (2.0 * p.species.mass_au)) * psi_k
    kin = float(np.real(np.vdot(psi, np.fft.ifft(kin_k))) * w.grid.dz)
    pot = float(np.sum(u * np.abs(psi) ** 2) * w.grid.dz)
    return (kin + pot) / w.norm()


def _split_step(
    psi: np.ndarray,
    half_pot: np.ndarray,
    full_kin: np.ndarray,
    steps: int,
) -> np.ndarray:
    """Strang-split evolution; interior half steps merged pairwise."""
    psi = half_pot * psi
    full_pot = half_pot * half_pot
    for _ in range(steps - 1):
        psi = np.fft.ifft(full_kin * np.fft.fft(psi))
        psi = full_pot * psi
    psi = np.fft.ifft(full_kin * np.fft.fft(psi))
    return half_pot * psi


def propagate(w: Wavepacket, p: LatticeParams, dt: Quantity, steps: int) -> Wavepacket:
    """Real-time unitary evolution of one branch wavefunction.

    dt * max|U| <= 0.1 is enforced as a stability/accuracy guard on the
    potential phase per step.
    """
    if dt.dimension is not Dimension.TIME or dt.value <= 0:
        raise ParameterError("dt must be a positive time")
    if steps < 1:
        raise ParameterError("steps must be >= 1")
    _check_grid_span(w.grid, p)
    dt_au = to_internal(dt)
    u = branch_potential(p, w.branch, w.grid.z)
    umax = float(np.max(np.abs(u)))
    if dt_au * umax > 0.1:
        raise StabilityError(
            f"dt*max|U| = {dt_au * umax:.3g} exceeds 0.1; reduce dt below "
            f"{0.1 / umax:.3g} a.u. ({from_internal(0.1 / umax, Dimension.TIME).value:.3g} s)"
        )
    half_pot = np.exp(-0.5j * u * dt_au)
    full_kin = np.exp(-1j * (w.grid.k**2 / (2.0 * p.species.mass_au)) * dt_au)
    psi = _split_step(w.amplitudes.astype(complex), half_pot, full_kin, steps)
    return Wavepacket(w.grid, psi, w.branch)


def _well_site(p: LatticeParams, branch: Branch, well_index: int) -> WellSite:
    sites = branch_minima(p, branch, n_periods=4)
    if not 0 <= well_index < len(sites):
        raise ParameterError(f"well_index {well_index} out of range (0..{len(sites) - 1})")
    return sites[well_index]


def _clamped_well_potential(p: LatticeParams, branch: Branch, z0: float, z: np.ndarray) -> np.ndarray:
    """Branch potential inside [z0 - lambda/4, z0 + lambda/4], barrier top outside.

    The clamp removes the neighboring wells so imaginary time cannot leak
    the state into them; inside the window the potential is untouched.
    """
    u = branch_potential(p, branch, z)
    lam = p.species.wavelength_au
    outside = np.abs(z - z0) > lam / 4.0
    u_top = float(np.max(branch_potential(p, branch, np.array([z0 + lam / 4.0]))))
    u = u.copy()
    u[outside] = u_top
    return u


def ground_state(
    p: LatticeParams,
    branch: Branch,
    well_index: int,
    grid: Grid | None = None,
    max_steps: int = 100_000,
    rtol: float = 1e-12,
) -> Wavepacket:
    """Motional ground state localized in one well, via imaginary time.

    Converges when the relative energy change per step drops below rtol;
    raises ConvergenceError if the step budget runs out first.
    """
    if grid is None:
        grid = default_grid(p)
    _check_grid_span(grid, p)
    site = _well_site(p, branch, well_index)
    z0 = site.position
    omega = to_internal(harmonic_frequency(p, site))
    m = p.species.mass_au
    sigma0 = math.sqrt(1.0 / (2.0 * m * omega))
    if sigma0 < 3.0 * grid.dz:
        raise GridError(
            f"grid too coarse: ground-state width {sigma0:.3g} bohr needs dz below "
            f"{sigma0 / 3.0:.3g} bohr"
        )
    u = _clamped_well_potential(p, branch, z0, grid.z)
    dtau = 0.02 / omega
    decay_half_pot = np.exp(-0.5 * u * dtau)
    decay_kin = np.exp(-(grid.k**2 / (2.0 * m)) * dtau)

    psi = np.exp(-((grid.z - z0) ** 2) / (4.0 * sigma0**2)).astype(complex)
    psi /= math.sqrt(float(np.sum(np.abs(psi) ** 2)) * grid.dz)

    def clamped_energy(phi: np.ndarray) -> float:
        phi_k = np.fft.fft(phi)
        kin = float(
            np.real(np.vdot(phi, np.fft.ifft((grid.k**2 / (2.0 * m)) * phi_k))) * grid.dz
        )
        pot = float(np.sum(u * np.abs(phi) ** 2) * grid.dz)
        return kin + pot

    e_prev = clamped_energy(psi)
    for _ in range(max_steps):
        psi = decay_half_pot * psi
        psi = np.fft.ifft(decay_kin * np.fft.fft(psi))
        psi = decay_half_pot * psi
        psi /= math.sqrt(float(np.sum(np.abs(psi) ** 2)) * grid.dz)
        e = clamped_energy(psi)
        if abs(e - e_prev) <= rtol * max(abs(e), 1e-300):
            return Wavepacket(grid, psi, branch)
        e_prev = e
    raise ConvergenceError(
        f"imaginary-time ground state did not converge within {max_steps} steps "
        f"(last relative energy change {abs(e - e_prev) / max(abs(e), 1e-300):.3e})"
    )


def _harmonic_eigenfunctions(
    z: np.ndarray, z0: float, m: float, omega: float, n_max: int
) -> np.ndarray:
    """Rows: normalized oscillator eigenfunctions n = 0..n_max, via stable recursion."""
    xi = np.sqrt(m * omega) * (z - z0)
    h = np.zeros((n_max + 1, z.size))
    h[0] = (m * omega / np.pi) ** 0.25 * np.exp(-(xi**2) / 2.0)
    if n_max >= 1:
        h[1] = math.sqrt(2.0) * xi * h[0]
    for n in range(1, n_max):
        h[n + 1] = math.sqrt(2.0 / (n + 1)) * xi * h[n] - math.sqrt(n / (n + 1)) * h[n - 1]
    return h


def bound_level_count(p: LatticeParams) -> int:
    """Harmonic levels with (n + 1/2) * omega below the intersite barrier."""
    barrier = to_internal(well_geometry(p).barrier)
    site = branch_minima(p, Branch.PLUS)[0]
    omega = to_internal(harmonic_frequency(p, site))
    return max(0, math.ceil(barrier / omega - 0.5))


def motional_populations(
    w: Wavepacket, p: LatticeParams, well_index: int, n_max: int
) -> np.ndarray:
    """Overlap amplitudes c_n with oscillator states n = 0..n_max at the well."""
    n_bound = bound_level_count(p)
    if n_max + 1 > n_bound:
        raise ParameterError(
            f"n_max = {n_max} exceeds the {n_bound} bound harmonic level(s) below the barrier"
        )
    site = _well_site(p, w.branch, well_index)
    omega = to_internal(harmonic_frequency(p, site))
    basis = _harmonic_eigenfunctions(
        w.grid.z, site.position, p.species.mass_au, omega, n_max
    )
    return basis @ w.amplitudes * w.grid.dz


def tau2(p: LatticeParams) -> Quantity:
    """Secondary escape time (1/2k) * sqrt(5*sqrt(3)*M / alpha).

    Satisfies tau2 * omega_osc = 1/sqrt(2) exactly against the well
    curvature of the degenerate branch pair.
    """
    alpha = abs(p.alpha_au)
    if alpha == 0:
        raise ParameterError("tau2 requires alpha != 0")
    t_au = (1.0 / (2.0 * p.k_au)) * math.sqrt(5.0 * SQRT3 * p.species.mass_au / alpha)
    return from_internal(t_au, Dimension.TIME)


class LambDicke(NamedTuple):
    eta: float
    in_regime: bool


def lamb_dicke(p: LatticeParams) -> LambDicke:
    """eta = k * sqrt(1/(2 M omega_osc)); regime satisfied when eta < 1."""
    site = branch_minima(p, Branch.PLUS)[0]
    omega = to_internal(harmonic_frequency(p, site))
    eta = p.k_au * math.sqrt(1.0 / (2.0 * p.species.mass_au * omega))
    return LambDicke(eta=eta, in_regime=eta < 1.0)


@dataclass(frozen=True)
class EscapeCurve:
    """Survival of the initial state on an inverted well."""

    times_au: np.ndarray
    survival: np.ndarray
    norms: np.ndarray
    energies_au: np.ndarray

    @property
    def times_s(self) -> np.ndarray:
        return self.times_au * AU_TIME_S

    def one_over_e_time_au(self) -> float | None:
        """First crossing of 1/e, linearly interpolated; None if no crossing."""
        thr = 1.0 / math.e
        below = np.nonzero(self.survival < thr)[0]
        if below.size == 0:
            return None
        i = int(below[0])
        if i == 0:
            return float(self.times_au[0])
        t0, t1 = self.times_au[i - 1], self.times_au[i]
        p0, p1 = self.survival[i - 1], self.survival[i]
        return float(t0 + (p0 - thr) / (p0 - p1) * (t1 - t0))


def momentum_tail_fraction(amplitudes: np.ndarray, grid: Grid, band: float = 0.9) -> float:
    """Norm fraction above `band` of the momentum-grid edge (aliasing risk)."""
    spec = np.abs(np.fft.fft(amplitudes)) ** 2
    k_abs = np.abs(grid.k)
    tail = float(np.sum(spec[k_abs > band * float(np.max(k_abs))]))
    return tail / float(np.sum(spec))


def inverted_well_escape(
    p: LatticeParams,
    well_index: int,
    t_max: Quantity,
    branch: Branch = Branch.MINUS,
    grid: Grid | None = None,
    n_samples: int = 200,
) -> EscapeCurve:
    """Decay of a ground-state packet placed on a potential maximum.

    The initial state is the motional ground state of the opposite branch's
    well, whose minimum coincides with a maximum of `branch`; it then
    evolves under `branch` and the squared overlap with the initial state
    is sampled n_samples times up to t_max.
    """
    if t_max.dimension is not Dimension.TIME or t_max.value <= 0:
        raise ParameterError("t_max must be a positive time")
    if grid is None:
        grid = default_grid(p)
    psi0 = ground_state(p, branch.other, well_index, grid=grid)
    psi0 = Wavepacket(grid, psi0.amplitudes.copy(), branch)

    site = _well_site(p, branch.other, well_index)
    omega = to_internal(harmonic_frequency(p, site))
    u = branch_potential(p, branch, grid.z)
    umax = float(np.max(np.abs(u)))
    t_total = to_internal(t_max)
    sample_dt = t_total / n_samples
    dt_cap = min(0.1 / umax, 0.02 / omega)
    steps_per_sample = max(1, math.ceil(sample_dt / dt_cap))
    dt_au = sample_dt / steps_per_sample

    half_pot = np.exp(-0.5j * u * dt_au)
    full_kin = np.exp(-1j * (grid.k**2 / (2.0 * p.species.mass_au)) * dt_au)

    times = np.empty(n_samples + 1)
    survival = np.empty(n_samples + 1)
    norms = np.empty(n_samples + 1)
    energies = np.empty(n_samples + 1)
    psi = psi0.amplitudes.copy()

    def record(i: int, t: float, phi: np.ndarray) -> None:
        times[i] = t
        wp = Wavepacket(grid, phi, branch)
        survival[i] = abs(
            complex(np.vdot(psi0.amplitudes, phi) * grid.dz)
        ) ** 2
        norms[i] = wp.norm()
        energies[i] = energy_expectation(wp, p)

    record(0, 0.0, psi)
    # momentum headroom guard: escaping packet must stay well below Nyquist
    for i in range(1, n_samples + 1):
        psi = _split_step(psi, half_pot, full_kin, steps_per_sample)
        record(i, i * sample_dt, psi)
        if momentum_tail_fraction(psi, grid) > 1e-6:
            raise GridError(
                "escaping wavepacket approaching the momentum-grid edge; "
                "enlarge the grid or raise n_points"
            )
    return EscapeCurve(times_au=times, survival=survival, norms=norms, energies_au=energies)
