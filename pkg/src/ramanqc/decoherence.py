"""Magnetic-noise decoherence: spectral models, analytic rate, Monte Carlo.

Spectral-density convention (fixed package-wide): S(omega) is the
two-sided transform of the autocorrelation of the real stationary field,

    <B(t) B(t+tau)> = (1/2pi) * Integral S(omega) e^{i omega tau} domega,

so S is even and the Ornstein-Uhlenbeck model has
S(omega) = 2 sigma^2 tau_c / (1 + omega^2 tau_c^2), total power sigma^2.
With a transition matrix element mu (J/T) and dressed-state gap
Delta = alpha/(5 sqrt 3), the short-time excitation probability is
p(t) = t / tau_1 with tau_1 = 1 / ((mu/hbar)^2 S(Delta)).

The Monte Carlo integrates both amplitudes of

    i dc_-/dt = Delta c_- + (mu/hbar) B(t) c_+
    i dc_+/dt =             (mu/hbar) B(t) c_-

per realization (no frozen-c_+ approximation), so the analytic law is a
checkable limit, not an assumption. This module works in SI units: rad/s,
seconds, tesla.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy.signal import lfilter

from .errors import NoiseError, ParameterError
from .lattice import (
    AtomSpecies,
    CoupledPair,
    DressedState,
    LatticeParams,
    dressed_states,
    well_geometry,
)
from .motional import tau2 as motional_tau2
from .units import BOHR_MAGNETON_SI, HBAR_SI, MU_B_AU, Dimension, Quantity, to_internal

SQRT3 = math.sqrt(3.0)


class NoiseKind(Enum):
    ORNSTEIN_UHLENBECK = "ornstein_uhlenbeck"
    BAND_LIMITED_WHITE = "band_limited_white"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class NoiseModel:
    """Parametric magnetic-noise spectral density.

    sigma is the rms field; tau_c the correlation time (for the
    band-limited model it is the inverse angular cutoff, omega_c = 1/tau_c).
    Tabulated models carry (omega [rad/s], S [T^2/Hz]) rows instead.
    """

    kind: NoiseKind
    sigma: Quantity | None = None
    tau_c: Quantity | None = None
    table: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind is NoiseKind.TABULATED:
            if self.table is None:
                raise ParameterError("tabulated noise model requires a table")
            t = np.asarray(self.table, dtype=float)
            if t.ndim != 2 or t.shape[1] != 2 or t.shape[0] < 2:
                raise ParameterError("noise.table must be an (N, 2) array, N >= 2")
            if np.any(t[:, 0] <= 0) or np.any(np.diff(t[:, 0]) <= 0):
                raise ParameterError("noise.table frequencies must be positive ascending")
            if np.any(t[:, 1] < 0):
                raise ParameterError("noise.table spectral densities must be >= 0")
            object.__setattr__(self, "table", t)
            return
        if self.sigma is None or self.sigma.dimension is not Dimension.MAGNETIC_FIELD:
            raise ParameterError("noise.sigma must be a magnetic field (rms)")
        if self.sigma.value < 0:
            raise ParameterError("noise.sigma must be >= 0")
        if self.tau_c is None or self.tau_c.dimension is not Dimension.TIME:
            raise ParameterError("noise.tau_c must be a time")
        if self.tau_c.value <= 0:
            raise ParameterError("noise.tau_c must be > 0")


def spectral_density_curve(model: NoiseModel, omega_rad_s: np.ndarray) -> np.ndarray:
    """Vectorized S(omega) in T^2/Hz; S is even, so |omega| is used."""
    w = np.abs(np.asarray(omega_rad_s, dtype=float))
    if model.kind is NoiseKind.ORNSTEIN_UHLENBECK:
        s, tc = model.sigma.value, model.tau_c.value
        return 2.0 * s**2 * tc / (1.0 + (w * tc) ** 2)
    if model.kind is NoiseKind.BAND_LIMITED_WHITE:
        s, tc = model.sigma.value, model.tau_c.value
        s0 = math.pi * s**2 * tc
        return np.where(w <= 1.0 / tc, s0, 0.0)
    t = model.table
    if np.any(w < t[0, 0]) or np.any(w > t[-1, 0]):
        raise NoiseError(
            f"tabulated spectral density queried outside "
            f"[{t[0, 0]:g}, {t[-1, 0]:g}] rad/s"
        )
    with np.errstate(divide="ignore"):
        logs = np.interp(np.log(w), np.log(t[:, 0]), np.log(np.maximum(t[:, 1], 1e-300)))
    return np.exp(logs)


def spectral_density(model: NoiseModel, omega: Quantity) -> Quantity:
    if omega.dimension is not Dimension.ANGULAR_FREQUENCY:
        raise ParameterError("omega must be an angular frequency")
    val = float(spectral_density_curve(model, np.array([omega.value]))[0])
    return Quantity(val, Dimension.SPECTRAL_DENSITY_B)


def coupling_mu(species: AtomSpecies, dressed_pair: tuple[DressedState, DressedState]) -> Quantity:
    """Noise matrix element <phi_minus| mu_z |phi_plus> between branch states."""
    plus, minus = dressed_pair
    if plus.bare_m != minus.bare_m:
        raise ParameterError("dressed pair must share a bare basis")
    g = species.lande_g
    val_au = sum(
        bm.conjugate() * bp * (-g * m * MU_B_AU)
        for bm, bp, m in zip(minus.amplitudes, plus.amplitudes, plus.bare_m)
    )
    return Quantity(float(val_au.real) * 2.0 * BOHR_MAGNETON_SI, Dimension.MAGNETIC_MOMENT)


def dressed_gap(p: LatticeParams) -> Quantity:
    """Branch splitting at the well bottoms: the intersite barrier alpha/(5 sqrt 3).

    A property of the optimized lattice, so the configured Raman detuning is
    snapped to the pair-A optimum before reading the barrier.
    """
    popt = p.with_delta(p.optimal_delta(CoupledPair.PAIR_A))
    barrier = well_geometry(popt).barrier
    return Quantity(barrier.value / HBAR_SI, Dimension.ANGULAR_FREQUENCY)


def tau1(mu: Quantity, model: NoiseModel, gap: Quantity) -> Quantity:
    """Primary excitation time 1 / ((mu/hbar)^2 S(gap))."""
    if mu.dimension is not Dimension.MAGNETIC_MOMENT:
        raise ParameterError("mu must be a magnetic moment")
    s = spectral_density(model, gap).value
    if s <= 0.0:
        raise NoiseError(
            "spectral density vanishes at the gap: tau1 is infinite "
            "(no noise power at the transition)"
        )
    rate = (mu.value / HBAR_SI) ** 2 * s
    return Quantity(1.0 / rate, Dimension.TIME)


class ExcitationProbability(NamedTuple):
    p: float
    perturbative: bool


def excitation_probability(t: Quantity, tau_1: Quantity) -> ExcitationProbability:
    """Short-time linear law p = t/tau1, clamped at 1 with a validity flag."""
    if t.dimension is not Dimension.TIME or t.value < 0:
        raise ParameterError("t must be a nonnegative time")
    if tau_1.dimension is not Dimension.TIME or tau_1.value <= 0:
        raise ParameterError("tau_1 must be a positive time")
    raw = t.value / tau_1.value
    if raw > 0.1:
        warnings.warn(
            f"p(t) = {raw:.3g} exceeds the perturbative window (p <= 0.1)", stacklevel=2
        )
    return ExcitationProbability(p=min(raw, 1.0), perturbative=raw <= 0.1)


def _ou_realization(
    sigma: float, tau_c: float, dt: float, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Exact stationary AR(1) update of the OU process."""
    a = math.exp(-dt / tau_c)
    innov = sigma * math.sqrt(1.0 - a * a)
    xi = rng.standard_normal(n)
    xi[0] = 0.0
    series = lfilter([1.0], [1.0, -a], innov * xi)
    powers = a ** np.arange(n)
    return series + powers * (sigma * rng.standard_normal())


def _blw_realization(
    sigma: float, tau_c: float, dt: float, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Band-limited white noise via spectral synthesis on the FFT grid."""
    freqs = 2.0 * math.pi * np.fft.rfftfreq(n, d=dt)
    s0 = math.pi * sigma**2 * tau_c
    s_vals = np.where(freqs <= 1.0 / tau_c, s0, 0.0)
    # bin variance: S(omega) * N / (2 dt) split over real/imag parts
    scale = np.sqrt(s_vals * n / (2.0 * dt))
    spec = scale * (rng.standard_normal(freqs.size) + 1j * rng.standard_normal(freqs.size))
    spec[0] = spec[0].real * math.sqrt(2.0)
    if n % 2 == 0:
        spec[-1] = spec[-1].real * math.sqrt(2.0)
    return np.fft.irfft(spec, n=n)


def noise_realization(model: NoiseModel, dt: Quantity, n_samples: int, seed: int) -> np.ndarray:
    """Stationary discrete realization B(t_j), j = 0..n_samples-1, in tesla.

    Deterministic for a fixed seed. The sampling step must resolve the
    correlation time: dt <= tau_c / 10.
    """
    if model.kind is NoiseKind.TABULATED:
        raise NoiseError("tabulated spectral densities are not synthesizable")
    if dt.dimension is not Dimension.TIME or dt.value <= 0:
        raise ParameterError("dt must be a positive time")
    if n_samples < 1:
        raise ParameterError("n_samples must be >= 1")
    tc = model.tau_c.value
    if dt.value > tc / 10.0:
        raise NoiseError(
            f"dt = {dt.value:g} s under-resolves the correlation time; need dt <= {tc / 10:g} s"
        )
    rng = np.random.default_rng(seed)
    if model.sigma.value == 0.0:
        return np.zeros(n_samples)
    if model.kind is NoiseKind.ORNSTEIN_UHLENBECK:
        return _ou_realization(model.sigma.value, tc, dt.value, n_samples, rng)
    return _blw_realization(model.sigma.value, tc, dt.value, n_samples, rng)


def _ou_paths(
    sigma: float, tau_c: float, dt: float, n_steps: int, seeds: list[np.random.SeedSequence]
) -> np.ndarray:
    """Column-per-realization OU paths on a half-step grid, shape (2*n_steps+1, n)."""
    m = 2 * n_steps + 1
    a = math.exp(-0.5 * dt / tau_c)
    innov = sigma * math.sqrt(1.0 - a * a)
    cols = np.empty((m, len(seeds)))
    for j, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        b0 = sigma * rng.standard_normal()
        xi = innov * rng.standard_normal(m)
        xi[0] = 0.0
        cols[:, j] = lfilter([1.0], [1.0, -a], xi) + a ** np.arange(m) * b0
    return cols


@dataclass(frozen=True)
class DecayCurve:
    """Ensemble-averaged primary-excitation probability vs time."""

    times_s: np.ndarray
    p_mean: np.ndarray
    p_stderr: np.ndarray
    n_ensemble: int

    def slope(self, fit_start_s: float | None = None) -> float:
        """Linear-fit slope of p(t) in 1/s, skipping the initial transient.

        The fit carries an intercept, so the O(tau_c) constant offset of
        the accumulated probability does not bias the estimated rate; the
        window should start once that offset has settled (a few
        correlation times). Defaults to dropping the first tenth.
        """
        t0 = 0.1 * self.times_s[-1] if fit_start_s is None else fit_start_s
        sel = self.times_s >= t0
        if int(np.sum(sel)) < 3:
            raise ParameterError("slope fit window contains fewer than 3 samples")
        coef = np.polyfit(self.times_s[sel], self.p_mean[sel], 1)
        return float(coef[0])


def monte_carlo_decoherence(
    p: LatticeParams,
    model: NoiseModel,
    t_final: Quantity,
    n_ensemble: int,
    seed: int,
    n_samples: int = 100,
    max_steps: int = 500_000,
) -> DecayCurve:
    """Stochastic two-amplitude integration of the noise-driven excitation.

    RK4 with step <= min(tau_c/20, 0.1/gap); the drive B(t) is an exact
    OU path sampled on the half-step grid (band-limited models synthesize
    on the same grid). Per-realization seeds spawn deterministically from
    the master seed and results are reduced in realization order, so the
    outcome is independent of any chunking or parallel schedule.
    """
    if model.kind is NoiseKind.TABULATED:
        raise NoiseError("tabulated spectral densities are not synthesizable")
    if t_final.dimension is not Dimension.TIME or t_final.value <= 0:
        raise ParameterError("t_final must be a positive time")
    if n_ensemble < 2:
        raise ParameterError("n_ensemble must be >= 2")
    gap = dressed_gap(p).value
    tc = model.tau_c.value
    if t_final.value < 10.0 * tc:
        warnings.warn("t_final below 10 correlation times; slope estimate biased", stacklevel=2)
    mu = coupling_mu(p.species, dressed_states(p.with_delta(p.optimal_delta(CoupledPair.PAIR_A)), CoupledPair.PAIR_A))
    mu_rate = mu.value / HBAR_SI  # rad/(s*T)
    expected_p = t_final.value * mu_rate**2 * spectral_density_curve(model, np.array([gap]))[0]
    if expected_p > 0.1:
        warnings.warn(
            f"expected p(t_final) = {expected_p:.3g} outside the perturbative window",
            stacklevel=2,
        )
    dt_cap = min(tc / 20.0, 0.1 / gap if gap > 0 else math.inf)
    n_steps = max(n_samples, math.ceil(t_final.value / dt_cap))
    n_steps = math.ceil(n_steps / n_samples) * n_samples  # align sampling
    if n_steps > max_steps:
        raise NoiseError(
            f"step constraints need {n_steps} steps (> budget {max_steps}); "
            "shorten t_final or relax the model"
        )
    dt = t_final.value / n_steps
    stride = n_steps // n_samples

    master = np.random.SeedSequence(seed)
    children = master.spawn(n_ensemble)
    p_samples = np.empty((n_samples + 1, n_ensemble))

    chunk = 250
    for start in range(0, n_ensemble, chunk):
        seeds = children[start : start + chunk]
        nreal = len(seeds)
        if model.kind is NoiseKind.ORNSTEIN_UHLENBECK:
            b = _ou_paths(model.sigma.value, tc, dt, n_steps, seeds)
        else:
            b = np.empty((2 * n_steps + 1, nreal))
            for j, ss in enumerate(seeds):
                rng = np.random.default_rng(ss)
                b[:, j] = _blw_realization(model.sigma.value, tc, dt / 2.0, 2 * n_steps + 1, rng)
        c_plus = np.ones(nreal, dtype=complex)
        c_minus = np.zeros(nreal, dtype=complex)
        p_samples[0, start : start + nreal] = 0.0
        sample_i = 1
        for step in range(n_steps):
            b0 = mu_rate * b[2 * step]
            bh = mu_rate * b[2 * step + 1]
            b1 = mu_rate * b[2 * step + 2]

            def deriv(cp, cm, bb):
                return -1j * bb * cm, -1j * (gap * cm + bb * cp)

            k1p, k1m = deriv(c_plus, c_minus, b0)
            k2p, k2m = deriv(c_plus + 0.5 * dt * k1p, c_minus + 0.5 * dt * k1m, bh)
            k3p, k3m = deriv(c_plus + 0.5 * dt * k2p, c_minus + 0.5 * dt * k2m, bh)
            k4p, k4m = deriv(c_plus + dt * k3p, c_minus + dt * k3m, b1)
            c_plus = c_plus + (dt / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)
            c_minus = c_minus + (dt / 6.0) * (k1m + 2 * k2m + 2 * k3m + k4m)
            if (step + 1) % stride == 0:
                p_samples[sample_i, start : start + nreal] = np.abs(c_minus) ** 2
                sample_i += 1

    times = np.linspace(0.0, t_final.value, n_samples + 1)
    p_mean = p_samples.mean(axis=1)
    p_stderr = p_samples.std(axis=1, ddof=1) / math.sqrt(n_ensemble)
    return DecayCurve(times_s=times, p_mean=p_mean, p_stderr=p_stderr, n_ensemble=n_ensemble)


def shielding_requirement(mu: Quantity, gap: Quantity, target_coherence: Quantity) -> float:
    """Noise-amplitude ceiling sqrt(S) = 1 / ((mu/hbar) sqrt(tau)), in T/sqrt(Hz).

    gap only records where the density must satisfy the bound; it does not
    enter the ceiling itself.
    """
    if mu.dimension is not Dimension.MAGNETIC_MOMENT:
        raise ParameterError("mu must be a magnetic moment")
    if gap.dimension is not Dimension.ANGULAR_FREQUENCY:
        raise ParameterError("gap must be an angular frequency")
    if target_coherence.dimension is not Dimension.TIME or target_coherence.value <= 0:
        raise ParameterError("target_coherence must be a positive time")
    mu_rate = abs(mu.value) / HBAR_SI
    return 1.0 / (mu_rate * math.sqrt(target_coherence.value))


@dataclass(frozen=True)
class DecoherenceReport:
    coupling_mu: Quantity
    gap: Quantity
    tau1: Quantity
    tau2: Quantity
    shielding_threshold: float  # T/sqrt(Hz)


def decoherence_report(
    p: LatticeParams, model: NoiseModel, target_coherence: Quantity | None = None
) -> DecoherenceReport:
    """Aggregate the two-step loss budget for the given lattice and noise."""
    if target_coherence is None:
        target_coherence = Quantity(10.0, Dimension.TIME)
    pa = p.with_delta(p.optimal_delta(CoupledPair.PAIR_A))
    mu = coupling_mu(p.species, dressed_states(pa, CoupledPair.PAIR_A))
    gap = dressed_gap(p)
    return DecoherenceReport(
        coupling_mu=mu,
        gap=gap,
        tau1=tau1(mu, model, gap),
        tau2=motional_tau2(p),
        shielding_threshold=shielding_requirement(mu, gap, target_coherence),
    )
