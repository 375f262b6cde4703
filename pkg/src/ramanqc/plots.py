"""Figure rendering for the CLI report paths.

Figures are written next to the CSV/JSON artifacts; they are a visual aid
and are not part of the byte-determinism contract the delimited outputs
carry.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGSIZE = (6.4, 4.0)
DPI = 150


def _finish(fig: plt.Figure, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def potentials_figure(
    path: Path, z_m: np.ndarray, u_plus_mhz: np.ndarray, u_minus_mhz: np.ndarray,
    minima_m: list[tuple[float, str]] | None = None,
) -> Path:
    fig, ax = plt.subplots(figsize=FIGSIZE)
    z_nm = z_m * 1e9
    ax.plot(z_nm, u_plus_mhz, label=r"$U_+(z)$", color="tab:blue")
    ax.plot(z_nm, u_minus_mhz, label=r"$U_-(z)$", color="tab:red")
    if minima_m:
        for zmin, branch in minima_m:
            color = "tab:blue" if branch == "plus" else "tab:red"
            ax.axvline(zmin * 1e9, color=color, alpha=0.25, lw=0.8)
    ax.set_xlabel("z (nm)")
    ax.set_ylabel("U / h (MHz)")
    ax.set_title("Branch potentials at the optimal detuning")
    ax.legend()
    return _finish(fig, path)


def pulse_figure(path: Path, t_s: np.ndarray, p_transfer: np.ndarray) -> Path:
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.plot(t_s * 1e3, p_transfer, color="tab:green")
    ax.set_xlabel("t (ms)")
    ax.set_ylabel("transfer probability")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("Microwave drive on the addressed transition")
    return _finish(fig, path)


def escape_figure(path: Path, t_s: np.ndarray, survival: np.ndarray, tau2_s: float) -> Path:
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.plot(t_s * 1e6, survival, color="tab:purple")
    ax.axvline(tau2_s * 1e6, color="gray", ls="--", lw=1, label=r"$\tau_2$")
    ax.axhline(1 / np.e, color="gray", ls=":", lw=1, label="1/e")
    ax.set_xlabel(r"t ($\mu$s)")
    ax.set_ylabel(r"survival $P_0(t)$")
    ax.set_title("Ground-state packet on the inverted well")
    ax.legend()
    return _finish(fig, path)


def noise_figure(
    path: Path,
    t_s: np.ndarray,
    p_mean: np.ndarray,
    p_stderr: np.ndarray,
    analytic_rate: float | None = None,
) -> Path:
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.errorbar(t_s, p_mean, yerr=p_stderr, fmt=".", ms=3, lw=0.8, color="tab:blue",
                label="Monte Carlo")
    if analytic_rate is not None:
        ax.plot(t_s, analytic_rate * t_s, color="tab:orange", lw=1.2,
                label=r"analytic $t/\tau_1$")
    ax.set_xlabel("t (s)")
    ax.set_ylabel("excitation probability")
    ax.set_title("Noise-driven branch excitation")
    ax.legend()
    return _finish(fig, path)
