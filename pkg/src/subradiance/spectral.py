"""Frequency-domain transfer functions of the waveguide-coupled ensemble:
single-atom and ensemble amplitude transmission and per-atom excitation
spectra, in the single-excitation (linear) regime.

Detunings are in units of gamma.  The per-atom transmission product is kept
general (heterogeneous couplings allowed); for uniform coupling it reduces
to the N-th power of the single-atom factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import EnsembleParams

__all__ = [
    "FrequencyGrid",
    "atom_transmission",
    "ensemble_transmission",
    "cumulative_transmissions",
    "phi_spectrum",
]


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform detuning grid, symmetric about zero.

    count is a power of two; detunings run from -span in steps of
    2*span/count (fftshift layout, so zero detuning is a grid point).
    """

    span: float
    count: int

    def __post_init__(self) -> None:
        if self.count < 2 or self.count & (self.count - 1):
            raise ValueError("count must be a power of two >= 2")
        if not (self.span > 0.0):
            raise ValueError("span must be positive")

    @property
    def spacing(self) -> float:
        return 2.0 * self.span / self.count

    @property
    def detunings(self) -> np.ndarray:
        return (np.arange(self.count) - self.count // 2) * self.spacing


def atom_transmission(delta, beta: float, gamma: float = 1.0):
    """Amplitude transmission of one atom: 1 - 2 beta gamma / (gamma + i delta)."""
    d = np.asarray(delta, dtype=float)
    val = 1.0 - 2.0 * beta * gamma / (gamma + 1j * d)
    return val if np.ndim(delta) else complex(val)


def ensemble_transmission(delta, params: EnsembleParams):
    """Amplitude transmission of the full ensemble (per-atom product).

    Independent of atom ordering; the N = 0 empty product is 1.
    """
    d = np.asarray(delta, dtype=float)
    if params.n_atoms == 0:
        val = np.ones_like(d, dtype=complex)
    elif params.uniform_beta:
        val = atom_transmission(d, params.betas[0], params.gamma) ** params.n_atoms
    else:
        lorentz = 2.0 * params.gamma / (params.gamma + 1j * d)
        val = np.ones_like(d, dtype=complex)
        for b in params.betas:
            val = val * (1.0 - b * lorentz)
    return val if np.ndim(delta) else complex(val)


def cumulative_transmissions(delta, params: EnsembleParams) -> np.ndarray:
    """t_n(delta) for n = 0..N as an (N+1, len(delta)) array (t_0 = 1)."""
    d = np.atleast_1d(np.asarray(delta, dtype=float))
    out = np.empty((params.n_atoms + 1, d.size), dtype=complex)
    out[0] = 1.0
    lorentz = 2.0 * params.gamma / (params.gamma + 1j * d)
    for n, b in enumerate(params.betas, start=1):
        out[n] = out[n - 1] * (1.0 - b * lorentz)
    return out


def phi_spectrum(n: int, delta, params: EnsembleParams):
    """Excitation amplitude spectrum of atom n for unit flat drive.

    phi_n(delta) = i (t_n - t_{n-1}) / sqrt(2 beta_n gamma), with t_0 = 1.
    The 1/sqrt(2 beta_n gamma) normalization (rather than 1/sqrt(beta_n
    gamma)) is fixed by requiring that the inverse transform of a flat drive
    reproduce the closed-form free decay with the same overall scale as the
    output field; it also keeps the guided-field amplitude recursion exact:
    sum_n sqrt(2 beta_n gamma) (-i) phi_n(delta) = t_N(delta) - 1.
    """
    if not (1 <= n <= params.n_atoms):
        raise ValueError(f"atom index {n} outside 1..{params.n_atoms}")
    d = np.asarray(delta, dtype=float)
    cum = cumulative_transmissions(d, params)
    pref = 1j / math.sqrt(2.0 * params.betas[n - 1] * params.gamma)
    val = pref * (cum[n] - cum[n - 1])
    val = val.reshape(d.shape) if np.ndim(delta) else complex(val[0])
    return val
