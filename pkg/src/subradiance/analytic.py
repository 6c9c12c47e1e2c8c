"""Closed-form time evolution of the collectively decaying ensemble.

Covers the freely decaying timed Dicke state (Laguerre solutions), the
subradiant states and their passage times, the large-ensemble Bessel
approximations, and the step-pulse (Heaviside) closed forms for the first
four atoms.  All closed forms require uniform coupling.

Phase convention: the guided field carries the 1/i prefactor of the
amplitude recursion, so interference observables (homodyne) come out with
the correct sign; probability observables are phase independent.
"""

from __future__ import annotations

import math

import numpy as np

from . import specfun
from .errors import UnsupportedConfigurationError
from .model import EnsembleParams, collective_basis

__all__ = [
    "phi_td",
    "chi_td",
    "subradiant_times",
    "subradiant_state",
    "phi_td_bessel",
    "chi_td_bessel",
    "phi_heaviside",
    "gamma_ens_t0",
    "asymptotic_projections",
    "timed_dicke_phis",
    "weak_coupling_od",
]


def _require_uniform(params: EnsembleParams) -> float:
    if not params.uniform_beta:
        raise UnsupportedConfigurationError(
            "closed-form evolution requires uniform coupling; use the spectral path"
        )
    return params.beta


def _check_atom_index(n: int, params: EnsembleParams) -> None:
    if not (1 <= n <= params.n_atoms):
        raise ValueError(f"atom index {n} outside 1..{params.n_atoms}")


def phi_td(n: int, t, params: EnsembleParams):
    """Excited-state amplitude of atom n for a timed Dicke initial state.

    phi_n(t) = e^(-gamma t) L_{n-1}^(0)(2 beta gamma t) / sqrt(N); real by
    the chosen phase convention.  t may be scalar or array, in units 1/gamma.
    """
    beta = _require_uniform(params)
    _check_atom_index(n, params)
    g = params.gamma
    t = np.asarray(t, dtype=float) if np.ndim(t) else float(t)
    x = 2.0 * beta * g * np.asarray(t, dtype=float)
    val = np.exp(-g * np.asarray(t, dtype=float)) * specfun.laguerre(n - 1, 0, x)
    val = val / math.sqrt(params.n_atoms)
    return val if np.ndim(t) else float(val)


def chi_td(n: int, t, params: EnsembleParams):
    """Guided-field amplitude after atom n for a timed Dicke initial state.

    chi_n(t) = sqrt(2 beta gamma)/i * e^(-gamma t) L_{n-1}^(1)(2 beta gamma t)
    / sqrt(N), with v_g = 1 so |chi_N|^2 is the guided photon flux.
    """
    beta = _require_uniform(params)
    _check_atom_index(n, params)
    g = params.gamma
    ta = np.asarray(t, dtype=float)
    x = 2.0 * beta * g * ta
    pref = math.sqrt(2.0 * beta * g) / (1j * math.sqrt(params.n_atoms))
    val = pref * np.exp(-g * ta) * specfun.laguerre(n - 1, 1, x)
    return val if np.ndim(t) else complex(val)


def subradiant_times(params: EnsembleParams) -> tuple[float, ...]:
    """Passage times tau_m at which the guided emission vanishes (ascending)."""
    beta = _require_uniform(params)
    if params.n_atoms < 1:
        raise ValueError("need at least one atom")
    roots = specfun.laguerre_roots(params.n_atoms - 1, 1)
    scale = 2.0 * beta * params.gamma
    return tuple(x / scale for x in roots)


def subradiant_state(m: int, params: EnsembleParams) -> np.ndarray:
    """Unit-norm amplitude vector of the m-th subradiant state (1 <= m <= N-1).

    Components are proportional to phi_n(tau_m); their plain sum vanishes,
    which is exactly the condition of zero guided emission.
    """
    if not (1 <= m <= params.n_atoms - 1):
        raise ValueError(f"subradiant index {m} outside 1..{params.n_atoms - 1}")
    return collective_basis(params).vectors[m].copy()


def weak_coupling_od(params: EnsembleParams) -> float:
    """The weak-coupling optical depth 4 beta N used by the Bessel forms."""
    beta = _require_uniform(params)
    return 4.0 * beta * params.n_atoms


def phi_td_bessel(n: int, t, params: EnsembleParams):
    """Bessel-function approximation of phi_n(t), valid for N >> 1, beta << 1.

    phi_n ~ e^(-gamma t) J0(sqrt(2 gamma OD t (n-1)/N)) / sqrt(N) with
    OD = 4 beta N.  Exact for n = 1 at any coupling.
    """
    _check_atom_index(n, params)
    od_w = weak_coupling_od(params)
    g = params.gamma
    ta = np.asarray(t, dtype=float)
    arg = np.sqrt(2.0 * g * od_w * ta * (n - 1) / params.n_atoms)
    val = np.exp(-g * ta) * specfun.bessel_j(0, arg) / math.sqrt(params.n_atoms)
    return val if np.ndim(t) else float(val)


def chi_td_bessel(t, params: EnsembleParams):
    """Bessel-function approximation of the output field chi_N(t).

    chi_N ~ sqrt(OD)/(i sqrt(4 beta t)) e^(-gamma t) J1(sqrt(2 gamma OD t)),
    OD = 4 beta N, v_g = 1.  The t = 0 singularity is removable:
    chi_N(0) = -i OD sqrt(gamma/(8 beta)).
    """
    beta = _require_uniform(params)
    od_w = weak_coupling_od(params)
    g = params.gamma
    ta = np.asarray(t, dtype=float)
    s = np.sqrt(2.0 * g * od_w * ta)
    # J1(s)/s with its series limit at s = 0
    ratio = np.where(s > 1e-8, np.asarray(specfun.bessel_j(1, s)) / np.where(s > 0, s, 1.0), 0.5)
    val = (1.0 / 1j) * od_w * math.sqrt(g / (2.0 * beta)) * np.exp(-g * ta) * ratio
    return val if np.ndim(t) else complex(val)


def phi_heaviside(n: int, t, params: EnsembleParams):
    """Excited-state amplitude of atom n after a step pulse that switches off
    at t = 0 (drive on for all t < 0, ensemble in steady state at switch-off).

    Closed forms exist for n <= 4; the amplitude of atom n never depends on
    atoms behind it, so any N >= n is accepted.  Normalization: the drive
    strength is chosen so phi_1(0) = 1/sqrt(N).  The n = 3, 4 coefficients
    were validated against the Fourier-propagation path.
    """
    beta = _require_uniform(params)
    _check_atom_index(n, params)
    if n > 4:
        raise UnsupportedConfigurationError(
            "step-pulse closed forms cover atoms 1..4; use the spectral path"
        )
    g = params.gamma
    ta = np.asarray(t, dtype=float)
    gt = g * ta
    x = 2.0 * beta * gt
    b = beta
    if n == 1:
        poly = np.ones_like(ta)
    elif n == 2:
        poly = specfun.laguerre(1, 0, x) - 2.0 * b
    elif n == 3:
        poly = specfun.laguerre(2, 0, x) - 4.0 * b + 4.0 * b * b * (1.0 + gt)
    else:
        poly = (
            specfun.laguerre(3, 0, x)
            - 2.0 * b * (3.0 - 6.0 * b + 4.0 * b * b)
            + 4.0 * b * b * gt * (3.0 - 2.0 * b)
            - 4.0 * b**3 * gt * gt
        )
    val = np.exp(-gt) * poly / math.sqrt(params.n_atoms)
    return val if np.ndim(t) else float(val)


def gamma_ens_t0(params: EnsembleParams) -> float:
    """Initial ensemble decay rate of the timed Dicke state:
    2 gamma (N beta + 1 - beta); also the initial light decay rate."""
    beta = _require_uniform(params)
    return 2.0 * params.gamma * (params.n_atoms * beta + 1.0 - beta)


def asymptotic_projections(params: EnsembleParams) -> np.ndarray:
    """Late-time collective-basis weights of the residual excitation: 1/N each."""
    _require_uniform(params)
    n = params.n_atoms
    if n < 1:
        raise ValueError("need at least one atom")
    return np.full(n, 1.0 / n)


def timed_dicke_phis(params: EnsembleParams, times) -> np.ndarray:
    """All N excited-state amplitude traces of the free timed Dicke decay.

    Returns a real (N, len(times)) array; row n-1 equals phi_td(n, times).
    One recurrence sweep shared across atoms, O(N * len(times)).
    """
    beta = _require_uniform(params)
    if params.n_atoms < 1:
        raise ValueError("need at least one atom")
    g = params.gamma
    ta = np.asarray(times, dtype=float)
    x = 2.0 * beta * g * ta
    n = params.n_atoms
    rows = np.empty((n, ta.size), dtype=float)
    prev = np.ones_like(x)
    rows[0] = prev
    if n > 1:
        cur = 1.0 - x
        rows[1] = cur
        for k in range(1, n - 1):
            prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
            rows[k + 1] = cur
    rows *= np.exp(-g * ta) / math.sqrt(n)
    return rows
