"""Derived observables: ensemble and light decay rates, and the decomposition
of the stored excitation onto the collective (superradiant/subradiant) basis.

The ensemble rate and the light rate are computed independently; inferring one
from the other is only valid for the timed Dicke state and is deliberately not
offered.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedConfigurationError
from .model import CollectiveBasis, EnsembleParams
from .pulse import AtomTraces, FieldTrace

__all__ = [
    "DecayRateTrace",
    "GammaLightTrace",
    "DecompositionTrace",
    "gamma_ens",
    "gamma_ens_from_arrays",
    "gamma_light",
    "gamma_light_from_arrays",
    "decompose",
    "decompose_from_arrays",
]

_POPULATION_FLOOR = 1e-12
_LIGHT_MASK_FLOOR = 1e-10


@dataclass(frozen=True)
class DecayRateTrace:
    """Instantaneous decay rates of the stored excitation (units of gamma).

    gamma_ens = gamma_fs + gamma_ens_wg pointwise; `truncated` is set when
    trailing samples were dropped because the population underflowed.
    """

    times: np.ndarray
    gamma_ens: np.ndarray
    gamma_ens_wg: np.ndarray
    gamma_fs: float
    truncated: bool = False


@dataclass(frozen=True)
class GammaLightTrace:
    """Negative log-derivative of the normalized guided power; `mask` marks
    samples near zeros of the field where the rate diverges."""

    times: np.ndarray
    values: np.ndarray
    mask: np.ndarray


@dataclass(frozen=True)
class DecompositionTrace:
    """Normalized squared overlaps with each collective basis vector.

    projections[t, k] is the share of the residual atomic excitation held by
    basis vector k; rows sum to one while the population is resolvable.
    """

    times: np.ndarray
    projections: np.ndarray
    truncated: bool = False


def _window(times: np.ndarray, t_min: float | None, t_max: float | None) -> np.ndarray:
    sel = np.ones(times.shape, dtype=bool)
    if t_min is not None:
        sel &= times >= t_min
    if t_max is not None:
        sel &= times <= t_max
    return sel


def _complete_rows(traces: AtomTraces) -> EnsembleParams:
    params = traces.params
    if params is None:
        raise ValueError("traces carry no ensemble parameters")
    if traces.atom_indices != tuple(range(1, params.n_atoms + 1)):
        raise ValueError("decay rates require traces for every atom in order")
    return params


def gamma_ens_from_arrays(
    times: np.ndarray, phis: np.ndarray, params: EnsembleParams
) -> DecayRateTrace:
    """Decay rates from amplitude rows phis[n-1, t] on an arbitrary time grid.

    The total rate is the central-difference logarithmic derivative of the
    summed population; the guided part is computed independently as the flux
    |chi_N|^2 carried by the accumulated field, divided by the population.
    """
    if not params.uniform_beta:
        raise UnsupportedConfigurationError("decay-rate traces require uniform beta")
    beta = params.beta
    times = np.asarray(times, dtype=float)
    pop = np.sum(np.abs(phis) ** 2, axis=0)
    scale = float(np.max(pop)) if pop.size else 0.0
    keep = pop > _POPULATION_FLOOR * max(scale, 1.0)
    truncated = not bool(np.all(keep))
    if truncated:
        last = int(np.nonzero(keep)[0][-1]) + 1
        times, pop, phis = times[:last], pop[:last], phis[:, :last]
    couplings = np.sqrt(2.0 * params.gamma * np.asarray(params.betas))
    chi = np.sum((couplings / 1j)[:, None] * phis, axis=0)
    g_ens = -np.gradient(pop, times, edge_order=2) / pop
    g_wg = np.abs(chi) ** 2 / pop
    g_fs = (1.0 - beta) * 2.0 * params.gamma
    return DecayRateTrace(times=times, gamma_ens=g_ens, gamma_ens_wg=g_wg,
                          gamma_fs=g_fs, truncated=truncated)


def gamma_ens(traces: AtomTraces, t_min: float | None = 0.0,
              t_max: float | None = None) -> DecayRateTrace:
    """Decay rates from numeric atom traces, restricted to the free-decay
    window (default: everything after the drive switch-off at t = 0)."""
    params = _complete_rows(traces)
    sel = _window(traces.grid.times, t_min, t_max)
    return gamma_ens_from_arrays(traces.grid.times[sel], traces.phis[:, sel], params)


def gamma_light_from_arrays(times: np.ndarray, power: np.ndarray) -> GammaLightTrace:
    """Light decay rate -d/dt log(P(t)/P(0)) with divergent samples masked."""
    times = np.asarray(times, dtype=float)
    power = np.asarray(power, dtype=float)
    scale = float(np.max(power)) if power.size else 0.0
    mask = power < _LIGHT_MASK_FLOOR * max(scale, 1e-300)
    safe = np.where(mask, 1.0, power)
    values = -np.gradient(np.log(safe), times, edge_order=2)
    # the derivative stencil touches masked neighbours; widen the mask by one
    wide = mask.copy()
    wide[1:] |= mask[:-1]
    wide[:-1] |= mask[1:]
    values[wide] = np.nan
    return GammaLightTrace(times=times, values=values, mask=wide)


def gamma_light(field: FieldTrace, t_min: float | None = 0.0,
                t_max: float | None = None) -> GammaLightTrace:
    sel = _window(field.grid.times, t_min, t_max)
    return gamma_light_from_arrays(field.grid.times[sel], field.power[sel])


def decompose_from_arrays(times: np.ndarray, phis: np.ndarray,
                          basis: CollectiveBasis) -> DecompositionTrace:
    """projections[t, k] = |<v_k, phi(t)>|^2 / sum_n |phi_n(t)|^2."""
    times = np.asarray(times, dtype=float)
    pop = np.sum(np.abs(phis) ** 2, axis=0)
    scale = float(np.max(pop)) if pop.size else 0.0
    keep = pop > _POPULATION_FLOOR * max(scale, 1.0)
    truncated = not bool(np.all(keep))
    if truncated:
        last = int(np.nonzero(keep)[0][-1]) + 1
        times, pop, phis = times[:last], pop[:last], phis[:, :last]
    overlaps = np.conj(basis.vectors) @ phis
    projections = (np.abs(overlaps) ** 2 / pop).T
    return DecompositionTrace(times=times, projections=projections, truncated=truncated)


def decompose(traces: AtomTraces, basis: CollectiveBasis,
              t_min: float | None = 0.0, t_max: float | None = None) -> DecompositionTrace:
    params = _complete_rows(traces)
    if basis.vectors.shape[1] != params.n_atoms:
        raise ValueError("basis size does not match the ensemble")
    sel = _window(traces.grid.times, t_min, t_max)
    return decompose_from_arrays(traces.grid.times[sel], traces.phis[:, sel], basis)
