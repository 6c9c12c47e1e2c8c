"""Parameter and state data model, unit handling, and constructors for the
timed Dicke state and the collective (timed Dicke + subradiant) basis.

Internal unit conventions: gamma = 1 and group velocity v_g = 1 by default.
The guided-field amplitude chi is normalized so |chi_N|^2 is directly the
guided photon flux in units of gamma; the group velocity only ever enters
observables through this normalization and therefore cancels.

Atom positions and their propagation phase factors are a fixed gauge under
the unidirectional approximation and are dropped throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .errors import UnsupportedConfigurationError

__all__ = [
    "EnsembleParams",
    "StateSnapshot",
    "CollectiveBasis",
    "UnitSystem",
    "timed_dicke",
    "od",
    "atoms_for_od",
    "collective_basis",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class EnsembleParams:
    """Atom count, per-atom waveguide coupling fractions and decay rate.

    betas[n] is the fraction of the n-th atom's total emission rate
    (2*gamma) that goes into the guided mode; gamma is the amplitude decay
    rate (natural units gamma = 1).  gamma_hz, if given, is gamma/2pi in Hz
    and enables SI time columns in exports.
    """

    n_atoms: int
    betas: tuple[float, ...]
    gamma: float = 1.0
    gamma_hz: float | None = None

    def __post_init__(self) -> None:
        if self.n_atoms < 0:
            raise ValueError("n_atoms must be >= 0")
        if len(self.betas) != self.n_atoms:
            raise ValueError("betas must have length n_atoms")
        if any(not (0.0 < b <= 1.0) for b in self.betas):
            raise ValueError("each beta must lie in (0, 1]")
        if not (self.gamma > 0.0):
            raise ValueError("gamma must be positive")
        if self.gamma_hz is not None and not (self.gamma_hz > 0.0):
            raise ValueError("gamma_hz must be positive")

    @classmethod
    def uniform(
        cls,
        n_atoms: int,
        beta: float,
        gamma: float = 1.0,
        gamma_hz: float | None = None,
    ) -> "EnsembleParams":
        return cls(n_atoms=n_atoms, betas=(beta,) * n_atoms, gamma=gamma, gamma_hz=gamma_hz)

    @property
    def uniform_beta(self) -> bool:
        return self.n_atoms == 0 or all(b == self.betas[0] for b in self.betas)

    @property
    def beta(self) -> float:
        """The common coupling fraction (requires a uniform ensemble)."""
        if not self.uniform_beta:
            raise UnsupportedConfigurationError("ensemble has heterogeneous couplings")
        if self.n_atoms == 0:
            raise ValueError("empty ensemble has no beta")
        return self.betas[0]

    def units(self) -> "UnitSystem":
        return UnitSystem(gamma_hz=self.gamma_hz)


@dataclass(frozen=True)
class UnitSystem:
    """Natural units (gamma = 1, v_g = 1) with optional SI time labeling."""

    gamma_hz: float | None = None

    @property
    def mode(self) -> str:
        return "si" if self.gamma_hz is not None else "natural"

    def gamma_per_second(self) -> float:
        if self.gamma_hz is None:
            raise ValueError("gamma_hz not set")
        return TWO_PI * self.gamma_hz

    def to_ns(self, t_gamma) -> np.ndarray | float:
        """Convert time in units of 1/gamma to nanoseconds."""
        return np.asarray(t_gamma) / self.gamma_per_second() * 1e9

    def from_ns(self, t_ns) -> np.ndarray | float:
        return np.asarray(t_ns) * 1e-9 * self.gamma_per_second()


@dataclass(frozen=True)
class StateSnapshot:
    """Excited-state amplitudes and guided-field amplitudes at one instant.

    chis obeys chi_n = chi_{n-1} + sqrt(2 beta_n gamma)/i * phi_n with
    chi_0 the in-field at the first atom (0 for free decay).
    """

    time: float
    phis: np.ndarray
    chis: np.ndarray

    def __post_init__(self) -> None:
        phis = np.asarray(self.phis, dtype=complex)
        chis = np.asarray(self.chis, dtype=complex)
        object.__setattr__(self, "phis", phis)
        object.__setattr__(self, "chis", chis)
        if phis.shape != chis.shape or phis.ndim != 1:
            raise ValueError("phis and chis must be 1-d arrays of equal length")
        if float(np.sum(np.abs(phis) ** 2)) > 1.0 + 1e-9:
            raise ValueError("excited-state population exceeds the single-excitation sector")

    @property
    def population(self) -> float:
        return float(np.sum(np.abs(self.phis) ** 2))


def guided_field(params: EnsembleParams, phis: np.ndarray, chi_in: complex = 0.0) -> np.ndarray:
    """chi_n after each atom from the amplitude recursion (v_g = 1)."""
    phis = np.asarray(phis, dtype=complex)
    emit = np.sqrt(2.0 * np.asarray(params.betas) * params.gamma) / 1j
    return chi_in + np.cumsum(emit * phis)


def timed_dicke(params: EnsembleParams) -> StateSnapshot:
    """The equal-amplitude single-excitation state phi_n = 1/sqrt(N) at t=0."""
    if params.n_atoms < 1:
        raise ValueError("timed Dicke state requires at least one atom")
    phis = np.full(params.n_atoms, 1.0 / math.sqrt(params.n_atoms), dtype=complex)
    return StateSnapshot(time=0.0, phis=phis, chis=guided_field(params, phis))


def od(params: EnsembleParams) -> float:
    """Optical depth: -ln of the resonant power transmission.

    Uses the exact per-atom product, so heterogeneous ensembles have a
    well-defined OD.  Any beta_n = 1/2 makes the resonant transmission zero;
    the result is +inf (flag value, not an exception).
    """
    total = 0.0
    for b in params.betas:
        t_at = abs(1.0 - 2.0 * b)
        if t_at == 0.0:
            return math.inf
        total -= 2.0 * math.log(t_at)
    return total


def atoms_for_od(target_od: float, beta: float) -> int:
    """Smallest uniform-coupling atom number whose OD reaches target_od."""
    if not (0.0 < beta <= 1.0) or beta == 0.5:
        raise ValueError("beta must be in (0, 1] and != 1/2")
    if target_od <= 0.0:
        raise ValueError("target OD must be positive")
    per_atom = -2.0 * math.log(abs(1.0 - 2.0 * beta))
    if per_atom <= 0.0:
        raise ValueError("beta gives non-positive per-atom OD")
    n = math.ceil(target_od / per_atom - 1e-12)
    return max(n, 1)


@dataclass(frozen=True)
class CollectiveBasis:
    """Orthonormal single-excitation basis: timed Dicke plus subradiant states.

    vectors[0] is the timed Dicke vector; vectors[m] for m >= 1 is the m-th
    subradiant vector, realized by the freely decaying timed Dicke state at
    passage time times[m-1] (units 1/gamma).
    """

    vectors: np.ndarray
    times: tuple[float, ...]

    def __post_init__(self) -> None:
        vectors = np.asarray(self.vectors, dtype=complex)
        object.__setattr__(self, "vectors", vectors)
        n = vectors.shape[0]
        if vectors.shape != (n, n):
            raise ValueError("vectors must form a square matrix")
        if len(self.times) != n - 1:
            raise ValueError("need one passage time per subradiant vector")

    @property
    def n_atoms(self) -> int:
        return self.vectors.shape[0]

    def gram(self) -> np.ndarray:
        return self.vectors @ self.vectors.conj().T


def collective_basis(params: EnsembleParams) -> CollectiveBasis:
    """Timed Dicke vector plus the N-1 subradiant vectors.

    Requires uniform coupling (the closed-form evolution behind the
    subradiant vectors assumes a single beta).  Orthogonality of the result
    is a numerically verified property, not a proven one.
    """
    if params.n_atoms < 1:
        raise ValueError("basis requires at least one atom")
    if not params.uniform_beta:
        raise UnsupportedConfigurationError("collective basis requires uniform beta")
    n = params.n_atoms
    beta = params.beta
    roots = specfun.laguerre_roots(n - 1, 1)
    vectors = np.empty((n, n), dtype=complex)
    vectors[0] = 1.0 / math.sqrt(n)
    degrees = np.arange(n)
    for m, x in enumerate(roots, start=1):
        comps = np.array([specfun.laguerre(int(k), 0, x) for k in degrees])
        vectors[m] = comps / np.linalg.norm(comps)
    times = tuple(x / (2.0 * beta * params.gamma) for x in roots)
    return CollectiveBasis(vectors=vectors, times=times)
