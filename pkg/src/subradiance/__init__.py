"""Collective decay of waveguide-coupled two-level atoms in the
single-excitation regime.

The package offers two complementary engines that agree with each other:
closed-form time evolution for the timed Dicke state (generalized Laguerre
polynomials, with Bessel approximations for large weakly coupled ensembles),
and frequency-domain pulse propagation through the ensemble transmission
function.  Derived observables cover decay rates, super/subradiant basis
decomposition, subradiant passage detection, ring-resonator multi-pass
composition and homodyne interference.
"""

from .errors import ConfigError, GridError, SubradianceError, UnsupportedConfigurationError
from .model import (
    CollectiveBasis,
    EnsembleParams,
    StateSnapshot,
    UnitSystem,
    atoms_for_od,
    collective_basis,
    guided_field,
    od,
    timed_dicke,
)
from .analytic import (
    asymptotic_projections,
    chi_td,
    chi_td_bessel,
    gamma_ens_t0,
    phi_heaviside,
    phi_td,
    phi_td_bessel,
    subradiant_state,
    subradiant_times,
    timed_dicke_phis,
    weak_coupling_od,
)
from .spectral import (
    FrequencyGrid,
    atom_transmission,
    cumulative_transmissions,
    ensemble_transmission,
    phi_spectrum,
)
from .pulse import (
    AtomTraces,
    FieldTrace,
    HomodyneTrace,
    Pulse,
    TimeGrid,
    atom_snapshot,
    atom_traces,
    homodyne,
    passage_times,
    propagate,
    ring_roundtrips,
    sign_flips,
)
from .observables import (
    DecayRateTrace,
    DecompositionTrace,
    GammaLightTrace,
    decompose,
    decompose_from_arrays,
    gamma_ens,
    gamma_ens_from_arrays,
    gamma_light,
    gamma_light_from_arrays,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "GridError",
    "SubradianceError",
    "UnsupportedConfigurationError",
    "CollectiveBasis",
    "EnsembleParams",
    "StateSnapshot",
    "UnitSystem",
    "atoms_for_od",
    "collective_basis",
    "guided_field",
    "od",
    "timed_dicke",
    "asymptotic_projections",
    "chi_td",
    "chi_td_bessel",
    "gamma_ens_t0",
    "phi_heaviside",
    "phi_td",
    "phi_td_bessel",
    "subradiant_state",
    "subradiant_times",
    "timed_dicke_phis",
    "weak_coupling_od",
    "FrequencyGrid",
    "atom_transmission",
    "cumulative_transmissions",
    "ensemble_transmission",
    "phi_spectrum",
    "AtomTraces",
    "FieldTrace",
    "HomodyneTrace",
    "Pulse",
    "TimeGrid",
    "atom_snapshot",
    "atom_traces",
    "homodyne",
    "passage_times",
    "propagate",
    "ring_roundtrips",
    "sign_flips",
    "DecayRateTrace",
    "DecompositionTrace",
    "GammaLightTrace",
    "decompose",
    "decompose_from_arrays",
    "gamma_ens",
    "gamma_ens_from_arrays",
    "gamma_light",
    "gamma_light_from_arrays",
    "__version__",
]
