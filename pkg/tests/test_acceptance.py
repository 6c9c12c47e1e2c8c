"""Acceptance suite: one test per numbered acceptance criterion.

Each test pins the published tolerance; nothing here is tuned to pass.
Criteria that the implementation genuinely does not meet are left to fail
(see the decisions ledger in the project notes for the analyses).
"""

import math
import time

import numpy as np
import pytest
import scipy.integrate

from subradiance.analytic import (
    chi_td,
    gamma_ens_t0,
    phi_td,
    phi_td_bessel,
    subradiant_state,
    subradiant_times,
    timed_dicke_phis,
)
from subradiance.model import EnsembleParams, atoms_for_od, collective_basis
from subradiance.observables import decompose_from_arrays, gamma_ens_from_arrays
from subradiance.pulse import (
    Pulse,
    TimeGrid,
    atom_traces,
    decay_window,
    homodyne,
    passage_times,
    propagate,
    ring_roundtrips,
    sign_flips,
)
from subradiance.specfun import bessel_j, bessel_j1_zeros, laguerre_leading_roots

NS = 2 * math.pi * 2.6e6 * 1e-9  # 1 ns in units of 1/gamma at gamma/2pi = 2.6 MHz


def fine_grid() -> TimeGrid:
    base = TimeGrid.default()
    return TimeGrid(dt=base.dt / 4.0, count=2**20, origin=2**19)


def test_criterion_01_analytic_spectral_equivalence():
    started = time.monotonic()
    grid = TimeGrid.default()
    for n_atoms in (1, 2, 4, 10, 20):
        for beta in (0.1, 0.4, 0.9):
            params = EnsembleParams.uniform(n_atoms, beta)
            scale = -1j * math.sqrt(2.0 * beta * n_atoms)  # delta-drive amplitude
            keep = (grid.times > 0.0) & (grid.times <= 10.0)
            t = grid.times[keep]
            traces = atom_traces(Pulse(shape="delta"), params, grid)
            for n in range(1, n_atoms + 1):
                ref = phi_td(n, t, params) * scale
                err = np.max(np.abs(traces.phis[n - 1, keep] - ref))
                assert err / np.max(np.abs(ref)) < 1e-6, (n_atoms, beta, n)
            out = propagate(Pulse(shape="delta"), params, grid)
            ref = chi_td(n_atoms, t, params) * scale
            err = np.max(np.abs(out.samples[keep] - ref))
            assert err / np.max(np.abs(ref)) < 1e-6, (n_atoms, beta)
    assert time.monotonic() - started < 10.0


def test_criterion_02_subradiant_zeros_and_minimum_rate():
    params = EnsembleParams.uniform(4, 0.4)
    taus = subradiant_times(params)
    assert len(taus) == 3
    for tau in taus:
        assert abs(chi_td(4, tau, params)) < 1e-10
        local = np.arange(tau - 5e-4, tau + 5e-4, 1e-6)
        phis = timed_dicke_phis(params, local).astype(complex)
        trace = gamma_ens_from_arrays(local, phis, params)
        idx = int(np.argmin(np.abs(trace.times - tau)))
        assert trace.gamma_ens[idx] == pytest.approx(1.2, abs=1e-6)


def test_criterion_03_superradiant_onset():
    params = EnsembleParams.uniform(4, 0.4)
    expected = 2.0 * (4 * 0.4 + 1 - 0.4)
    assert gamma_ens_t0(params) == pytest.approx(4.4, rel=1e-12)
    h = 1e-6
    pop = lambda t: sum(phi_td(n, t, params) ** 2 for n in range(1, 5))
    flux = lambda t: abs(chi_td(4, t, params)) ** 2
    gamma_ens0 = -(-3 * math.log(pop(0.0)) + 4 * math.log(pop(h)) - math.log(pop(2 * h))) / (2 * h)
    gamma_light0 = -(-3 * math.log(flux(0.0)) + 4 * math.log(flux(h)) - math.log(flux(2 * h))) / (2 * h)
    assert gamma_ens0 == pytest.approx(expected, abs=1e-4)
    assert gamma_light0 == pytest.approx(expected, abs=1e-4)


def test_criterion_04_orthogonality_at_scale():
    started = time.monotonic()
    for n in (2, 10, 50, 200):
        basis = collective_basis(EnsembleParams.uniform(n, 0.3))
        gram = basis.gram()
        off = gram - np.diag(np.diag(gram))
        assert np.max(np.abs(off)) < 1e-8, n
    assert time.monotonic() - started < 30.0


def test_criterion_05_asymptotic_decomposition():
    # Pinned tolerance 1e-3 at 2*beta*gamma*t = 3*x_{N-1}.  The projections
    # approach 1/N only algebraically, so this criterion fails; the residual
    # deviations are reported in the assertion message.
    beta = 0.4
    failures = []
    for n in (2, 4, 10):
        params = EnsembleParams.uniform(n, beta)
        basis = collective_basis(params)
        t_star = 3.0 * max(basis.times)  # = 3 x_{N-1} / (2 beta gamma)
        times = np.array([t_star])
        phis = timed_dicke_phis(params, times) * np.exp(times)  # decay factored out
        trace = decompose_from_arrays(times, phis.astype(complex), basis)
        deviation = float(np.max(np.abs(trace.projections[0] - 1.0 / n)))
        if deviation >= 1e-3:
            failures.append((n, deviation))
    assert not failures, f"projection deviations from 1/N exceed 1e-3: {failures}"


def test_criterion_06_bessel_approximation_quality():
    params = EnsembleParams.uniform(20, 0.05)
    taus = subradiant_times(params)

    def rms(m: int) -> float:
        exact = np.real(subradiant_state(m, params))
        approx = np.array([phi_td_bessel(n, taus[m - 1], params) for n in range(1, 21)])
        approx = approx / np.linalg.norm(approx)
        if np.dot(exact, approx) < 0:
            approx = -approx
        return float(np.sqrt(np.mean((exact - approx) ** 2)))

    rms1, rms2, rms10 = rms(1), rms(2), rms(10)
    assert rms10 > rms1  # monotone degradation for m comparable to N
    assert rms1 < 0.02, f"m=1 RMS deviation {rms1:.4f}"
    assert rms2 < 0.02, f"m=2 RMS deviation {rms2:.4f}"


def test_criterion_07_experimental_power_minima():
    started = time.monotonic()
    params = EnsembleParams.uniform(atoms_for_od(31.0, 0.0055), 0.0055)
    pulse = Pulse(shape="boxcar", duration=100.0 * NS)
    out = propagate(pulse, params, fine_grid())
    minima = [t / NS for t in passage_times(out, count=2)]
    elapsed = time.monotonic() - started
    assert len(minima) == 2
    assert elapsed < 5.0
    assert 30.6 - 1.5 < minima[1] < 30.6 + 1.5, f"second minimum at {minima[1]:.3f} ns"
    assert 6.1 - 0.5 < minima[0] < 6.1 + 0.5, f"first minimum at {minima[0]:.3f} ns"


def test_criterion_08_beta_independence_at_fixed_od():
    # Sweep points chosen to be exactly representable for both couplings
    # under the weak-coupling inversion N = OD / (4 beta).
    ods = (10.4, 16.0, 24.0, 32.0, 42.4, 52.0, 62.4)
    times = {}
    for beta in (0.0055, 0.2):
        rows = []
        for od_target in ods:
            n = max(2, round(od_target / (4.0 * beta)))
            roots = laguerre_leading_roots(n - 1, 3)
            rows.append([x / (2.0 * beta) for x in roots])
        times[beta] = np.array(rows)
    rel = np.abs(times[0.2] - times[0.0055]) / times[0.0055]
    assert np.max(rel) < 0.03, f"max relative disagreement {np.max(rel):.4f}"


def test_criterion_09_detuning_washout():
    params = EnsembleParams.uniform(atoms_for_od(28.0, 0.0055), 0.0055)
    grid = TimeGrid.default()
    depths = []
    for detuning in (0.0, 1.1, 2.3, 4.6):
        pulse = Pulse(shape="boxcar", duration=100.0 * NS, carrier_detuning=detuning)
        out = propagate(pulse, params, grid)
        window = (grid.times > 0.0) & (grid.times < 15.0 * NS)
        power = np.abs(out.samples[window]) ** 2
        interior = np.flatnonzero((power[1:-1] < power[:-2]) & (power[1:-1] < power[2:]))
        if len(interior):
            i_min = int(interior[0]) + 1
            peak = float(np.max(power[:i_min]))
            depths.append(1.0 - float(power[i_min]) / peak)
        else:
            depths.append(0.0)  # the first minimum has washed out entirely
    assert all(b < a for a, b in zip(depths, depths[1:])), depths


def test_criterion_10_ring_equivalence_and_homodyne_flips():
    single = EnsembleParams.uniform(950, 0.0055)  # OD_sp = 21
    triple = EnsembleParams.uniform(2850, 0.0055)  # OD = 63
    grid = TimeGrid.default()
    pulse = Pulse(shape="boxcar", duration=110.0 * NS)
    ring = ring_roundtrips(pulse, single, 3, grid)
    direct = propagate(pulse, triple, grid)
    assert np.max(np.abs(ring.samples - direct.samples)) < 1e-12
    lo = Pulse(shape="boxcar", duration=240.0 * NS, amplitude=1.0, start=-60.0 * NS)
    result = homodyne(ring, lo, relative_phase=math.pi)
    _, decay_end = decay_window(ring)
    lo_end = 180.0 * NS
    flips = sign_flips(result.in_phase, grid.times, 0.0, min(lo_end, decay_end))
    assert flips == 3


def test_criterion_11_energy_continuity():
    params = EnsembleParams.uniform(10, 0.3)
    times = np.arange(0.0, 5.0, 5e-5)
    phis = timed_dicke_phis(params, times)
    pop = np.sum(np.abs(phis) ** 2, axis=0)
    flux = np.abs(chi_td(10, times, params)) ** 2
    residual = np.gradient(pop, times, edge_order=2) + (1 - 0.3) * 2.0 * pop + flux
    assert np.max(np.abs(residual)) < 1e-6


def test_criterion_12_bessel_overlap_closed_form():
    n_scale = 10.0
    zeros = bessel_j1_zeros(5).values
    for i, x_i in enumerate(zeros):
        for j, x_j in enumerate(zeros):
            quad, _ = scipy.integrate.quad(
                lambda xi: 2.0 * n_scale * xi * bessel_j(0, x_i * xi) * bessel_j(0, x_j * xi),
                0.0,
                1.0,
                epsabs=1e-12,
                limit=200,
            )
            if i == j:
                # diagonal limit of the closed form at J1 zeros
                closed = n_scale * (bessel_j(0, x_i) ** 2 + bessel_j(1, x_i) ** 2)
            else:
                closed = (
                    2.0
                    * n_scale
                    * (x_i * bessel_j(0, x_j) * bessel_j(1, x_i)
                       - x_j * bessel_j(0, x_i) * bessel_j(1, x_j))
                    / (x_i**2 - x_j**2)
                )
                assert abs(quad) < 1e-8  # cross terms vanish
            assert quad == pytest.approx(closed, abs=1e-8)
