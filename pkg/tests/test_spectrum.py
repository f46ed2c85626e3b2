import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import preset_drive
from majorana_cf import (BandKernel, DriveSpec, Regularization, ResponseSpectrum, assemble_response,
                         compare_peaks, damped_transform, find_peaks, propagate)
from majorana_cf.spectrum import DecayGuardError, Peak, PeakReport, damped_fourier, minimal_window

GAMMA = 0.05
FREE = DriveSpec(0.0, 0.0, 1.0, 0.0)


def synthetic(grid, values):
    return ResponseSpectrum(grid, values, 0, GAMMA, 0, DriveSpec.monochromatic(1.0, 0.0, 1.0))


def lorentz(grid, centre, width):
    return 1.0 / (width - 1j * (grid - centre))


def test_constant_trace_transform():
    T = 1.05 * minimal_window(GAMMA)
    dt = 0.01
    tr = propagate(FREE, dt, int(T / dt))
    assert np.all(tr.correlator == 1.0)
    grid = np.linspace(0.0, 3.0, 301)
    spec = damped_transform(tr, GAMMA, grid)
    z = 1j * grid - GAMMA
    exact = (np.exp(z * tr.window) - 1) / z
    assert np.max(np.abs(spec.values - exact)) < 1e-4
    assert np.allclose(spec.magnitude, 1 / np.abs(GAMMA - 1j * grid), rtol=2e-4)
    assert np.argmax(spec.magnitude) == 0
    assert spec.method_tag == "time_domain" and spec.b_values is None


def test_decay_guard():
    tr = propagate(FREE, 0.01, 1000)
    with pytest.raises(DecayGuardError) as err:
        damped_transform(tr, GAMMA, [0.0, 1.0])
    assert err.value.minimal == pytest.approx(np.log(1e4) / GAMMA)
    with pytest.raises(ValueError):
        damped_transform(tr, 0.0, [0.0, 1.0])


def test_cosine_trace_peak():
    dt, omega = 0.01, 2.345
    t = dt * np.arange(int(1.05 * minimal_window(GAMMA) / dt))
    grid = np.linspace(0.0, 5.0, 501)
    vals = damped_fourier(np.cos(omega * t), dt, GAMMA, grid)
    assert abs(grid[np.argmax(np.abs(vals))] - omega) <= grid[1] - grid[0]


def test_fast_path_matches_direct_sum():
    rng = np.random.default_rng(5)
    x = rng.normal(size=3000)
    grid = np.linspace(0.1, 7.0, 130)
    fast = damped_fourier(x, 0.02, 0.1, grid, t0=0.3)
    jitter = grid + np.r_[0.0, 1e-7 * np.ones(grid.size - 1)]
    slow = damped_fourier(x, 0.02, 0.1, jitter, t0=0.3)
    t = 0.3 + 0.02 * np.arange(x.size)
    w = np.full(x.size, 0.02)
    w[[0, -1]] = 0.01
    direct = np.exp(1j * np.outer(grid, t)) @ (x * np.exp(-0.1 * t) * w)
    assert np.allclose(fast, direct, rtol=0, atol=1e-10)
    assert np.allclose(slow, direct, rtol=0, atol=1e-5)


@settings(max_examples=25)
@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2**31))
def test_transform_linearity(a, b, seed):
    rng = np.random.default_rng(seed)
    f, g = rng.normal(size=(2, 2000))
    grid = np.linspace(0.0, 6.0, 97)
    lhs = damped_fourier(a * f + b * g, 0.01, 0.2, grid)
    rhs = a * damped_fourier(f, 0.01, 0.2, grid) + b * damped_fourier(g, 0.01, 0.2, grid)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(lhs)))


def test_monotone_spectrum_has_no_peaks():
    grid = np.linspace(0.0, 10.0, 400)
    rep = find_peaks(synthetic(grid, np.exp(-grid)), 0.05)
    assert rep.peaks == []


def test_single_lorentzian():
    grid = np.linspace(0.0, 10.0, 1000)
    centre = 3.21234
    rep = find_peaks(synthetic(grid, lorentz(grid, centre, GAMMA)), 0.05)
    assert len(rep.peaks) == 1
    assert abs(rep.peaks[0].omega_over_delta - centre) <= 0.5 * (grid[1] - grid[0])


def test_two_lorentzians():
    grid = np.linspace(0.0, 10.0, 4000)
    vals = lorentz(grid, 4.0, GAMMA) + lorentz(grid, 4.0 + 10 * GAMMA, GAMMA)
    rep = find_peaks(synthetic(grid, vals), 0.05)
    assert len(rep.peaks) == 2
    assert rep.positions.tolist() == sorted(rep.positions.tolist())
    assert all(p.prominence > rep.threshold for p in rep.peaks)


def test_find_peaks_arguments():
    grid = np.linspace(0.0, 10.0, 100)
    spec = synthetic(grid, lorentz(grid, 5.0, GAMMA))
    with pytest.raises(ValueError):
        find_peaks(spec, 0.05, window=(20.0, 30.0))
    with pytest.raises(ValueError):
        find_peaks(spec, 0.0)
    rep = find_peaks(spec, 1.0, relative=False)
    assert rep.rel_threshold is None and rep.threshold == 1.0


def report(pos, rel=0.05, prom=1.0):
    return PeakReport([Peak(p, 1.0, prom) for p in pos], "x", (0.0, 10.0), rel, rel)


def test_compare_identical():
    m = compare_peaks(report([1.0, 2.5, 7.0]), report([1.0, 2.5, 7.0]), 0.05)
    assert m.success and len(m.pairs) == 3 and m.max_offset == 0.0


def test_compare_shifted_half_tolerance():
    m = compare_peaks(report([1.0, 2.5]), report([1.025, 2.475]), 0.05)
    assert m.success and m.max_offset == pytest.approx(0.025)


def test_compare_extra_low_prominence_peak():
    dominant = report([1.0, 4.0], rel=0.05)
    weak = report([1.01, 2.0, 4.02], rel=0.01)
    m = compare_peaks(dominant, weak, 0.05)
    assert m.success and [p.omega_over_delta for p in m.unmatched_b] == [2.0]
    m = compare_peaks(report([1.0, 2.0, 4.0], rel=0.05), report([1.0, 4.0], rel=0.01), 0.05)
    assert not m.success and [p.omega_over_delta for p in m.unmatched_a] == [2.0]
    m = compare_peaks(report([1.0, 4.0]), report([1.0, 2.0, 4.0]), 0.05)
    assert not m.success


def test_compare_greedy_nearest():
    m = compare_peaks(report([1.0, 1.04]), report([1.03]), 0.05)
    assert m.pairs[0][0].omega_over_delta == 1.04
    assert [p.omega_over_delta for p in m.unmatched_a] == [1.0]


def test_compare_window_mismatch():
    other = PeakReport([], "x", (0.0, 5.0), 0.05, 0.05)
    with pytest.raises(ValueError):
        compare_peaks(report([1.0]), other, 0.05)


@pytest.mark.parametrize("name", ["figure5-a", "figure5-b", "figure5-c"])
def test_grid_refinement_stability(name):
    k = BandKernel(preset_drive(name), Regularization(0.01))
    coarse = np.linspace(0.0, 10.0, 2000)
    fine = np.linspace(0.0, 10.0, 3999)
    pc = find_peaks(assemble_response(k, coarse), 0.05).positions
    pf = find_peaks(assemble_response(k, fine), 0.05).positions
    assert pc.size == pf.size
    assert np.max(np.abs(pc - pf)) < 0.5 * (coarse[1] - coarse[0])
