"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import time

import numpy as np
import pytest

import closed_forms as cfm
from conftest import preset_drive, record
from majorana_cf import (BandKernel, BcsModel, DriveSpec, Regularization, analytic_delta_zero,
                         assemble_response, beta, cf_iterate, compare_peaks, damped_transform,
                         find_peaks, g_kernel_general, gap_residual, lattice_matrix_inverse,
                         propagate, solve_gap)
from majorana_cf.bcs import gap_integral
from majorana_cf.cli import PRESETS
from majorana_cf.oracle import default_dt
from majorana_cf.spectrum import minimal_window

GAMMA = 0.01


def _rel(a, b):
    return np.abs(a - b) / np.abs(b)


def test_ac1_rabi_consistency():
    t0 = time.perf_counter()
    grid = np.linspace(0.0, 10.0, 2000)
    bin_ = grid[1] - grid[0]
    worst = 0.0
    ok = True
    for eps in (0.5, 1.0, 4.0):
        d = DriveSpec.monochromatic(eps, 0.0, 1.0)
        om = d.rabi_frequency
        cf = assemble_response(BandKernel(d, Regularization(GAMMA)), grid)
        dt = default_dt(d)
        tr = propagate(d, dt, int(np.ceil(1.05 * minimal_window(GAMMA) / dt)))
        td = damped_transform(tr, GAMMA, grid)
        for spec in (cf, td):
            pos = find_peaks(spec, 0.05).positions
            off = np.min(np.abs(pos - om)) / bin_ if pos.size else np.inf
            worst = max(worst, off)
            ok &= off <= 1.0
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 5.0
    record("AC1", ok, f"max peak offset {worst:.3f} bins (limit 1), {elapsed:.2f} s (limit 5 s)")
    assert ok


def test_ac2_closed_form_regression():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20260415)
    errs = {"B1": 0.0, "C1": 0.0, "B2": 0.0, "C2": 0.0}
    for _ in range(50):
        eps, amp = rng.uniform(0.1, 4.0), rng.uniform(0.05, 2.5)
        w = rng.uniform(0.3, 4.0)
        om = rng.uniform(0.0, 10.0)
        k = BandKernel(DriveSpec.monochromatic(eps, amp, w), Regularization(GAMMA))
        B1, C1p, C1m = cf_iterate(k, om, 1)
        B2, C2p, C2m = cf_iterate(k, om, 2)
        errs["B1"] = max(errs["B1"], _rel(B1, cfm.b1(k, om)))
        errs["C1"] = max(errs["C1"], _rel(C1p, cfm.c1(k, om, 1)), _rel(C1m, cfm.c1(k, om, -1)))
        errs["B2"] = max(errs["B2"], _rel(B2, cfm.b2(k, om)))
        errs["C2"] = max(errs["C2"], _rel(C2p, cfm.c2(k, om, 1)), _rel(C2m, cfm.c2(k, om, -1)))
    elapsed = time.perf_counter() - t0
    ok = all(e < 1e-12 for e in errs.values()) and elapsed < 1.0
    detail = ", ".join(f"{k} {v:.2e}" for k, v in errs.items())
    record("AC2", ok, f"max rel error {detail} (limit 1e-12), {elapsed:.2f} s")
    assert ok


def test_ac3_matrix_inverse_oracle():
    t0 = time.perf_counter()
    grid = np.linspace(0.0, 10.0, 200)
    errs = {}
    for name in PRESETS:
        k = BandKernel(preset_drive(name), Regularization(GAMMA))
        B = cf_iterate(k, grid, 5)[0]
        diag = lattice_matrix_inverse(k, grid, 14)[0][:, 14]
        errs[name] = float(np.max(_rel(B, diag)))
    elapsed = time.perf_counter() - t0
    ok = all(e < 1e-8 for e in errs.values()) and elapsed < 10.0
    detail = ", ".join(f"{k[-1]} {v:.2e}" for k, v in errs.items())
    record("AC3", ok, f"max rel error {detail} (limit 1e-8), {elapsed:.2f} s")
    assert ok


def test_ac4_figure5_positions(preset_traces):
    t0 = time.perf_counter()
    grid = np.linspace(0.0, 10.0, 2000)
    lines = []
    ok = True
    for name, trace in preset_traces.items():
        k = BandKernel(preset_drive(name), Regularization(GAMMA))
        k5 = assemble_response(k, grid, 5)
        k4 = assemble_response(k, grid, 4)
        conv = np.max(np.abs(k5.values - k4.values)) / np.max(np.abs(k4.values))
        td = damped_transform(trace, GAMMA, grid)
        m = compare_peaks(find_peaks(k5, 0.05), find_peaks(td, 0.01), 0.05)
        good = not m.unmatched_a and conv < 1e-2
        ok &= good
        lines.append(f"{name[-1]}: {len(m.pairs)} matched, {len(m.unmatched_a)} unmatched, "
                     f"max offset {m.max_offset:.4f}, conv {conv:.1e}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120.0
    record("AC4", ok, "; ".join(lines) + f" ({elapsed:.1f} s, oracle traces precomputed)")
    assert ok


def test_ac5_delta_zero_limit():
    t0 = time.perf_counter()
    worst = 0.0
    for name, p in PRESETS.items():
        d = DriveSpec.monochromatic(p["epsilon"], p["amplitude"], p["omega_drive"], delta=0.0)
        dt = default_dt(d)
        n = int(np.ceil(50 * 2 * np.pi / d.omega_drive / dt))
        tr = propagate(d, dt, n)
        worst = max(worst, np.max(np.abs(tr.correlator - analytic_delta_zero(d, tr.times))))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-6 and elapsed < 5.0
    record("AC5", ok, f"sup error {worst:.2e} (limit 1e-6) over 50 periods, {elapsed:.2f} s")
    assert ok


def _halving_errors(drive, dt0, levels=4, periods=5):
    T = periods * 2 * np.pi / drive.omega_drive
    ref_n = 2**levels
    n0 = int(np.ceil(T / dt0))
    ref = propagate(drive, dt0 / ref_n, n0 * ref_n).correlator[::ref_n]
    errs = []
    for lvl in range(levels):
        f = 2**lvl
        errs.append(np.max(np.abs(propagate(drive, dt0 / f, n0 * f).correlator[::f] - ref)))
    return errs


def test_ac6_propagator_integrity(preset_traces):
    unit = 0.0
    eq = 0.0
    mono = True
    rng = np.random.default_rng(7)
    for name, tr in preset_traces.items():
        unit = max(unit, tr.unitarity_defect().max())
        for i in rng.integers(0, tr.n, 20):
            eq = max(eq, abs(tr.two_time(i, i) - 1.0))
        eq = max(eq, abs(tr.correlator[0] - 1.0))
        d = preset_drive(name)
        scale = max(d.delta, d.omega_drive, abs(d.epsilon), d.amplitude)
        errs = _halving_errors(d, 0.02 / scale)
        mono &= all(b < a for a, b in zip(errs, errs[1:]))
    ok = unit < 1e-8 and eq < 1e-9 and mono
    record("AC6", ok, f"unitarity {unit:.1e} (limit 1e-8), |K(t,t)-1| {eq:.1e} (limit 1e-9), "
                      f"step-halving monotone: {mono}")
    assert ok


def test_ac7_kernel_antisymmetry():
    rng = np.random.default_rng(11)
    anti = 0.0
    for _ in range(100):
        nh = rng.integers(1, 5)
        freqs = rng.choice(np.arange(-4, 5), size=nh, replace=False) * rng.uniform(0.2, 2.0)
        drive = DriveSpec(1.0, 0.0, 1.0, rng.uniform(0.5, 2.0),
                          harmonics=tuple(zip(rng.normal(size=nh), freqs)))
        reg = Regularization(rng.choice([0.0, 0.01, 0.3]))
        om, omp = rng.uniform(-8, 8, 2)
        fwd = g_kernel_general(om, omp, drive, reg)
        rev = g_kernel_general(omp, om, drive, reg)
        for (s1, w1), (s2, w2) in zip(fwd, rev):
            assert s1 == s2
            anti = max(anti, abs(w1 + w2) / max(abs(w1), 1e-300))
    band = 0.0
    for _ in range(20):
        d = DriveSpec.monochromatic(*rng.uniform(0.1, 3.0, 2), rng.uniform(0.3, 3.0))
        reg = Regularization(0.0)
        k = BandKernel(d, reg)
        om = rng.uniform(-6, 6)
        for kind, sg in ((0, 1), (1, 1), (1, -1), (2, 1), (2, -1)):
            step = 0.0 if kind == 0 else sg * kind * d.omega_drive
            comb = g_kernel_general(om, -(om + step), d, reg)
            tot = 2.0 * sum(wt for s, wt in comb if np.isclose(s, -step, rtol=0, atol=1e-12))
            ref = beta(kind, om, sg, k)
            band = max(band, abs(tot - ref) / abs(ref))
    ok = anti < 1e-12 and band < 1e-13
    record("AC7", ok, f"antisymmetry {anti:.1e} (limit 1e-12), regrouping {band:.1e}")
    assert ok


def test_ac8_bcs():
    t0 = time.perf_counter()
    quad = 0.0
    for E, L in [(1.0, 100.0), (0.3, 5.0), (2.5, 1e3), (0.05, 10.0)]:
        m = BcsModel(1.0, 1.0, E, L)
        quad = max(quad, abs(gap_integral(m, 0.0, "closed") - gap_integral(m, 0.0, "quad")))
    gs = np.linspace(0.2, 4.0, 20)
    gaps = []
    cert = 0.0
    for g in gs:
        m = BcsModel(g, 1.0, 0.4, 50.0)
        d0 = solve_gap(m)
        gaps.append(d0)
        if d0 > 0:
            cert = max(cert, abs(gap_residual(m, d0)))
    mono = bool(np.all(np.diff(gaps) >= 0))
    inf_err = 0.0
    for g, n0, ek in [(1.0, 1.0, 0.5), (2.0, 0.7, 1.1), (0.9, 2.0, 0.2)]:
        d0 = solve_gap(BcsModel(g, n0, ek, np.inf))
        inf_err = max(inf_err, abs(d0 - np.sqrt((np.pi * g * n0 / 2) ** 2 - ek**2)))
    elapsed = time.perf_counter() - t0
    ok = quad < 1e-10 and cert < 1e-10 and mono and inf_err < 1e-8 and elapsed < 1.0
    record("AC8", ok, f"quadrature {quad:.1e}, certificate {cert:.1e}, monotone {mono}, "
                      f"infinite cutoff {inf_err:.1e}, {elapsed:.2f} s")
    assert ok
