"""Damped Fourier transform of oracle traces, peak detection and matching."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .cfrac import ResponseSpectrum
from .oracle import PropagatorTrace

__all__ = [
    "DecayGuardError",
    "Peak",
    "PeakReport",
    "MatchTable",
    "minimal_window",
    "damped_fourier",
    "damped_transform",
    "find_peaks",
    "compare_peaks",
]

DECAY_FLOOR = 1e-4


class DecayGuardError(ValueError):
    """The trace window is too short for the requested damping."""

    def __init__(self, window, minimal):
        self.window = window
        self.minimal = minimal
        super().__init__(f"window T = {window:.6g} too short; need T > {minimal:.6g}")


def minimal_window(gamma: float) -> float:
    """Smallest ``T`` with ``exp(-gamma T) = 1e-4``."""
    return float(np.log(1.0 / DECAY_FLOOR) / gamma)


def _uniform(grid: np.ndarray) -> bool:
    if grid.size < 3:
        return True
    d = np.diff(grid)
    return bool(np.allclose(d, d[0], rtol=1e-10, atol=0.0))


def damped_fourier(samples, dt: float, gamma: float, omega_grid, t0: float = 0.0) -> np.ndarray:
    """Trapezoidal ``int e^{i w t} e^{-gamma t} x(t) dt`` on a uniform time grid.

    Uniform frequency grids go through the chirp z-transform, which applies
    the same quadrature weights as the direct sum.
    """
    x = np.asarray(samples, dtype=complex)
    om = np.atleast_1d(np.asarray(omega_grid, dtype=float))
    n = x.size
    t = t0 + dt * np.arange(n)
    wts = np.full(n, dt)
    if n > 1:
        wts[0] = wts[-1] = 0.5 * dt
    y = x * np.exp(-gamma * t) * wts
    if om.size > 1 and _uniform(om):
        dw = om[1] - om[0]
        out = signal.czt(y, m=om.size, w=np.exp(1j * dw * dt), a=np.exp(-1j * om[0] * dt))
    else:
        out = np.empty(om.size, dtype=complex)
        tt = dt * np.arange(n)
        for lo in range(0, om.size, 64):
            blk = om[lo:lo + 64]
            out[lo:lo + 64] = np.exp(1j * np.outer(blk, tt)) @ y
    return out * np.exp(1j * om * t0)


def damped_transform(trace: PropagatorTrace, gamma: float, omega_grid) -> ResponseSpectrum:
    """Damped one-sided transform of ``K(t, 0)``.

    Raises
    ------
    DecayGuardError
        If ``exp(-gamma T) >= 1e-4`` for the trace window ``T``.
    """
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    T = trace.window
    if not np.exp(-gamma * T) < DECAY_FLOOR:
        raise DecayGuardError(T, minimal_window(gamma))
    vals = damped_fourier(trace.correlator, trace.dt, gamma, omega_grid, trace.t0)
    return ResponseSpectrum(np.asarray(omega_grid, dtype=float), vals, 0, gamma, 0,
                            trace.drive, method_tag="time_domain")


@dataclass(frozen=True)
class Peak:
    omega_over_delta: float
    height: float
    prominence: float


@dataclass
class PeakReport:
    """Peaks of ``|K|`` sorted by frequency.

    ``threshold`` is the absolute prominence cut; ``rel_threshold`` the same
    cut as a fraction of the window maximum (``None`` if given absolutely).
    """

    peaks: list[Peak]
    method_tag: str
    window: tuple[float, float]
    threshold: float
    rel_threshold: float | None = None

    @property
    def positions(self) -> np.ndarray:
        return np.array([p.omega_over_delta for p in self.peaks])


def find_peaks(spec: ResponseSpectrum, prominence: float = 0.05,
               window: tuple[float, float] = (0.0, 10.0), relative: bool = True) -> PeakReport:
    """Local maxima of ``|K|`` on the open window with prominence above a cut.

    Parameters
    ----------
    spec : ResponseSpectrum
    prominence : float
        Cut on the peak prominence (height above the higher flanking
        minimum).  A fraction of the window maximum if ``relative``.
    window : (float, float)
        Open interval in units of ``Delta``.
    relative : bool

    Returns
    -------
    PeakReport
        Positions refined by a parabola through the three top samples.
    """
    if not prominence > 0:
        raise ValueError("prominence must be > 0")
    unit = spec.drive.delta if spec.drive.delta > 0 else 1.0
    x = spec.grid / unit
    lo, hi = window
    sel = (x > lo) & (x < hi)
    if sel.sum() < 3:
        raise ValueError(f"window ({lo}, {hi}) contains fewer than three grid points")
    xs = x[sel]
    mag = np.abs(spec.values[sel])
    cut = prominence * mag.max() if relative else prominence
    idx, props = signal.find_peaks(mag, prominence=cut)
    peaks = []
    for i, prom in zip(idx, props["prominences"]):
        if not prom > cut:
            continue
        y0, y1, y2 = mag[i - 1], mag[i], mag[i + 1]
        den = y0 - 2 * y1 + y2
        off = 0.5 * (y0 - y2) / den if den != 0 else 0.0
        off = float(np.clip(off, -0.5, 0.5))
        h = xs[i + 1] - xs[i] if off >= 0 else xs[i] - xs[i - 1]
        peaks.append(Peak(float(xs[i] + off * h), float(y1 - 0.25 * (y0 - y2) * off), float(prom)))
    return PeakReport(peaks, spec.method_tag, (lo, hi), float(cut), prominence if relative else None)


@dataclass
class MatchTable:
    pairs: list[tuple[Peak, Peak, float]] = field(default_factory=list)
    unmatched_a: list[Peak] = field(default_factory=list)
    unmatched_b: list[Peak] = field(default_factory=list)
    success: bool = False

    @property
    def max_offset(self) -> float:
        return max((d for _, _, d in self.pairs), default=0.0)


def compare_peaks(a: PeakReport, b: PeakReport, tol: float = 0.05) -> MatchTable:
    """Greedy nearest-neighbour matching of two peak reports.

    Pairs are accepted in order of increasing ``|d omega|`` while both
    peaks are free and the offset is within ``tol``.  Success requires
    every peak of the dominant report to be matched.  The dominant report
    is the one cut at the higher relative prominence; with equal cuts
    both reports must be fully matched.
    """
    if tuple(a.window) != tuple(b.window):
        raise ValueError("peak reports cover different windows")
    cand = sorted(
        (abs(pa.omega_over_delta - pb.omega_over_delta), i, j)
        for i, pa in enumerate(a.peaks)
        for j, pb in enumerate(b.peaks)
    )
    used_a, used_b = set(), set()
    pairs = []
    for d, i, j in cand:
        if d > tol:
            break
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        pairs.append((a.peaks[i], b.peaks[j], d))
    pairs.sort(key=lambda p: p[0].omega_over_delta)
    un_a = [p for i, p in enumerate(a.peaks) if i not in used_a]
    un_b = [p for j, p in enumerate(b.peaks) if j not in used_b]
    ra = a.rel_threshold if a.rel_threshold is not None else a.threshold
    rb = b.rel_threshold if b.rel_threshold is not None else b.threshold
    if ra > rb:
        ok = not un_a
    elif rb > ra:
        ok = not un_b
    else:
        ok = not un_a and not un_b
    return MatchTable(pairs, un_a, un_b, ok)
