"""Time-domain reference for the driven two-level system.

Integrates ``i dU/dt = H(t) U`` with ``H(t) = -[Delta_1(t) s1 + (Delta/2) s3]``
by a fixed-step fourth-order Runge-Kutta scheme.  The per-step maps are
linear, so the propagators on the whole grid are the prefix products of
the step matrices; these are accumulated with a doubling scan to keep the
work vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import DriveSpec

__all__ = [
    "ResolutionError",
    "PropagatorTrace",
    "propagate",
    "default_dt",
    "correlator",
    "analytic_delta_zero",
    "static_rabi_reference",
]

S1 = np.array([[0, 1], [1, 0]], dtype=complex)
S3 = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

MAX_PHASE_STEP = 0.02


class ResolutionError(ValueError):
    """Time step too coarse for the drive."""

    def __init__(self, dt, suggested):
        self.dt = dt
        self.suggested = suggested
        super().__init__(f"dt = {dt:.6g} violates the resolution guard; use dt <= {suggested:.6g}")


def correlator(U: np.ndarray) -> np.ndarray:
    """``K = tr[U^dag s3 U s3] / 2`` for a stack of 2x2 matrices."""
    return 0.5 * np.einsum("...ji,jk,...kl,li->...", U.conj(), S3, U, S3).real


@dataclass
class PropagatorTrace:
    """Propagators ``U(t_n, 0)`` on a uniform grid with derived observables."""

    dt: float
    propagators: np.ndarray
    drive: DriveSpec
    t0: float = 0.0

    def __post_init__(self):
        self.correlator = correlator(self.propagators)
        # |U_down,down|^2 = (1 + K) / 2 for a unitary U
        self.survival = 0.5 * (1.0 + self.correlator)

    @property
    def n(self) -> int:
        return self.propagators.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    @property
    def window(self) -> float:
        return self.dt * (self.n - 1)

    def unitarity_defect(self) -> np.ndarray:
        U = self.propagators
        err = np.einsum("nji,njk->nik", U.conj(), U) - I2
        return np.abs(err).max(axis=(1, 2))

    def two_time(self, i: int, j: int) -> float:
        """``K(t_i, t_j)`` from ``U(t_i, t_j) = U(t_i, 0) U(t_j, 0)^-1``."""
        U = self.propagators[i] @ np.linalg.inv(self.propagators[j])
        return float(correlator(U))


def default_dt(drive: DriveSpec, factor: float = 1e-3) -> float:
    """``factor * 2 pi / max(w, Omega)``."""
    return factor * 2.0 * np.pi / max(drive.omega_drive, drive.rabi_frequency)


def _hamiltonian(drive: DriveSpec, t: np.ndarray) -> np.ndarray:
    d1 = drive.delta1(t)
    return -(d1[:, None, None] * S1 + 0.5 * drive.delta * S3)


def _prefix_products(steps: np.ndarray) -> np.ndarray:
    """Inclusive prefix products ``S_k ... S_1 S_0`` (Hillis-Steele scan)."""
    P = steps.copy()
    d = 1
    while d < P.shape[0]:
        P[d:] = P[d:] @ P[:-d]
        d *= 2
    return P


def propagate(drive: DriveSpec, dt: float, n_steps: int, t0: float = 0.0) -> PropagatorTrace:
    """Fourth-order propagation from ``t0`` with ``U(t0) = I``.

    Parameters
    ----------
    drive : DriveSpec
    dt : float
        Step; must satisfy ``dt * max(Delta, w, eps, A) <= 0.02``.
    n_steps : int
        Number of steps; the trace holds ``n_steps + 1`` times.
    t0 : float
        Start time (drive phase reference is ``t = 0``).

    Raises
    ------
    ResolutionError
        If the step violates the resolution guard.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    scale = max(drive.delta, drive.omega_drive, abs(drive.epsilon), drive.amplitude)
    if dt * scale > MAX_PHASE_STEP:
        raise ResolutionError(dt, MAX_PHASE_STEP / scale)
    t = t0 + dt * np.arange(n_steps)
    h1 = _hamiltonian(drive, t)
    h2 = _hamiltonian(drive, t + 0.5 * dt)
    h4 = _hamiltonian(drive, t + dt)
    k1 = -1j * h1
    k2 = -1j * h2 @ (I2 + 0.5 * dt * k1)
    k3 = -1j * h2 @ (I2 + 0.5 * dt * k2)
    k4 = -1j * h4 @ (I2 + dt * k3)
    steps = I2 + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    U = np.empty((n_steps + 1, 2, 2), dtype=complex)
    U[0] = I2
    if n_steps:
        U[1:] = _prefix_products(steps)
    return PropagatorTrace(dt, U, drive, t0)


def analytic_delta_zero(drive: DriveSpec, t, t_prime=0.0):
    """Exact correlator for ``Delta = 0``.

    ``sign(t - t') cos(2 int_{t'}^{t} Delta_1)``, with ``sign(0) = +1``.
    """
    if drive.delta != 0:
        raise ValueError("analytic_delta_zero requires delta = 0")
    t = np.asarray(t, dtype=float)
    tp = np.asarray(t_prime, dtype=float)
    w = drive.omega_drive
    phase = drive.epsilon * (t - tp) + 2.0 * drive.amplitude / w * (np.sin(w * t) - np.sin(w * tp))
    sign = np.where(t - tp >= 0, 1.0, -1.0)
    out = sign * np.cos(phase)
    return out[()] if out.ndim == 0 else out


def static_rabi_reference(epsilon: float, delta: float, t):
    """Static-drive correlator ``(Delta^2 + eps^2 cos(Omega t)) / Omega^2``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    om2 = epsilon**2 + delta**2
    if om2 == 0:
        return np.ones_like(t)[()] if t.ndim == 0 else np.ones_like(t)
    out = (delta**2 + epsilon**2 * np.cos(np.sqrt(om2) * t)) / om2
    return out[()] if out.ndim == 0 else out
