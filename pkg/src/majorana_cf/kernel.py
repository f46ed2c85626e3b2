"""Drive description and the banded kernel of the driven two-level system.

The transverse field is ``Delta_1(t) = eps/2 + A cos(w t)`` and the
longitudinal field is fixed at ``Delta_3 = Delta/2``.  On the frequency
lattice ``{omega + k w}`` the kernel couples sites at most two steps
apart; :class:`BandKernel` evaluates those band elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PoleOnGridError",
    "DriveSpec",
    "Regularization",
    "BandKernel",
    "f_reg",
    "beta",
    "g_kernel_general",
]


class PoleOnGridError(ArithmeticError):
    """Raised when an unregularized evaluation lands on a pole of ``f``."""

    def __init__(self, x, delta):
        self.x = np.atleast_1d(np.asarray(x, dtype=float))
        self.delta = delta
        shown = ", ".join(f"{v:.17g}" for v in self.x[:5])
        super().__init__(
            f"pole of f at x = [{shown}] (|x| = delta = {delta:.17g}) with gamma = 0"
        )


@dataclass(frozen=True)
class DriveSpec:
    """Monochromatic drive plus a static gap.

    Parameters
    ----------
    epsilon : float
        Static splitting ``eps``.
    amplitude : float
        Drive amplitude ``A`` (>= 0).
    omega_drive : float
        Drive angular frequency ``w`` (> 0).
    delta : float
        Static gap ``Delta``.  Zero is allowed so that the exactly solvable
        ``Delta = 0`` limit can be propagated; the kernel itself needs
        ``delta > 0``.
    harmonics : tuple of (coefficient, frequency), optional
        Fourier decomposition of ``Delta_1``.  Defaults to the monochromatic
        set ``(eps/2, 0), (A/2, +w), (A/2, -w)``.
    """

    epsilon: float
    amplitude: float
    omega_drive: float
    delta: float = 1.0
    harmonics: tuple[tuple[float, float], ...] | None = field(default=None)

    def __post_init__(self):
        if not self.omega_drive > 0:
            raise ValueError("omega_drive must be > 0")
        if not self.delta >= 0:
            raise ValueError("delta must be >= 0")
        if not self.amplitude >= 0:
            raise ValueError("amplitude must be >= 0")
        if self.harmonics is None:
            h = (
                (0.5 * self.epsilon, 0.0),
                (0.5 * self.amplitude, self.omega_drive),
                (0.5 * self.amplitude, -self.omega_drive),
            )
            object.__setattr__(self, "harmonics", h)
        else:
            h = tuple((float(c), float(nu)) for c, nu in self.harmonics)
            object.__setattr__(self, "harmonics", h)
        freqs = [nu for _, nu in self.harmonics]
        if len(set(freqs)) != len(freqs):
            raise ValueError("harmonic frequencies must be pairwise distinct")

    @classmethod
    def monochromatic(cls, epsilon, amplitude, omega_drive, delta=1.0) -> "DriveSpec":
        return cls(float(epsilon), float(amplitude), float(omega_drive), float(delta))

    @property
    def rabi_frequency(self) -> float:
        """Static Rabi frequency ``sqrt(eps^2 + Delta^2)``."""
        return float(np.hypot(self.epsilon, self.delta))

    def delta1(self, t):
        """Transverse field ``Delta_1(t)``."""
        t = np.asarray(t, dtype=float)
        return 0.5 * self.epsilon + self.amplitude * np.cos(self.omega_drive * t)


@dataclass(frozen=True)
class Regularization:
    """Retarded pole shift.

    ``scope="band"`` applies ``x -> x + i gamma`` inside every ``f``
    evaluation only.  ``scope="full"`` also shifts the free term of the
    lattice diagonal, which makes the lattice response the exact damped
    Fourier image of the time-domain correlator.
    """

    gamma: float = 1e-2
    scope: str = "band"

    def __post_init__(self):
        if not self.gamma >= 0:
            raise ValueError("gamma must be >= 0")
        if self.scope not in ("band", "full"):
            raise ValueError("scope must be 'band' or 'full'")


def f_reg(x, delta: float, gamma: float):
    """Regularized pole function ``2z / (z^2 - delta^2)`` with ``z = x + i gamma``.

    Parameters
    ----------
    x : array_like
        Real frequency (scalar or array).
    delta : float
        Gap, must be positive.
    gamma : float
        Pole shift, must be non-negative.

    Returns
    -------
    complex or ndarray of complex

    Raises
    ------
    PoleOnGridError
        If ``gamma == 0`` and ``|x| == delta`` for some entry.
    """
    if not delta > 0:
        raise ValueError("delta must be > 0")
    if not gamma >= 0:
        raise ValueError("gamma must be >= 0")
    x = np.asarray(x, dtype=float)
    if gamma == 0:
        hit = np.isclose(np.abs(x), delta, rtol=1e-14, atol=0.0)
        if np.any(hit):
            raise PoleOnGridError(x[hit] if x.ndim else x, delta)
    z = x + 1j * gamma
    out = 2.0 * z / (z * z - delta * delta)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class BandKernel:
    """Band elements of the kernel on the frequency lattice.

    With ``f`` the regularized pole function,

    * ``beta0(w)      = eps^2 f[w] + A^2 (f[w - w_d] + f[w + w_d])``
    * ``beta1(w, s)   = eps A (f[w] + f[w + s w_d])``
    * ``beta2(w, s)   = A^2 f[w + s w_d]``

    where ``s = +1/-1`` selects the hop direction.  These are twice the
    regrouped weights of :func:`g_kernel_general` for the monochromatic
    drive.  ``beta2_form="symmetric"`` switches the second band to the
    symmetric sum ``A^2 (f[w - s w_d] + f[w + s w_d])``, kept only for
    comparison.
    """

    drive: DriveSpec
    reg: Regularization = field(default_factory=Regularization)
    beta2_form: str = "kernel"

    def __post_init__(self):
        if not self.drive.delta > 0:
            raise ValueError("the band kernel needs delta > 0")
        if self.beta2_form not in ("kernel", "symmetric"):
            raise ValueError("beta2_form must be 'kernel' or 'symmetric'")

    def f(self, x):
        return f_reg(x, self.drive.delta, self.reg.gamma)

    def beta0(self, omega):
        d = self.drive
        w = d.omega_drive
        return d.epsilon**2 * self.f(omega) + d.amplitude**2 * (
            self.f(np.asarray(omega) - w) + self.f(np.asarray(omega) + w)
        )

    def beta1(self, omega, sign: int):
        d = self.drive
        shifted = np.asarray(omega) + sign * d.omega_drive
        return d.epsilon * d.amplitude * (self.f(omega) + self.f(shifted))

    def beta2(self, omega, sign: int):
        d = self.drive
        omega = np.asarray(omega)
        out = d.amplitude**2 * self.f(omega + sign * d.omega_drive)
        if self.beta2_form == "symmetric":
            out = out + d.amplitude**2 * self.f(omega - sign * d.omega_drive)
        return out

    def diagonal(self, omega):
        """Lattice diagonal ``-2 omega + beta0(omega)``."""
        omega = np.asarray(omega, dtype=float)
        free = omega + 1j * self.reg.gamma if self.reg.scope == "full" else omega
        return -2.0 * free + self.beta0(omega)


def beta(kind: int, omega, sign: int, kernel: BandKernel):
    """Band element ``beta_kind(omega, sign * w)``; ``sign`` is ignored for kind 0."""
    if kind == 0:
        return kernel.beta0(omega)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if kind == 1:
        return kernel.beta1(omega, sign)
    if kind == 2:
        return kernel.beta2(omega, sign)
    raise ValueError("kind must be 0, 1 or 2")


def g_kernel_general(omega: float, omega_prime: float, drive: DriveSpec,
                     reg: Regularization | None = None) -> list[tuple[float, complex]]:
    """Delta-comb form of the antisymmetric kernel ``G(omega, omega')``.

    Each ordered pair of harmonics ``(c_a, nu_a), (c_b, nu_b)`` contributes

    ``2 c_a c_b (omega' - omega) / ((nu_a + omega + D)(nu_a + omega' + D))``

    with ``D = delta + i gamma``, supported on ``omega + omega' = nu_b - nu_a``.

    Returns
    -------
    list of (shift, weight)
        One entry per ordered harmonic pair, in a fixed order.
    """
    gamma = 0.0 if reg is None else reg.gamma
    dc = drive.delta + 1j * gamma
    out = []
    for ca, nua in drive.harmonics:
        d1 = nua + omega + dc
        d2 = nua + omega_prime + dc
        if gamma == 0 and (d1 == 0 or d2 == 0):
            raise PoleOnGridError(-nua - (omega if d1 == 0 else omega_prime), drive.delta)
        for cb, nub in drive.harmonics:
            out.append((nub - nua, 2.0 * ca * cb * (omega_prime - omega) / (d1 * d2)))
    return out
