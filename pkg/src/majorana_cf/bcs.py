"""Mean-field pairing kernels and the gap equation at fixed ``eps_k``.

The frequency integral of the gap equation is taken along the imaginary
axis, where the integrand ``1 / (eps_k^2 + Delta_0^2 + w^2)`` is positive
and the integral over ``[-L, L]`` is ``(2/E) arctan(L/E)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, optimize

__all__ = [
    "BcsModel",
    "mf_kernels",
    "gap_integral",
    "gap_residual",
    "solve_gap",
    "solved",
]

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class BcsModel:
    """Pairing model at one single-particle energy.

    ``cutoff`` may be ``np.inf``.
    """

    g: float
    n0: float
    epsilon_k: float
    cutoff: float
    delta0: float = 0.0

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError("g must be > 0")
        if not self.n0 > 0:
            raise ValueError("n0 must be > 0")
        if not self.cutoff > 0:
            raise ValueError("cutoff must be > 0")
        if not self.delta0 >= 0:
            raise ValueError("delta0 must be >= 0")


def mf_kernels(model: BcsModel, omega: float) -> tuple[float, float]:
    """Mean-field kernel coefficients at frequency ``omega``.

    Returns
    -------
    g_mf : float
        ``omega D0^2 / (e^2 + D0^2 - omega^2)``.
    k_mf : float
        ``omega (e^2 + D0^2 - omega^2) / (e^2 - omega^2)``.
    """
    e2 = model.epsilon_k**2
    d2 = model.delta0**2
    w2 = omega * omega
    if w2 == e2 + d2:
        raise ZeroDivisionError(f"omega^2 = eps_k^2 + delta0^2 = {e2 + d2:.17g} is a pole")
    if w2 == e2:
        raise ZeroDivisionError(f"omega^2 = eps_k^2 = {e2:.17g} is a pole")
    return omega * d2 / (e2 + d2 - w2), omega * (e2 + d2 - w2) / (e2 - w2)


def _energy(model: BcsModel, delta0: float) -> float:
    E = float(np.hypot(model.epsilon_k, delta0))
    if E == 0:
        raise ZeroDivisionError("E = sqrt(eps_k^2 + delta0^2) = 0: the gap integral diverges")
    return E


def gap_integral(model: BcsModel, delta0: float, method: str = "closed") -> float:
    """``int_{-L}^{L} dw / (E^2 + w^2)`` in closed form or by adaptive quadrature."""
    E = _energy(model, delta0)
    L = model.cutoff
    if method == "closed":
        return 2.0 / E * np.arctan(L / E)
    if method == "quad":
        val, _ = integrate.quad(lambda w: 1.0 / (E * E + w * w), 0.0, L,
                                epsabs=0.0, epsrel=1e-13, limit=200)
        return 2.0 * val
    raise ValueError("method must be 'closed' or 'quad'")


def gap_residual(model: BcsModel, delta0: float) -> float:
    """``-2/g + N(0) int dw / (E^2 + w^2)``; strictly decreasing in ``delta0``."""
    if delta0 < 0:
        raise ValueError("delta0 must be >= 0")
    return -2.0 / model.g + model.n0 * gap_integral(model, delta0)


def solve_gap(model: BcsModel) -> float:
    """Gap ``Delta_0`` solving ``gap_residual = 0``; zero in the normal state.

    The root is bracketed by ``[0, pi g N(0)]`` and located by bisection.

    Raises
    ------
    RuntimeError
        If the bisection result misses the residual tolerance.
    """
    f0 = gap_residual(model, 0.0) if model.epsilon_k != 0 else np.inf
    if f0 <= 0:
        return 0.0
    hi = np.pi * model.g * model.n0
    lo = 0.0
    if model.epsilon_k == 0:
        lo = min(1e-300, hi)
    root = optimize.bisect(lambda d: gap_residual(model, d), lo, hi,
                           xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=2000)
    res = gap_residual(model, root)
    if abs(res) >= RESIDUAL_TOL:
        raise RuntimeError(f"bisection stalled with residual {res:.3e}")
    return float(root)


def solved(model: BcsModel) -> BcsModel:
    """Copy of ``model`` with ``delta0`` set to the gap solution."""
    return replace(model, delta0=solve_gap(model))
