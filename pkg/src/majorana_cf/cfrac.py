"""Continued-fraction solution of the frequency-lattice Dyson problem.

The response kernel is the inverse of the pentadiagonal lattice matrix
``M`` on ``{omega + k w}`` with

* ``M[k, k]     = -2 omega_k + beta0(omega_k)``
* ``M[k, k+s]   = beta1(omega_k, s)``
* ``M[k, k+2s]  = beta2(omega_k, s)``

``B`` is the centre diagonal of ``M^-1``, ``C(+-)`` are the dressed hops
out of the centre and ``Gamma_n(+-)`` the centre row ``(M^-1)[0, +-n]``.

A recursion depth ``m`` solves the problem exactly on the truncated
lattice ``|k| <= 2m``.  Each side is swept inward with scalar continued
fractions, and the loop through the centre that joins the two sides is
summed in closed form.  Depth 0 gives the bare values ``B = 1/M[0, 0]``
and ``C = -beta1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import BandKernel, DriveSpec

__all__ = [
    "DegenerateDenominatorError",
    "SingularLatticeError",
    "FrequencyLattice",
    "CfState",
    "ResponseSpectrum",
    "cf_iterate",
    "gamma_chain",
    "assemble_response",
    "lattice_matrix",
    "lattice_matrix_inverse",
]

TINY = 1e-30


class DegenerateDenominatorError(ArithmeticError):
    """A continued-fraction denominator vanished."""

    def __init__(self, omega, offset):
        self.omega = np.atleast_1d(omega)
        self.offset = offset
        shown = ", ".join(f"{v:.17g}" for v in self.omega[:5])
        super().__init__(
            f"continued-fraction denominator below {TINY:g} at omega = [{shown}], "
            f"lattice offset {offset}"
        )


class SingularLatticeError(np.linalg.LinAlgError):
    """The truncated lattice matrix is numerically singular."""

    def __init__(self, cond):
        self.cond = float(np.max(cond))
        super().__init__(f"lattice matrix is numerically singular (condition ~ {self.cond:.3e})")


@dataclass(frozen=True)
class FrequencyLattice:
    """Points ``base + k * step`` for ``|k| <= span``."""

    base: float
    step: float
    span: int

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be > 0")
        if self.span < 0:
            raise ValueError("span must be >= 0")

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(-self.span, self.span + 1)

    @property
    def points(self) -> np.ndarray:
        return self.base + self.offsets * self.step

    def supports(self, depth: int) -> bool:
        return self.span >= 2 * depth + 2


@dataclass
class ResponseSpectrum:
    """Complex response sampled on a frequency grid.

    ``b_values`` holds the translation-invariant part ``B`` when the
    spectrum comes from the lattice solver; it is ``None`` for
    time-domain spectra.
    """

    grid: np.ndarray
    values: np.ndarray
    depth: int
    gamma_used: float
    n_gamma_terms: int
    drive: DriveSpec
    b_values: np.ndarray | None = None
    method_tag: str = "continued_fraction"

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.grid.ndim != 1 or self.values.shape != self.grid.shape:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if self.grid.size > 1 and np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if self.b_values is not None:
            self.b_values = np.asarray(self.b_values, dtype=complex)

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)


class CfState:
    """Memoized continued-fraction solver for a batch of base frequencies.

    The cache lives on the instance, so separate assemblies never share
    mutable state.

    Parameters
    ----------
    kernel : BandKernel
    omega : array_like
        Base frequencies (lattice centres).
    depth : int
        Recursion depth; the lattice is truncated at ``|k| <= 2 * depth``.
    """

    def __init__(self, kernel: BandKernel, omega, depth: int):
        if depth < 0:
            raise ValueError("depth must be >= 0")
        self.kernel = kernel
        self.omega = np.atleast_1d(np.asarray(omega, dtype=float))
        self.depth = int(depth)
        self.reach = 2 * self.depth
        self._memo: dict = {}
        self._sides: dict = {}
        self._origin = None

    # lattice matrix entries -------------------------------------------------

    def _inside(self, k: int) -> bool:
        return abs(k) <= self.reach

    def m(self, j: int, k: int):
        """Entry ``M[j, k]``; zero outside the band or the truncated lattice."""
        if not (self._inside(j) and self._inside(k)) or abs(j - k) > 2:
            return 0.0
        key = (j, k)
        if key not in self._memo:
            kern = self.kernel
            om = self.omega + j * kern.drive.omega_drive
            gap = k - j
            if gap == 0:
                val = kern.diagonal(om)
            elif abs(gap) == 1:
                val = kern.beta1(om, gap)
            else:
                val = kern.beta2(om, gap // 2)
            self._memo[key] = np.asarray(val, dtype=complex)
        return self._memo[key]

    def _invert(self, den, offset):
        bad = np.abs(den) < TINY
        if np.any(bad):
            raise DegenerateDenominatorError(self.omega[bad], offset)
        return 1.0 / den

    # one-sided sweeps ---------------------------------------------------------

    def side(self, sg: int) -> dict:
        """Continued fractions of the region ``{n sg : n >= 1}``.

        Returns arrays keyed by ``n`` for the diagonal ``b`` of the inverse
        restricted to ``{n, n+1, ...}`` (outward), the dressed hops ``c``,
        ``cp`` between ``n`` and ``n+1`` and the column ratio ``s``.
        """
        if sg in self._sides:
            return self._sides[sg]
        zero = np.zeros_like(self.omega, dtype=complex)
        L = self.reach
        b = {n: zero for n in range(L + 1, L + 3)}
        c = {n: zero for n in range(L, L + 2)}
        cp = {n: zero for n in range(L, L + 2)}
        for n in range(L, 0, -1):
            j = sg * n
            j1, j2 = j + sg, j + 2 * sg
            m12, m21 = self.m(j, j2), self.m(j2, j)
            den = self.m(j, j) - b[n + 1] * c[n] * cp[n] - m12 * m21 * b[n + 2]
            b[n] = self._invert(den, j)
            if n > 1:
                jm = j - sg
                c[n - 1] = self.m(jm, j) - self.m(jm, j1) * b[n + 1] * cp[n]
                cp[n - 1] = self.m(j, jm) - b[n + 1] * c[n] * self.m(j1, jm)
        s = {n: -b[n + 1] * cp[n] for n in range(1, L + 1)}
        out = {"b": b, "c": c, "cp": cp, "s": s}
        self._sides[sg] = out
        return out

    def _b(self, sg, n):
        return self.side(sg)["b"][n] if n <= self.reach else 0.0

    def _s(self, sg, n):
        return self.side(sg)["s"][n] if n <= self.reach else 0.0

    # centre -------------------------------------------------------------------

    def origin(self):
        """Return ``(B, C, rho)``.

        ``C[sg]`` is the dressed hop out of the centre and ``rho[k]`` the
        ratio ``(M^-1)[0, k] / B`` for ``k`` in ``+-1, +-2``.
        """
        if self._origin is not None:
            return self._origin
        d0 = self.m(0, 0)
        if self.reach == 0:
            B = self._invert(d0, 0)
            C = {sg: -self.kernel.beta1(self.omega, sg) for sg in (1, -1)}
            self._origin = (B, C, {})
            return self._origin
        bt = {sg: self._b(sg, 1) for sg in (1, -1)}
        X = {sg: -(self.m(0, sg) + self.m(0, 2 * sg) * self._s(sg, 1)) for sg in (1, -1)}
        kap = {sg: self.m(-sg, sg) for sg in (1, -1)}
        loop = kap[1] * kap[-1] * bt[1] * bt[-1]
        den = 1.0 - loop
        C = {sg: (X[sg] - kap[sg] * bt[-sg] * X[-sg]) / den for sg in (1, -1)}
        rho = {}
        for sg in (1, -1):
            rho[sg] = bt[sg] * C[sg]
            b2 = self._b(sg, 2)
            rho[2 * sg] = -b2 * (
                self.m(0, 2 * sg)
                + rho[sg] * (self.m(sg, 2 * sg) + self._s(sg, 2) * self.m(sg, 3 * sg))
            )
        inv = d0 + sum(rho[k] * self.m(k, 0) for k in (1, -1, 2, -2))
        B = self._invert(inv, 0)
        self._origin = (B, C, rho)
        return self._origin

    def row(self, sg: int, n_max: int) -> list:
        """Ratios ``(M^-1)[0, sg n] / B`` for ``n = 1..n_max`` (zero past the truncation)."""
        B, C, rho = self.origin()
        out = []
        if self.reach == 0:
            return [np.zeros_like(B) for _ in range(n_max)]
        side = self.side(sg)
        qa = self.m(0, sg) + self.m(-sg, sg) * rho[-sg]
        qb = self.m(0, 2 * sg)
        for n in range(1, n_max + 1):
            if n > self.reach:
                out.append(np.zeros_like(B))
                continue
            j = sg * n
            r = -side["b"][n] * (qa + side["s"][n] * qb)
            out.append(r)
            qa, qb = qb + r * self.m(j, j + sg), r * self.m(j, j + 2 * sg)
        return out

    def response(self, n_gamma: int):
        """``(K, B)`` with ``K = B + sum_{n <= n_gamma, +-} Gamma_n``."""
        B = self.origin()[0]
        total = np.ones_like(B)
        for sg in (1, -1):
            for r in self.row(sg, n_gamma):
                total = total + r
        return B * total, B


def _unbatch(x, scalar):
    return x[0] if scalar else x


def cf_iterate(kernel: BandKernel, omega, depth: int):
    """Diagonal element ``B`` and dressed hops ``C(+w)``, ``C(-w)`` at the given depth.

    Parameters
    ----------
    kernel : BandKernel
    omega : float or array_like
    depth : int
        Truncation ``|k| <= 2 * depth``; depth 0 returns the bare values.

    Returns
    -------
    B, C_plus, C_minus : complex or ndarray
    """
    scalar = np.ndim(omega) == 0
    st = CfState(kernel, omega, depth)
    B, C, _ = st.origin()
    return _unbatch(B, scalar), _unbatch(C[1], scalar), _unbatch(C[-1], scalar)


def gamma_chain(kernel: BandKernel, omega, n: int, sign: int, depth: int):
    """Off-diagonal element ``Gamma_n(omega, sign * w) = (M^-1)[0, sign * n]``.

    The chain is built by an outward transfer from the centre.  When the
    two-step band vanishes it reduces to ``B * prod(C B~)`` along the chain,
    with ``B~`` the one-sided diagonal elements.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    scalar = np.ndim(omega) == 0
    st = CfState(kernel, omega, depth)
    B = st.origin()[0]
    return _unbatch(B * st.row(sign, n)[-1], scalar)


def assemble_response(kernel: BandKernel, grid, depth: int = 5, n_gamma: int = 8) -> ResponseSpectrum:
    """Lattice response ``K(omega) = B + sum_{n, +-} Gamma_n`` on a grid."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if n_gamma < 0:
        raise ValueError("n_gamma must be >= 0")
    grid = np.asarray(grid, dtype=float)
    st = CfState(kernel, grid, depth)
    K, B = st.response(n_gamma)
    return ResponseSpectrum(grid, K, depth, kernel.reg.gamma, n_gamma, kernel.drive, b_values=B)


def lattice_matrix(kernel: BandKernel, omega0, span: int) -> np.ndarray:
    """Pentadiagonal lattice matrix on ``omega0 + k w``, ``|k| <= span``.

    Batched over ``omega0``: the result has shape ``omega0.shape + (n, n)``.
    """
    omega0 = np.asarray(omega0, dtype=float)
    k = np.arange(-span, span + 1)
    om = omega0[..., None] + k * kernel.drive.omega_drive
    n = k.size
    M = np.zeros(omega0.shape + (n, n), dtype=complex)
    idx = np.arange(n)
    M[..., idx, idx] = kernel.diagonal(om)
    for sg in (1, -1):
        for dist, band in ((1, kernel.beta1), (2, kernel.beta2)):
            rows = idx[max(0, -sg * dist): n - max(0, sg * dist)]
            M[..., rows, rows + sg * dist] = band(om[..., rows], sg)
    return M


def lattice_matrix_inverse(kernel: BandKernel, omega0, span: int):
    """Banded part of the inverse lattice matrix.

    Returns
    -------
    diagonal : ndarray, shape (..., 2 span + 1)
    hop1 : ndarray, shape (..., 2 span)
        ``(M^-1)[k, k+1]``.
    hop2 : ndarray, shape (..., 2 span - 1)
        ``(M^-1)[k, k+2]``.

    Raises
    ------
    SingularLatticeError
        When the condition number exceeds ``1e14``.
    """
    if span < 4:
        raise ValueError("span must be >= 4")
    M = lattice_matrix(kernel, omega0, span)
    cond = np.linalg.cond(M)
    if np.any(~np.isfinite(cond)) or np.any(cond > 1e14):
        raise SingularLatticeError(cond[np.isfinite(cond)] if np.any(np.isfinite(cond)) else np.inf)
    inv = np.linalg.inv(M)
    return (
        np.diagonal(inv, 0, -2, -1).copy(),
        np.diagonal(inv, 1, -2, -1).copy(),
        np.diagonal(inv, 2, -2, -1).copy(),
    )
