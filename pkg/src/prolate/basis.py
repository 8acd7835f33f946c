"""Prolate spheroidal wave functions from the sinc-kernel integral equation.

The band-limiting kernel K(t, z) = sin(omega (t - z)) / (pi (t - z)) restricted
to [-T, T] is discretized on a Gauss-Legendre grid (Nystrom method).  The
eigenvalues of the symmetrized kernel matrix are the concentration ratios
lambda_n; the scaled eigenvectors sample the eigenfunctions psi_n on the grid,
and the Nystrom formula extends them to the whole real line.

Normalization: psi_n carries unit energy on the real line, so its energy
inside the window equals lambda_n.  Signs follow the Hermite-compatible
parity convention sign(psi_n(0)) = (-1)^(n/2) for even n and
sign(psi_n'(0)) = (-1)^((n-1)/2) for odd n, so that psi_n approaches the
n-th Hermite-Gauss mode (not its negative) for large c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EigensolverError
from .params import SlepianParams
from .quadrature import gauss_legendre

#: Below this eigenvalue the Nystrom extension (which divides by lambda_n)
#: is no longer trusted in double precision.
LAMBDA_FLOOR = 1e-13

_ZERO_FLOOR = 5e-15       # eigenvalues below are indistinguishable from zero
_SATURATION = 1e-10       # 1 - lambda below this: clustered at unity
_TAIL_CLUSTER = 1e-11     # eigenvalue pairs this small sit in the noise tail
_DEGENERACY_GAP = 1e-12


def sinc_kernel(t, z, omega: float):
    """Band-limiting kernel sin(omega (t - z)) / (pi (t - z)).

    Defined for all real (t, z); the diagonal t = z takes the limit omega/pi.
    """
    if not (omega > 0.0):
        raise ValueError("omega must be positive")
    x = np.subtract(t, z, dtype=float)
    return (omega / np.pi) * np.sinc((omega / np.pi) * x)


def sinc_kernel_dt(t, z, omega: float):
    """Derivative of the kernel with respect to its first argument."""
    if not (omega > 0.0):
        raise ValueError("omega must be positive")
    x = np.subtract(t, z, dtype=float)
    u = omega * x
    small = np.abs(u) < 1e-4
    u_safe = np.where(small, 1.0, u)
    exact = (u_safe * np.cos(u_safe) - np.sin(u_safe)) / (u_safe * u_safe)
    series = u * (-1.0 / 3.0 + u * u / 30.0)
    return (omega * omega / np.pi) * np.where(small, series, exact)


def plunge_index(c: float) -> int:
    """Index ceil(2c/pi) where the eigenvalue spectrum plunges from ~1 to ~0."""
    if not (c > 0.0):
        raise ValueError("c must be positive")
    # guard against ties sitting one ulp above an integer
    return max(1, math.ceil(2.0 * c / math.pi - 1e-12))


def default_quad_order(c: float, n_max: int) -> int:
    """Minimum Gauss-Legendre order resolving the kernel and n_max modes."""
    return max(4 * n_max, math.ceil(4.0 * c), 64)


@dataclass(frozen=True)
class ProlateBasis:
    """Computed family psi_0..psi_n_max for one (c, T) configuration.

    Immutable after construction; safe to share across threads.

    Attributes
    ----------
    nodes, weights : Gauss-Legendre rule of order ``quad_order`` on [-T, T].
    lambdas : concentration eigenvalues, descending, clipped to [0, 1).
    samples : psi_n at the nodes, one row per mode, sign-fixed.
    lambda_floor : modes with lambda below this cannot be extended off-grid.
    """

    params: SlepianParams
    n_max: int
    quad_order: int
    nodes: np.ndarray
    weights: np.ndarray
    lambdas: np.ndarray
    samples: np.ndarray
    lambda_floor: float = LAMBDA_FLOOR

    @property
    def n_modes(self) -> int:
        return self.n_max + 1

    @property
    def extendable(self) -> np.ndarray:
        """Boolean mask of modes whose Nystrom extension is trustworthy."""
        return self.lambdas >= self.lambda_floor

    def require_extendable(self, n: int) -> None:
        if not (0 <= n <= self.n_max):
            raise ValueError(f"mode index {n} outside computed range 0..{self.n_max}")
        if self.lambdas[n] < self.lambda_floor:
            raise EigensolverError(
                f"lambda_{n} = {self.lambdas[n]:.3e} is below the extension floor "
                f"{self.lambda_floor:.1e}; the mode cannot be evaluated off-grid")

    def window_gram(self) -> np.ndarray:
        """Window inner products sum_j w_j psi_n psi_m; equals diag(lambdas)."""
        return (self.samples * self.weights) @ self.samples.T


def build_basis(params: SlepianParams, n_max: int | None = None,
                quad_order: int | None = None, *,
                lambda_floor: float = LAMBDA_FLOOR,
                n_max_cap: int | None = None) -> ProlateBasis:
    """Solve the sinc-kernel eigenproblem on [-T, T] by Nystrom discretization.

    Parameters
    ----------
    params : SlepianParams
        Window half-length T and Slepian frequency c.
    n_max : int or None
        Highest mode index to keep.  ``None`` keeps every mode whose
        eigenvalue is at or above ``lambda_floor`` (all extendable).
    quad_order : int or None
        Gauss-Legendre order; default max(4*n_max, ceil(4c), 64).  Orders
        below the default are rejected.
    n_max_cap : int or None
        Upper bound applied to the automatic n_max choice.

    Raises
    ------
    EigensolverError
        If the requested n_max reaches eigenvalues indistinguishable from
        zero at working precision, or a near-degenerate pair is detected
        outside the benign clusters at 1 and 0.
    """
    if not isinstance(params, SlepianParams):
        raise TypeError("params must be a SlepianParams instance")
    if n_max is not None and n_max < 0:
        raise ValueError("n_max must be >= 0")

    c, T, omega = params.c, params.T, params.omega
    min_order = default_quad_order(c, n_max if n_max is not None else 0)
    if quad_order is None:
        quad_order = min_order
    elif quad_order < min_order:
        raise ValueError(
            f"quad_order {quad_order} below the required minimum {min_order} "
            f"for c={c}, n_max={n_max}")

    nodes, weights = gauss_legendre(quad_order, -T, T)
    sqw = np.sqrt(weights)
    kernel = sinc_kernel(nodes[:, None], nodes[None, :], omega)
    sym = kernel * sqw[:, None] * sqw[None, :]
    sym = 0.5 * (sym + sym.T)
    evals, evecs = np.linalg.eigh(sym)
    order = np.argsort(evals)[::-1]
    lam_all = np.clip(evals[order], 0.0, np.nextafter(1.0, 0.0))
    vecs_all = evecs[:, order]

    n_usable = int(np.count_nonzero(lam_all > _ZERO_FLOOR))
    if n_max is None:
        n_keep = int(np.count_nonzero(lam_all >= lambda_floor))
        n_keep = min(n_keep, quad_order // 4)
        if n_max_cap is not None:
            n_keep = min(n_keep, n_max_cap + 1)
        if n_keep == 0:
            raise EigensolverError(
                f"no eigenvalue reaches the extension floor {lambda_floor:.1e} "
                f"at c={c}; increase quad_order or lower the floor")
        n_max = n_keep - 1
    elif n_max + 1 > n_usable:
        raise EigensolverError(
            f"requested n_max={n_max} but only {n_usable} eigenvalues are "
            f"numerically distinguishable from zero at quad_order={quad_order}")

    lam = lam_all[: n_max + 1].copy()
    _check_degeneracy(lam, lambda_floor)

    # eigenvector -> eigenfunction samples with window energy lambda_n,
    # which pins the whole-line norm of the extension to one
    psi = (np.sqrt(lam)[:, None] * vecs_all[:, : n_max + 1].T) / sqw[None, :]

    # parity sign convention without dividing by lambda:
    # sum_j w_j K(0,z_j) psi(z_j) = lambda psi(0), same for d/dt at 0
    wp = weights * psi
    val0 = wp @ sinc_kernel(0.0, nodes, omega)
    slope0 = wp @ sinc_kernel_dt(0.0, nodes, omega)
    for n in range(n_max + 1):
        ref = val0[n] if n % 2 == 0 else slope0[n]
        want = -1.0 if (n // 2) % 2 else 1.0  # Hermite sign pattern at t=0
        if ref * want < 0.0:
            psi[n] = -psi[n]

    return ProlateBasis(params=params, n_max=n_max, quad_order=quad_order,
                        nodes=nodes, weights=weights, lambdas=lam,
                        samples=psi, lambda_floor=lambda_floor)


def _check_degeneracy(lam: np.ndarray, lambda_floor: float) -> None:
    # the continuous spectrum is simple; a tiny gap away from the benign
    # clusters at 1 (saturated) and 0 (below trust) flags eigenvector mixing
    if lam.size < 2:
        return
    gaps = lam[:-1] - lam[1:]
    saturated = (1.0 - lam) < _SATURATION
    tail = lam < max(100.0 * lambda_floor, _TAIL_CLUSTER)
    benign = (saturated[:-1] & saturated[1:]) | tail[:-1] | tail[1:]
    bad = (gaps < _DEGENERACY_GAP) & ~benign
    if np.any(bad):
        n = int(np.argmax(bad))
        raise EigensolverError(
            f"near-degenerate eigenvalue pair (lambda_{n}={lam[n]:.16e}, "
            f"lambda_{n + 1}={lam[n + 1]:.16e}); eigenvectors would mix")


def extension_matrix(basis: ProlateBasis, t, indices=None) -> np.ndarray:
    """Nystrom extension psi_n(t) for the selected modes, rows n, columns t.

    Valid for every real t, inside and outside the window.
    """
    if indices is None:
        indices = np.arange(basis.n_modes)
    indices = np.atleast_1d(np.asarray(indices, dtype=int))
    for n in indices:
        basis.require_extendable(int(n))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    kernel = sinc_kernel(t[:, None], basis.nodes[None, :], basis.params.omega)
    core = (basis.weights * basis.samples[indices]) / basis.lambdas[indices, None]
    return core @ kernel.T


def eval_psi(basis: ProlateBasis, n: int, t):
    """Evaluate psi_n at time t (scalar or array) via the Nystrom extension."""
    basis.require_extendable(n)
    t_arr = np.asarray(t, dtype=float)
    vals = extension_matrix(basis, t_arr.ravel(), [n])[0]
    if t_arr.ndim == 0:
        return float(vals[0])
    return vals.reshape(t_arr.shape)


def lambda0_curve(c_values, T: float = 1.0, quad_order: int | None = None) -> np.ndarray:
    """Table of (c, lambda_0(c)) rows for the given c values."""
    c_values = np.atleast_1d(np.asarray(c_values, dtype=float))
    if c_values.size == 0:
        raise ValueError("c_values must be non-empty")
    rows = np.empty((c_values.size, 2))
    for i, c in enumerate(c_values):
        basis = build_basis(SlepianParams(c=float(c), T=T), n_max=0,
                            quad_order=quad_order)
        rows[i, 0] = c
        rows[i, 1] = basis.lambdas[0]
    return rows
