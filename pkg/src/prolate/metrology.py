"""Measurement probabilities under band/time limits, Fisher information, CRB."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import ProlateBasis, plunge_index
from .errors import PovmValidityError, SingularFisherError
from .params import SlepianParams

#: tolerance below which negative probabilities are treated as rounding noise
PROB_SLACK = 1e-10
#: slack on norm/positivity checks of probe rows and POVM operators
POVM_SLACK = 1e-9
#: outcomes with probability below this are excluded from Fisher sums
DEFAULT_P_FLOOR = 1e-12


@dataclass(frozen=True)
class ProbeState:
    """Convex decomposition of a probe: weights rho_k and coefficient rows Psi_kn.

    Rows live in the prolate coefficient space; they need not be mutually
    orthogonal (any convex decomposition of the same operator yields the
    same probabilities).  Set ``orthogonal=True`` to assert and check that
    the rows form an orthonormal family.
    """

    weights: np.ndarray
    modes: np.ndarray
    orthogonal: bool = False
    params: SlepianParams | None = None

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        m = np.atleast_2d(np.asarray(self.modes, dtype=float))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "modes", m)
        if w.ndim != 1 or m.shape[0] != w.size:
            raise ValueError("modes must have one row per weight")
        if np.any(w < -1e-15):
            raise ValueError("probe weights must be non-negative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"probe weights must sum to 1, got {w.sum()!r}")
        norms = np.sum(m * m, axis=1)
        if np.any(norms > 1.0 + POVM_SLACK):
            raise ValueError(f"probe row norm^2 exceeds 1: {norms.max()!r}")
        if self.orthogonal:
            gram = m @ m.T
            if np.max(np.abs(gram - np.eye(w.size))) > POVM_SLACK:
                raise ValueError("orthogonal flag set but rows are not orthonormal")


@dataclass(frozen=True)
class PovmElement:
    """One measurement operator: weights Pi_il over coefficient vectors pi_il."""

    weights: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        v = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "vectors", v)
        if v.shape[0] != w.size:
            raise ValueError("vectors must have one row per weight")
        if np.any(w < 0.0):
            raise ValueError("POVM element weights must be non-negative")
        norms = np.sum(v * v, axis=1)
        if np.any(norms > 1.0 + POVM_SLACK):
            raise ValueError(f"POVM vector norm^2 exceeds 1: {norms.max()!r}")


@dataclass(frozen=True)
class Povm:
    """Monitored elements 0..d-1; the leakage element d is implicit."""

    elements: tuple
    params: SlepianParams | None = None

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.elements:
            raise ValueError("POVM needs at least one monitored element")

    @property
    def n_monitored(self) -> int:
        return len(self.elements)

    @property
    def n_outcomes(self) -> int:
        return len(self.elements) + 1

    def coefficient_length(self) -> int:
        return max(el.vectors.shape[1] for el in self.elements)

    def completeness_operator(self) -> np.ndarray:
        """Matrix of sum_i Pi_i on the spanned coefficient space."""
        m = self.coefficient_length()
        op = np.zeros((m, m))
        for el in self.elements:
            v = _pad_cols(el.vectors, m)
            op += (el.weights[:, None] * v).T @ v
        return op

    def validate(self, tol: float = POVM_SLACK) -> float:
        """Check that the leakage complement stays positive; returns top eigenvalue."""
        top = float(np.linalg.eigvalsh(self.completeness_operator())[-1])
        if top > 1.0 + tol:
            raise PovmValidityError("monitored elements exceed the identity", top)
        return top


def _pad_cols(a: np.ndarray, m: int) -> np.ndarray:
    if a.shape[1] == m:
        return a
    out = np.zeros((a.shape[0], m))
    out[:, : a.shape[1]] = a
    return out


def _check_shared_params(probe: ProbeState, povm: Povm) -> None:
    if probe.params is not None and povm.params is not None and probe.params != povm.params:
        raise ValueError(f"probe/POVM parameter mismatch: {probe.params} vs {povm.params}")


def _finish(p_click: np.ndarray) -> np.ndarray:
    if np.any(p_click < -PROB_SLACK) or np.any(p_click > 1.0 + PROB_SLACK):
        raise PovmValidityError(
            f"monitored probability outside [0, 1]: {p_click.min()!r}..{p_click.max()!r}")
    leak = 1.0 - p_click.sum()
    if leak < -PROB_SLACK:
        raise PovmValidityError(
            f"monitored probabilities sum to {p_click.sum()!r} > 1; POVM is over-complete")
    p = np.append(np.clip(p_click, 0.0, 1.0), max(leak, 0.0))
    return p


def _click_probabilities(probe: ProbeState, povm: Povm, probe_scale=None,
                         n_cut: int | None = None) -> np.ndarray:
    m = max(probe.modes.shape[1], povm.coefficient_length())
    psi = _pad_cols(probe.modes, m)
    if probe_scale is not None:
        scale = np.asarray(probe_scale, dtype=float)
        if scale.size < m:
            raise ValueError(f"basis supplies {scale.size} eigenvalues but "
                             f"coefficients run to index {m - 1}")
        psi = psi * scale[:m]
    if n_cut is not None:
        psi = psi[:, : n_cut + 1]
    out = np.empty(povm.n_monitored)
    for i, el in enumerate(povm.elements):
        v = _pad_cols(el.vectors, m)
        if n_cut is not None:
            v = v[:, : n_cut + 1]
        amp = v @ psi.T  # (L, k)
        out[i] = float(np.sum(el.weights[:, None] * probe.weights[None, :] * amp * amp))
    return out


def probabilities_ideal(probe: ProbeState, povm: Povm) -> np.ndarray:
    """Outcome probabilities p_0..p_d with unlimited measurement time.

    p_i = sum_{k,l} rho_k Pi_il |sum_n pi_iln Psi_kn|^2 for the monitored
    elements; the leakage entry closes the distribution to 1.
    """
    _check_shared_params(probe, povm)
    return _finish(_click_probabilities(probe, povm))


def probabilities_limited(probe: ProbeState, povm: Povm, basis: ProlateBasis) -> np.ndarray:
    """Outcome probabilities with both the band limit and the finite window.

    Every coefficient product inside the squared amplitude picks up the
    concentration eigenvalue lambda_n; the leakage element absorbs whatever
    the finite window fails to capture.
    """
    _check_shared_params(probe, povm)
    if probe.params is not None and probe.params != basis.params:
        raise ValueError("probe expressed over different basis parameters")
    return _finish(_click_probabilities(probe, povm, probe_scale=basis.lambdas))


def probabilities_truncated(probe: ProbeState, povm: Povm, c: float) -> np.ndarray:
    """Ideal-form probabilities with the coefficient sums cut at ceil(2c/pi).

    Faithful to the limited probabilities once the spectrum has plunged:
    coefficients above the plunge index contribute nothing.
    """
    _check_shared_params(probe, povm)
    return _finish(_click_probabilities(probe, povm, n_cut=plunge_index(c)))


def time_limit_povm(povm: Povm, basis: ProlateBasis) -> Povm:
    """Compress every monitored element into the measurement window.

    Coefficient vectors are damped to pi_iln * lambda_n, so ideal
    probabilities of the result reproduce the limited probabilities of the
    original.  Element norms can only shrink.  Applying the map twice damps
    by lambda_n^2: the window projector is idempotent in time, but its
    compression onto the bandlimited subspace is a strict contraction.
    """
    if povm.params is not None and povm.params != basis.params:
        raise ValueError("POVM expressed over different basis parameters")
    lam = basis.lambdas
    elements = []
    for el in povm.elements:
        m = el.vectors.shape[1]
        if lam.size < m:
            raise ValueError(f"basis supplies {lam.size} eigenvalues but "
                             f"coefficients run to index {m - 1}")
        elements.append(PovmElement(el.weights, el.vectors * lam[:m]))
    return Povm(tuple(elements), params=povm.params)


@dataclass(frozen=True)
class FisherMatrix:
    """Classical Fisher information with the evaluation metadata that shaped it."""

    matrix: np.ndarray
    labels: tuple
    steps: np.ndarray
    excluded_outcomes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.atleast_2d(np.asarray(self.matrix, dtype=float)))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "steps", np.atleast_1d(np.asarray(self.steps, dtype=float)))
        object.__setattr__(self, "excluded_outcomes", tuple(self.excluded_outcomes))


def _checked_probs(model, theta: np.ndarray) -> np.ndarray:
    p = np.atleast_1d(np.asarray(model(theta), dtype=float))
    if not np.all(np.isfinite(p)):
        raise ValueError(f"model returned non-finite probabilities at theta={theta.tolist()}")
    if np.any(p < -PROB_SLACK) or np.any(p > 1.0 + PROB_SLACK):
        raise ValueError(
            f"model probabilities left [0, 1] at theta={theta.tolist()}; "
            f"finite-difference step too large or model invalid")
    return np.clip(p, 0.0, 1.0)


def fisher_matrix(model, theta, steps=None, *, labels=None,
                  p_floor: float = DEFAULT_P_FLOOR,
                  richardson: bool = True) -> FisherMatrix:
    """Classical Fisher information matrix of a probability model.

    Parameters
    ----------
    model : callable
        Maps a parameter vector to a probability vector.  Must be valid in a
        neighborhood of ``theta`` and safe for repeated evaluation.
    theta : array_like
        Evaluation point.
    steps : array_like or None
        Per-parameter central-difference steps; default 1e-5 * (1 + |theta|).
        One Richardson extrapolation is applied unless disabled.
    p_floor : float
        Outcomes with probability below this are excluded from the sum (their
        indices are reported on the result) -- 1/p is untrustworthy there.

    Notes
    -----
    The sum runs over every outcome the model reports.  To exclude an
    outcome (for example a leakage channel), wrap the model so it omits it.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    n = theta.size
    if steps is None:
        steps = 1e-5 * (1.0 + np.abs(theta))
    else:
        steps = np.broadcast_to(np.asarray(steps, dtype=float), (n,)).copy()
    if np.any(steps <= 0.0):
        raise ValueError("steps must be positive")
    if labels is None:
        labels = tuple(f"theta{i}" for i in range(n))

    p0 = _checked_probs(model, theta)
    keep = p0 >= p_floor
    excluded = tuple(int(i) for i in np.nonzero(~keep)[0])

    grads = np.empty((n, p0.size))
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0

        def central(h):
            return (_checked_probs(model, theta + h * e)
                    - _checked_probs(model, theta - h * e)) / (2.0 * h)

        d = central(steps[i])
        if richardson:
            d = (4.0 * central(0.5 * steps[i]) - d) / 3.0
        grads[i] = d

    g = grads[:, keep]
    f = (g / p0[keep]) @ g.T
    f = 0.5 * (f + f.T)
    return FisherMatrix(matrix=f, labels=labels, steps=steps,
                        excluded_outcomes=excluded)


def crb(fisher: FisherMatrix, *, cond_cap: float = 1e12) -> np.ndarray:
    """Cramer-Rao lower bounds sqrt((F^-1)_nn) for each parameter.

    Raises SingularFisherError when the matrix is singular or worse
    conditioned than ``cond_cap``; the error carries the null direction,
    i.e. the parameter combination the data cannot identify.
    """
    f = fisher.matrix
    evals, evecs = np.linalg.eigh(f)
    top = float(evals[-1])
    if top <= 0.0 or evals[0] <= top / cond_cap:
        direction = evecs[:, 0]
        combo = " + ".join(f"{float(x):+.3g}*{lab}"
                           for x, lab in zip(direction, fisher.labels))
        raise SingularFisherError(
            f"Fisher matrix singular or ill-conditioned (eigenvalues "
            f"{evals.tolist()}); unidentifiable direction: {combo}",
            null_direction=direction)
    inv = evecs @ np.diag(1.0 / evals) @ evecs.T
    return np.sqrt(np.diag(inv))
