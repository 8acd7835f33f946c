"""Gauss-Legendre rules and panel-based integration over the real line."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_ENERGY_FLOOR = 1e-300


def gauss_legendre(order: int, a: float = -1.0, b: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [a, b]."""
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def panel_order_for(max_freq: float, width: float) -> int:
    # ~pi nodes per oscillation cycle of exp(i*max_freq*t), plus headroom
    return max(32, math.ceil(0.75 * max_freq * width) + 24)


@dataclass(frozen=True)
class RealLineRule:
    """Composite rule for integrals of a concrete function over the real line."""

    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    radius: float
    total_energy: float
    tail_energy: float
    converged: bool

    def integral(self) -> float:
        return float(np.dot(self.weights, self.values))


def real_line_rule(f, core_radius: float, *, max_freq: float | None = None,
                   panel_order: int | None = None, rel_tol: float = 1e-11,
                   max_radius: float | None = None) -> RealLineRule:
    """Grow a symmetric panel rule until the energy tail of ``f`` is negligible.

    Panels of width ``core_radius`` are appended on both sides of
    [-core_radius, core_radius] until the energy (sum of w*f^2) contributed by
    the outermost pair falls below rel_tol^2 times the accumulated energy.
    The radius is capped (default 20x the core radius); hitting the cap is
    reported through ``converged`` and left to the caller to enforce.
    """
    if not (core_radius > 0.0):
        raise ValueError("core_radius must be positive")
    R = float(core_radius)
    cap = float(max_radius) if max_radius is not None else 20.0 * R
    if max_freq is None:
        max_freq = 2.0 * math.pi / R
    order = panel_order if panel_order is not None else panel_order_for(max_freq, R)

    edges = [-R, 0.0, R]
    nodes_parts, weights_parts, values_parts = [], [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(order, lo, hi)
        nodes_parts.append(x)
        weights_parts.append(w)
        values_parts.append(np.asarray(f(x), dtype=float))
    total = sum(float(np.dot(w, v * v)) for w, v in zip(weights_parts, values_parts))

    radius = R
    marginal = math.inf
    converged = False
    while True:
        threshold = rel_tol * rel_tol * max(total, _ENERGY_FLOOR)
        if marginal < threshold:
            converged = True
            break
        if radius + R > cap * (1.0 + 1e-12):
            break
        marginal = 0.0
        for lo, hi in ((radius, radius + R), (-radius - R, -radius)):
            x, w = gauss_legendre(order, lo, hi)
            v = np.asarray(f(x), dtype=float)
            nodes_parts.append(x)
            weights_parts.append(w)
            values_parts.append(v)
            marginal += float(np.dot(w, v * v))
        total += marginal
        radius += R

    nodes = np.concatenate(nodes_parts)
    weights = np.concatenate(weights_parts)
    values = np.concatenate(values_parts)
    idx = np.argsort(nodes, kind="stable")
    return RealLineRule(nodes=nodes[idx], weights=weights[idx], values=values[idx],
                        radius=radius, total_energy=total,
                        tail_energy=0.0 if converged else marginal,
                        converged=converged)
