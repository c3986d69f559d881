"""Closed-form quadrature weights on the uniform grid, overflow-safe.

The closed form states, with K and lambda1 from the spectral module,

    C_0 = (e^h - 1 - h)/(e^h - 1)        - K (lambda1 - lambda1^N)
    C_b = h - K [(lambda1 - e^h) lambda1^b + (lambda1 e^h - 1) lambda1^(N-b)]
    C_N = (h e^h - e^h + 1)/(e^h - 1)    - K (lambda1 - lambda1^N) e^h

for 1 <= b <= N-1.  Every lambda1 power is rewritten exactly through
q = 1/lambda1 and Kscaled = K lambda1^(N+1):

    K (lambda1 - lambda1^N)                       = Kscaled (q^N - q)
    K [(lambda1-e^h) lambda1^b
       + (lambda1 e^h - 1) lambda1^(N-b)]         = Kscaled [(1 - e^h q) q^(N-b)
                                                             + (e^h - q) q^b]

so only nonnegative powers of q appear and grids up to N = 10^6 evaluate
without overflow (deep q powers underflow to exact zero, a correction far
below double precision).

Note: these are the printed closed-form weights.  They satisfy both moment
constraints exactly, but they do *not* coincide with the minimizer computed
by the dense stationarity solve (see `wiener_hopf`); the validation suite
measures and reports that discrepancy rather than hiding it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import SpectralConstants, constants, pow_q

__all__ = [
    "QuadratureRule",
    "constraint_residuals",
    "make_rule",
    "optimal_coefficients",
    "trapezoid_rule",
]


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    n: int
    h: float
    nodes: np.ndarray
    coefficients: np.ndarray


def make_rule(nodes, coefficients) -> QuadratureRule:
    """Package arbitrary nodes/weights on [0,1] as a rule (no optimality implied)."""
    nodes = np.asarray(nodes, dtype=float)
    coefficients = np.asarray(coefficients, dtype=float)
    if nodes.ndim != 1 or nodes.shape != coefficients.shape:
        raise ValueError("nodes and coefficients must be 1-D arrays of equal length")
    if nodes.size < 1:
        raise ValueError("a rule needs at least one node")
    if np.any(np.diff(nodes) <= 0.0):
        raise ValueError("nodes must be strictly increasing")
    if nodes[0] < 0.0 or nodes[-1] > 1.0:
        raise ValueError("nodes must lie within [0, 1]")
    n = nodes.size - 1
    h = (nodes[-1] - nodes[0]) / n if n else 1.0
    return QuadratureRule(n=n, h=float(h), nodes=nodes, coefficients=coefficients)


def optimal_coefficients(n: int) -> QuadratureRule:
    """Closed-form weights on the uniform grid with n subintervals."""
    sc: SpectralConstants = constants(n)  # validates n
    h, q, ks = sc.h, sc.q, sc.k_scaled
    eh = math.exp(h)
    em1 = math.expm1(h)

    c = np.empty(n + 1)
    # boundary corrections: Kscaled (q^N - q), cancelling exactly at N = 1
    corr = ks * (pow_q(q, n) - q)
    c[0] = (em1 - h) / em1 - corr  # (e^h - 1 - h)/(e^h - 1) - corr
    c[n] = (h * eh - em1) / em1 - corr * eh  # (he^h - e^h + 1)/(e^h - 1) - corr*e^h
    if n > 1:
        qp = np.power(q, np.arange(n + 1, dtype=float))
        # interior: h - Kscaled [(1 - e^h q) q^(N-b) + (e^h - q) q^b]
        c[1:n] = h - ks * ((1.0 - eh * q) * qp[n - 1:0:-1] + (eh - q) * qp[1:n])

    nodes = np.linspace(0.0, 1.0, n + 1)
    return QuadratureRule(n=n, h=h, nodes=nodes, coefficients=c)


def trapezoid_rule(n: int) -> QuadratureRule:
    """Uniform trapezoid weights, a deliberately suboptimal comparison rule."""
    if n < 1:
        raise ValueError("grid size must be >= 1")
    h = 1.0 / n
    c = np.full(n + 1, h)
    c[0] = c[-1] = h / 2.0
    return QuadratureRule(n=n, h=h, nodes=np.linspace(0.0, 1.0, n + 1), coefficients=c)


def constraint_residuals(rule: QuadratureRule) -> tuple[float, float]:
    """Absolute residuals of the two moment constraints, compensated.

    Returns (|sum C - 1|, |sum C e^(-x) - (1 - e^-1)|); math.fsum keeps the
    summation error-free so the residuals measure formula error only.
    """
    c = rule.coefficients
    r1 = abs(math.fsum(c) - 1.0)
    weighted = c * np.exp(-rule.nodes)
    r2 = abs(math.fsum(weighted) + math.expm1(-1.0))  # target 1 - e^-1
    return r1, r2
