"""Dense assembly and solve of the stationarity system for the rule weights.

Minimizing the error-norm quadratic form over the weights, subject to the
two moment constraints, yields a discrete Wiener-Hopf-type linear system:
one kernel row per node,

    sum_g C_g psi_2(x_b - x_g) + b0 + d e^(-x_b) = moment(x_b),

plus the constraint rows sum C = 1 and sum C e^(-x) = 1 - e^-1, where b0 and
d are the Lagrange multipliers of the constraints.  Solving it directly is
the independent oracle against which every closed form is judged.

Arbitrary strictly increasing nodes in [0,1] are accepted; cost is
O(count^3), so callers cap the node count (the CLI uses 513).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import moment, psi

__all__ = [
    "SingularSystemError",
    "SystemSolution",
    "build_system",
    "solve_dense",
    "solve_for_nodes",
    "solve_uniform",
]

_PIVOT_FLOOR = 1e-13  # relative to the equilibrated row scale of 1


class SingularSystemError(ValueError):
    """Elimination hit a pivot below the numerical-rank floor."""


@dataclass(frozen=True, eq=False)
class SystemSolution:
    nodes: np.ndarray
    c: np.ndarray
    b0: float
    d: float
    residual_inf: float


def build_system(nodes) -> tuple[np.ndarray, np.ndarray]:
    """Assemble the (count+2) x (count+2) matrix and right-hand side.

    Unknown ordering: C_0..C_count-1, then b0, then d.  The kernel block is
    symmetric (the kernel is even) with a zero diagonal.
    """
    nodes = np.asarray(nodes, dtype=float)
    if nodes.ndim != 1 or nodes.size < 2:
        raise ValueError("need at least two nodes")
    if np.any(np.diff(nodes) <= 0.0):
        raise ValueError("nodes must be strictly increasing (no duplicates)")
    if nodes[0] < 0.0 or nodes[-1] > 1.0:
        raise ValueError("nodes must lie within [0, 1]")
    n = nodes.size
    m = np.zeros((n + 2, n + 2))
    m[:n, :n] = psi(2, nodes[:, None] - nodes[None, :])
    m[:n, n] = 1.0
    m[:n, n + 1] = np.exp(-nodes)
    m[n, :n] = 1.0
    m[n + 1, :n] = np.exp(-nodes)
    rhs = np.concatenate([moment(nodes), [1.0, -np.expm1(-1.0)]])
    return m, rhs


def _eliminate(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gaussian elimination with scaled partial pivoting, vectorized updates."""
    n = b.size
    scale = np.abs(a).max(axis=1)
    if not np.all(scale > 0.0):
        raise SingularSystemError("system has an identically zero row")
    a = a / scale[:, None]
    b = b / scale
    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) < _PIVOT_FLOOR:
            raise SingularSystemError(f"pivot {a[p, k]:.3e} below {_PIVOT_FLOOR} at column {k}")
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        mult = a[k + 1:, k] / a[k, k]
        a[k + 1:, k + 1:] -= np.outer(mult, a[k, k + 1:])
        a[k + 1:, k] = 0.0
        b[k + 1:] -= mult * b[k]
    if abs(a[-1, -1]) < _PIVOT_FLOOR:
        raise SingularSystemError("trailing pivot below the rank floor")
    x = np.empty(n)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - a[i, i + 1:] @ x[i + 1:]) / a[i, i]
    return x


def solve_dense(matrix, rhs, nodes=None) -> SystemSolution:
    """Solve a system from build_system; residual is recomputed explicitly.

    `nodes` is stored on the solution record; when omitted it is taken as
    unknown (empty).
    """
    matrix = np.asarray(matrix, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] != rhs.size:
        raise ValueError("matrix and right-hand side sizes do not match")
    x = _eliminate(matrix, rhs)
    residual = matrix @ x - rhs
    n = rhs.size - 2
    stored = np.asarray(nodes, dtype=float) if nodes is not None else np.empty(0)
    return SystemSolution(
        nodes=stored,
        c=x[:n],
        b0=float(x[n]),
        d=float(x[n + 1]),
        residual_inf=float(np.abs(residual).max()),
    )


def solve_for_nodes(nodes) -> SystemSolution:
    matrix, rhs = build_system(nodes)
    return solve_dense(matrix, rhs, nodes=nodes)


def solve_uniform(n: int) -> SystemSolution:
    """Solve on the uniform grid with n subintervals (n >= 1)."""
    if n < 1:
        raise ValueError("grid size must be >= 1")
    return solve_for_nodes(np.linspace(0.0, 1.0, n + 1))
