"""Applying rules to integrands and auditing the a-priori error bound.

The error of a rule on a function f is bounded by ||l|| * |f|, where ||l||
is the square root of the norm quadratic form and |f| the seminorm
sqrt(int_0^1 (f'' + f')^2 dx).  The functional annihilates span{1, e^-x}
(the seminorm's null space), so rules here are exact on that span by
construction.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .coefficients import QuadratureRule, optimal_coefficients
from .kernel import integrate_adaptive
from .norm import norm_quadratic_form

__all__ = [
    "CATALOG",
    "ConvergenceRow",
    "ErrorCheck",
    "TestFunction",
    "apply_rule",
    "convergence_table",
    "error_check",
    "sobolev_seminorm",
]


@dataclass(frozen=True)
class TestFunction:
    __test__ = False  # not a pytest class, despite the name

    name: str
    value: Callable[[float], float]
    first_derivative: Callable[[float], float]
    second_derivative: Callable[[float], float]
    exact_integral: float


def _affine_exp_neg() -> TestFunction:
    # fixed pseudo-random draw so CLI output stays byte-reproducible
    rng = random.Random(20240917)
    a = rng.uniform(-10.0, 10.0)
    b = rng.uniform(-10.0, 10.0)
    return TestFunction(
        name="affine_exp_neg",
        value=lambda x, a=a, b=b: a + b * np.exp(-x),
        first_derivative=lambda x, b=b: -b * np.exp(-x),
        second_derivative=lambda x, b=b: b * np.exp(-x),
        exact_integral=a - b * math.expm1(-1.0),
    )


_ZERO = lambda x: np.zeros_like(np.asarray(x, dtype=float))

CATALOG: dict[str, TestFunction] = {
    f.name: f
    for f in (
        TestFunction("const1", lambda x: np.ones_like(np.asarray(x, dtype=float)),
                     _ZERO, _ZERO, 1.0),
        TestFunction("x", lambda x: np.asarray(x, dtype=float),
                     lambda x: np.ones_like(np.asarray(x, dtype=float)), _ZERO, 0.5),
        TestFunction("x_squared", lambda x: np.asarray(x, dtype=float) ** 2,
                     lambda x: 2.0 * np.asarray(x, dtype=float),
                     lambda x: np.full_like(np.asarray(x, dtype=float), 2.0), 1.0 / 3.0),
        TestFunction("exp_neg", lambda x: np.exp(-np.asarray(x, dtype=float)),
                     lambda x: -np.exp(-np.asarray(x, dtype=float)),
                     lambda x: np.exp(-np.asarray(x, dtype=float)), -math.expm1(-1.0)),
        TestFunction("exp", np.exp, np.exp, np.exp, math.expm1(1.0)),
        TestFunction("sin", np.sin, np.cos, lambda x: -np.sin(np.asarray(x, dtype=float)),
                     1.0 - math.cos(1.0)),
        _affine_exp_neg(),
    )
}


@dataclass(frozen=True)
class ErrorCheck:
    quad_value: float
    true_value: float
    abs_error: float
    norm_bound: float
    bound_satisfied: bool


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    h: float
    norm_sq: float
    ratio: Optional[float]
    order_estimate: Optional[float]
    abs_error: Optional[float]


def apply_rule(rule: QuadratureRule, f: TestFunction) -> float:
    """sum_b C_b f(x_b), compensated."""
    values = np.asarray(f.value(rule.nodes), dtype=float)
    return math.fsum(rule.coefficients * values)


def sobolev_seminorm(f: TestFunction, tol: float = 1e-12) -> float:
    """sqrt(int_0^1 (f'' + f')^2 dx), via the adaptive integration oracle."""

    def integrand(x: float) -> float:
        g = float(f.second_derivative(x)) + float(f.first_derivative(x))
        return g * g

    result = integrate_adaptive(integrand, 0.0, 1.0, tol)
    return math.sqrt(max(result.value, 0.0))


def error_check(rule: QuadratureRule, f: TestFunction, norm_sq: float) -> ErrorCheck:
    """Audit |quad - exact| against the Cauchy-Schwarz bound ||l|| * |f|.

    The additive 1e-14 slack absorbs the null-space functions whose bound is
    exactly zero while the quadrature error sits at rounding level.
    """
    quad = apply_rule(rule, f)
    err = abs(quad - f.exact_integral)
    bound = math.sqrt(max(norm_sq, 0.0)) * sobolev_seminorm(f)
    return ErrorCheck(
        quad_value=quad,
        true_value=f.exact_integral,
        abs_error=err,
        norm_bound=bound,
        bound_satisfied=err <= bound * (1.0 + 1e-8) + 1e-14,
    )


def convergence_table(
    ns: Sequence[int], f: Optional[TestFunction] = None
) -> list[ConvergenceRow]:
    """Norm decay along a grid refinement; per-function errors when f given.

    The empirical order log2(prev/current)/log2(n_cur/n_prev) is computed on
    the squared norm to keep square-root noise out of the estimate.
    """
    ns = list(ns)
    if not ns or any(n < 1 for n in ns):
        raise ValueError("grid sizes must all be >= 1")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("grid sizes must be strictly increasing")
    rows: list[ConvergenceRow] = []
    prev: Optional[ConvergenceRow] = None
    for n in ns:
        rule = optimal_coefficients(n)
        norm_sq = norm_quadratic_form(rule)
        ratio = order = None
        if prev is not None:
            ratio = norm_sq / prev.norm_sq
            order = math.log2(prev.norm_sq / norm_sq) / math.log2(n / prev.n)
        abs_err = None
        if f is not None:
            abs_err = abs(apply_rule(rule, f) - f.exact_integral)
        row = ConvergenceRow(n=n, h=1.0 / n, norm_sq=norm_sq, ratio=ratio,
                             order_estimate=order, abs_error=abs_err)
        rows.append(row)
        prev = row
    return rows
