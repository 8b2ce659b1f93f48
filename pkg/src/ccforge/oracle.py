"""Numeric fiber integrals over P^1 with the Fubini-Study metric.

Everything here is a float computation checked against exact targets from
the symbolic modules.  The fiber is ``P(L + 1)`` over a point, with affine
coordinate ``t`` (``r = |t|``), section norm ``|s|^2 = h r^2 / (1 + h r^2)``
and ``c1(Q) = 2i h r dr dtheta / (1 + h r^2)^2`` under the convention that
a top form ``w`` integrates to ``(1 / 2 pi i) \\int w``.  All integrands are
rotation invariant, so the angular integral is done by hand (a factor
``2 pi``) and only a radial quadrature remains.

``[0, inf)`` is compactified by ``r = s / (1 - s)`` with the complement
``1 - s`` supplied exactly by the quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .quadrature import QuadratureResult, ToleranceNotReached, tanh_sinh
from .singular_bc import harmonic

__all__ = [
    "BUILTIN_TEST_FUNCTIONS",
    "FSLineGeometry",
    "QuadratureResult",
    "RadialTestFunction",
    "ToleranceNotReached",
    "c0_homogeneous_coefficient",
    "harmonic_integral",
    "poincare_lelong_check",
    "polar_fiber_integral",
]

# Nodes further out carry tanh-sinh weight ~ 1/r and a decaying integrand
# there is far below double precision; the cap keeps rho^4 finite.
_R_CUTOFF = 1e30


@dataclass(frozen=True)
class FSLineGeometry:
    h: float = 1.0

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("metric scalar h must be positive")

    def norm_sq(self, t: complex) -> float:
        x = abs(t) ** 2 * self.h
        return x / (1.0 + x)

    def log_norm_sq(self, s: float, c: float) -> float:
        """``log |s|^2`` at ``r = s / c``, stable at both ends of the chart."""
        return math.log(self.h) + 2.0 * math.log(s) - math.log(c * c + self.h * s * s)

    def euler_green(self, s: float, c: float) -> float:
        """Rank-one Euler-Green function ``-log |s|``."""
        return -0.5 * self.log_norm_sq(s, c)

    def c1_radial_density(self, s: float, c: float) -> float:
        """Radial density of ``c1(Q)`` in ``s``: integrates to 1 over ``[0, 1]``."""
        # 2h r / (1 + h r^2)^2 dr with r = s/c, dr = ds/c^2
        return 2.0 * self.h * s * c / (c * c + self.h * s * s) ** 2


def harmonic_integral(n: int, tol: float = 1e-10) -> QuadratureResult:
    """``n \\int_0^1 log(1 - w) w^{n-1} dw``, which equals ``-H_n``."""
    if n < 1:
        raise ValueError("n must be >= 1")

    def integrand(w: float, wc: float) -> float:
        return math.log(wc) * w ** (n - 1)

    res = tanh_sinh(integrand, 0.0, 1.0, tol=tol / n)
    return res.scaled(n)


def polar_fiber_integral(n: int, tol: float = 1e-10) -> QuadratureResult:
    """Fiber integral of ``c1(Q)^n log|s|^2`` straight from the polar form.

    Returns ``pi_*(c1(Q)^n log|s|^2) / (n c1(L)^{n-1})``, that is
    ``-(1 / 2 pi i) \\int\\int log(r^2/(1+r^2)) (-2i r) dtheta dr / (1+r^2)^{n+1}``
    with ``h = 1``; its exact value is ``-H_n / n``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")

    def integrand(s: float, c: float) -> float:
        if s == 0.0:
            return 0.0
        # 2 r log(r^2/(1+r^2)) / (1+r^2)^{n+1} dr with r = s/c
        q = c * c + s * s
        return 2.0 * s * c ** (2 * n - 1) / q ** (n + 1) * (2.0 * math.log(s) - math.log(q))

    return tanh_sinh(integrand, 0.0, 1.0, tol=tol)


def c0_homogeneous_coefficient(tol: float = 1e-10, h: float = 1.0) -> QuadratureResult:
    """Degree-zero coefficient of the homogeneous line class, numerically.

    Integrates ``-1/2 log|s|^2`` against the degree-one part ``-c1(Q)/2`` of
    ``Td^{-1}(Q)`` over the fiber; the target is ``-1/4``.
    """
    geo = FSLineGeometry(h)

    def integrand(s: float, c: float) -> float:
        if s == 0.0:
            return 0.0
        return 0.25 * geo.log_norm_sq(s, c) * geo.c1_radial_density(s, c)

    return tanh_sinh(integrand, 0.0, 1.0, tol=tol)


@dataclass(frozen=True)
class RadialTestFunction:
    """Rotation-invariant test function ``f(rho)`` of ``rho = t tbar``.

    ``laplacian`` is the flat Laplacian in the ``t``-plane as a function of
    ``rho``: ``4 (f'(rho) + rho f''(rho))``.
    """

    name: str
    value: Callable[[float], float]
    laplacian: Callable[[float], float]


BUILTIN_TEST_FUNCTIONS: dict[str, RadialTestFunction] = {
    "one": RadialTestFunction("one", lambda p: 1.0, lambda p: 0.0),
    "fs-inverse": RadialTestFunction(
        "fs-inverse", lambda p: 1.0 / (1.0 + p), lambda p: 4.0 * (p - 1.0) / (1.0 + p) ** 3
    ),
    "fs-bump": RadialTestFunction(
        "fs-bump", lambda p: p / (1.0 + p) ** 2, lambda p: 4.0 * (p * p - 4.0 * p + 1.0) / (1.0 + p) ** 4
    ),
}


def poincare_lelong_check(test_fn: RadialTestFunction | str, tol: float = 1e-9, h: float = 1.0) -> QuadratureResult:
    """Residual of ``dd e = c1(Q) - delta_0`` paired with a test function.

    Returns ``\\int e dd f - (\\int f c1(Q) - f(0))`` where ``e = -log|s|``
    and ``dd = -2 d dbar``; the residual is zero up to quadrature error.
    """
    if isinstance(test_fn, str):
        try:
            test_fn = BUILTIN_TEST_FUNCTIONS[test_fn]
        except KeyError:
            raise ValueError(f"unknown test function {test_fn!r}; builtins: {sorted(BUILTIN_TEST_FUNCTIONS)}") from None
    geo = FSLineGeometry(h)

    def current_side(s: float, c: float) -> float:
        if s == 0.0 or c == 0.0:
            return 0.0
        r = s / c
        if r > _R_CUTOFF:
            return 0.0
        # (1/2pi) \int e Laplacian(f) dA = \int_0^inf e Laplacian(f) r dr
        return geo.euler_green(s, c) * test_fn.laplacian(r * r) * r / (c * c)

    def smooth_side(s: float, c: float) -> float:
        if c == 0.0:
            return 0.0
        r = s / c
        if r > _R_CUTOFF:
            return 0.0
        return test_fn.value(r * r) * geo.c1_radial_density(s, c)

    lhs = tanh_sinh(current_side, 0.0, 1.0, tol=tol / 2)
    rhs = tanh_sinh(smooth_side, 0.0, 1.0, tol=tol / 2)
    residual = lhs.value - (rhs.value - test_fn.value(0.0))
    return QuadratureResult(residual, lhs.abs_error_estimate + rhs.abs_error_estimate,
                            lhs.evaluations + rhs.evaluations)


def harmonic_target(n: int) -> float:
    return -float(harmonic(n))
