"""Theories of singular Bott-Chern classes as classification data.

A theory compatible with the projection formula and transitive is fixed by
its line-bundle profile ``phi`` with ``C_T(O, L) = 1_1 * phi(c1(L))``, or
equivalently by an additive genus ``S_T`` measuring its difference from the
homogeneous theory:

    C_T(F, N) - C_{T^h}(F, N) = ch(F) Td^{-1}(N) S_T(N)

On line bundles this reads ``phi_T(x) = phi_h(x) + Td^{-1}(x) S_T(x)``.

The odd unit ``1_1`` is carried as a parity flag on :class:`OddClass`.
Absolute classes for rank >= 2 are not computed (there is no closed form);
only the line profile and differences between theories are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Mapping

from .bundles import FormalBundle, Genus, chern_character, genus_evaluate, todd_inverse, todd_inverse_profile, todd_profile
from .series import GradedSeries, OneVarSeries, SeriesError, parse_rat, substitute

# The rho class of rho-Todd additivity has no known closed form; it only
# ever appears by name.
RHO = "rho(F, N1, N2)"
RHO_TODD_ADDITIVITY = "C(F, N1 + N2) = C(F, N1) Td^-1(N2) + C(F, N2) Td^-1(N1) + " + RHO


class ParityError(TypeError):
    pass


@dataclass(frozen=True)
class OddClass:
    """A class ``1_1 * value``; odd times odd is rejected."""

    value: GradedSeries
    parity: str = field(default="odd")

    def __add__(self, other: OddClass) -> OddClass:
        if not isinstance(other, OddClass):
            raise ParityError("cannot add an odd class and an even class")
        return OddClass(self.value + other.value)

    def __sub__(self, other: OddClass) -> OddClass:
        if not isinstance(other, OddClass):
            raise ParityError("cannot subtract an even class from an odd class")
        return OddClass(self.value - other.value)

    def __neg__(self) -> OddClass:
        return OddClass(-self.value)

    def __mul__(self, other: Any) -> OddClass:
        if isinstance(other, OddClass):
            raise ParityError("product of two odd classes is not modelled")
        if isinstance(other, GradedSeries) or isinstance(other, (int, Fraction)):
            return OddClass(self.value * other)
        return NotImplemented

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.value.is_zero()

    def to_json(self) -> dict[str, Any]:
        return {"parity": self.parity, "value": self.value.to_json()}


@lru_cache(maxsize=None)
def harmonic(n: int) -> Fraction:
    if n < 1:
        raise ValueError("harmonic numbers start at n = 1")
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


def phi_homogeneous(order: int) -> OneVarSeries:
    """Line profile of the homogeneous theory: ``(-1)^{n+1} H_{n+1} / (2 (n+2)!)``."""
    if order < 0:
        raise ValueError("order must be non-negative")
    return OneVarSeries.from_function(
        lambda n: (-1) ** (n + 1) * harmonic(n + 1) / (2 * math.factorial(n + 2)), order
    )


def derive_phi_from_fiber_integrals(integrals: Mapping[int, Any] | None, order: int) -> OneVarSeries:
    """Assemble the line profile from fiber integrals.

    ``integrals[k]`` is the coefficient of ``c1(L)^{k-1}`` in
    ``pi_*(c1(Q)^k log|s|^2)`` (``-H_k`` for the Fubini-Study metric, the
    default when ``integrals`` is None).  Pushing ``-1/2 Td^{-1}(Q) log|s|^2``
    down term by term gives coefficient ``-1/2 (-1)^k / (k+1)! * I(k)`` on
    ``x^{k-1}``.
    """
    if integrals is None:
        integrals = {k: -harmonic(k) for k in range(1, order + 2)}
    coeffs = []
    for k in range(1, order + 2):
        if k not in integrals:
            raise KeyError(f"missing fiber integral for n = {k}")
        value = integrals[k]
        if isinstance(value, float):
            raise TypeError("fiber integrals must be exact; round floats with rationalize() first")
        coeffs.append(Fraction(-1, 2) * Fraction((-1) ** k, math.factorial(k + 1)) * parse_rat(value))
    return OneVarSeries(tuple(coeffs))


def rationalize(value: float, max_denominator: int = 10**6) -> Fraction:
    """Explicit float-to-rational boundary for numeric fiber integrals."""
    return Fraction(value).limit_denominator(max_denominator)


@dataclass(frozen=True)
class BCTheory:
    phi: OneVarSeries
    s_genus: Genus
    projection_formula: bool = True
    transitive: bool = True

    def __post_init__(self):
        if self.s_genus.kind != "additive":
            raise ValueError("the defect genus S_T must be additive")
        if not (self.projection_formula and self.transitive):
            raise ValueError("only transitive theories compatible with the projection formula are classified")

    @property
    def order(self) -> int:
        return self.phi.order

    @property
    def homogeneous(self) -> bool:
        return self.s_genus.is_zero()

    @classmethod
    def homogeneous_theory(cls, order: int) -> BCTheory:
        return cls(phi_homogeneous(order), Genus.additive(OneVarSeries.zero(order)))

    @classmethod
    def from_genus(cls, s_genus: Genus | OneVarSeries, order: int) -> BCTheory:
        if isinstance(s_genus, OneVarSeries):
            s_genus = Genus.additive(s_genus)
        prof = _pad(s_genus.profile, order)
        phi = phi_homogeneous(order) + todd_inverse_profile(order) * prof
        return cls(phi, Genus.additive(prof))

    @classmethod
    def from_phi(cls, phi: OneVarSeries) -> BCTheory:
        return cls(phi, genus_from_class(phi, phi.order))

    def to_json(self) -> dict[str, Any]:
        return {"phi": self.phi.to_json(), "s_genus": self.s_genus.profile.to_json(), "homogeneous": self.homogeneous}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> BCTheory:
        phi = OneVarSeries.from_json(data["phi"])
        theory = cls.from_phi(phi)
        if "s_genus" in data:
            given = OneVarSeries.from_json(data["s_genus"])
            n = min(given.order, theory.s_genus.profile.order)
            if given.truncate(n) != theory.s_genus.profile.truncate(n):
                raise ValueError("s_genus is inconsistent with phi")
        if "homogeneous" in data and bool(data["homogeneous"]) != theory.homogeneous:
            raise ValueError("homogeneous flag is inconsistent with phi")
        return theory


def _pad(f: OneVarSeries, order: int) -> OneVarSeries:
    # a genus given by fewer coefficients than ``order`` is read as a polynomial
    if f.order < order:
        f = OneVarSeries(f.coeffs, True)
    return OneVarSeries(f.truncate(order).coeffs)


def class_line(T: BCTheory, L: FormalBundle | None = None, order: int | None = None) -> OddClass:
    """``C_T(O, L) = 1_1 phi(c1(L))``; without ``L``, over a single generator ``x``."""
    if L is None:
        n = T.order if order is None else order
        return OddClass(T.phi.truncate(n).to_graded("x"))
    if L.rank != 1:
        raise ValueError("class_line needs a line bundle")
    return OddClass(substitute(T.phi, L.chern[0]))


def class_pair_line(T: BCTheory, F: FormalBundle, L: FormalBundle) -> OddClass:
    """``C_T(F, L) = C_T(O, L) ch(F)`` by compatibility with the projection formula."""
    return class_line(T, L) * chern_character(F).ch


def class_pair_defect(T: BCTheory, F: FormalBundle, N: FormalBundle) -> OddClass:
    """``C_T(F, N) - C_{T^h}(F, N) = ch(F) Td^{-1}(N) S_T(N)``."""
    if F.table != N.table:
        raise SeriesError("F and N must live over the same ring")
    if T.homogeneous:
        return OddClass(GradedSeries.zero(N.table, min(F.truncation, N.truncation)))
    return OddClass(chern_character(F).ch * todd_inverse(N) * genus_evaluate(T.s_genus, N))


def grr_defect_term(T: BCTheory, F: FormalBundle, N: FormalBundle) -> OddClass:
    """Integrand ``ch(F) Td^{-1}(N) S_T(N)`` of the arithmetic GRR correction.

    Push it through :meth:`ProjCompletion.zero_section_pushforward` for the
    cycle-level shadow.
    """
    return class_pair_defect(T, F, N)


def grr_defect_cycle(T: BCTheory, F: FormalBundle, pc) -> GradedSeries:
    """``i_*`` of :func:`grr_defect_term` in the projective completion ``pc`` of ``N``."""
    return pc.zero_section_pushforward(grr_defect_term(T, F, pc.base_bundle).value)


def genus_from_class(psi: OneVarSeries, order: int | None = None) -> Genus:
    """Recover ``S_T`` from a line profile: ``S(x) = (psi(x) - phi_h(x)) Td(x)``."""
    n = psi.order if order is None else min(order, psi.order)
    diff = psi.truncate(n) - phi_homogeneous(n)
    return Genus.additive(diff * todd_profile(n))


def defect_todd_additivity(T: BCTheory, F: FormalBundle, N1: FormalBundle, N2: FormalBundle) -> GradedSeries:
    """Residual of Todd additivity for the difference ``C_T - C_{T^h}``.

    The difference is ``ch(F) Td^{-1}(N) S_T(N)`` with ``S_T`` additive and
    ``Td^{-1}`` multiplicative, so it satisfies the additivity relation with
    no ``rho`` term; a zero residual is expected.
    """
    from .bundles import direct_sum

    lhs = class_pair_defect(T, F, direct_sum(N1, N2)).value
    rhs = (class_pair_defect(T, F, N1).value * todd_inverse(N2)
           + class_pair_defect(T, F, N2).value * todd_inverse(N1))
    return lhs - rhs
