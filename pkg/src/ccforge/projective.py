"""The Chow-style ring of the projective completion ``P(N + 1)`` over a base.

The fiber variable is ``xi = c1(O(1))``; the tautological sequence
``0 -> O(-1) -> pi^*(N + 1) -> Q -> 0`` gives ``c(Q) = c(N) / (1 - xi)`` and
the relation ``xi^{r+1} + c1(N) xi^r + ... + c_r(N) xi = 0``.  Note
``c1(O(-1)) = -xi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .bundles import (
    BundleError,
    FormalBundle,
    VirtualClass,
    chern_character,
    dual,
    exterior_power_ch,
    todd,
    todd_inverse,
    top_chern,
    total_chern,
)
from .series import GradedSeries, OneVarSeries, TableMismatch, substitute

Basis = Literal["xi", "c1_O(-1)", "c_O(-1)"]


@dataclass(frozen=True)
class Verification:
    passed: bool
    residual: GradedSeries

    def __bool__(self) -> bool:
        return self.passed


class ProjCompletion:
    """``P(N + 1)`` for a formal bundle ``N`` of rank ``r >= 1``.

    Elements are :class:`GradedSeries` over ``base + [xi]``; every public
    operation returns reduced elements (``xi``-degree at most ``r``).
    """

    def __init__(self, N: FormalBundle, fiber: str = "xi"):
        if N.rank < 1:
            raise BundleError("the projective completion needs rank(N) >= 1")
        if fiber in N.table:
            raise ValueError(f"fiber generator name {fiber!r} already used by the base")
        self.base_bundle = N
        self.base_table = N.table
        self.rank = N.rank
        self.truncation = N.truncation
        self.fiber = fiber
        self.table = N.table.extend([(fiber, 1)])
        self._xi_index = self.table.index(fiber)
        self.N = N.embed(self.table)
        self.xi = GradedSeries.generator(self.table, fiber, self.truncation)
        self.Q = self._tautological_quotient()
        self.Q_ch = self._quotient_ch()

    def _tautological_quotient(self) -> FormalBundle:
        chern = []
        for k in range(1, self.rank + 1):
            acc = GradedSeries.zero(self.table, self.truncation)
            for i in range(k + 1):
                acc = acc + self.N.c(i) * self.xi ** (k - i)
            chern.append(self.reduce(acc))
        return FormalBundle(self.rank, chern, self.table, self.truncation)

    def _quotient_ch(self) -> VirtualClass:
        # ch(Q) = ch(pi^*N) + 1 - e^{-xi}
        e_minus = substitute(OneVarSeries.exp(self.truncation, -1), self.xi)
        ch = chern_character(self.N).ch + 1 - e_minus
        return VirtualClass(self.rank, self.reduce(ch))

    # -- ring structure ---------------------------------------------------

    def _split(self, s: GradedSeries) -> dict[int, GradedSeries]:
        j = self._xi_index
        parts: dict[int, dict] = {}
        for e, c in s.terms.items():
            stripped = e[:j] + (0,) + e[j + 1:]
            parts.setdefault(e[j], {})[stripped] = c
        return {k: GradedSeries._raw(self.table, s.truncation, t) for k, t in parts.items()}

    def _join(self, parts: dict[int, GradedSeries], truncation: int) -> GradedSeries:
        j = self._xi_index
        terms = {}
        for k, a in parts.items():
            for e, c in a.terms.items():
                terms[e[:j] + (k,) + e[j + 1:]] = c
        return GradedSeries(self.table, truncation, terms)

    def _own(self, s: GradedSeries) -> GradedSeries:
        if s.table != self.table:
            raise TableMismatch(f"element lives over {s.table!r}, expected {self.table!r}")
        return s

    def reduce(self, s: GradedSeries) -> GradedSeries:
        """Rewrite ``xi^{r+1} -> -(c1 xi^r + ... + c_r xi)`` until ``xi``-degree <= r."""
        s = self._own(s)
        r = self.rank
        d = min(s.truncation, self.truncation)
        parts = self._split(s.truncate(d) if d < s.truncation else s)
        top = max(parts, default=0)
        for k in range(top, r, -1):
            a = parts.pop(k, None)
            if a is None or a.is_zero():
                continue
            for i in range(1, r + 1):
                # the product lands on xi^{k-i}, so only weight <= d-(k-i) survives
                room = d - (k - i)
                if room < 0:
                    continue
                prod = a.truncate(room) * self.N.c(i).truncate(room)
                prev = parts.get(k - i)
                lowered = _lift(-prod, d)
                parts[k - i] = lowered if prev is None else prev + lowered
        return self._join(parts, d)

    def mul(self, a: GradedSeries, b: GradedSeries) -> GradedSeries:
        return self.reduce(self._own(a) * self._own(b))

    def pullback(self, alpha: GradedSeries) -> GradedSeries:
        if alpha.table != self.base_table:
            raise TableMismatch(f"base class lives over {alpha.table!r}, expected {self.base_table!r}")
        return alpha.embed(self.table)

    def segre(self) -> GradedSeries:
        """Total Segre class ``s(N) = 1 / c(N)`` (equal to ``s(N + 1)``)."""
        return total_chern(self.base_bundle).invert()

    def pushforward(self, s: GradedSeries) -> GradedSeries:
        """``pi_*`` to the base: ``pi_*(xi^{r+j}) = s_j(N)``, zero below ``xi^r``.

        Works on unreduced input; on reduced input only the ``xi^r``
        coefficient contributes.
        """
        s = self._own(s)
        r = self.rank
        seg = self.segre()
        seg_parts = seg.weight_parts()
        base_terms: dict = {}
        j = self._xi_index
        for k, a in self._split(s).items():
            if k < r:
                continue
            for e, c in a.terms.items():
                base_e = e[:j] + e[j + 1:]
                for se, sc in seg_parts.get(k - r, {}).items():
                    key = tuple(x + y for x, y in zip(base_e, se))
                    base_terms[key] = base_terms.get(key, 0) + c * sc
        # an element of weight w pushes down to weight w - r
        return GradedSeries(self.base_table, max(s.truncation - r, 0), base_terms)

    def zero_section_pushforward(self, alpha: GradedSeries) -> GradedSeries:
        """``i_*(alpha) = pi^*(alpha) c_r(Q)``."""
        return self.mul(self.pullback(alpha), top_chern(self.Q))

    def coordinates(self, s: GradedSeries, basis: Basis = "xi") -> list[GradedSeries]:
        """Base coefficients ``b_0..b_r`` of a reduced element in the chosen basis.

        ``"xi"``: powers of ``xi``; ``"c1_O(-1)"``: powers of ``-xi``;
        ``"c_O(-1)"``: powers of the total class ``1 - xi``.
        """
        s = self.reduce(s)
        r = self.rank
        j = self._xi_index
        parts = self._split(s)
        coeffs = [
            GradedSeries(self.base_table, s.truncation,
                         {e[:j] + e[j + 1:]: c for e, c in parts.get(k, GradedSeries.zero(self.table)).terms.items()})
            for k in range(r + 1)
        ]
        if basis == "xi":
            return coeffs
        if basis == "c1_O(-1)":
            return [c if k % 2 == 0 else -c for k, c in enumerate(coeffs)]
        if basis == "c_O(-1)":
            # xi = 1 - y with y = 1 - xi
            from math import comb

            out = []
            for i in range(r + 1):
                acc = GradedSeries.zero(self.base_table, s.truncation)
                for k in range(i, r + 1):
                    acc = acc + coeffs[k] * (comb(k, i) * (-1) ** i)
                out.append(acc)
            return out
        raise ValueError(f"unknown basis {basis!r}")

    def from_coordinates(self, coeffs: list[GradedSeries], basis: Basis = "xi") -> GradedSeries:
        if basis == "xi":
            gen = self.xi
        elif basis == "c1_O(-1)":
            gen = -self.xi
        elif basis == "c_O(-1)":
            gen = 1 - self.xi
        else:
            raise ValueError(f"unknown basis {basis!r}")
        acc = GradedSeries.zero(self.table, self.truncation)
        for k, c in enumerate(coeffs):
            acc = acc + self.pullback(c) * gen ** k
        return self.reduce(acc)

    # -- identities -------------------------------------------------------

    def verify_taut_todd(self) -> Verification:
        """``pi_*(c_r(Q) Td^{-1}(Q)) = Td^{-1}(N)``."""
        lhs = self.pushforward(self.mul(top_chern(self.Q), todd_inverse(self.Q)))
        rhs = todd_inverse(self.base_bundle)
        residual = lhs - rhs
        return Verification(residual.is_zero(), residual)

    def verify_normalization(self) -> Verification:
        """``pi_*(c_r(Q) Td(O(-1))) = 1`` with ``c1(O(-1)) = -xi``."""
        O_minus = FormalBundle(1, [-self.xi], self.table, self.truncation)
        lhs = self.pushforward(self.mul(top_chern(self.Q), todd(O_minus)))
        residual = lhs - 1
        return Verification(residual.is_zero(), residual)

    def koszul_ch(self, F: FormalBundle | None = None) -> GradedSeries:
        """``sum_k (-1)^k ch(Lambda^k Q^vee (x) pi^*F)``, reduced."""
        Qd = dual(self.Q)
        acc = GradedSeries.zero(self.table, self.truncation)
        for k in range(self.rank + 1):
            term = exterior_power_ch(Qd, k).ch
            acc = acc + term if k % 2 == 0 else acc - term
        if F is not None:
            acc = acc * chern_character(self._pull_bundle(F)).ch
        return self.reduce(acc)

    def _pull_bundle(self, F: FormalBundle) -> FormalBundle:
        if F.table != self.base_table:
            raise TableMismatch(f"bundle lives over {F.table!r}, expected the base {self.base_table!r}")
        return F.embed(self.table, min(F.truncation, self.truncation))

    def verify_grr_zero_section(self, F: FormalBundle) -> Verification:
        """Koszul complex of ``F`` against ``i_*(ch(F) Td^{-1}(N))``."""
        lhs = self.koszul_ch(F)
        rhs = self.zero_section_pushforward(chern_character(F).ch * todd_inverse(self.base_bundle))
        d = min(lhs.truncation, rhs.truncation)
        residual = lhs.truncate(d) - rhs.truncate(d)
        return Verification(residual.is_zero(), residual)


def _lift(s: GradedSeries, truncation: int) -> GradedSeries:
    return GradedSeries._raw(s.table, truncation, dict(s.terms))


def build(N: FormalBundle, fiber: str = "xi") -> ProjCompletion:
    return ProjCompletion(N, fiber)


def pushforward(pc: ProjCompletion, s: GradedSeries) -> GradedSeries:
    return pc.pushforward(s)


def zero_section_pushforward(pc: ProjCompletion, alpha: GradedSeries) -> GradedSeries:
    return pc.zero_section_pushforward(alpha)


def verify_taut_todd(pc: ProjCompletion) -> Verification:
    return pc.verify_taut_todd()


def verify_normalization(pc: ProjCompletion) -> Verification:
    return pc.verify_normalization()


def verify_grr_zero_section(pc: ProjCompletion, F: FormalBundle) -> Verification:
    return pc.verify_grr_zero_section(F)
