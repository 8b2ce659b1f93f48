"""Formal vector bundles and their characteristic classes.

A :class:`FormalBundle` is a rank plus Chern classes ``c1..cr`` given as
series in some ambient ring.  Characteristic classes are computed once per
(rank, truncation) as universal series in ``c1..cr`` via the splitting
principle, then evaluated on a bundle by substituting its Chern classes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Literal, Mapping, Sequence

from .series import (
    DEFAULT_TRUNCATION,
    GeneratorTable,
    GradedSeries,
    OneVarSeries,
    SeriesError,
    TableMismatch,
    substitute,
)
from .symfunc import RootContext, power_sums_from_chern, symmetrize_to_chern

MAX_RANK = 8


class BundleError(ValueError):
    pass


def todd_inverse_profile(order: int) -> OneVarSeries:
    """``(1 - e^{-x}) / x = sum (-x)^k / (k+1)!``."""
    return OneVarSeries.from_function(lambda k: Fraction((-1) ** k, math.factorial(k + 1)), order)


def todd_profile(order: int) -> OneVarSeries:
    """``x / (1 - e^{-x})``, obtained by inverting :func:`todd_inverse_profile`."""
    return todd_inverse_profile(order).invert()


@dataclass(frozen=True)
class Genus:
    """Additive or multiplicative genus with one-variable profile ``g``.

    A profile given as a plain list is known only up to its length; pass
    ``polynomial=True`` when the list is the whole polynomial.
    """

    kind: Literal["additive", "multiplicative"]
    profile: OneVarSeries

    def __post_init__(self):
        if self.kind not in ("additive", "multiplicative"):
            raise BundleError(f"unknown genus kind {self.kind!r}")
        if self.kind == "multiplicative" and self.profile[0] != 1:
            raise BundleError("a multiplicative genus needs profile g(0) = 1")

    @classmethod
    def additive(cls, coeffs: Sequence[Any] | OneVarSeries, polynomial: bool = False) -> Genus:
        prof = coeffs if isinstance(coeffs, OneVarSeries) else OneVarSeries.of(coeffs, polynomial)
        return cls("additive", prof)

    @classmethod
    def multiplicative(cls, coeffs: Sequence[Any] | OneVarSeries, polynomial: bool = False) -> Genus:
        prof = coeffs if isinstance(coeffs, OneVarSeries) else OneVarSeries.of(coeffs, polynomial)
        return cls("multiplicative", prof)

    @classmethod
    def todd(cls, order: int) -> Genus:
        return cls("multiplicative", todd_profile(order))

    @classmethod
    def todd_inverse(cls, order: int) -> Genus:
        return cls("multiplicative", todd_inverse_profile(order))

    @classmethod
    def chern_character(cls, order: int) -> Genus:
        return cls("additive", OneVarSeries.exp(order))

    def is_zero(self) -> bool:
        return self.kind == "additive" and self.profile.is_zero()


@dataclass(frozen=True)
class VirtualClass:
    """An element of K-theory seen through its Chern character."""

    rank: int
    ch: GradedSeries

    def __post_init__(self):
        if self.ch.constant_term != self.rank:
            raise BundleError(f"ch constant term {self.ch.constant_term} != rank {self.rank}")

    def __add__(self, other: VirtualClass) -> VirtualClass:
        return VirtualClass(self.rank + other.rank, self.ch + other.ch)

    def __neg__(self) -> VirtualClass:
        return VirtualClass(-self.rank, -self.ch)

    def __sub__(self, other: VirtualClass) -> VirtualClass:
        return self + (-other)

    def __mul__(self, other: VirtualClass) -> VirtualClass:
        return VirtualClass(self.rank * other.rank, self.ch * other.ch)

    @classmethod
    def zero(cls, table: GeneratorTable, truncation: int) -> VirtualClass:
        return cls(0, GradedSeries.zero(table, truncation))


@dataclass(frozen=True)
class FormalBundle:
    rank: int
    chern: tuple[GradedSeries, ...]
    table: GeneratorTable = field(compare=False)
    truncation: int = field(compare=False)

    def __init__(self, rank: int, chern: Sequence[GradedSeries], table: GeneratorTable | None = None,
                 truncation: int | None = None):
        chern = tuple(chern)
        if rank < 0:
            raise BundleError("rank must be non-negative")
        if rank > MAX_RANK:
            raise BundleError(f"rank {rank} exceeds the cap of {MAX_RANK}")
        if len(chern) != rank:
            raise BundleError(f"rank {rank} bundle needs {rank} Chern classes, got {len(chern)}")
        if chern:
            table = chern[0].table if table is None else table
            if any(c.table != table for c in chern):
                raise TableMismatch("Chern classes must share one generator table")
            d = min(c.truncation for c in chern)
            truncation = d if truncation is None else min(truncation, d)
            chern = tuple(c.truncate(truncation) if c.truncation > truncation else c for c in chern)
            for i, c in enumerate(chern, start=1):
                mw = c.min_weight()
                if mw is not None and mw < i:
                    raise BundleError(f"c{i} has terms of weight {mw} < {i}")
        else:
            table = GeneratorTable(()) if table is None else table
            truncation = DEFAULT_TRUNCATION if truncation is None else truncation
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "chern", chern)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "truncation", truncation)

    # -- constructors -----------------------------------------------------

    @classmethod
    def atomic(cls, table: GeneratorTable, names: Sequence[str], truncation: int = DEFAULT_TRUNCATION) -> FormalBundle:
        """Bundle whose Chern classes are the generators ``names`` (weights 1..r)."""
        for i, n in enumerate(names, start=1):
            if table.weights[table.index(n)] != i:
                raise BundleError(f"generator {n!r} must have weight {i} to serve as c{i}")
        return cls(len(names), [GradedSeries.generator(table, n, truncation) for n in names], table, truncation)

    @classmethod
    def universal(cls, rank: int, prefix: str = "c", truncation: int = DEFAULT_TRUNCATION) -> FormalBundle:
        ctx = RootContext(rank, chern_prefix=prefix)
        return cls.atomic(ctx.chern_table, ctx.chern_names, truncation)

    @classmethod
    def line(cls, table: GeneratorTable, name: str, truncation: int = DEFAULT_TRUNCATION) -> FormalBundle:
        return cls.atomic(table, [name], truncation)

    @classmethod
    def trivial(cls, rank: int, table: GeneratorTable, truncation: int = DEFAULT_TRUNCATION) -> FormalBundle:
        return cls(rank, [GradedSeries.zero(table, truncation)] * rank, table, truncation)

    # -- basic classes ----------------------------------------------------

    def c(self, i: int) -> GradedSeries:
        if i == 0:
            return GradedSeries.one(self.table, self.truncation)
        if i < 0 or i > self.rank:
            return GradedSeries.zero(self.table, self.truncation)
        return self.chern[i - 1]

    def embed(self, table: GeneratorTable, truncation: int | None = None) -> FormalBundle:
        d = self.truncation if truncation is None else truncation
        return FormalBundle(self.rank, [c.embed(table, d) for c in self.chern], table, d)

    def evaluate(self, universal: GradedSeries) -> GradedSeries:
        """Evaluate a series in ``c1..cr`` (a :class:`RootContext` Chern table) on this bundle."""
        ctx = RootContext(self.rank)
        if universal.table != ctx.chern_table:
            raise TableMismatch(f"universal class must live over {ctx.chern_table!r}")
        d = min(universal.truncation, self.truncation)
        if self.rank == 0:
            return GradedSeries.constant(self.table, universal.constant_term, d)
        images = dict(zip(ctx.chern_names, self.chern))
        return universal.compose(images, self.table, d)

    def to_json(self) -> dict[str, Any]:
        data: dict[str, Any] = {"rank": self.rank, "chern": [c.to_json() for c in self.chern]}
        if not self.chern:
            data["generators"] = self.table.to_json()
            data["truncation"] = self.truncation
        return data

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> FormalBundle:
        chern = [GradedSeries.from_json(c) for c in data.get("chern", [])]
        table = GeneratorTable.from_json(data["generators"]) if "generators" in data else None
        trunc = int(data["truncation"]) if "truncation" in data else None
        return cls(int(data["rank"]), chern, table, trunc)


# -- universal classes ------------------------------------------------------


@lru_cache(maxsize=None)
def universal_chern_character(rank: int, truncation: int) -> GradedSeries:
    ctx = RootContext(rank)
    acc = GradedSeries.constant(ctx.chern_table, rank, truncation)
    if truncation == 0:
        return acc
    for m, p in enumerate(power_sums_from_chern(rank, truncation, truncation), start=1):
        acc = acc + p * Fraction(1, math.factorial(m))
    return acc


def _profile_key(g: Genus) -> tuple:
    return (g.kind, g.profile.coeffs, g.profile.polynomial)


def universal_genus(genus: Genus, rank: int, truncation: int) -> GradedSeries:
    return _universal_genus(_profile_key(genus), rank, truncation)


@lru_cache(maxsize=None)
def _universal_genus(key: tuple, rank: int, truncation: int) -> GradedSeries:
    kind, coeffs, poly = key
    profile = OneVarSeries(coeffs, poly)
    ctx = RootContext(rank)
    if rank == 0:
        value = 0 if kind == "additive" else 1
        return GradedSeries.constant(ctx.chern_table, value, truncation)
    pieces = [substitute(profile, ctx.root(i, truncation)) for i in range(rank)]
    if kind == "additive":
        total = pieces[0]
        for p in pieces[1:]:
            total = total + p
    else:
        total = pieces[0]
        for p in pieces[1:]:
            total = total * p
    return symmetrize_to_chern(total, ctx)


@lru_cache(maxsize=None)
def universal_exterior_powers(rank: int, truncation: int) -> tuple[GradedSeries, ...]:
    """``ch(Lambda^k E)`` for k = 0..rank, from ``prod_i (1 + t e^{x_i})``."""
    ctx = RootContext(rank)
    table = ctx.root_table
    exp = OneVarSeries.exp(truncation)
    # coefficient list in the formal marker t
    poly: list[GradedSeries] = [GradedSeries.one(table, truncation)]
    for i in range(rank):
        e = substitute(exp, ctx.root(i, truncation))
        nxt = [GradedSeries.zero(table, truncation) for _ in range(len(poly) + 1)]
        for k, a in enumerate(poly):
            nxt[k] = nxt[k] + a
            nxt[k + 1] = nxt[k + 1] + a * e
        poly = nxt
    return tuple(symmetrize_to_chern(p, ctx) for p in poly)


# -- operations -------------------------------------------------------------


def chern_character(E: FormalBundle) -> VirtualClass:
    return VirtualClass(E.rank, E.evaluate(universal_chern_character(E.rank, E.truncation)))


def genus_evaluate(g: Genus, E: FormalBundle) -> GradedSeries:
    if g.profile.order < E.truncation and not g.profile.polynomial:
        d = g.profile.order
    else:
        d = E.truncation
    return E.evaluate(universal_genus(g, E.rank, d))


def todd(E: FormalBundle) -> GradedSeries:
    return genus_evaluate(Genus.todd(E.truncation), E)


def todd_inverse(E: FormalBundle) -> GradedSeries:
    return genus_evaluate(Genus.todd_inverse(E.truncation), E)


def total_chern(E: FormalBundle) -> GradedSeries:
    acc = E.c(0)
    for c in E.chern:
        acc = acc + c
    return acc


def top_chern(E: FormalBundle) -> GradedSeries:
    return E.c(E.rank)


def dual(E: FormalBundle) -> FormalBundle:
    return FormalBundle(E.rank, [c if i % 2 == 0 else -c for i, c in enumerate(E.chern, start=1)],
                        E.table, E.truncation)


def _check_same_ring(E: FormalBundle, F: FormalBundle) -> int:
    if E.table != F.table:
        raise TableMismatch(f"bundles live over different rings: {E.table!r} vs {F.table!r}")
    return min(E.truncation, F.truncation)


def direct_sum(E: FormalBundle, F: FormalBundle) -> FormalBundle:
    """Whitney sum: ``c(E + F) = c(E) c(F)``."""
    d = _check_same_ring(E, F)
    r = E.rank + F.rank
    chern = []
    for k in range(1, r + 1):
        acc = GradedSeries.zero(E.table, d)
        for i in range(max(0, k - F.rank), min(k, E.rank) + 1):
            acc = acc + E.c(i) * F.c(k - i)
        chern.append(acc)
    return FormalBundle(r, chern, E.table, d)


def tensor_line(E: FormalBundle, L: FormalBundle) -> FormalBundle:
    """Twist by a line bundle: every Chern root shifts by ``c1(L)``."""
    if L.rank != 1:
        raise BundleError("tensor_line needs a rank-1 bundle")
    d = _check_same_ring(E, L)
    ell = L.chern[0]
    r = E.rank
    chern = []
    for k in range(1, r + 1):
        acc = GradedSeries.zero(E.table, d)
        for i in range(k + 1):
            acc = acc + E.c(i) * ell ** (k - i) * math.comb(r - i, k - i)
        chern.append(acc)
    return FormalBundle(r, chern, E.table, d)


def exterior_power_ch(E: FormalBundle, k: int) -> VirtualClass:
    if k < 0:
        raise BundleError("exterior power degree must be non-negative")
    if k > E.rank:
        return VirtualClass.zero(E.table, E.truncation)
    universal = universal_exterior_powers(E.rank, E.truncation)[k]
    return VirtualClass(math.comb(E.rank, k), E.evaluate(universal))


def koszul_alternating_ch(E: FormalBundle) -> VirtualClass:
    """``sum_k (-1)^k ch(Lambda^k E^vee)``; equals ``c_r(E) Td^{-1}(E)``."""
    if E.rank < 1:
        raise BundleError("the Koszul sum needs rank >= 1")
    Ed = dual(E)
    acc = VirtualClass.zero(E.table, E.truncation)
    for k in range(E.rank + 1):
        term = exterior_power_ch(Ed, k)
        acc = acc + term if k % 2 == 0 else acc - term
    return acc


def merge_tables(*tables: GeneratorTable) -> GeneratorTable:
    out = GeneratorTable(())
    for t in tables:
        out = out.union(t)
    return out


def common_ring(*bundles: FormalBundle) -> tuple[FormalBundle, ...]:
    """Embed bundles given over different tables into their union."""
    table = merge_tables(*(b.table for b in bundles))
    d = min(b.truncation for b in bundles)
    return tuple(b.embed(table, d) for b in bundles)


__all__ = [
    "BundleError",
    "FormalBundle",
    "Genus",
    "MAX_RANK",
    "SeriesError",
    "VirtualClass",
    "chern_character",
    "common_ring",
    "direct_sum",
    "dual",
    "exterior_power_ch",
    "genus_evaluate",
    "koszul_alternating_ch",
    "merge_tables",
    "tensor_line",
    "todd",
    "todd_inverse",
    "todd_inverse_profile",
    "todd_profile",
    "top_chern",
    "total_chern",
    "universal_chern_character",
    "universal_exterior_powers",
    "universal_genus",
]
