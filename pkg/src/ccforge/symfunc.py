"""Elementary symmetric functions, power sums and the splitting principle.

A symmetric series in Chern roots ``x1..xr`` is rewritten as a series in the
Chern classes ``c1..cr`` (``c_i = e_i(x)``) by leading-monomial reduction:
the lex-largest monomial ``x^a`` of a symmetric series is always
non-increasing, and ``prod e_i^(a_i - a_{i+1})`` has the same leading
monomial, so subtracting it strictly lowers the leading term.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .series import Exps, GeneratorTable, GradedSeries, SeriesError


class NotSymmetric(SeriesError):
    pass


@dataclass(frozen=True)
class RootContext:
    rank: int
    root_prefix: str = "x"
    chern_prefix: str = "c"

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be non-negative")

    @property
    def root_names(self) -> tuple[str, ...]:
        return tuple(f"{self.root_prefix}{i}" for i in range(1, self.rank + 1))

    @property
    def chern_names(self) -> tuple[str, ...]:
        return tuple(f"{self.chern_prefix}{i}" for i in range(1, self.rank + 1))

    @property
    def root_table(self) -> GeneratorTable:
        return GeneratorTable((n, 1) for n in self.root_names)

    @property
    def chern_table(self) -> GeneratorTable:
        return GeneratorTable((n, i) for i, n in enumerate(self.chern_names, start=1))

    def root(self, i: int, truncation: int) -> GradedSeries:
        return GradedSeries.generator(self.root_table, self.root_names[i], truncation)

    def chern(self, i: int, truncation: int) -> GradedSeries:
        """``c_i`` in the Chern ring; ``c_0 = 1`` and ``c_i = 0`` past the rank."""
        if i == 0:
            return GradedSeries.one(self.chern_table, truncation)
        if i > self.rank:
            return GradedSeries.zero(self.chern_table, truncation)
        return GradedSeries.generator(self.chern_table, self.chern_names[i - 1], truncation)


def elementary(ctx: RootContext, k: int, truncation: int) -> GradedSeries:
    """``e_k(x1..xr)`` as a series in the roots."""
    return _elementary(ctx.rank, k, truncation, ctx.root_prefix)


@lru_cache(maxsize=None)
def _elementary(rank: int, k: int, truncation: int, prefix: str) -> GradedSeries:
    ctx = RootContext(rank, prefix)
    table = ctx.root_table
    if k < 0 or k > rank:
        return GradedSeries.zero(table, truncation)
    terms = {}
    for subset in _subsets(rank, k):
        terms[tuple(1 if i in subset else 0 for i in range(rank))] = 1
    return GradedSeries(table, truncation, terms)


def _subsets(n: int, k: int):
    from itertools import combinations

    return (set(c) for c in combinations(range(n), k))


def power_sums_from_chern(rank: int, up_to: int, truncation: int | None = None) -> list[GradedSeries]:
    """Newton's identities: ``[p_1, ..., p_k]`` as series in ``c1..c_rank``.

    ``p_k = sum_{i<k} (-1)^(i-1) c_i p_{k-i} + (-1)^(k-1) k c_k``.
    """
    d = up_to if truncation is None else truncation
    if up_to > d:
        raise SeriesError(f"p_{up_to} lies above truncation {d}")
    ctx = RootContext(rank)
    sums: list[GradedSeries] = []
    for k in range(1, up_to + 1):
        acc = ctx.chern(k, d) * ((-1) ** (k - 1) * k)
        for i in range(1, k):
            if i > rank:
                break
            acc = acc + ctx.chern(i, d) * sums[k - i - 1] * (-1) ** (i - 1)
        sums.append(acc)
    return sums


def is_symmetric(s: GradedSeries, ctx: RootContext) -> bool:
    return all(_transpose(s, i) == s for i in range(ctx.rank - 1))


def _transpose(s: GradedSeries, i: int) -> GradedSeries:
    terms = {}
    for e, c in s.terms.items():
        f = list(e)
        f[i], f[i + 1] = f[i + 1], f[i]
        terms[tuple(f)] = c
    return GradedSeries._raw(s.table, s.truncation, terms)


@lru_cache(maxsize=4096)
def _dominant_product(rank: int, gaps: Exps, truncation: int) -> dict[Exps, Fraction]:
    """Non-increasing-exponent terms of ``prod e_i^gaps[i]`` in the roots."""
    ctx = RootContext(rank)
    prod = GradedSeries.one(ctx.root_table, truncation)
    for i, g in enumerate(gaps, start=1):
        if g:
            prod = prod * elementary(ctx, i, truncation) ** g
    return {e: c for e, c in prod.terms.items() if _dominant(e)}


def _dominant(e: Exps) -> bool:
    return all(e[i] >= e[i + 1] for i in range(len(e) - 1))


def symmetrize_to_chern(s: GradedSeries, ctx: RootContext, check: bool = True) -> GradedSeries:
    """Rewrite a symmetric series in the roots of ``ctx`` over ``c1..cr``."""
    if s.table != ctx.root_table:
        raise SeriesError(f"expected a series over {ctx.root_table!r}, got {s.table!r}")
    if check and not is_symmetric(s, ctx):
        raise NotSymmetric("series is not invariant under permutations of the roots")
    d = s.truncation
    r = ctx.rank
    work = {e: c for e, c in s.terms.items() if _dominant(e)}
    out: dict[Exps, Fraction] = {}
    while work:
        lead = max(work)
        c = work[lead]
        gaps = tuple(lead[i] - (lead[i + 1] if i + 1 < r else 0) for i in range(r))
        out[gaps] = out.get(gaps, 0) + c
        for e, v in _dominant_product(r, gaps, d).items():
            nv = work.get(e, 0) - c * v
            if nv:
                work[e] = nv
            else:
                work.pop(e, None)
    return GradedSeries(ctx.chern_table, d, out)


def expand_in_roots(s: GradedSeries, ctx: RootContext) -> GradedSeries:
    """Substitute ``c_i -> e_i(x)``; inverse of :func:`symmetrize_to_chern`."""
    d = s.truncation
    images = {name: elementary(ctx, i, d) for i, name in enumerate(ctx.chern_names, start=1)}
    if s.table != ctx.chern_table:
        raise SeriesError(f"expected a series over {ctx.chern_table!r}")
    if not images:
        return GradedSeries.constant(ctx.root_table, s.constant_term, d)
    return s.compose(images, ctx.root_table)
