"""Shared generators and sympy bridges for the test suite."""

import random
from fractions import Fraction

import sympy as sp
from hypothesis import strategies as st

from ccforge.bundles import FormalBundle
from ccforge.series import GeneratorTable, GradedSeries

MIXED = GeneratorTable.of(("c1", 1), ("c2", 2), ("x", 1))
BASE3 = GeneratorTable.of(("a1", 1), ("a2", 2), ("a3", 3))


def monomials(table, max_weight):
    """All exponent vectors of weight <= max_weight."""
    out = [()]
    for w in table.weights:
        out = [e + (k,) for e in out for k in range(max_weight // w + 1)]
    return [e for e in out if table.weight_of(e) <= max_weight]


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def series(draw, table=MIXED, truncation=None, max_terms=6, unit=False):
    d = draw(st.integers(0, 5)) if truncation is None else truncation
    monos = monomials(table, d)
    picked = draw(st.lists(st.sampled_from(monos), max_size=max_terms, unique=True))
    terms = {e: draw(rationals) for e in picked}
    if unit:
        terms[(0,) * len(table)] = draw(rationals.filter(bool))
    return GradedSeries(table, d, terms)


def random_series(rng: random.Random, table, truncation, min_weight=0, max_weight=None, density=0.5,
                  homogeneous=None):
    top = truncation if max_weight is None else max_weight
    terms = {}
    for e in monomials(table, top):
        w = table.weight_of(e)
        if w < min_weight or (homogeneous is not None and w != homogeneous):
            continue
        if rng.random() < density:
            terms[e] = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return GradedSeries(table, truncation, terms)


def random_bundle(rng: random.Random, rank, table=BASE3, truncation=5):
    """Composite bundle whose c_i are random weight-i polynomials in the base."""
    chern = [random_series(rng, table, truncation, homogeneous=i, density=0.7) for i in range(1, rank + 1)]
    return FormalBundle(rank, chern, table, truncation)


def to_sympy(s: GradedSeries):
    syms = {g.name: sp.Symbol(g.name) for g in s.table}
    expr = sp.Integer(0)
    for e, c in s.terms.items():
        m = sp.Rational(c.numerator, c.denominator)
        for g, k in zip(s.table, e):
            m *= syms[g.name] ** k
        expr += m
    return expr


def from_sympy(expr, table, truncation):
    """Exact expansion of a sympy expression, truncated by weight."""
    syms = [sp.Symbol(g.name) for g in table]
    expr = sp.expand(expr)
    if not syms:
        c = sp.Rational(expr)
        return GradedSeries.constant(table, Fraction(int(c.p), int(c.q)), truncation)
    terms = {}
    for monom, c in sp.Poly(expr, *syms).terms():
        c = sp.Rational(c)
        terms[tuple(monom)] = Fraction(int(c.p), int(c.q))
    return GradedSeries(table, truncation, terms)
