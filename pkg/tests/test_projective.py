import random

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from ccforge.bundles import BundleError, FormalBundle, chern_character, direct_sum, todd_inverse, top_chern, total_chern
from ccforge.projective import (
    ProjCompletion,
    build,
    pushforward,
    verify_grr_zero_section,
    verify_normalization,
    verify_taut_todd,
    zero_section_pushforward,
)
from ccforge.series import GeneratorTable, GradedSeries, TableMismatch
from helpers import BASE3, from_sympy, random_bundle, random_series

LINES = GeneratorTable.of(("x1", 1), ("x2", 1), ("x3", 1))


def split_bundle(rank, d):
    acc = FormalBundle.line(LINES, "x1", d)
    for n in LINES.names[1:rank]:
        acc = direct_sum(acc, FormalBundle.line(LINES, n, d))
    return acc


def test_rank_one_relation_and_quotient():
    N = FormalBundle.universal(1, truncation=4)
    pc = build(N)
    c1 = pc.N.c(1)
    assert pc.reduce(pc.xi**2) == -c1 * pc.xi
    assert pc.Q.c(1) == c1 + pc.xi
    assert pc.Q_ch.rank == 1


def test_rank_two_quotient_rank():
    pc = build(FormalBundle.universal(2, truncation=4))
    assert pc.Q_ch.ch.constant_term == 2


def test_quotient_chern_times_one_minus_xi():
    for r in (1, 2, 3):
        pc = build(FormalBundle.universal(r, truncation=6))
        assert pc.reduce(total_chern(pc.Q) * (1 - pc.xi)) == pc.reduce(total_chern(pc.N))


def test_quotient_ch_consistent_with_chern_classes():
    for r in (1, 2, 3):
        pc = build(FormalBundle.universal(r, truncation=6))
        assert pc.reduce(chern_character(pc.Q).ch) == pc.Q_ch.ch


def test_rank_zero_rejected():
    with pytest.raises(BundleError):
        ProjCompletion(FormalBundle(0, [], BASE3, 4))


def test_fiber_name_clash():
    with pytest.raises(ValueError):
        ProjCompletion(FormalBundle.universal(1, truncation=3), fiber="c1")


def test_pushforward_examples():
    for r in (1, 2, 3):
        pc = build(FormalBundle.universal(r, truncation=6))
        assert pushforward(pc, pc.xi**r) == 1
        assert pushforward(pc, GradedSeries.one(pc.table, 6)).is_zero()
        for i in range(r):
            assert pushforward(pc, pc.xi**i).is_zero()
    pc = build(FormalBundle.universal(1, truncation=6))
    assert pushforward(pc, pc.xi**2) == -pc.base_bundle.c(1).truncate(5)


def test_pushforward_reduced_equals_unreduced():
    for r in (1, 2, 3):
        pc = build(FormalBundle.universal(r, truncation=7))
        for k in range(8):
            s = pc.xi**k
            assert pc.pushforward(pc.reduce(s)) == pc.pushforward(s)


@pytest.mark.parametrize("rank", [1, 2, 3])
def test_pushforward_against_residue_formula(rank):
    """pi_*(xi^k) = sum_j rho_j^k / P'(rho_j) over the roots of P(t) = t prod(t + x_i)."""
    d = 6
    pc = build(split_bundle(rank, d))
    xs = [sp.Symbol(n) for n in LINES.names[:rank]]
    t = sp.Symbol("t")
    P = t * sp.prod([t + x for x in xs])
    dP = sp.diff(P, t)
    rho = [sp.Integer(0)] + [-x for x in xs]
    for k in range(d + 1):
        expr = sp.cancel(sp.together(sum(r**k / dP.subs(t, r) for r in rho)))
        expect = from_sympy(expr, LINES, d - rank)
        assert pc.pushforward(pc.xi**k) == expect


def test_zero_section_examples():
    for r in (1, 2, 3):
        pc = build(FormalBundle.universal(r, truncation=6))
        assert zero_section_pushforward(pc, GradedSeries.one(pc.base_table, 6)) == top_chern(pc.Q)
        assert zero_section_pushforward(pc, GradedSeries.zero(pc.base_table, 6)).is_zero()
        # the zero section misses the hyperplane at infinity
        assert pc.mul(top_chern(pc.Q), pc.xi).is_zero()


def test_pullback_rejects_foreign_class():
    pc = build(FormalBundle.universal(1, truncation=3))
    with pytest.raises(TableMismatch):
        pc.pullback(GradedSeries.one(LINES, 3))


def test_basis_round_trips():
    rng = random.Random(7)
    for r in (1, 2, 3):
        N = random_bundle(rng, r, truncation=6)
        pc = build(N)
        s = pc.reduce(random_series(rng, pc.table, 6, density=0.2))
        for basis in ("xi", "c1_O(-1)", "c_O(-1)"):
            coords = pc.coordinates(s, basis)
            assert len(coords) == r + 1
            assert pc.from_coordinates(coords, basis) == s
    with pytest.raises(ValueError):
        pc.coordinates(s, "bogus")


def test_o_minus_one_basis_signs():
    pc = build(FormalBundle.universal(2, truncation=4))
    coords = pc.coordinates(pc.xi, "c1_O(-1)")
    assert coords[1] == -1 and coords[0].is_zero()
    one_minus = pc.coordinates(1 - pc.xi, "c_O(-1)")
    assert one_minus[1] == 1 and one_minus[0].is_zero()


@pytest.mark.parametrize("rank", [1, 2, 3])
def test_identities_at_order_eight(rank):
    pc = build(FormalBundle.universal(rank, truncation=8))
    v = verify_taut_todd(pc)
    assert v and v.residual.is_zero()
    assert verify_normalization(pc)


def test_grr_examples():
    pc1 = build(FormalBundle.universal(1, truncation=6))
    assert verify_grr_zero_section(pc1, FormalBundle.trivial(1, pc1.base_table, 6))
    base = GeneratorTable.of(("c1", 1), ("c2", 2), ("f1", 1), ("f2", 2))
    N2 = FormalBundle.atomic(base, ["c1", "c2"], 6)
    assert verify_grr_zero_section(build(N2), FormalBundle.line(base, "f1", 6))
    base3 = GeneratorTable.of(("c1", 1), ("c2", 2), ("c3", 3), ("f1", 1), ("f2", 2))
    N3 = FormalBundle.atomic(base3, ["c1", "c2", "c3"], 8)
    assert verify_grr_zero_section(build(N3), FormalBundle.atomic(base3, ["f1", "f2"], 8))


def test_grr_requires_base_bundle():
    pc = build(FormalBundle.universal(1, truncation=4))
    with pytest.raises(TableMismatch):
        pc.verify_grr_zero_section(FormalBundle.line(LINES, "x1", 4))


def test_negative_controls():
    """Deliberately wrong variants of each identity must fail."""
    pc = build(FormalBundle.universal(2, truncation=6))
    N = pc.base_bundle
    # Td in place of Td^{-1}
    wrong = pc.pushforward(pc.mul(top_chern(pc.Q), todd_inverse(pc.Q).invert())) - todd_inverse(N)
    assert not wrong.is_zero()
    # Koszul sum against i_* without the Td^{-1}(N) factor
    F = FormalBundle.trivial(1, pc.base_table, 6)
    lhs = pc.koszul_ch(F)
    rhs = pc.zero_section_pushforward(chern_character(F).ch)
    assert not (lhs - rhs).is_zero()
    # c_r(Q) cannot be swapped for xi^r, although both push 1 to 1
    assert pc.pushforward(pc.xi**2) == 1
    swapped = pc.pushforward(pc.mul(pc.xi**2, todd_inverse(pc.Q))) - todd_inverse(N)
    assert not swapped.is_zero()


# -- properties ----------------------------------------------------------------

pc_args = st.tuples(st.integers(1, 3), st.integers(0, 2**32))


@settings(max_examples=30, deadline=None)
@given(pc_args)
def test_projection_formula(args):
    r, seed = args
    rng = random.Random(seed)
    pc = build(random_bundle(rng, r, truncation=5))
    alpha = random_series(rng, pc.base_table, 5, density=0.3)
    s = pc.reduce(random_series(rng, pc.table, 5, density=0.2))
    lhs = pc.pushforward(pc.mul(pc.pullback(alpha), s))
    rhs = alpha * pc.pushforward(s)
    d = min(lhs.truncation, rhs.truncation)
    assert lhs.truncate(d) == rhs.truncate(d)


@settings(max_examples=30, deadline=None)
@given(pc_args)
def test_push_after_zero_section_is_identity(args):
    r, seed = args
    rng = random.Random(seed)
    pc = build(random_bundle(rng, r, truncation=5))
    alpha = random_series(rng, pc.base_table, 5, density=0.3)
    out = pc.pushforward(pc.zero_section_pushforward(alpha))
    assert out == alpha.truncate(out.truncation)


@settings(max_examples=30, deadline=None)
@given(pc_args)
def test_push_after_pull_is_zero(args):
    r, seed = args
    rng = random.Random(seed)
    pc = build(random_bundle(rng, r, truncation=5))
    alpha = random_series(rng, pc.base_table, 5, density=0.3)
    assert pc.pushforward(pc.pullback(alpha)).is_zero()


@settings(max_examples=30, deadline=None)
@given(pc_args)
def test_reduction_idempotent_and_bounded(args):
    r, seed = args
    rng = random.Random(seed)
    pc = build(random_bundle(rng, r, truncation=5))
    s = random_series(rng, pc.table, 5, density=0.3)
    red = pc.reduce(s)
    assert pc.reduce(red) == red
    j = pc.table.index(pc.fiber)
    assert all(e[j] <= r for e in red.terms)
    # reduction does not change the pushforward
    assert pc.pushforward(red) == pc.pushforward(s)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 2), st.integers(1, 2), st.integers(0, 2**32))
def test_grr_on_random_composite_bundles(r, f, seed):
    rng = random.Random(seed)
    N = random_bundle(rng, r, truncation=5)
    F = random_bundle(rng, f, truncation=5)
    assert build(N).verify_grr_zero_section(F)
