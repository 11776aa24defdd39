import random

import pytest
from hypothesis import given, settings, strategies as st

from dualvik import kalg, klift, rel, subord
from dualvik.boolalg import mk_algebra
from dualvik.errors import AlgebraMismatchError, CapExceededError, ValidationError
from dualvik.rel import Relation

A = mk_algebra(["p", "q"], "A")
B = mk_algebra(["u", "v"], "B")
C = mk_algebra(["s", "t"], "C")
A3 = mk_algebra(["p", "q", "r"], "A3")

flavors = st.sampled_from(klift.FLAVORS)


def subordinations(X, Y):
    rows = st.tuples(*[st.integers(0, Y.top_mask) for _ in range(X.n)])
    return rows.map(lambda r: subord.from_relation(Relation(X, Y, r)))


def T(text, base):
    return kalg.parse_term(text, base)


S_PAR = subord.from_relation(Relation.from_pairs(A, B, [("p", "u"), ("q", "v")]))


@pytest.mark.parametrize(
    "flavor, x, y, expected",
    [
        ("box", "box(p)", "box(u)", True),
        ("box", "dia(p)", "dia(u)", False),
        ("diamond", "box(p)", "box(u)", False),
        ("diamond", "dia(p)", "dia(u)", True),
        ("em", "box(p)", "box(u)", True),
        ("em", "dia(p)", "dia(u)", True),
        ("em", "dia(p)", "dia(v)", False),
        ("em", "box(p) & dia(q)", "dia(v)", True),
    ],
)
def test_parallel_arrows(flavor, x, y, expected):
    assert klift.lift_subord(S_PAR, flavor).holds(T(x, A), T(y, B)) is expected


def test_witness_rendering():
    v = klift.lift_subord(S_PAR, "em").explain(T("dia(p)", A), T("dia(u)", B))
    assert [w.render() for w in v.witnesses] == ["(i=0, j=0, l=0)"]
    v = klift.lift_subord(S_PAR, "box").explain(T("dia(p)", A), T("dia(u)", B))
    assert v.failure == (0, 0) and not v.holds


def test_unknown_flavor():
    with pytest.raises(ValidationError):
        klift.lift_subord(S_PAR, "both")


def test_normal_forms_must_match_bases():
    K = klift.lift_subord(S_PAR, "em")
    with pytest.raises(AlgebraMismatchError):
        K.explain_nf(kalg.to_dnf(T("box(u)", B), B), kalg.to_cnf(T("box(u)", B), B))


def test_matrix_cap():
    S = subord.total(A3, A3)
    with pytest.raises(CapExceededError):
        klift.lift_subord(S, "em").matrix()


@settings(max_examples=25, deadline=None)
@given(subordinations(A, B), flavors)
def test_lift_is_a_subordination(S, flavor):
    m = klift.lift_subord(S, flavor).matrix()
    assert subord.check_axioms(m, subord.BASE_AXIOMS).ok


@settings(max_examples=25, deadline=None)
@given(subordinations(A, B), flavors, st.integers(0, 2**16 - 1), st.integers(0, 2**16 - 1))
def test_decider_is_independent_of_representation(S, flavor, v, w):
    # arbitrary terms and canonical value forms give the same verdict
    rng = random.Random(v ^ w)
    x, y = kalg.random_term(A, rng, 3), kalg.random_term(B, rng, 3)
    K = klift.lift_subord(S, flavor)
    vx, vy = kalg.eval_semantic(x, A).mask, kalg.eval_semantic(y, B).mask
    assert K.holds(x, y) == K.holds_value(vx, vy) == K.matrix().holds(vx, vy)


@settings(max_examples=20, deadline=None)
@given(subordinations(A, B), subordinations(B, C), flavors)
def test_composition_with_interpolant(S, U, flavor):
    rep = klift.check_composition(S, U, flavor)
    assert rep.ok, rep


def test_identity_only_for_em():
    assert klift.check_identity(A, "em").ok
    assert not klift.check_identity(A, "box").ok
    assert not klift.check_identity(A, "diamond").ok


@settings(max_examples=25, deadline=None)
@given(subordinations(A, B))
def test_dagger_laws(S):
    reps = klift.check_dagger(S)
    assert [r.law for r in reps] == ["dagger-box", "dagger-diamond", "dagger-em"]
    assert all(r.ok for r in reps)


def test_interpolant_is_explicit():
    S = subord.from_relation(Relation.from_pairs(A, B, [("p", "u")]))
    U = subord.from_relation(Relation.from_pairs(B, C, [("u", "t")]))
    x, y = T("box(p) & dia(p)", A), T("dia(t)", C)
    z = klift.interpolant(S, U, "em", x, y)
    assert z is not None
    assert klift.lift_subord(S, "em").holds(x, z)
    assert klift.lift_subord(U, "em").holds(z, y)
    assert klift.interpolant(S, U, "em", T("box(q)", A), y) is None


def test_sampled_composition_over_three_atoms():
    rng = random.Random(5)
    S = subord.from_relation(rel.random_relation(A3, A3, rng))
    U = subord.from_relation(rel.random_relation(A3, A3, rng))
    for flavor in klift.FLAVORS:
        assert klift.check_composition_sampled(S, U, flavor, rng, samples=100).ok


def test_value_forms_are_canonical():
    for v in range(rel.vietoris(A).size):
        d, c = klift.value_dnf(A, v), klift.value_cnf(A, v)
        assert kalg.eval_dnf(d) == v and kalg.eval_cnf(c) == v
        assert klift.value_dnf(A, v) is d


def test_pair_hom_join_matches_oracle():
    rng = random.Random(1)
    mats = [subord.from_relation(rel.random_relation(A, A, rng)).pairs() for _ in range(2)]
    assert klift.pair_hom_join(mats) == subord.hom_join_oracle(mats)
