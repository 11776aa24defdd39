import random

import pytest
from hypothesis import given, settings, strategies as st

from dualvik import rel
from dualvik.boolalg import mk_algebra
from dualvik.errors import AlgebraMismatchError, CapExceededError, CompatibilityError, ValidationError
from dualvik.rel import Relation

X = mk_algebra(["x0", "x1"], "X")
Y = mk_algebra(["y0", "y1", "y2"], "Y")
Z = mk_algebra(["z0", "z1"], "Z")


def relations(A, B):
    return st.tuples(*[st.integers(0, B.top_mask) for _ in range(A.n)]).map(lambda rows: Relation(A, B, rows))


def test_from_pairs_names_and_indices():
    R = Relation.from_pairs(X, Y, [("x0", "y2"), (1, 0)])
    assert R.rows == (0b100, 0b001)
    assert R.named_pairs() == [["x0", "y2"], ["x1", "y0"]]
    assert R.describe() == "{x0->y2,x1->y0}"


def test_row_out_of_range():
    with pytest.raises(AlgebraMismatchError):
        Relation(X, Z, (0b100, 0))
    with pytest.raises(ValidationError):
        Relation.from_pairs(X, Y, [(5, 0)])


def test_image_preimage():
    R = Relation.from_pairs(X, Y, [("x0", "y0"), ("x0", "y1"), ("x1", "y2")])
    assert R.image(0b01) == 0b011
    assert R.image(0b11) == 0b111
    assert R.preimage(0b100) == 0b10
    assert R.preimage(0) == 0


def test_compose_checks_ends():
    R = Relation.full(X, Y)
    with pytest.raises(AlgebraMismatchError):
        rel.compose(R, R)


@given(relations(X, Y), relations(Y, Z), relations(Z, X))
def test_compose_associative(R, S, T):
    assert rel.compose(T, rel.compose(S, R)) == rel.compose(rel.compose(T, S), R)


@given(relations(X, Y), relations(Y, Z))
def test_dagger_contravariant(R, S):
    assert rel.dagger(rel.compose(S, R)) == rel.compose(rel.dagger(R), rel.dagger(S))
    assert rel.dagger(rel.dagger(R)) == R


@given(relations(X, Y))
def test_identity_units(R):
    assert rel.compose(R, Relation.identity(X)) == R
    assert rel.compose(Relation.identity(Y), R) == R


def test_vietoris_indices_are_subsets():
    V = rel.vietoris(Y)
    assert V.size == 1 << 8
    assert V.atom_names[0b101] == "{y0,y2}"
    assert V.atom_names[0] == "{}"
    assert rel.vietoris(Y) is V


def test_vietoris_cap():
    with pytest.raises(CapExceededError):
        rel.vietoris(Y, cap=2)


def test_lifts_on_a_known_relation():
    # R = {x0 -> x1}: only nonempty sets inside the domain lift
    R = Relation.from_pairs(X, X, [("x0", "x1")])
    em = rel.lift_em(R)
    assert em.holds(0b00, 0b00)
    assert em.holds(0b01, 0b10)
    assert not em.holds(0b11, 0b10)
    box = rel.lift_box(R)
    assert box.holds(0b11, 0b10) and box.holds(0b11, 0)
    dia = rel.lift_diamond(R)
    assert dia.holds(0b01, 0b11)
    assert not dia.holds(0b10, 0b10)


@given(relations(X, Y))
def test_em_is_box_and_diamond(R):
    assert rel.lift_em(R) == rel.lift_box(R) & rel.lift_diamond(R)


@settings(max_examples=50)
@given(relations(X, Y), relations(Y, Z))
def test_lifts_preserve_composition(R, S):
    for lift in rel.LIFTS.values():
        assert lift(rel.compose(S, R)) == rel.compose(lift(S), lift(R))


def test_em_preserves_identity_box_does_not():
    V = rel.vietoris(X)
    assert rel.lift_em(Relation.identity(X)) == Relation.identity(V)
    assert rel.lift_box(Relation.identity(X)) != Relation.identity(V)


def test_intersection_counterexample():
    # em-lifting does not preserve intersections
    R1 = Relation.identity(X)
    R2 = R1.complement()
    top = X.top_mask
    assert not rel.lift_em(R1 & R2).holds(top, top)
    assert (rel.lift_em(R1) & rel.lift_em(R2)).holds(top, top)


def test_vietoris_box_diamond():
    assert rel.vietoris_box(X, 0b01) == 0b0011  # {} and {x0}
    assert rel.vietoris_diamond(X, 0b01) == 0b1010  # {x0} and {x0,x1}


def test_set_partitions_bell_numbers():
    assert [sum(1 for _ in rel.set_partitions(n)) for n in range(5)] == [1, 1, 2, 5, 15]


def test_equivalences_and_quotients():
    T = mk_algebra(["a", "b", "c"], "T")
    eqs = list(rel.all_equivalences(T))
    assert len(eqs) == 5
    assert all(rel.is_equivalence(E) for E in eqs)
    E = rel.equivalence_from_blocks(T, [0b011, 0b100])
    Q, p = rel.quotient(T, E)
    assert Q.atom_names == ("[a,b]", "[c]")
    assert p.rows == (0b01, 0b01, 0b10)
    assert rel.quotient(T, Relation.identity(T))[0] is T
    assert rel.partition_algebra(T, (0b011, 0b100)) is Q


def test_quotient_relation_requires_compatibility():
    T = mk_algebra(["a", "b", "c"], "T")
    E = rel.equivalence_from_blocks(T, [0b011, 0b100])
    with pytest.raises(CompatibilityError):
        rel.quotient_relation(Relation.from_pairs(T, T, [("a", "c")]), E, E)
    R = rel.compose(E, rel.compose(Relation.from_pairs(T, T, [("a", "c")]), E))
    Q = rel.quotient_relation(R, E, E)
    assert Q.rows == (0b10, 0)


def test_all_relations_count():
    assert sum(1 for _ in rel.all_relations(X, X)) == 16


def test_random_relation_is_seeded():
    a = rel.random_relation(X, Y, random.Random(3))
    b = rel.random_relation(X, Y, random.Random(3))
    assert a == b
