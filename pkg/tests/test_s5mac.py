import pytest

from dualvik import rel, s5mac, subord
from dualvik.boolalg import mk_algebra
from dualvik.errors import CapExceededError, ValidationError
from dualvik.rel import Relation
from dualvik.s5mac import S5Algebra

T = mk_algebra(["a", "b", "c"], "T")
P = mk_algebra(["p"], "P")
AB_C = rel.equivalence_from_blocks(T, [0b011, 0b100])


def all_s5(max_atoms=3):
    for n in range(max_atoms + 1):
        X = mk_algebra([f"x{i}" for i in range(n)], f"X{n}")
        for E in rel.all_equivalences(X):
            yield S5Algebra.from_equivalence(E)


def test_from_equivalence_is_s5():
    A = S5Algebra.from_equivalence(AB_C)
    assert s5mac.is_s5(A).ok
    assert A.describe().endswith("S[{a->a,a->b,b->a,b->b,c->c}])")


def test_non_s5_rejected_by_report():
    A = S5Algebra(T, subord.total(T, T))
    assert not s5mac.is_s5(A).ok


def test_s_ideals_are_saturated_downsets():
    A = S5Algebra.from_equivalence(AB_C)
    ideals = s5mac.s_ideals(A)
    assert [I.label for I in ideals] == ["down(0)", "down(a|b)", "down(c)", "down(1)"]
    assert all(s5mac.is_normal_ideal(I, A) for I in ideals)
    assert s5mac.normal_ideals(A) == ideals


def test_ideal_predicates():
    A = S5Algebra.from_equivalence(AB_C)
    down_a = sum(1 << m for m in range(8) if m & ~0b001 == 0)
    assert s5mac.is_ideal(T, down_a)
    # down(a) is an ideal but a is not saturated
    assert not s5mac.is_s_ideal_set(A, down_a)


@pytest.mark.parametrize("A", list(all_s5()), ids=lambda A: A.s.describe())
def test_macneille_of_every_small_s5(A):
    C = s5mac.macneille(A)
    k = len(rel.classes(A.s.dual))
    assert C.result.algebra.size == 2**k
    assert s5mac.is_devries(C.result).ok
    # the completion is the quotient point set
    assert C.result.algebra is rel.quotient(A.algebra, A.s.dual)[0]


def test_embedding_saturates_from_below():
    C = s5mac.macneille(S5Algebra.from_equivalence(AB_C))
    # a -> the largest saturated element below a
    assert [C.embed(m) for m in range(8)] == [0, 0, 0, 1, 2, 2, 2, 3]


def test_completion_of_devries_is_itself():
    A = S5Algebra.order(T)
    C = s5mac.macneille(A)
    assert C.result.algebra is T
    assert all(C.embed(m) == m for m in range(T.size))


def test_macneille_cap():
    X = mk_algebra([f"x{i}" for i in range(4)])
    with pytest.raises(CapExceededError):
        s5mac.macneille(S5Algebra.order(X))


def test_macneille_on_morphisms_is_functorial():
    A = S5Algebra.from_equivalence(AB_C)
    R = rel.compose(AB_C, rel.compose(Relation.from_pairs(T, T, [("a", "c")]), AB_C))
    U = subord.from_relation(R)
    assert s5mac.is_compatible(U, A, A)
    M = s5mac.macneille_morphism(U, A, A)
    assert M.dual.rows == (0b10, 0)
    I = s5mac.macneille_morphism(A.s, A, A)
    Q = s5mac.macneille(A).result
    assert I.dual == Relation.identity(Q.algebra)


def test_incompatible_morphism():
    A = S5Algebra.from_equivalence(AB_C)
    U = subord.from_relation(Relation.from_pairs(T, T, [("a", "c")]))
    assert not s5mac.is_compatible(U, A, A)


def test_l_s_on_one_atom():
    L = s5mac.l_s(S5Algebra.order(P))
    assert L.algebra.size == 4
    assert s5mac.is_devries(L).ok


def test_l_s_needs_devries():
    with pytest.raises(ValidationError):
        s5mac.l_s(S5Algebra.from_equivalence(rel.equivalence_from_blocks(T, [0b111])))


def test_frames():
    F = s5mac.frame_of_algebra(P)
    assert F.size == 2 and F.is_distributive()
    assert F.pseudocomplement(F.bottom) == F.top
    J = s5mac.j_p(F)
    # the frame of S-ideals of V(2) with the em order
    assert J.size == 4
    assert J.is_lattice() and J.is_distributive()


def test_booleanize_si_frame():
    A = S5Algebra.from_equivalence(AB_C)
    F = s5mac.si_frame(A)
    assert F.size == 4 and F.is_distributive()
    Bz = s5mac.booleanize(F)
    assert Bz.algebra.atom_names == ("down(a|b)", "down(c)")
    assert s5mac.is_devries(Bz).ok
    assert s5mac.si_frame(A) is F


def test_j_p_preserves_composition_at_one_atom():
    A = S5Algebra.order(P)
    subs = [subord.from_relation(R) for R in rel.all_relations(P, P)]
    for T1 in subs:
        for T2 in subs:
            lhs = s5mac.j_p_morphism(subord.compose(T2, T1), A, A)
            rhs = rel.compose(s5mac.j_p_morphism(T2, A, A), s5mac.j_p_morphism(T1, A, A))
            assert lhs == rhs
    # the identity goes to inclusion of S-ideals, the identity of the frame
    F = s5mac.si_frame(s5mac.k_s5(A))
    incl = [sum(1 << k for k, J in enumerate(F.elements) if I & ~J == 0) for I in F.elements]
    assert s5mac.j_p_morphism(A.s, A, A).rows == tuple(incl)
