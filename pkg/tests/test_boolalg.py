import pytest
from hypothesis import given, strategies as st

from dualvik import boolalg
from dualvik.boolalg import mk_algebra
from dualvik.errors import AlgebraMismatchError, CapExceededError, ValidationError

B3 = mk_algebra(["p", "q", "r"], "B3")


def elements(A):
    return st.integers(0, A.top_mask).map(A.from_mask)


def test_sizes():
    assert B3.n == 3
    assert B3.size == 8
    assert B3.top_mask == 0b111
    assert B3.bot.mask == 0 and B3.top.mask == 0b111


def test_render_and_names():
    assert B3.render(0) == "0"
    assert B3.render(0b111) == "1"
    assert B3.render(0b101) == "p|r"
    assert B3.names_of(0b110) == ["q", "r"]
    assert B3.element(["q"]).mask == 0b010


def test_empty_algebra_is_two_valued_free():
    A = mk_algebra([])
    assert A.size == 1
    assert A.bot.mask == A.top.mask == 0


def test_bad_atoms():
    with pytest.raises(ValidationError):
        mk_algebra(["p", "p"])
    with pytest.raises(ValidationError):
        mk_algebra([""])


def test_unknown_atom():
    with pytest.raises(ValidationError):
        B3.element(["s"])


def test_identity_equality():
    other = mk_algebra(["p", "q", "r"], "B3")
    assert other is not B3
    with pytest.raises(AlgebraMismatchError):
        B3.atom(0) & other.atom(0)


def test_cap():
    boolalg.check_cap(3, 3)
    with pytest.raises(CapExceededError):
        boolalg.check_cap(4, 3)
    with pytest.raises(CapExceededError):
        boolalg.enumerate_elements(mk_algebra([f"a{i}" for i in range(5)]), cap=4)


def test_submasks_ascending():
    assert list(boolalg.submasks(0b101)) == [0b000, 0b001, 0b100, 0b101]
    assert list(boolalg.submasks(0)) == [0]


@given(elements(B3), elements(B3), elements(B3))
def test_boolean_laws(a, b, c):
    assert a & (b | c) == (a & b) | (a & c)
    assert ~(a & b) == ~a | ~b
    assert ~~a == a
    assert (a & ~a).is_bot and (a | ~a).is_top
    assert (a <= b) == ((a & b) == a)
    assert boolalg.leq(boolalg.meet(a, b), boolalg.join(a, c))


@given(elements(B3))
def test_strict_order(a):
    assert not a < a
    if not a.is_top:
        assert a < B3.top
