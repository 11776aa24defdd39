"""S5-subordination algebras, their MacNeille completion, and the finite
frame/booleanization pipeline.

An S5 algebra ``(B, S)`` with ``B`` finite is determined by the equivalence
``E = to_relation(S)`` on atoms: ``a S b`` iff the ``E``-saturation of ``a``
is below ``b``. Nothing here assumes that shortcut; S-ideals and normal
ideals are computed from their defining conditions and the finite theory is
checked in the tests.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from . import klift, rel, subord
from .boolalg import Algebra, check_cap, submasks
from .errors import AlgebraMismatchError, CapExceededError, CompatibilityError, ValidationError
from .rel import Relation
from .subord import AxiomReport, PairSet, Subordination

DEFAULT_CAP = 3


@dataclass(frozen=True)
class S5Algebra:
    algebra: Algebra
    s: Subordination

    def __post_init__(self):
        if self.s.source is not self.algebra or self.s.target is not self.algebra:
            raise AlgebraMismatchError("subordination must be an endo-relation on the algebra")

    @classmethod
    def order(cls, A: Algebra) -> "S5Algebra":
        return cls(A, subord.identity(A))

    @classmethod
    def from_equivalence(cls, E: Relation) -> "S5Algebra":
        return cls(E.source, subord.from_relation(E))

    def describe(self) -> str:
        return f"({self.algebra!r}, {self.s.describe()})"


def is_s5(A: S5Algebra) -> AxiomReport:
    return subord.check_axioms(A.s, subord.S5_AXIOMS)


def is_devries(A: S5Algebra) -> AxiomReport:
    """S1–S8; completeness is automatic for finite algebras."""
    return subord.check_axioms(A.s, subord.ALL_AXIOMS)


def is_compatible(T: Subordination, src: S5Algebra, tgt: S5Algebra) -> bool:
    """``T ∘ S₁ = T = S₂ ∘ T``."""
    if T.source is not src.algebra or T.target is not tgt.algebra:
        raise AlgebraMismatchError("morphism does not run between the given algebras")
    return subord.compose(T, src.s) == T and subord.compose(tgt.s, T) == T


# S-ideals ----------------------------------------------------------------------


def _down(m: int) -> int:
    """``↓m`` as a bitmask over element masks."""
    return sum(1 << x for x in submasks(m))


def _members(bits: int) -> list[int]:
    out = []
    x = 0
    while bits:
        if bits & 1:
            out.append(x)
        bits >>= 1
        x += 1
    return out


@dataclass(frozen=True)
class SIdeal:
    algebra: Algebra
    members: int
    generator: int

    @property
    def label(self) -> str:
        return f"down({self.algebra.render(self.generator)})"

    def __contains__(self, m: int) -> bool:
        return bool(self.members >> m & 1)


def is_ideal(A: Algebra, members: int) -> bool:
    """Nonempty, downward closed and closed under binary joins."""
    if not members & 1:
        return False
    elems = _members(members)
    for x in elems:
        if any(not members >> y & 1 for y in submasks(x)):
            return False
        if any(not members >> (x | y) & 1 for y in elems):
            return False
    return True


def is_s_ideal_set(A: S5Algebra, members: int) -> bool:
    """Ideal with every member ``S``-below some member."""
    if not is_ideal(A.algebra, members):
        return False
    elems = _members(members)
    return all(any(A.s.holds(x, y) for y in elems) for x in elems)


def s_ideals(A: S5Algebra, cap: int = DEFAULT_CAP) -> list[SIdeal]:
    """All S-ideals, ordered by generator. Finite ideals are principal, so
    each ``↓a`` is tested against the S-ideal condition."""
    B = A.algebra
    check_cap(B.n, cap)
    out = []
    for a in range(B.size):
        members = _down(a)
        if is_s_ideal_set(A, members):
            out.append(SIdeal(B, members, a))
    return out


def is_normal_ideal(I: SIdeal, A: S5Algebra) -> bool:
    """``I = S⁻¹[(S[Iᵘ])ˡ]``, computed step by step."""
    B = A.algebra
    members = _members(I.members)
    uppers = [b for b in range(B.size) if all(x & ~b == 0 for x in members)]
    image = {c for b in uppers for c in range(B.size) if A.s.holds(b, c)}
    lowers = [e for e in range(B.size) if all(e & ~c == 0 for c in image)]
    pre = 0
    for x in range(B.size):
        if any(A.s.holds(x, e) for e in lowers):
            pre |= 1 << x
    return pre == I.members


def normal_ideals(A: S5Algebra, cap: int = DEFAULT_CAP) -> list[SIdeal]:
    return [I for I in s_ideals(A, cap) if is_normal_ideal(I, A)]


# MacNeille completion --------------------------------------------------------------


@dataclass(frozen=True)
class Completion:
    """The completion of ``source`` together with the map ``a ↦ {x : x S a}``.

    ``blocks[k]`` is the generator (a mask over ``source`` atoms) of the
    ``k``-th minimal nonzero normal ideal; these are the atoms of ``result``.
    """

    source: S5Algebra
    result: S5Algebra
    blocks: tuple[int, ...]

    def ideal_of(self, m: int) -> int:
        """Generator of the normal ideal that the result element ``m`` stands for."""
        g = 0
        for k, b in enumerate(self.blocks):
            if m >> k & 1:
                g |= b
        return g

    def embed(self, a: int) -> int:
        """The normal ideal ``{x : x S a}`` as an element of the completion."""
        down = 0
        for x in range(self.source.algebra.size):
            if self.source.s.holds(x, a):
                down |= x
        return sum(1 << k for k, b in enumerate(self.blocks) if b & ~down == 0)


def macneille(A: S5Algebra, cap: int = DEFAULT_CAP) -> Completion:
    B = A.algebra
    ideals = normal_ideals(A, cap)
    nonzero = [I for I in ideals if I.generator != 0]
    minimal = [I for I in nonzero if not any(J is not I and J.members & ~I.members == 0 for J in nonzero)]
    blocks = tuple(sorted((I.generator for I in minimal), key=lambda g: g & -g))
    covered = 0
    for g in blocks:
        if g & covered:
            raise ValidationError("minimal normal ideals overlap; input is not an S5 algebra")
        covered |= g
    if covered != B.top_mask:
        raise ValidationError("minimal normal ideals do not cover the algebra; input is not an S5 algebra")
    N = rel.partition_algebra(B, blocks)

    def gen(m: int) -> int:
        return sum(b for k, b in enumerate(blocks) if m >> k & 1)

    # I S J iff some a in J has every member of I S-below it
    def related(m1: int, m2: int) -> bool:
        g1, g2 = gen(m1), gen(m2)
        return any(all(A.s.holds(x, a) for x in submasks(g1)) for a in submasks(g2))

    ps = PairSet.from_predicate(N, N, related)
    report = subord.check_axioms(ps, subord.BASE_AXIOMS)
    if not report.ok:
        raise ValidationError(f"completion relation violates {report.failures()[0].name}")
    return Completion(A, S5Algebra(N, subord.from_relation(ps.to_relation())), blocks)


def macneille_morphism(T: Subordination, src: S5Algebra, tgt: S5Algebra, cap: int = DEFAULT_CAP) -> Subordination:
    """The action of the completion on a compatible morphism.

    Defined by transport through finite duality: pass to the dual relation,
    descend to the quotients by the two equivalences, and read the quotient
    relation back as a subordination between the completions. This is a
    definitional choice; at finite scale it is forced up to isomorphism.
    """
    if not is_compatible(T, src, tgt):
        raise CompatibilityError("morphism is not compatible with the S5 structures")
    M1, M2 = macneille(src, cap), macneille(tgt, cap)
    Q = rel.quotient_relation(T.dual, src.s.dual, tgt.s.dual)
    if Q.source is not M1.result.algebra or Q.target is not M2.result.algebra:
        raise ValidationError("quotient point sets do not line up with the completions")
    return subord.from_relation(Q)


# K on S5 algebras and the composite L^S ------------------------------------------------


def _materialized(ps: PairSet) -> Subordination:
    return subord.from_relation(ps.to_relation())


def k_s5(A: S5Algebra, cap: int = klift.DEFAULT_EXHAUSTIVE_CAP) -> S5Algebra:
    """``K(B)`` materialized over semantic values, with the em lift of ``S``."""
    if A.algebra.n > cap:
        raise CapExceededError(f"K(B) is only materialized for bases with at most {cap} atoms")
    m = klift.lift_subord(A.s, "em").matrix(cap)
    return S5Algebra(m.source, _materialized(m))


def k_morphism(T: Subordination, cap: int = klift.DEFAULT_EXHAUSTIVE_CAP) -> Subordination:
    return _materialized(klift.lift_subord(T, "em").matrix(cap))


def l_s(A: S5Algebra, cap: int = klift.DEFAULT_EXHAUSTIVE_CAP) -> S5Algebra:
    """``M(K(Δ A))`` for a de Vries algebra ``A``."""
    report = is_devries(A)
    if not report.ok:
        raise ValidationError(f"input is not a de Vries algebra: {report.failures()[0].name} fails")
    return macneille(k_s5(A, cap), cap=2 ** cap).result


def l_s_morphism(T: Subordination, src: S5Algebra, tgt: S5Algebra, cap: int = klift.DEFAULT_EXHAUSTIVE_CAP) -> Subordination:
    if not is_compatible(T, src, tgt):
        raise CompatibilityError("morphism is not compatible with the S5 structures")
    return macneille_morphism(k_morphism(T, cap), k_s5(src, cap), k_s5(tgt, cap), cap=2 ** cap)


# finite frames --------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteFrame:
    """A finite lattice of sets ordered by inclusion.

    ``elements`` are bitmasks over some universe; meets and joins are found
    by search among them, not assumed to be intersections and unions.
    """

    elements: tuple[int, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.elements) != len(self.labels):
            raise ValidationError("one label per frame element")
        if len(set(self.elements)) != len(self.elements):
            raise ValidationError("frame elements must be distinct")

    @property
    def size(self) -> int:
        return len(self.elements)

    def leq(self, i: int, j: int) -> bool:
        return self.elements[i] & ~self.elements[j] == 0

    def _extreme(self, cands: list[int], lowest: bool) -> Optional[int]:
        for c in cands:
            if all(self.leq(c, d) if lowest else self.leq(d, c) for d in cands):
                return c
        return None

    def meet(self, i: int, j: int) -> int:
        lower = [k for k in range(self.size) if self.leq(k, i) and self.leq(k, j)]
        m = self._extreme(lower, lowest=False)
        if m is None:
            raise ValidationError("not a lattice: meet does not exist")
        return m

    def join(self, i: int, j: int) -> int:
        upper = [k for k in range(self.size) if self.leq(i, k) and self.leq(j, k)]
        m = self._extreme(upper, lowest=True)
        if m is None:
            raise ValidationError("not a lattice: join does not exist")
        return m

    @property
    def bottom(self) -> int:
        return self._extreme(list(range(self.size)), lowest=True)

    @property
    def top(self) -> int:
        return self._extreme(list(range(self.size)), lowest=False)

    def is_lattice(self) -> bool:
        try:
            for i in range(self.size):
                for j in range(self.size):
                    self.meet(i, j)
                    self.join(i, j)
        except ValidationError:
            return False
        return self.size > 0

    def is_distributive(self) -> bool:
        r = range(self.size)
        return all(
            self.meet(a, self.join(b, c)) == self.join(self.meet(a, b), self.meet(a, c)) for a in r for b in r for c in r
        )

    def pseudocomplement(self, i: int) -> int:
        """The largest ``x`` with ``i ∧ x = 0``, by exhaustive join."""
        bot = self.bottom
        acc = bot
        for k in range(self.size):
            if self.meet(i, k) == bot:
                acc = self.join(acc, k)
        return acc

    @functools.cached_property
    def points(self) -> Algebra:
        """The element set as a point set, for relations between frames."""
        return Algebra(self.labels, name="frame")


def si_frame(A: S5Algebra, cap: int = DEFAULT_CAP) -> FiniteFrame:
    """The S-ideals under inclusion. Cached, so relations between frames line up."""
    check_cap(A.algebra.n, cap)
    return _si_frame(A)


@functools.lru_cache(maxsize=None)
def _si_frame(A: S5Algebra) -> FiniteFrame:
    ideals = s_ideals(A, A.algebra.n)
    return FiniteFrame(tuple(I.members for I in ideals), tuple(I.label for I in ideals))


def booleanize(L: FiniteFrame) -> S5Algebra:
    """Regular elements ``a = a**`` with the well-inside relation ``a* ∨ b = 1``."""
    pc = [L.pseudocomplement(i) for i in range(L.size)]
    regular = [i for i in range(L.size) if pc[pc[i]] == i]
    bot, top = L.bottom, L.top
    nonzero = [i for i in regular if i != bot]
    atoms = [i for i in nonzero if not any(j != i and L.leq(j, i) for j in nonzero)]
    B = Algebra(tuple(L.labels[i] for i in atoms), name="booleanized")
    by_atoms = {}
    for i in regular:
        m = sum(1 << k for k, a in enumerate(atoms) if L.leq(a, i))
        if m in by_atoms:
            raise ValidationError("regular elements are not determined by their atoms")
        by_atoms[m] = i
    if len(by_atoms) != B.size:
        raise ValidationError("regular elements do not form a boolean algebra on their atoms")
    ps = PairSet.from_predicate(B, B, lambda m1, m2: L.join(pc[by_atoms[m1]], by_atoms[m2]) == top)
    report = subord.check_axioms(ps, subord.BASE_AXIOMS)
    if not report.ok:
        raise ValidationError(f"well-inside relation violates {report.failures()[0].name}")
    return S5Algebra(B, _materialized(ps))


def frame_of_algebra(B: Algebra) -> FiniteFrame:
    """A finite boolean algebra as a frame of sets."""
    return FiniteFrame(tuple(range(B.size)), tuple(B.render(m) for m in range(B.size)))


def j_p(L: Union[FiniteFrame, S5Algebra], cap: int = klift.DEFAULT_EXHAUSTIVE_CAP) -> FiniteFrame:
    """``I(K(Δ(𝔅 L)))``. An S5 algebra input is read as its S-ideal frame first."""
    if isinstance(L, S5Algebra):
        L = si_frame(L)
    D = booleanize(L)
    return si_frame(k_s5(D, cap), cap=2 ** cap)


def ideal_relation(T: Subordination, src: S5Algebra, tgt: S5Algebra, cap: int = DEFAULT_CAP) -> Relation:
    """``I ~ J`` iff every member of ``I`` is ``T``-below some member of ``J``, between S-ideal frames."""
    F1, F2 = si_frame(src, cap), si_frame(tgt, cap)
    I1, I2 = s_ideals(src, cap), s_ideals(tgt, cap)
    rows = []
    for I in I1:
        xs = _members(I.members)
        row = 0
        for k, J in enumerate(I2):
            ys = _members(J.members)
            if all(any(T.holds(x, y) for y in ys) for x in xs):
                row |= 1 << k
        rows.append(row)
    return Relation(F1.points, F2.points, tuple(rows))


def j_p_morphism(T: Subordination, src: S5Algebra, tgt: S5Algebra, cap: int = klift.DEFAULT_EXHAUSTIVE_CAP) -> Relation:
    """The S-ideal relation induced by the em lift of a compatible ``T`` between de Vries algebras."""
    if not is_compatible(T, src, tgt):
        raise CompatibilityError("morphism is not compatible with the S5 structures")
    return ideal_relation(k_morphism(T, cap), k_s5(src, cap), k_s5(tgt, cap), cap=2 ** cap)
