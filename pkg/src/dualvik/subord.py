"""Subordinations between finite boolean algebras.

Every subordination ``S : A -> B`` between finite algebras is determined by a
relation ``R`` on atoms via ``a S b iff R[a] <= b``; that relation is the
canonical backing. :class:`PairSet` is the explicit element-level form. It is
what the axiom checker and the brute-force oracles work on, and it is also
used for subordinations between algebras that only exist materialized (the
lifted relations on K(B)).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from . import rel
from .boolalg import Algebra, AlgebraElement, check_cap, submasks
from .errors import AlgebraMismatchError, ValidationError
from .rel import Relation

DEFAULT_PAIR_CAP = 6

ALL_AXIOMS = ("S1", "S2", "S3", "S4", "S5", "S6", "S7", "S8")
BASE_AXIOMS = ALL_AXIOMS[:4]
S5_AXIOMS = ALL_AXIOMS[:7]

_pairs_lock = threading.Lock()


def _mask(x: Union[AlgebraElement, int], A: Algebra) -> int:
    if isinstance(x, AlgebraElement):
        if x.algebra is not A:
            raise AlgebraMismatchError(f"element of {x.algebra!r} used where {A!r} expected")
        return x.mask
    return x


@dataclass(frozen=True)
class PairSet:
    """A relation between the element sets of two algebras.

    ``rows[a]`` is a bitmask over the elements of ``target``: bit ``b`` is set
    iff ``a S b``.
    """

    source: Algebra
    target: Algebra
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.source.size:
            raise AlgebraMismatchError("pair set row count does not match the source algebra")

    @classmethod
    def from_predicate(cls, A: Algebra, B: Algebra, pred, cap: int = DEFAULT_PAIR_CAP) -> "PairSet":
        check_cap(A.n, cap, "atoms (pair-set cap)")
        check_cap(B.n, cap, "atoms (pair-set cap)")
        rows = []
        for a in range(A.size):
            rows.append(sum(1 << b for b in range(B.size) if pred(a, b)))
        return cls(A, B, tuple(rows))

    @classmethod
    def from_pairs(cls, A: Algebra, B: Algebra, pairs: Iterable[tuple[int, int]]) -> "PairSet":
        rows = [0] * A.size
        for a, b in pairs:
            a, b = _mask(a, A), _mask(b, B)
            if not (0 <= a < A.size and 0 <= b < B.size):
                raise ValidationError(f"pair ({a}, {b}) out of range")
            rows[a] |= 1 << b
        return cls(A, B, tuple(rows))

    def holds(self, a, b) -> bool:
        return bool(self.rows[_mask(a, self.source)] >> _mask(b, self.target) & 1)

    def pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a, r in enumerate(self.rows) for b in range(self.target.size) if r >> b & 1]

    def count(self) -> int:
        return sum(bin(r).count("1") for r in self.rows)

    def _same_ends(self, other: "PairSet") -> None:
        if other.source is not self.source or other.target is not self.target:
            raise AlgebraMismatchError("pair sets have different source/target")

    def __and__(self, other: "PairSet") -> "PairSet":
        self._same_ends(other)
        return PairSet(self.source, self.target, tuple(a & b for a, b in zip(self.rows, other.rows)))

    def __or__(self, other: "PairSet") -> "PairSet":
        self._same_ends(other)
        return PairSet(self.source, self.target, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def __le__(self, other: "PairSet") -> bool:
        self._same_ends(other)
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def first_difference(self, other: "PairSet") -> Optional[tuple[int, int]]:
        self._same_ends(other)
        for a, (r, s) in enumerate(zip(self.rows, other.rows)):
            d = r ^ s
            if d:
                return a, (d & -d).bit_length() - 1
        return None

    def to_relation(self) -> Relation:
        """``x R y`` iff for all ``(a, b)`` in the set, ``x in a`` implies ``y in b``."""
        A, B = self.source, self.target
        rows = [B.top_mask] * A.n
        for a, r in enumerate(self.rows):
            if not r:
                continue
            meet_b = B.top_mask
            for b in range(B.size):
                if r >> b & 1:
                    meet_b &= b
            for x in range(A.n):
                if a >> x & 1:
                    rows[x] &= meet_b
        return Relation(A, B, tuple(rows))


def pair_compose(T: PairSet, S: PairSet) -> PairSet:
    """Brute-force relation composition ``T ∘ S`` of element-level relations."""
    if S.target is not T.source:
        raise AlgebraMismatchError("cannot compose: target of S is not the source of T")
    rows = []
    for r in S.rows:
        out = 0
        b = 0
        while r:
            if r & 1:
                out |= T.rows[b]
            r >>= 1
            b += 1
        rows.append(out)
    return PairSet(S.source, T.target, tuple(rows))


def pair_dagger(S: PairSet) -> PairSet:
    """``b S† a`` iff ``¬a S ¬b``."""
    A, B = S.source, S.target
    rows = [0] * B.size
    for a, r in enumerate(S.rows):
        na = A.top_mask & ~a
        for b in range(B.size):
            if r >> b & 1:
                rows[B.top_mask & ~b] |= 1 << na
    return PairSet(B, A, tuple(rows))


@dataclass(frozen=True)
class Subordination:
    """A subordination ``source -> target`` backed by its dual relation on atoms."""

    source: Algebra
    target: Algebra
    dual: Relation
    _cache: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.dual.source is not self.source or self.dual.target is not self.target:
            raise AlgebraMismatchError("dual relation does not match the subordination's algebras")

    def holds(self, a, b) -> bool:
        a, b = _mask(a, self.source), _mask(b, self.target)
        return self.dual.image(a) & ~b == 0

    def image(self, a) -> int:
        """The least ``b`` with ``a S b``."""
        return self.dual.image(_mask(a, self.source))

    def pairs(self, cap: int = DEFAULT_PAIR_CAP) -> PairSet:
        with _pairs_lock:
            ps = self._cache.get("pairs")
            if ps is None:
                ps = _materialize(self, cap)
                self._cache["pairs"] = ps
        return ps

    def __le__(self, other: "Subordination") -> bool:
        if other.source is not self.source or other.target is not self.target:
            raise AlgebraMismatchError("subordinations have different source/target")
        return other.dual <= self.dual

    def describe(self) -> str:
        return f"S[{self.dual.describe()}]"


def _materialize(S: Subordination, cap: int) -> PairSet:
    B = S.target
    check_cap(S.source.n, cap, "atoms (pair-set cap)")
    check_cap(B.n, cap, "atoms (pair-set cap)")
    rows = []
    for a in range(S.source.size):
        lo = S.dual.image(a)
        # targets above R[a] are lo | (any subset of the rest)
        rows.append(sum(1 << (lo | m) for m in submasks(B.top_mask & ~lo)))
    return PairSet(S.source, B, tuple(rows))


# construction and duality --------------------------------------------------


def from_relation(R: Relation) -> Subordination:
    return Subordination(R.source, R.target, R)


def to_relation(S: Union[Subordination, PairSet]) -> Relation:
    if isinstance(S, PairSet):
        return S.to_relation()
    return S.dual


def identity(A: Algebra) -> Subordination:
    """The order ``≤``."""
    return from_relation(Relation.identity(A))


def total(A: Algebra, B: Algebra) -> Subordination:
    return from_relation(Relation.empty(A, B))


def from_pairs(A: Algebra, B: Algebra, pairs: Iterable[tuple[int, int]]) -> Subordination:
    """Load an explicit pair set, rejecting it with the failing axiom named unless S1–S4 hold."""
    ps = PairSet.from_pairs(A, B, pairs)
    report = check_axioms(ps, BASE_AXIOMS)
    if not report.ok:
        bad = report.failures()[0]
        raise ValidationError(f"pair set violates {bad.name}: witness {bad.render()}")
    return from_relation(ps.to_relation())


def compose(T: Subordination, S: Subordination) -> Subordination:
    """``T ∘ S``: first ``S``, then ``T``."""
    if S.target is not T.source:
        raise AlgebraMismatchError("cannot compose: target of S is not the source of T")
    return from_relation(rel.compose(T.dual, S.dual))


def dagger(S: Subordination) -> Subordination:
    """``b S† a`` iff ``¬a S ¬b``; dually the converse relation."""
    return from_relation(rel.dagger(S.dual))


def _common_ends(subs: Sequence[Subordination], source, target) -> tuple[Algebra, Algebra]:
    if subs:
        source, target = subs[0].source, subs[0].target
    if source is None or target is None:
        raise ValidationError("empty family needs an explicit source and target")
    for s in subs:
        if s.source is not source or s.target is not target:
            raise AlgebraMismatchError("hom-set operations need a common source and target")
    return source, target


def hom_meet(subs: Sequence[Subordination], source: Algebra = None, target: Algebra = None) -> Subordination:
    """Intersection; dually the union of the relations. The empty meet is total."""
    A, B = _common_ends(subs, source, target)
    R = Relation.empty(A, B)
    for s in subs:
        R = R | s.dual
    return from_relation(R)


def hom_join(subs: Sequence[Subordination], source: Algebra = None, target: Algebra = None) -> Subordination:
    """Least subordination containing all of ``subs``; dually the intersection of the relations."""
    A, B = _common_ends(subs, source, target)
    R = Relation.full(A, B)
    for s in subs:
        R = R & s.dual
    return from_relation(R)


def hom_join_oracle(
    subs: Sequence[Union[Subordination, PairSet]],
    source: Algebra = None,
    target: Algebra = None,
    cap: int = 3,
) -> PairSet:
    """Join by the decomposition formula, searched exhaustively.

    ``x`` is related to ``y`` iff ``x = ⋁F`` and ``y = ⋀G`` for finite ``F``,
    ``G`` with every pair of ``F × G`` in some member of the family. For a
    fixed ``G`` the largest admissible ``F`` below ``x`` is tried, which
    succeeds iff any ``F`` does.
    """
    if subs:
        source, target = subs[0].source, subs[0].target
    if source is None or target is None:
        raise ValidationError("empty family needs an explicit source and target")
    check_cap(source.n, cap)
    check_cap(target.n, cap)
    A, B = source, target
    union = [0] * A.size
    for s in subs:
        ps = s.pairs() if isinstance(s, Subordination) else s
        if ps.source is not A or ps.target is not B:
            raise AlgebraMismatchError("hom-set operations need a common source and target")
        for a, r in enumerate(ps.rows):
            union[a] |= r

    rows = [0] * A.size
    for y in range(B.size):
        ups = [b for b in range(B.size) if b & y == y]
        decomps = []
        for pick in range(1 << len(ups)):
            G = [ups[i] for i in range(len(ups)) if pick >> i & 1]
            m = B.top_mask
            for b in G:
                m &= b
            if m != y:
                continue
            gmask = sum(1 << b for b in G)
            decomps.append(gmask)
        for x in range(A.size):
            for gmask in decomps:
                joined = 0
                for a in submasks(x):
                    if union[a] & gmask == gmask:
                        joined |= a
                if joined == x:
                    rows[x] |= 1 << y
                    break
    return PairSet(A, B, tuple(rows))


# axioms ----------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomResult:
    name: str
    ok: bool
    witness: Optional[tuple[int, ...]] = None
    algebra: Optional[Algebra] = field(default=None, compare=False, repr=False)
    target: Optional[Algebra] = field(default=None, compare=False, repr=False)

    def render(self) -> str:
        if self.witness is None:
            return "-"
        sides = _WITNESS_SIDES[self.name]
        parts = []
        for side, w in zip(sides, self.witness):
            alg = self.algebra if side == "s" else self.target
            parts.append(alg.render(w) if alg is not None else str(w))
        return "(" + ", ".join(parts) + ")"


# which algebra each witness component lives in: source or target
_WITNESS_SIDES = {
    "S1": "st", "S2": "sst", "S3": "stt", "S4": "sstt",
    "S5": "st", "S6": "st", "S7": "st", "S8": "t",
}


@dataclass(frozen=True)
class AxiomReport:
    results: tuple[AxiomResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def __bool__(self) -> bool:
        return self.ok

    def failures(self) -> list[AxiomResult]:
        return [r for r in self.results if not r.ok]

    def __getitem__(self, name: str) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            out.append(f"{r.name}: {'pass' if r.ok else 'FAIL ' + r.render()}")
        return out


def _bits(r: int) -> Iterable[int]:
    b = 0
    while r:
        if r & 1:
            yield b
        r >>= 1
        b += 1


def _check(name: str, ps: PairSet) -> Optional[tuple[int, ...]]:
    A, B, rows = ps.source, ps.target, ps.rows
    top_a, top_b = A.top_mask, B.top_mask
    has = lambda a, b: rows[a] >> b & 1
    if name == "S1":
        if not has(0, 0):
            return (0, 0)
        if not has(top_a, top_b):
            return (top_a, top_b)
        return None
    if name == "S2":
        # a S c and b S c imply (a|b) S c
        for a in range(A.size):
            for b in range(A.size):
                common = rows[a] & rows[b] & ~rows[a | b]
                if common:
                    return (a, b, next(_bits(common)))
        return None
    if name == "S3":
        for a in range(A.size):
            r = rows[a]
            for b in _bits(r):
                for c in _bits(r):
                    if not has(a, b & c):
                        return (a, b, c)
        return None
    if name == "S4":
        # a <= b S c <= d implies a S d; check the two one-sided closures
        for b in range(A.size):
            for a in submasks(b):
                missing = rows[b] & ~rows[a]
                if missing:
                    c = next(_bits(missing))
                    return (a, b, c, c)
        for a in range(A.size):
            for c in _bits(rows[a]):
                for d in range(B.size):
                    if d & c == c and not has(a, d):
                        return (a, a, c, d)
        return None
    if A is not B:
        raise AlgebraMismatchError(f"{name} only applies to a subordination on one algebra")
    if name == "S5":
        for a in range(A.size):
            for b in _bits(rows[a]):
                if a & ~b:
                    return (a, b)
        return None
    if name == "S6":
        for a in range(A.size):
            for b in _bits(rows[a]):
                if not has(top_a & ~b, top_a & ~a):
                    return (a, b)
        return None
    if name == "S7":
        for a in range(A.size):
            for b in _bits(rows[a]):
                if not any(has(c, b) for c in _bits(rows[a])):
                    return (a, b)
        return None
    if name == "S8":
        for b in range(1, A.size):
            if not any(rows[a] >> b & 1 for a in range(1, A.size)):
                return (b,)
        return None
    raise ValidationError(f"unknown axiom {name!r}")


def check_axioms(
    S: Union[Subordination, PairSet],
    which: Iterable[str] = ALL_AXIOMS,
    cap: int = DEFAULT_PAIR_CAP,
) -> AxiomReport:
    """Per-axiom verdicts; each failure carries the first counterexample in element order."""
    ps = S.pairs(cap) if isinstance(S, Subordination) else S
    results = []
    for name in which:
        w = _check(name, ps)
        results.append(AxiomResult(name, w is None, w, ps.source, ps.target))
    return AxiomReport(tuple(results))
