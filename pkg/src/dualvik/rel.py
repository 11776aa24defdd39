"""Relations between finite point sets and their Vietoris lifts.

A point set is the atom set of an :class:`~dualvik.boolalg.Algebra`. A
relation stores one bitmask row per source point. The Vietoris point set of
``X`` is itself presented as an algebra whose ``i``-th atom is the subset of
``X`` with mask ``i``; that index convention is shared with the semantic
domain of :mod:`dualvik.kalg`, so the comparison isomorphism between the two
sides is the identity on indices.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

from .boolalg import Algebra, AlgebraElement, check_cap, submasks
from .errors import AlgebraMismatchError, CompatibilityError, ValidationError

DEFAULT_VIETORIS_CAP = 10

Point = Union[str, int]


@dataclass(frozen=True)
class Relation:
    source: Algebra
    target: Algebra
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.source.n:
            raise AlgebraMismatchError(
                f"relation has {len(self.rows)} rows but source has {self.source.n} points"
            )
        top = self.target.top_mask
        for r in self.rows:
            if r & ~top:
                raise AlgebraMismatchError("relation row outside the target point set")

    # construction -------------------------------------------------------

    @classmethod
    def from_pairs(cls, X: Algebra, Y: Algebra, pairs: Iterable[tuple[Point, Point]]) -> "Relation":
        rows = [0] * X.n
        for x, y in pairs:
            i = X.index(x) if isinstance(x, str) else _checked(x, X)
            j = Y.index(y) if isinstance(y, str) else _checked(y, Y)
            rows[i] |= 1 << j
        return cls(X, Y, tuple(rows))

    @classmethod
    def identity(cls, X: Algebra) -> "Relation":
        return cls(X, X, tuple(1 << i for i in range(X.n)))

    @classmethod
    def empty(cls, X: Algebra, Y: Algebra) -> "Relation":
        return cls(X, Y, (0,) * X.n)

    @classmethod
    def full(cls, X: Algebra, Y: Algebra) -> "Relation":
        return cls(X, Y, (Y.top_mask,) * X.n)

    # queries ------------------------------------------------------------

    def holds(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, r in enumerate(self.rows) for j in range(self.target.n) if r >> j & 1]

    def named_pairs(self) -> list[list[str]]:
        s, t = self.source.atom_names, self.target.atom_names
        return [[s[i], t[j]] for i, j in self.pairs()]

    def image(self, F: int) -> int:
        if F & ~self.source.top_mask:
            raise ValidationError(f"subset {F:#b} not inside the source point set")
        out = 0
        i = 0
        while F:
            if F & 1:
                out |= self.rows[i]
            F >>= 1
            i += 1
        return out

    def preimage(self, G: int) -> int:
        if G & ~self.target.top_mask:
            raise ValidationError(f"subset {G:#b} not inside the target point set")
        return sum(1 << i for i, r in enumerate(self.rows) if r & G)

    def complement(self) -> "Relation":
        top = self.target.top_mask
        return Relation(self.source, self.target, tuple(top & ~r for r in self.rows))

    def _same_ends(self, other: "Relation") -> None:
        if other.source is not self.source or other.target is not self.target:
            raise AlgebraMismatchError("relations have different source/target")

    def __and__(self, other: "Relation") -> "Relation":
        self._same_ends(other)
        return Relation(self.source, self.target, tuple(a & b for a, b in zip(self.rows, other.rows)))

    def __or__(self, other: "Relation") -> "Relation":
        self._same_ends(other)
        return Relation(self.source, self.target, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def __le__(self, other: "Relation") -> bool:
        self._same_ends(other)
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def describe(self) -> str:
        pairs = ",".join(f"{a}->{b}" for a, b in self.named_pairs())
        return "{" + pairs + "}"


def _checked(i: int, X: Algebra) -> int:
    if not 0 <= i < X.n:
        raise ValidationError(f"point index {i} out of range for {X!r}")
    return i


def compose(R2: Relation, R1: Relation) -> Relation:
    """``R2 ∘ R1``: first ``R1``, then ``R2``."""
    if R1.target is not R2.source:
        raise AlgebraMismatchError("cannot compose: target of R1 is not the source of R2")
    return Relation(R1.source, R2.target, tuple(R2.image(r) for r in R1.rows))


def dagger(R: Relation) -> Relation:
    rows = [0] * R.target.n
    for i, r in enumerate(R.rows):
        for j in range(R.target.n):
            if r >> j & 1:
                rows[j] |= 1 << i
    return Relation(R.target, R.source, tuple(rows))


def image(R: Relation, F: int) -> int:
    return R.image(F)


def preimage(R: Relation, G: int) -> int:
    return R.preimage(G)


# Vietoris points -----------------------------------------------------------


def subset_name(X: Algebra, mask: int) -> str:
    return "{" + ",".join(X.names_of(mask)) + "}"


@functools.lru_cache(maxsize=None)
def _vietoris_algebra(X: Algebra) -> Algebra:
    names = tuple(subset_name(X, m) for m in range(X.size))
    return Algebra(names, name=f"V({X.name or ','.join(X.atom_names)})")


def vietoris(X: Algebra, cap: int = DEFAULT_VIETORIS_CAP) -> Algebra:
    """The Vietoris point set of ``X`` as an algebra; atom ``i`` is the subset with mask ``i``."""
    check_cap(X.n, cap, "points (Vietoris cap)")
    return _vietoris_algebra(X)


def vietoris_points(X: Algebra, cap: int = DEFAULT_VIETORIS_CAP) -> list[AlgebraElement]:
    """Every subset of ``X`` (the empty set included), ordered by mask."""
    check_cap(X.n, cap, "points (Vietoris cap)")
    return [AlgebraElement(X, m) for m in range(X.size)]


def lift_box(R: Relation, cap: int = DEFAULT_VIETORIS_CAP) -> Relation:
    """``F R_Box G`` iff ``G ⊆ R[F]``."""
    VX, VY = vietoris(R.source, cap), vietoris(R.target, cap)
    rows = []
    for F in range(R.source.size):
        rows.append(sum(1 << G for G in submasks(R.image(F))))
    return Relation(VX, VY, tuple(rows))


def lift_diamond(R: Relation, cap: int = DEFAULT_VIETORIS_CAP) -> Relation:
    """``F R_Diamond G`` iff ``F ⊆ R⁻¹[G]``."""
    VX, VY = vietoris(R.source, cap), vietoris(R.target, cap)
    rows = [0] * R.source.size
    for G in range(R.target.size):
        bit = 1 << G
        for F in submasks(R.preimage(G)):
            rows[F] |= bit
    return Relation(VX, VY, tuple(rows))


def lift_em(R: Relation, cap: int = DEFAULT_VIETORIS_CAP) -> Relation:
    """The Egli-Milner lift: intersection of the box and diamond lifts."""
    return lift_box(R, cap) & lift_diamond(R, cap)


LIFTS = {"box": lift_box, "diamond": lift_diamond, "em": lift_em}


def vietoris_box(X: Algebra, U: int) -> int:
    """``{F : F ⊆ U}`` as a subset of the Vietoris point set."""
    return sum(1 << F for F in submasks(U))


def vietoris_diamond(X: Algebra, U: int) -> int:
    """``{F : F ∩ U ≠ ∅}`` as a subset of the Vietoris point set."""
    return sum(1 << F for F in range(X.size) if F & U)


# equivalences and quotients --------------------------------------------------


def is_equivalence(E: Relation) -> bool:
    if E.source is not E.target:
        return False
    ident = Relation.identity(E.source)
    return ident <= E and dagger(E) == E and compose(E, E) <= E


def classes(E: Relation) -> tuple[int, ...]:
    """Equivalence classes as masks, ordered by their least point."""
    seen = 0
    out = []
    for i in range(E.source.n):
        if not seen >> i & 1:
            out.append(E.rows[i])
            seen |= E.rows[i]
    return tuple(out)


@functools.lru_cache(maxsize=None)
def partition_algebra(X: Algebra, blocks: tuple[int, ...]) -> Algebra:
    """The point set of blocks of a partition of ``X``.

    The discrete partition returns ``X`` itself, so quotienting by the
    identity is literally the identity.
    """
    if all(b & (b - 1) == 0 for b in blocks) and len(blocks) == X.n:
        if blocks == tuple(1 << i for i in range(X.n)):
            return X
    names = tuple("[" + ",".join(X.names_of(b)) + "]" for b in blocks)
    base = X.name or ",".join(X.atom_names)
    return Algebra(names, name=f"{base}/~")


def quotient(X: Algebra, E: Relation) -> tuple[Algebra, Relation]:
    """Quotient point set ``X/E`` and the projection relation ``X → X/E``."""
    if E.source is not X or not is_equivalence(E):
        raise ValidationError("quotient requires an equivalence relation on X")
    blocks = classes(E)
    Q = partition_algebra(X, blocks)
    rows = []
    for i in range(X.n):
        rows.append(next(1 << k for k, b in enumerate(blocks) if b >> i & 1))
    return Q, Relation(X, Q, tuple(rows))


def is_compatible(R: Relation, E1: Relation, E2: Relation) -> bool:
    """``R ∘ E1 = R = E2 ∘ R``."""
    return compose(R, E1) == R and compose(E2, R) == R


def quotient_relation(R: Relation, E1: Relation, E2: Relation) -> Relation:
    """``π₂ ∘ R ∘ π₁†`` between the quotients ``X1/E1`` and ``X2/E2``."""
    if not is_compatible(R, E1, E2):
        raise CompatibilityError("relation is not compatible with the equivalences on its ends")
    _, p1 = quotient(R.source, E1)
    _, p2 = quotient(R.target, E2)
    return compose(p2, compose(R, dagger(p1)))


# enumeration helpers -------------------------------------------------------


def all_relations(X: Algebra, Y: Algebra) -> Iterator[Relation]:
    """Every relation ``X → Y``, in order of the concatenated row bits."""
    k = Y.n
    for code in range(1 << (X.n * k)):
        rows = tuple(code >> (i * k) & ((1 << k) - 1) for i in range(X.n))
        yield Relation(X, Y, rows)


def random_relation(X: Algebra, Y: Algebra, rng: random.Random, density: float = 0.5) -> Relation:
    rows = []
    for _ in range(X.n):
        r = 0
        for j in range(Y.n):
            if rng.random() < density:
                r |= 1 << j
        rows.append(r)
    return Relation(X, Y, tuple(rows))


def set_partitions(n: int) -> Iterator[tuple[int, ...]]:
    """All partitions of ``{0..n-1}`` as block masks ordered by least element."""

    def rec(i: int, blocks: list[int]) -> Iterator[tuple[int, ...]]:
        if i == n:
            yield tuple(blocks)
            return
        for k in range(len(blocks)):
            blocks[k] |= 1 << i
            yield from rec(i + 1, blocks)
            blocks[k] &= ~(1 << i)
        blocks.append(1 << i)
        yield from rec(i + 1, blocks)
        blocks.pop()

    yield from rec(0, [])


def equivalence_from_blocks(X: Algebra, blocks: Sequence[int]) -> Relation:
    rows = [0] * X.n
    for b in blocks:
        for i in range(X.n):
            if b >> i & 1:
                rows[i] = b
    return Relation(X, X, tuple(rows))


def all_equivalences(X: Algebra) -> Iterator[Relation]:
    for blocks in set_partitions(X.n):
        yield equivalence_from_blocks(X, blocks)


def random_equivalence(X: Algebra, rng: random.Random) -> Relation:
    label = [rng.randrange(X.n) for _ in range(X.n)] if X.n else []
    blocks: dict[int, int] = {}
    for i, l in enumerate(label):
        blocks[l] = blocks.get(l, 0) | 1 << i
    return equivalence_from_blocks(X, list(blocks.values()))
