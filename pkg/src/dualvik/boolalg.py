"""Finite boolean algebras presented by their atoms.

An element is stored as a bitmask over atom indices: bit ``i`` is set iff
atom ``i`` lies below the element. The atoms double as the points of the
dual (finite, discrete) Stone space, so the same ``Algebra`` object is used
wherever a finite point set is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

from .errors import AlgebraMismatchError, CapExceededError, ValidationError

DEFAULT_ENUMERATION_CAP = 16


@dataclass(frozen=True, eq=False)
class Algebra:
    """The powerset algebra on ``atom_names``.

    Equality is identity: two separately declared algebras with the same
    atom names are different objects and their elements do not mix.
    """

    atom_names: tuple[str, ...]
    name: str = ""
    _index: dict = field(default_factory=dict, repr=False, compare=False)
    n: int = field(init=False, repr=False, compare=False)
    size: int = field(init=False, repr=False, compare=False)
    top_mask: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        names = tuple(self.atom_names)
        object.__setattr__(self, "atom_names", names)
        # hot in every mask operation, so stored rather than derived
        object.__setattr__(self, "n", len(names))
        object.__setattr__(self, "size", 1 << len(names))
        object.__setattr__(self, "top_mask", (1 << len(names)) - 1)
        for i, a in enumerate(names):
            if not isinstance(a, str) or not a:
                raise ValidationError(f"atom names must be nonempty strings, got {a!r}")
            if a in self._index:
                raise ValidationError(f"duplicate atom name {a!r}")
            self._index[a] = i

    def __repr__(self):
        label = f"{self.name}:" if self.name else ""
        return f"Algebra({label}{','.join(self.atom_names)})"

    def index(self, atom: str) -> int:
        try:
            return self._index[atom]
        except KeyError:
            raise ValidationError(f"unknown atom {atom!r} in {self!r}") from None

    def from_mask(self, mask: int) -> "AlgebraElement":
        if mask < 0 or mask > self.top_mask:
            raise ValidationError(f"mask {mask} out of range for {self!r}")
        return AlgebraElement(self, mask)

    def element(self, atoms: Iterable[Union[str, int]] = ()) -> "AlgebraElement":
        """Element whose atom set is ``atoms`` (names or indices)."""
        mask = 0
        for a in atoms:
            if isinstance(a, str):
                mask |= 1 << self.index(a)
            else:
                if not 0 <= a < self.n:
                    raise ValidationError(f"atom index {a} out of range for {self!r}")
                mask |= 1 << a
        return AlgebraElement(self, mask)

    def atom(self, i: int) -> "AlgebraElement":
        return self.element([i])

    @property
    def bot(self) -> "AlgebraElement":
        return AlgebraElement(self, 0)

    @property
    def top(self) -> "AlgebraElement":
        return AlgebraElement(self, self.top_mask)

    def names_of(self, mask: int) -> list[str]:
        return [a for i, a in enumerate(self.atom_names) if mask >> i & 1]

    def render(self, mask: int) -> str:
        """Render in the element-expression grammar: ``0``, ``1`` or ``p|q``."""
        if mask == 0:
            return "0"
        if mask == self.top_mask:
            return "1"
        return "|".join(self.names_of(mask))

    def elements(self, cap: int = DEFAULT_ENUMERATION_CAP) -> list["AlgebraElement"]:
        return enumerate_elements(self, cap)


@dataclass(frozen=True)
class AlgebraElement:
    algebra: Algebra
    mask: int

    def _same(self, other: "AlgebraElement") -> None:
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"expected AlgebraElement, got {type(other).__name__}")
        if other.algebra is not self.algebra:
            raise AlgebraMismatchError(
                f"elements of different algebras: {self.algebra!r} vs {other.algebra!r}"
            )

    def __and__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._same(other)
        return AlgebraElement(self.algebra, self.mask & other.mask)

    def __or__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._same(other)
        return AlgebraElement(self.algebra, self.mask | other.mask)

    def __invert__(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, self.algebra.top_mask & ~self.mask)

    def __le__(self, other: "AlgebraElement") -> bool:
        self._same(other)
        return self.mask & ~other.mask == 0

    def __lt__(self, other: "AlgebraElement") -> bool:
        return self <= other and self.mask != other.mask

    def __ge__(self, other: "AlgebraElement") -> bool:
        return other <= self

    def __gt__(self, other: "AlgebraElement") -> bool:
        return other < self

    @property
    def is_bot(self) -> bool:
        return self.mask == 0

    @property
    def is_top(self) -> bool:
        return self.mask == self.algebra.top_mask

    @property
    def atoms(self) -> list[str]:
        return self.algebra.names_of(self.mask)

    def __str__(self):
        return self.algebra.render(self.mask)

    def __repr__(self):
        return f"<{self.algebra.render(self.mask)}>"


def mk_algebra(atom_names: Sequence[str], name: str = "") -> Algebra:
    if isinstance(atom_names, str):
        raise ValidationError("atom_names must be a sequence of names, not a string")
    return Algebra(tuple(atom_names), name)


def meet(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a & b


def join(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a | b


def neg(a: AlgebraElement) -> AlgebraElement:
    return ~a


def leq(a: AlgebraElement, b: AlgebraElement) -> bool:
    return a <= b


def bot(A: Algebra) -> AlgebraElement:
    return A.bot


def top(A: Algebra) -> AlgebraElement:
    return A.top


def check_cap(n: int, cap: int, what: str = "atoms") -> None:
    if n > cap:
        raise CapExceededError(f"{n} {what} exceeds the enumeration cap of {cap}")


def enumerate_elements(A: Algebra, cap: int = DEFAULT_ENUMERATION_CAP) -> list[AlgebraElement]:
    """All ``2**n`` elements ordered by mask, ascending."""
    check_cap(A.n, cap)
    return [AlgebraElement(A, m) for m in range(A.size)]


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, ascending."""
    s = 0
    while True:
        yield s
        if s == mask:
            return
        s = (s - mask) & mask
