"""The free modal algebra K(B) over a finite boolean algebra, as terms.

Terms are built from the constants, the generators ``box(a)`` and ``dia(a)``
for elements ``a`` of a base algebra ``B``, and the boolean connectives.
Equality and order are decided syntactically: ``x <= y`` is read off a
disjunctive normal form of ``x`` against a conjunctive normal form of ``y``.
:func:`eval_semantic` maps a term to a set of subsets of the atoms of ``B``;
it is only used as an independent check.

Normal forms store element masks. A DNF clause ``(a, (b1, ..., bn))``
denotes ``box(a) & dia(b1) & ... & dia(bn)`` with ``0 != bi <= a``; a CNF
conjunct ``(c, (d1, ..., dm))`` denotes ``dia(c) | box(d1) | ... | box(dm)``
with ``c <= di != 1``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from . import rel
from .boolalg import Algebra, AlgebraElement, submasks
from .errors import AlgebraMismatchError, ParseError, ValidationError

# terms -----------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Box:
    a: AlgebraElement


@dataclass(frozen=True)
class Dia:
    a: AlgebraElement


@dataclass(frozen=True)
class Not:
    t: "Term"


@dataclass(frozen=True)
class And:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Or:
    left: "Term"
    right: "Term"


Term = Union[Const, Box, Dia, Not, And, Or]

ZERO = Const(False)
ONE = Const(True)


def conj(terms: Iterable[Term]) -> Term:
    out = None
    for t in terms:
        out = t if out is None else And(out, t)
    return ONE if out is None else out


def disj(terms: Iterable[Term]) -> Term:
    out = None
    for t in terms:
        out = t if out is None else Or(out, t)
    return ZERO if out is None else out


def base_of(t: Term, B: Optional[Algebra] = None) -> Optional[Algebra]:
    """The base algebra of ``t``; every generator must share it."""
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, (Box, Dia)):
            if B is None:
                B = u.a.algebra
            elif u.a.algebra is not B:
                raise AlgebraMismatchError("term mixes generators from different base algebras")
        elif isinstance(u, Not):
            stack.append(u.t)
        elif isinstance(u, (And, Or)):
            stack.extend((u.right, u.left))
    return B


def _need_base(t: Term, B: Optional[Algebra]) -> Algebra:
    B = base_of(t, B)
    if B is None:
        raise ValidationError("term has no generators; pass the base algebra explicitly")
    return B


# parsing ---------------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        m = _IDENT.match(text, pos)
        if m:
            toks.append(("id", m.group(), pos))
            pos = m.end()
        elif ch in "01":
            toks.append(("const", ch, pos))
            pos += 1
        elif ch in "()!&|":
            toks.append((ch, ch, pos))
            pos += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", text, pos)
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, B: Algebra):
        self.text = text
        self.B = B
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind: str):
        tok = self.toks[self.i]
        if tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {kind!r}, found {what}", self.text, tok[2])
        self.i += 1
        return tok

    def done(self):
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", self.text, tok[2])

    # t := and ('|' and)*, and := un ('&' un)*, un := '!' un | atom
    def term(self) -> Term:
        t = self.term_and()
        while self.peek()[0] == "|":
            self.i += 1
            t = Or(t, self.term_and())
        return t

    def term_and(self) -> Term:
        t = self.term_un()
        while self.peek()[0] == "&":
            self.i += 1
            t = And(t, self.term_un())
        return t

    def term_un(self) -> Term:
        kind, val, pos = self.peek()
        if kind == "!":
            self.i += 1
            return Not(self.term_un())
        if kind == "const":
            self.i += 1
            return ONE if val == "1" else ZERO
        if kind == "(":
            self.i += 1
            t = self.term()
            self.take(")")
            return t
        if kind == "id":
            if val not in ("box", "dia"):
                raise ParseError(f"unknown identifier {val!r} (expected box or dia)", self.text, pos)
            self.i += 1
            self.take("(")
            a = self.elem()
            self.take(")")
            return Box(a) if val == "box" else Dia(a)
        what = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"expected a term, found {what}", self.text, pos)

    def elem(self) -> AlgebraElement:
        e = self.elem_and()
        while self.peek()[0] == "|":
            self.i += 1
            e = e | self.elem_and()
        return e

    def elem_and(self) -> AlgebraElement:
        e = self.elem_un()
        while self.peek()[0] == "&":
            self.i += 1
            e = e & self.elem_un()
        return e

    def elem_un(self) -> AlgebraElement:
        kind, val, pos = self.peek()
        if kind == "!":
            self.i += 1
            return ~self.elem_un()
        if kind == "const":
            self.i += 1
            return self.B.top if val == "1" else self.B.bot
        if kind == "(":
            self.i += 1
            e = self.elem()
            self.take(")")
            return e
        if kind == "id":
            if val not in self.B.atom_names:
                raise ParseError(f"unknown atom {val!r}", self.text, pos)
            self.i += 1
            return self.B.element([val])
        what = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"expected an element, found {what}", self.text, pos)


def parse_term(text: str, B: Algebra) -> Term:
    p = _Parser(text, B)
    t = p.term()
    p.done()
    return t


def parse_element(text: str, B: Algebra) -> AlgebraElement:
    p = _Parser(text, B)
    e = p.elem()
    p.done()
    return e


_PREC = {Or: 1, And: 2, Not: 3}


def render(t: Term) -> str:
    """Text in the term grammar, with only the parentheses precedence needs."""

    def go(u: Term, ctx: int) -> str:
        if isinstance(u, Const):
            return "1" if u.value else "0"
        if isinstance(u, (Box, Dia)):
            name = "box" if isinstance(u, Box) else "dia"
            return f"{name}({u.a.algebra.render(u.a.mask)})"
        p = _PREC[type(u)]
        if isinstance(u, Not):
            s = "!" + go(u.t, p)
        else:
            op = " & " if isinstance(u, And) else " | "
            s = go(u.left, p) + op + go(u.right, p + 1)
        return f"({s})" if p < ctx else s

    return go(t, 0)


# semantics -------------------------------------------------------------------


def eval_semantic(t: Term, B: Optional[Algebra] = None, cap: int = rel.DEFAULT_VIETORIS_CAP) -> AlgebraElement:
    """The set of subsets of atoms(B) satisfying ``t``, as an element of ``vietoris(B)``.

    ``box(a)`` holds at ``F`` iff ``F <= a``; ``dia(a)`` iff ``F`` meets ``a``.
    """
    B = _need_base(t, B)
    V = rel.vietoris(B, cap)
    full = V.top_mask

    def go(u: Term) -> int:
        if isinstance(u, Const):
            return full if u.value else 0
        if isinstance(u, Box):
            return rel.vietoris_box(B, u.a.mask)
        if isinstance(u, Dia):
            return rel.vietoris_diamond(B, u.a.mask)
        if isinstance(u, Not):
            return full & ~go(u.t)
        if isinstance(u, And):
            return go(u.left) & go(u.right)
        return go(u.left) | go(u.right)

    return AlgebraElement(V, go(t))


# normal forms ------------------------------------------------------------------

Clause = tuple[int, tuple[int, ...]]


@dataclass(frozen=True)
class DNF:
    base: Algebra
    clauses: tuple[Clause, ...]

    def boxes(self) -> list[AlgebraElement]:
        return [AlgebraElement(self.base, a) for a, _ in self.clauses]

    def check(self) -> bool:
        """Every diamond is nonzero and below its box."""
        return all(b != 0 and b & ~a == 0 for a, bs in self.clauses for b in bs)

    def term(self) -> Term:
        return dnf_term(self)

    def __str__(self):
        return render(dnf_term(self))


@dataclass(frozen=True)
class CNF:
    base: Algebra
    conjuncts: tuple[Clause, ...]

    def check(self) -> bool:
        """Every box is above its diamond and differs from 1."""
        top = self.base.top_mask
        return all(c & ~d == 0 and d != top for c, ds in self.conjuncts for d in ds)

    def term(self) -> Term:
        return cnf_term(self)

    def __str__(self):
        return render(cnf_term(self))


def _norm_clause(a: int, bs: Iterable[int]) -> Optional[Clause]:
    ds = set()
    for b in bs:
        b &= a
        if b == 0:
            return None
        ds.add(b)
    # dia(b) & dia(b') = dia(b) when b <= b'
    keep = tuple(sorted(d for d in ds if not any(e != d and e & ~d == 0 for e in ds)))
    return a, keep


def clause_leq(c: Clause, d: Clause) -> bool:
    """Clause order: ``c`` implies ``d``."""
    (a, bs), (a2, bs2) = c, d
    if a & ~a2:
        return False
    return all(any(b & ~e == 0 for b in bs) for e in bs2)


def _prune(clauses: Iterable[Clause]) -> list[Clause]:
    uniq = sorted(set(clauses))
    out = []
    for i, c in enumerate(uniq):
        if not any(j != i and clause_leq(c, d) for j, d in enumerate(uniq)):
            out.append(c)
    return out


def normalize_clauses(clauses: Iterable[Clause]) -> tuple[Clause, ...]:
    """Restrict, drop empty, minimise diamonds, prune absorbed clauses, sort."""
    normed = []
    for a, bs in clauses:
        c = _norm_clause(a, bs)
        if c is not None:
            normed.append(c)
    return tuple(sorted(_prune(normed), key=_clause_key))


def _clause_key(c: Clause):
    return (c[0], c[1])


def _product(L1: Sequence[Clause], L2: Sequence[Clause]) -> list[Clause]:
    out = []
    for a1, b1 in L1:
        for a2, b2 in L2:
            c = _norm_clause(a1 & a2, b1 + b2)
            if c is not None:
                out.append(c)
    return _prune(out)


def _dnf_clauses(t: Term, B: Algebra, positive: bool) -> list[Clause]:
    top = B.top_mask
    if isinstance(t, Const):
        return [(top, ())] if t.value == positive else []
    if isinstance(t, Box):
        a = t.a.mask
        if positive:
            return [(a, ())]
        # not box(a) = dia(not a)
        return [] if a == top else [(top, (top & ~a,))]
    if isinstance(t, Dia):
        b = t.a.mask
        if positive:
            return [] if b == 0 else [(top, (b,))]
        return [(top & ~b, ())]
    if isinstance(t, Not):
        return _dnf_clauses(t.t, B, not positive)
    left = _dnf_clauses(t.left, B, positive)
    right = _dnf_clauses(t.right, B, positive)
    if isinstance(t, And) == positive:
        return _product(left, right)
    return _prune(left + right)


def to_dnf(t: Term, B: Optional[Algebra] = None) -> DNF:
    B = _need_base(t, B)
    return DNF(B, normalize_clauses(_dnf_clauses(t, B, True)))


def dual_forms(clauses: Iterable[Clause], B: Algebra) -> tuple[Clause, ...]:
    """Negate a clause list into conjuncts (or back): ``(a, bs) -> (not a, not bs)``."""
    return tuple(sorted(_negated(clauses, B, sort=True), key=_clause_key))


def _negated(clauses: Iterable[Clause], B: Algebra, sort: bool) -> list[Clause]:
    top = B.top_mask
    if sort:
        return [(top & ~a, tuple(sorted(top & ~b for b in bs))) for a, bs in clauses]
    return [(top & ~a, tuple(top & ~b for b in bs)) for a, bs in clauses]


def to_cnf(t: Term, B: Optional[Algebra] = None) -> CNF:
    """CNF of ``t``, obtained as the negation of a DNF of ``not t``."""
    B = _need_base(t, B)
    return CNF(B, dual_forms(normalize_clauses(_dnf_clauses(t, B, False)), B))


def dnf_term(d: DNF) -> Term:
    B, top = d.base, d.base.top_mask
    parts = []
    for a, bs in d.clauses:
        lits = [] if a == top else [Box(AlgebraElement(B, a))]
        lits += [Dia(AlgebraElement(B, b)) for b in bs]
        parts.append(conj(lits))
    return disj(parts)


def cnf_term(c: CNF) -> Term:
    B = c.base
    parts = []
    for cc, ds in c.conjuncts:
        lits = [] if cc == 0 else [Dia(AlgebraElement(B, cc))]
        lits += [Box(AlgebraElement(B, d)) for d in ds]
        parts.append(disj(lits))
    return conj(parts)


def eval_dnf(d: DNF) -> int:
    return eval_semantic(dnf_term(d), d.base).mask


def eval_cnf(c: CNF) -> int:
    return eval_semantic(cnf_term(c), c.base).mask


def dnf_of_value(V: AlgebraElement, B: Algebra) -> DNF:
    """A DNF for a semantic value: one point clause ``box(F) & dia(x)...`` per member ``F``."""
    if V.algebra is not rel.vietoris(B):
        raise AlgebraMismatchError("value does not live over the Vietoris points of B")
    clauses = []
    for F in range(B.size):
        if V.mask >> F & 1:
            clauses.append((F, tuple(1 << x for x in range(B.n) if F >> x & 1)))
    return DNF(B, tuple(clauses))


def cnf_of_value(V: AlgebraElement, B: Algebra) -> CNF:
    """A CNF for a semantic value: one conjunct excluding each non-member ``F``."""
    if V.algebra is not rel.vietoris(B):
        raise AlgebraMismatchError("value does not live over the Vietoris points of B")
    point = []
    for F in range(B.size):
        if not V.mask >> F & 1:
            point.append((F, tuple(1 << x for x in range(B.n) if F >> x & 1)))
    return CNF(B, dual_forms(point, B))


def value_term(V: AlgebraElement, B: Algebra) -> Term:
    return dnf_term(dnf_of_value(V, B))


# order -----------------------------------------------------------------------


def _same_base(x: Term, y: Term, B: Optional[Algebra]) -> Algebra:
    B = base_of(x, B)
    B = base_of(y, B)
    if B is None:
        raise ValidationError("terms have no generators; pass the base algebra explicitly")
    return B


def clause_conjunct_ok(cl: Clause, cj: Clause) -> bool:
    """Clause ``i`` lies below conjunct ``j``: some box of ``j`` is above
    the clause's box, or some diamond of the clause is below the conjunct's diamond."""
    a, bs = cl
    c, ds = cj
    return any(a & ~d == 0 for d in ds) or any(b & ~c == 0 for b in bs)


def leq_nf(d: DNF, c: CNF) -> Optional[tuple[int, int]]:
    """``None`` if the DNF lies below the CNF, otherwise the first failing ``(i, j)``."""
    if d.base is not c.base:
        raise AlgebraMismatchError("normal forms over different base algebras")
    for i, cl in enumerate(d.clauses):
        for j, cj in enumerate(c.conjuncts):
            if not clause_conjunct_ok(cl, cj):
                return i, j
    return None


def leq_witness(x: Term, y: Term, B: Optional[Algebra] = None) -> Optional[tuple[int, int]]:
    B = _same_base(x, y, B)
    return leq_nf(to_dnf(x, B), to_cnf(y, B))


def leq(x: Term, y: Term, B: Optional[Algebra] = None) -> bool:
    return leq_witness(x, y, B) is None


def equal(x: Term, y: Term, B: Optional[Algebra] = None) -> bool:
    B = _same_base(x, y, B)
    return leq(x, y, B) and leq(y, x, B)


# random terms and perturbed normal forms -------------------------------------


def random_element(B: Algebra, rng: random.Random) -> AlgebraElement:
    return AlgebraElement(B, rng.randrange(B.size))


def random_term(B: Algebra, rng: random.Random, depth: int = 3) -> Term:
    if depth <= 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.06:
            return ONE if rng.random() < 0.5 else ZERO
        a = random_element(B, rng)
        return Box(a) if r < 0.53 else Dia(a)
    r = rng.random()
    if r < 0.2:
        return Not(random_term(B, rng, depth - 1))
    left = random_term(B, rng, depth - 1)
    right = random_term(B, rng, depth - 1)
    return And(left, right) if r < 0.6 else Or(left, right)


def random_pair(B: Algebra, rng: random.Random, depth: int = 3) -> tuple[Term, Term]:
    """A pair of terms; a third of the time ``x <= y`` is forced syntactically."""
    x = random_term(B, rng, depth)
    y = random_term(B, rng, depth)
    r = rng.random()
    if r < 1 / 3:
        return x, Or(x, y)
    if r < 2 / 3:
        return And(y, x), y
    return x, y


def _nonzero_sub(m: int, rng: random.Random) -> int:
    subs = [s for s in submasks(m) if s]
    return rng.choice(subs)


def perturb_dnf(d: DNF, rng: random.Random, steps: int = 2) -> DNF:
    """An equivalent, non-canonical DNF.

    Each step adds an absorbed clause (one extra diamond), splits a diamond
    ``dia(b1|b2)`` into two clauses, or adds a diamond above an existing one.
    """
    clauses = list(d.clauses)
    for _ in range(steps):
        if not clauses:
            break
        i = rng.randrange(len(clauses))
        a, bs = clauses[i]
        if a == 0:
            continue
        move = rng.randrange(3)
        splittable = [k for k, b in enumerate(bs) if b & (b - 1)]
        if move == 1 and splittable:
            # dia(b1 | b2) = dia(b1) | dia(b2)
            k = rng.choice(splittable)
            b = bs[k]
            b1 = rng.choice([s for s in submasks(b) if s and s != b])
            rest = bs[:k] + bs[k + 1:]
            clauses[i] = (a, rest + (b1,))
            clauses.append((a, rest + (b & ~b1,)))
        elif move == 2 and bs:
            b = rng.choice(bs)
            clauses[i] = (a, bs + (b | (a & rng.randrange(a + 1)),))
        else:
            clauses.append((a, bs + (_nonzero_sub(a, rng),)))
    rng.shuffle(clauses)
    return DNF(d.base, tuple(clauses))


def perturb_cnf(c: CNF, rng: random.Random, steps: int = 2) -> CNF:
    """An equivalent, non-canonical CNF, via the negation duality with :func:`perturb_dnf`."""
    B = c.base
    neg = DNF(B, tuple(_negated(c.conjuncts, B, sort=False)))
    # no re-sorting, so the shuffle survives
    return CNF(B, tuple(_negated(perturb_dnf(neg, rng, steps).clauses, B, sort=False)))
