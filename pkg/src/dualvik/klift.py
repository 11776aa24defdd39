"""Lifting a subordination on base algebras to the term algebras K(A) -> K(B).

``x`` is related to ``y`` by reading a DNF of ``x`` against a CNF of ``y``:
for every clause ``(a_i, b_i*)`` and conjunct ``(c_j, d_j*)`` the box flavor
needs some ``a_i S d_jk``, the diamond flavor some ``b_il S c_j``, and the
Egli-Milner flavor (``em``) either of the two.

Lifted relations are deciders. Over bases with at most two atoms they can be
materialized as :class:`~dualvik.subord.PairSet` matrices indexed by
semantic values, i.e. by elements of ``vietoris(B)``.
"""

from __future__ import annotations

import functools
import random
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import kalg, rel, subord
from .boolalg import Algebra, AlgebraElement, check_cap
from .errors import AlgebraMismatchError, ValidationError
from .kalg import CNF, DNF, Term
from .subord import PairSet, Subordination

FLAVORS = ("box", "diamond", "em")
DEFAULT_EXHAUSTIVE_CAP = 2
DEFAULT_SAMPLES = 500

_lock = threading.Lock()


def _check_flavor(flavor: str) -> str:
    if flavor not in FLAVORS:
        raise ValidationError(f"unknown flavor {flavor!r}; expected one of {', '.join(FLAVORS)}")
    return flavor


@dataclass(frozen=True)
class Witness:
    """Why clause ``i`` is related to conjunct ``j``: ``kind`` is ``box`` (index
    into the conjunct's boxes) or ``diamond`` (index into the clause's diamonds)."""

    i: int
    j: int
    kind: str
    index: int

    def render(self) -> str:
        sym = "k" if self.kind == "box" else "l"
        return f"(i={self.i}, j={self.j}, {sym}={self.index})"


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witnesses: tuple[Witness, ...] = ()
    failure: Optional[tuple[int, int]] = None


def _pair_witness(S: Subordination, flavor: str, i: int, j: int, cl, cj) -> Optional[Witness]:
    a, bs = cl
    c, ds = cj
    if flavor in ("box", "em"):
        for k, d in enumerate(ds):
            if S.holds(a, d):
                return Witness(i, j, "box", k)
    if flavor in ("diamond", "em"):
        for l, b in enumerate(bs):
            if S.holds(b, c):
                return Witness(i, j, "diamond", l)
    return None


@dataclass(frozen=True)
class KSubordination:
    base: Subordination
    flavor: str
    _cache: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self):
        _check_flavor(self.flavor)

    @property
    def source_base(self) -> Algebra:
        return self.base.source

    @property
    def target_base(self) -> Algebra:
        return self.base.target

    def _check_bases(self, d: DNF, c: CNF) -> None:
        if d.base is not self.source_base or c.base is not self.target_base:
            raise AlgebraMismatchError("normal forms do not match the lifted subordination's bases")

    def explain_nf(self, d: DNF, c: CNF) -> Verdict:
        self._check_bases(d, c)
        found = []
        for i, cl in enumerate(d.clauses):
            for j, cj in enumerate(c.conjuncts):
                w = _pair_witness(self.base, self.flavor, i, j, cl, cj)
                if w is None:
                    return Verdict(False, tuple(found), (i, j))
                found.append(w)
        return Verdict(True, tuple(found))

    def holds_nf(self, d: DNF, c: CNF) -> bool:
        # same test as explain_nf on least images, without building witnesses
        self._check_bases(d, c)
        image = self.base.dual.image
        use_box, use_dia = self.flavor != "diamond", self.flavor != "box"
        for a, bs in d.clauses:
            ia = image(a)
            ibs = [image(b) for b in bs] if use_dia else ()
            for cc, ds in c.conjuncts:
                if use_box and any(ia & ~dd == 0 for dd in ds):
                    continue
                if use_dia and any(ib & ~cc == 0 for ib in ibs):
                    continue
                return False
        return True

    def explain(self, x: Term, y: Term) -> Verdict:
        return self.explain_nf(kalg.to_dnf(x, self.source_base), kalg.to_cnf(y, self.target_base))

    def holds(self, x: Term, y: Term) -> bool:
        return self.explain(x, y).holds

    def holds_value(self, v: int, w: int) -> bool:
        return self.holds_nf(value_dnf(self.source_base, v), value_cnf(self.target_base, w))

    def matrix(self, cap: int = DEFAULT_EXHAUSTIVE_CAP) -> PairSet:
        """Membership over all pairs of K-elements, indexed by semantic value."""
        with _lock:
            m = self._cache.get("matrix")
        if m is not None:
            return m
        A, B = self.source_base, self.target_base
        check_cap(A.n, cap, "atoms (exhaustive cap)")
        check_cap(B.n, cap, "atoms (exhaustive cap)")
        VA, VB = rel.vietoris(A), rel.vietoris(B)
        rows = []
        for v in range(VA.size):
            d = value_dnf(A, v)
            rows.append(sum(1 << w for w in range(VB.size) if self.holds_nf(d, value_cnf(B, w))))
        m = PairSet(VA, VB, tuple(rows))
        with _lock:
            self._cache["matrix"] = m
        return m


def lift_subord(S: Subordination, flavor: str) -> KSubordination:
    return KSubordination(S, _check_flavor(flavor))


@functools.lru_cache(maxsize=None)
def value_dnf(B: Algebra, v: int) -> DNF:
    """Canonical DNF of the K-element with semantic value ``v``."""
    V = AlgebraElement(rel.vietoris(B), v)
    return DNF(B, kalg.normalize_clauses(kalg.dnf_of_value(V, B).clauses))


@functools.lru_cache(maxsize=None)
def value_cnf(B: Algebra, w: int) -> CNF:
    """Canonical CNF of the K-element with semantic value ``w``."""
    VB = rel.vietoris(B)
    neg = kalg.dnf_of_value(AlgebraElement(VB, VB.top_mask & ~w), B)
    return CNF(B, kalg.dual_forms(kalg.normalize_clauses(neg.clauses), B))


# interpolants ------------------------------------------------------------------


def interpolant(S: Subordination, T: Subordination, flavor: str, x: Term, y: Term) -> Optional[Term]:
    """An explicit ``z`` with ``x lift(S) z`` and ``z lift(T) y``, given ``x lift(T∘S) y``.

    ``z`` is ``⋁_i ⋀_j z_ij`` where ``z_ij`` is ``box(S[a_i])`` on a box
    witness and ``dia(S[b_il])`` on a diamond witness. Returns ``None`` when
    ``x`` is not related to ``y`` by the composite.
    """
    A = S.source
    B = S.target
    C = T.target
    d = kalg.to_dnf(x, A)
    c = kalg.to_cnf(y, C)
    return interpolant_nf(S, T, flavor, d, c)


def interpolant_nf(S: Subordination, T: Subordination, flavor: str, d: DNF, c: CNF) -> Optional[Term]:
    if S.target is not T.source:
        raise AlgebraMismatchError("cannot compose: target of S is not the source of T")
    TS = subord.compose(T, S)
    verdict = lift_subord(TS, flavor).explain_nf(d, c)
    if not verdict.holds:
        return None
    B = S.target
    by_pair = {(w.i, w.j): w for w in verdict.witnesses}
    disjuncts = []
    for i, (a, bs) in enumerate(d.clauses):
        parts = []
        for j in range(len(c.conjuncts)):
            w = by_pair[(i, j)]
            if w.kind == "box":
                parts.append(kalg.Box(AlgebraElement(B, S.image(a))))
            else:
                parts.append(kalg.Dia(AlgebraElement(B, S.image(bs[w.index]))))
        disjuncts.append(kalg.conj(parts))
    return kalg.disj(disjuncts)


# law checks --------------------------------------------------------------------


@dataclass(frozen=True)
class LawReport:
    law: str
    ok: bool
    checked: int
    witness: Optional[tuple] = None


def check_composition(
    S: Subordination,
    T: Subordination,
    flavor: str,
    cap: int = DEFAULT_EXHAUSTIVE_CAP,
) -> LawReport:
    """``lift(T∘S) = lift(T)∘lift(S)`` on materialized matrices, plus the explicit interpolant
    for every related pair."""
    TS = subord.compose(T, S)
    left = lift_subord(TS, flavor).matrix(cap)
    right = subord.pair_compose(lift_subord(T, flavor).matrix(cap), lift_subord(S, flavor).matrix(cap))
    diff = left.first_difference(right)
    if diff is not None:
        return LawReport(f"compose-{flavor}", False, left.source.size * left.target.size, diff)
    LS, LT = lift_subord(S, flavor), lift_subord(T, flavor)
    A, B, C = S.source, S.target, T.target
    checked = 0
    for v, w in left.pairs():
        z = interpolant_nf(S, T, flavor, value_dnf(A, v), value_cnf(C, w))
        checked += 1
        if z is None or not (
            LS.holds_nf(value_dnf(A, v), kalg.to_cnf(z, B)) and LT.holds_nf(kalg.to_dnf(z, B), value_cnf(C, w))
        ):
            return LawReport(f"compose-{flavor}", False, checked, (v, w))
    return LawReport(f"compose-{flavor}", True, left.source.size * left.target.size)


def check_composition_sampled(
    S: Subordination,
    T: Subordination,
    flavor: str,
    rng: random.Random,
    samples: int = DEFAULT_SAMPLES,
) -> LawReport:
    """Sampled form of :func:`check_composition` for bases too large to materialize.

    Related pairs of the composite must admit the explicit interpolant; for
    random ``x, z, y`` with ``x lift(S) z lift(T) y`` the composite must relate ``x, y``.
    """
    A, B, C = S.source, S.target, T.target
    LS, LT = lift_subord(S, flavor), lift_subord(T, flavor)
    LTS = lift_subord(subord.compose(T, S), flavor)
    VA, VB, VC = rel.vietoris(A), rel.vietoris(B), rel.vietoris(C)
    for n in range(samples):
        v = rng.randrange(VA.size)
        w = rng.randrange(VC.size)
        d, c = value_dnf(A, v), value_cnf(C, w)
        if LTS.holds_nf(d, c):
            z = interpolant_nf(S, T, flavor, d, c)
            if z is None or not (LS.holds_nf(d, kalg.to_cnf(z, B)) and LT.holds_nf(kalg.to_dnf(z, B), c)):
                return LawReport(f"compose-{flavor}", False, n + 1, (v, w))
        u = rng.randrange(VB.size)
        if LS.holds_nf(d, value_cnf(B, u)) and LT.holds_nf(value_dnf(B, u), c) and not LTS.holds_nf(d, c):
            return LawReport(f"compose-{flavor}", False, n + 1, (v, u, w))
    return LawReport(f"compose-{flavor}", True, samples)


def check_identity(A: Algebra, flavor: str, cap: int = DEFAULT_EXHAUSTIVE_CAP) -> LawReport:
    """Whether the lift of ``≤`` is the order of K(A). Only the em flavor is expected to pass."""
    m = lift_subord(subord.identity(A), flavor).matrix(cap)
    V = m.source
    order = PairSet.from_predicate(V, V, lambda v, w: v & ~w == 0)
    diff = m.first_difference(order)
    return LawReport(f"identity-{flavor}", diff is None, V.size * V.size, diff)


def check_dagger(S: Subordination, cap: int = DEFAULT_EXHAUSTIVE_CAP) -> list[LawReport]:
    """``lift(S†, box) = lift(S, diamond)†``, its mirror, and ``lift(S†, em) = lift(S, em)†``."""
    Sd = subord.dagger(S)
    out = []
    for f_left, f_right in (("box", "diamond"), ("diamond", "box"), ("em", "em")):
        left = lift_subord(Sd, f_left).matrix(cap)
        right = subord.pair_dagger(lift_subord(S, f_right).matrix(cap))
        diff = left.first_difference(right)
        out.append(LawReport(f"dagger-{f_left}", diff is None, left.source.size * left.target.size, diff))
    return out


def sampled_agreement(
    f: Callable[[int, int], bool],
    g: Callable[[int, int], bool],
    VA: Algebra,
    VB: Algebra,
    rng: random.Random,
    samples: int = DEFAULT_SAMPLES,
    least_above: Optional[Callable[[int], int]] = None,
) -> Optional[tuple[int, int]]:
    """Compare two membership deciders on seeded random pairs of semantic values.

    With ``least_above`` (the least related ``w`` for a given ``v``), half the
    samples are drawn above it so that related pairs are well represented.
    Returns the first disagreement or ``None``.
    """
    for n in range(samples):
        v = rng.randrange(VA.size)
        if least_above is not None and n % 2 == 0:
            w = least_above(v) | rng.randrange(VB.size)
        else:
            w = rng.randrange(VB.size)
        if f(v, w) != g(v, w):
            return v, w
    return None


def pair_hom_join(mats: list[PairSet], source: Algebra = None, target: Algebra = None) -> PairSet:
    """Join of materialized subordinations in their hom-frame, computed on the dual side."""
    if mats:
        source, target = mats[0].source, mats[0].target
    R = rel.Relation.full(source, target)
    for m in mats:
        R = R & m.to_relation()
    return subord.from_relation(R).pairs()
