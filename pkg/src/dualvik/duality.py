"""Finite-scale functors between relations and subordinations, and checks
that the squares relating the Vietoris lift to the K lift commute.

"Commutes up to isomorphism" is checked as equality: Vietoris points and
K-elements share their index order, so the comparison isomorphism is the
identity on indices. Where a quotient is involved the isomorphism
``V(X)/V(E) -> V(X/E)`` is built explicitly.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from typing import Optional

from . import kalg, klift, rel, s5mac, subord
from .boolalg import Algebra, check_cap, mk_algebra
from .errors import ValidationError
from .rel import Relation
from .subord import Subordination

SQUARES = ("VR-box", "VR-diamond", "VR-em", "KS-dagger", "VR-dagger", "StoneE", "MacNeille", "DeV", "Frame")
# squares that materialize K, so only run up to the exhaustive cap
MATERIALIZED = ("DeV", "Frame")


# functors ----------------------------------------------------------------------


def clop_mor(R: Relation) -> Subordination:
    """``U S V`` iff ``R[U] ⊆ V``."""
    return subord.from_relation(R)


def uf_mor(S: Subordination) -> Relation:
    """``x R y`` iff ``S[x] ⊆ y``."""
    return subord.to_relation(S)


def d_mor(R: Relation) -> Subordination:
    """Regular opens of a finite space are all subsets and closure is trivial, so this is :func:`clop_mor`."""
    return clop_mor(R)


def q_mor(R: Relation, E1: Relation, E2: Relation) -> Relation:
    """``π₂ ∘ R ∘ π₁†``; raises unless ``R ∘ E1 = R = E2 ∘ R``."""
    return rel.quotient_relation(R, E1, E2)


def gleason_finite(X: Algebra) -> tuple[Algebra, Relation]:
    """A finite discrete space is its own Gleason cover."""
    return X, Relation.identity(X)


def saturate(R: Relation, E1: Relation, E2: Relation) -> Relation:
    """``E2 ∘ R ∘ E1``, the least compatible relation containing ``R``."""
    return rel.compose(E2, rel.compose(R, E1))


def vietoris_quotient_iso(X: Algebra, E: Relation) -> Relation:
    """The bijection ``V(X)/V(E) -> V(X/E)``, ``[F] ↦ π[F]``."""
    VE = rel.lift_em(E)
    VQ, _ = rel.quotient(rel.vietoris(X), VE)
    Q, p = rel.quotient(X, E)
    VXQ = rel.vietoris(Q)
    rows = []
    for block in rel.classes(VE):
        F = (block & -block).bit_length() - 1
        rows.append(1 << p.image(F))
    iso = Relation(VQ, VXQ, tuple(rows))
    if sorted(rows) != [1 << k for k in range(VXQ.n)]:
        raise ValidationError("Vietoris quotient map is not a bijection")
    return iso


# reports -----------------------------------------------------------------------


@dataclass(frozen=True)
class SquareReport:
    square: str
    instance: str
    left: str
    right: str
    ok: bool
    witness: Optional[str] = None
    checks: int = 0

    def line(self) -> str:
        verdict = "pass" if self.ok else f"FAIL at {self.witness}"
        return f"{self.square} {self.instance}: {verdict}"

    def to_json(self) -> dict:
        return {
            "square": self.square,
            "instance": self.instance,
            "left": self.left,
            "right": self.right,
            "verdict": "pass" if self.ok else "fail",
            "witness": self.witness,
            "checks": self.checks,
        }


@dataclass(frozen=True)
class Instance:
    """One instance of a square: a relation and, for the quotient squares, equivalences on its ends."""

    R: Relation
    E1: Optional[Relation] = None
    E2: Optional[Relation] = None

    def describe(self) -> str:
        s = f"R={self.R.describe()}"
        if self.E1 is not None:
            s += f" E1={_blocks(self.E1)} E2={_blocks(self.E2)}"
        return s


def _blocks(E: Relation) -> str:
    return "|".join("".join(E.source.names_of(b)) for b in rel.classes(E))


@dataclass(frozen=True)
class VerifyConfig:
    exhaustive_cap: int = klift.DEFAULT_EXHAUSTIVE_CAP
    random_cap: int = 3
    samples: int = klift.DEFAULT_SAMPLES
    relations: int = 200


def carriers(n: int) -> tuple[Algebra, Algebra]:
    return mk_algebra([f"x{i}" for i in range(n)], "X"), mk_algebra([f"y{i}" for i in range(n)], "Y")


_CARRIERS: dict[int, tuple[Algebra, Algebra]] = {}


def shared_carriers(n: int) -> tuple[Algebra, Algebra]:
    """Carriers reused across calls so that lifts and caches line up."""
    if n not in _CARRIERS:
        _CARRIERS[n] = carriers(n)
    return _CARRIERS[n]


def instances(square: str, size: int, rng: random.Random, cfg: VerifyConfig = VerifyConfig()) -> list[Instance]:
    """Every relation between two ``size``-point sets up to the exhaustive cap,
    ``cfg.relations`` seeded random ones above it."""
    if square not in SQUARES:
        raise ValidationError(f"unknown square {square!r}")
    if size < 0:
        raise ValidationError("size must be nonnegative")
    if square in MATERIALIZED:
        check_cap(size, cfg.exhaustive_cap, "points (K is only materialized up to the exhaustive cap)")
    check_cap(size, cfg.random_cap, "points (random cap)")
    X, Y = shared_carriers(size)
    if size <= cfg.exhaustive_cap:
        rels = list(rel.all_relations(X, Y))
    else:
        rels = [rel.random_relation(X, Y, rng) for _ in range(cfg.relations)]
    if square not in ("StoneE", "MacNeille"):
        return [Instance(R) for R in rels]
    out = []
    if size <= cfg.exhaustive_cap:
        eqs = [(E1, E2) for E1 in rel.all_equivalences(X) for E2 in rel.all_equivalences(Y)]
        for R in rels:
            for E1, E2 in eqs:
                out.append(Instance(saturate(R, E1, E2), E1, E2))
    else:
        for R in rels:
            E1, E2 = rel.random_equivalence(X, rng), rel.random_equivalence(Y, rng)
            out.append(Instance(saturate(R, E1, E2), E1, E2))
    return out


# the squares -------------------------------------------------------------------


def _render_pair(A: Algebra, B: Algebra, w) -> str:
    return f"({A.render(w[0])}, {B.render(w[1])})"


def prop71_criterion(R: Relation, flavor: str, d: kalg.DNF, c: kalg.CNF) -> bool:
    """The displayed dual criteria, read with ``R``-images: ``R[a_i] ⊆ d_jk``
    and/or ``R[b_il] ⊆ c_j`` for every clause and conjunct."""
    klift._check_flavor(flavor)
    use_box, use_dia = flavor in ("box", "em"), flavor in ("diamond", "em")
    for a, bs in d.clauses:
        ra = R.image(a)
        rbs = [R.image(b) for b in bs]
        for cc, ds in c.conjuncts:
            if use_box and any(ra & ~dd == 0 for dd in ds):
                continue
            if use_dia and any(rb & ~cc == 0 for rb in rbs):
                continue
            return False
    return True


def _vr_square(flavor: str, inst: Instance, rng: random.Random, cfg: VerifyConfig) -> SquareReport:
    R = inst.R
    direct = clop_mor(rel.LIFTS[flavor](R))
    K = klift.lift_subord(clop_mor(R), flavor)
    X, Y = R.source, R.target
    VX, VY = rel.vietoris(X), rel.vietoris(Y)
    name = f"VR-{flavor}"
    if X.n <= cfg.exhaustive_cap and Y.n <= cfg.exhaustive_cap:
        left, right = direct.pairs(), K.matrix(cfg.exhaustive_cap)
        summary = (f"{left.count()} pairs", f"{right.count()} pairs")
        diff = left.first_difference(right)
        if diff is not None:
            return SquareReport(name, inst.describe(), *summary, False, _render_pair(VX, VY, diff), 1)
        pairs = [(v, w) for v in range(VX.size) for w in range(VY.size)]
    else:
        # half the samples sit above the least related value, so both verdicts occur
        summary = ("sampled", "sampled")
        pairs = []
        for n in range(cfg.samples):
            v = rng.randrange(VX.size)
            w = rng.randrange(VY.size)
            pairs.append((v, direct.image(v) | w if n % 2 == 0 else w))
        for v, w in pairs:
            if direct.holds(v, w) != K.holds_value(v, w):
                return SquareReport(name, inst.describe(), *summary, False, _render_pair(VX, VY, (v, w)), 1)
    # the dual criteria read off perturbed normal forms must agree with the direct side
    for v, w in pairs:
        d = kalg.perturb_dnf(klift.value_dnf(X, v), rng)
        c = kalg.perturb_cnf(klift.value_cnf(Y, w), rng)
        if prop71_criterion(R, flavor, d, c) != direct.holds(v, w):
            return SquareReport(name, inst.describe(), *summary, False, "criteria " + _render_pair(VX, VY, (v, w)),
                                2 * len(pairs))
    return SquareReport(name, inst.describe(), *summary, True, None, 2 * len(pairs))


def _vr_dagger(inst: Instance, rng, cfg) -> SquareReport:
    R = inst.R
    Rd = rel.dagger(R)
    checks = [
        ("box", rel.lift_box(Rd), rel.dagger(rel.lift_diamond(R))),
        ("diamond", rel.lift_diamond(Rd), rel.dagger(rel.lift_box(R))),
        ("em", rel.lift_em(Rd), rel.dagger(rel.lift_em(R))),
    ]
    for label, a, b in checks:
        if a != b:
            return SquareReport("VR-dagger", inst.describe(), label, label, False, f"lift {label}", len(checks))
    if clop_mor(Rd) != subord.dagger(clop_mor(R)):
        return SquareReport("VR-dagger", inst.describe(), "clop", "clop", False, "clop of converse", 4)
    return SquareReport("VR-dagger", inst.describe(), "3 lifts", "3 lifts", True, None, 4)


def _ks_dagger(inst: Instance, rng, cfg) -> SquareReport:
    S = clop_mor(inst.R)
    X, Y = inst.R.source, inst.R.target
    if X.n <= cfg.exhaustive_cap and Y.n <= cfg.exhaustive_cap:
        for rep in klift.check_dagger(S, cfg.exhaustive_cap):
            if not rep.ok:
                VY, VX = rel.vietoris(Y), rel.vietoris(X)
                return SquareReport("KS-dagger", inst.describe(), rep.law, rep.law, False,
                                    f"{rep.law} {_render_pair(VY, VX, rep.witness)}", rep.checked)
        return SquareReport("KS-dagger", inst.describe(), "matrices", "matrices", True, None,
                            3 * rel.vietoris(X).size * rel.vietoris(Y).size)
    Sd = subord.dagger(S)
    VX, VY = rel.vietoris(X), rel.vietoris(Y)
    for f_left, f_right in (("box", "diamond"), ("diamond", "box"), ("em", "em")):
        L = klift.lift_subord(Sd, f_left)
        Rt = klift.lift_subord(S, f_right)
        tx, ty = VX.top_mask, VY.top_mask
        diff = klift.sampled_agreement(
            L.holds_value, lambda w, v: Rt.holds_value(tx & ~v, ty & ~w), VY, VX, rng, cfg.samples
        )
        if diff is not None:
            return SquareReport("KS-dagger", inst.describe(), "sampled", "sampled", False,
                                f"dagger-{f_left} {_render_pair(VY, VX, diff)}", cfg.samples)
    return SquareReport("KS-dagger", inst.describe(), "sampled", "sampled", True, None, 3 * cfg.samples)


def _stone_e(inst: Instance, rng, cfg) -> SquareReport:
    """``V(Q(R)) = Q(V(R))`` through the quotient isomorphisms; also that ``V(E)`` is an equivalence."""
    R, E1, E2 = inst.R, inst.E1, inst.E2
    X, Y = R.source, R.target
    VE1, VE2 = rel.lift_em(E1), rel.lift_em(E2)
    if not (rel.is_equivalence(VE1) and rel.is_equivalence(VE2)):
        return SquareReport("StoneE", inst.describe(), "-", "-", False, "lifted equivalence is not an equivalence", 1)
    left_q = rel.lift_em(q_mor(R, E1, E2))
    right_q = q_mor(rel.lift_em(R), VE1, VE2)
    phi1, phi2 = vietoris_quotient_iso(X, E1), vietoris_quotient_iso(Y, E2)
    left = rel.compose(left_q, phi1)
    right = rel.compose(phi2, right_q)
    ok = left == right
    witness = None
    if not ok:
        i = next(k for k in range(left.source.n) if left.rows[k] != right.rows[k])
        witness = left.source.atom_names[i]
    return SquareReport("StoneE", inst.describe(), f"{len(left.pairs())} pairs", f"{len(right.pairs())} pairs",
                        ok, witness, left.source.n)


def _macneille(inst: Instance, rng, cfg) -> SquareReport:
    """``M(Clop R) = D(Q R)``, with the completions landing on the quotient algebras."""
    R, E1, E2 = inst.R, inst.E1, inst.E2
    A1, A2 = s5mac.S5Algebra.from_equivalence(E1), s5mac.S5Algebra.from_equivalence(E2)
    Q1, _ = rel.quotient(R.source, E1)
    Q2, _ = rel.quotient(R.target, E2)
    M1, M2 = s5mac.macneille(A1, cfg.random_cap), s5mac.macneille(A2, cfg.random_cap)
    if M1.result.algebra is not Q1 or M2.result.algebra is not Q2:
        return SquareReport("MacNeille", inst.describe(), "-", "-", False, "completion is not the quotient algebra", 1)
    if M1.result.s != subord.identity(Q1) or M2.result.s != subord.identity(Q2):
        return SquareReport("MacNeille", inst.describe(), "-", "-", False, "completion is not de Vries", 2)
    ident = s5mac.macneille_morphism(A1.s, A1, A1, cfg.random_cap)
    if ident != subord.identity(Q1):
        return SquareReport("MacNeille", inst.describe(), "-", "-", False, "identity not preserved", 3)
    left = s5mac.macneille_morphism(clop_mor(R), A1, A2, cfg.random_cap)
    right = d_mor(q_mor(R, E1, E2))
    ok = left == right
    witness = None
    if not ok:
        diff = left.pairs().first_difference(right.pairs())
        witness = _render_pair(Q1, Q2, diff)
    return SquareReport("MacNeille", inst.describe(), left.describe(), right.describe(), ok, witness, 4)


def _dev(inst: Instance, rng, cfg) -> SquareReport:
    """``D(V(R)) = L(D(R))`` via the materialized K lift and the completion."""
    R = inst.R
    X, Y = R.source, R.target
    left = d_mor(rel.lift_em(R))
    src, tgt = s5mac.S5Algebra.order(X), s5mac.S5Algebra.order(Y)
    LX, LY = s5mac.l_s(src, cfg.exhaustive_cap), s5mac.l_s(tgt, cfg.exhaustive_cap)
    right = s5mac.l_s_morphism(clop_mor(R), src, tgt, cfg.exhaustive_cap)
    VX, VY = rel.vietoris(X), rel.vietoris(Y)
    if LX.algebra is not VX or LY.algebra is not VY:
        return SquareReport("DeV", inst.describe(), "-", "-", False, "L^S object is not V(X)", 1)
    ok = left == right
    witness = None
    if not ok:
        witness = _render_pair(VX, VY, left.pairs().first_difference(right.pairs()))
    return SquareReport("DeV", inst.describe(), f"{left.pairs().count()} pairs", f"{right.pairs().count()} pairs",
                        ok, witness, VX.size * VY.size)


def _frame(inst: Instance, rng, cfg) -> SquareReport:
    """``I(K(A))`` against ``J(I(A))`` for the source algebra of the instance, compared
    as finite lattices; the frame side has no independent morphism data at this scale."""
    ls, rs = _frame_shapes(inst.R.source, cfg.exhaustive_cap, cfg.random_cap)
    ok = ls == rs
    return SquareReport("Frame", inst.describe(), f"size={ls[0]} atoms={ls[3]}", f"size={rs[0]} atoms={rs[3]}",
                        ok, None if ok else f"{ls} vs {rs}", 4)


@functools.lru_cache(maxsize=None)
def _frame_shapes(X: Algebra, exhaustive_cap: int, random_cap: int) -> tuple[tuple, tuple]:
    A = s5mac.S5Algebra.order(X)
    left = s5mac.si_frame(s5mac.k_s5(A, exhaustive_cap), cap=2 ** exhaustive_cap)
    right = s5mac.j_p(s5mac.si_frame(A, random_cap), exhaustive_cap)

    def shape(F: s5mac.FiniteFrame) -> tuple:
        B = s5mac.booleanize(F)
        return F.size, F.is_distributive(), B.algebra.size == F.size, B.algebra.n

    return shape(left), shape(right)


_CHECKS = {
    "VR-box": lambda i, r, c: _vr_square("box", i, r, c),
    "VR-diamond": lambda i, r, c: _vr_square("diamond", i, r, c),
    "VR-em": lambda i, r, c: _vr_square("em", i, r, c),
    "KS-dagger": _ks_dagger,
    "VR-dagger": _vr_dagger,
    "StoneE": _stone_e,
    "MacNeille": _macneille,
    "DeV": _dev,
    "Frame": _frame,
}


def verify_square(name: str, instance: Instance, rng: Optional[random.Random] = None,
                  cfg: VerifyConfig = VerifyConfig()) -> SquareReport:
    if name not in _CHECKS:
        raise ValidationError(f"unknown square {name!r}; expected one of {', '.join(SQUARES)}")
    return _CHECKS[name](instance, rng or random.Random(0), cfg)


def verify_family(name: str, size: int, seed: int, cfg: VerifyConfig = VerifyConfig()) -> list[SquareReport]:
    """All instances of one square at one size, in generation order, from one seeded generator."""
    rng = random.Random(seed)
    return [verify_square(name, inst, rng, cfg) for inst in instances(name, size, rng, cfg)]
