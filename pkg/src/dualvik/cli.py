"""Command-line driver: ``dualvik <subcommand> ...``.

Exit codes: 0 on success, 1 when a verification fails, 2 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from typing import Any, Optional

from . import duality, kalg, klift, rel, s5mac, subord
from .boolalg import Algebra, AlgebraElement, mk_algebra
from .config import RunConfig
from .errors import DualvikError, ValidationError
from .rel import Relation
from .subord import Subordination

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


# instance files ----------------------------------------------------------------


@dataclass
class InstanceFile:
    algebras: dict[str, Algebra] = field(default_factory=dict)
    relations: dict[str, Relation] = field(default_factory=dict)
    subordinations: dict[str, Subordination] = field(default_factory=dict)
    s5: dict[str, s5mac.S5Algebra] = field(default_factory=dict)
    morphisms: dict[str, tuple[Subordination, str, str]] = field(default_factory=dict)
    terms: dict[str, str] = field(default_factory=dict)

    def pick(self, table: str, name: Optional[str]):
        entries = getattr(self, table)
        if name is None:
            if len(entries) != 1:
                raise ValidationError(f"instance declares {len(entries)} {table}; pick one by name")
            return next(iter(entries.values()))
        if name not in entries:
            raise ValidationError(f"no {table[:-1] if table != 's5' else 's5 algebra'} named {name!r}")
        return entries[name]


def _expect(cond: bool, msg: str) -> None:
    if not cond:
        raise ValidationError(msg)


def parse_elem(lit: Any, A: Algebra) -> AlgebraElement:
    """An atom-name array, ``"0"``/``"1"``, or an element expression string."""
    if isinstance(lit, list):
        _expect(all(isinstance(a, str) for a in lit), f"element literal {lit!r} must list atom names")
        return A.element(lit)
    if isinstance(lit, str):
        return kalg.parse_element(lit, A)
    raise ValidationError(f"bad element literal {lit!r}")


def _algebra_ref(inst: InstanceFile, decl: dict, key: str) -> Algebra:
    name = decl.get(key)
    if name is None:
        _expect(len(inst.algebras) == 1, f"{key!r} is required when several algebras are declared")
        return next(iter(inst.algebras.values()))
    _expect(name in inst.algebras, f"unknown algebra {name!r}")
    return inst.algebras[name]


def _point_pairs(pairs: Any, X: Algebra, Y: Algebra) -> Relation:
    _expect(isinstance(pairs, list), "pairs must be a list of [source, target] pairs")
    out = []
    for p in pairs:
        _expect(isinstance(p, list) and len(p) == 2, f"bad pair {p!r}")
        out.append((p[0], p[1]))
    return Relation.from_pairs(X, Y, out)


def build_instance(data: Any) -> InstanceFile:
    _expect(isinstance(data, dict), "instance file must be a JSON object")
    inst = InstanceFile()
    if "algebra" in data:
        inst.algebras["B"] = _mk_alg(data["algebra"], "B")
    for name, decl in data.get("algebras", {}).items():
        _expect(name not in inst.algebras, f"algebra {name!r} declared twice")
        inst.algebras[name] = _mk_alg(decl, name)
    for name, decl in data.get("relations", {}).items():
        X, Y = _algebra_ref(inst, decl, "source"), _algebra_ref(inst, decl, "target")
        inst.relations[name] = _point_pairs(decl.get("pairs", []), X, Y)
    for name, decl in data.get("subordinations", {}).items():
        A, B = _algebra_ref(inst, decl, "source"), _algebra_ref(inst, decl, "target")
        if "dual_relation" in decl:
            inst.subordinations[name] = subord.from_relation(_point_pairs(decl["dual_relation"], A, B))
        elif "relation" in decl:
            R = inst.relations.get(decl["relation"])
            _expect(R is not None, f"unknown relation {decl['relation']!r}")
            _expect(R.source is A and R.target is B, f"relation {decl['relation']!r} has the wrong ends")
            inst.subordinations[name] = subord.from_relation(R)
        elif "pairs" in decl:
            pairs = []
            for p in decl["pairs"]:
                _expect(isinstance(p, list) and len(p) == 2, f"bad pair {p!r}")
                pairs.append((parse_elem(p[0], A).mask, parse_elem(p[1], B).mask))
            try:
                inst.subordinations[name] = subord.from_pairs(A, B, pairs)
            except ValidationError as e:
                raise ValidationError(f"subordination {name!r}: {e}") from None
        else:
            raise ValidationError(f"subordination {name!r} needs dual_relation, relation or pairs")
    for name, decl in data.get("s5", {}).items():
        A = _algebra_ref(inst, decl, "algebra")
        if "classes" in decl:
            inst.s5[name] = s5mac.S5Algebra.from_equivalence(_classes(decl["classes"], A))
        else:
            S = inst.subordinations.get(decl.get("subordination"))
            _expect(S is not None, f"s5 algebra {name!r} needs a known subordination or classes")
            inst.s5[name] = s5mac.S5Algebra(A, S)
    for name, decl in data.get("morphisms", {}).items():
        S = inst.subordinations.get(decl.get("subordination"))
        _expect(S is not None, f"morphism {name!r} refers to an unknown subordination")
        src, tgt = decl.get("source"), decl.get("target")
        _expect(src in inst.s5 and tgt in inst.s5, f"morphism {name!r} must bind two declared s5 algebras")
        inst.morphisms[name] = (S, src, tgt)
    for name, text in data.get("terms", {}).items():
        _expect(isinstance(text, str), f"term {name!r} must be a string")
        inst.terms[name] = text
    return inst


def _mk_alg(decl: Any, name: str) -> Algebra:
    _expect(isinstance(decl, dict) and isinstance(decl.get("atoms"), list), f"algebra {name!r} needs an atoms list")
    return mk_algebra(decl["atoms"], name)


def _classes(classes: Any, A: Algebra) -> Relation:
    _expect(isinstance(classes, list), "classes must be a list of atom lists")
    blocks = [A.element(c).mask for c in classes]
    covered = 0
    for b in blocks:
        _expect(b and not b & covered, "classes must be nonempty and disjoint")
        covered |= b
    _expect(covered == A.top_mask, "classes must cover every atom")
    return rel.equivalence_from_blocks(A, blocks)


def load(path: str) -> InstanceFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    return build_instance(data)


# output helpers ----------------------------------------------------------------


def _atoms(A: Algebra, m: int) -> list[str]:
    return A.names_of(m)


def _emit(cfg: RunConfig, text_lines: list[str], obj: dict) -> None:
    if cfg.format == "json":
        print(json.dumps(obj, indent=2))
    else:
        print("\n".join(text_lines))


def _dnf_json(d: kalg.DNF) -> list[dict]:
    B = d.base
    return [{"box": _atoms(B, a), "diamonds": [_atoms(B, b) for b in bs]} for a, bs in d.clauses]


def _cnf_json(c: kalg.CNF) -> list[dict]:
    B = c.base
    return [{"diamond": _atoms(B, cc), "boxes": [_atoms(B, d) for d in ds]} for cc, ds in c.conjuncts]


def _alg_from_flag(text: str) -> Algebra:
    names = [a.strip() for a in text.split(",")] if text.strip() else []
    return mk_algebra(names, "B")


def _s5_from_args(args) -> s5mac.S5Algebra:
    if args.file:
        return load(args.file).pick("s5", args.s5)
    if args.algebra is None:
        raise ValidationError("give an instance file or --algebra")
    A = _alg_from_flag(args.algebra)
    if args.classes:
        classes = [[a.strip() for a in block.split(",") if a.strip()] for block in args.classes.split(";")]
        return s5mac.S5Algebra.from_equivalence(_classes(classes, A))
    return s5mac.S5Algebra.order(A)


def _subord_lines(S: Subordination) -> list[str]:
    return [f"dual relation: {S.dual.describe()}"]


def _subord_json(S: Subordination) -> dict:
    return {"source": list(S.source.atom_names), "target": list(S.target.atom_names), "dual_relation": S.dual.named_pairs()}


# subcommands ---------------------------------------------------------------------


def cmd_check(args, cfg: RunConfig) -> int:
    inst = load(args.file)
    which = tuple(a.strip() for a in args.axioms.split(",")) if args.axioms else None
    lines, out, failed = [], {"command": "check", "subordinations": {}, "s5": {}}, False
    for name, S in inst.subordinations.items():
        if args.name and name not in args.name:
            continue
        rep = subord.check_axioms(S, which or subord.BASE_AXIOMS)
        failed |= not rep.ok
        lines.append(f"{name}: " + ", ".join(rep.lines()))
        out["subordinations"][name] = _report_json(rep)
    for name, A in inst.s5.items():
        if args.name and name not in args.name:
            continue
        rep = subord.check_axioms(A.s, which or subord.ALL_AXIOMS)
        s5_ok = all(r.ok for r in rep.results if r.name in subord.S5_AXIOMS)
        failed |= not s5_ok
        devries = rep.ok if which is None else None
        lines.append(f"{name}: " + ", ".join(rep.lines()) + (f"; de Vries: {'yes' if devries else 'no'}" if which is None else ""))
        out["s5"][name] = dict(_report_json(rep), devries=devries)
    _emit(cfg, lines, out)
    return EXIT_FAIL if failed else EXIT_OK


def _report_json(rep: subord.AxiomReport) -> dict:
    return {"ok": rep.ok, "axioms": [{"name": r.name, "ok": r.ok, "witness": None if r.ok else r.render()} for r in rep.results]}


def cmd_lift(args, cfg: RunConfig) -> int:
    inst = load(args.file)
    S = inst.pick("subordinations", args.subord)
    xs = inst.terms.get(args.x, args.x)
    ys = inst.terms.get(args.y, args.y)
    x, y = kalg.parse_term(xs, S.source), kalg.parse_term(ys, S.target)
    K = klift.lift_subord(S, args.flavor)
    d, c = kalg.to_dnf(x, S.source), kalg.to_cnf(y, S.target)
    v = K.explain_nf(d, c)
    lines = ["true" if v.holds else "false", f"dnf: {d}", f"cnf: {c}"]
    if v.holds:
        lines.append("witnesses: " + (" ".join(w.render() for w in v.witnesses) or "none needed"))
    else:
        lines.append(f"no witness for clause {v.failure[0]} against conjunct {v.failure[1]}")
    obj = {
        "command": "lift",
        "flavor": args.flavor,
        "holds": v.holds,
        "dnf": _dnf_json(d),
        "cnf": _cnf_json(c),
        "witnesses": [{"i": w.i, "j": w.j, "kind": w.kind, "index": w.index} for w in v.witnesses],
        "failure": list(v.failure) if v.failure else None,
    }
    _emit(cfg, lines, obj)
    return EXIT_OK


def cmd_compose(args, cfg: RunConfig) -> int:
    inst = load(args.file)
    if args.second in inst.relations and args.first in inst.relations:
        R = rel.compose(inst.relations[args.second], inst.relations[args.first])
        _emit(cfg, [f"relation: {R.describe()}"], {"command": "compose", "kind": "relation", "pairs": R.named_pairs()})
        return EXIT_OK
    T = inst.pick("subordinations", args.second)
    S = inst.pick("subordinations", args.first)
    TS = subord.compose(T, S)
    _emit(cfg, _subord_lines(TS), dict({"command": "compose", "kind": "subordination"}, **_subord_json(TS)))
    return EXIT_OK


def cmd_dual(args, cfg: RunConfig) -> int:
    inst = load(args.file)
    if args.name in inst.relations:
        S = subord.from_relation(inst.relations[args.name])
        ps = S.pairs()
        pairs = [[S.source.render(a), S.target.render(b)] for a, b in ps.pairs()]
        lines = [f"subordination with {len(pairs)} pairs"] + [f"{a} S {b}" for a, b in pairs]
        _emit(cfg, lines, {"command": "dual", "kind": "subordination", "pairs": pairs})
        return EXIT_OK
    S = inst.pick("subordinations", args.name)
    R = subord.to_relation(S)
    _emit(cfg, [f"relation: {R.describe()}"], {"command": "dual", "kind": "relation", "pairs": R.named_pairs()})
    return EXIT_OK


def cmd_nf(args, cfg: RunConfig) -> int:
    B = _alg_from_flag(args.algebra)
    t = kalg.parse_term(args.term, B)
    d, c = kalg.to_dnf(t, B), kalg.to_cnf(t, B)
    _emit(cfg, [str(d), str(c)], {"command": "nf", "dnf": str(d), "cnf": str(c),
                                  "dnf_clauses": _dnf_json(d), "cnf_conjuncts": _cnf_json(c)})
    return EXIT_OK


def cmd_leq(args, cfg: RunConfig) -> int:
    B = _alg_from_flag(args.algebra)
    x, y = kalg.parse_term(args.x, B), kalg.parse_term(args.y, B)
    w = kalg.leq_witness(x, y, B)
    _emit(cfg, ["true" if w is None else "false"], {"command": "leq", "leq": w is None,
                                                    "witness": None if w is None else list(w)})
    return EXIT_OK


def cmd_sideals(args, cfg: RunConfig) -> int:
    A = _s5_from_args(args)
    ideals = s5mac.s_ideals(A, cfg.random_cap)
    lines, items = [], []
    for I in ideals:
        normal = s5mac.is_normal_ideal(I, A)
        lines.append(f"{I.label} {'normal' if normal else 'not normal'}")
        items.append({"generator": _atoms(A.algebra, I.generator), "normal": normal})
    lines.append(f"{len(ideals)} S-ideals")
    _emit(cfg, lines, {"command": "sideals", "ideals": items})
    return EXIT_OK


def cmd_macneille(args, cfg: RunConfig) -> int:
    A = _s5_from_args(args)
    C = s5mac.macneille(A, cfg.random_cap)
    N = C.result.algebra
    dev = s5mac.is_devries(C.result)
    lines = [
        "atoms: " + " ".join(N.atom_names),
        f"elements: {N.size}",
        f"de Vries: {'yes' if dev.ok else 'no'}",
    ]
    for a in range(A.algebra.size):
        lines.append(f"embed {A.algebra.render(a)} -> {N.render(C.embed(a))}")
    obj = {"command": "macneille", "atoms": list(N.atom_names), "elements": N.size, "devries": dev.ok,
           "embedding": [[_atoms(A.algebra, a), _atoms(N, C.embed(a))] for a in range(A.algebra.size)]}
    _emit(cfg, lines, obj)
    return EXIT_OK


def cmd_ls(args, cfg: RunConfig) -> int:
    A = _s5_from_args(args)
    L = s5mac.l_s(A, cfg.exhaustive_cap)
    dev = s5mac.is_devries(L)
    lines = ["atoms: " + " ".join(L.algebra.atom_names), f"elements: {L.algebra.size}",
             f"de Vries: {'yes' if dev.ok else 'no'}"]
    _emit(cfg, lines, {"command": "ls", "atoms": list(L.algebra.atom_names), "elements": L.algebra.size,
                       "devries": dev.ok})
    return EXIT_OK


def cmd_jp(args, cfg: RunConfig) -> int:
    A = _s5_from_args(args)
    F = s5mac.j_p(A, cfg.exhaustive_cap)
    lines = [f"elements: {F.size}", f"distributive: {'yes' if F.is_distributive() else 'no'}"] + list(F.labels)
    _emit(cfg, lines, {"command": "jp", "elements": F.size, "distributive": F.is_distributive(),
                       "labels": list(F.labels)})
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    names = duality.SQUARES if args.square == "all" else (args.square,)
    for n in names:
        if n not in duality.SQUARES:
            raise ValidationError(f"unknown square {n!r}; expected one of {', '.join(duality.SQUARES)} or all")
    vcfg = cfg.verify_config()
    lines, reports, summary, skipped = [], [], [], []
    total = passed = 0
    for n in names:
        if args.square == "all" and n in duality.MATERIALIZED and args.max_size > cfg.exhaustive_cap:
            skipped.append(n)
            lines.append(f"{n}: skipped ({args.max_size} points exceeds the exhaustive cap {cfg.exhaustive_cap})")
            continue
        reps = duality.verify_family(n, args.max_size, cfg.seed, vcfg)
        ok = sum(r.ok for r in reps)
        lines.extend(r.line() for r in reps)
        reports.extend(r.to_json() for r in reps)
        summary.append({"square": n, "passed": ok, "total": len(reps)})
        if len(names) > 1:
            lines.append(f"{n}: {'PASS' if ok == len(reps) else 'FAIL'} {ok}/{len(reps)}")
        total += len(reps)
        passed += ok
    verdict = "PASS" if passed == total else "FAIL"
    lines.append(f"{verdict} {passed}/{total}")
    _emit(cfg, lines, {"command": "verify", "seed": cfg.seed, "max_size": args.max_size, "reports": reports,
                       "summary": summary, "skipped": skipped, "verdict": verdict.lower(), "passed": passed,
                       "total": total})
    return EXIT_OK if passed == total else EXIT_FAIL


def generate(atoms: int, seed: int) -> dict:
    """A random instance file: two algebras, a relation, subordinations, an S5 algebra,
    and terms ``x`` over ``A`` and ``y`` over ``B`` for ``lift``."""
    if atoms < 1:
        raise ValidationError("--atoms must be at least 1")
    rng = random.Random(seed)
    A = mk_algebra([f"a{i}" for i in range(atoms)], "A")
    B = mk_algebra([f"b{i}" for i in range(atoms)], "B")
    R = rel.random_relation(A, B, rng)
    T = rel.random_relation(B, B, rng)
    E = rel.random_equivalence(A, rng)
    x = kalg.random_term(A, rng, 3)
    y = kalg.random_term(B, rng, 3)
    return {
        "algebras": {"A": {"atoms": list(A.atom_names)}, "B": {"atoms": list(B.atom_names)}},
        "relations": {"R": {"source": "A", "target": "B", "pairs": R.named_pairs()}},
        "subordinations": {
            "S": {"source": "A", "target": "B", "relation": "R"},
            "T": {"source": "B", "target": "B", "dual_relation": T.named_pairs()},
            "E": {"source": "A", "target": "A", "dual_relation": E.named_pairs()},
        },
        "s5": {"AE": {"algebra": "A", "subordination": "E"}},
        "morphisms": {"id_AE": {"subordination": "E", "source": "AE", "target": "AE"}},
        "terms": {"x": kalg.render(x), "y": kalg.render(y)},
    }


def cmd_gen(args, cfg: RunConfig) -> int:
    print(json.dumps(generate(args.atoms, cfg.seed), indent=2))
    return EXIT_OK


# argument parsing -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--exhaustive-cap", type=int, default=RunConfig.exhaustive_cap)
    common.add_argument("--random-cap", type=int, default=RunConfig.random_cap)

    p = argparse.ArgumentParser(prog="dualvik", description="Finite Vietoris/K duality workbench.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="check subordination axioms in an instance file")
    c.add_argument("file")
    c.add_argument("--name", action="append", help="restrict to these declarations")
    c.add_argument("--axioms", help="comma-separated subset of S1..S8")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("lift", parents=[common], help="decide x lift(S) y")
    c.add_argument("file")
    c.add_argument("x", help="term over the source base, or a term name from the file")
    c.add_argument("y", help="term over the target base, or a term name from the file")
    c.add_argument("--subord")
    c.add_argument("--flavor", choices=klift.FLAVORS, default="em")
    c.set_defaults(func=cmd_lift)

    c = sub.add_parser("compose", parents=[common], help="compose two declarations: second after first")
    c.add_argument("file")
    c.add_argument("second")
    c.add_argument("first")
    c.set_defaults(func=cmd_compose)

    c = sub.add_parser("dual", parents=[common], help="translate a relation to a subordination or back")
    c.add_argument("file")
    c.add_argument("name")
    c.set_defaults(func=cmd_dual)

    for name, func, helptext in (("nf", cmd_nf, "print the canonical DNF and CNF of a term"),
                                 ("leq", cmd_leq, "decide x <= y in K(B)")):
        c = sub.add_parser(name, parents=[common], help=helptext)
        c.add_argument("--algebra", required=True, help="comma-separated atom names")
        if name == "nf":
            c.add_argument("term")
        else:
            c.add_argument("x")
            c.add_argument("y")
        c.set_defaults(func=func)

    for name, func, helptext in (("macneille", cmd_macneille, "MacNeille completion of an S5 algebra"),
                                 ("sideals", cmd_sideals, "list the S-ideals of an S5 algebra"),
                                 ("ls", cmd_ls, "the composite M.K.Delta on a de Vries algebra"),
                                 ("jp", cmd_jp, "the composite I.K.Delta.booleanize")):
        c = sub.add_parser(name, parents=[common], help=helptext)
        c.add_argument("file", nargs="?")
        c.add_argument("--s5", help="name of the s5 declaration in the file")
        c.add_argument("--algebra", help="comma-separated atom names (instead of a file)")
        c.add_argument("--classes", help="equivalence classes, e.g. 'a,b;c'; default: the order")
        c.set_defaults(func=func)

    c = sub.add_parser("verify", parents=[common], help="check commuting squares")
    c.add_argument("--square", default="all", help="square name or 'all'")
    c.add_argument("--max-size", type=int, default=2)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--samples", type=int, default=RunConfig.samples)
    c.add_argument("--relations", type=int, default=RunConfig.relations)
    c.set_defaults(func=cmd_verify)

    c = sub.add_parser("gen", parents=[common], help="write a random instance file to stdout")
    c.add_argument("--atoms", type=int, default=2)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_gen)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(
            seed=getattr(args, "seed", 0),
            exhaustive_cap=args.exhaustive_cap,
            random_cap=args.random_cap,
            samples=getattr(args, "samples", RunConfig.samples),
            relations=getattr(args, "relations", RunConfig.relations),
            format=args.format,
        )
        return args.func(args, cfg)
    except DualvikError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
