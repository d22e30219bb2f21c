"""``classalg`` command-line front end.

Every command prints an echo line starting with ``# `` and then its result;
collections are sorted so output is byte-stable. Exit codes: 0 success,
1 semantic error, 2 syntax error, 3 saturation bound exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Iterable, Sequence

from . import expr as E
from . import logic4 as L
from . import relalg as RA
from . import rough
from .caisl import CaislSystem, load_caisl, parse_statement
from .errors import BoundExceeded, ClassAlgebraError, SyntaxProblem
from .ontology import Ontology, load_world


def fmt_set(objs: Iterable[str]) -> str:
    return "{" + ",".join(sorted(objs)) + "}"


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _world(args) -> Ontology:
    return load_world(_read(args.file), upper=getattr(args, "upper", False))


# --- expression commands ---------------------------------------------------------

def cmd_parse(args) -> list[str]:
    f = E.parse(args.expr)
    return [E.to_text(f), *E.dump(f)]


def cmd_normalize(args) -> list[str]:
    f = E.parse(args.expr)
    return [f"S:  {L.normal_form(f)}", f"~S: {L.complement_form(f)}"]


def cmd_entail(args) -> list[str]:
    return [L.decide_relation(E.parse(args.a), E.parse(args.b)).value]


# --- world commands ------------------------------------------------------------

def cmd_eval(args) -> list[str]:
    return [fmt_set(_world(args).eval_intent(args.expr))]


def cmd_describe(args) -> list[str]:
    ont = _world(args)
    objs = ont.eval_intent(args.expr) if args.expr else frozenset(args.objects)
    found = ont.describe_extent(objs, args.budget)
    if not found:
        return [f"no description of {fmt_set(objs)} within {args.budget} operators"]
    return [E.to_text(f) for f in found]


def cmd_select(args) -> list[str]:
    return [fmt_set(_world(args).select(args.selector))]


def cmd_fuzzy(args) -> list[str]:
    ont = _world(args)
    f = ont.expand(args.expr)
    return [str(rough.fuzzy_interval(ont.world, f, resolve=ont.resolve))]


def cmd_rough(args) -> list[str]:
    ont = _world(args)
    iv = rough.rough_of_formula(ont.world, ont.expand(args.expr), resolve=ont.resolve)
    return [f"lb {fmt_set(iv.lb)}", f"ub {fmt_set(iv.ub)}"]


def cmd_partition(args) -> list[str]:
    ont = _world(args)
    part = rough.status_partition(ont.world, ont.expand(args.expr), resolve=ont.resolve)
    return [f"+ {fmt_set(part.true)}", f"- {fmt_set(part.false)}",
            f"b {fmt_set(part.both)}", f"n {fmt_set(part.neither)}"]


def cmd_classify(args) -> list[str]:
    return _world(args).hierarchy_lines()


# --- relation commands ---------------------------------------------------------

def _rel(ont: Ontology, text: str) -> RA.RelationMatrix:
    return ont.relation(text)


def cmd_prop(args) -> list[str]:
    r = _rel(_world(args), args.rel)
    return [f"{name}: {str(v).lower()}" for name, v in RA.all_properties(r).items()]


def cmd_bicliques(args) -> list[str]:
    return [str(b) for b in RA.max_bicliques(_rel(_world(args), args.rel))] or ["(none)"]


def cmd_star(args) -> list[str]:
    return RA.kleene_star(_rel(_world(args), args.rel)).grid().splitlines()


def cmd_residual(args) -> list[str]:
    ont = _world(args)
    r, s = _rel(ont, args.r), _rel(ont, args.s)
    out = RA.left_residual(s, r) if args.left else RA.right_residual(r, s)
    return out.grid().splitlines()


def cmd_compose(args) -> list[str]:
    ont = _world(args)
    return RA.compose(_rel(ont, args.r), _rel(ont, args.s)).grid().splitlines()


# --- CAISL -----------------------------------------------------------------------

def cmd_caisl(args) -> list[str]:
    prob = load_caisl(_read(args.file))
    goal = parse_statement(args.goal) if args.goal else prob.goal
    if goal is None:
        raise ClassAlgebraError("no goal given (file has no goal line and --goal is absent)")
    system = CaislSystem(prob.attrs, prob.conds, nonconstraint=args.nonconstraint,
                         bound=args.bound)
    ok, deriv = system.prove(prob.sigma, goal)
    if not ok:
        return [f"NOT PROVED {goal}"]
    return [f"PROVED {goal} in {len(deriv)} step{'s' if len(deriv) != 1 else ''}",
            *deriv.lines()]


# --- argument parsing ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="classalg", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", help="print the syntax tree of an expression")
    sp.add_argument("expr")
    sp.set_defaults(run=cmd_parse)
    sp = sub.add_parser("normalize", help="normal forms of S and ~S")
    sp.add_argument("expr")
    sp.set_defaults(run=cmd_normalize)
    sp = sub.add_parser("entail", help="equivalent / implies / implied_by / unrelated")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.set_defaults(run=cmd_entail)

    wp = sub.add_parser("world", help="queries against a world file")
    wp.add_argument("file")
    wp.add_argument("--upper", action="store_true", help="use upper-bound extents")
    ws = wp.add_subparsers(dest="query", required=True)
    for name, fn, help_ in (("eval", cmd_eval, "extent of an intent"),
                            ("fuzzy", cmd_fuzzy, "type-2 fuzzy interval lo/n hi/n"),
                            ("rough", cmd_rough, "rough interval [lb, ub]"),
                            ("partition", cmd_partition, "objects by evidence status")):
        sp = ws.add_parser(name, help=help_)
        sp.add_argument("expr")
        sp.set_defaults(run=fn)
    sp = ws.add_parser("describe", help="minimal | & formulas for an object set")
    sp.add_argument("objects", nargs="*")
    sp.add_argument("--expr", help="describe the extent of this intent instead")
    sp.add_argument("--budget", type=int, default=6)
    sp.set_defaults(run=cmd_describe)
    sp = ws.add_parser("select", help="evaluate base{condition}")
    sp.add_argument("selector")
    sp.set_defaults(run=cmd_select)
    sp = ws.add_parser("classify", help="print the classified IS-A hierarchy")
    sp.set_defaults(run=cmd_classify)

    rp = sub.add_parser("rel", help="relation-algebra queries against a world file")
    rp.add_argument("file")
    rs = rp.add_subparsers(dest="query", required=True)
    for name, fn, help_ in (("prop", cmd_prop, "all relation properties"),
                            ("bicliques", cmd_bicliques, "maximal bicliques"),
                            ("star", cmd_star, "reflexive-transitive closure")):
        sp = rs.add_parser(name, help=help_)
        sp.add_argument("rel")
        sp.set_defaults(run=fn)
    sp = rs.add_parser("residual", help="R\\S, or S/R with --left")
    sp.add_argument("r")
    sp.add_argument("s")
    sp.add_argument("--left", action="store_true")
    sp.set_defaults(run=cmd_residual)
    sp = rs.add_parser("compose", help="R.S")
    sp.add_argument("r")
    sp.add_argument("s")
    sp.set_defaults(run=cmd_compose)

    cp = sub.add_parser("caisl", help="prove a conditional attribute implication")
    cp.add_argument("file")
    cp.add_argument("--goal", help="goal statement; defaults to the file's goal line")
    cp.add_argument("--bound", type=int, default=10_000)
    cp.add_argument("--nonconstraint", choices=("empty", "full"), default="empty")
    cp.set_defaults(run=cmd_caisl)
    return p


def _echo(argv: Sequence[str], args) -> str:
    shown = [os.path.basename(a) if a == getattr(args, "file", None) else a for a in argv]
    return "# " + " ".join(shown)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        lines = args.run(args)
    except SyntaxProblem as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BoundExceeded as exc:
        size = len(exc.partial) if exc.partial is not None else "?"
        print(f"error: {exc}; partial closure has {size} statements", file=sys.stderr)
        return 3
    except (ClassAlgebraError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(_echo(argv, args))
    for line in lines:
        print(line)
    return 0
