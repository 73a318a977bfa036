"""Command-line front end.

Subcommands: check (program diagnostics and definitional trees), eval
(narrowing or rewriting of a goal), uniform (pattern-flattening
transform), peval (partial evaluation), tree (narrowing tree dump), and
oracle (brute-force debugging aids).

Exit codes: 0 success, 1 usage error, 2 unparsable or ill-formed input,
3 program-class violation, 4 partial-evaluation control failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import __version__
from .deftree import DefTree, Leaf, ProgramClassError, is_inductively_sequential, uniform_transform
from .narrowing import Bounds, Node, node_to_dict, rewrite_normalize, search
from .oracle import ground_solutions, rewrites_to
from .peval import PEControlError, UnfoldPolicy, pe_control
from .program import Program, ProgramError, add_strict_equality, validate
from .syntax import ParseError, parse_program, parse_term, print_program
from .terms import FreshVars


class _ArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this tool reserves 2 for
    parse errors, so usage problems are remapped to 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError("must not be negative")
    return value


def build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog="nspec", description=__doc__)
    parser.add_argument("--version", action="version",
                        version=f"nspec {__version__}")
    parser.add_argument("--seed", type=_non_negative, default=0,
                        help="starting index for generated variable names")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_ArgumentParser)

    p_check = sub.add_parser("check", help="validate a program and show its "
                             "definitional trees")
    p_check.add_argument("file")
    p_check.add_argument("--format", choices=("text", "json"), default="text")
    p_check.add_argument("--tie-break", choices=("leftmost", "rightmost"),
                         default="leftmost")

    p_eval = sub.add_parser("eval", help="narrow or rewrite a goal")
    p_eval.add_argument("file")
    p_eval.add_argument("-e", "--expr", required=True, help="goal term")
    p_eval.add_argument("--strategy", choices=("needed", "lazy", "rewrite"),
                        default="needed")
    p_eval.add_argument("--max-steps", type=_positive, default=25)
    p_eval.add_argument("--max-nodes", type=_positive, default=2000)
    p_eval.add_argument("--max-solutions", type=_positive, default=None)
    p_eval.add_argument("--tree", metavar="OUT.json",
                        help="also dump the narrowing tree as JSON")

    p_uniform = sub.add_parser("uniform", help="flatten nested patterns into "
                               "a uniform program")
    p_uniform.add_argument("file")
    p_uniform.add_argument("-o", "--output", help="write here instead of stdout")

    p_peval = sub.add_parser("peval", help="partially evaluate a program")
    p_peval.add_argument("file")
    p_peval.add_argument("-s", "--specialize", action="append", required=True,
                         metavar="CALL", help="call to specialize (repeatable)")
    p_peval.add_argument("--depth", type=_positive, default=2)
    p_peval.add_argument("--whistle", choices=("on", "off"), default="on")
    p_peval.add_argument("--max-iters", type=_positive, default=32)
    p_peval.add_argument("-o", "--output", help="write the specialized "
                         "program here instead of stdout")
    p_peval.add_argument("--map", metavar="MAP.json", dest="map_out",
                         help="write the call renaming as JSON")

    p_tree = sub.add_parser("tree", help="print a bounded narrowing tree")
    p_tree.add_argument("file")
    p_tree.add_argument("-e", "--expr", required=True, help="goal term")
    p_tree.add_argument("--strategy", choices=("needed", "lazy"),
                        default="needed")
    p_tree.add_argument("--max-steps", type=_positive, default=25)
    p_tree.add_argument("--max-nodes", type=_positive, default=2000)
    p_tree.add_argument("--format", choices=("text", "json"), default="text")

    p_oracle = sub.add_parser("oracle", help="brute-force debugging oracles")
    oracle_sub = p_oracle.add_subparsers(dest="oracle_command", required=True,
                                         parser_class=_ArgumentParser)
    p_rw = oracle_sub.add_parser("rewrites", help="can the term rewrite to "
                                 "the target?")
    p_rw.add_argument("file")
    p_rw.add_argument("-e", "--expr", required=True)
    p_rw.add_argument("-t", "--target", required=True)
    p_rw.add_argument("--max-steps", type=_positive, default=25)
    p_sol = oracle_sub.add_parser("solutions", help="enumerate ground "
                                  "solutions of an equation")
    p_sol.add_argument("file")
    p_sol.add_argument("-e", "--expr", required=True, help="eq(l, r) equation")
    p_sol.add_argument("-k", "--size", type=_positive, default=3,
                       help="largest ground term size substituted")
    p_sol.add_argument("--max-steps", type=_positive, default=25)

    return parser


def _load(path: str) -> Program:
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    return add_strict_equality(parse_program(text))


def _tree_lines(tree: DefTree, indent: str = "") -> List[str]:
    if isinstance(tree, Leaf):
        return [f"{indent}leaf {tree.pattern} -> {tree.rule.rhs}"]
    lines = [f"{indent}branch {tree.pattern} at {list(tree.position)}"]
    for child in tree.children:
        lines.extend(_tree_lines(child, indent + "  "))
    return lines


def _tree_dict(tree: DefTree) -> dict:
    if isinstance(tree, Leaf):
        return {"kind": "leaf", "pattern": str(tree.pattern),
                "rhs": str(tree.rule.rhs), "rule": tree.rule.label}
    return {"kind": "branch", "pattern": str(tree.pattern),
            "position": list(tree.position),
            "children": [_tree_dict(c) for c in tree.children]}


def _cmd_check(args) -> int:
    program = _load(args.file)
    report = validate(program)
    trees = is_inductively_sequential(program, args.tie_break)
    if args.format == "json":
        payload = {
            "left_linear": report.left_linear,
            "constructor_based": report.constructor_based,
            "overlaps": [
                {"rule": o.rule, "other": o.other,
                 "position": list(o.position), "mgu": repr(o.mgu)}
                for o in report.overlaps
            ],
            "orthogonal": report.orthogonal,
            "inductively_sequential": trees.ok,
            "not_sequential": list(trees.failures),
            "trees": {name: _tree_dict(tree)
                      for name, tree in trees.trees.items()},
        }
        print(json.dumps(payload, indent=2))
        return 0
    yn = lambda flag: "yes" if flag else "no"
    print(f"left-linear: {yn(report.left_linear)}")
    print(f"constructor-based: {yn(report.constructor_based)}")
    if report.overlaps:
        print("overlaps:")
        for o in report.overlaps:
            print(f"  {o.rule} with {o.other} at {list(o.position)} "
                  f"mgu {o.mgu}")
    else:
        print("overlaps: none")
    if trees.ok:
        print("inductively sequential: yes")
    else:
        print("inductively sequential: no "
              f"({', '.join(trees.failures)})")
    for name, tree in trees.trees.items():
        print(f"tree for {name}:")
        for line in _tree_lines(tree, "  "):
            print(line)
    return 0


def _narrow_tree_lines(node: Node, indent: str = "") -> List[str]:
    lines = [f"{indent}{node.term}  [{node.status}]"]
    for step, child in node.children:
        lines.append(f"{indent}  at {list(step.position)} "
                     f"{step.rule.label or step.rule} {step.subst}")
        lines.extend(_narrow_tree_lines(child, indent + "    "))
    return lines


def _cmd_eval(args) -> int:
    program = _load(args.file)
    goal = parse_term(args.expr, program.signature)
    print(f"goal: {goal}")
    if args.strategy == "rewrite":
        final, trace, suspended = rewrite_normalize(goal, program,
                                                    args.max_steps)
        for t in trace:
            print(f"-> {t}")
        if suspended:
            print(f"suspended at: {final}")
        else:
            print(f"normal form: {final}")
        return 0
    bounds = Bounds(args.max_steps, args.max_nodes, args.max_solutions)
    gen = FreshVars(start=args.seed)
    result = search(goal, program, args.strategy, bounds, gen)
    for answer, value in result.answers:
        print(f"answer {answer} result {value}")
    state = "complete" if result.complete else "incomplete (bounds reached)"
    print(f"{len(result.answers)} answer(s), {state}")
    if args.tree:
        with open(args.tree, "w", encoding="utf-8") as handle:
            json.dump(node_to_dict(result.root), handle, indent=2)
            handle.write("\n")
    return 0


def _cmd_uniform(args) -> int:
    program = _load(args.file)
    text = print_program(uniform_transform(program))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        print(text, end="")
    return 0


def _cmd_peval(args) -> int:
    program = _load(args.file)
    calls = [parse_term(text, program.signature) for text in args.specialize]
    policy = UnfoldPolicy(depth=args.depth, whistle=args.whistle == "on")
    outcome = pe_control(program, calls, policy, args.max_iters)
    text = print_program(outcome.result.program)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
        print(f"wrote {args.output} "
              f"({len(outcome.result.rules)} specialized rule(s), "
              f"{outcome.iterations} iteration(s))")
    else:
        print(text, end="")
    if args.map_out:
        mapping = {str(s): str(p) for s, p in outcome.result.renaming.items()}
        with open(args.map_out, "w", encoding="utf-8") as handle:
            json.dump(mapping, handle, indent=2)
            handle.write("\n")
    return 0


def _cmd_tree(args) -> int:
    program = _load(args.file)
    goal = parse_term(args.expr, program.signature)
    bounds = Bounds(args.max_steps, args.max_nodes, None)
    gen = FreshVars(start=args.seed)
    result = search(goal, program, args.strategy, bounds, gen)
    if args.format == "json":
        print(json.dumps(node_to_dict(result.root), indent=2))
    else:
        for line in _narrow_tree_lines(result.root):
            print(line)
    return 0


def _cmd_oracle(args) -> int:
    program = _load(args.file)
    if args.oracle_command == "rewrites":
        t = parse_term(args.expr, program.signature)
        target = parse_term(args.target, program.signature)
        ok = rewrites_to(program, t, target, args.max_steps)
        print("yes" if ok else "no")
        return 0
    equation = parse_term(args.expr, program.signature)
    solutions = ground_solutions(program, equation, args.size, args.max_steps)
    for sigma in solutions:
        print(str(sigma))
    print(f"{len(solutions)} solution(s)")
    return 0


_DISPATCH = {
    "check": _cmd_check,
    "eval": _cmd_eval,
    "uniform": _cmd_uniform,
    "peval": _cmd_peval,
    "tree": _cmd_tree,
    "oracle": _cmd_oracle,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (ParseError, ProgramError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ProgramClassError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except PEControlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
