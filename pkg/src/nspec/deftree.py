"""Definitional trees, inductive sequentiality, and the uniformity transform.

A definitional tree organizes the left-hand sides of one operation into
nested case distinctions on constructor symbols.  Branch nodes carry the
variable position being scrutinized (the inductive position); leaves
carry one rule, re-expressed over the leaf's own pattern variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .program import Program, ProgramError, Rule, Signature
from .terms import (
    App,
    CONSTRUCTOR,
    OPERATION,
    FreshVars,
    Position,
    Substitution,
    Symbol,
    Term,
    Var,
    is_constructor_term,
    is_linear,
    is_variant,
    match,
    replace_at,
    subterm_at,
    subterms,
    var_positions,
    vars_of,
)


class ProgramClassError(Exception):
    """The program violates the class a strategy or transform needs."""


@dataclass(frozen=True)
class Leaf:
    pattern: App
    rule: Rule  # aligned: rule.lhs is exactly the pattern


@dataclass(frozen=True)
class Branch:
    pattern: App
    position: Position
    children: Tuple["DefTree", ...]

    def child_constructor(self, i: int) -> Symbol:
        sub = subterm_at(self.children[i].pattern, self.position)
        return sub.root


DefTree = Union[Leaf, Branch]


def pattern_of(tree: DefTree) -> App:
    return tree.pattern


def _qualifying_positions(pattern: App, lhss: Sequence[App]) -> List[Position]:
    """Variable positions of the pattern where every lhs has a constructor."""
    out = []
    for p in sorted(var_positions(pattern)):
        if all(isinstance(subterm_at(l, p), App) for l in lhss):
            out.append(p)
    return out


def _build(pattern: App, rules: Sequence[Rule], gen: FreshVars,
           tie_break: str) -> Optional[DefTree]:
    if len(rules) == 1:
        rule = rules[0]
        if is_variant(rule.lhs, pattern):
            theta = match(rule.lhs, pattern)
            return Leaf(pattern, Rule(pattern, theta.apply(rule.rhs), rule.label))

    lhss = [r.lhs for r in rules]
    candidates = _qualifying_positions(pattern, lhss)
    if tie_break == "rightmost":
        candidates = list(reversed(candidates))
    for pos in candidates:
        groups: Dict[Symbol, List[Rule]] = {}
        for r in rules:
            groups.setdefault(subterm_at(r.lhs, pos).root, []).append(r)
        children: List[DefTree] = []
        for ctor, group in groups.items():
            child_pattern = replace_at(pattern, pos, App(ctor, gen.fresh_tuple(ctor.arity)))
            child = _build(child_pattern, group, gen, tie_break)
            if child is None:
                break
            children.append(child)
        else:
            return Branch(pattern, pos, tuple(children))
    return None


def build_tree(f: Symbol, rules: Sequence[Rule],
               tie_break: str = "leftmost") -> Optional[DefTree]:
    """A definitional tree for f over the given rules, or None.

    The inductive position of each branch is the leftmost qualifying one
    (or rightmost, under the alternative tie-break); if a choice dead-ends
    deeper down, the remaining qualifying positions are tried, so absence
    of a result means no definitional tree exists at all.
    """
    if tie_break not in ("leftmost", "rightmost"):
        raise ValueError(f"unknown tie break {tie_break!r}")
    if not rules:
        return None
    for r in rules:
        if r.lhs.root != f:
            raise ProgramClassError(f"rule {r} does not define {f}")
        if not r.is_left_linear() or not r.is_constructor_based():
            return None
    for i, r in enumerate(rules):
        for other in rules[i + 1:]:
            if is_variant(r.lhs, other.lhs):
                return None  # duplicate left-hand sides
    gen = FreshVars()
    root = App(f, gen.fresh_tuple(f.arity))
    return _build(root, rules, gen, tie_break)


def forest(program: Program, tie_break: str = "leftmost"
           ) -> Tuple[Dict[str, DefTree], List[str]]:
    """Definitional trees for every defined operation; also the failures."""
    trees: Dict[str, DefTree] = {}
    failures: List[str] = []
    for op in program.defined_operations():
        tree = build_tree(op, program.rules_for(op.name), tie_break)
        if tree is None:
            failures.append(op.name)
        else:
            trees[op.name] = tree
    return trees, failures


@dataclass(frozen=True)
class ISReport:
    ok: bool
    trees: Dict[str, DefTree]
    failures: Tuple[str, ...]


def is_inductively_sequential(program: Program,
                              tie_break: str = "leftmost") -> ISReport:
    """Whether every defined operation has a definitional tree."""
    trees, failures = forest(program, tie_break)
    return ISReport(not failures, trees, tuple(failures))


def trees_isomorphic(a: DefTree, b: DefTree) -> bool:
    """Structural equality of trees modulo variable names.

    Patterns must be variants under a consistent renaming per node,
    inductive positions equal, children pairwise isomorphic in order.
    """
    if isinstance(a, Leaf) and isinstance(b, Leaf):
        return is_variant(a.pattern, b.pattern)
    if isinstance(a, Branch) and isinstance(b, Branch):
        return (a.position == b.position
                and is_variant(a.pattern, b.pattern)
                and len(a.children) == len(b.children)
                and all(trees_isomorphic(x, y)
                        for x, y in zip(a.children, b.children)))
    return False


def is_uniform(program: Program) -> bool:
    """Uniformity: each operation either has one rule f(x1..xn) -> r, or
    all its lhss are linear and differ only by distinct constructor
    patterns at one fixed argument position (plain variables elsewhere).
    """
    for op in program.defined_operations():
        rules = program.rules_for(op.name)
        if not all(r.is_left_linear() for r in rules):
            return False
        if len(rules) == 1:
            lhs = rules[0].lhs
            if all(isinstance(a, Var) for a in lhs.args):
                continue
        ok = False
        for j in range(op.arity):
            seen_ctors = set()
            good = True
            for r in rules:
                args = r.lhs.args
                pivot = args[j]
                others = args[:j] + args[j + 1:]
                if not isinstance(pivot, App) or not all(
                        isinstance(a, Var) for a in others):
                    good = False
                    break
                if not all(isinstance(x, Var) for x in pivot.args):
                    good = False
                    break
                if pivot.root in seen_ctors:
                    good = False
                    break
                seen_ctors.add(pivot.root)
            if good:
                ok = True
                break
        if not ok:
            return False
    return True


def _fresh_operation_name(base: str, index: int, signature: Signature,
                          taken: set) -> str:
    name = f"{base}_{index}"
    while name in signature or name in taken:
        index += 1
        name = f"{base}_{index}"
    return name


def uniform_transform(program: Program) -> Program:
    """Flatten nested patterns into a uniform program.

    Each function's definitional tree is walked top-down: the root branch
    keeps the function's name, every deeper branch becomes a fresh
    operation applied to the variables of its pattern in left-to-right
    order, and each branch level emits one rule per child constructor
    (its right-hand side is the original rule's at a leaf, or a call to
    the child's fresh operation at an inner branch).
    """
    report = is_inductively_sequential(program)
    if not report.ok:
        raise ProgramClassError(
            "not inductively sequential: " + ", ".join(report.failures))

    signature = Signature(program.signature)
    taken: set = set()
    new_rules: List[Rule] = []

    def call_for(sym: Symbol, pattern: App) -> App:
        return App(sym, vars_of(pattern))

    def walk(node: DefTree, sym: Symbol, base: str, counter: List[int]) -> None:
        if isinstance(node, Leaf):
            # single-rule function whose tree is a bare leaf
            new_rules.append(Rule(call_for(sym, node.pattern), node.rule.rhs,
                                  node.rule.label))
            return
        head = call_for(sym, node.pattern)
        x = subterm_at(node.pattern, node.position)
        for child in node.children:
            binding = Substitution({x: subterm_at(child.pattern, node.position)})
            lhs = binding.apply(head)
            if isinstance(child, Leaf):
                new_rules.append(Rule(lhs, child.rule.rhs))
            else:
                counter[0] += 1
                name = _fresh_operation_name(base, counter[0], signature, taken)
                taken.add(name)
                child_sym = Symbol(name, len(vars_of(child.pattern)), OPERATION)
                signature.declare(child_sym)
                new_rules.append(Rule(lhs, call_for(child_sym, child.pattern)))
                walk(child, child_sym, base, counter)

    for op in program.defined_operations():
        tree = report.trees[op.name]
        walk(tree, op, op.name, [0])

    labeled = [Rule(r.lhs, r.rhs, f"U{i + 1}") for i, r in enumerate(new_rules)]
    return Program(signature, labeled, program.has_strict_equality)
