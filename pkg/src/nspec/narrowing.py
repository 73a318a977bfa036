"""Narrowing strategies and the bounded search engine.

Two step strategies are provided: `nns` computes needed narrowing steps
by descending a definitional tree, `lns` computes lazy narrowing steps
by linear unification against every rule, recursing into demanded
positions.  `search` expands a goal into a narrowing tree under either
strategy, collecting (answer, constructor term) pairs at the leaves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .deftree import Branch, DefTree, Leaf, ProgramClassError, is_inductively_sequential
from .program import Program, Rule
from .terms import (
    App,
    CONSTRUCTOR,
    Demand,
    Fail,
    FreshVars,
    IDENTITY,
    OPERATION,
    Position,
    Substitution,
    Succ,
    Term,
    Var,
    compose,
    canonical_rename,
    is_constructor_term,
    is_operation_rooted,
    is_root_stable,
    linear_unify,
    match,
    replace_at,
    subterm_at,
    subterms,
    vars_of,
)


@dataclass(frozen=True)
class Step:
    """One narrowing step: rewrite at `position` with a renamed-apart
    `rule` after instantiating by `subst`.

    For needed steps, `canonical` is the elementary decomposition
    phi_1 .. phi_k of the substitution (applied left to right): each
    entry is the identity or binds one variable to a shallow constructor
    application of fresh variables.
    """

    position: Position
    rule: Rule
    subst: Substitution
    canonical: Tuple[Substitution, ...] = ()

    def __str__(self) -> str:
        return f"({list(self.position)}, {self.rule.label or self.rule}, {self.subst})"


def compose_canonical(parts: Iterable[Substitution]) -> Substitution:
    acc = IDENTITY
    for phi in parts:
        acc = compose(phi, acc)
    return acc


def nns(t: Term, trees: Dict[str, DefTree], gen: FreshVars,
        tree: Optional[DefTree] = None) -> List[Step]:
    """Needed narrowing steps of an operation-rooted term.

    Walks the definitional tree of the root.  At a branch with inductive
    position o: a variable at t|o is instantiated child by child, a
    constructor selects the matching child, and an operation recurses
    into its own tree with positions prefixed by o.  Leaves emit the
    renamed-apart rule at the root.
    """
    if not is_operation_rooted(t):
        raise ValueError(f"needed narrowing needs an operation-rooted term, got {t}")
    if tree is None:
        tree = trees.get(t.root.name)
        if tree is None:
            return []
    if match(tree.pattern, t) is None:
        raise ValueError(f"tree pattern {tree.pattern} does not subsume {t}")
    gen.reserve(vars_of(t))

    out: List[Step] = []
    for pos, rule, parts in _nns(t, tree, trees, gen):
        out.append(Step(pos, rule, compose_canonical(parts), tuple(parts)))
    return out


def _nns(t: App, node: DefTree, trees: Dict[str, DefTree], gen: FreshVars
         ) -> List[Tuple[Position, Rule, List[Substitution]]]:
    if isinstance(node, Leaf):
        return [((), node.rule.renamed(gen), [IDENTITY])]

    sub = subterm_at(t, node.position)
    results: List[Tuple[Position, Rule, List[Substitution]]] = []
    if isinstance(sub, Var):
        for i, child in enumerate(node.children):
            ctor = node.child_constructor(i)
            tau = Substitution({sub: App(ctor, gen.fresh_tuple(ctor.arity))})
            for pos, rule, parts in _nns(tau.apply(t), child, trees, gen):
                results.append((pos, rule, [tau] + parts))
    elif sub.root.kind == CONSTRUCTOR:
        for i, child in enumerate(node.children):
            if node.child_constructor(i) == sub.root:
                for pos, rule, parts in _nns(t, child, trees, gen):
                    results.append((pos, rule, [IDENTITY] + parts))
                break
    else:
        inner = trees.get(sub.root.name)
        if inner is not None:
            for pos, rule, parts in _nns(sub, inner, trees, gen):
                results.append((node.position + pos, rule, [IDENTITY] + parts))
    return results


def lns(t: Term, program: Program, gen: FreshVars) -> List[Step]:
    """Lazy narrowing steps of an operation-rooted term.

    Every rule whose root matches is linearly unified against the
    subterm; successes become steps, demanded positions are collected
    (across all rules, deduplicated) and recursed into over all rules.
    """
    if not is_operation_rooted(t):
        raise ValueError(f"lazy narrowing needs an operation-rooted term, got {t}")
    bad = [r for r in program.rules
           if not r.is_left_linear() or not r.is_constructor_based()]
    if bad:
        raise ProgramClassError(
            "lazy narrowing requires left-linear constructor-based rules; "
            "offending: " + "; ".join(str(r) for r in bad))
    gen.reserve(vars_of(t))
    return _lns(t, (), program, gen)


def _lns(t: Term, at: Position, program: Program, gen: FreshVars) -> List[Step]:
    sub = subterm_at(t, at)
    steps: List[Step] = []
    demanded: Dict[Position, None] = {}
    for rule in program.rules:
        if not isinstance(sub, App) or rule.lhs.root != sub.root:
            continue
        variant = rule.renamed(gen)
        outcome = linear_unify(variant.lhs, sub)
        if isinstance(outcome, Succ):
            steps.append(Step(at, variant, outcome.subst, (outcome.subst,)))
        elif isinstance(outcome, Demand):
            for q in outcome.positions:
                demanded.setdefault(at + q)
    for q in sorted(demanded):
        steps.extend(_lns(t, q, program, gen))
    return steps


def narrow(t: Term, step: Step) -> Term:
    """The term reached from t by one narrowing step."""
    u = step.subst.apply(t)
    redex = subterm_at(u, step.position)
    theta = match(step.rule.lhs, redex)
    if theta is None:
        raise ValueError(
            f"step rule {step.rule} does not match {redex} in {u}")
    return replace_at(u, step.position, theta.apply(step.rule.rhs))


def rewrite_step(t: Term, position: Position, rule: Rule) -> Term:
    """Plain rewriting: replace the redex at position by the rule's rhs
    instance."""
    redex = subterm_at(t, position)
    theta = match(rule.lhs, redex)
    if theta is None:
        raise ValueError(f"rule {rule} does not match {redex}")
    return replace_at(t, position, theta.apply(rule.rhs))


def outermost_needed_redex(t: Term, trees: Dict[str, DefTree],
                           node: Optional[DefTree] = None) -> Optional[Position]:
    """The position a definitional tree sends rewriting to, if any.

    None means the evaluation suspends: the scrutinized subterm is a
    variable, or a constructor without a matching child.
    """
    if not is_operation_rooted(t):
        raise ValueError(f"expected an operation-rooted term, got {t}")
    if node is None:
        node = trees.get(t.root.name)
        if node is None:
            return None
    if isinstance(node, Leaf):
        return ()
    sub = subterm_at(t, node.position)
    if isinstance(sub, App) and sub.root.kind == CONSTRUCTOR:
        for i, child in enumerate(node.children):
            if node.child_constructor(i) == sub.root:
                return outermost_needed_redex(t, trees, child)
        return None
    if is_operation_rooted(sub):
        inner = outermost_needed_redex(sub, trees)
        if inner is None:
            return None
        return node.position + inner
    return None  # variable at the inductive position


INNER = "inner"
SUCCESS = "success"
FAILING = "failing"
INCOMPLETE = "incomplete"


@dataclass
class Node:
    term: Term
    status: str = INNER
    children: List[Tuple[Step, "Node"]] = field(default_factory=list)
    offered: int = 0  # how many steps the strategy produced here

    def nodes(self) -> List["Node"]:
        out = [self]
        for _, child in self.children:
            out.extend(child.nodes())
        return out


@dataclass(frozen=True)
class Bounds:
    max_steps: int = 25
    max_nodes: int = 2000
    max_solutions: Optional[int] = None


@dataclass
class SearchResult:
    root: Node
    answers: List[Tuple[Substitution, Term]]
    complete: bool


def _leftmost_operation_position(t: Term) -> Optional[Position]:
    for pos, sub in sorted(subterms(t)):
        if is_operation_rooted(sub):
            return pos
    return None


def strategy_steps(t: Term, program: Program, strategy: str,
                   trees: Dict[str, DefTree], gen: FreshVars) -> List[Step]:
    """Steps of a strategy, lifted over constructor prefixes.

    Both strategies act on operation-rooted terms only; a constructor
    prefix is crossed by narrowing the leftmost-outermost operation-rooted
    subterm.
    """
    if is_root_stable(t):
        pos = _leftmost_operation_position(t)
        if pos is None:
            return []
        inner = strategy_steps(subterm_at(t, pos), program, strategy, trees, gen)
        return [Step(pos + s.position, s.rule, s.subst, s.canonical) for s in inner]
    if strategy == "needed":
        return nns(t, trees, gen)
    if strategy == "lazy":
        return lns(t, program, gen)
    raise ValueError(f"unknown strategy {strategy!r}")


def _require_inductively_sequential(program: Program) -> Dict[str, DefTree]:
    report = is_inductively_sequential(program)
    if not report.ok:
        raise ProgramClassError(
            "needed narrowing requires an inductively sequential program; "
            "no definitional tree for: " + ", ".join(report.failures))
    return report.trees


def search(goal: Term, program: Program, strategy: str = "needed",
           bounds: Bounds = Bounds(), gen: Optional[FreshVars] = None
           ) -> SearchResult:
    """Depth-first bounded narrowing search from a goal.

    Leaves are success (constructor term), failing (no step applies), or
    incomplete (a bound cut the expansion).  Answers are the accumulated
    substitutions restricted to the goal's variables, paired with the
    leaf term; remaining fresh variables are canonically renamed.
    """
    trees: Dict[str, DefTree] = {}
    if strategy == "needed":
        trees = _require_inductively_sequential(program)
    if gen is None:
        gen = FreshVars()
    gen.reserve(vars_of(goal))
    gen.reserve(program.all_variables())

    goal_vars = vars_of(goal)
    root = Node(goal)
    answers: List[Tuple[Substitution, Term]] = []
    budget = [bounds.max_nodes - 1]
    complete = [True]

    def enough_solutions() -> bool:
        return (bounds.max_solutions is not None
                and len(answers) >= bounds.max_solutions)

    def emit(node: Node, acc: Substitution) -> None:
        node.status = SUCCESS
        answer = acc.restrict(goal_vars)
        renamed = canonical_rename(
            [answer.apply(Var(v.name)) for v in goal_vars] + [node.term],
            keep=goal_vars)
        answers.append((
            Substitution(dict(zip(goal_vars, renamed[:-1]))), renamed[-1]))

    def expand(node: Node, acc: Substitution, depth: int) -> None:
        if is_constructor_term(node.term):
            emit(node, acc)
            return
        steps = strategy_steps(node.term, program, strategy, trees, gen)
        node.offered = len(steps)
        if not steps:
            node.status = FAILING
            return
        if depth >= bounds.max_steps or enough_solutions():
            node.status = INCOMPLETE
            complete[0] = False
            return
        for step in steps:
            if budget[0] <= 0 or enough_solutions():
                node.status = INCOMPLETE
                complete[0] = False
                break
            budget[0] -= 1
            child = Node(narrow(node.term, step))
            node.children.append((step, child))
            expand(child, compose(step.subst, acc), depth + 1)

    expand(root, IDENTITY, 0)
    return SearchResult(root, answers, complete[0])


def deterministically_evaluable(t: Term, program: Program,
                                bounds: Bounds = Bounds()) -> Optional[bool]:
    """True/False when the bounded needed tree settles it, None when a
    bound was hit first (indeterminate).

    A term is deterministically evaluable when every node of its needed
    narrowing tree has at most one step.
    """
    result = search(t, program, "needed", bounds)
    nodes = result.root.nodes()
    if any(node.offered > 1 for node in nodes):
        return False
    if not result.complete or any(n.status == INCOMPLETE for n in nodes):
        return None
    return True


def rewrite_normalize(t: Term, program: Program, max_steps: int = 1000
                      ) -> Tuple[Term, List[Term], bool]:
    """Repeatedly rewrite at the outermost needed redex.

    Returns (final term, intermediate terms, suspended) where suspended
    reports that an operation-rooted (sub)term had no needed position.
    Constructor prefixes are crossed like in search.
    """
    trees = _require_inductively_sequential(program)
    trace: List[Term] = []
    current = t
    for _ in range(max_steps):
        if is_constructor_term(current):
            return current, trace, False
        if is_root_stable(current):
            prefix = _leftmost_operation_position(current)
            target = subterm_at(current, prefix)
        else:
            prefix = ()
            target = current
        pos = outermost_needed_redex(target, trees)
        if pos is None:
            return current, trace, True
        redex = subterm_at(target, pos)
        rule = next(
            (r for r in program.rules_for(redex.root.name)
             if match(r.lhs, redex) is not None), None)
        if rule is None:
            return current, trace, True
        current = replace_at(
            current, prefix,
            rewrite_step(target, pos, rule))
        trace.append(current)
    return current, trace, True


def node_to_dict(node: Node) -> dict:
    """JSON-friendly dump of a narrowing tree."""
    return {
        "term": str(node.term),
        "status": node.status,
        "arcs": [
            {
                "position": list(step.position),
                "rule": step.rule.label or str(step.rule),
                "subst": {x.name: str(t) for x, t in sorted(
                    step.subst.mapping.items(), key=lambda kv: kv[0].name)},
                "node": node_to_dict(child),
            }
            for step, child in node.children
        ],
    }
