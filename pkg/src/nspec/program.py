"""Signatures, rewrite rules, programs, and well-formedness checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .terms import (
    App,
    CONSTRUCTOR,
    OPERATION,
    Substitution,
    Symbol,
    Term,
    Var,
    FreshVars,
    is_constructor_term,
    is_linear,
    subterms,
    unify,
    vars_of,
)

EQ = "eq"
AND = "and"


class ProgramError(Exception):
    """A structurally ill-formed rule, signature, or program."""


@dataclass(frozen=True)
class Rule:
    """A rewrite rule lhs -> rhs.

    The left-hand side must not be a variable and must not invent
    variables on the right.
    """

    lhs: App
    rhs: Term
    label: str = ""

    def __post_init__(self) -> None:
        if isinstance(self.lhs, Var):
            raise ProgramError("rule left-hand side must not be a variable")
        extra = set(vars_of(self.rhs)) - set(vars_of(self.lhs))
        if extra:
            names = ", ".join(sorted(v.name for v in extra))
            raise ProgramError(
                f"rule {self.lhs} -> {self.rhs} introduces variables {names} "
                "on the right-hand side")

    def __str__(self) -> str:
        return f"{self.lhs} -> {self.rhs}"

    @property
    def variables(self) -> Tuple[Var, ...]:
        return vars_of(self.lhs)

    def renamed(self, gen: FreshVars) -> "Rule":
        """A variant of this rule with all variables renamed apart."""
        theta = gen.renaming(self.variables)
        return Rule(theta.apply(self.lhs), theta.apply(self.rhs), self.label)

    def is_left_linear(self) -> bool:
        return is_linear(self.lhs)

    def is_constructor_based(self) -> bool:
        return all(is_constructor_term(a) for a in self.lhs.args)


class Signature:
    """An ordered table of declared symbols."""

    def __init__(self, symbols: Iterable[Symbol] = ()):
        self._table: Dict[str, Symbol] = {}
        for s in symbols:
            self.declare(s)

    def declare(self, symbol: Symbol) -> Symbol:
        old = self._table.get(symbol.name)
        if old is not None:
            if old != symbol:
                raise ProgramError(
                    f"conflicting declarations for {symbol.name}: "
                    f"{old.kind} {old} vs {symbol.kind} {symbol}")
            return old
        self._table[symbol.name] = symbol
        return symbol

    def get(self, name: str) -> Optional[Symbol]:
        return self._table.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._table

    def __iter__(self):
        return iter(self._table.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, Signature) and list(self) == list(other)

    def constructors(self) -> List[Symbol]:
        return [s for s in self if s.kind == CONSTRUCTOR]

    def operations(self) -> List[Symbol]:
        return [s for s in self if s.kind == OPERATION]


class Program:
    """A signature together with an ordered list of rewrite rules."""

    def __init__(self, signature: Signature, rules: Iterable[Rule],
                 has_strict_equality: bool = False):
        self.signature = signature
        self.rules: Tuple[Rule, ...] = tuple(rules)
        self.has_strict_equality = has_strict_equality
        for r in self.rules:
            self._check_symbols(r)

    def _check_symbols(self, rule: Rule) -> None:
        for t in (rule.lhs, rule.rhs):
            for _, u in subterms(t):
                if isinstance(u, App) and self.signature.get(u.root.name) != u.root:
                    raise ProgramError(
                        f"rule {rule} uses undeclared symbol {u.root}")
        if rule.lhs.root.kind != OPERATION:
            raise ProgramError(
                f"rule {rule} rewrites a constructor root {rule.lhs.root}")

    def rules_for(self, name: str) -> List[Rule]:
        return [r for r in self.rules if r.lhs.root.name == name]

    def defined_operations(self) -> List[Symbol]:
        defined = {r.lhs.root.name for r in self.rules}
        return [s for s in self.signature.operations() if s.name in defined]

    def all_variables(self) -> List[Var]:
        out: Dict[Var, None] = {}
        for r in self.rules:
            for v in vars_of(r.lhs) + vars_of(r.rhs):
                out.setdefault(v)
        return list(out)

    def structure(self):
        return (
            [(s.name, s.arity) for s in self.signature.constructors()],
            [(s.name, s.arity) for s in self.signature.operations()],
            [(r.lhs, r.rhs) for r in self.rules],
        )

    def __eq__(self, other) -> bool:
        """Structural identity: same declarations, same rules in order.

        Labels and the strict-equality bookkeeping flag are metadata and
        do not participate.
        """
        return isinstance(other, Program) and self.structure() == other.structure()


@dataclass(frozen=True)
class Overlap:
    rule: str
    other: str
    position: Tuple[int, ...]
    mgu: Substitution


@dataclass(frozen=True)
class ValidationReport:
    left_linear: bool
    constructor_based: bool
    overlaps: Tuple[Overlap, ...]

    @property
    def orthogonal(self) -> bool:
        return self.left_linear and not self.overlaps


def validate(program: Program) -> ValidationReport:
    """Left-linearity, constructor-basedness, and the overlap list.

    An overlap is a non-variable position p of one lhs whose subterm
    unifies with a renamed-apart copy of another lhs (or of the same lhs
    when p is not the root).  Root overlaps of distinct rules are
    reported once per unordered pair.
    """
    left_linear = all(r.is_left_linear() for r in program.rules)
    constructor_based = all(r.is_constructor_based() for r in program.rules)

    overlaps: List[Overlap] = []
    gen = FreshVars(avoid=program.all_variables())
    rules = program.rules
    for i, ri in enumerate(rules):
        for j, rj in enumerate(rules):
            other = rj.renamed(gen)
            for pos, sub in subterms(ri.lhs):
                if isinstance(sub, Var):
                    continue
                if pos == () and (i == j or j < i):
                    continue  # self-overlap at the root / symmetric duplicate
                mgu = unify(sub, other.lhs)
                if mgu is not None:
                    overlaps.append(Overlap(ri.label, rj.label, pos, mgu))
    return ValidationReport(left_linear, constructor_based, tuple(overlaps))


def _strict_equality_rules(signature: Signature) -> List[Rule]:
    eq = signature.get(EQ)
    conj = signature.get(AND)
    rules: List[Rule] = []
    n = 0
    for c in signature.constructors():
        n += 1
        label = f"E{n}"
        if c.arity == 0:
            t = App(c)
            rules.append(Rule(App(eq, (t, t)), App(signature.get("true")), label))
        else:
            xs = tuple(Var(f"X{i}") for i in range(1, c.arity + 1))
            ys = tuple(Var(f"Y{i}") for i in range(1, c.arity + 1))
            body: Term = App(eq, (xs[-1], ys[-1]))
            for x, y in zip(reversed(xs[:-1]), reversed(ys[:-1])):
                body = App(conj, (App(eq, (x, y)), body))
            rules.append(Rule(App(eq, (App(c, xs), App(c, ys))), body, label))
    rules.append(Rule(
        App(conj, (App(signature.get("true")), Var("X"))), Var("X"), f"E{n + 1}"))
    return rules


def add_strict_equality(program: Program) -> Program:
    """Extend a program with the rules for strict equality.

    Adds eq/2 and and/2 together with one eq rule per constructor
    (argument equations nested to the right, a single conjunct collapsing
    to itself) and the rule and(true, X) -> X.  A true/0 constructor is
    declared when missing.  Idempotent: a program already carrying the
    generated definition is returned with the flag set.
    """
    if program.has_strict_equality:
        return program

    sig = Signature(program.signature)
    if "true" in sig and sig.get("true").kind != CONSTRUCTOR:
        raise ProgramError("strict equality needs true/0 as a constructor")
    sig.declare(Symbol("true", 0, CONSTRUCTOR))

    for name in (EQ, AND):
        known = sig.get(name)
        if known is not None and known != Symbol(name, 2, OPERATION):
            raise ProgramError(
                f"cannot add strict equality: {known} is already declared")

    already = EQ in sig or AND in sig
    sig.declare(Symbol(EQ, 2, OPERATION))
    sig.declare(Symbol(AND, 2, OPERATION))
    generated = _strict_equality_rules(sig)

    if already:
        present = [r for r in program.rules if r.lhs.root.name in (EQ, AND)]
        if [(r.lhs, r.rhs) for r in present] != [(r.lhs, r.rhs) for r in generated]:
            raise ProgramError(
                "cannot add strict equality: eq/and rules are user-defined")
        return Program(sig, program.rules, has_strict_equality=True)

    return Program(sig, list(program.rules) + generated, has_strict_equality=True)
