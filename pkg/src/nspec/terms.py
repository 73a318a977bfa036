"""Terms, positions, substitutions, and unification.

A term is either a variable or the application of a declared symbol
(constructor or operation) to exactly arity many argument terms.
Positions are tuples of 1-based argument indices; the empty tuple
addresses the root.  All values here are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

CONSTRUCTOR = "constructor"
OPERATION = "operation"

ROOT: "Position" = ()


@dataclass(frozen=True)
class Symbol:
    """A declared constructor or operation with a fixed arity."""

    name: str
    arity: int
    kind: str

    def __post_init__(self) -> None:
        if self.arity < 0:
            raise ValueError(f"negative arity for symbol {self.name!r}")
        if self.kind not in (CONSTRUCTOR, OPERATION):
            raise ValueError(f"unknown symbol kind {self.kind!r}")

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    root: Symbol
    args: Tuple["Term", ...] = ()

    def __post_init__(self) -> None:
        if len(self.args) != self.root.arity:
            raise ValueError(
                f"{self.root} applied to {len(self.args)} argument(s)")

    def __str__(self) -> str:
        if not self.args:
            return self.root.name
        return f"{self.root.name}({', '.join(map(str, self.args))})"


Term = Union[Var, App]
Position = Tuple[int, ...]


def is_operation_rooted(t: Term) -> bool:
    return isinstance(t, App) and t.root.kind == OPERATION


def is_constructor_rooted(t: Term) -> bool:
    return isinstance(t, App) and t.root.kind == CONSTRUCTOR


def is_root_stable(t: Term) -> bool:
    """True for variables and constructor-rooted terms: no rule can ever
    apply at the root of such a term."""
    return isinstance(t, Var) or t.root.kind == CONSTRUCTOR


def is_constructor_term(t: Term) -> bool:
    """True iff every symbol occurring in t is a constructor."""
    if isinstance(t, Var):
        return True
    return t.root.kind == CONSTRUCTOR and all(
        is_constructor_term(a) for a in t.args)


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    return all(is_ground(a) for a in t.args)


def is_pattern(t: Term) -> bool:
    """A pattern is an operation applied to constructor terms."""
    return is_operation_rooted(t) and all(is_constructor_term(a) for a in t.args)


def term_size(t: Term) -> int:
    """Number of variable and symbol occurrences in t."""
    if isinstance(t, Var):
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def vars_of(t: Term) -> Tuple[Var, ...]:
    """Variables of t in left-to-right order of first occurrence."""
    seen: Dict[Var, None] = {}

    def walk(u: Term) -> None:
        if isinstance(u, Var):
            seen.setdefault(u)
        else:
            for a in u.args:
                walk(a)

    walk(t)
    return tuple(seen)


def is_linear(t: Term) -> bool:
    """True iff no variable occurs twice in t."""
    seen = set()

    def walk(u: Term) -> bool:
        if isinstance(u, Var):
            if u in seen:
                return False
            seen.add(u)
            return True
        return all(walk(a) for a in u.args)

    return walk(t)


def subterms(t: Term) -> Iterator[Tuple[Position, Term]]:
    """All (position, subterm) pairs of t in preorder."""
    stack: List[Tuple[Position, Term]] = [((), t)]
    while stack:
        pos, u = stack.pop()
        yield pos, u
        if isinstance(u, App):
            for i in range(len(u.args), 0, -1):
                stack.append((pos + (i,), u.args[i - 1]))


def var_positions(t: Term) -> List[Position]:
    return [p for p, u in subterms(t) if isinstance(u, Var)]


def subterm_at(t: Term, pos: Sequence[int]) -> Term:
    """The subterm of t at pos; rejects out-of-range indices."""
    u = t
    for depth, i in enumerate(pos):
        if isinstance(u, Var) or not 1 <= i <= len(u.args):
            raise ValueError(
                f"invalid position {tuple(pos)} in {t}: index {i} "
                f"(component {depth + 1}) is out of range")
        u = u.args[i - 1]
    return u


def replace_at(t: Term, pos: Sequence[int], s: Term) -> Term:
    """A copy of t with the subterm at pos replaced by s."""
    if not pos:
        return s
    i = pos[0]
    if isinstance(t, Var) or not 1 <= i <= len(t.args):
        raise ValueError(
            f"invalid position {tuple(pos)} in {t}: index {i} "
            f"(component 1) is out of range")
    args = list(t.args)
    args[i - 1] = replace_at(args[i - 1], pos[1:], s)
    return App(t.root, tuple(args))


def position_prefix(p: Sequence[int], q: Sequence[int]) -> bool:
    """True iff p is a (not necessarily proper) prefix of q."""
    return len(p) <= len(q) and tuple(q[:len(p)]) == tuple(p)


def positions_disjoint(p: Sequence[int], q: Sequence[int]) -> bool:
    return not position_prefix(p, q) and not position_prefix(q, p)


class Substitution:
    """A finite map from variables to terms.

    Identity bindings are dropped.  Instances are immutable and hashable;
    application is simultaneous (one pass), which is the right semantics
    both for idempotent unifiers and for literal matchers.
    """

    __slots__ = ("_map",)

    def __init__(self, bindings: Union[Dict[Var, Term], Iterable[Tuple[Var, Term]], None] = None):
        items = bindings.items() if isinstance(bindings, dict) else (bindings or ())
        m: Dict[Var, Term] = {}
        for x, t in items:
            if not isinstance(x, Var):
                raise TypeError(f"substitution domain must be variables, got {x!r}")
            if t != x:
                m[x] = t
        object.__setattr__(self, "_map", m)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("Substitution is immutable")

    @property
    def mapping(self) -> Dict[Var, Term]:
        return dict(self._map)

    def domain(self) -> Tuple[Var, ...]:
        return tuple(self._map)

    def get(self, x: Var, default: Optional[Term] = None) -> Optional[Term]:
        return self._map.get(x, default)

    def __len__(self) -> int:
        return len(self._map)

    def __bool__(self) -> bool:
        return bool(self._map)

    def __eq__(self, other) -> bool:
        return isinstance(other, Substitution) and self._map == other._map

    def __hash__(self) -> int:
        return hash(frozenset(self._map.items()))

    def __repr__(self) -> str:
        inner = ", ".join(
            f"{x} -> {t}" for x, t in sorted(self._map.items(), key=lambda kv: kv[0].name))
        return "{" + inner + "}"

    def apply(self, t: Term) -> Term:
        if isinstance(t, Var):
            return self._map.get(t, t)
        if not self._map:
            return t
        return App(t.root, tuple(self.apply(a) for a in t.args))

    __call__ = apply

    def restrict(self, variables: Iterable[Var]) -> "Substitution":
        keep = set(variables)
        return Substitution({x: t for x, t in self._map.items() if x in keep})

    def is_idempotent(self) -> bool:
        rng_vars = set()
        for t in self._map.values():
            rng_vars.update(vars_of(t))
        return rng_vars.isdisjoint(self._map)


IDENTITY = Substitution()


def apply(sigma: Substitution, t: Term) -> Term:
    return sigma.apply(t)


def compose(outer: Substitution, inner: Substitution) -> Substitution:
    """The substitution mapping t to outer(inner(t))."""
    m: Dict[Var, Term] = {}
    for x in inner.domain():
        m[x] = outer.apply(inner.apply(x))
    for y in outer.domain():
        if y not in m:
            m[y] = outer.apply(y)
    return Substitution(m)


def _solve(pairs: List[Tuple[Term, Term]]) -> Optional[Substitution]:
    """Most general unifier of a list of term pairs, or None.

    Deterministic: pairs are processed first-in first-out, and when two
    variables meet, the left one is bound.  The result is idempotent.
    """
    sub: Dict[Var, Term] = {}

    def bind(x: Var, t: Term) -> bool:
        if x in vars_of(t):
            return False  # occurs check
        one = Substitution({x: t})
        for y in list(sub):
            sub[y] = one.apply(sub[y])
        sub[x] = t
        return True

    queue = list(pairs)
    while queue:
        a, b = queue.pop(0)
        a = Substitution(sub).apply(a)
        b = Substitution(sub).apply(b)
        if a == b:
            continue
        if isinstance(a, Var):
            if not bind(a, b):
                return None
        elif isinstance(b, Var):
            if not bind(b, a):
                return None
        else:
            if a.root != b.root:
                return None
            queue = list(zip(a.args, b.args)) + queue
    return Substitution(sub)


def unify(s: Term, t: Term) -> Optional[Substitution]:
    """Most general unifier of s and t, or None if they do not unify."""
    return _solve([(s, t)])


def match(pattern: Term, t: Term) -> Optional[Substitution]:
    """A substitution theta with theta(pattern) == t, or None.

    The result is kept literal (not re-normalized): matching f(X, Y)
    against f(Y, X) legitimately yields the swap {X -> Y, Y -> X}.
    """
    bound: Dict[Var, Term] = {}
    stack = [(pattern, t)]
    while stack:
        p, u = stack.pop()
        if isinstance(p, Var):
            if p in bound:
                if bound[p] != u:
                    return None
            else:
                bound[p] = u
        else:
            if isinstance(u, Var) or p.root != u.root:
                return None
            stack.extend(zip(p.args, u.args))
    return Substitution(bound)


def is_variant(s: Term, t: Term) -> bool:
    """True iff s and t are equal up to a renaming of variables."""
    return match(s, t) is not None and match(t, s) is not None


@dataclass(frozen=True)
class Succ:
    subst: Substitution


@dataclass(frozen=True)
class Fail:
    pass


@dataclass(frozen=True)
class Demand:
    positions: Tuple[Position, ...]


LUResult = Union[Succ, Fail, Demand]


def linear_unify(pattern: App, goal: App) -> LUResult:
    """Linear unification of a pattern f(d1..dn) with a goal term f(t1..tn).

    Walks corresponding positions of the two terms.  A constructor of the
    pattern meeting an operation-rooted goal subterm records that goal
    position as demanded; a constructor clash fails.  Precedence: any
    clash makes the whole result Fail; otherwise any demanded position
    makes it Demand (bindings are discarded); otherwise the collected
    bindings are solved into an idempotent Succ substitution.
    """
    if isinstance(pattern, Var) or isinstance(goal, Var) or pattern.root != goal.root:
        raise ValueError(f"root mismatch between {pattern} and {goal}")
    if not is_linear(pattern):
        raise ValueError(f"pattern {pattern} is not linear")
    shared = set(vars_of(pattern)) & set(vars_of(goal))
    if shared:
        raise ValueError(
            f"pattern and goal share variables: {sorted(v.name for v in shared)}")

    demanded: List[Position] = []
    equations: List[Tuple[Term, Term]] = []

    def walk(p: Term, g: Term, at: Position) -> bool:
        if isinstance(p, Var):
            equations.append((p, g))
            return True
        if isinstance(g, Var):
            equations.append((p, g))
            return True
        if g.root.kind == OPERATION:
            demanded.append(at)
            return True
        if p.root != g.root:
            return False  # constructor clash
        return all(
            walk(pa, ga, at + (i,))
            for i, (pa, ga) in enumerate(zip(p.args, g.args), start=1))

    for i, (pa, ga) in enumerate(zip(pattern.args, goal.args), start=1):
        if not walk(pa, ga, (i,)):
            return Fail()
    if demanded:
        return Demand(tuple(demanded))
    sigma = _solve(equations)
    if sigma is None:
        return Fail()
    return Succ(sigma)


class FreshVars:
    """Derivation-scoped source of fresh variables and rule renamings.

    Fresh variables are named V<n>; renamed-apart copies of rule
    variables get a _<n> suffix.  Names already in use (goal or program
    variables, or previously issued) are skipped.
    """

    def __init__(self, avoid: Iterable[Var] = (), start: int = 0):
        self._used = {v.name for v in avoid}
        self._counter = start

    def reserve(self, variables: Iterable[Var]) -> None:
        self._used.update(v.name for v in variables)

    def _next(self) -> int:
        self._counter += 1
        return self._counter

    def fresh(self) -> Var:
        while True:
            name = f"V{self._next()}"
            if name not in self._used:
                self._used.add(name)
                return Var(name)

    def fresh_tuple(self, n: int) -> Tuple[Var, ...]:
        return tuple(self.fresh() for _ in range(n))

    def renaming(self, variables: Sequence[Var]) -> Substitution:
        """Rename all given variables apart with one shared suffix."""
        while True:
            k = self._next()
            names = {v: f"{v.name}_{k}" for v in variables}
            if all(n not in self._used for n in names.values()):
                self._used.update(names.values())
                return Substitution({v: Var(n) for v, n in names.items()})


def canonical_rename(terms: Sequence[Term], keep: Iterable[Var] = (),
                     prefix: str = "V") -> List[Term]:
    """Rename the variables of terms (except those in keep) canonically.

    Variables are renamed to <prefix>1, <prefix>2, ... in order of first
    occurrence across the whole sequence, skipping names that collide
    with kept variables.  Used to compare answers up to renaming.
    """
    keep_set = set(keep)
    taken = {v.name for v in keep_set}
    mapping: Dict[Var, Var] = {}
    counter = 0

    def walk(t: Term) -> Term:
        nonlocal counter
        if isinstance(t, Var):
            if t in keep_set:
                return t
            if t not in mapping:
                while True:
                    counter += 1
                    name = f"{prefix}{counter}"
                    if name not in taken:
                        break
                mapping[t] = Var(name)
            return mapping[t]
        return App(t.root, tuple(walk(a) for a in t.args))

    return [walk(t) for t in terms]
