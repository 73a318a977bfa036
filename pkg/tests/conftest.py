"""Shared fixtures: corpus programs, a seeded random generator of small
inductively sequential programs, and comparison helpers."""

import random
from pathlib import Path

import pytest

from nspec import (
    App,
    FreshVars,
    Program,
    Rule,
    Signature,
    Substitution,
    Symbol,
    Var,
    add_strict_equality,
    canonical_rename,
    match,
    parse_program,
    replace_at,
    vars_of,
)
from nspec.terms import CONSTRUCTOR, OPERATION, var_positions

DATA = Path(__file__).parent / "data"


def load(name: str) -> Program:
    return add_strict_equality(parse_program((DATA / name).read_text()))


@pytest.fixture(scope="session")
def leq_prog() -> Program:
    return load("leq.flp")


@pytest.fixture(scope="session")
def append_prog() -> Program:
    return load("append.flp")


@pytest.fixture(scope="session")
def double_prog() -> Program:
    return load("double.flp")


@pytest.fixture(scope="session")
def gfh_prog() -> Program:
    return load("gfh.flp")


@pytest.fixture(scope="session")
def loop_prog() -> Program:
    return load("loop.flp")


# --- seeded random small inductively sequential programs ----------------

_R_CTORS = (
    Symbol("z", 0, CONSTRUCTOR),
    Symbol("sc", 1, CONSTRUCTOR),
    Symbol("pr", 2, CONSTRUCTOR),
)


def _random_rhs(rng: random.Random, variables, ops, depth):
    kinds = ["ctor"]
    if variables:
        kinds.append("var")
    if depth > 0 and ops:
        kinds.append("op")
    kind = rng.choice(kinds)
    if kind == "var":
        return rng.choice(variables)
    if kind == "op":
        f = rng.choice(ops)
        return App(f, tuple(_random_rhs(rng, variables, ops, depth - 1)
                            for _ in range(f.arity)))
    pool = _R_CTORS if depth > 0 else _R_CTORS[:1]
    c = rng.choice(pool)
    return App(c, tuple(_random_rhs(rng, variables, ops, depth - 1)
                        for _ in range(c.arity)))


def random_program(seed: int) -> Program:
    """A small program that is inductively sequential by construction:
    each operation's left-hand sides are the leaves of a randomly grown
    definitional tree (at most 3 functions, 3 rules each, constructor
    arity at most 2)."""
    rng = random.Random(seed)
    ops = [Symbol(f"op{i + 1}", rng.randint(1, 2), OPERATION)
           for i in range(rng.randint(1, 3))]
    signature = Signature(list(_R_CTORS) + ops)

    rules = []
    for op in ops:
        gen = FreshVars()
        leaves = []

        def grow(pattern, depth):
            positions = var_positions(pattern)
            if depth > 0 and positions and len(leaves) < 3 and rng.random() < 0.6:
                pos = rng.choice(positions)
                for c in rng.sample(_R_CTORS, rng.randint(1, len(_R_CTORS))):
                    child = App(c, gen.fresh_tuple(c.arity))
                    grow(replace_at(pattern, pos, child), depth - 1)
            else:
                leaves.append(pattern)

        grow(App(op, gen.fresh_tuple(op.arity)), 2)
        for pattern in leaves[:3]:
            rhs = _random_rhs(rng, list(vars_of(pattern)), ops, rng.randint(0, 2))
            rules.append(Rule(pattern, rhs))

    labeled = [Rule(r.lhs, r.rhs, f"R{i + 1}") for i, r in enumerate(rules)]
    return Program(signature, labeled)


# --- comparison helpers --------------------------------------------------


def answer_set(result):
    """Bounded answers as a hashable set for comparison up to renaming.

    Search already restricts each answer to the goal variables and
    canonically renames the leftover free variables, so string identity
    is comparison up to renaming here.
    """
    return {(str(sigma), str(value)) for sigma, value in result.answers}


def is_instance_of(general: Substitution, special: Substitution, variables) -> bool:
    """Whether `special` equals theta after `general` on the given
    variables, for a single common theta."""
    variables = list(variables)
    tup = Symbol("tup", len(variables), CONSTRUCTOR)
    wide = App(tup, tuple(general.apply(x) for x in variables))
    narrow_ = App(tup, tuple(special.apply(x) for x in variables))
    wide = canonical_rename([wide])[0]
    return match(wide, narrow_) is not None


def steps_view(steps, goal_vars):
    """(position, rule label, answer-relevant substitution) per step,
    canonically renamed for golden comparisons."""
    out = []
    for step in steps:
        images = [step.subst.apply(x) for x in goal_vars]
        renamed = canonical_rename(images, keep=goal_vars)
        sigma = Substitution(dict(zip(goal_vars, renamed)))
        out.append((step.position, step.rule.label, str(sigma)))
    return out
