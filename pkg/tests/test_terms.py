"""First-order term machinery: positions, substitution, unification."""

import pytest
from hypothesis import given, strategies as st

from nspec.terms import (
    App,
    Demand,
    Fail,
    FreshVars,
    IDENTITY,
    Substitution,
    Succ,
    Symbol,
    Var,
    apply,
    canonical_rename,
    compose,
    is_linear,
    is_pattern,
    is_variant,
    linear_unify,
    match,
    position_prefix,
    positions_disjoint,
    replace_at,
    subterm_at,
    subterms,
    term_size,
    unify,
    var_positions,
    vars_of,
)

ZERO = Symbol("0", 0, "constructor")
S = Symbol("s", 1, "constructor")
LEQ = Symbol("leq", 2, "operation")
ADD = Symbol("add", 2, "operation")


def num(n):
    t = App(ZERO)
    for _ in range(n):
        t = App(S, (t,))
    return t


def leq(a, b):
    return App(LEQ, (a, b))


def add(a, b):
    return App(ADD, (a, b))


X, Y, N, M = Var("X"), Var("Y"), Var("N"), Var("M")


class TestSymbolsAndTerms:
    def test_symbol_str(self):
        assert str(S) == "s/1"
        assert str(LEQ) == "leq/2"

    def test_symbol_rejects_bad_kind(self):
        with pytest.raises(ValueError):
            Symbol("f", 1, "function")

    def test_symbol_rejects_negative_arity(self):
        with pytest.raises(ValueError):
            Symbol("f", -1, "operation")

    def test_app_arity_checked(self):
        with pytest.raises(ValueError):
            App(S, (num(0), num(0)))

    def test_term_str(self):
        assert str(leq(X, add(num(0), Y))) == "leq(X, add(0, Y))"
        assert str(num(2)) == "s(s(0))"
        assert str(X) == "X"

    def test_terms_hashable_and_equal_by_value(self):
        assert leq(X, Y) == leq(X, Y)
        assert hash(num(1)) == hash(num(1))
        assert num(1) != num(2)


class TestPositions:
    def test_subterms_preorder(self):
        t = leq(X, add(num(0), Y))
        assert [(p, str(s)) for p, s in subterms(t)] == [
            ((), "leq(X, add(0, Y))"),
            ((1,), "X"),
            ((2,), "add(0, Y)"),
            ((2, 1), "0"),
            ((2, 2), "Y"),
        ]

    def test_subterm_at(self):
        t = leq(X, add(num(0), Y))
        assert subterm_at(t, ()) is t
        assert subterm_at(t, (2, 2)) == Y

    def test_subterm_at_bad_position(self):
        with pytest.raises(ValueError):
            subterm_at(num(1), (2,))

    def test_replace_at(self):
        t = leq(X, add(num(0), Y))
        assert str(replace_at(t, (2,), num(1))) == "leq(X, s(0))"
        assert replace_at(t, (), num(0)) == num(0)

    def test_var_positions(self):
        assert var_positions(leq(X, add(num(0), Y))) == [(1,), (2, 2)]

    def test_prefix_and_disjoint(self):
        assert position_prefix((2,), (2, 1))
        assert not position_prefix((2, 1), (2,))
        assert position_prefix((), (1,))
        assert positions_disjoint((1,), (2,))
        assert not positions_disjoint((2,), (2, 1))

    def test_term_size(self):
        assert term_size(leq(X, add(num(0), Y))) == 5
        assert term_size(X) == 1

    def test_vars_of_first_occurrence_order(self):
        assert [v.name for v in vars_of(add(X, add(Y, X)))] == ["X", "Y"]

    def test_classification(self):
        assert is_pattern(leq(App(S, (M,)), N))
        assert not is_pattern(leq(add(X, Y), N))
        assert is_linear(leq(X, Y))
        assert not is_linear(leq(X, X))


class TestSubstitution:
    def test_repr_sorted(self):
        s = Substitution({Y: num(1), X: num(0)})
        assert repr(s) == "{X -> 0, Y -> s(0)}"
        assert repr(IDENTITY) == "{}"

    def test_identity_is_falsy(self):
        assert not IDENTITY
        assert len(IDENTITY) == 0

    def test_domain_must_be_vars(self):
        with pytest.raises(TypeError):
            Substitution({"X": num(0)})

    def test_immutable(self):
        s = Substitution({X: num(0)})
        with pytest.raises(AttributeError):
            s.mapping = {}

    def test_apply(self):
        s = Substitution({X: App(S, (Y,))})
        assert str(s.apply(add(X, X))) == "add(s(Y), s(Y))"
        assert apply(s, add(X, X)) == s.apply(add(X, X))

    def test_restrict(self):
        s = Substitution({X: App(S, (Y,))})
        assert repr(s.restrict([X])) == "{X -> s(Y)}"
        assert repr(s.restrict([Var("Z")])) == "{}"

    def test_idempotence_check(self):
        assert Substitution({X: App(S, (Y,))}).is_idempotent()
        assert not Substitution({X: App(S, (X,))}).is_idempotent()

    def test_compose_applies_outer_to_inner_images(self):
        outer = Substitution({Var("Y1"): num(0)})
        inner = Substitution({Y: App(S, (Var("Y1"),))})
        assert repr(compose(outer, inner)) == "{Y -> s(0), Y1 -> 0}"

    def test_compose_keeps_outer_extra_bindings(self):
        outer = Substitution({X: num(0)})
        inner = Substitution({N: X})
        assert repr(compose(outer, inner)) == "{N -> 0, X -> 0}"


class TestUnifyAndMatch:
    def test_unify_success(self):
        s = unify(leq(num(0), N), leq(X, Y))
        assert repr(s) == "{N -> Y, X -> 0}"

    def test_unify_clash(self):
        assert unify(num(0), App(S, (X,))) is None

    def test_unify_same_var(self):
        assert repr(unify(X, X)) == "{}"

    def test_unify_occurs_check(self):
        assert unify(X, App(S, (X,))) is None

    def test_match_success(self):
        s = match(leq(X, Y), leq(num(0), add(num(0), num(0))))
        assert repr(s) == "{X -> 0, Y -> add(0, 0)}"

    def test_match_is_literal(self):
        assert match(num(0), X) is None
        assert match(leq(X, X), leq(num(0), num(1))) is None

    def test_is_variant(self):
        assert is_variant(leq(X, add(X, Y)), leq(M, add(M, N)))
        assert not is_variant(leq(X, add(X, Y)), leq(M, add(N, N)))
        assert not is_variant(leq(X, Y), leq(num(0), Y))


class TestLinearUnify:
    def test_demand(self):
        r = linear_unify(leq(Var("V1"), App(S, (Var("V2"),))),
                         leq(num(0), add(num(0), num(0))))
        assert r == Demand(positions=((2,),))

    def test_demand_first_argument(self):
        r = linear_unify(leq(App(S, (M,)), N),
                         leq(add(num(0), num(0)), add(num(0), num(0))))
        assert r == Demand(positions=((1,),))

    def test_success(self):
        r = linear_unify(leq(X, N), leq(num(0), add(num(0), num(0))))
        assert isinstance(r, Succ)
        assert repr(r.subst) == "{N -> add(0, 0), X -> 0}"

    def test_success_instantiates_goal_vars(self):
        r = linear_unify(leq(num(0), N), leq(X, Y))
        assert isinstance(r, Succ)
        assert repr(r.subst) == "{N -> Y, X -> 0}"

    def test_fail(self):
        assert linear_unify(leq(num(0), N), leq(num(1), num(0))) == Fail()


class TestFreshVars:
    def test_sequential_names(self):
        g = FreshVars()
        assert [g.fresh().name for _ in range(3)] == ["V1", "V2", "V3"]

    def test_avoid(self):
        g = FreshVars(avoid=[Var("V2")])
        assert [g.fresh().name for _ in range(3)] == ["V1", "V3", "V4"]

    def test_start(self):
        assert FreshVars(start=3).fresh().name == "V4"

    def test_renaming_suffixes(self):
        r = FreshVars().renaming([Var("A"), Var("B")])
        assert repr(r) == "{A -> A_1, B -> B_1}"

    def test_fresh_tuple(self):
        assert [v.name for v in FreshVars().fresh_tuple(2)] == ["V1", "V2"]


class TestCanonicalRename:
    def test_first_occurrence_numbering(self):
        a, b = Var("A"), Var("B")
        out = canonical_rename([add(a, App(S, (b,))), a])
        assert [str(t) for t in out] == ["add(V1, s(V2))", "V1"]

    def test_keep(self):
        a, b = Var("A"), Var("B")
        out = canonical_rename([add(a, b)], keep=[a])
        assert str(out[0]) == "add(A, V1)"

    def test_prefix(self):
        out = canonical_rename([add(Var("A"), Var("B"))], prefix="U")
        assert str(out[0]) == "add(U1, U2)"


# --- randomized laws -------------------------------------------------------

VARS = st.sampled_from([X, Y, N, M])


def _terms(max_depth):
    if max_depth == 0:
        return st.one_of(VARS, st.just(num(0)))
    sub = _terms(max_depth - 1)
    return st.one_of(
        VARS,
        st.just(num(0)),
        st.builds(lambda a: App(S, (a,)), sub),
        st.builds(add, sub, sub),
        st.builds(leq, sub, sub),
    )


TERMS = _terms(3)


@given(TERMS, TERMS)
def test_unifier_unifies_and_is_idempotent(s, t):
    sigma = unify(s, t)
    if sigma is not None:
        assert sigma.apply(s) == sigma.apply(t)
        assert sigma.is_idempotent()


@given(TERMS, TERMS, TERMS)
def test_compose_agrees_with_sequential_application(t, u, v):
    outer = Substitution({X: u})
    inner = Substitution({Y: v})
    assert compose(outer, inner).apply(t) == outer.apply(inner.apply(t))


@given(TERMS)
def test_replace_subterm_roundtrip(t):
    for p, _ in subterms(t):
        assert replace_at(t, p, subterm_at(t, p)) == t


@given(TERMS)
def test_canonical_rename_produces_variant(t):
    out = canonical_rename([t])[0]
    assert is_variant(out, t)
    assert canonical_rename([out])[0] == out


@given(TERMS, TERMS)
def test_match_recovers_instance(pattern, t):
    sigma = match(pattern, t)
    if sigma is not None:
        assert sigma.apply(pattern) == t


@given(TERMS)
def test_size_counts_subterm_occurrences(t):
    assert term_size(t) == len(list(subterms(t)))
