import random

import pytest

from uller import syntax as s
from uller.errors import DuplicateBinder
from uller.syntax import bound_variables, desugar, free_variables, validate_desugared, walk
from uller.values import Int

from generators import random_parseable


def _pred(name, *args):
    return s.Pred(name, tuple(args))


class TestDesugar:
    def test_multi_binder_quantifier(self):
        raw = s.SugarQuant("forall", (("x", "D"), ("y", "D")), _pred("P", s.RawName("x"), s.RawName("y")))
        out = desugar(raw)
        assert out == s.ForAll("x", "D", s.ForAll("y", "D", _pred("P", s.Var("x"), s.Var("y"))))

    def test_already_desugared_fixed_point(self):
        f = _pred("P", s.Var("x"))
        assert desugar(f) == f

    def test_statement_group_nests_and_lowers_comparison(self):
        raw = s.SugarBindings(
            (("n1", "f", (s.RawName("a"),)), ("n2", "f", (s.RawName("b"),))),
            s.Compare("=", s.Arith("+", s.RawName("n1"), s.RawName("n2")), s.RawName("s")),
        )
        out = desugar(raw)
        expected = s.Statement(
            "n1", "f", (s.Const("a"),),
            s.Statement(
                "n2", "f", (s.Const("b"),),
                _pred("eq", s.Arith("+", s.Var("n1"), s.Var("n2")), s.Const("s")),
            ),
        )
        assert out == expected

    def test_iff_expansion(self):
        raw = s.Iff(_pred("A"), _pred("B"))
        out = desugar(raw)
        assert out == s.And(s.Implies(_pred("A"), _pred("B")), s.Implies(_pred("B"), _pred("A")))

    def test_duplicate_binder_rejected(self):
        raw = s.SugarQuant("forall", (("x", "D"), ("x", "E")), _pred("P"))
        with pytest.raises(DuplicateBinder):
            desugar(raw)
        raw = s.SugarBindings((("a", "f", ()), ("a", "g", ())), _pred("P"))
        with pytest.raises(DuplicateBinder):
            desugar(raw)

    def test_statement_args_see_earlier_binders_only(self):
        # second binding's argument references the first binding's variable
        raw = s.SugarBindings(
            (("a", "f", ()), ("b", "g", (s.RawName("a"), s.RawName("z")))),
            _pred("true", s.RawName("b")),
        )
        out = desugar(raw)
        assert out.args == ()
        inner = out.body
        assert inner.args == (s.Var("a"), s.Const("z"))

    def test_idempotent_on_random_trees(self):
        for seed in range(150):
            f = random_parseable(random.Random(seed))
            assert desugar(f) == f

    def test_preserves_free_variables(self):
        for seed in range(150):
            rng = random.Random(10_000 + seed)
            raw = _random_sugared(rng, 3, [])
            assert free_variables(desugar(raw)) == free_variables(raw)

    def test_exhaustive_node_variants(self):
        for seed in range(100):
            f = random_parseable(random.Random(seed))
            validate_desugared(f)

    def test_validate_rejects_sugar(self):
        with pytest.raises(TypeError):
            validate_desugared(s.Iff(_pred("A"), _pred("B")))


class TestScopeInfo:
    def test_closed_formula_has_no_free_vars(self):
        f = s.ForAll("x", "D", _pred("P", s.Var("x")))
        assert free_variables(f) == set()

    def test_single_free_var(self):
        assert free_variables(_pred("P", s.Var("x"))) == {"x"}

    def test_statement_binds_body_not_args(self):
        f = s.Statement("y", "f", (s.Var("x"),), _pred("P", s.Var("y")))
        assert free_variables(f) == {"x"}

    def test_statement_scope_is_body_only(self):
        # the bound name used in a sibling formula stays free there
        f = s.And(
            s.Statement("x", "f", (), _pred("P", s.Var("x"))),
            _pred("Q", s.Var("x")),
        )
        assert free_variables(f) == {"x"}

    def test_bound_variables(self):
        f = s.ForAll("x", "D", s.Statement("y", "f", (), _pred("P", s.Var("x"), s.Var("y"))))
        assert bound_variables(f) == {"x", "y"}

    def test_closed_random_programs_are_closed(self):
        for seed in range(100):
            f = random_parseable(random.Random(seed))
            assert free_variables(f) == set()


def _random_sugared(rng: random.Random, depth: int, scope: list[str]) -> s.Formula:
    """Sugared trees over pre-resolved Var/Const terms (no RawName)."""
    if depth == 0:
        args = tuple(
            s.Var(rng.choice(scope)) if scope and rng.random() < 0.5 else s.Literal(Int(rng.randint(0, 5)))
            for _ in range(rng.randint(0, 2))
        )
        if rng.random() < 0.3:
            return s.Compare(rng.choice(("=", "<", ">=")), s.Var(f"u{rng.randint(0, 3)}"), s.Literal(Int(1)))
        return s.Pred("P", args)
    roll = rng.random()
    if roll < 0.25:
        binders = tuple((f"m{i}", "D") for i in range(rng.randint(1, 3)))
        return s.SugarQuant(
            rng.choice(("forall", "exists")), binders,
            _random_sugared(rng, depth - 1, scope + [v for v, _ in binders]),
        )
    if roll < 0.5:
        names = [f"s{i}" for i in range(rng.randint(1, 3))]
        bindings = tuple(
            (v, "f", ((s.Var(rng.choice(scope)),) if scope and rng.random() < 0.4 else ()))
            for v in names
        )
        return s.SugarBindings(bindings, _random_sugared(rng, depth - 1, scope + names))
    if roll < 0.7:
        return s.Iff(_random_sugared(rng, depth - 1, scope), _random_sugared(rng, depth - 1, scope))
    ctor = rng.choice((s.And, s.Or, s.Implies))
    return ctor(_random_sugared(rng, depth - 1, scope), _random_sugared(rng, depth - 1, scope))


def test_walk_visits_terms_and_formulas():
    f = s.Statement("x", "f", (s.Arith("+", s.Var("a"), s.Literal(Int(1))),), _pred("P", s.Var("x")))
    kinds = {type(n).__name__ for n in walk(f)}
    assert {"Statement", "Arith", "Var", "Literal", "Pred"} <= kinds
