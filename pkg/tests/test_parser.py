import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uller import syntax as s
from uller.errors import ParseError
from uller.parser import parse_formulas, parse_program, parse_term, tokenize
from uller.printer import pretty_print, pretty_print_term
from uller.values import Int, Real, Symbol

from generators import random_parseable

FIXTURES = Path(__file__).parent.parent / "src" / "uller" / "fixtures"
PROGRAM_FILES = sorted(FIXTURES.glob("*.uller"))


def _pred(name, *args):
    return s.Pred(name, tuple(args))


class TestParseProgram:
    def test_mnist_add_shape(self):
        f = parse_program("forall x in T (n1 := f(x.im1), n2 := f(x.im2) (n1 + n2 = x.sum))")
        expected = s.ForAll(
            "x", "T",
            s.Statement(
                "n1", "f", (s.PropAccess(s.Var("x"), "im1"),),
                s.Statement(
                    "n2", "f", (s.PropAccess(s.Var("x"), "im2"),),
                    _pred("eq", s.Arith("+", s.Var("n1"), s.Var("n2")), s.PropAccess(s.Var("x"), "sum")),
                ),
            ),
        )
        assert f == expected

    def test_dice_statement(self):
        f = parse_program("x := dice() (x = 6 and even(x))")
        expected = s.Statement(
            "x", "dice", (),
            s.And(_pred("eq", s.Var("x"), s.Literal(Int(6))), _pred("even", s.Var("x"))),
        )
        assert f == expected

    def test_empty_input(self):
        with pytest.raises(ParseError, match="expected formula"):
            parse_program("")

    def test_comment_only_input(self):
        with pytest.raises(ParseError):
            parse_program("# nothing here\n")

    def test_precedence_not_and_or_implies(self):
        f = parse_program("not P() and Q() or R() => S()")
        assert isinstance(f, s.Implies)
        assert isinstance(f.left, s.Or)
        assert isinstance(f.left.left, s.And)
        assert isinstance(f.left.left.left, s.Not)

    def test_implies_right_associative(self):
        f = parse_program("P() => Q() => R()")
        assert isinstance(f, s.Implies)
        assert isinstance(f.right, s.Implies)

    def test_iff_lowered(self):
        f = parse_program("P() <=> Q()")
        assert f == s.And(s.Implies(_pred("P"), _pred("Q")), s.Implies(_pred("Q"), _pred("P")))

    def test_unicode_aliases(self):
        a = parse_program("∀ x ∈ D (¬P(x) ∨ Q(x) ∧ R(x))")
        b = parse_program("forall x in D (not P(x) or Q(x) and R(x))")
        assert a == b

    def test_unbalanced_parens(self):
        with pytest.raises(ParseError):
            parse_program("forall x in D (P(x)")

    def test_assign_outside_binder_position(self):
        with pytest.raises(ParseError):
            parse_program("P(x := f())")

    def test_multi_formula_conjoined(self):
        f = parse_program("P(); Q()")
        assert f == s.And(_pred("P"), _pred("Q"))
        assert len(parse_formulas("P(); Q();")) == 2

    def test_statement_as_implication_consequent(self):
        f = parse_program("P() => a := f() (true(a))")
        assert isinstance(f, s.Implies)
        assert isinstance(f.right, s.Statement)

    def test_parenthesized_term_comparison(self):
        f = parse_program("(n1 + n2) * n3 = c")
        assert f == _pred(
            "eq",
            s.Arith("*", s.Arith("+", s.Const("n1"), s.Const("n2")), s.Const("n3")),
            s.Const("c"),
        )

    def test_bound_vs_constant_resolution(self):
        f = parse_program("forall x in D (x = c)")
        assert f.body == _pred("eq", s.Var("x"), s.Const("c"))

    def test_negative_literals(self):
        f = parse_program("c = -3")
        assert f == _pred("eq", s.Const("c"), s.Literal(Int(-3)))
        g = parse_program("c - 3 = -2")
        assert g.args[0] == s.Arith("-", s.Const("c"), s.Literal(Int(3)))

    def test_spans_recorded(self):
        try:
            parse_program("forall x in D (\n  P(x) and\n)")
        except ParseError as exc:
            assert exc.span[0] == 3
        else:
            pytest.fail("expected ParseError")


class TestParseTerm:
    def test_property_access(self):
        assert parse_term("x.im1") == s.PropAccess(s.Var("x"), "im1")

    def test_int_literal(self):
        assert parse_term("3") == s.Literal(Int(3))

    def test_addition(self):
        assert parse_term("n1 + n2") == s.Arith("+", s.Var("n1"), s.Var("n2"))

    def test_mul_binds_tighter(self):
        assert parse_term("a + b * c") == s.Arith(
            "+", s.Var("a"), s.Arith("*", s.Var("b"), s.Var("c"))
        )

    def test_real_and_string(self):
        assert parse_term("2.5") == s.Literal(Real(2.5))
        assert parse_term('"sym"') == s.Literal(Symbol("sym"))

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse_term("x y")


class TestRoundTrip:
    def test_random_formulas(self):
        for seed in range(300):
            f = random_parseable(random.Random(seed))
            printed = pretty_print(f)
            assert parse_program(printed) == f, printed

    def test_random_terms(self):
        from generators import _parseable_term

        for seed in range(200):
            rng = random.Random(seed)
            t = _parseable_term(rng, ["x", "y"], 3)
            # bind x and y so reparse resolves them back to variables
            f = s.ForAll("x", "D", s.ForAll("y", "D", s.Pred("P", (t,))))
            assert parse_program(pretty_print(f)) == f

    @pytest.mark.parametrize("path", PROGRAM_FILES, ids=lambda p: p.stem)
    def test_fixture_corpus(self, path):
        source = path.read_text()
        f = parse_program(source)
        s.validate_desugared(f)
        assert parse_program(pretty_print(f)) == f


class TestFuzzing:
    @given(st.text(max_size=80))
    @settings(max_examples=400, deadline=None)
    def test_never_crashes_on_text(self, source):
        try:
            parse_program(source)
        except ParseError:
            pass

    @given(st.binary(max_size=60))
    @settings(max_examples=300, deadline=None)
    def test_never_crashes_on_bytes(self, blob):
        try:
            parse_program(blob.decode("utf-8", errors="replace"))
        except ParseError:
            pass

    def test_token_spam(self):
        for seed in range(200):
            rng = random.Random(seed)
            toks = [rng.choice(["forall", "x", "in", "(", ")", ":=", "=>", "6", "+", "not", ",", "=", '"s"']) for _ in range(rng.randint(1, 25))]
            try:
                parse_program(" ".join(toks))
            except ParseError:
                pass


def test_tokenize_spans():
    toks = tokenize("forall x\n  in D")
    assert toks[0].span == (1, 1)
    assert toks[2].span == (2, 3)


def test_pretty_print_term_standalone():
    assert pretty_print_term(parse_term("x.a + 2 * y")) == "x.a + 2 * y"
