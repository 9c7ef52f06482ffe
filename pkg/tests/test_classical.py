import random

import pytest

from uller import syntax as s
from uller.classical import eval_classical
from uller.errors import PredTypeError
from uller.interpretation import interpretation_from_dict, mode_interpretation
from uller.parser import parse_program

from generators import random_interpretation, random_nested_program


@pytest.fixture()
def biased_dice():
    rows = {"[]": {str(k): (0.5 if k == 6 else 0.1) for k in range(1, 7)}}
    return interpretation_from_dict(
        {"domains": {"die": [1, 2, 3, 4, 5, 6]},
         "functions": {"dice": {"args": [], "codomain": "die", "kind": "table", "rows": rows}}}
    )


def test_statement_binds_the_mode(biased_dice):
    f = parse_program("x := dice() (x = 6 and even(x))")
    assert eval_classical(f, biased_dice) == 1


def test_fair_dice_tie_breaks_low(dice_interp):
    f = parse_program("x := dice() (x = 1)")
    assert eval_classical(f, dice_interp) == 1
    assert eval_classical(parse_program("x := dice() (x = 6)"), dice_interp) == 0


def test_empty_domain_forall_is_true():
    interp = interpretation_from_dict({"domains": {"D": []}})
    assert eval_classical(parse_program("forall x in D (x = 0)"), interp) == 1
    assert eval_classical(parse_program("exists x in D (x = 0)"), interp) == 0


def test_mnist_add_two_rows(fixture_dir):
    from uller.interpretation import load_interpretation

    interp = load_interpretation(str(fixture_dir / "mnist_add.json"))
    f = parse_program((fixture_dir / "mnist_add.uller").read_text())
    assert eval_classical(f, interp) == 1

    # flipping one label breaks the constraint
    import json

    doc = json.loads((fixture_dir / "mnist_add.json").read_text())
    doc["datasets"]["T"][0]["sum"] = 4
    broken = interpretation_from_dict(doc)
    assert eval_classical(f, broken) == 0


def test_implication_truth_table():
    interp = interpretation_from_dict({"domains": {"D": [0, 1]}})
    cases = {
        "0 = 0 => 1 = 1": 1,
        "0 = 0 => 1 = 0": 0,
        "0 = 1 => 1 = 0": 1,
        "not (0 = 1)": 1,
    }
    for src, want in cases.items():
        assert eval_classical(parse_program(src), interp) == want, src


def test_pred_type_error_propagates():
    interp = interpretation_from_dict({"constants": {"c": 5}})
    with pytest.raises(PredTypeError):
        eval_classical(parse_program("true(c)"), interp)
    with pytest.raises(PredTypeError):
        eval_classical(parse_program("even(c + 0.5)"), interp)


class TestAlgebraicProperties:
    def _programs(self, n=120):
        for seed in range(n):
            rng = random.Random(7000 + seed)
            interp = random_interpretation(rng, parameterised=(seed % 3 == 0))
            yield rng, interp

    def test_de_morgan(self):
        for rng, interp in self._programs():
            f1 = random_nested_program(rng, interp, depth=3)
            f2 = random_nested_program(rng, interp, depth=3)
            lhs = eval_classical(s.Not(s.And(f1, f2)), interp)
            rhs = eval_classical(s.Or(s.Not(f1), s.Not(f2)), interp)
            assert lhs == rhs

    def test_double_negation(self):
        for rng, interp in self._programs():
            f = random_nested_program(rng, interp, depth=4)
            assert eval_classical(s.Not(s.Not(f)), interp) == eval_classical(f, interp)

    def test_statement_rule_only_consults_the_mode(self):
        for rng, interp in self._programs():
            f = random_nested_program(rng, interp, depth=4)
            assert eval_classical(f, interp) == eval_classical(f, mode_interpretation(interp))
