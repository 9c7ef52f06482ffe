import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from uller import syntax as s
from uller.classical import eval_classical
from uller.errors import BudgetExceeded, ZeroProbability
from uller.interpretation import interpretation_from_dict, load_interpretation, mode_interpretation
from uller.parser import parse_program
from uller.prob import eval_max, eval_prob, eval_semiring, grad_prob
from uller.semiring import Dual, DualCarrier
from uller.values import Int

from generators import (
    random_flat_program,
    random_interpretation,
    random_nested_program,
    wmc_oracle,
)


class TestDiceScoping:
    def test_shared_throw_is_one_sixth(self, dice_interp_exact):
        f = parse_program("x := dice() (x = 6 and even(x))")
        assert eval_prob(f, dice_interp_exact) == Fraction(1, 6)

    def test_independent_throws_multiply(self, dice_interp_exact):
        f = parse_program("(x := dice() (x = 6)) and (x := dice() (even(x)))")
        assert eval_prob(f, dice_interp_exact) == Fraction(1, 12)

    def test_float_mode_within_tolerance(self, dice_interp):
        f = parse_program("x := dice() (x = 6 and even(x))")
        assert eval_prob(f, dice_interp) == pytest.approx(1 / 6, abs=1e-12)

    def test_no_memoisation_across_scopes(self, dice_interp):
        shared = eval_prob(parse_program("x := dice() (x = 6 and even(x))"), dice_interp)
        indep = eval_prob(
            parse_program("(x := dice() (x = 6)) and (x := dice() (even(x)))"), dice_interp
        )
        assert shared == pytest.approx(1 / 6, abs=1e-12)
        assert indep == pytest.approx(1 / 12, abs=1e-12)
        assert shared != pytest.approx(indep, abs=1e-3)


def test_empty_domain_forall_is_one():
    interp = interpretation_from_dict({"domains": {"D": []}})
    assert eval_prob(parse_program("forall x in D (x = 0)"), interp) == 1


def test_mnist_add_single_pair_matches_digit_enumeration(fixture_dir):
    interp = load_interpretation(str(fixture_dir / "mnist_add.json"))
    f = parse_program((fixture_dir / "mnist_add.uller").read_text())
    from uller.interpretation import query_distribution, restrict_domain

    item = interp.domain("T").elements[0]
    single = restrict_domain(interp, "T", [item])
    got = eval_prob(f, single)

    p1 = {v.i: p for v, p in query_distribution("f", [item.props["im1"]], interp).support}
    p2 = {v.i: p for v, p in query_distribution("f", [item.props["im2"]], interp).support}
    want = sum(
        p1[d1] * p2[d2]
        for d1, d2 in itertools.product(range(10), repeat=2)
        if d1 + d2 == item.props["sum"].i
    )
    assert got == pytest.approx(want, abs=1e-12)


class TestWmcEquivalence:
    def test_flat_programs_match_brute_force(self):
        for seed in range(120):
            rng = random.Random(seed)
            interp = random_interpretation(rng, max_domain=5, parameterised=(seed % 4 == 0))
            f = random_flat_program(rng, interp, max_statements=4, max_connectives=8)
            assert eval_prob(f, interp) == pytest.approx(wmc_oracle(f, interp), abs=1e-9)

    def test_dependent_arguments_supported(self):
        # second statement's distribution depends on the first outcome
        doc = {
            "domains": {"D": [0, 1, 2]},
            "functions": {
                "a": {"args": [], "codomain": "D", "kind": "table",
                      "rows": {"[]": {"0": 0.5, "1": 0.3, "2": 0.2}}},
                "b": {"args": ["D"], "codomain": "D", "kind": "table",
                      "rows": {
                          "[0]": {"0": 1.0, "1": 0.0, "2": 0.0},
                          "[1]": {"0": 0.0, "1": 1.0, "2": 0.0},
                          "[2]": {"0": 0.0, "1": 0.0, "2": 1.0},
                      }},
            },
        }
        interp = interpretation_from_dict(doc)
        f = parse_program("x := a() (y := b(x) (x = y))")
        assert eval_prob(f, interp) == pytest.approx(1.0, abs=1e-12)
        assert eval_prob(f, interp) == pytest.approx(wmc_oracle(f, interp), abs=1e-12)


class TestClassicalInTheLimit:
    def test_mode_interpretation_collapses_to_classical(self):
        for seed in range(150):
            rng = random.Random(3000 + seed)
            interp = random_interpretation(rng, parameterised=(seed % 3 == 0))
            f = random_nested_program(rng, interp, depth=4)
            mode = mode_interpretation(interp)
            assert eval_prob(f, mode) == eval_classical(f, interp)


class TestMonotonicity:
    def test_raising_satisfying_outcome_probability(self):
        for seed in range(60):
            rng = random.Random(5000 + seed)
            size = rng.randint(2, 5)
            elems = list(range(size))
            probs = [rng.random() + 1e-3 for _ in elems]
            total = sum(probs)
            probs = [p / total for p in probs]
            probs[-1] = 1.0 - sum(probs[:-1])
            doc = {
                "domains": {"D": elems},
                "functions": {"f": {"args": [], "codomain": "D", "kind": "table",
                                    "rows": {"[]": {str(e): p for e, p in zip(elems, probs)}}}},
            }
            interp = interpretation_from_dict(doc)
            target = rng.choice(elems)
            f = s.Statement("x", "f", (), s.Pred("eq", (s.Var("x"), s.Literal(Int(target)))))
            before = eval_prob(f, interp)
            # shift mass toward the satisfying outcome
            bump = {e: p * 0.5 for e, p in zip(elems, probs)}
            bump[target] += 0.5
            doc["functions"]["f"]["rows"]["[]"] = {str(e): p for e, p in bump.items()}
            after = eval_prob(f, interpretation_from_dict(doc))
            assert after >= before - 1e-12


class TestSemiringCarriers:
    def test_prob_carrier_reproduces_eval_prob(self):
        for seed in range(40):
            rng = random.Random(seed)
            interp = random_interpretation(rng)
            f = random_nested_program(rng, interp, depth=3)
            raw = eval_semiring(f, interp, carrier="prob")
            assert min(1.0, max(0.0, float(raw))) == float(eval_prob(f, interp))

    def test_max_carrier_picks_best_outcome(self, dice_interp):
        f = parse_program("x := dice() (even(x))")
        # best single outcome among {2, 4, 6} has probability 1/6
        assert eval_max(f, dice_interp) == pytest.approx(1 / 6, abs=1e-12)

    def test_max_carrier_agrees_with_enumeration_on_flat_negation_free(self):
        for seed in range(40):
            rng = random.Random(100 + seed)
            interp = random_interpretation(rng, n_functions=2, max_domain=4)
            f = random_flat_program(rng, interp, max_statements=3, max_connectives=0)
            from generators import split_flat_program
            from uller.interpretation import EMPTY_ENV, eval_term

            chain, body = split_flat_program(f)
            if _has_negation_or_implies(body):
                continue
            best = 0.0
            codomains = [interp.functions[fn].codomain.elements for _, fn, _ in chain]
            for joint in itertools.product(*codomains):
                env = EMPTY_ENV
                w = 1.0
                for (var, fname, args), a in zip(chain, joint):
                    fn = interp.functions[fname]
                    vals = tuple(eval_term(t, interp, env) for t in args)
                    w *= float(fn.query(vals, interp.params).prob_of(a))
                    env = env.bind(var, a)
                best = max(best, w * eval_classical(body, interp, env))
            assert eval_max(f, interp) == pytest.approx(best, abs=1e-9)


def _has_negation_or_implies(f) -> bool:
    return any(isinstance(n, (s.Not, s.Implies, s.Or)) for n in s.walk(f))


class TestGradProb:
    def test_theta_independent_formula_has_zero_gradient(self, binary_param_interp):
        f = parse_program("0 = 0")
        assert np.allclose(grad_prob(f, binary_param_interp), 0.0)

    def test_analytic_softmax_derivative(self, binary_param_interp):
        interp = binary_param_interp
        f = parse_program('x := f() (x = "a")')
        p0 = eval_prob(f, interp)
        g = grad_prob(f, interp, transform="neg_log")
        assert g[0] == pytest.approx(-(1 - p0), rel=1e-12)
        assert g[1] == pytest.approx(1 - p0, rel=1e-12)

    def test_matches_central_finite_differences(self):
        from generators import random_param_fixture

        nontrivial = 0
        for seed in range(25):
            rng = random.Random(8000 + seed)
            f, interp = random_param_fixture(rng)
            g = grad_prob(f, interp, transform="neg_log")
            fd = _central_diff(lambda th: -np.log(float(eval_prob(f, interp.with_params(th)))), interp.params)
            assert np.allclose(g, fd, rtol=1e-6, atol=1e-8)
            if np.any(g != 0):
                nontrivial += 1
        assert nontrivial >= 20

    def test_zero_probability_raises(self):
        doc = {
            "domains": {"D": [0, 1]},
            "functions": {"f": {"args": [], "codomain": "D", "kind": "parameterised", "rows": {"[]": [0.0, 0.0]}}},
        }
        interp = interpretation_from_dict(doc)
        f = parse_program("x := f() (x = 2)")
        with pytest.raises(ZeroProbability):
            grad_prob(f, interp, transform="neg_log")

    def test_dual_carrier_value_matches_prob(self):
        for seed in range(30):
            rng = random.Random(200 + seed)
            interp = random_interpretation(rng, parameterised=True)
            f = random_nested_program(rng, interp, depth=3)
            dual = eval_semiring(f, interp, carrier=DualCarrier)
            assert dual.value == pytest.approx(float(eval_prob(f, interp)), abs=1e-12)


def _central_diff(loss, theta, h=1e-5):
    out = np.zeros_like(theta)
    for k in range(len(theta)):
        up = theta.copy()
        up[k] += h
        dn = theta.copy()
        dn[k] -= h
        out[k] = (loss(up) - loss(dn)) / (2 * h)
    return out


def test_node_budget_aborts():
    interp = interpretation_from_dict({"domains": {"D": list(range(10))}})
    f = parse_program("forall a in D, b in D, c in D, d in D (a = b)")
    with pytest.raises(BudgetExceeded):
        eval_prob(f, interp, node_budget=100)


def test_dual_arithmetic():
    a = Dual(0.5, {0: 1.0})
    b = Dual(0.25, {1: 2.0})
    prod = a * b
    assert prod.value == 0.125
    assert prod.tangent == {0: 0.25, 1: 1.0}
    comp = 1 - a
    assert comp.value == 0.5
    assert comp.tangent == {0: -1.0}
    assert (a - b).tangent == {0: 1.0, 1: -2.0}
