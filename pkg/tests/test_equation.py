import random

import pytest

from mwpkit.equation import (AmbiguousLeaf, DivisionByZero, EquationSyntaxError,
                             Literal, Op, Placeholder, PrefixUnderflow,
                             UnbalancedParentheses, UnknownCharacter,
                             ZeroToNegativePower, check_answer, evaluate,
                             leaf_depths, operator_count, pair_operator, parse,
                             parse_equation, parse_prefix, serialize,
                             strip_assignment_head, to_string,
                             tokenize_equation, tree_distance)
from mwpkit.numeracy import ExactValue, parse_answer

from synth import (NaiveDivisionByZero, NaiveZeroToNegativePower, naive_eval,
                   random_tree)


def lit(n, d=1):
    return Literal(ExactValue(n, d))


# exam-scoring tree: (80 - 25*2) / (4 - 2), all leaves distinct except 2
SCORING = Op("/", Op("-", lit(80), Op("*", lit(25), lit(2))),
             Op("-", lit(4), lit(2)))


class TestTokenize:
    def test_exam_problem_tokens(self):
        tokens = tokenize_equation("20-(20*5-70)/(5+1)")
        spelled = [t if isinstance(t, str) else str(t) for t in tokens]
        assert spelled == ["20", "-", "(", "20", "*", "5", "-", "70", ")",
                           "/", "(", "5", "+", "1", ")"]

    def test_percent_is_one_token(self):
        tokens = tokenize_equation("15/(1-((3)/(2+3))-30%)")
        assert ExactValue(3, 10) in tokens

    def test_empty(self):
        assert tokenize_equation("") == []

    def test_unknown_character(self):
        with pytest.raises(UnknownCharacter) as err:
            tokenize_equation("1+@2")
        assert err.value.position == 2

    def test_strip_assignment_head(self):
        assert strip_assignment_head("x=(4/9)+(1/9)") == "(4/9)+(1/9)"
        assert strip_assignment_head("(4/9)+(1/9)") == "(4/9)+(1/9)"


class TestParse:
    def test_precedence_tree(self):
        assert parse_equation("(80-25*2)/(4-2)") == SCORING

    def test_power_right_associative(self):
        assert parse_equation("2^3^2") == Op("^", lit(2), Op("^", lit(3), lit(2)))
        assert evaluate(parse_equation("2^3^2")) == ExactValue(512)

    def test_unbalanced(self):
        with pytest.raises(UnbalancedParentheses):
            parse_equation("(1+2")
        with pytest.raises(UnbalancedParentheses):
            parse_equation("1+2)")

    def test_unary_minus_rewrites(self):
        assert parse_equation("-3") == Op("-", lit(0), lit(3))
        assert evaluate(parse_equation("5*-2")) == ExactValue(-10)
        assert evaluate(parse_equation("-2^2")) == ExactValue(-4)

    @pytest.mark.parametrize("bad", ["1+", "*3", "1 2", "()", "n1 n2"])
    def test_syntax_errors(self, bad):
        with pytest.raises(EquationSyntaxError):
            parse_equation(bad)

    def test_placeholders(self):
        tree = parse_equation("n1+n2*n1")
        assert tree == Op("+", Placeholder("n1"),
                          Op("*", Placeholder("n2"), Placeholder("n1")))


class TestSerialize:
    def test_prefix_example(self):
        assert serialize(SCORING, "prefix") == \
            ["/", "-", "80", "*", "25", "2", "-", "4", "2"]

    def test_single_leaf(self):
        assert serialize(lit(15), "prefix") == ["15"]

    def test_prefix_underflow(self):
        with pytest.raises(PrefixUnderflow):
            parse_prefix(["+", "1"])

    def test_prefix_trailing_tokens(self):
        with pytest.raises(EquationSyntaxError):
            parse_prefix(["1", "2"])

    def test_infix_fully_parenthesized(self):
        assert to_string(SCORING) == "( ( 80 - ( 25 * 2 ) ) / ( 4 - 2 ) )"

    def test_fraction_leaves_stay_leaves(self):
        tree = Op("+", lit(4, 15), lit(2, 15))
        assert parse(tokenize_equation(to_string(tree))) == tree
        assert parse_prefix(serialize(tree, "prefix")) == tree

    def test_division_stays_division(self):
        tree = Op("/", lit(4), lit(15))
        assert parse(tokenize_equation(to_string(tree))) == tree


class TestRoundTripProperty:
    def test_10k_random_trees(self):
        rng = random.Random(20260810)
        for _ in range(10_000):
            tree = random_tree(rng)
            assert parse(tokenize_equation(to_string(tree))) == tree
            assert parse_prefix(serialize(tree, "prefix")) == tree

    def test_with_placeholder_leaves(self):
        rng = random.Random(7)
        for _ in range(500):
            tree = random_tree(rng, allow_placeholders=True)
            assert parse(tokenize_equation(to_string(tree))) == tree
            assert parse_prefix(serialize(tree, "prefix")) == tree


class TestEvaluate:
    @pytest.mark.parametrize("expr,expected", [
        ("20-(20*5-70)/(5+1)", ExactValue(15)),
        ("15/(1-((3)/(2+3))-30%)", ExactValue(150)),
        ("(50*72%-25*(3/5))/(50-25)", ExactValue(21, 25)),
        ("(4/9)+(1/9)", ExactValue(5, 9)),
        ("(80-25)*2/(4-2)", ExactValue(55)),
    ])
    def test_corpus_expressions_exact(self, expr, expected):
        value = evaluate(parse_equation(expr))
        assert isinstance(value, ExactValue) and value == expected

    def test_division_by_zero(self):
        with pytest.raises(DivisionByZero):
            evaluate(parse_equation("1/(2-2)"))

    def test_zero_to_negative_power(self):
        with pytest.raises(ZeroToNegativePower):
            evaluate(parse_equation("0^(0-2)"))

    def test_pi_participation_is_binary64(self):
        value = evaluate(parse_equation("pi*3*3"))
        assert isinstance(value, float)
        assert value == pytest.approx(9 * 3.141592653589793)

    def test_lone_pi_leaf_stays_exact(self):
        value = evaluate(parse_equation("pi"))
        assert isinstance(value, ExactValue) and value.pi_factor

    def test_bindings(self):
        tree = parse_equation("n1+n2")
        bound = evaluate(tree, {"n1": ExactValue(4, 9), "n2": ExactValue(1, 9)})
        assert bound == ExactValue(5, 9)

    def test_fractional_exponent_goes_binary64(self):
        value = evaluate(parse_equation("2^(1/2)"))
        assert isinstance(value, float)
        assert value == pytest.approx(2 ** 0.5)


class TestEvaluatorOracle:
    def test_10k_trees_match_naive_interpreter(self):
        rng = random.Random(99)
        agreements = errors = 0
        for _ in range(10_000):
            tree = random_tree(rng, constrain_pow=True)
            try:
                expected = naive_eval(tree)
                failed = None
            except NaiveDivisionByZero:
                failed = DivisionByZero
            except NaiveZeroToNegativePower:
                failed = ZeroToNegativePower
            if failed is None:
                value = evaluate(tree)
                assert isinstance(value, ExactValue)
                assert (value.numerator, value.denominator) == expected
                agreements += 1
            else:
                with pytest.raises(failed):
                    evaluate(tree)
                errors += 1
        assert agreements > 0 and errors > 0  # both paths exercised


class TestCheckAnswer:
    def test_exact_match(self):
        tree = parse_equation("(4/9)+(1/9)")
        assert check_answer(tree, None, parse_answer("5/9"))

    def test_known_inconsistent_annotation(self):
        tree = parse_equation("(80-25)*2/(4-2)")
        assert not check_answer(tree, None, parse_answer("15"))
        assert check_answer(tree, None, parse_answer("55"))

    def test_pi_tree_within_tolerance(self):
        tree = parse_equation("pi*3*3")
        close = parse_answer("28.27434")  # within 1e-4 of 9*pi
        assert check_answer(tree, None, close)
        assert not check_answer(tree, None, parse_answer("28.3"))

    def test_evaluation_error_is_false(self):
        assert not check_answer(parse_equation("1/(2-2)"), None,
                                parse_answer("1"))


class TestStructureMetrics:
    def test_leaf_depths(self):
        depths = [(str(leaf.value), d) for leaf, d in leaf_depths(SCORING)]
        assert depths == [("80", 2), ("25", 3), ("2", 3), ("4", 2), ("2", 2)]

    def test_single_leaf_and_pair(self):
        assert leaf_depths(lit(7)) == [(lit(7), 0)]
        assert leaf_depths(Op("+", lit(1), lit(2))) == \
            [(lit(1), 1), (lit(2), 1)]

    def test_pair_operator_lca(self):
        assert pair_operator(SCORING, lit(80), lit(25)) == "-"
        assert pair_operator(SCORING, lit(80), lit(4)) == "/"
        assert pair_operator(SCORING, lit(25), lit(4)) == "/"

    def test_pair_operator_symmetry(self):
        assert pair_operator(SCORING, lit(25), lit(80)) == \
            pair_operator(SCORING, lit(80), lit(25))

    def test_ambiguous_leaf(self):
        with pytest.raises(AmbiguousLeaf):
            pair_operator(SCORING, lit(80), lit(2))  # 2 occurs twice

    def test_tree_distance_signed(self):
        assert tree_distance(SCORING, lit(80), lit(25)) == -1
        assert tree_distance(SCORING, lit(25), lit(4)) == 1
        assert tree_distance(SCORING, lit(80), lit(80)) == 0

    def test_distance_antisymmetry(self):
        rng = random.Random(5)
        checked = 0
        while checked < 200:
            tree = random_tree(rng, allow_placeholders=True)
            names = {}

            def count(node):
                if isinstance(node, Op):
                    count(node.left)
                    count(node.right)
                elif isinstance(node, Placeholder):
                    names[node.name] = names.get(node.name, 0) + 1

            count(tree)
            singles = [n for n, c in names.items() if c == 1]
            if len(singles) < 2:
                continue
            a, b = Placeholder(singles[0]), Placeholder(singles[1])
            assert tree_distance(tree, a, b) == -tree_distance(tree, b, a)
            assert pair_operator(tree, a, b) == pair_operator(tree, b, a)
            checked += 1

    def test_operator_count(self):
        # five operator nodes: -, /, -, *, + (leaf count 6 minus one)
        assert operator_count(parse_equation("20-(20*5-70)/(5+1)")) == 5
        assert operator_count(lit(3)) == 0
        assert operator_count(parse_equation("(4/9)+(1/9)")) == 1

    def test_structure_laws_on_random_trees(self):
        rng = random.Random(11)
        for _ in range(300):
            tree = random_tree(rng)
            leaves = leaf_depths(tree)
            assert operator_count(tree) == len(leaves) - 1

            def check_depth(node, depth):
                if isinstance(node, Op):
                    check_depth(node.left, depth + 1)
                    check_depth(node.right, depth + 1)

            check_depth(tree, 0)
