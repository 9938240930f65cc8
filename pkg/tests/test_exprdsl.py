import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonlocal_od.exprdsl import (
    BinOp,
    Call,
    Const,
    ExpressionError,
    ExpressionEvalError,
    ExpressionSyntaxError,
    Neg,
    Num,
    UnknownIdentifierError,
    Var,
    VariableIndexError,
    eval_array,
    eval_expression,
    parse_expression,
    to_text,
)


def test_quadratic_tree():
    expr = parse_expression("(n1 - 1)^2 + 1", 2)
    assert expr.root == BinOp(
        "+", BinOp("^", BinOp("-", Var(1), Num(1.0)), Num(2.0)), Num(1.0)
    )


def test_exp_tree():
    assert parse_expression("exp(n1)", 1).root == Call("exp", Var(1))


def test_trailing_operator_offset():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression("n1 +", 1)
    assert info.value.offset == 4


@pytest.mark.parametrize(
    "text, args, expected",
    [
        ("(n1-1)^2+1", (1.0,), 1.0),
        ("exp(n1)", (0.0,), 1.0),
        ("n1^2", (3.0,), 9.0),
        ("n1 + n2 * 2", (1.0, 3.0), 7.0),
        ("-n1^2", (1.0, 3.0), -1.0),
        ("2^3^2", (), 512.0),
        ("8/4/2", (), 1.0),
        ("1-2-3", (), -4.0),
    ],
)
def test_evaluation(text, args, expected):
    expr = parse_expression(text, max(len(args), 1))
    if not args:
        args = (0.0,)
    assert eval_expression(expr, args) == expected


def test_constants():
    expr = parse_expression("pi + e", 1)
    assert expr.root == BinOp("+", Const("pi"), Const("e"))
    assert eval_expression(expr, [0.0]) == math.pi + math.e


@pytest.mark.parametrize(
    "text, error, offset",
    [
        ("2 n1", ExpressionSyntaxError, 2),
        ("n0", VariableIndexError, 0),
        ("1 + n3", VariableIndexError, 4),
        ("foo(1)", UnknownIdentifierError, 0),
        ("pow(n1)", UnknownIdentifierError, 0),
        ("pow(n1, 2)", ExpressionSyntaxError, 6),
        ("exp n1", ExpressionSyntaxError, 4),
        ("(n1", ExpressionSyntaxError, 3),
        ("n1)", ExpressionSyntaxError, 2),
        ("", ExpressionSyntaxError, 0),
        ("n1 # 2", ExpressionSyntaxError, 3),
        ("--n1", ExpressionSyntaxError, 1),
        ("n1^-1", ExpressionSyntaxError, 3),
    ],
)
def test_parse_errors(text, error, offset):
    with pytest.raises(error) as info:
        parse_expression(text, 2)
    assert info.value.offset == offset


def test_offsets_are_bytes():
    # "λ" is two bytes in UTF-8
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression("λ", 1)
    assert info.value.offset == 0
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression("1 + λ", 1)
    assert info.value.offset == 4


@pytest.mark.parametrize(
    "text, args",
    [("log(n1)", (0.0,)), ("log(n1)", (-1.0,)), ("1/n1", (0.0,)),
     ("n1^0.5", (-4.0,)), ("sqrt(n1)", (-1.0,)), ("n1^-(1)", None)],
)
def test_eval_errors(text, args):
    if args is None:
        with pytest.raises(ExpressionSyntaxError):
            parse_expression(text, 1)
        return
    expr = parse_expression(text, 1)
    with pytest.raises(ExpressionEvalError):
        eval_expression(expr, args)
    with pytest.raises(ExpressionEvalError):
        eval_array(expr, [np.array(args)])


def test_integer_power_of_negative_base_is_real():
    assert eval_expression(parse_expression("n1^3", 1), [-2.0]) == -8.0


def test_positivity_not_checked_here():
    assert eval_expression(parse_expression("n1 - 5", 1), [1.0]) == -4.0


def test_binding_length_checked():
    with pytest.raises(ValueError):
        eval_expression(parse_expression("n1", 2), [1.0])


def test_exp_overflow_is_infinite():
    assert eval_expression(parse_expression("exp(n1)", 1), [1e4]) == math.inf


# -- properties -------------------------------------------------------------

def trees(max_var=3):
    leaves = st.one_of(
        st.floats(0.0, 1e6, allow_nan=False).map(Num),
        st.sampled_from([Const("pi"), Const("e")]),
        st.integers(1, max_var).map(Var),
    )

    def extend(children):
        return st.one_of(
            children.map(Neg),
            st.tuples(st.sampled_from("+-*/^"), children, children).map(lambda t: BinOp(*t)),
            st.tuples(st.sampled_from(["exp", "log", "sqrt", "abs"]), children).map(
                lambda t: Call(*t)
            ),
        )

    return st.recursive(leaves, extend, max_leaves=12)


@given(trees())
def test_print_parse_round_trip(tree):
    assert parse_expression(to_text(tree), 3).root == tree


@given(st.text(alphabet="n12 +-*/^().epixsqrtlogab9", max_size=20))
def test_parsing_is_total(text):
    try:
        parse_expression(text, 2)
    except ExpressionError as exc:
        assert exc.offset is not None
        assert 0 <= exc.offset <= len(text.encode())


safe = st.floats(0.01, 10.0)


@given(safe, safe)
def test_precedence_property(a, b):
    expr = parse_expression("n1 + n2 * 2 - n1 / n2 ^ 2", 2)
    assert eval_expression(expr, [a, b]) == a + (b * 2) - a / (b ** 2)


@given(st.lists(st.floats(0.01, 5.0), min_size=1, max_size=16))
def test_array_eval_matches_scalar(values):
    expr = parse_expression("sqrt(n1) * log(1 + n1) + abs(n1 - 2) ^ 1.5 / (1 + n1^2)", 1)
    arr = eval_array(expr, [np.array(values)])
    for v, a in zip(values, arr):
        assert a == pytest.approx(eval_expression(expr, [v]), rel=1e-14)


def test_evaluation_is_deterministic():
    expr = parse_expression("exp(n1) * n2 ^ 1.7 / (1 + log(n1 + n2))", 2)
    first = eval_expression(expr, [0.37, 2.9])
    assert all(eval_expression(expr, [0.37, 2.9]) == first for _ in range(100))
