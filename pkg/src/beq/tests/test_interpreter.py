"""Test fixture expression evaluation."""
import pytest

from beq import evaluate
from beq.error import EvaluationError
from beq.interpreter import Interpreter
from beq.pairing import pair, quadruple, triple, unpair, unquadruple, untriple
from beq.tests.cases import ENVIRONMENT, expression_cases, parse


@pytest.mark.parametrize(
    "source,result",
    [(case.source, case.value) for case in expression_cases if case.value is not None],
)
def test_interpret(source: str, result: int):
    res = Interpreter(ENVIRONMENT).evaluate(parse(source))
    assert res == result, source


@pytest.mark.parametrize("source,error", [(case.source, case.error) for case in expression_cases if case.error])
def test_error(source: str, error: str):
    res, err = evaluate(source, **ENVIRONMENT)
    assert res is None
    assert err is not None
    assert str(err[0]) == error


def test_evaluate():
    assert evaluate("fst [x, 3] + 1", x=4) == [5, []]


def test_trailing_tokens_are_an_error():
    res, err = evaluate("x y", x=1, y=2)
    assert res is None
    assert "Unexpected 'y' after expression" in str(err[0])


def test_undefined_variable():
    with pytest.raises(EvaluationError):
        Interpreter({"x": 1}).evaluate(parse("x + j"))


def test_environment_is_restored():
    interpreter = Interpreter({"x": 1})
    assert interpreter.evaluate(parse("x"), {"x": 7}) == 7
    assert interpreter.evaluate(parse("x")) == 1


def test_and_short_circuits():
    assert Interpreter({"x": 0}).evaluate(parse("x & undefined")) == 0


@pytest.mark.parametrize("x,y,z", [(0, 0, 0), (1, 0, 0), (0, 1, 0), (3, 5, 8), (12, 0, 7)])
def test_pairing(x: int, y: int, z: int):
    assert unpair(pair(x, y)) == (x, y)
    assert untriple(triple(x, y, z)) == (x, y, z)
    assert unquadruple(quadruple(x, y, z, x)) == (x, y, z, x)


def test_pairing_is_cantor():
    assert [pair(x, y) for x, y in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]] == [0, 1, 2, 3, 4, 5]


def test_negative_pairing():
    with pytest.raises(EvaluationError):
        pair(-1, 0)
    with pytest.raises(EvaluationError):
        Interpreter().evaluate(parse("fst -1"))
