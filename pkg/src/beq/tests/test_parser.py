"""Test parser."""
import pytest

from beq.approx import Always, From, Never, Periodic, Ramp, Until
from beq.ast.printer import ExpressionPrinter
from beq.error import handler as error_handler
from beq.parser import Parser
from beq.tests.cases import expression_cases, parse
from beq.tokenizer import Tokenizer


@pytest.mark.parametrize(
    "source,result",
    [(case.source, case.printed) for case in expression_cases if case.printed],
)
def test_parse(source: str, result: str):
    expression = parse(source)
    assert not error_handler.had_error, error_handler.error_report
    assert ExpressionPrinter().print(expression) == result, source


@pytest.mark.parametrize(
    "source",
    [case.source for case in expression_cases if case.printed],
)
def test_printed_source_parses_back(source: str):
    expression = parse(source)
    printed = ExpressionPrinter().print(expression)
    assert parse(printed) == expression


@pytest.mark.parametrize(
    "source,message",
    [
        ("x +", "Missing operand for '+'"),
        ("if x then 1", "Missing ELSE after true result"),
        ("[x 1]", "Expect ',' between pair components."),
        ("fst", "Missing operand for 'fst'"),
    ],
)
def test_parse_errors(source: str, message: str):
    parse(source)
    assert error_handler.had_error
    assert message in [error.message for error in error_handler.error_report]


def schedule(source: str):
    return Parser(Tokenizer(source).scan_tokens()).schedule()


@pytest.mark.parametrize(
    "source,result",
    [
        ("always", Always()),
        ("never", Never()),
        ("from 3", From(3)),
        ("until x + 2", Until(parse("x + 2"))),
        ("period 2 offset 1 from x", Periodic(2, 1, parse("x"))),
        ("ramp 1 cap 2 * x", Ramp(1, parse("2 * x"))),
    ],
)
def test_schedules(source: str, result):
    assert schedule(source) == result
    assert not error_handler.had_error


def test_unknown_schedule():
    assert schedule("sometimes") is None
    assert str(error_handler.error_report[0]) == "Parser-error at line 1, column 0: Unknown schedule 'sometimes'"


def test_bad_line_is_skipped_and_reported():
    tokens = Tokenizer("SNAPSHOT v1\nclass 0: 0\nklass 1: 1\nclass 2: 2\n").scan_tokens()
    parser = Parser(tokens)
    assert parser.snapshot() is None
    assert len(error_handler.error_report) == 1
    assert error_handler.error_report[0].line == 3
