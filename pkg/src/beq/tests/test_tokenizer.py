"""Test the scanner."""
import pytest

from beq.tokenizer import Tokenizer
from beq.tokens import TokenType, Token
from beq.error import handler as error_handler
from beq.tests.cases import expression_cases


def test_trace_line():
    scanner = Tokenizer("s=3 join 7 -> 2\n")
    res = scanner.scan_tokens()

    assert not error_handler.had_error

    types = [
        TokenType.IDENTIFIER,
        TokenType.EQUAL,
        TokenType.INTEGER,
        TokenType.IDENTIFIER,
        TokenType.INTEGER,
        TokenType.ARROW,
        TokenType.INTEGER,
        TokenType.NEWLINE,
        TokenType.EOF,
    ]
    assert [token.token_type for token in res] == types
    assert res[2].literal == 3
    assert res[3].lexeme == "join"


def test_comment_runs_to_end_of_line():
    res = Tokenizer("x <= 3 \\ a comment -> ignored\ny").scan_tokens()

    assert not error_handler.had_error
    assert [token.token_type for token in res] == [
        TokenType.IDENTIFIER,
        TokenType.LESS_THAN_OR_EQUAL,
        TokenType.INTEGER,
        TokenType.NEWLINE,
        TokenType.IDENTIFIER,
        TokenType.EOF,
    ]
    assert res[4].line == 2


def test_lines_and_columns():
    res = Tokenizer("a\n  bc").scan_tokens()
    assert (res[0].line, res[0].column) == (1, 0)
    assert (res[2].line, res[2].column) == (2, 2)


keyword_tests = [
    ("mod", TokenType.MODULO),
    ("fst", TokenType.FIRST),
    ("snd", TokenType.SECOND),
    ("if", TokenType.IF),
    ("always", TokenType.ALWAYS),
    ("never", TokenType.NEVER),
    ("from", TokenType.FROM),
    ("until", TokenType.UNTIL),
    ("period", TokenType.PERIOD),
    ("offset", TokenType.OFFSET),
    ("const", TokenType.CONST),
    ("ramp", TokenType.RAMP),
    ("cap", TokenType.CAP),
    ("join", TokenType.IDENTIFIER),
    ("x_1", TokenType.IDENTIFIER),
]


@pytest.mark.parametrize("source,token_type", keyword_tests)
def test_keywords(source: str, token_type: TokenType):
    tokens = Tokenizer(source).scan_tokens()
    assert tokens[0].token_type == token_type


operator_tests = [
    ("=", TokenType.EQUAL),
    ("=/=", TokenType.NOT_EQUAL),
    ("<", TokenType.LESS_THAN),
    (">=", TokenType.GREATER_THAN_OR_EQUAL),
    ("->", TokenType.ARROW),
    ("-", TokenType.MINUS),
    ("&", TokenType.AND),
    ("!", TokenType.NOT),
    ("[", TokenType.LSQUARE),
    (":", TokenType.COLON),
]


@pytest.mark.parametrize("source,token_type", operator_tests)
def test_operators(source: str, token_type: TokenType):
    tokens = Tokenizer(source).scan_tokens()
    assert len(tokens) == 2
    assert tokens[0].token_type == token_type


number_tests = [
    ("4", Token(TokenType.INTEGER, "4", 4, 0, 1)),
    ("1024", Token(TokenType.INTEGER, "1024", 1024, 0, 1)),
]


@pytest.mark.parametrize("source,result", number_tests)
def test_numbers(source: str, result: Token):
    tokens = Tokenizer(source).scan_tokens()
    assert tokens[0] == result


def test_string():
    tokens = Tokenizer('base="fixtures/a b.trace"').scan_tokens()
    assert not error_handler.had_error
    assert tokens[2] == Token(TokenType.STRING, '"fixtures/a b.trace"', "fixtures/a b.trace", 0, 1)


@pytest.mark.parametrize("source", ['"open', '"split\nline"', "#", "x ? 1"])
def test_scanner_errors(source: str):
    Tokenizer(source).scan_tokens()
    assert error_handler.had_error


@pytest.mark.parametrize(
    "source,result",
    [(case.source, case.token_count) for case in expression_cases if case.token_count],
)
def test_tokenizer(source: str, result: int):
    res = Tokenizer(source).scan_tokens()
    assert len(res) == result + 1, source
