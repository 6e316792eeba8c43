"""Fixture language reserved keywords."""
from .tokens import TokenType

KEYWORDS = {
    "mod": TokenType.MODULO,
    "fst": TokenType.FIRST,
    "snd": TokenType.SECOND,
    "if": TokenType.IF,
    "then": TokenType.THEN,
    "else": TokenType.ELSE,
    "always": TokenType.ALWAYS,
    "never": TokenType.NEVER,
    "from": TokenType.FROM,
    "until": TokenType.UNTIL,
    "period": TokenType.PERIOD,
    "offset": TokenType.OFFSET,
    "const": TokenType.CONST,
    "ramp": TokenType.RAMP,
    "cap": TokenType.CAP,
}
