"""Operator tables for the interpreter."""
import operator
from typing import Callable, Dict

from .tokens import TokenType


def floor_divide(left: int, right: int) -> int:
    """Floor division; dividing by zero gives 0 so rules stay total."""
    if right == 0:
        return 0
    return left // right


def modulo(left: int, right: int) -> int:
    if right == 0:
        return 0
    return left % right


CALC_OPERATORS: Dict[TokenType, Callable[[int, int], int]] = {
    TokenType.PLUS: operator.add,
    TokenType.MINUS: operator.sub,
    TokenType.DIVIDE: floor_divide,
    TokenType.MULTIPLY: operator.mul,
    TokenType.MODULO: modulo,
}


COMPARISON_OPERATORS: Dict[TokenType, Callable[[int, int], bool]] = {
    TokenType.LESS_THAN: operator.lt,
    TokenType.LESS_THAN_OR_EQUAL: operator.le,
    TokenType.GREATER_THAN: operator.gt,
    TokenType.GREATER_THAN_OR_EQUAL: operator.ge,
    TokenType.EQUAL: operator.eq,
    TokenType.NOT_EQUAL: operator.ne,
}
