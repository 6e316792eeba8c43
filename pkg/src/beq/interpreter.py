"""Fixture expression interpreter."""
from typing import Mapping, Optional

from . import functions
from .ast import expression
from .error import EvaluationError
from .pairing import pair, unpair
from .tokens import TokenType

Environment = Mapping[str, int]


class Interpreter(expression.ExpressionVisitor[int]):
    """Evaluate integer expressions against a variable environment.

    Comparisons, `&` and `!` produce 1 or 0; any nonzero value counts as true.
    """

    variables: Environment

    def __init__(self, variables: Optional[Environment] = None):
        self.variables = variables or {}

    def __repr__(self):
        return "<Interpreter >"

    def evaluate(self, expr: expression.Expression, env: Optional[Environment] = None) -> int:
        if env is None:
            return expr.accept(self)

        previous = self.variables
        self.variables = env
        try:
            return expr.accept(self)
        finally:
            self.variables = previous

    def visit_Literal_Expression(self, expr: expression.Literal) -> int:
        return expr.value

    def visit_Variable_Expression(self, expr: expression.Variable) -> int:
        name = expr.name.lexeme
        if name not in self.variables:
            raise EvaluationError(f"Undefined variable '{name}' at line {expr.name.line}, column {expr.name.column}")
        return self.variables[name]

    def visit_Unary_Expression(self, expr: expression.Unary) -> int:
        right = expr.right.accept(self)
        token_type = expr.operator.token_type

        if token_type == TokenType.MINUS:
            return -right
        if token_type == TokenType.NOT:
            return int(not right)
        if token_type == TokenType.FIRST:
            return unpair(right)[0]
        if token_type == TokenType.SECOND:
            return unpair(right)[1]

        raise EvaluationError(f"Unknown unary operator {expr.operator.lexeme}")

    def visit_Binary_Expression(self, expr: expression.Binary) -> int:
        token_type = expr.operator.token_type
        left = expr.left.accept(self)

        if token_type == TokenType.AND:
            return int(bool(left) and bool(expr.right.accept(self)))

        right = expr.right.accept(self)

        if token_type in functions.CALC_OPERATORS:
            return functions.CALC_OPERATORS[token_type](left, right)

        if token_type in functions.COMPARISON_OPERATORS:
            return int(functions.COMPARISON_OPERATORS[token_type](left, right))

        raise EvaluationError(f"Unknown binary operator {expr.operator.lexeme}")

    def visit_Pair_Expression(self, expr: expression.Pair) -> int:
        return pair(expr.first.accept(self), expr.second.accept(self))

    def visit_Conditional_Expression(self, expr: expression.Conditional) -> int:
        if expr.condition.accept(self):
            return expr.truth.accept(self)
        return expr.falsy.accept(self)
