"""Expression nodes of the fixture language."""
from dataclasses import dataclass

from ..tokens import Token

from .base import T, Visitor, Node


class ExpressionVisitor(Visitor[T]):
    ...


@dataclass(frozen=True)
class Expression(Node):
    ...


@dataclass(frozen=True)
class Binary(Expression):
    left: Expression
    operator: Token
    right: Expression


@dataclass(frozen=True)
class Unary(Expression):
    operator: Token
    right: Expression


@dataclass(frozen=True)
class Literal(Expression):
    value: int


@dataclass(frozen=True)
class Variable(Expression):
    name: Token


@dataclass(frozen=True)
class Pair(Expression):
    first: Expression
    second: Expression


@dataclass(frozen=True)
class Conditional(Expression):
    condition: Expression
    truth: Expression
    falsy: Expression
