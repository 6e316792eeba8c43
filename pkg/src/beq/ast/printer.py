"""Print expressions back to fixture source."""
from . import expression


class ExpressionPrinter(expression.ExpressionVisitor[str]):
    """Render an expression as source text that parses back to the same tree.

    Binary operations are always parenthesized, so no precedence table is
    needed on the way out.
    """

    def print(self, expr: expression.Expression) -> str:
        return expr.accept(self)

    def visit_Binary_Expression(self, expr: expression.Binary) -> str:
        return f"({self.print(expr.left)} {expr.operator.lexeme} {self.print(expr.right)})"

    def visit_Unary_Expression(self, expr: expression.Unary) -> str:
        if expr.operator.lexeme in ("fst", "snd"):
            return f"{expr.operator.lexeme} {self.print(expr.right)}"
        return f"{expr.operator.lexeme}{self.print(expr.right)}"

    def visit_Literal_Expression(self, expr: expression.Literal) -> str:
        return str(expr.value)

    def visit_Variable_Expression(self, expr: expression.Variable) -> str:
        return expr.name.lexeme

    def visit_Pair_Expression(self, expr: expression.Pair) -> str:
        return f"[{self.print(expr.first)}, {self.print(expr.second)}]"

    def visit_Conditional_Expression(self, expr: expression.Conditional) -> str:
        return f"(if {self.print(expr.condition)} then {self.print(expr.truth)} else {self.print(expr.falsy)})"
