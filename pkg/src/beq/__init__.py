"""beq - bi-embeddable categoricity of equivalence structures, simulated at finite horizons."""
from .tokenizer import Tokenizer
from .parser import Parser
from .interpreter import Interpreter
from .error import EvaluationError, handler as error_handler


def evaluate(source: str, **env: int):
    """Evaluate one fixture expression; returns [value, errors]."""
    tokens = Tokenizer(source).scan_tokens()

    if error_handler.had_error:
        return [None, error_handler.error_report]

    parser = Parser(tokens)
    parsed = parser.parse_expression()
    if not error_handler.had_error and not parser.is_at_end():
        parser.error(f"Unexpected '{parser.peek().lexeme}' after expression")

    if error_handler.had_error or parsed is None:
        return [None, error_handler.error_report]

    try:
        result = Interpreter(env).evaluate(parsed)
    except EvaluationError as e:
        return [None, [str(e)]]

    return [result, error_handler.error_report]
