"""Parser for fixture expressions and every line-oriented file format."""
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional

from .adversary import ConstructionLog, LogEntry, LogKind
from .approx import (
    Always,
    ApproximationFamily,
    ClockedProgram,
    Const,
    From,
    Never,
    Periodic,
    ProgramRule,
    Ramp,
    Schedule,
    Semantics,
    Truth,
    Until,
)
from .ast import expression
from .core import CharacterProfile, Event, EventKind, Presentation, Snapshot
from .error import ParserError, handler as error_handler
from .tokens import Token, TokenType
from .types import INFINITE, UNBOUNDED, Count


@dataclass
class MapRecord:
    stage: int
    pairs: Dict[int, int] = field(default_factory=dict)


@dataclass
class Fixture:
    """A FAMILY file: the family plus optional reduction parameters and predicates."""

    family: ApproximationFamily
    params: Dict[str, object] = field(default_factory=dict)
    predicates: Dict[str, expression.Expression] = field(default_factory=dict)


UNARY_OPERATORS = (TokenType.MINUS, TokenType.NOT, TokenType.FIRST, TokenType.SECOND)

COMPARISONS = (
    TokenType.EQUAL,
    TokenType.NOT_EQUAL,
    TokenType.LESS_THAN,
    TokenType.LESS_THAN_OR_EQUAL,
    TokenType.GREATER_THAN,
    TokenType.GREATER_THAN_OR_EQUAL,
)


class Parser:
    """Recursive descent over one file's tokens."""

    tokens: List[Token]
    current: int = 0

    def __init__(self, tokens: List[Token]):
        self.tokens = tokens

    def __repr__(self):
        return f"<Parser {self.current} / {len(self.tokens)}>"

    def is_at_end(self):
        return self.peek().token_type == TokenType.EOF

    def peek(self, lookahead: int = 0):
        return self.tokens[min(self.current + lookahead, len(self.tokens) - 1)]

    def previous(self):
        return self.tokens[self.current - 1]

    def check(self, _type: TokenType):
        if self.is_at_end():
            return False
        return self.peek().token_type == _type

    def advance(self):
        if not self.is_at_end():
            self.current += 1

        return self.previous()

    def match(self, *types: TokenType):
        """Check and consume a token of given types."""
        for _type in types:
            if self.check(_type):
                self.advance()
                return True
        return False

    def error(self, message: str):
        token = self.peek()
        error_handler.report(ParserError(token.line, token.column, message))

    def consume(self, _type: TokenType, message: str):
        if self.check(_type):
            return self.advance()
        self.error(message)
        return None

    # Lines

    def synchronize(self):
        """Skip the rest of the current line."""
        while not self.is_at_end() and not self.match(TokenType.NEWLINE):
            self.advance()

    def skip_newlines(self):
        while self.match(TokenType.NEWLINE):
            pass

    def end_of_line(self):
        if self.is_at_end() or self.match(TokenType.NEWLINE):
            return
        self.error(f"Expected end of line, got '{self.peek().lexeme}'")
        self.synchronize()

    def records(self) -> Iterator[int]:
        """Yield once per non-blank line; lines a handler failed to consume are skipped."""
        while True:
            self.skip_newlines()
            if self.is_at_end():
                return
            start = self.current
            yield self.peek().line
            if self.current == start:
                self.synchronize()

    def check_word(self, lexeme: str) -> bool:
        return not self.is_at_end() and self.peek().lexeme == lexeme

    def word(self, lexeme: str) -> bool:
        if self.check_word(lexeme):
            self.advance()
            return True
        self.error(f"Expected '{lexeme}', got '{self.peek().lexeme}'")
        return False

    def key(self, name: str) -> bool:
        return self.word(name) and self.consume(TokenType.EQUAL, f"Expected '=' after '{name}'") is not None

    def integer(self, what: str) -> Optional[int]:
        token = self.consume(TokenType.INTEGER, f"Expected {what}")
        return None if token is None else token.literal

    def count(self, what: str, infinite: str = "inf") -> Optional[Count]:
        if self.check_word(infinite):
            self.advance()
            return INFINITE
        return self.integer(what)

    def header(self, name: str) -> bool:
        self.skip_newlines()
        return self.word(name) and self.word("v1")

    def attributes(self, *names: str) -> Dict[str, Token]:
        """key=value pairs up to the end of the line."""
        values: Dict[str, Token] = {}
        while not self.is_at_end() and not self.check(TokenType.NEWLINE):
            name = self.peek().lexeme
            if name not in names or not self.key(name):
                self.error(f"Unexpected attribute '{name}'")
                self.synchronize()
                return values
            values[name] = self.advance()
        self.end_of_line()
        return values

    # Expressions

    def parse_expression(self) -> Optional[expression.Expression]:
        if self.match(TokenType.IF):
            return self.if_expression()
        return self.conjunction()

    def if_expression(self):
        condition = self.parse_expression()
        self.consume(TokenType.THEN, "Missing THEN after condition")
        true_result = self.parse_expression()
        self.consume(TokenType.ELSE, "Missing ELSE after true result")
        false_result = self.parse_expression()

        if condition is None or true_result is None or false_result is None:
            self.error("Incomplete if-expression")
            return None

        return expression.Conditional(condition, true_result, false_result)

    def _binary(self, operand: Callable[[], Optional[expression.Expression]], *operators: TokenType):
        expr = operand()
        while self.match(*operators):
            operator = self.previous()
            right = operand()

            if not expr or not right:
                self.error(f"Missing operand for '{operator.lexeme}'")
                return None

            expr = expression.Binary(expr, operator, right)
        return expr

    def conjunction(self) -> Optional[expression.Expression]:
        return self._binary(self.comparison, TokenType.AND)

    def comparison(self) -> Optional[expression.Expression]:
        return self._binary(self.term, *COMPARISONS)

    def term(self) -> Optional[expression.Expression]:
        return self._binary(self.factor, TokenType.PLUS, TokenType.MINUS)

    def factor(self) -> Optional[expression.Expression]:
        return self._binary(self.unary, TokenType.MULTIPLY, TokenType.DIVIDE, TokenType.MODULO)

    def unary(self) -> Optional[expression.Expression]:
        if self.match(*UNARY_OPERATORS):
            operator = self.previous()
            right = self.unary()
            if not right:
                self.error(f"Missing operand for '{operator.lexeme}'")
                return None
            return expression.Unary(operator, right)
        return self.primary()

    def primary(self) -> Optional[expression.Expression]:
        if self.match(TokenType.INTEGER):
            return expression.Literal(self.previous().literal)

        if self.match(TokenType.IDENTIFIER):
            return expression.Variable(self.previous())

        if self.match(TokenType.LPAREN):
            expr = self.parse_expression()
            self.consume(TokenType.RPAREN, "Expect ')' after expression.")
            return expr

        if self.match(TokenType.LSQUARE):
            first = self.parse_expression()
            self.consume(TokenType.COMMA, "Expect ',' between pair components.")
            second = self.parse_expression()
            self.consume(TokenType.RSQUARE, "Expect ']' after pair.")
            if first is None or second is None:
                return None
            return expression.Pair(first, second)

        self.error(f"Expected expression, got '{self.peek().lexeme}'")
        return None

    def schedule(self) -> Optional[Schedule]:
        if self.match(TokenType.ALWAYS):
            return Always()
        if self.match(TokenType.NEVER):
            return Never()
        if self.match(TokenType.FROM):
            start = self.parse_expression()
            return None if start is None else From(start)
        if self.match(TokenType.UNTIL):
            end = self.parse_expression()
            return None if end is None else Until(end)
        if self.match(TokenType.PERIOD):
            period = self.parse_expression()
            self.consume(TokenType.OFFSET, "Expected 'offset' in periodic schedule")
            offset = self.parse_expression()
            self.consume(TokenType.FROM, "Expected 'from' in periodic schedule")
            start = self.parse_expression()
            if period is None or offset is None or start is None:
                return None
            return Periodic(period, offset, start)
        if self.match(TokenType.CONST):
            constant = self.parse_expression()
            return None if constant is None else Const(constant)
        if self.match(TokenType.RAMP):
            ramp = self.parse_expression()
            self.consume(TokenType.CAP, "Expected 'cap' in ramp schedule")
            cap = self.parse_expression()
            return None if ramp is None or cap is None else Ramp(ramp, cap)

        self.error(f"Unknown schedule '{self.peek().lexeme}'")
        return None

    # Files

    def snapshot(self) -> Optional[Snapshot]:
        if not self.header("SNAPSHOT"):
            return None
        self.end_of_line()

        classes: Dict[int, frozenset] = {}
        for _ in self.records():
            if not self.word("class"):
                continue
            class_id = self.integer("class id")
            self.consume(TokenType.COLON, "Expected ':' after class id")
            members = []
            while self.check(TokenType.INTEGER):
                members.append(self.advance().literal)
            self.end_of_line()
            if class_id is not None:
                classes[class_id] = frozenset(members)

        if error_handler.had_error:
            return None
        return Snapshot(classes)

    def trace(self) -> Optional[Presentation]:
        if not self.header("TRACE"):
            return None
        horizon = self.attributes("horizon").get("horizon")

        events: List[Event] = []
        for _ in self.records():
            if not self.key("s"):
                continue
            stage = self.integer("stage")
            if self.check_word("new"):
                self.advance()
                element = self.integer("element")
                if stage is not None and element is not None:
                    events.append(Event(stage, EventKind.NEW, element, element))
            elif self.word("join"):
                element = self.integer("element")
                self.consume(TokenType.ARROW, "Expected '->' before class id")
                class_id = self.integer("class id")
                if stage is not None and element is not None and class_id is not None:
                    events.append(Event(stage, EventKind.JOIN, element, class_id))
            self.end_of_line()

        if horizon is None or not isinstance(horizon.literal, int):
            self.error("Trace header needs an integer horizon")
        if error_handler.had_error or horizon is None:
            return None
        return Presentation(horizon.literal, tuple(events))

    def map(self) -> Optional[MapRecord]:
        if not self.header("MAP"):
            return None
        stage = self.attributes("stage").get("stage")

        record = MapRecord(stage.literal if stage is not None and isinstance(stage.literal, int) else 0)
        for _ in self.records():
            if not self.consume(TokenType.ARROW, "Expected '->'"):
                continue
            src = self.integer("source element")
            dst = self.integer("target element")
            self.end_of_line()
            if src is not None and dst is not None:
                if src in record.pairs:
                    self.error(f"Element {src} mapped twice")
                record.pairs[src] = dst

        if stage is None:
            self.error("Map header needs a stage")
        return None if error_handler.had_error else record

    def mind_changes(self) -> Optional[Dict[int, List[int]]]:
        if not self.header("MC"):
            return None
        self.end_of_line()

        changes: Dict[int, List[int]] = {}
        for _ in self.records():
            element = self.integer("element")
            self.consume(TokenType.COLON, "Expected ':' after element")
            stages = []
            while self.check(TokenType.INTEGER):
                stages.append(self.advance().literal)
            self.end_of_line()
            if element is not None:
                changes[element] = stages

        return None if error_handler.had_error else changes

    def log(self) -> Optional[ConstructionLog]:
        if not self.header("LOG"):
            return None
        self.end_of_line()

        kinds = {kind.value: kind for kind in LogKind}
        entries: List[LogEntry] = []
        for _ in self.records():
            if not self.key("s"):
                continue
            stage = self.integer("stage")
            kind = kinds.get(self.peek().lexeme)
            if kind is None:
                self.error(f"Unknown log event '{self.peek().lexeme}'")
                self.synchronize()
                continue
            self.advance()
            args = []
            while self.check(TokenType.INTEGER):
                args.append(self.advance().literal)
            self.end_of_line()
            if stage is not None:
                entries.append(LogEntry(stage, kind, tuple(args)))

        return None if error_handler.had_error else ConstructionLog(tuple(entries))

    def profile(self) -> Optional[CharacterProfile]:
        if not self.header("PROFILE"):
            return None

        self.key("bound")
        bound = self.count("bound", "unbounded")
        self.key("infinite")
        infinite = self.count("infinite class count")
        self.key("cutoff")
        cutoff = self.integer("cutoff")
        self.end_of_line()

        tail: Dict[int, Count] = {}
        for _ in self.records():
            if not self.word("size"):
                continue
            size = self.integer("size")
            self.key("count")
            multiplicity = self.count("count")
            self.end_of_line()
            if size is not None and multiplicity is not None:
                tail[size] = multiplicity

        if error_handler.had_error or bound is None or infinite is None or cutoff is None:
            return None
        return CharacterProfile(UNBOUNDED if bound == INFINITE else bound, infinite, tail, cutoff)

    def programs(self) -> Optional[List[ClockedProgram]]:
        if not self.header("PROGRAMS"):
            return None
        self.end_of_line()

        programs: List[ClockedProgram] = []
        for _ in self.records():
            if not self.word("program"):
                continue
            if self.check_word("diverge"):
                self.advance()
                programs.append(ClockedProgram.from_rule(len(programs), None))
                self.end_of_line()
                continue

            self.key("value")
            value = self.parse_expression()
            self.key("halt")
            halt = self.parse_expression()
            when = None
            if self.check_word("when"):
                self.key("when")
                when = self.parse_expression()
            self.end_of_line()
            if value is not None and halt is not None:
                programs.append(ClockedProgram.from_rule(len(programs), ProgramRule(value, halt, when)))

        return None if error_handler.had_error else programs

    def fixture(self) -> Optional[Fixture]:
        if not self.header("FAMILY"):
            return None
        header = self.attributes("semantics", "horizon", "bound")

        semantics = None
        if "semantics" in header:
            semantics = next((s for s in Semantics if s.value == header["semantics"].lexeme), None)
        if semantics is None:
            self.error("Family header needs semantics=SIGMA1|SIGMA2|PI2|LIMIT|MONOTONE_LIMIT")
        if "horizon" not in header:
            self.error("Family header needs a horizon")

        rules: Dict[int, Schedule] = {}
        default: Optional[Schedule] = None
        truth: Dict[int, Truth] = {}
        params: Dict[str, object] = {}
        predicates: Dict[str, expression.Expression] = {}

        for _ in self.records():
            if self.check_word("x"):
                self.key("x")
                star = self.match(TokenType.MULTIPLY)
                x = None if star else self.integer("input or '*'")
                self.key("schedule")
                schedule = self.schedule()
                self.end_of_line()
                if schedule is None:
                    continue
                if star:
                    default = schedule
                elif x is not None:
                    rules[x] = schedule
            elif self.check_word("truth"):
                self.advance()
                values = self.attributes("x", "value", "stable")
                if all(name in values for name in ("x", "value", "stable")):
                    truth[values["x"].literal] = Truth(values["value"].literal, values["stable"].literal)
                else:
                    self.error("Truth line needs x=, value= and stable=")
            elif self.check_word("params"):
                self.advance()
                for name, token in self.attributes("n", "k", "base").items():
                    params[name] = token.literal
            elif self.word("predicate"):
                name = self.consume(TokenType.IDENTIFIER, "Expected predicate name")
                self.consume(TokenType.EQUAL, "Expected '=' after predicate name")
                predicate = self.parse_expression()
                self.end_of_line()
                if name is not None and predicate is not None:
                    predicates[name.lexeme] = predicate

        if error_handler.had_error or semantics is None:
            return None
        bound = header.get("bound")
        family = ApproximationFamily.from_schedules(
            semantics,
            header["horizon"].literal,
            rules,
            default,
            truth,
            None if bound is None else bound.literal,
        )
        return Fixture(family, params, predicates)

