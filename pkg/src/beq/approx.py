"""Clocked programs and stage approximation families."""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .ast import expression
from .error import ScheduleViolation, SemanticsMismatch
from .interpreter import Interpreter
from .types import Stage

logger = logging.getLogger(__name__)


class Semantics(Enum):
    SIGMA1 = "SIGMA1"
    SIGMA2 = "SIGMA2"
    PI2 = "PI2"
    LIMIT = "LIMIT"
    MONOTONE_LIMIT = "MONOTONE_LIMIT"


SET_SEMANTICS = (Semantics.SIGMA1, Semantics.SIGMA2, Semantics.PI2)
LIMIT_SEMANTICS = (Semantics.LIMIT, Semantics.MONOTONE_LIMIT)


@dataclass(frozen=True)
class Defined:
    value: int


class Divergence(Enum):
    DIVERGED = "diverged"


DIVERGED = Divergence.DIVERGED

Result = Union[Defined, Divergence]

Bound = Union[int, expression.Expression]


def _expr(bound: Bound) -> expression.Expression:
    if isinstance(bound, int):
        return expression.Literal(bound)
    return bound


def _at(expr: expression.Expression, x: int) -> int:
    return Interpreter({"x": x}).evaluate(expr)


@dataclass(frozen=True)
class ProgramRule:
    """Source form of a fixture program: value, halting time and an optional guard, all in x."""

    value: expression.Expression
    halt: expression.Expression
    when: Optional[expression.Expression] = None


@dataclass(frozen=True)
class ClockedProgram:
    """A partial function with an explicit halting time per input.

    `halting(x)` returns the number of steps needed, or None when the
    program never halts on x.
    """

    index: int
    value: Callable[[int], int] = field(compare=False)
    halting: Callable[[int], Optional[int]] = field(compare=False)
    name: str = ""
    rule: Optional[ProgramRule] = None

    @classmethod
    def total(cls, index: int, function: Callable[[int], int], steps: int = 1, name: str = "total") -> "ClockedProgram":
        return cls(index, function, lambda _: steps, name)

    @classmethod
    def slow(cls, index: int, function: Callable[[int], int], name: str = "slow") -> "ClockedProgram":
        """Halts on x after x steps."""
        return cls(index, function, lambda x: x, name)

    @classmethod
    def never(cls, index: int) -> "ClockedProgram":
        return cls(index, lambda _: 0, lambda _: None, "diverge")

    @classmethod
    def from_rule(cls, index: int, rule: Optional[ProgramRule]) -> "ClockedProgram":
        """Program read from a fixture line; None means `program diverge`."""
        if rule is None:
            return cls.never(index)

        def halting(x: int) -> Optional[int]:
            if rule.when is not None and not _at(rule.when, x):
                return None
            steps = _at(rule.halt, x)
            return None if steps < 0 else steps

        return cls(index, lambda x: _at(rule.value, x), halting, "rule", rule)

    def __call__(self, x: int, fuel: int) -> Result:
        return eval_clocked(self, x, fuel)


def eval_clocked(prog: ClockedProgram, x: int, fuel: int) -> Result:
    """Run a program on x with a fuel bound; fuel 0 never suffices."""
    steps = prog.halting(x)
    if steps is None or fuel < max(1, steps):
        return DIVERGED
    return Defined(prog.value(x))


class Schedule:
    """Stage rule h(x, s) for one input of a family."""

    natural: bool = False

    def value(self, x: int, s: Stage) -> int:
        raise NotImplementedError

    def limit(self, x: int, semantics: Semantics) -> int:
        """Limit behaviour the schedule declares under the given semantics."""
        raise NotImplementedError


@dataclass(frozen=True)
class Always(Schedule):
    def value(self, x: int, s: Stage) -> int:
        return 1

    def limit(self, x: int, semantics: Semantics) -> int:
        return 1


@dataclass(frozen=True)
class Never(Schedule):
    def value(self, x: int, s: Stage) -> int:
        return 0

    def limit(self, x: int, semantics: Semantics) -> int:
        return 0


@dataclass(frozen=True, init=False)
class From(Schedule):
    start: expression.Expression

    def __init__(self, start: Bound):
        object.__setattr__(self, "start", _expr(start))

    def value(self, x: int, s: Stage) -> int:
        return int(s >= _at(self.start, x))

    def limit(self, x: int, semantics: Semantics) -> int:
        return 1


@dataclass(frozen=True, init=False)
class Until(Schedule):
    end: expression.Expression

    def __init__(self, end: Bound):
        object.__setattr__(self, "end", _expr(end))

    def value(self, x: int, s: Stage) -> int:
        return int(s < _at(self.end, x))

    def limit(self, x: int, semantics: Semantics) -> int:
        return 0


@dataclass(frozen=True, init=False)
class Periodic(Schedule):
    """True at stages t >= start with t = offset (mod period)."""

    period: expression.Expression
    offset: expression.Expression
    start: expression.Expression

    def __init__(self, period: Bound, offset: Bound, start: Bound):
        object.__setattr__(self, "period", _expr(period))
        object.__setattr__(self, "offset", _expr(offset))
        object.__setattr__(self, "start", _expr(start))

    def value(self, x: int, s: Stage) -> int:
        period = _at(self.period, x)
        if period <= 0:
            raise ScheduleViolation(f"Period {period} for input {x} is not positive")
        return int(s >= _at(self.start, x) and (s - _at(self.offset, x)) % period == 0)

    def limit(self, x: int, semantics: Semantics) -> int:
        if semantics == Semantics.PI2:
            return 1
        return int(_at(self.period, x) == 1)


@dataclass(frozen=True, init=False)
class Const(Schedule):
    constant: expression.Expression
    natural = True

    def __init__(self, constant: Bound):
        object.__setattr__(self, "constant", _expr(constant))

    def value(self, x: int, s: Stage) -> int:
        return _at(self.constant, x)

    def limit(self, x: int, semantics: Semantics) -> int:
        return _at(self.constant, x)


@dataclass(frozen=True, init=False)
class Ramp(Schedule):
    """min(s + ramp, cap)."""

    ramp: expression.Expression
    cap: expression.Expression
    natural = True

    def __init__(self, ramp: Bound, cap: Bound):
        object.__setattr__(self, "ramp", _expr(ramp))
        object.__setattr__(self, "cap", _expr(cap))

    def value(self, x: int, s: Stage) -> int:
        return min(s + _at(self.ramp, x), _at(self.cap, x))

    def limit(self, x: int, semantics: Semantics) -> int:
        return _at(self.cap, x)


@dataclass(frozen=True)
class Truth:
    """Declared limit value of one input and the stage it is stable from."""

    value: int
    stable: Stage


@dataclass(frozen=True)
class ApproximationFamily:
    """Stage approximations h(x, s) with declared semantics.

    Schedule-based families come from fixtures: explicit per-input rules plus
    an optional default rule for every other input below `bound`. Computed
    families (such as `dominant_f`) carry a function instead.
    """

    semantics: Semantics
    horizon: Stage
    rules: Mapping[int, Schedule] = field(default_factory=dict)
    default: Optional[Schedule] = None
    truth: Mapping[int, Truth] = field(default_factory=dict)
    input_bound: Optional[int] = None
    function: Optional[Callable[[int, Stage], int]] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rules", dict(sorted(self.rules.items())))
        object.__setattr__(self, "truth", dict(sorted(self.truth.items())))
        if self.function is None:
            self._check_schedules()

    @classmethod
    def from_schedules(
        cls,
        semantics: Semantics,
        horizon: Stage,
        rules: Mapping[int, Schedule],
        default: Optional[Schedule] = None,
        truth: Optional[Mapping[int, Truth]] = None,
        input_bound: Optional[int] = None,
    ) -> "ApproximationFamily":
        return cls(semantics, horizon, rules, default, truth or {}, input_bound)

    def restrict(self, *inputs: int) -> "ApproximationFamily":
        """Family keeping only the given inputs (explicit or default rules)."""
        rules = {x: schedule for x in inputs if (schedule := self.schedule(x)) is not None}
        truth = {x: self.truth[x] for x in inputs if x in self.truth}
        return ApproximationFamily(self.semantics, self.horizon, rules, None, truth, self.input_bound)

    @property
    def bound(self) -> int:
        """Inputs below this bound are in play."""
        return self.horizon if self.input_bound is None else self.input_bound

    def schedule(self, x: int) -> Optional[Schedule]:
        if x in self.rules:
            return self.rules[x]
        if self.default is not None and 0 <= x < self.bound:
            return self.default
        return None

    def inputs(self) -> List[int]:
        if self.default is not None or self.function is not None:
            return list(range(max(self.bound, max(self.rules, default=-1) + 1)))
        return sorted(self.rules)

    def at(self, x: int, s: Stage) -> int:
        """h(x, s)."""
        if self.function is not None:
            return self.function(x, s)
        schedule = self.schedule(x)
        if schedule is None:
            return 0
        return schedule.value(x, s)

    def member_in_limit(self, x: int) -> Optional[int]:
        """Declared truth for x, else the limit its schedule declares."""
        if x in self.truth:
            return self.truth[x].value
        schedule = self.schedule(x)
        if schedule is None:
            return None if self.function is not None else 0
        return schedule.limit(x, self.semantics)

    def _check_schedules(self):
        for x in self.inputs():
            schedule = self.schedule(x)
            if schedule is None:
                continue
            if schedule.natural != (self.semantics in LIMIT_SEMANTICS):
                raise ScheduleViolation(f"Schedule {schedule} does not fit {self.semantics.value} semantics (input {x})")
            if self.semantics == Semantics.SIGMA1:
                if not isinstance(schedule, (Never, From)):
                    raise ScheduleViolation(f"SIGMA1 input {x} must use 'never' or 'from'")
                if isinstance(schedule, From) and _at(schedule.start, x) <= x:
                    raise ScheduleViolation(f"Input {x} enters at stage {_at(schedule.start, x)}, not after {x}")
            if self.semantics == Semantics.MONOTONE_LIMIT:
                for s in range(self.horizon):
                    if schedule.value(x, s) > schedule.value(x, s + 1):
                        raise ScheduleViolation(f"h({x},{s}) > h({x},{s + 1}) in a monotone limit family")

    def check_contract(self):
        """Every declared truth below the input bound must match the schedules up to the horizon."""
        for x, truth in self.truth.items():
            if x >= self.bound:
                continue
            stages = range(truth.stable, self.horizon + 1)
            values = [self.at(x, s) for s in stages]
            schedule = self.schedule(x)
            declared = schedule.limit(x, self.semantics) if schedule is not None else 0

            if self.semantics in LIMIT_SEMANTICS:
                holds = all(value == truth.value for value in values)
            elif self.semantics == Semantics.PI2:
                holds = declared == truth.value and (any(values) if truth.value else not any(values))
            elif truth.value:
                holds = all(values) and declared == 1
            else:
                holds = declared == 0

            if not holds:
                raise ScheduleViolation(f"Declared truth {truth.value} for input {x} (stable from {truth.stable}) does not match its schedule")
        logger.debug("Fixture contract holds for %d declared inputs", len(self.truth))


def _require(fam: ApproximationFamily, *semantics: Semantics):
    if fam.semantics not in semantics:
        expected = "|".join(s.value for s in semantics)
        raise SemanticsMismatch(f"Expected a {expected} family, got {fam.semantics.value}")


def limit_value(fam: ApproximationFamily, x: int, horizon: Stage) -> int:
    _require(fam, Semantics.MONOTONE_LIMIT, Semantics.LIMIT)
    return fam.at(x, horizon)


def sigma2_member_at(fam: ApproximationFamily, x: int, s: Stage) -> bool:
    _require(fam, Semantics.SIGMA2)
    return bool(fam.at(x, s))


def pi2_member_at(fam: ApproximationFamily, x: int, s: Stage) -> bool:
    _require(fam, Semantics.PI2)
    return bool(fam.at(x, s))


def entering(fam: ApproximationFamily, s: Stage) -> List[int]:
    """Inputs that enter a SIGMA1 approximation exactly at stage s."""
    _require(fam, Semantics.SIGMA1)
    return [x for x in fam.inputs() if x < s and fam.at(x, s) and not fam.at(x, s - 1)]


def firings(fam: ApproximationFamily, horizon: Optional[Stage] = None) -> List[Tuple[Stage, int]]:
    """(stage, input) pairs in stage order, up to the horizon."""
    horizon = fam.horizon if horizon is None else horizon
    return [(s, x) for s in range(1, horizon + 1) for x in entering(fam, s)]


def dominant_f(
    programs: Sequence[ClockedProgram],
    fuel_schedule: Optional[Callable[[Stage], int]] = None,
    horizon: Stage = 100,
) -> ApproximationFamily:
    """h(x, s) = 1 + sum of phi_i(x) over i <= x that halt within fuel(s)."""
    fuel = fuel_schedule or (lambda s: s)
    cache: Dict[Tuple[int, int], int] = {}

    def h(x: int, s: Stage) -> int:
        key = (x, fuel(s))
        if key not in cache:
            total = 1
            for program in programs[: x + 1]:
                result = eval_clocked(program, x, key[1])
                if isinstance(result, Defined):
                    total += result.value
            cache[key] = total
        return cache[key]

    return ApproximationFamily(Semantics.MONOTONE_LIMIT, horizon, function=h)


def string_at(i: int) -> str:
    """i-th binary string in length-lexicographic order (empty string first)."""
    return bin(i + 1)[3:]


def length_lex(max_length: int) -> List[str]:
    return [string_at(i) for i in range(2 ** (max_length + 1) - 1)]
