"""Index-set reductions as structure builders, and the degree classifier."""
import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Set, Tuple

from .approx import ApproximationFamily, Semantics, firings
from .ast import expression
from .core import CharacterProfile, Presentation, PresentationBuilder, direct_sum, largest_infinite_multiplicity
from .error import MissingParameter, NormalizationViolation, OutsideClass, ScheduleViolation, SemanticsMismatch
from .interpreter import Interpreter
from .pairing import pair, quadruple, triple
from .types import Stage

logger = logging.getLogger(__name__)

Predicate = expression.Expression


class Degree(Enum):
    ZERO = "0"
    JUMP = "0'"
    DOUBLE_JUMP = "0''"


class ReductionKind(Enum):
    D01 = "d01"
    PI02 = "pi02"
    PI02_INF = "pi02-inf"
    D03 = "d03"
    SIGMA02 = "sigma02"
    PI04 = "pi04"
    SIGMA04 = "sigma04"


REQUIRED: Dict[ReductionKind, Tuple[str, ...]] = {
    ReductionKind.D01: ("family", "n", "base"),
    ReductionKind.PI02: ("family", "n", "base"),
    ReductionKind.PI02_INF: ("family", "base"),
    ReductionKind.D03: ("r", "t", "k"),
    ReductionKind.SIGMA02: ("family",),
    ReductionKind.PI04: ("s",),
    ReductionKind.SIGMA04: ("s", "base"),
}


@dataclass(frozen=True)
class ReductionInput:
    """What a reduction consumes: an enumeration schedule or stage predicates, plus parameters."""

    kind: ReductionKind
    family: Optional[ApproximationFamily] = None
    predicates: Mapping[str, Predicate] = field(default_factory=dict)
    n: Optional[int] = None
    k: Optional[int] = None
    base: Optional[Presentation] = None

    def __post_init__(self):
        for name in REQUIRED[self.kind]:
            present = self.predicates.get(name) if name in ("r", "t", "s") else getattr(self, name)
            if present is None:
                raise MissingParameter(f"Reduction {self.kind.value} needs '{name}'")
        if self.family is not None and self.family.semantics != Semantics.SIGMA1:
            raise SemanticsMismatch(f"Reductions read SIGMA1 schedules, got {self.family.semantics.value}")


def _holds(predicate: Predicate, **env: int) -> bool:
    return bool(Interpreter(env).evaluate(predicate))


def _firings(schedule: ApproximationFamily, horizon: Stage) -> List[Tuple[Stage, int]]:
    events = firings(schedule, horizon)
    for stage, x in events:
        if x >= stage:
            raise ScheduleViolation(f"Input {x} enters at stage {stage}")
    return events


def biemb_test_cbec(pa: CharacterProfile, pb: CharacterProfile) -> bool:
    """Bi-embeddability with a structure whose degree is ZERO, decided on profiles.

    Same infinite-class count, same bound, and identical multiplicities for
    every size from the largest infinitely repeated size n upwards (every
    size when there is none).
    """
    if not pa.is_bounded or not pa.finitely_many_infinite:
        raise OutsideClass("The first profile must be bounded with finitely many infinite classes")
    if pa.infinite_class_count != pb.infinite_class_count or pa.bound != pb.bound:
        return False
    n = max(1, largest_infinite_multiplicity(pa))
    sizes = set(pa.tail_multiplicities) | set(pb.tail_multiplicities)
    return all(pa.multiplicity(m) == pb.multiplicity(m) for m in sizes if m >= n)


def classify_becat(p: CharacterProfile) -> Degree:
    if not p.finitely_many_infinite:
        return Degree.DOUBLE_JUMP
    if p.is_bounded:
        return Degree.ZERO
    return Degree.JUMP


def reduce_d01(e_sched: ApproximationFamily, i_sched: ApproximationFamily, n: int, base: Presentation, horizon: Stage) -> Presentation:
    """Size-n class on even ids when e enters, size-(n+1) class on odd ids when i enters, summed with base."""
    builder = PresentationBuilder()
    events = [(s, 0, x, n) for s, x in _firings(e_sched, horizon)] + [(s, 1, x, n + 1) for s, x in _firings(i_sched, horizon)]
    for stage, parity, x, size in sorted(events):
        class_id = builder.new(stage, 2 * triple(stage, x, 0) + parity)
        for j in range(1, size):
            builder.join(stage, 2 * triple(stage, x, j) + parity, class_id)
    return direct_sum(base, builder.build(horizon))


def reduce_pi02(w_sched: ApproximationFamily, n: int, base: Presentation, horizon: Stage) -> Presentation:
    """One new size-n class per entry, summed with base."""
    builder = PresentationBuilder()
    for stage, x in _firings(w_sched, horizon):
        class_id = builder.new(stage, pair(x, stage))
        for j in range(1, n):
            builder.join(stage, pair(x, stage + j), class_id)
    return direct_sum(base, builder.build(horizon))


def reduce_pi02_inf(w_sched: ApproximationFamily, base: Presentation, horizon: Stage) -> Presentation:
    """A single class gaining one element per entry, summed with base."""
    builder = PresentationBuilder()
    class_id = None
    for stage, x in _firings(w_sched, horizon):
        if class_id is None:
            class_id = builder.new(stage, pair(x, stage))
        else:
            builder.join(stage, pair(x, stage), class_id)
    return direct_sum(base, builder.build(horizon))


def reduce_d03(r_pred: Predicate, t_pred: Predicate, k: int, horizon: Stage) -> Presentation:
    """Even columns carry one class of each finite size grown by r; odd columns carry k classes grown by t.

    Column x is laid out at stage x. At stage 2j every x < j with r(x, j)
    grows the even class by <2x,0,j>; at stage 2j+1 every x < j with t(x, j)
    grows each of the k odd classes by <2x+1,i,j>.
    """
    builder = PresentationBuilder()
    for stage in range(horizon + 1):
        even = builder.new(stage, triple(2 * stage, 0, 0))
        for i in range(1, stage + 1):
            builder.join(stage, triple(2 * stage, 0, i), even)
        for i in range(k):
            builder.new(stage, triple(2 * stage + 1, i, 0))

        j, odd = divmod(stage, 2)
        for x in range(j):
            if not odd and _holds(r_pred, x=x, j=j):
                builder.join(stage, triple(2 * x, 0, j), triple(2 * x, 0, 0))
            if odd and _holds(t_pred, x=x, j=j):
                for i in range(k):
                    builder.join(stage, triple(2 * x + 1, i, j), triple(2 * x + 1, i, 0))
    return builder.build(horizon)


def reduce_sigma02(w_sched: ApproximationFamily, horizon: Stage) -> Presentation:
    """A background singleton per stage; each entry x creates a class of size x+1."""
    entries: Dict[Stage, List[int]] = {}
    for stage, x in _firings(w_sched, horizon):
        entries.setdefault(stage, []).append(x)

    builder = PresentationBuilder()
    for stage in range(horizon + 1):
        builder.new(stage, pair(stage, 0))
        for x in entries.get(stage, []):
            class_id = builder.new(stage, pair(x, stage))
            for i in range(1, x + 1):
                builder.join(stage, pair(x, stage + i), class_id)
    return builder.build(horizon)


Quadruple = Tuple[int, int, int, int]


def _pi04_sweeps(s_pred: Predicate, horizon: Stage) -> Iterator[Tuple[Stage, List[Quadruple], Set[Quadruple]]]:
    """Per stage, the quadruples whose largest coordinate is the stage and those among them satisfying the predicate.

    The normal form is checked after every sweep. Row x, column y collects
    the u that have a witness v; those u must form an initial segment, a row
    may have at most one growing column, and rows with a growing column must
    form an initial segment. A column grows at stage s when its witnessed u
    increased during (s//2, s].
    """
    witnessed: Dict[Tuple[int, int], Set[int]] = {}
    counts: Dict[Tuple[int, int], List[int]] = {}

    def count_at(column: Tuple[int, int], stage: Stage) -> int:
        entered = max(column)
        return counts[column][stage - entered] if stage >= entered else 0

    for stage in range(horizon + 1):
        fresh = [t for t in product(range(stage + 1), repeat=4) if max(t) == stage]
        true = {(x, y, u, v) for x, y, u, v in fresh if _holds(s_pred, x=x, y=y, u=u, v=v)}
        for x, y, u, _ in true:
            witnessed.setdefault((x, y), set()).add(u)

        for (x, y), us in sorted(witnessed.items()):
            if len(us) != max(us) + 1:
                gap = min(set(range(max(us))) - us)
                raise NormalizationViolation(f"Row {x}, column {y}: u = {gap} has no witness by stage {stage} while u = {max(us)} has one")

        growing: Dict[int, List[int]] = {}
        for x, y in product(range(stage + 1), repeat=2):
            counts.setdefault((x, y), []).append(len(witnessed.get((x, y), ())))
            if count_at((x, y), stage) > count_at((x, y), stage // 2):
                growing.setdefault(x, []).append(y)

        for x, columns in sorted(growing.items()):
            if len(columns) > 1:
                raise NormalizationViolation(f"Row {x} has growing columns {columns} at stage {stage}")
        rows = sorted(growing)
        if rows != list(range(len(rows))):
            idle = min(set(range(rows[-1])) - set(rows))
            raise NormalizationViolation(f"Row {rows[-1]} grows at stage {stage} while row {idle} does not")

        yield stage, fresh, true


def check_normalized(s_pred: Predicate, horizon: Stage):
    """Reject predicates outside the normal form the PI04 reduction relies on."""
    for _ in _pi04_sweeps(s_pred, horizon):
        pass


def reduce_pi04(s_pred: Predicate, horizon: Stage) -> Presentation:
    """The class of <x,y,0,0> collects every <x,y,u,v> with the predicate true, all coordinates up to the stage."""
    builder = PresentationBuilder()
    for stage, fresh, true in _pi04_sweeps(s_pred, horizon):
        for x, y, u, v in sorted(fresh, key=lambda t: (t[2:] != (0, 0), t)):
            if (u, v) == (0, 0):
                builder.new(stage, quadruple(x, y, 0, 0))
            elif (x, y, u, v) in true:
                builder.join(stage, quadruple(x, y, u, v), quadruple(x, y, 0, 0))
    return builder.build(horizon)


def reduce_sigma04(s_pred: Predicate, unbounded_base: Presentation, horizon: Stage) -> Presentation:
    return direct_sum(reduce_pi04(s_pred, horizon), unbounded_base)


def reduce(inp: ReductionInput, horizon: Stage) -> Presentation:
    """Run the reduction named by the input kind."""
    # D01 fixtures carry e as input 0 and i as input 1 of one family.
    builders: Dict[ReductionKind, Callable[[], Presentation]] = {
        ReductionKind.D01: lambda: reduce_d01(inp.family.restrict(0), inp.family.restrict(1), inp.n, inp.base, horizon),
        ReductionKind.PI02: lambda: reduce_pi02(inp.family, inp.n, inp.base, horizon),
        ReductionKind.PI02_INF: lambda: reduce_pi02_inf(inp.family, inp.base, horizon),
        ReductionKind.D03: lambda: reduce_d03(inp.predicates["r"], inp.predicates["t"], inp.k, horizon),
        ReductionKind.SIGMA02: lambda: reduce_sigma02(inp.family, horizon),
        ReductionKind.PI04: lambda: reduce_pi04(inp.predicates["s"], horizon),
        ReductionKind.SIGMA04: lambda: reduce_sigma04(inp.predicates["s"], inp.base, horizon),
    }
    logger.info("Running reduction %s to stage %d", inp.kind.value, horizon)
    return builders[inp.kind]()
