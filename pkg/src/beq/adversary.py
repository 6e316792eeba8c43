"""Presentation builders that defeat programs or code approximations into class sizes."""
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .approx import ApproximationFamily, ClockedProgram, Defined, Semantics, eval_clocked, string_at
from .core import EventKind, Presentation, PresentationBuilder, Snapshot, inf_guess
from .embed import PartialMap, verify_partial_embedding
from .error import InvariantViolation, NoSurvivingWitness, SemanticsMismatch
from .pairing import pair, triple, unpair
from .types import ClassId, Element, Stage

logger = logging.getLogger(__name__)


class LogKind(Enum):
    ATTEND = "attend"
    BLOCK = "block"
    DESIGNATE = "designate"
    DISCARD = "discard"
    GROW = "grow"


@dataclass(frozen=True)
class LogEntry:
    stage: Stage
    kind: LogKind
    args: Tuple[int, ...] = ()

    def __str__(self):
        return " ".join([f"s={self.stage}", self.kind.value] + [str(arg) for arg in self.args])


@dataclass(frozen=True)
class ConstructionLog:
    """Audit trail of a construction.

    Argument layout per kind:
      attend <requirement> <witness>
      block <requirement> <element> <class>
      designate <owner> <class>
      discard <owner> <witness>
      grow <class> <element>
    """

    entries: Tuple[LogEntry, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self):
        return len(self.entries)

    def of_kind(self, kind: LogKind) -> List[LogEntry]:
        return [entry for entry in self.entries if entry.kind == kind]

    def grown_classes(self) -> Counter:
        """Number of stages at which each class grew."""
        return Counter(cls for cls, _ in {(e.args[0], e.stage) for e in self.of_kind(LogKind.GROW)})


@dataclass
class _Logger:
    entries: List[LogEntry] = field(default_factory=list)

    def add(self, stage: Stage, kind: LogKind, *args: int):
        entry = LogEntry(stage, kind, tuple(args))
        logger.debug("%s", entry)
        self.entries.append(entry)

    def grow(self, builder: PresentationBuilder, stage: Stage, element: Element, class_id: ClassId):
        builder.join(stage, element, class_id)
        self.add(stage, LogKind.GROW, class_id, element)

    def build(self) -> ConstructionLog:
        return ConstructionLog(tuple(self.entries))


def check_log(pres: Presentation, log: ConstructionLog):
    """Growth entries match join events one to one, and discarded classes stay frozen."""
    grown = Counter((e.stage, e.args[1], e.args[0]) for e in log.of_kind(LogKind.GROW))
    joins = Counter((e.stage, e.element, e.class_id) for e in pres.trace if e.kind == EventKind.JOIN)
    if grown != joins:
        difference = (grown - joins) + (joins - grown)
        stage, element, class_id = next(iter(difference))
        raise InvariantViolation(f"Log and trace disagree on element {element} of class {class_id} at stage {stage}")

    for entry in log.of_kind(LogKind.DISCARD):
        witness = entry.args[1]
        later = [s for s in pres.growth_stages(pres.class_of(witness)) if s > entry.stage]
        if later:
            raise InvariantViolation(f"Discarded witness {witness} grew again at stage {later[0]}")


def triangular_size(elem: Element) -> int:
    """Size of the class of <i,n> in the triangular structure: i+1."""
    column, row = unpair(elem)
    if row > column:
        raise InvariantViolation(f"{elem} = <{column},{row}> is not an element of the triangular structure")
    return column + 1


def is_triangular_element(elem: Element) -> bool:
    if elem < 0:
        return False
    column, row = unpair(elem)
    return row <= column


def canonical_triangular(horizon: Stage) -> Presentation:
    """Column i holds <i,0>, ..., <i,i> and is laid out complete at stage i."""
    builder = PresentationBuilder()
    for s in range(horizon + 1):
        class_id = builder.new(s, pair(s, 0))
        for row in range(1, s + 1):
            builder.join(s, pair(s, row), class_id)
    return builder.build(horizon)


def _triangular_snapshot(elements: Iterable[Element]) -> Snapshot:
    columns = sorted({unpair(elem)[0] for elem in elements})
    return Snapshot.from_classes([pair(column, row) for row in range(column + 1)] for column in columns)


def _graph(program: ClockedProgram, universe: Iterable[Element], fuel: int) -> Dict[Element, Element]:
    graph = {}
    for element in universe:
        result = eval_clocked(program, element, fuel)
        if isinstance(result, Defined):
            graph[element] = result.value
    return graph


def _embeds_into_triangular(graph: Dict[Element, Element], snap: Snapshot) -> bool:
    """Graph is a partial embedding of the snapshot into the triangular structure."""
    if not all(is_triangular_element(value) for value in graph.values()):
        return False
    return verify_partial_embedding(PartialMap(graph, snap, _triangular_snapshot(graph.values())))


def defeated(program: ClockedProgram, b: Presentation, horizon: Stage) -> bool:
    """The program's graph on B at the horizon is no partial embedding into the triangular structure."""
    snap = b.snapshot_at(horizon)
    graph = _graph(program, sorted(snap.universe), horizon)
    return bool(graph) and not _embeds_into_triangular(graph, snap)


def diagonalize_unbounded(programs: Sequence[ClockedProgram], horizon: Stage) -> Tuple[Presentation, ConstructionLog]:
    """Build B with no infinite classes that no listed program embeds into the triangular structure.

    Requirement e needs attention at stage s+1 when its graph with fuel s,
    restricted to B_s, is a nonempty partial embedding. The least such e <= s
    grows the class of <s,0> by s+1 fresh elements <s,s+1>, <s,s+2>, ...
    and further when needed, so that the class outgrows the column of its
    image and every class grown before. A new singleton <s+1,0> appears at
    every stage, so each class grows at most once.
    """
    builder = PresentationBuilder()
    log = _Logger()
    builder.new(0, pair(0, 0))
    graphs: List[Dict[Element, Element]] = [{} for _ in programs]
    beaten: Set[int] = set()
    largest = 0

    for s in range(horizon):
        stage = s + 1
        snap = _builder_snapshot(builder)
        for e, program in enumerate(programs[: s + 1]):
            if e in beaten:
                continue
            graph = graphs[e]
            graph.update(_graph(program, sorted(snap.universe.difference(graph)), s))
            if not graph:
                continue
            if not _embeds_into_triangular(graph, snap):
                logger.debug("Program %d is no partial embedding at stage %d", e, s)
                beaten.add(e)
                continue

            witness = pair(s, 0)
            target = max(s + 2, largest + 1)
            if witness in graph:
                target = max(target, triangular_size(graph[witness]) + 1)
            log.add(stage, LogKind.ATTEND, e, witness)
            for row in range(s + 1, s + target):
                log.grow(builder, stage, pair(s, row), witness)
            largest = target
            break

        builder.new(stage, pair(stage, 0))

    return builder.build(horizon), log.build()


def _builder_snapshot(builder: PresentationBuilder) -> Snapshot:
    return Presentation(builder.stage, tuple(builder.events)).final()


class _Designations:
    """Blocked witnesses per requirement and designated classes, replayable from a log."""

    def __init__(self):
        self.blocked: Dict[int, Element] = {}
        self.blocked_class: Dict[int, ClassId] = {}
        self.designated: Dict[ClassId, int] = {}

    def block(self, e: int, element: Element, class_id: ClassId):
        self.designated.pop(class_id, None)
        self.blocked[e] = element
        self.blocked_class[e] = class_id

    def designate(self, owner: int, class_id: ClassId):
        for e, blocked in list(self.blocked_class.items()):
            if blocked == class_id:
                del self.blocked[e]
                del self.blocked_class[e]
        self.designated[class_id] = owner

    def apply(self, entry: LogEntry):
        if entry.kind == LogKind.BLOCK:
            self.block(*entry.args)
        elif entry.kind == LogKind.DESIGNATE:
            self.designate(*entry.args)

    @classmethod
    def replay(cls, log: ConstructionLog, stage: Stage) -> "_Designations":
        state = cls()
        for entry in log.entries:
            if entry.stage > stage:
                break
            state.apply(entry)
        return state


def blocked_at(log: ConstructionLog, stage: Stage) -> Dict[int, Element]:
    """Blocked witness of every requirement after the given stage."""
    return dict(_Designations.replay(log, stage).blocked)


def designated_at(log: ConstructionLog, stage: Stage) -> Set[ClassId]:
    return set(_Designations.replay(log, stage).designated)


def build_simple_fin(families: Sequence[ApproximationFamily], horizon: Stage) -> Tuple[Presentation, ConstructionLog]:
    """Structure whose finite part meets every infinite set in the list.

    Family e plays the e-th set enumerable relative to the halting problem.
    Requirement e needs attention at a stage when its current approximation
    misses every blocked class and holds some x > e^3.
    """
    for family in families:
        if family.semantics != Semantics.SIGMA2:
            raise SemanticsMismatch(f"Expected SIGMA2 families, got {family.semantics.value}")

    builder = PresentationBuilder()
    log = _Logger()
    state = _Designations()
    attended: Set[int] = set()
    frozen: Dict[ClassId, FrozenSet[Element]] = {}
    in_since: List[Dict[int, Stage]] = [{} for _ in families]
    previous: List[Set[int]] = [set() for _ in families]

    def fresh() -> Element:
        return max(builder.max_element, stage) + 1

    def release(e: int, class_id: ClassId):
        state.designate(e, class_id)
        log.add(stage, LogKind.DESIGNATE, e, class_id)

    for stage in range(horizon + 1):
        if stage not in builder:
            builder.new(stage, stage)

        current: List[Set[int]] = []
        for e, family in enumerate(families):
            members = {x for x in family.inputs() if family.at(x, stage)}
            for x in list(in_since[e]):
                if x not in members:
                    del in_since[e][x]
            for x in members:
                in_since[e].setdefault(x, stage)
            current.append(members)

        # (1) the least requirement needing attention
        fin = set().union(*(frozen[c] for c in state.blocked_class.values()))
        for e in range(min(stage, len(families))):
            threshold = e**3
            above = [x for x in current[e] if x > threshold]
            if current[e] & fin or not above:
                continue

            least = min(above)
            if least <= stage:
                witness = min((y for y in above if y <= stage), key=lambda y: (in_since[e][y], y))
            else:
                witness = least
            log.add(stage, LogKind.ATTEND, e, witness)

            if e in state.blocked_class:
                release(e, state.blocked_class[e])
            if witness not in builder:
                builder.new(stage, witness)
            class_id = builder.class_of(witness)
            frozen[class_id] = builder.members(class_id)
            state.block(e, witness, class_id)
            log.add(stage, LogKind.BLOCK, e, witness, class_id)

            if e not in attended:
                attended.add(e)
                spare = [
                    c
                    for c in builder.class_ids()
                    if builder.size(c) == 1 and c not in state.designated and c not in state.blocked_class.values()
                ]
                target = spare[0] if spare else builder.new(stage, fresh())
                state.designate(e, target)
                log.add(stage, LogKind.DESIGNATE, e, target)
            break

        # (2) designated classes grow by one fresh element each
        for class_id in sorted(state.designated):
            log.grow(builder, stage, fresh(), class_id)

        # (3) witnesses that left their set are released for growth
        for e, witness in list(state.blocked.items()):
            if witness in previous[e] and witness not in current[e]:
                release(e, state.blocked_class[e])

        previous = current

    return builder.build(horizon), log.build()


def check_accounting(log: ConstructionLog) -> Optional[Tuple[Stage, int]]:
    """First (stage, e) at which more than e^2 blocked or designated elements lie below e^3.

    Only stages whose largest attended requirement e exceeds 2 are checked.
    """
    state = _Designations()
    largest = -1
    for stage in sorted({entry.stage for entry in log.entries}):
        for entry in log.entries:
            if entry.stage != stage:
                continue
            state.apply(entry)
            if entry.kind == LogKind.ATTEND:
                largest = max(largest, entry.args[0])
        if largest <= 2:
            continue
        limit = largest**3
        blocked = sum(1 for x in state.blocked.values() if x < limit)
        designated = sum(1 for c in state.designated if c < limit)
        if blocked > largest**2 or designated > largest**2:
            return stage, largest
    return None


def build_af(f_family: ApproximationFamily, horizon: Stage) -> Presentation:
    """A_f: the class of <x,0> appears at stage x and has exactly h(x,s) elements at stage s."""
    if f_family.semantics != Semantics.MONOTONE_LIMIT:
        raise SemanticsMismatch(f"Expected a MONOTONE_LIMIT family, got {f_family.semantics.value}")

    builder = PresentationBuilder()
    for s in range(horizon + 1):
        builder.new(s, pair(s, 0))
        for x in range(s + 1):
            class_id = pair(x, 0)
            target = max(1, f_family.at(x, s))
            if target < builder.size(class_id):
                raise InvariantViolation(f"h({x},{s}) = {target} dropped below the current class size")
            # h can rise by several units in one stage; the class catches up
            # within the stage so that its size at s is exactly h(x,s).
            while builder.size(class_id) < target:
                builder.join(s, pair(x, builder.size(class_id)), class_id)
    return builder.build(horizon)


def build_doublejump_coder(
    pi2_family: ApproximationFamily,
    strings: Sequence[str],
    horizon: Stage,
) -> Tuple[Presentation, ConstructionLog]:
    """Code initial segments of a PI2 set into infinite classes.

    Witness <i,j,0> follows string i. It is discarded when a position where
    the string has a 0 shows up in the approximation; otherwise its class is
    kept at the least count of stages at which the string's 1-positions were in.
    """
    if pi2_family.semantics != Semantics.PI2:
        raise SemanticsMismatch(f"Expected a PI2 family, got {pi2_family.semantics.value}")

    builder = PresentationBuilder()
    log = _Logger()
    length = max((len(string) for string in strings), default=0)
    counts = [0] * length
    witness: Dict[int, Element] = {}
    last_row: Dict[int, int] = {}

    for i in range(len(strings)):
        witness[i] = builder.new(0, triple(i, 0, 0))
        last_row[i] = 0
        log.add(0, LogKind.DESIGNATE, i, witness[i])

    for s in range(horizon + 1):
        inside = [bool(pi2_family.at(x, s)) for x in range(length)]
        for x in range(length):
            counts[x] += inside[x]

        for i, string in enumerate(strings[: s + 1]):
            if s > 0 and any(bit == "0" and inside[x] for x, bit in enumerate(string)):
                log.add(s, LogKind.DISCARD, i, witness[i])
                witness[i] = builder.new(s, triple(i, s, 0))
                last_row[i] = 0
                log.add(s, LogKind.DESIGNATE, i, witness[i])

            ones = [counts[x] for x, bit in enumerate(string) if bit == "1"]
            target = max(1, min(ones) if ones else s + 1)
            column = unpair(witness[i])[1]
            j = unpair(column)[0]
            while builder.size(witness[i]) < target:
                last_row[i] = max(last_row[i] + 1, s + 1)
                log.grow(builder, s, triple(i, j, last_row[i]), witness[i])

    return builder.build(horizon), log.build()


def _designations(log: ConstructionLog) -> List[Tuple[Stage, int, Element]]:
    return [(entry.stage, entry.args[0], entry.args[1]) for entry in log.of_kind(LogKind.DESIGNATE)]


def surviving_witnesses(pres: Presentation, log: ConstructionLog, horizon: Stage) -> List[Tuple[int, Element]]:
    """(string index, witness) pairs designated by horizon/2, never discarded, still growing."""
    discarded = {entry.args[1] for entry in log.of_kind(LogKind.DISCARD) if entry.stage <= horizon}
    survivors = []
    for stage, i, element in _designations(log):
        if stage > horizon // 2 or element in discarded:
            continue
        if inf_guess(pres, element, horizon):
            survivors.append((i, element))
    return sorted(survivors)


def decode_transversal(
    pres: Presentation,
    log: ConstructionLog,
    horizon: Stage,
    x: int,
    strings: Optional[Sequence[str]] = None,
) -> int:
    """Bit for "x is in the double jump", read off the least surviving witness long enough."""

    def string(i: int) -> str:
        return strings[i] if strings is not None else string_at(i)

    for i, element in surviving_witnesses(pres, log, horizon):
        if len(string(i)) > x:
            logger.debug("Decoding bit %d from witness %d of string '%s'", x, element, string(i))
            return 1 - int(string(i)[x])
    raise NoSurvivingWitness(f"No surviving witness codes a string longer than {x}")
