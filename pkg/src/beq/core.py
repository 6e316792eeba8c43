"""Finite equivalence structures and their stage-by-stage presentations."""
import logging
from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple

from .error import InvariantViolation, UnknownElement
from .pairing import pair, quadruple, triple, unpair  # noqa: F401  (re-exported)
from .types import INFINITE, UNBOUNDED, ClassId, Count, Element, Infinity, Stage

logger = logging.getLogger(__name__)

Census = Counter


@dataclass(frozen=True)
class Snapshot:
    """A finite partition, stored as class id -> members."""

    classes: Mapping[ClassId, FrozenSet[Element]] = field(default_factory=dict)
    _owner: Dict[Element, ClassId] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        owner: Dict[Element, ClassId] = {}
        for class_id, members in self.classes.items():
            if not members:
                raise InvariantViolation(f"Class {class_id} is empty")
            if class_id not in members:
                raise InvariantViolation(f"Class id {class_id} is not a member of its own class")
            for element in members:
                if element in owner:
                    raise InvariantViolation(f"Element {element} lies in classes {owner[element]} and {class_id}")
                owner[element] = class_id
        object.__setattr__(self, "classes", {k: frozenset(v) for k, v in sorted(self.classes.items())})
        object.__setattr__(self, "_owner", owner)

    @classmethod
    def from_classes(cls, classes: Iterable[Iterable[Element]]) -> "Snapshot":
        """Build a snapshot whose class ids are the least members."""
        result: Dict[ClassId, FrozenSet[Element]] = {}
        for members in classes:
            frozen = frozenset(members)
            if not frozen:
                raise InvariantViolation("Class is empty")
            result[min(frozen)] = frozen
        return cls(result)

    @property
    def universe(self) -> FrozenSet[Element]:
        return frozenset(self._owner)

    def __len__(self):
        return len(self._owner)

    def __contains__(self, element: object) -> bool:
        return element in self._owner

    def class_of(self, element: Element) -> ClassId:
        if element not in self._owner:
            raise UnknownElement(f"Element {element} is not in the snapshot")
        return self._owner[element]

    def members(self, class_id: ClassId) -> FrozenSet[Element]:
        return self.classes[class_id]

    def size_of(self, element: Element) -> int:
        return len(self.classes[self.class_of(element)])

    def equivalent(self, a: Element, b: Element) -> bool:
        return self.class_of(a) == self.class_of(b)

    def sizes(self) -> List[int]:
        return [len(members) for members in self.classes.values()]


class EventKind(Enum):
    NEW = "new"
    JOIN = "join"


@dataclass(frozen=True)
class Event:
    stage: Stage
    kind: EventKind
    element: Element
    class_id: ClassId

    def __str__(self):
        if self.kind == EventKind.NEW:
            return f"s={self.stage} new {self.element}"
        return f"s={self.stage} join {self.element} -> {self.class_id}"


@dataclass(frozen=True)
class Presentation:
    """A monotone stage sequence of snapshots, kept as its event trace.

    Class ids are founding elements, so they never change. The trace is
    indexed on construction; `snapshot_at` answers from the index and
    `replay` rebuilds from the raw events.
    """

    horizon: Stage
    trace: Tuple[Event, ...] = ()
    _stage_of: Dict[Element, Stage] = field(init=False, repr=False, compare=False)
    _class_of: Dict[Element, ClassId] = field(init=False, repr=False, compare=False)
    _joins: Dict[ClassId, List[Stage]] = field(init=False, repr=False, compare=False)
    _members: Dict[ClassId, List[Element]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.horizon < 0:
            raise InvariantViolation(f"Negative horizon {self.horizon}")
        object.__setattr__(self, "trace", tuple(self.trace))

        stage_of: Dict[Element, Stage] = {}
        class_of: Dict[Element, ClassId] = {}
        joins: Dict[ClassId, List[Stage]] = {}
        members: Dict[ClassId, List[Element]] = {}
        last_stage = 0

        for event in self.trace:
            if event.stage < last_stage or event.stage > self.horizon:
                raise InvariantViolation(f"Event '{event}' is out of stage order (horizon {self.horizon})")
            last_stage = event.stage
            if event.element in stage_of:
                raise InvariantViolation(f"Element {event.element} added twice, again at stage {event.stage}")

            if event.kind == EventKind.NEW:
                if event.class_id != event.element:
                    raise InvariantViolation(f"New element {event.element} must found its own class")
                joins[event.element] = []
                members[event.element] = []
            elif event.class_id not in joins:
                raise InvariantViolation(f"Element {event.element} joins unknown class {event.class_id} at stage {event.stage}")
            else:
                joins[event.class_id].append(event.stage)

            stage_of[event.element] = event.stage
            class_of[event.element] = event.class_id
            members[event.class_id].append(event.element)

        object.__setattr__(self, "_stage_of", stage_of)
        object.__setattr__(self, "_class_of", class_of)
        object.__setattr__(self, "_joins", joins)
        object.__setattr__(self, "_members", members)

    @classmethod
    def empty(cls, horizon: Stage = 0) -> "Presentation":
        return cls(horizon)

    def _require(self, element: Element, stage: Stage) -> ClassId:
        if self._stage_of.get(element, stage + 1) > stage:
            raise UnknownElement(f"Element {element} is not in the universe at stage {stage}")
        return self._class_of[element]

    def class_ids(self) -> List[ClassId]:
        return sorted(self._joins)

    def stage_of(self, element: Element) -> Stage:
        if element not in self._stage_of:
            raise UnknownElement(f"Element {element} never appears")
        return self._stage_of[element]

    def class_of(self, element: Element, stage: Optional[Stage] = None) -> ClassId:
        return self._require(element, self.horizon if stage is None else stage)

    def founded_at(self, class_id: ClassId) -> Stage:
        return self.stage_of(class_id)

    def growth_stages(self, class_id: ClassId) -> List[Stage]:
        """Stages of the join events of a class, ascending."""
        return list(self._joins[class_id])

    def class_size(self, class_id: ClassId, stage: Stage) -> int:
        if class_id not in self._joins or self._stage_of[class_id] > stage:
            return 0
        return 1 + bisect_right(self._joins[class_id], stage)

    def grew_between(self, class_id: ClassId, start: Stage, end: Stage) -> bool:
        """True when the class gained an element at some stage in (start, end]."""
        stages = self._joins[class_id]
        return bisect_right(stages, end) > bisect_right(stages, start)

    def members_at(self, class_id: ClassId, stage: Stage) -> List[Element]:
        """Members in order of arrival."""
        return [elem for elem in self._members.get(class_id, []) if self._stage_of[elem] <= stage]

    def events_at(self, stage: Stage) -> List[Event]:
        stages = [event.stage for event in self.trace]
        return list(self.trace[bisect_left(stages, stage) : bisect_right(stages, stage)])

    def snapshot_at(self, stage: Stage) -> Snapshot:
        """Snapshot at a stage; stages past the horizon give the final snapshot."""
        stage = min(stage, self.horizon)
        classes: Dict[ClassId, FrozenSet[Element]] = {}
        for class_id, elements in self._members.items():
            if self._stage_of[class_id] <= stage:
                classes[class_id] = frozenset(e for e in elements if self._stage_of[e] <= stage)
        return Snapshot(classes)

    def replay(self, stage: Stage) -> Snapshot:
        """Rebuild the snapshot at a stage from the raw trace prefix."""
        classes: Dict[ClassId, Set[Element]] = {}
        for event in self.trace:
            if event.stage > stage:
                break
            if event.kind == EventKind.NEW:
                classes[event.element] = {event.element}
            else:
                classes[event.class_id].add(event.element)
        return Snapshot({k: frozenset(v) for k, v in classes.items()})

    def final(self) -> Snapshot:
        return self.snapshot_at(self.horizon)


class PresentationBuilder:
    """Event-sourced writer used by every construction."""

    def __init__(self):
        self.events: List[Event] = []
        self.stage: Stage = 0
        self._class_of: Dict[Element, ClassId] = {}
        self._sizes: Dict[ClassId, int] = {}
        self.max_element: int = -1

    def __contains__(self, element: object) -> bool:
        return element in self._class_of

    def _advance(self, stage: Stage, element: Element):
        if stage < self.stage:
            raise InvariantViolation(f"Stage {stage} is before the current stage {self.stage}")
        if element < 0:
            raise InvariantViolation(f"Negative element {element}")
        if element in self._class_of:
            raise InvariantViolation(f"Element {element} is not fresh at stage {stage}")
        self.stage = stage
        self.max_element = max(self.max_element, element)

    def new(self, stage: Stage, element: Element) -> ClassId:
        self._advance(stage, element)
        self.events.append(Event(stage, EventKind.NEW, element, element))
        self._class_of[element] = element
        self._sizes[element] = 1
        return element

    def join(self, stage: Stage, element: Element, class_id: ClassId):
        if class_id not in self._sizes:
            raise InvariantViolation(f"Element {element} cannot join unknown class {class_id}")
        self._advance(stage, element)
        self.events.append(Event(stage, EventKind.JOIN, element, class_id))
        self._class_of[element] = class_id
        self._sizes[class_id] += 1

    def class_of(self, element: Element) -> ClassId:
        return self._class_of[element]

    def members(self, class_id: ClassId) -> FrozenSet[Element]:
        return frozenset(elem for elem, owner in self._class_of.items() if owner == class_id)

    def size(self, class_id: ClassId) -> int:
        return self._sizes.get(class_id, 0)

    def class_ids(self) -> List[ClassId]:
        return sorted(self._sizes)

    def build(self, horizon: Stage) -> Presentation:
        return Presentation(horizon, tuple(self.events))


@dataclass(frozen=True)
class CharacterProfile:
    """Declared character: bound, infinite-class count and size multiplicities up to a cutoff."""

    bound: Count
    infinite_class_count: Count
    tail_multiplicities: Mapping[int, Count] = field(default_factory=dict)
    cutoff: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tail_multiplicities", dict(sorted(self.tail_multiplicities.items())))
        if isinstance(self.bound, int):
            for size, count in self.tail_multiplicities.items():
                if size > self.bound and count != 0:
                    raise InvariantViolation(f"Profile with bound {self.bound} lists {count} classes of size {size}")

    @property
    def is_bounded(self) -> bool:
        return self.bound != UNBOUNDED

    @property
    def finitely_many_infinite(self) -> bool:
        return self.infinite_class_count != INFINITE

    def multiplicity(self, size: int) -> Count:
        return self.tail_multiplicities.get(size, 0)


def census(snap: Snapshot) -> Census:
    """Multiset of class sizes."""
    return Counter(snap.sizes())


def format_census(sizes: Census) -> str:
    return "{" + ",".join(str(size) for size in sorted(sizes.elements())) + "}"


def canonical_transversal(snap: Snapshot) -> List[Element]:
    """The least element of every class, ascending."""
    return sorted(min(members) for members in snap.classes.values())


def size_at_least(pres: Presentation, a: Element, k: int, s: Stage) -> bool:
    return pres.class_size(pres.class_of(a, s), s) >= k


def inf_guess(pres: Presentation, a: Element, s: Stage) -> bool:
    """Guess whether the class of a is infinite: it grew in (s//2, s]."""
    return pres.grew_between(pres.class_of(a, s), s // 2, s)


def restrict_above(snap: Snapshot, l: int) -> Snapshot:
    return Snapshot({k: v for k, v in snap.classes.items() if len(v) > l})


def direct_sum(p: Presentation, q: Presentation) -> Presentation:
    """Interleave p on even ids and q on odd ids."""

    def relabel(event: Event, offset: int) -> Event:
        return Event(event.stage, event.kind, 2 * event.element + offset, 2 * event.class_id + offset)

    events = [(e.stage, 0, n, relabel(e, 0)) for n, e in enumerate(p.trace)]
    events += [(e.stage, 1, n, relabel(e, 1)) for n, e in enumerate(q.trace)]
    events.sort(key=lambda item: item[:3])
    return Presentation(max(p.horizon, q.horizon), tuple(item[3] for item in events))


def check_monotone(pres: Presentation):
    """Replay every stage and check universe/relation monotonicity and no merging."""
    previous = pres.replay(0)
    if previous != pres.snapshot_at(0):
        raise InvariantViolation("Replay and index disagree at stage 0")

    for stage in range(1, pres.horizon + 1):
        current = pres.replay(stage)
        if current != pres.snapshot_at(stage):
            raise InvariantViolation(f"Replay and index disagree at stage {stage}")

        seen: Dict[ClassId, ClassId] = {}
        for class_id, members in previous.classes.items():
            for element in members:
                if element not in current:
                    raise InvariantViolation(f"Element {element} vanished at stage {stage}")
                target = current.class_of(element)
                if seen.setdefault(class_id, target) != target:
                    raise InvariantViolation(f"Class of {element} split at stage {stage}")
        targets = list(seen.values())
        if len(targets) != len(set(targets)):
            merged = [target for target, n in Counter(targets).items() if n > 1]
            raise InvariantViolation(f"Classes merged into {merged[0]} at stage {stage}")
        previous = current
    logger.debug("Monotonicity suite passed for %d stages", pres.horizon + 1)


def check_profile(pres: Presentation, profile: CharacterProfile):
    """At most the declared number of classes may ever exceed the declared bound."""
    if not profile.is_bounded or not profile.finitely_many_infinite:
        return
    final = pres.final()
    over = [class_id for class_id, members in final.classes.items() if len(members) > profile.bound]
    if len(over) > profile.infinite_class_count:
        raise InvariantViolation(
            f"{len(over)} classes exceed bound {profile.bound} but only {profile.infinite_class_count} are declared infinite"
            f" (first: {over[0]})"
        )


def _judged_infinite(pres: Presentation, s: Stage) -> Tuple[List[ClassId], List[ClassId]]:
    window = s // 2
    infinite: List[ClassId] = []
    finite: List[ClassId] = []
    for class_id in pres.class_ids():
        founded = pres.founded_at(class_id)
        if founded > s:
            continue
        if founded <= window and pres.grew_between(class_id, window, s):
            infinite.append(class_id)
        else:
            finite.append(class_id)
    return infinite, finite


def observe_profile(pres: Presentation, s: Stage, cutoff: int) -> CharacterProfile:
    """Read a character profile off a presentation at stage s, using the halving window."""
    window = s // 2
    infinite_now, finite_now = _judged_infinite(pres, s)
    infinite_then, finite_then = _judged_infinite(pres, window)

    def sizes(classes: List[ClassId], stage: Stage) -> Counter:
        return Counter(pres.class_size(class_id, stage) for class_id in classes)

    now, then = sizes(finite_now, s), sizes(finite_then, window)
    largest_now = max(now, default=0)
    largest_then = max(then, default=0)
    bound: Count = UNBOUNDED if s > 0 and largest_now > largest_then else largest_now

    tail: Dict[int, Count] = {}
    for size in range(1, cutoff + 1):
        if s > 0 and now[size] > then[size]:
            tail[size] = INFINITE
        elif now[size]:
            tail[size] = now[size]
    if bound != UNBOUNDED:
        tail = {size: count for size, count in tail.items() if size <= bound}

    count: Count = INFINITE if s > 0 and len(infinite_now) > len(infinite_then) else len(infinite_now)
    return CharacterProfile(bound, count, tail, cutoff)


def largest_infinite_multiplicity(profile: CharacterProfile) -> int:
    """Largest size with infinitely many classes, or 0 when there is none."""
    sizes = [size for size, count in profile.tail_multiplicities.items() if count == INFINITE]
    return max(sizes, default=0)


__all__ = [
    "Census",
    "CharacterProfile",
    "Event",
    "EventKind",
    "Infinity",
    "Presentation",
    "PresentationBuilder",
    "Snapshot",
    "canonical_transversal",
    "census",
    "check_monotone",
    "check_profile",
    "direct_sum",
    "format_census",
    "inf_guess",
    "largest_infinite_multiplicity",
    "observe_profile",
    "pair",
    "quadruple",
    "restrict_above",
    "size_at_least",
    "triple",
    "unpair",
]
