"""Embedding synthesis and verification."""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Set, Tuple

from .approx import ApproximationFamily, Semantics
from .core import CharacterProfile, Event, Presentation, Snapshot, inf_guess, largest_infinite_multiplicity
from .error import DanglingElement, ExhaustedClasses, ProfileMismatch, SeedMismatch, SemanticsMismatch
from .types import ClassId, Element, Stage

logger = logging.getLogger(__name__)

ORACLE_CUTOFF = 8

History = Tuple[Tuple[Stage, Optional[Element]], ...]


@dataclass(frozen=True)
class PartialMap:
    pairs: Mapping[Element, Element]
    source: Snapshot
    target: Snapshot

    def __post_init__(self):
        object.__setattr__(self, "pairs", dict(sorted(self.pairs.items())))

    def __len__(self):
        return len(self.pairs)

    def __getitem__(self, element: Element) -> Element:
        return self.pairs[element]

    def __contains__(self, element: object) -> bool:
        return element in self.pairs


def verify_partial_embedding(m: PartialMap) -> bool:
    """Injective and bi-congruent: x E y iff m(x) E m(y)."""
    for src, dst in m.pairs.items():
        if src not in m.source:
            raise DanglingElement(f"Source element {src} is not in the source snapshot")
        if dst not in m.target:
            raise DanglingElement(f"Target element {dst} is not in the target snapshot")

    if len(set(m.pairs.values())) != len(m.pairs):
        return False

    # Bi-congruence holds exactly when mapped classes correspond one to one.
    forward: Dict[ClassId, ClassId] = {}
    backward: Dict[ClassId, ClassId] = {}
    for src, dst in m.pairs.items():
        a, b = m.source.class_of(src), m.target.class_of(dst)
        if forward.setdefault(a, b) != b or backward.setdefault(b, a) != a:
            return False
    return True


def finite_embeds(a: Snapshot, b: Snapshot) -> bool:
    """Descending class sizes of a are dominated by those of b."""
    sizes_a = sorted(a.sizes(), reverse=True)
    sizes_b = sorted(b.sizes(), reverse=True)
    if len(sizes_a) > len(sizes_b):
        return False
    return all(x <= y for x, y in zip(sizes_a, sizes_b))


def brute_force_embeddings(a: Snapshot, b: Snapshot) -> Iterator[Dict[Element, Element]]:
    """Every injective bi-congruent map from the universe of a into b."""
    sources = sorted(a.universe)
    targets = sorted(b.universe)
    mapping: Dict[Element, Element] = {}
    used: Set[Element] = set()

    def fits(src: Element, dst: Element) -> bool:
        return all(a.equivalent(src, x) == b.equivalent(dst, y) for x, y in mapping.items())

    def search(position: int) -> Iterator[Dict[Element, Element]]:
        if position == len(sources):
            yield dict(mapping)
            return
        src = sources[position]
        for dst in targets:
            if dst in used or not fits(src, dst):
                continue
            mapping[src] = dst
            used.add(dst)
            yield from search(position + 1)
            del mapping[src]
            used.discard(dst)

    yield from search(0)


def brute_force_embeds(a: Snapshot, b: Snapshot) -> bool:
    return next(brute_force_embeddings(a, b), None) is not None


def class_assignments(a: Snapshot, b: Snapshot) -> Iterator[Dict[ClassId, ClassId]]:
    """Class-level assignments induced by some embedding of a into b."""
    sources = sorted(a.classes)
    targets = sorted(b.classes)
    assignment: Dict[ClassId, ClassId] = {}
    used: Set[ClassId] = set()

    def search(position: int) -> Iterator[Dict[ClassId, ClassId]]:
        if position == len(sources):
            yield dict(assignment)
            return
        src = sources[position]
        for dst in targets:
            if dst in used or len(b.classes[dst]) < len(a.classes[src]):
                continue
            assignment[src] = dst
            used.add(dst)
            yield from search(position + 1)
            del assignment[src]
            used.discard(dst)

    yield from search(0)


@dataclass(frozen=True)
class StagedMap:
    """Stage approximations of an embedding, kept as per-element image histories.

    A history entry (s, image) means the element maps to image from stage s
    on; None means the element is deferred.
    """

    source: Presentation
    target: Presentation
    horizon: Stage
    history: Mapping[Element, History] = field(default_factory=dict)
    deferrals: Tuple[Tuple[Stage, Element], ...] = ()

    def image(self, element: Element, s: Stage) -> Optional[Element]:
        current = None
        for stage, image in self.history.get(element, ()):
            if stage > s:
                break
            current = image
        return current

    def at(self, s: Stage) -> PartialMap:
        pairs = {}
        for element in self.history:
            image = self.image(element, s)
            if image is not None:
                pairs[element] = image
        return PartialMap(pairs, self.source.snapshot_at(s), self.target.snapshot_at(s))

    def final(self) -> PartialMap:
        return self.at(self.horizon)

    def mind_changes(self) -> Dict[Element, List[Stage]]:
        """Stages at which a defined image was replaced by a different one."""
        changes: Dict[Element, List[Stage]] = {}
        for element, entries in self.history.items():
            previous: Optional[Element] = None
            for stage, image in entries:
                if image is None:
                    continue
                if previous is not None and image != previous:
                    changes.setdefault(element, []).append(stage)
                previous = image
        return changes

    def mind_change_count(self) -> int:
        return sum(len(stages) for stages in self.mind_changes().values())

    def stable_since(self, element: Element) -> Optional[Stage]:
        """Stage since which the element has had its final image."""
        entries = self.history.get(element, ())
        if not entries or entries[-1][1] is None:
            return None
        return entries[-1][0]


class _Recorder:
    def __init__(self):
        self.history: Dict[Element, List[Tuple[Stage, Optional[Element]]]] = {}
        self.deferrals: List[Tuple[Stage, Element]] = []

    def record(self, stage: Stage, element: Element, image: Optional[Element]):
        entries = self.history.setdefault(element, [])
        if entries and entries[-1][1] == image:
            return
        if not entries and image is None:
            entries.append((stage, None))
            return
        if entries and entries[-1][1] is not None and image is not None:
            logger.debug("s=%d mind change for %d: %d -> %d", stage, element, entries[-1][1], image)
        entries.append((stage, image))

    def defer(self, stage: Stage, element: Element):
        self.deferrals.append((stage, element))
        self.record(stage, element, None)

    def build(self, source: Presentation, target: Presentation, horizon: Stage) -> StagedMap:
        history = {element: tuple(entries) for element, entries in sorted(self.history.items())}
        return StagedMap(source, target, horizon, history, tuple(self.deferrals))


def _least_unused(members: List[Element], used: Set[Element]) -> Optional[Element]:
    return min((m for m in members if m not in used), default=None)


def _check_seed(seed: Mapping[ClassId, ClassId], presA: Presentation, presB: Presentation, horizon: Stage):
    if len(set(seed.values())) != len(seed):
        raise SeedMismatch("Seed is not injective")
    final_a, final_b = presA.snapshot_at(horizon), presB.snapshot_at(horizon)
    for src, dst in seed.items():
        if src not in final_a.classes:
            raise SeedMismatch(f"Seed source {src} is not a class of the source at stage {horizon}")
        if dst not in final_b.classes:
            raise SeedMismatch(f"Seed target {dst} is not a class of the target at stage {horizon}")


def embed_bounded(
    presA: Presentation,
    presB: Presentation,
    profileA: CharacterProfile,
    profileB: CharacterProfile,
    iso_seed: Mapping[ClassId, ClassId],
    horizon: Stage,
) -> StagedMap:
    """Computable embedding of a bounded structure with finitely many infinite classes.

    Classes of size above l go through the seed isomorphism; every other new
    class takes the next target class outside the seed that has reached size
    l; later members take the least unused element of their image class.
    Images at stage s are drawn from the target's stage-s snapshot, and an
    element without one waits for a later stage.
    """
    for name, profile in (("source", profileA), ("target", profileB)):
        if not profile.is_bounded or not profile.finitely_many_infinite:
            raise ProfileMismatch(f"The {name} profile must be bounded with finitely many infinite classes")
    l = largest_infinite_multiplicity(profileA)
    if largest_infinite_multiplicity(profileB) != l:
        raise ProfileMismatch(f"Profiles disagree on the largest size with infinitely many classes ({l})")

    _check_seed(iso_seed, presA, presB, horizon)
    final_a, final_b = presA.snapshot_at(horizon), presB.snapshot_at(horizon)

    big_a = {c for c, members in final_a.classes.items() if len(members) > l}
    big_b = {c for c, members in final_b.classes.items() if len(members) > l}
    if big_a != set(iso_seed) or big_b != set(iso_seed.values()):
        raise SeedMismatch(f"Seed does not match the classes above size {l}")
    for src, dst in iso_seed.items():
        size_a, size_b = len(final_a.classes[src]), len(final_b.classes[dst])
        if size_a != size_b and not (inf_guess(presA, src, horizon) and inf_guess(presB, dst, horizon)):
            raise SeedMismatch(f"Seed pairs class {src} (size {size_a}) with class {dst} (size {size_b})")

    recorder = _Recorder()
    image_class: Dict[ClassId, ClassId] = {}
    used: Set[Element] = set()
    small_b: List[ClassId] = []
    listed: Set[ClassId] = set(iso_seed.values())
    next_small = 0
    pending: List[Event] = []

    for s in range(horizon + 1):
        snap_b = presB.snapshot_at(s)
        reached = sorted(c for c, members in snap_b.classes.items() if c not in listed and len(members) >= l)
        small_b.extend(reached)
        listed.update(reached)

        waiting: List[Event] = []
        for event in pending + presA.events_at(s):
            class_id = event.class_id
            if class_id not in image_class:
                if class_id in iso_seed:
                    if iso_seed[class_id] in snap_b.classes:
                        image_class[class_id] = iso_seed[class_id]
                elif next_small < len(small_b):
                    image_class[class_id] = small_b[next_small]
                    next_small += 1
                if class_id in image_class:
                    logger.debug("s=%d class %d -> class %d", s, class_id, image_class[class_id])

            image = None
            if class_id in image_class:
                image = _least_unused(sorted(snap_b.classes[image_class[class_id]]), used)
            if image is None:
                recorder.defer(s, event.element)
                waiting.append(event)
                continue
            used.add(image)
            recorder.record(s, event.element, image)
        pending = waiting

    if pending:
        raise ExhaustedClasses(f"Element {pending[0].element} has no image in the target by stage {horizon}")
    return recorder.build(presA, presB, horizon)


def embed_delta2(
    presA: Presentation,
    presB: Presentation,
    profileA: CharacterProfile,
    profileB: CharacterProfile,
    transversal_seed: Mapping[ClassId, ClassId],
    horizon: Stage,
) -> StagedMap:
    """Limit-computable embedding, recomputed from the stage snapshots at every stage.

    Infinite classes follow the transversal seed. Every other class goes to the
    least unused target class that is at least as large at the current stage.
    """
    if not profileA.finitely_many_infinite or not profileB.finitely_many_infinite:
        raise ProfileMismatch("Both profiles must declare finitely many infinite classes")
    if profileA.infinite_class_count != profileB.infinite_class_count:
        raise ProfileMismatch(
            f"Infinite class counts differ: {profileA.infinite_class_count} and {profileB.infinite_class_count}"
        )
    if len(transversal_seed) != profileA.infinite_class_count:
        raise SeedMismatch(f"Transversal seed has {len(transversal_seed)} pairs, expected {profileA.infinite_class_count}")
    _check_seed(transversal_seed, presA, presB, horizon)

    recorder = _Recorder()
    for s in range(horizon + 1):
        snap_a, snap_b = presA.snapshot_at(s), presB.snapshot_at(s)
        image_class: Dict[ClassId, ClassId] = {}
        taken: Set[ClassId] = set(transversal_seed.values())
        used: Set[Element] = set()

        for event in presA.trace:
            if event.stage > s:
                break
            class_id = event.class_id
            if class_id not in image_class:
                if class_id in transversal_seed:
                    if transversal_seed[class_id] in snap_b.classes:
                        image_class[class_id] = transversal_seed[class_id]
                else:
                    needed = len(snap_a.classes[class_id])
                    target = next((c for c, m in snap_b.classes.items() if c not in taken and len(m) >= needed), None)
                    if target is not None:
                        image_class[class_id] = target
                        taken.add(target)

            image = None
            if class_id in image_class:
                image = _least_unused(sorted(snap_b.classes[image_class[class_id]]), used)
            if image is None:
                logger.debug("s=%d deferring %d", s, event.element)
                recorder.defer(s, event.element)
                continue
            used.add(image)
            recorder.record(s, event.element, image)

    staged = recorder.build(presA, presB, horizon)
    logger.info("delta2 map: %d mind changes, %d deferrals", staged.mind_change_count(), len(staged.deferrals))
    return staged


def embed_delta3(
    presA: Presentation,
    presB: Presentation,
    horizon: Stage,
    inf_family: Optional[ApproximationFamily] = None,
) -> StagedMap:
    """Map every source class into a target class currently believed infinite.

    Beliefs come from `inf_guess` on the target, or from a PI2 family over
    target class ids when one is given. An assignment is withdrawn as soon as
    its belief is.
    """
    if inf_family is not None and inf_family.semantics != Semantics.PI2:
        raise SemanticsMismatch(f"Infinity beliefs need a PI2 family, got {inf_family.semantics.value}")

    def believed(class_id: ClassId, s: Stage) -> bool:
        if inf_family is not None:
            return bool(inf_family.at(class_id, s))
        return inf_guess(presB, class_id, s)

    recorder = _Recorder()
    assignment: Dict[ClassId, ClassId] = {}

    for s in range(horizon + 1):
        snap_a, snap_b = presA.snapshot_at(s), presB.snapshot_at(s)
        beliefs = [c for c in snap_b.classes if believed(c, s)]

        for class_id, target in list(assignment.items()):
            if target not in beliefs:
                logger.debug("s=%d withdrawing class %d from class %d", s, class_id, target)
                del assignment[class_id]

        for class_id in sorted(snap_a.classes, key=lambda c: (presA.founded_at(c), c)):
            if class_id in assignment:
                continue
            taken = set(assignment.values())
            target = next((c for c in beliefs if c not in taken), None)
            if target is None:
                continue
            assignment[class_id] = target

        for class_id in snap_a.classes:
            members = presA.members_at(class_id, s)
            images: List[Element] = presB.members_at(assignment[class_id], s) if class_id in assignment else []
            for position, element in enumerate(members):
                if position < len(images):
                    recorder.record(s, element, images[position])
                else:
                    recorder.defer(s, element)

    staged = recorder.build(presA, presB, horizon)
    logger.info("delta3 map: %d mind changes, %d deferrals", staged.mind_change_count(), len(staged.deferrals))
    return staged


def size_monotone(staged: StagedMap) -> bool:
    """Every mapped element lands in a class at least as large as its own, at the horizon."""
    final = staged.final()
    return all(final.target.size_of(dst) >= final.source.size_of(src) for src, dst in final.pairs.items())


__all__ = [
    "ORACLE_CUTOFF",
    "PartialMap",
    "StagedMap",
    "brute_force_embeddings",
    "brute_force_embeds",
    "class_assignments",
    "embed_bounded",
    "embed_delta2",
    "embed_delta3",
    "finite_embeds",
    "size_monotone",
    "verify_partial_embedding",
]
