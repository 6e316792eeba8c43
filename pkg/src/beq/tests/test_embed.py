"""Test embedding verification, the finite oracle and the staged embedding algorithms."""
from itertools import product
from typing import Iterator, List

import pytest

from beq.adversary import canonical_triangular
from beq.approx import Always, ApproximationFamily, Never, Semantics
from beq.core import CharacterProfile, PresentationBuilder, Snapshot
from beq.embed import (
    PartialMap,
    StagedMap,
    brute_force_embeddings,
    brute_force_embeds,
    class_assignments,
    embed_bounded,
    embed_delta2,
    embed_delta3,
    finite_embeds,
    size_monotone,
    verify_partial_embedding,
)
from beq.error import DanglingElement, ExhaustedClasses, ProfileMismatch, SeedMismatch, SemanticsMismatch
from beq.tests.cases import (
    EmbeddingCase,
    bounded_cases,
    delta2_cases,
    growing_classes,
    growing_with_singletons,
    singletons,
)
from beq.types import INFINITE, UNBOUNDED

SOURCE = Snapshot.from_classes([[0, 1], [2]])
TARGET = Snapshot.from_classes([[10, 11, 12], [13]])


@pytest.mark.parametrize(
    "pairs,expected",
    [
        ({0: 10, 1: 11, 2: 13}, True),
        ({0: 10, 1: 13}, False),
        ({0: 10, 2: 11}, False),
        ({0: 10, 1: 10}, False),
        ({2: 10}, True),
        ({}, True),
    ],
)
def test_verify_partial_embedding(pairs, expected: bool):
    assert verify_partial_embedding(PartialMap(pairs, SOURCE, TARGET)) == expected


def test_dangling_element():
    with pytest.raises(DanglingElement):
        verify_partial_embedding(PartialMap({0: 99}, SOURCE, TARGET))
    with pytest.raises(DanglingElement):
        verify_partial_embedding(PartialMap({5: 10}, SOURCE, TARGET))


def partitions(elements: List[int]) -> Iterator[List[List[int]]]:
    if not elements:
        yield []
        return
    first, rest = elements[0], elements[1:]
    for partition in partitions(rest):
        yield [[first]] + partition
        for i, block in enumerate(partition):
            yield partition[:i] + [[first] + block] + partition[i + 1 :]


def small_snapshots(offset: int) -> List[Snapshot]:
    return [
        Snapshot.from_classes([[offset + e for e in block] for block in partition])
        for n in range(5)
        for partition in partitions(list(range(n)))
    ]


def test_finite_embeds_agrees_with_search():
    for a, b in product(small_snapshots(0), small_snapshots(10)):
        assert finite_embeds(a, b) == brute_force_embeds(a, b), (a.classes, b.classes)


def integer_partitions(n: int, largest: int) -> Iterator[List[int]]:
    if n == 0:
        yield []
        return
    for first in range(min(n, largest), 0, -1):
        for rest in integer_partitions(n - first, first):
            yield [first] + rest


def shapes(offset: int) -> List[Snapshot]:
    """One snapshot per multiset of class sizes, up to six elements."""
    snapshots = []
    for n in range(7):
        for sizes in integer_partitions(n, n):
            starts = [offset + sum(sizes[:i]) for i in range(len(sizes))]
            snapshots.append(Snapshot.from_classes([list(range(start, start + size)) for start, size in zip(starts, sizes)]))
    return snapshots


def test_finite_embeds_agrees_with_search_up_to_six():
    assert len(shapes(0)) == 30
    for a, b in product(shapes(0), shapes(10)):
        assert finite_embeds(a, b) == brute_force_embeds(a, b), (a.classes, b.classes)


def test_every_search_result_verifies():
    for embedding in brute_force_embeddings(SOURCE, TARGET):
        assert verify_partial_embedding(PartialMap(embedding, SOURCE, TARGET))


def test_brute_force_embeddings():
    assert len(list(brute_force_embeddings(Snapshot.from_classes([[0]]), Snapshot.from_classes([[0, 1]])))) == 2
    assert not brute_force_embeds(TARGET, SOURCE)
    assert list(class_assignments(SOURCE, TARGET)) == [{0: 10, 2: 13}]


def test_delta2_identity_on_triangular():
    pres = canonical_triangular(3)
    profile = CharacterProfile(UNBOUNDED, 0)
    staged = embed_delta2(pres, pres, profile, profile, {}, 3)
    final = staged.final()
    assert final.pairs == {e: e for e in pres.final().universe}
    assert verify_partial_embedding(final)
    assert staged.mind_change_count() == 0


def test_delta2_changes_its_mind():
    a = PresentationBuilder()
    a.new(0, 0)
    a.join(2, 1, 0)
    b = PresentationBuilder()
    b.new(0, 0)
    b.new(0, 1)
    b.join(1, 2, 1)
    profile = CharacterProfile(UNBOUNDED, 0)

    staged = embed_delta2(a.build(2), b.build(2), profile, profile, {}, 2)
    assert staged.at(1).pairs == {0: 0}
    assert staged.final().pairs == {0: 1, 1: 2}
    assert staged.mind_changes() == {0: [2]}
    assert staged.stable_since(0) == 2
    assert verify_partial_embedding(staged.final())


def test_delta2_rejects_bad_inputs():
    pres = canonical_triangular(2)
    with pytest.raises(ProfileMismatch):
        embed_delta2(pres, pres, CharacterProfile(UNBOUNDED, INFINITE), CharacterProfile(UNBOUNDED, INFINITE), {}, 2)
    with pytest.raises(ProfileMismatch):
        embed_delta2(pres, pres, CharacterProfile(UNBOUNDED, 0), CharacterProfile(UNBOUNDED, 1), {}, 2)
    with pytest.raises(SeedMismatch):
        embed_delta2(pres, pres, CharacterProfile(UNBOUNDED, 1), CharacterProfile(UNBOUNDED, 1), {}, 2)


def test_bounded_singletons():
    profile = CharacterProfile(1, 0, {1: INFINITE}, 1)
    staged = embed_bounded(singletons(5), singletons(5, 10), profile, profile, {}, 5)
    assert staged.final().pairs == {s: 10 + s for s in range(6)}
    assert staged.mind_change_count() == 0


def test_bounded_waits_for_the_target():
    target = PresentationBuilder()
    for i in range(7):
        target.new(3, 100 + i)
    profile = CharacterProfile(1, 0, {1: INFINITE}, 1)
    staged = embed_bounded(singletons(6), target.build(6), profile, profile, {}, 6)

    assert staged.at(0).pairs == {}
    assert staged.at(3).pairs == {0: 100, 1: 101, 2: 102, 3: 103}
    for s in range(7):
        assert verify_partial_embedding(staged.at(s))
    assert staged.final().pairs == {s: 100 + s for s in range(7)}
    assert staged.mind_change_count() == 0
    assert (0, 0) in staged.deferrals


def test_bounded_runs_out_of_target_classes():
    target = PresentationBuilder()
    for i in range(5):
        target.new(3, 100 + i)
    profile = CharacterProfile(1, 0, {1: INFINITE}, 1)
    with pytest.raises(ExhaustedClasses):
        embed_bounded(singletons(6), target.build(6), profile, profile, {}, 6)


def test_bounded_with_seed():
    pres = growing_with_singletons(5)
    profile = CharacterProfile(1, 1, {1: INFINITE}, 1)
    staged = embed_bounded(pres, pres, profile, profile, {0: 0}, 5)
    assert staged.final().pairs == {e: e for e in range(12)}
    assert verify_partial_embedding(staged.final())


def test_bounded_rejects_bad_inputs():
    pres = growing_with_singletons(3)
    profile = CharacterProfile(1, 1, {1: INFINITE}, 1)
    with pytest.raises(ProfileMismatch):
        embed_bounded(pres, pres, CharacterProfile(UNBOUNDED, 1), profile, {0: 0}, 3)
    with pytest.raises(SeedMismatch):
        embed_bounded(pres, pres, profile, profile, {}, 3)


def test_delta3_identity():
    pres = growing_classes(4, 2)
    staged = embed_delta3(pres, pres, 4)
    assert staged.final().pairs == {e: e for e in range(10)}
    assert staged.mind_change_count() == 0
    assert (0, 0) in staged.deferrals
    assert size_monotone(staged)


def test_delta3_with_family():
    pres = growing_classes(4, 2)
    family = ApproximationFamily.from_schedules(Semantics.PI2, 4, {0: Always(), 1: Never()})
    staged = embed_delta3(pres, pres, 4, family)
    assert staged.final().pairs == {e: e for e in (0, 2, 4, 6, 8)}


def test_delta3_needs_pi2_family():
    pres = growing_classes(2, 1)
    family = ApproximationFamily.from_schedules(Semantics.SIGMA2, 2, {0: Always()})
    with pytest.raises(SemanticsMismatch):
        embed_delta3(pres, pres, 2, family)


def test_size_monotone_fails_into_smaller_class():
    source, target = growing_classes(1, 1), singletons(1)
    staged = StagedMap(source, target, 1, {0: ((0, 0),)})
    assert not size_monotone(staged)


def assert_settled(staged: StagedMap, start: int, end: int):
    """Every stage map in [start, end] is a partial embedding agreeing with the one at start."""
    settled = staged.at(start).pairs
    for s in range(start, end + 1):
        m = staged.at(s)
        assert verify_partial_embedding(m)
        assert all(m[element] == image for element, image in settled.items())
    final = staged.final()
    assert set(final.pairs) == set(final.source.universe)


@pytest.mark.parametrize("case", bounded_cases, ids=lambda case: case.name)
def test_bounded_settles(case: EmbeddingCase):
    staged = embed_bounded(case.source, case.target, case.profile_a, case.profile_b, case.seed, 200)
    assert_settled(staged, 100, 200)
    assert staged.mind_change_count() == 0


@pytest.mark.parametrize("case", delta2_cases, ids=lambda case: case.name)
def test_delta2_settles(case: EmbeddingCase):
    staged = embed_delta2(case.source, case.target, case.profile_a, case.profile_b, case.seed, 200)
    assert_settled(staged, 100, 200)
    assert staged.mind_change_count() == case.mind_changes
