"""Test the degree classifier, the bi-embeddability test and the reductions."""
from collections import Counter

import pytest

from beq.adversary import canonical_triangular
from beq.approx import ApproximationFamily, From, Never, Semantics
from beq.core import CharacterProfile, Presentation, census, check_monotone, observe_profile
from beq.error import MissingParameter, NormalizationViolation, OutsideClass, SemanticsMismatch
from beq.indexsets import (
    Degree,
    ReductionInput,
    ReductionKind,
    biemb_test_cbec,
    check_normalized,
    classify_becat,
    reduce,
    reduce_d01,
    reduce_d03,
    reduce_pi02,
    reduce_pi02_inf,
    reduce_pi04,
    reduce_sigma02,
    reduce_sigma04,
)
from beq.tests.cases import ClassifyCase, ReductionCase, classify_cases, parse, reduction_cases
from beq.types import INFINITE, UNBOUNDED


@pytest.mark.parametrize("case", classify_cases)
def test_classify(case: ClassifyCase):
    assert classify_becat(case.profile) == case.degree


def test_degree_names():
    assert [degree.value for degree in Degree] == ["0", "0'", "0''"]


@pytest.mark.parametrize(
    "pa,pb,expected",
    [
        (CharacterProfile(3, 0, {1: INFINITE, 3: 2}, 3), CharacterProfile(3, 0, {1: INFINITE, 3: 2}, 3), True),
        (CharacterProfile(2, 0, {1: INFINITE, 2: 3}, 2), CharacterProfile(2, 0, {1: INFINITE, 2: 4}, 2), False),
        (CharacterProfile(2, 0, {2: INFINITE, 1: 5}, 2), CharacterProfile(2, 0, {2: INFINITE, 1: 7}, 2), True),
        (CharacterProfile(2, 1, {2: INFINITE}, 2), CharacterProfile(2, 2, {2: INFINITE}, 2), False),
        (CharacterProfile(2, 0, {2: INFINITE}, 2), CharacterProfile(3, 0, {2: INFINITE}, 2), False),
        (CharacterProfile(2, 0, {1: 3}, 2), CharacterProfile(2, 0, {1: 4}, 2), False),
    ],
)
def test_biemb(pa: CharacterProfile, pb: CharacterProfile, expected: bool):
    assert biemb_test_cbec(pa, pb) == expected


@pytest.mark.parametrize("pa", [CharacterProfile(UNBOUNDED, 0), CharacterProfile(3, INFINITE)])
def test_biemb_outside_class(pa: CharacterProfile):
    with pytest.raises(OutsideClass):
        biemb_test_cbec(pa, pa)


def sigma1(horizon: int, rules) -> ApproximationFamily:
    return ApproximationFamily.from_schedules(Semantics.SIGMA1, horizon, rules)


def test_reduction_input_checks():
    with pytest.raises(MissingParameter):
        ReductionInput(ReductionKind.PI02, family=sigma1(4, {}), base=Presentation.empty())
    with pytest.raises(MissingParameter):
        ReductionInput(ReductionKind.PI04)
    with pytest.raises(SemanticsMismatch):
        ReductionInput(
            ReductionKind.SIGMA02,
            family=ApproximationFamily.from_schedules(Semantics.SIGMA2, 4, {0: From(1)}),
        )


@pytest.mark.parametrize(
    "rules,sizes",
    [
        ({0: From(3), 1: Never()}, {2: 1}),
        ({0: From(3), 1: From(4)}, {2: 1, 3: 1}),
        ({0: Never(), 1: Never()}, {}),
    ],
)
def test_d01(rules, sizes):
    family = sigma1(6, rules)
    pres = reduce(ReductionInput(ReductionKind.D01, family=family, n=2, base=Presentation.empty()), 6)
    assert census(pres.final()) == Counter(sizes)
    assert census(reduce_d01(family.restrict(0), family.restrict(1), 2, Presentation.empty(), 6).final()) == Counter(sizes)


def test_d01_firings_at_neighbouring_stages():
    e_sched = sigma1(8, {0: From(3), 1: From(4), 2: From(5)})
    pres = reduce_d01(e_sched, sigma1(8, {3: From(4)}), 3, Presentation.empty(), 8)
    assert census(pres.final()) == Counter({3: 3, 4: 1})
    check_monotone(pres)


def test_d01_keeps_base():
    pres = reduce_d01(sigma1(4, {}), sigma1(4, {}), 2, canonical_triangular(2), 4)
    assert census(pres.final()) == Counter({1: 1, 2: 1, 3: 1})


def test_pi02():
    family = sigma1(5, {0: From(2), 1: From(4)})
    assert census(reduce_pi02(family, 2, Presentation.empty(), 5).final()) == Counter({2: 2})
    assert census(reduce_pi02_inf(family, Presentation.empty(), 5).final()) == Counter({2: 1})


def test_sigma02():
    family = sigma1(4, {2: From(3)})
    expected = Counter({1: 5, 3: 1})
    assert census(reduce_sigma02(family, 4).final()) == expected
    assert census(reduce(ReductionInput(ReductionKind.SIGMA02, family=family), 4).final()) == expected


@pytest.mark.parametrize(
    "r,t,sizes",
    [
        ("0", "0", {1: 6, 2: 1, 3: 1, 4: 1, 5: 1}),
        ("0", "1", {1: 5, 2: 2, 3: 1, 4: 1, 5: 1}),
    ],
)
def test_d03(r: str, t: str, sizes):
    pres = reduce_d03(parse(r), parse(t), 1, 4)
    assert census(pres.final()) == Counter(sizes)
    inp = ReductionInput(ReductionKind.D03, predicates={"r": parse(r), "t": parse(t)}, k=1)
    assert reduce(inp, 4).final() == pres.final()


def test_d03_parallel_classes():
    pres = reduce_d03(parse("0"), parse("1"), 2, 4)
    assert census(pres.final()) == Counter({1: 9, 2: 3, 3: 1, 4: 1, 5: 1})


@pytest.mark.parametrize(
    "predicate,sizes",
    [
        ("x = 0 & y = 0", {9: 1, 1: 8}),
        ("0", {1: 9}),
        ("y = 0", {9: 3, 1: 6}),
    ],
)
def test_pi04(predicate: str, sizes):
    assert census(reduce_pi04(parse(predicate), 2).final()) == Counter(sizes)


@pytest.mark.parametrize(
    "predicate,message",
    [
        ("u = 1", "Row 0, column 0: u = 0 has no witness by stage 1 while u = 1 has one"),
        ("1", "Row 0 has growing columns [0, 1] at stage 1"),
        ("x = 1 & y = 0", "Row 1 grows at stage 1 while row 0 does not"),
    ],
)
def test_pi04_needs_normalized_predicate(predicate: str, message: str):
    with pytest.raises(NormalizationViolation) as e:
        check_normalized(parse(predicate), 2)
    assert str(e.value) == message
    with pytest.raises(NormalizationViolation):
        reduce(ReductionInput(ReductionKind.PI04, predicates={"s": parse(predicate)}), 2)


@pytest.mark.parametrize("predicate", ["y = 0", "y = 1", "x = 0 & y = 0", "x < 2 & y = x", "0"])
def test_pi04_accepts_normalized_predicate(predicate: str):
    check_normalized(parse(predicate), 4)


def test_sigma04():
    pres = reduce_sigma04(parse("0"), canonical_triangular(2), 2)
    assert census(pres.final()) == Counter({1: 10, 2: 1, 3: 1})


@pytest.mark.parametrize("case", reduction_cases, ids=lambda case: case.name)
def test_reduction_profiles(case: ReductionCase):
    pres = reduce(case.inp, case.horizon)
    check_monotone(pres)
    profile = observe_profile(pres, case.horizon, case.cutoff)
    assert classify_becat(profile) == case.degree
    if case.target is not None:
        assert biemb_test_cbec(case.target, profile) == case.matches
    if case.infinite is not None:
        assert profile.infinite_class_count == case.infinite
