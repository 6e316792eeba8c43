"""Read and write the text artifacts: snapshots, traces, maps, logs, profiles and fixtures.

Every writer emits one record per line, sorted where the format is
unordered, so equal values always produce identical bytes.
"""
from pathlib import Path
from typing import Dict, List, Mapping, Sequence, Union

from .adversary import ConstructionLog
from .approx import Always, ApproximationFamily, ClockedProgram, Const, From, Never, Periodic, Ramp, Schedule, Until
from .ast.printer import ExpressionPrinter
from .core import CharacterProfile, Presentation, Snapshot
from .error import FormatError, handler as error_handler
from .indexsets import REQUIRED, ReductionInput, ReductionKind
from .parser import Fixture, MapRecord, Parser
from .tokenizer import Tokenizer
from .types import INFINITE, UNBOUNDED, Count, Element, Stage

PathLike = Union[str, Path]

_printer = ExpressionPrinter()


def _lines(header: str, records: Sequence[str]) -> str:
    return "".join(f"{line}\n" for line in [header, *records])


def _parse(text: str, source: str, rule: str):
    tokens = Tokenizer(text).scan_tokens()
    value = None
    if not error_handler.had_error:
        value = getattr(Parser(tokens), rule)()
    if error_handler.had_error or value is None:
        raise FormatError(list(error_handler.error_report), source)
    return value


def _read(path: PathLike, rule: str):
    with open(Path(path), "r", encoding="utf-8") as f:
        return _parse(f.read(), str(path), rule)


def _write(path: PathLike, text: str):
    with open(Path(path), "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _count(value: Count, infinite: str = "inf") -> str:
    return infinite if value == INFINITE else str(value)


# Snapshots and traces


def format_snapshot(snap: Snapshot) -> str:
    return _lines(
        "SNAPSHOT v1",
        [" ".join([f"class {class_id}:", *(str(e) for e in sorted(members))]) for class_id, members in snap.classes.items()],
    )


def parse_snapshot(text: str, source: str = "<input>") -> Snapshot:
    return _parse(text, source, "snapshot")


def format_trace(pres: Presentation) -> str:
    return _lines(f"TRACE v1 horizon={pres.horizon}", [str(event) for event in pres.trace])


def parse_trace(text: str, source: str = "<input>") -> Presentation:
    return _parse(text, source, "trace")


def read_trace(path: PathLike) -> Presentation:
    return _read(path, "trace")


def write_trace(path: PathLike, pres: Presentation):
    _write(path, format_trace(pres))


# Maps and mind changes


def format_map(pairs: Mapping[Element, Element], stage: Stage) -> str:
    return _lines(f"MAP v1 stage={stage}", [f"-> {src} {dst}" for src, dst in sorted(pairs.items())])


def parse_map(text: str, source: str = "<input>") -> MapRecord:
    return _parse(text, source, "map")


def read_map(path: PathLike) -> MapRecord:
    return _read(path, "map")


def write_map(path: PathLike, pairs: Mapping[Element, Element], stage: Stage):
    _write(path, format_map(pairs, stage))


def format_mind_changes(changes: Mapping[Element, Sequence[Stage]]) -> str:
    return _lines("MC v1", [" ".join([f"{element}:", *(str(s) for s in stages)]) for element, stages in sorted(changes.items())])


def parse_mind_changes(text: str, source: str = "<input>") -> Dict[Element, List[Stage]]:
    return _parse(text, source, "mind_changes")


def write_mind_changes(path: PathLike, changes: Mapping[Element, Sequence[Stage]]):
    _write(path, format_mind_changes(changes))


# Logs and profiles


def format_log(log: ConstructionLog) -> str:
    return _lines("LOG v1", [str(entry) for entry in log.entries])


def parse_log(text: str, source: str = "<input>") -> ConstructionLog:
    return _parse(text, source, "log")


def read_log(path: PathLike) -> ConstructionLog:
    return _read(path, "log")


def write_log(path: PathLike, log: ConstructionLog):
    _write(path, format_log(log))


def format_profile(profile: CharacterProfile) -> str:
    bound = "unbounded" if profile.bound == UNBOUNDED else str(profile.bound)
    header = f"PROFILE v1 bound={bound} infinite={_count(profile.infinite_class_count)} cutoff={profile.cutoff}"
    return _lines(header, [f"size {size} count={_count(count)}" for size, count in profile.tail_multiplicities.items()])


def parse_profile(text: str, source: str = "<input>") -> CharacterProfile:
    return _parse(text, source, "profile")


def read_profile(path: PathLike) -> CharacterProfile:
    return _read(path, "profile")


# Fixtures


def format_schedule(schedule: Schedule) -> str:
    if isinstance(schedule, Always):
        return "always"
    if isinstance(schedule, Never):
        return "never"
    if isinstance(schedule, From):
        return f"from {_printer.print(schedule.start)}"
    if isinstance(schedule, Until):
        return f"until {_printer.print(schedule.end)}"
    if isinstance(schedule, Periodic):
        return f"period {_printer.print(schedule.period)} offset {_printer.print(schedule.offset)} from {_printer.print(schedule.start)}"
    if isinstance(schedule, Const):
        return f"const {_printer.print(schedule.constant)}"
    if isinstance(schedule, Ramp):
        return f"ramp {_printer.print(schedule.ramp)} cap {_printer.print(schedule.cap)}"
    raise TypeError(f"No text form for schedule {schedule!r}")


def format_fixture(fixture: Fixture) -> str:
    family = fixture.family
    if family.function is not None:
        raise TypeError("Computed families have no text form")

    header = f"FAMILY v1 semantics={family.semantics.value} horizon={family.horizon}"
    if family.input_bound is not None:
        header += f" bound={family.input_bound}"

    records = [f"x={x} schedule={format_schedule(schedule)}" for x, schedule in family.rules.items()]
    if family.default is not None:
        records.append(f"x=* schedule={format_schedule(family.default)}")
    records += [f"truth x={x} value={truth.value} stable={truth.stable}" for x, truth in family.truth.items()]

    params = []
    for name in ("n", "k", "base"):
        if name in fixture.params:
            value = fixture.params[name]
            params.append(f'{name}="{value}"' if isinstance(value, str) else f"{name}={value}")
    if params:
        records.append(" ".join(["params", *params]))
    records += [f"predicate {name} = {_printer.print(expr)}" for name, expr in sorted(fixture.predicates.items())]

    return _lines(header, records)


def format_family(family: ApproximationFamily) -> str:
    return format_fixture(Fixture(family))


def parse_fixture(text: str, source: str = "<input>") -> Fixture:
    return _parse(text, source, "fixture")


def read_fixture(path: PathLike) -> Fixture:
    return _read(path, "fixture")


def read_family(path: PathLike) -> ApproximationFamily:
    return read_fixture(path).family


def format_programs(programs: Sequence[ClockedProgram]) -> str:
    records = []
    for program in programs:
        rule = program.rule
        if rule is None:
            if program.name != "diverge":
                raise TypeError(f"Program {program.index} was not read from a fixture")
            records.append("program diverge")
            continue
        line = f"program value={_printer.print(rule.value)} halt={_printer.print(rule.halt)}"
        if rule.when is not None:
            line += f" when={_printer.print(rule.when)}"
        records.append(line)
    return _lines("PROGRAMS v1", records)


def parse_programs(text: str, source: str = "<input>") -> List[ClockedProgram]:
    return _parse(text, source, "programs")


def read_programs(path: PathLike) -> List[ClockedProgram]:
    return _read(path, "programs")


def read_reduction_input(kind: ReductionKind, path: PathLike) -> ReductionInput:
    """Load a reduction fixture; the base trace path is relative to the fixture file."""
    fixture = read_fixture(path)
    base = None
    if "base" in fixture.params:
        base = read_trace(Path(path).parent / str(fixture.params["base"]))
    return ReductionInput(
        kind,
        family=fixture.family if "family" in REQUIRED[kind] else None,
        predicates=fixture.predicates,
        n=fixture.params.get("n"),
        k=fixture.params.get("k"),
        base=base,
    )
