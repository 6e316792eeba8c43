"""Test the command line front end."""
from collections import Counter
from pathlib import Path

import pytest

from beq import formats
from beq.core import census
from beq.main import EXIT_INVARIANT, EXIT_OK, EXIT_PARSE, EXIT_VERIFY, main
from beq.tests.cases import triangular_text

UNBOUNDED_PROFILE = "PROFILE v1 bound=unbounded infinite=0 cutoff=0\n"


def write(path: Path, text: str) -> str:
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_build_and_census(tmp_path: Path, capsys):
    out = tmp_path / "a.trace"
    assert main(["build", "triangular", "--horizon", "5", "--out", str(out)]) == EXIT_OK
    assert out.read_text(encoding="utf-8") == triangular_text(5)

    assert main(["census", str(out)]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "s=0 {1}"
    assert lines[-1] == "s=5 {1,2,3,4,5,6}"


def test_census_table(tmp_path: Path, capsys):
    trace = write(tmp_path / "a.trace", triangular_text(2))
    assert main(["census", trace, "--table"]) == EXIT_OK
    assert "Census" in capsys.readouterr().out


def test_census_of_empty_trace(tmp_path: Path, capsys):
    trace = write(tmp_path / "empty.trace", "TRACE v1 horizon=0\n")
    assert main(["census", trace]) == EXIT_OK
    assert capsys.readouterr().out == "s=0 {}\n"


def test_build_prints_trace(capsys):
    assert main(["build", "triangular", "--horizon", "2"]) == EXIT_OK
    assert capsys.readouterr().out == triangular_text(2)


def test_build_diag(tmp_path: Path):
    programs = write(tmp_path / "p.programs", "PROGRAMS v1\n")
    out, log = tmp_path / "b.trace", tmp_path / "b.log"
    assert main(["build", "diag", "--programs", programs, "--horizon", "4", "--out", str(out), "--log", str(log)]) == EXIT_OK
    assert census(formats.read_trace(out).final()) == Counter({1: 5})
    assert log.read_text(encoding="utf-8") == "LOG v1\n"


def test_build_af(tmp_path: Path):
    family = write(tmp_path / "f.family", "FAMILY v1 semantics=MONOTONE_LIMIT horizon=4\nx=* schedule=const 1\n")
    out = tmp_path / "af.trace"
    assert main(["build", "af", "--family", family, "--horizon", "4", "--out", str(out)]) == EXIT_OK
    assert census(formats.read_trace(out).final()) == Counter({1: 5})


def test_build_needs_its_inputs(capsys):
    assert main(["build", "diag"]) == EXIT_PARSE
    assert "needs --programs" in capsys.readouterr().out


def test_negative_horizon():
    with pytest.raises(SystemExit):
        main(["build", "triangular", "--horizon", "-1"])


@pytest.mark.parametrize("observe,text", [(False, UNBOUNDED_PROFILE), (True, triangular_text(5))])
def test_classify(tmp_path: Path, capsys, observe: bool, text: str):
    path = write(tmp_path / "input", text)
    args = ["classify", path] + (["--observe"] if observe else [])
    assert main(args) == EXIT_OK
    assert capsys.readouterr().out == "JUMP\n"


@pytest.mark.parametrize(
    "map_text,code,verdict",
    [
        ("MAP v1 stage=2\n-> 0 0\n-> 1 1\n", EXIT_OK, "PASS"),
        ("MAP v1 stage=2\n-> 0 1\n-> 1 4\n", EXIT_VERIFY, "FAIL"),
    ],
)
def test_verify(tmp_path: Path, capsys, map_text: str, code: int, verdict: str):
    trace = write(tmp_path / "a.trace", triangular_text(2))
    map_path = write(tmp_path / "m.map", map_text)
    assert main(["verify", trace, trace, map_path]) == code
    assert capsys.readouterr().out.splitlines() == [verdict, "oracle: embeds"]


def test_embed_delta2(tmp_path: Path):
    trace = write(tmp_path / "a.trace", triangular_text(3))
    profile = write(tmp_path / "a.profile", UNBOUNDED_PROFILE)
    seed = write(tmp_path / "seed.map", "MAP v1 stage=0\n")
    out, mc = tmp_path / "out.map", tmp_path / "out.mc"
    args = ["embed", "delta2", trace, trace, "--profile-a", profile, "--profile-b", profile, "--seed", seed]
    assert main(args + ["--out", str(out), "--mc", str(mc)]) == EXIT_OK
    record = formats.read_map(out)
    assert record.stage == 3
    assert record.pairs == {e: e for e in formats.read_trace(trace).final().universe}
    assert mc.read_text(encoding="utf-8") == "MC v1\n"


def test_embed_delta3(tmp_path: Path, capsys):
    trace = write(tmp_path / "a.trace", triangular_text(2))
    assert main(["embed", "delta3", trace, trace]) == EXIT_OK
    assert capsys.readouterr().out.startswith("MAP v1 stage=2\n")


def test_embed_rejects_profile(tmp_path: Path, capsys):
    trace = write(tmp_path / "a.trace", triangular_text(2))
    profile = write(tmp_path / "a.profile", UNBOUNDED_PROFILE)
    seed = write(tmp_path / "seed.map", "MAP v1 stage=0\n")
    args = ["embed", "bounded", trace, trace, "--profile-a", profile, "--profile-b", profile, "--seed", seed]
    assert main(args) == EXIT_PARSE
    assert capsys.readouterr().out.startswith("Error: ")


def test_parse_error(tmp_path: Path, capsys):
    trace = write(tmp_path / "bad.trace", "TRACE v1 horizon=3\ns=0 nwe 0\n")
    assert main(["census", trace]) == EXIT_PARSE
    first = capsys.readouterr().out.splitlines()[0]
    assert first == f"{trace}: Parser-error at line 2, column 4: Expected 'join', got 'nwe'"


def test_invariant_error(tmp_path: Path, capsys):
    trace = write(tmp_path / "bad.trace", "TRACE v1 horizon=1\ns=0 join 1 -> 0\n")
    assert main(["census", trace]) == EXIT_INVARIANT
    assert capsys.readouterr().out.startswith("Invariant violated: ")


def test_missing_file(tmp_path: Path):
    assert main(["census", str(tmp_path / "missing.trace")]) == EXIT_PARSE


def test_reduce(tmp_path: Path):
    fixture = write(tmp_path / "w.family", "FAMILY v1 semantics=SIGMA1 horizon=4\nx=2 schedule=from 3\n")
    out = tmp_path / "r.trace"
    assert main(["reduce", "sigma02", "--fixture", fixture, "--out", str(out)]) == EXIT_OK
    assert census(formats.read_trace(out).final()) == Counter({1: 5, 3: 1})
