"""Command line front end for the equivalence-structure toolkit."""

import argparse
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from . import formats
from .adversary import (
    ConstructionLog,
    build_af,
    build_doublejump_coder,
    build_simple_fin,
    canonical_triangular,
    check_accounting,
    check_log,
    diagonalize_unbounded,
)
from .approx import dominant_f, length_lex
from .core import Presentation, census, check_monotone, format_census, observe_profile
from .embed import ORACLE_CUTOFF, PartialMap, StagedMap, brute_force_embeds, embed_bounded, embed_delta2, embed_delta3, verify_partial_embedding
from .error import (
    BeqError,
    ExhaustedClasses,
    FormatError,
    InvariantViolation,
    MissingParameter,
    NoSurvivingWitness,
    UnknownElement,
)
from .indexsets import ReductionKind, classify_becat, reduce

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_VERIFY = 4

BUILD_KINDS = ("triangular", "diag", "simple-fin", "af", "coder")
EMBED_ALGORITHMS = ("bounded", "delta2", "delta3")

INVARIANT_ERRORS = (InvariantViolation, UnknownElement, ExhaustedClasses, NoSurvivingWitness)


@dataclass
class RunConfig:
    """Everything one command needs; built from the parsed arguments."""

    command: str
    horizon: Optional[int] = None
    inputs: List[Path] = field(default_factory=list)
    out: Optional[Path] = None
    log: Optional[Path] = None
    verbosity: int = 0

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        inputs = [Path(p) for p in getattr(args, "inputs", None) or []]
        return cls(
            args.command,
            args.horizon,
            inputs,
            Path(args.out) if getattr(args, "out", None) else None,
            Path(args.log) if getattr(args, "log", None) else None,
            args.verbose,
        )


def natural(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def console() -> Console:
    return Console(soft_wrap=True, highlight=False)


def setup_logging(verbosity: int):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def parse_args(arg_list: Optional[List[str]]):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("--horizon", type=natural, default=None)

    parser = argparse.ArgumentParser(prog="beq")
    commands = parser.add_subparsers(dest="command", required=True)

    build = commands.add_parser("build", parents=[common], help="Run a presentation builder")
    build.add_argument("kind", choices=BUILD_KINDS)
    build.add_argument("--programs", type=str, default=None, help="PROGRAMS file (diag, af)")
    build.add_argument("--family", type=str, nargs="+", default=None, help="FAMILY file(s) (simple-fin, af, coder)")
    build.add_argument("--max-length", type=natural, default=2, help="Longest coded string (coder)")
    build.add_argument("--out", type=str, default=None)
    build.add_argument("--log", type=str, default=None)

    embed = commands.add_parser("embed", parents=[common], help="Synthesize an embedding of A into B")
    embed.add_argument("algorithm", choices=EMBED_ALGORITHMS)
    embed.add_argument("inputs", nargs=2, metavar="TRACE")
    embed.add_argument("--profile-a", type=str, default=None)
    embed.add_argument("--profile-b", type=str, default=None)
    embed.add_argument("--seed", type=str, default=None, help="MAP file over class ids")
    embed.add_argument("--inf-family", type=str, default=None, help="PI2 family over target class ids (delta3)")
    embed.add_argument("--out", type=str, default=None)
    embed.add_argument("--mc", type=str, default=None)

    verify = commands.add_parser("verify", parents=[common], help="Check a map between two traces")
    verify.add_argument("inputs", nargs=3, metavar="FILE", help="source trace, target trace, map")
    verify.add_argument("--oracle", default=False, action="store_true")

    census_parser = commands.add_parser("census", parents=[common], help="Class sizes per stage")
    census_parser.add_argument("inputs", nargs=1, metavar="TRACE")
    census_parser.add_argument("--table", default=False, action="store_true")

    classify = commands.add_parser("classify", parents=[common], help="Degree of bi-embeddable categoricity")
    classify.add_argument("inputs", nargs=1, metavar="FILE")
    classify.add_argument("--observe", default=False, action="store_true", help="Read a trace and observe its profile")
    classify.add_argument("--cutoff", type=int, default=0)

    reduce_parser = commands.add_parser("reduce", parents=[common], help="Run an index-set reduction")
    reduce_parser.add_argument("kind", choices=[kind.value for kind in ReductionKind])
    reduce_parser.add_argument("--fixture", type=str, required=True)
    reduce_parser.add_argument("--out", type=str, default=None)

    args = parser.parse_args(arg_list)
    return args


def _emit_trace(config: RunConfig, pres: Presentation, log: Optional[ConstructionLog] = None):
    if config.out is not None:
        formats.write_trace(config.out, pres)
    else:
        console().print(formats.format_trace(pres), end="", markup=False)
    if log is not None and config.log is not None:
        formats.write_log(config.log, log)


def run_build(config: RunConfig, kind: str, programs: Optional[str] = None, family: Optional[List[str]] = None, max_length: int = 2) -> int:
    """Build a presentation (and construction log) and write it as a trace."""

    def need(value, option: str):
        if not value:
            raise MissingParameter(f"build {kind} needs {option}")
        return value

    horizon = 10 if config.horizon is None else config.horizon
    builders: Dict[str, Callable[[], Tuple[Presentation, Optional[ConstructionLog]]]] = {
        "triangular": lambda: (canonical_triangular(horizon), None),
        "diag": lambda: diagonalize_unbounded(formats.read_programs(need(programs, "--programs")), horizon),
        "simple-fin": lambda: build_simple_fin([formats.read_family(path) for path in need(family, "--family")], horizon),
        "af": lambda: (
            build_af(
                formats.read_family(family[0]) if family else dominant_f(formats.read_programs(need(programs, "--programs or --family")), horizon=horizon),
                horizon,
            ),
            None,
        ),
        "coder": lambda: build_doublejump_coder(formats.read_family(need(family, "--family")[0]), length_lex(max_length), horizon),
    }

    pres, log = builders[kind]()
    check_monotone(pres)
    if log is not None:
        check_log(pres, log)
    if kind == "simple-fin":
        violation = check_accounting(log)
        if violation is not None:
            logger.warning("Requirement %d exceeded its accounting bound at stage %d", violation[1], violation[0])

    logger.info("Built %s to stage %d: %d events", kind, horizon, len(pres.trace))
    _emit_trace(config, pres, log)
    return EXIT_OK


def run_embed(
    config: RunConfig,
    algorithm: str,
    profile_a: Optional[str] = None,
    profile_b: Optional[str] = None,
    seed: Optional[str] = None,
    inf_family: Optional[str] = None,
    mc: Optional[str] = None,
) -> int:
    """Synthesize a staged embedding, write its final map and mind changes, then verify."""
    presA, presB = (formats.read_trace(path) for path in config.inputs)
    horizon = min(presA.horizon, presB.horizon) if config.horizon is None else config.horizon

    staged: StagedMap
    if algorithm == "delta3":
        family = formats.read_family(inf_family) if inf_family else None
        staged = embed_delta3(presA, presB, horizon, family)
    else:
        if not (profile_a and profile_b and seed):
            raise MissingParameter(f"embed {algorithm} needs --profile-a, --profile-b and --seed")
        profiles = formats.read_profile(profile_a), formats.read_profile(profile_b)
        pairs = formats.read_map(seed).pairs
        synthesize = embed_bounded if algorithm == "bounded" else embed_delta2
        staged = synthesize(presA, presB, *profiles, pairs, horizon)

    final = staged.final()
    if config.out is not None:
        formats.write_map(config.out, final.pairs, staged.horizon)
    else:
        console().print(formats.format_map(final.pairs, staged.horizon), end="", markup=False)
    if mc is not None:
        formats.write_mind_changes(mc, staged.mind_changes())

    if not verify_partial_embedding(final):
        console().print("FAIL", markup=False)
        return EXIT_VERIFY
    logger.info("%s map verified: %d pairs, %d mind changes", algorithm, len(final), staged.mind_change_count())
    return EXIT_OK


def run_verify(config: RunConfig, oracle: bool = False) -> int:
    source, target, map_path = config.inputs
    presA, presB = formats.read_trace(source), formats.read_trace(target)
    record = formats.read_map(map_path)
    stage = record.stage if config.horizon is None else config.horizon

    m = PartialMap(record.pairs, presA.snapshot_at(stage), presB.snapshot_at(stage))
    passed = verify_partial_embedding(m)
    out = console()
    out.print("PASS" if passed else "FAIL", markup=False)

    if oracle or max(len(m.source), len(m.target)) <= ORACLE_CUTOFF:
        embeds = brute_force_embeds(m.source, m.target)
        out.print(f"oracle: {'embeds' if embeds else 'no embedding'}", markup=False)

    return EXIT_OK if passed else EXIT_VERIFY


def run_census(config: RunConfig, table: bool = False) -> int:
    pres = formats.read_trace(config.inputs[0])
    horizon = pres.horizon if config.horizon is None else min(config.horizon, pres.horizon)
    out = console()

    if not table:
        for s in range(horizon + 1):
            out.print(f"s={s} {format_census(census(pres.snapshot_at(s)))}", markup=False)
        return EXIT_OK

    result = Table(title="Census")
    result.add_column("Stage", justify="right")
    result.add_column("Classes", justify="right")
    result.add_column("Largest", justify="right")
    result.add_column("Sizes")
    for s in range(horizon + 1):
        snap = pres.snapshot_at(s)
        result.add_row(str(s), str(len(snap.classes)), str(max(snap.sizes(), default=0)), format_census(census(snap)))
    out.print(result)
    return EXIT_OK


def run_classify(config: RunConfig, observe: bool = False, cutoff: int = 0) -> int:
    if observe:
        pres = formats.read_trace(config.inputs[0])
        stage = pres.horizon if config.horizon is None else config.horizon
        profile = observe_profile(pres, stage, cutoff)
    else:
        profile = formats.read_profile(config.inputs[0])

    logger.info("Profile: bound=%s infinite=%s", profile.bound, profile.infinite_class_count)
    console().print(classify_becat(profile).name, markup=False)
    return EXIT_OK


def run_reduce(config: RunConfig, kind: str, fixture: str) -> int:
    inp = formats.read_reduction_input(ReductionKind(kind), fixture)
    horizon = config.horizon
    if horizon is None:
        horizon = inp.family.horizon if inp.family is not None else formats.read_family(fixture).horizon

    pres = reduce(inp, horizon)
    check_monotone(pres)
    _emit_trace(config, pres)
    return EXIT_OK


def run(args: argparse.Namespace) -> int:
    """Dispatch one command and map failures onto exit codes."""
    config = RunConfig.from_args(args)
    setup_logging(config.verbosity)

    commands: Dict[str, Callable[[], int]] = {
        "build": lambda: run_build(config, args.kind, args.programs, args.family, args.max_length),
        "embed": lambda: run_embed(config, args.algorithm, args.profile_a, args.profile_b, args.seed, args.inf_family, args.mc),
        "verify": lambda: run_verify(config, args.oracle),
        "census": lambda: run_census(config, args.table),
        "classify": lambda: run_classify(config, args.observe, args.cutoff),
        "reduce": lambda: run_reduce(config, args.kind, args.fixture),
    }

    out = console()
    try:
        return commands[config.command]()
    except FormatError as e:
        for error in e.errors:
            out.print(f"{e.source}: {error}", markup=False)
        return EXIT_PARSE
    except INVARIANT_ERRORS as e:
        out.print(f"Invariant violated: {e}", markup=False)
        return EXIT_INVARIANT
    except (BeqError, OSError) as e:
        out.print(f"Error: {e}", markup=False)
        return EXIT_PARSE


def main(arg_list: Optional[List[str]] = None) -> int:
    args = parse_args(arg_list)

    return run(args)


if __name__ == "__main__":
    raise SystemExit(main())
