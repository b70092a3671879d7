"""End-to-end driver: load programs, build the game, solve, report.

Exit codes: 0 satisfied, 1 violated, 2 usage or configuration error,
3 resource cap exceeded.  A violation is a result, not a failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from . import arena, imp, ltl2dpa, props, solver, structures
from .formula import FormulaError, HyperFormula, format_hyper, parse_formula, parse_ltl, to_nnf, validate_fragment
from .imp import ProgramError, StateCapError
from .props import Binding, TemplateError

DEFAULT_OUT = ["o[0]"]
DEFAULT_LOW = ["l[0]"]
DEFAULT_HIGH = ["h[0]"]

EXIT_SATISFIED = 0
EXIT_VIOLATED = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


class ConfigError(Exception):
    pass


class ResourceCapError(Exception):
    pass


@dataclass
class SystemSpec:
    system_id: str
    program_path: str
    transforms: tuple = ()  # entries ("stutter",) or ("shift", k)


@dataclass
class CheckConfig:
    systems: list[SystemSpec]
    formula_file: Optional[str] = None
    prop: Optional[str] = None
    widths: dict = field(default_factory=dict)
    cap_states: int = 10**6
    cap_vertices: int = 10**7
    dump_dpa: Optional[str] = None
    dump_game: Optional[str] = None
    dump_sys: dict = field(default_factory=dict)
    report_path: Optional[str] = None
    output: str = "human"  # or "record"
    fast: bool = True


@dataclass
class Report:
    verdict: str
    formula: str
    sizes: dict
    timings_ms: dict
    strategy_vertices: int = 0

    def record(self) -> str:
        lines = [f"verdict {self.verdict}", f"formula {self.formula}"]
        for key in sorted(self.sizes):
            lines.append(f"{key} {self.sizes[key]}")
        for key in ("build", "translate", "arena", "solve"):
            lines.append(f"time.{key}_ms {self.timings_ms[key]:.1f}")
        lines.append(f"strategy.vertices {self.strategy_vertices}")
        return "\n".join(lines) + "\n"


def _apply_transforms(g: structures.MSCGS, transforms: Sequence[tuple]) -> structures.MSCGS:
    for t in transforms:
        if t[0] == "stutter":
            g = structures.stutter_transform(g)
        elif t[0] == "shift":
            g = structures.shift_transform(g, t[1])
        else:
            raise ConfigError(f"unknown transform {t[0]!r}")
    return g


def _load_system(spec: SystemSpec, widths: dict, cap_states: int) -> structures.MSCGS:
    try:
        text = Path(spec.program_path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read program {spec.program_path!r}: {e}") from e
    declared, program = imp.parse_program(text, width_overrides=widths or None)
    g = imp.build_cgs(program, declared, cap=cap_states, name=spec.system_id)
    return _apply_transforms(g, spec.transforms)


def _parse_prop_name(prop: str) -> tuple[str, Optional[str]]:
    if ":" in prop:
        name, param = prop.split(":", 1)
        return name, param
    return prop, None


def _expand_builtin(
    prop: str,
    base_spec: SystemSpec,
    base: structures.MSCGS,
    body_file: Optional[str],
) -> tuple[HyperFormula, dict, dict]:
    """Builtin property against one base system; derives transformed twins.

    Returns (formula, systems map, bindings map).
    """
    name, param = _parse_prop_name(prop)
    base_id = base_spec.system_id
    systems = {base_id: base}
    bindings = {base_id: Binding(base_id, base_id, tuple(base_spec.transforms))}

    def stuttered() -> str:
        if structures.SCHED in base.agents:
            return base_id
        sid = f"{base_id}_stut"
        systems[sid] = structures.stutter_transform(base)
        bindings[sid] = Binding(sid, base_id, (("stutter",),))
        return sid

    def shifted(k: int) -> str:
        sid = f"{base_id}_shift{k}"
        systems[sid] = structures.shift_transform(base, k)
        bindings[sid] = Binding(sid, base_id, (("shift", k),))
        return sid

    if name == "od":
        return props.expand_od(DEFAULT_OUT), systems, bindings
    if name == "ni":
        return props.expand_ni(DEFAULT_OUT, DEFAULT_LOW), systems, bindings
    if name == "simsec":
        sid = shifted(1)
        f = props.expand_simsec(DEFAULT_OUT, DEFAULT_LOW, base_id, sid, bindings)
        return f, systems, bindings
    if name == "sgni":
        k = int(param) if param else 3
        sid = shifted(k)
        f = props.expand_sgni(DEFAULT_OUT, DEFAULT_LOW, DEFAULT_HIGH, k, base_id, sid, bindings)
        return f, systems, bindings
    if name == "od-async":
        sid = stuttered()
        return props.expand_od_async(DEFAULT_OUT, sid, bindings), systems, bindings
    if name == "ni-async":
        r = param or "r[0]"
        sid = stuttered()
        f = props.expand_ni_async(DEFAULT_OUT, DEFAULT_LOW, r, sid, bindings)
        return f, systems, bindings
    if name == "ahltl":
        if body_file is None:
            raise ConfigError("--prop ahltl:n needs --formula with the quantifier-free body")
        n = int(param) if param else 2
        body = parse_ltl(Path(body_file).read_text(encoding="utf-8").strip())
        sid = stuttered()
        return props.expand_ahltl(n, body, sid, bindings), systems, bindings
    raise ConfigError(f"unknown builtin property {prop!r}")


def run(config: CheckConfig) -> Report:
    """Check one formula against its bound systems and report the verdict."""
    if not config.systems:
        raise ConfigError("at least one --system binding is required")

    t0 = time.perf_counter()
    loaded: dict[str, structures.MSCGS] = {}
    for spec in config.systems:
        if spec.system_id in loaded:
            raise ConfigError(f"system {spec.system_id!r} bound twice")
        try:
            loaded[spec.system_id] = _load_system(spec, config.widths, config.cap_states)
        except StateCapError as e:
            raise ResourceCapError(str(e)) from e

    if config.prop is not None:
        base_spec = config.systems[0]
        if len(config.systems) != 1:
            raise ConfigError("builtin properties take exactly one --system binding")
        formula, systems, _bindings = _expand_builtin(
            config.prop, base_spec, loaded[base_spec.system_id], config.formula_file
        )
    elif config.formula_file is not None:
        formula = parse_formula(Path(config.formula_file).read_text(encoding="utf-8").strip())
        systems = loaded
    else:
        raise ConfigError("either --formula or --prop is required")

    info = validate_fragment(formula, systems)
    t_build = time.perf_counter()

    body = to_nnf(formula.body)
    dpa = ltl2dpa.ltl_to_dpa(body, info.atoms)
    t_translate = time.perf_counter()

    quants = [(rq.coalition, systems[rq.system]) for rq in info.quantifiers]
    try:
        built = arena.build_game(
            quants,
            dpa,
            info.atoms,
            info.atom_copy,
            collapse=True,
            cap=config.cap_vertices,
            prune_decided=config.fast,
        )
    except arena.VertexCapError as e:
        raise ResourceCapError(str(e)) from e
    t_arena = time.perf_counter()

    regions, s0, s1 = solver.zielonka(built.game)
    t_solve = time.perf_counter()

    won = built.game.initial in regions.w0
    satisfied = won != formula.negated
    winner_strategy = s0 if won else s1

    sizes = {
        "dpa.states": dpa.n_states,
        "dpa.colors": dpa.n_colors,
        "game.vertices": built.game.n_vertices,
        "game.edges": built.game.n_edges,
    }
    for sid in sorted(systems):
        sizes[f"system.{sid}.states"] = systems[sid].n_states
    report = Report(
        verdict="satisfied" if satisfied else "violated",
        formula=format_hyper(formula),
        sizes=sizes,
        timings_ms={
            "build": (t_build - t0) * 1000,
            "translate": (t_translate - t_build) * 1000,
            "arena": (t_arena - t_translate) * 1000,
            "solve": (t_solve - t_arena) * 1000,
        },
        strategy_vertices=len(winner_strategy),
    )

    if config.dump_dpa:
        Path(config.dump_dpa).write_text(ltl2dpa.export_dot(dpa), encoding="utf-8")
    if config.dump_game:
        Path(config.dump_game).write_text(
            arena.export_dot(built, strategy=winner_strategy), encoding="utf-8"
        )
    for sid, path in sorted(config.dump_sys.items()):
        if sid not in systems:
            raise ConfigError(f"--dump-sys names unbound system {sid!r}")
        Path(path).write_text(structures.export_dot(systems[sid]), encoding="utf-8")
    if config.report_path:
        Path(config.report_path).write_text(report.record(), encoding="utf-8")
    return report


# ---------------------------------------------------------------------------
# Suites


def bundled_asset(name: str) -> Path:
    return Path(str(resources.files("hyperatl").joinpath("assets", name)))


def _resolve_manifest(path_or_name: str) -> Path:
    p = Path(path_or_name)
    if p.exists():
        return p
    candidate = bundled_asset(f"{path_or_name}.json")
    if candidate.exists():
        return candidate
    raise ConfigError(f"manifest {path_or_name!r} not found")


@dataclass
class SuiteRow:
    name: str
    verdict: str
    expected: Optional[str]
    ok: bool
    millis: float
    sizes: dict


def run_suite(
    manifest: str,
    expect_file: Optional[str] = None,
    fast: bool = True,
) -> tuple[list[SuiteRow], bool]:
    """Run every manifest entry; flags mismatches against expected verdicts."""
    manifest_path = _resolve_manifest(manifest)
    try:
        data = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"cannot parse manifest {manifest!r}: {e}") from e
    expectations = {}
    if expect_file:
        expectations = json.loads(Path(expect_file).read_text(encoding="utf-8"))

    rows: list[SuiteRow] = []
    all_ok = True
    for entry in data.get("entries", []):
        name = entry["name"]
        program = manifest_path.parent / entry["program"]
        transforms = tuple(
            ("shift", int(t.split("=", 1)[1])) if t.startswith("shift=") else (t,)
            for t in entry.get("transforms", [])
        )
        config = CheckConfig(
            systems=[SystemSpec("G", str(program), transforms)],
            prop=entry["prop"],
            widths={k: int(v) for k, v in entry.get("widths", {}).items()},
            fast=fast,
        )
        start = time.perf_counter()
        report = run(config)
        millis = (time.perf_counter() - start) * 1000
        expected = expectations.get(name, entry.get("expect"))
        ok = expected is None or report.verdict == expected
        all_ok = all_ok and ok
        rows.append(
            SuiteRow(
                name=name,
                verdict=report.verdict,
                expected=expected,
                ok=ok,
                millis=millis,
                sizes=report.sizes,
            )
        )
    return rows, all_ok


def format_suite(rows: list[SuiteRow]) -> str:
    width = max([len(r.name) for r in rows] + [4])
    lines = [f"{'name'.ljust(width)}  verdict    expected   ok    ms"]
    for r in rows:
        lines.append(
            f"{r.name.ljust(width)}  {r.verdict.ljust(9)}  "
            f"{(r.expected or '-').ljust(9)}  {'ok' if r.ok else 'MISMATCH':4}  {r.millis:8.1f}"
        )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Command line


def _parse_system(text: str) -> SystemSpec:
    if "=" not in text:
        raise ConfigError(f"--system expects id=path[,stutter][,shift=k], got {text!r}")
    system_id, rest = text.split("=", 1)
    parts = rest.split(",")
    path = parts[0]
    transforms = []
    for t in parts[1:]:
        if t == "stutter":
            transforms.append(("stutter",))
        elif t.startswith("shift="):
            transforms.append(("shift", int(t.split("=", 1)[1])))
        else:
            raise ConfigError(f"unknown transform {t!r}")
    return SystemSpec(system_id.strip(), path, tuple(transforms))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperatl",
        description="model checker for strategic hyperproperties of bit-vector programs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="check one formula against bound systems")
    check.add_argument("--formula", help="formula file (or ahltl body)")
    check.add_argument("--prop", help="builtin property name[:params]")
    check.add_argument("--system", action="append", default=[], metavar="ID=PROG[,T...]")
    check.add_argument("--width", action="append", default=[], metavar="VAR=N")
    check.add_argument("--cap-states", type=int, default=10**6)
    check.add_argument("--cap-vertices", type=int, default=10**7)
    check.add_argument("--dump-dpa", metavar="FILE")
    check.add_argument("--dump-game", metavar="FILE")
    check.add_argument("--dump-sys", action="append", default=[], metavar="ID=FILE")
    check.add_argument("--report", metavar="FILE")
    check.add_argument("--format", choices=("human", "record"), default="human",
                       help="stdout style: readable lines or the flat record")
    check.add_argument("--exact-arena", action="store_true",
                       help="skip the decided-state arena pruning")

    suite = sub.add_parser("suite", help="run a manifest of checks")
    suite.add_argument("--manifest", required=True)
    suite.add_argument("--expect", metavar="FILE")
    suite.add_argument("--exact-arena", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "check":
            widths = {}
            for w in args.width:
                if "=" not in w:
                    raise ConfigError(f"--width expects VAR=N, got {w!r}")
                var, n = w.split("=", 1)
                widths[var] = int(n)
            dump_sys = {}
            for d in args.dump_sys:
                if "=" not in d:
                    raise ConfigError(f"--dump-sys expects ID=FILE, got {d!r}")
                sid, path = d.split("=", 1)
                dump_sys[sid] = path
            config = CheckConfig(
                systems=[_parse_system(s) for s in args.system],
                formula_file=args.formula,
                prop=args.prop,
                widths=widths,
                cap_states=args.cap_states,
                cap_vertices=args.cap_vertices,
                dump_dpa=args.dump_dpa,
                dump_game=args.dump_game,
                dump_sys=dump_sys,
                report_path=args.report,
                output=args.format,
                fast=not args.exact_arena,
            )
            report = run(config)
            if config.output == "record":
                print(report.record(), end="")
            else:
                print(f"verdict: {report.verdict}")
                for key in sorted(report.sizes):
                    print(f"  {key} = {report.sizes[key]}")
                for key in ("build", "translate", "arena", "solve"):
                    print(f"  time.{key}_ms = {report.timings_ms[key]:.1f}")
            return EXIT_SATISFIED if report.verdict == "satisfied" else EXIT_VIOLATED
        rows, ok = run_suite(args.manifest, args.expect, fast=not args.exact_arena)
        print(format_suite(rows))
        return EXIT_SATISFIED if ok else EXIT_VIOLATED
    except (ConfigError, FormulaError, ProgramError, TemplateError, arena.ArenaError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceCapError, StateCapError, arena.VertexCapError, ltl2dpa.AutomatonCapError) as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
