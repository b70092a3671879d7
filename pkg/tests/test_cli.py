import json

import pytest

from hyperatl import cli
from hyperatl.cli import (
    CheckConfig,
    ConfigError,
    EXIT_RESOURCE,
    EXIT_SATISFIED,
    EXIT_USAGE,
    EXIT_VIOLATED,
    SystemSpec,
    bundled_asset,
    run,
    run_suite,
)


def spec(name, transforms=()):
    return SystemSpec("G", str(bundled_asset(name)), transforms)


def test_run_reports_sizes_and_timings():
    report = run(CheckConfig(systems=[spec("p1.imp")], prop="od"))
    assert report.verdict == "satisfied"
    assert report.sizes["system.G.states"] > 0
    assert report.sizes["game.vertices"] > 0
    assert set(report.timings_ms) == {"build", "translate", "arena", "solve"}


def test_negated_formula_flips_verdict(tmp_path):
    f1 = tmp_path / "od.hatl"
    f1.write_text("[ forall p1 . forall p2 . ] G (o[0]{p1} <-> o[0]{p2})")
    f2 = tmp_path / "odneg.hatl"
    f2.write_text("! [ forall p1 . forall p2 . ] G (o[0]{p1} <-> o[0]{p2})")
    r1 = run(CheckConfig(systems=[spec("p1.imp")], formula_file=str(f1)))
    r2 = run(CheckConfig(systems=[spec("p1.imp")], formula_file=str(f2)))
    assert r1.verdict == "satisfied"
    assert r2.verdict == "violated"


def test_formula_file_with_explicit_bindings(tmp_path):
    f = tmp_path / "simsec.hatl"
    f.write_text(
        "[ forall p1 @ A . <<xi_N>> p2 @ B . ] "
        "(G (l[0]{p1} <-> X l[0]{p2})) -> G (o[0]{p1} <-> X o[0]{p2})"
    )
    config = CheckConfig(
        systems=[
            SystemSpec("A", str(bundled_asset("p3.imp"))),
            SystemSpec("B", str(bundled_asset("p3.imp")), (("shift", 1),)),
        ],
        formula_file=str(f),
    )
    assert run(config).verdict == "satisfied"


def test_dumps_written_and_deterministic(tmp_path):
    paths = {
        "dpa": tmp_path / "dpa.dot",
        "game": tmp_path / "game.dot",
        "sys": tmp_path / "sys.dot",
        "report": tmp_path / "report.txt",
    }
    config = CheckConfig(
        systems=[spec("p1.imp")],
        prop="od",
        dump_dpa=str(paths["dpa"]),
        dump_game=str(paths["game"]),
        dump_sys={"G": str(paths["sys"])},
        report_path=str(paths["report"]),
    )
    run(config)
    first = {k: p.read_bytes() for k, p in paths.items()}
    run(config)
    second = {k: p.read_bytes() for k, p in paths.items()}
    for key in ("dpa", "game", "sys"):
        assert first[key] == second[key]
    record = paths["report"].read_text()
    assert record.startswith("verdict satisfied\n")
    assert "game.vertices" in record and "time.solve_ms" in record


def test_exit_codes_via_main(tmp_path, capsys):
    prog = str(bundled_asset("p1.imp"))
    assert cli.main(["check", "--system", f"G={prog}", "--prop", "od"]) == EXIT_SATISFIED
    prog3 = str(bundled_asset("p3.imp"))
    assert cli.main(["check", "--system", f"G={prog3}", "--prop", "od"]) == EXIT_VIOLATED
    assert cli.main(["check", "--system", f"G={prog}", "--prop", "nope"]) == EXIT_USAGE
    assert (
        cli.main(["check", "--system", f"G={prog}", "--prop", "od", "--cap-states", "3"])
        == EXIT_RESOURCE
    )
    capsys.readouterr()


def test_usage_errors():
    with pytest.raises(ConfigError):
        run(CheckConfig(systems=[], prop="od"))
    with pytest.raises(ConfigError):
        run(CheckConfig(systems=[spec("p1.imp")]))
    with pytest.raises(ConfigError):
        run(
            CheckConfig(
                systems=[spec("p1.imp"), SystemSpec("H", str(bundled_asset("p2.imp")))],
                prop="od",
            )
        )


def test_width_override_flows_through():
    report = run(CheckConfig(systems=[spec("q1.imp")], prop="od", widths={"h": 2}))
    assert report.verdict == "violated"
    wider = report.sizes["system.G.states"]
    base = run(CheckConfig(systems=[spec("q1.imp")], prop="od")).sizes["system.G.states"]
    assert wider > base


def test_suite_empty_manifest(tmp_path):
    m = tmp_path / "empty.json"
    m.write_text(json.dumps({"entries": []}))
    rows, ok = run_suite(str(m))
    assert rows == [] and ok


def test_suite_expect_file_overrides(tmp_path):
    m = tmp_path / "one.json"
    m.write_text(
        json.dumps(
            {
                "entries": [
                    {"name": "case", "program": str(bundled_asset("p1.imp")), "prop": "od"}
                ]
            }
        )
    )
    rows, ok = run_suite(str(m))
    assert ok and rows[0].expected is None
    expect = tmp_path / "expect.json"
    expect.write_text(json.dumps({"case": "violated"}))
    rows, ok = run_suite(str(m), expect_file=str(expect))
    assert not ok
    assert rows[0].expected == "violated" and rows[0].verdict == "satisfied"


def test_suite_unknown_manifest():
    with pytest.raises(ConfigError, match="not found"):
        run_suite("no-such-manifest")


def test_bundled_manifests_resolve():
    rows, ok = run_suite("table5a")
    assert ok and len(rows) == 16


def test_stuttered_binding_used_directly_by_async_props():
    # a base system that already carries the scheduler is not transformed again
    report = run(
        CheckConfig(systems=[spec("fig1b.imp", (("stutter",),))], prop="od-async")
    )
    assert report.verdict == "satisfied"
    assert "system.G.states" in report.sizes
    assert "system.G_stut.states" not in report.sizes


def test_exact_arena_flag_matches_fast_path():
    fast = run(CheckConfig(systems=[spec("p2.imp")], prop="ni", fast=True))
    exact = run(CheckConfig(systems=[spec("p2.imp")], prop="ni", fast=False))
    assert fast.verdict == exact.verdict == "satisfied"
    assert fast.sizes["game.vertices"] <= exact.sizes["game.vertices"]
