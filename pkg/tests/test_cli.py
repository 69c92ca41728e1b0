import importlib
import io
import json
import math
import pkgutil

import pytest

import owentropy
from owentropy import cli

LOG_TAU = math.log((1 + math.sqrt(5)) / 2)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def result(*argv):
    code, out, err = run(*argv)
    assert code == 0, err
    doc = json.loads(out)
    assert doc["schemaVersion"] == "1.0"
    return doc["result"]


# -- documented examples -----------------------------------------------------


def test_golden_mean_entropy_example():
    doc = result("entropy", "--preset", "golden-mean", "--seq", "intervals", "--imax", "30")
    assert abs(doc["supValue"] - LOG_TAU) < 1e-3


def test_bowen_chain_example():
    doc = result("bowen-chain", "--preset", "four-to-two-to-point")
    assert doc["verdict"] == "pass"
    ch = doc["chains"][0]
    got = [ch["first"], ch["second"], ch["composite"]]
    assert got == pytest.approx([math.log(2), math.log(2), math.log(4)], abs=1e-12)


def test_constant_sequence_fails():
    code, out, _ = run("vanhove", "--group", "r1", "--seq", "constant", "--K", "box:1")
    assert code == 1
    assert json.loads(out)["result"]["verdict"] == "fail"


# -- exit codes --------------------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [
        ["no-such-command"],
        [],
        ["bernoulli", "--p", "1/3,1/3"],
        ["entropy", "--preset", "no-such-shift"],
        ["entropy", "--preset", "golden-mean", "--imax", "0"],
        ["vanhove", "--group", "x9"],
        ["cps-enumerate", "--query", "oops"],
    ],
)
def test_input_errors_exit_two(argv):
    code, out, err = run(*argv)
    assert code == 2
    assert out == ""
    assert "error" in json.loads(err.strip().splitlines()[-1])


def test_budget_exit_three():
    code, _, err = run("entropy", "--preset", "hard-square", "--imax", "12", "--scales", "0")
    assert code == 3
    assert json.loads(err)["error"] == "budget-exceeded"


def test_coverage_exit_three():
    code, _, err = run("cps-enumerate", "--preset", "padic:2:1:3", "--query", "ball:4")
    assert code == 3
    assert json.loads(err)["suggestedBound"] == 4


def test_corrupted_chain_exit_one():
    code, _, _ = run("bowen-chain", "--preset", "four-to-two-to-point", "--corrupt-composite")
    assert code == 1


# -- config files ------------------------------------------------------------


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"preset": "full-3", "imax": 6, "scales": [0]}))
    doc = result("entropy", "--config", str(cfg))
    assert doc["supValue"] == pytest.approx(math.log(3), abs=1e-12)
    doc = result("entropy", "--config", str(cfg), "--preset", "full-2")
    assert doc["supValue"] == pytest.approx(math.log(2), abs=1e-12)


def test_config_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"preset": "full-2", "colour": "red"}))
    code, _, err = run("entropy", "--config", str(cfg))
    assert code == 2
    assert json.loads(err)["error"] == "config"


# -- output formats ----------------------------------------------------------


def test_output_is_byte_identical():
    argv = ("bowen-chain", "--random", "3", "--seed", "7", "--scales", "0", "--imax", "6")
    assert run(*argv) == run(*argv)
    assert run("entropy", "--preset", "golden-mean", "--imax", "8", "--format", "csv") == run(
        "entropy", "--preset", "golden-mean", "--imax", "8", "--format", "csv"
    )


def test_csv_svg_and_points(tmp_path):
    _, out, _ = run("entropy", "--preset", "full-2", "--imax", "4", "--scales", "0", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0].split(",")[:2] == ["scale", "index"]
    assert len(lines) == 5
    target = tmp_path / "trace.svg"
    code, out, _ = run("ow-limit", "--imax", "8", "--format", "svg", "-o", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("<svg")
    _, out, _ = run("cps-enumerate", "--query", "-3,3", "--format", "points")
    assert "# window:" in out


def test_negative_query_values():
    doc = result("cps-enumerate", "--query", "-5,5")
    assert doc["count"] > 0


# -- every library operation is reachable -----------------------------------

REACH_ARGV = {
    "vanhove": [
        ["vanhove", "--group", "r1", "--imax", "20", "--dilated", "--product", "z1/boxes/box:1"],
        ["vanhove", "--group", "z1", "--imax", "6", "--K", "set:0;1"],
    ],
    "ow-limit": [["ow-limit", "--f", "dilation:box:1", "--group", "r1", "--seq", "boxes", "--imax", "10", "--transfer", "1/2"]],
    "cps-enumerate": [["cps-enumerate", "--query", "-10,10", "--certify", "1/2"]],
    "density": [["density", "--lattice", "zd:1", "--spacing", "1/2", "--seq", "boxes", "--imax", "10"]],
    "meyer-check": [["meyer-check", "--preset", "fibonacci", "--query", "-20,20"]],
    "entropy": [
        ["entropy", "--preset", "golden-mean", "--imax", "6", "--format", "csv"],
        ["entropy", "--preset", "golden-mean", "--cylinder", "3", "--scales", "0,1"],
    ],
    "relative-entropy": [["relative-entropy", "--code", "four-to-two", "--imax", "6"]],
    "ow-crosscheck": [["ow-crosscheck", "--imax", "10"]],
    "restrict": [["restrict", "--preset", "full-2", "--imax", "6"]],
    "power-rule": [["power-rule", "--preset", "full-2", "--n", "1,2", "--imax", "6"]],
    "bowen-chain": [["bowen-chain", "--preset", "four-to-two-to-point", "--imax", "6"]],
    "product-extension": [["product-extension", "--A", "0,1", "--B", "0"]],
    "bernoulli": [["bernoulli"]],
}


def test_mapping_covers_each_command_once():
    assert set(cli.OPERATION_COMMANDS.values()) == set(cli.COMMANDS)
    assert set(REACH_ARGV) == set(cli.COMMANDS)
    for op in cli.OPERATION_COMMANDS:
        mod, name = op.split(".")
        assert callable(getattr(importlib.import_module(f"owentropy.{mod}"), name))


@pytest.mark.parametrize("op", sorted(cli.OPERATION_COMMANDS))
def test_operation_is_reached_by_its_subcommand(op, monkeypatch):
    mod, name = op.split(".")
    original = getattr(importlib.import_module(f"owentropy.{mod}"), name)
    calls = []

    def spy(*a, **kw):
        calls.append(1)
        return original(*a, **kw)

    modules = [owentropy] + [importlib.import_module(f"owentropy.{m.name}") for m in pkgutil.iter_modules(owentropy.__path__) if m.name != "__main__"]
    for m in modules:
        if getattr(m, name, None) is original:
            monkeypatch.setattr(m, name, spy)
    command = cli.OPERATION_COMMANDS[op]
    for argv in REACH_ARGV[command]:
        code, _, err = run(*argv)
        assert code in (0, 1), err
    assert calls, f"{op} not called by {command}"


def test_metric_file_chain(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"dist": [[0, 1, 3], [1, 0, 2], [3, 2, 0]]}))
    doc = result("entropy", "--metric-file", str(path), "--eps", "2")
    # diameters below 2 pair up the first two points; at 1 every point is alone
    assert (doc["cov(eps)"], doc["spa(eps/2)"], doc["sep(eps/2)"], doc["cov(eps/2)"]) == (2, 3, 3, 3)
    assert doc["verdict"] == "pass"
