import json

import pytest

from spancat.cli import main
from spancat.serialize import dumps, group_to_json
from spancat.equivariant import FinGroup


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture
def span_file(tmp_path):
    return write(
        tmp_path,
        "span.json",
        {
            "sets": [
                {"name": "pt", "elements": ["*"]},
                {"name": "B", "elements": ["b0", "b1"]},
                {"name": "C", "elements": ["c0"]},
            ],
            "span": {
                "ctx": "pt",
                "B": "B",
                "C": "C",
                "inputs": [],
                "f": {
                    "source": "B",
                    "target": "C",
                    "map": [["b0", "c0"], ["b1", "c0"]],
                },
                "g": [],
            },
        },
    )


@pytest.fixture
def cycle3_file(tmp_path):
    return write(
        tmp_path,
        "cycle3.json",
        {
            "sets": [{"name": "A", "elements": ["x0", "x1", "x2"]}],
            "map": {
                "source": "A",
                "target": "A",
                "map": [["x0", "x1"], ["x1", "x2"], ["x2", "x0"]],
            },
        },
    )


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_span_act_echoes_the_wedge(span_file, capsys):
    code, out, _ = run_cli(capsys, ["span", "act", span_file])
    assert code == 0
    doc = json.loads(out)
    total = next(
        s for s in doc["sets"] if s["name"] == doc["param"]["total"]
    )
    assert len(total["elements"]) == 2


def test_span_rigid_verdict_and_exit_zero(span_file, capsys):
    code, out, err = run_cli(capsys, ["span", "rigid", span_file])
    assert code == 0  # a non-rigid span is a verdict, not a failure
    body = json.loads(out)
    assert body == {"rigid": False, "witness": ["b0", "b1"]}
    assert "not-rigid" in err


def test_coherence_pass_and_determinism(capsys):
    argv = ["coherence", "pentagon", "--instances", "25", "--seed", "7"]
    code1, out1, _ = run_cli(capsys, argv)
    code2, out2, _ = run_cli(capsys, argv)
    assert code1 == code2 == 0
    assert out1 == out2
    report = json.loads(out1)
    assert report["passed"] is True


def test_coherence_unknown_suite_exit_two(capsys):
    code, _, err = run_cli(capsys, ["coherence", "enneagon"])
    assert code == 2
    assert "unknown suite" in err


def test_coherence_fuller_with_n(capsys):
    code, out, _ = run_cli(
        capsys,
        ["coherence", "fuller.twist", "--n", "3", "--instances", "5", "--seed", "2"],
    )
    assert code == 0
    assert json.loads(out)["params"]["n"] == 3


def test_coherence_equivariant_with_group_file(tmp_path, capsys):
    g = FinGroup.symmetric3()
    path = write(
        tmp_path, "S3.json",
        group_to_json(g, subgroups={"A3": ["s012", "s120", "s201"]}),
    )
    code, out, _ = run_cli(
        capsys,
        [
            "coherence", "equivariant.icon",
            "--group", path, "--subgroup", "A3",
            "--instances", "5", "--seed", "11",
        ],
    )
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_count_fix(cycle3_file, capsys):
    code, out, err = run_cli(
        capsys, ["count", "fix", "--map", cycle3_file, "--n", "3"]
    )
    assert code == 0
    assert json.loads(out)["count"] == 3
    assert err.strip() == "3"


def test_count_least_period_identity(tmp_path, capsys):
    path = write(
        tmp_path,
        "id4.json",
        {
            "sets": [{"name": "A", "elements": ["x0", "x1", "x2", "x3"]}],
            "map": {
                "source": "A",
                "target": "A",
                "map": [["x0", "x0"], ["x1", "x1"], ["x2", "x2"], ["x3", "x3"]],
            },
        },
    )
    code, out, _ = run_cli(
        capsys, ["count", "least-period", "--map", path, "--n", "2"]
    )
    assert code == 0
    assert json.loads(out)["count"] == 0


def test_count_fuller_certify(cycle3_file, capsys):
    code, out, _ = run_cli(
        capsys,
        ["count", "fuller", "--map", cycle3_file, "--n", "3", "--certify"],
    )
    assert code == 0
    body = json.loads(out)
    assert body["count"] == 3
    assert len(body["certificate"]["map"]) == 3


def test_count_equivariant(tmp_path, capsys):
    g = FinGroup.cyclic(2)
    gpath = write(tmp_path, "C2.json", group_to_json(g))
    mpath = write(
        tmp_path,
        "swap.json",
        {
            "sets": [{"name": "X", "elements": ["x", "y", "z"]}],
            "map": {
                "source": "X",
                "target": "X",
                "map": [["x", "x"], ["y", "y"], ["z", "z"]],
            },
            "action": [
                ["e", "x", "x"], ["e", "y", "y"], ["e", "z", "z"],
                ["r1", "x", "y"], ["r1", "y", "x"], ["r1", "z", "z"],
            ],
        },
    )
    code, out, _ = run_cli(
        capsys,
        [
            "count", "equivariant", "--map", mpath,
            "--group", gpath, "--subgroup", "r1", "--n", "1",
        ],
    )
    assert code == 0
    assert json.loads(out)["count"] == 1


def test_count_non_endo_exit_two(tmp_path, capsys):
    path = write(
        tmp_path,
        "bad.json",
        {
            "sets": [
                {"name": "A", "elements": ["x"]},
                {"name": "B", "elements": ["y"]},
            ],
            "map": {"source": "A", "target": "B", "map": [["x", "y"]]},
        },
    )
    code, _, err = run_cli(capsys, ["count", "fix", "--map", path, "--n", "1"])
    assert code == 2
    assert "endo" in err


def test_deform_commands(capsys):
    code, out, _ = run_cli(capsys, ["deform", "validate", "--size", "2"])
    assert code == 0
    assert json.loads(out)["ok"] is True

    code, out, _ = run_cli(capsys, ["deform", "ho", "--size", "2"])
    assert code == 0
    assert json.loads(out)["report"]["objects"] == 6

    code, out, _ = run_cli(
        capsys,
        ["deform", "compare", "--size", "2", "--list", "condense,vertices"],
    )
    assert code == 0


def test_deform_table_model(tmp_path, capsys):
    doc = {
        "category": {
            "name": "toy",
            "objects": ["a", "b"],
            "homs": [
                {"src": "a", "dst": "a", "maps": ["ida"]},
                {"src": "b", "dst": "b", "maps": ["idb"]},
                {"src": "a", "dst": "b", "maps": ["u"]},
            ],
            "composition": [
                {"second": "ida", "first": "ida", "result": "ida"},
                {"second": "idb", "first": "idb", "result": "idb"},
                {"second": "u", "first": "ida", "result": "u"},
                {"second": "idb", "first": "u", "result": "u"},
            ],
            "identities": {"a": "ida", "b": "idb"},
            "we": ["ida", "idb", "u"],
        },
        "deformation": {
            "radiant": ["b"],
            "replace": {"a": "b", "b": "b"},
            "replace_mor": {"ida": "idb", "u": "idb"},
            "unit": {"a": "u", "b": "idb"},
        },
    }
    path = write(tmp_path, "model.json", doc)
    code, out, _ = run_cli(capsys, ["deform", "validate", "--model", path])
    assert code == 0
    assert json.loads(out)["ok"] is True
    code, out, _ = run_cli(capsys, ["deform", "ho", "--model", path])
    assert code == 0
    assert json.loads(out)["report"]["objects"] == 1


def test_usage_error_exit_two(capsys):
    code, _, _ = run_cli(capsys, ["coherence"])  # missing suite argument
    assert code == 2
