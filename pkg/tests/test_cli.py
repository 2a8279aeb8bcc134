import json

import pytest

from coarsemod.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, create_parser, load_manifest, main
from coarsemod.errors import TaskSpecError

BALL = "command: ball\ngroup: F2\nr: 2\n"
INSULAR_TRIVIAL = "command: insular-check\ngroup: Z\nmodule: trivial\nd: 1\nwindow: 10\n"
RESOLVE = "command: resolve\ngroup: Z\nring: QQ\nmodule: trivial\nwindow: 4\n"


@pytest.fixture
def task(tmp_path):
    def write(text, name="task.yaml"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def test_parser_defaults():
    args = create_parser().parse_args(["task.yaml"])
    assert args.format == "json"
    assert args.corpus is None
    assert create_parser().parse_args(["--corpus"]).corpus == ""


def test_passing_task_prints_json(task, capsys):
    assert main([task(BALL)]) == EXIT_PASS
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == "pass"
    assert report["result"]["size"] == 17
    assert report["task"]["command"] == "ball"
    assert "timings" not in report


def test_failing_property_exits_one(task, capsys):
    assert main([task(INSULAR_TRIVIAL)]) == EXIT_FAIL
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == "fail"
    assert report["counterexamples"]
    assert report["certificates"][0]["kind"] == "insular"


def test_missing_file_is_a_usage_error(tmp_path, capsys):
    assert main([str(tmp_path / "absent.yaml")]) == EXIT_USAGE
    assert "file not found" in capsys.readouterr().err


def test_malformed_task_is_a_usage_error(task, capsys):
    assert main([task("command: ball\ngroup: Z\nfoo: 1\n")]) == EXIT_USAGE
    assert "Unknown top-level keys" in capsys.readouterr().err


@pytest.mark.parametrize(
    "body,field",
    [
        ("command: control-check\ngroup: Z\nmorphism: 'x/y t'\n", "morphism"),
        ("command: control-check\ngroup: Z\nmorphism: 't - &'\n", "morphism"),
        ("command: normal-form\ngroup: F2\nwords: ['a % b']\n", "words"),
        ("command: lean-check\ngroup: Z\nmodule: {rank: 1, relations: [[0, 0, '2/x']]}\n", "module"),
    ],
)
def test_malformed_task_text_is_a_usage_error(task, capsys, body, field):
    assert main([task(body)]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert err.startswith(f"error: {field}: ")


def test_window_override_rechecks_constant(task, capsys):
    path = task("command: lean-check\ngroup: Z\nmodule: free\nD: 5\nwindow: 10\n")
    assert main([path, "--window", "3"]) == EXIT_USAGE
    assert "constant exceeds window" in capsys.readouterr().err


def test_task_file_is_required(capsys):
    assert main([]) == EXIT_USAGE
    assert "task file is required" in capsys.readouterr().err


def test_emit_chain(task, tmp_path, capsys):
    chain_path = tmp_path / "chain.json"
    assert main([task(RESOLVE), "--emit-chain", str(chain_path)]) == EXIT_PASS
    chain = json.loads(chain_path.read_text())
    assert chain["ranks"] == [1, 1]
    assert chain["differentials"][0]["rows"] == 1
    assert chain["composes_to_zero"] is True
    report = json.loads(capsys.readouterr().out)
    assert report["result"]["modes"] == ["presentation"]
    assert [s["capped"] for s in report["result"]["stage_constants"]] == [False, False]


def test_reports_are_deterministic(task, tmp_path, monkeypatch):
    monkeypatch.delenv("COARSEMOD_REPORT_TIMINGS", raising=False)
    path = task(INSULAR_TRIVIAL)
    first, second = tmp_path / "one.json", tmp_path / "two.json"
    main([path, "--seed", "3", "--output", str(first)])
    main([path, "--seed", "3", "--output", str(second)])
    assert first.read_text() == second.read_text()
    assert json.loads(first.read_text())["task"]["seed"] == 3


def test_table_format(task, capsys):
    assert main([task(BALL), "--format", "table"]) == EXIT_PASS
    assert "ball" in capsys.readouterr().out


def test_corpus_run(task, tmp_path):
    task(BALL, "ball.yaml")
    task(INSULAR_TRIVIAL, "insular.yaml")
    task(
        "version: 1\ntasks:\n  - ball.yaml\n  - {file: insular.yaml, expect: fail}\n"
        "  - {file: absent.yaml, expect: error}\n",
        "manifest.yaml",
    )
    assert main(["--corpus", str(tmp_path)]) == EXIT_PASS


def test_corpus_mismatch(task, tmp_path):
    task(INSULAR_TRIVIAL, "insular.yaml")
    task("tasks:\n  - insular.yaml\n", "manifest.yaml")
    assert main(["--corpus", str(tmp_path)]) == EXIT_FAIL


def test_manifest_shape(task, tmp_path):
    task("tasks: nothing\n", "manifest.yaml")
    with pytest.raises(TaskSpecError):
        load_manifest(str(tmp_path))
    task("tasks:\n  - ball.yaml\n  - {expect: fail}\n", "manifest.yaml")
    with pytest.raises(TaskSpecError):
        load_manifest(str(tmp_path))
