import pytest

from config import DEFAULT_WINDOW_BAUMSLAG_SOLITAR, DEFAULT_WINDOW_FREE, DEFAULT_WINDOW_FREE_ABELIAN
from coarsemod.errors import TaskSpecError
from coarsemod.loader import TaskLoader, parse_spec, task_from_echo
from coarsemod.types import Command, FiltrationKind, GroupFamily, InsularVariant, RingKind


def write(tmp_path, text, name="task.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_minimal_task_gets_defaults():
    task = TaskLoader.load_from_dict({"command": "lean-check", "group": "Z2", "module": "free"})
    assert task.command == Command.LEAN_CHECK
    assert task.ring.kind == RingKind.INTEGERS
    assert task.window == DEFAULT_WINDOW_FREE_ABELIAN
    assert task.seed == 0 and task.max_depth == 4
    assert task.variant == InsularVariant.STRICT
    assert not task.tier_a


@pytest.mark.parametrize(
    "group,window",
    [("F2", DEFAULT_WINDOW_FREE), ("BS(1,2)", DEFAULT_WINDOW_BAUMSLAG_SOLITAR), ("Z", DEFAULT_WINDOW_FREE_ABELIAN)],
)
def test_family_default_windows(group, window):
    assert TaskLoader.load_from_dict({"command": "ball", "group": group}).window == window


@pytest.mark.parametrize(
    "group,ring,expected",
    [("Z", "QQ", True), ("Z3", "GF(5)", True), ("Z", "ZZ", False), ("F2", "QQ", False), ("Z2", "Z/4", False)],
)
def test_tier_a_inference(group, ring, expected):
    task = TaskLoader.load_from_dict({"command": "resolve", "group": group, "ring": ring, "module": "trivial"})
    assert task.tier_a is expected


@pytest.mark.parametrize("alias,field", [("r", "radius"), ("D", "constant"), ("d", "constant"), ("b", "constant"), ("R", "separation")])
def test_parameter_aliases(alias, field):
    task = TaskLoader.load_from_dict({"command": "ball", "group": "Z", alias: 3})
    assert getattr(task, field) == 3


def test_repeated_parameter_is_rejected():
    with pytest.raises(TaskSpecError) as exc:
        TaskLoader.load_from_dict({"command": "lean-check", "group": "Z", "D": 1, "constant": 2})
    assert exc.value.field == "constant"


def test_constant_exceeds_window():
    with pytest.raises(TaskSpecError) as exc:
        TaskLoader.load_from_dict({"command": "lean-check", "group": "Z", "module": "free", "D": 9, "window": 5})
    assert "constant exceeds window" in str(exc.value)


def test_missing_command_and_group():
    with pytest.raises(TaskSpecError) as exc:
        TaskLoader.load_from_dict({"group": "Z"})
    assert exc.value.field == "command"
    with pytest.raises(TaskSpecError):
        TaskLoader.load_from_dict({"command": "ball"})


def test_unknown_values():
    with pytest.raises(TaskSpecError, match="is not one of"):
        TaskLoader.load_from_dict({"command": "prove", "group": "Z"})
    with pytest.raises(TaskSpecError, match="Unknown group alias"):
        TaskLoader.load_from_dict({"command": "ball", "group": "SL2"})
    with pytest.raises(TaskSpecError, match="Unknown ring alias"):
        TaskLoader.load_from_dict({"command": "ball", "group": "Z", "ring": "RR"})
    with pytest.raises(TaskSpecError, match="unknown module shorthand"):
        TaskLoader.load_from_dict({"command": "lean-check", "group": "Z", "module": "projective"})


def test_trivial_shorthand_uses_generator_names():
    task = TaskLoader.load_from_dict({"command": "lean-check", "group": "F2", "module": "trivial"})
    assert [t.entry for t in task.module.relations] == ["a - 1", "b - 1"]
    assert task.module.rank == 1


def test_module_mapping():
    task = TaskLoader.load_from_dict(
        {
            "command": "filtration",
            "group": "Z",
            "module": {"rank": 2, "relations": [[0, 1, "t^2 - 1"]], "sigma": [["1", 0]], "filtration": "product"},
        }
    )
    assert task.module.relations[0].entry == "t^2 - 1"
    assert task.module.sigma == [["1", "0"]]
    assert task.module.filtration == FiltrationKind.PRODUCT


def test_module_shape_errors():
    with pytest.raises(TaskSpecError) as exc:
        TaskLoader.load_from_dict(
            {"command": "filtration", "group": "Z", "module": {"rank": 1, "relations": [[0, 2, "t"]]}}
        )
    assert exc.value.field.startswith("module")
    with pytest.raises(TaskSpecError, match="Unknown keys in module"):
        TaskLoader.load_from_dict({"command": "filtration", "group": "Z", "module": {"rank": 1, "gens": []}})


def test_morphism_shorthand():
    task = TaskLoader.load_from_dict({"command": "control-check", "group": "Z", "morphism": "t - 1"})
    assert (task.morphism.rows, task.morphism.cols) == (1, 1)
    assert task.morphism.matrix[0].entry == "t - 1"


def test_embedding_section():
    task = TaskLoader.load_from_dict(
        {
            "command": "embed-check",
            "group": "Z",
            "embedding": {"target": "Z", "images": {"t": "t^2"}, "f": [[0, 0], [1, 2]], "g": {"points": [[0, 0], [1, 2]]}},
        }
    )
    assert task.embedding.target.family == GroupFamily.FREE_ABELIAN
    assert task.embedding.g.points == [[0, 0], [1, 2]]
    with pytest.raises(TaskSpecError) as exc:
        TaskLoader.load_from_dict({"command": "embed-check", "group": "Z", "embedding": {"target": "Z"}})
    assert exc.value.field == "embedding.images"


def test_group_mapping():
    task = TaskLoader.load_from_dict(
        {"command": "ball", "group": {"family": "baumslag_solitar", "m": 1, "n": 3}, "r": 2}
    )
    assert task.group.alias == "BS(1,3)"
    with pytest.raises(TaskSpecError):
        TaskLoader.load_from_dict({"command": "ball", "group": {"family": "free", "rank": 0}})


def test_words_accept_a_single_string():
    task = TaskLoader.load_from_dict({"command": "normal-form", "group": "F2", "words": "a b A"})
    assert task.words == ["a b A"]


def test_load_from_file(tmp_path):
    path = write(tmp_path, "command: insular-check\ngroup: Z\nmodule: trivial\nd: 2\nvariant: antithetic\nwindow: 12\n")
    task = parse_spec(path)
    assert task.constant == 2
    assert task.variant == InsularVariant.ANTITHETIC


def test_unknown_top_level_keys(tmp_path):
    path = write(tmp_path, "command: ball\ngroup: Z\ncolour: blue\n")
    with pytest.raises(TaskSpecError, match=r"Unknown top-level keys in task: \['colour'\]"):
        TaskLoader.load_from_file(path)


def test_yaml_errors_are_located(tmp_path):
    path = write(tmp_path, "command: ball\ngroup: [Z\n")
    with pytest.raises(TaskSpecError, match="YAML error"):
        TaskLoader.load_from_file(path)
    with pytest.raises(TaskSpecError, match="mapping"):
        TaskLoader.load_from_file(write(tmp_path, "- ball\n", "list.yaml"))


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        TaskLoader.load_from_file(str(tmp_path / "absent.yaml"))


def test_echo_round_trip():
    task = TaskLoader.load_from_dict(
        {
            "command": "lean-check",
            "group": "Z2",
            "ring": "Z/4",
            "module": {"rank": 1, "relations": [[0, 0, "t1 - 1"]]},
            "D": 1,
            "window": 6,
            "seed": 7,
        }
    )
    assert task_from_echo(task.model_dump(mode="json")) == task
