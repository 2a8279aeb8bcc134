"""
Task loading for the coarsemod CLI.

This module handles reading one task per YAML (or JSON) file, rejecting
unknown keys, expanding shorthands (group and ring aliases, `trivial` and
`free` modules, one-entry morphisms, parameter aliases such as `r` and `d`)
and applying per-family defaults, before handing the result to the pydantic
TaskSpec model.
"""

from __future__ import annotations

import logging
from typing import Any, Dict, List, Mapping

import yaml
from pydantic import ValidationError

from config import (
    DEFAULT_MAX_DEPTH,
    DEFAULT_SEED,
    DEFAULT_WINDOW_BAUMSLAG_SOLITAR,
    DEFAULT_WINDOW_FREE,
    DEFAULT_WINDOW_FREE_ABELIAN,
    DEFAULT_WINDOW_OTHER,
)
from coarsemod.errors import TaskSpecError
from coarsemod.types import (
    Command,
    CoverSpec,
    EmbeddingSpec,
    FiltrationKind,
    GroupFamily,
    GroupSpec,
    InsularVariant,
    ModuleSpec,
    MorphismSpec,
    RingKind,
    RingSpec,
    TaskSpec,
    Triplet,
    WitnessTable,
)

logger = logging.getLogger(__name__)

PARAMETER_ALIASES = {"r": "radius", "D": "constant", "d": "constant", "b": "constant", "R": "separation"}
TASK_KEYS = set(TaskSpec.model_fields)


def default_window(group: GroupSpec) -> int:
    if group.family == GroupFamily.FREE_ABELIAN and (group.rank or 0) <= 2:
        return DEFAULT_WINDOW_FREE_ABELIAN
    if group.family == GroupFamily.FREE:
        return DEFAULT_WINDOW_FREE
    if group.family == GroupFamily.BAUMSLAG_SOLITAR:
        return DEFAULT_WINDOW_BAUMSLAG_SOLITAR
    return DEFAULT_WINDOW_OTHER


def _check_keys(data: Mapping[str, Any], allowed: set, where: str) -> None:
    unknown = set(data.keys()) - allowed
    if unknown:
        raise TaskSpecError(
            f"Unknown keys in {where}: {sorted(unknown)}. Allowed keys: {sorted(allowed)}", field=where
        )


def _mapping(value: Any, where: str) -> Dict[str, Any]:
    if not isinstance(value, dict):
        raise TaskSpecError(f"'{where}' must be a mapping (object)", field=where)
    return {k: v for k, v in value.items() if v is not None}


def _enum(enum_type, value: Any, where: str):
    try:
        return enum_type(value)
    except ValueError:
        allowed = [member.value for member in enum_type]
        raise TaskSpecError(f"'{value}' is not one of {allowed}", field=where) from None


class TaskLoader:
    """Loads task specifications from YAML files."""

    @staticmethod
    def load_from_file(path: str) -> TaskSpec:
        """Load a task from a YAML file; FileNotFoundError propagates."""
        with open(path, "r") as f:
            try:
                data = yaml.safe_load(f)
            except yaml.YAMLError as exc:
                mark = getattr(exc, "problem_mark", None)
                where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
                raise TaskSpecError(f"YAML error in {path}{where}: {getattr(exc, 'problem', exc)}") from None

        if not isinstance(data, dict):
            raise TaskSpecError("Task root must be a mapping (object)")
        allowed = TASK_KEYS | set(PARAMETER_ALIASES)
        unknown = set(data.keys()) - allowed
        if unknown:
            raise TaskSpecError(
                f"Unknown top-level keys in task: {sorted(unknown)}. Allowed keys: {sorted(allowed)}"
            )
        logger.debug("loaded task file %s", path)
        return TaskLoader.load_from_dict(data)

    @staticmethod
    def load_from_dict(data: Mapping[str, Any]) -> TaskSpec:
        """Build a TaskSpec from a mapping with shorthands and defaults resolved."""
        values: Dict[str, Any] = {}
        for key, value in data.items():
            if value is None:
                continue
            name = PARAMETER_ALIASES.get(key, key)
            if name not in TASK_KEYS:
                allowed = sorted(TASK_KEYS | set(PARAMETER_ALIASES))
                raise TaskSpecError(f"Unknown top-level keys in task: ['{key}']. Allowed keys: {allowed}")
            if name in values:
                raise TaskSpecError(f"'{key}' repeats parameter '{name}'", field=name)
            values[name] = value

        if "command" not in values:
            raise TaskSpecError("Task must contain 'command'", field="command")
        if "group" not in values:
            raise TaskSpecError("Task must contain 'group'", field="group")

        values["command"] = _enum(Command, values["command"], "command")
        group = TaskLoader._group(values["group"], "group")
        values["group"] = group
        ring = TaskLoader._ring(values.get("ring", "ZZ"), "ring")
        values["ring"] = ring
        if "module" in values:
            values["module"] = TaskLoader._module(values["module"], group, "module")
        if "morphism" in values:
            values["morphism"] = TaskLoader._morphism(values["morphism"], group)
        if "embedding" in values:
            values["embedding"] = TaskLoader._embedding(values["embedding"])
        if "cover" in values:
            cover = _mapping(values["cover"], "cover")
            _check_keys(cover, set(CoverSpec.model_fields), "cover")
            values["cover"] = TaskLoader._validated(CoverSpec, cover, "cover")
        if "variant" in values:
            values["variant"] = _enum(InsularVariant, values["variant"], "variant")
        if isinstance(values.get("words"), str):
            values["words"] = [values["words"]]

        values.setdefault("window", default_window(group))
        values.setdefault("seed", DEFAULT_SEED)
        values.setdefault("max_depth", DEFAULT_MAX_DEPTH)
        values.setdefault("tier_a", group.family == GroupFamily.FREE_ABELIAN and ring.is_field)
        return TaskLoader._validated(TaskSpec, values, "task")

    # -- sections ---------------------------------------------------------

    @staticmethod
    def _validated(model, values: Dict[str, Any], where: str):
        try:
            return model(**values)
        except ValidationError as exc:
            first = exc.errors()[0]
            location = ".".join(str(part) for part in (where, *first["loc"]))
            raise TaskSpecError(first["msg"].removeprefix("Value error, "), field=location) from None
        except TypeError as exc:
            raise TaskSpecError(str(exc), field=where) from None

    @staticmethod
    def _group(value: Any, where: str) -> GroupSpec:
        if isinstance(value, GroupSpec):
            return value
        if isinstance(value, str):
            try:
                return GroupSpec.from_alias(value)
            except ValueError as exc:
                raise TaskSpecError(str(exc), field=where) from None
        data = _mapping(value, where)
        _check_keys(data, set(GroupSpec.model_fields), where)
        if "family" not in data:
            raise TaskSpecError("group needs a 'family'", field=where)
        data["family"] = _enum(GroupFamily, data["family"], f"{where}.family")
        return TaskLoader._validated(GroupSpec, data, where)

    @staticmethod
    def _ring(value: Any, where: str) -> RingSpec:
        if isinstance(value, RingSpec):
            return value
        if isinstance(value, str):
            try:
                return RingSpec.from_alias(value)
            except ValueError as exc:
                raise TaskSpecError(str(exc), field=where) from None
        data = _mapping(value, where)
        _check_keys(data, set(RingSpec.model_fields), where)
        if "kind" not in data:
            raise TaskSpecError("ring needs a 'kind'", field=where)
        data["kind"] = _enum(RingKind, data["kind"], f"{where}.kind")
        return TaskLoader._validated(RingSpec, data, where)

    @staticmethod
    def _triplets(value: Any, where: str) -> List[Triplet]:
        if not isinstance(value, list):
            raise TaskSpecError("expected a list of [row, col, entry] triplets", field=where)
        triplets = []
        for k, item in enumerate(value):
            if isinstance(item, dict):
                entry = _mapping(item, f"{where}[{k}]")
                _check_keys(entry, set(Triplet.model_fields), f"{where}[{k}]")
            elif isinstance(item, list) and len(item) == 3:
                entry = {"row": item[0], "col": item[1], "entry": item[2]}
            else:
                raise TaskSpecError("expected [row, col, entry]", field=f"{where}[{k}]")
            entry["entry"] = str(entry.get("entry", ""))
            triplets.append(TaskLoader._validated(Triplet, entry, f"{where}[{k}]"))
        return triplets

    @staticmethod
    def _module(value: Any, group: GroupSpec, where: str) -> ModuleSpec:
        if isinstance(value, str):
            if value == "trivial":
                names = group.generator_names()
                relations = [Triplet(row=i, col=0, entry=f"{name} - 1") for i, name in enumerate(names)]
                return ModuleSpec(rank=1, relations=relations)
            if value == "free":
                return ModuleSpec(rank=1)
            raise TaskSpecError(f"unknown module shorthand '{value}'; use 'trivial', 'free' or a mapping", field=where)
        data = _mapping(value, where)
        _check_keys(data, set(ModuleSpec.model_fields), where)
        if "relations" in data:
            data["relations"] = TaskLoader._triplets(data["relations"], f"{where}.relations")
        if "sigma" in data:
            data["sigma"] = [[str(entry) for entry in expression] for expression in data["sigma"]]
        if "filtration" in data:
            data["filtration"] = _enum(FiltrationKind, data["filtration"], f"{where}.filtration")
        return TaskLoader._validated(ModuleSpec, data, where)

    @staticmethod
    def _morphism(value: Any, group: GroupSpec) -> MorphismSpec:
        if isinstance(value, (str, int)):
            return MorphismSpec(rows=1, cols=1, matrix=[Triplet(row=0, col=0, entry=str(value))])
        data = _mapping(value, "morphism")
        _check_keys(data, set(MorphismSpec.model_fields), "morphism")
        if "matrix" in data:
            data["matrix"] = TaskLoader._triplets(data["matrix"], "morphism.matrix")
        if "target" in data:
            data["target"] = TaskLoader._module(data["target"], group, "morphism.target")
        return TaskLoader._validated(MorphismSpec, data, "morphism")

    @staticmethod
    def _witness(value: Any, where: str) -> WitnessTable:
        if isinstance(value, dict):
            data = _mapping(value, where)
            _check_keys(data, set(WitnessTable.model_fields), where)
        elif isinstance(value, list):
            data = {"points": value}
        else:
            raise TaskSpecError("witness functions are breakpoint lists", field=where)
        return TaskLoader._validated(WitnessTable, data, where)

    @staticmethod
    def _embedding(value: Any) -> EmbeddingSpec:
        data = _mapping(value, "embedding")
        _check_keys(data, set(EmbeddingSpec.model_fields), "embedding")
        for key in ("target", "images", "f", "g"):
            if key not in data:
                raise TaskSpecError(f"embedding needs '{key}'", field=f"embedding.{key}")
        data["target"] = TaskLoader._group(data["target"], "embedding.target")
        data["images"] = {str(k): str(v) for k, v in _mapping(data["images"], "embedding.images").items()}
        data["f"] = TaskLoader._witness(data["f"], "embedding.f")
        data["g"] = TaskLoader._witness(data["g"], "embedding.g")
        return TaskLoader._validated(EmbeddingSpec, data, "embedding")


def parse_spec(path: str) -> TaskSpec:
    return TaskLoader.load_from_file(path)


def task_from_echo(echo: Mapping[str, Any]) -> TaskSpec:
    """Re-parse the task echoed into a report."""
    return TaskLoader.load_from_dict(echo)
