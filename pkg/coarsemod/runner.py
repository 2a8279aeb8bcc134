"""
Task execution for coarsemod.

This module handles turning a parsed TaskSpec into runtime objects (group,
ring, modules, morphisms, embeddings), dispatching to the owning library
module, and assembling the JSON Report. Property failures become failing
certificates in the report; misuse raises a CoarseModError subclass, which
the CLI maps to exit code 2.
"""

from __future__ import annotations

import json
import logging
import time
from contextlib import contextmanager
from typing import Any, Callable, Dict, Iterator, List, Tuple

from config import KERNEL_WINDOW, TOOL_VERSION, report_timings_enabled
from coarsemod.coarse_space import (
    Cover,
    MetricSubset,
    UniformEmbedding,
    ball,
    build_cover,
    enlarge,
    sample_pairs,
    verify_cover,
    verify_uniform_embedding,
)
from coarsemod.control import (
    FilteredMorphism,
    bound_of,
    check_bicontrolled,
    check_equivariance,
    classify_morphism,
    generator_bound,
)
from coarsemod.errors import MismatchedSpecsError, TaskSpecError
from coarsemod.filtered import (
    FilteredModule,
    PresentedModule,
    StandardFiltration,
    check_antithetic_insular,
    check_insular,
    check_lean,
    check_local_finiteness,
    cokernel_filtration,
    equivariant_of,
    image_filtration,
    product_filtration,
    pushforward,
)
from coarsemod.group_ring import GroupRingMatrix, vector_entries
from coarsemod.groups import Group, GroupElement, group_from_spec
from coarsemod.resolution import CAPPED, idempotent_image, resolve
from coarsemod.rings import Ring, ring_from_spec
from coarsemod.types import (
    Command,
    ControlCertificate,
    FiltrationKind,
    InsularVariant,
    ModuleSpec,
    Report,
    RingSpec,
    RingKind,
    SamplingPlan,
    TaskSpec,
    Verdict,
)

logger = logging.getLogger(__name__)

Outcome = Tuple[List[ControlCertificate], Dict[str, Any]]

EMBEDDING_PAIRS = 200


@contextmanager
def parsed(field: str) -> Iterator[None]:
    """Report malformed words, coefficients and shapes in task text as TaskSpecError."""
    try:
        yield
    except ValueError as exc:
        raise TaskSpecError(str(exc), field=field) from exc


class TaskContext:
    """Runtime objects built from one task."""

    def __init__(self, task: TaskSpec):
        self.task = task
        self.group: Group = group_from_spec(task.group)
        self.ring: Ring = ring_from_spec(task.ring or RingSpec(kind=RingKind.INTEGERS))
        self.plan = SamplingPlan(seed=task.seed)

    def require(self, name: str) -> Any:
        value = getattr(self.task, name)
        if value is None or value == []:
            raise TaskSpecError(f"command '{self.task.command.value}' needs '{name}'", field=name)
        return value

    def subset(self, group: Group | None = None) -> MetricSubset:
        with parsed("words"):
            return MetricSubset.from_words(group or self.group, self.task.words)

    def word(self, text: str) -> GroupElement:
        with parsed("words"):
            return self.group.normal_form(text)

    def module(self) -> PresentedModule:
        spec = self.task.module or ModuleSpec(rank=1)
        with parsed("module"):
            return PresentedModule.from_spec(self.group, self.ring, spec)

    def matrix(self) -> GroupRingMatrix:
        spec = self.require("morphism")
        with parsed("morphism"):
            return GroupRingMatrix.from_triplets(
                self.group, self.ring, spec.rows, spec.cols, [(t.row, t.col, t.entry) for t in spec.matrix]
            )

    def embedding(self) -> UniformEmbedding:
        spec = self.require("embedding")
        with parsed("embedding"):
            return UniformEmbedding.from_spec(self.group, spec)

    def filtered(self) -> FilteredModule:
        module = self.module()
        kind = (self.task.module.filtration if self.task.module else FiltrationKind.STANDARD)
        if kind == FiltrationKind.STANDARD:
            return StandardFiltration(module)
        if kind == FiltrationKind.PRODUCT:
            return product_filtration(module, module)
        if kind == FiltrationKind.PUSHFORWARD:
            return pushforward(StandardFiltration(module), self.embedding())
        matrix = self.matrix()
        if kind == FiltrationKind.COKERNEL:
            return cokernel_filtration(matrix, module)
        source = StandardFiltration(PresentedModule.free(self.group, self.ring, matrix.rows))
        return image_filtration(source, matrix, module)

    def morphism(self) -> FilteredMorphism:
        spec = self.require("morphism")
        matrix = self.matrix()
        module = self.task.module
        if module is not None and module.rank == matrix.rows:
            source = self.module()
        else:
            source = PresentedModule.free(self.group, self.ring, matrix.rows)
        if spec.target is not None:
            with parsed("morphism.target"):
                target = PresentedModule.from_spec(self.group, self.ring, spec.target)
        else:
            target = PresentedModule.free(self.group, self.ring, matrix.cols)
        return FilteredMorphism(
            StandardFiltration(source), StandardFiltration(target), matrix, equivariant=spec.equivariant
        )


# -- commands -----------------------------------------------------------


def _ball(ctx: TaskContext) -> Outcome:
    radius = ctx.task.radius if ctx.task.radius is not None else 0
    center = ctx.word(ctx.task.words[0]) if ctx.task.words else ctx.group.identity
    points = ball(center, radius)
    return [], {"center": center.word, "radius": radius, "size": len(points), "elements": points.words()}


def _distance(ctx: TaskContext) -> Outcome:
    words = ctx.require("words")
    if len(words) != 2:
        raise TaskSpecError("distance needs exactly two words", field="words")
    g, h = (ctx.word(w) for w in words)
    return [], {"pair": [g.word, h.word], "distance": ctx.group.distance(g, h)}


def _normal_form(ctx: TaskContext) -> Outcome:
    words = ctx.require("words")
    return [], {"normal_forms": {w: ctx.word(w).word for w in words}}


def _enlarge(ctx: TaskContext) -> Outcome:
    subset = ctx.subset()
    b = ctx.task.constant or 0
    grown = enlarge(subset, b)
    return [], {"constant": b, "size": len(grown), "elements": grown.words()}


def _cover(ctx: TaskContext) -> Outcome:
    window = ball(ctx.group.identity, ctx.task.window)
    if ctx.task.cover is not None:
        with parsed("cover"):
            cover = Cover.from_spec(ctx.group, ctx.task.cover)
        separation = ctx.task.separation if ctx.task.separation is not None else cover.separation
    else:
        separation = ctx.task.separation if ctx.task.separation is not None else 2
        cover = build_cover(ctx.task.group, separation)
    certificate = verify_cover(cover, separation, window)
    result = {"families": cover.family_count, "bound": cover.bound, "separation": separation}
    return [certificate], result


def _embed_check(ctx: TaskContext) -> Outcome:
    embedding = ctx.embedding()
    pairs = sample_pairs(ctx.group, ctx.task.window, EMBEDDING_PAIRS, ctx.task.seed)
    return [verify_uniform_embedding(embedding, pairs)], {"target": embedding.target.spec.alias}


def _filtration(ctx: TaskContext) -> Outcome:
    filtered = ctx.filtered()
    subset = ctx.subset(filtered.group)
    piece = filtered.evaluate(subset, ctx.task.window)
    certificate = check_local_finiteness(filtered, subset, ctx.task.constant or 0)
    result = {
        "filtration": filtered.kind.value,
        "subset": subset.words(),
        "rank": piece.quotient_rank(),
        "generators": [[e.model_dump() for e in vector_entries(v, filtered.ring)] for v in piece.generators],
    }
    return [certificate], result


def _lean_check(ctx: TaskContext) -> Outcome:
    filtered = ctx.filtered()
    constant = ctx.task.constant or 0
    return [check_lean(filtered, constant, ctx.task.window, ctx.plan)], {"filtration": filtered.kind.value}


def _insular_check(ctx: TaskContext) -> Outcome:
    filtered = ctx.filtered()
    constant = ctx.task.constant or 0
    if ctx.task.variant == InsularVariant.ANTITHETIC:
        certificate = check_antithetic_insular(filtered, constant, ctx.task.window, ctx.plan)
    else:
        certificate = check_insular(filtered, constant, ctx.task.window, ctx.plan)
    return [certificate], {"filtration": filtered.kind.value, "variant": ctx.task.variant.value}


def _control_check(ctx: TaskContext) -> Outcome:
    phi = ctx.morphism()
    bound = bound_of(phi, ctx.task.window, ctx.plan)
    certificates = [bound]
    b = ctx.task.constant if ctx.task.constant is not None else bound.constant
    if b is not None:
        certificates.append(check_bicontrolled(phi, b, ctx.task.window, ctx.plan))
    result: Dict[str, Any] = {"measured_bound": bound.constant}
    if phi.is_group_ring_linear:
        result["generator_bound"] = generator_bound(phi)
    return certificates, result


def _classify(ctx: TaskContext) -> Outcome:
    classification = classify_morphism(ctx.morphism(), ctx.task.window, ctx.plan)
    certificates = [classification.bound]
    if classification.bicontrol is not None:
        certificates.append(classification.bicontrol)
    return certificates, classification.to_json()


def _equivariance(ctx: TaskContext) -> Outcome:
    window = min(ctx.task.window, 4)
    if ctx.task.morphism is not None:
        certificate = check_equivariance(ctx.morphism(), window=window, seed=ctx.task.seed)
        return [certificate], {"subject": "morphism"}
    structure = equivariant_of(ctx.module(), window=window, seed=ctx.task.seed)
    return [structure.certificate], {"subject": "structure"}


def _resolve(ctx: TaskContext) -> Outcome:
    module = ctx.module()
    complete = True if ctx.task.tier_a else False
    radius = min(ctx.task.window, KERNEL_WINDOW)
    chain = resolve(module, ctx.task.max_depth, complete=complete, radius=radius, plan=ctx.plan)
    result = chain.to_json()
    result["composes_to_zero"] = chain.composes_to_zero()
    certificates = [c for c in chain.certificates if c.kind.value == "exactness"]
    trace = [c for c in chain.certificates if c.kind.value != "exactness"]
    result["stage_constants"] = [
        {
            "stage": c.details.get("stage"),
            "kind": c.kind.value,
            "constant": c.constant,
            "verdict": c.verdict.value,
            "capped": CAPPED in c.tags,
        }
        for c in trace
    ]
    if not chain.composes_to_zero():
        raise MismatchedSpecsError("differentials do not compose to zero")
    return certificates, result


def _idempotent(ctx: TaskContext) -> Outcome:
    report = idempotent_image(ctx.matrix(), ctx.task.window, ctx.plan)
    return report.certificates, {"bound": report.bound.constant, "rank": report.matrix.rows}


COMMANDS: Dict[Command, Callable[[TaskContext], Outcome]] = {
    Command.BALL: _ball,
    Command.DISTANCE: _distance,
    Command.NORMAL_FORM: _normal_form,
    Command.ENLARGE: _enlarge,
    Command.COVER: _cover,
    Command.EMBED_CHECK: _embed_check,
    Command.FILTRATION: _filtration,
    Command.LEAN_CHECK: _lean_check,
    Command.INSULAR_CHECK: _insular_check,
    Command.CONTROL_CHECK: _control_check,
    Command.CLASSIFY: _classify,
    Command.EQUIVARIANCE: _equivariance,
    Command.RESOLVE: _resolve,
    Command.IDEMPOTENT: _idempotent,
}


def run(task: TaskSpec) -> Report:
    """Run one task and assemble its report."""
    started = time.perf_counter()
    logger.info("running %s on %s", task.command.value, task.group.alias)
    certificates, result = COMMANDS[task.command](TaskContext(task))
    failures = [c for c in certificates if not c.passed]
    report = Report(
        tool_version=TOOL_VERSION,
        task=task.model_dump(mode="json"),
        verdict=Verdict.FAIL if failures else Verdict.PASS,
        certificates=certificates,
        counterexamples=[c.counterexample for c in failures if c.counterexample is not None],
        result=result,
        timings={"total": round(time.perf_counter() - started, 6)} if report_timings_enabled() else None,
    )
    logger.info("%s finished: %s", task.command.value, report.verdict.value)
    return report


def report_json(report: Report) -> str:
    """Canonical JSON text of a report (sorted keys, stable across runs)."""
    return json.dumps(report.model_dump(mode="json", exclude_none=True), indent=2, sort_keys=True)
