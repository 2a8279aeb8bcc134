"""
Free covers, kernels and resolutions of presented modules.

This module handles:
- the free cover R[G]^|Sigma| -> F sending each basis element to a generator,
- kernels of morphisms between free modules (exact over R[Z^n] with R a
  field, window-verified elsewhere),
- iteration of both into a resolution with per-stage window certificates,
- the image / cokernel pipeline of a filtered morphism,
- images of idempotent matrices, with the complement check and a generator
  of test idempotents.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Sequence

from config import KERNEL_WINDOW
from coarsemod.coarse_space import ball
from coarsemod.control import (
    FilteredMorphism,
    bound_of,
    check_bicontrolled,
    generator_bound,
)
from coarsemod.errors import MismatchedSpecsError, NotIdempotentError, UnsupportedTierError
from coarsemod.filtered import (
    ImageFiltration,
    PresentedModule,
    StandardFiltration,
    check_insular,
    check_lean,
    cokernel_filtration,
    minimal_constant,
)
from coarsemod.group_ring import (
    GroupRingElement,
    GroupRingMatrix,
    ModuleVector,
    apply_matrix,
    basis_vector,
    vector_entries,
    vector_to_row,
)
from coarsemod.groups import Group, GroupElement
from coarsemod.linalg import WindowSubmodule, intersect, linear_map_kernel, sum_of
from coarsemod.rings import Ring, ring_from_spec
from coarsemod.syzygies import (
    SyzygyResult,
    groebner_syzygies,
    is_tier_a,
    relation_window,
    window_syzygies,
)
from coarsemod.types import (
    CertificateKind,
    ControlCertificate,
    Counterexample,
    RingKind,
    RingSpec,
    SamplingPlan,
    Verdict,
)

logger = logging.getLogger(__name__)

HYPOTHESIS_UNMET = "hypothesis unmet"
# a constant equal to the window leaves only ball(e, 0) to sample
CAPPED = "capped at window"


def _tagged(certificate: ControlCertificate, *tags: str, **details) -> ControlCertificate:
    return certificate.model_copy(
        update={"tags": certificate.tags + list(tags), "details": {**certificate.details, **details}}
    )


# -- free covers ----------------------------------------------------------


@dataclass
class FreeCover:
    """pi: R[G]^|Sigma| -> F, basis element k -> sigma_k."""

    module: PresentedModule
    free: PresentedModule
    projection: GroupRingMatrix

    @property
    def rank(self) -> int:
        return self.free.rank

    @property
    def is_standard(self) -> bool:
        """Sigma is the standard basis, so pi is the quotient map."""
        return self.projection == GroupRingMatrix.identity(self.module.group, self.module.ring, self.module.rank)

    def morphism(self) -> FilteredMorphism:
        return FilteredMorphism(StandardFiltration(self.free), StandardFiltration(self.module), self.projection)


def free_cover(module: PresentedModule) -> FreeCover:
    group, ring = module.group, module.ring
    rows = [vector_to_row(sigma, group, ring, module.rank) for sigma in module.sigma]
    projection = GroupRingMatrix.from_rows(group, ring, rows)
    return FreeCover(module, PresentedModule.free(group, ring, len(rows)), projection)


def certify_cover(cover: FreeCover, window: int, plan: SamplingPlan | None = None) -> List[ControlCertificate]:
    """Measured bound of pi and bicontrol at that bound."""
    pi = cover.morphism()
    bound = bound_of(pi, window, plan)
    if bound.constant is None:
        return [bound]
    return [bound, check_bicontrolled(pi, bound.constant, window, plan)]


# -- kernels --------------------------------------------------------------


def kernel_of(
    phi: FilteredMorphism | GroupRingMatrix,
    complete: bool | None = None,
    radius: int | None = None,
) -> SyzygyResult:
    """Kernel generators of a morphism out of a free module.

    `complete=True` demands an exact generating set and raises
    UnsupportedTierError outside R[Z^n] with R a field; `None` picks the
    exact route whenever it is available.
    """
    if isinstance(phi, FilteredMorphism):
        if not phi.source.module.is_free:
            raise MismatchedSpecsError("kernel_of needs a free source module")
        matrix = phi.matrix
        target = phi.target.module
        relations = None if target.is_free else target.relations
    else:
        matrix, relations = phi, None
    tier_a = is_tier_a(matrix.group, matrix.ring)
    if complete and not tier_a:
        raise UnsupportedTierError(
            f"complete kernels are only computed over fields and free abelian groups,"
            f" not {matrix.ring.spec.alias}[{matrix.group.spec.alias}]"
        )
    if complete is None:
        complete = tier_a
    if complete:
        return groebner_syzygies(matrix, relations)
    return window_syzygies(matrix, relations, radius if radius is not None else KERNEL_WINDOW)


def _window_kernel(
    outgoing: GroupRingMatrix, relations: GroupRingMatrix | None, radius: int
) -> List[ModuleVector]:
    group, ring = outgoing.group, outgoing.ring
    domain = [(g, i) for g in group.identity_ball(radius) for i in range(outgoing.rows)]
    images = [apply_matrix({coord: ring.one}, outgoing) for coord in domain]
    base = None
    if relations is not None:
        base = relation_window(relations, radius + outgoing.radius + relations.radius)
    return linear_map_kernel(domain, images, ring, base)


def check_exactness(
    outgoing: GroupRingMatrix,
    incoming: GroupRingMatrix | None,
    radius: int,
    slack: int,
    relations: GroupRingMatrix | None = None,
) -> ControlCertificate:
    """Every window kernel element of `outgoing` at radius r is hit by `incoming` from radius r + slack."""
    group, ring = outgoing.group, outgoing.ring
    kernel = _window_kernel(outgoing, relations, radius)
    if incoming is None:
        image = WindowSubmodule(ring, [])
    else:
        sources = [basis_vector(g, i, ring) for g in group.identity_ball(radius + slack) for i in range(incoming.rows)]
        image = WindowSubmodule(ring, [apply_matrix(v, incoming) for v in sources], label="image")
    missed = next((v for v in kernel if v not in image), None)
    counterexample = None
    if missed is not None:
        counterexample = Counterexample(
            witness=vector_entries(missed, ring), note=f"kernel element not hit from radius {radius + slack}"
        )
    verdict = Verdict.FAIL if counterexample else Verdict.PASS
    logger.info("exactness at radius %d with slack %d: %s", radius, slack, verdict.value)
    return ControlCertificate(
        kind=CertificateKind.EXACTNESS,
        constant=slack,
        window=radius,
        verdict=verdict,
        counterexample=counterexample,
        details={"kernel_vectors": len(kernel)},
    )


# -- resolutions ----------------------------------------------------------


@dataclass
class ResolutionChain:
    """... -> F_2 -> F_1 -> F_0 -> F -> 0 with d_i given as rank_i x rank_(i-1) matrices."""

    module: PresentedModule
    projection: GroupRingMatrix
    differentials: List[GroupRingMatrix]
    modes: List[str]
    terminated: bool
    certificates: List[ControlCertificate] = field(default_factory=list)
    bounds: List[int] = field(default_factory=list)

    @property
    def ranks(self) -> List[int]:
        return [self.projection.rows] + [d.rows for d in self.differentials]

    @property
    def length(self) -> int:
        return len(self.differentials)

    def composes_to_zero(self) -> bool:
        """d_i d_(i+1) = 0 exactly for i >= 1."""
        return all((later @ earlier).is_zero() for earlier, later in zip(self.differentials, self.differentials[1:]))

    @property
    def passed(self) -> bool:
        return self.composes_to_zero() and all(c.passed for c in self.certificates)

    def to_json(self) -> Dict[str, object]:
        def sparse(matrix: GroupRingMatrix) -> Dict[str, object]:
            return {
                "rows": matrix.rows,
                "cols": matrix.cols,
                "matrix": [[i, j, value.format()] for i, j, value in matrix.nonzero_entries()],
            }

        return {
            "ranks": self.ranks,
            "length": self.length,
            "terminated": self.terminated,
            "modes": self.modes,
            "bounds": self.bounds,
            "projection": sparse(self.projection),
            "differentials": [sparse(d) for d in self.differentials],
            "certificates": [c.model_dump(mode="json") for c in self.certificates],
        }


def _stage_certificates(
    stage: int,
    differential: GroupRingMatrix,
    target: PresentedModule,
    radius: int,
    plan: SamplingPlan | None,
) -> List[ControlCertificate]:
    """Minimal lean and insular constants of the kernel im(d_stage)."""
    source = StandardFiltration(PresentedModule.free(differential.group, differential.ring, differential.rows))
    kernel = ImageFiltration(source, differential, target)
    lean = minimal_constant(lambda c: check_lean(kernel, c, radius, plan), radius)
    insular = minimal_constant(lambda c: check_insular(kernel, c, radius, plan), radius)
    certificates = []
    for certificate in (lean, insular):
        tags = [CAPPED] if certificate.constant is not None and certificate.constant >= radius else []
        certificates.append(_tagged(certificate, *tags, stage=stage))
    return certificates


def resolve(
    module: PresentedModule,
    max_depth: int = 4,
    complete: bool | None = None,
    radius: int | None = None,
    plan: SamplingPlan | None = None,
    certify: bool = True,
) -> ResolutionChain:
    """Iterate free covers and kernels until the kernel vanishes or max_depth is reached."""
    if max_depth < 0:
        raise ValueError("max_depth must be a natural number")
    group, ring = module.group, module.ring
    if complete and not is_tier_a(group, ring):
        raise UnsupportedTierError(
            f"complete resolutions need a field and a free abelian group, got {ring.spec.alias}[{group.spec.alias}]"
        )
    radius = radius if radius is not None else KERNEL_WINDOW
    cover = free_cover(module)
    relations = None if module.is_free else module.relations

    if cover.is_standard:
        rows = [module.relations.row(i) for i in range(module.relations.rows)]
        rows = [r for r in rows if any(not e.is_zero() for e in r)]
        current = GroupRingMatrix.from_rows(group, ring, rows) if rows else None
        mode = "presentation"
    else:
        first = kernel_of(cover.morphism(), complete, radius)
        current, mode = first.matrix(), first.label

    differentials: List[GroupRingMatrix] = []
    modes: List[str] = []
    while current is not None and len(differentials) < max_depth:
        differentials.append(current)
        modes.append(mode)
        kernel = kernel_of(current, complete, radius)
        current, mode = kernel.matrix(), kernel.label
    terminated = current is None
    if not terminated:
        logger.warning("resolution depth %d exhausted before the kernel vanished", max_depth)
    chain = ResolutionChain(module, cover.projection, differentials, modes, terminated)
    logger.info("resolution ranks %s (terminated=%s)", chain.ranks, terminated)
    if certify:
        _certify_chain(chain, relations, radius, plan)
    return chain


def _certify_chain(
    chain: ResolutionChain, relations: GroupRingMatrix | None, radius: int, plan: SamplingPlan | None
) -> None:
    group, ring = chain.module.group, chain.module.ring
    maps = [chain.projection] + chain.differentials
    bounds = []
    for index, matrix in enumerate(maps):
        source = PresentedModule.free(group, ring, matrix.rows)
        target = chain.module if index == 0 else PresentedModule.free(group, ring, matrix.cols)
        bounds.append(generator_bound(FilteredMorphism.between_standard(source, target, matrix)))
    chain.bounds = bounds
    for index, outgoing in enumerate(maps):
        incoming = maps[index + 1] if index + 1 < len(maps) else None
        if incoming is None and not chain.terminated:
            break
        slack = bounds[index] + (bounds[index + 1] if incoming is not None else 0)
        stage_relations = relations if index == 0 else None
        chain.certificates.append(
            _tagged(check_exactness(outgoing, incoming, radius, slack, stage_relations), stage=index)
        )
    for index, differential in enumerate(chain.differentials, start=1):
        target = PresentedModule.free(group, ring, differential.cols)
        chain.certificates.extend(_stage_certificates(index, differential, target, radius, plan))


# -- images and cokernels -------------------------------------------------


@dataclass
class ImageCokernel:
    image: ImageFiltration
    cokernel: StandardFiltration
    bound: ControlCertificate
    bicontrol: ControlCertificate
    certificates: List[ControlCertificate]
    image_spans_target: bool
    cokernel_is_zero: bool
    inner_window: int

    @property
    def hypothesis_met(self) -> bool:
        return self.bicontrol.passed

    def to_json(self) -> Dict[str, object]:
        return {
            "bound": self.bound.constant,
            "hypothesis_met": self.hypothesis_met,
            "image_spans_target": self.image_spans_target,
            "cokernel_is_zero": self.cokernel_is_zero,
            "inner_window": self.inner_window,
        }


def image_cokernel(phi: FilteredMorphism, window: int, plan: SamplingPlan | None = None) -> ImageCokernel:
    """Image and cokernel filtrations of phi with lean and insular certificates at phi's bound."""
    if not phi.is_group_ring_linear:
        raise MismatchedSpecsError("image_cokernel needs a group-ring-linear morphism")
    bound = bound_of(phi, window, plan)
    b = bound.constant if bound.constant is not None else window
    bicontrol = check_bicontrolled(phi, b, window, plan)
    target = phi.target.module
    image = ImageFiltration(phi.source, phi.matrix, target)
    cokernel = cokernel_filtration(phi.matrix, target)
    certificates = [
        check_lean(image, b, window, plan),
        check_insular(image, b, window, plan),
        check_lean(cokernel, b, window, plan),
        check_insular(cokernel, b, window, plan),
    ]
    if not bicontrol.passed:
        certificates = [_tagged(c, HYPOTHESIS_UNMET) for c in certificates]

    inner = max(window - b, 0)
    core = ball(phi.target.group.identity, inner)
    reach = max(image.reach(window), phi.target.reach(window))
    spans = phi.target.evaluate(core, window, reach).first_outside(image.full(window, reach)) is None
    zero = cokernel.evaluate(core, window).first_outside(cokernel.zero(window)) is None
    return ImageCokernel(image, cokernel, bound, bicontrol, certificates, spans, zero, inner)


# -- idempotents ----------------------------------------------------------


@dataclass
class IdempotentReport:
    matrix: GroupRingMatrix
    image: ImageFiltration
    bound: ControlCertificate
    bicontrol: ControlCertificate
    lean: ControlCertificate
    insular: ControlCertificate
    complement: ControlCertificate

    @property
    def certificates(self) -> List[ControlCertificate]:
        return [self.bound, self.bicontrol, self.lean, self.insular, self.complement]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.certificates)


def complement_check(e: GroupRingMatrix, window: int) -> ControlCertificate:
    """im(e) + im(1 - e) contains the free window and im(e) meets im(1 - e) in 0."""
    group, ring = e.group, e.ring
    other = GroupRingMatrix.identity(group, ring, e.rows) - e
    basis = [basis_vector(g, i, ring) for g in group.identity_ball(window) for i in range(e.rows)]
    first = WindowSubmodule(ring, [apply_matrix(v, e) for v in basis], label="im(e)")
    second = WindowSubmodule(ring, [apply_matrix(v, other) for v in basis], label="im(1-e)")
    total = sum_of([first, second])
    counterexample = None
    missing = next((v for v in basis if v not in total), None)
    if missing is not None:
        counterexample = Counterexample(witness=vector_entries(missing, ring), note="basis vector outside the sum")
    else:
        common = intersect(first, second)
        if not common.is_zero():
            counterexample = Counterexample(
                witness=vector_entries(common.generators[0], ring), note="images intersect"
            )
    return ControlCertificate(
        kind=CertificateKind.IDEMPOTENT,
        constant=0,
        window=window,
        verdict=Verdict.FAIL if counterexample else Verdict.PASS,
        counterexample=counterexample,
        details={"basis": len(basis)},
    )


def idempotent_image(e: GroupRingMatrix, window: int, plan: SamplingPlan | None = None) -> IdempotentReport:
    if e.rows != e.cols:
        raise MismatchedSpecsError(f"idempotents are square, got {e.rows}x{e.cols}")
    if not e.is_idempotent():
        raise NotIdempotentError("e @ e differs from e")
    free = PresentedModule.free(e.group, e.ring, e.rows)
    phi = FilteredMorphism.between_standard(free, free, e)
    bound = bound_of(phi, window, plan)
    b = bound.constant if bound.constant is not None else generator_bound(phi)
    bicontrol = check_bicontrolled(phi, b, window, plan)
    image = ImageFiltration(StandardFiltration(free), e, free)
    return IdempotentReport(
        matrix=e,
        image=image,
        bound=bound,
        bicontrol=bicontrol,
        lean=check_lean(image, b, window, plan),
        insular=check_insular(image, b, window, plan),
        complement=complement_check(e, window),
    )


def diagonal_idempotents(group: Group, ring: Ring, size: int = 2) -> List[GroupRingMatrix]:
    one = GroupRingElement.one(group, ring)
    matrices = []
    for pattern in product((0, 1), repeat=size):
        entries = {(i, i): one for i, bit in enumerate(pattern) if bit}
        matrices.append(GroupRingMatrix(group, ring, size, size, entries))
    return matrices


def elementary_conjugate(e: GroupRingMatrix, i: int, j: int, a: GroupRingElement) -> GroupRingMatrix:
    """u e u^-1 for the elementary unit u = 1 + a E_ij, i != j."""
    if i == j:
        raise ValueError("elementary units need i != j")
    identity = GroupRingMatrix.identity(e.group, e.ring, e.rows)
    shift = GroupRingMatrix(e.group, e.ring, e.rows, e.cols, {(i, j): a})
    return (identity + shift) @ e @ (identity - shift)


def unit_conjugate(e: GroupRingMatrix, units: Sequence[GroupElement]) -> GroupRingMatrix:
    """u e u^-1 for the diagonal unit u = diag(g_0, ..., g_k) of group elements."""
    if len(units) != e.rows or e.rows != e.cols:
        raise MismatchedSpecsError(f"{len(units)} units cannot conjugate a {e.rows}x{e.cols} matrix")

    def diagonal(elements: Sequence[GroupElement]) -> GroupRingMatrix:
        entries = {(i, i): GroupRingElement.monomial(g, e.ring) for i, g in enumerate(elements)}
        return GroupRingMatrix(e.group, e.ring, e.rows, e.rows, entries)

    return diagonal(units) @ e @ diagonal([g.inverse() for g in units])


def reduce_mod(e: GroupRingMatrix, modulus: int) -> GroupRingMatrix:
    return e.change_ring(ring_from_spec(RingSpec(kind=RingKind.INTEGERS_MOD, modulus=modulus)))


def generated_idempotents(
    group: Group, ring: Ring, count: int = 25, moduli: Sequence[int] = (2, 3, 4), shifts: int = 4
) -> List[GroupRingMatrix]:
    """Diagonal projections, their elementary conjugates, then mod-n reductions."""
    diagonals = diagonal_idempotents(group, ring)
    units: List[GroupElement] = [g for g in group.identity_ball(2) if not g.is_identity][:shifts]
    conjugates = [
        elementary_conjugate(d, i, j, GroupRingElement.monomial(g, ring))
        for d in diagonals[1:3]
        for g in units
        for i, j in ((0, 1), (1, 0))
    ]
    reductions = []
    if ring.kind == RingKind.INTEGERS:
        reductions = [reduce_mod(c, n) for c in conjugates[:3] for n in moduli]
    return (diagonals + conjugates + reductions)[:count]
