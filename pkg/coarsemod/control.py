"""
Bounded control of module homomorphisms.

This module handles filtered morphisms given by group-ring matrices (optionally
perturbed at single coordinates), window measurement of their bounds,
bicontrol verification, admissible-morphism classification, the
generator-based bound of an equivariant morphism, equivariance checks, and
geometric modules with blockwise morphism composition.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Tuple

from sympy.polys.matrices import DomainMatrix

from coarsemod.coarse_space import MetricSubset, ball, enlarge
from coarsemod.errors import MismatchedSpecsError, WindowTooSmallError
from coarsemod.execution import first_result
from coarsemod.filtered import (
    EquivariantStructure,
    FilteredModule,
    PresentedModule,
    StandardFiltration,
    certify_structure,
    sample_subsets,
    sampling_radius,
)
from coarsemod.group_ring import (
    Coordinate,
    GroupRingElement,
    GroupRingMatrix,
    ModuleVector,
    add_into,
    apply_matrix,
    basis_vector,
    translate_vector,
    vector_entries,
    vector_radius,
)
from coarsemod.groups import Group, GroupElement
from coarsemod.linalg import WindowSubmodule, intersect, linear_map_kernel
from coarsemod.rings import Ring
from coarsemod.types import (
    CertificateKind,
    ControlCertificate,
    Counterexample,
    MorphismClass,
    RingKind,
    SamplingPlan,
    Verdict,
)

logger = logging.getLogger(__name__)


class FilteredMorphism:
    """x -> x M between filtered modules, plus optional single-coordinate perturbations."""

    def __init__(
        self,
        source: FilteredModule,
        target: FilteredModule,
        matrix: GroupRingMatrix,
        equivariant: bool = True,
        perturbation: Mapping[Coordinate, ModuleVector] | None = None,
    ):
        if matrix.rows != source.module.rank or matrix.cols != target.module.rank:
            raise MismatchedSpecsError(
                f"a {matrix.rows}x{matrix.cols} matrix cannot map rank {source.module.rank}"
                f" to rank {target.module.rank}"
            )
        if not source.group.same_group(target.group):
            raise MismatchedSpecsError("source and target must be filtered over the same group")
        self.source = source
        self.target = target
        self.matrix = matrix
        self.equivariant = equivariant and not perturbation
        self.perturbation: Dict[Coordinate, ModuleVector] = {k: dict(v) for k, v in (perturbation or {}).items()}

    @classmethod
    def between_standard(
        cls, source: PresentedModule, target: PresentedModule, matrix: GroupRingMatrix
    ) -> "FilteredMorphism":
        return cls(StandardFiltration(source), StandardFiltration(target), matrix)

    @classmethod
    def multiplication(cls, element: GroupRingElement) -> "FilteredMorphism":
        """Right multiplication by a group-ring element on the rank-1 free module."""
        module = PresentedModule.free(element.group, element.ring)
        matrix = GroupRingMatrix(element.group, element.ring, 1, 1, {(0, 0): element})
        return cls.between_standard(module, module, matrix)

    @classmethod
    def identity(cls, filtered: FilteredModule) -> "FilteredMorphism":
        module = filtered.module
        return cls(filtered, filtered, GroupRingMatrix.identity(module.group, module.ring, module.rank))

    @property
    def group(self) -> Group:
        return self.source.group

    @property
    def ring(self) -> Ring:
        return self.source.ring

    @property
    def is_group_ring_linear(self) -> bool:
        return not self.perturbation

    @property
    def radius(self) -> int:
        extra = max((vector_radius(v) + g.length for (g, _), v in self.perturbation.items()), default=0)
        return max(self.matrix.radius, extra)

    def apply(self, vector: ModuleVector) -> ModuleVector:
        image = apply_matrix(vector, self.matrix)
        for coord, c in vector.items():
            extra = self.perturbation.get(coord)
            if extra is not None:
                add_into(image, extra, self.ring, c)
        return image

    def reach(self, window: int) -> int:
        """Coordinate radius covering target pieces and images of source pieces."""
        return max(
            self.target.reach(window),
            self.source.reach(window) + self.radius + self.target.module.relation_radius,
        )

    def image_of(self, submodule_generators: List[ModuleVector], reach: int) -> WindowSubmodule:
        images = [v for v in (self.apply(g) for g in submodule_generators) if v]
        return WindowSubmodule(self.ring, images, self.target.base(reach), label="image")

    def __repr__(self) -> str:
        return f"FilteredMorphism({self.matrix!r}, perturbed={bool(self.perturbation)})"


def _bound_failure(
    phi: FilteredMorphism, subset: MetricSubset, b: int, window: int, reach: int
) -> Counterexample | None:
    image = phi.image_of(phi.source.generators(subset, window), reach)
    target = phi.target.evaluate(enlarge(subset, b), window, reach)
    outside = image.first_outside(target)
    if outside is None:
        return None
    return Counterexample(subsets=[subset.words()], witness=vector_entries(outside, phi.ring), note=f"b={b}")


def bound_of(phi: FilteredMorphism, window: int, plan: SamplingPlan | None = None) -> ControlCertificate:
    """Least b with phi(F(S)) inside F'(S[b]) over sampled S in ball(e, r/2)."""
    plan = plan or SamplingPlan()
    reach = phi.reach(window)
    subsets = sample_subsets(phi.group, window // 2, plan)
    bound = 0
    for subset in subsets:
        limit = window - subset.max_length()
        while bound <= limit and _bound_failure(phi, subset, bound, window, reach) is not None:
            bound += 1
        if bound > limit:
            counterexample = _bound_failure(phi, subset, limit, window, reach) or Counterexample(
                subsets=[subset.words()], note="no bound fits in the window"
            )
            logger.info("no bound <= %d found within window %d", limit, window)
            return ControlCertificate(
                kind=CertificateKind.BOUNDED,
                constant=None,
                window=window,
                verdict=Verdict.FAIL,
                counterexample=counterexample,
                sampling=plan,
            )
    logger.info("measured bound %d at window %d", bound, window)
    return ControlCertificate(
        kind=CertificateKind.BOUNDED,
        constant=bound,
        window=window,
        verdict=Verdict.PASS,
        sampling=plan,
        details={"subsets": len(subsets)},
    )


def image_window(phi: FilteredMorphism, window: int, reach: int | None = None) -> WindowSubmodule:
    """phi applied to the source window piece F(ball(e, r))."""
    reach = reach if reach is not None else phi.reach(window)
    whole = ball(phi.group.identity, window)
    return phi.image_of(phi.source.generators(whole, window), reach)


def check_bicontrolled(
    phi: FilteredMorphism, b: int, window: int, plan: SamplingPlan | None = None
) -> ControlCertificate:
    """phi(F) and F'(S) meet inside phi(F(S[b])), for sampled S in ball(e, r - b)."""
    plan = plan or SamplingPlan()
    reach = phi.reach(window)
    image = image_window(phi, window, reach)
    subsets = sample_subsets(phi.group, sampling_radius(b, window), plan)

    def failure(subset: MetricSubset) -> Counterexample | None:
        common = intersect(image, phi.target.evaluate(subset, window, reach))
        pulled = phi.image_of(phi.source.generators(enlarge(subset, b), window), reach)
        outside = common.first_outside(pulled)
        if outside is None:
            return None
        logger.debug("bicontrol failure on %s", subset.words())
        return Counterexample(subsets=[subset.words()], witness=vector_entries(outside, phi.ring))

    counterexample = first_result(failure, subsets)
    verdict = Verdict.FAIL if counterexample else Verdict.PASS
    logger.info("bicontrol at b=%d, window %d: %s", b, window, verdict.value)
    return ControlCertificate(
        kind=CertificateKind.BICONTROLLED,
        constant=b,
        window=window,
        verdict=verdict,
        counterexample=counterexample,
        sampling=plan,
        details={"subsets": len(subsets)},
    )


@dataclass
class MorphismClassification:
    verdict: MorphismClass
    injective: bool
    surjective: bool
    enlargement: int | None
    bound: ControlCertificate
    bicontrol: ControlCertificate | None

    def to_json(self) -> Dict[str, object]:
        return {
            "classification": self.verdict.value,
            "injective": self.injective,
            "surjective": self.surjective,
            "enlargement": self.enlargement,
        }


def window_injective(phi: FilteredMorphism, window: int) -> bool:
    """No combination of source window generators maps to zero unless it is zero in the source."""
    reach = phi.reach(window)
    generators = phi.source.generators(ball(phi.group.identity, window), window)
    domain = list(range(len(generators)))
    kernel = linear_map_kernel(domain, [phi.apply(g) for g in generators], phi.ring, phi.target.base(reach))
    source_base = phi.source.base(phi.source.reach(window))
    for combination in kernel:
        vector: ModuleVector = {}
        for k, c in combination.items():
            add_into(vector, generators[k], phi.ring, c)
        if vector and (source_base is None or vector not in source_base):
            return False
    return True


def window_surjective(phi: FilteredMorphism, window: int) -> int | None:
    """Least enlargement c with F'(ball(e, r - c)) inside phi(F(ball(e, r))), if any."""
    reach = phi.reach(window)
    image = image_window(phi, window, reach)
    for c in range(window + 1):
        wanted = phi.target.evaluate(ball(phi.group.identity, window - c), window, reach)
        if wanted.first_outside(image) is None:
            return c
    return None


def classify_morphism(
    phi: FilteredMorphism, window: int, plan: SamplingPlan | None = None
) -> MorphismClassification:
    plan = plan or SamplingPlan()
    injective = window_injective(phi, window)
    enlargement = window_surjective(phi, window)
    surjective = enlargement is not None
    bound = bound_of(phi, window, plan)
    bicontrol = None
    controlled = False
    if bound.passed and bound.constant is not None:
        bicontrol = check_bicontrolled(phi, bound.constant, window, plan)
        controlled = bicontrol.passed
    if controlled and injective and surjective:
        verdict = MorphismClass.BOTH
    elif controlled and injective:
        verdict = MorphismClass.ADMISSIBLE_MONO
    elif controlled and surjective:
        verdict = MorphismClass.ADMISSIBLE_EPI
    else:
        verdict = MorphismClass.NEITHER
    logger.info("classified morphism as %s", verdict.value)
    return MorphismClassification(verdict, injective, surjective, enlargement, bound, bicontrol)


def generator_bound(phi: FilteredMorphism, limit: int | None = None) -> int:
    """Least d with phi(F({e})) inside F'(e[d]); a global bound by equivariance."""
    if not phi.is_group_ring_linear:
        raise MismatchedSpecsError("generator_bound needs a group-ring-linear morphism")
    e = phi.group.identity
    unit = MetricSubset.of(phi.group, [e])
    images = [phi.apply(g) for g in phi.source.generators(unit, 0)]
    spread = max((vector_radius(v) for v in images), default=0)
    limit = limit if limit is not None else spread + phi.target.slack
    for d in range(limit + 1):
        reach = max(phi.target.reach(d), spread + phi.target.module.relation_radius)
        piece = phi.target.evaluate(ball(e, d), d, reach)
        if all(v in piece for v in images):
            return d
    raise WindowTooSmallError(f"generator images are not in F'(e[{limit}])", required=limit + 1)


def check_equivariance(
    subject: FilteredMorphism | EquivariantStructure,
    samples: int = 50,
    window: int = 4,
    seed: int = 0,
) -> ControlCertificate:
    """phi(gamma x) = gamma phi(x) on sampled gamma and window basis vectors."""
    if isinstance(subject, EquivariantStructure):
        return certify_structure(subject, window, samples, seed)
    phi = subject
    group = phi.group
    rng = random.Random(seed)
    gammas = list(group.steps) + [group.random_element(rng, max(window // 2, 1)) for _ in range(samples)]
    basis = [
        basis_vector(g, i, phi.ring)
        for g in group.identity_ball(min(window, 2))
        for i in range(phi.source.module.rank)
    ]
    for gamma in gammas:
        for vector in basis:
            lhs = phi.apply(translate_vector(gamma, vector))
            rhs = translate_vector(gamma, phi.apply(vector))
            if lhs != rhs:
                logger.info("equivariance fails at gamma=%s", gamma.word)
                return ControlCertificate(
                    kind=CertificateKind.EQUIVARIANCE,
                    window=window,
                    verdict=Verdict.FAIL,
                    counterexample=Counterexample(
                        gamma=gamma.word,
                        witness=vector_entries(vector, phi.ring),
                        note="phi(gamma x) differs from gamma phi(x)",
                    ),
                )
    return ControlCertificate(
        kind=CertificateKind.EQUIVARIANCE,
        constant=0,
        window=window,
        verdict=Verdict.PASS,
        details={"gammas": len(gammas), "basis": len(basis)},
    )


def check_well_defined(phi: FilteredMorphism) -> Counterexample | None:
    """Images of the source relations must vanish in the target."""
    target = phi.target.module
    for row in phi.source.module.relation_rows:
        image = phi.apply(row)
        reach = vector_radius(image) + target.relation_radius
        if image and not target.is_zero_in_window(image, reach):
            return Counterexample(
                witness=vector_entries(image, phi.ring), note="a source relation maps outside the target relations"
            )
    return None


# -- geometric modules --------------------------------------------------


@dataclass(frozen=True)
class GeometricModule:
    """A rank at each point of a finite window of the group."""

    group: Group = field(repr=False)
    ring: Ring = field(repr=False)
    ranks: Tuple[Tuple[GroupElement, int], ...]

    @classmethod
    def uniform(cls, group: Group, ring: Ring, rank: int, window: int) -> "GeometricModule":
        return cls(group, ring, tuple((g, rank) for g in group.identity_ball(window)))

    def rank_at(self, point: GroupElement) -> int:
        return dict(self.ranks).get(point, 0)

    @property
    def points(self) -> List[GroupElement]:
        return [g for g, _ in self.ranks]


Block = DomainMatrix


def _reduce_block(block: Block, ring: Ring) -> Block:
    if ring.kind != RingKind.INTEGERS_MOD:
        return block
    rows, cols = block.shape
    values = [[ring.to_domain(ring.from_domain(c)) for c in row] for row in block.to_list()]
    return DomainMatrix(values, (rows, cols), ring.domain)


class GeometricMorphism:
    """Blocks phi_{x,x'} : R^rank(x) -> R^rank(x') (row vectors), zero beyond the declared bound."""

    def __init__(
        self,
        source: GeometricModule,
        target: GeometricModule,
        blocks: Mapping[Tuple[GroupElement, GroupElement], Block],
        declared_bound: int,
    ):
        if source.ring != target.ring:
            raise MismatchedSpecsError("geometric modules over different rings")
        self.source = source
        self.target = target
        self.ring = source.ring
        self.declared_bound = declared_bound
        self.blocks: Dict[Tuple[GroupElement, GroupElement], Block] = {}
        group = source.group
        for (x, y), block in blocks.items():
            block = _reduce_block(block, self.ring)
            if block.is_zero_matrix:
                continue
            if group.distance(x, y) > declared_bound:
                raise ValueError(
                    f"block ({x.word}, {y.word}) at distance {group.distance(x, y)} exceeds declared bound {declared_bound}"
                )
            self.blocks[(x, y)] = block

    @classmethod
    def identity(cls, module: GeometricModule) -> "GeometricMorphism":
        domain = module.ring.domain
        blocks = {(g, g): DomainMatrix.eye(r, domain) for g, r in module.ranks if r}
        return cls(module, module, blocks, 0)

    @classmethod
    def from_group_ring_element(
        cls, element: GroupRingElement, module: GeometricModule
    ) -> "GeometricMorphism":
        """Right multiplication x -> x a on a rank-1 module, truncated to its window."""
        ring = element.ring
        present = {g for g, r in module.ranks if r}
        blocks: Dict[Tuple[GroupElement, GroupElement], Block] = {}
        for x in module.points:
            for h, c in element.items():
                y = x * h
                if y in present:
                    blocks[(x, y)] = DomainMatrix([[ring.to_domain(c)]], (1, 1), ring.domain)
        return cls(module, module, blocks, element.radius)

    def measured_bound(self) -> int:
        group = self.source.group
        return max((group.distance(x, y) for x, y in self.blocks), default=0)

    def block(self, x: GroupElement, y: GroupElement) -> Block | None:
        return self.blocks.get((x, y))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GeometricMorphism):
            return NotImplemented
        return self.blocks.keys() == other.blocks.keys() and all(
            self.blocks[k].to_list() == other.blocks[k].to_list() for k in self.blocks
        )


def compose_geometric(psi: GeometricMorphism, phi: GeometricMorphism) -> GeometricMorphism:
    """(psi o phi)_{x,x'} = sum over z of phi_{x,z} then psi_{z,x'}."""
    if phi.target != psi.source:
        raise MismatchedSpecsError("the target of phi must be the source of psi")
    outgoing: Dict[GroupElement, List[Tuple[GroupElement, Block]]] = {}
    for (z, y), block in psi.blocks.items():
        outgoing.setdefault(z, []).append((y, block))
    composite: Dict[Tuple[GroupElement, GroupElement], Block] = {}
    for (x, z), first in phi.blocks.items():
        for y, second in outgoing.get(z, []):
            product = first.matmul(second)
            key = (x, y)
            composite[key] = composite[key] + product if key in composite else product
    return GeometricMorphism(phi.source, psi.target, composite, phi.declared_bound + psi.declared_bound)
