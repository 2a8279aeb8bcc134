"""
Group-filtered modules and their window certificates.

This module handles presented modules R[G]^k / N, the filtration rules
S -> F(S) (standard, image, cokernel, pushforward, direct sum), window
evaluation of F(S) as a WindowSubmodule, and the sampled lean, insular,
antithetic-insular, local-finiteness, generating-set and approximation
checks. It also builds the equivariant structure psi of a standard
filtration and the module action recovered from it.

Window semantics: F(S) is represented inside the coordinates of a finite
ball, modulo the relation translates supported in that ball. Certificates
state a constant, the window radius and the sampling plan; they never
claim the global property.
"""

from __future__ import annotations

import logging
import random
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Dict, List, NamedTuple, Sequence, Tuple

from coarsemod.coarse_space import (
    MetricSubset,
    UniformEmbedding,
    ball,
    enlarge,
    transported_radius,
)
from coarsemod.errors import UncertifiedStructureError, WindowTooSmallError
from coarsemod.execution import first_result
from coarsemod.group_ring import (
    GroupRingElement,
    GroupRingMatrix,
    ModuleVector,
    apply_matrix,
    basis_vector,
    combine,
    row_to_vector,
    translate_vector,
    vector_entries,
    vector_radius,
)
from coarsemod.groups import Group, GroupElement
from coarsemod.linalg import WindowSubmodule, intersect, sum_of
from coarsemod.rings import Ring
from coarsemod.types import (
    CertificateKind,
    ControlCertificate,
    Counterexample,
    FiltrationKind,
    ModuleSpec,
    SamplingPlan,
    Verdict,
)

logger = logging.getLogger(__name__)

ActionRule = Callable[[GroupRingElement, ModuleVector], ModuleVector]


# -- presented modules --------------------------------------------------


class PresentedModule:
    """R[G]^rank modulo the R[G]-span of the relation rows, with a generating set."""

    def __init__(
        self,
        group: Group,
        ring: Ring,
        rank: int,
        relations: GroupRingMatrix | None = None,
        sigma: Sequence[ModuleVector] | None = None,
        labels: Sequence[str] | None = None,
        action: ActionRule | None = None,
    ):
        if rank < 1:
            raise ValueError("module rank must be >= 1")
        self.group = group
        self.ring = ring
        self.rank = rank
        self.relations = relations or GroupRingMatrix(group, ring, 0, rank)
        if self.relations.cols != rank:
            raise ValueError(f"relation matrix has {self.relations.cols} columns, expected {rank}")
        if sigma is None:
            sigma = [basis_vector(group.identity, i, ring) for i in range(rank)]
        self.sigma: List[ModuleVector] = [dict(s) for s in sigma]
        if not self.sigma:
            raise ValueError("the generating set must be non-empty")
        self.labels = list(labels) if labels is not None else [f"e{i}" for i in range(len(self.sigma))]
        self._action = action
        self.relation_rows = [v for v in self.relations.row_vectors() if v]
        self.relation_radius = max((vector_radius(v) for v in self.relation_rows), default=0)
        self.sigma_radius = max((vector_radius(s) for s in self.sigma), default=0)
        self._bases: Dict[int, WindowSubmodule | None] = {}
        self._lock = threading.Lock()

    @classmethod
    def free(cls, group: Group, ring: Ring, rank: int = 1) -> "PresentedModule":
        return cls(group, ring, rank)

    @classmethod
    def from_spec(cls, group: Group, ring: Ring, spec: ModuleSpec) -> "PresentedModule":
        rows = max((t.row for t in spec.relations), default=-1) + 1
        relations = GroupRingMatrix.from_triplets(
            group, ring, rows, spec.rank, [(t.row, t.col, t.entry) for t in spec.relations]
        )
        sigma = None
        if spec.sigma is not None:
            sigma = [
                row_to_vector([GroupRingElement.parse(text, group, ring) for text in expression])
                for expression in spec.sigma
            ]
        return cls(group, ring, spec.rank, relations, sigma)

    @property
    def is_free(self) -> bool:
        return not self.relation_rows

    def with_sigma(self, sigma: Sequence[ModuleVector], labels: Sequence[str] | None = None) -> "PresentedModule":
        clone = PresentedModule(self.group, self.ring, self.rank, self.relations, sigma, labels, self._action)
        # same relations, so relation windows are shared
        clone._bases, clone._lock = self._bases, self._lock
        return clone

    def relation_base(self, reach: int) -> WindowSubmodule | None:
        """Translates of the relation rows supported in ball(e, reach); shared per reach."""
        if self.is_free:
            return None
        with self._lock:
            if reach not in self._bases:
                generators: List[ModuleVector] = []
                for row in self.relation_rows:
                    for gamma in self.group.identity_ball(reach - vector_radius(row)):
                        generators.append(translate_vector(gamma, row))
                self._bases[reach] = WindowSubmodule(self.ring, generators, label=f"relations@{reach}")
                logger.debug("relation base at reach %d has %d translates", reach, len(generators))
            return self._bases[reach]

    def act(self, a: GroupRingElement, x: ModuleVector) -> ModuleVector:
        """The module action a . x on a window vector."""
        if self._action is not None:
            return self._action(a, x)
        return combine(((c, translate_vector(g, x)) for g, c in a.items()), self.ring)

    def is_zero_in_window(self, vector: ModuleVector, reach: int) -> bool:
        base = self.relation_base(reach)
        return not vector if base is None else vector in base

    def __repr__(self) -> str:
        return (
            f"PresentedModule({self.ring.spec.alias}[{self.group.spec.alias}]^{self.rank}"
            f" / {len(self.relation_rows)} relations, |sigma|={len(self.sigma)})"
        )


def free_module(group: Group, ring: Ring, rank: int = 1) -> PresentedModule:
    return PresentedModule.free(group, ring, rank)


def trivial_module(group: Group, ring: Ring) -> PresentedModule:
    """R with every group element acting as the identity: R[G] / (s - 1 for each generator s)."""
    one = GroupRingElement.one(group, ring)
    entries = {
        (i, 0): GroupRingElement.monomial(group.generator(i), ring) - one for i in range(len(group.names))
    }
    relations = GroupRingMatrix(group, ring, len(group.names), 1, entries)
    return PresentedModule(group, ring, 1, relations)


def direct_sum(first: PresentedModule, second: PresentedModule) -> PresentedModule:
    """F + F' with block relations and both generating sets."""
    if not first.group.same_group(second.group) or first.ring != second.ring:
        raise ValueError("direct sums need modules over the same group ring")
    rank = first.rank + second.rank
    entries = {}
    for i, j, value in first.relations.nonzero_entries():
        entries[(i, j)] = value
    for i, j, value in second.relations.nonzero_entries():
        entries[(i + first.relations.rows, j + first.rank)] = value
    relations = GroupRingMatrix(
        first.group, first.ring, first.relations.rows + second.relations.rows, rank, entries
    )
    shifted = [{(g, i + first.rank): c for (g, i), c in s.items()} for s in second.sigma]
    return PresentedModule(first.group, first.ring, rank, relations, first.sigma + shifted)


def cokernel_module(matrix: GroupRingMatrix, target: PresentedModule) -> PresentedModule:
    """target / image of the rows of matrix."""
    return PresentedModule(
        target.group, target.ring, target.rank, target.relations.stack(matrix), target.sigma, target.labels
    )


# -- filtrations --------------------------------------------------------


class FilteredModule(ABC):
    """A module with a filtration rule evaluated inside windows.

    `module` supplies the window coordinates; `group` indexes the subsets S.
    """

    kind: FiltrationKind

    def __init__(self, module: PresentedModule, group: Group):
        self.module = module
        self.group = group

    @property
    def ring(self) -> Ring:
        return self.module.ring

    @property
    @abstractmethod
    def slack(self) -> int:
        """Coordinate radius needed beyond the window for generators of F(S)."""

    @abstractmethod
    def generators(self, subset: MetricSubset, window: int) -> List[ModuleVector]:
        """Generators of F(S) as window vectors."""

    def reach(self, window: int) -> int:
        return window + self.slack

    def base(self, reach: int) -> WindowSubmodule | None:
        return self.module.relation_base(reach)

    def _check_window(self, subset: MetricSubset, window: int) -> None:
        for x in subset:
            if x.length > window:
                raise WindowTooSmallError(
                    f"{x.word} has length {x.length} > window {window}", required=x.length
                )

    def evaluate(self, subset: MetricSubset, window: int, reach: int | None = None) -> WindowSubmodule:
        """The window truncation of F(S)."""
        self._check_window(subset, window)
        reach = reach if reach is not None else self.reach(window)
        return WindowSubmodule(self.ring, self.generators(subset, window), self.base(reach), label=self.kind.value)

    def evaluate_sum(
        self, subsets: Sequence[MetricSubset], window: int, reach: int | None = None
    ) -> WindowSubmodule:
        """F(S_1) + ... + F(S_k) in one window."""
        reach = reach if reach is not None else self.reach(window)
        parts = [self.evaluate(s, window, reach) for s in subsets]
        return sum_of(parts, self.base(reach)) if parts else WindowSubmodule.zero(self.ring, self.base(reach))

    def zero(self, window: int, reach: int | None = None) -> WindowSubmodule:
        reach = reach if reach is not None else self.reach(window)
        return WindowSubmodule.zero(self.ring, self.base(reach))

    def full(self, window: int, reach: int | None = None) -> WindowSubmodule:
        """F(ball(e, window))."""
        return self.evaluate(ball(self.group.identity, window), window, reach)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.module!r})"


class StandardFiltration(FilteredModule):
    """S -> the R-span of S.Sigma."""

    def __init__(self, module: PresentedModule, kind: FiltrationKind = FiltrationKind.STANDARD):
        super().__init__(module, module.group)
        self.kind = kind

    @property
    def slack(self) -> int:
        return self.module.sigma_radius + self.module.relation_radius

    def generators(self, subset: MetricSubset, window: int) -> List[ModuleVector]:
        return [translate_vector(s, sigma) for s in subset for sigma in self.module.sigma]


class ImageFiltration(FilteredModule):
    """S -> phi(F(S)) inside the target module."""

    kind = FiltrationKind.IMAGE

    def __init__(self, source: FilteredModule, matrix: GroupRingMatrix, target: PresentedModule):
        if matrix.rows != source.module.rank or matrix.cols != target.rank:
            raise ValueError("matrix shape does not match source and target ranks")
        super().__init__(target, source.group)
        self.source = source
        self.matrix = matrix

    @property
    def slack(self) -> int:
        return self.source.slack + self.matrix.radius + self.module.relation_radius

    def generators(self, subset: MetricSubset, window: int) -> List[ModuleVector]:
        images = (apply_matrix(v, self.matrix) for v in self.source.generators(subset, window))
        return [v for v in images if v]


class PushforwardFiltration(FilteredModule):
    """S -> F(j^-1(S)) for a uniform embedding j; S ranges over the target group."""

    kind = FiltrationKind.PUSHFORWARD

    def __init__(self, inner: FilteredModule, embedding: UniformEmbedding):
        if not inner.group.same_group(embedding.source):
            raise ValueError("the embedding must start at the filtration's group")
        super().__init__(inner.module, embedding.target)
        self.inner = inner
        self.embedding = embedding

    def source_window(self, window: int) -> int:
        return max(self.embedding.f.largest_argument_below(window), 0)

    @property
    def slack(self) -> int:
        return self.inner.slack

    def reach(self, window: int) -> int:
        return self.inner.reach(self.source_window(window))

    def generators(self, subset: MetricSubset, window: int) -> List[ModuleVector]:
        source_window = self.source_window(window)
        preimage = self.embedding.preimage(subset, source_window)
        return self.inner.generators(preimage, source_window)


def standard_filtration(module: PresentedModule) -> StandardFiltration:
    if not module.sigma:
        raise ValueError("standard filtration needs a non-empty generating set")
    return StandardFiltration(module)


def image_filtration(source: FilteredModule, matrix: GroupRingMatrix, target: PresentedModule | None = None) -> ImageFiltration:
    target = target or PresentedModule.free(source.group, source.ring, matrix.cols)
    return ImageFiltration(source, matrix, target)


def cokernel_filtration(matrix: GroupRingMatrix, target: PresentedModule) -> StandardFiltration:
    """Quotient image of F'(S) in F' / im(phi)."""
    return StandardFiltration(cokernel_module(matrix, target), FiltrationKind.COKERNEL)


def product_filtration(first: PresentedModule, second: PresentedModule) -> StandardFiltration:
    """(F + F')(S) = F(S) + F'(S)."""
    return StandardFiltration(direct_sum(first, second), FiltrationKind.PRODUCT)


def pushforward(filtered: FilteredModule, embedding: UniformEmbedding) -> PushforwardFiltration:
    return PushforwardFiltration(filtered, embedding)


# -- sampling -----------------------------------------------------------


def antipodal_pairs(group: Group, radius: int, count: int) -> List[Tuple[MetricSubset, MetricSubset]]:
    """Pairs ({x}, {x^-1}), longest x first."""
    pairs: List[Tuple[MetricSubset, MetricSubset]] = []
    seen = set()
    for r in range(radius, 0, -1):
        for x in group.sphere(r):
            if len(pairs) >= count:
                return pairs
            inverse = x.inverse()
            if inverse in seen or inverse == x:
                continue
            seen.add(x)
            pairs.append((MetricSubset.of(group, [x]), MetricSubset.of(group, [inverse])))
    return pairs


def sample_subsets(group: Group, radius: int, plan: SamplingPlan) -> List[MetricSubset]:
    """Antipodal unions {x, x^-1}, singletons and balls centred in ball(e, radius/2),
    then random subsets of ball(e, radius)."""
    if radius < 0:
        return []
    centres = group.identity_ball(radius // 2)
    subsets: List[MetricSubset] = [a.union(b) for a, b in antipodal_pairs(group, radius, plan.antipodal_pairs)]
    subsets.extend(MetricSubset.of(group, [x]) for x in centres)
    for k in plan.ball_radii:
        if k == 0:
            continue
        subsets.extend(ball(x, k) for x in centres if x.length + k <= radius)
    points = group.identity_ball(radius)
    rng = random.Random(plan.seed)
    for _ in range(plan.random_subsets):
        size = rng.randint(1, max(1, min(plan.max_subset_size, len(points))))
        subsets.append(MetricSubset.of(group, rng.sample(points, size)))
    return subsets


def sample_subset_pairs(group: Group, radius: int, plan: SamplingPlan) -> List[Tuple[MetricSubset, MetricSubset]]:
    """Antipodal pairs first, then random pairs of sampled subsets, capped."""
    if radius < 0:
        return []
    pairs = antipodal_pairs(group, radius, plan.antipodal_pairs)
    subsets = sample_subsets(group, radius, plan)
    rng = random.Random(plan.seed + 1)
    while len(pairs) < plan.pair_cap and subsets:
        pairs.append((rng.choice(subsets), rng.choice(subsets)))
    return pairs


def _entries(filtered: FilteredModule, vector: ModuleVector):
    return vector_entries(vector, filtered.ring)


def _certificate(
    kind: CertificateKind,
    constant: int | None,
    window: int,
    plan: SamplingPlan | None,
    counterexample: Counterexample | None = None,
    tags: Sequence[str] = (),
    **details,
) -> ControlCertificate:
    verdict = Verdict.FAIL if counterexample is not None else Verdict.PASS
    logger.info("%s certificate at constant %s, window %d: %s", kind.value, constant, window, verdict.value)
    return ControlCertificate(
        kind=kind,
        constant=constant,
        window=window,
        verdict=verdict,
        counterexample=counterexample,
        sampling=plan,
        tags=list(tags),
        details=details,
    )


# -- lean and insular ---------------------------------------------------


def sampling_radius(constant: int, window: int) -> int:
    """Radius left for sampled subsets once the constant is spent."""
    if constant > window:
        raise WindowTooSmallError(f"constant {constant} exceeds window {window}", required=constant)
    return window - constant


def check_lean(
    filtered: FilteredModule, constant: int, window: int, plan: SamplingPlan | None = None
) -> ControlCertificate:
    """F(S) inside the sum of F(x[D]) over x in S, for sampled S in ball(e, r - D)."""
    plan = plan or SamplingPlan()
    subsets = sample_subsets(filtered.group, sampling_radius(constant, window), plan)

    def failure(subset: MetricSubset) -> Counterexample | None:
        pieces = filtered.evaluate(subset, window)
        cover = filtered.evaluate_sum([ball(x, constant) for x in subset], window)
        outside = pieces.first_outside(cover)
        if outside is None:
            return None
        logger.debug("lean failure on %s", subset.words())
        return Counterexample(subsets=[subset.words()], witness=_entries(filtered, outside))

    counterexample = first_result(failure, subsets)
    return _certificate(
        CertificateKind.LEAN, constant, window, plan, counterexample, subsets=len(subsets)
    )


def insular_counterexample(
    filtered: FilteredModule, constant: int, window: int, first: MetricSubset, second: MetricSubset
) -> Counterexample | None:
    left = filtered.evaluate(first, window)
    right = filtered.evaluate(second, window)
    common = intersect(left, right)
    meet = enlarge(first, constant).intersection(enlarge(second, constant))
    target = filtered.evaluate(meet, window)
    outside = common.first_outside(target)
    if outside is None:
        return None
    logger.debug("insular failure on %s / %s", first.words(), second.words())
    return Counterexample(
        subsets=[first.words(), second.words()],
        witness=_entries(filtered, outside),
        note=f"S[{constant}] and U[{constant}] meet in {len(meet)} points",
    )


def check_insular(
    filtered: FilteredModule, constant: int, window: int, plan: SamplingPlan | None = None
) -> ControlCertificate:
    """F(S) and F(U) meet inside F(S[d] and U[d]), for sampled pairs in ball(e, r - d)."""
    plan = plan or SamplingPlan()
    pairs = sample_subset_pairs(filtered.group, sampling_radius(constant, window), plan)
    counterexample = first_result(
        lambda pair: insular_counterexample(filtered, constant, window, *pair), pairs
    )
    return _certificate(
        CertificateKind.INSULAR, constant, window, plan, counterexample, pairs=len(pairs)
    )


class AntitheticResult(NamedTuple):
    passed: bool
    d_prime: int | None


def check_antithetic_pair(
    first: MetricSubset, second: MetricSubset, constant: int, window: int
) -> AntitheticResult:
    """Least d' <= window with S[d] and T[d] meeting inside (S and T)[d']."""
    meet = enlarge(first, constant).intersection(enlarge(second, constant))
    if meet.is_empty():
        return AntitheticResult(True, 0)
    core = first.intersection(second)
    if core.is_empty():
        return AntitheticResult(False, None)
    group = first.group
    d_prime = max(min(group.distance(p, q) for q in core) for p in meet)
    if d_prime > window:
        return AntitheticResult(False, None)
    return AntitheticResult(True, d_prime)


def check_antithetic_insular(
    filtered: FilteredModule, constant: int, window: int, plan: SamplingPlan | None = None
) -> ControlCertificate:
    """Insularity restricted to coarsely antithetic pairs."""
    plan = plan or SamplingPlan()
    pairs = sample_subset_pairs(filtered.group, sampling_radius(constant, window), plan)
    kept = [pair for pair in pairs if check_antithetic_pair(pair[0], pair[1], constant, window).passed]
    counterexample = first_result(
        lambda pair: insular_counterexample(filtered, constant, window, *pair), kept
    )
    return _certificate(
        CertificateKind.ANTITHETIC_INSULAR,
        constant,
        window,
        plan,
        counterexample,
        pairs=len(kept),
        skipped=len(pairs) - len(kept),
    )


def minimal_constant(check: Callable[[int], ControlCertificate], limit: int) -> ControlCertificate:
    """Scan c = 0, 1, ... limit and return the first passing certificate, else the last failure."""
    certificate = check(0)
    for c in range(1, limit + 1):
        if certificate.passed:
            break
        certificate = check(c)
    return certificate


# -- further window properties -----------------------------------------


def check_local_finiteness(
    filtered: FilteredModule, subset: MetricSubset, constant: int = 0, extra: int = 2
) -> ControlCertificate:
    """Rank of F(S) over the relation window stays put once the window passes |S| + D."""
    start = subset.max_length() + constant
    ranks = [filtered.evaluate(subset, w).quotient_rank() for w in range(start, start + extra + 1)]
    counterexample = None
    if len(set(ranks)) > 1:
        counterexample = Counterexample(subsets=[subset.words()], note=f"window ranks {ranks}")
    return _certificate(
        CertificateKind.LOCAL_FINITE, constant, start + extra, None, counterexample, ranks=ranks
    )


def _inclusion_failure(
    small: FilteredModule,
    large: FilteredModule,
    constant: int,
    window: int,
    subsets: Sequence[MetricSubset],
) -> Counterexample | None:
    reach = max(small.reach(window), large.reach(window))

    def failure(subset: MetricSubset) -> Counterexample | None:
        inner = small.evaluate(subset, window, reach)
        outer = large.evaluate(enlarge(subset, constant), window, reach)
        outside = inner.first_outside(outer)
        if outside is None:
            return None
        return Counterexample(subsets=[subset.words()], witness=_entries(small, outside))

    return first_result(failure, subsets)


def compare_generating_sets(
    module: PresentedModule,
    first: Sequence[ModuleVector],
    second: Sequence[ModuleVector],
    window: int,
    plan: SamplingPlan | None = None,
) -> Tuple[ControlCertificate, ControlCertificate]:
    """Least b each way with s(F, Sigma1)(S) inside s(F, Sigma2)(S[b])."""
    plan = plan or SamplingPlan()
    one = StandardFiltration(module.with_sigma(first))
    two = StandardFiltration(module.with_sigma(second))

    def direction(small: FilteredModule, large: FilteredModule) -> ControlCertificate:
        def check(b: int) -> ControlCertificate:
            subsets = sample_subsets(module.group, window - b, plan)
            counterexample = _inclusion_failure(small, large, b, window, subsets)
            return _certificate(CertificateKind.GENERATING_SET, b, window, plan, counterexample)

        return minimal_constant(check, window)

    return direction(one, two), direction(two, one)


def check_approximation(
    module: PresentedModule,
    sigma: Sequence[ModuleVector],
    filtered: FilteredModule,
    constant: int,
    window: int,
    plan: SamplingPlan | None = None,
) -> ControlCertificate:
    """If Sigma lies in F(e[d]) then s(F, Sigma)(S) lies in F(S[d])."""
    plan = plan or SamplingPlan()
    candidate = StandardFiltration(module.with_sigma(sigma))
    reach = max(candidate.reach(window), filtered.reach(window))
    home = filtered.evaluate(ball(module.group.identity, constant), window, reach)
    stray = next((s for s in sigma if s not in home), None)
    if stray is not None:
        return _certificate(
            CertificateKind.APPROXIMATION,
            constant,
            window,
            plan,
            tags=["hypothesis unmet"],
            stray_generator=[e.model_dump() for e in _entries(filtered, stray)],
        )
    subsets = sample_subsets(module.group, sampling_radius(constant, window), plan)
    counterexample = _inclusion_failure(candidate, filtered, constant, window, subsets)
    return _certificate(CertificateKind.APPROXIMATION, constant, window, plan, counterexample)


def transport_certificate(certificate: ControlCertificate, embedding: UniformEmbedding) -> ControlCertificate:
    """Constants a pushforward inherits: g(D) for lean, f(d) for insular."""
    if certificate.constant is None:
        raise ValueError("only certificates with a constant can be transported")
    if certificate.kind == CertificateKind.LEAN:
        constant = embedding.g.ceil(certificate.constant)
    elif certificate.kind in (CertificateKind.INSULAR, CertificateKind.ANTITHETIC_INSULAR):
        constant = embedding.f.floor(certificate.constant)
    else:
        raise ValueError(f"no transport rule for {certificate.kind.value} certificates")
    return ControlCertificate(
        kind=certificate.kind,
        constant=constant,
        window=max(transported_radius(embedding, certificate.window), 0),
        verdict=certificate.verdict,
        counterexample=certificate.counterexample,
        sampling=certificate.sampling,
        tags=certificate.tags + ["transported"],
        details={"source_constant": certificate.constant, "source_window": certificate.window},
    )


# -- equivariant structure ----------------------------------------------


Psi = Callable[[GroupElement], Callable[[ModuleVector], ModuleVector]]


def _translation_psi(gamma: GroupElement) -> Callable[[ModuleVector], ModuleVector]:
    inverse = gamma.inverse()
    return lambda vector: translate_vector(inverse, vector)


@dataclass
class EquivariantStructure:
    """psi(gamma): F -> gamma F of filtration degree 0, with its cocycle certificate."""

    carrier: FilteredModule
    psi: Psi
    certificate: ControlCertificate | None = None

    def apply(self, gamma: GroupElement, vector: ModuleVector) -> ModuleVector:
        return self.psi(gamma)(vector)


def _structure_failure(
    structure: EquivariantStructure, gammas: Sequence[Tuple[GroupElement, GroupElement]], window: int
) -> Counterexample | None:
    carrier = structure.carrier
    group = carrier.group
    ring = carrier.ring
    basis = [basis_vector(g, i, ring) for g in group.identity_ball(1) for i in range(carrier.module.rank)]
    for vector in basis:
        if structure.apply(group.identity, vector) != vector:
            return Counterexample(witness=vector_entries(vector, ring), gamma="e", note="psi(e) is not the identity")
    for first, second in gammas:
        for vector in basis:
            lhs = structure.apply(first * second, vector)
            rhs = structure.apply(second, structure.apply(first, vector))
            if lhs != rhs:
                return Counterexample(
                    witness=vector_entries(vector, ring),
                    gamma=(first * second).word,
                    note=f"cocycle law fails for ({first.word}, {second.word})",
                )
    # degree 0: psi(gamma) F(S) lands in F(gamma^-1 S)
    for gamma, _ in gammas:
        reach = window + carrier.slack
        radius = window - gamma.length
        if radius < 0:
            continue
        subset = ball(group.identity, min(radius, 1))
        moved = subset.translate(gamma.inverse())
        target = carrier.evaluate(moved, window, reach)
        for generator in carrier.generators(subset, window):
            image = structure.apply(gamma, generator)
            if image not in target:
                return Counterexample(
                    subsets=[subset.words()],
                    witness=vector_entries(image, ring),
                    gamma=gamma.word,
                    note="psi(gamma) does not have filtration degree 0",
                )
    return None


def equivariant_of(
    module: PresentedModule, window: int = 4, samples: int = 50, seed: int = 0
) -> EquivariantStructure:
    """psi(gamma) induced by s.sigma -> gamma^-1 s.sigma, with a sampled cocycle certificate."""
    carrier = standard_filtration(module)
    structure = EquivariantStructure(carrier, _translation_psi)
    structure.certificate = certify_structure(structure, window, samples, seed)
    return structure


def certify_structure(
    structure: EquivariantStructure, window: int = 4, samples: int = 50, seed: int = 0
) -> ControlCertificate:
    group = structure.carrier.group
    rng = random.Random(seed)
    radius = max(window // 2, 1)
    gammas = [(group.random_element(rng, radius), group.random_element(rng, radius)) for _ in range(samples)]
    counterexample = _structure_failure(structure, gammas, window)
    return _certificate(CertificateKind.EQUIVARIANCE, 0, window, None, counterexample, pairs=len(gammas))


def action_from_equivariant(structure: EquivariantStructure) -> PresentedModule:
    """The module whose action is a . x = sum of r_gamma psi(gamma^-1)(x)."""
    if structure.certificate is None or not structure.certificate.passed:
        raise UncertifiedStructureError("the equivariant structure has no passing cocycle certificate")
    module = structure.carrier.module

    def action(a: GroupRingElement, x: ModuleVector) -> ModuleVector:
        return combine(((c, structure.apply(g.inverse(), x)) for g, c in a.items()), module.ring)

    return PresentedModule(module.group, module.ring, module.rank, module.relations, module.sigma, module.labels, action)
