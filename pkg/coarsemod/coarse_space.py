"""
Coarse geometry of the supported groups.

This module handles finite metric subsets, balls and metric enlargements,
the shipped asymptotic-dimension covers and their window verification, and
uniform embeddings given by homomorphisms with witness envelopes f <= g.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from itertools import combinations, product as cartesian
from typing import Callable, Dict, Hashable, Iterable, List, Mapping, Sequence, Tuple

from coarsemod.errors import (
    MismatchedSpecsError,
    NonDivergentWitnessError,
    UnsupportedFamilyError,
    WindowTooSmallError,
)
from coarsemod.groups import (
    FreeAbelianGroup,
    FreeGroup,
    Group,
    GroupElement,
    ProductOfTreesGroup,
    free_prefix,
    group_from_spec,
)
from coarsemod.types import (
    CertificateKind,
    ControlCertificate,
    Counterexample,
    CoverSpec,
    EmbeddingSpec,
    GroupSpec,
    Verdict,
    WitnessTable,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MetricSubset:
    """A finite subset of a group, stored canonically ordered and duplicate free.

    `center` and `radius` are kept when the subset was built as a ball.
    """

    group: Group = field(repr=False, compare=False)
    elements: Tuple[GroupElement, ...]
    center: GroupElement | None = field(default=None, compare=False)
    radius: int | None = field(default=None, compare=False)
    _members: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_members", frozenset(self.elements))

    @classmethod
    def of(cls, group: Group, elements: Iterable[GroupElement]) -> "MetricSubset":
        return cls(group, tuple(sorted(set(elements))))

    @classmethod
    def from_words(cls, group: Group, words: Iterable[str]) -> "MetricSubset":
        return cls.of(group, (group.normal_form(w) for w in words))

    @classmethod
    def empty(cls, group: Group) -> "MetricSubset":
        return cls(group, ())

    def __contains__(self, g: GroupElement) -> bool:
        return g in self._members

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def is_empty(self) -> bool:
        return not self.elements

    def issubset(self, other: "MetricSubset") -> bool:
        return self._members <= other._members

    def union(self, other: "MetricSubset") -> "MetricSubset":
        return MetricSubset.of(self.group, self._members | other._members)

    def intersection(self, other: "MetricSubset") -> "MetricSubset":
        return MetricSubset.of(self.group, self._members & other._members)

    def translate(self, gamma: GroupElement) -> "MetricSubset":
        return MetricSubset.of(self.group, (gamma * g for g in self.elements))

    def max_length(self) -> int:
        return max((g.length for g in self.elements), default=0)

    def words(self) -> List[str]:
        return [g.word for g in self.elements]

    def to_json(self) -> Dict[str, List[str]]:
        return {"elements": self.words()}

    def __repr__(self) -> str:
        if self.center is not None:
            return f"MetricSubset(ball({self.center.word}, {self.radius}))"
        return f"MetricSubset({self.words()})"


# -- metric operations --------------------------------------------------


def normal_form(word: str, spec: GroupSpec) -> GroupElement:
    return group_from_spec(spec).normal_form(word)


def distance(g: GroupElement, h: GroupElement) -> int:
    """Word length of g^-1 h."""
    return g.group.distance(g, h)


def neighbors(g: GroupElement) -> List[GroupElement]:
    return g.group.neighbors(g)


def sphere(group: Group, r: int) -> MetricSubset:
    return MetricSubset(group, tuple(group.sphere(r)), group.identity, r)


def ball(center: GroupElement, r: int) -> MetricSubset:
    group = center.group
    return MetricSubset(group, tuple(group.ball(center, r)), center, r)


def enlarge(subset: MetricSubset, b: int) -> MetricSubset:
    """S[b]: union of the radius-b balls about the points of S."""
    group = subset.group
    group.check_radius(b)
    seen = set(subset.elements)
    frontier = list(subset.elements)
    for _ in range(b):
        fresh: List[GroupElement] = []
        for g in frontier:
            for h in group.neighbors(g):
                if h not in seen:
                    seen.add(h)
                    fresh.append(h)
        frontier = fresh
    return MetricSubset.of(group, seen)


def farthest_pair(points: Sequence[GroupElement]) -> Tuple[int, Tuple[GroupElement, GroupElement] | None]:
    """Diameter of a finite set together with a pair realizing it."""
    if len(points) < 2:
        return 0, None
    group = points[0].group
    if isinstance(group, FreeAbelianGroup):
        # l1 diameter is the largest spread of a signed coordinate sum
        best, pair = -1, None
        for signs in cartesian((1, -1), repeat=group.rank):
            scored = [(sum(s * x for s, x in zip(signs, p.key)), p) for p in points]
            low = min(scored, key=lambda item: (item[0], item[1].sort_key))
            high = max(scored, key=lambda item: (item[0], item[1].sort_key))
            if high[0] - low[0] > best:
                best, pair = high[0] - low[0], (low[1], high[1])
        return best, pair
    best, pair = -1, None
    for x, y in combinations(points, 2):
        d = group.distance(x, y)
        if d > best:
            best, pair = d, (x, y)
    return best, pair


def diameter(points: Iterable[GroupElement]) -> int:
    return farthest_pair(list(points))[0]


def sample_pairs(group: Group, radius: int, count: int, seed: int = 0) -> List[Tuple[GroupElement, GroupElement]]:
    """Deterministic pairs: (e, s^k) along every generator direction, then random pairs in ball(e, radius)."""
    pairs: List[Tuple[GroupElement, GroupElement]] = []
    e = group.identity
    for step in group.steps:
        g = e
        for _ in range(radius):
            g = g * step
            pairs.append((e, g))
    points = group.identity_ball(radius)
    rng = random.Random(seed)
    for _ in range(count):
        pairs.append((rng.choice(points), rng.choice(points)))
    return pairs


# -- covers -------------------------------------------------------------

MemberRule = Callable[[GroupElement], List[Hashable | None]]


class Cover:
    """Families of subsets with a uniform diameter bound and a separation R.

    A cover is either rule based (members_of computes each family's member
    key) or explicit (finite member lists, as read from JSON).
    """

    def __init__(
        self,
        group: Group,
        bound: int,
        separation: int,
        family_count: int,
        rule: MemberRule | None = None,
        families: Sequence[Sequence[MetricSubset]] | None = None,
    ):
        if (rule is None) == (families is None):
            raise ValueError("a cover needs exactly one of a member rule or explicit families")
        self.group = group
        self.bound = bound
        self.separation = separation
        self.family_count = family_count
        self._rule = rule
        self._explicit: List[Dict[GroupElement, int]] | None = None
        self._families = [list(f) for f in families] if families is not None else None
        if families is not None:
            self._explicit = []
            for family in families:
                lookup: Dict[GroupElement, int] = {}
                for index, member in enumerate(family):
                    for g in member:
                        lookup.setdefault(g, index)
                self._explicit.append(lookup)

    @classmethod
    def from_spec(cls, group: Group, spec: CoverSpec) -> "Cover":
        families = [[MetricSubset.from_words(group, member) for member in family] for family in spec.families]
        return cls(group, spec.bound, spec.separation, len(families), families=families)

    def members_of(self, x: GroupElement) -> List[Hashable | None]:
        """Member key of x in each family, None where x is uncovered."""
        if self._rule is not None:
            return self._rule(x)
        return [lookup.get(x) for lookup in self._explicit or []]

    def restrict(self, window: MetricSubset) -> "Cover":
        """The explicit cover formed by the members' traces on a window."""
        grouped: List[Dict[Hashable, List[GroupElement]]] = [{} for _ in range(self.family_count)]
        for x in window:
            for i, key in enumerate(self.members_of(x)):
                if key is not None:
                    grouped[i].setdefault(key, []).append(x)
        families = [
            [MetricSubset.of(self.group, members) for _, members in sorted(family.items(), key=lambda kv: min(kv[1]).sort_key)]
            for family in grouped
        ]
        return Cover(self.group, self.bound, self.separation, self.family_count, families=families)

    def to_json(self) -> Dict[str, object]:
        if self._families is None:
            raise ValueError("rule-based covers serialize through restrict(window)")
        return {
            "families": [[member.words() for member in family] for family in self._families],
            "bound": self.bound,
            "separation": self.separation,
        }

    def to_spec(self) -> CoverSpec:
        data = self.to_json()
        return CoverSpec(families=data["families"], bound=self.bound, separation=self.separation)


def _brick_parameters(separation: int, dimension: int) -> Tuple[int, int, int]:
    # neighbouring bricks sit 2 * margin + 1 apart, which must exceed the separation
    margin = max(math.ceil(separation / 2), 1)
    shift = 2 * margin
    period = (dimension + 1) * shift
    return margin, shift, period


def _lattice_cover(group: FreeAbelianGroup, separation: int) -> Cover:
    n = group.rank
    margin, shift, period = _brick_parameters(separation, n)

    def rule(x: GroupElement) -> List[Hashable | None]:
        keys: List[Hashable | None] = []
        for i in range(n + 1):
            offset = i * shift
            if all(margin <= (c - offset) % period < period - margin for c in x.key):
                keys.append(tuple((c - offset) // period for c in x.key))
            else:
                keys.append(None)
        return keys

    bound = n * (period - 2 * margin - 1)
    return Cover(group, bound, separation, n + 1, rule=rule)


def _tree_cover(group: FreeGroup | ProductOfTreesGroup, separation: int) -> Cover:
    factors = 1 if isinstance(group, FreeGroup) else group.factor_count
    margin, shift, period = _brick_parameters(separation, factors)

    def rule(x: GroupElement) -> List[Hashable | None]:
        radial = group.radial(x)
        keys: List[Hashable | None] = []
        for i in range(factors + 1):
            offset = i * shift
            if all(margin <= (length - offset) % period < period - margin for length, _ in radial):
                key = []
                for length, word in radial:
                    annulus = (length - offset) // period
                    level = max(annulus * period + offset, 0)
                    key.append((annulus, free_prefix(word, level)))
                keys.append(tuple(key))
            else:
                keys.append(None)
        return keys

    bound = factors * 2 * (period - margin - 1)
    return Cover(group, bound, separation, factors + 1, rule=rule)


def build_cover(spec: GroupSpec, separation: int) -> Cover:
    """A cover by dimension + 1 uniformly bounded R-disjoint families."""
    group = group_from_spec(spec)
    if isinstance(group, FreeAbelianGroup):
        cover = _lattice_cover(group, separation)
    elif isinstance(group, (FreeGroup, ProductOfTreesGroup)):
        cover = _tree_cover(group, separation)
    else:
        raise UnsupportedFamilyError(f"no constructive cover shipped for {spec.alias}")
    logger.info("built %d-family cover of %s at R=%d, bound %d", cover.family_count, spec.alias, separation, cover.bound)
    return cover


def _cover_failure(window: MetricSubset, bound: int, note: str, **fields) -> ControlCertificate:
    return ControlCertificate(
        kind=CertificateKind.COVER,
        constant=bound,
        window=window.radius if window.radius is not None else window.max_length(),
        verdict=Verdict.FAIL,
        counterexample=Counterexample(note=note, **fields),
    )


def verify_cover(cover: Cover, separation: int, window: MetricSubset) -> ControlCertificate:
    """Check coverage, the diameter bound and R-disjointness inside a window."""
    keys: Dict[GroupElement, List[Hashable | None]] = {}
    for x in window:
        memberships = cover.members_of(x)
        if all(k is None for k in memberships):
            logger.info("cover check: %s is uncovered", x.word)
            return _cover_failure(window, cover.bound, "uncovered point", point=x.word)
        keys[x] = memberships

    for i in range(cover.family_count):
        members: Dict[Hashable, List[GroupElement]] = {}
        for x, memberships in keys.items():
            if memberships[i] is not None:
                members.setdefault(memberships[i], []).append(x)
        for points in members.values():
            d, pair = farthest_pair(points)
            if d > cover.bound and pair is not None:
                return _cover_failure(
                    window,
                    cover.bound,
                    f"member of family {i} has diameter {d} > {cover.bound}",
                    pair=[pair[0].word, pair[1].word],
                )

    group = window.group
    offsets = group.identity_ball(separation)
    by_key = {x.key: x for x in keys}
    lattice = isinstance(group, FreeAbelianGroup)
    for x, memberships in keys.items():
        for w in offsets:
            if lattice:
                y = by_key.get(tuple(a + b for a, b in zip(x.key, w.key)))
            else:
                y = by_key.get((x * w).key)
            if y is None or not (x < y):
                continue
            other = keys[y]
            for i in range(cover.family_count):
                if memberships[i] is not None and other[i] is not None and memberships[i] != other[i]:
                    return _cover_failure(
                        window,
                        cover.bound,
                        f"members of family {i} are not {separation}-disjoint",
                        pair=[x.word, y.word],
                    )

    return ControlCertificate(
        kind=CertificateKind.COVER,
        constant=cover.bound,
        window=window.radius if window.radius is not None else window.max_length(),
        verdict=Verdict.PASS,
        details={"families": cover.family_count, "separation": separation, "points": len(window)},
    )


# -- uniform embeddings -------------------------------------------------


@dataclass(frozen=True)
class UniformEmbedding:
    """A homomorphism given on generators, with witnesses f <= g."""

    source: Group
    target: Group
    images: Tuple[GroupElement, ...]
    f: WitnessTable
    g: WitnessTable

    def __post_init__(self) -> None:
        if self.f.slope() <= 0 or self.g.slope() <= 0:
            raise NonDivergentWitnessError("uniform embedding witnesses must diverge")
        if len(self.images) != len(self.source.names):
            raise MismatchedSpecsError("one image per source generator is required")
        self._check_relations()

    @classmethod
    def from_images(
        cls,
        source: Group,
        target: Group,
        images: Mapping[str, str],
        f: WitnessTable,
        g: WitnessTable,
    ) -> "UniformEmbedding":
        unknown = set(images) - set(source.names)
        if unknown:
            raise MismatchedSpecsError(f"images given for unknown generators {sorted(unknown)}")
        elements = tuple(
            target.normal_form(images.get(name, "e")) for name in source.names
        )
        return cls(source, target, elements, f, g)

    @classmethod
    def from_spec(cls, source: Group, spec: EmbeddingSpec) -> "UniformEmbedding":
        return cls.from_images(source, group_from_spec(spec.target), spec.images, spec.f, spec.g)

    @classmethod
    def identity(cls, group: Group) -> "UniformEmbedding":
        one = WitnessTable.linear(1)
        return cls(group, group, tuple(group.generator(i) for i in range(len(group.names))), one, one)

    def _check_relations(self) -> None:
        source = self.source
        if isinstance(source, FreeAbelianGroup):
            for a, b in combinations(self.images, 2):
                if a * b != b * a:
                    raise MismatchedSpecsError("images of commuting generators must commute")
        elif source.spec.m is not None and source.spec.n is not None:
            x, y = self.images
            m, n = source.spec.m, source.spec.n
            target = self.target
            lhs = x * target.power(y, m) * x.inverse()
            if lhs != target.power(y, n):
                raise MismatchedSpecsError("images violate the Baumslag-Solitar relation")

    def __call__(self, x: GroupElement) -> GroupElement:
        result = self.target.identity
        for generator, power in self.source.letters(x):
            result = result * self.target.power(self.images[generator], power)
        return result

    def preimage(self, subset: MetricSubset, window: int) -> MetricSubset:
        """j^-1(S), searched in the source ball the lower witness allows."""
        reach = max((self.target.word_length(s) for s in subset), default=0)
        radius = self.f.largest_argument_below(reach)
        if radius > window:
            raise WindowTooSmallError(
                f"preimage of a radius-{reach} set needs source radius {radius} > window {window}",
                required=radius,
            )
        if radius < 0 or subset.is_empty():
            return MetricSubset.empty(self.source)
        return MetricSubset.of(self.source, (x for x in self.source.identity_ball(radius) if self(x) in subset))


def verify_uniform_embedding(
    embedding: UniformEmbedding, pairs: Sequence[Tuple[GroupElement, GroupElement]]
) -> ControlCertificate:
    """Check f(d1) <= d2 <= g(d1) on every sampled pair."""
    window = 0
    for x, y in pairs:
        d1 = embedding.source.distance(x, y)
        d2 = embedding.target.distance(embedding(x), embedding(y))
        window = max(window, x.length, y.length)
        side = None
        if embedding.f.value(d1) > d2:
            side = "lower"
        elif d2 > embedding.g.value(d1):
            side = "upper"
        if side is not None:
            logger.info("embedding violates the %s witness at d1=%d, d2=%d", side, d1, d2)
            return ControlCertificate(
                kind=CertificateKind.UNIFORM_EMBEDDING,
                window=window,
                verdict=Verdict.FAIL,
                counterexample=Counterexample(
                    pair=[x.word, y.word],
                    side=side,
                    note=f"source distance {d1}, image distance {d2}",
                ),
            )
    return ControlCertificate(
        kind=CertificateKind.UNIFORM_EMBEDDING,
        window=window,
        verdict=Verdict.PASS,
        details={"pairs": len(pairs)},
    )


def transported_radius(embedding: UniformEmbedding, r: int) -> int:
    """Largest target radius whose preimage stays inside the source ball of radius r."""
    return embedding.f.ceil(r + 1) - 1
