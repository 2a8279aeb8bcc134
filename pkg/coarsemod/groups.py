"""
Finitely generated groups with word metrics.

This module handles normal forms, multiplication and word lengths for the
supported families: free abelian groups, free groups, products of trees
(products of free groups with the l1 product metric) and Baumslag-Solitar
groups. Elements are immutable normal-form keys bound to their group.
"""

from __future__ import annotations

import logging
import random
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Dict, Hashable, Iterable, List, Sequence, Tuple

from config import BS_RADIUS_CAP
from coarsemod.errors import (
    MismatchedSpecsError,
    RadiusCapExceededError,
    UnknownGeneratorError,
    UnsupportedFamilyError,
)
from coarsemod.types import GroupFamily, GroupSpec
from coarsemod.utils import format_word, tokenize_word

logger = logging.getLogger(__name__)

Letter = Tuple[int, int]
FreeKey = Tuple[Letter, ...]


@dataclass(frozen=True)
class GroupElement:
    """A group element stored as its normal-form key.

    Equality and hashing use the key only. Ordering is by normal-form length,
    then key, which gives every finite set a canonical order.
    """

    key: Hashable
    group: "Group" = field(compare=False, repr=False, hash=False)
    sort_key: tuple = field(init=False, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "sort_key", (self.group.nf_length(self.key), self.key))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return self.group.multiply(self, other)

    def __lt__(self, other: "GroupElement") -> bool:
        return self.sort_key < other.sort_key

    def inverse(self) -> "GroupElement":
        return self.group.inverse(self)

    @property
    def length(self) -> int:
        return self.group.word_length(self)

    @property
    def word(self) -> str:
        return self.group.format(self)

    @property
    def is_identity(self) -> bool:
        return self == self.group.identity

    def __str__(self) -> str:
        return self.word


def free_reduce(letters: Iterable[Letter]) -> FreeKey:
    """Freely reduce a sequence of (generator, exponent) letters."""
    word: List[Letter] = []
    for gen, power in letters:
        if power == 0:
            continue
        if word and word[-1][0] == gen:
            merged = word[-1][1] + power
            word.pop()
            if merged != 0:
                word.append((gen, merged))
        else:
            word.append((gen, power))
    return tuple(word)


def free_length(key: FreeKey) -> int:
    return sum(abs(power) for _, power in key)


def free_prefix(key: FreeKey, level: int) -> FreeKey:
    """The reduced prefix of length `level` (unit steps) of a reduced word."""
    prefix: List[Letter] = []
    remaining = level
    for gen, power in key:
        if remaining <= 0:
            break
        step = min(abs(power), remaining)
        prefix.append((gen, step if power > 0 else -step))
        remaining -= step
    return tuple(prefix)


class Group(ABC):
    """Base class for the supported group families."""

    def __init__(self, spec: GroupSpec):
        self.spec = spec
        self.names: List[str] = spec.generator_names()
        self._index: Dict[str, int] = {name: i for i, name in enumerate(self.names)}
        self._lock = threading.Lock()
        self._identity = GroupElement(self._reduce([]), self)
        self._levels: List[List[GroupElement]] = [[self._identity]]
        self._level_of: Dict[GroupElement, int] = {self._identity: 0}
        self._steps: List[GroupElement] = []
        for i in range(len(self.names)):
            self._steps.append(self.element(self._reduce([(i, 1)])))
            self._steps.append(self.element(self._reduce([(i, -1)])))

    # -- family specific -------------------------------------------------

    @abstractmethod
    def _reduce(self, letters: Sequence[Letter]) -> Hashable:
        """Normal-form key of a word given as (generator index, exponent) letters."""

    @abstractmethod
    def _letters(self, key: Hashable) -> List[Letter]:
        """A word (as letters) spelling the normal form `key`."""

    def nf_length(self, key: Hashable) -> int:
        return sum(abs(power) for _, power in self._letters(key))

    def word_length(self, g: GroupElement) -> int:
        return self.nf_length(g.key)

    @property
    def radius_cap(self) -> int | None:
        return None

    # -- generic ---------------------------------------------------------

    @property
    def identity(self) -> GroupElement:
        return self._identity

    @property
    def steps(self) -> List[GroupElement]:
        """Generators and their inverses."""
        return list(self._steps)

    def element(self, key: Hashable) -> GroupElement:
        return GroupElement(key, self)

    def generator(self, index: int, power: int = 1) -> GroupElement:
        return self.element(self._reduce([(index, power)]))

    def same_group(self, other: "Group") -> bool:
        return other is self or other.spec == self.spec

    def _check(self, *elements: GroupElement) -> None:
        for g in elements:
            if g.group is not self and not self.same_group(g.group):
                raise MismatchedSpecsError(
                    f"element {g.key!r} belongs to {g.group.spec.alias}, not {self.spec.alias}"
                )

    def multiply(self, a: GroupElement, b: GroupElement) -> GroupElement:
        self._check(a, b)
        return self.element(self._reduce(self._letters(a.key) + self._letters(b.key)))

    def inverse(self, a: GroupElement) -> GroupElement:
        letters = [(gen, -power) for gen, power in reversed(self._letters(a.key))]
        return self.element(self._reduce(letters))

    def power(self, a: GroupElement, exponent: int) -> GroupElement:
        base = a if exponent >= 0 else a.inverse()
        result = self.identity
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def _resolve_symbol(self, symbol: str, power: int) -> List[Letter]:
        if symbol in self._index:
            return [(self._index[symbol], power)]
        swapped = symbol.swapcase()
        if swapped in self._index and swapped != symbol:
            return [(self._index[swapped], -power)]
        # concatenated single-letter generators such as "abA"
        if len(symbol) > 1 and all(
            ch in self._index or ch.swapcase() in self._index for ch in symbol
        ):
            letters: List[Letter] = []
            for ch in symbol[:-1]:
                letters.extend(self._resolve_symbol(ch, 1))
            letters.extend(self._resolve_symbol(symbol[-1], power))
            return letters
        raise UnknownGeneratorError(symbol, self.names)

    def normal_form(self, word: str | Sequence[Tuple[str, int]]) -> GroupElement:
        """Reduce a generator word to its normal form."""
        tokens = tokenize_word(word) if isinstance(word, str) else list(word)
        letters: List[Letter] = []
        for symbol, power in tokens:
            letters.extend(self._resolve_symbol(symbol, power))
        return self.element(self._reduce(letters))

    def letters(self, g: GroupElement) -> List[Letter]:
        """The normal form of g as (generator index, exponent) letters."""
        return self._letters(g.key)

    def format(self, g: GroupElement) -> str:
        return format_word([(self.names[gen], power) for gen, power in self._letters(g.key)])

    def distance(self, g: GroupElement, h: GroupElement) -> int:
        self._check(g, h)
        return self.word_length(self.inverse(g) * h)

    def neighbors(self, g: GroupElement) -> List[GroupElement]:
        return [g * s for s in self._steps]

    def check_radius(self, r: int) -> None:
        cap = self.radius_cap
        if cap is not None and r > cap:
            raise RadiusCapExceededError(cap, r)

    def _expand_levels(self, r: int) -> None:
        with self._lock:
            while len(self._levels) <= r:
                frontier = self._levels[-1]
                depth = len(self._levels)
                fresh: Dict[GroupElement, None] = {}
                for g in frontier:
                    for s in self._steps:
                        h = g * s
                        if h not in self._level_of and h not in fresh:
                            fresh[h] = None
                level = sorted(fresh)
                for h in level:
                    self._level_of[h] = depth
                self._levels.append(level)
                logger.debug("%s: sphere %d has %d elements", self.spec.alias, depth, len(level))

    def bfs_sphere(self, r: int) -> List[GroupElement]:
        """Sphere of radius r by breadth-first search in the Cayley graph."""
        self.check_radius(r)
        self._expand_levels(r)
        return list(self._levels[r])

    def bfs_ball(self, r: int) -> List[GroupElement]:
        self.check_radius(r)
        self._expand_levels(r)
        return [g for level in self._levels[: r + 1] for g in level]

    def sphere(self, r: int) -> List[GroupElement]:
        return self.bfs_sphere(r)

    def identity_ball(self, r: int) -> List[GroupElement]:
        result: List[GroupElement] = []
        for k in range(r + 1):
            result.extend(self.sphere(k))
        return result

    def ball(self, center: GroupElement, r: int) -> List[GroupElement]:
        """Elements at distance <= r from center, canonically ordered."""
        if r < 0:
            return []
        self._check(center)
        base = self.identity_ball(r)
        if center.is_identity:
            return base
        return sorted(center * w for w in base)

    def random_element(self, rng: random.Random, radius: int) -> GroupElement:
        g = self.identity
        for _ in range(rng.randint(0, radius)):
            g = g * rng.choice(self._steps)
        return g

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec.alias})"


class FreeAbelianGroup(Group):
    """Z^n with the l1 word metric of the standard generators."""

    def __init__(self, spec: GroupSpec):
        self.rank = spec.rank or 0
        super().__init__(spec)
        self._spheres: Dict[int, List[GroupElement]] = {}

    def _reduce(self, letters: Sequence[Letter]) -> Tuple[int, ...]:
        coords = [0] * self.rank
        for gen, power in letters:
            coords[gen] += power
        return tuple(coords)

    def _letters(self, key: Tuple[int, ...]) -> List[Letter]:
        return [(i, x) for i, x in enumerate(key) if x != 0]

    def nf_length(self, key: Tuple[int, ...]) -> int:
        return sum(abs(x) for x in key)

    def multiply(self, a: GroupElement, b: GroupElement) -> GroupElement:
        self._check(a, b)
        return self.element(tuple(x + y for x, y in zip(a.key, b.key)))

    def inverse(self, a: GroupElement) -> GroupElement:
        return self.element(tuple(-x for x in a.key))

    def from_coordinates(self, coords: Sequence[int]) -> GroupElement:
        if len(coords) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(coords)}")
        return self.element(tuple(int(x) for x in coords))

    def sphere(self, r: int) -> List[GroupElement]:
        """Lattice points with l1 norm exactly r (closed-form enumeration)."""
        if r not in self._spheres:
            points = set()
            for split in _compositions(r, self.rank):
                nonzero = [i for i, x in enumerate(split) if x]
                for signs in cartesian((1, -1), repeat=len(nonzero)):
                    coords = list(split)
                    for i, sign in zip(nonzero, signs):
                        coords[i] *= sign
                    points.add(tuple(coords))
            self._spheres[r] = sorted(self.element(p) for p in points)
        return list(self._spheres[r])

def _compositions(total: int, parts: int) -> Iterable[Tuple[int, ...]]:
    """Non-negative integer vectors of length `parts` summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class FreeGroup(Group):
    """Free group on k generators; its Cayley graph is the 2k-regular tree."""

    def _reduce(self, letters: Sequence[Letter]) -> FreeKey:
        return free_reduce(letters)

    def _letters(self, key: FreeKey) -> List[Letter]:
        return list(key)

    def nf_length(self, key: FreeKey) -> int:
        return free_length(key)

    def multiply(self, a: GroupElement, b: GroupElement) -> GroupElement:
        self._check(a, b)
        return self.element(free_reduce(a.key + b.key))

    def radial(self, g: GroupElement) -> List[Tuple[int, FreeKey]]:
        """One (length, reduced word) pair per tree factor."""
        return [(free_length(g.key), g.key)]


class ProductOfTreesGroup(Group):
    """Direct product of free groups with the l1 sum of the factor metrics."""

    def __init__(self, spec: GroupSpec):
        self.branchings = list(spec.branchings or [])
        self._factor_of: List[Tuple[int, int]] = []
        for factor, branching in enumerate(self.branchings):
            self._factor_of.extend((factor, local) for local in range(branching))
        self._offsets = [sum(self.branchings[:j]) for j in range(len(self.branchings))]
        super().__init__(spec)

    @property
    def factor_count(self) -> int:
        return len(self.branchings)

    def _reduce(self, letters: Sequence[Letter]) -> Tuple[FreeKey, ...]:
        per_factor: List[List[Letter]] = [[] for _ in self.branchings]
        for gen, power in letters:
            factor, local = self._factor_of[gen]
            per_factor[factor].append((local, power))
        return tuple(free_reduce(word) for word in per_factor)

    def _letters(self, key: Tuple[FreeKey, ...]) -> List[Letter]:
        letters: List[Letter] = []
        for factor, word in enumerate(key):
            offset = self._offsets[factor]
            letters.extend((offset + local, power) for local, power in word)
        return letters

    def nf_length(self, key: Tuple[FreeKey, ...]) -> int:
        return sum(free_length(word) for word in key)

    def multiply(self, a: GroupElement, b: GroupElement) -> GroupElement:
        self._check(a, b)
        return self.element(tuple(free_reduce(x + y) for x, y in zip(a.key, b.key)))

    def radial(self, g: GroupElement) -> List[Tuple[int, FreeKey]]:
        return [(free_length(word), word) for word in g.key]


class BaumslagSolitarGroup(Group):
    """BS(m, n) = <x, y | x y^m x^-1 = y^n>.

    Normal form: y^{r_1} x^{e_1} ... y^{r_k} x^{e_k} y^N with 0 <= r_i < n
    when e_i = +1 and 0 <= r_i < m when e_i = -1, and no pinch x^e y^0 x^-e.
    The key is (((r_1, e_1), ..., (r_k, e_k)), N). Word lengths come from a
    breadth-first search over normal forms, capped at BS_RADIUS_CAP.
    """

    X, Y = 0, 1

    def __init__(self, spec: GroupSpec, cap: int = BS_RADIUS_CAP):
        self.m = spec.m or 1
        self.n = spec.n or 1
        self._cap = cap
        super().__init__(spec)

    @property
    def radius_cap(self) -> int | None:
        return self._cap

    def _reduce(self, letters: Sequence[Letter]) -> Tuple[Tuple[Letter, ...], int]:
        stack: List[Letter] = []
        exponent = 0
        for gen, power in letters:
            if gen == self.Y:
                exponent += power
                continue
            sign = 1 if power > 0 else -1
            for _ in range(abs(power)):
                exponent = self._push_x(stack, exponent, sign)
        return tuple(stack), exponent

    def _push_x(self, stack: List[Letter], exponent: int, sign: int) -> int:
        # y^N x = y^r x y^{mq} for N = nq + r; y^N x^-1 = y^r x^-1 y^{nq} for N = mq + r
        modulus, image = (self.n, self.m) if sign > 0 else (self.m, self.n)
        quotient, remainder = divmod(exponent, modulus)
        if remainder == 0 and stack and stack[-1][1] == -sign:
            previous, _ = stack.pop()
            return previous + image * quotient
        stack.append((remainder, sign))
        return image * quotient

    def _letters(self, key: Tuple[Tuple[Letter, ...], int]) -> List[Letter]:
        syllables, exponent = key
        letters: List[Letter] = []
        for remainder, sign in syllables:
            if remainder:
                letters.append((self.Y, remainder))
            letters.append((self.X, sign))
        if exponent:
            letters.append((self.Y, exponent))
        return letters

    def word_length(self, g: GroupElement) -> int:
        if g in self._level_of:
            return self._level_of[g]
        bound = min(self.nf_length(g.key), self._cap)
        for r in range(len(self._levels), bound + 1):
            self._expand_levels(r)
            if g in self._level_of:
                return self._level_of[g]
        if g in self._level_of:
            return self._level_of[g]
        raise RadiusCapExceededError(self._cap, self.nf_length(g.key))


_FAMILIES = {
    GroupFamily.FREE_ABELIAN: FreeAbelianGroup,
    GroupFamily.FREE: FreeGroup,
    GroupFamily.PRODUCT_OF_TREES: ProductOfTreesGroup,
    GroupFamily.BAUMSLAG_SOLITAR: BaumslagSolitarGroup,
}
_GROUP_CACHE: Dict[str, Group] = {}
_CACHE_LOCK = threading.Lock()


def group_from_spec(spec: GroupSpec) -> Group:
    """Return the shared Group instance for a spec (ball caches are reused)."""
    cls = _FAMILIES.get(spec.family)
    if cls is None:
        raise UnsupportedFamilyError(f"unsupported group family: {spec.family}")
    cache_key = spec.model_dump_json()
    with _CACHE_LOCK:
        group = _GROUP_CACHE.get(cache_key)
        if group is None:
            group = cls(spec)
            _GROUP_CACHE[cache_key] = group
    return group


def group_from_alias(alias: str) -> Group:
    return group_from_spec(GroupSpec.from_alias(alias))
