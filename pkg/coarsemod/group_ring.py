"""
Group-ring arithmetic.

This module handles finitely supported R-linear combinations of group
elements, matrices over the group ring, and the sparse coordinate vectors
that represent elements of free modules R[G]^k inside finite windows.

Conventions: R[G]^k consists of row vectors; G acts on the left by
translating coordinates, and a matrix M acts on the right, x -> x M, so
every matrix map is G-equivariant.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from coarsemod.errors import MismatchedSpecsError
from coarsemod.groups import Group, GroupElement
from coarsemod.rings import Ring, Scalar, change_ring
from coarsemod.types import CoordinateEntry
from coarsemod.utils import split_coefficient, split_terms

Coordinate = Tuple[GroupElement, int]
ModuleVector = Dict[Coordinate, Scalar]


def _check_compatible(group: Group, ring: Ring, other_group: Group, other_ring: Ring) -> None:
    if not group.same_group(other_group):
        raise MismatchedSpecsError(
            f"group mismatch: {group.spec.alias} vs {other_group.spec.alias}"
        )
    if ring != other_ring:
        raise MismatchedSpecsError(f"ring mismatch: {ring.spec.alias} vs {other_ring.spec.alias}")


class GroupRingElement:
    """Finitely supported map G -> R with no stored zero coefficient."""

    __slots__ = ("group", "ring", "_terms")

    def __init__(self, group: Group, ring: Ring, terms: Mapping[GroupElement, Scalar] | None = None):
        self.group = group
        self.ring = ring
        self._terms: Dict[GroupElement, Scalar] = {}
        for g, c in (terms or {}).items():
            value = ring.coerce(c)
            if not ring.is_zero(value):
                self._terms[g] = value

    @classmethod
    def zero(cls, group: Group, ring: Ring) -> "GroupRingElement":
        return cls(group, ring)

    @classmethod
    def one(cls, group: Group, ring: Ring) -> "GroupRingElement":
        return cls(group, ring, {group.identity: 1})

    @classmethod
    def monomial(cls, g: GroupElement, ring: Ring, coeff: Scalar = 1) -> "GroupRingElement":
        return cls(g.group, ring, {g: coeff})

    @classmethod
    def parse(cls, text: str, group: Group, ring: Ring) -> "GroupRingElement":
        """Parse text such as ``t^2 - 1`` or ``3*a*b^-1 + 1/2``."""
        terms: Dict[GroupElement, Scalar] = {}
        for sign, term in split_terms(text):
            coeff_text, word = split_coefficient(term)
            coeff = ring.parse(coeff_text)
            if sign < 0:
                coeff = ring.neg(coeff)
            g = group.normal_form(word)
            terms[g] = ring.add(terms.get(g, ring.zero), coeff)
        return cls(group, ring, terms)

    @classmethod
    def from_json(cls, data: Sequence[Mapping[str, str]], group: Group, ring: Ring) -> "GroupRingElement":
        terms: Dict[GroupElement, Scalar] = {}
        for item in data:
            g = group.normal_form(item["word"])
            terms[g] = ring.add(terms.get(g, ring.zero), ring.parse(item["coeff"]))
        return cls(group, ring, terms)

    # -- inspection ------------------------------------------------------

    def support(self) -> List[GroupElement]:
        return sorted(self._terms)

    def items(self) -> List[Tuple[GroupElement, Scalar]]:
        return [(g, self._terms[g]) for g in sorted(self._terms)]

    def coeff(self, g: GroupElement) -> Scalar:
        return self._terms.get(g, self.ring.zero)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def radius(self) -> int:
        """Largest word length in the support (0 for the zero element)."""
        return max((g.length for g in self._terms), default=0)

    def augmentation(self) -> Scalar:
        total = self.ring.zero
        for c in self._terms.values():
            total = self.ring.add(total, c)
        return total

    # -- arithmetic ------------------------------------------------------

    def _combine(self, other: "GroupRingElement", sign: int) -> "GroupRingElement":
        _check_compatible(self.group, self.ring, other.group, other.ring)
        terms = dict(self._terms)
        for g, c in other._terms.items():
            value = c if sign > 0 else self.ring.neg(c)
            terms[g] = self.ring.add(terms.get(g, self.ring.zero), value)
        return GroupRingElement(self.group, self.ring, terms)

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        return self._combine(other, 1)

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        return self._combine(other, -1)

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement(
            self.group, self.ring, {g: self.ring.neg(c) for g, c in self._terms.items()}
        )

    def __mul__(self, other: "GroupRingElement") -> "GroupRingElement":
        return gr_mul(self, other)

    def scale(self, c: Scalar) -> "GroupRingElement":
        return GroupRingElement(
            self.group, self.ring, {g: self.ring.mul(c, v) for g, v in self._terms.items()}
        )

    def translate(self, gamma: GroupElement) -> "GroupRingElement":
        """Left multiplication by a group element."""
        return GroupRingElement(self.group, self.ring, {gamma * g: c for g, c in self._terms.items()})

    def involution(self) -> "GroupRingElement":
        """The anti-automorphism sum r_g g -> sum r_g g^-1."""
        return GroupRingElement(self.group, self.ring, {g.inverse(): c for g, c in self._terms.items()})

    def change_ring(self, target: Ring) -> "GroupRingElement":
        return GroupRingElement(
            self.group, target, {g: change_ring(c, self.ring, target) for g, c in self._terms.items()}
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.group.same_group(other.group) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self.items()))

    # -- serialization ---------------------------------------------------

    def to_json(self) -> List[Dict[str, str]]:
        return [{"word": g.word, "coeff": self.ring.format(c)} for g, c in self.items()]

    def format(self) -> str:
        if not self._terms:
            return "0"
        parts: List[str] = []
        for g, c in self.items():
            text = self.ring.format(c)
            negative = text.startswith("-")
            magnitude = text.lstrip("-")
            if g.is_identity:
                body = magnitude
            elif magnitude == "1":
                body = g.word
            else:
                body = f"{magnitude}*{g.word}"
            if not parts:
                parts.append(f"-{body}" if negative else body)
            else:
                parts.append(f"- {body}" if negative else f"+ {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"GroupRingElement({self.format()})"


def gr_mul(a: GroupRingElement, b: GroupRingElement) -> GroupRingElement:
    """Convolution product in R[G]."""
    _check_compatible(a.group, a.ring, b.group, b.ring)
    ring = a.ring
    terms: Dict[GroupElement, Scalar] = {}
    for g, c in a._terms.items():
        for h, d in b._terms.items():
            gh = g * h
            terms[gh] = ring.add(terms.get(gh, ring.zero), ring.mul(c, d))
    return GroupRingElement(a.group, ring, terms)


class GroupRingMatrix:
    """Sparse rows x cols matrix over R[G]; presents a map R[G]^rows -> R[G]^cols."""

    def __init__(
        self,
        group: Group,
        ring: Ring,
        rows: int,
        cols: int,
        entries: Mapping[Tuple[int, int], GroupRingElement] | None = None,
    ):
        self.group = group
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self._entries: Dict[Tuple[int, int], GroupRingElement] = {}
        for (i, j), value in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry ({i},{j}) outside a {rows}x{cols} matrix")
            _check_compatible(group, ring, value.group, value.ring)
            if not value.is_zero():
                self._entries[(i, j)] = value

    @classmethod
    def identity(cls, group: Group, ring: Ring, size: int) -> "GroupRingMatrix":
        one = GroupRingElement.one(group, ring)
        return cls(group, ring, size, size, {(i, i): one for i in range(size)})

    @classmethod
    def from_rows(
        cls, group: Group, ring: Ring, rows: Sequence[Sequence[GroupRingElement | str]]
    ) -> "GroupRingMatrix":
        if not rows:
            raise ValueError("from_rows needs at least one row")
        width = len(rows[0])
        entries: Dict[Tuple[int, int], GroupRingElement] = {}
        for i, row in enumerate(rows):
            if len(row) != width:
                raise ValueError("all rows must have the same length")
            for j, value in enumerate(row):
                element = GroupRingElement.parse(value, group, ring) if isinstance(value, str) else value
                entries[(i, j)] = element
        return cls(group, ring, len(rows), width, entries)

    @classmethod
    def from_triplets(
        cls,
        group: Group,
        ring: Ring,
        rows: int,
        cols: int,
        triplets: Iterable[Tuple[int, int, str]],
    ) -> "GroupRingMatrix":
        entries: Dict[Tuple[int, int], GroupRingElement] = {}
        for i, j, text in triplets:
            value = GroupRingElement.parse(text, group, ring)
            entries[(i, j)] = entries[(i, j)] + value if (i, j) in entries else value
        return cls(group, ring, rows, cols, entries)

    def entry(self, i: int, j: int) -> GroupRingElement:
        return self._entries.get((i, j), GroupRingElement.zero(self.group, self.ring))

    def row(self, i: int) -> List[GroupRingElement]:
        return [self.entry(i, j) for j in range(self.cols)]

    def row_entries(self, i: int) -> List[Tuple[int, GroupRingElement]]:
        return sorted((j, v) for (r, j), v in self._entries.items() if r == i)

    def nonzero_entries(self) -> List[Tuple[int, int, GroupRingElement]]:
        return [(i, j, self._entries[(i, j)]) for i, j in sorted(self._entries)]

    def is_zero(self) -> bool:
        return not self._entries

    @property
    def radius(self) -> int:
        return max((v.radius for v in self._entries.values()), default=0)

    def __matmul__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        if self.cols != other.rows:
            raise MismatchedSpecsError(
                f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}"
            )
        _check_compatible(self.group, self.ring, other.group, other.ring)
        entries: Dict[Tuple[int, int], GroupRingElement] = {}
        for (i, k), a in self._entries.items():
            for (k2, j), b in other._entries.items():
                if k2 != k:
                    continue
                product = gr_mul(a, b)
                entries[(i, j)] = entries[(i, j)] + product if (i, j) in entries else product
        return GroupRingMatrix(self.group, self.ring, self.rows, other.cols, entries)

    def _combine(self, other: "GroupRingMatrix", sign: int) -> "GroupRingMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise MismatchedSpecsError("matrix shapes differ")
        entries = dict(self._entries)
        for key, value in other._entries.items():
            value = value if sign > 0 else -value
            entries[key] = entries[key] + value if key in entries else value
        return GroupRingMatrix(self.group, self.ring, self.rows, self.cols, entries)

    def __add__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        return self._combine(other, 1)

    def __sub__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        return self._combine(other, -1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupRingMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self._entries == other._entries

    def is_idempotent(self) -> bool:
        return self.rows == self.cols and self @ self == self

    def change_ring(self, target: Ring) -> "GroupRingMatrix":
        return GroupRingMatrix(
            self.group,
            target,
            self.rows,
            self.cols,
            {key: value.change_ring(target) for key, value in self._entries.items()},
        )

    def stack(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        """Rows of self followed by rows of other."""
        if self.cols != other.cols:
            raise MismatchedSpecsError("stacked matrices need the same column count")
        entries = dict(self._entries)
        for (i, j), value in other._entries.items():
            entries[(i + self.rows, j)] = value
        return GroupRingMatrix(self.group, self.ring, self.rows + other.rows, self.cols, entries)

    def row_vectors(self) -> List[ModuleVector]:
        return [row_to_vector(self.row(i)) for i in range(self.rows)]

    def to_triplets(self) -> List[list]:
        return [[i, j, value.to_json()] for i, j, value in self.nonzero_entries()]

    def __repr__(self) -> str:
        return f"GroupRingMatrix({self.rows}x{self.cols}, {len(self._entries)} nonzero)"


# -- module vectors -----------------------------------------------------


def row_to_vector(row: Sequence[GroupRingElement]) -> ModuleVector:
    vector: ModuleVector = {}
    for i, element in enumerate(row):
        for g, c in element.items():
            vector[(g, i)] = c
    return vector


def vector_to_row(vector: ModuleVector, group: Group, ring: Ring, rank: int) -> List[GroupRingElement]:
    terms: List[Dict[GroupElement, Scalar]] = [{} for _ in range(rank)]
    for (g, i), c in vector.items():
        terms[i][g] = c
    return [GroupRingElement(group, ring, t) for t in terms]


def basis_vector(g: GroupElement, index: int, ring: Ring) -> ModuleVector:
    return {(g, index): ring.one}


def add_into(target: ModuleVector, source: ModuleVector, ring: Ring, scale: Scalar | None = None) -> None:
    """target += scale * source, in place, pruning zeros."""
    for coord, c in source.items():
        value = c if scale is None else ring.mul(scale, c)
        total = ring.add(target.get(coord, ring.zero), value)
        if ring.is_zero(total):
            target.pop(coord, None)
        else:
            target[coord] = total


def combine(vectors: Iterable[Tuple[Scalar, ModuleVector]], ring: Ring) -> ModuleVector:
    result: ModuleVector = {}
    for scale, vector in vectors:
        add_into(result, vector, ring, scale)
    return result


def subtract(a: ModuleVector, b: ModuleVector, ring: Ring) -> ModuleVector:
    result = dict(a)
    add_into(result, b, ring, ring.neg(ring.one))
    return result


def translate_vector(gamma: GroupElement, vector: ModuleVector) -> ModuleVector:
    """Left action of gamma on a coordinate vector."""
    return {(gamma * g, i): c for (g, i), c in vector.items()}


def apply_matrix(vector: ModuleVector, matrix: GroupRingMatrix) -> ModuleVector:
    """Right multiplication x -> x M on a coordinate vector."""
    ring = matrix.ring
    rows = {i: matrix.row_entries(i) for i in range(matrix.rows)}
    result: ModuleVector = {}
    for (g, i), c in vector.items():
        for j, element in rows[i]:
            for h, d in element.items():
                coord = (g * h, j)
                total = ring.add(result.get(coord, ring.zero), ring.mul(c, d))
                if ring.is_zero(total):
                    result.pop(coord, None)
                else:
                    result[coord] = total
    return result


def vector_radius(vector: ModuleVector) -> int:
    return max((g.length for g, _ in vector), default=0)


def vector_entries(vector: ModuleVector, ring: Ring) -> List[CoordinateEntry]:
    """Canonically ordered JSON-ready entries of a coordinate vector."""
    return [
        CoordinateEntry(word=g.word, index=i, coeff=ring.format(c))
        for (g, i), c in sorted(vector.items(), key=lambda item: (item[0][0].sort_key, item[0][1]))
    ]
