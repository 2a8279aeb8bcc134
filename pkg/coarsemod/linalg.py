"""
Exact submodule linear algebra over the supported rings.

This module handles the normal forms behind every inclusion test:

- `Echelon` is an incremental echelon basis of sparse vectors, built with
  extended-gcd row operations over Z and Z/n and plain elimination over
  fields. Over Z/n every new pivot row is followed by its annihilator
  multiple, which keeps the basis in Howell form so that greedy reduction
  decides membership.
- `WindowSubmodule` is a span of window vectors on top of an optional base
  submodule (the window truncation of the relations of a quotient).
- `window_kernel` computes kernels of scalar matrices: Smith normal form
  over Z, nullspace over fields and the Howell echelon over Z/n.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from typing import Dict, Hashable, List, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from coarsemod.errors import MismatchedSpecsError
from coarsemod.rings import Ring, Scalar, ring_from_alias
from coarsemod.types import RingKind

logger = logging.getLogger(__name__)

MAIN, TAG = 0, 1
Column = Tuple[int, Hashable, int]
Row = Dict[Column, Scalar]
Vector = Dict[Hashable, Scalar]


def _lin(ring: Ring, a: Scalar, x: Row, b: Scalar, y: Row) -> Row:
    """a*x + b*y with zeros pruned."""
    out: Row = {}
    for key in set(x) | set(y):
        value = ring.add(ring.mul(a, x.get(key, ring.zero)), ring.mul(b, y.get(key, ring.zero)))
        if not ring.is_zero(value):
            out[key] = value
    return out


def _scaled(ring: Ring, c: Scalar, x: Row) -> Row:
    out: Row = {}
    for key, value in x.items():
        product = ring.mul(c, value)
        if not ring.is_zero(product):
            out[key] = product
    return out


def _axpy(ring: Ring, y: Row, c: Scalar, x: Row) -> Row:
    """y + c*x."""
    out = dict(y)
    for key, value in x.items():
        total = ring.add(out.get(key, ring.zero), ring.mul(c, value))
        if ring.is_zero(total):
            out.pop(key, None)
        else:
            out[key] = total
    return out


class Echelon:
    """Incremental echelon basis keyed by pivot column."""

    __slots__ = ("ring", "rows")

    def __init__(self, ring: Ring):
        self.ring = ring
        self.rows: Dict[Column, Row] = {}

    def copy(self) -> "Echelon":
        other = Echelon(self.ring)
        other.rows = {pivot: dict(row) for pivot, row in self.rows.items()}
        return other

    def __len__(self) -> int:
        return len(self.rows)

    def add(self, vector: Row) -> None:
        ring = self.ring
        pending = [{k: v for k, v in vector.items() if not ring.is_zero(v)}]
        while pending:
            vec = pending.pop()
            while vec:
                pivot = min(vec)
                row = self.rows.get(pivot)
                if row is None:
                    unit, _ = ring.normalize(vec[pivot])
                    vec = _scaled(ring, unit, vec)
                    self.rows[pivot] = vec
                    pending.extend(self._saturation(vec, pivot))
                    break
                a, b = row[pivot], vec[pivot]
                if ring.divides(a, b):
                    vec = _axpy(ring, vec, ring.neg(ring.quo(b, a)), row)
                    continue
                _, s, t, u, v = ring.xgcd(a, b)
                new_row = _lin(ring, s, row, t, vec)
                unit, _ = ring.normalize(new_row[pivot])
                new_row = _scaled(ring, unit, new_row)
                self.rows[pivot] = new_row
                pending.extend(self._saturation(new_row, pivot))
                vec = _lin(ring, u, row, v, vec)

    def _saturation(self, row: Row, pivot: Column) -> List[Row]:
        x = self.ring.annihilator(row[pivot])
        if self.ring.is_zero(x):
            return []
        scaled = _scaled(self.ring, x, row)
        return [scaled] if scaled else []

    def reduce(self, vector: Row) -> Tuple[Row, bool]:
        """Reduce the main block of `vector`; returns (residual, main block cleared)."""
        ring = self.ring
        vec = {k: v for k, v in vector.items() if not ring.is_zero(v)}
        while vec:
            pivot = min(vec)
            if pivot[0] != MAIN:
                return vec, True
            row = self.rows.get(pivot)
            if row is None or not ring.divides(row[pivot], vec[pivot]):
                return vec, False
            vec = _axpy(ring, vec, ring.neg(ring.quo(vec[pivot], row[pivot])), row)
        return vec, True

    def tag_rows(self) -> List[Row]:
        return [self.rows[p] for p in sorted(self.rows) if p[0] == TAG]

    def main_rank(self) -> int:
        return sum(1 for p in self.rows if p[0] == MAIN)


def to_row(vector: Vector) -> Row:
    return {(MAIN, coord, 0): c for coord, c in vector.items()}


def from_row(row: Row) -> Vector:
    return {coord: c for (block, coord, _), c in row.items() if block == MAIN}


def _tag(k: int) -> Column:
    return (TAG, k, 0)


@dataclass(frozen=True)
class Membership:
    """Result of a membership query: `witness[k]` multiplies generator k."""

    member: bool
    witness: Tuple[Scalar, ...] | None = None

    def __bool__(self) -> bool:
        return self.member


class WindowSubmodule:
    """R-span of window vectors, on top of an optional base submodule.

    The echelon data are computed on first use and never change afterwards.
    """

    def __init__(
        self,
        ring: Ring,
        generators: Sequence[Vector],
        base: "WindowSubmodule | None" = None,
        label: str = "",
    ):
        if base is not None and base.ring != ring:
            raise MismatchedSpecsError("base submodule lives over a different ring")
        self.ring = ring
        self.generators: List[Vector] = [dict(g) for g in generators if g]
        self.base = base
        self.label = label
        self._lock = threading.Lock()
        self._plain: Echelon | None = None
        self._tagged: Echelon | None = None

    @classmethod
    def zero(cls, ring: Ring, base: "WindowSubmodule | None" = None) -> "WindowSubmodule":
        return cls(ring, [], base)

    def with_generators(self, generators: Sequence[Vector], label: str = "") -> "WindowSubmodule":
        """A new submodule over the same base."""
        return WindowSubmodule(self.ring, generators, self.base, label)

    def plain_echelon(self) -> Echelon:
        with self._lock:
            if self._plain is None:
                echelon = self.base.plain_echelon().copy() if self.base else Echelon(self.ring)
                for generator in self.generators:
                    echelon.add(to_row(generator))
                self._plain = echelon
        return self._plain

    def tagged_echelon(self) -> Echelon:
        with self._lock:
            if self._tagged is None:
                echelon = self.base.plain_echelon().copy() if self.base else Echelon(self.ring)
                for k, generator in enumerate(self.generators):
                    row = to_row(generator)
                    row[_tag(k)] = self.ring.one
                    echelon.add(row)
                self._tagged = echelon
        return self._tagged

    def contains(self, vector: Vector, witness: bool = False) -> Membership:
        if not witness:
            _, ok = self.plain_echelon().reduce(to_row(vector))
            return Membership(ok)
        residual, ok = self.tagged_echelon().reduce(to_row(vector))
        if not ok:
            return Membership(False)
        coefficients = tuple(
            self.ring.neg(residual.get(_tag(k), self.ring.zero)) for k in range(len(self.generators))
        )
        return Membership(True, coefficients)

    def __contains__(self, vector: Vector) -> bool:
        return self.contains(vector).member

    def recombine(self, coefficients: Sequence[Scalar]) -> Vector:
        """Sum of coefficients[k] * generator k."""
        total: Row = {}
        for c, generator in zip(coefficients, self.generators):
            total = _axpy(self.ring, total, c, to_row(generator))
        return from_row(total)

    def base_generators(self) -> List[Vector]:
        if self.base is None:
            return []
        return self.base.base_generators() + self.base.generators

    def all_generators(self) -> List[Vector]:
        return self.base_generators() + self.generators

    def is_subset_of(self, other: "WindowSubmodule") -> bool:
        return all(g in other for g in self.all_generators())

    def first_outside(self, other: "WindowSubmodule") -> Vector | None:
        """A generator of self (above a shared base) that is not in other."""
        candidates = self.generators if self.base is other.base else self.all_generators()
        for g in candidates:
            if g not in other:
                return g
        return None

    def span_equals(self, other: "WindowSubmodule") -> bool:
        return self.is_subset_of(other) and other.is_subset_of(self)

    def is_zero(self) -> bool:
        """True when the span adds nothing to the base."""
        base = self.base
        if base is None:
            return not self.generators
        return all(g in base for g in self.generators)

    def quotient_rank(self) -> int:
        """Echelon rank above the base."""
        base_rank = self.base.plain_echelon().main_rank() if self.base else 0
        return self.plain_echelon().main_rank() - base_rank

    def coordinates(self) -> List[Hashable]:
        seen = {coord for g in self.all_generators() for coord in g}
        return sorted(seen, key=_coordinate_order)

    def __repr__(self) -> str:
        name = f" {self.label}" if self.label else ""
        return f"WindowSubmodule({len(self.generators)} generators{name})"


def _coordinate_order(coord: Hashable):
    if isinstance(coord, tuple) and coord and hasattr(coord[0], "sort_key"):
        return (coord[0].sort_key, coord[1:])
    return coord


def membership(vector: Vector, module: WindowSubmodule) -> Membership:
    """Decide vector in module; the witness recombines the module's generators."""
    return module.contains(vector, witness=True)


def intersect(first: WindowSubmodule, second: WindowSubmodule) -> WindowSubmodule:
    """Generators of first ∩ second (both on the same base)."""
    if first.base is not second.base:
        raise MismatchedSpecsError("intersect needs submodules of the same window")
    ring = first.ring
    echelon = second.plain_echelon().copy()
    for k, generator in enumerate(first.generators):
        row = to_row(generator)
        row[_tag(k)] = ring.one
        echelon.add(row)
    generators: List[Vector] = []
    for row in echelon.tag_rows():
        coefficients = [row.get(_tag(k), ring.zero) for k in range(len(first.generators))]
        vector = first.recombine(coefficients)
        if vector:
            generators.append(vector)
    logger.debug("intersection has %d generators", len(generators))
    return WindowSubmodule(ring, generators, first.base, label="intersection")


def sum_of(modules: Sequence[WindowSubmodule], base: WindowSubmodule | None = None) -> WindowSubmodule:
    """Span of the union of generators (all modules on `base`)."""
    ring = modules[0].ring if modules else base.ring  # type: ignore[union-attr]
    generators = [g for module in modules for g in module.generators]
    return WindowSubmodule(ring, generators, base if base is not None else (modules[0].base if modules else None))


# -- kernels -------------------------------------------------------------


def window_kernel(matrix: Sequence[Sequence[Scalar]], ring: Ring, columns: int | None = None) -> WindowSubmodule:
    """Generators of {v : A v = 0}, indexed by column number."""
    width = columns if columns is not None else (len(matrix[0]) if matrix else 0)
    rows = [list(row) for row in matrix if any(not ring.is_zero(c) for c in row)]
    if width == 0:
        return WindowSubmodule(ring, [])
    if not rows:
        return WindowSubmodule(ring, [{j: ring.one} for j in range(width)], label="kernel")
    if ring.kind == RingKind.INTEGERS:
        vectors = _smith_kernel(rows, width, ring)
    elif ring.is_field:
        vectors = _field_kernel(rows, width, ring)
    else:
        vectors = _howell_kernel(rows, width, ring)
    return WindowSubmodule(ring, vectors, label="kernel")


def _smith_kernel(rows: List[List[Scalar]], width: int, ring: Ring) -> List[Vector]:
    dm = DomainMatrix([[ring.to_domain(c) for c in row] for row in rows], (len(rows), width), ring.domain)
    smf, _, t = smith_normal_decomp(dm)
    diagonal = smf.to_list()
    rank = sum(1 for i in range(min(len(rows), width)) if diagonal[i][i] != 0)
    t_rows = t.to_list()
    vectors: List[Vector] = []
    for j in range(rank, width):
        vector = {i: int(t_rows[i][j]) for i in range(width) if t_rows[i][j] != 0}
        if vector:
            vectors.append(vector)
    return vectors


def _field_kernel(rows: List[List[Scalar]], width: int, ring: Ring) -> List[Vector]:
    dm = DomainMatrix([[ring.to_domain(c) for c in row] for row in rows], (len(rows), width), ring.domain)
    basis = dm.nullspace().to_list()
    vectors: List[Vector] = []
    for row in basis:
        vector = {}
        for j, c in enumerate(row):
            value = ring.from_domain(c)
            if not ring.is_zero(value):
                vector[j] = value
        if vector:
            vectors.append(vector)
    return vectors


def _howell_kernel(rows: List[List[Scalar]], width: int, ring: Ring) -> List[Vector]:
    echelon = Echelon(ring)
    for j in range(width):
        column: Row = {(MAIN, i, 0): ring.coerce(row[j]) for i, row in enumerate(rows)}
        column[_tag(j)] = ring.one
        echelon.add(column)
    vectors: List[Vector] = []
    for row in echelon.tag_rows():
        vector = {k: c for (block, k, _), c in row.items() if block == TAG}
        if vector:
            vectors.append(vector)
    return vectors


def linear_map_kernel(
    domain: Sequence[Hashable],
    images: Sequence[Vector],
    ring: Ring,
    codomain_base: WindowSubmodule | None = None,
    dense: bool = False,
) -> List[Vector]:
    """Kernel of the R-linear map sending domain[k] to images[k].

    With `codomain_base`, kernel means mapping into that submodule. The
    combinations are read off the tagged echelon of the stacked system, or,
    with `dense`, from window_kernel of the dense coefficient matrix.
    """
    if codomain_base is not None or not dense:
        echelon = codomain_base.plain_echelon().copy() if codomain_base is not None else Echelon(ring)
        for k, image in enumerate(images):
            row = to_row(image)
            row[_tag(k)] = ring.one
            echelon.add(row)
        kernel: List[Vector] = []
        for row in echelon.tag_rows():
            vector = {domain[k]: c for (block, k, _), c in row.items() if block == TAG}
            if vector:
                kernel.append(vector)
        return kernel
    coordinates = sorted({c for image in images for c in image}, key=_coordinate_order)
    index = {c: i for i, c in enumerate(coordinates)}
    matrix = [[ring.zero] * len(domain) for _ in coordinates]
    for k, image in enumerate(images):
        for coord, value in image.items():
            matrix[index[coord]][k] = value
    module = window_kernel(matrix, ring, columns=len(domain))
    return [{domain[k]: c for k, c in vector.items()} for vector in module.generators]


def smith_contains(generators: Sequence[Vector], vector: Vector) -> bool:
    """Integer membership decided through Smith normal form; used as an oracle."""
    ring = ring_from_alias("ZZ")
    coordinates = sorted(
        {c for g in generators for c in g} | set(vector), key=_coordinate_order
    )
    if not generators:
        return all(c == 0 for c in vector.values())
    n, s = len(coordinates), len(generators)
    # columns of G^T are the generators
    dm = DomainMatrix(
        [[ring.to_domain(g.get(c, 0)) for g in generators] for c in coordinates], (n, s), ring.domain
    )
    smf, left, _ = smith_normal_decomp(dm)
    target = DomainMatrix([[ring.to_domain(vector.get(c, 0))] for c in coordinates], (n, 1), ring.domain)
    transformed = left.matmul(target).to_list()
    diagonal = smf.to_list()
    for i in range(n):
        value = int(transformed[i][0])
        d = int(diagonal[i][i]) if i < s else 0
        if d == 0:
            if value != 0:
                return False
        elif value % d != 0:
            return False
    return True
