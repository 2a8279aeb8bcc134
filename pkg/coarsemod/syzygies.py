"""
Syzygy computation for group-ring matrices.

This module handles the kernel {x : x A = 0} (optionally modulo target
relations) of a matrix A over R[G], in two ways:

- Over R[Z^n] with R a field the kernel is computed exactly. The Laurent
  ring is presented as a polynomial ring in x_i, y_i with x_i y_i - 1, a
  module R[G]^m is encoded by position variables e_j, and the rows of A are
  tagged by variables u_i. Under a lex order with e first, the Groebner
  basis elements free of e and linear in u are generators of the syzygy
  module.
- Everywhere else the kernel is computed inside a window ball(e, r) and a
  generating set is chosen greedily up to translation. Generation is only
  claimed for kernel elements supported in that ball.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Dict, List, Sequence, Tuple

from sympy import Integer, QQ, groebner, symbols

from coarsemod.errors import UnsupportedTierError
from coarsemod.group_ring import (
    GroupRingElement,
    GroupRingMatrix,
    ModuleVector,
    apply_matrix,
    row_to_vector,
    translate_vector,
    vector_radius,
    vector_to_row,
)
from coarsemod.groups import FreeAbelianGroup, Group
from coarsemod.linalg import Echelon, WindowSubmodule, linear_map_kernel, to_row
from coarsemod.rings import Ring
from coarsemod.types import RingKind, SyzygyMode

logger = logging.getLogger(__name__)

Row = List[GroupRingElement]


@dataclass(frozen=True)
class SyzygyResult:
    """Kernel generators of a matrix, each a row of length `width`."""

    group: Group
    ring: Ring
    width: int
    generators: Tuple[Tuple[GroupRingElement, ...], ...]
    mode: SyzygyMode
    radius: int | None = None

    @property
    def label(self) -> str:
        if self.mode == SyzygyMode.WINDOW_VERIFIED:
            return f"{self.mode.value}({self.radius})"
        return self.mode.value

    @property
    def is_zero(self) -> bool:
        return not self.generators

    def matrix(self) -> GroupRingMatrix | None:
        """Generators stacked as rows, or None for the zero kernel."""
        if self.is_zero:
            return None
        return GroupRingMatrix.from_rows(self.group, self.ring, [list(g) for g in self.generators])

    def to_json(self) -> Dict[str, object]:
        return {
            "mode": self.label,
            "generators": [[entry.format() for entry in row] for row in self.generators],
        }


def is_tier_a(group: Group, ring: Ring) -> bool:
    """Exact kernels are available over R[Z^n] with R a field."""
    return isinstance(group, FreeAbelianGroup) and ring.is_field


def annihilates(row: Sequence[GroupRingElement], matrix: GroupRingMatrix) -> bool:
    return not apply_matrix(row_to_vector(row), matrix)


def _sort_rows(rows: List[Row]) -> List[Row]:
    return sorted(rows, key=lambda row: [entry.format() for entry in row])


# -- Groebner route -----------------------------------------------------


class _LaurentEncoding:
    """Symbols and conversions between R[Z^n] and the polynomial presentation."""

    def __init__(self, group: FreeAbelianGroup, ring: Ring, positions: int, tags: int):
        self.group = group
        self.ring = ring
        n = group.rank
        self.e = list(symbols(f"e0:{positions}")) if positions else []
        self.u = list(symbols(f"u0:{tags}")) if tags else []
        self.x = list(symbols(f"x0:{n}"))
        self.y = list(symbols(f"y0:{n}"))
        self.inverses = [xi * yi - 1 for xi, yi in zip(self.x, self.y)]

    def options(self) -> Dict[str, object]:
        if self.ring.kind == RingKind.PRIME_FIELD:
            return {"order": "lex", "modulus": self.ring.modulus}
        return {"order": "lex", "domain": QQ}

    def scalar(self, value):
        if self.ring.kind == RingKind.RATIONALS:
            return QQ.to_sympy(value)
        return Integer(int(value))

    def element(self, a: GroupRingElement):
        total = Integer(0)
        for g, c in a.items():
            term = self.scalar(c)
            for i, exponent in enumerate(g.key):
                term *= self.x[i] ** exponent if exponent >= 0 else self.y[i] ** (-exponent)
            total += term
        return total

    def quadratics(self, variables: Sequence) -> List:
        return [a * b for a, b in combinations_with_replacement(variables, 2)]

    def tagged_row(self, row: Sequence[GroupRingElement], tag) -> object:
        expression = tag if tag is not None else Integer(0)
        for j, entry in enumerate(row):
            if not entry.is_zero():
                expression += self.element(entry) * self.e[j]
        return expression

    def read_row(self, poly) -> Row | None:
        """A u-linear, e-free polynomial as a row over R[Z^n]; None otherwise."""
        positions = len(self.e)
        tags = len(self.u)
        n = len(self.x)
        terms: List[Dict] = [{} for _ in range(tags)]
        for monomial, coeff in poly.terms():
            if any(monomial[:positions]):
                return None
            u_part = monomial[positions : positions + tags]
            if sum(u_part) != 1:
                return None
            index = u_part.index(1)
            xs = monomial[positions + tags : positions + tags + n]
            ys = monomial[positions + tags + n :]
            g = self.group.from_coordinates([a - b for a, b in zip(xs, ys)])
            value = self.ring.coerce(coeff)
            bucket = terms[index]
            bucket[g] = self.ring.add(bucket.get(g, self.ring.zero), value)
        return [GroupRingElement(self.group, self.ring, t) for t in terms]

    def tag_expression(self, row: Sequence[GroupRingElement]):
        return sum((self.element(entry) * tag for entry, tag in zip(row, self.u)), Integer(0))


def _recentre(row: Row, group: FreeAbelianGroup) -> Row:
    """Translate a row by a monomial so every exponent is >= 0 and some is 0."""
    keys = [g.key for entry in row for g in entry.support()]
    if not keys:
        return row
    shift = group.from_coordinates([-min(k[i] for k in keys) for i in range(group.rank)])
    return [entry.translate(shift) for entry in row]


def _generates(encoding: _LaurentEncoding, spanning: Sequence[Row], candidates: Sequence[Row]) -> bool:
    gens = [*encoding.u, *encoding.x, *encoding.y]
    ideal = [encoding.tag_expression(r) for r in spanning]
    ideal += encoding.quadratics(encoding.u) + encoding.inverses
    basis = groebner(ideal, *gens, **encoding.options())
    return all(basis.contains(encoding.tag_expression(c)) for c in candidates)


def _minimize(encoding: _LaurentEncoding, rows: List[Row]) -> List[Row]:
    if len(rows) <= 1:
        return rows
    by_size = sorted(rows, key=lambda r: (sum(len(e.support()) for e in r), max(e.radius for e in r)))
    for single in by_size:
        if _generates(encoding, [single], rows):
            return [single]
    kept = list(reversed(by_size))
    for row in list(kept):
        rest = [r for r in kept if r is not row]
        if rest and _generates(encoding, rest, [row]):
            kept = rest
    return kept


def groebner_syzygies(matrix: GroupRingMatrix, relations: GroupRingMatrix | None = None) -> SyzygyResult:
    """All x with x A in the span of the relation rows, over R[Z^n] with R a field."""
    group, ring = matrix.group, matrix.ring
    if not is_tier_a(group, ring):
        raise UnsupportedTierError(
            f"complete kernels need a free abelian group and a field, got {ring.spec.alias}[{group.spec.alias}]"
        )
    encoding = _LaurentEncoding(group, ring, matrix.cols, matrix.rows)
    polynomials = [encoding.tagged_row(matrix.row(i), encoding.u[i]) for i in range(matrix.rows)]
    if relations is not None:
        polynomials += [
            encoding.tagged_row(relations.row(i), None)
            for i in range(relations.rows)
            if any(not entry.is_zero() for entry in relations.row(i))
        ]
    polynomials += encoding.quadratics([*encoding.e, *encoding.u]) + encoding.inverses
    gens = [*encoding.e, *encoding.u, *encoding.x, *encoding.y]
    basis = groebner(polynomials, *gens, **encoding.options())
    rows: List[Row] = []
    for poly in basis.polys:
        row = encoding.read_row(poly)
        if row is not None and any(not entry.is_zero() for entry in row):
            rows.append(_recentre(row, group))
    logger.debug("groebner basis of %d elements gave %d syzygies", len(basis.polys), len(rows))
    rows = _minimize(encoding, rows)
    logger.info("exact kernel with %d generators", len(rows))
    return SyzygyResult(
        group, ring, matrix.rows, tuple(tuple(r) for r in _sort_rows(rows)), SyzygyMode.GROEBNER_COMPLETE
    )


# -- window route -------------------------------------------------------


def relation_window(relations: GroupRingMatrix, reach: int) -> WindowSubmodule | None:
    rows = [v for v in relations.row_vectors() if v]
    if not rows:
        return None
    group = relations.group
    translates = [
        translate_vector(gamma, row) for row in rows for gamma in group.identity_ball(reach - vector_radius(row))
    ]
    return WindowSubmodule(relations.ring, translates, label=f"relations@{reach}")


def translate_generators(vectors: Sequence[ModuleVector], group: Group, ring: Ring, radius: int) -> List[ModuleVector]:
    """Greedy subset whose translates supported in ball(e, radius) span all of `vectors`."""
    echelon = Echelon(ring)
    shifts = group.identity_ball(2 * radius)
    chosen: List[ModuleVector] = []
    for vector in sorted(vectors, key=lambda v: (vector_radius(v), len(v))):
        _, covered = echelon.reduce(to_row(vector))
        if covered:
            continue
        chosen.append(vector)
        for gamma in shifts:
            moved = translate_vector(gamma, vector)
            if vector_radius(moved) <= radius:
                echelon.add(to_row(moved))
    return chosen


def window_syzygies(
    matrix: GroupRingMatrix, relations: GroupRingMatrix | None = None, radius: int = 3
) -> SyzygyResult:
    """Generators, up to translation, of the kernel elements supported in ball(e, radius)."""
    group, ring = matrix.group, matrix.ring
    domain = [(g, i) for g in group.identity_ball(radius) for i in range(matrix.rows)]
    images = [apply_matrix({coord: ring.one}, matrix) for coord in domain]
    base = None
    if relations is not None:
        reach = radius + matrix.radius + relations.radius
        base = relation_window(relations, reach)
    kernel = linear_map_kernel(domain, images, ring, base)
    chosen = translate_generators(kernel, group, ring, radius)
    rows = [vector_to_row(v, group, ring, matrix.rows) for v in chosen]
    logger.info("window kernel at radius %d: %d vectors, %d generators", radius, len(kernel), len(rows))
    return SyzygyResult(
        group,
        ring,
        matrix.rows,
        tuple(tuple(r) for r in _sort_rows(rows)),
        SyzygyMode.WINDOW_VERIFIED,
        radius,
    )
