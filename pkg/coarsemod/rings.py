"""
Exact scalar arithmetic over the supported coefficient rings.

This module wraps a RingSpec into a Ring that knows how to add, multiply,
divide exactly, run extended gcd steps and normalize pivots. Integers and
residues are plain ints (residues kept in [0, n)); rationals are sympy QQ
elements. No floating point is used anywhere.
"""

from __future__ import annotations

from math import gcd
from typing import Any, Dict, Tuple

from sympy import GF, QQ, ZZ

from coarsemod.types import RingKind, RingSpec

Scalar = Any


class Ring:
    """Arithmetic for one RingSpec."""

    def __init__(self, spec: RingSpec):
        self.spec = spec
        self.kind = spec.kind
        self.modulus = spec.modulus
        self.is_field = spec.is_field

    # -- construction ----------------------------------------------------

    @property
    def zero(self) -> Scalar:
        return self.coerce(0)

    @property
    def one(self) -> Scalar:
        return self.coerce(1)

    def coerce(self, value: Any) -> Scalar:
        if self.kind == RingKind.RATIONALS:
            return QQ.convert(value) if not isinstance(value, str) else self.parse(value)
        if isinstance(value, str):
            return self.parse(value)
        as_int = int(value)
        if self.modulus is not None:
            return as_int % self.modulus
        return as_int

    def parse(self, text: str) -> Scalar:
        stripped = text.strip()
        negative = stripped.startswith("-")
        body = stripped.lstrip("+-").strip()
        if "/" in body:
            num, den = (int(part) for part in body.split("/", 1))
            if den == 0:
                raise ValueError(f"zero denominator in coefficient '{text}'")
            if self.kind == RingKind.RATIONALS:
                value = QQ(num, den)
            elif self.modulus is not None and gcd(den, self.modulus) == 1:
                value = num * pow(den, -1, self.modulus) % self.modulus
            else:
                raise ValueError(f"coefficient '{text}' is not an element of {self.spec.alias}")
        else:
            value = self.coerce(int(body))
        return self.neg(value) if negative else value

    def format(self, value: Scalar) -> str:
        if self.kind == RingKind.RATIONALS:
            num, den = int(value.numerator), int(value.denominator)
            return str(num) if den == 1 else f"{num}/{den}"
        return str(int(value))

    # -- arithmetic ------------------------------------------------------

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        return self._reduce(a + b)

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        return self._reduce(a - b)

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        return self._reduce(a * b)

    def neg(self, a: Scalar) -> Scalar:
        return self._reduce(-a)

    def is_zero(self, a: Scalar) -> bool:
        return a == 0

    def _reduce(self, value: Scalar) -> Scalar:
        if self.modulus is not None:
            return value % self.modulus
        return value

    def inverse(self, a: Scalar) -> Scalar:
        if self.kind == RingKind.RATIONALS:
            return QQ(1) / a
        if self.modulus is not None:
            return pow(int(a), -1, self.modulus)
        if a in (1, -1):
            return a
        raise ZeroDivisionError(f"{a} is not a unit in {self.spec.alias}")

    def divides(self, a: Scalar, b: Scalar) -> bool:
        """True when a divides b in the ring."""
        if self.is_zero(b):
            return True
        if self.is_zero(a):
            return False
        if self.is_field:
            return True
        if self.modulus is not None:
            return b % gcd(a, self.modulus) == 0
        return b % a == 0

    def quo(self, b: Scalar, a: Scalar) -> Scalar:
        """Some q with q * a == b; requires divides(a, b)."""
        if self.is_field:
            return self.mul(b, self.inverse(a))
        if self.modulus is not None:
            g = gcd(a, self.modulus)
            unit = a // g
            reduced = self.modulus // g
            inverse = pow(unit, -1, reduced) if reduced > 1 else 0
            return (b // g) * inverse % self.modulus
        return b // a

    def xgcd(self, a: Scalar, b: Scalar) -> Tuple[Scalar, Scalar, Scalar, Scalar, Scalar]:
        """Return (g, s, t, u, v) with s*a + t*b = g, u*a + v*b = 0 and s*v - t*u = 1."""
        if self.is_field:
            inv = self.inverse(a)
            return self.one, inv, self.zero, self.neg(b), a
        s, t, g = ZZ.gcdex(ZZ(int(a)), ZZ(int(b)))
        s, t, g = int(s), int(t), int(g)
        u, v = -int(b) // g, int(a) // g
        return self._reduce(g), self._reduce(s), self._reduce(t), self._reduce(u), self._reduce(v)

    def normalize(self, a: Scalar) -> Tuple[Scalar, Scalar]:
        """Return (unit, unit * a) with unit * a the canonical associate of a.

        Fields map to 1, the integers to |a|, Z/n to gcd(a, n).
        """
        if self.is_zero(a):
            return self.one, a
        if self.is_field:
            inv = self.inverse(a)
            return inv, self.one
        if self.modulus is None:
            return (1, a) if a > 0 else (-1, -a)
        g = gcd(a, self.modulus)
        reduced = self.modulus // g
        if reduced == 1:
            return 1, a
        base = pow(a // g, -1, reduced)
        candidate = base
        while gcd(candidate, self.modulus) != 1:
            candidate += reduced
        return candidate % self.modulus, g % self.modulus

    def annihilator(self, a: Scalar) -> Scalar:
        """Generator of ann(a); nonzero only for zero divisors of Z/n."""
        if self.modulus is None or self.is_field:
            return self.zero
        g = gcd(a, self.modulus)
        return (self.modulus // g) % self.modulus if g != self.modulus else 1

    # -- sympy bridge ----------------------------------------------------

    @property
    def domain(self):
        """The sympy domain DomainMatrix computations run over.

        Z/n has no sympy domain; its matrices are multiplied over ZZ and reduced.
        """
        if self.kind == RingKind.RATIONALS:
            return QQ
        if self.kind == RingKind.PRIME_FIELD:
            return GF(self.modulus, symmetric=False)
        return ZZ

    def to_domain(self, value: Scalar):
        if self.kind == RingKind.PRIME_FIELD:
            return self.domain(int(value))
        return self.domain.convert(value)

    def from_domain(self, value) -> Scalar:
        if self.kind == RingKind.PRIME_FIELD:
            return int(self.domain.to_sympy(value)) % self.modulus
        if self.kind == RingKind.RATIONALS:
            return QQ.convert(value)
        return self._reduce(int(value))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Ring) and other.spec == self.spec

    def __hash__(self) -> int:
        return hash(self.spec.model_dump_json())

    def __repr__(self) -> str:
        return f"Ring({self.spec.alias})"


_RING_CACHE: Dict[str, Ring] = {}


def ring_from_spec(spec: RingSpec) -> Ring:
    key = spec.model_dump_json()
    if key not in _RING_CACHE:
        _RING_CACHE[key] = Ring(spec)
    return _RING_CACHE[key]


def ring_from_alias(alias: str) -> Ring:
    return ring_from_spec(RingSpec.from_alias(alias))


def change_ring(value: Scalar, source: Ring, target: Ring) -> Scalar:
    """Map a scalar along the canonical map Z -> target (used for mod-n reduction)."""
    if source.kind != RingKind.INTEGERS and source != target:
        raise ValueError(f"no canonical map {source.spec.alias} -> {target.spec.alias}")
    return target.coerce(int(value))
