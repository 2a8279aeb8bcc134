"""
Base types and enums for coarsemod.

This module contains the lowest volatility components: the schema models for
groups, rings, witness functions, sampling plans, certificates, tasks and
reports. Runtime algebraic objects live in their own modules and are built
from these specifications.
"""

from __future__ import annotations

import math
import re
from enum import Enum
from typing import Any, Dict, List

from pydantic import BaseModel, Field
from pydantic import ConfigDict, field_validator, model_validator
from sympy import Rational, isprime

_SYMBOL_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


class GroupFamily(str, Enum):
    """Supported group families."""

    FREE_ABELIAN = "free_abelian"
    FREE = "free"
    BAUMSLAG_SOLITAR = "baumslag_solitar"
    PRODUCT_OF_TREES = "product_of_trees"


class RingKind(str, Enum):
    """Supported coefficient rings."""

    INTEGERS = "integers"
    RATIONALS = "rationals"
    INTEGERS_MOD = "integers_mod"
    PRIME_FIELD = "prime_field"


class FiltrationKind(str, Enum):
    """Filtration rules a module spec may request."""

    STANDARD = "standard"
    IMAGE = "image"
    COKERNEL = "cokernel"
    PUSHFORWARD = "pushforward"
    PRODUCT = "product"


class CertificateKind(str, Enum):
    LEAN = "lean"
    INSULAR = "insular"
    ANTITHETIC_INSULAR = "antithetic-insular"
    BOUNDED = "bounded"
    BICONTROLLED = "bicontrolled"
    LOCAL_FINITE = "localFinite"
    COVER = "cover"
    UNIFORM_EMBEDDING = "uniform-embedding"
    EQUIVARIANCE = "equivariance"
    EXACTNESS = "exactness"
    IDEMPOTENT = "idempotent"
    GENERATING_SET = "generating-set"
    APPROXIMATION = "approximation"


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"


class Command(str, Enum):
    """Task commands understood by the CLI."""

    BALL = "ball"
    COVER = "cover"
    EMBED_CHECK = "embed-check"
    FILTRATION = "filtration"
    LEAN_CHECK = "lean-check"
    INSULAR_CHECK = "insular-check"
    CONTROL_CHECK = "control-check"
    CLASSIFY = "classify"
    RESOLVE = "resolve"
    IDEMPOTENT = "idempotent"
    DISTANCE = "distance"
    NORMAL_FORM = "normal-form"
    ENLARGE = "enlarge"
    EQUIVARIANCE = "equivariance"


class InsularVariant(str, Enum):
    STRICT = "strict"
    ANTITHETIC = "antithetic"


class SyzygyMode(str, Enum):
    """How completely a kernel generating set is known."""

    GROEBNER_COMPLETE = "groebner-complete"
    WINDOW_VERIFIED = "window-verified"


class MorphismClass(str, Enum):
    """Admissibility verdicts of a filtered morphism."""

    BOTH = "both"
    ADMISSIBLE_MONO = "admissible-mono"
    ADMISSIBLE_EPI = "admissible-epi"
    NEITHER = "neither"


class GroupSpec(BaseModel):
    """A finitely generated group from one of the supported families."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True, strict=True)

    family: GroupFamily
    rank: int | None = Field(default=None, description="n for FreeAbelian(n), k for Free(k)")
    m: int | None = None
    n: int | None = None
    branchings: List[int] | None = Field(
        default=None, description="Free-group rank of each tree factor"
    )
    generators: List[str] | None = None

    @field_validator("generators")
    @classmethod
    def _validate_generators(cls, value: List[str] | None) -> List[str] | None:
        if value is None:
            return value
        for name in value:
            if not _SYMBOL_RE.match(name):
                raise ValueError(f"generator name '{name}' is not a valid symbol")
        if len(set(value)) != len(value):
            raise ValueError("generator names must be unique")
        return value

    @model_validator(mode="after")
    def _validate_family_fields(self) -> "GroupSpec":
        if self.family in (GroupFamily.FREE_ABELIAN, GroupFamily.FREE):
            if self.rank is None or self.rank < 1:
                raise ValueError(f"{self.family.value} requires rank >= 1")
        elif self.family == GroupFamily.BAUMSLAG_SOLITAR:
            if self.m is None or self.n is None or self.m < 1 or self.n < 1:
                raise ValueError("baumslag_solitar requires m >= 1 and n >= 1")
        elif self.family == GroupFamily.PRODUCT_OF_TREES:
            if not self.branchings or any(b < 1 for b in self.branchings):
                raise ValueError("product_of_trees requires a non-empty list of branchings >= 1")
        if self.generators is not None and len(self.generators) != self.generator_count():
            raise ValueError(
                f"expected {self.generator_count()} generator names, got {len(self.generators)}"
            )
        return self

    def generator_count(self) -> int:
        if self.family == GroupFamily.BAUMSLAG_SOLITAR:
            return 2
        if self.family == GroupFamily.PRODUCT_OF_TREES:
            return sum(self.branchings or [])
        return self.rank or 0

    def generator_names(self) -> List[str]:
        if self.generators is not None:
            return list(self.generators)
        if self.family == GroupFamily.FREE_ABELIAN:
            if self.rank == 1:
                return ["t"]
            return [f"t{i + 1}" for i in range(self.rank or 0)]
        if self.family == GroupFamily.FREE:
            return list(_ALPHABET[: self.rank or 0])
        if self.family == GroupFamily.BAUMSLAG_SOLITAR:
            return ["x", "y"]
        names: List[str] = []
        for factor, branching in enumerate(self.branchings or [], start=1):
            names.extend(f"{_ALPHABET[i]}{factor}" for i in range(branching))
        return names

    @property
    def alias(self) -> str:
        if self.family == GroupFamily.FREE_ABELIAN:
            return "Z" if self.rank == 1 else f"Z{self.rank}"
        if self.family == GroupFamily.FREE:
            return f"F{self.rank}"
        if self.family == GroupFamily.BAUMSLAG_SOLITAR:
            return f"BS({self.m},{self.n})"
        return "T(" + ",".join(str(b) for b in self.branchings or []) + ")"

    @classmethod
    def from_alias(cls, alias: str) -> "GroupSpec":
        text = alias.replace(" ", "")
        if re.fullmatch(r"Z\d*", text):
            return cls(family=GroupFamily.FREE_ABELIAN, rank=int(text[1:] or "1"))
        if re.fullmatch(r"F\d+", text):
            return cls(family=GroupFamily.FREE, rank=int(text[1:]))
        match = re.fullmatch(r"BS\((\d+),(\d+)\)", text)
        if match:
            return cls(
                family=GroupFamily.BAUMSLAG_SOLITAR,
                m=int(match.group(1)),
                n=int(match.group(2)),
            )
        match = re.fullmatch(r"T\((\d+(?:,\d+)*)\)", text)
        if match:
            return cls(
                family=GroupFamily.PRODUCT_OF_TREES,
                branchings=[int(b) for b in match.group(1).split(",")],
            )
        raise ValueError(
            f"Unknown group alias '{alias}'. Expected Z, Zn, Fk, BS(m,n) or T(b1,...,bk)"
        )


class RingSpec(BaseModel):
    """One of the four computable coefficient rings."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True, strict=True)

    kind: RingKind
    modulus: int | None = None

    @model_validator(mode="after")
    def _validate_modulus(self) -> "RingSpec":
        if self.kind == RingKind.INTEGERS_MOD:
            if self.modulus is None or self.modulus < 2:
                raise ValueError("integers_mod requires modulus n >= 2")
        elif self.kind == RingKind.PRIME_FIELD:
            if self.modulus is None or not isprime(self.modulus):
                raise ValueError("prime_field requires a prime modulus p")
        elif self.modulus is not None:
            raise ValueError(f"{self.kind.value} takes no modulus")
        return self

    @property
    def is_field(self) -> bool:
        return self.kind in (RingKind.RATIONALS, RingKind.PRIME_FIELD)

    @property
    def alias(self) -> str:
        if self.kind == RingKind.INTEGERS:
            return "ZZ"
        if self.kind == RingKind.RATIONALS:
            return "QQ"
        if self.kind == RingKind.INTEGERS_MOD:
            return f"Z/{self.modulus}"
        return f"GF({self.modulus})"

    @classmethod
    def from_alias(cls, alias: str) -> "RingSpec":
        text = alias.replace(" ", "")
        if text in ("ZZ", "Z"):
            return cls(kind=RingKind.INTEGERS)
        if text in ("QQ", "Q"):
            return cls(kind=RingKind.RATIONALS)
        match = re.fullmatch(r"Z/(\d+)(?:Z)?", text)
        if match:
            return cls(kind=RingKind.INTEGERS_MOD, modulus=int(match.group(1)))
        match = re.fullmatch(r"(?:GF|F)\((\d+)\)", text)
        if match:
            return cls(kind=RingKind.PRIME_FIELD, modulus=int(match.group(1)))
        raise ValueError(f"Unknown ring alias '{alias}'. Expected ZZ, QQ, Z/n or GF(p)")


class WitnessTable(BaseModel):
    """Monotone piecewise-linear function on the naturals, given by breakpoints.

    Values between breakpoints are interpolated; beyond the last breakpoint the
    last segment's slope is extended. Monotonicity and divergence are checked on
    the table only.
    """

    model_config = ConfigDict(extra="forbid", validate_assignment=True, strict=True)

    points: List[List[int]]

    @field_validator("points")
    @classmethod
    def _validate_points(cls, value: List[List[int]]) -> List[List[int]]:
        if len(value) < 2:
            raise ValueError("a witness table needs at least two breakpoints")
        for point in value:
            if len(point) != 2 or point[0] < 0 or point[1] < 0:
                raise ValueError("breakpoints are [t, value] pairs of naturals")
        for (t0, v0), (t1, v1) in zip(value, value[1:]):
            if t1 <= t0:
                raise ValueError("breakpoint arguments must be strictly increasing")
            if v1 < v0:
                raise ValueError("witness function must be monotone")
        (t0, v0), (t1, v1) = value[-2], value[-1]
        if v1 <= v0:
            raise ValueError("witness function must diverge: last segment has slope 0")
        return value

    def value(self, t: int) -> Rational:
        pts = self.points
        if t <= pts[0][0]:
            return Rational(pts[0][1])
        for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
            if t <= t1:
                return Rational(v0) + Rational(v1 - v0, t1 - t0) * (t - t0)
        (t0, v0), (t1, v1) = pts[-2], pts[-1]
        return Rational(v1) + Rational(v1 - v0, t1 - t0) * (t - t1)

    def floor(self, t: int) -> int:
        return int(math.floor(self.value(t)))

    def ceil(self, t: int) -> int:
        return int(math.ceil(self.value(t)))

    def slope(self) -> Rational:
        (t0, v0), (t1, v1) = self.points[-2], self.points[-1]
        return Rational(v1 - v0, t1 - t0)

    def largest_argument_below(self, bound: int) -> int:
        """Largest natural t with value(t) <= bound, or -1 if none."""
        if self.value(0) > bound:
            return -1
        lo, hi = 0, 1
        while self.value(hi) <= bound:
            lo, hi = hi, hi * 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.value(mid) <= bound:
                lo = mid
            else:
                hi = mid
        return lo

    @classmethod
    def linear(cls, slope: int, offset: int = 0) -> "WitnessTable":
        return cls(points=[[0, offset], [1, offset + slope]])


class SamplingPlan(BaseModel):
    """Deterministic recipe for the finite subsets a window check inspects."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True, strict=True)

    seed: int = 0
    random_subsets: int = 50
    max_subset_size: int = 6
    ball_radii: List[int] = Field(default_factory=lambda: [0, 1, 2, 3])
    antipodal_pairs: int = 8
    pair_cap: int = 60

    @field_validator("random_subsets", "max_subset_size", "antipodal_pairs", "pair_cap")
    @classmethod
    def _validate_counts(cls, value: int) -> int:
        if value < 0:
            raise ValueError("sampling counts must be non-negative")
        return value


class CoordinateEntry(BaseModel):
    """One nonzero coordinate of a window vector."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True, strict=True)

    word: str
    index: int
    coeff: str


class Counterexample(BaseModel):
    """Concrete data that falsifies a property inside a window."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True, strict=True)

    subsets: List[List[str]] = Field(default_factory=list)
    witness: List[CoordinateEntry] = Field(default_factory=list)
    point: str | None = None
    pair: List[str] | None = None
    side: str | None = None
    gamma: str | None = None
    note: str | None = None


class ControlCertificate(BaseModel):
    """Outcome of a window-scale check: constant, radius, verdict, counterexample."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True, strict=True)

    kind: CertificateKind
    constant: int | None = None
    window: int
    verdict: Verdict
    counterexample: Counterexample | None = None
    sampling: SamplingPlan | None = None
    tags: List[str] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _fail_needs_counterexample(self) -> "ControlCertificate":
        if self.verdict == Verdict.FAIL and self.counterexample is None:
            raise ValueError("a failing certificate must carry a counterexample")
        return self

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS

    @classmethod
    def merge(cls, certificates: List["ControlCertificate"]) -> "ControlCertificate":
        """Merge certificates of one kind: max constant, min window, first failure wins."""
        if not certificates:
            raise ValueError("cannot merge an empty certificate list")
        kinds = {c.kind for c in certificates}
        if len(kinds) != 1:
            raise ValueError(f"cannot merge certificates of kinds {sorted(k.value for k in kinds)}")
        constants = [c.constant for c in certificates if c.constant is not None]
        failure = next((c for c in certificates if not c.passed), None)
        tags = sorted({t for c in certificates for t in c.tags})
        return cls(
            kind=certificates[0].kind,
            constant=max(constants) if constants else None,
            window=min(c.window for c in certificates),
            verdict=Verdict.FAIL if failure else Verdict.PASS,
            counterexample=failure.counterexample if failure else None,
            sampling=certificates[0].sampling,
            tags=tags,
        )


class Triplet(BaseModel):
    """Sparse matrix entry; `entry` is a group-ring element in text form."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True, strict=True)

    row: int
    col: int
    entry: str

    @model_validator(mode="after")
    def _validate_indices(self) -> "Triplet":
        if self.row < 0 or self.col < 0:
            raise ValueError("triplet indices must be non-negative")
        return self


class ModuleSpec(BaseModel):
    """Presentation of a finitely generated module: rank, relation rows, generating set."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True, strict=True)

    rank: int
    relations: List[Triplet] = Field(default_factory=list)
    sigma: List[List[str]] | None = None
    filtration: FiltrationKind = FiltrationKind.STANDARD

    @model_validator(mode="after")
    def _validate_shape(self) -> "ModuleSpec":
        if self.rank < 1:
            raise ValueError("module rank must be >= 1")
        for triplet in self.relations:
            if triplet.col >= self.rank:
                raise ValueError(
                    f"relation column {triplet.col} out of range for rank {self.rank}"
                )
        if self.sigma is not None:
            if not self.sigma:
                raise ValueError("sigma must be non-empty when given")
            for expression in self.sigma:
                if len(expression) != self.rank:
                    raise ValueError("each sigma expression needs one entry per coordinate")
        return self


class MorphismSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True, strict=True)

    rows: int
    cols: int
    matrix: List[Triplet] = Field(default_factory=list)
    equivariant: bool = True
    target: ModuleSpec | None = None

    @model_validator(mode="after")
    def _validate_shape(self) -> "MorphismSpec":
        if self.rows < 1 or self.cols < 1:
            raise ValueError("morphism matrices need at least one row and one column")
        for triplet in self.matrix:
            if triplet.row >= self.rows or triplet.col >= self.cols:
                raise ValueError(
                    f"matrix entry ({triplet.row},{triplet.col}) outside {self.rows}x{self.cols}"
                )
        if self.target is not None and self.target.rank != self.cols:
            raise ValueError("target module rank must equal the number of matrix columns")
        return self


class EmbeddingSpec(BaseModel):
    """Homomorphism given by generator images, squeezed between witnesses f <= g."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True, strict=True)

    target: GroupSpec
    images: Dict[str, str]
    f: WitnessTable
    g: WitnessTable

    @model_validator(mode="after")
    def _validate_envelope(self) -> "EmbeddingSpec":
        arguments = sorted({p[0] for p in self.f.points} | {p[0] for p in self.g.points})
        for t in arguments:
            if self.f.value(t) > self.g.value(t):
                raise ValueError(f"witness functions violate f <= g at t={t}")
        if self.f.slope() > self.g.slope():
            raise ValueError("witness functions violate f <= g beyond the tables")
        return self


class CoverSpec(BaseModel):
    """Explicit cover: families of finite member lists of words."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True, strict=True)

    families: List[List[List[str]]]
    bound: int
    separation: int


class TaskSpec(BaseModel):
    """A fully resolved CLI task."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True, strict=True)

    command: Command
    group: GroupSpec
    ring: RingSpec | None = None
    module: ModuleSpec | None = None
    morphism: MorphismSpec | None = None
    embedding: EmbeddingSpec | None = None
    cover: CoverSpec | None = None
    window: int
    radius: int | None = None
    constant: int | None = None
    separation: int | None = None
    words: List[str] = Field(default_factory=list)
    seed: int = 0
    max_depth: int = 4
    variant: InsularVariant = InsularVariant.STRICT
    tier_a: bool = False
    output: str | None = None

    @model_validator(mode="after")
    def _validate_constants(self) -> "TaskSpec":
        if self.window < 0:
            raise ValueError("window must be a natural number")
        for name in ("radius", "constant", "separation"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be a natural number")
        if self.constant is not None and self.constant > self.window:
            raise ValueError(
                f"constant exceeds window: constant {self.constant} > window {self.window}"
            )
        return self


class Report(BaseModel):
    """JSON report emitted for one task."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True, strict=True)

    tool_version: str
    task: Dict[str, Any]
    verdict: Verdict
    certificates: List[ControlCertificate] = Field(default_factory=list)
    counterexamples: List[Counterexample] = Field(default_factory=list)
    result: Dict[str, Any] = Field(default_factory=dict)
    timings: Dict[str, float] | None = None

    @property
    def exit_code(self) -> int:
        return 0 if self.verdict == Verdict.PASS else 1
