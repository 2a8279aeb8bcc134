"""
coarsemod: controlled module theory over group rings, checked in finite windows.
"""

from coarsemod.coarse_space import (
    Cover,
    MetricSubset,
    UniformEmbedding,
    ball,
    build_cover,
    diameter,
    distance,
    enlarge,
    normal_form,
    verify_cover,
    verify_uniform_embedding,
)
from coarsemod.control import (
    FilteredMorphism,
    GeometricModule,
    GeometricMorphism,
    bound_of,
    check_bicontrolled,
    check_equivariance,
    classify_morphism,
    compose_geometric,
    generator_bound,
)
from coarsemod.errors import (
    CoarseModError,
    MismatchedSpecsError,
    NotIdempotentError,
    RadiusCapExceededError,
    TaskSpecError,
    UnsupportedFamilyError,
    UnsupportedTierError,
    WindowTooSmallError,
)
from coarsemod.filtered import (
    FilteredModule,
    PresentedModule,
    StandardFiltration,
    check_antithetic_insular,
    check_insular,
    check_lean,
    cokernel_filtration,
    equivariant_of,
    image_filtration,
    minimal_constant,
    product_filtration,
    pushforward,
)
from coarsemod.group_ring import GroupRingElement, GroupRingMatrix
from coarsemod.groups import Group, GroupElement, group_from_alias, group_from_spec
from coarsemod.linalg import WindowSubmodule, intersect, sum_of
from coarsemod.loader import TaskLoader, parse_spec
from coarsemod.resolution import (
    ResolutionChain,
    idempotent_image,
    image_cokernel,
    kernel_of,
    resolve,
)
from coarsemod.rings import Ring, ring_from_alias, ring_from_spec
from coarsemod.runner import run
from coarsemod.types import ControlCertificate, Counterexample, Report, TaskSpec, Verdict

__all__ = [
    "CoarseModError",
    "ControlCertificate",
    "Counterexample",
    "Cover",
    "FilteredModule",
    "FilteredMorphism",
    "GeometricModule",
    "GeometricMorphism",
    "Group",
    "GroupElement",
    "GroupRingElement",
    "GroupRingMatrix",
    "MetricSubset",
    "MismatchedSpecsError",
    "NotIdempotentError",
    "PresentedModule",
    "RadiusCapExceededError",
    "Report",
    "ResolutionChain",
    "Ring",
    "StandardFiltration",
    "TaskLoader",
    "TaskSpec",
    "TaskSpecError",
    "UniformEmbedding",
    "UnsupportedFamilyError",
    "UnsupportedTierError",
    "Verdict",
    "WindowSubmodule",
    "WindowTooSmallError",
    "ball",
    "bound_of",
    "build_cover",
    "check_antithetic_insular",
    "check_bicontrolled",
    "check_equivariance",
    "check_insular",
    "check_lean",
    "classify_morphism",
    "cokernel_filtration",
    "compose_geometric",
    "diameter",
    "distance",
    "enlarge",
    "equivariant_of",
    "generator_bound",
    "group_from_alias",
    "group_from_spec",
    "idempotent_image",
    "image_cokernel",
    "image_filtration",
    "intersect",
    "kernel_of",
    "minimal_constant",
    "normal_form",
    "parse_spec",
    "product_filtration",
    "pushforward",
    "resolve",
    "ring_from_alias",
    "ring_from_spec",
    "run",
    "sum_of",
    "verify_cover",
    "verify_uniform_embedding",
]
