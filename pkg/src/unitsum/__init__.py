"""Exact arithmetic for bounded-coefficient unit-sum representations
and signed double-base digit expansions.

The engine module rewrites sparse unit-sum representations with a
terminating carry procedure; double_base specializes it to pairs of
multiplicatively independent integer bases; relations searches for the
base-pair identities the rewrites need, or certifies that none exist;
cubic instantiates the machinery in a one-parameter family of totally
real cubic fields; oracle brute-forces minimal weights for comparison.
"""

from .double_base import (
    BasePair,
    ExpandStats,
    ExtendedExpansion,
    PQRational,
    SignedExpansion,
    balanced_ternary,
    evaluate_expansion,
    expand,
    expand_extended,
    expand_with_stats,
    expansion_from_json,
    expansion_to_json,
    greedy_seed,
    height,
    p_adic_digits,
    pq_rational,
    rational_basis,
    rational_evaluator,
    to_unit_relation,
    weight,
)
from .engine import (
    BoundParams,
    ReductionPolicy,
    Representation,
    UnitGroupBasis,
    UnitRelation,
    bounds_f_T,
    evaluate,
    log2_enclosure,
    merge,
    monotone_quantity,
    reduce,
    replacement_step,
    split_at_gap,
    total_weight,
)
from .errors import (
    BasisMismatch,
    BudgetExceeded,
    EmptySide,
    InvalidExpansion,
    IterationCapExceeded,
    NoRelationFound,
    NotAGap,
    ParamsMismatch,
    RelationBroken,
    RelationInvalid,
    TargetTooSmall,
    UnitSumError,
    VerificationFailed,
)
from .cubic import (
    CubicElement,
    CubicParams,
    UnitMonomial,
    cubic_basis,
    cubic_evaluator,
    element_from_json,
    element_to_json,
    real_roots,
    represent_unit_sums,
    three_relation,
    unit_monomial,
)
from .oracle import (
    SweepReport,
    WeightWitness,
    default_box,
    min_weight_bruteforce,
    sweep_verify,
)
from .relations import (
    ExtendedRelation,
    ObstructionCertificate,
    PlainRelation,
    certificate_at,
    find_extended_relation,
    find_obstruction,
    find_plain_relation,
    verify_relation,
)

__version__ = "0.1.0"

__all__ = [
    "BasePair",
    "BasisMismatch",
    "BoundParams",
    "BudgetExceeded",
    "CubicElement",
    "CubicParams",
    "EmptySide",
    "ExpandStats",
    "ExtendedExpansion",
    "ExtendedRelation",
    "InvalidExpansion",
    "IterationCapExceeded",
    "NoRelationFound",
    "NotAGap",
    "ObstructionCertificate",
    "PQRational",
    "ParamsMismatch",
    "PlainRelation",
    "ReductionPolicy",
    "RelationBroken",
    "RelationInvalid",
    "Representation",
    "SignedExpansion",
    "SweepReport",
    "TargetTooSmall",
    "UnitGroupBasis",
    "UnitMonomial",
    "UnitRelation",
    "UnitSumError",
    "VerificationFailed",
    "WeightWitness",
    "balanced_ternary",
    "bounds_f_T",
    "certificate_at",
    "cubic_basis",
    "cubic_evaluator",
    "default_box",
    "element_from_json",
    "element_to_json",
    "evaluate",
    "evaluate_expansion",
    "expand",
    "expand_extended",
    "expand_with_stats",
    "expansion_from_json",
    "expansion_to_json",
    "find_extended_relation",
    "find_obstruction",
    "find_plain_relation",
    "greedy_seed",
    "height",
    "log2_enclosure",
    "merge",
    "min_weight_bruteforce",
    "monotone_quantity",
    "p_adic_digits",
    "pq_rational",
    "rational_basis",
    "rational_evaluator",
    "real_roots",
    "reduce",
    "replacement_step",
    "represent_unit_sums",
    "split_at_gap",
    "sweep_verify",
    "three_relation",
    "to_unit_relation",
    "total_weight",
    "unit_monomial",
    "verify_relation",
    "weight",
]
