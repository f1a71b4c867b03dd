"""Exact arithmetic toolkit for weighted L2 discretization rules on
piecewise function subspaces: verify, construct, minimize, certify."""

from .exactnum import (
    ExactNumError,
    Radical,
    Rat,
    rad_add,
    rad_inv,
    rad_mul,
    rad_sign,
    rad_sqrt,
)
from .piecewise import (
    DomainError,
    Piece,
    PiecewiseFn,
    Poly,
    Support,
    SupportInterval,
    UnsupportedProduct,
    breakpoint_limits,
    constant_value_on,
    fn_from_doc,
    fn_to_doc,
    nonvanishing_on,
    pw_eval,
    pw_integrate,
    pw_mul,
    pw_scale_add,
    pw_support,
    supports_disjoint,
)
from .discretize import (
    ImprovedBound,
    Infeasible,
    LowerBoundCertificate,
    MinCertificate,
    MomentVec,
    NoPositive,
    NotApplicable,
    PositiveWitness,
    PreconditionError,
    ReduceResult,
    Rule,
    Subspace,
    VerifyReport,
    WeightSolution,
    caratheodory_reduce,
    decide_min,
    forced_region_contradiction,
    gram,
    index_pairs,
    measure_rule,
    moment_vector,
    pair_index,
    positive_feasible,
    rule_from_doc,
    rule_to_doc,
    search_grid,
    solve_weights,
    subspace_from_doc,
    subspace_to_doc,
    support_lower_bound,
    verify_rule,
)
from .corpus import (
    Example1Params,
    GSpec,
    build_X2,
    build_X8,
    build_f1,
    build_f2,
    build_g,
    build_h,
    build_subspace,
    golden_rules,
)

__version__ = "0.1.0"
