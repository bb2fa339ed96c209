"""hadforge: complex Hadamard matrices of composite order pq, built from
pairs of mutually unbiased product bases, with exact cyclotomic arithmetic
and certified invariants (Butson type, Haagerup set, defect/isolation)."""

from .analyze import (
    DefectReport,
    HaagerupSet,
    IndeterminateRankError,
    SearchFinding,
    SearchResult,
    assignment_search,
    defect,
    fingerprint,
    haagerup_set,
    inequivalent_by_invariants,
    is_isolated,
)
from .construct import (
    AffineFamily,
    BlockAssignment,
    MonomializationError,
    MUPreconditionError,
    UnitaryFactorPair,
    affine_member,
    dita_build,
    dita_parameter_count,
    exact_product_equals,
    factor_b1_b2,
    hosoya_suzuki_build,
    product_basis_view,
    sqrt_as_cyclotomic,
    theorem1_build,
    trivial_affine_family,
    trivial_family,
)
from .cyclotomic import (
    CyclotomicInteger,
    OrderMismatchError,
    RootExponent,
    cyclotomic_polynomial,
)
from .matrices import (
    ComplexMatrix,
    EquivalenceMove,
    ExponentMatrix,
    Matrix,
    NotHadamardFormError,
    apply_equivalence,
    butson_min_root,
    compose_moves,
    dephase,
    equivalence_search_small,
    invert_move,
    is_butson,
    is_dephased,
    is_unitary,
    load_matrix,
    dump_matrix,
    matrix_from_json,
    matrix_to_json,
    random_move,
    tensor,
    to_complex,
)
from .mub import IdentityBasis, MubSet, complete_mub_set, fourier, standard_diagonal

__version__ = "0.1.0"

__all__ = [
    "AffineFamily",
    "BlockAssignment",
    "ComplexMatrix",
    "CyclotomicInteger",
    "DefectReport",
    "EquivalenceMove",
    "ExponentMatrix",
    "HaagerupSet",
    "IdentityBasis",
    "IndeterminateRankError",
    "Matrix",
    "MonomializationError",
    "MUPreconditionError",
    "MubSet",
    "NotHadamardFormError",
    "OrderMismatchError",
    "RootExponent",
    "SearchFinding",
    "SearchResult",
    "UnitaryFactorPair",
    "affine_member",
    "apply_equivalence",
    "assignment_search",
    "butson_min_root",
    "complete_mub_set",
    "compose_moves",
    "cyclotomic_polynomial",
    "defect",
    "dephase",
    "dita_build",
    "dita_parameter_count",
    "dump_matrix",
    "equivalence_search_small",
    "exact_product_equals",
    "factor_b1_b2",
    "fingerprint",
    "fourier",
    "haagerup_set",
    "hosoya_suzuki_build",
    "inequivalent_by_invariants",
    "invert_move",
    "is_butson",
    "is_dephased",
    "is_isolated",
    "is_unitary",
    "load_matrix",
    "matrix_from_json",
    "matrix_to_json",
    "product_basis_view",
    "random_move",
    "sqrt_as_cyclotomic",
    "standard_diagonal",
    "tensor",
    "theorem1_build",
    "to_complex",
    "trivial_affine_family",
    "trivial_family",
]
