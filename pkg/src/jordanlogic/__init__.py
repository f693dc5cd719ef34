"""Euclidean Jordan algebras, their projection lattices, and symmetry-based reconstruction."""

from ._config import (
    DEFAULT_TOL,
    AlgebraMismatchError,
    AsymmetricMatrixError,
    CenterVerificationError,
    InconclusiveError,
    JordanLogicError,
    LatticeError,
    NotAProjectionError,
    PreconditionError,
    Tolerances,
    TransportError,
)
from .algebra import (
    DirectSum,
    Element,
    MatrixAlgebra,
    SpectralDecomposition,
    SpinFactor,
    atom_state,
    direct_sum,
    element,
    from_matrix,
    in_cone,
    jordan_product,
    order_norm,
    parse_algebra,
    restrict,
    spectral_decompose,
    to_matrix,
    unit,
    zero,
)
from .checks import (
    check_covering,
    check_gbit,
    check_gbit_covering_equivalence,
    check_irreducible,
    check_spectrality,
    check_strong_state_space,
    check_weak_symmetry,
    run_suite,
)
from .lattice import Projection, center, certify_projection, compatible, complement, dim, info_capacity, join, leq, meet
from .reconstruct import (
    ProductTable,
    SpinConstruction,
    build_product_1,
    build_spin_product,
    compute_s_o,
    reconstruct,
    split_unit_complement,
    verify_jordan,
)
from .report import CheckReport
from .symmetry import (
    Automorphism,
    InnerProductForm,
    continuous_path,
    invariant_inner_product,
    sample_automorphism,
    transport_automorphism,
    verify_automorphism,
)

__version__ = "0.1.0"
