"""RKHS interpolation, Khatri-Rao products and block Oppenheim-Schur inequalities."""

from .errors import (
    ConfigurationError,
    DimensionError,
    GenerationError,
    InputFormatError,
    OutOfRangeError,
    PreconditionError,
    RankError,
)
from .hadamard import (
    BlockFamily,
    TensorIndex,
    diagonal_pullback,
    extremal_simple_tensor_check,
    khatri_rao,
    restriction_inequality_check,
    tensor_pullback,
    product_bound_min_norm,
)
from .inequalities import (
    InequalityReport,
    block_oppenheim_schur,
    block_ratio_inequality,
    chained_ratio_bound,
    elementary_inequality,
    equality_case_constructor,
    exponent_profile,
    fischer,
    hadamard_inequality,
    oppenheim,
    oppenheim_schur,
)
from .interpolation import (
    IpipProblem,
    IpipSolution,
    block_ipip_min_norm,
    block_lambda_products,
    eigen_cons,
    ipip_lambdas,
    lambda_det_identity_check,
    lambda_sequence,
    min_norm_bordered,
    scalarize,
    solve_ipip,
)
from .linalg import (
    BlockMatrix,
    BlockPartition,
    Definiteness,
    EigenDecomposition,
    determinant,
    eigh,
    hermitian_check,
    kronecker,
    leading_principal_block,
    moore_penrose,
    psd_check,
)
from .rkhs import RkhsElement, RkhsSpace, gram_matrix, rkhs_inner, rkhs_norm, rkhs_sum_check

__all__ = [name for name in dir() if not name.startswith("_")]
