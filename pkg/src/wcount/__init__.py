"""Weighted counting of integer points in sparse linear subspaces.

The package approximates, within a prescribed relative error, the weighted
number of integer points of a box-bounded sparse homogeneous system (and of
codewords of linear codes over Z/kZ) by truncated Taylor expansion of the
log-partition function, with power sums of inverse roots computed from
connected column submatrices.  Every fast path is validated against exact
brute-force oracles.
"""

from wcount.errors import (
    EnumerationLimitError,
    GammaBoundError,
    IncompatibleInputsError,
    InfeasibleWitnessError,
    ParseError,
    WcountError,
)
from wcount.instance import (
    ALPHA,
    BETA,
    SparseMatrix,
    SparsityStats,
    WeightedInstance,
    ZeroColumnFactor,
    column_graph,
    load_instance,
    normalize,
    sparsity,
    weight_bound_check,
)
from wcount.oracle import (
    CoefficientTable,
    PowerSumTable,
    enumerate_points,
    exact_w,
    pi_from_sigma,
    pi_table,
    roots_of_w,
    sigma_from_pi,
)
from wcount.powersums import (
    MuTable,
    SubMatrix,
    compatible,
    connected_column_subsets,
    connected_sum,
    induced_submatrix,
    lambda_k,
    mu_table,
    sigma_fast,
)
from wcount.interpolate import (
    ApproxReport,
    approx_w,
    choose_s,
    effective_gamma,
    extend_power_sums,
    taylor_from_sigma,
)
from wcount.codes import (
    EnumeratorPolynomial,
    ModularInstance,
    approx_code_weight,
    code_sigma_fast,
    code_weight,
    cut_code_matrix,
    enumerator_polynomial,
    macwilliams,
    macwilliams_forward,
    modular_enumerate,
)
from wcount.reductions import (
    AffineSystem,
    HomInput,
    Hypergraph,
    affine_shift,
    hamming_sum,
    hom_sum,
    hom_system,
    independence_instance,
    matching_system,
    matching_weight,
    rescale_edge_weights,
)

__version__ = "0.1.0"
