"""Desk-scale simulator and verification harness for fidelity estimation of
low-rank states via block-encoded operator square roots."""

from .amplitude import (
    QaeParams,
    exact_amplitude,
    qae_error_bound,
    qae_estimate,
    qae_outcome_distribution,
)
from .block_encoding import (
    BlockEncodingSpec,
    EncodedOperator,
    be_error,
    density_with_block,
    purification_to_unitary_be,
    swap_registers,
)
from .linalg import (
    HermitianEigen,
    complete_unitary,
    eig_hermitian,
    expm_i,
    matrix_func,
    operator_norm,
    sqrtm_psd,
    tensor,
    trace_norm,
    unitarity_defect,
)
from .pipeline import (
    EstimationReport,
    PipelineParams,
    analytic_error_bound,
    build_eta,
    build_w_sigma,
    estimate_fidelity,
    select_params,
    trace_sqrt,
    weyl_trace_bound_check,
)
from .registers import (
    DEFAULT_QUBIT_BUDGET,
    RegisterLayout,
    basis_state,
    embed_operator,
    layout,
    partial_trace,
    project_zero,
)
from .sqrt_extractor import (
    SqrtOutput,
    SqrtParams,
    build_sqrt_unitary,
    filter_f,
    grid_eigenvalue,
    h_vector,
    ideal_sqrt_state,
    ideal_sqrt_vector,
    pe_coefficient,
    pe_coefficient_direct,
    pe_phase_offset,
    pe_tail_bound,
    preparer_queries,
    rotation_gate,
    sine_state,
)
from .states import (
    DensityOperator,
    Purification,
    fidelity_exact,
    purify,
    random_density,
    trace_distance,
)

__version__ = "0.1.0"

__all__ = [
    "BlockEncodingSpec",
    "DEFAULT_QUBIT_BUDGET",
    "DensityOperator",
    "EncodedOperator",
    "EstimationReport",
    "HermitianEigen",
    "PipelineParams",
    "Purification",
    "QaeParams",
    "RegisterLayout",
    "SqrtOutput",
    "SqrtParams",
    "analytic_error_bound",
    "basis_state",
    "be_error",
    "build_eta",
    "build_sqrt_unitary",
    "build_w_sigma",
    "complete_unitary",
    "density_with_block",
    "eig_hermitian",
    "embed_operator",
    "estimate_fidelity",
    "exact_amplitude",
    "expm_i",
    "fidelity_exact",
    "filter_f",
    "grid_eigenvalue",
    "h_vector",
    "ideal_sqrt_state",
    "ideal_sqrt_vector",
    "layout",
    "matrix_func",
    "operator_norm",
    "partial_trace",
    "pe_coefficient",
    "pe_coefficient_direct",
    "pe_phase_offset",
    "pe_tail_bound",
    "preparer_queries",
    "project_zero",
    "purification_to_unitary_be",
    "purify",
    "qae_error_bound",
    "qae_estimate",
    "qae_outcome_distribution",
    "random_density",
    "rotation_gate",
    "select_params",
    "sine_state",
    "sqrtm_psd",
    "swap_registers",
    "tensor",
    "trace_distance",
    "trace_norm",
    "trace_sqrt",
    "unitarity_defect",
    "weyl_trace_bound_check",
]
