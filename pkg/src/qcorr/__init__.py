"""Correlation measures and conservation-law checks for small multipartite states."""

from .hilbert import (
    DensityMatrix,
    DimensionError,
    InvalidPartitionError,
    PureState,
    conditional_entropy,
    mutual_information,
    partial_trace,
    reduced_state,
    subsystem_set,
    tensor_product,
    von_neumann_entropy,
)
from .measures import (
    EnsembleDecomposition,
    MeasurementBasis,
    OptimizerConfig,
    binary_entropy,
    classical_correlation,
    concurrence_wootters,
    discord,
    discord_via_kw,
    ef_convex_roof,
    ef_pure,
    ef_two_qubit,
    kw_residual,
)
from .states import (
    StateFormatError,
    StateSpec,
    ghz,
    haar_random,
    parse_state_spec,
    product_random,
    read_state,
    realize,
    relabel,
    w_state,
    write_state,
)
from .laws import (
    Certificate,
    CertificationError,
    CorrelationTerm,
    EvalReport,
    LawSpec,
    TermValue,
    catalog,
    certify,
    default_tolerance,
    evaluate,
    evaluate_term,
    gen_discord_law,
    gen_even_cycle_law,
    gen_odd_cycle_law,
    gen_one_measured_law,
    law_by_name,
    laws_equivalent,
    relabel_law,
    resolve_laws,
)

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix",
    "DimensionError",
    "InvalidPartitionError",
    "PureState",
    "conditional_entropy",
    "mutual_information",
    "partial_trace",
    "reduced_state",
    "subsystem_set",
    "tensor_product",
    "von_neumann_entropy",
    "EnsembleDecomposition",
    "MeasurementBasis",
    "OptimizerConfig",
    "binary_entropy",
    "classical_correlation",
    "concurrence_wootters",
    "discord",
    "discord_via_kw",
    "ef_convex_roof",
    "ef_pure",
    "ef_two_qubit",
    "kw_residual",
    "StateFormatError",
    "StateSpec",
    "ghz",
    "haar_random",
    "parse_state_spec",
    "product_random",
    "read_state",
    "realize",
    "relabel",
    "w_state",
    "write_state",
    "Certificate",
    "CertificationError",
    "CorrelationTerm",
    "EvalReport",
    "LawSpec",
    "TermValue",
    "catalog",
    "certify",
    "default_tolerance",
    "evaluate",
    "evaluate_term",
    "gen_discord_law",
    "gen_even_cycle_law",
    "gen_odd_cycle_law",
    "gen_one_measured_law",
    "law_by_name",
    "laws_equivalent",
    "relabel_law",
    "resolve_laws",
    "__version__",
]
