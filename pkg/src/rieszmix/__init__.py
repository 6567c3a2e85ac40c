"""Exact ergodicity and conditional weak mixing analysis on finite
vector-lattice models of expectation-preserving systems."""

from .lattice import (
    DimensionMismatch,
    Element,
    Space,
    band_project,
    component_of_band,
    f_product,
    is_component,
    join,
    meet,
)
from .operators import (
    CEPS,
    ConditionalExpectationOp,
    NotMeasurePreserving,
    RieszHomMap,
    generate_ceps,
    identity_expectation,
    identity_map,
    rotation_map,
    uniform_expectation,
    validate_ceps,
)
from .dynamics import (
    EventuallyPeriodicSeq,
    cesaro_limit,
    cesaro_limit_abs_deviation,
    cesaro_prefix,
    ergodic_limit,
    functional_graph,
    invariant_basis,
    invariant_dimension,
    shifted_product_expectations,
)
from .tensor import (
    TensorSpace,
    component_decompose,
    j_multiply,
    tensor_ceps,
    tensor_component,
    tensor_component_sequences,
    tensor_elements,
    tensor_S,
    tensor_T,
)
from .mixing import (
    CesaroNotVanishing,
    DensityCertificate,
    KvnExtraction,
    MixingReport,
    analyze,
    decide_ergodicity,
    decide_weak_mixing,
    density_zero_check,
    kvn_extract,
    weak_mixing_via_kvn,
)
from .suite import SuiteConfig, run_suite

__all__ = [
    "CEPS",
    "CesaroNotVanishing",
    "ConditionalExpectationOp",
    "DensityCertificate",
    "DimensionMismatch",
    "Element",
    "EventuallyPeriodicSeq",
    "KvnExtraction",
    "MixingReport",
    "NotMeasurePreserving",
    "RieszHomMap",
    "Space",
    "SuiteConfig",
    "TensorSpace",
    "analyze",
    "band_project",
    "cesaro_limit",
    "cesaro_limit_abs_deviation",
    "cesaro_prefix",
    "component_decompose",
    "component_of_band",
    "decide_ergodicity",
    "decide_weak_mixing",
    "density_zero_check",
    "ergodic_limit",
    "f_product",
    "functional_graph",
    "generate_ceps",
    "identity_expectation",
    "identity_map",
    "invariant_basis",
    "invariant_dimension",
    "is_component",
    "j_multiply",
    "join",
    "kvn_extract",
    "meet",
    "rotation_map",
    "run_suite",
    "shifted_product_expectations",
    "tensor_S",
    "tensor_T",
    "tensor_ceps",
    "tensor_component",
    "tensor_component_sequences",
    "tensor_elements",
    "uniform_expectation",
    "validate_ceps",
    "weak_mixing_via_kvn",
]
