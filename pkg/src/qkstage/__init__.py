"""Quantum-kernel classification pipeline.

Dense statevector simulation of a rotational-entanglement feature map,
fidelity kernels (exact and shot-sampled), PCA reduction, an SMO-trained
one-vs-one kernel SVM, synthetic staged datasets, and evaluation reports.
"""
from .errors import ConfigError, ConvergenceError, ParseError
from .statevec import (
    MAX_QUBITS,
    QuantumState,
    apply_hadamard,
    apply_phase_z,
    apply_zz_phase,
    inner_product,
    zero_state,
)
from .featuremap import (
    FeatureMapSpec,
    default_spec,
    encode,
    fit_bounds,
    register_phi_family,
    rescale,
)
from .kernel import (
    CrossBlock,
    GramMatrix,
    RbfKernel,
    default_rbf_gamma,
    gram,
    gram_cross,
    kernel_id_of,
    quantum_kernel_exact,
    quantum_kernel_shots,
    rbf_kernel,
)
from .dimred import PcaModel, fit_pca, transform
from .svm import (
    BinarySvm,
    MultiClassSvm,
    decision_value,
    fit_multiclass,
    predict,
    solve_binary,
)
from .dataset import (
    STAGE_NAMES,
    Dataset,
    generate_gaussian_stages,
    generate_quantum_labeled,
    read_csv,
    split,
    write_csv,
)
from .evaluate import (
    ConfusionMatrix,
    confusion,
    metrics,
    pairwise_confusion_rate,
    report_metrics,
    row_percent,
)
from . import bundle, config

__version__ = "0.1.0"

__all__ = [
    "MAX_QUBITS",
    "STAGE_NAMES",
    "BinarySvm",
    "ConfigError",
    "ConfusionMatrix",
    "ConvergenceError",
    "CrossBlock",
    "Dataset",
    "FeatureMapSpec",
    "GramMatrix",
    "MultiClassSvm",
    "ParseError",
    "PcaModel",
    "QuantumState",
    "RbfKernel",
    "apply_hadamard",
    "apply_phase_z",
    "apply_zz_phase",
    "bundle",
    "config",
    "confusion",
    "decision_value",
    "default_rbf_gamma",
    "default_spec",
    "encode",
    "fit_bounds",
    "fit_multiclass",
    "fit_pca",
    "generate_gaussian_stages",
    "generate_quantum_labeled",
    "gram",
    "gram_cross",
    "inner_product",
    "kernel_id_of",
    "metrics",
    "pairwise_confusion_rate",
    "predict",
    "quantum_kernel_exact",
    "quantum_kernel_shots",
    "rbf_kernel",
    "read_csv",
    "register_phi_family",
    "report_metrics",
    "rescale",
    "row_percent",
    "solve_binary",
    "split",
    "transform",
    "write_csv",
    "__version__",
]
