"""Measurement-context selection by environmental fluctuations.

Build POVMs from system-environment dilations, split joint outcomes into
system and residual components, reconstruct dilations from POVMs, map which
outcomes can share a measurement context, and evaluate rescaled-probability
contextuality tests, with the three-path interferometer as a worked scenario.
"""

from __future__ import annotations

from .errors import (
    CtxlabError,
    ScenarioFileError,
    SpaceMismatchError,
    UnknownLabelError,
    ValidationError,
)
from .hilbert import (
    DEFAULT_TOL,
    Ket,
    Operator,
    Space,
    basis_ket,
    eigh,
    fix_phase,
    gram,
    partial_inner_env,
    set_default_tol,
    tensor,
)
from .povm import (
    ContextGraph,
    ContextRelation,
    DensityMatrix,
    Povm,
    PovmElement,
    basis_mixture_povm,
    coarse_grain,
    completeness_check,
    context_graph,
    context_selection_probability,
    maximizing_state,
    probability,
    rescaled_probability,
    share_context,
    validate_povm,
)
from .dilation import (
    ConstraintReport,
    Dilation,
    JointOutcomeSet,
    ResidualSet,
    context_switch_povm,
    naimark_dilate,
    povm_from_dilation,
    residual_decompose,
    verify_constraints,
)
from .contextuality import (
    Certification,
    DecompositionReport,
    HardyTriple,
    InequalityReport,
    evaluate_inequality,
    hardy_decomposition_check,
    hardy_embedding_povm,
    hardy_state,
    max_violation,
)
from .interferometer import (
    ThreePathScenario,
    build_three_path,
    dilation_DA,
    dilation_VH,
    hwp_transform,
    joint_outcomes_DA,
    joint_outcomes_VH,
    povm_DA,
)
from .scenario_io import (
    SCHEMA_VERSION,
    Scenario,
    decode_matrix,
    decode_vector,
    encode_matrix,
    encode_vector,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from .fixtures import (
    FIXTURE_NAMES,
    fixture_dict,
    fixture_path,
    load_fixture,
    write_fixtures,
)

__version__ = "0.1.0"

__all__ = [
    "CtxlabError",
    "ScenarioFileError",
    "SpaceMismatchError",
    "UnknownLabelError",
    "ValidationError",
    "DEFAULT_TOL",
    "Ket",
    "Operator",
    "Space",
    "basis_ket",
    "eigh",
    "fix_phase",
    "gram",
    "partial_inner_env",
    "set_default_tol",
    "tensor",
    "ContextGraph",
    "ContextRelation",
    "DensityMatrix",
    "Povm",
    "PovmElement",
    "basis_mixture_povm",
    "coarse_grain",
    "completeness_check",
    "context_graph",
    "context_selection_probability",
    "maximizing_state",
    "probability",
    "rescaled_probability",
    "share_context",
    "validate_povm",
    "ConstraintReport",
    "Dilation",
    "JointOutcomeSet",
    "ResidualSet",
    "context_switch_povm",
    "naimark_dilate",
    "povm_from_dilation",
    "residual_decompose",
    "verify_constraints",
    "Certification",
    "DecompositionReport",
    "HardyTriple",
    "InequalityReport",
    "evaluate_inequality",
    "hardy_decomposition_check",
    "hardy_embedding_povm",
    "hardy_state",
    "max_violation",
    "ThreePathScenario",
    "build_three_path",
    "dilation_DA",
    "dilation_VH",
    "hwp_transform",
    "joint_outcomes_DA",
    "joint_outcomes_VH",
    "povm_DA",
    "SCHEMA_VERSION",
    "Scenario",
    "decode_matrix",
    "decode_vector",
    "encode_matrix",
    "encode_vector",
    "load_scenario",
    "save_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "FIXTURE_NAMES",
    "fixture_dict",
    "fixture_path",
    "load_fixture",
    "write_fixtures",
    "__version__",
]
