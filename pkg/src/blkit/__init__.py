"""blkit: Brascamp-Lieb constants with certified gaussian near-extremisers.

The library reduces the gaussian optimisation behind the constant to exact
structured minimisation of weighted exponential sums, classifies finiteness,
produces eccentricity-bounded near-extremising certificates, implements the
subspace/Fourier duality applications, and numerically verifies the local
nonlinear inequality on perturbed polynomial data.
"""

from .config import Config, DEFAULT_CONFIG, load_config
from .datum import (
    BLDatum,
    FinitenessVerdict,
    Subspace,
    kernel_lattice,
    projection_normalize,
    scaling_condition,
    transversality_check,
    validate,
)
from .duality import (
    SubspaceDatum,
    beckner_constant,
    convolution_datum,
    dual_subspace,
    duality_check,
    subspace_datum,
    young_constant,
)
from .expsum import (
    ExpSumConstants,
    ExpSumInstance,
    NearMinimiserCertificate,
    TrichotomyResult,
    evaluate,
    hull_classify,
    infimum,
    minimise_interior,
    near_minimise,
    oracle_infimum,
)
from .gaussian import GaussianTuple, ball_inequality_check, blg, log_blg, scale_invariance_check
from .lieb import (
    BLReport,
    LiebExpansion,
    RotationTuple,
    bl_constant,
    blg_via_expansion,
    build_expansion,
    classify_datum,
    coefficients,
    holder_experiment,
    near_extremiser,
)
from .nonlinear import (
    GaussianInput,
    NonlinearProblem,
    PolyMap,
    differential,
    nonlinear_ratio,
    scaled_gaussian_inputs,
    verify_theorem1,
)

__version__ = "0.1.0"

__all__ = [
    "BLDatum",
    "BLReport",
    "Config",
    "DEFAULT_CONFIG",
    "ExpSumConstants",
    "ExpSumInstance",
    "FinitenessVerdict",
    "GaussianInput",
    "GaussianTuple",
    "LiebExpansion",
    "NearMinimiserCertificate",
    "NonlinearProblem",
    "PolyMap",
    "RotationTuple",
    "Subspace",
    "SubspaceDatum",
    "TrichotomyResult",
    "ball_inequality_check",
    "beckner_constant",
    "bl_constant",
    "blg",
    "blg_via_expansion",
    "build_expansion",
    "classify_datum",
    "coefficients",
    "convolution_datum",
    "differential",
    "dual_subspace",
    "duality_check",
    "evaluate",
    "holder_experiment",
    "hull_classify",
    "infimum",
    "kernel_lattice",
    "load_config",
    "log_blg",
    "minimise_interior",
    "near_extremiser",
    "near_minimise",
    "nonlinear_ratio",
    "oracle_infimum",
    "projection_normalize",
    "scale_invariance_check",
    "scaled_gaussian_inputs",
    "scaling_condition",
    "subspace_datum",
    "transversality_check",
    "validate",
    "verify_theorem1",
    "young_constant",
]
