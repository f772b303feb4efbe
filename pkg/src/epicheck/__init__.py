"""Numerical checks of entropy-power, Fisher-information, and
determinant-ratio inequalities on Gaussian mixture laws."""

from .checks import (
    CheckConfig,
    ConcavityScan,
    InequalityReport,
    VERDICT_EQUALITY,
    VERDICT_HOLDS,
    VERDICT_INCONCLUSIVE,
    VERDICT_VIOLATED,
    check_blachman_stam,
    check_conditional_epi,
    check_conditional_form,
    check_de_bruijn,
    check_entropic_bergstrom,
    check_entropic_bonnesen,
    check_entropic_kyfan,
    check_epi,
    check_equality_case_bonnesen,
    check_isoperimetric_dominance,
    check_isoperimetric_sharp,
    check_lambda_form,
    check_matrix_bergstrom,
    check_matrix_kyfan,
    check_projective_fisher,
    check_sphere_identity,
    check_stam_recovery,
    check_tm_limit,
    classify,
    compression_map,
    lambda_concavity_scan,
    tm_sequence,
)
from .estimators import (
    ScalarEstimate,
    conditional_entropy,
    conditional_entropy_last,
    conditional_fisher_last,
    entropy,
    entropy_power,
    fisher,
    gaussian_entropy,
    gaussian_fisher,
    knn_entropy,
    mc_entropy,
    mc_fisher,
    projective_fisher,
)
from .exceptions import (
    ConfigError,
    DegenerateLawError,
    DimensionError,
    NotPositiveDefiniteError,
    PreconditionError,
)
from .matrices import (
    SpdMatrix,
    bergstrom_gap,
    bergstrom_gap_all,
    bonnesen_linear_gap,
    delete_row_col,
    kyfan_gap,
    kyfan_gap_all,
    leading_principal,
    log_det,
    make_bonnesen_equality_pair,
    random_spd,
    schur_complement_last,
)
from .mixtures import GaussianComponent, GaussianMixture, MarkovTriple
from .runner import (
    REGISTRY,
    SuiteConfig,
    config_from_dict,
    default_config,
    generate_instance,
    proportional_markov_triple,
    random_markov_triple,
    random_mixture,
    random_unit_vector,
    report_to_csv,
    run_suite,
    shared_prefix_pair,
    write_report,
)
from .seeding import rng_from_tokens, stable_digest

__version__ = "0.1.0"

__all__ = [
    "CheckConfig",
    "ConcavityScan",
    "ConfigError",
    "DegenerateLawError",
    "DimensionError",
    "GaussianComponent",
    "GaussianMixture",
    "InequalityReport",
    "MarkovTriple",
    "NotPositiveDefiniteError",
    "PreconditionError",
    "REGISTRY",
    "ScalarEstimate",
    "SpdMatrix",
    "SuiteConfig",
    "VERDICT_EQUALITY",
    "VERDICT_HOLDS",
    "VERDICT_INCONCLUSIVE",
    "VERDICT_VIOLATED",
    "bergstrom_gap",
    "bergstrom_gap_all",
    "bonnesen_linear_gap",
    "check_blachman_stam",
    "check_conditional_epi",
    "check_conditional_form",
    "check_de_bruijn",
    "check_entropic_bergstrom",
    "check_entropic_bonnesen",
    "check_entropic_kyfan",
    "check_epi",
    "check_equality_case_bonnesen",
    "check_isoperimetric_dominance",
    "check_isoperimetric_sharp",
    "check_lambda_form",
    "check_matrix_bergstrom",
    "check_matrix_kyfan",
    "check_projective_fisher",
    "check_sphere_identity",
    "check_stam_recovery",
    "check_tm_limit",
    "classify",
    "compression_map",
    "conditional_entropy",
    "conditional_entropy_last",
    "conditional_fisher_last",
    "config_from_dict",
    "default_config",
    "delete_row_col",
    "entropy",
    "entropy_power",
    "fisher",
    "gaussian_entropy",
    "gaussian_fisher",
    "generate_instance",
    "knn_entropy",
    "kyfan_gap",
    "kyfan_gap_all",
    "lambda_concavity_scan",
    "leading_principal",
    "log_det",
    "make_bonnesen_equality_pair",
    "mc_entropy",
    "mc_fisher",
    "projective_fisher",
    "proportional_markov_triple",
    "random_markov_triple",
    "random_mixture",
    "random_spd",
    "random_unit_vector",
    "rng_from_tokens",
    "report_to_csv",
    "run_suite",
    "schur_complement_last",
    "shared_prefix_pair",
    "stable_digest",
    "tm_sequence",
    "write_report",
]
