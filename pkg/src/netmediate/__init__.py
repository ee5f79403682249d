"""Two-stage network mediation analysis.

Stage one fits a latent eigenmodel to a binary symmetric network by MCMC
(optionally conditioning on dyadic homophily covariates) and extracts the
leading eigenvectors of the posterior-mean latent matrix. Stage two runs
Bayesian mediation analysis on those eigenvector mediators and reports
indirect, direct, and total effects with HPD intervals.

All randomness flows through numpy's PCG64 generator; every sampler and
generator is reproducible from its seed.
"""

from .diagnostics import (
    Chain,
    effective_sample_size,
    geweke_z,
    hpd_interval,
    split_rhat,
)
from .eigenmodel import (
    DimensionSelection,
    EigenmodelConfig,
    EigenmodelFit,
    MediatorMatrix,
    ScreeResult,
    extract_mediators,
    fit_eigenmodel,
    load_fit_json,
    save_fit_json,
    scree_elbow,
    select_dimension_conditional,
)
from .generators import (
    gen_eigenmodel,
    gen_erdos_renyi,
    gen_latent_class,
    gen_latent_distance,
    gen_mediation_data,
    gen_structured_u,
)
from .graphs import (
    DiameterResult,
    adjacency_spectrum,
    density,
    diameter,
    from_edge_list,
    transitivity,
    uniform_homophily,
    validate_adjacency,
    validate_dyadic_covariate,
)
from .mediation import (
    MediationConfig,
    MediationData,
    MediationPosterior,
    ParameterSummary,
    derive_effects,
    fit_binary_mediation,
    fit_continuous_mediation,
    fit_total_effect,
    logistic_log_likelihood,
    summarize,
)

__version__ = "0.1.0"

__all__ = [
    "Chain",
    "DiameterResult",
    "DimensionSelection",
    "EigenmodelConfig",
    "EigenmodelFit",
    "MediationConfig",
    "MediationData",
    "MediationPosterior",
    "MediatorMatrix",
    "ParameterSummary",
    "ScreeResult",
    "adjacency_spectrum",
    "density",
    "derive_effects",
    "diameter",
    "effective_sample_size",
    "extract_mediators",
    "fit_binary_mediation",
    "fit_continuous_mediation",
    "fit_eigenmodel",
    "fit_total_effect",
    "from_edge_list",
    "gen_eigenmodel",
    "gen_erdos_renyi",
    "gen_latent_class",
    "gen_latent_distance",
    "gen_mediation_data",
    "gen_structured_u",
    "geweke_z",
    "hpd_interval",
    "load_fit_json",
    "logistic_log_likelihood",
    "save_fit_json",
    "scree_elbow",
    "select_dimension_conditional",
    "split_rhat",
    "summarize",
    "transitivity",
    "uniform_homophily",
    "validate_adjacency",
    "validate_dyadic_covariate",
]
