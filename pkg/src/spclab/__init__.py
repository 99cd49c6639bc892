"""Truncated Gaussian priors for direct and inverse problems.

Truncation-level selection, squared posterior contraction (exact and
Monte Carlo), moduli of continuity with Jackson/Bernstein bounds, and a
scenario harness that verifies the predicted contraction-rate exponents for
moderately, severely and mildly ill-posed forward operators.
"""

from ._backend import backend_name
from .indexfn import (
    IndexFunction,
    SmoothnessSpec,
    asymptotic_inverse_power_log,
    compose_psi,
    exp_decay,
    log_only,
    power,
    power_log,
)
from .spectra import (
    MatrixProblem,
    SequenceProblem,
    SpectrumModel,
    alpha_regular_spectrum,
    analytic_spectrum,
    check_balance_condition,
    decay_ratio_check,
    explicit_spectrum,
    exponential_spectrum,
    link_chi,
    logarithmic_spectrum,
    make_noncommuting_problem,
    power_spectrum,
    product_spectrum,
    source_element,
    source_phi,
    weyl_link_ratios,
)
from .truncation import (
    BoundConstants,
    ScanExhaustedError,
    TruncationDecision,
    classify_dominance,
    contraction_bound,
    inverse_rate,
    select_level,
    select_level_modulus,
    series_minimax_risk,
)
from .posterior import (
    contraction_probability,
    posterior_direct,
    spc_exact,
    spc_monte_carlo,
)
from .modulus import (
    SubspaceSpec,
    degree_of_approximation,
    jackson_bernstein_check,
    modulus_bound,
    modulus_bound_enriched,
    modulus_bound_optimized,
    modulus_exact_diagonal,
    modulus_numeric,
    modulus_of_injectivity,
)
from .harness import (
    Scenario,
    fit_loglog,
    get_preset,
    presets,
    run_analytic_prior_scenario,
    run_pipeline,
    run_simulation_study,
)

__version__ = "0.1.0"
