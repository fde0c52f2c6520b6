"""Exact and simulated statistics of labelled random walks on regular expanders."""

from .clt import (
    ConvergenceCurve,
    ExplicitConstants,
    asymptotic_sigma2,
    binomial_tail_check,
    convergence_curve,
    lclt_error,
    matching_sticky_p,
    explicit_constants,
    spectral_autocovariance,
    tv_to_discretized_normal,
    tv_to_iid,
    tv_to_sticky,
    variance_bound_check,
    variance_formula,
    walk_chernoff_check,
)
from .decomp import (
    DecompositionTrace,
    KStarResult,
    bernoulli_eta,
    concentration_check,
    decomposition_batch,
    decomposition_sample,
    defect_estimate,
    expected_visits,
    find_kstar,
    sfull_distribution_check,
)
from .dist import (
    DiscretizedNormal,
    IntDistribution,
    binomial_law,
    char_fn,
    convolve,
    discretized_normal,
    l2_char_distance,
    moments,
    normalizer_bound_check,
    parseval_check,
    tv_distance,
    wrapped_normal_char,
)
from .errors import (
    ExpwalkError,
    GenerationFailureError,
    InvalidParameterError,
    NumericFailureError,
    OutOfHypothesisError,
    ResourceBudgetError,
    TheoremViolationError,
)
from .graph import (
    Labelling,
    RegularGraph,
    build_complete,
    build_cycle,
    build_random_regular,
    label_classes,
    load_graph,
    load_labelling,
    random_balanced_labelling,
    random_labelling,
    save_graph,
    save_labelling,
)
from .report import BoundReport
from .spectral import (
    Spectrum,
    is_expander,
    lambda_star,
    mixing_corollary_check,
    mixing_lemma_check,
    return_to_set_direct,
    return_to_set_probability,
    spectral_apply,
    spectrum,
)
from .walks import (
    FiniteChain,
    WalkSample,
    empirical_law,
    exact_weight_law,
    exact_weight_laws,
    sample_walk,
    sticky_chain,
    sticky_variance_closed_form,
    sticky_variance_rate,
    two_step_chain,
    walk_chain,
)

__version__ = "0.1.0"
