"""Chernoff bounds, I-projections and exponential tilting."""

from ._core import (
    __version__,
    BoundReport,
    ContinuousModel,
    DiscreteModel,
    ExperimentRow,
    GeneralizedBound,
    Projection,
    Sample,
    SolverOptions,
    TiltSolution,
    TiltStatus,
    ValueFunction,
    Error,
    InputError,
    HypothesisError,
    BelowMeanError,
    InfeasibleTarget,
    ImpossibleSample,
    MLBoundary,
    NotAnAtom,
    RatioUndefined,
    analyze,
    asymptotic_experiment,
    bound,
    bound_log,
    cgf,
    cgf_prime,
    chernoff_from_likelihood,
    example_pmf,
    generalized_projection_bound,
    i_projection,
    kl_divergence,
    log_likelihood,
    mean_v,
    ml_estimate,
    optimize_theta,
    product_form_bound,
    ratio_form_bound,
    tail_prob,
    tilt,
    validate_value_function,
)

__all__ = [name for name in dir() if not name.startswith("_")]
