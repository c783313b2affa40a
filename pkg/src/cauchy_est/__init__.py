"""Estimation toolkit for the Cauchy and circular Cauchy distributions.

Closed-form quasi-arithmetic-mean estimators of the joint location-scale
parameter, their one-step Fisher-scoring refinements, the exact MLE, exact
Kullback-Leibler divergences and Bahadur tail rates on both the upper
half-plane and unit-disk charts, plus a reproducible Monte-Carlo harness for
normalized-MSE tables and tail-decay probes.
"""

from .errors import (
    BranchPointError,
    CauchyEstError,
    DegenerateEstimateError,
    DomainError,
    PullbackPoleError,
    SimulationError,
    SolverError,
)
from .estimators import (
    EstimateOutcome,
    Generator,
    OneStepResult,
    PRESET_GENERATORS,
    circular_estimate,
    estimate_pipeline,
    generator_forward,
    generator_inverse,
    median,
    one_step,
    one_step_detailed,
    qam_estimate,
    qam_estimate_median_adjusted,
)
from .geometry import (
    DiskPoint,
    HalfPlanePoint,
    Sl2Matrix,
    bahadur_rate,
    bahadur_rate_circular,
    circle_angle_from_real,
    circular_log_density,
    kl_circular,
    kl_halfplane,
    log_density,
    maximal_invariant,
    mobius_derivative,
    mobius_kernel,
    mobius_kernel_upper,
    mobius_to_disk,
    mobius_to_halfplane,
    real_from_circle_angle,
    sl2_act,
)
from .kernels import backend_name
from .mle import MleResult, SolverConfig, fisher_information, log_likelihood, mle, score
from .sampling import (
    AngleBatch,
    SampleBatch,
    SeedSpec,
    cauchy_cdf,
    cauchy_quantile,
    sample_cauchy,
    sample_circular,
)
from .simulation import (
    CircularMseResult,
    MseScenario,
    SimTableRow,
    TailResult,
    TailScenario,
    run_circular_mse,
    run_mse,
    run_table,
    run_tail,
)

__version__ = "0.1.0"
