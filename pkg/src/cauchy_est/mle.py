"""Maximum-likelihood estimation through the complex likelihood equation.

The MLE is the unique upper-half-plane root of sum (X_j - t)/(X_j - conj(t));
the joint likelihood is unimodal, so iterating the scoring map
t -> t + 2 Im(t) i score(t) with backtracking (keep Im > 0, never decrease
the log-likelihood) converges globally.  The iteration is seeded with the
one-step estimate of the reciprocal-generator mean, which is itself already
root-n consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEstimateError, DomainError
from .estimators import PRESET_GENERATORS, estimate_pipeline
from .geometry import HalfPlanePoint
from .sampling import SampleBatch

__all__ = ["MleResult", "SolverConfig", "score", "log_likelihood", "fisher_information", "mle"]

_LOG_PI = math.log(math.pi)
_MAX_BACKTRACKS = 60

# Acceptance slack for the monotone-likelihood backtracking test.  Near the
# optimum a genuine ascent step improves the log-likelihood by less than its
# own floating-point granularity, so "does not decrease" is enforced up to
# rounding: ll_new >= ll_old - _LL_SLACK_SCALE * eps * (1 + |ll_old|).
_LL_SLACK_SCALE = 16.0 * 2.220446049250313e-16


@dataclass(frozen=True, slots=True)
class SolverConfig:
    """Scoring-iteration tolerances.

    Convergence is declared on the mean-score norm; ``step_tol`` only bails
    out of steps too small to matter, relative to the current scale.
    """

    score_tol: float = 1e-12
    step_tol: float = 1e-14
    max_iters: int = 200

    def __post_init__(self) -> None:
        if not (self.score_tol > 0 and self.step_tol > 0 and self.max_iters > 0):
            raise DomainError("solver tolerances and iteration cap must be positive")


@dataclass(frozen=True, slots=True)
class MleResult:
    theta_hat: HalfPlanePoint
    iterations: int
    final_score_norm: float
    converged: bool


def score(batch, t: HalfPlanePoint) -> complex:
    """Mean of the unit-modulus scores (X_j - t)/(X_j - conj(t)).

    Vanishes exactly at the MLE; its modulus never exceeds 1.
    """
    batch = SampleBatch.coerce(batch)
    return _score_values(batch.values, t.as_complex)


def _score_values(values: np.ndarray, t: complex) -> complex:
    return complex(((values - t) / (values - t.conjugate())).mean())


def log_likelihood(batch, t: HalfPlanePoint) -> float:
    batch = SampleBatch.coerce(batch)
    return _loglik_values(batch.values, t.as_complex)


def _loglik_values(values: np.ndarray, t: complex) -> float:
    dx = values - t.real
    return float(
        values.size * (np.log(t.imag) - _LOG_PI) - np.sum(np.log(dx * dx + t.imag * t.imag))
    )


def fisher_information(n: int, t: HalfPlanePoint) -> float:
    """Common diagonal entry n / (2 sigma^2) of the information matrix."""
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    return n / (2.0 * t.im * t.im)


def _fallback_start(values: np.ndarray) -> complex:
    """Median plus half-interquartile-range; used when the seed degenerates."""
    s = np.sort(values)
    n = s.size
    if n % 2 == 0:
        med = (s[n // 2 - 1] + s[n // 2]) / 2.0
    elif n >= 5:
        med = (s[(n - 3) // 2] + s[(n - 1) // 2] + s[(n + 1) // 2]) / 3.0
    else:
        med = float(np.median(s))
    q1, q3 = np.percentile(s, [25.0, 75.0])
    half_iqr = (q3 - q1) / 2.0
    if not half_iqr > 0.0:
        raise DegenerateEstimateError(
            "all samples coincide; the likelihood has no interior maximum"
        )
    return complex(med, half_iqr)


def _solve_scoring(
    values: np.ndarray, start: complex, cfg: SolverConfig
) -> tuple[complex, int, float]:
    """Run the damped scoring iteration; returns (theta, iters, final norm)."""
    theta = start
    ll = _loglik_values(values, theta)
    iters = 0
    final_s: float | None = None
    while iters < cfg.max_iters:
        s = _score_values(values, theta)
        norm = abs(s)
        if norm < cfg.score_tol:
            final_s = norm
            break
        step = 2j * theta.imag * s
        lam = 1.0
        accepted = False
        cand = theta
        ll_cand = ll
        slack = _LL_SLACK_SCALE * (1.0 + abs(ll))
        for _ in range(_MAX_BACKTRACKS):
            cand = theta + lam * step
            if cand.imag > 0.0:
                ll_cand = _loglik_values(values, cand)
                if ll_cand >= ll - slack:
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            # No admissible ascent direction left at this resolution.
            final_s = norm
            break
        moved = abs(cand - theta) / theta.imag
        theta = cand
        ll = ll_cand
        iters += 1
        if moved < cfg.step_tol:
            break
    if final_s is None:
        final_s = abs(_score_values(values, theta))
    return theta, iters, final_s


def mle(batch, cfg: SolverConfig = SolverConfig()) -> MleResult:
    """Maximum-likelihood estimate of the joint location-scale parameter.

    n = 1 has no interior maximum and is rejected; n = 2 with distinct points
    has the closed form midpoint + half-range * i.  Larger batches run the
    scoring iteration from the reciprocal-generator one-step estimate (or a
    median/IQR point if that seed degenerates).
    """
    batch = SampleBatch.coerce(batch)
    values = batch.values
    if batch.n == 1:
        raise DomainError("MLE is boundary-degenerate for a single observation")
    if batch.n == 2:
        lo, hi = float(np.min(values)), float(np.max(values))
        if lo == hi:
            raise DegenerateEstimateError(
                "two equal samples give a boundary-degenerate MLE"
            )
        theta = complex((lo + hi) / 2.0, (hi - lo) / 2.0)
        return MleResult(
            HalfPlanePoint(theta.real, theta.imag),
            iterations=0,
            final_score_norm=abs(_score_values(values, theta)),
            converged=True,
        )
    try:
        start = estimate_pipeline(PRESET_GENERATORS["f3"], batch).as_complex
    except DegenerateEstimateError:
        start = _fallback_start(values)
    theta, iters, final_norm = _solve_scoring(values, start, cfg)
    return MleResult(
        HalfPlanePoint(theta.real, theta.imag),
        iterations=iters,
        final_score_norm=final_norm,
        converged=final_norm < cfg.score_tol,
    )
