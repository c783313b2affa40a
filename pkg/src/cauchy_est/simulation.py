"""Monte-Carlo harness for estimator mean-squared-error tables and tail probes.

Each replication ``r`` of a scenario draws its batch from the substream
``(base_seed, r)``, runs the requested estimator, and contributes the summand
``n |T - theta|^2 / sigma^2`` (or a tail indicator).  Replications are
embarrassingly parallel; chunking is a fixed function of the scenario alone,
worker processes only fill disjoint slices of the result arrays, and the
reduction is a fixed-order numpy sum, so a scenario's output is bit-identical
at any worker count.

Degenerate or non-converged replications are excluded from the statistic and
reported in the ``failures`` column, never silently folded in.
"""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, SimulationError
from .estimators import KIND_LOG, Generator
from .geometry import DiskPoint, HalfPlanePoint, bahadur_rate, mobius_to_halfplane
from .mle import SolverConfig
from .sampling import _cauchy_rows

__all__ = [
    "MseScenario",
    "TailScenario",
    "SimTableRow",
    "TailResult",
    "CircularMseResult",
    "ESTIMATOR_FAMILIES",
    "run_mse",
    "run_tail",
    "run_table",
    "run_circular_mse",
    "rows_to_csv",
    "rows_to_json",
    "tail_results_to_csv",
    "tail_results_to_json",
    "mse_scenarios_from_json",
    "tail_scenarios_from_json",
]

ESTIMATOR_FAMILIES = ("qam", "one_step", "one_step_median", "mle")

# Replication status codes (0..3 shared with the kernel backends).
_STATUS_LABELS = {
    1: "degenerate initializer",
    2: "generator branch point",
    3: "solver non-convergence",
    4: "pullback pole",
}

# Fixed chunking policy: part of the reproducibility contract.
_CHUNK_TARGET_SAMPLES = 1 << 20
_DEFAULT_ALPHA = 1j


def _chunk_rows(n: int) -> int:
    return max(1, _CHUNK_TARGET_SAMPLES // max(n, 1))


def _validate_estimator(estimator: str, generator: Generator | None, n: int) -> None:
    if estimator not in ESTIMATOR_FAMILIES:
        raise DomainError(
            f"unknown estimator {estimator!r}; expected one of {ESTIMATOR_FAMILIES}"
        )
    if estimator == "mle":
        return
    if generator is None:
        raise DomainError(f"estimator {estimator!r} needs a generator")
    if estimator == "one_step_median" and n % 2 == 1 and n < 5:
        raise DomainError("median adjustment needs even n or odd n >= 5")


@dataclass(frozen=True, slots=True)
class MseScenario:
    """One cell of a normalized-MSE table."""

    theta: HalfPlanePoint
    n: int
    estimator: str
    generator: Generator | None
    replications: int
    base_seed: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise DomainError(f"scenario needs n >= 2, got {self.n}")
        if self.replications < 100:
            raise DomainError(
                f"scenario needs >= 100 replications, got {self.replications}"
            )
        _validate_estimator(self.estimator, self.generator, self.n)


@dataclass(frozen=True, slots=True)
class TailScenario:
    """One empirical tail-probability probe P(|T - theta| > eps)."""

    theta: HalfPlanePoint
    n: int
    eps: float
    estimator: str
    generator: Generator | None
    replications: int
    base_seed: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise DomainError(f"scenario needs n >= 2, got {self.n}")
        if not self.eps > 0.0:
            raise DomainError(f"eps must be positive, got {self.eps!r}")
        if self.replications < 1:
            raise DomainError("scenario needs at least one replication")
        _validate_estimator(self.estimator, self.generator, self.n)


@dataclass(frozen=True, slots=True)
class SimTableRow:
    mu: float
    sigma: float
    n: int
    estimator: str
    generator: str
    replications: int
    failures: int
    statistic: float
    mc_stderr: float
    error: str | None = None


@dataclass(frozen=True, slots=True)
class TailResult:
    mu: float
    sigma: float
    n: int
    eps: float
    estimator: str
    generator: str
    replications: int
    failures: int
    hits: int
    p_hat: float
    rate_ratio: float
    mc_stderr_p: float


@dataclass(frozen=True, slots=True)
class CircularMseResult:
    w: complex
    n: int
    estimator: str
    generator: str
    replications: int
    failures: int
    statistic: float
    mc_stderr: float


@dataclass(frozen=True, slots=True)
class _RepSpec:
    """Picklable description of how to turn one substream into one estimate."""

    family: str
    gen_kind: int
    gen_alpha: complex
    theta: complex
    n: int
    base_seed: int
    circular: bool = False
    chart_alpha: complex = _DEFAULT_ALPHA
    score_tol: float = 1e-12
    step_tol: float = 1e-14
    max_iters: int = 200


def _row_medians(x: np.ndarray) -> np.ndarray:
    n = x.shape[1]
    s = np.sort(x, axis=1)
    if n % 2 == 0:
        return (s[:, n // 2 - 1] + s[:, n // 2]) / 2.0
    return (s[:, (n - 3) // 2] + s[:, (n - 1) // 2] + s[:, (n + 1) // 2]) / 3.0


def _fallback_starts(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Median + half-IQR starts for rows whose scoring seed degenerated."""
    med = np.median(x, axis=1)
    q1, q3 = np.percentile(x, [25.0, 75.0], axis=1)
    half_iqr = (q3 - q1) / 2.0
    ok = half_iqr > 0.0
    return med + 1j * np.where(ok, half_iqr, 1.0), ok


def _compute_rows(spec: _RepSpec, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """Estimates and status codes for replications lo..hi-1."""
    m = hi - lo
    theta = HalfPlanePoint(spec.theta.real, spec.theta.imag)
    x = _cauchy_rows(spec.n, theta, spec.base_seed, lo, hi)
    status = np.zeros(m, dtype=np.uint8)
    out = np.full(m, np.nan + 0j, dtype=np.complex128)

    if spec.circular:
        # Round-trip through the circle: estimators consume angles, so the
        # simulated data must take the same path a user's angle data takes.
        a = spec.chart_alpha
        u = x - a.real
        ang = np.mod(-2.0 * np.arctan2(a.imag, u), 2.0 * np.pi)
        ang = np.minimum(ang, np.nextafter(2.0 * np.pi, 0.0))
        poles = np.any(ang == 0.0, axis=1)
        status[poles] = 4
        with np.errstate(all="ignore"):
            x = a.real - a.imag / np.tan(0.5 * ang)
        x = np.ascontiguousarray(x)

    live = np.flatnonzero(status == 0)
    xl = x[live] if live.size != m else x

    if spec.family == "mle":
        y, st = kernels.qam_rows(xl, kernels.KIND_RECIPROCAL, 1j, np.zeros(len(xl)))
        start = np.empty(len(xl), dtype=np.complex128)
        ok = st == 0
        if np.any(ok):
            z0, _ = kernels.one_step_rows(xl[ok], y[ok])
            start[ok] = z0
        bad = np.flatnonzero(~ok)
        dead = np.zeros(len(xl), dtype=bool)
        if bad.size:
            fstart, fok = _fallback_starts(xl[bad])
            start[bad] = fstart
            dead[bad[~fok]] = True
        run = np.flatnonzero(~dead)
        theta_hat = np.empty(len(xl), dtype=np.complex128)
        conv = np.zeros(len(xl), dtype=bool)
        if run.size:
            th, _, _, cv = kernels.mle_rows(
                xl[run], start[run], spec.score_tol, spec.step_tol, spec.max_iters
            )
            theta_hat[run] = th
            conv[run] = cv
        st_out = np.zeros(len(xl), dtype=np.uint8)
        st_out[dead] = 1
        st_out[~dead & ~conv] = 3
        est = theta_hat
    else:
        shifts = (
            _row_medians(xl)
            if spec.family == "one_step_median"
            else np.zeros(len(xl))
        )
        y, st_out = kernels.qam_rows(xl, spec.gen_kind, spec.gen_alpha, shifts)
        est = y.copy()
        if spec.family != "qam":
            ok = st_out == 0
            if np.any(ok):
                z, _ = kernels.one_step_rows(xl[ok], y[ok])
                est[ok] = z

    if spec.circular:
        a = spec.chart_alpha
        with np.errstate(all="ignore"):
            est = (est - a) / (est - a.conjugate())

    out[live] = est
    status[live] = st_out
    return out, status


def _run_replications(
    spec: _RepSpec, replications: int, workers: int
) -> tuple[np.ndarray, np.ndarray]:
    estimates = np.empty(replications, dtype=np.complex128)
    status = np.empty(replications, dtype=np.uint8)
    rows = _chunk_rows(spec.n)
    bounds = [(lo, min(lo + rows, replications)) for lo in range(0, replications, rows)]
    if workers <= 1 or len(bounds) == 1:
        for lo, hi in bounds:
            estimates[lo:hi], status[lo:hi] = _compute_rows(spec, lo, hi)
        return estimates, status
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [(lo, hi, pool.submit(_compute_rows, spec, lo, hi)) for lo, hi in bounds]
        for lo, hi, fut in futures:
            estimates[lo:hi], status[lo:hi] = fut.result()
    return estimates, status


def _spec_for(
    theta: HalfPlanePoint,
    n: int,
    estimator: str,
    generator: Generator | None,
    base_seed: int,
    solver: SolverConfig,
) -> _RepSpec:
    if generator is not None:
        kind = kernels.KIND_LOG if generator.kind == KIND_LOG else kernels.KIND_RECIPROCAL
        alpha = generator.alpha
    else:
        kind, alpha = -1, 0j
    return _RepSpec(
        family=estimator,
        gen_kind=kind,
        gen_alpha=alpha,
        theta=theta.as_complex,
        n=n,
        base_seed=base_seed,
        score_tol=solver.score_tol,
        step_tol=solver.step_tol,
        max_iters=solver.max_iters,
    )


def _failure_mode(status: np.ndarray) -> str:
    codes, counts = np.unique(status[status != 0], return_counts=True)
    parts = [
        f"{_STATUS_LABELS.get(int(c), f'status {int(c)}')} x{int(k)}"
        for c, k in zip(codes, counts)
    ]
    return ", ".join(parts) if parts else "no failures"


def _mean_and_stderr(summands: np.ndarray) -> tuple[float, float]:
    m = summands.size
    mean = float(np.sum(summands) / m)
    if m < 2:
        return mean, float("nan")
    var = float(np.sum((summands - mean) ** 2) / (m - 1))
    return mean, math.sqrt(var / m)


def run_mse(
    scenario: MseScenario,
    workers: int = 1,
    solver: SolverConfig = SolverConfig(),
) -> SimTableRow:
    """Normalized-MSE statistic mean(n |T_r - theta|^2 / sigma^2) for one cell."""
    spec = _spec_for(
        scenario.theta,
        scenario.n,
        scenario.estimator,
        scenario.generator,
        scenario.base_seed,
        solver,
    )
    estimates, status = _run_replications(spec, scenario.replications, workers)
    ok = status == 0
    successes = int(np.count_nonzero(ok))
    if successes == 0:
        raise SimulationError(
            f"all {scenario.replications} replications failed ({_failure_mode(status)})"
        )
    theta = scenario.theta.as_complex
    d = estimates[ok] - theta
    summands = scenario.n * (d.real * d.real + d.imag * d.imag) / (scenario.theta.im**2)
    statistic, stderr = _mean_and_stderr(summands)
    return SimTableRow(
        mu=scenario.theta.re,
        sigma=scenario.theta.im,
        n=scenario.n,
        estimator=scenario.estimator,
        generator=str(scenario.generator) if scenario.generator else "",
        replications=scenario.replications,
        failures=scenario.replications - successes,
        statistic=statistic,
        mc_stderr=stderr,
    )


def run_tail(
    scenario: TailScenario,
    workers: int = 1,
    solver: SolverConfig = SolverConfig(),
) -> TailResult:
    """Empirical tail probability and its ratio to the optimal decay rate."""
    spec = _spec_for(
        scenario.theta,
        scenario.n,
        scenario.estimator,
        scenario.generator,
        scenario.base_seed,
        solver,
    )
    estimates, status = _run_replications(spec, scenario.replications, workers)
    ok = status == 0
    theta = scenario.theta.as_complex
    hits = int(np.count_nonzero(np.abs(estimates[ok] - theta) > scenario.eps))
    R = scenario.replications
    p_hat = hits / R
    if hits < 20:
        warnings.warn(
            f"tail probe saw only {hits} hits; enlarge replications for a "
            "usable rate estimate",
            stacklevel=2,
        )
    rate = bahadur_rate(scenario.eps, scenario.theta)
    rate_ratio = -math.log(p_hat) / (scenario.n * rate) if p_hat > 0 else math.inf
    return TailResult(
        mu=scenario.theta.re,
        sigma=scenario.theta.im,
        n=scenario.n,
        eps=scenario.eps,
        estimator=scenario.estimator,
        generator=str(scenario.generator) if scenario.generator else "",
        replications=R,
        failures=R - int(np.count_nonzero(ok)),
        hits=hits,
        p_hat=p_hat,
        rate_ratio=rate_ratio,
        mc_stderr_p=math.sqrt(p_hat * (1.0 - p_hat) / R),
    )


def run_table(
    scenarios: list[MseScenario],
    workers: int = 1,
    solver: SolverConfig = SolverConfig(),
) -> list[SimTableRow]:
    """Run every cell, converting per-cell errors into failed rows."""
    if not scenarios:
        raise DomainError("scenario list is empty")
    out = []
    for sc in scenarios:
        try:
            out.append(run_mse(sc, workers=workers, solver=solver))
        except (SimulationError, DomainError) as exc:
            out.append(
                SimTableRow(
                    mu=sc.theta.re,
                    sigma=sc.theta.im,
                    n=sc.n,
                    estimator=sc.estimator,
                    generator=str(sc.generator) if sc.generator else "",
                    replications=sc.replications,
                    failures=sc.replications,
                    statistic=float("nan"),
                    mc_stderr=float("nan"),
                    error=str(exc),
                )
            )
    return out


def run_circular_mse(
    w: DiskPoint,
    n: int,
    generator: Generator,
    replications: int,
    base_seed: int,
    alpha: HalfPlanePoint = HalfPlanePoint(0.0, 1.0),
    estimator: str = "one_step",
    workers: int = 1,
) -> CircularMseResult:
    """Normalized circular statistic mean(n |W_r - w|^2 / (1 - |w|^2)^2).

    Samples angles from the circular law, pulls them back through the chart
    at alpha, runs the half-plane estimator, and pushes the result into the
    disk, exactly as ``circular_estimate`` would per batch.
    """
    _validate_estimator(estimator, generator, n)
    if replications < 100:
        raise DomainError(f"needs >= 100 replications, got {replications}")
    theta = mobius_to_halfplane(w, alpha)
    spec = _RepSpec(
        family=estimator,
        gen_kind=kernels.KIND_LOG if generator.kind == KIND_LOG else kernels.KIND_RECIPROCAL,
        gen_alpha=generator.alpha,
        theta=theta.as_complex,
        n=n,
        base_seed=base_seed,
        circular=True,
        chart_alpha=alpha.as_complex,
    )
    estimates, status = _run_replications(spec, replications, workers)
    ok = status == 0
    successes = int(np.count_nonzero(ok))
    if successes == 0:
        raise SimulationError(
            f"all {replications} replications failed ({_failure_mode(status)})"
        )
    wc = w.as_complex
    d = estimates[ok] - wc
    gauge = (1.0 - abs(wc) ** 2) ** 2
    summands = n * (d.real * d.real + d.imag * d.imag) / gauge
    statistic, stderr = _mean_and_stderr(summands)
    return CircularMseResult(
        w=wc,
        n=n,
        estimator=estimator,
        generator=str(generator),
        replications=replications,
        failures=replications - successes,
        statistic=statistic,
        mc_stderr=stderr,
    )


# ---------------------------------------------------------------------------
# Serialization


def _fmt_float(v: float) -> str:
    return repr(float(v))


def rows_to_csv(rows: list[SimTableRow]) -> str:
    lines = ["mu,sigma,n,estimator,generator,replications,failures,statistic,mc_stderr"]
    for r in rows:
        lines.append(
            f"{_fmt_float(r.mu)},{_fmt_float(r.sigma)},{r.n},{r.estimator},"
            f"{r.generator},{r.replications},{r.failures},"
            f"{_fmt_float(r.statistic)},{_fmt_float(r.mc_stderr)}"
        )
    return "\n".join(lines) + "\n"


def _json_float(v: float):
    return None if not math.isfinite(v) else v


def rows_to_json(rows: list[SimTableRow]) -> str:
    payload = [
        {
            "mu": r.mu,
            "sigma": r.sigma,
            "n": r.n,
            "estimator": r.estimator,
            "generator": r.generator,
            "replications": r.replications,
            "failures": r.failures,
            "statistic": _json_float(r.statistic),
            "mc_stderr": _json_float(r.mc_stderr),
            "error": r.error,
        }
        for r in rows
    ]
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def tail_results_to_csv(results: list[TailResult]) -> str:
    lines = [
        "mu,sigma,n,eps,estimator,generator,replications,failures,hits,"
        "p_hat,rate_ratio,mc_stderr_p"
    ]
    for r in results:
        lines.append(
            f"{_fmt_float(r.mu)},{_fmt_float(r.sigma)},{r.n},{_fmt_float(r.eps)},"
            f"{r.estimator},{r.generator},{r.replications},{r.failures},{r.hits},"
            f"{_fmt_float(r.p_hat)},{_fmt_float(r.rate_ratio)},{_fmt_float(r.mc_stderr_p)}"
        )
    return "\n".join(lines) + "\n"


def tail_results_to_json(results: list[TailResult]) -> str:
    payload = [
        {
            "mu": r.mu,
            "sigma": r.sigma,
            "n": r.n,
            "eps": r.eps,
            "estimator": r.estimator,
            "generator": r.generator,
            "replications": r.replications,
            "failures": r.failures,
            "hits": r.hits,
            "p_hat": r.p_hat,
            "rate_ratio": _json_float(r.rate_ratio),
            "mc_stderr_p": r.mc_stderr_p,
        }
        for r in results
    ]
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Scenario files


def _theta_from_obj(obj) -> HalfPlanePoint:
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        return HalfPlanePoint(float(obj[0]), float(obj[1]))
    raise DomainError(f"theta must be a [re, im] pair, got {obj!r}")


def _generator_from_obj(obj) -> Generator | None:
    if obj is None:
        return None
    if isinstance(obj, str):
        return Generator.parse(obj)
    raise DomainError(f"generator must be a string id or null, got {obj!r}")


def _scenario_records(text: str) -> list[dict]:
    data = json.loads(text)
    if isinstance(data, dict):
        data = data.get("scenarios")
    if not isinstance(data, list) or not data:
        raise DomainError("scenario file must hold a non-empty list of scenarios")
    return data


def _seed_for(rec: dict, default_base_seed: int | None) -> int:
    seed = rec.get("base_seed", default_base_seed)
    if seed is None:
        raise DomainError(
            "scenario omits base_seed and no default seed was supplied"
        )
    return int(seed)


def mse_scenarios_from_json(
    text: str,
    default_replications: int = 100_000,
    default_base_seed: int | None = None,
) -> list[MseScenario]:
    out = []
    for rec in _scenario_records(text):
        out.append(
            MseScenario(
                theta=_theta_from_obj(rec["theta"]),
                n=int(rec["n"]),
                estimator=str(rec["estimator"]),
                generator=_generator_from_obj(rec.get("generator")),
                replications=int(rec.get("replications", default_replications)),
                base_seed=_seed_for(rec, default_base_seed),
            )
        )
    return out


def tail_scenarios_from_json(
    text: str,
    default_replications: int = 100_000,
    default_base_seed: int | None = None,
) -> list[TailScenario]:
    out = []
    for rec in _scenario_records(text):
        out.append(
            TailScenario(
                theta=_theta_from_obj(rec["theta"]),
                n=int(rec["n"]),
                eps=float(rec["eps"]),
                estimator=str(rec["estimator"]),
                generator=_generator_from_obj(rec.get("generator")),
                replications=int(rec.get("replications", default_replications)),
                base_seed=_seed_for(rec, default_base_seed),
            )
        )
    return out
