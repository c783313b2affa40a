"""Closed-form estimators of the Cauchy parameter and their one-step refinements.

A generator ``f`` is either ``log(x + alpha)`` (geometric-mean family, alpha
in the closed upper half-plane) or ``1/(x + alpha)`` (modified harmonic mean,
alpha strictly interior).  The quasi-arithmetic mean f^-1(mean f(X_j)) is a
consistent closed-form estimate of mu + sigma*i; one Fisher-scoring step on
top of it is first-order efficient.  A median-shifted variant restores affine
equivariance for the plain-logarithm generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BranchPointError, DegenerateEstimateError, DomainError, SolverError
from .geometry import DiskPoint, HalfPlanePoint, mobius_to_disk, real_from_circle_angle
from .sampling import AngleBatch, SampleBatch

__all__ = [
    "Generator",
    "PRESET_GENERATORS",
    "EstimateOutcome",
    "OneStepResult",
    "generator_forward",
    "generator_inverse",
    "qam_estimate",
    "qam_estimate_median_adjusted",
    "median",
    "one_step",
    "one_step_detailed",
    "estimate_pipeline",
    "circular_estimate",
]

KIND_LOG = "log"
KIND_RECIPROCAL = "recip"

_RECIPROCAL_FLOOR = 1e-300
_MAX_HALVINGS = 60

_DEFAULT_ALPHA = HalfPlanePoint(0.0, 1.0)


@dataclass(frozen=True, slots=True)
class Generator:
    """A quasi-arithmetic-mean generator: log(x + alpha) or 1/(x + alpha)."""

    kind: str
    alpha: complex
    label: str = ""

    def __post_init__(self) -> None:
        alpha = complex(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        if self.kind == KIND_LOG:
            if alpha.imag < 0.0:
                raise DomainError("log generator needs Im(alpha) >= 0")
        elif self.kind == KIND_RECIPROCAL:
            if not alpha.imag > 0.0:
                raise DomainError("reciprocal generator needs Im(alpha) > 0")
        else:
            raise DomainError(f"unknown generator kind {self.kind!r}")
        if not self.label:
            object.__setattr__(self, "label", f"{self.kind}:{_fmt(alpha)}")

    @classmethod
    def log(cls, alpha: complex, label: str = "") -> "Generator":
        return cls(KIND_LOG, alpha, label)

    @classmethod
    def reciprocal(cls, alpha: complex, label: str = "") -> "Generator":
        return cls(KIND_RECIPROCAL, alpha, label)

    @classmethod
    def parse(cls, spec: str) -> "Generator":
        """Build from 'f1'..'f4', 'log:a+bi' or 'recip:a+bi'."""
        if spec in PRESET_GENERATORS:
            return PRESET_GENERATORS[spec]
        head, sep, tail = spec.partition(":")
        if sep and head in (KIND_LOG, KIND_RECIPROCAL):
            from ._literals import parse_complex_literal

            return cls(head, parse_complex_literal(tail), spec)
        raise DomainError(f"unknown generator spec {spec!r}")

    def __str__(self) -> str:
        return self.label


def _fmt(z: complex) -> str:
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:g}{sign}{abs(z.imag):g}i"


# Presets used throughout the benchmark tables.
PRESET_GENERATORS: dict[str, Generator] = {
    "f1": Generator(KIND_LOG, 0j, "f1"),
    "f2": Generator(KIND_LOG, 1j, "f2"),
    "f3": Generator(KIND_RECIPROCAL, 1j, "f3"),
    "f4": Generator(KIND_RECIPROCAL, 2j, "f4"),
}


@dataclass(frozen=True, slots=True)
class EstimateOutcome:
    """A quasi-arithmetic-mean estimate plus its health diagnostics.

    ``point`` is present iff the raw value landed strictly inside the upper
    half-plane; otherwise ``boundary_hit`` is set and only ``raw`` is usable.
    ``mean_magnitude`` is |mean of the transformed samples|.
    """

    raw: complex
    point: HalfPlanePoint | None
    boundary_hit: bool
    mean_magnitude: float

    @property
    def is_degenerate(self) -> bool:
        return self.point is None

    @property
    def value(self) -> HalfPlanePoint:
        if self.point is None:
            raise DegenerateEstimateError(
                f"estimate is degenerate (raw value {self.raw!r})"
            )
        return self.point


@dataclass(frozen=True, slots=True)
class OneStepResult:
    point: HalfPlanePoint
    halvings: int
    raw: complex


def generator_forward(gen: Generator, x):
    """Apply the generator to a real observation (scalar or array).

    The logarithm uses the principal branch, so arguments on the negative
    real axis (possible only for real alpha) get imaginary part pi, matching
    the limit from inside the upper half-plane.
    """
    arr = np.asarray(x, dtype=float)
    z = arr.astype(np.complex128)
    z += gen.alpha
    if gen.kind == KIND_LOG:
        if gen.alpha.imag == 0.0 and np.any(arr == -gen.alpha.real):
            raise BranchPointError(
                f"sample at branch point -alpha = {-gen.alpha.real!r}"
            )
        out = np.log(z)
    else:
        out = 1.0 / z
    return complex(out) if np.ndim(x) == 0 else out


def generator_inverse(gen: Generator, y):
    """Invert the generator: exp(y) - alpha, or 1/y - alpha."""
    arr = np.asarray(y, dtype=np.complex128)
    if gen.kind == KIND_LOG:
        out = np.exp(arr) - gen.alpha
    else:
        if np.any(np.abs(arr) < _RECIPROCAL_FLOOR):
            raise DegenerateEstimateError(
                "reciprocal-generator mean vanished; no finite inverse"
            )
        out = 1.0 / arr - gen.alpha
    return complex(out) if np.ndim(y) == 0 else out


def _outcome_from_raw(raw: complex, mean_magnitude: float) -> EstimateOutcome:
    point = HalfPlanePoint(raw.real, raw.imag) if raw.imag > 0.0 else None
    return EstimateOutcome(
        raw=raw,
        point=point,
        boundary_hit=point is None,
        mean_magnitude=mean_magnitude,
    )


def qam_estimate(gen: Generator, batch) -> EstimateOutcome:
    """The quasi-arithmetic mean f^-1((1/n) sum f(X_j))."""
    batch = SampleBatch.coerce(batch)
    if batch.n < 2:
        raise DomainError("quasi-arithmetic mean needs at least 2 samples")
    transformed = generator_forward(gen, batch.values)
    m = transformed.mean()
    raw = complex(generator_inverse(gen, m))
    return _outcome_from_raw(raw, abs(complex(m)))


def median(batch) -> float:
    """Sample median: mean of the two central order statistics for even n,
    and the three-point average of the middle order statistics for odd n >= 5.

    The three-point rule keeps the median away from the sample points, which
    the log-generator median adjustment needs; odd n < 5 has no such rule and
    is rejected.
    """
    batch = SampleBatch.coerce(batch)
    n = batch.n
    if n < 2:
        raise DomainError("median needs at least 2 samples")
    s = np.sort(batch.values)
    if n % 2 == 0:
        return float((s[n // 2 - 1] + s[n // 2]) / 2.0)
    if n < 5:
        raise DomainError(f"three-point median rule needs odd n >= 5, got {n}")
    return float((s[(n - 3) // 2] + s[(n - 1) // 2] + s[(n + 1) // 2]) / 3.0)


def qam_estimate_median_adjusted(
    gen: Generator, batch, strict_odd: bool = False
) -> EstimateOutcome:
    """Median-shifted quasi-arithmetic mean: M + f^-1(mean f(X_j - M)).

    Centering at the median restores exact affine equivariance for the plain
    logarithm.  With ``strict_odd`` a real-alpha log generator refuses odd
    batch sizes outright instead of relying on the three-point median rule.
    """
    batch = SampleBatch.coerce(batch)
    if strict_odd and batch.n % 2 == 1 and gen.kind == KIND_LOG and gen.alpha.imag == 0.0:
        raise DomainError(
            "strict mode: odd sample size with a real-shift log generator"
        )
    m = median(batch)
    centered = batch.values - m
    transformed = generator_forward(gen, centered)
    mean = transformed.mean()
    raw = m + complex(generator_inverse(gen, mean))
    return _outcome_from_raw(raw, abs(complex(mean)))


def _one_step_raw(values: np.ndarray, y: complex) -> tuple[complex, complex, int]:
    """Shared scoring-step arithmetic: returns (z, raw z, halvings)."""
    s = ((values - y) / (values - y.conjugate())).mean()
    step = 2j * y.imag * complex(s)
    raw = y + step
    z = raw
    halvings = 0
    while z.imag <= 0.0:
        halvings += 1
        if halvings > _MAX_HALVINGS:  # unreachable for Im(y) > 0: |mean| <= 1
            raise SolverError("step halving failed to restore Im > 0")
        step *= 0.5
        z = y + step
    return z, raw, halvings


def one_step_detailed(batch, start: HalfPlanePoint) -> OneStepResult:
    """One Fisher-scoring update from ``start``, with guard diagnostics.

    The raw update is start + 2 Im(start) i mean((X - start)/(X - conj)); if
    it falls out of the upper half-plane the step is halved until it does not
    (at most two halvings can ever be needed), and the halving count is
    reported.
    """
    batch = SampleBatch.coerce(batch)
    z, raw, halvings = _one_step_raw(batch.values, start.as_complex)
    return OneStepResult(HalfPlanePoint(z.real, z.imag), halvings, raw)


def one_step(batch, start: HalfPlanePoint) -> HalfPlanePoint:
    return one_step_detailed(batch, start).point


def estimate_pipeline(
    gen: Generator, batch, median_adjust: bool = False
) -> HalfPlanePoint:
    """Quasi-arithmetic mean followed by one scoring step."""
    batch = SampleBatch.coerce(batch)
    outcome = (
        qam_estimate_median_adjusted(gen, batch)
        if median_adjust
        else qam_estimate(gen, batch)
    )
    if outcome.is_degenerate:
        raise DegenerateEstimateError(
            f"degenerate initializer: generator {gen} gave Im = {outcome.raw.imag!r}"
        )
    return one_step(batch, outcome.value)


def circular_estimate(
    angles,
    gen: Generator,
    alpha: HalfPlanePoint = _DEFAULT_ALPHA,
    median_adjust: bool = False,
) -> DiskPoint:
    """Estimate the circular-Cauchy parameter from angles in [0, 2 pi).

    Pulls the angles back to the real line through the chart at alpha, runs
    the half-plane pipeline, and pushes the result into the disk.
    """
    angles = AngleBatch.coerce(angles)
    values = real_from_circle_angle(angles.angles, alpha)
    z = estimate_pipeline(gen, SampleBatch(values), median_adjust)
    w = mobius_to_disk(z, alpha)
    assert isinstance(w, DiskPoint)
    return w
