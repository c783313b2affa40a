"""Reproducible sampling from Cauchy and circular Cauchy distributions.

Draws go through the inverse CDF applied to a counter-based uniform stream
(Philox keyed by ``(base_seed, stream_index)``), so every replication owns a
statistically independent substream and the full mapping from seed to sample
batch is a pure function.  Identical seeds give bit-identical batches no
matter how many workers consume them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import (
    DiskPoint,
    HalfPlanePoint,
    circle_angle_from_real,
    mobius_to_halfplane,
)

__all__ = [
    "SeedSpec",
    "SampleBatch",
    "AngleBatch",
    "cauchy_quantile",
    "cauchy_cdf",
    "sample_cauchy",
    "sample_circular",
]

_TWO_PI = 2.0 * math.pi
_U64 = 2**64

# The uniform stream is clamped into [2^-64, 1 - 2^-53] before the quantile
# map so tan() can never be fed the poles at u in {0, 1}.
_U_LO = 2.0**-64
_U_HI = 1.0 - 2.0**-53

_DEFAULT_ALPHA = HalfPlanePoint(0.0, 1.0)


@dataclass(frozen=True, slots=True)
class SeedSpec:
    """Identifies one uniform substream.

    Distinct (base_seed, stream_index) pairs yield independent streams; the
    stream content depends on nothing else.
    """

    base_seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        for name, v in (("base_seed", self.base_seed), ("stream_index", self.stream_index)):
            if not isinstance(v, int) or not 0 <= v < _U64:
                raise DomainError(f"{name} must be an integer in [0, 2^64), got {v!r}")

    def rng(self) -> np.random.Generator:
        key = np.array([self.base_seed, self.stream_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def _frozen(values: np.ndarray) -> np.ndarray:
    out = np.asarray(values, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, slots=True)
class SampleBatch:
    """An ordered, immutable batch of real observations."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.atleast_1d(np.asarray(self.values, dtype=float))
        if v.ndim != 1 or v.size < 1:
            raise DomainError("SampleBatch needs a non-empty 1-d sequence")
        if not np.all(np.isfinite(v)):
            raise DomainError("SampleBatch values must all be finite")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n

    @classmethod
    def coerce(cls, data) -> "SampleBatch":
        return data if isinstance(data, cls) else cls(np.asarray(data, dtype=float))


@dataclass(frozen=True, slots=True)
class AngleBatch:
    """An ordered, immutable batch of circle angles in [0, 2 pi)."""

    angles: np.ndarray

    def __post_init__(self) -> None:
        a = np.atleast_1d(np.asarray(self.angles, dtype=float))
        if a.ndim != 1 or a.size < 1:
            raise DomainError("AngleBatch needs a non-empty 1-d sequence")
        if not np.all(np.isfinite(a)) or np.any(a < 0.0) or np.any(a >= _TWO_PI):
            raise DomainError("AngleBatch angles must lie in [0, 2 pi)")
        object.__setattr__(self, "angles", _frozen(a))

    @property
    def n(self) -> int:
        return int(self.angles.size)

    def __len__(self) -> int:
        return self.n

    @classmethod
    def coerce(cls, data) -> "AngleBatch":
        return data if isinstance(data, cls) else cls(np.asarray(data, dtype=float))


def cauchy_quantile(u, theta: HalfPlanePoint):
    """Inverse CDF mu + sigma tan(pi (u - 1/2)); strictly increasing on (0, 1)."""
    arr = np.asarray(u, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("quantile argument must lie strictly in (0, 1)")
    x = theta.re + theta.im * np.tan(np.pi * (arr - 0.5))
    return float(x) if np.ndim(u) == 0 else x


def cauchy_cdf(x, theta: HalfPlanePoint):
    """CDF 1/2 + arctan((x - mu)/sigma)/pi."""
    arr = np.asarray(x, dtype=float)
    u = 0.5 + np.arctan((arr - theta.re) / theta.im) / np.pi
    return float(u) if np.ndim(x) == 0 else u


def _draw_cauchy_values(n: int, theta: HalfPlanePoint, seed: SeedSpec) -> np.ndarray:
    u = seed.rng().random(n)
    np.maximum(u, _U_LO, out=u)
    np.minimum(u, _U_HI, out=u)
    return theta.re + theta.im * np.tan(np.pi * (u - 0.5))


def sample_cauchy(n: int, theta: HalfPlanePoint, seed: SeedSpec) -> SampleBatch:
    """n i.i.d. Cauchy(theta) draws, deterministic in the seed."""
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    return SampleBatch(_draw_cauchy_values(n, theta, seed))


def sample_circular(
    n: int,
    w: DiskPoint,
    seed: SeedSpec,
    alpha: HalfPlanePoint = _DEFAULT_ALPHA,
) -> AngleBatch:
    """n i.i.d. circular-Cauchy(w) angles in [0, 2 pi).

    Draws a Cauchy sample at the pulled-back parameter and pushes it onto the
    circle; the resulting law does not depend on the chart center alpha.
    """
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    theta = mobius_to_halfplane(w, alpha)
    values = _draw_cauchy_values(n, theta, seed)
    return AngleBatch(circle_angle_from_real(values, alpha))


def _cauchy_rows(
    n: int, theta: HalfPlanePoint, base_seed: int, lo: int, hi: int
) -> np.ndarray:
    """Rows lo..hi-1 of the replication matrix: row r is stream r's batch."""
    out = np.empty((hi - lo, n), dtype=float)
    for i, r in enumerate(range(lo, hi)):
        out[i] = _draw_cauchy_values(n, theta, SeedSpec(base_seed, r))
    return out
