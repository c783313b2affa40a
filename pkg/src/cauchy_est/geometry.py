"""Parameter geometry for the Cauchy family and its circular counterpart.

The joint location-scale parameter (mu, sigma) of a Cauchy distribution is
carried as the complex number mu + sigma*i in the open upper half-plane.
Circular-Cauchy parameters live in the open unit disk; the two charts are
linked by the Moebius maps ``(z - alpha)/(z - conj(alpha))``.  This module
holds the point types, the Moebius kernel, exact Kullback-Leibler divergences
for both charts, the matching Bahadur rate functions, and the SL(2, R) action
under which the half-plane divergence is invariant.

Everything here is a pure function of its arguments and all values are
immutable, so the module is safe to use from any number of threads.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PullbackPoleError

__all__ = [
    "HalfPlanePoint",
    "DiskPoint",
    "Sl2Matrix",
    "mobius_kernel",
    "mobius_kernel_upper",
    "kl_halfplane",
    "kl_circular",
    "bahadur_rate",
    "bahadur_rate_circular",
    "mobius_to_disk",
    "mobius_to_halfplane",
    "mobius_derivative",
    "sl2_act",
    "maximal_invariant",
    "log_density",
    "circular_log_density",
    "circle_angle_from_real",
    "real_from_circle_angle",
]

# Construction floors.  Divisions by Im(theta) and by 1 - |w|^2 appear all
# over the estimators, so points are kept strictly away from the boundary at
# float granularity.
MIN_SCALE = 1e-300
DISK_MARGIN = 1e-12
_SL2_DET_TOL = 1e-12

_TWO_PI = 2.0 * math.pi
_LOG_PI = math.log(math.pi)


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True, slots=True)
class HalfPlanePoint:
    """A point mu + sigma*i of the open upper half-plane.

    ``re`` is the location and ``im`` the (strictly positive) scale, both in
    sample units.
    """

    re: float
    im: float

    def __post_init__(self) -> None:
        _require_finite("HalfPlanePoint coordinates", self.re, self.im)
        if not self.im >= MIN_SCALE:
            raise DomainError(
                f"HalfPlanePoint needs im >= {MIN_SCALE:g}, got {self.im!r}"
            )

    @classmethod
    def from_complex(cls, z: complex) -> "HalfPlanePoint":
        return cls(z.real, z.imag)

    @property
    def as_complex(self) -> complex:
        return complex(self.re, self.im)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True, slots=True)
class DiskPoint:
    """A circular-Cauchy parameter in the open unit disk."""

    re: float
    im: float

    def __post_init__(self) -> None:
        _require_finite("DiskPoint coordinates", self.re, self.im)
        if not self.re * self.re + self.im * self.im <= 1.0 - DISK_MARGIN:
            raise DomainError(
                f"DiskPoint needs |w|^2 <= 1 - {DISK_MARGIN:g}, "
                f"got {complex(self.re, self.im)!r}"
            )

    @classmethod
    def from_complex(cls, w: complex) -> "DiskPoint":
        return cls(w.real, w.imag)

    @property
    def as_complex(self) -> complex:
        return complex(self.re, self.im)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    @property
    def radius(self) -> float:
        return abs(complex(self.re, self.im))


@dataclass(frozen=True, slots=True)
class Sl2Matrix:
    """A real 2x2 matrix with determinant one.

    Construction accepts any matrix with positive determinant and rescales it
    onto SL(2, R); a non-positive determinant is rejected because it cannot
    be normalized inside the group.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        _require_finite("Sl2Matrix entries", self.a, self.b, self.c, self.d)
        det = self.a * self.d - self.b * self.c
        if det <= 0.0:
            raise DomainError(f"Sl2Matrix needs a*d - b*c > 0, got det={det!r}")
        scale = math.sqrt(det)
        if abs(det - 1.0) > _SL2_DET_TOL:
            object.__setattr__(self, "a", self.a / scale)
            object.__setattr__(self, "b", self.b / scale)
            object.__setattr__(self, "c", self.c / scale)
            object.__setattr__(self, "d", self.d / scale)
        det = self.a * self.d - self.b * self.c
        if abs(det - 1.0) > 1e-9:
            raise DomainError(f"Sl2Matrix normalization failed, det={det!r}")

    @classmethod
    def identity(cls) -> "Sl2Matrix":
        return cls(1.0, 0.0, 0.0, 1.0)

    def compose(self, other: "Sl2Matrix") -> "Sl2Matrix":
        """Matrix product self @ other."""
        return Sl2Matrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )


def mobius_kernel(x: float, t: HalfPlanePoint) -> complex:
    """Evaluate (x - t)/(x - conj(t)) for a real observation x.

    The result always lies on the unit circle because x is equidistant from
    t and its conjugate.  The denominator cannot vanish since Im(t) > 0.
    """
    _require_finite("observation", x)
    tc = t.as_complex
    return (x - tc) / (x - tc.conjugate())


def mobius_kernel_upper(z: complex, t: HalfPlanePoint) -> complex:
    """The same kernel evaluated at a complex first argument with Im(z) >= 0.

    For z in the open upper half-plane the value lies in the open unit disk;
    for real z it falls back to the unit-circle case.
    """
    z = complex(z)
    _require_finite("first argument", z.real, z.imag)
    if z.imag < 0.0:
        raise DomainError(f"first argument must satisfy Im(z) >= 0, got {z!r}")
    tc = t.as_complex
    denom = z - tc.conjugate()
    if denom == 0:  # unreachable for Im(z) >= 0, guarded anyway
        raise DomainError("kernel pole: z equals conj(t)")
    return (z - tc) / denom


def maximal_invariant(gamma: HalfPlanePoint, theta: HalfPlanePoint) -> float:
    """|gamma - theta|^2 / (4 Im(gamma) Im(theta)).

    This is the quantity preserved when both points are moved by the same
    SL(2, R) element, and the half-plane KL divergence is log(1 + its value).
    """
    dre = gamma.re - theta.re
    dim = gamma.im - theta.im
    return (dre * dre + dim * dim) / (4.0 * gamma.im * theta.im)


def kl_halfplane(from_: HalfPlanePoint, to: HalfPlanePoint) -> float:
    """Kullback-Leibler divergence between two Cauchy laws, in closed form.

    ``from_`` carries the distribution the expectation is taken under.  The
    value is symmetric in its arguments and vanishes iff they coincide.
    log1p keeps full precision when the points are very close.
    """
    return math.log1p(maximal_invariant(from_, to))


def kl_circular(from_: DiskPoint, to: DiskPoint) -> float:
    """KL divergence between two circular Cauchy laws.

    Equals the half-plane divergence of the pulled-back parameters for every
    choice of the Moebius chart.
    """
    d2 = (from_.re - to.re) ** 2 + (from_.im - to.im) ** 2
    g1 = 1.0 - (from_.re**2 + from_.im**2)
    g2 = 1.0 - (to.re**2 + to.im**2)
    return math.log1p(d2 / (g1 * g2))


def bahadur_rate(eps: float, theta: HalfPlanePoint) -> float:
    """Optimal exponential decay rate for tail probabilities at radius eps.

    Closed form log(1 + eps^2 / (4 sigma (sigma + eps))): the infimum of the
    KL divergence over alternatives farther than eps.  Depends on theta only
    through its scale.
    """
    if not eps > 0.0:
        raise DomainError(f"eps must be positive, got {eps!r}")
    s = theta.im
    return math.log1p(eps * eps / (4.0 * s * (s + eps)))


def bahadur_rate_circular(eps: float, w: DiskPoint) -> float:
    """Tail-rate function for the circular chart, defined for eps < 1 - |w|."""
    r = w.radius
    if not 0.0 < eps < 1.0 - r:
        raise DomainError(
            f"eps must lie in (0, 1 - |w|) = (0, {1.0 - r:g}), got {eps!r}"
        )
    g = 1.0 - r * r
    return math.log1p(eps * eps / (g * (1.0 - (r + eps) ** 2)))


def mobius_to_disk(
    z: HalfPlanePoint | float, alpha: HalfPlanePoint
) -> DiskPoint | complex:
    """Map the half-plane chart into the disk chart through center alpha.

    Interior points return a DiskPoint; a boundary real returns the bare
    complex image on the unit circle.
    """
    if isinstance(z, HalfPlanePoint):
        return DiskPoint.from_complex(mobius_kernel_upper(z.as_complex, alpha))
    return mobius_kernel(float(z), alpha)


def mobius_to_halfplane(w: DiskPoint, alpha: HalfPlanePoint) -> HalfPlanePoint:
    """Inverse disk-to-half-plane chart: (alpha - conj(alpha) w)/(1 - w)."""
    wc = w.as_complex
    ac = alpha.as_complex
    return HalfPlanePoint.from_complex((ac - ac.conjugate() * wc) / (1.0 - wc))


def mobius_derivative(z: complex, alpha: HalfPlanePoint) -> complex:
    """Complex derivative of the half-plane-to-disk map at z."""
    ac = alpha.as_complex
    return (ac - ac.conjugate()) / (complex(z) - ac.conjugate()) ** 2


def sl2_act(A: Sl2Matrix, z: HalfPlanePoint) -> HalfPlanePoint:
    """Fractional-linear action (a z + b)/(c z + d) on the upper half-plane."""
    zc = z.as_complex
    return HalfPlanePoint.from_complex((A.a * zc + A.b) / (A.c * zc + A.d))


def log_density(x: float, theta: HalfPlanePoint) -> float:
    """Log of the Cauchy density (sigma/pi) / ((x - mu)^2 + sigma^2)."""
    _require_finite("observation", x)
    dx = x - theta.re
    return math.log(theta.im) - _LOG_PI - math.log(dx * dx + theta.im * theta.im)


def circular_log_density(angle: float, w: DiskPoint) -> float:
    """Log density of the circular Cauchy law on [0, 2 pi)."""
    if not 0.0 <= angle < _TWO_PI:
        raise DomainError(f"angle must lie in [0, 2 pi), got {angle!r}")
    g = 1.0 - (w.re**2 + w.im**2)
    d = cmath.exp(1j * angle) - w.as_complex
    return math.log(g) - math.log(_TWO_PI) - math.log(d.real**2 + d.imag**2)


def circle_angle_from_real(x, alpha: HalfPlanePoint):
    """Angle in [0, 2 pi) of the unit-circle image of a real observation.

    Accepts scalars or arrays.  The image of x is (u - bi)/(u + bi) with
    u = x - Re(alpha), b = Im(alpha), whose argument is -2 atan2(b, u).
    """
    u = np.asarray(x, dtype=float) - alpha.re
    angle = np.mod(-2.0 * np.arctan2(alpha.im, u), _TWO_PI)
    # Rounding can land exactly on 2 pi for huge |x|; keep the half-open range.
    angle = np.minimum(angle, np.nextafter(_TWO_PI, 0.0))
    if np.ndim(x) == 0:
        return float(angle)
    return angle


def real_from_circle_angle(angle, alpha: HalfPlanePoint):
    """Pull a unit-circle angle back to the real boundary of the half-plane.

    The pullback of exp(i angle) is Re(alpha) - Im(alpha) * cot(angle / 2);
    angle 0 is the pole of the chart and is rejected.
    """
    a = np.asarray(angle, dtype=float)
    if np.any(a < 0.0) or np.any(a >= _TWO_PI):
        raise DomainError("angles must lie in [0, 2 pi)")
    if np.any(a == 0.0):
        raise PullbackPoleError("angle 0 maps to the pole of the pullback")
    x = alpha.re - alpha.im / np.tan(0.5 * a)
    if np.ndim(angle) == 0:
        return float(x)
    return x
