import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from cauchy_est import DiskPoint, HalfPlanePoint, Sl2Matrix

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=150,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def finite_floats(lo, hi):
    return st.floats(min_value=lo, max_value=hi, allow_nan=False, allow_infinity=False)


@st.composite
def halfplane_points(draw, re_bound=20.0, im_lo=0.05, im_hi=20.0):
    return HalfPlanePoint(
        draw(finite_floats(-re_bound, re_bound)), draw(finite_floats(im_lo, im_hi))
    )


@st.composite
def disk_points(draw, rad_max=0.95):
    r = draw(finite_floats(0.0, rad_max))
    phi = draw(finite_floats(0.0, 2.0 * np.pi))
    return DiskPoint(r * np.cos(phi), r * np.sin(phi))


@st.composite
def sl2_matrices(draw, bound=3.0):
    """Entries a, b, c in [-bound, bound] with |a| bounded away from 0; d is
    solved from the unit determinant."""
    sign = draw(st.sampled_from([-1.0, 1.0]))
    a = sign * draw(finite_floats(0.3, bound))
    b = draw(finite_floats(-bound, bound))
    c = draw(finite_floats(-bound, bound))
    return Sl2Matrix(a, b, c, (1.0 + b * c) / a)


@pytest.fixture
def rng():
    return np.random.default_rng(20250808)
