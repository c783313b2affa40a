import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy.integrate import quad

from cauchy_est import (
    DiskPoint,
    DomainError,
    HalfPlanePoint,
    PullbackPoleError,
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
from conftest import disk_points, finite_floats, halfplane_points, sl2_matrices
from _oracles import bahadur_circular_grid_infimum, bahadur_grid_infimum, kl_quadrature

I = HalfPlanePoint(0.0, 1.0)


class TestPointTypes:
    def test_halfplane_rejects_boundary_and_nonfinite(self):
        with pytest.raises(DomainError):
            HalfPlanePoint(0.0, 0.0)
        with pytest.raises(DomainError):
            HalfPlanePoint(0.0, -1.0)
        with pytest.raises(DomainError):
            HalfPlanePoint(math.inf, 1.0)
        with pytest.raises(DomainError):
            HalfPlanePoint(0.0, math.nan)
        assert HalfPlanePoint(0.0, 1e-300).im == 1e-300

    def test_disk_rejects_rim(self):
        with pytest.raises(DomainError):
            DiskPoint(1.0, 0.0)
        with pytest.raises(DomainError):
            DiskPoint(0.8, 0.7)
        assert DiskPoint(0.999, 0.0).radius == pytest.approx(0.999)

    def test_sl2_normalizes_positive_determinant(self):
        A = Sl2Matrix(2.0, 0.0, 0.0, 2.0)
        assert A.a == pytest.approx(1.0) and A.d == pytest.approx(1.0)
        assert abs(A.a * A.d - A.b * A.c - 1.0) < 1e-12
        with pytest.raises(DomainError):
            Sl2Matrix(1.0, 0.0, 0.0, -1.0)


class TestMobiusKernel:
    def test_hand_values(self):
        assert mobius_kernel(0.0, I) == pytest.approx(-1.0)
        assert mobius_kernel(1.0, I) == pytest.approx(-1j)

    @given(finite_floats(-1e6, 1e6), halfplane_points())
    def test_unit_modulus(self, x, t):
        assert abs(abs(mobius_kernel(x, t)) - 1.0) < 1e-12

    def test_upper_extension_hand_values(self):
        assert mobius_kernel_upper(2j, I) == pytest.approx(1.0 / 3.0)
        assert mobius_kernel_upper(1j, HalfPlanePoint(0.0, 2.0)) == pytest.approx(-1.0 / 3.0)
        assert mobius_kernel_upper(I.as_complex, I) == 0.0

    def test_upper_extension_rejects_lower_half_plane(self):
        with pytest.raises(DomainError):
            mobius_kernel_upper(1.0 - 1e-9j, I)

    @given(halfplane_points(), halfplane_points())
    def test_upper_extension_maps_into_disk(self, z, t):
        assert abs(mobius_kernel_upper(z.as_complex, t)) < 1.0

    @given(
        finite_floats(-50.0, 50.0),
        halfplane_points(),
        finite_floats(0.0, 2.0 * math.pi),
        finite_floats(0.0, 0.25),
    )
    def test_perturbation_bound(self, x, t, phi, frac):
        # |h(x,s) - h(x,t)| <= 2|s-t|/Im(t) whenever |s-t| <= Im(t)/4
        delta = frac * t.im * cmath.exp(1j * phi)
        s = t.as_complex + delta
        assume(s.imag > 1e-12)
        sp = HalfPlanePoint(s.real, s.imag)
        lhs = abs(mobius_kernel(x, sp) - mobius_kernel(x, t))
        assert lhs <= 2.0 * abs(delta) / t.im + 1e-12


class TestKlHalfplane:
    def test_identity_and_hand_values(self):
        assert kl_halfplane(I, I) == 0.0
        assert kl_halfplane(HalfPlanePoint(0.0, 2.0), I) == pytest.approx(math.log(9 / 8))
        assert kl_halfplane(HalfPlanePoint(1.0, 1.0), I) == pytest.approx(math.log(5 / 4))

    def test_matches_quadrature_oracle(self):
        pairs = [
            (HalfPlanePoint(0.0, 2.0), I),
            (HalfPlanePoint(1.0, 1.0), I),
            (HalfPlanePoint(-3.0, 0.5), HalfPlanePoint(2.0, 4.0)),
        ]
        for a, b in pairs:
            assert kl_halfplane(a, b) == pytest.approx(kl_quadrature(a, b), abs=1e-9)

    @given(halfplane_points(), halfplane_points())
    def test_symmetric_nonnegative(self, a, b):
        k1 = kl_halfplane(a, b)
        k2 = kl_halfplane(b, a)
        assert k1 >= 0.0
        assert abs(k1 - k2) <= 1e-12 * max(1.0, k1)

    @given(halfplane_points(), halfplane_points())
    def test_positive_for_distinct(self, a, b):
        assume(abs(a.as_complex - b.as_complex) > 1e-6)
        assert kl_halfplane(a, b) > 0.0

    @given(
        halfplane_points(re_bound=10.0, im_lo=0.1, im_hi=10.0),
        halfplane_points(re_bound=10.0, im_lo=0.1, im_hi=10.0),
        sl2_matrices(),
    )
    def test_sl2_invariance(self, a, b, A):
        lhs = kl_halfplane(sl2_act(A, a), sl2_act(A, b))
        assert lhs == pytest.approx(kl_halfplane(a, b), abs=1e-10, rel=1e-9)


class TestSl2Action:
    def test_identity_and_scaling(self):
        z = HalfPlanePoint(0.3, 0.7)
        out = sl2_act(Sl2Matrix.identity(), z)
        assert out == z
        assert sl2_act(Sl2Matrix(2.0, 0.0, 0.0, 0.5), I).as_complex == pytest.approx(4j)

    @given(
        halfplane_points(re_bound=5.0, im_lo=0.2, im_hi=5.0),
        sl2_matrices(),
        sl2_matrices(),
    )
    def test_group_action_composition(self, z, A, B):
        lhs = sl2_act(A.compose(B), z).as_complex
        rhs = sl2_act(A, sl2_act(B, z)).as_complex
        assert lhs == pytest.approx(rhs, abs=1e-10, rel=1e-9)


class TestMaximalInvariant:
    def test_hand_values(self):
        assert maximal_invariant(I, I) == 0.0
        assert maximal_invariant(HalfPlanePoint(0.0, 2.0), I) == pytest.approx(1 / 8)
        chi = maximal_invariant(HalfPlanePoint(0.0, 4.0), HalfPlanePoint(0.0, 2.0))
        assert chi == pytest.approx(1 / 8)

    @given(halfplane_points(), halfplane_points())
    def test_kl_is_log1p_of_invariant(self, a, b):
        assert kl_halfplane(a, b) == pytest.approx(
            math.log1p(maximal_invariant(a, b)), rel=1e-12
        )


class TestBahadurRate:
    def test_rejects_bad_eps(self):
        with pytest.raises(DomainError):
            bahadur_rate(0.0, I)
        with pytest.raises(DomainError):
            bahadur_rate(-1.0, I)

    def test_small_eps_order(self):
        theta = HalfPlanePoint(0.0, 2.0)
        eps = 1e-6
        assert bahadur_rate(eps, theta) / eps**2 == pytest.approx(1.0 / 16.0, rel=1e-4)

    def test_location_free_and_value(self):
        assert bahadur_rate(1.0, I) == pytest.approx(math.log(9 / 8))
        assert bahadur_rate(1.0, HalfPlanePoint(10.0, 1.0)) == bahadur_rate(1.0, I)

    @given(finite_floats(0.05, 3.0), finite_floats(0.1, 3.0))
    def test_strictly_increasing_in_eps(self, eps, sigma):
        theta = HalfPlanePoint(0.0, sigma)
        assert bahadur_rate(eps + 0.01, theta) > bahadur_rate(eps, theta)

    @pytest.mark.parametrize(
        "eps,theta",
        [
            (0.5, I),
            (1.0, I),
            (0.3, HalfPlanePoint(2.0, 0.5)),
            (2.0, HalfPlanePoint(0.0, 3.0)),
        ],
    )
    def test_grid_infimum_oracle(self, eps, theta):
        assert eps <= theta.im
        assert bahadur_rate(eps, theta) == pytest.approx(
            bahadur_grid_infimum(eps, theta), abs=1e-6
        )


class TestCircularChart:
    def test_kl_circular_hand_values(self):
        zero = DiskPoint(0.0, 0.0)
        assert kl_circular(zero, zero) == 0.0
        assert kl_circular(zero, DiskPoint(0.5, 0.0)) == pytest.approx(math.log(4 / 3))

    @given(
        halfplane_points(re_bound=5.0, im_lo=0.2, im_hi=5.0),
        halfplane_points(re_bound=5.0, im_lo=0.2, im_hi=5.0),
        halfplane_points(re_bound=5.0, im_lo=0.2, im_hi=5.0),
    )
    def test_kl_pushforward_identity(self, z1, z2, alpha):
        w1 = mobius_to_disk(z1, alpha)
        w2 = mobius_to_disk(z2, alpha)
        assume(isinstance(w1, DiskPoint) and isinstance(w2, DiskPoint))
        assert kl_circular(w1, w2) == pytest.approx(
            kl_halfplane(z1, z2), abs=1e-10, rel=1e-9
        )

    def test_rate_domain_and_value(self):
        zero = DiskPoint(0.0, 0.0)
        assert bahadur_rate_circular(0.5, zero) == pytest.approx(math.log(4 / 3))
        with pytest.raises(DomainError):
            bahadur_rate_circular(1.0, zero)
        with pytest.raises(DomainError):
            bahadur_rate_circular(0.5, DiskPoint(0.5, 0.0))
        with pytest.raises(DomainError):
            bahadur_rate_circular(0.0, zero)

    def test_rate_small_eps_order(self):
        w = DiskPoint(0.0, 0.0)
        eps = 1e-6
        assert bahadur_rate_circular(eps, w) / eps**2 == pytest.approx(1.0, rel=1e-4)

    def test_rate_matches_grid_infimum_at_center(self):
        zero = DiskPoint(0.0, 0.0)
        assert bahadur_rate_circular(0.5, zero) == pytest.approx(
            bahadur_circular_grid_infimum(0.5, zero), abs=1e-6
        )

    def test_chart_hand_values_and_round_trip(self):
        assert mobius_to_disk(I, I).as_complex == 0.0
        assert mobius_to_disk(HalfPlanePoint(0.0, 2.0), I).as_complex == pytest.approx(1 / 3)
        assert mobius_to_halfplane(DiskPoint(0.0, 0.0), I).as_complex == pytest.approx(1j)
        assert mobius_to_halfplane(DiskPoint(1 / 3, 0.0), I).as_complex == pytest.approx(2j)
        boundary = mobius_to_disk(3.5, I)
        assert isinstance(boundary, complex)
        assert abs(abs(boundary) - 1.0) < 1e-12

    @given(halfplane_points(re_bound=5.0, im_lo=0.1, im_hi=5.0), halfplane_points())
    def test_round_trip(self, z, alpha):
        w = mobius_to_disk(z, alpha)
        assume(isinstance(w, DiskPoint))
        back = mobius_to_halfplane(w, alpha)
        assert back.as_complex == pytest.approx(z.as_complex, abs=1e-12, rel=1e-10)

    @given(disk_points(), halfplane_points(re_bound=5.0, im_lo=0.2, im_hi=5.0))
    def test_variance_gauge_identity(self, w, alpha):
        # 4 Im(phi^-1(w))^2 |phi'(phi^-1(w))|^2 = (1 - |w|^2)^2
        z = mobius_to_halfplane(w, alpha)
        lhs = 4.0 * z.im**2 * abs(mobius_derivative(z.as_complex, alpha)) ** 2
        rhs = (1.0 - abs(w.as_complex) ** 2) ** 2
        assert lhs == pytest.approx(rhs, abs=1e-10, rel=1e-9)


class TestDensities:
    def test_log_density_hand_values(self):
        assert log_density(0.0, I) == pytest.approx(-math.log(math.pi))
        assert log_density(1.0, I) == pytest.approx(-math.log(2.0 * math.pi))

    @pytest.mark.parametrize("theta", [I, HalfPlanePoint(3.0, 0.5), HalfPlanePoint(-2.0, 7.0)])
    def test_density_normalizes(self, theta):
        total, _ = quad(
            lambda x: math.exp(log_density(x, theta)), -np.inf, np.inf, limit=200
        )
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_circular_log_density_hand_values(self):
        zero = DiskPoint(0.0, 0.0)
        for angle in (0.0, 1.0, 3.0, 6.28):
            assert circular_log_density(angle, zero) == pytest.approx(
                -math.log(2.0 * math.pi)
            )
        assert circular_log_density(0.0, DiskPoint(0.5, 0.0)) == pytest.approx(
            math.log(3.0 / (2.0 * math.pi))
        )
        with pytest.raises(DomainError):
            circular_log_density(-0.1, zero)
        with pytest.raises(DomainError):
            circular_log_density(2.0 * math.pi, zero)

    @pytest.mark.parametrize("w", [DiskPoint(0.0, 0.0), DiskPoint(0.5, 0.0), DiskPoint(-0.3, 0.6)])
    def test_circular_density_normalizes(self, w):
        total, _ = quad(
            lambda a: math.exp(circular_log_density(a, w)),
            0.0,
            2.0 * math.pi,
            limit=200,
        )
        assert total == pytest.approx(1.0, abs=1e-8)


class TestBoundaryTransport:
    @given(finite_floats(-100.0, 100.0), halfplane_points(re_bound=5.0, im_lo=0.2, im_hi=5.0))
    def test_real_angle_round_trip(self, x, alpha):
        angle = circle_angle_from_real(x, alpha)
        assert 0.0 <= angle < 2.0 * math.pi
        back = real_from_circle_angle(angle, alpha)
        assert back == pytest.approx(x, abs=1e-9, rel=1e-9)

    def test_pullback_pole(self):
        with pytest.raises(PullbackPoleError):
            real_from_circle_angle(0.0, I)
        with pytest.raises(DomainError):
            real_from_circle_angle(-1.0, I)
