"""Stereographic transport, the periodized Fourier oracle, and the
line-side interpolation deficit."""

import math

import numpy as np
import pytest

from fracsphere.euclid import (EuclidParams, GridField, dirichlet_oracle,
                               eigen_profile, eigen_residual,
                               euclid_eigenvalue, f_star,
                               frac_laplacian_oracle, grid_field, jacobian,
                               pushforward, sphere_area, stereo_angle,
                               stereo_inverse, thm16_coefficients,
                               thm16_deficit, weighted_norm)
from fracsphere.field import ZonalField, lq_norm
from fracsphere.spectrum import derive_params, gamma_sequence


# ---------------------------------------------------------------------------
# geometry


def test_params_validation():
    with pytest.raises(ValueError):
        EuclidParams(2, 0.5)
    with pytest.raises(ValueError):
        EuclidParams(1, 0.0)
    with pytest.raises(ValueError):
        EuclidParams(1, 1.0)
    eu = EuclidParams(1, 0.5, L=30.0, N=2 ** 10)
    assert eu.mu == 0.25
    assert eu.h == pytest.approx(60.0 / 1024)
    assert eu.grid().size == 1024 and eu.grid()[0] == -30.0


def test_stereo_fixed_points():
    # the origin lands on the north pole; |x| = 1 on the equator
    assert stereo_angle(0.0) == 0.0
    assert stereo_angle(1.0) == pytest.approx(0.5 * math.pi, rel=1e-15)
    assert stereo_angle(-1.0) == pytest.approx(-0.5 * math.pi, rel=1e-15)


def test_stereo_roundtrip():
    x = np.linspace(-40.0, 40.0, 501)
    np.testing.assert_allclose(stereo_inverse(stereo_angle(x)), x,
                               rtol=1e-12, atol=1e-14)


def test_jacobian_integrates_to_circle_length():
    assert jacobian(0.0) == 2.0
    eu = EuclidParams(1, 0.5)
    val, _ = weighted_norm(grid_field(jacobian, eu), 1.0)
    assert val == pytest.approx(2.0 * math.pi, rel=1e-9)


def test_sphere_area_values():
    assert sphere_area(1) == pytest.approx(2.0 * math.pi, rel=1e-14)
    assert sphere_area(2) == pytest.approx(4.0 * math.pi, rel=1e-14)


def test_pushforward_of_constant_is_optimizer():
    ps = derive_params(1, 0.5, 3.0)
    x = np.linspace(-20.0, 20.0, 301)
    np.testing.assert_allclose(pushforward(lambda t: np.ones_like(t), ps, x),
                               f_star(0.5, x), rtol=1e-14)
    # at the origin the conformal factor is 2^(1/q*)
    assert pushforward(lambda t: np.ones_like(t), ps, np.array([0.0]))[0] == \
        pytest.approx(2.0 ** (1.0 / ps.q_star), rel=1e-15)


# ---------------------------------------------------------------------------
# explicit diagonalization data


def test_eigenvalue_frozen_values():
    assert euclid_eigenvalue(0.5, 0) == pytest.approx(0.477988797486125, rel=1e-13)
    assert euclid_eigenvalue(0.3, 0) == pytest.approx(0.669593220165936448, rel=1e-13)
    assert euclid_eigenvalue(0.7, 0) == pytest.approx(0.290539530834249745, rel=1e-13)


def test_eigenvalue_ratios_match_sphere_spectrum():
    ps = derive_params(1, 0.5, 3.0)
    lam = np.array([euclid_eigenvalue(0.5, k) for k in range(8)])
    np.testing.assert_allclose(lam / lam[0], gamma_sequence(1, ps.x_crit, 7),
                               rtol=1e-13)


def test_eigen_profile_degree_zero():
    x = np.linspace(-5.0, 5.0, 101)
    np.testing.assert_allclose(eigen_profile(0.5, 0, x),
                               (1.0 + x * x) ** -0.25, rtol=1e-14)


# ---------------------------------------------------------------------------
# Fourier oracle


GAUSS_DIRICHLET = 1.03044851229499558   # 2^(-1/4) Gamma(3/4)
GAUSS_POINT = 0.977741067446923798      # sqrt(2/pi) Gamma(3/4)


@pytest.fixture(scope="module")
def gauss30():
    eu = EuclidParams(1, 0.5, L=30.0, N=2 ** 13)
    return grid_field(lambda x: np.exp(-x * x), eu)


def test_oracle_dirichlet_for_gaussian(gauss30):
    # the |xi|^s cusp caps the grid accuracy near 1e-2 at this window
    assert dirichlet_oracle(gauss30, 0.5) == pytest.approx(GAUSS_DIRICHLET, rel=1e-2)


def test_oracle_pointwise_for_gaussian(gauss30):
    out = frac_laplacian_oracle(gauss30, 0.5)
    i0 = int(np.argmin(np.abs(gauss30.x)))
    assert gauss30.x[i0] == 0.0
    assert out.values[i0] == pytest.approx(GAUSS_POINT, rel=1e-2)


def test_oracle_is_linear(gauss30):
    doubled = GridField(x=gauss30.x, values=2.0 * gauss30.values)
    np.testing.assert_allclose(frac_laplacian_oracle(doubled, 0.5).values,
                               2.0 * frac_laplacian_oracle(gauss30, 0.5).values,
                               rtol=0.0, atol=1e-12)


def test_oracle_small_order_is_mean_free_identity(gauss30):
    # as s -> 0 the multiplier tends to 1 except for the zeroed DC mode
    out = frac_laplacian_oracle(gauss30, 1e-12).values
    np.testing.assert_allclose(out, gauss30.values - gauss30.values.mean(),
                               atol=1e-10)


def test_oracle_refuses_slowly_decaying_input():
    eu = EuclidParams(1, 0.5)
    slow = grid_field(lambda x: f_star(0.5, x), eu)
    with pytest.raises(ValueError, match="decay"):
        frac_laplacian_oracle(slow, 0.5)


def test_oracle_accepts_zero_field():
    eu = EuclidParams(1, 0.5, L=10.0, N=256)
    out = frac_laplacian_oracle(GridField(x=eu.grid(), values=np.zeros(256)), 0.5)
    assert np.all(out.values == 0.0)


# ---------------------------------------------------------------------------
# weighted integrals


def test_weighted_norm_of_bare_profile():
    # int (1+x^2)^(-1/2-... ) dx with q=2, beta=1 is exactly pi
    eu = EuclidParams(1, 0.5)
    gf = grid_field(lambda x: (1.0 + x * x) ** -0.25, eu)
    val, frac = weighted_norm(gf, 2.0, beta=1.0)
    assert val == pytest.approx(math.pi, rel=1e-9)
    assert 0.0 < frac < 0.05


def test_weighted_norm_plain_gaussian():
    eu = EuclidParams(1, 0.5)
    val, frac = weighted_norm(grid_field(lambda x: np.exp(-x * x), eu), 2.0)
    assert val == pytest.approx(math.sqrt(math.pi / 2.0), rel=1e-12)
    assert frac == pytest.approx(0.0, abs=1e-12)


def test_weighted_norm_of_zero_field():
    eu = EuclidParams(1, 0.5, L=10.0, N=256)
    assert weighted_norm(GridField(x=eu.grid(), values=np.zeros(256)), 2.0) == (0.0, 0.0)


def test_critical_norm_transport():
    # int |f|^q* dx = |S^1| ||F||_{q*}^{q*} under the conformal factor
    ps = derive_params(1, 0.5, 3.0)
    eu = EuclidParams(1, 0.5)
    F = lambda th: 1.0 + 0.2 * math.sqrt(2.0) * np.cos(th)
    f = grid_field(lambda x: pushforward(F, ps, x), eu)
    line, _ = weighted_norm(f, ps.q_star)
    circ = sphere_area(1) * lq_norm(ZonalField(1, [1.0, 0.2]), ps.q_star) ** ps.q_star
    assert line == pytest.approx(circ, rel=2e-5)


def test_conformal_dirichlet_invariance():
    # the line Dirichlet integral of a transported band-limited profile
    # equals |S^1|/kappa sum gamma_k c_k^2.  The profile must vanish to
    # second order at the projection pole (F(pi) = F''(pi) = 0), else
    # the transported field decays too slowly for the periodized oracle.
    ps = derive_params(1, 0.5, 3.0)
    c = np.array([-0.1 * math.sqrt(2.0), 0.2, 0.5, 0.2])
    assert abs(c[0] - math.sqrt(2.0) * (c[1] - c[2] + c[3])) < 1e-15
    assert abs(-c[1] + 4.0 * c[2] - 9.0 * c[3]) < 1e-15

    def F(th):
        return c[0] + math.sqrt(2.0) * (c[1] * np.cos(th) + c[2] * np.cos(2 * th)
                                        + c[3] * np.cos(3 * th))

    eu = EuclidParams(1, 0.5, L=240.0, N=2 ** 16)
    f = grid_field(lambda x: pushforward(F, ps, x), eu)
    line = dirichlet_oracle(f, 0.5)
    gam = gamma_sequence(1, ps.x_crit, 3)
    circ = sphere_area(1) / ps.kappa * float((gam * c * c).sum())
    assert line == pytest.approx(circ, rel=1e-3)


# ---------------------------------------------------------------------------
# eigenfunction residual


@pytest.mark.parametrize("s,k", [(0.3, 1), (0.7, 2)])
def test_eigen_residual_small(s, k):
    assert eigen_residual(s, k) <= 1e-3


def test_eigen_residual_decreases_with_resolution():
    coarse = eigen_residual(0.3, 1)
    fine = eigen_residual(0.3, 1, L=120.0, N=2 ** 16)
    assert fine < coarse


def test_eigen_residual_detects_wrong_eigenvalue():
    # sanity: the residual of the true identity sits orders of magnitude
    # below the scale a perturbed eigenvalue would produce
    assert eigen_residual(0.5, 1) < 1e-4


# ---------------------------------------------------------------------------
# two-endpoint deficit on the line


def test_thm16_optimizer_is_equality_case():
    ps = derive_params(1, 0.5, 3.0)
    rep = thm16_deficit(lambda x: f_star(0.5, x), ps)
    assert rep.kind == "line_interpolation"
    assert abs(rep.deficit) <= 1e-10
    assert rep.equality_case
    assert rep.lhs == pytest.approx(3.03352966508339587, rel=1e-12)


def test_thm16_perturbed_field_has_positive_deficit():
    ps = derive_params(1, 0.5, 3.0)
    rep = thm16_deficit(
        lambda x: f_star(0.5, x) * (1.0 + 0.1 * x / (1.0 + x * x)), ps)
    assert rep.deficit > 1e-7
    assert not rep.equality_case


def test_thm16_coefficients_at_entropy_endpoint():
    a, b = thm16_coefficients(derive_params(1, 0.5, 2.0))
    assert a == 0.0 and b == 1.0


def test_thm16_coefficients_sum_rule():
    # at q = q* the weighted term drops out entirely
    ps = derive_params(1, 0.5)
    a, b = thm16_coefficients(ps)
    assert b == 0.0 and a > 0.0


def test_thm16_rejects_exponent_outside_range():
    with pytest.raises(ValueError):
        thm16_deficit(lambda x: f_star(0.5, x), derive_params(1, 0.5, 1.5))
    with pytest.raises(ValueError):
        thm16_deficit(lambda x: f_star(0.5, x), derive_params(1, -0.5, 1.2))
