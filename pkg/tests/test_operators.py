import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from homfrac.funcspace import Box, make_ball_family, sample
from homfrac.kernel import make_kernel
from homfrac.operators import (OperatorParams, ball_oscillations, ball_values, frac_integral,
                               frac_integral_field, frac_maximal, frac_maximal_field,
                               gamma_alpha, hedberg_split_radius, hl_maximal, hl_maximal_field,
                               lattice_box, lattice_points, power_maximal,
                               power_maximal_field, riesz_potential, riesz_potential_field,
                               sharp_maximal, split_terms, unit_ball_volume)

BOX128 = Box.cube(2, 2.0, 128)


def test_gamma_alpha_values():
    assert gamma_alpha(1.0, 2) == pytest.approx(2 * math.pi)
    assert gamma_alpha(1.0, 3) == pytest.approx(2 * math.pi**2)  # 2 pi^1.5 Gamma(1/2)/Gamma(1)
    with pytest.raises(ValueError):
        gamma_alpha(2.0, 2)


def test_unit_ball_volume():
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


def test_params_validation():
    with pytest.raises(ValueError):
        OperatorParams(1.0, shell_count=8)
    with pytest.raises(ValueError):
        OperatorParams(1.0, inner_cutoff=0.0)
    with pytest.raises(ValueError):
        frac_integral(sample("gaussian", BOX128), OperatorParams(2.5), [0, 0])
    with pytest.raises(ValueError, match="outside"):
        frac_integral(sample("gaussian", BOX128), OperatorParams(1.0), [3.0, 0.0])


def test_riesz_of_indicator_at_centre(unit_indicator256):
    assert riesz_potential(unit_indicator256, 1.0, [0.0, 0.0]) == pytest.approx(1.0, rel=2e-3)


def test_riesz_of_indicator_off_centre():
    # (1/2pi) int_0^2pi rho(theta) dtheta, rho the distance from (0.5,0) to the unit circle
    oracle = 0.9342154576676929
    f = sample("ball_indicator", BOX128)
    assert riesz_potential(f, 1.0, [0.5, 0.0]) == pytest.approx(oracle, rel=2e-3)


def test_riesz_of_gaussian_closed_form():
    # (2 pi / gamma) * (1/2) (2 sigma^2)^(alpha/2) Gamma(alpha/2), sigma = 0.3, alpha = 0.5
    oracle = 0.5643998945316085
    f = sample("gaussian", BOX128, sigma=0.3)
    assert riesz_potential(f, 0.5, [0.0, 0.0]) == pytest.approx(oracle, rel=1e-2)


def test_frac_maximal_of_indicator(unit_indicator256):
    v = frac_maximal(unit_indicator256, OperatorParams(1.0), [0.0, 0.0])
    assert v == pytest.approx(math.sqrt(math.pi), rel=5e-3)


def test_hl_maximal_lens_oracle():
    # max over r of area(B(0,1) & B(x,r)) / (pi r^2) at |x| = 3, from the lens-area formula
    oracle = 0.06530649970049708
    f = sample("ball_indicator", Box.cube(2, 4.0, 256))
    assert hl_maximal(f, [3.0, 0.0]) == pytest.approx(oracle, rel=1e-2)
    assert hl_maximal(f, [0.0, 3.0]) == pytest.approx(oracle, rel=1e-2)


def test_hl_maximal_of_constant_is_constant():
    f = sample("constant", Box.cube(2, 2.0, 64), value=2.5)
    # small radii carry a couple of percent lattice fluctuation
    assert hl_maximal(f, [0.0, 0.0]) == pytest.approx(2.5, rel=3e-2)


def test_power_maximal_t1_is_hl(zoo64):
    f = zoo64[7]
    x = [0.1, 0.2]
    assert power_maximal(f, 1, x) == pytest.approx(hl_maximal(f, x), rel=1e-12)
    with pytest.raises(ValueError):
        power_maximal(f, np.inf, x)


def test_power_maximal_monotone_in_t(zoo64):
    f = zoo64[12]
    x = [-0.3, 0.4]
    vals = [power_maximal(f, t, x) for t in (1, 2, 3)]
    assert vals[0] <= vals[1] * (1 + 1e-12) <= vals[2] * (1 + 1e-12)


def test_riesz_of_const_kernel_object_matches_fast_path(zoo64):
    k = make_kernel("const")
    for f in zoo64[::4]:
        a = frac_integral(f, OperatorParams(0.7), [0.2, -0.1])
        b = frac_integral(f, OperatorParams(0.7, k), [0.2, -0.1])
        assert a == pytest.approx(b, rel=1e-10)


def test_field_matches_pointwise(zoo64):
    f = zoo64[3]
    params = OperatorParams(0.5, make_kernel("cos"))
    F = frac_integral_field(f, params, stride=8)
    pts = lattice_points(f.box, 8)
    lb = lattice_box(f.box, 8)
    centres = lb.centers().reshape(-1, 2)
    for k in (0, 13, 37):
        x = f.box.lower + (pts[k] + 0.5) * f.box.h
        assert np.allclose(x, centres[k])
        assert F.values.reshape(-1)[k] == pytest.approx(frac_integral(f, params, x), rel=1e-10)


def test_maximal_fields_match_pointwise(zoo64):
    f = zoo64[11]
    lb = lattice_box(f.box, 8)
    c = lb.centers().reshape(-1, 2)
    M = hl_maximal_field(f, stride=8).values.reshape(-1)
    Ma = frac_maximal_field(f, OperatorParams(0.5), stride=8).values.reshape(-1)
    M2 = power_maximal_field(f, 2, stride=8).values.reshape(-1)
    for k in (2, 20, 50):
        assert M[k] == pytest.approx(hl_maximal(f, c[k]), rel=1e-10)
        assert Ma[k] == pytest.approx(frac_maximal(f, OperatorParams(0.5), c[k]), rel=1e-10)
        assert M2[k] == pytest.approx(power_maximal(f, 2, c[k]), rel=1e-10)


def test_riesz_field_is_scaled_integral(zoo64):
    f = zoo64[0]
    T = frac_integral_field(f, OperatorParams(1.0), 8)
    I = riesz_potential_field(f, 1.0, 8)
    assert np.allclose(I.values * gamma_alpha(1.0, 2), T.values, rtol=1e-12)


@given(a=st.floats(-3, 3), b=st.floats(-3, 3))
def test_linearity(zoo64, a, b):
    f, g = zoo64[5], zoo64[16]
    params = OperatorParams(0.8, make_kernel("sgn-smooth"))
    x = [0.25, -0.5]
    h = f.with_values(a * f.values + b * g.values)
    lhs = frac_integral(h, params, x)
    rhs = a * frac_integral(f, params, x) + b * frac_integral(g, params, x)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@given(alpha=st.floats(0.2, 1.8), c=st.floats(0.1, 5.0))
def test_maximal_positive_homogeneity(zoo64, alpha, c):
    f = zoo64[9]
    p = OperatorParams(alpha, make_kernel("cos"))
    x = [0.1, 0.1]
    assert frac_maximal(f.scaled(-c), p, x) == pytest.approx(c * frac_maximal(f, p, x),
                                                            rel=1e-10)


def test_maximal_dominated_by_absolute_kernel(zoo64):
    f = zoo64[2]
    x = [-0.6, 0.5]
    kernel = make_kernel("cos2")
    a = frac_maximal(f, OperatorParams(0.5, kernel), x)
    b = frac_maximal(f, OperatorParams(0.5, kernel.absolute()), x)
    assert a == pytest.approx(b, rel=1e-12)
    # |Omega| <= 1, so it is at most the constant-kernel value
    assert a <= frac_maximal(f, OperatorParams(0.5), x) * (1 + 1e-12)


def test_split_terms_add_up(zoo64):
    f = zoo64[14]
    params = OperatorParams(0.6)
    x = np.array([0.1, -0.3])
    assert hedberg_split_radius(f, 2.0, 1, x) > 0
    near, far = split_terms(f, params, x, 0.3)
    assert near > 0 and far > 0
    assert near + far == pytest.approx(frac_integral(f.abs(), params, x), rel=1e-10)
    with pytest.raises(ValueError):
        split_terms(f, params, x, 0.0)


def test_oscillation_of_constant_vanishes(box64):
    fam = make_ball_family(box64, 16, 3)
    f = sample("constant", box64, value=3.0)
    assert np.nanmax(ball_oscillations(f, fam)) == pytest.approx(0.0, abs=1e-12)
    assert sharp_maximal(f, fam, [0.0, 0.0]) == pytest.approx(0.0, abs=1e-12)


def test_sharp_maximal_bounded_by_twice_average(zoo64, box64):
    fam = make_ball_family(box64, 8, 4)
    f = zoo64[6]
    osc = ball_oscillations(f, fam)
    for x in ([0.0, 0.0], [0.5, -0.5]):
        inside = np.sum((fam.centers - x) ** 2, axis=1) < fam.radii**2
        avgs = np.array([np.mean(np.abs(w)) for w in ball_values(f, fam)])
        assert sharp_maximal(f, fam, x, osc) <= 2 * np.max(avgs[inside]) + 1e-12
