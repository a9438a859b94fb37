import math

import numpy as np
import pytest

from hgauge.bgg import (
    QuadratureConfig,
    bgg_eval,
    compare_cloud,
    csch_weight,
    fundamental_solution_closed,
    fundamental_solution_quad,
    modulus_integral,
    modulus_integral_quad,
    phase_correction_quad,
    phase_quadratic,
    pole_imag_mean_sq,
    real_part_integral,
    real_part_integral_quad,
    solution_constant,
)
from hgauge.group import GroupParams, Point, dilate
from hgauge.norm import norm_N

CFG = QuadratureConfig()


def _admissible_triples(rng, m):
    """Random (a, b, t) with b <= a <= 2b, the range the quadratics take."""
    b = rng.uniform(0.2, 4.0, m)
    a = b * rng.uniform(1.0, 2.0, m)
    t = rng.uniform(-6.0, 6.0, m)
    return a, b, t


# -- weight function ----------------------------------------------------------


def test_csch_weight_limit_at_zero():
    for n in (2, 3, 6):
        assert csch_weight(1e-12, n) == pytest.approx(1.0, rel=1e-9)


def test_csch_weight_direct_formula():
    # direct evaluation is stable at moderate tau; both branches must agree
    for n in (2, 3, 5):
        for tau in (0.5, 1.0, 5.0, 20.0):
            direct = (tau**n / 2.0) / math.sinh(tau / 2.0) / math.sinh(tau) ** (n - 1)
            assert csch_weight(tau, n) == pytest.approx(direct, rel=1e-12)


def test_csch_weight_branch_continuity():
    # series branch below 1e-5, log branch above 30
    for n in (2, 4):
        lo, hi = 9.9e-6, 1.01e-5
        assert csch_weight(lo, n) == pytest.approx(csch_weight(hi, n), rel=1e-9)
        lo, hi = 29.99, 30.01
        ratio = csch_weight(lo, n) / csch_weight(hi, n)
        assert 1.0 < ratio < 1.2  # decreasing, no jump


def test_csch_weight_extreme_tau_no_overflow():
    v = csch_weight(700.0, 8)
    assert v == 0.0 or (np.isfinite(v) and v >= 0.0)


def test_phase_quadratic_validates_inputs():
    with pytest.raises(ValueError):
        phase_quadratic(1.0, 2.0, 0.0, 1.0)  # a < b violates b <= a
    with pytest.raises(ValueError):
        phase_quadratic(5.0, 2.0, 0.0, 1.0)  # a > 2b


# -- closed forms vs quadrature ------------------------------------------------


def test_modulus_integral_closed_vs_quad():
    rng = np.random.default_rng(7)
    a, b, t = _admissible_triples(rng, 25)
    for ai, bi, ti in zip(a, b, t):
        closed = modulus_integral(ai, bi, ti)
        quad = modulus_integral_quad(ai, bi, ti, CFG)
        assert closed == pytest.approx(quad, rel=1e-9)


def test_real_part_identity():
    # the full integral splits as modulus part minus phase correction
    rng = np.random.default_rng(8)
    a, b, t = _admissible_triples(rng, 25)
    for ai, bi, ti in zip(a, b, t):
        whole = real_part_integral_quad(ai, bi, ti, CFG)
        split = modulus_integral(ai, bi, ti) - phase_correction_quad(ai, bi, ti, CFG)
        assert whole == pytest.approx(split, rel=1e-6)
        assert whole == pytest.approx(real_part_integral(ai, bi, ti), rel=1e-6)


def test_phase_correction_is_time_derivative():
    # correction = -t * d/dt (modulus integral)
    rng = np.random.default_rng(9)
    a, b, t = _admissible_triples(rng, 15)
    for ai, bi, ti in zip(a, b, t):
        h = 1e-5 * max(1.0, abs(ti))
        der = (modulus_integral(ai, bi, ti + h) - modulus_integral(ai, bi, ti - h)) / (2 * h)
        want = -ti * der
        got = phase_correction_quad(ai, bi, ti, CFG)
        assert got == pytest.approx(want, rel=1e-5, abs=1e-10)


def test_pole_mean_against_root_oracle():
    # the closed form equals the squared mean of the two upper-half-plane
    # root imaginary parts of the modulus quartic
    rng = np.random.default_rng(10)
    a, b, t = _admissible_triples(rng, 40)
    for ai, bi, ti in zip(a, b, t):
        quartic = [ai**2, 0.0, 4 * ai * bi + 4 * ti**2, 0.0, 4 * bi**2 + 4 * ti**2]
        roots = np.roots(quartic)
        upper = np.sort(roots.imag[roots.imag > 0])
        assert upper.size == 2
        # all four roots sit on the imaginary axis
        assert np.max(np.abs(roots.real)) < 1e-8 * np.max(np.abs(roots.imag))
        want = float(np.mean(upper)) ** 2
        assert pole_imag_mean_sq(ai, bi, ti) == pytest.approx(want, rel=1e-10)


# -- fundamental solution ------------------------------------------------------


def test_solution_constant_values():
    assert solution_constant(2) == pytest.approx(1.0 / (32.0 * math.pi), rel=1e-15)
    assert solution_constant(3) == pytest.approx(3.0 / (128.0 * math.pi**2), rel=1e-15)
    # recursion K_{n+1} = K_n * (2n - 1) / (4 pi)
    for n in range(2, 9):
        assert solution_constant(n + 1) == pytest.approx(
            solution_constant(n) * (2 * n - 1) / (4.0 * math.pi), rel=1e-14
        )


@pytest.mark.parametrize("n", [2, 3, 4])
def test_quadrature_matches_closed_form(n):
    params = GroupParams(n)
    rng = np.random.default_rng(20 + n)
    for _ in range(8):
        x = rng.uniform(-2, 2, 2 * n)
        t = rng.uniform(-4, 4)
        p = Point(x, t)
        u_quad = fundamental_solution_quad(p, params, CFG)
        u_closed = fundamental_solution_closed(p, params)
        assert u_quad == pytest.approx(u_closed, rel=1e-10)


def test_solution_times_gauge_power_is_constant():
    for n in (2, 3, 6):
        params = GroupParams(n)
        rng = np.random.default_rng(30 + n)
        k = solution_constant(n)
        for _ in range(20):
            p = Point(rng.uniform(-3, 3, 2 * n), rng.uniform(-6, 6))
            u = fundamental_solution_closed(p, params)
            nn = norm_N(p, params)
            assert u * nn ** (2 * n) == pytest.approx(k, rel=1e-13)


def test_solution_homogeneity():
    params = GroupParams(3)
    p = Point(np.array([1.0, -0.5, 0.3, 0.2, 1.1, -0.7]), 0.9)
    lam = 2.5
    u1 = fundamental_solution_closed(p, params)
    u2 = fundamental_solution_closed(dilate(lam, p), params)
    assert u2 == pytest.approx(u1 * lam ** (-2 * 3), rel=1e-12)


def test_bgg_eval_bundle():
    params = GroupParams(2)
    p = Point(np.array([1.0, 0.4, -0.2, 0.6]), 1.2)
    ev = bgg_eval(p, params, CFG)
    assert ev.quad == pytest.approx(ev.closed, rel=1e-9)
    assert ev.core_modulus > 0
    assert ev.pole_imag_mean_sq > 0


def test_compare_cloud_summary():
    params = GroupParams(2)
    out = compare_cloud(params, 30, seed=4, cfg=CFG)
    assert out["points"] == 30
    assert out["max_rel_err"] < 1e-8
    assert out["mean_rel_err"] <= out["max_rel_err"]
    assert len(out["worst_point"]) == 5
