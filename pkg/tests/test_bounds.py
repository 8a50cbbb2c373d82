"""Bound engine: the universal constant, bound formulas, ordering search."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from nsbound import (
    INFINITE_TYPE,
    SPECTRAL_CONSTANT,
    AnalyzeOptions,
    BoundParameters,
    GaussianRational,
    LaurentPoly,
    analyze,
    best_ordering,
    bound_coefficient,
    matrix_bound,
    ns_lower_bound,
    parse_matrix,
    parse_poly,
    rescale_lambda,
    scalar_bound,
    step_bound,
)
from nsbound.matrices import ZeroMatrixError

from conftest import random_poly


def test_constant_squared_relation():
    assert SPECTRAL_CONSTANT**2 * 47 == pytest.approx(192.0, rel=1e-12)
    # eight-digit enclosure of 8*sqrt(3)/sqrt(47)
    assert 2.0211645 <= SPECTRAL_CONSTANT <= 2.0211647


def test_cosine_chord_inequality():
    # (47/48) x^2 <= 2 - 2 cos(x) on [-1/2, 1/2], the estimate the constant
    # rests on; checked densely
    x = np.linspace(-0.5, 0.5, 100001)
    assert np.all(47.0 / 48.0 * x * x <= 2.0 - 2.0 * np.cos(x))


def test_matrix_bound_example_coefficient():
    params = BoundParameters(k=2, d=2, wd=2, lead_abs=2.0, b_l1=18.0)
    coeff = bound_coefficient(params)
    assert coeff == pytest.approx(192.0 * math.sqrt(2.0) / math.sqrt(47.0), rel=1e-12)
    lam = 0.37
    assert matrix_bound(params, lam) == pytest.approx(coeff * lam**0.25, rel=1e-12)


def test_matrix_bound_zero_at_zero():
    params = BoundParameters(k=3, d=2, wd=4, lead_abs=1.5, b_l1=7.0)
    assert matrix_bound(params, 0.0) == 0.0


def test_matrix_bound_trivial_prefactor():
    params = BoundParameters(k=1, d=1, wd=1, lead_abs=1.0, b_l1=123.0)
    assert matrix_bound(params, 1.0) == pytest.approx(SPECTRAL_CONSTANT, rel=1e-12)


def test_matrix_bound_monotone_in_lambda():
    params = BoundParameters(k=2, d=3, wd=2, lead_abs=0.7, b_l1=3.0)
    lams = np.linspace(0, 5, 200)
    vals = [matrix_bound(params, x) for x in lams]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_matrix_bound_rejects_step_case():
    params = BoundParameters(k=1, d=1, wd=0, lead_abs=1.0, b_l1=1.0)
    with pytest.raises(ValueError):
        matrix_bound(params, 1.0)


def test_step_bound_clauses():
    assert step_bound(5.0, 4.9) == 0
    assert step_bound(5.0, 5.0) == 1
    assert step_bound(1.0, 0.0) == 0


def test_scalar_bound_linear_case():
    lam = 0.8
    assert scalar_bound(1, 1, 1.0, lam) == pytest.approx(
        SPECTRAL_CONSTANT * lam, rel=1e-12
    )


def test_scalar_bound_power_case():
    for r in (1, 2, 3, 5):
        lam = 0.3
        assert scalar_bound(1, r, 1.0, lam) == pytest.approx(
            SPECTRAL_CONSTANT * r * lam ** (1.0 / r), rel=1e-12
        )


def test_scalar_bound_at_lead():
    assert scalar_bound(2, 3, 0.42, 0.42) == pytest.approx(
        SPECTRAL_CONSTANT * 6, rel=1e-12
    )


def test_scalar_is_matrix_with_k_one():
    rng = random.Random(4)
    for _ in range(200):
        d = rng.randint(1, 4)
        wd = rng.randint(1, 6)
        lead = rng.uniform(0.1, 10)
        lam = rng.uniform(0, 5)
        params = BoundParameters(k=1, d=d, wd=wd, lead_abs=lead, b_l1=rng.uniform(0, 9))
        assert matrix_bound(params, lam) == pytest.approx(
            scalar_bound(d, wd, lead, lam), rel=1e-12
        )


def test_ns_lower_bound_values():
    assert ns_lower_bound(2, 2) == 0.25
    assert ns_lower_bound(1, 1) == 1.0
    assert ns_lower_bound(3, 0) == INFINITE_TYPE


def test_rescale_lambda_values():
    assert rescale_lambda(1, 99.0, 0.7) == 0.7
    assert rescale_lambda(2, 18.0, 1.3) == pytest.approx(72 * 1.3, rel=1e-15)
    assert rescale_lambda(2, 1.0, 1.0) == 4.0


def test_matrix_bound_is_rescaled_scalar_bound():
    rng = random.Random(42)
    for _ in range(1000):
        k = rng.randint(1, 5)
        d = rng.randint(1, 4)
        wd = rng.randint(1, 6)
        lead = rng.uniform(1e-3, 100)
        b1 = rng.uniform(1e-3, 50)
        lam = rng.uniform(0, 10)
        params = BoundParameters(k=k, d=d, wd=wd, lead_abs=lead, b_l1=b1)
        expected = k * scalar_bound(d, wd, lead, rescale_lambda(k, b1, lam))
        assert matrix_bound(params, lam) == pytest.approx(expected, rel=1e-12)


def test_coefficient_scaling_covariance():
    # multiplying the polynomial by c scales lead_abs by |c| and leaves the
    # exponent untouched
    p = parse_poly("z1^3*z2 + 2*z1*z2^2 - 16")
    A1 = parse_matrix("[[z1^3*z2 + 2*z1*z2^2 - 16]]")
    A2 = parse_matrix("[[3*z1^3*z2 + 6*z1*z2^2 - 48]]")
    r1 = analyze(A1)
    r2 = analyze(A2)
    assert r1.exponent == r2.exponent
    assert r1.params.wd == r2.params.wd
    assert r2.params.lead_abs == pytest.approx(3 * r1.params.lead_abs, rel=1e-12)


# -- ordering search -----------------------------------------------------------


def test_best_ordering_example_poly():
    p = parse_poly("z1^3*z2 + 2*z1*z2^2 - 16")
    prof = best_ordering(p, "exhaustive")
    assert prof.order == (0, 1)
    assert prof.wd == 2


def test_best_ordering_monomial():
    p = parse_poly("7*z1^2*z2^-3")
    for mode in ("fixed", "exhaustive"):
        assert best_ordering(p, mode).wd == 0


def test_best_ordering_single_variable():
    p = parse_poly("z1^2 - z1^-1")
    prof = best_ordering(p, "exhaustive")
    assert prof.order == (0,)
    assert prof.wd == 3


def test_best_ordering_never_worse_than_fixed():
    rng = random.Random(17)
    for _ in range(100):
        p = random_poly(rng, rng.randint(1, 3), max_terms=6, exp_range=3)
        fixed = best_ordering(p, "fixed")
        ex = best_ordering(p, "exhaustive")
        assert ex.wd <= fixed.wd


def test_best_ordering_dimension_cap():
    p = LaurentPoly.const(9, 1) + LaurentPoly.variable(9, 0)
    with pytest.raises(ValueError):
        best_ordering(p, "exhaustive")


# -- analyze -----------------------------------------------------------------


def test_analyze_example(example_matrix):
    rep = analyze(example_matrix)
    assert rep.k == 2
    assert rep.params.wd == 2
    assert rep.params.b_l1 == 18.0
    assert rep.params.lead_abs == pytest.approx(2.0, rel=1e-12)
    assert rep.coefficient == pytest.approx(
        192 * math.sqrt(2) / math.sqrt(47), rel=1e-12
    )
    assert rep.exponent == 0.25
    assert rep.alpha_lower == 0.25
    assert rep.f_zero == 1
    assert not rep.is_step


def test_analyze_monomial_1x1_is_step():
    rep = analyze(parse_matrix("[[(0 - 3i)*z1^4]]"))
    assert rep.is_step
    assert rep.alpha_lower == INFINITE_TYPE
    assert rep.step_threshold == pytest.approx(3.0, rel=1e-12)
    # k = 1: the matrix-level threshold coincides with the scalar one
    assert rep.step_threshold_matrix == rep.step_threshold
    assert rep.bound_at(2.9) == 0.0
    assert rep.bound_at(3.1) == 1.0


def test_analyze_identity_2x2_step():
    rep = analyze(parse_matrix("[[1, 0], [0, 1]]"))
    assert rep.k == 2
    assert rep.minor.det == LaurentPoly.const(1, 1)
    assert rep.params.wd == 0
    assert rep.is_step
    assert rep.step_threshold == pytest.approx(1.0, rel=1e-12)
    # the guarantee for the full matrix goes through the norm rescaling
    assert rep.step_threshold_matrix == pytest.approx(0.25, rel=1e-12)


def test_analyze_zero_matrix_rejected():
    with pytest.raises(ZeroMatrixError):
        analyze(parse_matrix("[[0, 0], [0, 0]]"))


def test_analyze_best_minor_not_worse(example_matrix):
    first = analyze(example_matrix, AnalyzeOptions(minor_mode="first"))
    best = analyze(example_matrix, AnalyzeOptions(minor_mode="best"))
    both_fine = not first.is_step and not best.is_step
    assert both_fine
    assert best.alpha_lower >= first.alpha_lower
    if best.alpha_lower == first.alpha_lower:
        assert best.coefficient <= first.coefficient


def test_analyze_exhaustive_ordering_not_worse():
    A = parse_matrix("[[z1^5*z2 + z1^4, 0], [0, 1]]")
    fixed = analyze(A, AnalyzeOptions(ordering_mode="fixed"))
    ex = analyze(A, AnalyzeOptions(ordering_mode="exhaustive"))
    assert ex.params.wd <= fixed.params.wd


def test_display_bound_clipped(example_matrix):
    rep = analyze(example_matrix)
    assert rep.bound_at(1.0) > rep.k
    assert rep.display_bound_at(1.0) == rep.k
    assert rep.display_bound_at(1e-9) == rep.bound_at(1e-9)
