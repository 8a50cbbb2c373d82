"""Shared generators and fixtures for the test suite."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from nsbound import GaussianRational, LaurentPoly, PolyMatrix, parse_matrix

EXAMPLE_MATRIX_TEXT = "[[z1^3, -1, 1], [2*z1*z2^2 - 16, z2, z1*z2]]"


@pytest.fixture
def example_matrix() -> PolyMatrix:
    return parse_matrix(EXAMPLE_MATRIX_TEXT)


def random_rational(rng: random.Random, bound: int = 9, den: int = 6) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, den))


def random_gaussian(
    rng: random.Random, bound: int = 9, den: int = 6, real_only: bool = False
) -> GaussianRational:
    re = random_rational(rng, bound, den)
    im = Fraction(0) if real_only else random_rational(rng, bound, den)
    return GaussianRational(re, im)


def random_poly(
    rng: random.Random,
    dim: int,
    max_terms: int = 5,
    exp_range: int = 4,
    real_only: bool = False,
    nonzero: bool = True,
) -> LaurentPoly:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exp = tuple(rng.randint(-exp_range, exp_range) for _ in range(dim))
        terms[exp] = random_gaussian(rng, real_only=real_only)
    p = LaurentPoly(dim, terms)
    if nonzero and p.is_zero():
        return LaurentPoly.const(dim, 1) + p
    return p


def arc_measure(r: float, lam: float) -> float:
    """Closed-form density of z - a on the circle, r = |a| > 0.

    The set {phi : |e^{i phi} - r| <= lam} has normalized measure
    arccos((1 + r^2 - lam^2) / (2r)) / pi, clipped to [0, 1].
    """
    x = (1.0 + r * r - lam * lam) / (2.0 * r)
    return math.acos(min(1.0, max(-1.0, x))) / math.pi


def hermitian_2x2_eigs(a: float, b: float, c: complex) -> tuple[float, float]:
    """Closed-form eigenvalues of [[a, c], [conj(c), b]], ascending."""
    mean = 0.5 * (a + b)
    disc = math.sqrt(0.25 * (a - b) ** 2 + abs(c) ** 2)
    return mean - disc, mean + disc
