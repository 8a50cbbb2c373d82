"""Explicit spectral density bounds and Novikov-Shubin lower bounds.

Everything here is closed-form arithmetic on the invariants produced by the
polynomial and matrix layers: the universal constant ``8*sqrt(3)/sqrt(47)``,
the matrix bound

    C * k * d * wd * (k^(2k-2) * b1^(k-1) * lambda / |lead|)^(1/(d*wd)),

its scalar specialization, the step description when the width vanishes
(the determinant is then a single monomial), and the search over variable
orderings and minors for the best certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

from .matrices import (
    DEFAULT_MINOR_CAP,
    MinorCertificate,
    PolyMatrix,
    ZeroMatrixError,
    iter_nonvanishing_minors,
    max_nonvanishing_minor,
)
from .poly import LaurentPoly, WidthProfile, width_profile

#: 8*sqrt(3)/sqrt(47) = sqrt(192/47), approximately 2.0211646105596452.
SPECTRAL_CONSTANT = 8.0 * math.sqrt(3.0) / math.sqrt(47.0)

#: Marker for "the spectral density is a step; the decay exponent is not finite".
INFINITE_TYPE = "infinite-type"

MAX_EXHAUSTIVE_DIM = 8


def ns_lower_bound(d: int, wd: int) -> float | str:
    """Lower bound 1/(d*wd) for the decay exponent, or the step marker."""
    if d < 1 or wd < 0:
        raise ValueError("need d >= 1 and wd >= 0")
    if wd == 0:
        return INFINITE_TYPE
    return 1.0 / (d * wd)


def rescale_lambda(k: int, b_l1: float, lam: float) -> float:
    """(k^2 * b_l1)^(k-1) * lam: the argument change from matrix to scalar."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return (k * k * b_l1) ** (k - 1) * lam


def scalar_bound(d: int, wd: int, lead_abs: float, lam: float) -> float:
    """C * d * wd * (lam/lead_abs)^(1/(d*wd)); requires wd >= 1."""
    if wd < 1:
        raise ValueError("scalar_bound needs wd >= 1; use step_bound for wd = 0")
    if lead_abs <= 0:
        raise ValueError("lead_abs must be positive")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    return SPECTRAL_CONSTANT * d * wd * (lam / lead_abs) ** (1.0 / (d * wd))


def step_bound(lead_abs: float, lam: float) -> int:
    """Width-zero case: 0 below the leading modulus, 1 at or above it."""
    return 0 if lam < lead_abs else 1


@dataclass(frozen=True)
class BoundParameters:
    """The constants entering the matrix bound."""

    k: int
    d: int
    wd: int
    lead_abs: float
    b_l1: float
    constant: float = SPECTRAL_CONSTANT

    def __post_init__(self):
        if self.k < 1 or self.d < 1 or self.wd < 0:
            raise ValueError("need k >= 1, d >= 1, wd >= 0")
        if self.lead_abs <= 0 or self.b_l1 < 0:
            raise ValueError("need lead_abs > 0 and b_l1 >= 0")


def matrix_bound(params: BoundParameters, lam: float) -> float:
    """The full matrix bound at lambda; monotone in lambda, zero at zero."""
    p = params
    if p.wd < 1:
        raise ValueError("matrix_bound needs wd >= 1; use step_bound for wd = 0")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    inner = (p.k ** (2 * p.k - 2)) * (p.b_l1 ** (p.k - 1)) * lam / p.lead_abs
    return p.constant * p.k * p.d * p.wd * inner ** (1.0 / (p.d * p.wd))


def bound_coefficient(params: BoundParameters) -> float:
    """Prefactor so that matrix_bound(lam) = coefficient * lam^(1/(d*wd))."""
    p = params
    if p.wd < 1:
        raise ValueError("no power-law coefficient in the step case")
    inner = (p.k ** (2 * p.k - 2)) * (p.b_l1 ** (p.k - 1)) / p.lead_abs
    return p.constant * p.k * p.d * p.wd * inner ** (1.0 / (p.d * p.wd))


def _lead_abs_down(profile: WidthProfile) -> float:
    """|lead| as a float rounded down one ulp (it sits in a denominator)."""
    f = math.sqrt(float(profile.lead.abs2()))
    if f == 0.0:
        raise OverflowError("leading coefficient modulus underflows to zero")
    return math.nextafter(f, 0.0)


def best_ordering(p: LaurentPoly, mode: str = "fixed") -> WidthProfile:
    """Width profile under the identity ordering, or the best over all d!.

    In exhaustive mode the profile minimizing d*wd (equivalently maximizing
    the decay-exponent lower bound) wins; ties prefer the larger |lead|,
    then the lexicographically smallest permutation.
    """
    if mode not in ("fixed", "exhaustive"):
        raise ValueError(f"unknown ordering mode {mode!r}")
    if mode == "fixed" or p.dim <= 1:
        return width_profile(p)
    if p.dim > MAX_EXHAUSTIVE_DIM:
        raise ValueError(
            f"exhaustive ordering search is limited to {MAX_EXHAUSTIVE_DIM} variables"
        )
    best = None
    for order in permutations(range(p.dim)):
        prof = width_profile(p, order)
        if best is None:
            best = prof
            continue
        if prof.wd < best.wd:
            best = prof
        elif prof.wd == best.wd and prof.lead.abs2() > best.lead.abs2():
            best = prof
    return best


@dataclass(frozen=True)
class AnalyzeOptions:
    ordering_mode: str = "fixed"  # fixed | exhaustive
    minor_mode: str = "first"  # first | best
    minor_cap: int = DEFAULT_MINOR_CAP


@dataclass(frozen=True)
class BoundReport:
    """Everything the analysis produced, kept for auditability.

    For ``wd >= 1`` the bound is ``coefficient * lambda^exponent``; the raw
    formula value is preserved even where it exceeds the trivial ceiling
    ``k`` (use :meth:`display_bound_at` for the clipped version).  For
    ``wd == 0`` the determinant's density is a step at ``step_threshold``
    and the matrix-level guarantee is a step at ``step_threshold_matrix``
    (the threshold shrinks through the norm rescaling when k > 1).
    """

    rows: int
    cols: int
    dim: int
    minor: MinorCertificate
    profile: WidthProfile
    params: BoundParameters
    is_step: bool
    coefficient: float | None
    exponent: float | None
    alpha_lower: float | str
    step_threshold: float | None
    step_threshold_matrix: float | None
    ordering_mode: str
    minor_mode: str

    @property
    def k(self) -> int:
        return self.minor.size

    @property
    def f_zero(self) -> int:
        """Analytic density at 0: max(rows, cols) - k."""
        return max(self.rows, self.cols) - self.minor.size

    def bound_at(self, lam: float) -> float:
        if self.is_step:
            return 0.0 if lam < self.step_threshold_matrix else float(self.k)
        return self.coefficient * lam**self.exponent

    def display_bound_at(self, lam: float) -> float:
        return min(self.bound_at(lam), float(self.k))


def _report_for(
    A: PolyMatrix, cert: MinorCertificate, profile: WidthProfile, opts: AnalyzeOptions
) -> BoundReport:
    lead_abs = _lead_abs_down(profile)
    params = BoundParameters(
        k=cert.size, d=A.dim, wd=profile.wd, lead_abs=lead_abs, b_l1=cert.b_l1
    )
    if profile.wd == 0:
        rescale = rescale_lambda(cert.size, cert.b_l1, 1.0)
        return BoundReport(
            rows=A.rows,
            cols=A.cols,
            dim=A.dim,
            minor=cert,
            profile=profile,
            params=params,
            is_step=True,
            coefficient=None,
            exponent=None,
            alpha_lower=INFINITE_TYPE,
            step_threshold=lead_abs,
            step_threshold_matrix=lead_abs / rescale,
            ordering_mode=opts.ordering_mode,
            minor_mode=opts.minor_mode,
        )
    return BoundReport(
        rows=A.rows,
        cols=A.cols,
        dim=A.dim,
        minor=cert,
        profile=profile,
        params=params,
        is_step=False,
        coefficient=bound_coefficient(params),
        exponent=1.0 / (A.dim * profile.wd),
        alpha_lower=ns_lower_bound(A.dim, profile.wd),
        step_threshold=None,
        step_threshold_matrix=None,
        ordering_mode=opts.ordering_mode,
        minor_mode=opts.minor_mode,
    )


def _report_quality(r: BoundReport) -> tuple:
    """Sort key: larger is better, deterministic."""
    if r.is_step:
        return (1, r.step_threshold_matrix, 0.0)
    return (0, r.alpha_lower, -r.coefficient)


def analyze(A: PolyMatrix, options: AnalyzeOptions | None = None) -> BoundReport:
    """Full pipeline: maximal minor, ordering search, bound construction.

    With minor_mode="first" the lexicographically first maximal minor is
    used; with "best" every maximal-size minor is tried and the report with
    the best decay guarantee (largest alpha lower bound, then smallest
    coefficient) wins.  The zero matrix is rejected.
    """
    opts = options or AnalyzeOptions()
    if A.is_zero():
        raise ZeroMatrixError("cannot analyze the zero matrix")
    first = max_nonvanishing_minor(A, opts.minor_cap)
    if opts.minor_mode == "first":
        certs = [first]
    elif opts.minor_mode == "best":
        certs = list(iter_nonvanishing_minors(A, first.size, opts.minor_cap))
    else:
        raise ValueError(f"unknown minor mode {opts.minor_mode!r}")
    best = None
    for cert in certs:
        profile = best_ordering(cert.det, opts.ordering_mode)
        report = _report_for(A, cert, profile, opts)
        if best is None or _report_quality(report) > _report_quality(best):
            best = report
    return best
