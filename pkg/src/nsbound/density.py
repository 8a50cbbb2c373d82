"""Brute-force spectral density estimation over the d-torus.

The density of a polynomial p at lambda is the Haar measure of the set
where |p| <= lambda; for a matrix it is the average number of eigenvalues
of the pointwise gram matrix below lambda^2.  Both are estimated by
deterministic quadrature: a midpoint product grid by default, optionally a
rank-1 lattice with a seeded random shift for higher dimensions.

Exactness conventions that the tests rely on:

* Scalar densities normalize by the exact leading coefficient, so the
  float sample set of p and of c*p is literally identical, and thresholds
  are exact rationals rounded down to the nearest float.  The scaling
  identity F(c*p)(lambda) = F(p)(lambda/|c|) then holds at the level of
  integer sample counts.
* A one-term polynomial has constant modulus on the torus, so its density
  is an exact step; no quadrature is performed.
* Counting uses the closed condition (<=) throughout.

Grid evaluation is chunked; per-chunk integer counts are summed in fixed
chunk order, so results are bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .bounds import rescale_lambda
from .matrices import PolyMatrix, determinant
from .poly import GaussianRational, LaurentPoly, ZeroPolynomialError, lead_lex

CHUNK = 1 << 16  # fixed; results must not depend on worker count

JACOBI_MAX_SWEEPS = 30
JACOBI_TOL = 1e-13
EIGENVALUE_CLAMP = 1e-10


class JacobiConvergenceError(RuntimeError):
    """The eigensolver did not converge within the sweep cap."""


class InsufficientDataError(ValueError):
    """Too few usable points for the requested fit."""


@dataclass(frozen=True)
class TorusPoint:
    """A point of the d-torus given by angles, z_j = exp(i*angles[j])."""

    angles: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.angles)


@dataclass(frozen=True)
class TorusGrid:
    """A deterministic quadrature rule for the d-torus with equal weights."""

    dim: int
    scheme: str  # "midpoint" | "lattice-shift"
    total: int
    points_per_dim: int | None = None
    generator: tuple[int, ...] | None = None
    shift: tuple[float, ...] | None = None
    seed: int | None = None

    @staticmethod
    def midpoint(dim: int, n: int) -> TorusGrid:
        """Product of 1-d midpoint rules, n points per dimension."""
        if dim < 1 or n < 1:
            raise ValueError("need dim >= 1 and n >= 1")
        return TorusGrid(dim=dim, scheme="midpoint", total=n**dim, points_per_dim=n)

    @staticmethod
    def lattice(dim: int, total: int, seed: int = 0) -> TorusGrid:
        """Rank-1 Korobov lattice with a seeded random shift."""
        if dim < 1 or total < 1:
            raise ValueError("need dim >= 1 and total >= 1")
        a = max(1, int(total * (math.sqrt(5.0) - 1.0) / 2.0)) | 1
        gen = tuple(pow(a, j, total) if total > 1 else 0 for j in range(dim))
        shift = tuple(np.random.default_rng(seed).random(dim).tolist())
        return TorusGrid(
            dim=dim,
            scheme="lattice-shift",
            total=total,
            generator=gen,
            shift=shift,
            seed=seed,
        )

    @property
    def per_dim_resolution(self) -> float:
        if self.scheme == "midpoint":
            return float(self.points_per_dim)
        return self.total ** (1.0 / self.dim)

    def epsilon_quad(self, c_bnd: float = 4.0) -> float:
        """Declared quadrature tolerance: c_bnd * d / per-dimension resolution."""
        return c_bnd * self.dim / self.per_dim_resolution

    def block_ranges(self, chunk: int = CHUNK) -> list[tuple[int, int]]:
        return [(s, min(s + chunk, self.total)) for s in range(0, self.total, chunk)]

    def angles(self, start: int, stop: int) -> np.ndarray:
        """Angle rows for flat point indices [start, stop)."""
        idx = np.arange(start, stop, dtype=np.int64)
        out = np.empty((idx.size, self.dim), dtype=np.float64)
        if self.scheme == "midpoint":
            n = self.points_per_dim
            step = 2.0 * math.pi / n
            for j in range(self.dim):
                digits = (idx // n**j) % n
                out[:, j] = (digits + 0.5) * step
        else:
            for j in range(self.dim):
                frac = (idx * self.generator[j] % self.total) / self.total + self.shift[j]
                out[:, j] = 2.0 * math.pi * np.mod(frac, 1.0)
        return out


def _map_chunks(grid: TorusGrid, fn: Callable[[int, int], object], workers: int = 1):
    """Apply fn to every block range; results come back in block order."""
    ranges = grid.block_ranges()
    if workers <= 1 or len(ranges) <= 1:
        return [fn(a, b) for a, b in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ab: fn(*ab), ranges))


# -- Hermitian eigenvalues by cyclic Jacobi ---------------------------------


def jacobi_diagonalize(H: np.ndarray) -> np.ndarray:
    """Run cyclic Jacobi on a stack of Hermitian matrices until converged.

    Returns the near-diagonal conjugated stack.  Convergence is per matrix
    (off-diagonal Frobenius norm <= 1e-13 * (1 + |trace|)), and converged
    matrices stop rotating, so each result depends only on its own entries.
    """
    H = np.array(H, dtype=np.complex128, copy=True)
    if H.ndim == 2:
        H = H[None, :, :]
    B, m, m2 = H.shape
    if m != m2:
        raise ValueError("matrices must be square")
    if m == 1:
        return H
    offmask = ~np.eye(m, dtype=bool)
    for _ in range(JACOBI_MAX_SWEEPS):
        off2 = (np.abs(H[:, offmask]) ** 2).sum(axis=1)
        tr = np.abs(np.einsum("bii->b", H).real)
        active = off2 > (JACOBI_TOL * (1.0 + tr)) ** 2
        if not active.any():
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                h = H[:, p, q]
                r = np.abs(h)
                rot = active & (r > 0.0)
                if not rot.any():
                    continue
                a = H[:, p, p].real
                b = H[:, q, q].real
                phase = np.ones(B, dtype=np.complex128)
                np.divide(h, r, out=phase, where=rot)
                tau = np.zeros(B)
                np.divide(b - a, 2.0 * r, out=tau, where=rot)
                with np.errstate(over="ignore"):
                    t = np.sign(tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                t = np.where(tau == 0.0, 1.0, t)
                t = np.where(rot, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                cs = s * np.conj(phase)
                ps = s * phase
                colp = H[:, :, p].copy()
                colq = H[:, :, q].copy()
                H[:, :, p] = c[:, None] * colp - cs[:, None] * colq
                H[:, :, q] = ps[:, None] * colp + c[:, None] * colq
                rowp = H[:, p, :].copy()
                rowq = H[:, q, :].copy()
                H[:, p, :] = c[:, None] * rowp - ps[:, None] * rowq
                H[:, q, :] = cs[:, None] * rowp + c[:, None] * rowq
    else:
        off2 = (np.abs(H[:, offmask]) ** 2).sum(axis=1)
        tr = np.abs(np.einsum("bii->b", H).real)
        if (off2 > (JACOBI_TOL * (1.0 + tr)) ** 2).any():
            raise JacobiConvergenceError(
                f"no convergence after {JACOBI_MAX_SWEEPS} sweeps"
            )
    return H


def hermitian_eigenvalues(H: np.ndarray) -> np.ndarray:
    """Eigenvalues of a stack of Hermitian matrices, sorted ascending."""
    D = jacobi_diagonalize(H)
    return np.sort(np.einsum("bii->bi", D).real, axis=1)


@dataclass(frozen=True)
class HermitianSpectrum:
    """Sorted non-negative eigenvalues of a gram matrix at one torus point."""

    eigenvalues: tuple[float, ...]

    def __post_init__(self):
        vals = self.eigenvalues
        if any(v < -EIGENVALUE_CLAMP for v in vals):
            raise ValueError(f"eigenvalue {min(vals)} is negative beyond tolerance")
        clamped = tuple(0.0 if v < 0.0 else v for v in vals)
        object.__setattr__(self, "eigenvalues", clamped)


def _eval_matrix_block(A: PolyMatrix, angles: np.ndarray) -> np.ndarray:
    """Entrywise evaluation: complex stack of shape (npoints, rows, cols)."""
    B = angles.shape[0]
    out = np.empty((B, A.rows, A.cols), dtype=np.complex128)
    for i in range(A.rows):
        for j in range(A.cols):
            out[:, i, j] = A.entries[i][j].eval_block(angles)
    return out


def _gram_small(values: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Gram stack of size min(rows, cols); same non-zero spectrum either way."""
    if rows <= cols:
        return np.einsum("bik,bjk->bij", values, np.conj(values))
    return np.einsum("bki,bkj->bij", np.conj(values), values)


def gram_spectrum(A: PolyMatrix, point: TorusPoint) -> HermitianSpectrum:
    """Eigenvalues of A(z) A(z)^{*T} (size = number of rows), ascending."""
    angles = np.array([point.angles], dtype=np.float64)
    values = _eval_matrix_block(A, angles)
    gram = np.einsum("bik,bjk->bij", values, np.conj(values))
    eig = hermitian_eigenvalues(gram)[0]
    return HermitianSpectrum(tuple(eig.tolist()))


# -- density curves ---------------------------------------------------------


@dataclass(frozen=True)
class DensityCurve:
    """Quadrature estimates of a spectral density on a lambda grid.

    ``counts[i]`` is the exact integer number of (point, eigenvalue) hits
    at or below ``lambdas[i]``; ``estimates[i] = counts[i] / samples``.
    ``f_zero`` is the analytic value at 0 (never estimated).
    """

    lambdas: tuple[float, ...]
    counts: tuple[int, ...]
    estimates: tuple[float, ...]
    f_zero: int
    samples: int
    subject: str

    def __post_init__(self):
        lam = self.lambdas
        if len(lam) == 0:
            raise ValueError("empty lambda list")
        if any(b < a for a, b in zip(lam, lam[1:])):
            raise ValueError("lambdas must be ascending")
        if any(b < a for a, b in zip(self.counts, self.counts[1:])):
            raise AssertionError("counts must be non-decreasing")


def _check_lambdas(lambdas: Sequence[float]) -> tuple[float, ...]:
    lam = tuple(float(x) for x in lambdas)
    if not lam:
        raise ValueError("empty lambda list")
    if any(x < 0 for x in lam):
        raise ValueError("lambda values must be >= 0")
    if any(b < a for a, b in zip(lam, lam[1:])):
        raise ValueError("lambdas must be ascending")
    return lam


def _float_down(x: Fraction) -> float:
    """Largest double <= x (so float compares reproduce exact comparisons)."""
    try:
        f = float(x)
    except OverflowError:
        return math.inf
    if math.isinf(f):
        return f if f > 0 else -math.inf
    if Fraction(f) > x:
        f = math.nextafter(f, -math.inf)
    return f


def _squared_thresholds(lambdas: Iterable[float], scale2: Fraction) -> np.ndarray:
    """Floats t_i with (samples <= t_i) == (samples <= lambda_i^2 / scale2)."""
    return np.array(
        [_float_down(Fraction(lam) * Fraction(lam) / scale2) for lam in lambdas]
    )


def scalar_density(
    p: LaurentPoly,
    lambdas: Sequence[float],
    grid: TorusGrid,
    workers: int = 1,
) -> DensityCurve:
    """Fraction of the torus where |p| <= lambda, for each lambda.

    One evaluation pass is shared across all thresholds.  The polynomial is
    divided by its exact leading coefficient before evaluation, and the
    thresholds absorb the scale exactly, so densities of p and c*p agree
    count-for-count at corresponding lambdas.
    """
    if p.is_zero():
        raise ZeroPolynomialError("density of the zero polynomial is undefined")
    if grid.dim != p.dim:
        raise ValueError(f"grid dimension {grid.dim} != polynomial dimension {p.dim}")
    lam = _check_lambdas(lambdas)
    from .parsing import format_poly

    subject = format_poly(p)
    lead = lead_lex(p)
    if p.is_monomial():
        # |p| is constant |lead| on the torus: the density is an exact step.
        lead2 = lead.abs2()
        counts = tuple(
            grid.total if Fraction(x) * Fraction(x) >= lead2 else 0 for x in lam
        )
        estimates = tuple(c / grid.total for c in counts)
        return DensityCurve(lam, counts, estimates, 0, grid.total, subject)
    q = p * (GaussianRational(1) / lead)
    thresholds = _squared_thresholds(lam, lead.abs2())

    def count_chunk(start: int, stop: int) -> np.ndarray:
        v = q.eval_block(grid.angles(start, stop))
        f = np.sort(v.real * v.real + v.imag * v.imag)
        return np.searchsorted(f, thresholds, side="right")

    totals = sum(_map_chunks(grid, count_chunk, workers))
    counts = tuple(int(c) for c in totals)
    estimates = tuple(c / grid.total for c in counts)
    return DensityCurve(lam, counts, estimates, 0, grid.total, subject)


def matrix_density(
    A: PolyMatrix,
    k: int,
    lambdas: Sequence[float],
    grid: TorusGrid,
    workers: int = 1,
) -> DensityCurve:
    """Average count of gram eigenvalues <= lambda^2 over the torus.

    The count is taken on the larger of the two gram sides, so it starts at
    max(rows, cols) - rank almost everywhere; only the smaller gram is
    diagonalized and the |rows - cols| exact zero eigenvalues are added as
    a constant.  ``k`` (the maximal non-vanishing minor size) fixes the
    analytic value f_zero = max(rows, cols) - k.
    """
    if grid.dim != A.dim:
        raise ValueError(f"grid dimension {grid.dim} != matrix dimension {A.dim}")
    lam = _check_lambdas(lambdas)
    small = min(A.rows, A.cols)
    extra_zeros = max(A.rows, A.cols) - small
    if not 1 <= k <= small:
        raise ValueError(f"minor size {k} out of range for a {A.rows}x{A.cols} matrix")
    thresholds = _squared_thresholds(lam, Fraction(1))

    def count_chunk(start: int, stop: int) -> np.ndarray:
        values = _eval_matrix_block(A, grid.angles(start, stop))
        eig = hermitian_eigenvalues(_gram_small(values, A.rows, A.cols))
        flat = np.sort(eig.reshape(-1))
        return np.searchsorted(flat, thresholds, side="right")

    totals = sum(_map_chunks(grid, count_chunk, workers))
    counts = tuple(int(c) + extra_zeros * grid.total for c in totals)
    estimates = tuple(c / grid.total for c in counts)
    subject = f"{A.rows}x{A.cols} matrix over {A.dim} variable(s)"
    return DensityCurve(lam, counts, estimates, max(A.rows, A.cols) - k, grid.total, subject)


def op_norm_estimate(A: PolyMatrix, grid: TorusGrid, workers: int = 1) -> float:
    """Max over the grid of the largest singular value: a lower estimate."""
    if grid.dim != A.dim:
        raise ValueError(f"grid dimension {grid.dim} != matrix dimension {A.dim}")

    def max_chunk(start: int, stop: int) -> float:
        values = _eval_matrix_block(A, grid.angles(start, stop))
        eig = hermitian_eigenvalues(_gram_small(values, A.rows, A.cols))
        return float(eig[:, -1].max())

    top = max(_map_chunks(grid, max_chunk, workers))
    return math.sqrt(max(top, 0.0))


# -- inequality checks ------------------------------------------------------


@dataclass(frozen=True)
class InequalityReport:
    """Pointwise comparison of an empirical inequality lhs <= rhs."""

    description: str
    lambdas: tuple[float, ...]
    lhs: tuple[float, ...]
    rhs: tuple[float, ...]
    max_violation: float
    epsilon: float

    @property
    def ok(self) -> bool:
        return self.max_violation <= self.epsilon

    @property
    def worst_lambda(self) -> float:
        gaps = [l - r for l, r in zip(self.lhs, self.rhs)]
        return self.lambdas[gaps.index(max(gaps))]


def product_inequality_check(
    q1: LaurentPoly,
    q2: LaurentPoly,
    s: float,
    lambdas: Sequence[float],
    grid: TorusGrid,
    workers: int = 1,
) -> InequalityReport:
    """Check F(q1*q2)(lam) <= F(q1)(lam^(1-s)) + F(q2)(lam^s) on the grid."""
    if not 0.0 < s < 1.0:
        raise ValueError("s must lie strictly between 0 and 1")
    if q1.is_zero() or q2.is_zero():
        raise ZeroPolynomialError("factors must be non-zero")
    if q1.dim != q2.dim:
        raise ValueError("factors must share the ambient dimension")
    lam = _check_lambdas(lambdas)
    left = scalar_density(q1 * q2, lam, grid, workers)
    right1 = scalar_density(q1, [x ** (1.0 - s) for x in lam], grid, workers)
    right2 = scalar_density(q2, [x**s for x in lam], grid, workers)
    rhs = tuple(a + b for a, b in zip(right1.estimates, right2.estimates))
    gaps = [l - r for l, r in zip(left.estimates, rhs)]
    return InequalityReport(
        description=f"product inequality, s={s}",
        lambdas=lam,
        lhs=left.estimates,
        rhs=rhs,
        max_violation=max(gaps),
        epsilon=grid.epsilon_quad(),
    )


def det_domination_check(
    B: PolyMatrix,
    lambdas: Sequence[float],
    grid: TorusGrid,
    workers: int = 1,
) -> InequalityReport:
    """Check F(B)(lam) <= k * F(det B)((k^2 ||B||_1)^(k-1) lam) on the grid.

    The operator-norm upper bound k^2 ||B||_1 stands in for the true norm,
    which only enlarges the right-hand side's argument.
    """
    if B.rows != B.cols:
        raise ValueError("expected a square matrix")
    k = B.rows
    p = determinant(B)
    if p.is_zero():
        raise ValueError("the determinant vanishes; no domination statement")
    lam = _check_lambdas(lambdas)
    b_l1 = B.l1_norm()
    left = matrix_density(B, k, lam, grid, workers)
    scaled = [rescale_lambda(k, b_l1, x) for x in lam]
    right = scalar_density(p, scaled, grid, workers)
    rhs = tuple(k * r for r in right.estimates)
    gaps = [l - r for l, r in zip(left.estimates, rhs)]
    return InequalityReport(
        description=f"determinant domination, k={k}",
        lambdas=lam,
        lhs=left.estimates,
        rhs=rhs,
        max_violation=max(gaps),
        epsilon=grid.epsilon_quad(),
    )


# -- decay exponent fit -----------------------------------------------------


def alpha_fit(
    curve: DensityCurve, window: tuple[float, float]
) -> tuple[float, float]:
    """Least-squares slope of log(F - f_zero) against log(lambda).

    Only points inside the window with F strictly above f_zero are used; at
    least five are required.  Returns (slope, r_squared).
    """
    lo, hi = window
    xs, ys = [], []
    for lam, est in zip(curve.lambdas, curve.estimates):
        if lo <= lam <= hi and est > curve.f_zero and lam > 0:
            xs.append(math.log(lam))
            ys.append(math.log(est - curve.f_zero))
    if len(xs) < 5:
        raise InsufficientDataError(
            f"only {len(xs)} usable points in [{lo}, {hi}]; need at least 5"
            " (estimates at f_zero carry no decay information)"
        )
    x = np.array(xs)
    y = np.array(ys)
    xm = x - x.mean()
    slope = float((xm @ (y - y.mean())) / (xm @ xm))
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float((resid**2).sum()) / ss_tot
    return slope, r2


def default_fit_window(curve: DensityCurve) -> tuple[float, float]:
    """Lowest two decades of lambda that contain >= 5 usable points."""
    usable = [
        lam
        for lam, est in zip(curve.lambdas, curve.estimates)
        if est > curve.f_zero and lam > 0
    ]
    if len(usable) < 5:
        raise InsufficientDataError(
            f"only {len(usable)} points rise above f_zero = {curve.f_zero};"
            " the resolution is too coarse to see any decay"
        )
    lo = usable[0]
    hi = max(lo * 100.0, usable[4])
    return lo, min(hi, curve.lambdas[-1])
