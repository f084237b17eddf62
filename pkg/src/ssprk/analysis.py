"""Radius of absolute monotonicity and optimal convex representations.

The radius R of a method with extended matrix M is the largest r >= 0 such
that alpha_r = (I + rM)^{-1} e and Lambda_r = r (I + rM)^{-1} M are both
entrywise nonnegative.  From a feasible r one can build a canonical
representation (Lambda, Gamma) whose entrywise ratio min lambda/gamma equals
the certified step-size amplification factor, and apply row transformations
that preserve the method while sparsifying Gamma to its first subdiagonal.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    InfeasibleRadius,
    NegativeCoefficients,
    NotAbsolutelyMonotonic,
    NotCanonical,
    SingularSystem,
    ZeroPivot,
)
from .tableau import STRUCTURAL_TOL, ShuOsherForm, solve_unit_lower

# Entrywise nonnegativity slack absorbing round-off from the triangular
# solves.  Round-off at these dimensions is ~1e-14; anything much looser
# biases the bisection boundary upward by slack divided by the binding
# entry's slope (as small as 1/s for the first order family).
FEASIBILITY_SLACK = 1e-12
DEFAULT_BISECTION_TOL = 1e-12


class SaturatedRadius(UserWarning):
    """Bisection bracket was feasible at its upper end; result equals r_max."""


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the nonnegativity test at one trial radius."""

    r: float
    feasible: bool
    alpha_r: np.ndarray
    lambda_r: np.ndarray
    min_entry: float


def monotonicity_feasible(
    m: np.ndarray, r: float, tol: float = FEASIBILITY_SLACK
) -> FeasibilityReport:
    """Evaluate alpha_r and Lambda_r by forward substitution and test >= -tol."""
    if r < 0:
        raise InfeasibleRadius("trial radius must be nonnegative")
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if np.abs(np.diag(m) * r).max(initial=0.0) >= 1.0:
        # cannot occur for strictly lower triangular input; kept for defensive
        # completeness with general lower triangular matrices
        raise SingularSystem("a diagonal pivot of (I + r M) vanishes")
    alpha = solve_unit_lower(r * m, np.ones(n))
    lam = solve_unit_lower(r * m, r * m)
    min_entry = float(min(alpha.min(), lam.min()))
    return FeasibilityReport(
        r=float(r),
        feasible=min_entry >= -tol,
        alpha_r=alpha,
        lambda_r=lam,
        min_entry=min_entry,
    )


def radius_absolute_monotonicity(
    m: np.ndarray,
    r_max: float | None = None,
    bis_tol: float = DEFAULT_BISECTION_TOL,
    feas_tol: float = FEASIBILITY_SLACK,
) -> float:
    """Largest feasible radius, by bisection on [0, r_max].

    The feasible set is an interval [0, R]; bisection localizes R to within
    ``bis_tol`` and the returned value is certified by a final feasibility
    check at R - 1e-9.  If the method is still feasible at ``r_max``
    (default 2s) the bracket is saturated: r_max is returned with a warning.
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if r_max is None:
        r_max = 2.0 * (n - 1)
    if np.tril(m, k=-1).min(initial=0.0) < -feas_tol:
        raise NotAbsolutelyMonotonic(
            "matrix has negative entries; infeasible for every r > 0"
        )
    if monotonicity_feasible(m, r_max, feas_tol).feasible:
        warnings.warn(
            f"feasible at r_max={r_max:g}; radius saturated at the bracket end",
            SaturatedRadius,
            stacklevel=2,
        )
        return float(r_max)
    lo, hi = 0.0, float(r_max)
    while hi - lo > bis_tol:
        mid = 0.5 * (lo + hi)
        if monotonicity_feasible(m, mid, feas_tol).feasible:
            lo = mid
        else:
            hi = mid
    if not monotonicity_feasible(m, max(lo - 1e-9, 0.0), feas_tol).feasible:
        raise NotAbsolutelyMonotonic(
            f"certification failed just below computed radius {lo!r}"
        )
    return lo


def representation_ssp_coefficient(
    f: ShuOsherForm, tol: float = STRUCTURAL_TOL
) -> float:
    """min over entries with gamma > tol of lambda/gamma; +inf when Gamma = 0.

    Both matrices must be entrywise nonnegative (within ``tol``); negative
    lambda round-off within the tolerance is clamped to zero so entries with
    vanishing lambda contribute 0, never a negative ratio.
    """
    lam, gam = f.lam, f.gam
    if lam.min() < -tol or gam.min() < -tol:
        raise NegativeCoefficients(
            "representation has negative entries beyond tolerance"
        )
    mask = gam > tol
    if not mask.any():
        return math.inf
    ratios = np.maximum(lam[mask], 0.0) / gam[mask]
    return float(ratios.min())


def canonical_optimal_representation(m: np.ndarray, r: float) -> ShuOsherForm:
    """Canonical form built from Lambda_r and Gamma_r = Lambda_r / r.

    The weights alpha_r on the input state are folded into the first column of
    Lambda for rows >= 2 (stage 1 just copies the input), which makes the form
    canonical without changing the method.
    """
    if r <= 0:
        raise InfeasibleRadius("canonical construction needs r > 0")
    report = monotonicity_feasible(m, r)
    if not report.feasible:
        raise InfeasibleRadius(
            f"radius {r!r} infeasible (min entry {report.min_entry:.3e})"
        )
    gam = report.lambda_r / r
    lam = report.lambda_r.copy()
    lam[1:, 0] += report.alpha_r[1:]
    return ShuOsherForm(lam=lam, gam=gam)


def invariance_transform(f: ShuOsherForm, i: int, j: int, t: float) -> ShuOsherForm:
    """Add t times row j to row i of both matrices, compensating in lambda_ij.

    Indices are 1-based row/column numbers with 1 < j < i <= s+1.  The
    reconstructed Butcher tableau is unchanged for any t.
    """
    n = f.lam.shape[0]
    if not (1 < j < i <= n):
        raise IndexError(f"need 1 < j < i <= {n}, got i={i}, j={j}")
    lam = f.lam.copy()
    gam = f.gam.copy()
    ii, jj = i - 1, j - 1
    gam[ii, :] += t * gam[jj, :]
    lam_ij = lam[ii, jj]
    lam[ii, :] += t * lam[jj, :]
    lam[ii, jj] = lam_ij - t
    return ShuOsherForm(lam=lam, gam=gam)


def sparsify_gamma(f: ShuOsherForm, tol: float = STRUCTURAL_TOL) -> ShuOsherForm:
    """Eliminate all Gamma entries below the first subdiagonal.

    Columns are processed left to right with the subdiagonal pivot
    gamma_{j+1,j}; rows top to bottom within a column, so the output is
    deterministic.  Requires a canonical input form.
    """
    if not f.is_canonical():
        raise NotCanonical("sparsification requires a canonical representation")
    out = f
    n = f.lam.shape[0]
    for j in range(1, n - 1):  # 1-based column index
        pivot = out.gam[j, j - 1]
        for i in range(j + 2, n + 1):  # 1-based row index
            g = out.gam[i - 1, j - 1]
            if abs(g) <= tol:
                continue
            if abs(pivot) <= tol:
                raise ZeroPivot(
                    f"gamma_{j + 1}{j} vanishes but gamma_{i}{j} = {g!r} does not"
                )
            out = invariance_transform(out, i, j + 1, -g / pivot)
            gam = out.gam.copy()
            gam[i - 1, j - 1] = 0.0  # eliminate residual round-off exactly
            out = ShuOsherForm(lam=out.lam, gam=gam)
    # every remaining entry below the first subdiagonal is at most tol-sized
    # round-off; make the sparsity pattern exact
    gam = np.tril(out.gam)
    gam[np.tril_indices(n, k=-2)] = 0.0
    return ShuOsherForm(lam=out.lam, gam=gam)
