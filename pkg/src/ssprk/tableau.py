"""Explicit Runge-Kutta representations and linear analysis.

Provides the Butcher form (A, b), the convex-combination form (Lambda, Gamma)
over the extended (s+1)-stage system, order-condition residuals up to order 4,
the weighted error constant for third order methods, and the linear stability
polynomial with region/interval queries.

Index conventions: arrays are 0-based, but coefficient names in docstrings and
messages follow the usual 1-based convention (``lambda_61`` is ``lam[5, 0]``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DimensionMismatch,
    InvalidRange,
    NotThirdOrder,
    UnsupportedOrder,
)

# Default tolerances: structural zero test, order-condition pass threshold,
# reconstruction agreement.
STRUCTURAL_TOL = 1e-13
ORDER_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_strictly_lower(m: np.ndarray, what: str, tol: float = STRUCTURAL_TOL) -> np.ndarray:
    """Validate that ``m`` is strictly lower triangular and zero out round-off."""
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{what} must be square, got shape {m.shape}")
    upper = np.triu(m)
    if np.abs(upper).max(initial=0.0) > tol:
        raise DimensionMismatch(f"{what} must be strictly lower triangular")
    return np.tril(m, k=-1)


def solve_unit_lower(m: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve (I + m) x = rhs by forward substitution, m strictly lower triangular.

    ``rhs`` may be a vector or a matrix of stacked right-hand-side columns.
    """
    n = m.shape[0]
    x = np.array(rhs, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
        squeeze = True
    else:
        squeeze = False
    for i in range(n):
        x[i, :] -= m[i, :i] @ x[:i, :]
    return x[:, 0] if squeeze else x


@dataclass(frozen=True)
class ButcherTableau:
    """Explicit s-stage method: strictly lower triangular A and weights b.

    The abscissae c are always recomputed as row sums of A.
    """

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        A = _check_strictly_lower(A, "A")
        if b.ndim != 1 or b.shape[0] != A.shape[0]:
            raise DimensionMismatch(
                f"b has length {b.shape[0]}, expected {A.shape[0]}"
            )
        if A.shape[0] < 1:
            raise DimensionMismatch("at least one stage required")
        object.__setattr__(self, "A", _readonly(A))
        object.__setattr__(self, "b", _readonly(b))

    @property
    def s(self) -> int:
        return self.b.shape[0]

    @property
    def c(self) -> np.ndarray:
        return self.A.sum(axis=1)


def extended_matrix(t: ButcherTableau) -> np.ndarray:
    """The (s+1) x (s+1) matrix with A in the top-left block and b as row s+1.

    The last column is zero, so the matrix stays strictly lower triangular.
    """
    s = t.s
    m = np.zeros((s + 1, s + 1))
    m[:s, :s] = t.A
    m[s, :s] = t.b
    return _readonly(m)


@dataclass(frozen=True)
class ShuOsherForm:
    """Convex-combination representation (Lambda, Gamma) of an explicit method.

    Both matrices are (s+1) x (s+1) and strictly lower triangular; the method's
    extended matrix is recovered as (I - Lambda)^{-1} Gamma.  ``alpha`` is the
    implied vector (I - Lambda) e of weights on the input state.
    """

    lam: np.ndarray
    gam: np.ndarray

    def __post_init__(self):
        lam = _check_strictly_lower(np.asarray(self.lam, dtype=float), "Lambda")
        gam = _check_strictly_lower(np.asarray(self.gam, dtype=float), "Gamma")
        if lam.shape != gam.shape:
            raise DimensionMismatch(
                f"Lambda {lam.shape} and Gamma {gam.shape} differ in shape"
            )
        object.__setattr__(self, "lam", _readonly(lam))
        object.__setattr__(self, "gam", _readonly(gam))

    @property
    def s(self) -> int:
        return self.lam.shape[0] - 1

    @property
    def alpha(self) -> np.ndarray:
        return 1.0 - self.lam.sum(axis=1)

    def is_canonical(self, tol: float = STRUCTURAL_TOL) -> bool:
        """True when alpha = (1, 0, ..., 0), i.e. only stage 1 copies the input."""
        a = self.alpha
        return abs(a[0] - 1.0) <= tol and np.abs(a[1:]).max(initial=0.0) <= tol


def shu_osher_to_butcher(f: ShuOsherForm) -> ButcherTableau:
    """Recover the Butcher tableau from a (Lambda, Gamma) representation.

    Solves (I - Lambda) X = Gamma by forward substitution; the top-left s x s
    block of X is A and its last row holds b.
    """
    x = solve_unit_lower(-f.lam, f.gam)
    s = f.s
    return ButcherTableau(A=x[:s, :s], b=x[s, :s])


_ORDER4_RESIDUALS = 8  # 1 + 1 + 2 + 4 conditions through order 4


def order_residuals(t: ButcherTableau, p: int) -> np.ndarray:
    """Residuals of the order conditions through order p (p <= 4), fixed order.

    Order 1: b'e - 1.  Order 2 appends b'c - 1/2.  Order 3 appends
    b'c^2 - 1/3 and b'Ac - 1/6.  Order 4 appends the four conditions for the
    rooted trees c^3, c*Ac, Ac^2, A^2c with weights 1/4, 1/8, 1/12, 1/24.
    """
    if p not in (1, 2, 3, 4):
        raise UnsupportedOrder(f"order conditions implemented for p <= 4, got {p}")
    A, b, c = t.A, t.b, t.c
    res = [b.sum() - 1.0]
    if p >= 2:
        res.append(b @ c - 0.5)
    if p >= 3:
        Ac = A @ c
        res.append(b @ c**2 - 1.0 / 3.0)
        res.append(b @ Ac - 1.0 / 6.0)
    if p >= 4:
        res.append(b @ c**3 - 0.25)
        res.append(b @ (c * Ac) - 0.125)
        res.append(b @ (A @ c**2) - 1.0 / 12.0)
        res.append(b @ (A @ Ac) - 1.0 / 24.0)
    return np.array(res)


# Order-4 rooted trees in the residual order above: symmetry factors sigma and
# density factors gamma.  The error constant is the 2-norm of the residuals
# scaled by 1/sigma, which reproduces sqrt(3)/48 for the optimal 4-stage third
# order method.
_SIGMA4 = np.array([6.0, 1.0, 2.0, 1.0])


def error_constant(t: ButcherTableau, order_tol: float = ORDER_TOL) -> float:
    """2-norm of the symmetry-weighted order-4 residuals of a third order method."""
    r3 = order_residuals(t, 3)
    if np.abs(r3).max() > order_tol:
        raise NotThirdOrder(
            f"order-3 residuals reach {np.abs(r3).max():.3e} > {order_tol:.0e}"
        )
    r4 = order_residuals(t, 4)[4:]
    return float(np.linalg.norm(r4 / _SIGMA4))


@dataclass(frozen=True)
class StabilityPolynomial:
    """Coefficients of R(z) = sum_k coeffs[k] z^k, degree 0 through s."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _readonly(np.atleast_1d(self.coeffs)))

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def __call__(self, z):
        """Evaluate R(z) by Horner's rule; accepts real/complex scalars or arrays."""
        z = np.asarray(z)
        out = np.full(z.shape, self.coeffs[-1], dtype=np.result_type(z, float))
        for ck in self.coeffs[-2::-1]:
            out = out * z + ck
        return out if out.shape else out[()]


def stability_polynomial(t: ButcherTableau) -> StabilityPolynomial:
    """Stability polynomial of an explicit method: coeffs[k] = b' A^(k-1) e."""
    coeffs = np.empty(t.s + 1)
    coeffs[0] = 1.0
    v = np.ones(t.s)
    for k in range(1, t.s + 1):
        coeffs[k] = t.b @ v
        v = t.A @ v
    return StabilityPolynomial(coeffs)


_SCAN_STEP = 1e-3   # region assumed simply connected near the real axis


def real_stability_interval(sp: StabilityPolynomial, tol: float = 1e-10) -> float:
    """Left endpoint x* <= 0 of the largest interval [x*, 0] with |R| <= 1.

    Located by a fixed-step scan to bracket the boundary, then bisection
    refined to ``tol``.  Returns 0 if |R| > 1 immediately left of the origin.
    """
    if tol <= 0:
        raise InvalidRange("tol must be positive")
    x = 0.0
    while abs(sp(x - _SCAN_STEP)) <= 1.0:
        x -= _SCAN_STEP
        if x < -1e6:
            return x  # effectively unbounded (e.g. R identically 1)
    lo, hi = x - _SCAN_STEP, x  # |R(hi)| <= 1 < |R(lo)|
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if abs(sp(mid)) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def stability_region_grid(
    sp: StabilityPolynomial,
    re_range: tuple[float, float],
    im_range: tuple[float, float],
    nx: int,
    ny: int,
) -> np.ndarray:
    """Boolean grid of |R(z)| <= 1 on a uniform nx x ny mesh.

    Returns shape (ny, nx): rows sweep the imaginary axis, columns the real
    axis, mirroring the usual image layout of region plots.
    """
    if nx < 2 or ny < 2:
        raise InvalidRange("nx and ny must both be >= 2")
    re_lo, re_hi = re_range
    im_lo, im_hi = im_range
    if not (re_lo < re_hi and im_lo < im_hi):
        raise InvalidRange("axis ranges must be nondegenerate (lo < hi)")
    re = np.linspace(re_lo, re_hi, nx)
    im = np.linspace(im_lo, im_hi, ny)
    zz = re[None, :] + 1j * im[:, None]
    return np.abs(sp(zz)) <= 1.0


def stability_axes(
    re_range: tuple[float, float], im_range: tuple[float, float], nx: int, ny: int
) -> tuple[np.ndarray, np.ndarray]:
    """The mesh axes matching :func:`stability_region_grid`."""
    return np.linspace(*re_range, nx), np.linspace(*im_range, ny)
