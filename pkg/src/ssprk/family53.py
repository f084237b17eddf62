"""The five-stage third order families and the two-register optimizer.

Two parametrizations are implemented.  The first covers the optimal five-stage
third order methods: a 5-parameter family (b1, b2, b4, b5, a51) whose
remaining tableau entries are fixed rational functions of the radius r, the
real root of x^3 - 5x^2 + 10x - 10.  Its canonical sparse representation is
available in closed form, and a quartic certificate shows no member of the
family fits the two-register-with-state-retention pattern.

The second parametrization (b1..b5 and column multipliers u >= v >= w >= x
>= 1) spans exactly the methods that do fit that pattern; a multi-start
penalized Gauss-Newton search inside an outer bisection on r reproduces the
best known members.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import radius_absolute_monotonicity
from .exceptions import (
    DegenerateWeights,
    MonotonicityViolation,
    NegativeCoefficients,
    NoFeasiblePoint,
    OrderViolation,
)
from .tableau import ButcherTableau, ShuOsherForm, extended_matrix


def ssp53_optimal_radius(tol: float = 1e-14) -> float:
    """Unique real root of x^3 - 5x^2 + 10x - 10, by Newton from 2.5."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = 2.5
    for _ in range(100):
        f = ((x - 5.0) * x + 10.0) * x - 10.0
        fp = (3.0 * x - 10.0) * x + 10.0
        dx = f / fp
        x -= dx
        if abs(dx) <= tol:
            break
    return x


@dataclass(frozen=True)
class Family53Params:
    """Free parameters of the optimal five-stage third order family.

    The radius r defaults to the family optimum but is a field so the algebra
    can be probed at perturbed radii.
    """

    b1: float
    b2: float
    b4: float
    b5: float
    a51: float
    r: float = field(default_factory=ssp53_optimal_radius)

    def __post_init__(self):
        if min(abs(self.b4), abs(self.b5)) < 1e-14:
            raise DegenerateWeights("b4 and b5 appear in denominators")

    # entries determined by the family structure
    @property
    def a41(self) -> float:
        return self.r / (60.0 * self.b4)

    @property
    def a52(self) -> float:
        return self.r / (60.0 * self.b5)

    @property
    def a54(self) -> float:
        return self.b4 / (self.b5 * self.r)

    @property
    def b3(self) -> float:
        return self.r * self.r / 60.0


def build_family53(p: Family53Params) -> ButcherTableau:
    """Five-stage tableau of the family member with parameters ``p``."""
    r = p.r
    A = np.zeros((5, 5))
    A[1, 0] = 1.0 / r
    A[2, :2] = 1.0 / r
    A[3, :3] = p.a41
    A[4, :4] = (p.a51, p.a52, p.a52, p.a54)
    b = np.array([p.b1, p.b2, p.b3, p.b4, p.b5])
    return ButcherTableau(A=A, b=b)


def family53_order_residuals(p: Family53Params) -> np.ndarray:
    """Residuals of the three order conditions not already built into the family."""
    r = p.r
    co1 = p.b1 + p.b2 + p.b4 + p.b5 + r * r / 60.0 - 1.0
    co2 = p.a51 * p.b5 * r + p.b2 + p.b4 + 7.0 * r * r / 60.0 - r / 2.0
    co3 = (
        p.b5 * (p.a51 + p.b4 / (p.b5 * r) + r / (30.0 * p.b5)) ** 2
        + p.b2 / (r * r)
        + r * r / (400.0 * p.b4)
        - 4.0 / 15.0
    )
    return np.array([co1, co2, co3])


def family53_sparse_representation(p: Family53Params) -> ShuOsherForm:
    """Closed-form canonical representation with subdiagonal Gamma.

    Requires the first two order-condition residuals to vanish (within 1e-10)
    and r to be the family optimum: together these force lambda_61 to zero,
    and it is set identically to zero after that is verified.
    """
    res = family53_order_residuals(p)
    if max(abs(res[0]), abs(res[1])) > 1e-10:
        raise OrderViolation(
            f"first two order residuals {res[:2]!r} must vanish (<= 1e-10)"
        )
    r = p.r
    lam61 = (-(r**3) + 5.0 * r * r - 10.0 * r + 10.0) / 10.0
    if abs(lam61) > 1e-11:
        raise OrderViolation(
            f"r={r!r} is not the family optimum (lambda_61 would be {lam61:.3e})"
        )
    lam = np.zeros((6, 6))
    gam = np.zeros((6, 6))
    lam[1, 0] = 1.0
    lam[2, 1] = 1.0
    lam43 = r * r / (60.0 * p.b4)
    lam54 = p.b4 / p.b5
    lam52 = r * (p.a51 - r / (60.0 * p.b5))
    lam[3, 0] = 1.0 - lam43
    lam[3, 2] = lam43
    lam[4, 0] = 1.0 - lam54 - lam52
    lam[4, 1] = lam52
    lam[4, 3] = lam54
    lam[5, 0] = 0.0
    lam[5, 1] = r * (p.b1 - p.b2 - r * p.b5 * (p.a51 - r / (60.0 * p.b5)))
    lam[5, 2] = r * (p.b2 - r * r / 60.0)
    lam[5, 4] = p.b5 * r
    gam[1, 0] = 1.0 / r
    gam[2, 1] = 1.0 / r
    gam[3, 2] = r / (60.0 * p.b4)
    gam[4, 3] = p.b4 / (p.b5 * r)
    gam[5, 4] = p.b5
    return ShuOsherForm(lam=lam, gam=gam)


@dataclass(frozen=True)
class NoTwoNStarCertificate:
    """Witness that the optimal family misses the two-register pattern.

    Forcing lambda_52 = lambda_62 = lambda_63 = 0 pins a51, b1, b2, b4, b5 as
    functions of r alone; the remaining order condition then reduces to a
    quartic in r whose value at the family optimum is the contradiction.
    """

    radius: float
    quartic_value: float
    contradiction: bool
    forced_params: Family53Params


def quartic_obstruction(r: float) -> float:
    """3r^4 - 40r^3 + 175r^2 - 330r + 250, evaluated stably."""
    return (((3.0 * r - 40.0) * r + 175.0) * r - 330.0) * r + 250.0


def certify_no_2nstar_ssp53() -> NoTwoNStarCertificate:
    r = ssp53_optimal_radius(1e-14)
    b5 = (r * r - 5.0 * r + 10.0) / 10.0  # equals 1/r at the optimum
    forced = Family53Params(
        b1=r * r / 60.0,
        b2=r * r / 60.0,
        b4=r / 20.0 * (10.0 - 3.0 * r),
        b5=b5,
        a51=r / (60.0 * b5),
        r=r,
    )
    value = quartic_obstruction(r)
    return NoTwoNStarCertificate(
        radius=r,
        quartic_value=value,
        contradiction=abs(value) > 1e-3,
        forced_params=forced,
    )


@dataclass(frozen=True)
class TwoNStarParams:
    """Weights and column multipliers of the two-register five-stage family.

    Row i of the tableau is the i-th column multiplier times the first i - 1
    weights; nonnegativity of the representation is equivalent to
    u >= v >= w >= x >= 1.
    """

    b1: float
    b2: float
    b3: float
    b4: float
    b5: float
    u: float
    v: float
    w: float
    x: float

    @property
    def b(self) -> np.ndarray:
        return np.array([self.b1, self.b2, self.b3, self.b4, self.b5])


_ORDERING_TOL = 1e-12


def _twonstar_arrays(b: np.ndarray, u: float, v: float, w: float, x: float):
    A = np.zeros((5, 5))
    A[1, 0] = u * b[0]
    A[2, :2] = v * b[:2]
    A[3, :3] = w * b[:3]
    A[4, :4] = x * b[:4]
    return A, b.copy()


def build_2nstar_tableau(p: TwoNStarParams) -> ButcherTableau:
    if not (p.u >= p.v >= p.w >= p.x >= 1.0 - _ORDERING_TOL):
        raise MonotonicityViolation(
            f"need u >= v >= w >= x >= 1, got ({p.u}, {p.v}, {p.w}, {p.x})"
        )
    if p.b.min() < -_ORDERING_TOL:
        raise NegativeCoefficients("weights must be nonnegative")
    A, b = _twonstar_arrays(p.b, p.u, p.v, p.w, p.x)
    return ButcherTableau(A=A, b=b)


def twonstar_shu_osher(p: TwoNStarParams) -> ShuOsherForm:
    """Companion canonical form: Lambda in column 1 plus first subdiagonal."""
    u, v, w, x = p.u, p.v, p.w, p.x
    lam = np.zeros((6, 6))
    gam = np.zeros((6, 6))
    lam[1, 0] = 1.0
    for row, (hi, lo) in enumerate([(u, v), (v, w), (w, x), (x, 1.0)], start=2):
        lam[row, 0] = (hi - lo) / hi
        lam[row, row - 1] = lo / hi
    for row, g in enumerate([u * p.b1, v * p.b2, w * p.b3, x * p.b4, p.b5], start=1):
        gam[row, row - 1] = g
    return ShuOsherForm(lam=lam, gam=gam)


# ----------------------------------------------------------------------------
# numerical search for the best two-register schemes
# ----------------------------------------------------------------------------

_VARIANTS = ("full", "constrained")


def _expand(theta: np.ndarray, variant: str) -> tuple[float, ...]:
    """Map the optimization vector to (b1..b5, u, v, w, x)."""
    if variant == "full":
        b1, b2, b3, b4, b5, u, v, w, x = theta
    else:  # constrained: u = v, w = x, b2 = b1
        b1, b3, b4, b5, u, x = theta
        b2, v, w = b1, u, x
    return b1, b2, b3, b4, b5, u, v, w, x


def _residuals(theta: np.ndarray, variant: str, r: float) -> np.ndarray:
    """Order-condition equalities plus hinge penalties, as one residual stack."""
    b1, b2, b3, b4, b5, u, v, w, x = _expand(theta, variant)
    c2 = u * b1
    c3 = v * (b1 + b2)
    c4 = w * (b1 + b2 + b3)
    c5 = x * (b1 + b2 + b3 + b4)
    bc2, bc3, bc4, bc5 = b2 * c2, b3 * c3, b4 * c4, b5 * c5
    eq = (
        b1 + b2 + b3 + b4 + b5 - 1.0,
        bc2 + bc3 + bc4 + bc5 - 0.5,
        bc2 * c2 + bc3 * c3 + bc4 * c4 + bc5 * c5 - 1.0 / 3.0,
        b3 * v * b2 * c2
        + b4 * w * (b2 * c2 + b3 * c3)
        + b5 * x * (b2 * c2 + b3 * c3 + b4 * c4)
        - 1.0 / 6.0,
    )
    inv_r = 1.0 / r
    hinges = (
        v - u, w - v, x - w, 1.0 - x,
        -b1, -b2, -b3, -b4, -b5,
        u * b1 - inv_r, u * b2 - inv_r, v * b3 - inv_r,
        w * b4 - inv_r, x * b5 - inv_r,
    )
    out = np.empty(len(eq) + len(hinges))
    out[:4] = eq
    out[4:] = np.maximum(0.0, hinges)
    return out


def _gauss_newton(theta0: np.ndarray, variant: str, r: float) -> tuple[np.ndarray, float]:
    """Damped Gauss-Newton (Levenberg regularized) on the residual stack."""
    theta = theta0.astype(float).copy()
    f = _residuals(theta, variant, r)
    cost = float(f @ f)
    mu = 1e-6
    n = theta.size
    eye = np.eye(n)
    for _ in range(160):
        if cost < 1e-24:
            break
        jac = np.empty((f.size, n))
        for k in range(n):
            step = 1e-7 * max(1.0, abs(theta[k]))
            tp = theta.copy()
            tp[k] += step
            jac[:, k] = (_residuals(tp, variant, r) - f) / step
        g = jac.T @ f
        if np.abs(g).max() < 1e-15:
            break
        h = jac.T @ jac
        improved = False
        for _ in range(25):
            try:
                delta = np.linalg.solve(h + mu * eye, -g)
            except np.linalg.LinAlgError:
                mu *= 10.0
                continue
            cand = theta + delta
            fc = _residuals(cand, variant, r)
            cc = float(fc @ fc)
            if cc < cost:
                theta, f, cost = cand, fc, cc
                mu = max(mu * 0.25, 1e-12)
                improved = True
                break
            mu *= 10.0
        if not improved:
            break
    return theta, cost


_EQ_TOL = 1e-10
_HINGE_TOL = 1e-10


def _is_feasible(theta: np.ndarray, variant: str, r: float) -> bool:
    res = _residuals(theta, variant, r)
    return bool(np.abs(res[:4]).max() <= _EQ_TOL and res[4:].max() <= _HINGE_TOL)


def _random_start(rng: np.random.Generator, variant: str) -> np.ndarray:
    b = rng.uniform(0.0, 1.0, size=5)
    b /= b.sum()
    mult = np.sort(rng.uniform(1.0, 4.0, size=4))[::-1]
    if variant == "full":
        return np.concatenate([b, mult])
    return np.array([b[0], b[2], b[3], b[4], mult[0], mult[2]])


def _solve_at(
    r: float,
    variant: str,
    seeds: int,
    rng_seed: int,
    outer_index: int,
    warm: np.ndarray | None,
) -> np.ndarray | None:
    starts = [] if warm is None else [warm]
    for i in range(seeds):
        rng = np.random.default_rng([rng_seed, outer_index, i])
        starts.append(_random_start(rng, variant))
    for theta0 in starts:
        theta, _ = _gauss_newton(np.asarray(theta0, float), variant, r)
        if _is_feasible(theta, variant, r):
            return theta
    return None


def optimize_2nstar(
    variant: str = "full",
    seeds: int = 50,
    r_tol: float = 1e-6,
    rng_seed: int = 1,
) -> tuple[TwoNStarParams, float]:
    """Maximize the certified radius over the two-register family.

    Outer bisection on the target radius r in [1, 2.7]; at each trial r a
    penalized least-squares solve (``seeds`` deterministic random starts, plus
    a warm start from the last feasible point) looks for parameters meeting
    the order conditions with representation coefficient at least r.  The
    returned radius is re-certified on the built tableau.
    """
    if variant not in _VARIANTS:
        raise ValueError(f"variant must be one of {_VARIANTS}")
    if seeds < 1:
        raise ValueError("seeds must be >= 1")
    lo, hi = 1.0, 2.7
    best = _solve_at(lo, variant, seeds, rng_seed, 0, None)
    if best is None:
        raise NoFeasiblePoint(
            "no feasible point at r = 1; four-stage-adjacent schemes must exist"
        )
    outer = 1
    while hi - lo > r_tol:
        mid = 0.5 * (lo + hi)
        found = _solve_at(mid, variant, seeds, rng_seed, outer, best)
        outer += 1
        if found is not None:
            lo, best = mid, found
        else:
            hi = mid
    b1, b2, b3, b4, b5, u, v, w, x = _expand(best, variant)
    # project hinge-tolerance violations (<= 1e-10) back onto the ordering
    x = max(x, 1.0)
    w = max(w, x)
    v = max(v, w)
    u = max(u, v)
    params = TwoNStarParams(
        b1=max(b1, 0.0), b2=max(b2, 0.0), b3=max(b3, 0.0),
        b4=max(b4, 0.0), b5=max(b5, 0.0), u=u, v=v, w=w, x=x,
    )
    tableau = build_2nstar_tableau(params)
    certified = radius_absolute_monotonicity(extended_matrix(tableau))
    return params, float(certified)
