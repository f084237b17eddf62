"""Total-variation experiment on a nonlinear conservation law.

A scalar 1-D conservation law with an S-shaped fractional-flow function is
semi-discretized on a periodic uniform grid with a limited second-order face
reconstruction.  Integrating a step profile, the largest ratio of consecutive
total-variation seminorms over the time window measures whether a method is
variation-diminishing at a given step size; sweeping step sizes locates the
largest diminishing step, and its ratio to the explicit Euler value is the
observed step-size amplification of the method.

Note on the flux: the published description of this experiment prints the
fractional-flow function with a malformed denominator; the standard form
u^2 / (u^2 + (1 - u)^2 / 3) is used here and reproduces the published sweep
results (see the acceptance suite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .catalog import MethodRecord, lookup
from .exceptions import EmptyGrid
from .lowstorage import RegisterProgram, StorageClass, classify
from .lowstorage import compile as compile_program
from .lowstorage import step_naive, step_registers


@dataclass(frozen=True)
class BLConfig:
    """Grid, time window, sweep grid, and tolerances of the experiment."""

    n: int = 100
    t_end: float = 0.125
    dt_min: float = 2e-3
    dt_max: float = 1e-2
    dt_step: float = 5e-5
    limiter_eps: float = 1e-12
    mu_tol: float = 1e-12

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("need at least 4 cells")
        if not (0 < self.dt_min < self.dt_max) or self.dt_step <= 0:
            raise ValueError("sweep grid must satisfy 0 < dt_min < dt_max, dt_step > 0")

    def dt_grid(self) -> np.ndarray:
        k = int(math.floor((self.dt_max - self.dt_min) / self.dt_step + 1e-9))
        return self.dt_min + self.dt_step * np.arange(k + 1)


def bl_rhs(u: np.ndarray, cfg: BLConfig | None = None) -> np.ndarray:
    """Semi-discrete flux-difference right-hand side on the periodic grid.

    Face values use the limited reconstruction
    u_{j+1/2} = u_j + phi(theta_j) (u_{j+1} - u_j) / 2 with the ratio
    theta_j = (u_j - u_{j-1}) / (u_{j+1} - u_j) regularized by adding
    +-limiter_eps to the denominator (sign preserving, so the limited term
    still vanishes as the denominator does), and the limiter
    phi(theta) = max(0, min(2, 2/3 + theta/3, 2 theta)).
    """
    u = np.asarray(u, dtype=float)
    if cfg is None:
        cfg = BLConfig(n=len(u))
    elif cfg.n != len(u):
        raise ValueError(f"state has {len(u)} cells, config expects {cfg.n}")
    return _kernels.bl_rhs_kernel(u, 1.0 / cfg.n, cfg.limiter_eps)


def tv_seminorm(u: np.ndarray) -> float:
    """Sum of absolute consecutive differences with periodic wrap-around."""
    return _kernels.tv_kernel(np.asarray(u, dtype=float))


def step_profile(cfg: BLConfig) -> np.ndarray:
    """Initial step: 0 on (0, 1/2], 1/2 on (1/2, 1], sampled at x_j = j/n."""
    x = np.arange(1, cfg.n + 1) / cfg.n
    return np.where(x <= 0.5, 0.0, 0.5)


def _stepper(
    method: MethodRecord, executor: str
) -> tuple[str, RegisterProgram | None]:
    if executor == "naive":
        return "naive", None
    if method.shu_osher is not None:
        if classify(method.shu_osher) is not StorageClass.GENERAL:
            return "registers", compile_program(method.shu_osher)
    if executor == "registers":
        raise ValueError(f"{method.id} has no register template")
    return "naive", None


def mu_ratio(
    method: MethodRecord,
    dt: float,
    cfg: BLConfig | None = None,
    executor: str = "auto",
) -> float:
    """Largest consecutive total-variation ratio over the time window.

    Takes exactly floor(t_end / dt) steps (no partial final step).  Runs on
    the register executor whenever the method's storage class permits, else
    on the naive stepper; ``executor`` forces one or the other.  A non-finite
    state is reported as +inf.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if cfg is None:
        cfg = BLConfig()
    kind, program = _stepper(method, executor)
    rhs = lambda u: _kernels.bl_rhs_kernel(u, 1.0 / cfg.n, cfg.limiter_eps)
    u = step_profile(cfg)
    nsteps = int(math.floor(cfg.t_end / dt + 1e-12))
    tv_prev = tv_seminorm(u)
    worst = 0.0
    for _ in range(nsteps):
        if kind == "registers":
            u = step_registers(program, u, dt, rhs)
        else:
            u = step_naive(method.tableau, u, dt, rhs)
        if not np.isfinite(u).all():
            return math.inf
        tv_cur = tv_seminorm(u)
        worst = max(worst, tv_cur / tv_prev)
        tv_prev = tv_cur
    return worst


@dataclass(frozen=True)
class SweepResult:
    """Sweep of (dt, mu) pairs with the derived observed coefficient.

    ``dt_obs`` is the largest grid step such that every grid step up to and
    including it is variation diminishing (the all-below-pass rule);
    ``dt_largest_pass`` is the largest individually passing step, which can
    exceed ``dt_obs`` when the onset is not monotone.  ``nonmonotone`` lists
    passing grid steps that lie beyond the first failure.
    """

    pairs: tuple[tuple[float, float], ...]
    dt_obs: float
    dt_fe_obs: float
    observed_coeff: float
    dt_largest_pass: float
    nonmonotone: tuple[float, ...] = field(default_factory=tuple)


def observed_ssp_sweep(
    method: MethodRecord,
    cfg: BLConfig | None = None,
    dt_fe_obs: float | None = None,
    executor: str = "auto",
) -> SweepResult:
    """Evaluate mu over the sweep grid and derive the observed coefficient.

    ``dt_fe_obs`` is the explicit-Euler threshold from a prior sweep; if not
    given it is computed here with the same configuration.
    """
    if cfg is None:
        cfg = BLConfig()
    if dt_fe_obs is None:
        dt_fe_obs = forward_euler_threshold(cfg)
    if dt_fe_obs <= 0:
        raise ValueError("dt_fe_obs must be positive")
    grid = cfg.dt_grid()
    if grid.size == 0:
        raise EmptyGrid("sweep grid is empty")
    mus = np.array([mu_ratio(method, dt, cfg, executor) for dt in grid])
    passing = mus <= 1.0 + cfg.mu_tol
    dt_obs = 0.0
    first_fail = None
    for dt, ok in zip(grid, passing):
        if ok and first_fail is None:
            dt_obs = float(dt)
        elif not ok and first_fail is None:
            first_fail = float(dt)
    dt_largest = float(grid[passing][-1]) if passing.any() else 0.0
    nonmono = tuple(
        float(dt) for dt, ok in zip(grid, passing)
        if ok and first_fail is not None and dt > first_fail
    )
    return SweepResult(
        pairs=tuple((float(d), float(m)) for d, m in zip(grid, mus)),
        dt_obs=dt_obs,
        dt_fe_obs=float(dt_fe_obs),
        observed_coeff=dt_obs / dt_fe_obs,
        dt_largest_pass=dt_largest,
        nonmonotone=nonmono,
    )


def forward_euler_threshold(cfg: BLConfig | None = None) -> float:
    """Largest diminishing explicit-Euler step on the sweep grid."""
    fe = lookup("ssp1_1")
    if cfg is None:
        cfg = BLConfig()
    grid = cfg.dt_grid()
    if grid.size == 0:
        raise EmptyGrid("sweep grid is empty")
    dt_obs = 0.0
    for dt in grid:
        if mu_ratio(fe, float(dt), cfg) <= 1.0 + cfg.mu_tol:
            dt_obs = float(dt)
        else:
            break
    return dt_obs


@dataclass(frozen=True)
class TestProblem:
    """Smooth system with a known exact solution, for order checks."""

    rhs: Callable[[np.ndarray], np.ndarray]
    exact: Callable[[float], np.ndarray]
    t_end: float


DECAY = TestProblem(
    rhs=lambda y: -y,
    exact=lambda t: np.array([math.exp(-t)]),
    t_end=1.0,
)


def convergence_order(
    method: MethodRecord,
    problem: TestProblem = DECAY,
    h_list: Sequence[float] = (1 / 20, 1 / 40, 1 / 80, 1 / 160, 1 / 320),
) -> float:
    """Least-squares slope of log(final error) against log(step size)."""
    if len(h_list) < 3:
        raise ValueError("need at least 3 step sizes")
    errs = []
    for h in h_list:
        n = round(problem.t_end / h)
        y = problem.exact(0.0).copy()
        for _ in range(n):
            y = step_naive(method.tableau, y, h, problem.rhs)
        errs.append(np.abs(y - problem.exact(n * h)).max())
    slope = np.polyfit(np.log(np.asarray(h_list, float)), np.log(errs), 1)[0]
    return float(slope)
