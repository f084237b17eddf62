"""Conservation-law experiment: spatial operator, seminorm, sweeps, orders."""

import os
import subprocess
import sys

import numpy as np
import pytest

import ssprk
from conftest import LOW_STORAGE_IDS
from ssprk import catalog, experiments
from ssprk._kernels import USING_NUMBA, _bl_rhs_numpy, bl_rhs_kernel
from ssprk.experiments import (
    BLConfig,
    DECAY,
    bl_rhs,
    convergence_order,
    mu_ratio,
    observed_ssp_sweep,
    step_profile,
    tv_seminorm,
)

CFG = BLConfig()


def test_constant_state_has_zero_rhs():
    out = bl_rhs(np.full(100, 0.37))
    np.testing.assert_allclose(out, 0.0, atol=1e-13)


def test_translation_equivariance():
    rng = np.random.default_rng(2)
    u = rng.uniform(0, 1, size=100)
    for k in (1, 7, 50):
        np.testing.assert_array_equal(
            bl_rhs(np.roll(u, k)), np.roll(bl_rhs(u), k))


def test_step_profile_and_seminorm():
    u = step_profile(CFG)
    assert u[49] == 0.0 and u[50] == 0.5  # x = 1/2 belongs to the zero branch
    assert abs(tv_seminorm(u) - 1.0) < 1e-15
    assert tv_seminorm(np.full(64, 2.5)) == 0.0
    spike = np.zeros(50)
    spike[11] = 0.7
    assert abs(tv_seminorm(spike) - 1.4) < 1e-15


def test_one_euler_step_is_tvd_at_small_dt():
    u = step_profile(CFG)
    u1 = u + 2e-3 * bl_rhs(u)
    assert tv_seminorm(u1) <= tv_seminorm(u) + 1e-12


def test_conservation_per_step():
    rec = catalog.lookup("ssp53_2nstar_2")
    prog = ssprk.compile(rec.shu_osher)
    u = step_profile(CFG)
    for _ in range(5):
        total = u.sum()
        u = ssprk.step_registers(prog, u, 4e-3, lambda v: bl_rhs(v, CFG))
        assert abs(u.sum() - total) <= 1e-12 * CFG.n


def test_mu_forward_euler_thresholds():
    fe = catalog.lookup("fe")
    assert mu_ratio(fe, 2e-3, CFG) <= 1.0 + 1e-12
    assert mu_ratio(fe, 5e-3, CFG) > 1.0


def test_mu_ssp43_below_observed_threshold(dt_fe_obs):
    rec = catalog.lookup("ssp43")
    assert mu_ratio(rec, 2.04 * dt_fe_obs - 1e-5, CFG) <= 1.0 + 1e-12


def test_forward_euler_threshold_value(dt_fe_obs):
    assert 0.0023 <= dt_fe_obs <= 0.0027


def test_forward_euler_self_sweep(dt_fe_obs):
    sweep = observed_ssp_sweep(catalog.lookup("fe"), CFG, dt_fe_obs)
    assert sweep.dt_obs == dt_fe_obs
    assert abs(sweep.observed_coeff - 1.0) < 1e-12
    assert sweep.nonmonotone == ()
    assert sweep.pairs[0][0] == CFG.dt_min


def test_executor_independence(dt_fe_obs):
    for mid in LOW_STORAGE_IDS:
        rec = catalog.lookup(mid)
        for dt in np.linspace(2e-3, 6e-3, 5):
            a = mu_ratio(rec, float(dt), CFG, executor="registers")
            b = mu_ratio(rec, float(dt), CFG, executor="naive")
            assert abs(a - b) <= 1e-12, (mid, dt)


def test_tvd_at_theory_predicted_steps(dt_fe_obs, all_records):
    # the guaranteed step size: 95% of the certified radius times the
    # explicit-Euler threshold must be variation diminishing
    for rec in all_records:
        dt = 0.95 * rec.ref_ssp * dt_fe_obs
        assert mu_ratio(rec, dt, CFG) <= 1.0 + 1e-10, rec.id


@pytest.mark.parametrize("mid,target,tol", [
    ("ssp43", 3.0, 0.1),
    ("ssp53_2nstar_1", 3.0, 0.1),
    ("fe", 1.0, 0.05),
])
def test_convergence_orders(mid, target, tol):
    slope = convergence_order(catalog.lookup(mid), DECAY)
    assert abs(slope - target) < tol


def test_kernel_paths_agree():
    rng = np.random.default_rng(4)
    u = rng.uniform(0, 1, size=100)
    a = _bl_rhs_numpy(u, 0.01, 1e-12)
    b = bl_rhs_kernel(u, 0.01, 1e-12)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)


def test_pure_numpy_env_flag():
    # the fallback path must engage when the flag is set in a fresh process
    code = (
        "import ssprk._kernels as k, numpy as np\n"
        "assert not k.USING_NUMBA\n"
        "u = np.linspace(0, 1, 50)\n"
        "print(repr(float(k.bl_rhs_kernel(u, 0.02, 1e-12).sum())))\n"
    )
    env = dict(os.environ, SSPRK_PURE_NUMPY="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    u = np.linspace(0, 1, 50)
    assert abs(float(out.stdout) - float(_bl_rhs_numpy(u, 0.02, 1e-12).sum())) < 1e-12


def test_numba_is_active_by_default():
    if os.environ.get("SSPRK_PURE_NUMPY", "").strip() in ("", "0"):
        assert USING_NUMBA
