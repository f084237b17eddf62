"""Storage classification, register programs, and executor equivalence."""

import numpy as np
import pytest

from conftest import LOW_STORAGE_IDS, poly_rhs
from ssprk import (
    ShuOsherForm,
    catalog,
    classify,
    compile,
    stability_polynomial,
    step_naive,
    step_registers,
)
from ssprk.exceptions import NotCanonical, UnsupportedClass
from ssprk.lowstorage import StorageClass


@pytest.mark.parametrize("mid,expected", [
    ("ssp33", StorageClass.TWO_N_STAR),
    ("ssp43", StorageClass.TWO_N_STAR),
    ("ssp53_r", StorageClass.THREE_N_A),
    ("ssp53_h", StorageClass.THREE_N_B),
    ("ssp53_1", StorageClass.THREE_N_B),
    ("ssp53_2", StorageClass.GENERAL),
    ("ssp53_2nstar_1", StorageClass.TWO_N_STAR),
    ("ssp53_2nstar_2", StorageClass.TWO_N_STAR),
    ("ssp1_6", StorageClass.TWO_N_STAR),
    ("ssp2_3", StorageClass.TWO_N_STAR),
])
def test_classification(mid, expected):
    assert classify(catalog.lookup(mid).shu_osher) is expected


def test_small_coefficient_is_nonzero():
    # lambda_52 = 5.04e-5 must count as structurally nonzero and be carried
    # into the register program verbatim
    rec = catalog.lookup("ssp53_1")
    assert classify(rec.shu_osher) is StorageClass.THREE_N_B
    prog = compile(rec.shu_osher)
    assert 0.000050407140024 in prog.coefficients


def test_classify_requires_canonical():
    lam = np.zeros((3, 3))
    lam[1, 0], lam[2, 1] = 0.7, 1.0
    gam = np.zeros((3, 3))
    gam[1, 0], gam[2, 1] = 0.5, 0.5
    with pytest.raises(NotCanonical):
        classify(ShuOsherForm(lam=lam, gam=gam))


def test_compile_second_order_family():
    prog = compile(catalog.lookup("ssp2_4").shu_osher)
    assert prog.algorithm is StorageClass.TWO_N_STAR
    # coefficients: g21, (l31, g32), (l41, g43), (l51, g54)
    assert prog.coefficients[1] == 0.0 and prog.coefficients[3] == 0.0
    assert abs(prog.coefficients[5] - 1 / 4) < 1e-15
    assert abs(prog.coefficients[6] - 1 / 4) < 1e-15


def test_compile_2nstar_1_column_entry():
    prog = compile(catalog.lookup("ssp53_2nstar_1").shu_osher)
    assert prog.algorithm is StorageClass.TWO_N_STAR
    assert 0.571403511494104 in prog.coefficients


def test_compile_h_uses_three_register_template():
    prog = compile(catalog.lookup("ssp53_h").shu_osher)
    assert prog.algorithm is StorageClass.THREE_N_B
    assert len(prog.coefficients) == 13


def test_compile_rejects_general():
    with pytest.raises(UnsupportedClass):
        compile(catalog.lookup("ssp53_2").shu_osher)


@pytest.mark.parametrize("mid", LOW_STORAGE_IDS)
def test_zero_rhs_returns_input(mid):
    # convex recombinations of identical vectors; row sums are 1 only to the
    # printed precision of the coefficients, hence the tiny tolerance
    prog = compile(catalog.lookup(mid).shu_osher)
    y = np.array([0.3, -1.2, 5.0])
    out = step_registers(prog, y, 0.7, lambda v: np.zeros_like(v))
    np.testing.assert_allclose(out, y, rtol=1e-13, atol=0)


@pytest.mark.parametrize("mid", LOW_STORAGE_IDS)
def test_linear_rhs_matches_stability_polynomial(mid):
    rec = catalog.lookup(mid)
    prog = compile(rec.shu_osher)
    sp = stability_polynomial(rec.tableau)
    lam, h = -0.83, 0.31
    out = step_registers(prog, np.array([1.0]), h, lambda v: lam * v)
    assert abs(out[0] - sp(h * lam)) <= 1e-13 * abs(sp(h * lam))


def test_ssp43_exponential_step():
    rec = catalog.lookup("ssp43")
    prog = compile(rec.shu_osher)
    y = np.array([1.0])
    a = step_registers(prog, y, 0.1, lambda v: v)
    b = step_naive(rec.tableau, y, 0.1, lambda v: v)
    assert abs(a[0] - b[0]) < 1e-14


def test_step_naive_trivial_cases():
    fe = catalog.lookup("ssp1_1").tableau
    y = np.array([0.0])
    assert step_naive(fe, y, 1.0, lambda v: np.ones_like(v))[0] == 1.0
    y = np.array([2.0, -1.0])
    np.testing.assert_array_equal(
        step_naive(catalog.lookup("ssp43").tableau, y, 0.5,
                   lambda v: np.zeros_like(v)), y)


@pytest.mark.parametrize("mid", LOW_STORAGE_IDS)
def test_executor_equivalence_random_systems(mid):
    rec = catalog.lookup(mid)
    prog = compile(rec.shu_osher)
    rng = np.random.default_rng(hash(mid) % 2**32)
    for _ in range(20):
        n = int(rng.integers(1, 51))
        rhs = poly_rhs(rng, n)
        y = rng.uniform(-1.0, 1.0, size=n)
        a = step_registers(prog, y, 0.05, rhs)
        b = step_naive(rec.tableau, y, 0.05, rhs)
        assert np.abs(a - b).max() <= 1e-12 * (1.0 + np.abs(y).max())


@pytest.mark.parametrize("mid,expected", [
    ("ssp43", 2), ("ssp53_2nstar_2", 2), ("ssp53_r", 3), ("ssp53_h", 3),
    ("ssp53_1", 3),
])
def test_register_count(mid, expected):
    prog = compile(catalog.lookup(mid).shu_osher)
    live = []

    def counting_alloc(src):
        buf = np.array(src, dtype=float, copy=True)
        live.append(buf)
        return buf

    step_registers(prog, np.linspace(0, 1, 17), 0.05,
                   lambda v: np.sin(v), alloc=counting_alloc)
    assert len(live) == expected


@pytest.mark.parametrize("mid", ["ssp43", "ssp53_2nstar_1", "ssp53_2nstar_2"])
def test_input_state_register_retained(mid):
    prog = compile(catalog.lookup(mid).shu_osher)
    registers = []

    def recording_alloc(src):
        buf = np.array(src, dtype=float, copy=True)
        registers.append(buf)
        return buf

    y = np.linspace(-2, 2, 9)
    step_registers(prog, y, 0.03, lambda v: v * v, alloc=recording_alloc)
    q2 = registers[1]
    assert (q2 == y).all()  # bit identical through the whole step


def test_second_order_program_is_repeated_euler():
    # the first s-1 updates of the s-stage second order scheme are plain
    # Euler substeps of size h/(s-1)
    s, h = 5, 0.2
    rec = catalog.lookup(f"ssp2_{s}")
    prog = compile(rec.shu_osher)
    seen = []

    def recording_rhs(v):
        seen.append(v.copy())
        return -v

    step_registers(prog, np.array([1.0, 2.0]), h, recording_rhs)
    for i in range(s - 1):
        expected = seen[i] + (h / (s - 1)) * (-seen[i])
        np.testing.assert_allclose(seen[i + 1], expected, rtol=0, atol=1e-15)
