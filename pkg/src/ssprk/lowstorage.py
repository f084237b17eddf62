"""Storage classification and fixed-register execution of sparse forms.

A canonical representation whose Gamma is subdiagonal and whose Lambda has
nonzeros only in the first column and first subdiagonal runs in two length-N
registers while retaining the input state (the "2N*" pattern).  Two five-stage
relaxations of that pattern run in three registers: one keeps stage 3 alive
for the final combination, the other keeps stage 2 alive for stages 5 and 6.
Anything else falls back to the naive stage-storing loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .exceptions import NotCanonical, UnsupportedClass
from .tableau import ButcherTableau, ShuOsherForm

CLASSIFY_TOL = 1e-12  # distinguishes structural zeros from small coefficients


class StorageClass(Enum):
    TWO_N_STAR = "2N*"
    THREE_N_A = "3N-A"
    THREE_N_B = "3N-B"
    GENERAL = "general"


def _pattern_mask(n: int, cells: set[tuple[int, int]]) -> np.ndarray:
    mask = np.zeros((n, n), dtype=bool)
    for i, j in cells:
        mask[i, j] = True
    return mask


def _subdiag_cells(n: int) -> set[tuple[int, int]]:
    return {(i, i - 1) for i in range(1, n)}


def classify(f: ShuOsherForm, tol: float = CLASSIFY_TOL) -> StorageClass:
    """Most specific register template matching the form's zero pattern.

    Requires a canonical form.  The two-register pattern is preferred over the
    three-register ones; the five-stage three-register patterns additionally
    pin the zero structure of rows 3 through 6.
    """
    if not f.is_canonical():
        raise NotCanonical("storage classification requires a canonical form")
    n = f.lam.shape[0]
    lam_nz = np.abs(f.lam) > tol
    gam_nz = np.abs(f.gam) > tol

    subdiag = _subdiag_cells(n)
    if not gam_nz[~_pattern_mask(n, subdiag)].any():
        col1 = {(i, 0) for i in range(1, n)}
        if not lam_nz[~_pattern_mask(n, col1 | subdiag)].any():
            return StorageClass.TWO_N_STAR
        if n == 6:
            # first column except row 3, which both three-register templates
            # require to be a plain step from stage 2
            col1_5 = {(1, 0), (3, 0), (4, 0), (5, 0)}
            if not lam_nz[~_pattern_mask(n, col1_5 | subdiag | {(5, 2)})].any():
                return StorageClass.THREE_N_A
            if not lam_nz[~_pattern_mask(n, col1_5 | subdiag | {(4, 1), (5, 1)})].any():
                return StorageClass.THREE_N_B
    return StorageClass.GENERAL


@dataclass(frozen=True)
class RegisterProgram:
    """Coefficients of one register template, in execution order.

    Layouts (1-based coefficient names):

    * ``TWO_N_STAR``: gamma_21, then (lambda_{i+1,1}, gamma_{i+1,i}) for
      i = 2..s.
    * ``THREE_N_A`` (s = 5): gamma_21, gamma_32, lambda_41, lambda_43,
      gamma_43, lambda_51, lambda_54, gamma_54, lambda_61, lambda_63,
      lambda_65, gamma_65.
    * ``THREE_N_B`` (s = 5): gamma_21, gamma_32, lambda_41, lambda_43,
      gamma_43, lambda_51, lambda_52, lambda_54, gamma_54, lambda_61,
      lambda_62, lambda_65, gamma_65.
    """

    algorithm: StorageClass
    coefficients: tuple[float, ...]
    stages: int


def compile(f: ShuOsherForm, tol: float = CLASSIFY_TOL) -> RegisterProgram:
    """Extract exactly the coefficients the matching template reads."""
    cls = classify(f, tol)
    if cls is StorageClass.GENERAL:
        raise UnsupportedClass("no register template for the general class")
    lam, gam, s = f.lam, f.gam, f.s
    if cls is StorageClass.TWO_N_STAR:
        coeffs = [gam[1, 0]]
        for i in range(2, s + 1):
            coeffs += [lam[i, 0], gam[i, i - 1]]
    elif cls is StorageClass.THREE_N_A:
        coeffs = [
            gam[1, 0], gam[2, 1],
            lam[3, 0], lam[3, 2], gam[3, 2],
            lam[4, 0], lam[4, 3], gam[4, 3],
            lam[5, 0], lam[5, 2], lam[5, 4], gam[5, 4],
        ]
    else:
        coeffs = [
            gam[1, 0], gam[2, 1],
            lam[3, 0], lam[3, 2], gam[3, 2],
            lam[4, 0], lam[4, 1], lam[4, 3], gam[4, 3],
            lam[5, 0], lam[5, 1], lam[5, 4], gam[5, 4],
        ]
    return RegisterProgram(
        algorithm=cls, coefficients=tuple(float(x) for x in coeffs), stages=s
    )


Rhs = Callable[[np.ndarray], np.ndarray]
Alloc = Callable[[np.ndarray], np.ndarray]


def _default_alloc(src: np.ndarray) -> np.ndarray:
    return np.array(src, dtype=float, copy=True)


def _fresh(fq: np.ndarray, register: np.ndarray) -> np.ndarray:
    """Detach a derivative from the register it was evaluated on.

    The register is scaled in place before the derivative is consumed, so an
    rhs that returns (a view of) its argument must be copied first.
    """
    fq = np.asarray(fq, dtype=float)
    if np.shares_memory(fq, register):
        return fq.copy()
    return fq


def step_registers(
    program: RegisterProgram,
    y: np.ndarray,
    h: float,
    rhs: Rhs,
    *,
    alloc: Alloc | None = None,
) -> np.ndarray:
    """Advance one step using exactly 2 or 3 working registers.

    ``alloc`` is the hook through which every register is allocated (a copy
    of its initializer); instrumenting it counts the live length-N registers.
    Register q2 holds the input state and is never written, so it remains
    bit-identical to ``y`` throughout the step.  Returns a fresh vector.
    """
    if alloc is None:
        alloc = _default_alloc
    c = program.coefficients
    q1 = alloc(np.asarray(y, dtype=float))
    q2 = alloc(q1)

    if program.algorithm is StorageClass.TWO_N_STAR:
        q1 += (h * c[0]) * rhs(q1)
        for i in range(2, program.stages + 1):
            lam1, g = c[2 * i - 3], c[2 * i - 2]
            fq = _fresh(rhs(q1), q1)
            q1 *= 1.0 - lam1
            if lam1 != 0.0:
                q1 += lam1 * q2
            q1 += (h * g) * fq
        return q1

    if program.algorithm is StorageClass.THREE_N_A:
        (g21, g32, l41, l43, g43, l51, l54, g54, l61, l63, l65, g65) = c
        q1 += (h * g21) * rhs(q1)
        q1 += (h * g32) * rhs(q1)
        q3 = alloc(q1)  # keep stage 3 for the final combination
        for lam1, lsub, g in ((l41, l43, g43), (l51, l54, g54)):
            fq = _fresh(rhs(q1), q1)
            q1 *= lsub
            q1 += lam1 * q2
            q1 += (h * g) * fq
        fq = _fresh(rhs(q1), q1)
        q1 *= l65
        q1 += l61 * q2
        q1 += l63 * q3
        q1 += (h * g65) * fq
        return q1

    if program.algorithm is StorageClass.THREE_N_B:
        (g21, g32, l41, l43, g43, l51, l52, l54, g54, l61, l62, l65, g65) = c
        q1 += (h * g21) * rhs(q1)
        q3 = alloc(q1)  # keep stage 2 for stages 5 and 6
        q1 += (h * g32) * rhs(q1)
        fq = _fresh(rhs(q1), q1)
        q1 *= l43
        q1 += l41 * q2
        q1 += (h * g43) * fq
        for lam1, lam2, lsub, g in ((l51, l52, l54, g54), (l61, l62, l65, g65)):
            fq = _fresh(rhs(q1), q1)
            q1 *= lsub
            q1 += lam1 * q2
            q1 += lam2 * q3
            q1 += (h * g) * fq
        return q1

    raise UnsupportedClass(f"cannot execute {program.algorithm}")


def step_naive(t: ButcherTableau, y: np.ndarray, h: float, rhs: Rhs) -> np.ndarray:
    """Reference step keeping every stage derivative (the executor oracle)."""
    y = np.asarray(y, dtype=float)
    A, b = t.A, t.b
    k = []
    for i in range(t.s):
        yi = y.copy()
        for j in range(i):
            aij = A[i, j]
            if aij != 0.0:
                yi += (h * aij) * k[j]
        k.append(np.asarray(rhs(yi), dtype=float))
    out = y.copy()
    for i in range(t.s):
        bi = b[i]
        if bi != 0.0:
            out += (h * bi) * k[i]
    return out
