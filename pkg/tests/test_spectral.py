import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from kleinp2.gallery import eps1_of, m_eps
from kleinp2.projective import ProjTransform
from kleinp2.cyclic import classify
from kleinp2.spectral import JordanShape, char_poly, cubic_roots, eigen_decompose, rotation_kind

from conftest import random_unimodular

THETA = math.sqrt(2) - 1
SQ10 = math.sqrt(10)


def _jordan_residual(A, ed):
    P, J = ed.basis, ed.jordan_matrix()
    return np.abs(A @ P - P @ J).sum(axis=1).max() / np.abs(A).sum(axis=1).max()


def test_diagonal():
    ed = eigen_decompose(ProjTransform(np.diag([0.5, 1, 2])))
    assert ed.jordan_shape is JordanShape.DIAG
    assert np.allclose(ed.eigenvalues, [0.5, 1, 2], atol=1e-12)


def test_block3():
    ed = eigen_decompose(ProjTransform([[1, 1, 0], [0, 1, 1], [0, 0, 1]]))
    assert ed.jordan_shape is JordanShape.BLOCK3
    assert np.allclose(ed.eigenvalues, [1, 1, 1], atol=1e-12)
    assert _jordan_residual(np.array([[1, 1, 0], [0, 1, 1], [0, 0, 1]]), ed) <= 1e-8


def test_block21():
    ed = eigen_decompose(ProjTransform([[1, 1, 0], [0, 1, 0], [0, 0, 1]]))
    assert ed.jordan_shape is JordanShape.BLOCK2_PLUS_1


def test_m_eps_eigenvalues():
    e1 = eps1_of(THETA)
    M = m_eps(THETA, 1, 1)
    g = ProjTransform(M)
    # the lift has determinant 1 already, so no rescaling happens
    assert abs(np.linalg.det(M) - 1) <= 1e-12
    ed = eigen_decompose(g)
    assert ed.jordan_shape is JordanShape.DIAG
    expected = [e1 ** -2, 1j * e1 * (3 - SQ10), 1j * e1 * (SQ10 + 3)]
    for lam in expected:
        assert min(abs(lam - mu) for mu in ed.eigenvalues) <= 1e-9


def test_rotation_kind_examples():
    r = rotation_kind(1j)
    assert r.kind == "TORSION" and r.order == 4
    assert rotation_kind(2).kind == "NOT_UNIT_MODULUS"
    r = rotation_kind(cmath.exp(2j * math.pi * THETA), q_max=720)
    assert r.kind == "IRRATIONAL"


def test_irrational_oracle():
    # independent check at 50 digits: no q <= 720 brings lambda^q within 1e-9 of 1
    mpmath.mp.dps = 50
    x = mpmath.sqrt(2) - 1
    best = min(abs(mpmath.expjpi(2 * q * x) - 1) for q in range(1, 721))
    assert best > 1e-9
    # the reported residual belongs to one q <= 720, so it cannot beat the minimum
    r = rotation_kind(cmath.exp(2j * math.pi * THETA))
    assert r.kind == "IRRATIONAL" and r.residual >= float(best) * (1 - 1e-9)


def test_char_poly_examples():
    assert np.allclose(char_poly(ProjTransform(np.eye(3))), [1, -3, 3, -1])
    cp = char_poly(ProjTransform(np.diag([0.5, 1, 2])))
    assert np.allclose(sorted(np.roots(cp).real), [0.5, 1, 2])
    M = m_eps(THETA, 1, 1)
    cp = char_poly(M)
    e1 = eps1_of(THETA)
    for lam in (e1 ** -2, 1j * e1 * (3 - SQ10), 1j * e1 * (SQ10 + 3)):
        assert abs(np.polyval(cp, lam)) <= 1e-9


def test_char_poly_constant_term():
    rng = np.random.default_rng(3)
    for _ in range(20):
        cp = char_poly(ProjTransform(random_unimodular(rng)))
        assert abs(cp[0] - 1) <= 1e-12 and abs(cp[3] + 1) <= 1e-9


def test_reconstruction_1000():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(1000):
        r = np.sqrt(rng.uniform(0, 1, (3, 3)))
        m = r * np.exp(2j * np.pi * rng.uniform(0, 1, (3, 3)))
        g = ProjTransform(m)
        ed = eigen_decompose(g)
        assert abs(np.prod(ed.eigenvalues) - 1) <= 1e-9
        worst = max(worst, _jordan_residual(g.lift, ed))
    assert worst <= 1e-8


@given(st.integers(0, 2 ** 32 - 1))
def test_conjugation_invariance(seed):
    rng = np.random.default_rng(seed)
    g = random_unimodular(rng)
    h = random_unimodular(rng, cond_max=10)
    a = eigen_decompose(ProjTransform(g)).eigenvalues
    b = eigen_decompose(ProjTransform(h @ g @ np.linalg.inv(h))).eigenvalues
    for x in a:
        assert min(abs(x - y) for y in b) <= 1e-8 * max(1, abs(x))


@given(st.integers(1, 60), st.integers(0, 59), st.integers(1, 12))
def test_torsion_powers(q, p, k):
    lam = cmath.exp(2j * math.pi * p / q)
    r = rotation_kind(lam)
    assert r.is_torsion and q % r.order == 0
    rk = rotation_kind(lam ** k)
    assert rk.is_torsion and r.order % rk.order == 0


def test_small_distinct_roots_kept_apart():
    # two roots far below the scale of the third still differ by much more
    # than the eigenvalue tolerance
    A = np.diag([0.5, 1, 2]).astype(complex) ** 17
    A = A / np.linalg.det(A) ** (1 / 3)
    roots, mult = cubic_roots(char_poly(A))
    assert mult == [1, 1, 1]
    assert sorted(abs(r) for r in roots) == pytest.approx([2 ** -17, 1, 2 ** 17], rel=1e-9)
    assert classify(A).kind.value == "DIAG_STRONG_LOXODROMIC"
