import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kleinp2.errors import CoincidentLines, CoincidentPoints, DegenerateInput, DegenerateQuadruple
from kleinp2.gallery import B_PERM
from kleinp2.projective import (GenCircle, MobiusMap, ProjLine, ProjPoint, ProjTransform, apply,
                                apply_line, canonicalize, cross_ratio, e, fs_distance, homog1,
                                line_through, meet, mobius_circle_image)

from conftest import random_unimodular

cpx = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
triples = st.lists(cpx, min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 1e-3)


def test_line_through_coordinate_points():
    assert line_through(e(1), e(2)) == ProjLine([0, 0, 1])
    assert line_through(e(1), e(3)) == ProjLine([0, 1, 0])
    # cross product (1,1,0) x (0,0,1) = (1,-1,0)
    assert line_through(ProjPoint([1, 1, 0]), e(3)) == ProjLine([1, -1, 0])


def test_line_through_coincident():
    with pytest.raises(CoincidentPoints):
        line_through(e(1), ProjPoint([2j, 0, 0]))


def test_meet():
    assert meet(ProjLine([0, 0, 1]), ProjLine([0, 1, 0])) == e(1)
    assert meet(line_through(e(1), e(2)), line_through(e(2), e(3))) == e(2)
    assert meet(line_through(ProjPoint([1, 1, 0]), e(3)), line_through(e(1), e(2))) == ProjPoint([1, 1, 0])
    with pytest.raises(CoincidentLines):
        meet(ProjLine([1, 2, 3]), ProjLine([2, 4, 6]))


def test_apply_examples():
    x = ProjPoint([1, 2j, -3])
    assert apply(ProjTransform(np.eye(3)), x) == x
    a = 1.7 + 0.4j
    g = ProjTransform(np.diag([a, a, a ** -2]))
    assert apply(g, e(3)) == e(3)
    for t in np.linspace(0, 2 * np.pi, 7):
        p = ProjPoint([np.cos(t), np.exp(1j * t), 0])
        assert apply(g, p) == p
    B = ProjTransform(B_PERM)
    assert apply_line(B, line_through(e(1), e(2))) == line_through(e(3), e(2))


def test_fs_distance_examples():
    assert fs_distance(e(1), e(1)) == 0
    assert fs_distance(e(1), e(2)) == pytest.approx(math.pi / 2)
    assert fs_distance(e(1), ProjPoint([1, 1, 0])) == pytest.approx(math.pi / 4)


def test_cross_ratio_examples():
    assert cross_ratio(0, math.inf, 1, 2) == pytest.approx(0.5)
    p = 3 - 2j
    assert cross_ratio(0, math.inf, 1, p) == pytest.approx(1 / p)
    with pytest.raises(DegenerateQuadruple):
        cross_ratio(1, 1, 1, 2)


def test_circle_images():
    C = GenCircle.disk(0, 1)
    img = mobius_circle_image(MobiusMap(np.diag([2, 1])), C)
    assert img.center == pytest.approx(0) and img.radius == pytest.approx(2)
    m1 = MobiusMap([[1 + 1j, -1j], [1j, 1 - 1j]])
    img = mobius_circle_image(m1, GenCircle.disk(1 + 1j, 1))
    target = GenCircle.disk(1 - 1j, 1)
    assert img.same_circle(target) and img.side == -target.side
    m3 = MobiusMap([[3j, 10j], [1j, 3j]])
    img = mobius_circle_image(m3, GenCircle.disk(-3, 1))
    target = GenCircle.disk(3, 1)
    assert img.same_circle(target) and img.side == -target.side


def test_degenerate_inputs():
    with pytest.raises(DegenerateInput):
        ProjPoint([0, 0, 0])
    with pytest.raises(DegenerateInput):
        ProjTransform(np.zeros((3, 3)))
    with pytest.raises(DegenerateInput):
        GenCircle([[1, 0], [0, 1]])        # empty circle |z|^2 + 1 = 0


def test_unimodular_lift():
    g = ProjTransform(np.diag([2.0, 3.0, 5.0]))
    assert g.det_residual() <= 1e-12
    assert g == ProjTransform(7 * np.diag([2.0, 3.0, 5.0]))


@given(triples)
def test_canonicalize_idempotent(v):
    c = canonicalize(np.array(v))
    assert np.array_equal(canonicalize(c), c)


@given(st.integers(0, 2 ** 32 - 1), triples)
def test_apply_inverse(seed, v):
    g = ProjTransform(random_unimodular(np.random.default_rng(seed)))
    x = ProjPoint(v)
    y = apply(g, apply(g.inverse(), x))
    assert fs_distance(x, y) <= 1e-9


@given(st.integers(0, 2 ** 32 - 1), triples, triples)
def test_incidence_preserved(seed, a, b):
    p, q = ProjPoint(a), ProjPoint(b)
    if fs_distance(p, q) < 1e-3:
        return
    l = line_through(p, q)
    g = ProjTransform(random_unimodular(np.random.default_rng(seed)))
    assert abs(np.dot(apply_line(g, l).coords, apply(g, p).coords)) <= 1e-9


@given(st.lists(cpx, min_size=4, max_size=4, unique=True), st.integers(0, 2 ** 32 - 1))
def test_cross_ratio_invariant(zs, seed):
    h = [homog1(z) for z in zs]
    if min(abs(a[0] * b[1] - a[1] * b[0]) for i, a in enumerate(h) for b in h[i + 1:]) < 1e-2:
        return
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    if np.linalg.cond(M) > 1e3:
        return
    m = MobiusMap(M)
    imgs = [m.lift @ v for v in h]
    cr0 = cross_ratio(*zs)
    cr1 = cross_ratio(*imgs)
    if cr0 == math.inf or abs(cr0) > 1e6:
        return
    assert abs(cr1 - cr0) <= 1e-9 * max(1, abs(cr0))


@given(st.integers(0, 2 ** 32 - 1), cpx, st.floats(0.1, 5))
def test_circle_image_composition(seed, c, r):
    rng = np.random.default_rng(seed)
    ms = []
    for _ in range(2):
        M = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        if np.linalg.cond(M) > 1e2:
            return
        ms.append(MobiusMap(M))
    C = GenCircle.disk(c, r)
    a = mobius_circle_image(ms[1] @ ms[0], C)
    b = mobius_circle_image(ms[1], mobius_circle_image(ms[0], C))
    assert a.same_circle(b, 1e-9) and a.side == b.side
