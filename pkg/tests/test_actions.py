import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.spatial import cKDTree

from kleinp2.actions import (ConeSet, GroupSpec, SchottkyPairing, cluster_oracle,
                             control_projection, enumerate_words, finiteness_heuristic, fixed_set,
                             hausdorff_one_sided, homomorphism_defect, line_coverage,
                             region_relation, schottky_certificate, word_table)
from kleinp2.config import DEFAULT_TOL
from kleinp2.errors import BudgetExceeded, EmptyDomain, NotControllable, PreconditionViolation
from kleinp2.gallery import (B_PERM, MOB1, MOB2, MOB3, kissing_disks, make_gamma_a,
                             make_kissing_schottky)
from kleinp2.projective import (GenCircle, ProjLine, ProjPoint, ProjTransform, e,
                                fs_from_chord, line_through, plane_grid, point_line_distance,
                                projector_embedding)
from kleinp2.words import Word

from conftest import random_unimodular


@pytest.fixture(scope="module")
def ks():
    return make_kissing_schottky()


def test_single_generator_words():
    g = random_unimodular(np.random.default_rng(1))
    spec = GroupSpec.of({"g": g})
    out = list(enumerate_words(spec, 5))
    assert len(out) == 11
    got = sorted(sum(e for _, e in w.letters) for w, _ in out)
    assert got == list(range(-5, 6))


def test_gamma_a_count():
    # count from the normal form B^k diag(a^e): exact integer bookkeeping of
    # (k, e) over all reduced words of length <= 3 gives 37 distinct elements
    assert len(word_table(make_gamma_a(2), 3)) == 37


@pytest.mark.parametrize("L", [1, 2, 3, 4])
def test_free_group_count(L):
    rng = np.random.default_rng(7)
    spec = GroupSpec.of({"a": random_unimodular(rng), "b": random_unimodular(rng)})
    assert len(word_table(spec, L)) == 2 * 3 ** L - 1


def test_enumeration_order_and_determinism():
    rng = np.random.default_rng(9)
    spec = GroupSpec.of({"a": random_unimodular(rng), "b": random_unimodular(rng)})
    a = list(enumerate_words(spec, 3))
    b = list(enumerate_words(spec, 3))
    assert [w for w, _ in a] == [w for w, _ in b]
    assert all(np.array_equal(x.lift, y.lift) for (_, x), (_, y) in zip(a, b))
    keys = [(len(w), w.codes()) for w, _ in a]
    assert keys == sorted(keys)
    assert all(w.reduced for w, _ in a)


def test_budget():
    rng = np.random.default_rng(9)
    spec = GroupSpec.of({"a": random_unimodular(rng), "b": random_unimodular(rng)})
    with pytest.raises(BudgetExceeded):
        word_table(spec, 6, cap=100)


def test_word_algebra():
    w = Word.from_codes([0, 2, 1])
    assert w.codes() == (0, 2, 1)
    assert (w * w.inverse()).letters == ()
    assert not Word.from_codes([0, 1]).reduced


def test_oracle_identity_empty():
    spec = GroupSpec.of({"id": np.eye(3)})
    X = plane_grid(200, np.random.default_rng(0))
    oc = cluster_oracle(spec, 10, X, 5)
    assert len(oc.L0) == len(oc.L1) == len(oc.L2) == 0


def test_oracle_empty_domain():
    spec = GroupSpec.of({"g": np.diag([0.5, 1, 2])})
    with pytest.raises(EmptyDomain):
        cluster_oracle(spec, 20, np.eye(3), 10)


def test_oracle_strong_loxodromic():
    spec = GroupSpec.of({"g": np.diag([0.5, 1, 2])})
    X = plane_grid(1000, np.random.default_rng(0))
    oc = cluster_oracle(spec, 200, X, 100)
    pts = np.eye(3)
    d0 = min(1.0, 1.0)
    dist_pts = lambda P: np.min([np.arccos(np.clip(np.abs(P @ v), 0, 1)) for v in pts], axis=0)
    assert hausdorff_one_sided(oc.L0.points, dist_pts) <= 0.05
    assert hausdorff_one_sided(oc.L1.points, dist_pts) <= 0.05
    lines = [line_through(e(1), e(2)), line_through(e(2), e(3))]
    dist_lines = lambda P: np.min([np.arcsin(np.clip(np.abs(P @ l.coords), 0, 1)) for l in lines], axis=0)
    assert hausdorff_one_sided(oc.Lambda().points, dist_lines) <= 0.05
    for l in lines:
        cov = line_coverage(oc.Lambda().points, l)
        assert cov["count"] >= 50 and cov["max_gap"] <= 0.2


def test_oracle_deterministic_across_threads(ks):
    X = plane_grid(100, np.random.default_rng(0))
    a = cluster_oracle(ks.spec, 4, X, 3, threads=1)
    b = cluster_oracle(ks.spec, 4, X, 3, threads=4)
    c = cluster_oracle(ks.spec, 4, X, 3, threads=1)
    for k in ("L0", "L1", "L2"):
        assert np.array_equal(getattr(a, k).points, getattr(b, k).points)
        assert np.array_equal(getattr(a, k).points, getattr(c, k).points)


def _near(cloud_pts, Y):
    d, _ = cKDTree(projector_embedding(cloud_pts)).query(projector_embedding(Y))
    return fs_from_chord(d)


def test_cloud_invariance(ks):
    # with every base point used by every word, a generator moves an L1 point
    # (word length n, n_min < n < max_len) to an orbit point of length n +- 1,
    # and an isolated fixed point of a word of length <= max_len - 2 to a fixed
    # point of a conjugate.  Fixed lines are sampled, so only isolated fixed
    # points are checked.
    X = plane_grid(60, np.random.default_rng(0))
    max_len, n_min, delta = 5, 3, 0.01
    oc = cluster_oracle(ks.spec, max_len, X, n_min, resolution=delta)
    gens = [g.lift for g in ks.spec.gens]
    gens += [np.linalg.inv(g) for g in gens]
    P1 = oc.L1.points[oc.L1.word_length == 4]
    t = word_table(ks.spec, max_len - 2)
    iso = [f for f in (fixed_set(m) for m in t.mats[1:]) if f is not None and len(f) <= 3]
    P0 = np.vstack(iso)
    for g in gens:
        assert _near(oc.L1.points, (g @ P1.T).T).max() <= 2 * delta
        assert _near(oc.L0.points, (g @ P0.T).T).max() <= 2 * delta


@pytest.mark.slow
def test_oracle_kissing_schottky(ks):
    # cone over the Moebius limit set, sampled at depth 7 with parabolic points
    X = plane_grid(1000, np.random.default_rng(0))
    oc = cluster_oracle(ks.spec, 7, X, 6)
    pred = ks.predicted_limit_set(7)
    for k in ("L0", "L1", "L2"):
        assert hausdorff_one_sided(getattr(oc, k).points, pred.distance) <= 0.05, k


def test_cone_distance_bruteforce():
    rng = np.random.default_rng(4)
    base = rng.standard_normal((30, 2)) + 1j * rng.standard_normal((30, 2))
    cone = ConeSet(base)
    X = plane_grid(200, rng)
    lines = [ProjLine(np.cross(np.append(b, 0), [0, 0, 1])) for b in base]
    brute = np.array([min(point_line_distance(x, l.coords) for l in lines) for x in X])
    assert np.allclose(cone.distance(X), brute, atol=1e-9)


def test_control_projection_kissing(ks):
    cp = control_projection(ks.spec)
    for m, target in zip(cp.maps, (MOB1, MOB2, MOB3)):
        assert m == target
    assert homomorphism_defect(ks.spec, 1000, 8, seed=0) <= 1e-10


def test_control_projection_rejects():
    spec = GroupSpec(make_gamma_a(2).names, make_gamma_a(2).gens, e(1), ProjLine([1, 0, 0]))
    with pytest.raises(PreconditionViolation):
        control_projection(spec)
    with pytest.raises(NotControllable):
        control_projection(make_gamma_a(2))


def test_schottky_kissing(ks):
    rep = schottky_certificate(ks.spec, ks.pairing)
    assert rep["valid"] and rep["kissing"]
    assert all(g["side_flipped"] and g["circle_gap"] <= 1e-9 for g in rep["generators"])
    kinds = {g["generator"]: g["mobius"] for g in rep["generators"]}
    assert kinds == {"M1": "PARABOLIC", "M2": "PARABOLIC", "M_eps": "LOXODROMIC"}
    tangent = {(p["a"], p["b"]) for p in rep["pairs"] if p["tangent"]}
    assert ("R[M1]", "R[M2]") in tangent and ("R[M1]", "S[M1]") in tangent


def test_schottky_identity_invalid(ks):
    spec = GroupSpec(("M1", "M2", "M_eps"), (ProjTransform(np.eye(3)),) + ks.spec.gens[1:],
                     ks.spec.point, ks.spec.line)
    assert not schottky_certificate(spec, ks.pairing)["valid"]


def test_schottky_perturbed(ks):
    D = lambda c, r=1.0: GenCircle.disk(c, r)
    triples = list(kissing_disks())
    triples[0] = ("M1", D(1 + 1j, 1.5), D(1 - 1j))
    rep = schottky_certificate(ks.spec, SchottkyPairing(tuple(triples)))
    assert not rep["valid"]
    assert any(not p["disjoint"] for p in rep["pairs"])


def test_schottky_not_controllable(ks):
    spec = GroupSpec(ks.spec.names, ks.spec.gens)
    with pytest.raises(NotControllable):
        schottky_certificate(spec, ks.pairing)


def test_region_relation():
    D = GenCircle.disk
    assert region_relation(D(0, 1), D(3, 1))["disjoint"]
    r = region_relation(D(0, 1), D(2, 1))
    assert r["disjoint"] and r["tangent"]
    assert not region_relation(D(0, 1), D(1, 1))["disjoint"]
    assert region_relation(D(0, 1), D(0, 2, inside=False))["disjoint"]
    assert not region_relation(D(0, 1, inside=False), D(5, 1, inside=False))["disjoint"]


def test_finiteness(ks):
    r = finiteness_heuristic(make_gamma_a(2), 3)
    assert r["status"] == "INFINITE" and r["witness"] == "M_a"
    r = finiteness_heuristic(GroupSpec.of({"B": B_PERM}), 10)
    assert r["status"] == "UNDETERMINED"
    r = finiteness_heuristic(ks.spec, 2)
    assert r["status"] == "INFINITE" and r["witness"] == "M_eps"
    r = finiteness_heuristic(GroupSpec.of({"u": [[1, 1, 0], [0, 1, 0], [0, 0, 1]]}), 2)
    assert r["status"] == "INFINITE"


@given(st.integers(0, 2 ** 32 - 1))
def test_groupspec_json_roundtrip(seed):
    rng = np.random.default_rng(seed)
    spec = GroupSpec.of({"a": random_unimodular(rng), "b": random_unimodular(rng)},
                        point=ProjPoint(rng.standard_normal(3)), line=ProjLine(rng.standard_normal(3)))
    back = GroupSpec.from_json(spec.to_json())
    assert back.names == spec.names
    assert all(np.array_equal(x.lift, y.lift) for x, y in zip(back.gens, spec.gens))
    assert np.array_equal(back.point.coords, spec.point.coords)
