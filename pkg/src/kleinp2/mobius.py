"""Subgroups of PSL(2,C): classification, the Cr group, elementary-type
certificates and loxodromic fixed-point clouds."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import DegenerateQuadruple, PreconditionViolation
from .projective import (MobiusMap, canonical_rows, canonicalize, cross_ratio,
                         from_homog1, homog1, projector_embedding)
from .spectral import RotationKind, rotation_kind
from .words import Word, WordTable, enumerate_group

ROOTS2 = (1.0, -1.0)


# ---------------------------------------------------------------- classification

@dataclass(frozen=True)
class MobiusClass:
    kind: str                           # IDENTITY, ELLIPTIC, PARABOLIC, LOXODROMIC
    trace_sq: complex
    rotation: RotationKind | None = None  # for elliptic maps: the multiplier at a fixed point

    def __str__(self):
        return self.kind if self.rotation is None else f"{self.kind}({self.rotation})"


def mobius_classify(m: MobiusMap, tol: Tolerances = DEFAULT_TOL) -> MobiusClass:
    t2 = m.trace_sq
    if m.is_identity():
        return MobiusClass("IDENTITY", t2)
    scale = max(1.0, abs(t2))
    if abs(t2 - 4) <= tol.tr * scale:
        return MobiusClass("PARABOLIC", t2)
    if abs(t2.imag) <= tol.tr * scale and -tol.tr * scale <= t2.real < 4:
        return MobiusClass("ELLIPTIC", t2, rotation_kind(_multiplier(m), tol=tol))
    return MobiusClass("LOXODROMIC", t2)


def _multiplier(m: MobiusMap) -> complex:
    """Derivative at the fixed point of the first eigenvalue: lambda1 / lambda2."""
    tr = complex(np.trace(m.lift))
    r = cmath.sqrt(tr * tr - 4)
    l1 = (tr + r) / 2
    l2 = (tr - r) / 2
    if abs(l1) < abs(l2):
        l1, l2 = l2, l1
    return l1 / l2


def fixed_points(m: MobiusMap, tol: Tolerances = DEFAULT_TOL) -> list[np.ndarray]:
    """Canonical homogeneous fixed points (one for parabolic maps, none for the identity)."""
    k = mobius_classify(m, tol).kind
    if k == "IDENTITY":
        return []
    if k == "PARABOLIC":
        a, b = m.lift[0]
        c, d = m.lift[1]
        v = np.array([a - d, 2 * c]) if abs(c) > abs(b) else np.array([2 * b, d - a])
        if np.linalg.norm(v) <= 1e-14 * max(1.0, float(np.abs(m.lift).max())):
            v = np.array([1, 0], complex)
        return [canonicalize(v)]
    w, V = np.linalg.eig(m.lift)
    return [canonicalize(V[:, i]) for i in range(2)]


def derivative(m: MobiusMap, z) -> complex:
    """m'(z) = 1 / (c z + d)^2 for a determinant-one lift; z finite."""
    c, d = m.lift[1]
    return complex(1 / (c * complex(z) + d) ** 2)


def rotation_about(m: MobiusMap, z) -> float:
    """Rotation (in turns, mod 1) of m about its finite fixed point z."""
    return (cmath.phase(derivative(m, z)) / (2 * math.pi)) % 1.0


# ---------------------------------------------------------------- elliptic maps and their fixed-point predicates

def elliptic_with_fixed_points(p, theta: float, tol: Tolerances = DEFAULT_TOL) -> MobiusMap:
    """Elliptic map fixing 1 and p that rotates by 2 pi theta about p."""
    p = complex(p)
    if abs(p - 1) <= tol.cmp:
        raise PreconditionViolation("fixed points 1 and p must differ")
    lam = cmath.exp(1j * math.pi * theta)
    lb = lam.conjugate()
    k = 1 / (p - 1)
    M = np.array([[(p * lb - lam) * k, p * (lam - lb) * k],
                  [(lb - lam) * k, (p * lam - lb) * k]])
    if np.trace(M).real < 0:
        M = -M
    return MobiusMap.from_lift(M, tol)


def elliptic_fixed_point_predicates(m: MobiusMap, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Both sides of the three equivalences for an elliptic map fixing 1 and p.

    Keys: a_eq_conj_d / p_real, abs_a_eq_1 / p_zero, abs_a_lt_1 / p_negative.
    The second fixed point p is recovered from the map.
    """
    if abs(m(1) - 1) > 1e-9:
        raise PreconditionViolation("the map must fix 1")
    pts = [from_homog1(v) for v in fixed_points(m, tol)]
    others = [z for z in pts if z == math.inf or abs(z - 1) > 1e-7]
    if not others or others[0] == math.inf:
        raise PreconditionViolation("need a finite second fixed point")
    p = others[0]
    a, d = m.lift[0, 0], m.lift[1, 1]
    t = 1e-9
    p_real = abs(p.imag) <= t
    return {
        "p": [p.real, p.imag],
        "a_eq_conj_d": bool(abs(a - np.conj(d)) <= t),
        "p_real": bool(p_real),
        "abs_a_eq_1": bool(abs(abs(a) - 1) <= t),
        "p_zero": bool(abs(p) <= t),
        "abs_a_lt_1": bool(abs(a) < 1 - t),
        "p_negative": bool(p_real and p.real < -t),
    }


# ---------------------------------------------------------------- loxodromic tests

def cross_ratio_loxodromic_test(fix1, fix2, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Cross ratio of two elliptic fixed-point pairs and whether it forces a loxodromic.

    Guaranteed unless the cross ratio lies within tol.axis of the closed
    negative real axis.
    """
    h = [canonicalize(homog1(z)) for z in (*fix1, *fix2)]
    for u in h[:2]:
        for v in h[2:]:
            if abs(u[0] * v[1] - u[1] * v[0]) <= tol.cmp:
                raise DegenerateQuadruple("the two fixed-point pairs share a point")
    cr = cross_ratio(fix1[0], fix1[1], fix2[0], fix2[1], tol)
    s = max(1.0, abs(cr))
    on_axis = abs(cr.imag) <= tol.axis * s and cr.real <= tol.axis * s
    return {"guaranteed_loxodromic": not on_axis, "cr": cr}


def parabolic_pair_witness(g1: MobiusMap, g2: MobiusMap, m_max: int = 10_000,
                           tol: Tolerances = DEFAULT_TOL) -> dict:
    """Smallest m >= 1 with g2^m g1 loxodromic, for parabolics with distinct fixed points."""
    for g in (g1, g2):
        if mobius_classify(g, tol).kind != "PARABOLIC":
            raise PreconditionViolation("both maps must be parabolic")
    f1 = fixed_points(g1, tol)[0]
    f2 = fixed_points(g2, tol)[0]
    if abs(f1[0] * f2[1] - f1[1] * f2[0]) <= tol.cmp:
        raise PreconditionViolation("the parabolic fixed points coincide")
    h = g2
    for m in range(1, m_max + 1):
        w = h @ g1
        c = mobius_classify(w, tol)
        if c.kind == "LOXODROMIC":
            return {"m": m, "trace_sq": c.trace_sq}
        h = h @ g2
    raise PreconditionViolation(f"no loxodromic found up to m = {m_max}")


# ---------------------------------------------------------------- the Cr group

@dataclass(frozen=True)
class CrElement:
    """z -> (a z - conj c) / (c z + conj a) with |a|^2 + |c|^2 = 1."""
    a: complex
    c: complex

    def matrix(self) -> np.ndarray:
        a, c = self.a, self.c
        return np.array([[a, -np.conj(c)], [c, np.conj(a)]])

    def mobius(self) -> MobiusMap:
        return MobiusMap.from_lift(self.matrix())

    def __mul__(self, other: "CrElement") -> "CrElement":
        # [[a, -c*], [c, a*]] [[b, -d*], [d, b*]]
        a, c, b, d = self.a, self.c, other.a, other.c
        return CrElement(a * b - np.conj(c) * d, c * b + np.conj(a) * d)

    def fixed_points(self) -> tuple[complex, complex]:
        """Roots of c z^2 + (conj a - a) z + conj c = 0 (requires c != 0)."""
        a, c = self.a, self.c
        B = np.conj(a) - a
        r = cmath.sqrt(B * B - 4 * c * np.conj(c))
        return ((-B + r) / (2 * c), (-B - r) / (2 * c))


def random_cr(rng: np.random.Generator) -> CrElement:
    v = rng.standard_normal(4)
    v /= np.linalg.norm(v)
    return CrElement(complex(v[0], v[1]), complex(v[2], v[3]))


def cr_membership(m: MobiusMap, tol: float = 1e-9) -> CrElement | None:
    """The Cr(-1) form of m, or None.

    A unit rescaling of a determinant-one lift that keeps determinant 1 is
    +-1, and the Cr shape is sign invariant, so the lift is tested directly.
    """
    M = m.lift
    s = max(1.0, float(np.abs(M).max()))
    if abs(M[1, 1] - np.conj(M[0, 0])) <= tol * s and abs(M[0, 1] + np.conj(M[1, 0])) <= tol * s:
        return CrElement(complex(M[0, 0]), complex(M[1, 0]))
    return None


def cr_p_coefficients(p: float, x: float) -> tuple[complex, complex]:
    """a(x), c(x) of the local chart of Cr(p)."""
    if not p < 0:
        raise PreconditionViolation("p must be negative")
    if not 0 < x < 1:
        raise PreconditionViolation("x must lie in (0, 1)")
    s = math.sqrt(1 - x * x)
    a = (x * (p - 1) - 1j * (p + 1) * s) / (p - 1)
    c = -2j * s / (p - 1)
    return a, c


def cr_p_generator(p: float, x: float) -> MobiusMap:
    """gamma_x(z) = (|a| z + |a| p conj(c) / a) / ((c a / |a|) z + |a|) in Cr(p)."""
    a, c = cr_p_coefficients(p, x)
    r = abs(a)
    M = np.array([[r, r * p * np.conj(c) / a], [c * a / r, r]])
    return MobiusMap(M)


def cr_p_fixed_point(p: float, x: float) -> complex:
    """z_x = i |a| sqrt(1 - |a|^2) / (c a); the other fixed point is -z_x."""
    a, c = cr_p_coefficients(p, x)
    r = abs(a)
    return 1j * r * math.sqrt(max(0.0, 1 - r * r)) / (c * a)


def cr_p_trace_function(p: float, x: float) -> float:
    """f(x) = (-8 p x^2 + p^2 + 6 p + 1) / (p - 1)^2."""
    return (-8 * p * x * x + p * p + 6 * p + 1) / (p - 1) ** 2


def conjugate_to_cr_minus1(p: float, x: float) -> MobiusMap:
    """kappa^-1 gamma_x kappa with kappa(z) = w z and w = -z_x."""
    w = -cr_p_fixed_point(p, x)
    g = cr_p_generator(p, x)
    K = np.array([[w, 0], [0, 1]])
    Kinv = np.array([[1, 0], [0, w]])
    return MobiusMap(Kinv @ g.lift @ K)


# ---------------------------------------------------------------- enumeration helpers

def enumerate_mobius(gens: Sequence[MobiusMap], depth: int, tol: Tolerances = DEFAULT_TOL,
                     cap: int = 2_000_000) -> WordTable:
    return enumerate_group([g.lift for g in gens], depth, ROOTS2, tol, cap)


def _batch_kinds(mats: np.ndarray, tol: Tolerances) -> np.ndarray:
    """Vectorized tr^2 classification: 0 identity, 1 elliptic, 2 parabolic, 3 loxodromic."""
    tr = mats[:, 0, 0] + mats[:, 1, 1]
    t2 = tr * tr
    scale = np.maximum(1.0, np.abs(t2))
    off = np.abs(mats - np.eye(2)[None]).max(axis=(1, 2))
    off2 = np.abs(mats + np.eye(2)[None]).max(axis=(1, 2))
    ident = np.minimum(off, off2) <= tol.cmp * np.maximum(1.0, np.abs(mats).max(axis=(1, 2)))
    para = np.abs(t2 - 4) <= tol.tr * scale
    ell = (np.abs(t2.imag) <= tol.tr * scale) & (t2.real >= -tol.tr * scale) & (t2.real < 4)
    k = np.full(len(mats), 3)
    k[ell] = 1
    k[para] = 2
    k[ident] = 0
    return k


def _eig_fixed(mats: np.ndarray) -> np.ndarray:
    """Both fixed points of each (non-parabolic) map, as (2N, 2) unit rows."""
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    tr = a + d
    r = np.sqrt(tr * tr - 4 + 0j)
    out = []
    for lam in ((tr + r) / 2, (tr - r) / 2):
        v1 = np.stack([b, lam - a], axis=1)
        v2 = np.stack([lam - d, c], axis=1)
        n1 = np.linalg.norm(v1, axis=1)
        n2 = np.linalg.norm(v2, axis=1)
        v = np.where((n1 >= n2)[:, None], v1, v2)
        out.append(v)
    return np.concatenate(out)


# ---------------------------------------------------------------- Greenberg clouds and circle fits

@dataclass
class P1Cloud:
    """Unit homogeneous points on the projective line with the word length that produced them."""
    points: np.ndarray
    word_length: np.ndarray
    resolution: float

    def __len__(self):
        return len(self.points)

    def affine(self) -> list:
        return [from_homog1(v) for v in self.points]


@dataclass(frozen=True)
class CircleFit:
    H: np.ndarray            # Hermitian coefficient matrix, unit norm
    residual: float          # RMS algebraic residual on unit representatives
    compatible: bool
    n_points: int


def circle_fit(points: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> CircleFit | None:
    """Least-squares generalized circle through homogeneous points (unit-norm coefficients)."""
    V = np.asarray(points, dtype=complex)
    if len(V) < 3:
        return None
    V = V / np.linalg.norm(V, axis=1, keepdims=True)
    w = np.conj(V[:, 0]) * V[:, 1]
    R = np.stack([np.abs(V[:, 0]) ** 2, 2 * w.real, -2 * w.imag, np.abs(V[:, 1]) ** 2], axis=1)
    _, s, vh = np.linalg.svd(R, full_matrices=False)
    A, Br, Bi, C = vh[-1]
    H = np.array([[A, Br + 1j * Bi], [Br - 1j * Bi, C]])
    resid = float(s[-1] / math.sqrt(len(V)))
    nondeg = Br * Br + Bi * Bi - A * C > 0
    return CircleFit(H, resid, bool(resid <= tol.circle and nondeg), len(V))


def dedup_p1(points: np.ndarray, lengths: np.ndarray, resolution: float):
    """Keep the first point of each resolution-sized cell of the projector embedding."""
    if len(points) == 0:
        return points, lengths
    emb = projector_embedding(points)
    side = math.sqrt(2) * math.sin(resolution) / math.sqrt(emb.shape[1])
    q = np.floor(emb / side).astype(np.int64)
    _, idx = np.unique(q, axis=0, return_index=True)
    idx = np.sort(idx)
    return points[idx], lengths[idx]


def greenberg_limit_approx(gens: Sequence[MobiusMap], depth: int, tol: Tolerances = DEFAULT_TOL,
                           resolution: float = 1e-6, cap: int = 2_000_000,
                           table: WordTable | None = None,
                           parabolic: bool = False) -> tuple[P1Cloud, CircleFit | None]:
    """Fixed points of loxodromic reduced words up to depth, plus a circle fit.

    With ``parabolic`` the fixed points of parabolic words are added; they lie
    in the closure of the loxodromic ones but are approached only slowly.
    """
    table = table if table is not None else enumerate_mobius(gens, depth, tol, cap)
    kinds = _batch_kinds(table.mats, tol)
    lox = np.nonzero((kinds == 3) | ((kinds == 2) & parabolic))[0]
    lens = table.lengths()
    if lox.size == 0:
        return P1Cloud(np.zeros((0, 2), complex), np.zeros(0, int), resolution), None
    pts = canonical_rows(_eig_fixed(table.mats[lox]))
    L = np.concatenate([lens[lox], lens[lox]])
    order = np.argsort(np.concatenate([lox, lox]), kind="stable")
    pts, L = dedup_p1(pts[order], L[order], resolution)
    cloud = P1Cloud(pts, L, resolution)
    return cloud, circle_fit(pts, tol)


# ---------------------------------------------------------------- elementary certificates

@dataclass
class ElementaryCertificate:
    type: str                               # DIH_INF, CR, EPA, MOB_CSTAR, NON_ELEMENTARY, UNDETERMINED
    conjugator: MobiusMap | None = None
    depth: int = 0
    witnesses: list = field(default_factory=list)
    note: str = ""

    def to_json(self) -> dict:
        out = {"type": self.type, "depth": self.depth, "witnesses": self.witnesses}
        if self.conjugator is not None:
            out["conjugator"] = self.conjugator.to_json()
        if self.note:
            out["note"] = self.note
        return out


def _same_pt(u, v, t=1e-6) -> bool:
    return abs(u[0] * v[1] - u[1] * v[0]) <= t


def _add_point(pts: list, v) -> None:
    if not any(_same_pt(u, v) for u in pts):
        pts.append(v)


def _frame(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Conjugator T with T(q1) = 0 and T(q2) = infinity."""
    S = np.column_stack([q2, q1])
    return np.linalg.inv(S)


def _conj_all(T: np.ndarray, mats: np.ndarray) -> np.ndarray:
    Ti = np.linalg.inv(T)
    out = np.einsum("ij,njk,kl->nil", T, mats, Ti)
    det = out[:, 0, 0] * out[:, 1, 1] - out[:, 0, 1] * out[:, 1, 0]
    return out / np.sqrt(det)[:, None, None]


def _preserves(m: np.ndarray, pair) -> bool:
    for v in pair:
        w = m @ v
        w = w / np.linalg.norm(w)
        if not any(_same_pt(w, u, 1e-8) for u in pair):
            return False
    return True


def _dih_shape(M, unit: bool, t=1e-8) -> bool:
    s = max(1.0, float(np.abs(M).max()))
    diag = abs(M[0, 1]) <= t * s and abs(M[1, 0]) <= t * s
    anti = abs(M[0, 0]) <= t * s and abs(M[1, 1]) <= t * s
    if diag:
        return (not unit) or abs(abs(M[0, 0]) - abs(M[1, 1])) <= t * s
    if anti:
        return (not unit) or abs(abs(M[0, 1]) - abs(M[1, 0])) <= t * s
    return False


def _epa_shape(M, t=1e-8) -> bool:
    s = max(1.0, float(np.abs(M).max()))
    return abs(M[1, 0]) <= t * s and abs(abs(M[0, 0]) - abs(M[1, 1])) <= t * s


def _invariant_hermitian(gens: np.ndarray) -> np.ndarray | None:
    """Positive definite H with g* H g = H for every generator, if one exists."""
    basis = [np.array([[1, 0], [0, 0]], complex), np.array([[0, 1], [1, 0]], complex),
             np.array([[0, 1j], [-1j, 0]], complex), np.array([[0, 0], [0, 1]], complex)]
    rows = []
    for g in gens:
        cols = [(g.conj().T @ E @ g - E).reshape(-1) for E in basis]
        Mx = np.stack(cols, axis=1)
        rows += [Mx.real, Mx.imag]
    A = np.vstack(rows)
    _, s, vh = np.linalg.svd(A)
    null = vh[s <= 1e-9 * max(1.0, s[0])]
    cands = list(null) + ([null.sum(axis=0)] if len(null) > 1 else [])
    for v in cands:
        for sign in (1, -1):
            H = sign * sum(c * E for c, E in zip(v, basis))
            ev = np.linalg.eigvalsh(H)
            if ev.min() > 1e-9 * ev.max() > 0:
                return H
    return None


def elementary_certificate(gens: Sequence[MobiusMap], depth: int,
                           tol: Tolerances = DEFAULT_TOL) -> ElementaryCertificate:
    """Bounded-depth search for the elementary type of the group generated by gens.

    Non-elliptic fixed points (of parabolic and loxodromic words) lie outside
    the equicontinuity region; three of them certify NON_ELEMENTARY.  Fewer
    lead to the EPA / MOB_CSTAR / DIH_INF / CR tests, each confirmed by
    conjugating every enumerated word into the normal form.
    """
    table = enumerate_mobius(gens, depth, tol)
    mats = table.mats
    kinds = _batch_kinds(mats, tol)
    G = np.array([g.lift for g in gens]).reshape(-1, 2, 2)
    cert = lambda t, **kw: ElementaryCertificate(t, depth=depth, **kw)

    F, fwit = [], []
    for i in np.nonzero(kinds >= 2)[0]:
        if len(F) >= 3:
            break
        m = MobiusMap.from_lift(mats[i], tol)
        for v in fixed_points(m, tol):
            n = len(F)
            _add_point(F, v)
            if len(F) > n:
                fwit.append(table.words[i])
    if len(F) == 2 and not np.any(kinds == 3):
        # two parabolics with distinct fixed points generate a loxodromic
        para = [i for i in np.nonzero(kinds == 2)[0]]
        fx = [fixed_points(MobiusMap.from_lift(mats[i], tol), tol)[0] for i in para]
        j = next(k for k in range(len(para)) if not _same_pt(fx[k], fx[0]))
        g1 = MobiusMap.from_lift(mats[para[0]], tol)
        g2 = MobiusMap.from_lift(mats[para[j]], tol)
        w = parabolic_pair_witness(g1, g2, tol=tol)
        lox = (g2 ** w["m"]) @ g1
        for v in fixed_points(lox, tol):
            _add_point(F, v)
    names = [f"g{k}" for k in range(len(gens))]
    if len(F) >= 3:
        return cert("NON_ELEMENTARY", witnesses=[w.format(names) for w in fwit[:3]],
                    note="three distinct non-elliptic fixed points")
    if len(F) == 2:
        if all(_preserves(g, F) for g in G):
            T = _frame(F[0], F[1])
            if all(_dih_shape(M, unit=False) for M in _conj_all(T, mats)):
                return cert("MOB_CSTAR", conjugator=MobiusMap(T), witnesses=[w.format(names) for w in fwit])
        return cert("UNDETERMINED", note="two non-elliptic fixed points not preserved by the generators")
    if len(F) == 1:
        if all(_preserves(g, F) for g in G):
            q = F[0]
            u = np.array([-np.conj(q[1]), np.conj(q[0])])
            T = np.linalg.inv(np.column_stack([q, u]))
            if all(_epa_shape(M) for M in _conj_all(T, mats)):
                return cert("EPA", conjugator=MobiusMap(T), witnesses=[w.format(names) for w in fwit])
        return cert("UNDETERMINED", note="parabolic fixed point not common to the generators")

    # purely elliptic so far: look for an invariant pair, then an invariant Hermitian form
    pairs = []
    for i in np.nonzero(kinds == 1)[0]:
        pr = fixed_points(MobiusMap.from_lift(mats[i], tol), tol)
        if len(pr) == 2 and not any(all(any(_same_pt(a, b) for b in q) for a in pr) for q in pairs):
            pairs.append(pr)
    if not pairs:
        return cert("DIH_INF", conjugator=MobiusMap(np.eye(2)), note="trivial group")
    for pr in pairs:
        if all(_preserves(g, pr) for g in G):
            T = _frame(pr[0], pr[1])
            conj = _conj_all(T, G)
            swap = [M for M in conj if abs(M[0, 0]) <= 1e-8 * np.abs(M).max()]
            if swap:
                s = math.sqrt(abs(swap[0][1, 0] / swap[0][0, 1]))
                T = np.diag([s, 1.0]) @ T
            if all(_dih_shape(M, unit=True) for M in _conj_all(T, mats)):
                return cert("DIH_INF", conjugator=MobiusMap(T))
    H = _invariant_hermitian(G)
    if H is not None:
        w, U = np.linalg.eigh(H)
        T = U @ np.diag(np.sqrt(w)) @ U.conj().T
        if all(cr_membership(MobiusMap.from_lift(M), 1e-8) is not None for M in _conj_all(T, mats)):
            return cert("CR", conjugator=MobiusMap(T), note="invariant positive Hermitian form")
    return cert("UNDETERMINED")
