"""Finitely generated subgroups of PSL(3,C): words, orbit clouds, the control
projection to a Moebius group, finiteness checks and Schottky certificates."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .config import DEFAULT_TOL, Tolerances
from .cyclic import ElementKind, LimitSetDesc, classify
from .errors import EmptyDomain, IllConditionedWarning, NotControllable, PreconditionViolation
from .mobius import mobius_classify
from .projective import (GenCircle, MobiusMap, ProjLine, ProjPoint, ProjTransform,
                         aligned_distance, canonical_rows, chord, fs_from_chord,
                         homog1, line_points, mobius_circle_image, projector_embedding)
from .spectral import JordanShape, eigen_decompose, rotation_kind
from .words import Word, WordTable, enumerate_group, random_reduced_word

ROOTS3 = (1.0, np.exp(2j * np.pi / 3), np.exp(4j * np.pi / 3))


# ---------------------------------------------------------------- group specifications

@dataclass(frozen=True)
class GroupSpec:
    """Named generators, optionally with a fixed point p and a line l not through p."""
    names: tuple[str, ...]
    gens: tuple[ProjTransform, ...]
    point: ProjPoint | None = None
    line: ProjLine | None = None

    def __post_init__(self):
        if len(self.names) != len(self.gens):
            raise ValueError("one name per generator")
        if len(set(self.names)) != len(self.names):
            raise ValueError("generator names must be unique")

    @classmethod
    def of(cls, named: dict, point=None, line=None) -> "GroupSpec":
        gens = tuple(g if isinstance(g, ProjTransform) else ProjTransform(g) for g in named.values())
        return cls(tuple(named), gens, point, line)

    def lifts(self) -> list[np.ndarray]:
        return [g.lift for g in self.gens]

    def generator(self, name: str) -> ProjTransform:
        return self.gens[self.names.index(name)]

    def evaluate(self, w: Word) -> ProjTransform:
        return ProjTransform.from_lift(w.evaluate(self.lifts()))

    def to_json(self) -> dict:
        out = {"generators": [{"name": n, "matrix": g.to_json()} for n, g in zip(self.names, self.gens)]}
        if self.point is not None:
            out["point"] = self.point.to_json()
        if self.line is not None:
            out["line"] = self.line.to_json()
        return out

    @classmethod
    def from_json(cls, d: dict) -> "GroupSpec":
        from .io import matrix_from_json, vector_from_json
        gens = d.get("generators", [])
        names = tuple(g.get("name", f"g{k}") for k, g in enumerate(gens))
        mats = tuple(ProjTransform(matrix_from_json(g["matrix"])) for g in gens)
        p = ProjPoint(vector_from_json(d["point"])) if d.get("point") is not None else None
        l = ProjLine(vector_from_json(d["line"])) if d.get("line") is not None else None
        return cls(names, mats, p, l)


def word_table(spec: GroupSpec, max_len: int, tol: Tolerances = DEFAULT_TOL,
               cap: int = 2_000_000) -> WordTable:
    if not spec.gens:
        return WordTable([Word()], np.eye(3, dtype=complex)[None])
    return enumerate_group(spec.lifts(), max_len, ROOTS3, tol, cap)


def enumerate_words(spec: GroupSpec, max_len: int, tol: Tolerances = DEFAULT_TOL,
                    cap: int = 2_000_000) -> Iterator[tuple[Word, ProjTransform]]:
    """Distinct elements as (shortest word, element), ordered by length then lexicographically."""
    t = word_table(spec, max_len, tol, cap)
    for w, m in zip(t.words, t.mats):
        yield w, ProjTransform.from_lift(m, tol)


# ---------------------------------------------------------------- point clouds

@dataclass
class PointCloud:
    points: np.ndarray          # (N, 3) canonical unit rows
    word_length: np.ndarray     # (N,)
    base_index: np.ndarray      # (N,) index of the base point, -1 for fixed points and grid samples
    resolution: float
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    @classmethod
    def empty(cls, resolution: float) -> "PointCloud":
        return cls(np.zeros((0, 3), complex), np.zeros(0, int), np.zeros(0, int), resolution)

    @classmethod
    def build(cls, points, lengths, bases, resolution: float, meta=None) -> "PointCloud":
        pts = np.asarray(points, dtype=complex).reshape(-1, 3)
        if len(pts) == 0:
            c = cls.empty(resolution)
            c.meta = dict(meta or {})
            return c
        pts = canonical_rows(pts)
        keep = dedup_indices(pts, resolution)
        return cls(pts[keep], np.asarray(lengths)[keep], np.asarray(bases)[keep], resolution, dict(meta or {}))

    def union(self, *others: "PointCloud") -> "PointCloud":
        clouds = (self, *others)
        return PointCloud.build(np.concatenate([c.points for c in clouds]),
                                np.concatenate([c.word_length for c in clouds]),
                                np.concatenate([c.base_index for c in clouds]), self.resolution)

    def tree(self) -> cKDTree:
        return cKDTree(projector_embedding(self.points))


def dedup_indices(points: np.ndarray, resolution: float) -> np.ndarray:
    """First point of each cell of side resolution in the projector embedding.

    Points sharing a cell are within Fubini-Study distance ``resolution``.
    """
    emb = projector_embedding(points)
    side = chord(resolution) / math.sqrt(emb.shape[1])
    q = np.floor(emb / side).astype(np.int64)
    _, idx = np.unique(q, axis=0, return_index=True)
    return np.sort(idx)


def nearest_distance(points: np.ndarray, tree: cKDTree | None, bound: float | None = None) -> np.ndarray:
    """FS distance from each row to the nearest point indexed by tree.

    With ``bound`` the search stops there and farther points report pi/2,
    which is much faster when only a threshold test is needed.
    """
    if tree is None or tree.n == 0:
        return np.full(len(points), math.pi / 2)
    ub = np.inf if bound is None else chord(bound) * (1 + 1e-12)
    d, _ = tree.query(projector_embedding(points), distance_upper_bound=ub)
    return fs_from_chord(np.minimum(d, math.sqrt(2)))


# ---------------------------------------------------------------- the cluster oracle

@dataclass
class OracleClouds:
    L0: PointCloud
    L1: PointCloud
    L2: PointCloud

    def Lambda(self) -> PointCloud:
        return self.L0.union(self.L1, self.L2)


def fixed_set(g: np.ndarray, tol: Tolerances = DEFAULT_TOL, line_samples: int = 256):
    """Points fixed by the element with lift g, if it has infinite order; else None.

    Eigenvalues are grouped relative to their own size rather than to the
    norm of g, so that high powers do not merge their small eigenvalues.
    A two-dimensional eigenspace is a fixed line, sampled with
    ``line_samples`` points.
    """
    with warnings.catch_warnings():
        # only the order is used here; a skewed Jordan basis does not matter
        warnings.simplefilter("ignore", IllConditionedWarning)
        if not classify(ProjTransform.from_lift(g, tol), tol).infinite_order:
            return None
    A = np.asarray(g, dtype=complex)
    lam = np.linalg.eigvals(A)
    floor = 1e3 * np.finfo(float).eps * np.linalg.norm(A, 2)
    groups: list[list[complex]] = []
    for v in lam:
        for gr in groups:
            if abs(v - gr[0]) <= tol.eig * max(abs(v), abs(gr[0])):
                gr.append(v)
                break
        else:
            groups.append([v])
    out = []
    for gr in groups:
        mu = np.mean(gr)
        _, s, vh = np.linalg.svd(A - mu * np.eye(3))
        thr = max(tol.rank * abs(mu), floor)
        k = max(1, int(np.sum(s <= thr))) if len(gr) > 1 else 1
        null = vh[-k:].conj()
        if k == 1:
            out.append(null)
        elif k == 2:
            out.append(line_points(ProjLine(np.cross(null[0], null[1])), line_samples))
    return np.vstack(out) if out else None


def _simple_loxodromic(mats: np.ndarray, sep: float = 1e-6):
    """Mask of elements with eigenvalues of unequal moduli, pairwise separated,
    and their three eigenvectors (shape (N, 3, 3), one per row).

    Such elements have infinite order and exactly three fixed points, so
    fixed_set reduces to one batched eig call for them.
    """
    if len(mats) == 0:
        return np.zeros(0, bool), np.zeros((0, 3, 3), complex)
    lam, V = np.linalg.eig(mats)
    a = np.abs(lam)
    spread = a.max(1) / np.maximum(a.min(1), 1e-300)
    gap = np.abs(lam[:, :, None] - lam[:, None, :]) / np.maximum(a[:, :, None], a[:, None, :])
    gap = (gap + 9 * np.eye(3)).min((1, 2))
    mask = (spread > 1 + sep) & (gap > sep)
    return mask, np.swapaxes(V, 1, 2)


def _lift_condition(mats: np.ndarray) -> np.ndarray:
    s = np.linalg.svd(mats, compute_uv=False)
    return s[:, 0] / s[:, -1]


def cluster_oracle(spec: GroupSpec, max_len: int, base_points, n_min: int, *,
                   tol: Tolerances = DEFAULT_TOL, resolution: float = 0.01,
                   exclusion: float = 0.02, samples: int = 400, seed: int = 0,
                   max_points: int = 1_000_000, line_samples: int = 256,
                   cond_max: float = 1e12, adapted_margin: float = 3.0, threads: int = 1,
                   cap: int = 2_000_000, table: WordTable | None = None) -> OracleClouds:
    """Sampled approximations of the layers L0, L1 and L2.

    L0: fixed points of enumerated infinite-order elements (elements whose
    lift condition number exceeds cond_max are skipped; their fixed points
    are numerically meaningless).
    L1: images of the base points away from the L0 cloud under words of
    length >= n_min.
    L2: images under those words of points of a compact set K that avoids
    the exclusion-neighbourhood of the L0 and L1 clouds.  K is sampled by the
    base grid and, per word, by points spread over the scales set by the
    word's singular values, so that images land all over the attracting set.
    """
    table = table if table is not None else word_table(spec, max_len, tol, cap)
    X = canonical_rows(np.asarray(base_points, dtype=complex).reshape(-1, 3))
    lens = table.lengths()
    cond = _lift_condition(table.mats)

    # L0
    pts, wl = [], []
    ok = np.arange(1, len(table))
    skipped = int(np.sum(cond[ok] > cond_max))
    ok = ok[cond[ok] <= cond_max]
    fast, vecs = _simple_loxodromic(table.mats[ok])
    if fast.any():
        pts.append(vecs[fast].reshape(-1, 3))
        wl.append(np.repeat(lens[ok[fast]], 3))
    for i in ok[~fast]:
        f = fixed_set(table.mats[i], tol, line_samples)
        if f is not None:
            pts.append(f)
            wl.append(np.full(len(f), lens[i]))
    if pts:
        L0 = PointCloud.build(np.vstack(pts), np.concatenate(wl), np.full(sum(map(len, pts)), -1),
                              resolution, {"skipped_ill_conditioned": skipped})
    else:
        L0 = PointCloud.empty(resolution)
        L0.meta = {"skipped_ill_conditioned": skipped}

    long_idx = np.nonzero(lens >= max(n_min, 1))[0]
    t0 = L0.tree() if len(L0) else None
    if len(X) and t0 is not None:
        free = nearest_distance(X, t0, exclusion) > exclusion
        if not free.any():
            raise EmptyDomain("every base point lies near the L0 cloud")
    else:
        free = np.ones(len(X), bool)
    Xf = X[free]
    base_ids = np.nonzero(free)[0]

    # L1
    rng = np.random.default_rng(seed)
    if len(long_idx) and len(Xf):
        per = max(1, min(len(Xf), max_points // len(long_idx)))
        pts, wl, bi = [], [], []
        for i in long_idx:
            sel = np.arange(len(Xf)) if per >= len(Xf) else np.sort(rng.choice(len(Xf), per, replace=False))
            Y = (table.mats[i] @ Xf[sel].T).T
            pts.append(Y)
            wl.append(np.full(len(sel), lens[i]))
            bi.append(base_ids[sel])
        L1 = PointCloud.build(np.vstack(pts), np.concatenate(wl), np.concatenate(bi), resolution)
    else:
        L1 = PointCloud.empty(resolution)

    # L2
    if len(long_idx) == 0:
        return OracleClouds(L0, L1, PointCloud.empty(resolution))
    excl = L0.union(L1) if len(L1) else L0
    t01 = excl.tree() if len(excl) else None
    grid = X[nearest_distance(X, t01, exclusion) > exclusion] if len(X) else X
    # adapted samples sit close to the repelling set of their word; where that
    # set lies in L0 u L1 the clouds have gaps, so those samples need a margin
    wide = adapted_margin * exclusion
    # per-word budget: adapted samples first, then as much of the grid as fits
    budget = max(16, max_points // len(long_idx))
    n_ad = min(samples, budget // 2)
    n_grid = min(len(grid), budget - n_ad)
    chunks = [long_idx[k:k + 64] for k in range(0, len(long_idx), 64)]

    def work(ci: int):
        r = np.random.default_rng([seed, 1, ci])
        out, ls = [], []
        for i in chunks[ci]:
            g = table.mats[i]
            ad = _svd_samples(g, n_ad, r)
            gs = grid if n_grid == len(grid) else grid[r.choice(len(grid), n_grid, replace=False)]
            cand = np.vstack([gs, ad[nearest_distance(ad, t01, wide) > wide]])
            if len(cand):
                Y = (g @ cand.T).T
                out.append(Y)
                ls.append(np.full(len(Y), lens[i]))
        return out, ls

    with ThreadPoolExecutor(max_workers=threads) as ex:
        results = list(ex.map(work, range(len(chunks))))
    pts = [y for o, _ in results for y in o]
    wl = [l for _, ls in results for l in ls]
    if pts:
        P = np.vstack(pts)
        L2 = PointCloud.build(P, np.concatenate(wl), np.full(len(P), -1), resolution)
    else:
        L2 = PointCloud.empty(resolution)
    return OracleClouds(L0, L1, L2)


def _svd_samples(g: np.ndarray, n: int, rng: np.random.Generator, spread: float = 5.0,
                 gap_min: float = 100.0) -> np.ndarray:
    """Points x whose images g x spread over the top singular line of g.

    With g = U diag(s) V*, take x = V b with b1, b2 generic, |b2| <= |b1|,
    and b0 = r (s1 / s0) b1, r log-uniform in [e^-spread, e^spread] with
    random phase.  Then g x = s1 b1 (r u0 + u1) + s2 b2 u2 lies within
    s2 / s1 of the line (u0, u1), at all positions along it.  Words with
    s1 / s2 < gap_min give no samples: their images are not yet near a line.
    """
    _, s, Vh = np.linalg.svd(g)
    if s[1] < gap_min * s[2]:
        return np.zeros((0, 3), complex)
    b = rng.standard_normal((n, 3)) + 1j * rng.standard_normal((n, 3))
    big = np.abs(b[:, 2]) > np.abs(b[:, 1])
    b[big, 2] *= np.abs(b[big, 1]) / np.abs(b[big, 2])
    r = np.exp(rng.uniform(-spread, spread, n) + 2j * np.pi * rng.uniform(0, 1, n))
    b[:, 0] = r * (s[1] / s[0]) * b[:, 1]
    x = b @ Vh.conj()                # rows: (V b)^T
    return x / np.linalg.norm(x, axis=1, keepdims=True)


# ---------------------------------------------------------------- checks against descriptions

def hausdorff_one_sided(points: np.ndarray, desc_distance) -> float:
    """max over cloud points of the distance to the described set."""
    if len(points) == 0:
        return 0.0
    return float(np.max(desc_distance(points)))


def line_coverage(points: np.ndarray, line: ProjLine, near: float = 0.05,
                  probes: int = 2000) -> dict:
    """How densely cloud points cover a line.

    ``count``: cloud points within ``near`` of the line; ``max_gap``: twice
    the largest distance from a probe point on the line to those points.
    """
    pts = np.asarray(points, dtype=complex)
    if len(pts) == 0:
        return {"count": 0, "max_gap": math.pi}
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    d = np.arcsin(np.clip(np.abs(pts @ line.coords), 0, 1))
    close = pts[d <= near]
    if len(close) == 0:
        return {"count": 0, "max_gap": math.pi}
    probe = line_points(line, probes)
    dist = nearest_distance(probe, cKDTree(projector_embedding(close)))
    return {"count": int(len(close)), "max_gap": float(2 * dist.max())}


@dataclass(frozen=True)
class ConeSet:
    """Union of the lines through e3 and the points of a set on line(e1, e2).

    The base set is sampled by homogeneous pairs (coordinates z1, z2 of the
    base line); ``extra`` adds described points and lines.
    """
    base: np.ndarray
    extra: LimitSetDesc | None = None

    def distance(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=complex))
        x = x / np.linalg.norm(x, axis=1, keepdims=True)
        r = np.linalg.norm(x[:, :2], axis=1)
        d = np.full(len(x), math.pi / 2)
        if len(self.base):
            u = np.where(r[:, None] > 0, x[:, :2] / np.maximum(r, 1e-300)[:, None], 0)
            tree = cKDTree(projector_embedding(self.base))
            dd, _ = tree.query(projector_embedding(np.where(r[:, None] > 0, u, 1)))
            s = np.sin(fs_from_chord(dd))
            d = np.where(r > 0, np.arcsin(np.clip(r * s, 0, 1)), 0.0)
        if self.extra is not None and not self.extra.is_empty:
            d = np.minimum(d, self.extra.distance(x))
        return d


# ---------------------------------------------------------------- finiteness

def finiteness_heuristic(spec: GroupSpec, max_len: int, tol: Tolerances = DEFAULT_TOL,
                         cap: int = 2_000_000) -> dict:
    """INFINITE with a witness word, or UNDETERMINED.

    A witness is the first word (in enumeration order) with an eigenvalue off
    the unit circle or an irrational rotation; failing that, the first word
    with a non-diagonalizable lift, which also has infinite order.
    """
    t = word_table(spec, max_len, tol, cap)
    jordan = None
    for w, m in zip(t.words[1:], t.mats[1:]):
        ed = eigen_decompose(m, tol)
        for lam in ed.eigenvalues:
            k = rotation_kind(lam, tol=tol)
            if k.kind != "TORSION":
                return {"status": "INFINITE", "witness": w.format(spec.names), "reason": str(k)}
        if jordan is None and ed.jordan_shape is not JordanShape.DIAG:
            jordan = w
    if jordan is not None:
        return {"status": "INFINITE", "witness": jordan.format(spec.names), "reason": "JORDAN_BLOCK"}
    return {"status": "UNDETERMINED", "witness": None, "reason": f"all words torsion up to length {max_len}"}


# ---------------------------------------------------------------- control projection

@dataclass
class ControlProjection:
    frame: np.ndarray            # columns q1, q2 (spanning l) and p
    maps: list[MobiusMap]
    names: tuple[str, ...]

    def block(self, g) -> np.ndarray:
        """The 2x2 block of g in the frame, before any normalization."""
        lift = g.lift if isinstance(g, ProjTransform) else np.asarray(g, dtype=complex)
        return np.linalg.solve(self.frame, lift @ self.frame)[:2, :2]

    def project(self, g) -> MobiusMap:
        return MobiusMap(self.block(g))

    def to_json(self) -> dict:
        return {"generators": [{"name": n, "matrix": m.to_json()} for n, m in zip(self.names, self.maps)]}


def control_projection(spec: GroupSpec, tol: Tolerances = DEFAULT_TOL,
                       fix_tol: float = 1e-8) -> ControlProjection:
    """Moebius action on l induced by central projection from p.

    In the frame h = [q1 q2 p] an element fixing p has the block shape
    [[A, 0], [c, mu]], and its projected action on l is the block A.
    """
    if spec.point is None or spec.line is None:
        raise NotControllable("the group needs a fixed point and a line")
    p, l = spec.point, spec.line
    if abs(np.dot(l.coords, p.coords)) <= tol.cmp:
        raise PreconditionViolation("the point lies on the line")
    for n, g in zip(spec.names, spec.gens):
        img = g.lift @ p.coords
        if aligned_distance(img / np.linalg.norm(img), p.coords) > fix_tol:
            raise PreconditionViolation(f"generator {n} does not fix the point")
    q1, q2 = l.basis()
    h = np.column_stack([q1, q2, p.coords])
    cp = ControlProjection(h, [], spec.names)
    cp.maps = [cp.project(g) for g in spec.gens]
    return cp


def kernel_words(spec: GroupSpec, max_len: int, tol: Tolerances = DEFAULT_TOL,
                 cap: int = 2_000_000) -> list[tuple[Word, ProjTransform]]:
    """Enumerated non-identity elements whose projection is the identity."""
    cp = control_projection(spec, tol)
    t = word_table(spec, max_len, tol, cap)
    out = []
    for w, m in zip(t.words[1:], t.mats[1:]):
        if cp.project(m).is_identity(tol.cmp):
            out.append((w, ProjTransform.from_lift(m, tol)))
    return out


def projective_gap(A: np.ndarray, B: np.ndarray) -> float:
    """min over scalars c of |A - c B| / |A| (Frobenius); no determinant normalization."""
    c = np.vdot(B, A) / np.vdot(B, B)
    return float(np.linalg.norm(A - c * B) / np.linalg.norm(A))


def homomorphism_defect(spec: GroupSpec, pairs: int, max_word: int, seed: int = 0,
                        tol: Tolerances = DEFAULT_TOL) -> float:
    """max projective gap between Pi(gh) and Pi(g) Pi(h) over random word pairs.

    The blocks are compared up to an optimal scalar, since normalizing the
    determinant of a long word's block is itself ill-conditioned.
    """
    cp = control_projection(spec, tol)
    rng = np.random.default_rng(seed)
    lifts = spec.lifts()
    worst = 0.0
    for _ in range(pairs):
        a = random_reduced_word(rng, len(lifts), int(rng.integers(1, max_word + 1)))
        b = random_reduced_word(rng, len(lifts), int(rng.integers(1, max_word + 1)))
        ga, gb = a.evaluate(lifts), b.evaluate(lifts)
        lhs = cp.block(ga @ gb)
        rhs = cp.block(ga) @ cp.block(gb)
        worst = max(worst, projective_gap(lhs, rhs))
    return worst


# ---------------------------------------------------------------- Schottky certificates

@dataclass(frozen=True)
class SchottkyPairing:
    """(generator name, R, S): the generator should map R onto the complement of the closure of S."""
    triples: tuple[tuple[str, GenCircle, GenCircle], ...]

    def regions(self) -> list[tuple[str, GenCircle]]:
        out = []
        for n, R, S in self.triples:
            out += [(f"R[{n}]", R), (f"S[{n}]", S)]
        return out

    def to_json(self) -> dict:
        return {"pairings": [{"generator": n, "R": R.to_json(), "S": S.to_json()}
                             for n, R, S in self.triples]}

    @classmethod
    def from_json(cls, d: dict) -> "SchottkyPairing":
        return cls(tuple((p["generator"], circle_from_json(p["R"]), circle_from_json(p["S"]))
                         for p in d["pairings"]))


def circle_from_json(d: dict) -> GenCircle:
    from .io import matrix_from_json
    if "hermitian" in d:
        return GenCircle(matrix_from_json(d["hermitian"]), int(d.get("side", 1)))
    c = d["center"]
    center = complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)
    return GenCircle.disk(center, float(d["radius"]), d.get("side", "inside") == "inside")


def _probe_point(circles: Sequence[GenCircle]) -> np.ndarray:
    cands = [0, 1, 1j, -1, -1j, 0.5 + 0.25j, 2 + 3j, -3.7 + 1.3j, 10 + 7j, math.inf]
    best, score = None, -1.0
    for z in cands:
        v = homog1(z)
        v = v / np.linalg.norm(v)
        s = min(abs(np.vdot(v, c.H @ v).real) for c in circles)
        if s > score:
            best, score = v, s
    return best


def region_relation(R1: GenCircle, R2: GenCircle, rel: float = 1e-9) -> dict:
    """Whether two open regions are disjoint and whether their closures touch."""
    q = _probe_point([R1, R2])
    # T(z) = 1 / (z - q) sends q to infinity, so both circles become proper
    T = MobiusMap(np.array([[0, q[1]], [q[1], -q[0]]]) if abs(q[1]) > 0 else np.array([[0, 1], [1, 0]]))
    if abs(q[1]) > 0:
        T = MobiusMap(np.array([[0, 1], [1, -q[0] / q[1]]]))
    C1, C2 = mobius_circle_image(T, R1), mobius_circle_image(T, R2)
    c1, r1, c2, r2 = C1.center, C1.radius, C2.center, C2.radius
    in1, in2 = C1.side == 1, C2.side == 1
    d = abs(c1 - c2)
    t = rel * max(r1, r2, d, 1.0)
    if in1 and in2:
        gap = d - r1 - r2
    elif in1:
        gap = r2 - d - r1
    elif in2:
        gap = r1 - d - r2
    else:
        return {"disjoint": False, "tangent": False, "gap": -math.inf}
    return {"disjoint": bool(gap >= -t), "tangent": bool(abs(gap) <= t), "gap": float(gap)}


def schottky_certificate(spec: GroupSpec, pairing: SchottkyPairing,
                         tol: Tolerances = DEFAULT_TOL, circle_tol: float = 1e-9) -> dict:
    """Check a (kissing) Schottky pairing through the control projection.

    For each generator the Moebius image of the boundary of R must be the
    boundary of S with the marked side flipped; all regions must be pairwise
    disjoint and their closures must not cover the projective line.
    """
    cp = control_projection(spec, tol)
    reports = []
    ok = True
    for name, R, S in pairing.triples:
        if name not in spec.names:
            raise ValueError(f"unknown generator {name}")
        m = cp.maps[spec.names.index(name)]
        img = mobius_circle_image(m, R)
        gap = float(np.linalg.norm(img.H - S.H))
        match = gap <= circle_tol
        flip = match and img.side == -S.side
        ok &= flip
        reports.append({"generator": name, "mobius": mobius_classify(m, tol).kind,
                        "circle_gap": gap, "circle_match": bool(match), "side_flipped": bool(flip)})
    regions = pairing.regions()
    pairs, kissing = [], False
    for i in range(len(regions)):
        for j in range(i + 1, len(regions)):
            r = region_relation(regions[i][1], regions[j][1])
            if not r["disjoint"]:
                ok = False
            kissing |= r["disjoint"] and r["tangent"]
            pairs.append({"a": regions[i][0], "b": regions[j][0], **r})
    witness = _outside_all([c for _, c in regions])
    ok &= witness is not None
    return {"valid": bool(ok), "kissing": bool(ok and kissing), "generators": reports,
            "pairs": pairs, "complement_witness": witness}


def _outside_all(circles: Sequence[GenCircle]):
    xs = np.linspace(-6, 6, 49)
    cands = [0j, math.inf] + [complex(a, b) for a in xs for b in xs]
    for z in cands:
        if all(c.value(z) > 1e-9 for c in circles):
            return "inf" if z == math.inf else [z.real, z.imag]
    return None
