"""Points, lines and transformations of the complex projective plane and line.

Homogeneous vectors are stored as complex numpy arrays in a canonical form:
unit Hermitian norm, with the first coordinate of modulus above ``tol.zero``
rotated to be positive real.  The point at infinity of the projective line is
the homogeneous pair (1, 0); it is never stored as a float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import (CoincidentLines, CoincidentPoints, DegenerateInput,
                     DegenerateQuadruple)

_EPS = np.finfo(float).eps
OMEGA = np.exp(2j * np.pi / 3)


# ---------------------------------------------------------------- vectors

def as_vector(v, dim: int | None = None) -> np.ndarray:
    a = np.asarray(v, dtype=complex).reshape(-1)
    if dim is not None and a.shape != (dim,):
        raise DegenerateInput(f"expected {dim} homogeneous coordinates, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DegenerateInput("coordinates must be finite")
    return a


def canonicalize(v, zero: float = DEFAULT_TOL.zero) -> np.ndarray:
    """Unit norm, first non-negligible coordinate positive real.

    Exactly idempotent: a vector already in canonical form is returned
    bit-for-bit unchanged.
    """
    a = np.array(v, dtype=complex).reshape(-1)
    n = np.linalg.norm(a)
    if not np.isfinite(n) or n == 0:
        raise DegenerateInput("zero or non-finite homogeneous vector")
    if abs(n - 1.0) > 4 * _EPS:
        a = a / n
    big = np.nonzero(np.abs(a) > zero)[0]
    if big.size == 0:
        raise DegenerateInput("all coordinates below the zero tolerance")
    c = a[big[0]]
    if c.imag != 0.0 or c.real <= 0.0:
        a = a * (np.conj(c) / abs(c))
        a[big[0]] = abs(a[big[0]])
    return a


def canonical_rows(V, zero: float = DEFAULT_TOL.zero) -> np.ndarray:
    """Row-wise canonical form of an (N, d) array of homogeneous vectors."""
    V = np.asarray(V, dtype=complex)
    if V.size == 0:
        return V.reshape(0, V.shape[-1] if V.ndim == 2 else 3)
    V = V / np.linalg.norm(V, axis=1, keepdims=True)
    big = np.abs(V) > zero
    piv = np.argmax(big, axis=1)
    c = V[np.arange(len(V)), piv]
    V = V * (np.conj(c) / np.abs(c))[:, None]
    V[np.arange(len(V)), piv] = np.abs(V[np.arange(len(V)), piv])
    return V


def aligned_distance(u, v) -> float:
    """min over unit scalars s of ||u - s v|| for unit vectors u, v."""
    u = np.asarray(u, dtype=complex).reshape(-1)
    v = np.asarray(v, dtype=complex).reshape(-1)
    ip = np.vdot(v, u)
    s = ip / abs(ip) if abs(ip) > 0 else 1.0
    return float(np.linalg.norm(u - s * v))


# ---------------------------------------------------------------- points and lines

@dataclass(frozen=True, eq=False)
class _Homog:
    coords: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __init__(self, coords, tol: Tolerances = DEFAULT_TOL):
        c = canonicalize(as_vector(coords), tol.zero)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "tol", tol)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return aligned_distance(self.coords, other.coords) <= self.tol.cmp

    __hash__ = None  # tolerance equality cannot be hashed consistently

    def key(self, ndigits: int = 7) -> tuple:
        """Rounded canonical coordinates, for dictionary lookups."""
        r = np.round(self.coords, ndigits) + 0.0
        return tuple(complex(x) for x in r)

    def to_json(self) -> list:
        return [[float(z.real), float(z.imag)] for z in self.coords]

    def __repr__(self):
        body = ", ".join(f"{z.real:.6g}{z.imag:+.6g}j" for z in self.coords)
        return f"{type(self).__name__}([{body}])"


class ProjPoint(_Homog):
    """A point [z1; z2; z3] of the projective plane (or a pair on a line)."""


class ProjLine(_Homog):
    """A line {x : dual . x = 0}, stored by its dual coordinates."""

    @property
    def dual(self) -> np.ndarray:
        return self.coords

    def contains(self, x: ProjPoint, tol: float | None = None) -> bool:
        tol = self.tol.cmp if tol is None else tol
        return abs(np.dot(self.coords, x.coords)) <= tol

    def basis(self) -> tuple[np.ndarray, np.ndarray]:
        """Two spanning vectors chosen deterministically from the dual.

        With k the index of the largest dual coordinate and i < j the others,
        q1 = e_i - (n_i/n_k) e_k and q2 = e_j - (n_j/n_k) e_k.  For the axis
        lines this returns the coordinate vectors themselves.
        """
        n = self.coords
        k = int(np.argmax(np.abs(n)))
        i, j = [t for t in range(3) if t != k]
        q1 = np.zeros(3, complex)
        q2 = np.zeros(3, complex)
        q1[i], q1[k] = 1, -n[i] / n[k]
        q2[j], q2[k] = 1, -n[j] / n[k]
        return q1, q2


def e(i: int) -> ProjPoint:
    """Coordinate point e1, e2 or e3 (1-based)."""
    v = np.zeros(3)
    v[i - 1] = 1
    return ProjPoint(v)


def line_through(p: ProjPoint, q: ProjPoint) -> ProjLine:
    if p == q:
        raise CoincidentPoints("line_through needs two distinct points")
    return ProjLine(np.cross(p.coords, q.coords), p.tol)


def meet(l1: ProjLine, l2: ProjLine) -> ProjPoint:
    if l1 == l2:
        raise CoincidentLines("meet needs two distinct lines")
    return ProjPoint(np.cross(l1.coords, l2.coords), l1.tol)


def fs_distance(x, y) -> float:
    """Fubini-Study distance arccos|<x, y>| of unit representatives, in [0, pi/2]."""
    u = _unit(x)
    v = _unit(y)
    # the sine form is accurate for nearby points where arccos is not
    c = abs(np.vdot(u, v))
    s = aligned_distance(u, v)
    if s < 1.0:
        return float(2 * math.asin(min(1.0, s / 2)))
    return float(math.acos(min(1.0, c)))


def point_line_distance(x, line) -> float:
    """Fubini-Study distance from a point to a line of the plane."""
    u = _unit(x)
    n = _unit(line)
    return float(math.asin(min(1.0, abs(np.dot(n, u)))))


def _unit(x) -> np.ndarray:
    v = x.coords if isinstance(x, _Homog) else as_vector(x)
    n = np.linalg.norm(v)
    if n == 0:
        raise DegenerateInput("zero homogeneous vector")
    return v / n


# ---------------------------------------------------------------- transformations

def _unimodular(m: np.ndarray, n: int) -> tuple[np.ndarray, complex]:
    det = complex(np.linalg.det(m))
    if det == 0 or not np.isfinite(det):
        raise DegenerateInput("singular matrix has no projective class")
    # an input that is already unimodular is kept bit for bit
    scale = 1.0 + 0j if abs(det - 1) <= 1e-14 else det ** (-1.0 / n)  # principal branch
    return m * scale, scale


def _projective_gap(a: np.ndarray, b: np.ndarray, roots) -> float:
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    return min(float(np.linalg.norm(a - r * b)) for r in roots) / max(na, nb)


class _Lift:
    dim = 0
    roots: tuple = ()

    def __init__(self, matrix, tol: Tolerances = DEFAULT_TOL, *, normalize: bool = True):
        m = np.array(matrix, dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise DegenerateInput(f"expected a {self.dim}x{self.dim} matrix")
        if not np.all(np.isfinite(m)):
            raise DegenerateInput("matrix entries must be finite")
        scale = 1.0 + 0j
        if normalize:
            m, scale = _unimodular(m, self.dim)
        m.setflags(write=False)
        self.lift = m
        self.scale = scale  # factor applied to the raw input
        self.tol = tol

    @classmethod
    def from_lift(cls, lift, tol: Tolerances = DEFAULT_TOL):
        """Wrap a matrix already known to have determinant 1."""
        return cls(lift, tol, normalize=False)

    def __matmul__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self).from_lift(self.lift @ other.lift, self.tol)

    def inverse(self):
        return type(self).from_lift(_inv_unimodular(self.lift), self.tol)

    def __pow__(self, k: int):
        base = self if k >= 0 else self.inverse()
        out = np.eye(self.dim, dtype=complex)
        b = base.lift
        k = abs(int(k))
        while k:
            if k & 1:
                out = out @ b
            b = b @ b
            k >>= 1
        return type(self).from_lift(out, self.tol)

    def distance(self, other) -> float:
        """Relative Frobenius gap between lifts, minimized over the scalar ambiguity."""
        return _projective_gap(self.lift, other.lift, self.roots)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.distance(other) <= self.tol.cmp

    __hash__ = None

    def is_identity(self, tol: float | None = None) -> bool:
        tol = self.tol.cmp if tol is None else tol
        return _projective_gap(self.lift, np.eye(self.dim), self.roots) <= tol

    def det_residual(self) -> float:
        return abs(complex(np.linalg.det(self.lift)) - 1)

    def to_json(self) -> list:
        return [[[float(z.real), float(z.imag)] for z in row] for row in self.lift]

    def __repr__(self):
        return f"{type(self).__name__}({np.array2string(self.lift, precision=4)})"


def _inv_unimodular(m: np.ndarray) -> np.ndarray:
    """Inverse of a determinant-one matrix via the adjugate."""
    if m.shape == (2, 2):
        return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])
    c = np.empty((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            s = [k for k in range(3) if k != j]
            c[i, j] = (-1) ** (i + j) * (m[r[0], s[0]] * m[r[1], s[1]] - m[r[0], s[1]] * m[r[1], s[0]])
    return c.T / np.linalg.det(m)


class ProjTransform(_Lift):
    """Element of PSL(3,C) stored by a unimodular lift (defined up to a cube root of 1)."""

    dim = 3
    roots = (1.0, OMEGA, OMEGA ** 2)

    def __call__(self, x: ProjPoint) -> ProjPoint:
        return apply(self, x)


class MobiusMap(_Lift):
    """Element of PSL(2,C) stored by a determinant-one lift (defined up to sign)."""

    dim = 2
    roots = (1.0, -1.0)

    @property
    def trace_sq(self) -> complex:
        t = complex(np.trace(self.lift))
        return t * t

    def __call__(self, z):
        """Apply to a complex number or math.inf; returns complex or math.inf."""
        return from_homog1(self.lift @ homog1(z))

    def apply_h(self, v) -> np.ndarray:
        return self.lift @ np.asarray(v, dtype=complex)

    def fixed_points(self) -> list[np.ndarray]:
        """Unit homogeneous fixed points; one for parabolic maps, none for the identity."""
        a, b = self.lift[0]
        c, d = self.lift[1]
        scale = max(1.0, float(np.abs(self.lift).max()))
        if abs(c) <= self.tol.zero * scale:
            pts = [np.array([1, 0], complex)]
            if abs(a - d) > self.tol.zero * scale:
                pts.append(np.array([b, d - a], complex))
            elif abs(b) <= self.tol.zero * scale:
                return []
        else:
            disc = complex((a - d) ** 2 + 4 * b * c)
            r = np.sqrt(disc)
            if abs(r) <= 1e-7 * scale:
                pts = [np.array([a - d, 2 * c], complex)]
            else:
                pts = [np.array([a - d + r, 2 * c], complex), np.array([a - d - r, 2 * c], complex)]
        return [canonicalize(p) for p in pts]


def apply(g: ProjTransform, x: ProjPoint) -> ProjPoint:
    return ProjPoint(g.lift @ x.coords, x.tol)


def apply_line(g: ProjTransform, l: ProjLine) -> ProjLine:
    """Image of a line: the dual transforms by the inverse-transpose."""
    return ProjLine(_inv_unimodular(g.lift).T @ l.coords, l.tol)


# ---------------------------------------------------------------- projective line

def homog1(z) -> np.ndarray:
    """Homogeneous pair of a point of the projective line.

    Accepts a complex number, math.inf (the point at infinity) or a pair.
    """
    if isinstance(z, (list, tuple, np.ndarray)) and np.size(z) == 2:
        v = np.asarray(z, dtype=complex).reshape(2)
        if not np.any(v):
            raise DegenerateInput("zero homogeneous pair")
        return v
    z = complex(z)
    if math.isinf(z.real) or math.isinf(z.imag):
        return np.array([1, 0], complex)
    if not np.isfinite(z):
        raise DegenerateInput("NaN is not a point of the projective line")
    return np.array([z, 1], complex)


def from_homog1(v, zero: float = DEFAULT_TOL.zero):
    v = np.asarray(v, dtype=complex)
    if abs(v[1]) <= zero * np.linalg.norm(v):
        return math.inf
    return complex(v[0] / v[1])


def _bracket(u: np.ndarray, v: np.ndarray) -> complex:
    return complex(u[0] * v[1] - u[1] * v[0])


def cross_ratio(z1, z2, z3, z4, tol: Tolerances = DEFAULT_TOL):
    """((z1-z3)(z2-z4)) / ((z1-z4)(z2-z3)) via determinants of homogeneous pairs.

    Returns a complex number, or math.inf.
    """
    h = [homog1(z) for z in (z1, z2, z3, z4)]
    h = [v / np.linalg.norm(v) for v in h]
    same = [[abs(_bracket(a, b)) <= tol.cmp for b in h] for a in h]
    for i in range(4):
        for j in range(i + 1, 4):
            for k in range(j + 1, 4):
                if same[i][j] and same[j][k]:
                    raise DegenerateQuadruple("three of the four points coincide")
    num = _bracket(h[0], h[2]) * _bracket(h[1], h[3])
    den = _bracket(h[0], h[3]) * _bracket(h[1], h[2])
    if abs(den) <= tol.zero:
        return math.inf
    return num / den


# ---------------------------------------------------------------- generalized circles

class GenCircle:
    """Generalized circle {v : v* H v = 0} on the projective line, with a side.

    H = [[A, B], [conj B, C]] encodes A|z|^2 + conj(B) z + B conj(z) + C = 0 at
    v = (z, 1).  H is scaled to unit Frobenius norm with A >= 0 (and the sign
    of a line fixed by its first non-zero coefficient).  ``side = +1`` selects
    the region {v* H v < 0}, ``side = -1`` the region {v* H v > 0}.
    """

    def __init__(self, H, side: int = 1, tol: Tolerances = DEFAULT_TOL):
        H = np.array(H, dtype=complex)
        if H.shape != (2, 2) or not np.all(np.isfinite(H)):
            raise DegenerateInput("expected a finite 2x2 matrix")
        if side not in (1, -1):
            raise ValueError("side must be +1 or -1")
        H = (H + H.conj().T) / 2
        n = np.linalg.norm(H)
        if n == 0:
            raise DegenerateInput("zero coefficient matrix")
        H = H / n
        if abs(H[0, 1]) ** 2 - H[0, 0].real * H[1, 1].real <= tol.zero:
            raise DegenerateInput("circle discriminant |B|^2 - AC must be positive")
        flip = _sign_key(H)
        if flip < 0:
            H, side = -H, -side
        H.setflags(write=False)
        self.H = H
        self.side = side
        self.tol = tol

    @classmethod
    def disk(cls, center, radius: float, inside: bool = True, tol: Tolerances = DEFAULT_TOL):
        c = complex(center)
        if radius <= 0:
            raise DegenerateInput("radius must be positive")
        H = [[1, -c], [-np.conj(c), abs(c) ** 2 - radius ** 2]]
        return cls(H, 1 if inside else -1, tol)

    @classmethod
    def halfplane(cls, point, normal, tol: Tolerances = DEFAULT_TOL):
        """Open half-plane {z : Re(conj(normal) (z - point)) < 0}."""
        p, n = complex(point), complex(normal)
        if n == 0:
            raise DegenerateInput("normal must be non-zero")
        # 2 Re(conj(B) z) + C with B = n / 2
        B = n / 2
        C = -2 * (np.conj(B) * p).real
        return cls([[0, B], [np.conj(B), C]], 1, tol)

    @property
    def A(self) -> float:
        return float(self.H[0, 0].real)

    @property
    def is_line(self) -> bool:
        return abs(self.A) <= self.tol.zero

    @property
    def center(self) -> complex:
        if self.is_line:
            raise ValueError("a line has no center")
        return complex(-self.H[0, 1] / self.A)

    @property
    def radius(self) -> float:
        if self.is_line:
            return math.inf
        det = self.A * self.H[1, 1].real - abs(self.H[0, 1]) ** 2
        return float(math.sqrt(-det) / self.A)

    def value(self, z) -> float:
        """side * v* H v at a unit representative; negative inside the region."""
        v = homog1(z)
        v = v / np.linalg.norm(v)
        return float(self.side * np.vdot(v, self.H @ v).real)

    def contains(self, z) -> bool:
        return self.value(z) < -self.tol.cmp

    def interior_sample(self) -> np.ndarray:
        """A homogeneous point strictly inside the region."""
        H = self.H
        if self.is_line:
            B = H[0, 1]
            C = H[1, 1].real
            z0 = -C * B / (2 * abs(B) ** 2)
            cand = [z0 - B, z0 + B]
            pts = [np.array([z, 1], complex) for z in cand]
        else:
            pts = [np.array([self.center, 1], complex), np.array([1, 0], complex)]
        for v in pts:
            if self.side * np.vdot(v, H @ v).real < 0:
                return v
        raise AssertionError("no interior sample found")  # unreachable for valid circles

    def same_circle(self, other: "GenCircle", tol: float | None = None) -> bool:
        tol = self.tol.cmp if tol is None else tol
        return float(np.linalg.norm(self.H - other.H)) <= tol

    def complement(self) -> "GenCircle":
        return GenCircle(self.H, -self.side, self.tol)

    def to_json(self) -> dict:
        return {"hermitian": [[[float(z.real), float(z.imag)] for z in r] for r in self.H],
                "side": self.side}

    def __repr__(self):
        if self.is_line:
            return f"GenCircle(line, side={self.side})"
        kind = "inside" if self.side * 1 > 0 else "outside"
        return f"GenCircle(center={self.center:.6g}, radius={self.radius:.6g}, {kind})"


def _sign_key(H: np.ndarray) -> int:
    for x in (H[0, 0].real, H[0, 1].real, H[0, 1].imag, H[1, 1].real):
        if abs(x) > 1e-12:
            return 1 if x > 0 else -1
    return 1


def mobius_circle_image(m: MobiusMap, c: GenCircle) -> GenCircle:
    """Image of a generalized circle and of its marked region under m."""
    Minv = _inv_unimodular(m.lift)
    H2 = Minv.conj().T @ c.H @ Minv
    v = m.lift @ c.interior_sample()
    s = np.vdot(v, H2 @ v).real
    return GenCircle(H2, 1 if s < 0 else -1, c.tol)


# ---------------------------------------------------------------- batched helpers

def projector_embedding(V) -> np.ndarray:
    """Real embedding of the projectors v v* of unit rows of V.

    Euclidean distance between embedded rows equals sqrt(2) sin(d_FS), so
    KD-trees on the embedding answer Fubini-Study neighbourhood queries.
    """
    V = np.asarray(V, dtype=complex)
    V = V / np.linalg.norm(V, axis=1, keepdims=True)
    d = V.shape[1]
    cols = [np.abs(V[:, i]) ** 2 for i in range(d)]
    r2 = math.sqrt(2)
    for i in range(d):
        for j in range(i + 1, d):
            p = V[:, i] * np.conj(V[:, j])
            cols += [r2 * p.real, r2 * p.imag]
    return np.stack(cols, axis=1)


def chord(fs: float) -> float:
    """Embedding distance corresponding to a Fubini-Study distance."""
    return math.sqrt(2) * math.sin(min(fs, math.pi / 2))


def fs_from_chord(c):
    return np.arcsin(np.clip(np.asarray(c) / math.sqrt(2), 0, 1))


def sphere_points(n: int) -> np.ndarray:
    """n unit homogeneous pairs spread evenly over the projective line (Fibonacci lattice)."""
    k = np.arange(n) + 0.5
    polar = np.arccos(1 - 2 * k / n)
    az = np.pi * (1 + 5 ** 0.5) * k
    return np.stack([np.cos(polar / 2), np.sin(polar / 2) * np.exp(1j * az)], axis=1)


def line_points(line: ProjLine, n: int) -> np.ndarray:
    """n unit points evenly spread over a line of the plane."""
    q1, q2 = line.basis()
    q1 = q1 / np.linalg.norm(q1)
    q2 = q2 - np.vdot(q1, q2) * q1
    q2 = q2 / np.linalg.norm(q2)
    s = sphere_points(n)
    return s[:, :1] * q1 + s[:, 1:] * q2


def plane_grid(n: int, rng: np.random.Generator) -> np.ndarray:
    """n unit points of the plane, uniform for the Fubini-Study volume."""
    z = rng.standard_normal((n, 3)) + 1j * rng.standard_normal((n, 3))
    return z / np.linalg.norm(z, axis=1, keepdims=True)
