"""Eigenvalues, Jordan shape and rotation type of 3x3 unimodular matrices."""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import IllConditionedWarning
from .projective import ProjTransform

COND_LIMIT = 1e10


class JordanShape(str, Enum):
    DIAG = "DIAG"
    BLOCK2_PLUS_1 = "BLOCK2_PLUS_1"
    BLOCK3 = "BLOCK3"


@dataclass(frozen=True)
class RotationKind:
    kind: str                   # "TORSION", "IRRATIONAL" or "NOT_UNIT_MODULUS"
    order: int | None = None    # q for TORSION
    residual: float = 0.0       # |lambda^q - 1| of the best approximation, or | |lambda| - 1 |

    @property
    def is_torsion(self) -> bool:
        return self.kind == "TORSION"

    def __str__(self):
        return f"TORSION({self.order})" if self.is_torsion else self.kind


@dataclass(frozen=True)
class EigenData:
    """Eigenvalues sorted by (modulus, argument) plus a Jordan basis.

    ``basis`` columns follow ``jordan_diagonal``: for BLOCK2_PLUS_1 the first
    two columns span the block (eigenvector, then generalized eigenvector);
    for BLOCK3 they form a chain v1, v2, v3 with (A - lambda) v3 = v2 etc.
    """
    eigenvalues: tuple[complex, complex, complex]
    basis: np.ndarray
    jordan_shape: JordanShape
    jordan_diagonal: tuple[complex, complex, complex]
    condition: float
    residual: float
    rank_residual: float | None = None   # sigma_min / sigma_max of A - lambda I at a repeated root
    ill_conditioned: bool = False

    def jordan_matrix(self) -> np.ndarray:
        J = np.diag(np.array(self.jordan_diagonal, dtype=complex))
        if self.jordan_shape is not JordanShape.DIAG:
            J[0, 1] = 1
        if self.jordan_shape is JordanShape.BLOCK3:
            J[1, 2] = 1
        return J


# ---------------------------------------------------------------- characteristic polynomial

def char_poly(g) -> np.ndarray:
    """Coefficients [1, c2, c1, c0] of det(lambda I - A).

    For a unimodular lift the constant term is -1.  (The other common
    convention det(A - lambda I) is the negative of this polynomial.)
    """
    A = _lift(g)
    tr = A[0, 0] + A[1, 1] + A[2, 2]
    minors = (A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
              + A[0, 0] * A[2, 2] - A[0, 2] * A[2, 0]
              + A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1])
    det = complex(np.linalg.det(A))
    return np.array([1, -tr, minors, -det], dtype=complex)


def _lift(g) -> np.ndarray:
    return g.lift if isinstance(g, ProjTransform) else np.asarray(g, dtype=complex)


def _poly(c, x):
    return ((x + c[1]) * x + c[2]) * x + c[3]


def _dpoly(c, x):
    return (3 * x + 2 * c[1]) * x + c[2]


def cubic_roots(coeffs, rel: float = 1e-10,
                split: float = 1e-7) -> tuple[list[complex], list[int]]:
    """Roots of a monic cubic by Cardano's formula plus one Newton step.

    Returns (roots, multiplicities) with repeated roots merged.  A triple or
    double root is recognised from the depressed coefficients and the
    discriminant at relative level ``rel``; those roots are then given by
    exact closed forms rather than the (noise-split) Cardano values.
    """
    c = np.asarray(coeffs, dtype=complex)
    c2, c1, c0 = c[1], c[2], c[3]
    s = max(1.0, abs(c2), math.sqrt(abs(c1)), abs(c0) ** (1 / 3))
    shift = -c2 / 3
    p = c1 - c2 * c2 / 3
    q = 2 * c2 ** 3 / 27 - c2 * c1 / 3 + c0
    if abs(p) <= rel * s * s and abs(q) <= rel * s ** 3:
        return [complex(shift)], [3]
    roots = _polish(c, [r + shift for r in _cardano(p, q)])
    disc = -(4 * p ** 3 + 27 * q * q)
    if abs(disc) <= rel * s ** 6:
        # a small discriminant also arises from two small distinct roots next
        # to a large one; rounding splits a true double root by ~1e-8 s only
        gap = min(abs(roots[i] - roots[j]) for i in range(3) for j in range(i))
        if gap <= split * s:
            # double root t = -3q / (2p), simple root t = 3q / p
            return _polish(c, [shift - 3 * q / (2 * p), shift + 3 * q / p]), [2, 1]
    return roots, [1, 1, 1]


def _cardano(p: complex, q: complex) -> list[complex]:
    w = cmath.sqrt(q * q / 4 + p ** 3 / 27)
    a, b = -q / 2 + w, -q / 2 - w
    u3 = a if abs(a) >= abs(b) else b
    if u3 == 0:
        return [0j, 0j, 0j]
    u = u3 ** (1 / 3)
    om = cmath.exp(2j * math.pi / 3)
    out = []
    for k in range(3):
        uk = u * om ** k
        out.append(uk - p / (3 * uk))
    return out


def _polish(c, roots):
    out = []
    for r in roots:
        f = _poly(c, r)
        d = _dpoly(c, r)
        if d != 0:
            r2 = r - f / d
            if abs(_poly(c, r2)) < abs(f):
                r = r2
        out.append(complex(r))
    return out


# ---------------------------------------------------------------- eigen decomposition

def _sort_key(z: complex, scale: float, tol: float):
    # moduli within tol compare equal so that arguments decide the order
    return (round(abs(z) / (scale * tol)), cmath.phase(z))


def _sorted_eigs(vals, tol):
    scale = max(abs(v) for v in vals)
    return sorted(vals, key=lambda z: _sort_key(z, scale, tol))


def _null_vectors(M: np.ndarray, k: int) -> np.ndarray:
    _, _, vh = np.linalg.svd(M)
    return vh[-k:].conj().T


def eigen_decompose(g, tol: Tolerances = DEFAULT_TOL) -> EigenData:
    """Eigenvalues and a Jordan basis of a 3x3 lift.

    Warns with IllConditionedWarning (and sets ``ill_conditioned``) if the
    basis condition number exceeds 1e10; the data are still returned.
    """
    A = _lift(g)
    norm = float(np.abs(A).sum(axis=1).max())
    coeffs = char_poly(A)
    roots, mult = cubic_roots(coeffs)
    roots, mult = _merge_close(roots, mult, tol.eig * norm)

    eye = np.eye(3)
    rank_res = None
    if len(roots) == 3:
        vals = _sorted_eigs(roots, tol.eig)
        P = np.column_stack([_null_vectors(A - v * eye, 1)[:, 0] for v in vals])
        shape, diag = JordanShape.DIAG, tuple(vals)
    else:
        i = int(np.argmax(mult))
        lam = roots[i]
        sv = np.linalg.svd(A - lam * eye, compute_uv=False)
        rank_res = float(sv[-2] / sv[0]) if sv[0] > 0 else 0.0
        geo = 3 - int(np.sum(sv > tol.rank * max(sv[0], norm)))
        if mult[i] == 3:
            if geo == 3:
                P, shape = np.eye(3, dtype=complex), JordanShape.DIAG
                diag = (lam, lam, lam)
            elif geo == 2:
                P, shape = _block21_triple(A, lam), JordanShape.BLOCK2_PLUS_1
                diag = (lam, lam, lam)
                rank_res = float(sv[-1] / sv[0])
            else:
                P, shape = _block3(A, lam), JordanShape.BLOCK3
                diag = (lam, lam, lam)
        else:
            mu = roots[1 - i]
            rank_res = float(sv[-2] / sv[0])
            if geo >= 2:
                N = _null_vectors(A - lam * eye, 2)
                v3 = _null_vectors(A - mu * eye, 1)[:, 0]
                vals = _sorted_eigs([lam, lam, mu], tol.eig)
                cols, used = [], 0
                for v in vals:
                    if v == mu and not np.isclose(mu, lam):
                        cols.append(v3)
                    else:
                        cols.append(N[:, used])
                        used += 1
                P, shape, diag = np.column_stack(cols), JordanShape.DIAG, tuple(vals)
            else:
                v1 = _null_vectors(A - lam * eye, 1)[:, 0]
                v2 = np.linalg.lstsq(A - lam * eye, v1, rcond=None)[0]
                v2 = v2 - np.vdot(v1, v2) * v1
                v3 = _null_vectors(A - mu * eye, 1)[:, 0]
                P = np.column_stack([v1, v2, v3])
                shape, diag = JordanShape.BLOCK2_PLUS_1, (lam, lam, mu)
    eig_sorted = tuple(_sorted_eigs(list(diag), tol.eig))
    data = EigenData(eig_sorted, P, shape, tuple(complex(x) for x in diag), 0.0, 0.0, rank_res)
    J = data.jordan_matrix()
    cond = float(np.linalg.cond(P))
    resid = float(np.abs(A @ P - P @ J).sum(axis=1).max())
    ill = cond > COND_LIMIT
    if ill:
        warnings.warn(f"eigenbasis condition number {cond:.3g}", IllConditionedWarning, stacklevel=2)
    P = P.copy()
    P.setflags(write=False)
    return EigenData(eig_sorted, P, shape, data.jordan_diagonal, cond, resid, rank_res, ill)


def _merge_close(roots, mult, tol):
    roots, mult = list(roots), list(mult)
    merged = True
    while merged and len(roots) > 1:
        merged = False
        for i in range(len(roots)):
            for j in range(i + 1, len(roots)):
                if abs(roots[i] - roots[j]) <= tol:
                    m = mult[i] + mult[j]
                    r = (roots[i] * mult[i] + roots[j] * mult[j]) / m
                    roots = [x for k, x in enumerate(roots) if k not in (i, j)] + [r]
                    mult = [x for k, x in enumerate(mult) if k not in (i, j)] + [m]
                    merged = True
                    break
            if merged:
                break
    return roots, mult


def _block3(A, lam):
    N = A - lam * np.eye(3)
    _, _, vh = np.linalg.svd(N @ N)
    v3 = vh[0].conj()
    v2 = N @ v3
    v1 = N @ v2
    return np.column_stack([v1, v2, v3])


def _block21_triple(A, lam):
    N = A - lam * np.eye(3)
    _, _, vh = np.linalg.svd(N)
    v2 = vh[0].conj()
    v1 = N @ v2
    null = vh[1:].conj().T
    # the null direction orthogonal to v1 completes the basis
    c = null.conj().T @ v1
    w = null @ np.array([-np.conj(c[1]), np.conj(c[0])])
    return np.column_stack([v1, v2, w / np.linalg.norm(w)])


# ---------------------------------------------------------------- rotations

def rotation_kind(lam: complex, q_max: int | None = None, tol: Tolerances = DEFAULT_TOL) -> RotationKind:
    """Decide whether lam is a root of unity of order <= q_max.

    The argument is approximated by the best rational p/q with q <= q_max
    (continued fractions via Fraction.limit_denominator); lam counts as
    TORSION(q) when |lam^q - 1| <= tol.rot.
    """
    q_max = tol.q_max if q_max is None else q_max
    lam = complex(lam)
    r = abs(lam)
    if abs(r - 1) > tol.unit:
        return RotationKind("NOT_UNIT_MODULUS", None, abs(r - 1))
    x = (cmath.phase(lam) / (2 * math.pi)) % 1.0
    f = Fraction(x).limit_denominator(q_max)
    q = f.denominator
    resid = 2 * abs(math.sin(math.pi * (q * x - f.numerator)))
    if resid <= tol.rot:
        return RotationKind("TORSION", q, resid)
    return RotationKind("IRRATIONAL", None, resid)


def rotation_kind_exact(turns: Fraction | None) -> RotationKind:
    """Exact-input mode: lam = exp(2 pi i turns) with turns rational, or None for a declared irrational."""
    if turns is None:
        return RotationKind("IRRATIONAL", None, math.inf)
    return RotationKind("TORSION", Fraction(turns).denominator, 0.0)
