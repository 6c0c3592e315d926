"""Limit sets, maximal discontinuity regions and invariant lines of cyclic groups.

An element is sorted into one row of the Jordan-form table.  Each row states
the layers L0, L1, L2 and the Kulkarni limit set in the element's eigenbasis
(e1, e2, e3); the descriptions returned here are those sets pushed back to
standard coordinates by the basis matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .projective import ProjLine, ProjPoint, ProjTransform, apply, apply_line
from .spectral import (EigenData, JordanShape, RotationKind, eigen_decompose,
                       rotation_kind, rotation_kind_exact)


class ElementKind(str, Enum):
    IDENTITY = "IDENTITY"
    BLOCK3_UNIPOTENT = "BLOCK3_UNIPOTENT"
    DIAG_TORSION = "DIAG_TORSION"
    DIAG_ELLIPTIC_IRRATIONAL = "DIAG_ELLIPTIC_IRRATIONAL"
    DIAG_EQUAL_MODULI_RATIONAL = "DIAG_EQUAL_MODULI_RATIONAL"
    DIAG_EQUAL_MODULI_IRRATIONAL = "DIAG_EQUAL_MODULI_IRRATIONAL"
    DIAG_STRONG_LOXODROMIC = "DIAG_STRONG_LOXODROMIC"
    B21_TORSION = "B21_TORSION"
    B21_UNIT_IRRATIONAL = "B21_UNIT_IRRATIONAL"
    B21_NONUNIT = "B21_NONUNIT"


FINITE_KINDS = (ElementKind.IDENTITY, ElementKind.DIAG_TORSION)


@dataclass(frozen=True)
class ElementClass3:
    """Table row of an element, with the eigenbasis ordered as the row expects.

    ``basis`` columns are the vectors called e1, e2, e3 in the table and
    ``values`` the matching Jordan diagonal.
    """
    kind: ElementKind
    eigen: EigenData
    basis: np.ndarray
    values: tuple[complex, complex, complex]
    rotations: dict = field(default_factory=dict)
    alternative: ElementKind | None = None

    @property
    def infinite_order(self) -> bool:
        return self.kind not in FINITE_KINDS

    def residuals(self) -> dict:
        out = {"jordan": self.eigen.residual, "condition": self.eigen.condition}
        if self.eigen.rank_residual is not None:
            out["rank"] = self.eigen.rank_residual
        for k, r in self.rotations.items():
            out[f"rotation_{k}"] = r.residual
        return out

    def to_json(self) -> dict:
        return {
            "class": self.kind.value,
            "jordan_shape": self.eigen.jordan_shape.value,
            "eigenvalues": [_cpx(z) for z in self.eigen.eigenvalues],
            "basis_columns": [[_cpx(z) for z in col] for col in self.basis.T],
            "rotations": {k: str(r) for k, r in self.rotations.items()},
            "residuals": self.residuals(),
            "ill_conditioned": self.eigen.ill_conditioned,
            **({"alternative": self.alternative.value} if self.alternative else {}),
        }


def _cpx(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


# ---------------------------------------------------------------- classification

def classify(g, tol: Tolerances = DEFAULT_TOL, *, exact_turns: Sequence | None = None,
             hedged: bool = False) -> ElementClass3:
    """Row of the Jordan-form table containing g.

    ``exact_turns`` (optional) gives, for each eigenvalue in sorted order,
    its argument as a Fraction of a full turn, or None for a declared
    irrational; rotation decisions then bypass floating-point detection.
    With ``hedged=True`` a repeated eigenvalue also reports the class the
    other Jordan shape would give, in ``alternative``.
    """
    if not isinstance(g, ProjTransform):
        g = ProjTransform(g, tol)
    ed = eigen_decompose(g, tol)
    rot = _Rotations(ed, tol, exact_turns)
    shape = ed.jordan_shape
    if shape is JordanShape.BLOCK3:
        return ElementClass3(ElementKind.BLOCK3_UNIPOTENT, ed, ed.basis, ed.jordan_diagonal)
    if shape is JordanShape.BLOCK2_PLUS_1:
        lam = ed.jordan_diagonal[0]
        r = rot.of(lam)
        kind = _b21_kind(r)
        alt = None
        if hedged:
            alt = _diag_kind_from_values(list(ed.jordan_diagonal), rot, tol)[0]
        return ElementClass3(kind, ed, ed.basis, ed.jordan_diagonal, {"lambda1": r}, alt)

    vals = list(ed.eigenvalues)
    kind, order, rots = _diag_kind_from_values(vals, rot, tol)
    alt = None
    if hedged and _has_repeat(vals, tol):
        i, j = _repeat_pair(vals, tol)
        alt = _b21_kind(rot.of(vals[i]))
    basis = ed.basis[:, order]
    return ElementClass3(kind, ed, basis, tuple(vals[k] for k in order), rots, alt)


def _b21_kind(r: RotationKind) -> ElementKind:
    if r.kind == "NOT_UNIT_MODULUS":
        return ElementKind.B21_NONUNIT
    return ElementKind.B21_TORSION if r.is_torsion else ElementKind.B21_UNIT_IRRATIONAL


class _Rotations:
    """Rotation decisions for eigenvalues and their ratios, optionally exact."""

    def __init__(self, ed: EigenData, tol: Tolerances, turns):
        self.ed, self.tol = ed, tol
        self.turns = None
        if turns is not None:
            if len(turns) != 3:
                raise ValueError("exact_turns needs one entry per eigenvalue")
            self.turns = [None if t is None else Fraction(t) for t in turns]

    def _turn(self, lam):
        if self.turns is None:
            return "auto"
        for v, t in zip(self.ed.eigenvalues, self.turns):
            if abs(v - lam) <= 1e-9 * max(1.0, abs(lam)):
                return t
        return "auto"

    def of(self, lam) -> RotationKind:
        t = self._turn(lam)
        if t != "auto" and abs(abs(lam) - 1) <= self.tol.unit:
            return rotation_kind_exact(t)
        return rotation_kind(lam, tol=self.tol)

    def ratio(self, a, b) -> RotationKind:
        ta, tb = self._turn(a), self._turn(b)
        if "auto" not in (ta, tb) and not (ta is None and tb is None):
            return rotation_kind_exact(None if ta is None or tb is None else ta - tb)
        return rotation_kind(a / b, tol=self.tol)


def _same_modulus(a, b, tol):
    return abs(math.log(abs(a)) - math.log(abs(b))) <= tol.unit


def _has_repeat(vals, tol):
    return any(abs(vals[i] - vals[j]) <= tol.eig * max(1.0, abs(vals[i]))
               for i in range(3) for j in range(i + 1, 3))


def _repeat_pair(vals, tol):
    for i in range(3):
        for j in range(i + 1, 3):
            if abs(vals[i] - vals[j]) <= tol.eig * max(1.0, abs(vals[i])):
                return i, j
    raise ValueError("no repeated eigenvalue")


def _diag_kind_from_values(vals, rot: _Rotations, tol: Tolerances):
    """(kind, order of eigenbasis columns, rotation decisions) for a diagonal lift."""
    if all(abs(v - vals[0]) <= tol.eig * max(1.0, abs(vals[0])) for v in vals):
        return ElementKind.IDENTITY, [0, 1, 2], {}
    unit = [abs(abs(v) - 1) <= tol.unit for v in vals]
    if all(unit):
        rs = [rot.of(v) for v in vals]
        rots = {f"lambda{k + 1}": r for k, r in enumerate(rs)}
        if all(r.is_torsion for r in rs):
            return ElementKind.DIAG_TORSION, [0, 1, 2], rots
        k = max(i for i in range(3) if not rs[i].is_torsion)
        order = [i for i in range(3) if i != k] + [k]
        return ElementKind.DIAG_ELLIPTIC_IRRATIONAL, order, rots
    for i, j in ((0, 1), (1, 2), (0, 2)):
        if _same_modulus(vals[i], vals[j], tol):
            k = 3 - i - j
            r = rot.ratio(vals[i], vals[j])
            kind = (ElementKind.DIAG_EQUAL_MODULI_RATIONAL if r.is_torsion
                    else ElementKind.DIAG_EQUAL_MODULI_IRRATIONAL)
            return kind, [i, j, k], {"ratio12": r}
    order = sorted(range(3), key=lambda t: abs(vals[t]))
    return ElementKind.DIAG_STRONG_LOXODROMIC, order, {}


# ---------------------------------------------------------------- set descriptions

@dataclass(frozen=True)
class LimitSetDesc:
    """A finite union of named points and lines, or the whole plane, or unknown."""
    tag: str
    points: tuple[tuple[str, ProjPoint], ...] = ()
    lines: tuple[tuple[str, ProjLine], ...] = ()
    whole_plane: bool = False
    unknown: bool = False

    @property
    def is_empty(self) -> bool:
        return not (self.points or self.lines or self.whole_plane or self.unknown)

    def names(self) -> list[str]:
        if self.unknown:
            return ["?"]
        if self.whole_plane:
            return ["P2"]
        return [n for n, _ in self.lines] + [n for n, _ in self.points]

    def same_set(self, other: "LimitSetDesc") -> bool:
        """Equality as point sets (tolerance comparison, order free)."""
        if (self.whole_plane, self.unknown) != (other.whole_plane, other.unknown):
            return False
        a, b = _simplified(self), _simplified(other)
        return _same_members(a.points, b.points) and _same_members(a.lines, b.lines)

    def distance(self, x: np.ndarray) -> np.ndarray:
        """Fubini-Study distance from unit rows of x to the described set."""
        x = np.atleast_2d(np.asarray(x, dtype=complex))
        x = x / np.linalg.norm(x, axis=1, keepdims=True)
        if self.whole_plane:
            return np.zeros(len(x))
        if self.unknown:
            raise ValueError("distance to an unknown set is undefined")
        d = np.full(len(x), math.pi / 2)
        for _, p in self.points:
            c = np.abs(x @ np.conj(p.coords))
            d = np.minimum(d, np.arccos(np.clip(c, 0, 1)))
        for _, l in self.lines:
            s = np.abs(x @ l.coords)
            d = np.minimum(d, np.arcsin(np.clip(s, 0, 1)))
        return d

    def image(self, g: ProjTransform) -> "LimitSetDesc":
        return LimitSetDesc(self.tag,
                            tuple((n, apply(g, p)) for n, p in self.points),
                            tuple((n, apply_line(g, l)) for n, l in self.lines),
                            self.whole_plane, self.unknown)

    def to_json(self) -> dict:
        if self.unknown:
            return {"unknown": True}
        if self.whole_plane:
            return {"whole_plane": True}
        return {"points": [{"name": n, "coords": p.to_json()} for n, p in self.points],
                "lines": [{"name": n, "dual": l.to_json()} for n, l in self.lines]}


def _same_members(xs, ys) -> bool:
    if len(xs) != len(ys):
        return False
    left = [v for _, v in ys]
    for _, x in xs:
        hit = next((k for k, y in enumerate(left) if x == y), None)
        if hit is None:
            return False
        left.pop(hit)
    return True


def _simplified(d: LimitSetDesc) -> LimitSetDesc:
    lines = []
    for n, l in d.lines:
        if not any(l == m for _, m in lines):
            lines.append((n, l))
    pts = []
    for n, p in d.points:
        if any(l.contains(p, 1e-8) for _, l in lines) or any(p == q for _, q in pts):
            continue
        pts.append((n, p))
    return LimitSetDesc(d.tag, tuple(pts), tuple(lines), d.whole_plane, d.unknown)


def union(tag: str, *parts: LimitSetDesc) -> LimitSetDesc:
    if any(p.unknown for p in parts):
        return LimitSetDesc(tag, unknown=True)
    if any(p.whole_plane for p in parts):
        return LimitSetDesc(tag, whole_plane=True)
    pts = tuple(x for p in parts for x in p.points)
    lines = tuple(x for p in parts for x in p.lines)
    return _simplified(LimitSetDesc(tag, pts, lines))


@dataclass(frozen=True)
class LimitSets:
    L0: LimitSetDesc
    L1: LimitSetDesc
    L2: LimitSetDesc
    Lambda: LimitSetDesc

    def to_json(self) -> dict:
        return {"L0": self.L0.to_json(), "L1": self.L1.to_json(),
                "L2": self.L2.to_json(), "Lambda": self.Lambda.to_json()}


@dataclass(frozen=True)
class RegionDesc:
    """Maximal regions, each the complement of a described set."""
    removed: tuple[LimitSetDesc, ...]

    def to_json(self) -> list:
        return [{"complement_of": r.to_json()} for r in self.removed]


# tokens: "e1".."e3" are points, "e1e2" the line through e1 and e2
_TABLE = {
    ElementKind.IDENTITY: ((), (), (), ()),
    ElementKind.DIAG_TORSION: ((), (), (), ()),
    ElementKind.BLOCK3_UNIPOTENT: (("e1",), ("e1",), ("e1e2",), ("e1e2",)),
    ElementKind.DIAG_ELLIPTIC_IRRATIONAL: ("?", "P2", (), "P2"),
    ElementKind.DIAG_EQUAL_MODULI_RATIONAL: (("e1e2", "e3"),) * 4,
    ElementKind.DIAG_EQUAL_MODULI_IRRATIONAL: (("e1", "e2", "e3"),) + (("e1e2", "e3"),) * 3,
    ElementKind.DIAG_STRONG_LOXODROMIC: (("e1", "e2", "e3"), ("e1", "e2", "e3"),
                                         ("e1e2", "e2e3"), ("e1e2", "e2e3")),
    ElementKind.B21_TORSION: (("e1e3",), ("e1",), ("e1",), ("e1e3",)),
    ElementKind.B21_UNIT_IRRATIONAL: (("e1", "e3"), ("e1e3",), ("e1",), ("e1e3",)),
    ElementKind.B21_NONUNIT: (("e1", "e3"), ("e1", "e3"), ("e1e2", "e1e3"), ("e1e2", "e1e3")),
}


def _describe(tag: str, tokens, basis: np.ndarray, tol: Tolerances) -> LimitSetDesc:
    if tokens == "?":
        return LimitSetDesc(tag, unknown=True)
    if tokens == "P2":
        return LimitSetDesc(tag, whole_plane=True)
    pts, lines = [], []
    for t in tokens:
        if len(t) == 2:
            pts.append((t, ProjPoint(basis[:, int(t[1]) - 1], tol)))
        else:
            i, j = int(t[1]) - 1, int(t[3]) - 1
            lines.append((f"line({t[:2]},{t[2:]})",
                          ProjLine(np.cross(basis[:, i], basis[:, j]), tol)))
    return LimitSetDesc(tag, tuple(pts), tuple(lines))


def kulkarni_limit_set(c: ElementClass3, tol: Tolerances = DEFAULT_TOL) -> LimitSets:
    cells = _TABLE[c.kind]
    tags = ("L0", "L1", "L2", "Lambda")
    return LimitSets(*(_describe(t, cell, c.basis, tol) for t, cell in zip(tags, cells)))


def maximal_domains(c: ElementClass3, tol: Tolerances = DEFAULT_TOL) -> RegionDesc:
    if c.kind is ElementKind.DIAG_STRONG_LOXODROMIC:
        cells = [("e1e2", "e3"), ("e3e2", "e1")]
    elif c.kind is ElementKind.B21_NONUNIT:
        cells = [("e1e2", "e3"), ("e3e1",)]
    else:
        return RegionDesc((kulkarni_limit_set(c, tol).Lambda,))
    return RegionDesc(tuple(_describe("removed", cell, c.basis, tol) for cell in cells))


# ---------------------------------------------------------------- invariant lines

@dataclass(frozen=True)
class Pencil:
    """All lines through ``apex``; ``base`` is a line not through the apex."""
    apex: ProjPoint
    base: ProjLine

    def line_at(self, t) -> ProjLine:
        """The member of the pencil through the point t of the base line."""
        q1, q2 = self.base.basis()
        v = np.asarray(t, dtype=complex).reshape(2)
        return ProjLine(np.cross(self.apex.coords, v[0] * q1 + v[1] * q2))

    def to_json(self) -> dict:
        return {"apex": self.apex.to_json(), "base": self.base.to_json()}


@dataclass(frozen=True)
class InvariantLines:
    lines: tuple[ProjLine, ...] = ()
    pencils: tuple[Pencil, ...] = ()
    all_lines: bool = False

    def to_json(self) -> dict:
        if self.all_lines:
            return {"all_lines": True}
        return {"lines": [l.to_json() for l in self.lines],
                "pencils": [p.to_json() for p in self.pencils]}


def invariant_lines(c: ElementClass3, tol: Tolerances = DEFAULT_TOL) -> InvariantLines:
    """Lines mapped to themselves by the element."""
    ed = c.eigen
    P = ed.basis
    lam = ed.jordan_diagonal

    def L(i, j):
        return ProjLine(np.cross(P[:, i], P[:, j]), tol)

    def close(a, b):
        return abs(a - b) <= tol.eig * max(1.0, abs(a), abs(b))

    if ed.jordan_shape is JordanShape.BLOCK3:
        return InvariantLines((L(0, 1),))
    if ed.jordan_shape is JordanShape.BLOCK2_PLUS_1:
        if close(lam[0], lam[2]):
            return InvariantLines((), (Pencil(ProjPoint(P[:, 0], tol), L(1, 2)),))
        return InvariantLines((L(0, 2), L(0, 1)))
    eq = [(i, j) for i, j in ((0, 1), (0, 2), (1, 2)) if close(lam[i], lam[j])]
    if not eq:
        return InvariantLines((L(0, 1), L(0, 2), L(1, 2)))
    if len(eq) == 3:
        return InvariantLines(all_lines=True)
    i, j = eq[0]
    k = 3 - i - j
    return InvariantLines((L(i, j),), (Pencil(ProjPoint(P[:, k], tol), L(i, j)),))
