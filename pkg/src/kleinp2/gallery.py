"""Explicit groups: suspensions, the order-three group Gamma_a, a kissing
Schottky group in PSL(3,C), and Inoue-surface groups."""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .actions import ConeSet, GroupSpec, control_projection, kernel_words
from .config import DEFAULT_TOL, Tolerances
from .cyclic import LimitSetDesc
from .errors import RationalThetaWarning, SpectrumMismatch
from .mobius import greenberg_limit_approx
from .projective import GenCircle, MobiusMap, ProjLine, ProjPoint, ProjTransform, canonicalize, e
from .spectral import char_poly, rotation_kind
from .words import Word

SQRT10 = math.sqrt(10)

E12 = ("line(e1,e2)", ProjLine([0, 0, 1]))
E13 = ("line(e1,e3)", ProjLine([0, 1, 0]))
E23 = ("line(e2,e3)", ProjLine([1, 0, 0]))


# ---------------------------------------------------------------- Sol groups

@dataclass(frozen=True)
class SolMembership:
    """First matching family (SOL4_0, SOL4_1, SOL4_1_PRIME or NONE), its parameters,
    and every family the element belongs to."""
    family: str
    params: dict
    families: tuple[str, ...] = ()
    residual: float = 0.0


def sol_matrix(family: str, params: dict) -> np.ndarray:
    p = params
    if family == "SOL4_0":
        lam = complex(p["lam"])
        return np.array([[lam, 0, p["a"]], [0, abs(lam) ** -2, p["b"]], [0, 0, 1]], dtype=complex)
    if family == "SOL4_1":
        return np.array([[p["eps"], p["a"], p["b"]], [0, p["alpha"], p["c"]], [0, 0, 1]], dtype=complex)
    if family == "SOL4_1_PRIME":
        return np.array([[1, p["a"], p["b"] + 1j * math.log(p["alpha"])],
                         [0, p["alpha"], p["c"]], [0, 0, 1]], dtype=complex)
    raise ValueError(f"unknown family {family}")


def _affine_lift(g) -> np.ndarray | None:
    m = g.lift if isinstance(g, ProjTransform) else np.asarray(g, dtype=complex)
    s = float(np.abs(m).max())
    if abs(m[2, 2]) <= 1e-12 * s:
        return None
    m = m / m[2, 2]
    return m


def _candidates(m: np.ndarray) -> dict:
    re = lambda z: float(complex(z).real)
    out = {}
    if m[0, 0] != 0:
        out["SOL4_0"] = {"lam": complex(m[0, 0]), "a": complex(m[0, 2]), "b": re(m[1, 2])}
    alpha = re(m[1, 1])
    if alpha > 0:
        eps = 1.0 if re(m[0, 0]) >= 0 else -1.0
        out["SOL4_1"] = {"eps": eps, "alpha": alpha, "a": re(m[0, 1]), "b": re(m[0, 2]), "c": re(m[1, 2])}
        out["SOL4_1_PRIME"] = {"alpha": alpha, "a": re(m[0, 1]), "b": re(m[0, 2]), "c": re(m[1, 2])}
    return out


def sol_membership(g, tol: float = 1e-10) -> SolMembership:
    """Which of the Sol groups the element lies in, with extracted parameters.

    Parameters are read off the lift normalized to bottom-right entry 1 and
    the element is accepted when rebuilding reproduces that lift within
    ``tol`` relative to its size.
    """
    m = _affine_lift(g)
    if m is None:
        return SolMembership("NONE", {})
    scale = max(1.0, float(np.abs(m).max()))
    hits, best = [], None
    for fam, params in _candidates(m).items():
        r = float(np.abs(sol_matrix(fam, params) - m).max()) / scale
        if r <= tol:
            hits.append((fam, params, r))
    if not hits:
        return SolMembership("NONE", {})
    fam, params, r = hits[0]
    return SolMembership(fam, params, tuple(h[0] for h in hits), r)


def _normalize_eigvec(v: np.ndarray) -> np.ndarray:
    """Unit norm with the first nonzero coordinate positive real."""
    return canonicalize(np.asarray(v, dtype=complex))


@dataclass
class InoueGroup:
    spec: GroupSpec
    membership: dict            # generator name -> SolMembership
    family: str                 # common family of all generators, or NONE
    data: dict = field(default_factory=dict)

    def diagnostics(self) -> dict:
        return {"family": self.family,
                "generators": {n: {"family": m.family, "families": list(m.families)}
                               for n, m in self.membership.items()},
                **self.data}


def _common_family(memb: dict) -> str:
    sets = [set(m.families) for m in memb.values()]
    common = set.intersection(*sets) if sets else set()
    for fam in ("SOL4_0", "SOL4_1", "SOL4_1_PRIME"):
        if fam in common:
            return fam
    return "NONE"


def _integer_matrix(M, n: int) -> np.ndarray:
    A = np.asarray(M, dtype=float)
    if A.shape != (n, n) or not np.all(A == np.round(A)):
        raise SpectrumMismatch(f"expected a {n}x{n} integer matrix")
    return A


def make_inoue_sm(M) -> InoueGroup:
    """Group of an Inoue surface S_M as projective maps of the chart [z; w; 1].

    M in SL(3,Z) must have a real eigenvalue alpha > 1 and a non-real pair
    beta, conj(beta); beta is taken with positive imaginary part.  The
    generators are (w, z) -> (alpha w, beta z) and the translations by
    (a_i, b_i) built from the eigenvectors; each is in SOL4_0 form.
    """
    A = _integer_matrix(M, 3)
    if round(np.linalg.det(A)) != 1:
        raise SpectrumMismatch("M must have determinant 1")
    lam = np.linalg.eigvals(A)
    real = [x for x in lam if abs(x.imag) <= 1e-9 * max(1, abs(x))]
    cplx = [x for x in lam if x.imag > 1e-9 * max(1, abs(x))]
    if len(real) != 1 or len(cplx) != 1 or real[0].real <= 1:
        raise SpectrumMismatch(f"need one real eigenvalue > 1 and a non-real pair, got {lam}")
    alpha, beta = float(real[0].real), complex(cplx[0])
    a = np.linalg.svd(A - alpha * np.eye(3))[2][-1]
    a = _normalize_eigvec(a).real
    b = _normalize_eigvec(np.linalg.svd(A - beta * np.eye(3))[2][-1].conj())
    gens = {"g0": np.diag([beta, alpha, 1]).astype(complex)}
    for i in range(3):
        gens[f"g{i + 1}"] = np.array([[1, 0, b[i]], [0, 1, a[i]], [0, 0, 1]], dtype=complex)
    spec = GroupSpec.of(gens, point=e(1), line=ProjLine([1, 0, 0]))
    memb = {n: sol_membership(g) for n, g in zip(spec.names, spec.gens)}
    data = {"alpha": alpha, "beta": beta, "a": a.tolist(), "b": [complex(x) for x in b],
            "eigen_residual_a": float(np.linalg.norm(A @ a - alpha * a)),
            "eigen_residual_b": float(np.linalg.norm(A @ b - beta * b))}
    return InoueGroup(spec, memb, _common_family(memb), data)


def make_inoue_sn(N, r: int, t: complex = 0, c1: complex = 0, c2: complex = 0,
                  sign: str = "+") -> InoueGroup:
    """Group of an Inoue surface S_N^+ or S_N^-.

    N in SL(2,Z) (sign '+') has eigenvalues alpha > 1 and 1/alpha; for sign
    '-' N in GL(2,Z) has eigenvalues alpha > 1 and -1/alpha.  The condition
    on c1, c2 that makes the quotient a surface is not checked; the output
    carries a flag saying so.  The multiplier of z in the first generator of
    the '+' family is taken to be 1.
    """
    if sign not in "+-" or len(sign) != 1:
        raise ValueError("sign is '+' or '-'")
    if r == 0 or int(r) != r:
        raise ValueError("r must be a nonzero integer")
    A = _integer_matrix(N, 2)
    det = round(np.linalg.det(A))
    want = 1 if sign == "+" else -1
    lam = np.linalg.eigvals(A)
    if det != want or np.any(np.abs(lam.imag) > 1e-12) or abs(abs(lam[0]) - abs(lam[1])) < 1e-12:
        raise SpectrumMismatch(f"N needs real eigenvalues alpha, {'' if want == 1 else '-'}1/alpha; got {lam}")
    lam = lam.real
    i = int(np.argmax(np.abs(lam)))
    alpha, other = float(lam[i]), float(lam[1 - i])
    if alpha <= 1:
        raise SpectrumMismatch("the expanding eigenvalue must be positive")
    a = _normalize_eigvec(np.linalg.svd(A - alpha * np.eye(2))[2][-1]).real
    b = _normalize_eigvec(np.linalg.svd(A - other * np.eye(2))[2][-1]).real
    tau = (b[0] * a[1] - b[1] * a[0]) / r
    g0 = (np.array([[1, 0, t], [0, alpha, 0], [0, 0, 1]], dtype=complex) if sign == "+"
          else np.array([[-1, 0, 0], [0, alpha, 0], [0, 0, 1]], dtype=complex))
    gens = {"g0": g0}
    for k, c in enumerate((c1, c2)):
        gens[f"g{k + 1}"] = np.array([[1, b[k], c], [0, 1, a[k]], [0, 0, 1]], dtype=complex)
    gens["g3"] = np.array([[1, 0, tau], [0, 1, 0], [0, 0, 1]], dtype=complex)
    spec = GroupSpec.of(gens, point=e(1), line=ProjLine([1, 0, 0]))
    memb = {n: sol_membership(g) for n, g in zip(spec.names, spec.gens)}
    data = {"alpha": alpha, "a": a.tolist(), "b": b.tolist(), "tau": tau,
            "integrability_checked": False}
    return InoueGroup(spec, memb, _common_family(memb), data)


def kernel_form_check(spec: GroupSpec, max_len: int, tol: Tolerances = DEFAULT_TOL,
                      form_tol: float = 1e-8) -> dict:
    """Check that every kernel element of the control projection is a translation along p.

    The expected form is a lift lambda (I + N) with N nonzero, N p = 0 and
    the image of N spanned by p (a transvection with centre p); in a frame
    with p = e1 this is the matrix [[1, 0, tau], [0, 1, 0], [0, 0, 1]].
    """
    p = spec.point.coords
    out = []
    for w, g in kernel_words(spec, max_len, tol):
        m = g.lift
        lam = np.trace(m) / 3
        N = m / lam - np.eye(3)
        s = np.linalg.svd(N, compute_uv=False)
        size = float(s[0])
        res_rank = float(s[1])
        res_p = float(np.linalg.norm(N @ p))
        # range of N along p: N minus its projection onto p
        res_range = float(np.linalg.norm(N - np.outer(p, p.conj() @ N)))
        ok = size > form_tol and max(res_rank, res_p, res_range) <= form_tol * max(1.0, size)
        out.append({"word": w.format(spec.names), "tau": size, "ok": bool(ok),
                    "residuals": {"rank": res_rank, "fixes_p": res_p, "range": res_range}})
    return {"trivial": not out, "elements": out, "violations": [x["word"] for x in out if not x["ok"]]}


# ---------------------------------------------------------------- suspensions

@dataclass
class Suspension:
    spec: GroupSpec
    psl2: list[MobiusMap]
    G: list[complex]
    G_infinite: bool
    predicted: ConeSet
    base_cloud: np.ndarray      # homogeneous samples of the Moebius limit set

    @property
    def predicted_empty(self) -> bool:
        return len(self.base_cloud) == 0 and not self.G_infinite


def make_suspension(psl2_gens: Sequence[MobiusMap], G: Sequence[complex], depth: int = 6,
                    tol: Tolerances = DEFAULT_TOL) -> Suspension:
    """Block embedding of a Moebius group together with the scalars diag(g, g, g^-2).

    The predicted limit set is the union of the lines from e3 through the
    limit set of the Moebius group (sampled by loxodromic fixed points up to
    ``depth``), plus the line (e1, e2) when G is infinite.
    """
    gens = {}
    for k, h in enumerate(psl2_gens):
        m = np.eye(3, dtype=complex)
        m[:2, :2] = h.lift
        gens[f"h{k + 1}"] = m
    for k, g in enumerate(G):
        g = complex(g)
        if g == 0:
            raise ValueError("G consists of nonzero scalars")
        gens[f"s{k + 1}"] = np.diag([g, g, g ** -2])
    infinite = any(not rotation_kind(complex(g) ** 3 / abs(complex(g)) ** 3, tol=tol).is_torsion
                   or abs(abs(complex(g)) - 1) > tol.unit for g in G)
    spec = GroupSpec.of(gens, point=e(3), line=ProjLine([0, 0, 1]))
    if psl2_gens:
        cloud, _ = greenberg_limit_approx(list(psl2_gens), depth, tol, parabolic=True)
        base = cloud.points
    else:
        base = np.zeros((0, 2), complex)
    extra = LimitSetDesc("extra", (), (E12,)) if infinite else None
    return Suspension(spec, list(psl2_gens), [complex(g) for g in G], infinite,
                      ConeSet(base, extra), base)


def classical_schottky(cosh_t: float = 5.0) -> list[MobiusMap]:
    """Two hyperbolic generators pairing disks around +-coth t and +-i coth t."""
    c = cosh_t
    s = math.sqrt(c * c - 1)
    return [MobiusMap(np.array([[c, s], [s, c]])), MobiusMap(np.array([[c, 1j * s], [-1j * s, c]]))]


# ---------------------------------------------------------------- Gamma_a

B_PERM = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)


def make_gamma_a(a: complex) -> GroupSpec:
    a = complex(a)
    if a == 0:
        raise ValueError("a must be nonzero")
    return GroupSpec.of({"M_a": np.diag([a, a, a ** -2]), "B": B_PERM})


def gamma_a_lines() -> LimitSetDesc:
    return LimitSetDesc("Lambda", (), (E12, E13, E23))


@dataclass(frozen=True)
class GammaANormalForm:
    """B^k diag(a^E1, a^E2, a^E3) with (E1, E2, E3) = (n1-2n2+n3, n1+n2-2n3, n2+n3-2n1)."""
    k: int
    exponents: tuple[int, int, int]
    n: tuple[int, int, int]

    def matrix(self, a: complex) -> np.ndarray:
        a = complex(a)
        D = np.diag([a ** x for x in self.exponents])
        return np.linalg.matrix_power(B_PERM, self.k) @ D


def gamma_a_normal_form(word: Word) -> GammaANormalForm:
    """Normal form of a word in (M_a, B), generator 0 being M_a.

    Moving diagonal factors past B rotates their entries: D B = B D' with
    D' = diag(d2, d3, d1), and D B^-1 = B^-1 diag(d3, d1, d2).
    """
    k, E = 0, (0, 0, 0)
    for g, s in word.letters:
        if g == 0:
            E = (E[0] + s, E[1] + s, E[2] - 2 * s)
        elif g == 1:
            k = (k + s) % 3
            E = (E[1], E[2], E[0]) if s == 1 else (E[2], E[0], E[1])
        else:
            raise ValueError("Gamma_a has two generators")
    S = ((E[0] + 1) % 3) - 1             # S = E1 mod 3 in {-1, 0, 1}
    n = ((S - E[2]) // 3, (S - E[0]) // 3, (S - E[1]) // 3)
    return GammaANormalForm(k, E, n)


# ---------------------------------------------------------------- kissing Schottky group

M1 = np.array([[-1 - 1j, 1j, 0], [-1j, -1 + 1j, 0], [0, 0, 1]])
M2 = np.array([[1 - 1j, -1j, 0], [1j, 1 + 1j, 0], [0, 0, 1]])
MOB1 = MobiusMap(np.array([[1 + 1j, -1j], [1j, 1 - 1j]]))
MOB2 = MobiusMap(np.array([[1 - 1j, -1j], [1j, 1 + 1j]]))
MOB3 = MobiusMap(np.array([[3j, 10j], [1j, 3j]]))


def kissing_disks():
    """The six unit disks of the pairing, as (generator, R, S)."""
    D = lambda c: GenCircle.disk(c, 1.0, True)
    return (("M1", D(1 + 1j), D(1 - 1j)), ("M2", D(-1 + 1j), D(-1 - 1j)), ("M_eps", D(-3), D(3)))


def eps1_of(theta: float) -> complex:
    return -(3 + SQRT10) ** (1 / 3) * cmath.exp(-1j * math.pi * (1 + 4 * theta) / 6)


def m_eps(theta: float, eps2: complex, eps3: complex) -> np.ndarray:
    e1 = eps1_of(theta)
    return np.array([[3j * e1, 10j * e1, 0], [1j * e1, 3j * e1, 0], [eps2, eps3, e1 ** -2]])


def k_pm(theta: float, eps2: complex, eps3: complex) -> tuple[complex, complex]:
    """(k-, k+): third coordinates of the eigenvectors for alpha- and alpha+."""
    u = cmath.exp(1j * math.pi * (1 + 4 * theta) / 6)
    w = cmath.exp(2j * math.pi * theta)
    c = (3 + SQRT10) ** (1 / 3)
    out = []
    for s in (-1, 1):
        num = 1j * (s * SQRT10 * eps2 + eps3) * u
        den = c * (3 * (1 - w) - SQRT10 * (-s - w))
        out.append(num / den)
    return out[0], out[1]


@dataclass
class KissingSchottky:
    spec: GroupSpec
    pairing: object               # actions.SchottkyPairing
    mobius: tuple[MobiusMap, MobiusMap, MobiusMap]
    diagnostics: dict
    degenerate: bool

    def predicted_limit_set(self, depth: int = 6, tol: Tolerances = DEFAULT_TOL) -> ConeSet:
        cloud, _ = greenberg_limit_approx(list(self.mobius), depth, tol, parabolic=True)
        return ConeSet(cloud.points)


def make_kissing_schottky(theta: float = math.sqrt(2) - 1, eps2: complex = 1, eps3: complex = 1,
                          tol: Tolerances = DEFAULT_TOL) -> KissingSchottky:
    """Three generators M1, M2, M_eps fixing e3, with eigen-data of M_eps.

    Warns with RationalThetaWarning when exp(2 pi i theta) is a root of unity
    of small order; flags the degenerate case k+ = k- = 0.
    """
    from .actions import SchottkyPairing
    rot = rotation_kind(cmath.exp(2j * math.pi * theta), tol=tol)
    if rot.is_torsion:
        warnings.warn(f"theta={theta!r} is rational to working precision ({rot})",
                      RationalThetaWarning, stacklevel=2)
    e1 = eps1_of(theta)
    M = m_eps(theta, eps2, eps3)
    u = cmath.exp(1j * math.pi * (1 + 4 * theta) / 6)
    c = (3 + SQRT10) ** (1 / 3)
    a_minus = -1j * (3 - SQRT10) * c / u
    a_plus = -1j * (3 + SQRT10) * c / u
    lam3 = cmath.exp(2j * math.pi * theta) * a_minus
    km, kp = k_pm(theta, eps2, eps3)
    p1 = np.array([-SQRT10, 1, km])
    p2 = np.array([SQRT10, 1, kp])
    cp = char_poly(M)
    P = lambda x: -complex(np.polyval(cp, x))      # det(M - x I)
    diag = {
        "eps1": e1,
        "eigenvalues_predicted": [a_minus, a_plus, lam3],
        "eps1_inv_sq_vs_third": abs(e1 ** -2 - lam3),
        "charpoly_residuals": [abs(P(x)) for x in (a_minus, a_plus, lam3)],
        "k_minus": km, "k_plus": kp,
        "p1": p1, "p2": p2,
        "eigvec_residuals": [float(np.linalg.norm(M @ p1 - a_minus * p1)),
                             float(np.linalg.norm(M @ p2 - a_plus * p2)),
                             float(np.linalg.norm(M[:, 2] - e1 ** -2 * np.array([0, 0, 1])))],
        "theta_rotation": str(rot),
        "det": complex(np.linalg.det(M)),
    }
    degenerate = abs(km) + abs(kp) == 0
    diag["degenerate_affine_case"] = degenerate
    spec = GroupSpec.of({"M1": M1, "M2": M2, "M_eps": M}, point=e(3), line=ProjLine([0, 0, 1]))
    return KissingSchottky(spec, SchottkyPairing(kissing_disks()), (MOB1, MOB2, MOB3), diag, degenerate)
