"""Reduced words in a finitely generated matrix group, enumerated breadth-first.

Letters are numbered 2i (generator i) and 2i+1 (its inverse); a word is read
left to right, so its matrix is the product of its letters in that order.
Elements are deduplicated projectively: two words giving the same element up
to the scalar ambiguity of the lift are kept once, under the first word in
(length, lexicographic) order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .config import DEFAULT_TOL, Tolerances
from .errors import BudgetExceeded
from .projective import _inv_unimodular

HASH_QUANTUM = 1e-7


@dataclass(frozen=True)
class Word:
    """Sequence of (generator index, exponent +-1)."""
    letters: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_codes(cls, codes: Sequence[int]) -> "Word":
        return cls(tuple((c // 2, 1 if c % 2 == 0 else -1) for c in codes))

    def codes(self) -> tuple[int, ...]:
        return tuple(2 * g + (0 if e == 1 else 1) for g, e in self.letters)

    def __len__(self):
        return len(self.letters)

    @property
    def reduced(self) -> bool:
        return all(not (a[0] == b[0] and a[1] == -b[1])
                   for a, b in zip(self.letters, self.letters[1:]))

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __mul__(self, other: "Word") -> "Word":
        out = list(self.letters)
        for x in other.letters:
            if out and out[-1][0] == x[0] and out[-1][1] == -x[1]:
                out.pop()
            else:
                out.append(x)
        return Word(tuple(out))

    def evaluate(self, lifts: Sequence[np.ndarray]) -> np.ndarray:
        d = lifts[0].shape[0]
        m = np.eye(d, dtype=complex)
        for g, e in self.letters:
            m = m @ (lifts[g] if e == 1 else _inv_unimodular(lifts[g]))
        return m

    def format(self, names: Sequence[str]) -> str:
        if not self.letters:
            return "id"
        return "*".join(names[g] + ("" if e == 1 else "^-1") for g, e in self.letters)


@dataclass
class WordTable:
    words: list[Word]
    mats: np.ndarray            # (N, d, d) lifts, same order as words

    def __len__(self):
        return len(self.words)

    def lengths(self) -> np.ndarray:
        return np.array([len(w) for w in self.words], dtype=int)


def _features(mats: np.ndarray, rot: complex = 1.0) -> np.ndarray:
    n = mats.shape[0]
    flat = mats.reshape(n, -1) * rot
    norm = np.linalg.norm(flat, axis=1, keepdims=True)
    u = flat / norm
    return np.hstack([u.real, u.imag, np.log(norm)])


def _gap(a: np.ndarray, b: np.ndarray, roots) -> float:
    s = max(np.linalg.norm(a), np.linalg.norm(b))
    return min(float(np.linalg.norm(a - r * b)) for r in roots) / s


class _Dedup:
    """Projective dedup set: KD-tree candidates, exact recheck."""

    def __init__(self, roots, tol: float):
        self.roots = roots
        self.tol = tol
        self.mats = np.zeros((0, 0, 0), complex)
        self.tree = None

    def _rebuild(self):
        feats = np.vstack([_features(self.mats, r) for r in self.roots])
        self.tree = cKDTree(feats)

    def filter(self, cand: np.ndarray) -> np.ndarray:
        """Indices of candidates new to the set and to earlier candidates."""
        if cand.shape[0] == 0:
            return np.zeros(0, int)
        radius = 4 * HASH_QUANTUM
        f = _features(cand)
        n_old = self.mats.shape[0]
        keep = np.ones(cand.shape[0], bool)
        if n_old:
            hits = self.tree.query_ball_point(f, radius)
            for i, h in enumerate(hits):
                for j in h:
                    if _gap(cand[i], self.mats[j % n_old], self.roots) <= self.tol:
                        keep[i] = False
                        break
        # among the candidates themselves: keep the first
        ct = cKDTree(np.vstack([_features(cand, r) for r in self.roots]))
        nc = cand.shape[0]
        for i, h in enumerate(ct.query_ball_point(f, radius)):
            if not keep[i]:
                continue
            for j in h:
                j = j % nc
                if j < i and keep[j] and _gap(cand[i], cand[j], self.roots) <= self.tol:
                    keep[i] = False
                    break
        idx = np.nonzero(keep)[0]
        self.mats = cand[idx] if n_old == 0 else np.concatenate([self.mats, cand[idx]])
        self._rebuild()
        return idx


def enumerate_group(lifts: Sequence[np.ndarray], max_len: int, roots,
                    tol: Tolerances = DEFAULT_TOL, cap: int = 2_000_000,
                    dedup: bool = True) -> WordTable:
    """All reduced words up to max_len, one per distinct element when dedup is on."""
    lifts = [np.asarray(m, dtype=complex) for m in lifts]
    d = lifts[0].shape[0] if lifts else 1
    letters = []
    for m in lifts:
        letters += [m, _inv_unimodular(m)]
    L = np.array(letters).reshape(-1, d, d)
    nl = len(letters)

    eye = np.eye(d, dtype=complex)[None]
    words = [Word()]
    mats = eye
    last = np.array([-1])
    seen = _Dedup(roots, tol.cmp) if dedup else None
    if seen is not None:
        seen.filter(eye)
    frontier_idx = np.array([0])
    for _ in range(max_len):
        if frontier_idx.size == 0 or nl == 0:
            break
        F = mats[frontier_idx]
        fl = last[frontier_idx]
        parents = np.repeat(np.arange(len(frontier_idx)), nl)
        codes = np.tile(np.arange(nl), len(frontier_idx))
        ok = ~((fl[parents] >= 0) & ((codes ^ 1) == fl[parents]))
        parents, codes = parents[ok], codes[ok]
        cand = np.einsum("nij,njk->nik", F[parents], L[codes])
        if seen is not None:
            keep = seen.filter(cand)
        else:
            keep = np.arange(len(cand))
        base = len(words)
        for i in keep:
            p = int(frontier_idx[parents[i]])
            c = int(codes[i])
            words.append(Word(words[p].letters + ((c // 2, 1 if c % 2 == 0 else -1),)))
        mats = np.concatenate([mats, cand[keep]])
        last = np.concatenate([last, codes[keep]])
        frontier_idx = np.arange(base, len(words))
        if len(words) > cap:
            raise BudgetExceeded(f"more than {cap} distinct elements")
    return WordTable(words, mats)


def random_reduced_word(rng: np.random.Generator, n_gens: int, length: int) -> Word:
    codes = []
    for _ in range(length):
        while True:
            c = int(rng.integers(2 * n_gens))
            if not codes or (c ^ 1) != codes[-1]:
                break
        codes.append(c)
    return Word.from_codes(codes)
