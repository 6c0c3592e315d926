"""Numerical tolerances and run budgets."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    zero: float = 1e-12     # coordinate treated as zero after unit normalization
    cmp: float = 1e-9       # projective equality
    eig: float = 1e-8       # eigenvalue clustering, relative to ||A||_inf
    rank: float = 1e-8      # numerical rank of A - lambda I
    rot: float = 1e-9       # |lambda^q - 1| for torsion
    unit: float = 1e-8      # | |lambda| - 1 | for unit modulus
    tr: float = 1e-9        # trace-squared comparisons
    axis: float = 1e-9      # distance to the negative real axis
    circle: float = 1e-4    # circle-fit residual
    q_max: int = 720        # largest torsion order tested

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"tolerance {f.name} must be positive")

    def with_(self, **kw) -> "Tolerances":
        return replace(self, **kw)


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class RunConfig:
    tol: Tolerances = DEFAULT_TOL
    max_len: int = 200
    n_min: int = 50
    grid_size: int = 1000
    samples: int = 400
    dedup_cap: int = 2_000_000
    resolution: float = 0.01
    exclusion: float = 0.02
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.max_len < 0 or self.n_min < 0 or self.grid_size <= 0:
            raise ValueError("budgets must be non-negative")
        if self.resolution <= 0 or self.exclusion <= 0 or self.threads < 1:
            raise ValueError("resolution, exclusion and threads must be positive")
