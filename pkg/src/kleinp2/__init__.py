"""Limit sets of discrete groups of projective transformations of P^2(C)."""

from .actions import (ConeSet, ControlProjection, GroupSpec, OracleClouds, PointCloud,
                      SchottkyPairing, cluster_oracle, control_projection, enumerate_words,
                      finiteness_heuristic, hausdorff_one_sided, homomorphism_defect,
                      line_coverage, schottky_certificate)
from .config import DEFAULT_TOL, RunConfig, Tolerances
from .cyclic import (ElementClass3, ElementKind, LimitSetDesc, classify, invariant_lines,
                     kulkarni_limit_set, maximal_domains)
from .errors import *  # noqa: F401,F403
from .mobius import (CrElement, ElementaryCertificate, MobiusClass, cr_membership,
                     cr_p_generator, cross_ratio_loxodromic_test, elementary_certificate,
                     elliptic_with_fixed_points, greenberg_limit_approx, elliptic_fixed_point_predicates,
                     mobius_classify, parabolic_pair_witness)
from .projective import (GenCircle, MobiusMap, ProjLine, ProjPoint, ProjTransform, apply,
                         cross_ratio, e, fs_distance, line_through, meet, point_line_distance)
from .spectral import EigenData, JordanShape, char_poly, eigen_decompose, rotation_kind

__version__ = "0.1.0"
