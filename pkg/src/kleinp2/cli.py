"""Command-line interface.

Exit codes: 0 success or valid, 1 a check failed, 2 usage error, 3 a
precondition of the input does not hold.  Machine-readable JSON goes to
stdout, short human summaries to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import io as kio
from .actions import (GroupSpec, SchottkyPairing, cluster_oracle, control_projection,
                      hausdorff_one_sided, line_coverage)
from .config import DEFAULT_TOL, RunConfig
from .cyclic import classify, invariant_lines, kulkarni_limit_set, maximal_domains
from .errors import EmptyDomain, KleinError, NotControllable, PreconditionViolation
from .mobius import elementary_certificate, greenberg_limit_approx
from .projective import ProjLine, ProjPoint, plane_grid

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_PRECONDITION = 0, 1, 2, 3
ACC_DISTANCE = 0.05
FAMILIES = ("kissing-schottky", "gamma-a", "suspension", "inoue-sm", "inoue-sn")


class UsageError(Exception):
    pass


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load(arg: str):
    """JSON from a file path, '-' for stdin, or an inline literal."""
    if arg == "-":
        return json.load(sys.stdin)
    s = arg.lstrip()
    if s.startswith("[") or s.startswith("{"):
        return json.loads(arg)
    p = Path(arg)
    if not p.exists():
        raise UsageError(f"no such file: {arg}")
    return json.loads(p.read_text())


def _group_dict(d) -> dict:
    """Accept a bare group or a gallery document holding one under 'group'."""
    if isinstance(d, dict) and "group" in d:
        return d["group"]
    return d


def _matrix(arg: str | None, name: str | None) -> np.ndarray:
    if arg is None:
        raise UsageError("give --matrix")
    d = _load(arg)
    if isinstance(d, dict) and ("group" in d or "generators" in d):
        gens = _group_dict(d).get("generators", [])
        if not gens:
            raise UsageError("the group has no generators")
        if name is None:
            if len(gens) > 1:
                raise UsageError("several generators: pick one with --generator")
            return kio.matrix_from_json(gens[0]["matrix"])
        for g in gens:
            if g.get("name") == name:
                return kio.matrix_from_json(g["matrix"])
        raise UsageError(f"no generator named {name}")
    m = kio.matrix_from_json(d)
    if m.shape != (3, 3):
        raise UsageError(f"expected a 3x3 matrix, got shape {m.shape}")
    return m


def _group(args) -> tuple[GroupSpec, dict]:
    if args.group is not None:
        doc = _load(args.group)
        spec = GroupSpec.from_json(_group_dict(doc))
    elif args.matrix is not None:
        doc = {}
        spec = GroupSpec.of({"g": _matrix(args.matrix, getattr(args, "generator", None))})
    else:
        raise UsageError("give --group or --matrix")
    if not spec.gens:
        raise UsageError("empty generator list")
    point, line = getattr(args, "point", None), getattr(args, "line", None)
    if point is not None or line is not None:
        spec = GroupSpec(spec.names, spec.gens,
                         ProjPoint(kio.vector_from_json(_load(point))) if point else spec.point,
                         ProjLine(kio.vector_from_json(_load(line))) if line else spec.line)
    return spec, doc if isinstance(doc, dict) else {}


def _exact_turns(arg: str | None):
    """'1/5,irr,0' -> [Fraction(1, 5), None, Fraction(0)]."""
    if arg is None:
        return None
    out = []
    for tok in arg.split(","):
        tok = tok.strip().lower()
        out.append(None if tok in ("irr", "irrational", "none") else Fraction(tok))
    if len(out) != 3:
        raise UsageError("--exact-rotations takes three comma-separated entries")
    return out


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


def _config(args) -> RunConfig:
    return RunConfig(max_len=args.word_len, n_min=args.n_min, grid_size=args.samples,
                     seed=args.seed, threads=args.threads)


# ---------------------------------------------------------------- commands

def cmd_classify(args) -> int:
    m = _matrix(args.matrix, args.generator)
    c = classify(m, DEFAULT_TOL, exact_turns=_exact_turns(args.exact_rotations), hedged=args.hedged)
    out = {**c.to_json(),
           **kulkarni_limit_set(c).to_json(),
           "invariant_lines": invariant_lines(c).to_json(),
           "maximal_domains": maximal_domains(c).to_json()}
    text = kio.dumps(out)
    _write(args.out, text)
    sys.stdout.write(text)
    _say(f"class {c.kind.value}")
    return EXIT_OK


def _prediction(doc: dict, depth: int):
    """Predicted limit set carried by a gallery document, as (name, distance function)."""
    fam = doc.get("family")
    if fam not in FAMILIES:
        return None
    g = _build_family(fam, doc.get("params", {}))
    if fam == "kissing-schottky":
        return "cone over the Moebius limit set", g.predicted_limit_set(depth).distance
    if fam == "suspension":
        return "cone over the Moebius limit set", g.predicted.distance
    if fam == "gamma-a":
        from .gallery import gamma_a_lines
        return "three coordinate lines", gamma_a_lines().distance
    return None


def cmd_limit_set(args) -> int:
    spec, doc = _group(args)
    if args.mode == "table":
        if len(spec.gens) != 1:
            raise UsageError("table mode needs a single generator; use --mode oracle")
        c = classify(spec.gens[0], DEFAULT_TOL, exact_turns=_exact_turns(args.exact_rotations))
        out = {"class": c.kind.value, **kulkarni_limit_set(c).to_json()}
        text = kio.dumps(out)
        _write(args.out, text)
        sys.stdout.write(text)
        _say(f"class {c.kind.value}")
        return EXIT_OK

    cfg = _config(args)
    X = plane_grid(cfg.grid_size, np.random.default_rng(cfg.seed))
    oc = cluster_oracle(spec, cfg.max_len, X, cfg.n_min, samples=cfg.samples,
                        seed=cfg.seed, threads=cfg.threads, cap=cfg.dedup_cap)
    lam = oc.Lambda()
    report = {"mode": "oracle", "max_len": cfg.max_len, "n_min": cfg.n_min,
              "grid_size": cfg.grid_size, "seed": cfg.seed,
              "counts": {"L0": len(oc.L0), "L1": len(oc.L1), "L2": len(oc.L2), "Lambda": len(lam)},
              "skipped_ill_conditioned": oc.L0.meta.get("skipped_ill_conditioned", 0)}
    ok = True
    if len(spec.gens) == 1:
        c = classify(spec.gens[0], DEFAULT_TOL, exact_turns=_exact_turns(args.exact_rotations))
        desc = kulkarni_limit_set(c)
        report["class"] = c.kind.value
        report["described"] = desc.to_json()
        if not desc.Lambda.unknown:
            h = hausdorff_one_sided(lam.points, desc.Lambda.distance)
            cov = {n: line_coverage(lam.points, l) for n, l in desc.Lambda.lines}
            passed = h <= ACC_DISTANCE and all(v["count"] >= 50 and v["max_gap"] <= 0.2
                                               for v in cov.values())
            report["check"] = {"hausdorff": h, "line_coverage": cov, "pass": bool(passed)}
            ok = passed
    else:
        pred = _prediction(doc, args.depth)
        if pred is not None:
            name, dist = pred
            layers = {k: hausdorff_one_sided(getattr(oc, k).points, dist) for k in ("L0", "L1", "L2")}
            h = max(layers.values())
            report["check"] = {"prediction": name, "hausdorff": h, "per_layer": layers,
                               "pass": bool(h <= ACC_DISTANCE)}
            ok = h <= ACC_DISTANCE
    _write(args.out, kio.cloud_csv(lam.points, lam.word_length))
    text = kio.dumps(report)
    _write(args.report, text)
    sys.stdout.write(text)
    chk = report.get("check")
    _say(f"cloud: {len(lam)} points" + (f", Hausdorff {chk['hausdorff']:.4f}, "
                                        f"{'pass' if chk['pass'] else 'FAIL'}" if chk else ""))
    return EXIT_OK if ok else EXIT_FAILED


def cmd_project(args) -> int:
    spec, _ = _group(args)
    cp = control_projection(spec, DEFAULT_TOL)
    cert = elementary_certificate(cp.maps, args.depth, DEFAULT_TOL)
    cloud, fit = greenberg_limit_approx(cp.maps, args.depth, DEFAULT_TOL)
    out = {"mobius": cp.to_json(), "certificate": cert.to_json(),
           "greenberg": {"depth": args.depth, "points": len(cloud),
                         "circle_fit": None if fit is None else
                         {"hermitian": fit.H, "residual": fit.residual,
                          "compatible": fit.compatible, "n_points": fit.n_points}}}
    _write(args.out, kio.p1_csv(cloud.points, cloud.word_length))
    text = kio.dumps(out)
    sys.stdout.write(text)
    _say(f"{len(cp.maps)} Moebius generators, certificate {cert.type}, {len(cloud)} fixed points")
    return EXIT_OK


def cmd_schottky_verify(args) -> int:
    from .actions import schottky_certificate
    spec, doc = _group(args)
    if args.pairing is not None:
        pd = _load(args.pairing)
        pairing = SchottkyPairing.from_json(pd.get("pairing", pd))
    elif "pairing" in doc:
        pairing = SchottkyPairing.from_json(doc["pairing"])
    else:
        raise UsageError("give --pairing")
    rep = schottky_certificate(spec, pairing, DEFAULT_TOL)
    text = kio.dumps(rep)
    _write(args.out, text)
    sys.stdout.write(text)
    _say(f"valid={rep['valid']} kissing={rep['kissing']}")
    return EXIT_OK if rep["valid"] else EXIT_FAILED


def _cscalar(s) -> complex:
    return kio._scalar(s)


def _build_family(fam: str, params: dict):
    from . import gallery as G
    if fam == "kissing-schottky":
        return G.make_kissing_schottky(float(params["theta"]), _cscalar(params["eps2"]),
                                       _cscalar(params["eps3"]))
    if fam == "gamma-a":
        return G.make_gamma_a(_cscalar(params["a"]))
    if fam == "suspension":
        from .mobius import MobiusMap
        psl2 = ([MobiusMap(kio.matrix_from_json(m)) for m in params["psl2"]]
                if params.get("psl2") else G.classical_schottky(float(params.get("cosh_t", 5.0))))
        return G.make_suspension(psl2, [_cscalar(g) for g in params["G"]], int(params.get("depth", 6)))
    if fam == "inoue-sm":
        return G.make_inoue_sm(np.array(params["M"]))
    if fam == "inoue-sn":
        return G.make_inoue_sn(np.array(params["N"]), int(params["r"]), _cscalar(params.get("t", 0)),
                               _cscalar(params.get("c1", 0)), _cscalar(params.get("c2", 0)),
                               params.get("sign", "+"))
    raise UsageError(f"unknown family {fam}")


def _family_params(args) -> dict:
    fam = args.family
    if fam == "kissing-schottky":
        return {"theta": args.theta, "eps2": args.eps2, "eps3": args.eps3}
    if fam == "gamma-a":
        return {"a": args.a}
    if fam == "suspension":
        return {"G": args.G.split(","), "cosh_t": args.cosh_t, "depth": args.depth}
    if fam == "inoue-sm":
        return {"M": json.loads(args.M)}
    return {"N": json.loads(args.N), "r": args.r, "t": args.t, "c1": args.c1, "c2": args.c2,
            "sign": args.sign}


def cmd_gallery(args) -> int:
    from .gallery import InoueGroup, KissingSchottky, Suspension
    params = _family_params(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        g = _build_family(args.family, params)
    out = {"family": args.family, "params": params,
           "warnings": [str(w.message) for w in caught]}
    if isinstance(g, KissingSchottky):
        out.update(group=g.spec.to_json(), pairing=g.pairing.to_json(),
                   diagnostics={**g.diagnostics, "mobius": [m.to_json() for m in g.mobius]})
    elif isinstance(g, Suspension):
        out.update(group=g.spec.to_json(),
                   diagnostics={"G_infinite": g.G_infinite, "predicted_empty": g.predicted_empty,
                                "base_points": len(g.base_cloud)})
    elif isinstance(g, InoueGroup):
        out.update(group=g.spec.to_json(), diagnostics=g.diagnostics())
    else:
        from .actions import finiteness_heuristic
        out.update(group=g.to_json(),
                   diagnostics={"finiteness": finiteness_heuristic(g, 4)})
    text = kio.dumps(out)
    _write(args.out, text)
    sys.stdout.write(text)
    _say(f"{args.family}: {len(out['group']['generators'])} generators")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kleinp2", description="Limit sets of groups acting on P^2(C).")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, group=True):
        if group:
            sp.add_argument("--group", help="group JSON (file, '-' or inline)")
        sp.add_argument("--matrix", help="3x3 matrix JSON (file, '-' or inline)")
        sp.add_argument("--generator", help="generator name when --matrix points at a group")
        sp.add_argument("--out", help="output file")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("classify", help="table row and limit sets of one element")
    common(sp, group=False)
    sp.add_argument("--exact-rotations", help="eigenvalue arguments in turns, e.g. '0,1/5,irr'")
    sp.add_argument("--hedged", action="store_true", help="also report the other Jordan shape")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("limit-set", help="described or sampled limit set")
    common(sp)
    sp.add_argument("--mode", choices=("table", "oracle"), default="oracle")
    sp.add_argument("--word-len", type=int, default=RunConfig.max_len)
    sp.add_argument("--n-min", type=int, default=RunConfig.n_min)
    sp.add_argument("--samples", type=int, default=RunConfig.grid_size, help="base grid size")
    sp.add_argument("--depth", type=int, default=7, help="depth of predicted sets")
    sp.add_argument("--report", help="also write the JSON report here")
    sp.add_argument("--exact-rotations")
    sp.set_defaults(func=cmd_limit_set)

    sp = sub.add_parser("project", help="Moebius action on the invariant line")
    common(sp)
    sp.add_argument("--point", help="fixed point triple (overrides the group file)")
    sp.add_argument("--line", help="invariant line dual triple (overrides the group file)")
    sp.add_argument("--depth", "--word-len", dest="depth", type=int, default=6)
    sp.set_defaults(func=cmd_project)

    sp = sub.add_parser("schottky-verify", help="check a circle pairing")
    common(sp)
    sp.add_argument("--pairing", help="pairing JSON; defaults to the one in the group file")
    sp.add_argument("--point")
    sp.add_argument("--line")
    sp.set_defaults(func=cmd_schottky_verify)

    sp = sub.add_parser("gallery", help="build a named group")
    sp.add_argument("family", choices=FAMILIES)
    sp.add_argument("--theta", type=float, default=math.sqrt(2) - 1)
    sp.add_argument("--eps2", default="1")
    sp.add_argument("--eps3", default="1")
    sp.add_argument("--a", default="2")
    sp.add_argument("--G", default="-1", help="comma-separated scalars")
    sp.add_argument("--cosh-t", type=float, default=5.0)
    sp.add_argument("--depth", type=int, default=6)
    sp.add_argument("--M", default="[[0,0,1],[1,0,1],[0,1,0]]")
    sp.add_argument("--N", default="[[2,1],[1,1]]")
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("--t", default="0")
    sp.add_argument("--c1", default="0")
    sp.add_argument("--c2", default="0")
    sp.add_argument("--sign", choices=("+", "-"), default="+")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gallery)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        _say(f"usage error: {exc}")
        return EXIT_USAGE
    except (PreconditionViolation, NotControllable, EmptyDomain) as exc:
        _say(f"precondition: {type(exc).__name__}: {exc}")
        return EXIT_PRECONDITION
    except (KleinError, ValueError) as exc:
        _say(f"error: {type(exc).__name__}: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
