"""Command-line front end.

Subcommands: rate-region, nsg, sum-rate, secret-sharing, guessing, project,
convert, faces, certify, and the debug subcommand lp.  Human output follows
the ITCP session style; --format json emits a versioned machine-readable
document.  Exit codes: 0 success, 1 parse error, 2 infeasible or invalid
model, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import chm, dd, lp, netinfo, symchm
from .errors import (
    ConevolveError,
    ElementCapExceeded,
    InconsistentEqualities,
    InfeasibleParent,
    InfeasibleSystem,
    InvalidAccessStructure,
    InvalidDigraph,
    InvalidProblem,
    NotFullDimensional,
    NTooLarge,
    RayCapExceeded,
    SearchCapExceeded,
    ZeroNormalInfeasible,
)
from .groups import FiniteGroup, Permutation, group_closure
from .polyhedra import (
    HRepresentation,
    boundedness_transform,
    enumerate_faces,
    format_h,
    format_v,
    parse_h,
    parse_v,
    strip_bounding,
)
from .rational import rat

logger = logging.getLogger("conevolve")

_PARSE_ERROR, _MODEL_ERROR, _CAP_ERROR = 1, 2, 3

_CAP_ERRORS = (RayCapExceeded, ElementCapExceeded, SearchCapExceeded, NTooLarge)
_MODEL_ERRORS = (
    InvalidProblem, InvalidAccessStructure, InvalidDigraph, InfeasibleSystem,
    InfeasibleParent, InconsistentEqualities, NotFullDimensional,
    ZeroNormalInfeasible,
)


def _fmt_q(x) -> str:
    q = rat(x)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read {path}: {exc}")


def _load_problem(path: str) -> netinfo.NetworkProblem:
    return netinfo.NetworkProblem.from_json(_read(path))


def _load_group(path: str, degree: int) -> FiniteGroup:
    """Group file: optional 'degree: n' line, then one generator per line."""
    gens = []
    deg = degree
    for raw in _read(path).splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("degree"):
            deg = int(line.split(":", 1)[1])
            continue
        gens.append(line)
    return group_closure([Permutation.parse(g, deg) for g in gens], degree=deg)


def _emit_json(payload: dict):
    payload = {"schema": 1, **payload}
    print(json.dumps(payload, indent=2, sort_keys=True))


def _region_payload(region: netinfo.RateRegion) -> dict:
    payload = {
        "coordinates": list(region.coordinates),
        "inequalities": [
            {"normal": [_fmt_q(c) for c in r.normal], "offset": _fmt_q(r.offset),
             "text": netinfo.render_inequality(r, region.coordinates)}
            for r in region.inequalities
        ],
        "rays": [[_fmt_q(c) for c in ray] for ray in region.rays],
    }
    if region.group is not None:
        payload["group"] = {
            "order": region.group.order,
            "generators": region.group.generator_notation(),
        }
        payload["facet_orbits"] = len(region.facet_orbit_reps)
        payload["vertex_orbits"] = len(region.vertex_orbit_reps)
    if region.stats is not None:
        payload["lp_counts"] = {
            "vertex": region.stats.vertex_lps,
            "facet": region.stats.facet_lps,
            "total": region.stats.total_lps,
        }
    if region.certificates is not None:
        payload["certificates"] = _certificates_payload(region)
    return payload


def _certificates_payload(region: netinfo.RateRegion) -> list:
    out = []
    parent = region.parent
    for row, cert in region.certificates.items():
        out.append({
            "inequality": netinfo.render_inequality(row, region.coordinates),
            "inequality_multipliers": {
                str(i): _fmt_q(m) for i, m in sorted(cert["inequalities"].items())
            },
            "equality_multipliers": {
                str(t): _fmt_q(m) for t, m in sorted(cert["equalities"].items())
            },
        })
    return out


def _print_certificates(region: netinfo.RateRegion):
    parent = region.parent
    names = parent.coordinate_names
    for row in region.inequalities:
        cert = region.certificates[row]
        print(f"{netinfo.render_inequality(row, region.coordinates)}")
        for i, m in sorted(cert["inequalities"].items()):
            print(f"    {_fmt_q(m)} * [{_named_row(parent.inequalities[i], names)}]")
        for t, m in sorted(cert["equalities"].items()):
            print(f"    {_fmt_q(m)} * [{_named_row(parent.equalities[t], names, eq=True)}]")


def _named_row(row, names, eq=False) -> str:
    terms = []
    for c, name in zip(row.normal, names):
        if c == 0:
            continue
        c = rat(c)
        sign = "+" if c > 0 else "-"
        mag = abs(c)
        coef = "" if mag == 1 else f"{_fmt_q(mag)} "
        terms.append(f"{sign}{coef}{name}")
    rel = "=" if eq else ">="
    return f"{' '.join(terms)} {rel} {_fmt_q(row.offset)}"


# --- subcommand handlers -----------------------------------------------------


def _cmd_rate_region(args) -> int:
    problem = _load_problem(args.problem)
    extra = ()
    if args.extra_inequalities:
        extra = netinfo.parse_entropy_inequalities(
            _read(args.extra_inequalities), problem.n)
    group = None
    if args.group:
        k = problem.num_sources + len(problem.edges)
        group = _load_group(args.group, k)
    region = netinfo.rate_region(
        problem,
        use_symmetry=args.symmetry,
        extra_entropy_inequalities=extra,
        group_override=group,
        certify=args.certify,
        threads=args.threads,
    )
    if args.format == "json":
        _emit_json({"command": "rate-region", **_region_payload(region)})
        return 0
    rows = netinfo.region_lines(region, expand=not args.orbits_only)
    for line in rows:
        print(line)
    if region.group is not None:
        logger.info("facet orbits: %d, vertex orbits: %d",
                    len(region.facet_orbit_reps), len(region.vertex_orbit_reps))
    if args.certify:
        print()
        _print_certificates(region)
    return 0


def _cmd_nsg(args) -> int:
    problem = _load_problem(args.problem)
    group = netinfo.network_symmetry_group(problem)
    if args.format == "json":
        _emit_json({
            "command": "nsg",
            "order": group.order,
            "generators": group.generator_notation(),
        })
        return 0
    if group.order == 1:
        print("trivial group (order 1)")
    else:
        print(f"Group([ {group.generator_notation()} ])")
        print(f"order {group.order}")
    return 0


def _parse_rationals(text: str | None, count: int, default=1):
    if text is None:
        return [default] * count
    vals = [rat(tok) for tok in text.replace(",", " ").split()]
    if len(vals) != count:
        raise ValueError(f"expected {count} values, got {len(vals)}")
    return vals


def _cmd_sum_rate(args) -> int:
    problem = _load_problem(args.problem)
    weights = _parse_rationals(args.weights, problem.num_sources)
    capacities = _parse_rationals(args.capacities, len(problem.edges))
    result = netinfo.sum_rate_upper_bound(problem, weights, capacities)
    return _emit_scalar(args, "sum-rate", result)


def _cmd_secret_sharing(args) -> int:
    data = json.loads(_read(args.structure))
    result = netinfo.secret_sharing_info_ratio_lb(
        data["authorized"], data["n"])
    return _emit_scalar(args, "secret-sharing", result)


def _cmd_guessing(args) -> int:
    data = json.loads(_read(args.digraph))
    result = netinfo.guessing_number_ub(data["vertices"], data["in"])
    return _emit_scalar(args, "guessing", result)


def _emit_scalar(args, command, result) -> int:
    if args.format == "json":
        _emit_json({
            "command": command,
            "value": _fmt_q(result.value),
            "lp_dimension": result.lp_dim,
            "lp_dimension_reduced": result.lp_dim_reduced,
            "group_order": result.group_order,
        })
        return 0
    print(_fmt_q(result.value))
    print(f"LP dimension {result.lp_dim} -> {result.lp_dim_reduced}")
    return 0


def _cmd_project(args) -> int:
    h = parse_h(_read(args.hfile))
    k = args.k
    stripped = False
    if h.is_cone() and not args.no_bound_transform:
        h = boundedness_transform(h, k)
        stripped = True
    group = _load_group(args.group, k) if args.group else None
    if group is not None and group.order > 1:
        sym = symchm.sym_chm_project(h, k, group)
        res = sym.result
    else:
        sym = None
        res = chm.chm_project(h, k, threads=args.threads)
    out_h = strip_bounding(res.h, k) if stripped else res.h
    if args.format == "json":
        payload = {
            "command": "project",
            "h": format_h(out_h).splitlines(),
            "vertices": [[_fmt_q(c) for c in v] for v in res.vertices],
            "lp_counts": {"vertex": res.stats.vertex_lps,
                          "facet": res.stats.facet_lps,
                          "total": res.stats.total_lps},
        }
        if sym is not None:
            payload["facet_orbits"] = len(sym.facet_orbit_reps)
            payload["vertex_orbits"] = len(sym.vertex_orbit_reps)
        _emit_json(payload)
        return 0
    print("H-representation")
    print(format_h(out_h), end="")
    print("V-representation")
    for v in res.vertices:
        print("vertex: " + " ".join(_fmt_q(c) for c in v))
    if sym is not None:
        print(f"# facet orbits: {len(sym.facet_orbit_reps)}, "
              f"vertex orbits: {len(sym.vertex_orbit_reps)}")
    logger.info("LPs solved: %d", res.stats.total_lps)
    return 0


def _cmd_convert(args) -> int:
    text = _read(args.file)
    body = text.lower()
    if "ray:" in body or "vertex:" in body or body.strip().startswith("v-"):
        pair = dd.convert_v_to_h(parse_v(text))
    else:
        pair = dd.convert_h_to_v(parse_h(text))
    if args.format == "json":
        _emit_json({
            "command": "convert",
            "h": format_h(pair.h).splitlines(),
            "v": format_v(pair.v).splitlines(),
        })
        return 0
    print("H-representation")
    print(format_h(pair.h), end="")
    print("V-representation")
    print(format_v(pair.v), end="")
    return 0


def _cmd_faces(args) -> int:
    pair = dd.convert_h_to_v(parse_h(_read(args.hfile)))
    profile = enumerate_faces(pair, ray_cap=args.ray_cap)
    if args.format == "json":
        _emit_json({
            "command": "faces",
            "counts": {str(d): c for d, c in sorted(profile.counts.items())},
            "total": profile.total,
        })
        return 0
    print("dim  faces")
    for d, c in sorted(profile.counts.items()):
        print(f"{d:3d}  {c}")
    print(f"total {profile.total}")
    return 0


def _cmd_certify(args) -> int:
    args.certify = True
    args.orbits_only = False
    args.extra_inequalities = getattr(args, "extra_inequalities", None)
    args.group = getattr(args, "group", None)
    return _cmd_rate_region(args)


def _cmd_lp(args) -> int:
    system = parse_h(_read(args.hfile))
    objective = [rat(tok) for tok in _read(args.objective).split()]
    outcome = lp.solve(lp.LinearProgram(tuple(objective), system))
    if args.format == "json":
        payload = {"command": "lp", "status": outcome.status}
        if outcome.status == lp.OPTIMAL:
            payload["value"] = _fmt_q(outcome.value)
            payload["vertex"] = [_fmt_q(c) for c in outcome.primal_vertex]
            payload["duals"] = {str(i): _fmt_q(m)
                                for i, m in sorted(outcome.dual_inequalities.items())}
        elif outcome.status == lp.UNBOUNDED:
            payload["ray"] = [_fmt_q(c) for c in outcome.ray]
        _emit_json(payload)
        return 0
    print(outcome.status)
    if outcome.status == lp.OPTIMAL:
        print("value:", _fmt_q(outcome.value))
        print("vertex:", " ".join(_fmt_q(c) for c in outcome.primal_vertex))
    elif outcome.status == lp.UNBOUNDED:
        print("ray:", " ".join(_fmt_q(c) for c in outcome.ray))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conevolve",
        description="Exact polyhedral outer bounds on network coding rate regions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, threads=True):
        p.add_argument("--format", choices=["text", "json"], default="text")
        if threads:
            p.add_argument("--threads", type=int, default=1,
                           help="concurrent facet checks (default 1)")

    p = sub.add_parser("rate-region", help="explicit polyhedral outer bound")
    p.add_argument("problem", help="network problem JSON file")
    p.add_argument("--symmetry", dest="symmetry", action="store_true",
                   default=True, help="exploit the network symmetry group")
    p.add_argument("--no-symmetry", dest="symmetry", action="store_false")
    p.add_argument("--group", help="override symmetry group file")
    p.add_argument("--extra-inequalities",
                   help="extra entropy inequalities file")
    p.add_argument("--certify", action="store_true",
                   help="attach Farkas certificates")
    p.add_argument("--orbits-only", action="store_true",
                   help="print one inequality per orbit")
    common(p)
    p.set_defaults(func=_cmd_rate_region)

    p = sub.add_parser("nsg", help="network symmetry group")
    p.add_argument("problem")
    common(p, threads=False)
    p.set_defaults(func=_cmd_nsg)

    p = sub.add_parser("sum-rate", help="weighted sum-rate upper bound")
    p.add_argument("problem")
    p.add_argument("--weights", help="per-source weights, e.g. '1,1'")
    p.add_argument("--capacities", help="per-edge capacities, e.g. '1,1,1'")
    common(p, threads=False)
    p.set_defaults(func=_cmd_sum_rate)

    p = sub.add_parser("secret-sharing",
                       help="information ratio lower bound")
    p.add_argument("structure", help='JSON {"authorized": [[...]], "n": 5}')
    common(p, threads=False)
    p.set_defaults(func=_cmd_secret_sharing)

    p = sub.add_parser("guessing", help="guessing number upper bound")
    p.add_argument("digraph", help='JSON {"vertices": [...], "in": {...}}')
    common(p, threads=False)
    p.set_defaults(func=_cmd_guessing)

    p = sub.add_parser("project", help="project an H-file onto k coordinates")
    p.add_argument("hfile")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--group", help="symmetry group file for symCHM")
    p.add_argument("--no-bound-transform", action="store_true",
                   help="treat a cone input as already bounded")
    common(p)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("convert", help="convert between H and V descriptions")
    p.add_argument("file")
    common(p, threads=False)
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("faces", help="face counts of a cone")
    p.add_argument("hfile")
    p.add_argument("--ray-cap", type=int, default=64)
    common(p, threads=False)
    p.set_defaults(func=_cmd_faces)

    p = sub.add_parser("certify", help="rate region with Farkas certificates")
    p.add_argument("problem")
    p.add_argument("--symmetry", dest="symmetry", action="store_true", default=True)
    p.add_argument("--no-symmetry", dest="symmetry", action="store_false")
    common(p)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("lp", help="debug: solve an LP from an H-file")
    p.add_argument("hfile")
    p.add_argument("objective", help="file with space-separated coefficients")
    common(p, threads=False)
    p.set_defaults(func=_cmd_lp)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("CONEVOLVE_LOG", "WARNING").upper()
    logging.basicConfig(stream=sys.stderr,
                        level=getattr(logging, level, logging.WARNING),
                        format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CAP_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _CAP_ERROR
    except _MODEL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _MODEL_ERROR
    except (FileNotFoundError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _PARSE_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
