"""Command-line entry point.

Exit codes: 0 success, 2 malformed input, 3 certification failure,
4 unsupported construct.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import baker, fixtures, krichever
from .curvefile import (
    SCHEMA_TAG,
    SchemaError,
    curve_to_dict,
    dumps,
    format_rational,
    load_curve_file,
)
from .gendiv import branch_orders, degree_at, is_locally_free, preimage_value_rank
from .globalcurve import (
    CurveError,
    _as_branch,
    gorenstein_report,
    h0,
    h0_forms,
    make_divisor,
    omega_divisor,
    pairing_matrix,
    regular_forms_stalk,
    rr_serre_check,
)
from .jetalg import INF, QI, RationalFunction, format_scalar, parse_point, parse_rational, parse_scalar
from .localring import CertificationError, check_ring_axioms, delta_invariant
from .middleding import (
    MatrixCurveSpec,
    NormalFormError,
    eigen_curve,
    endomorphism_ring,
    fix_triple_spec,
    phi_check,
)

EXIT_OK, EXIT_SCHEMA, EXIT_CERT, EXIT_UNSUPPORTED = 0, 2, 3, 4


# rendering ------------------------------------------------------------------------

def jsonable(x):
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, int):
        return x
    if x is INF:
        return "inf"
    if isinstance(x, (Fraction, QI, float, complex, np.floating, np.complexfloating)):
        return format_scalar(complex(x) if isinstance(x, np.generic) else x)
    if isinstance(x, RationalFunction):
        return format_rational(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in x]
    return str(x)


def render_text(obj, indent: int = 0) -> list:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        width = max((len(k) for k in obj), default=0)
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.extend(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k.ljust(width)} : {_inline(v)}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}[{i}]")
                lines.extend(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(f"{pad}{_inline(obj)}")
    return lines


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _inline(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return "-" if v is None else str(v)


def emit(report: dict, args) -> None:
    report = {"schema": SCHEMA_TAG, "command": args.command, **jsonable(report)}
    text = dumps(report) if args.format == "json" else "\n".join(render_text(report)) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# commands ---------------------------------------------------------------------------

def _load(args):
    return load_curve_file(args.curve, args.truncation)


def cmd_analyze(args):
    curve, _, _ = _load(args)
    rows = []
    for s in curve.singularities:
        g = gorenstein_report(s.ring)
        ax = check_ring_axioms(s.ring)
        rows.append({
            "name": s.name,
            "branches": s.ring.branches,
            "delta": g["delta"],
            "conductor_n": g["n"],
            "gorenstein": g["gorenstein"],
            "omega_free": g["omega_free"],
            "bounds_ok": g["bounds_ok"],
            "chain_ok": bool(ax.get("chain")),
            "stability_exponent": s.ring.m,
        })
    forms = h0_forms(curve, omega_divisor(curve, make_divisor(curve)))
    return {
        "singularities": rows,
        "totals": {
            "components": len(curve.components),
            "connected": curve.connected,
            "delta": curve.delta,
            "arithmetic_genus": curve.arithmetic_genus,
            "h0_O": h0(curve, make_divisor(curve)).dim,
            "h0_omega": forms.dim,
        },
    }


def _divisor(divs, name):
    if name not in divs:
        raise SchemaError(f"unknown divisor {name!r}; known: {', '.join(sorted(divs)) or 'none'}")
    return divs[name]


def _middleding_summary(st):
    res = endomorphism_ring(st)
    return {
        "delta": res.delta,
        "ring_delta": delta_invariant(res.ring),
        "is_normalisation": res.ring.space.dim == 0 and res.ring.m == 0,
        "partition": [list(b) for b in res.partition],
        "split_certified": res.split_certified,
        "free": res.free,
        "blocks": [
            {
                "branches": list(b.branches),
                "delta": delta_invariant(b.ring),
                "free": b.verdict.free,
                "obstruction": b.verdict.obstruction,
                "value_rank": b.verdict.value_rank,
            }
            for b in res.blocks
        ],
    }


def _stalk_report(curve, name, st, seed):
    v = is_locally_free(st, seed=seed)
    return {
        "name": name,
        "degree": degree_at(st),
        "branch_orders": branch_orders(st),
        "in_support": st.in_support,
        "free": v.free,
        "generator": v.generator,
        "min_generators": v.min_generators,
        "value_rank": v.value_rank,
        "obstruction": v.obstruction,
        "middleding": _middleding_summary(st),
    }


def cmd_divisor(args):
    curve, divs, _ = _load(args)
    div = _divisor(divs, args.name)
    classical = [{"point": list(br), "mult": k} for br, k in div.regular]
    for s in curve.singularities:
        st = div.stalk(s.name)
        for br, v in zip(curve.branches(s), branch_orders(st)):
            classical.append({"point": list(br), "mult": -v})
    return {
        "divisor": args.name,
        "degree": div.degree,
        "classical_divisor": [c for c in classical if c["mult"] != 0],
        "stalks": [_stalk_report(curve, s.name, div.stalk(s.name), args.seed) for s in curve.singularities],
    }


def cmd_middleding(args):
    curve, divs, _ = _load(args)
    div = _divisor(divs, args.name)
    out = []
    for s in curve.singularities:
        st = div.stalk(s.name)
        summ = _middleding_summary(st)
        res = endomorphism_ring(st)
        summ["name"] = s.name
        summ["idempotent"] = endomorphism_ring(res.lifted).ring.key() == res.ring.key()
        summ["lifted_value_rank"] = preimage_value_rank(res.lifted) if res.lifted.space.lo >= 0 else None
        out.append(summ)
    return {"divisor": args.name, "singularities": out}


def _sweep(curve, spec: str):
    point, _, rng = spec.rpartition(":")
    lo, _, hi = rng.partition("..")
    try:
        lo, hi = int(lo), int(hi)
    except ValueError as e:
        raise SchemaError(f"malformed sweep {spec!r}; expected POINT:LO..HI") from e
    if "=" in point:
        comp, _, val = point.partition("=")
        br = (comp, parse_point(val))
    else:
        br = _as_branch(curve, point)
    return br, range(lo, hi + 1)


def cmd_rr(args):
    curve, divs, _ = _load(args)
    names = args.divisor or []
    bases = [(n, _divisor(divs, n)) for n in names]
    lines = []
    if args.sweep:
        br, rng = _sweep(curve, args.sweep)
        for n, base in bases or [("O", make_divisor(curve))]:
            for d in rng:
                lines.append(_rr_line(curve, f"{n}+{d}*{br[0]}={format_scalar(br[1]) if br[1] is not INF else 'inf'}", base.with_regular(br, d) if d else base))
    else:
        for n, base in bases:
            lines.append(_rr_line(curve, n, base))
    return {"arithmetic_genus": curve.arithmetic_genus, "checks": lines, "all_pass": all(x["status"] == "PASS" for x in lines)}


def _rr_line(curve, label, div):
    r = rr_serre_check(curve, div)
    return {
        "divisor": label,
        "degree": r["degree"],
        "h0": r["h0"],
        "h0_omega": r["h0_omega"],
        "omega_degree": r["omega_degree"],
        "status": "PASS" if r["ok"] else "FAIL",
    }


def cmd_serre(args):
    curve, _, _ = _load(args)
    forms = h0_forms(curve, omega_divisor(curve, make_divisor(curve)))
    stalks = []
    for s in curve.singularities:
        fs = regular_forms_stalk(s.ring)
        M, r = pairing_matrix(s.ring)
        stalks.append({
            "name": s.name,
            "delta": delta_invariant(s.ring),
            "form_quotient_dim": fs.quotient_dim,
            "matches_residue_dual": fs.agrees_with_dual,
            "pairing_matrix": M,
            "pairing_rank": r,
            "nondegenerate": len(M) == delta_invariant(s.ring) and r == len(M),
        })
    return {
        "h0_omega": forms.dim,
        "arithmetic_genus": curve.arithmetic_genus,
        "forms": [{c: f"({format_rational(g)}) d{c}" for c, g in f.items()} for f in forms.functions],
        "stalks": stalks,
    }


def _section(args, data, key):
    if getattr(args, "input", None):
        return json.loads(Path(args.input).read_text(encoding="utf-8"))
    if key in data:
        return data[key]
    return {}


def _scalar(v, numeric: bool):
    x = parse_scalar(v)
    return complex(x) if numeric else x


def _marked(curve, items):
    out = []
    for m in items:
        if isinstance(m, dict):
            out.append((m["component"], parse_point(m["value"])))
        else:
            out.append(_as_branch(curve, m))
    return out


def _verdict(v: krichever.FlowVerdict):
    return {"kind": v.kind, "period": v.period, "gaps": list(v.gaps), "detail": v.detail or None}


def cmd_krichever(args):
    curve, _, data = _load(args)
    spec = _section(args, data, "krichever")
    numeric = args.scalar == "numeric"
    marked = _marked(curve, spec.get("marked", []))
    preset = args.preset or spec.get("presets")
    period = parse_scalar(spec["period"]) if "period" in spec else None
    if preset:
        if preset not in krichever.PRESETS:
            raise SchemaError(f"unknown preset {preset!r}")
        h1, h2 = krichever.PRESETS[preset](curve, *marked)
        rep = krichever.case_classify(h1, h2, period, period)
        if period is not None:
            _require_supported(rep.first, rep.second)
        return {
            "preset": preset,
            "marked": marked,
            "h1": {"pairings": krichever.ml_pair_all(h1), "flow": _verdict(rep.first)},
            "h2": {"pairings": krichever.ml_pair_all(h2), "flow": _verdict(rep.second)},
            "case": rep.case,
        }
    parts = [[_scalar(c, numeric) for c in p] for p in spec.get("parts", [])]
    dist = krichever.distribution(curve, marked, parts)
    f = krichever.ml_solve(dist)
    flow = krichever.flow_classify(dist, period)
    if period is not None:
        _require_supported(flow)
    return {
        "marked": marked,
        "pairings": krichever.ml_pair_all(dist),
        "solvable": f is not None,
        "solution": None if f is None else [f[c] for c in curve.components],
        "flow": _verdict(flow),
    }


def _require_supported(*verdicts):
    """An explicit period request on an unsupported curve is an error, not a verdict."""
    for v in verdicts:
        if v.kind == "unsupported":
            raise krichever.UnsupportedConstruct(v.detail)


def _real(x) -> float:
    v = complex(parse_scalar(x))
    if v.imag != 0:
        raise SchemaError(f"time {x!r} must be real")
    return v.real


def cmd_baker(args):
    curve, divs, data = _load(args)
    spec = _section(args, data, "baker")
    div = spec.get("divisor", "O")
    div = _divisor(divs, div) if isinstance(div, str) else make_divisor(curve, [(_marked(curve, [d["point"]])[0], d["mult"]) for d in div])
    marked = _marked(curve, spec.get("marked", []))
    if spec.get("preset", "kp") == "kp" and "flows" not in spec:
        flows = [[(1,)], [(0, baker.TWO_PI_I)]]
    else:
        flows = [[[parse_scalar(c) for c in part] for part in fl] for fl in spec["flows"]]
    c = [[parse_scalar(x) for x in row] for row in spec["c"]] if "c" in spec else None
    prob = baker.ba_problem(curve, div, marked, flows, c)
    times = [tuple(_real(x) for x in t) for t in spec.get("times", [[0] * prob.L])]
    samples = [complex(parse_scalar(w)) for w in spec.get("samples", [])]
    rows = []
    for t in times:
        sol = baker.ba_solve(prob, t)
        if isinstance(sol, baker.InExceptionalSet):
            rows.append({"t": list(t), "exceptional": True, "smallest_singular_value": sol.smallest_singular_value})
            continue
        row = {
            "t": list(t),
            "exceptional": False,
            "condition": sol.condition,
            "psi": [list(baker.evaluate_ba(sol, w)) for w in samples],
        }
        if spec.get("heat_check"):
            hr = baker.heat_check(prob, t, samples)
            row["u"] = hr.u
            row["max_relative_residual"] = hr.max_relative_residual
        rows.append(row)
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "w", "j", "re", "im"])
            for r in rows:
                for w_, vals in zip(samples, r.get("psi", [])):
                    for j, v in enumerate(vals):
                        w.writerow([" ".join(format_scalar(x) for x in r["t"]), format_scalar(w_), j, f"{v.real:.15g}", f"{v.imag:.15g}"])
    return {"marked": marked, "divisor_degree": prob.divisor.degree, "runs": rows}


def _matrix_spec(path) -> MatrixCurveSpec:
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        A = tuple(tuple(parse_rational(x, var="lambda") for x in row) for row in d["matrix"])
        br = tuple(parse_rational(x, var="lambda") for x in d["branches"])
        form = tuple(parse_scalar(x) for x in d.get("linear_form", [1] * len(A)))
        sing = tuple(parse_scalar(x) for x in d.get("singular_lambdas", []))
    except (KeyError, TypeError) as e:
        raise SchemaError(f"malformed matrix file: {e}") from e
    return MatrixCurveSpec(A, br, form, sing)


def cmd_eigencurve(args):
    spec = _matrix_spec(args.matrix) if args.matrix else fix_triple_spec()
    ec = eigen_curve(spec)
    stalks = []
    for st in ec.stalks:
        res = endomorphism_ring(st.divisor)
        stalks.append({
            "lambda": st.lam,
            "mu": st.mu,
            "branches": list(st.branch_indices),
            "delta": delta_invariant(st.ring),
            "divisor_degree": degree_at(st.divisor),
            "value_rank": preimage_value_rank(st.divisor),
            "middleding": _middleding_summary(st.divisor),
            "middleding_generators": _ring_generators(res.ring),
        })
    return {
        "eigenvectors": [[format_rational(x, "lambda") for x in v] for v in ec.psi],
        "phi_check": phi_check(ec),
        "stalks": stalks,
    }


def _ring_generators(ring):
    from .curvefile import ring_to_json

    return ring_to_json(ring).get("generators", [])


def cmd_fixtures(args):
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, curve in fixtures.all_fixtures().items():
        d = curve_to_dict(curve, fixtures.fixture_divisors(name, curve))
        p = out / f"{name}.json"
        p.write_text(dumps(d), encoding="utf-8")
        written.append(str(p))
    return {"written": written}


COMMANDS = {
    "analyze": cmd_analyze,
    "divisor": cmd_divisor,
    "middleding": cmd_middleding,
    "rr": cmd_rr,
    "serre": cmd_serre,
    "krichever": cmd_krichever,
    "baker": cmd_baker,
    "eigencurve": cmd_eigencurve,
    "fixtures": cmd_fixtures,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scalar", choices=["exact", "numeric"], default="exact")
    common.add_argument("--truncation", type=int, default=None, help="ambient truncation order for rings")
    common.add_argument("--seed", type=lambda s: int(s, 0), default=0x5EED)
    common.add_argument("--out", default=None, help="write the report (or fixture files) here")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--text", dest="format", action="store_const", const="text")
    common.set_defaults(format="json")

    p = argparse.ArgumentParser(prog="singcurve", description="Singular curves with rational normalisation.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("analyze", "serre"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("curve")
    for name in ("divisor", "middleding"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("curve")
        s.add_argument("name")
    s = sub.add_parser("rr", parents=[common])
    s.add_argument("curve")
    s.add_argument("--divisor", action="append")
    s.add_argument("--sweep", help="POINT:LO..HI, POINT a point name or component=value")
    s = sub.add_parser("krichever", parents=[common])
    s.add_argument("curve")
    s.add_argument("--input", help="JSON with marked/parts/presets (defaults to the curve file's section)")
    s.add_argument("--preset", choices=sorted(krichever.PRESETS))
    s = sub.add_parser("baker", parents=[common])
    s.add_argument("curve")
    s.add_argument("--input")
    s.add_argument("--csv")
    s = sub.add_parser("eigencurve", parents=[common])
    s.add_argument("--matrix")
    sub.add_parser("fixtures", parents=[common])
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
        if args.command == "fixtures":
            sys.stdout.write(dumps({"schema": SCHEMA_TAG, "command": "fixtures", **report}))
        else:
            emit(report, args)
        return EXIT_OK
    except CertificationError as e:
        sys.stderr.write(f"certification failure: {e}\n")
        return EXIT_CERT
    except (krichever.UnsupportedConstruct, NormalFormError) as e:
        sys.stderr.write(f"unsupported: {e}\n")
        return EXIT_UNSUPPORTED
    except (SchemaError, CurveError, ValueError, KeyError, json.JSONDecodeError, OSError) as e:
        sys.stderr.write(f"input error: {e}\n")
        return EXIT_SCHEMA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
