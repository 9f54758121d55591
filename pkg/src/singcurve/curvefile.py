"""Curve description files: schema, parsing with source positions, and emission."""
from __future__ import annotations

import ast
import json
from fractions import Fraction
from json.decoder import scanstring

import jsonschema

from .gendiv import DivisorStalk, module_closure
from .globalcurve import GeneralisedDivisor, Point, RationalSingularCurve, Singularity, build_curve, make_divisor
from .jetalg import INF, Poly, RationalFunction, format_scalar, parse_point, parse_rational, parse_scalar
from .localring import AmbientStalk, DEFAULT_ORDER, LocalRingStalk, ring_from_divisor, subalgebra_closure

SCHEMA_TAG = "singcurve/1"

_SCALAR = {"type": ["string", "number"]}
_POINT_REF = {
    "oneOf": [
        {"type": "string"},
        {
            "type": "object",
            "required": ["component", "value"],
            "properties": {"component": {"type": "string"}, "value": _SCALAR},
            "additionalProperties": False,
        },
    ]
}

CURVE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["components"],
    "properties": {
        "schema": {"const": SCHEMA_TAG},
        "components": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name"],
                "properties": {"name": {"type": "string"}},
                "additionalProperties": False,
            },
        },
        "points": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "component", "value"],
                "properties": {"name": {"type": "string"}, "component": {"type": "string"}, "value": _SCALAR},
                "additionalProperties": False,
            },
        },
        "singularities": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "preimages", "ring"],
                "properties": {
                    "name": {"type": "string"},
                    "preimages": {"type": "array", "minItems": 1, "items": {"type": "string"}},
                    "ring": {
                        "oneOf": [
                            {
                                "type": "object",
                                "required": ["multiplicities"],
                                "properties": {
                                    "multiplicities": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
                                    "order": {"type": "integer", "minimum": 2},
                                },
                                "additionalProperties": False,
                            },
                            {
                                "type": "object",
                                "required": ["generators"],
                                "properties": {
                                    "generators": {"type": "array", "items": {"type": "string"}},
                                    "order": {"type": "integer", "minimum": 2},
                                },
                                "additionalProperties": False,
                            },
                        ]
                    },
                },
                "additionalProperties": False,
            },
        },
        "divisors": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "properties": {
                    "regular_part": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["point", "mult"],
                            "properties": {"point": _POINT_REF, "mult": {"type": "integer"}},
                            "additionalProperties": False,
                        },
                    },
                    "stalks": {
                        "type": "object",
                        "additionalProperties": {
                            "type": "object",
                            "required": ["generators"],
                            "properties": {"generators": {"type": "array", "minItems": 1, "items": {"type": "string"}}},
                            "additionalProperties": False,
                        },
                    },
                },
                "additionalProperties": False,
            },
        },
        "krichever": {"type": "object"},
        "baker": {"type": "object"},
    },
    "additionalProperties": False,
}


class SchemaError(ValueError):
    def __init__(self, message, line=None, column=None, path=()):
        self.line, self.column, self.path = line, column, tuple(path)
        where = f" at line {line}, column {column}" if line is not None else ""
        loc = "/".join(str(p) for p in path)
        super().__init__(f"{message}{where}" + (f" ({loc})" if loc else ""))


# source positions --------------------------------------------------------------

_WS = " \t\n\r"


def _skip(s: str, i: int) -> int:
    while i < len(s) and s[i] in _WS:
        i += 1
    return i


def value_positions(text: str) -> dict:
    """Offsets of every JSON value keyed by its path (a tuple of keys/indices)."""
    dec = json.JSONDecoder()
    out = {}

    def walk(i, path):
        i = _skip(text, i)
        out[path] = i
        c = text[i]
        if c == "{":
            i = _skip(text, i + 1)
            if text[i] == "}":
                return i + 1
            while True:
                i = _skip(text, i)
                key, i = scanstring(text, i + 1)
                i = _skip(text, i)
                i = walk(i + 1, path + (key,))
                i = _skip(text, i)
                if text[i] == "}":
                    return i + 1
                i += 1
        if c == "[":
            i = _skip(text, i + 1)
            if text[i] == "]":
                return i + 1
            k = 0
            while True:
                i = walk(i, path + (k,))
                k += 1
                i = _skip(text, i)
                if text[i] == "]":
                    return i + 1
                i += 1
        _, end = dec.raw_decode(text, i)
        return end

    walk(0, ())
    return out


def _line_col(text: str, offset: int):
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def load_json(text: str, schema=CURVE_SCHEMA) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(e.msg, e.lineno, e.colno) from e
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(data), key=lambda e: [str(x) for x in e.absolute_path])
    if errors:
        err = errors[0]
        path = tuple(err.absolute_path)
        pos = value_positions(text)
        p = path
        while p not in pos and p:
            p = p[:-1]
        line, col = _line_col(text, pos.get(p, 0))
        raise SchemaError(err.message, line, col, path)
    return data


# germs ----------------------------------------------------------------------------

def parse_germ(text: str, var: str = "t"):
    """``"(1/t, 1)"`` -> tuple of rational functions; a bare expression gives a 1-tuple."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as e:
        raise SchemaError(f"malformed germ {text!r}") from e
    parts = tree.body.elts if isinstance(tree.body, ast.Tuple) else [tree.body]
    try:
        return tuple(parse_rational(ast.unparse(p), var=var) for p in parts)
    except (ValueError, ZeroDivisionError) as e:
        raise SchemaError(f"malformed germ {text!r}: {e}") from e


def _compound(cs: str) -> bool:
    return "+" in cs[1:] or "-" in cs[1:]


def format_poly(p: Poly, var: str) -> str:
    terms = []
    for k, c in enumerate(p.coeffs):
        if c == 0:
            continue
        cs = format_scalar(c)
        if k == 0:
            terms.append(f"({cs})" if _compound(cs) else cs)
            continue
        mon = var if k == 1 else f"{var}**{k}"
        if cs == "1":
            terms.append(mon)
        elif cs == "-1":
            terms.append(f"-{mon}")
        else:
            terms.append(f"({cs})*{mon}" if _compound(cs) else f"{cs}*{mon}")
    return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def format_rational(f: RationalFunction, var: str = "w") -> str:
    num = format_poly(f.num, var)
    if f.den.degree == 0:
        return num
    den = format_poly(f.den, var)
    num = f"({num})" if " " in num or "/" in num else num
    den = f"({den})" if any(c in den for c in " */") else den
    return f"{num}/{den}"


def format_germ(parts, var: str = "t") -> str:
    return "(" + ", ".join(format_rational(RationalFunction._lift(p), var) for p in parts) + ")"


def _lattice_germs(space, upto: int):
    out = []
    for j in space.basis_mod(upto):
        parts = []
        for b in j.branches:
            terms = {k: b.coeff(k) for k in range(b.low, b.order)} if not b.is_zero else {}
            f = RationalFunction.const(Fraction(0))
            for k, c in terms.items():
                if c != 0:
                    f = f + (RationalFunction.pole(Fraction(0), -k) if k < 0 else RationalFunction(Poly(tuple([Fraction(0)] * k + [Fraction(1)])))) * c
            parts.append(f)
        out.append(tuple(parts))
    return out


# rings, curves, divisors ---------------------------------------------------------

def ring_from_json(d: dict, truncation=None) -> LocalRingStalk:
    order = truncation or d.get("order")
    if "multiplicities" in d:
        return ring_from_divisor(d["multiplicities"], order)
    gens = [parse_germ(g) for g in d["generators"]]
    if not gens:
        raise SchemaError("a ring needs generators or multiplicities")
    b = len(gens[0])
    if any(len(g) != b for g in gens):
        raise SchemaError("ring generators have different branch counts")
    return subalgebra_closure(AmbientStalk(b, order or DEFAULT_ORDER), gens)


def ring_to_json(ring: LocalRingStalk) -> dict:
    m = ring.m
    mults = _multiplicities_of(ring)
    if mults is not None:
        return {"multiplicities": mults}
    gens = [g for g in _lattice_germs(ring.space, max(2 * m, 1)) if not all(_is_const(x) for x in g)]
    return {"generators": [format_germ(g) for g in gens]}


def _is_const(f: RationalFunction) -> bool:
    return f.den.degree == 0 and f.num.degree <= 0


def _multiplicities_of(ring: LocalRingStalk):
    """Multiplicities ``n_i`` if the ring is ``C + sum t_i^{n_i} C{t_i}``."""
    from .localring import rings_equal

    sp = ring.space
    if sp.order == 0:
        return [1] if ring.branches == 1 else None
    mults = []
    for i in range(ring.branches):
        n = sp.order
        for k in range(sp.order - 1, 0, -1):
            if sp.contains_vec(sp.unit(i, k)):
                n = k
            else:
                break
        mults.append(max(n, 1))
    cand = ring_from_divisor(mults)
    return mults if rings_equal(cand, ring) else None


def _point_value(v):
    try:
        return parse_point(v)
    except ValueError as e:
        raise SchemaError(str(e)) from e


def curve_from_dict(data: dict, truncation=None) -> RationalSingularCurve:
    comps = [c["name"] for c in data["components"]]
    pts = [Point(p["name"], p["component"], _point_value(p["value"])) for p in data.get("points", [])]
    sings = []
    for s in data.get("singularities", []):
        sings.append(Singularity(s["name"], tuple(s["preimages"]), ring_from_json(s["ring"], truncation)))
    return build_curve(comps, pts, sings)


def divisors_from_dict(curve: RationalSingularCurve, data: dict) -> dict:
    out = {}
    for name, d in data.get("divisors", {}).items():
        reg = []
        for item in d.get("regular_part", []):
            pt = item["point"]
            if isinstance(pt, dict):
                pt = (pt["component"], _point_value(pt["value"]))
            reg.append((pt, item["mult"]))
        stalks = {}
        for sname, sd in d.get("stalks", {}).items():
            stalks[sname] = [parse_germ(g) for g in sd["generators"]]
        out[name] = make_divisor(curve, reg, stalks)
    return out


def _value_str(v) -> str:
    return "inf" if v is INF else format_scalar(v)


def curve_to_dict(curve: RationalSingularCurve, divisors=None) -> dict:
    d = {
        "schema": SCHEMA_TAG,
        "components": [{"name": c} for c in curve.components],
        "points": [{"name": p.name, "component": p.component, "value": _value_str(p.value)} for p in curve.points],
        "singularities": [
            {"name": s.name, "preimages": list(s.preimages), "ring": ring_to_json(s.ring)} for s in curve.singularities
        ],
    }
    if divisors:
        d["divisors"] = {name: divisor_to_dict(div) for name, div in divisors.items()}
    return d


def divisor_to_dict(div: GeneralisedDivisor) -> dict:
    out = {
        "regular_part": [
            {"point": {"component": br[0], "value": _value_str(br[1])}, "mult": k} for br, k in div.regular
        ],
        "stalks": {},
    }
    for name, st in div.stalks:
        out["stalks"][name] = {"generators": [format_germ(g) for g in stalk_generators(st)]}
    return out


def stalk_generators(st: DivisorStalk):
    """Germs whose module closure reproduces the stalk."""
    sp = st.space
    gens = _lattice_germs(sp, sp.order + max(st.ring.m, 1))
    check = module_closure(st.ring, gens)
    if check.key() != sp.key():  # pragma: no cover - defensive
        raise ValueError("stalk emission does not round-trip")
    return gens


def dumps(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def load_curve_file(path, truncation=None):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    data = load_json(text)
    curve = curve_from_dict(data, truncation)
    return curve, divisors_from_dict(curve, data), data


def parse_scalars(values):
    return [parse_scalar(v) for v in values]
