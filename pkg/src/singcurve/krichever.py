"""Mittag-Leffler distributions, their classes in H^1(O), and linear flows."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .globalcurve import (
    CurveError,
    LocalCondition,
    RationalSingularCurve,
    _as_branch,
    condition_holds,
    condition_rows,
    h0_forms,
    make_divisor,
    omega_divisor,
    residue_pairing_global,
)
from .jetalg import INF, DEFAULT_TOL, RationalFunction, expand_at, solve
from .jetalg.scalars import I, QI, is_exact, magnitude
from .localring import ring_from_divisor, rings_equal

PERIOD_TOL = 1e-9


class UnsupportedConstruct(Exception):
    pass


class InternalInconsistency(AssertionError):
    pass


@dataclass(frozen=True)
class PrincipalPart:
    """Coefficients of ``z^-1, z^-2, ...``."""

    coeffs: tuple = ()

    def __post_init__(self):
        c = [Fraction(x) if isinstance(x, int) else x for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def as_function(self) -> RationalFunction:
        """``sum c_k z^-k`` as a rational function of ``z``."""
        f = RationalFunction.const(Fraction(0))
        for k, c in enumerate(self.coeffs, 1):
            f = f + RationalFunction.pole(Fraction(0), k) * c
        return f

    def pullback(self, point) -> RationalFunction:
        """The same part written in the global coordinate ``w`` of the component."""
        f = RationalFunction.const(Fraction(0))
        for k, c in enumerate(self.coeffs, 1):
            f = f + RationalFunction.pole(point, k) * c
        return f

    def scale(self, s) -> "PrincipalPart":
        return PrincipalPart(tuple(s * c for c in self.coeffs))

    def __add__(self, other: "PrincipalPart") -> "PrincipalPart":
        n = max(self.order, other.order)
        a = self.coeffs + (0,) * (n - self.order)
        b = other.coeffs + (0,) * (n - other.order)
        return PrincipalPart(tuple(x + y for x, y in zip(a, b)))

    @property
    def exact(self) -> bool:
        return all(is_exact(c) for c in self.coeffs)


def birkhoff_split(h: RationalFunction):
    """``h = h_plus + h_minus`` with ``h_minus`` the pole part at 0 vanishing at infinity."""
    h = RationalFunction._lift(h)
    if h.is_zero():
        return h, PrincipalPart()
    j = expand_at(h, Fraction(0), 0)
    coeffs = [j.coeff(-k) for k in range(1, -j.low + 1)] if j.low < 0 else []
    minus = PrincipalPart(tuple(coeffs))
    return h - minus.as_function(), minus


@dataclass(frozen=True)
class MLDistribution:
    curve: RationalSingularCurve
    marked: tuple  # branches (component, value)
    parts: tuple  # PrincipalPart per marked point

    def __post_init__(self):
        if len(self.marked) != len(self.parts):
            raise ValueError("one principal part per marked point")
        if len(set(self.marked)) != len(self.marked):
            raise CurveError("marked points must be distinct")
        sing = self.curve.singular_branches
        for br in self.marked:
            if br in sing:
                raise CurveError(f"marked point {br} is not smooth")
            if br[0] not in self.curve.components:
                raise CurveError(f"unknown component {br[0]!r}")

    @property
    def exact(self) -> bool:
        return all(p.exact for p in self.parts) and all(v is INF or is_exact(v) for _, v in self.marked)

    @property
    def tol(self):
        return None if self.exact else DEFAULT_TOL

    def pulled_back(self) -> dict:
        """Sum of pulled-back parts per component."""
        out = {c: RationalFunction.const(Fraction(0)) for c in self.curve.components}
        for (comp, p), part in zip(self.marked, self.parts):
            out[comp] = out[comp] + part.pullback(p)
        return out

    def scale(self, s) -> "MLDistribution":
        return MLDistribution(self.curve, self.marked, tuple(p.scale(s) for p in self.parts))

    def __add__(self, other: "MLDistribution") -> "MLDistribution":
        if self.marked != other.marked:
            raise ValueError("distributions on different marked points")
        return MLDistribution(self.curve, self.marked, tuple(a + b for a, b in zip(self.parts, other.parts)))


def distribution(curve, marked, parts) -> MLDistribution:
    brs = tuple(_as_branch(curve, m) for m in marked)
    pp = tuple(p if isinstance(p, PrincipalPart) else PrincipalPart(tuple(p)) for p in parts)
    return MLDistribution(curve, brs, pp)


def regular_forms(curve: RationalSingularCurve):
    return h0_forms(curve, omega_divisor(curve, make_divisor(curve)))


def ml_pair_all(dist: MLDistribution, forms=None) -> list:
    forms = regular_forms(dist.curve) if forms is None else forms
    out = []
    for om in forms.functions:
        parts = [(br, p.as_function()) for br, p in zip(dist.marked, dist.parts) if not p.is_zero]
        out.append(residue_pairing_global(dist.curve, parts, om) if parts else Fraction(0))
    return out


def _ring_conditions(curve):
    return [LocalCondition(curve.branches(s), s.ring.space) for s in curve.singularities]


def ml_solve(dist: MLDistribution, check: bool = True):
    """A global function with the prescribed principal parts, or None.

    Any solution differs from the pulled-back parts by a function without
    poles, i.e. by one constant per component.
    """
    curve = dist.curve
    tol = dist.tol
    P = dist.pulled_back()
    comps = list(curve.components)
    one = RationalFunction.const(Fraction(1))
    cands = [P[c] for c in comps] + [one] * len(comps)
    owner = comps + comps
    rows, rhs = [], []
    n = len(comps)
    for cond in _ring_conditions(curve):
        for r in condition_rows(cond, cands, owner):
            rhs.append(-sum(r[:n], Fraction(0)))
            rows.append(r[n:])
    if rows:
        x = solve(rows, rhs, n, tol)
    else:
        x = tuple(Fraction(0) for _ in comps)
    f = None
    if x is not None:
        f = {c: P[c] + x[i] for i, c in enumerate(comps)}
    if check:
        zero = all(magnitude(v) <= (0 if tol is None else 1e-9) for v in ml_pair_all(dist))
        if zero != (f is not None):
            raise InternalInconsistency("solvability and vanishing pairings disagree")
        if f is not None and not verify_solution(dist, f):
            raise InternalInconsistency("solution fails re-expansion")
    return f


def verify_solution(dist: MLDistribution, f: dict) -> bool:
    for br, part in zip(dist.marked, dist.parts):
        rest = f[br[0]] - part.pullback(br[1])
        j = expand_at(rest, br[1], 1)
        if not j.is_zero and j.low < 0:
            if dist.tol is None or any(magnitude(j.coeff(k)) > 1e-9 for k in range(j.low, 0)):
                return False
    return all(condition_holds(c, f, dist.tol) for c in _ring_conditions(dist.curve))


# flows --------------------------------------------------------------------

@dataclass(frozen=True)
class FlowVerdict:
    kind: str  # trivial | periodic | aperiodic-on-budget | unsupported
    period: object = None
    gaps: tuple = ()
    detail: str = ""

    def trivial_at(self, t) -> bool:
        """Whether the twist at time ``t`` is the trivial bundle."""
        if self.kind == "trivial":
            return True
        if self.kind == "unsupported":
            raise UnsupportedConstruct(self.detail)
        return all(_in_lattice(t * g, 1) for g in self.gaps)


def _is_ordinary(ring) -> bool:
    return rings_equal(ring, ring_from_divisor([1] * ring.branches))


def cycle_gaps(dist: MLDistribution) -> list:
    """Branch differences of the single-valued primitive around the gluing cycles.

    Component constants are fixed along a spanning forest of the gluing graph,
    so the returned values are those of the remaining independent cycles.
    """
    curve = dist.curve
    for s in curve.singularities:
        if not _is_ordinary(s.ring):
            raise UnsupportedConstruct(f"periodicity needs ordinary multiple points; {s.name!r} is not")
    k = dist.pulled_back()
    edges = []
    for s in curve.singularities:
        brs = curve.branches(s)
        for other in brs[1:]:
            edges.append((brs[0], other))

    def val(br):
        return k[br[0]](br[1]) if br[1] is not INF else _value_at_inf(k[br[0]])

    const = {}
    adj = {c: [] for c in curve.components}
    for a, b in edges:
        adj[a[0]].append((a, b))
        adj[b[0]].append((a, b))
    tree = set()
    for root in curve.components:
        if root in const:
            continue
        const[root] = Fraction(0)
        stack = [root]
        while stack:
            c = stack.pop()
            for e in adj[c]:
                a, b = e
                nxt = b[0] if a[0] == c else a[0]
                if nxt in const:
                    continue
                # make gap along e vanish
                if a[0] == c:
                    const[nxt] = val(a) + const[c] - val(b)
                else:
                    const[nxt] = val(b) + const[c] - val(a)
                tree.add(e)
                stack.append(nxt)
    gaps = []
    for e in edges:
        if e in tree:
            continue
        a, b = e
        gaps.append(val(a) + const[a[0]] - val(b) - const[b[0]])
    return gaps


def _value_at_inf(f: RationalFunction):
    j = expand_at(f, INF, 1)
    if not j.is_zero and j.low < 0:
        raise CurveError("primitive has a pole at a glued point")
    return j.coeff(0)


def _as_real_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, QI):
        return x.re if x.im == 0 else None
    return None


def _in_lattice(x, T) -> bool:
    if is_exact(x) and is_exact(T):
        q = _as_real_fraction(x / T if not isinstance(T, int) else x * Fraction(1, T))
        return q is not None and q.denominator == 1
    r = complex(x) / complex(T)
    return abs(r.imag) <= PERIOD_TOL and abs(r.real - round(r.real)) <= PERIOD_TOL


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(math.gcd(a.numerator * b.denominator, b.numerator * a.denominator), a.denominator * b.denominator)


def flow_classify(dist: MLDistribution, T=None) -> FlowVerdict:
    """Trivial if solvable; otherwise periodic when every cycle gap lies in ``T Z``.

    Without ``T`` the period is inferred from exact real gaps.
    """
    if ml_solve(dist) is not None:
        return FlowVerdict("trivial", T, ())
    try:
        gaps = cycle_gaps(dist)
    except UnsupportedConstruct as e:
        return FlowVerdict("unsupported", T, (), str(e))
    if all(magnitude(g) <= (0 if dist.tol is None else PERIOD_TOL) for g in gaps):
        raise InternalInconsistency("zero gaps but the distribution is unsolvable")
    if T is not None:
        if all(_in_lattice(g, T) for g in gaps):
            return FlowVerdict("periodic", T, tuple(gaps))
        return FlowVerdict("aperiodic-on-budget", T, tuple(gaps), "a gap is not in T*Z")
    reals = [_as_real_fraction(g) if is_exact(g) else None for g in gaps]
    if all(r is not None for r in reals):
        per = Fraction(0)
        for r in reals:
            per = _frac_gcd(per, abs(r)) if per else abs(r)
        return FlowVerdict("periodic", per, tuple(gaps))
    return FlowVerdict("aperiodic-on-budget", None, tuple(gaps), "no exact real period")


@dataclass(frozen=True)
class CaseReport:
    case: object  # 1, 2, 3 or None
    first: FlowVerdict
    second: FlowVerdict


def case_classify(h1: MLDistribution, h2: MLDistribution, T1=None, T2=None) -> CaseReport:
    a = flow_classify(h1, T1)
    b = flow_classify(h2, T2)
    ka, kb = a.kind, b.kind
    periodic = {"trivial", "periodic"}
    if ka == "trivial" and kb == "trivial":
        case = 1
    elif ka == "trivial" and kb == "periodic":
        case = 2
    elif ka in periodic and kb in periodic:
        case = 3
    else:
        case = None
    return CaseReport(case, a, b)


# presets ------------------------------------------------------------------

TWO_PI_I = 2j * cmath.pi


def kdv_preset(curve, point):
    return (distribution(curve, [point], [(0, 1)]), distribution(curve, [point], [(1,)]))


def nls_preset(curve, p1, p2):
    return (
        distribution(curve, [p1, p2], [(1,), (1,)]),
        distribution(curve, [p1, p2], [(I,), (-I,)]),
    )


def kp_preset(curve, point):
    return (distribution(curve, [point], [(1,)]), distribution(curve, [point], [(0, TWO_PI_I)]))


PRESETS = {"kdv": kdv_preset, "nls": nls_preset, "kp": kp_preset}
