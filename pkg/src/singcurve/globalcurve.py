"""Compact singular curves whose normalisation is a union of projective lines.

Global objects are tuples of rational functions, one per component.  Local
conditions are lattices at branch points; forms ``g dw`` are handled by the
same machinery with the chart factor ``dw/dt`` folded into a multiplier.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .gendiv import DivisorStalk, degree_at, is_locally_free, module_closure
from .jetalg import (
    INF,
    LaurentJet,
    Poly,
    RationalFunction,
    StalkSubspace,
    expand_at,
    full,
    lattice_equal,
    nullspace,
    quotient_dim,
    rank,
    residue_dual,
    rref,
)
from .jetalg.scalars import is_exact
from .jetalg.subspace import scale_branches
from .localring import (
    CertificationError,
    LocalRingStalk,
    conductor,
    delta_invariant,
)


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class Point:
    name: str
    component: str
    value: object  # scalar or INF

    @property
    def branch(self):
        return (self.component, self.value)


@dataclass(frozen=True)
class Singularity:
    name: str
    preimages: tuple  # point names
    ring: LocalRingStalk


@dataclass(frozen=True)
class RationalSingularCurve:
    components: tuple
    points: tuple  # of Point
    singularities: tuple = ()

    def point(self, name: str) -> Point:
        for p in self.points:
            if p.name == name:
                return p
        raise CurveError(f"unknown point {name!r}")

    def singularity(self, name: str) -> Singularity:
        for s in self.singularities:
            if s.name == name:
                return s
        raise CurveError(f"unknown singularity {name!r}")

    def branches(self, sing: Singularity):
        return tuple(self.point(n).branch for n in sing.preimages)

    @property
    def singular_branches(self) -> set:
        return {b for s in self.singularities for b in self.branches(s)}

    @property
    def delta(self) -> int:
        return sum(delta_invariant(s.ring) for s in self.singularities)

    @property
    def connected_components(self) -> int:
        parent = {c: c for c in self.components}

        def find(c):
            while parent[c] != c:
                c = parent[c]
            return c

        for s in self.singularities:
            comps = [self.point(n).component for n in s.preimages]
            for c in comps[1:]:
                parent[find(c)] = find(comps[0])
        return len({find(c) for c in self.components})

    @property
    def connected(self) -> bool:
        return self.connected_components == 1

    @property
    def chi(self) -> int:
        """Euler characteristic of the structure sheaf: components minus delta."""
        return len(self.components) - self.delta

    @property
    def arithmetic_genus(self) -> int:
        return self.connected_components - self.chi


def build_curve(components, points, singularities=()) -> RationalSingularCurve:
    comps = tuple(components)
    if len(set(comps)) != len(comps) or not comps:
        raise CurveError("component names must be distinct and non-empty")
    pts = []
    seen = set()
    for p in points:
        if not isinstance(p, Point):
            p = Point(*p)
        if p.component not in comps:
            raise CurveError(f"point {p.name!r} on unknown component {p.component!r}")
        if p.branch in seen or p.name in {q.name for q in pts}:
            raise CurveError(f"duplicate point {p.name!r}")
        seen.add(p.branch)
        pts.append(p)
    curve = RationalSingularCurve(comps, tuple(pts), tuple(singularities))
    used = set()
    for s in curve.singularities:
        if len(s.preimages) != s.ring.branches:
            raise CurveError(f"singularity {s.name!r}: {len(s.preimages)} preimages but ring has {s.ring.branches} branches")
        for n in s.preimages:
            curve.point(n)
            if n in used:
                raise CurveError(f"point {n!r} is a preimage of two singularities")
            used.add(n)
        if s.ring.space.stable is None:
            raise CertificationError(f"singularity {s.name!r} has an uncertified ring")
    return curve


# local conditions ------------------------------------------------------------

def inf_form_factor(order: int) -> LaurentJet:
    """``dw/dt`` for ``w = 1/t``."""
    return LaurentJet(-2, (Fraction(-1),), order)


@dataclass(frozen=True)
class LocalCondition:
    """Expansions on ``branches`` (times ``multipliers``) must lie in ``lattice``."""

    branches: tuple
    lattice: StalkSubspace
    multipliers: tuple = ()  # callables order -> LaurentJet, or None

    def multiplier(self, i):
        return self.multipliers[i] if self.multipliers else None


def _mult_valuation(mult, cap: int = 64):
    """Valuation of a multiplier, or None if it vanishes to order ``cap``."""
    if mult is None:
        return 0
    order = 4
    while order <= cap:
        j = mult(order)
        if not j.is_zero:
            return j.low
        order *= 2
    return None


def _branch_jet(f: RationalFunction, branch, mult, order: int) -> LaurentJet:
    """Jet of ``mult * f`` at the branch point, known up to ``order``."""
    _, p = branch
    vm = _mult_valuation(mult)
    if vm is None:
        return LaurentJet.zero(order)
    fj = expand_at(f, p, order - vm + 2)
    if mult is None:
        return fj.truncate(order)
    vf = fj.order if fj.is_zero else fj.low
    mj = mult(order - vf + 2)
    return (fj * mj).truncate(order)


def condition_rows(cond: LocalCondition, candidates, component_of) -> list:
    """Linear functionals on candidate coefficients encoding one condition.

    ``candidates`` are rational functions; ``component_of[j]`` tells on which
    component candidate ``j`` lives.
    """
    L = cond.lattice
    h = L.order
    jets = []
    lo = L.lo
    for f, comp in zip(candidates, component_of):
        row = []
        for i, br in enumerate(cond.branches):
            if br[0] != comp:
                row.append(None)
                continue
            j = _branch_jet(f, br, cond.multiplier(i), h)
            if not j.is_zero:
                lo = min(lo, j.low)
            row.append(j)
        jets.append(row)
    E = L.embed(lo, h) if lo < L.lo else L
    ann = E.annihilator() if E.dim < E.ncols else []
    w = h - lo
    out = []
    for q in ann:
        r = []
        for row in jets:
            s = 0
            for i, j in enumerate(row):
                if j is None or j.is_zero:
                    continue
                for k in range(max(lo, j.low), h):
                    c = j.coeff(k)
                    if c != 0:
                        s = s + q[i * w + (k - lo)] * c
            r.append(s)
        out.append(r)
    return out


def condition_holds(cond: LocalCondition, fs: dict, tol=None) -> bool:
    """Re-check a condition for a tuple of functions keyed by component."""
    L = cond.lattice
    from .jetalg import MultiJet

    jets = []
    for i, br in enumerate(cond.branches):
        jets.append(_branch_jet(fs[br[0]], br, cond.multiplier(i), L.order))
    lo = min([L.lo] + [j.low for j in jets if not j.is_zero])
    E = L.embed(lo, L.order) if lo < L.lo else L
    if tol is None:
        return E.contains(MultiJet(tuple(jets)))
    from .jetalg.linalg import in_span
    return in_span(E.rows, E.pivots, MultiJet(tuple(jets)).coords(E.lo, E.order), tol)


def pole_bounds(curve: RationalSingularCurve, conditions):
    """Largest pole order each condition allows at each branch point."""
    bounds = {}
    for cond in conditions:
        vals = cond.lattice.branch_valuations()
        for i, br in enumerate(cond.branches):
            vm = _mult_valuation(cond.multiplier(i))
            if vm is None:
                continue
            allowed = vals[i] - vm
            P = max(0, -allowed)
            bounds[br] = max(bounds.get(br, 0), P)
    return bounds


def candidate_basis(curve: RationalSingularCurve, bounds: dict, anchors: dict | None = None):
    """Partial-fraction candidates: ``1``, ``(w-p)^-j`` and ``w^j`` for poles at infinity.

    ``anchors`` optionally replaces ``(w-p)^-j`` by ``(w-p)^-j (w-a)^j``-style
    alternatives; it maps a component to a finite anchor ``a`` used as
    ``((w-a)/(w-p))^j`` so that a second, independent basis is available.
    """
    funcs, comps = [], []
    for c in curve.components:
        funcs.append(RationalFunction.const(Fraction(1)))
        comps.append(c)
        for (cc, p), P in sorted(bounds.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
            if cc != c:
                continue
            for j in range(1, P + 1):
                f = RationalFunction.pole(p, j)
                if anchors and c in anchors and p is not INF:
                    a = anchors[c]
                    f = RationalFunction(Poly((-a, Fraction(1))) ** j, Poly((-p, Fraction(1))) ** j)
                funcs.append(f)
                comps.append(c)
    return funcs, comps


@dataclass
class GlobalSectionBasis:
    components: tuple
    functions: list  # list of dict component -> RationalFunction
    conditions: tuple = field(default=(), repr=False)

    @property
    def dim(self) -> int:
        return len(self.functions)

    def as_tuples(self):
        return [tuple(f[c] for c in self.components) for f in self.functions]

    def verify(self, tol=None) -> bool:
        return all(condition_holds(cond, f, tol) for f in self.functions for cond in self.conditions)


def solve_sections(curve: RationalSingularCurve, conditions, anchors=None, tol=None) -> GlobalSectionBasis:
    conditions = tuple(conditions)
    bounds = pole_bounds(curve, conditions)
    cands, comps = candidate_basis(curve, bounds, anchors)
    rows = []
    for cond in conditions:
        rows.extend(condition_rows(cond, cands, comps))
    kernel = nullspace(rows, len(cands), tol) if rows else [
        tuple(Fraction(int(i == j)) for j in range(len(cands))) for i in range(len(cands))
    ]
    funcs = []
    for v in kernel:
        f = {c: RationalFunction.const(Fraction(0)) for c in curve.components}
        for coef, g, c in zip(v, cands, comps):
            if coef != 0:
                f[c] = f[c] + g * coef
        funcs.append(f)
    return GlobalSectionBasis(curve.components, funcs, conditions)


# divisors ----------------------------------------------------------------------

def _as_branch(curve, pt):
    if isinstance(pt, Point):
        return pt.branch
    if isinstance(pt, str):
        return curve.point(pt).branch
    comp, val = pt
    return (comp, val)


def _power_lattice(k: int) -> StalkSubspace:
    """``t^k`` times the ambient on one branch."""
    return full(1, k)


@dataclass(frozen=True)
class GeneralisedDivisor:
    curve: RationalSingularCurve
    regular: tuple = ()  # ((component, value), mult)
    stalks: tuple = ()  # (singularity name, DivisorStalk)

    def stalk(self, name: str) -> DivisorStalk:
        for n, s in self.stalks:
            if n == name:
                return s
        sing = self.curve.singularity(name)
        return DivisorStalk(sing.ring, sing.ring.space)

    @property
    def degree(self) -> int:
        return sum(k for _, k in self.regular) + sum(degree_at(s) for _, s in self.stalks)

    def conditions(self):
        conds = []
        for br, k in self.regular:
            conds.append(LocalCondition((br,), _power_lattice(-k)))
        for s in self.curve.singularities:
            conds.append(LocalCondition(self.curve.branches(s), self.stalk(s.name).space))
        return conds

    def with_regular(self, br, k: int) -> "GeneralisedDivisor":
        reg = dict(self.regular)
        reg[br] = reg.get(br, 0) + k
        return GeneralisedDivisor(self.curve, tuple((b, m) for b, m in reg.items() if m != 0), self.stalks)


def make_divisor(curve: RationalSingularCurve, regular=(), stalks=None) -> GeneralisedDivisor:
    """``regular`` holds (point, mult) pairs; ``stalks`` maps singularity names to
    generator lists or ready DivisorStalks."""
    sing_branches = curve.singular_branches
    reg = {}
    for pt, k in regular:
        br = _as_branch(curve, pt)
        if br[0] not in curve.components:
            raise CurveError(f"unknown component {br[0]!r}")
        if br in sing_branches:
            raise CurveError(f"regular part point {br} is a singular preimage")
        reg[br] = reg.get(br, 0) + int(k)
    st = []
    for name, val in (stalks or {}).items():
        sing = curve.singularity(name)
        if not isinstance(val, DivisorStalk):
            val = module_closure(sing.ring, list(val))
        st.append((name, val))
    return GeneralisedDivisor(curve, tuple((b, k) for b, k in reg.items() if k != 0), tuple(st))


def h0(curve: RationalSingularCurve, div: GeneralisedDivisor, anchors=None) -> GlobalSectionBasis:
    return solve_sections(curve, div.conditions(), anchors)


# regular forms ----------------------------------------------------------------

@dataclass(frozen=True)
class FormStalk:
    space: StalkSubspace
    quotient_dim: int
    pole_bound: int
    agrees_with_dual: bool


def regular_forms_stalk(ring: LocalRingStalk, pole_bound: int | None = None) -> FormStalk:
    """Forms ``phi dt`` with ``sum_i Res(f phi) = 0`` for every ``f`` in the ring.

    Solved directly in the window ``[-P, 0)`` with ``P = 2 delta + 1`` and
    compared with the residue dual of the ring lattice.
    """
    d = delta_invariant(ring)
    P = 2 * d + 1 if pole_bound is None else pole_bound
    b = ring.branches
    basis = ring.space.basis_mod(P) if P > 0 else []
    # phi coordinates: exponents -P..-1 per branch; Res(f phi) pairs f_k with phi_{-1-k}
    rows = []
    for f in basis:
        r = []
        for i in range(b):
            for e in range(-P, 0):
                r.append(f[i].coeff(-1 - e) if -1 - e < f.order else Fraction(0))
        rows.append(r)
    sol = nullspace(rows, b * P) if rows else [tuple(Fraction(int(i == j)) for j in range(b * P)) for i in range(b * P)]
    space = StalkSubspace(b, 0, 0, (), (), 0) if not sol else span_vectors(sol, b, -P)
    dual = residue_dual(ring.space).canonical()
    return FormStalk(space, quotient_dim(space, full(b, 0)), P, lattice_equal(space, dual))


def span_vectors(vecs, b: int, lo: int) -> StalkSubspace:
    from .jetalg import rref_span
    return rref_span(vecs, b, lo, 0, stable=0).canonical()


def omega_stalk(ring: LocalRingStalk) -> StalkSubspace:
    return residue_dual(ring.space).canonical()


def omega_of(div: DivisorStalk) -> StalkSubspace:
    """``{phi : f phi regular for all f in S}``; equals the residue dual because ``R S = S``."""
    return residue_dual(div.space).canonical()


def _neg_t2(order: int) -> LaurentJet:
    return LaurentJet(2, (Fraction(-1),), order)


def _one(order: int) -> LaurentJet:
    return LaurentJet(0, (Fraction(1),), order)


def _inf_factor_for(branch):
    return inf_form_factor if branch[1] is INF else None


@dataclass(frozen=True)
class RegularFormDivisor:
    curve: RationalSingularCurve
    regular: tuple = ()  # (branch, k): phi in t^k Obar
    stalks: tuple = ()  # (singularity name, phi-lattice)

    def conditions(self):
        conds = []
        reg = dict(self.regular)
        for comp in self.curve.components:
            br = (comp, INF)
            if br not in reg and br not in self.curve.singular_branches:
                reg[br] = 0
        for br, k in reg.items():
            conds.append(LocalCondition((br,), _power_lattice(k), (_inf_factor_for(br),)))
        names = dict(self.stalks)
        for s in self.curve.singularities:
            brs = self.curve.branches(s)
            conds.append(LocalCondition(brs, names[s.name], tuple(_inf_factor_for(b) for b in brs)))
        return conds

    def g_lattice(self, name: str) -> StalkSubspace:
        """Stalk in the function model ``g = phi / (dw/dt)``."""
        s = self.curve.singularity(name)
        brs = self.curve.branches(s)
        lat = dict(self.stalks)[name]
        if all(br[1] is not INF for br in brs):
            return lat
        factors = [_neg_t2 if br[1] is INF else _one for br in brs]
        return scale_branches(lat, factors).canonical()

    @property
    def degree(self) -> int:
        total = 0
        reg = dict(self.regular)
        for comp in self.curve.components:
            br = (comp, INF)
            if br not in self.curve.singular_branches:
                total -= 2 + reg.pop(br, 0)
        total -= sum(reg.values())
        for s in self.curve.singularities:
            total += degree_at(DivisorStalk(s.ring, self.g_lattice(s.name)))
        return total


def omega_divisor(curve: RationalSingularCurve, div: GeneralisedDivisor) -> RegularFormDivisor:
    stalks = tuple((s.name, omega_of(div.stalk(s.name))) for s in curve.singularities)
    return RegularFormDivisor(curve, tuple(div.regular), stalks)


def h0_forms(curve: RationalSingularCurve, fdiv: RegularFormDivisor, anchors=None) -> GlobalSectionBasis:
    """Global forms ``g dw``; the returned functions are the ``g``."""
    return solve_sections(curve, fdiv.conditions(), anchors)


# checks -----------------------------------------------------------------------

def rr_serre_check(curve: RationalSingularCurve, div: GeneralisedDivisor, test_point=None) -> dict:
    h = h0(curve, div).dim
    fd = omega_divisor(curve, div)
    hw = h0_forms(curve, fd).dim
    deg = div.degree
    rhs = deg + curve.chi
    report = {
        "degree": deg,
        "h0": h,
        "h0_omega": hw,
        "arithmetic_genus": curve.arithmetic_genus,
        "riemann_roch": h - hw == rhs,
        "omega_degree": fd.degree,
        "omega_degree_ok": fd.degree == -2 * curve.chi - deg,
    }
    report["vanishing_above_canonical"] = hw == 0 if deg > -2 * curve.chi else None
    # deg >= geometric genus (zero here) is expected to give a section
    report["geometric_genus_corollary"] = (h >= 1) if deg >= 0 else None
    if test_point is not None:
        br = _as_branch(curve, test_point)
        bigger = div.with_regular(br, 1)
        hw2 = h0_forms(curve, omega_divisor(curve, bigger)).dim
        report["h1_monotone"] = (hw2 == 0) if hw == 0 else None
        report["nested_index"] = h0(curve, bigger).dim - h <= bigger.degree - deg
    report["ok"] = report["riemann_roch"] and report["omega_degree_ok"] and report["vanishing_above_canonical"] is not False and report.get("h1_monotone") is not False
    return report


def residue_pairing_global(curve: RationalSingularCurve, parts, omega) -> object:
    """``sum_k Res_{q_k} h_k omega`` for principal parts ``h_k(z)`` at smooth points.

    ``parts`` is a list of (point, h) with ``h`` a rational function of the
    chart coordinate; ``omega`` maps components to ``g`` for ``g dw``.
    """
    total = 0
    sing = curve.singular_branches
    for pt, h in parts:
        br = _as_branch(curve, pt)
        if br in sing:
            raise CurveError(f"marked point {br} is not smooth")
        ph = expand_at(RationalFunction._lift(h), Fraction(0), 1)
        P = max(0, -ph.low) if not ph.is_zero else 0
        if P == 0:
            continue
        g = omega[br[0]]
        gj = expand_at(g, br[1], P + 2)
        if br[1] is INF:
            gj = gj * inf_form_factor(P + 4)
        hj = expand_at(RationalFunction._lift(h), Fraction(0), P + 2)
        total = total + (gj * hj).coeff(-1)
    return total


def pairing_matrix(ring: LocalRingStalk):
    """Residue pairing between bases of ``Obar/O`` and ``Omega/(holomorphic forms)``."""
    R = ring.space
    b = R.branches
    m = R.order
    piv = set(R.pivots)
    fbasis = [(i, k) for i in range(b) for k in range(0, m) if R.index(i, k) not in piv] if m > 0 else []
    om = omega_stalk(ring)
    P = -om.lo
    if P <= 0:
        return [], 0
    # project Omega rows onto negative exponents
    w = om.width
    proj = []
    for r in om.rows:
        proj.append(tuple(r[i * w + (e - om.lo)] for i in range(b) for e in range(om.lo, min(0, om.order))))
    obasis, _ = rref(proj, b * (min(0, om.order) - om.lo))
    wn = min(0, om.order) - om.lo
    M = []
    for (i, k) in fbasis:
        row = []
        for ob in obasis:
            e = -1 - k
            row.append(ob[i * wn + (e - om.lo)] if om.lo <= e < min(0, om.order) else Fraction(0))
        M.append(row)
    r = rank(M, len(obasis)) if M else 0
    return M, r


def gorenstein_report(ring: LocalRingStalk) -> dict:
    d = delta_invariant(ring)
    n = conductor(ring).n
    om = DivisorStalk(ring, omega_stalk(ring))
    verdict = is_locally_free(om)
    free = verdict.free
    return {
        "delta": d,
        "n": n,
        "bounds_ok": (d + 1 <= n <= 2 * d) if d > 0 else n == 0,
        "gorenstein": n == 2 * d,
        "omega_free": free,
        "omega_generator": verdict.generator,
        "iff_ok": (n == 2 * d) == free,
    }


def is_exact_curve(curve: RationalSingularCurve) -> bool:
    return all(p.value is INF or is_exact(p.value) for p in curve.points)
