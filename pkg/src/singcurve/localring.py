"""Local rings of a singular point, as subrings of the multi-branch jet algebra.

A ring stalk is stored as a certified lattice: a subspace of the window
``[0, m)`` on every branch, together with the guarantee that everything
vanishing to order ``m`` on all branches belongs to the ring.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .jetalg import (
    LaurentJet,
    MultiJet,
    RationalFunction,
    StalkSubspace,
    colon,
    expand_at,
    full,
    intersect,
    quotient_dim,
    rref_span,
    span_jets,
)
from .jetalg.subspace import lattice_equal

DEFAULT_ORDER = 8
MAX_RESTARTS = 3


class CertificationError(Exception):
    """A construction could not be certified."""


class TruncationTooSmall(CertificationError):
    pass


class RingAxiomError(CertificationError):
    pass


@dataclass(frozen=True)
class AmbientStalk:
    branches: int
    order: int = DEFAULT_ORDER
    names: tuple = ()

    def __post_init__(self):
        if self.branches < 1:
            raise ValueError("need at least one branch")
        if self.order < 2:
            raise ValueError("truncation order must be at least 2")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"t{i + 1}" if self.branches > 1 else "t" for i in range(self.branches)))


@dataclass(frozen=True)
class LocalRingStalk:
    ambient: AmbientStalk
    space: StalkSubspace
    generators: tuple = field(default=(), compare=False)

    @property
    def branches(self) -> int:
        return self.ambient.branches

    @property
    def m(self) -> int:
        """Stability exponent: ``t^m`` times the ambient lies in the ring."""
        return self.space.order

    def key(self):
        return self.space.key()

    def contains(self, g) -> bool:
        return self.space.contains(as_multijet(g, self.branches, max(self.m, 1)))

    def __repr__(self):
        return f"LocalRingStalk(b={self.branches}, m={self.m}, dim={self.space.dim})"


# germ conversion -----------------------------------------------------------

def as_multijet(g, b: int, order: int) -> MultiJet:
    """Turn a germ description into a multijet known up to ``order``.

    Accepts multijets, jets, rational functions in the branch coordinate,
    scalars, or tuples of those (one entry per branch).
    """
    if isinstance(g, MultiJet):
        if len(g) != b:
            raise ValueError(f"germ has {len(g)} branches, expected {b}")
        if g.order < order:
            raise TruncationTooSmall(f"generator only known to t^{g.order - 1}, need t^{order - 1}")
        return g.truncate(order)
    if isinstance(g, (tuple, list)):
        if len(g) != b:
            raise ValueError(f"germ has {len(g)} branches, expected {b}")
        return MultiJet(tuple(_branch_jet(x, order) for x in g))
    if b == 1:
        return MultiJet((_branch_jet(g, order),))
    if isinstance(g, (RationalFunction, LaurentJet)):
        raise ValueError("a single-branch germ given for a multi-branch stalk")
    return MultiJet(tuple(_branch_jet(g, order) for _ in range(b)))


def _branch_jet(x, order: int) -> LaurentJet:
    if isinstance(x, LaurentJet):
        if x.order < order:
            raise TruncationTooSmall(f"jet only known to t^{x.order - 1}, need t^{order - 1}")
        return x.truncate(order)
    if isinstance(x, RationalFunction):
        return expand_at(x, Fraction(0), order)
    return expand_at(RationalFunction.const(x), Fraction(0), order)


# constructions -------------------------------------------------------------

def radical(ambient: AmbientStalk) -> StalkSubspace:
    b, N = ambient.branches, ambient.order
    jets = [MultiJet.unit(i, k, b, N) for i in range(b) for k in range(1, N)]
    return span_jets(jets, b, 0, N, stable=1)


def _check_in_c_plus_r(space: StalkSubspace) -> bool:
    if space.lo > 0:
        return True
    for r in space.rows:
        vals = [r[space.index(i, 0)] for i in range(space.branches)] if space.order > 0 else []
        if vals and any(v != vals[0] for v in vals):
            return False
    if space.stable is not None and space.stable <= 0 and space.branches > 1:
        return False
    return True


def _closure_mod(gens, b: int, N: int) -> StalkSubspace:
    one = MultiJet.constant(Fraction(1), b, N)
    span = span_jets([one] + list(gens), b, 0, N)
    while True:
        basis = span.row_jets()
        prods = [g * r for g in gens for r in basis]
        new = span_jets(basis + prods, b, 0, N)
        if new.dim == span.dim:
            return new
        span = new


def subalgebra_closure(ambient: AmbientStalk, generators, max_restarts: int = MAX_RESTARTS) -> LocalRingStalk:
    """Smallest ring containing 1 and the generators, with certified tail.

    The closure is computed modulo ``t^N``.  Once every ``t^k e_i`` with
    ``m <= k < N`` is in the span and ``N >= 2m + 2`` the tail is certified;
    otherwise the computation restarts with a larger ``N``.
    """
    b = ambient.branches
    N = ambient.order
    gens = list(generators)
    for _ in range(max_restarts + 1):
        jets = [as_multijet(g, b, N) for g in gens]
        for j in jets:
            if any(not x.is_zero and x.low < 0 for x in j.branches):
                raise ValueError("ring generators must be holomorphic")
        span = _closure_mod(jets, b, N)
        if not _check_in_c_plus_r(span):
            raise RingAxiomError("generated ring separates branch values at order 0")
        m = span.find_stable()
        if m < N and N >= 2 * m + 2:
            cert = StalkSubspace(b, 0, N, span.rows, span.pivots, stable=m).canonical()
            return LocalRingStalk(AmbientStalk(b, N, ambient.names), cert, tuple(gens))
        last = N
        N = max(2 * m + 2, 2 * N) if m < N else 2 * N
    raise TruncationTooSmall(f"closure not certified up to truncation order {last}")


def ring_from_divisor(multiplicities, order: int | None = None) -> LocalRingStalk:
    """The ring ``C + sum_i t_i^{n_i} C{t_i}``."""
    mults = [int(n) for n in multiplicities]
    if not mults or any(n < 1 for n in mults):
        raise ValueError("multiplicities must be positive")
    m = max(mults)
    if order is None:
        order = max(2 * m + 2, DEFAULT_ORDER)
    if order <= m:
        raise TruncationTooSmall(f"truncation order {order} must exceed max multiplicity {m}")
    b = len(mults)
    jets = [MultiJet.constant(Fraction(1), b, m)]
    for i, n in enumerate(mults):
        for k in range(n, m):
            jets.append(MultiJet.unit(i, k, b, m))
    space = span_jets(jets, b, 0, m, stable=m).canonical()
    return LocalRingStalk(AmbientStalk(b, order), space, ())


def smooth_ring(branches: int = 1, order: int = DEFAULT_ORDER) -> LocalRingStalk:
    if branches != 1:
        raise RingAxiomError("the full ambient is a ring inside C + r only for one branch")
    return LocalRingStalk(AmbientStalk(1, order), full(1, 0), ())


def ring_from_space(space: StalkSubspace, order: int = DEFAULT_ORDER) -> LocalRingStalk:
    """Wrap an already certified lattice (used for endomorphism rings)."""
    space = space.canonical()
    if space.lo < 0:
        raise RingAxiomError("ring has a pole part")
    if space.lo > 0:
        raise RingAxiomError("ring does not contain 1")
    return LocalRingStalk(AmbientStalk(space.branches, max(order, 2 * space.order + 2)), space, ())


# invariants ----------------------------------------------------------------

def ambient_lattice(b: int) -> StalkSubspace:
    return full(b, 0)


def delta_invariant(ring: LocalRingStalk) -> int:
    return ring.branches * ring.m - ring.space.dim


@dataclass(frozen=True)
class Conductor:
    ideal: StalkSubspace
    n: int


def conductor(ring: LocalRingStalk) -> Conductor:
    ideal = colon(ring.space, full(ring.branches, 0))
    return Conductor(ideal, quotient_dim(full(ring.branches, 0), ideal))


def maximal_ideal(ring: LocalRingStalk) -> StalkSubspace:
    """``ring ∩ r``: elements vanishing at the singular point."""
    return intersect(ring.space, radical_lattice(ring.branches))


def radical_lattice(b: int) -> StalkSubspace:
    return StalkSubspace(b, 1, 1, (), (), 1)


def c_plus_power(b: int, n: int) -> StalkSubspace:
    """``C + r^n`` as a lattice."""
    if n <= 0:
        return full(b, 0)
    return ring_from_divisor([n] * b).space


def check_ring_axioms(ring) -> dict:
    """Report on the ring axioms and the inclusion chain; never raises."""
    if isinstance(ring, LocalRingStalk):
        space = ring.space
    else:
        space = ring
    b = space.branches
    report = {}
    m = space.stable
    if m is None:
        cand = space.find_stable()
        m = cand if cand < space.order else None
        if m is not None:
            space = StalkSubspace(b, space.lo, space.order, space.rows, space.pivots, stable=m)
    if space.lo > 0:
        report["contains_one"] = False
    else:
        one = MultiJet.constant(Fraction(1), b, space.order)
        report["contains_one"] = space.contains(one)
    # closure under products on the known window
    if m is not None:
        basis = space.basis_mod(space.order)
    else:
        basis = space.row_jets()
    closed = True
    for i, x in enumerate(basis):
        for y in basis[i:]:
            p = (x * y)
            if p.order < space.order or not space.contains(p.truncate(space.order)):
                closed = False
                break
        if not closed:
            break
    report["closed"] = closed
    report["inside_c_plus_r"] = _check_in_c_plus_r(space)
    report["stability_exponent"] = m
    if m is None:
        report["contains_c_plus_r_m"] = False
        report["conductor_inside"] = False
        report["remark_identity"] = False
        return report
    try:
        lat = space.canonical() if space.stable is not None else space
    except Exception:  # pragma: no cover - defensive
        lat = space
    cpr = c_plus_power(b, m)
    report["contains_c_plus_r_m"] = lat.lo <= 0 and lat.contains_subspace(cpr)
    if report["closed"] and report["contains_one"] and lat.lo == 0:
        cond = colon(lat, full(b, 0))
        c_plus_c = _c_plus(cond)
        report["conductor_inside"] = lat.contains_subspace(c_plus_c)
        report["n_q"] = quotient_dim(full(b, 0), cond)
        report["chain"] = bool(c_plus_c.contains_subspace(cpr) and lat.contains_subspace(c_plus_c) and report["inside_c_plus_r"])
    else:
        report["conductor_inside"] = False
        report["chain"] = False
    n = max(m, 1)
    lhs = quotient_dim(full(b, 0), c_plus_power(b, n))
    report["remark_identity"] = lhs == n * b - 1
    report["remark_dim"] = lhs
    return report


def _c_plus(ideal: StalkSubspace) -> StalkSubspace:
    """``C + ideal`` for an ideal of the ambient."""
    b = ideal.branches
    if ideal.lo > 0:
        ideal = ideal.embed(0, ideal.order)
    if ideal.order == 0:
        return ideal
    one = MultiJet.constant(Fraction(1), b, ideal.order).coords(0, ideal.order)
    return rref_span(list(ideal.rows) + [one], b, 0, ideal.order, stable=ideal.stable).canonical()


def rings_equal(a: LocalRingStalk, b: LocalRingStalk) -> bool:
    return a.branches == b.branches and lattice_equal(a.space, b.space)
