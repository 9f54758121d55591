"""Stalks of generalised divisors: finitely generated modules over a ring stalk."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .jetalg import (
    MultiJet,
    Poly,
    RationalFunction,
    StalkSubspace,
    lattice_equal,
    lattice_mul,
    quotient_dim,
    rank,
    rref_span,
    span_jets,
)
from .jetalg.subspace import common_window
from .localring import (
    AmbientStalk,
    LocalRingStalk,
    as_multijet,
    delta_invariant,
    maximal_ideal,
)

DEFAULT_SEED = 0x5EED
SEARCH_BUDGET = 64


class ModuleError(ValueError):
    pass


@dataclass(frozen=True)
class DivisorStalk:
    ring: LocalRingStalk
    space: StalkSubspace
    generators: tuple = field(default=(), compare=False)

    @property
    def branches(self) -> int:
        return self.space.branches

    @property
    def pole_bound(self) -> int:
        return max(0, -self.space.lo)

    @property
    def in_support(self) -> bool:
        return not lattice_equal(self.space, self.ring.space)

    def contains(self, g) -> bool:
        hi = max(self.space.order, 1)
        return self.space.contains(as_multijet(g, self.branches, hi))

    def key(self):
        return self.space.key()

    def __repr__(self):
        return f"DivisorStalk(b={self.branches}, window=[{self.space.lo},{self.space.order}), dim={self.space.dim})"


def _valuation(g, b: int):
    """Per-branch valuations of a germ (None for identically zero branches)."""
    order = 8
    while True:
        j = as_multijet(g, b, order)
        vals = j.valuations
        if all(v is not None for v in vals) or order > 64:
            return vals
        if isinstance(g, MultiJet):
            return vals
        order *= 2


def module_closure(ring: LocalRingStalk, generators) -> DivisorStalk:
    """The module ``sum_j ring * g_j``, with certified tail."""
    gens = list(generators)
    if not gens:
        raise ModuleError("a divisor needs at least one generator")
    b = ring.branches
    vals = [_valuation(g, b) for g in gens]
    mins = []
    for i in range(b):
        vi = [v[i] for v in vals if v[i] is not None]
        if not vi:
            raise ModuleError(f"all generators vanish on branch {i}")
        mins.append(min(vi))
    m = ring.m
    hi = m + max(mins)
    lo = min(mins)
    R = ring.space.basis_mod(hi - lo)
    jets = []
    for g in gens:
        gj = as_multijet(g, b, hi - min(0, lo) + max(0, -lo))
        for r in R:
            jets.append((gj * r).truncate(hi))
    space = span_jets(jets, b, lo, hi, stable=hi).canonical()
    return DivisorStalk(ring, space, tuple(gens))


def from_space(ring: LocalRingStalk, space: StalkSubspace, generators=()) -> DivisorStalk:
    """Wrap a lattice after checking that the ring acts on it."""
    if space.stable is None:
        raise ModuleError("divisor lattice needs a certified tail")
    prod = lattice_mul(ring.space, space)
    if not space.contains_subspace(prod):
        raise ModuleError("lattice is not a module over the ring")
    return DivisorStalk(ring, space.canonical(), tuple(generators))


def obar_lattice(b: int, lows) -> StalkSubspace:
    """``sum_i t_i^{lows[i]} C{t_i}``."""
    lo, hi = min(lows), max(lows)
    jets = [MultiJet.unit(i, k, b, hi) for i in range(b) for k in range(lows[i], hi)]
    return span_jets(jets, b, lo, hi, stable=hi)


def over_module(div: DivisorStalk, extra_shift: int = 0) -> StalkSubspace:
    """``Obar`` times (generators and 1), optionally enlarged by ``t^-extra_shift``."""
    vals = div.space.branch_valuations()
    lows = [min(0, v) - extra_shift for v in vals]
    return obar_lattice(div.branches, lows)


def degree_at(div: DivisorStalk, over: StalkSubspace | None = None) -> int:
    T = over_module(div) if over is None else over
    return quotient_dim(T, div.ring.space) - quotient_dim(T, div.space)


def branch_orders(div: DivisorStalk):
    return div.space.branch_valuations()


def _row_germs(space: StalkSubspace):
    """Basis rows of a lattice window as exact polynomial germs."""
    out = []
    w = space.width
    for r in space.rows:
        parts = []
        for i in range(space.branches):
            parts.append(_laurent_poly(r[i * w:(i + 1) * w], space.lo))
        out.append(tuple(parts))
    return out


def _laurent_poly(coeffs, lo: int) -> RationalFunction:
    if lo >= 0:
        return RationalFunction(Poly(tuple([Fraction(0)] * lo + list(coeffs))))
    den = Poly(tuple([Fraction(0)] * (-lo) + [Fraction(1)]))
    return RationalFunction(Poly(tuple(coeffs)), den)


def germ_jet(germ, b: int, order: int) -> MultiJet:
    return as_multijet(germ, b, order)


@dataclass(frozen=True)
class FreenessVerdict:
    generator: object  # germ tuple or None
    min_generators: int | None
    value_rank: int | None
    obstruction: str | None
    searched: int

    @property
    def free(self) -> bool:
        return self.generator is not None


def minimal_generators(div: DivisorStalk) -> int | None:
    """``dim S / m S`` for the maximal ideal ``m`` of a local ring (Nakayama)."""
    mS = lattice_mul(maximal_ideal(div.ring), div.space)
    return quotient_dim(div.space, mS)


def generates(ring: LocalRingStalk, germ, target: StalkSubspace) -> bool:
    try:
        cand = module_closure(ring, [germ]).space
    except ModuleError:
        return False
    return lattice_equal(cand, target)


def is_locally_free(div: DivisorStalk, seed: int = DEFAULT_SEED, budget: int = SEARCH_BUDGET) -> FreenessVerdict:
    """Search for ``f`` with ``ring * f = divisor``.

    Basis elements are tried first, then ``budget`` random integer
    combinations from a fixed seed.  The minimal number of generators is
    reported as an exact obstruction when it exceeds one.  Rings that
    separate branches are split into local blocks first.
    """
    blocks = branch_partition(div.ring.space)
    if len(blocks) > 1:
        return _free_by_blocks(div, blocks, seed, budget)
    ring = div.ring
    mu = minimal_generators(div)
    vr = preimage_value_rank(div) if div.space.lo >= 0 else None
    rows = _row_germs(div.space) + _tail_germs(div.space)
    tried = 0
    if mu == 1:
        for g in rows:
            tried += 1
            if generates(ring, g, div.space):
                return FreenessVerdict(g, mu, vr, None, tried)
        rng = random.Random(seed)
        for _ in range(budget):
            coeffs = [rng.randint(-3, 3) for _ in rows]
            if all(c == 0 for c in coeffs):
                continue
            g = tuple(sum((c * r[i] for c, r in zip(coeffs, rows)), RationalFunction.const(0)) for i in range(div.branches))
            tried += 1
            if generates(ring, g, div.space):
                return FreenessVerdict(g, mu, vr, None, tried)
        return FreenessVerdict(None, mu, vr, "no generator found within search budget", tried)
    if vr is not None and vr >= 2:
        why = f"evaluation rank {vr} >= 2"
    else:
        why = f"needs {mu} generators"
    return FreenessVerdict(None, mu, vr, why, tried)


def _tail_germs(space: StalkSubspace):
    """``t^order`` on each branch: always in a certified lattice."""
    b = space.branches
    out = []
    for i in range(b):
        one = _laurent_poly([Fraction(1)], space.order)
        zero = RationalFunction.const(0)
        out.append(tuple(one if j == i else zero for j in range(b)))
    return out


def _free_by_blocks(div, blocks, seed, budget) -> FreenessVerdict:
    parts = [0] * div.branches
    tried = 0
    mus = []
    for blk in blocks:
        sub_ring = LocalRingStalk(AmbientStalk(len(blk), div.ring.ambient.order), restrict_branches(div.ring.space, blk))
        sub = DivisorStalk(sub_ring, restrict_branches(div.space, blk))
        v = is_locally_free(sub, seed, budget)
        tried += v.searched
        mus.append(v.min_generators)
        if not v.free:
            return FreenessVerdict(None, max(mus), None, f"block {list(blk)}: {v.obstruction}", tried)
        for i, g in zip(blk, v.generator):
            parts[i] = g
    return FreenessVerdict(tuple(parts), max(mus), None, None, tried)


def branch_partition(space: StalkSubspace):
    """Blocks of branches on which every element has equal values at exponent 0."""
    b = space.branches
    if b == 1:
        return ((0,),)
    if space.lo > 0:
        return (tuple(range(b)),)
    if space.order <= 0:
        return tuple((i,) for i in range(b))
    blocks = []
    for i in range(b):
        for blk in blocks:
            j = blk[0]
            if all(r[space.index(i, 0)] == r[space.index(j, 0)] for r in space.rows):
                blk.append(i)
                break
        else:
            blocks.append([i])
    return tuple(tuple(blk) for blk in blocks)


def restrict_branches(space: StalkSubspace, idx) -> StalkSubspace:
    """Projection of a lattice onto a subset of branches."""
    w = space.width
    rows = [tuple(x for i in idx for x in r[i * w:(i + 1) * w]) for r in space.rows]
    return rref_span(rows, len(idx), space.lo, space.order, stable=space.stable, tol=space.tol).canonical()


def embed_branches(space: StalkSubspace, idx, b: int) -> StalkSubspace:
    """Inverse of ``restrict_branches``: zero on the other branches."""
    w = space.width
    zero = Fraction(0) if space.tol is None else 0.0
    rows = []
    for r in space.rows:
        v = [zero] * (b * w)
        for pos, i in enumerate(idx):
            v[i * w:(i + 1) * w] = r[pos * w:(pos + 1) * w]
        rows.append(tuple(v))
    # branches outside idx are zero: give them an unreachable tail
    out = rref_span(rows, b, space.lo, space.order, stable=None, tol=space.tol)
    return out


def block_sum(space: StalkSubspace, blocks) -> StalkSubspace:
    """``sum_B e_B * space`` as a certified lattice, for comparing with ``space``."""
    b = space.branches
    rows = []
    for blk in blocks:
        rows.extend(embed_branches(restrict_branches(space, blk).embed(space.lo, space.order), blk, b).rows)
    return rref_span(rows, b, space.lo, space.order, stable=space.stable, tol=space.tol).canonical()


def preimage_value_rank(div: DivisorStalk) -> int:
    """Rank of ``S -> C^b``, ``f -> (f_i(0))_i``."""
    sp = div.space
    if sp.lo < 0:
        raise ModuleError("divisor has a pole part; clear a free factor first")
    b = sp.branches
    if sp.order <= 0:
        return b
    if sp.lo > 0:
        return 0
    vals = [[r[sp.index(i, 0)] for i in range(b)] for r in sp.rows]
    return rank(vals, b) if vals else 0


def times_unit(div: DivisorStalk, unit) -> DivisorStalk:
    """The divisor ``u * S`` for a unit germ ``u`` (one factor per branch)."""
    b = div.branches
    gens = []
    for g in div.generators:
        gj = g if isinstance(g, tuple) else (g,)
        ut = unit if isinstance(unit, tuple) else (unit,) * b
        gens.append(tuple(RationalFunction._lift(x) * RationalFunction._lift(y) for x, y in zip(gj, ut)))
    return module_closure(div.ring, gens)


def free_degree_check(div: DivisorStalk, generator) -> dict:
    """Both sides of ``sum_p (-ord_p f) = deg(f Obar) - delta = deg(f O)``."""
    b = div.branches
    vals = _valuation(generator, b)
    lhs = sum(-v for v in vals)
    fobar = obar_lattice(b, vals)
    fobar_div = DivisorStalk(div.ring, fobar.canonical())
    mid = degree_at(fobar_div) - delta_invariant(div.ring)
    rhs = degree_at(div)
    return {"branch_sum": lhs, "obar_minus_delta": mid, "degree": rhs, "ok": lhs == mid == rhs}


def degrees_agree(div: DivisorStalk) -> bool:
    """Degree via two different over-modules."""
    return degree_at(div) == degree_at(div, over_module(div, extra_shift=1))


def window_pair(a: StalkSubspace, b: StalkSubspace):
    return common_window(a, b)
