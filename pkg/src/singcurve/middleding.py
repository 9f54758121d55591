"""Endomorphism rings of divisor stalks, the hyperelliptic normal form, and
eigenvector divisors of polynomial matrices."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .gendiv import (
    DivisorStalk,
    FreenessVerdict,
    _row_germs,
    _tail_germs,
    _valuation,
    block_sum,
    branch_partition,
    from_space,
    is_locally_free,
    module_closure,
    restrict_branches,
)
from .jetalg import (
    MultiJet,
    Poly,
    RationalFunction,
    colon,
    full,
    lattice_equal,
    rref,
    span_jets,
)
from .jetalg.linalg import solve
from .localring import (
    AmbientStalk,
    LocalRingStalk,
    as_multijet,
    delta_invariant,
    ring_from_space,
    rings_equal,
    subalgebra_closure,
)


class NormalFormError(ValueError):
    pass


class MatrixSpecError(ValueError):
    pass


# endomorphism ring ---------------------------------------------------------

@dataclass(frozen=True)
class Block:
    branches: tuple
    ring: LocalRingStalk
    divisor: DivisorStalk
    verdict: FreenessVerdict


@dataclass(frozen=True)
class MiddledingResult:
    ring: LocalRingStalk
    partition: tuple
    lifted: DivisorStalk
    blocks: tuple
    split_certified: bool

    @property
    def free(self) -> bool:
        return all(b.verdict.free for b in self.blocks)

    @property
    def delta(self) -> int:
        """Sum of the block delta invariants."""
        return sum(delta_invariant(b.ring) for b in self.blocks)


def endomorphism_ring(div: DivisorStalk) -> MiddledingResult:
    """``{f in Obar : f S in S}`` with its branch partition and the lifted divisor."""
    ring_space = colon(div.space, div.space).canonical()
    ring = ring_from_space(ring_space, div.ring.ambient.order)
    parts = branch_partition(ring_space)
    split_ok = lattice_equal(block_sum(ring_space, parts), ring_space)
    lifted = DivisorStalk(ring, div.space, div.generators)
    blocks = []
    for blk in parts:
        r = LocalRingStalk(AmbientStalk(len(blk), ring.ambient.order), restrict_branches(ring_space, blk))
        d = from_space(r, restrict_branches(div.space, blk))
        blocks.append(Block(blk, r, d, is_locally_free(d)))
    return MiddledingResult(ring, parts, lifted, tuple(blocks), split_ok)


# the x^2 = y^n model -------------------------------------------------------

def _t_power(k: int, c=Fraction(1)) -> RationalFunction:
    if k >= 0:
        return RationalFunction(Poly(tuple([Fraction(0)] * k + [c])))
    return RationalFunction(Poly.const(c), Poly(tuple([Fraction(0)] * (-k) + [Fraction(1)])))


@dataclass(frozen=True)
class AnModel:
    n: int
    ring: LocalRingStalk
    y: tuple
    x: tuple

    @property
    def branches(self) -> int:
        return len(self.y)


def an_model(n: int) -> AnModel:
    """Local model ``x^2 = y^n``: two branches ``x = +-y^(n/2)`` or ``y = t^2, x = t^n``."""
    if n < 2:
        raise ValueError("need n >= 2")
    if n % 2 == 0:
        k = n // 2
        y = (_t_power(1), _t_power(1))
        x = (_t_power(k), _t_power(k, Fraction(-1)))
    else:
        y = (_t_power(2),)
        x = (_t_power(n),)
    b = len(y)
    ring = subalgebra_closure(AmbientStalk(b, max(2 * n + 2, 8)), [y, x])
    return AnModel(n, ring, y, x)


@dataclass(frozen=True)
class HyperellipticReduction:
    ell: int
    generator: tuple
    ring_generators: tuple
    ring: LocalRingStalk
    certified: bool


def _mul(a, b):
    return tuple(x * y for x, y in zip(a, b))


def _minimising_element(div: DivisorStalk):
    """An element reaching the minimal valuation on every branch at once."""
    b = div.branches
    mins = div.space.branch_valuations()
    cands = _row_germs(div.space) + _tail_germs(div.space)
    vals = [_valuation(g, b) for g in cands]
    picks = []
    for i in range(b):
        for g, v in zip(cands, vals):
            if v[i] == mins[i]:
                picks.append(g)
                break
    for scale in range(1, 2 * b + 3):
        g = tuple(sum(((scale ** j) * p[i] for j, p in enumerate(picks)), RationalFunction.const(0)) for i in range(b))
        if _valuation(g, b) == mins:
            return g
    raise ValueError("no element attains all minimal valuations")  # pragma: no cover


def hyperelliptic_reduce(n: int, div: DivisorStalk) -> HyperellipticReduction:
    """Normal form of a divisor on ``x^2 = y^n``: the generator and the middleding ring."""
    model = an_model(n)
    if div.branches != model.branches or not rings_equal(div.ring, model.ring):
        raise NormalFormError(f"divisor ring is not the x^2 = y^{n} model ring")
    f = _minimising_element(div)
    ell = 0
    for k in range(n // 2, 0, -1):
        xk = tuple(xi / yi ** k for xi, yi in zip(model.x, model.y))
        if div.contains(_mul(xk, f)):
            ell = k
            break
    z = tuple(xi / yi ** ell for xi, yi in zip(model.x, model.y))
    b = model.branches
    if ell > 0 and 2 * ell == n:
        # x / y^(n/2) = (1, -1) separates the two branches
        ring = ring_from_space(full(b, 0))
    else:
        ring = subalgebra_closure(AmbientStalk(b, model.ring.ambient.order), [model.y, z])
    ok = lattice_equal(module_closure(ring, [f]).space, div.space)
    return HyperellipticReduction(ell, f, (model.y, z), ring, ok)


# polynomial matrices -------------------------------------------------------

def _rf(x) -> RationalFunction:
    return RationalFunction._lift(x)


def rf_det(M) -> RationalFunction:
    """Determinant over the field of rational functions (Gaussian elimination)."""
    a = [[_rf(x) for x in row] for row in M]
    n = len(a)
    det = _rf(Fraction(1))
    for c in range(n):
        p = next((r for r in range(c, n) if not a[r][c].is_zero()), None)
        if p is None:
            return _rf(Fraction(0))
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det = det * a[c][c]
        for r in range(c + 1, n):
            if not a[r][c].is_zero():
                f = a[r][c] / a[c][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def rf_inverse(M):
    n = len(M)
    one, zero = _rf(Fraction(1)), _rf(Fraction(0))
    aug = [[_rf(x) for x in row] + [one if i == j else zero for j in range(n)] for i, row in enumerate(M)]
    basis, piv = rref(aug, 2 * n)
    if piv[:n] != list(range(n)) or len(basis) < n:
        raise ZeroDivisionError("singular matrix")
    return [[_rf(x) for x in row[n:]] for row in basis]


def rf_matmul(A, B):
    return [[sum((_rf(A[i][k]) * _rf(B[k][j]) for k in range(len(B))), _rf(Fraction(0))) for j in range(len(B[0]))] for i in range(len(A))]


def _shifted(f: RationalFunction, p) -> RationalFunction:
    """``f(t + p)``."""
    return RationalFunction(f.num.shift(p), f.den.shift(p))


@dataclass(frozen=True)
class MatrixCurveSpec:
    matrix: tuple  # rows of RationalFunction in lambda
    branches: tuple  # mu_i(lambda)
    linear_form: tuple
    singular_lambdas: tuple = ()

    @property
    def size(self) -> int:
        return len(self.matrix)


def char_check(spec: MatrixCurveSpec):
    """``det(mu_i Id - A)`` for every branch; all must vanish identically."""
    n = spec.size
    out = []
    for mu in spec.branches:
        M = [[(mu if i == j else _rf(Fraction(0))) - _rf(spec.matrix[i][j]) for j in range(n)] for i in range(n)]
        out.append(rf_det(M))
    return out


def eigenvector(spec: MatrixCurveSpec, mu: RationalFunction):
    """``psi`` with ``A psi = mu psi`` and ``l(psi) = 1`` over rational functions."""
    n = spec.size
    rows = [[_rf(spec.matrix[i][j]) - (mu if i == j else _rf(Fraction(0))) for j in range(n)] for i in range(n)]
    rows.append([_rf(c) for c in spec.linear_form])
    rhs = [_rf(Fraction(0))] * n + [_rf(Fraction(1))]
    x = solve(rows, rhs, n)
    if x is None:
        raise MatrixSpecError("linear form vanishes on the eigenline of a branch")
    basis, _ = rref(rows[:n], n)
    if len(basis) != n - 1:
        raise MatrixSpecError("eigenspace of a branch is not one-dimensional")
    return tuple(_rf(v) for v in x)


@dataclass(frozen=True)
class SingularStalk:
    lam: object
    mu: object
    branch_indices: tuple
    ring: LocalRingStalk
    divisor: DivisorStalk


@dataclass(frozen=True)
class EigenCurve:
    spec: MatrixCurveSpec
    psi: tuple  # per branch, tuple of n rational functions
    stalks: tuple = field(default=())


def _group_stalk(spec, psi, lam0, idx, order=8) -> SingularStalk:
    b = len(idx)
    mus = [spec.branches[i] for i in idx]
    mu0 = mus[0](lam0)
    lam_germ = tuple(_t_power(1) for _ in idx)
    mu_germ = tuple(_shifted(m, lam0) - mu0 for m in mus)
    ring = subalgebra_closure(AmbientStalk(b, order), [lam_germ, mu_germ])
    gens = []
    for k in range(spec.size):
        g = tuple(_shifted(psi[i][k], lam0) for i in idx)
        if any(not x.is_zero() for x in g):
            gens.append(g)
    div = module_closure(ring, gens)
    return SingularStalk(lam0, mu0, tuple(idx), ring, div)


def eigen_curve(spec: MatrixCurveSpec) -> EigenCurve:
    for i, d in enumerate(char_check(spec)):
        if not d.is_zero():
            raise MatrixSpecError(f"branch {i} does not satisfy the characteristic equation")
    psi = tuple(eigenvector(spec, mu) for mu in spec.branches)
    stalks = []
    for lam0 in spec.singular_lambdas:
        groups = {}
        for i, mu in enumerate(spec.branches):
            groups.setdefault(mu(lam0), []).append(i)
        for mu0, idx in groups.items():
            if len(idx) > 1:
                stalks.append(_group_stalk(spec, psi, lam0, idx))
    return EigenCurve(spec, psi, tuple(stalks))


def phi_check(curve: EigenCurve) -> dict:
    """Eigen-equation, injectivity of ``(f_k) -> sum f_k psi_k``, and the power basis."""
    spec = curve.spec
    n = spec.size
    eig = all(
        all((sum((_rf(spec.matrix[r][c]) * p[c] for c in range(n)), _rf(0)) - mu * p[r]).is_zero() for r in range(n))
        for mu, p in zip(spec.branches, curve.psi)
    )
    if len(curve.psi) == n:
        inj = not rf_det([list(p) for p in curve.psi]).is_zero()
    else:
        inj = False
    powers = []
    for st in curve.stalks:
        N = st.ring.ambient.order
        b = len(st.branch_indices)
        mu_jets = as_multijet(tuple(_shifted(spec.branches[i], st.lam) - st.mu for i in st.branch_indices), b, N)
        jets = []
        for k in range(n):
            mk = MultiJet.constant(Fraction(1), b, N)
            for _ in range(k):
                mk = mk * mu_jets
            for j in range(N):
                jets.append(mk * MultiJet(tuple(MultiJet.unit(0, j, 1, N).branches * b)))
        span = span_jets(jets, b, 0, N)
        ring_span = span_jets(st.ring.space.basis_mod(N), b, 0, N)
        powers.append(lattice_equal(span, ring_span) if span.dim == ring_span.dim else False)
    return {"eigen_equation": eig, "injective": inj, "power_basis": all(powers), "ok": eig and inj and all(powers)}


def branch_function(spec: MatrixCurveSpec, text: str):
    """A rational expression in ``lambda`` and ``mu``, evaluated on every branch."""
    from .jetalg import parse_rational
    return tuple(parse_rational(text, var="lambda", names={"mu": mu}) for mu in spec.branches)


@dataclass(frozen=True)
class CommutantResult:
    matrix: tuple
    polynomial: bool
    holomorphic_at_singular: bool
    commutes: bool

    @property
    def in_middleding(self) -> bool:
        return self.holomorphic_at_singular


def commutant_matrix(curve: EigenCurve, nu) -> CommutantResult:
    """``B`` with ``B psi = nu psi`` on every branch."""
    spec = curve.spec
    n = spec.size
    if len(curve.psi) != n:
        raise MatrixSpecError("need one branch per eigenvalue")
    Psi = [[curve.psi[i][k] for i in range(n)] for k in range(n)]
    D = [[_rf(nu[i]) if i == j else _rf(0) for j in range(n)] for i in range(n)]
    B = rf_matmul(rf_matmul(Psi, D), rf_inverse(Psi))
    poly = all(x.is_polynomial() for row in B for x in row)
    holo = all(x.den(lam0) != 0 for row in B for x in row for lam0 in spec.singular_lambdas)
    return CommutantResult(tuple(tuple(r) for r in B), poly, holo, _commutes(spec.matrix, B))


def _commutes(A, B) -> bool:
    AB, BA = rf_matmul(A, B), rf_matmul(B, A)
    return all((x - y).is_zero() for ra, rb in zip(AB, BA) for x, y in zip(ra, rb))


@dataclass(frozen=True)
class EigenvalueCheck:
    eigenvalues: tuple
    eigen_equation: bool
    commutes: bool
    in_middleding: tuple  # one verdict per singular stalk


def eigenvalue_check(curve: EigenCurve, B) -> EigenvalueCheck:
    """Per-branch eigenvalues ``l(B psi)`` of a matrix commuting with ``A``."""
    spec = curve.spec
    n = spec.size
    nus = []
    ok = True
    for p in curve.psi:
        Bp = [sum((_rf(B[r][c]) * p[c] for c in range(n)), _rf(0)) for r in range(n)]
        nu = sum((_rf(spec.linear_form[r]) * Bp[r] for r in range(n)), _rf(0))
        ok = ok and all((Bp[r] - nu * p[r]).is_zero() for r in range(n))
        nus.append(nu)
    verdicts = []
    for st in curve.stalks:
        res = endomorphism_ring(st.divisor)
        try:
            g = tuple(_shifted(nus[i], st.lam) for i in st.branch_indices)
            verdicts.append(res.ring.contains(g))
        except (ZeroDivisionError, ValueError):
            verdicts.append(False)
    return EigenvalueCheck(tuple(nus), ok, _commutes(spec.matrix, B), tuple(verdicts))


def fix_triple_spec(a=Fraction(1), b=Fraction(1)) -> MatrixCurveSpec:
    lam = RationalFunction.var()
    z = _rf(Fraction(0))
    A = ((lam, z, _rf(a)), (z, z, _rf(b)), (z, z, -lam))
    return MatrixCurveSpec(A, (lam, z, -lam), (Fraction(1),) * 3, (Fraction(0),))
