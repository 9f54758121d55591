"""Baker-Akhiezer functions on rational singular curves.

The function is written as ``psi_j = E * R_j`` where ``E`` carries the
essential singularities at the marked points and ``R_j`` is a rational
function from the exact candidate basis of the divisor.  All conditions are
linear in the coefficients of ``R_j``; the solve is numeric.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .globalcurve import (
    CurveError,
    GeneralisedDivisor,
    LocalCondition,
    RationalSingularCurve,
    _as_branch,
    candidate_basis,
    condition_rows,
    h0,
    pole_bounds,
)
from .jetalg import LaurentJet, lattice_equal, lattice_sum, RationalFunction, expand_at, series_exp
from .jetalg.scalars import to_complex
from .krichever import PrincipalPart

RANK_TOL = 1e-10
TWO_PI_I = 2j * math.pi


class BAProblemError(ValueError):
    pass


@dataclass(frozen=True)
class BAProblem:
    curve: RationalSingularCurve
    divisor: GeneralisedDivisor
    marked: tuple  # branches
    flows: tuple  # flows[l][k]: PrincipalPart
    c: tuple  # n x n
    anchors: tuple = ()  # ((component, anchor), ...) for an alternative candidate basis
    candidates: tuple = field(default=(), compare=False, repr=False)
    owners: tuple = field(default=(), compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.marked)

    @property
    def L(self) -> int:
        return len(self.flows)

    def exponent_functions(self, exclude=None) -> list:
        """``G[l][component] = sum_k h_{l,k}(z_k(w))``, skipping marked point ``exclude``."""
        out = []
        for parts in self.flows:
            g = {c: RationalFunction.const(Fraction(0)) for c in self.curve.components}
            for k, (br, part) in enumerate(zip(self.marked, parts)):
                if k != exclude:
                    g[br[0]] = g[br[0]] + part.pullback(br[1])
            out.append(g)
        return out


def ba_problem(curve, divisor, marked, flows, c=None, anchors=None, check=True) -> BAProblem:
    brs = tuple(_as_branch(curve, m) for m in marked)
    n = len(brs)
    fl = tuple(tuple(p if isinstance(p, PrincipalPart) else PrincipalPart(tuple(p)) for p in parts) for parts in flows)
    if any(len(parts) != n for parts in fl):
        raise BAProblemError("each flow needs one principal part per marked point")
    if c is None:
        c = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
    c = tuple(tuple(row) for row in c)
    if len(c) != n or any(len(r) != n for r in c):
        raise BAProblemError("normalisation must be n x n")
    if abs(np.linalg.det(np.array([[to_complex(x) for x in r] for r in c], dtype=complex))) < RANK_TOL:
        raise BAProblemError("normalisation matrix is singular")
    sing = curve.singular_branches
    if len(set(brs)) != n:
        raise BAProblemError("marked points must be distinct")
    for br in brs:
        if br in sing:
            raise BAProblemError(f"marked point {br} is not smooth")
        if br in dict(divisor.regular):
            raise BAProblemError(f"marked point {br} lies in the divisor support")
    conds = divisor.conditions()
    bounds = pole_bounds(curve, conds)
    cands, owners = candidate_basis(curve, bounds, dict(anchors) if anchors else None)
    prob = BAProblem(curve, divisor, brs, fl, c, tuple(sorted((anchors or {}).items())), tuple(cands), tuple(owners))
    if check:
        _check_problem(prob)
    return prob


def _check_problem(p: BAProblem):
    curve, div = p.curve, p.divisor
    if div.degree != curve.arithmetic_genus + p.n - 1:
        raise BAProblemError(f"divisor degree {div.degree} != g' + n - 1 = {curve.arithmetic_genus + p.n - 1}")
    if any(k < 0 for _, k in div.regular):
        raise BAProblemError("the divisor must contain the structure sheaf")
    for s in curve.singularities:
        S = div.stalk(s.name).space
        if not lattice_equal(lattice_sum(S, s.ring.space), S):
            raise BAProblemError(f"stalk at {s.name!r} does not contain the local ring")
    smaller = div
    for br in p.marked:
        smaller = smaller.with_regular(br, -1)
    if h0(curve, smaller).dim != 0:
        raise BAProblemError("divisor is special: sections vanishing at all marked points exist")


# exponential factor ----------------------------------------------------------

def _exp_jet(Gs, times, branch, order: int, deriv=()) -> LaurentJet:
    """Jet of ``prod_s exp(2 pi i sum_l t_l G_l) * prod_{l in deriv} 2 pi i G_l`` at a branch."""
    comp, p = branch
    out = None
    for t in times:
        a = LaurentJet.zero(order)
        for g, tl in zip(Gs, t):
            if tl != 0:
                j = expand_at(g[comp], p, order)
                if not j.is_zero and j.low < 0:
                    raise CurveError("exponential factor has an essential singularity here")
                a = a + j.scale(TWO_PI_I * complex(tl))
        e = series_exp(a)
        out = e if out is None else (out * e).truncate(order)
    for l in deriv:
        j = expand_at(Gs[l][comp], p, order)
        out = (out * j.scale(TWO_PI_I)).truncate(order)
    return out


def exponential_factor(problem: BAProblem, t, w, component=None):
    comp = component or problem.curve.components[0]
    br = (comp, w)
    if br in problem.marked:
        raise CurveError("exponential factor is essential at a marked point")
    G = problem.exponent_functions()
    return complex(_exp_jet(G, [tuple(t)], br, 1).coeff(0))


# linear system -----------------------------------------------------------------

def _value(f: RationalFunction, p):
    j = expand_at(f, p, 1)
    if not j.is_zero and j.low < 0:
        raise CurveError("candidate has a pole at a marked point")
    return to_complex(j.coeff(0))


def _system(p: BAProblem, times, deriv=()):
    """Rows of the condition matrix (singular-stalk rows, then marked-value rows)."""
    G = p.exponent_functions()
    rows = []
    for cond in p.divisor.conditions():
        mults = tuple(
            (lambda br: (lambda order: _exp_jet(G, times, br, order, deriv)))(br) for br in cond.branches
        )
        rows.extend(condition_rows(LocalCondition(cond.branches, cond.lattice, mults), p.candidates, p.owners))
    for k, br in enumerate(p.marked):
        Gk = p.exponent_functions(exclude=k)
        e = complex(_exp_jet(Gk, times, br, 1, deriv).coeff(0))
        rows.append([_value(f, br[1]) * e if o == br[0] else 0 for f, o in zip(p.candidates, p.owners)])
    return np.array([[complex(x) for x in r] for r in rows], dtype=complex).reshape(len(rows), len(p.candidates))


def _rhs(p: BAProblem, nrows: int):
    B = np.zeros((nrows, p.n), dtype=complex)
    for j in range(p.n):
        for k in range(p.n):
            B[nrows - p.n + k, j] = to_complex(p.c[j][k])
    return B


@dataclass(frozen=True)
class InExceptionalSet:
    t: tuple
    smallest_singular_value: float
    ratio: float


@dataclass(frozen=True)
class BASolution:
    problem: BAProblem
    t: tuple
    coeffs: np.ndarray = field(repr=False)  # ncand x n, column j is R_j
    condition: float
    residual: float
    scale: np.ndarray = field(repr=False)
    pinv: np.ndarray = field(repr=False)
    twists: tuple = ()

    @property
    def times(self) -> list:
        return [self.t] + list(self.twists)

    def rational_parts(self) -> list:
        """``R_j`` as dicts component -> numeric rational function."""
        out = []
        for j in range(self.problem.n):
            f = {c: RationalFunction.const(0.0) for c in self.problem.curve.components}
            for coef, g, o in zip(self.coeffs[:, j], self.problem.candidates, self.problem.owners):
                f[o] = f[o] + g * complex(coef)
            out.append(f)
        return out


def ba_solve(problem: BAProblem, t, pretwist=()) -> BASolution | InExceptionalSet:
    """Solve at time ``t``; ``pretwist`` multiplies in further factors ``E(., s)``."""
    t = tuple(t)
    times = [t] + [tuple(s) for s in pretwist]
    M = _system(problem, times)
    B = _rhs(problem, M.shape[0])
    norms = np.max(np.abs(M), axis=1)
    norms[norms == 0] = 1.0
    D = 1.0 / norms
    Ms = M * D[:, None]
    U, s, Vh = np.linalg.svd(Ms, full_matrices=False)
    ratio = s[-1] / s[0] if s[0] > 0 else 0.0
    if M.shape[0] < M.shape[1] or ratio < RANK_TOL:
        return InExceptionalSet(t, float(s[-1]), float(ratio))
    pinv = (Vh.conj().T / s) @ U.conj().T
    R = pinv @ (B * D[:, None])
    resid = float(np.max(np.abs(Ms @ R - B * D[:, None])))
    if resid > 1e-8:
        # overdetermined and inconsistent
        return InExceptionalSet(t, float(s[-1]), float(ratio))
    return BASolution(problem, t, R, float(s[0] / s[-1]), resid, D, pinv, tuple(times[1:]))


def evaluate_ba(sol: BASolution, w, component=None, deriv=(), coeffs=None) -> np.ndarray:
    """``psi_j(w)`` (or a t-derivative when ``coeffs`` holds the matching coefficient data)."""
    p = sol.problem
    comp = component or p.curve.components[0]
    br = (comp, w)
    if br in p.marked:
        raise CurveError("Baker-Akhiezer function is essential at a marked point")
    G = p.exponent_functions()
    vals = np.array([_value(f, w) if o == comp else 0 for f, o in zip(p.candidates, p.owners)], dtype=complex)
    E = complex(_exp_jet(G, sol.times, br, 1).coeff(0))
    R = vals @ sol.coeffs
    if not deriv:
        return E * R
    g = [TWO_PI_I * _value(G[l][comp], w) for l in range(p.L)]
    d = coeffs
    if len(deriv) == 1:
        (a,) = deriv
        return E * (g[a] * R + vals @ d[(a,)])
    a, b = deriv
    return E * (
        g[a] * g[b] * R + g[a] * (vals @ d[(b,)]) + g[b] * (vals @ d[(a,)]) + vals @ d[(a, b)]
    )


def ba_derivative(sol: BASolution, order: int = 2) -> dict:
    """Coefficient derivatives ``{(l,): r_l, (l, m): r_lm}`` from the differentiated system."""
    p = sol.problem
    times = sol.times
    D = sol.scale[:, None]
    r = sol.coeffs
    first = {}
    Ml = {}
    for l in range(p.L):
        Ml[l] = _system(p, times, (l,)) * D
        first[(l,)] = -sol.pinv @ (Ml[l] @ r)
    out = dict(first)
    if order >= 2:
        # both orders of every mixed pair are assembled separately
        for l in range(p.L):
            for m in range(p.L):
                Mlm = _system(p, times, (l, m)) * D
                out[(l, m)] = -sol.pinv @ (Mlm @ r + Ml[l] @ first[(m,)] + Ml[m] @ first[(l,)])
    return out


# exceptional set -----------------------------------------------------------------

def _det(problem, t) -> complex:
    M = _system(problem, [tuple(t)])
    if M.shape[0] != M.shape[1]:
        raise BAProblemError("determinant tracking needs a square system")
    return complex(np.linalg.det(M))


def find_exceptional_time(problem: BAProblem, start, stop, samples: int = 200, iterations: int = 200):
    """Bisect ``Re det M(t)`` along the segment from ``start`` to ``stop``.

    Returns the located time or None if no sign change is seen.
    """
    a0 = np.array(start, dtype=float)
    b0 = np.array(stop, dtype=float)

    def at(s):
        return tuple(a0 + s * (b0 - a0))

    grid = np.linspace(0.0, 1.0, samples + 1)
    vals = [_det(problem, at(s)).real for s in grid]
    for i in range(samples):
        if vals[i] == 0:
            return at(grid[i])
        if vals[i] * vals[i + 1] < 0:
            lo, hi, flo = grid[i], grid[i + 1], vals[i]
            for _ in range(iterations):
                mid = 0.5 * (lo + hi)
                if mid in (lo, hi):
                    break
                fm = _det(problem, at(mid)).real
                if fm == 0:
                    return at(mid)
                if (fm < 0) == (flo < 0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            return at(lo) if abs(_det(problem, at(lo))) <= abs(_det(problem, at(hi))) else at(hi)
    return None


# heat equation ----------------------------------------------------------------------

@dataclass(frozen=True)
class HeatReport:
    t: tuple
    u: complex
    u_from_definition: complex
    residuals: tuple
    max_relative_residual: float
    condition: float


def _is_kp(problem: BAProblem) -> bool:
    if problem.n != 1 or problem.L != 2:
        return False
    h1, h2 = problem.flows[0][0], problem.flows[1][0]
    return (
        h1.order == 1 and complex(to_complex(h1.coeffs[0])) == 1
        and h2.order == 2 and complex(to_complex(h2.coeffs[0])) == 0
        and abs(complex(to_complex(h2.coeffs[1])) - TWO_PI_I) < 1e-15
    )


def heat_check(problem: BAProblem, t, samples) -> HeatReport:
    """``(d_y - d_x^2 + u) psi = 0`` with ``u`` read off the first jet coefficient at the marked point."""
    if not _is_kp(problem):
        raise BAProblemError("heat check needs one marked point with h1 = 1/z and h2 = 2 pi i/z^2")
    sol = ba_solve(problem, t)
    if isinstance(sol, InExceptionalSet):
        raise BAProblemError(f"time {t} lies in the exceptional set")
    d = ba_derivative(sol)
    comp, q = problem.marked[0]
    # z-linear coefficient of every candidate at q (chart z = w - q or 1/w)
    lin = np.array(
        [to_complex(expand_at(f, q, 2).coeff(1)) if o == comp else 0 for f, o in zip(problem.candidates, problem.owners)],
        dtype=complex,
    )
    dxi = complex(lin @ d[(0,)][:, 0])
    u = 4j * math.pi * dxi
    u_def = -4j * math.pi * dxi
    res = []
    rel = 0.0
    for s in samples:
        comp_s, w = s if isinstance(s, tuple) else (problem.curve.components[0], s)
        psi = evaluate_ba(sol, w, comp_s)[0]
        py = evaluate_ba(sol, w, comp_s, (1,), d)[0]
        pxx = evaluate_ba(sol, w, comp_s, (0, 0), d)[0]
        r = py - pxx + u * psi
        res.append(complex(r))
        scale = max(abs(py), abs(pxx), abs(u * psi), 1e-300)
        rel = max(rel, abs(r) / scale)
    return HeatReport(tuple(t), u, u_def, tuple(res), rel, sol.condition)


def fd_check(problem: BAProblem, t, w, direction: int, step: float = 1e-5, component=None) -> float:
    """Relative gap between the exact t-derivative of ``psi`` and a central difference."""
    sol = ba_solve(problem, t)
    d = ba_derivative(sol, order=1)
    exact = evaluate_ba(sol, w, component, (direction,), d)
    tp = list(t)
    tm = list(t)
    tp[direction] += step
    tm[direction] -= step
    fp = evaluate_ba(ba_solve(problem, tp), w, component)
    fm = evaluate_ba(ba_solve(problem, tm), w, component)
    fd = (fp - fm) / (2 * step)
    return float(np.max(np.abs(fd - exact)) / max(np.max(np.abs(exact)), 1e-300))
