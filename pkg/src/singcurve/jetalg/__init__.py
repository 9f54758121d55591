"""Scalars, truncated Laurent jets, rational functions and jet subspaces."""
from .linalg import DEFAULT_TOL, nullspace, rank, rref, solve
from .ratfun import INF, Poly, RationalFunction, expand_at, parse_point, parse_rational
from .scalars import I, QI, format_scalar, is_exact, parse_scalar
from .series import (
    CoordinateMismatch,
    FormJet,
    LaurentJet,
    MultiJet,
    WindowError,
    residue,
    series_div,
    series_exp,
    series_inv,
    series_mul,
)
from .subspace import (
    AmbientMismatch,
    NotContained,
    StalkSubspace,
    colon,
    common_window,
    full,
    intersect,
    lattice_equal,
    lattice_mul,
    lattice_sum,
    quotient_dim,
    relative_index,
    residue_dual,
    rref_span,
    span_jets,
)

__all__ = [
    "AmbientMismatch", "CoordinateMismatch", "DEFAULT_TOL", "FormJet", "I", "INF", "LaurentJet",
    "MultiJet", "NotContained", "Poly", "QI", "RationalFunction", "StalkSubspace", "WindowError",
    "colon", "common_window", "expand_at", "format_scalar", "full", "intersect", "is_exact",
    "lattice_equal", "lattice_mul", "lattice_sum", "nullspace", "parse_point", "parse_rational",
    "parse_scalar", "quotient_dim", "rank", "relative_index", "residue", "residue_dual", "rref",
    "rref_span", "series_div", "series_exp", "series_inv", "series_mul", "solve", "span_jets",
]
