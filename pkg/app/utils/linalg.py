"""Exact linear algebra helpers over QQ, QQ(z) and polynomial rings.

Thin wrappers around ``sympy.polys.matrices.DomainMatrix`` that tolerate
empty shapes and take care of moving values into the right domain.
"""

from typing import Any, List, Sequence

import sympy
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from app.algebra.scalars import Z_SYMBOL, LocalScalar

FRACTION_FIELD = QQ.frac_field(Z_SYMBOL)


def _shape(rows: Sequence[Sequence[Any]]) -> tuple:
    if not rows:
        return (0, 0)
    return (len(rows), len(rows[0]))


def rank(rows: Sequence[Sequence[Any]], domain: Any = QQ) -> int:
    """
    Rank of a matrix with entries already in ``domain`` (a field).

    Parameters
    ----------
    rows : Sequence[Sequence[Any]]
        Row-major entries.
    domain : sympy domain
        A field such as ``QQ`` or ``FRACTION_FIELD``.

    Returns
    -------
    int
        The rank; 0 for empty matrices.
    """
    m, n = _shape(rows)
    if m == 0 or n == 0:
        return 0
    return DomainMatrix([list(r) for r in rows], (m, n), domain).rank()


def nullspace(rows: Sequence[Sequence[Any]], ncols: int, domain: Any = QQ) -> List[List[Any]]:
    """Basis (as rows) of the right kernel ``{v : A v = 0}``."""
    m = len(rows)
    if ncols == 0:
        return []
    if m == 0:
        return [[domain.one if i == j else domain.zero for j in range(ncols)] for i in range(ncols)]
    null = DomainMatrix([list(r) for r in rows], (m, ncols), domain).nullspace()
    return null.to_list()


def rational_rows(rows: Sequence[Sequence[Any]]) -> List[List[Any]]:
    return [[QQ.convert(c) for c in r] for r in rows]


def local_rows(rows: Sequence[Sequence[LocalScalar]]) -> List[List[Any]]:
    """Move ``LocalScalar`` entries into sympy's QQ(z) domain."""
    return [[FRACTION_FIELD.from_sympy(c.to_sympy()) for c in r] for r in rows]


def symbolic_domain_matrix(rows: Sequence[Sequence[sympy.Expr]]) -> DomainMatrix:
    """Build a ``DomainMatrix`` over the smallest domain holding sympy expressions."""
    m, n = _shape(rows)
    return DomainMatrix.from_list_sympy(m, n, [list(r) for r in rows])


def symbolic_rank(rows: Sequence[Sequence[sympy.Expr]]) -> int:
    m, n = _shape(rows)
    if m == 0 or n == 0:
        return 0
    return symbolic_domain_matrix(rows).to_field().rank()
