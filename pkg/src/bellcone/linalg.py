"""Exact linear algebra over the rationals.

Rank is computed with fraction-free (Bareiss) elimination on integer rows.
Linear programs are solved with a dense two-phase simplex over Fractions
using Bland's rule, which cannot cycle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .tensor import primitive


def _integer_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for r in rows:
        if all(isinstance(v, int) for v in r):
            out.append(list(r))
        else:
            out.append(list(primitive(r)))
    return out


def bareiss_echelon(rows: Sequence[Sequence]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form.

    Returns the echelon rows (integers, nonzero rows only) and pivot columns.
    Rows are scaled to integers first; scaling does not change the row space.
    """
    m = _integer_rows(rows)
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, len(m)):
            a = m[i][c]
            row_i, row_r = m[i], m[r]
            # exact division by the previous pivot is the Bareiss invariant
            m[i] = [(p * row_i[j] - a * row_r[j]) // prev for j in range(ncols)]
        pivots.append(c)
        prev = p
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(bareiss_echelon(rows)[1])


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Fractions."""
    m = [[Fraction(v) for v in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [v / p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                a = m[i][c]
                m[i] = [vi - a * vr for vi, vr in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[tuple[int, ...]]:
    """Integer basis of ``{x : A x = 0}``."""
    if ncols is None:
        ncols = len(rows[0])
    red, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            x[pc] = -row[f]
        basis.append(primitive(x))
    return basis


def independent_rows(rows: Sequence[Sequence], order: Sequence[int] | None = None) -> list[int]:
    """Greedy maximal set of linearly independent rows, scanning in ``order``."""
    if order is None:
        order = range(len(rows))
    chosen: list[int] = []
    basis: list[list[Fraction]] = []  # reduced rows, each with a leading pivot
    leads: list[int] = []
    for i in order:
        v = [Fraction(x) for x in rows[i]]
        for b, lc in zip(basis, leads):
            if v[lc] != 0:
                a = v[lc] / b[lc]
                v = [vi - a * bi for vi, bi in zip(v, b)]
        lead = next((j for j, x in enumerate(v) if x != 0), None)
        if lead is None:
            continue
        # keep the basis reduced at the new pivot
        for k, (b, lc) in enumerate(zip(basis, leads)):
            if b[lead] != 0:
                a = b[lead] / v[lead]
                basis[k] = [bi - a * vi for bi, vi in zip(b, v)]
        basis.append(v)
        leads.append(lead)
        chosen.append(i)
    return chosen


def inverse(mat: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(mat)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(mat)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), 0)


# ---------------------------------------------------------------------------
# simplex

@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list[Fraction] | None = None
    value: Fraction | None = None
    duals: list[Fraction] | None = None
    farkas: list[Fraction] | None = None


def _pivot(tab: list[list[Fraction]], r: int, c: int) -> None:
    p = tab[r][c]
    if p != 1:
        tab[r] = [v / p for v in tab[r]]
    row = tab[r]
    for i in range(len(tab)):
        if i != r:
            a = tab[i][c]
            if a != 0:
                tab[i] = [vi - a * vr for vi, vr in zip(tab[i], row)]


def _simplex(tab, basis, cost, allowed) -> str:
    """Maximize ``cost . x`` on a tableau whose rows are already basic.

    Bland's rule: the lowest-index improving column enters, ties in the ratio
    test go to the lowest basic index.
    """
    m = len(tab)
    width = len(tab[0]) - 1
    while True:
        cb = [cost[b] for b in basis]
        enter = None
        for j in range(width):
            if not allowed[j] or j in basis:
                continue
            red = cost[j] - sum((cb[i] * tab[i][j] for i in range(m) if tab[i][j] != 0),
                                Fraction(0))
            if red > 0:
                enter = j
                break
        if enter is None:
            return "optimal"
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        _pivot(tab, best[1], enter)
        basis[best[1]] = enter


def linprog_eq(A: Sequence[Sequence], b: Sequence, c: Sequence) -> LPResult:
    """Solve ``max c.x  s.t.  A x = b, x >= 0`` exactly.

    On optimality ``duals`` holds ``y`` with ``A^T y >= c`` and ``b.y`` equal
    to the optimum.  On infeasibility ``farkas`` holds ``y`` with
    ``A^T y <= 0`` and ``b.y > 0``.
    """
    m = len(A)
    nv = len(c)
    signs = [1 if Fraction(bi) >= 0 else -1 for bi in b]
    # columns: structural 0..nv-1, artificial nv..nv+m-1, rhs
    tab = []
    for i in range(m):
        row = [Fraction(signs[i] * A[i][j]) for j in range(nv)]
        row += [Fraction(int(k == i)) for k in range(m)]
        row.append(Fraction(signs[i] * b[i]))
        tab.append(row)
    basis = [nv + i for i in range(m)]
    width = nv + m

    phase1 = [Fraction(0)] * nv + [Fraction(-1)] * m
    _simplex(tab, basis, phase1, [True] * width)
    infeas = sum((tab[i][-1] for i in range(m) if basis[i] >= nv), Fraction(0))
    if infeas > 0:
        # phase-one duals (cB B^-1, read off the artificial columns) satisfy
        # A^T y >= 0 and b.y = -infeas; the certificate is -y
        farkas = []
        for k in range(m):
            col = nv + k
            yk = sum((phase1[basis[i]] * tab[i][col] for i in range(m)), Fraction(0))
            farkas.append(-yk * signs[k])
        return LPResult("infeasible", farkas=farkas)

    # drive artificial variables out of the basis where possible
    for i in range(m):
        if basis[i] >= nv:
            j = next((j for j in range(nv) if tab[i][j] != 0 and j not in basis), None)
            if j is not None:
                _pivot(tab, i, j)
                basis[i] = j

    cost = [Fraction(v) for v in c] + [Fraction(0)] * m
    allowed = [True] * nv + [False] * m
    status = _simplex(tab, basis, cost, allowed)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * nv
    for i, bi in enumerate(basis):
        if bi < nv:
            x[bi] = tab[i][-1]
    value = dot(c, x)
    duals = []
    for k in range(m):
        col = nv + k
        yk = sum((cost[basis[i]] * tab[i][col] for i in range(m)), Fraction(0))
        duals.append(yk * signs[k])
    return LPResult("optimal", x=x, value=Fraction(value), duals=duals)
