"""Exact Gaussian elimination over any ``Field``."""
from __future__ import annotations

from typing import Sequence

from .fields import Field


def rref(rows: Sequence[Sequence], F: Field) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    row = 0
    for col in range(ncols):
        piv = next((i for i in range(row, len(m)) if not F.is_zero(m[i][col])), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = F.inv(m[row][col])
        m[row] = [F.mul(v, inv) for v in m[row]]
        for i in range(len(m)):
            if i != row and not F.is_zero(m[i][col]):
                f = m[i][col]
                m[i] = [F.sub(a, F.mul(f, b)) for a, b in zip(m[i], m[row])]
        pivots.append(col)
        row += 1
        if row == len(m):
            break
    return m[:row], pivots


def rank(rows: Sequence[Sequence], F: Field) -> int:
    return len(rref(rows, F)[1])


def kernel(rows: Sequence[Sequence], ncols: int, F: Field) -> list[list]:
    """Basis of {v : rows . v = 0}."""
    if not rows:
        return [[F.one if i == j else F.zero for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows, F)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [F.zero] * ncols
        v[fcol] = F.one
        for r, pc in zip(red, pivots):
            v[pc] = F.neg(r[fcol])
        basis.append(v)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence, F: Field):
    """One solution of rows . v = rhs, or None when inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, F)
    if ncols in pivots:
        return None
    v = [F.zero] * ncols
    for r, pc in zip(red, pivots):
        v[pc] = r[ncols]
    return v


def inverse(mat: Sequence[Sequence], F: Field) -> list[list]:
    n = len(mat)
    aug = [list(r) + [F.one if i == j else F.zero for j in range(n)] for i, r in enumerate(mat)]
    red, pivots = rref(aug, F)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [r[n:] for r in red]
