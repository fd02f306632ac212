"""Small dense matrices over GF(2^T): product, rank and determinant."""

from __future__ import annotations

from typing import List, Sequence

from .errors import ShapeMismatch
from .gf import FieldContext

Matrix = List[List[int]]


def shape(a: Sequence[Sequence[int]]) -> tuple:
    return (len(a), len(a[0]) if a else 0)


def matmul(ctx: FieldContext, a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    n, k = shape(a)
    k2, m = shape(b)
    if k != k2:
        raise ShapeMismatch(f"cannot multiply {n}x{k} by {k2}x{m}")
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            acc = 0
            for t in range(k):
                acc ^= ctx.mul(a[i][t], b[t][j])
            out[i][j] = acc
    return out


def _eliminate(ctx: FieldContext, a: Sequence[Sequence[int]]):
    """Row-reduce a copy of ``a``; returns (rank, determinant if square)."""
    work = [list(r) for r in a]
    n, m = shape(work)
    det = 1
    rank = 0
    for col in range(m):
        pivot = next((r for r in range(rank, n) if work[r][col]), None)
        if pivot is None:
            det = 0
            continue
        if pivot != rank:
            work[rank], work[pivot] = work[pivot], work[rank]
        pv = work[rank][col]
        det = ctx.mul(det, pv)
        inv = ctx.inv(pv)
        for r in range(rank + 1, n):
            if work[r][col]:
                factor = ctx.mul(work[r][col], inv)
                work[r] = [x ^ ctx.mul(factor, y) for x, y in zip(work[r], work[rank])]
        rank += 1
        if rank == n:
            break
    return rank, det


def rank(ctx: FieldContext, a: Sequence[Sequence[int]]) -> int:
    if not a:
        return 0
    return _eliminate(ctx, a)[0]


def det(ctx: FieldContext, a: Sequence[Sequence[int]]) -> int:
    """Determinant by Gaussian elimination (row swaps are free in char 2)."""
    n, m = shape(a)
    if n != m:
        raise ShapeMismatch(f"determinant of non-square {n}x{m} matrix")
    if n == 0:
        return 1
    r, d = _eliminate(ctx, a)
    return d if r == n else 0
