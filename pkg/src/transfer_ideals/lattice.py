"""Exact integer and mod-p linear algebra on row lattices.

Rows are plain tuples of Python ints. The heavy lifting (Hermite and Smith
normal forms, ranks, nullspaces) is delegated to FLINT through
``python-flint``; the small Smith form with transforms used for quotient
groups is done here directly because FLINT does not expose the transforms.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import flint

Row = tuple[int, ...]


def _fmpz(rows: Sequence[Sequence[int]], ncols: int) -> flint.fmpz_mat:
    if not rows:
        return flint.fmpz_mat(0, ncols, [])
    return flint.fmpz_mat([list(r) for r in rows])


def _nmod(rows: Sequence[Sequence[int]], ncols: int, p: int) -> flint.nmod_mat:
    if not rows:
        return flint.nmod_mat(0, ncols, [], p)
    return flint.nmod_mat([list(r) for r in rows], p)


def _rows_of(m) -> list[Row]:
    return [tuple(int(x) for x in row) for row in m.tolist()]


def hermite_basis(rows: Sequence[Sequence[int]], ncols: int) -> tuple[Row, ...]:
    """Nonzero rows of the (unique) Hermite normal form of the row lattice."""
    if not rows:
        return ()
    h = _fmpz(rows, ncols).hnf()
    return tuple(r for r in _rows_of(h) if any(r))


def rref_basis(rows: Sequence[Sequence[int]], ncols: int, p: int) -> tuple[Row, ...]:
    """Reduced row echelon basis of the row space over F_p."""
    if not rows:
        return ()
    m, rank = _nmod(rows, ncols, p).rref()
    return tuple(r for r in _rows_of(m)[:rank])


def rank_q(rows: Sequence[Sequence[int]], ncols: int) -> int:
    if not rows:
        return 0
    return _fmpz(rows, ncols).rank()


def rank_fp(rows: Sequence[Sequence[int]], ncols: int, p: int) -> int:
    if not rows:
        return 0
    return _nmod(rows, ncols, p).rank()


def smith_diagonal(rows: Sequence[Sequence[int]], ncols: int) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form, in divisibility order."""
    basis = hermite_basis(rows, ncols)
    if not basis:
        return []
    d = _fmpz(basis, ncols).snf()
    out = []
    for i in range(min(d.nrows(), d.ncols())):
        v = abs(int(d[i, i]))
        if v:
            out.append(v)
    return out


def p_part(m: int, p: int) -> int:
    q = 1
    while m and m % p == 0:
        m //= p
        q *= p
    return q


def p_saturate(basis: Sequence[Row], ncols: int, p: int) -> tuple[Row, ...]:
    """Smallest lattice containing ``basis`` that is closed under division by p.

    Repeatedly finds integer combinations of the basis vanishing mod p and
    adjoins their quotient by p, until the basis stays independent mod p.
    """
    basis = hermite_basis(basis, ncols)
    while basis:
        r = len(basis)
        # left kernel mod p of the basis matrix = nullspace of its transpose
        t = _nmod(basis, ncols, p).transpose()
        null, nullity = t.nullspace()
        if nullity == 0:
            return basis
        new = []
        for c in range(nullity):
            coeffs = [int(null[i, c]) for i in range(r)]
            v = [0] * ncols
            for ci, row in zip(coeffs, basis):
                if ci:
                    for k, x in enumerate(row):
                        v[k] += ci * x
            assert all(x % p == 0 for x in v)
            new.append(tuple(x // p for x in v))
        basis = hermite_basis(list(basis) + new, ncols)
    return basis


def left_kernel(rows: Sequence[Sequence[int]], ncols: int) -> tuple[Row, ...]:
    """Hermite basis of {v in Z^r : v * M = 0} for the r x ncols matrix M."""
    r = len(rows)
    if r == 0:
        return ()
    aug = [list(row) + [1 if i == j else 0 for j in range(r)] for i, row in enumerate(rows)]
    h = _rows_of(_fmpz(aug, ncols + r).hnf())
    kern = [row[ncols:] for row in h if not any(row[:ncols]) and any(row[ncols:])]
    return hermite_basis(kern, r)


def contains_row(basis: Sequence[Row], v: Sequence[int], ncols: int) -> bool:
    """Membership of v in the integer row lattice spanned by a Hermite basis."""
    return hermite_basis(list(basis) + [tuple(v)], ncols) == tuple(basis)


def matmul_rows(a: Sequence[Row], b: Sequence[Row]) -> list[Row]:
    if not a:
        return []
    m = flint.fmpz_mat([list(r) for r in a]) * flint.fmpz_mat([list(r) for r in b])
    return _rows_of(m)


def smith_with_transform(rows: Sequence[Sequence[int]]) -> tuple[list[int], list[list[int]]]:
    """Smith form of a small square nonsingular integer matrix with column transform.

    Returns ``(diag, V)`` such that the row span of ``rows @ V`` equals the row
    span of ``diag(diag)``. Intended for lattices of rank at most a dozen.
    """
    a = [list(r) for r in rows]
    n = len(a)
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_op(i: int, j: int, c: int) -> None:  # col_j += c * col_i
        for row in a:
            row[j] += c * row[i]
        for row in v:
            row[j] += c * row[i]

    def swap_cols(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    for t in range(n):
        while True:
            nz = [(abs(a[i][j]), i, j) for i in range(t, n) for j in range(t, n) if a[i][j]]
            if not nz:
                raise ValueError("matrix is singular")
            _, pi, pj = min(nz)
            a[t], a[pi] = a[pi], a[t]
            swap_cols(t, pj)
            piv = a[t][t]
            dirty = False
            for i in range(t + 1, n):
                q = a[i][t] // piv
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                dirty |= a[i][t] != 0
            for j in range(t + 1, n):
                q = a[t][j] // piv
                if q:
                    col_op(t, j, -q)
                dirty |= a[t][j] != 0
            if dirty:
                continue
            bad = [(i, j) for i in range(t + 1, n) for j in range(t + 1, n) if a[i][j] % piv]
            if not bad:
                break
            i, _ = bad[0]
            a[t] = [x + y for x, y in zip(a[t], a[i])]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
    return [a[i][i] for i in range(n)], v


def dedupe(rows: Iterable[Row]) -> list[Row]:
    seen: dict[Row, None] = {}
    for r in rows:
        seen.setdefault(r, None)
    return list(seen)
