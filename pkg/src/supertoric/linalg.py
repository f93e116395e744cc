"""Exact linear algebra over Q and Z.

Everything here works on plain tuples/lists of ``Fraction`` or ``int``.
Matrices are lists of rows.  Nothing is clever; sizes are small.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vec = tuple[Fraction, ...]
IntVec = tuple[int, ...]


def to_frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def frac_vec(v: Iterable) -> Vec:
    return tuple(to_frac(x) for x in v)


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise ValueError(f"length mismatch {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v) if a and b), 0)


def is_zero(v: Sequence) -> bool:
    return all(x == 0 for x in v)


def rref(rows: Iterable[Sequence], ncols: int | None = None, order: Sequence[int] | None = None):
    """Reduced row echelon form.

    ``order`` is an optional column priority (pivots are searched in that
    order).  Returns ``(rows, pivots)`` with zero rows removed.
    """
    mat = [list(frac_vec(r)) for r in rows]
    if ncols is None:
        ncols = len(mat[0]) if mat else 0
    cols = list(order) if order is not None else list(range(ncols))
    pivots: list[int] = []
    r = 0
    for c in cols:
        if r == len(mat):
            break
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        row_r = mat[r]
        nz = [k for k, x in enumerate(row_r) if x]
        lead = row_r[c]
        if lead != 1:
            for k in nz:
                row_r[k] /= lead
        # rows are sparse in practice: only touch the pivot row's support
        for i in range(len(mat)):
            row = mat[i]
            if i != r and row[c] != 0:
                f = row[c]
                for k in nz:
                    row[k] -= f * row_r[k]
        pivots.append(c)
        r += 1
    return [tuple(row) for row in mat[:r]], pivots


def rank(rows: Iterable[Sequence], ncols: int | None = None) -> int:
    return len(rref(rows, ncols)[0])


def nullspace(rows: Iterable[Sequence], ncols: int) -> list[Vec]:
    """Basis of ``{x : A x = 0}`` (one basis vector per free column)."""
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence) -> Vec | None:
    """One solution of ``A x = b`` or ``None``."""
    if not rows:
        return None if any(to_frac(b) != 0 for b in rhs) else ()
    ncols = len(rows[0])
    aug = [list(frac_vec(r)) + [to_frac(b)] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return tuple(x)


def transpose(mat: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*mat)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = transpose(b)
    return [[dot(row, col) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in a)


def det(mat: Sequence[Sequence]) -> Fraction:
    m = [list(frac_vec(r)) for r in mat]
    n = len(m)
    out = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            out = -out
        out *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return out


def inverse(mat: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(mat)
    aug = [list(frac_vec(r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(mat)]
    red, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("singular matrix")
    return [list(row[n:]) for row in red]


# ---------------------------------------------------------------- integers


def primitive(v: Sequence) -> IntVec:
    """Smallest integer vector on the ray through ``v`` (``v`` rational)."""
    fv = frac_vec(v)
    den = 1
    for x in fv:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fv]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def smith_normal_form(a: Sequence[Sequence[int]], ncols: int | None = None):
    """Return ``(U, D, V)`` with ``U A V = D`` and U, V unimodular.

    D is diagonal with d_1 | d_2 | ... and non-negative entries.
    """
    m = len(a)
    n = ncols if ncols is not None else (len(a[0]) if a else 0)
    d = [[int(x) for x in row] for row in a]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]
    t = 0
    while t < min(m, n):
        # pick the smallest nonzero entry in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if d[i][j] != 0 and (best is None or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        _swap_rows(d, t, i)
        _swap_rows(u, t, i)
        _swap_cols(d, t, j)
        _swap_cols(v, t, j)
        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                q = d[i][t] // d[t][t]
                if q:
                    d[i] = [x - q * y for x, y in zip(d[i], d[t])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[t])]
                if d[i][t] != 0:
                    _swap_rows(d, t, i)
                    _swap_rows(u, t, i)
                    done = False
            for j in range(t + 1, n):
                q = d[t][j] // d[t][t]
                if q:
                    for row in d:
                        row[j] -= q * row[t]
                    for row in v:
                        row[j] -= q * row[t]
                if d[t][j] != 0:
                    _swap_cols(d, t, j)
                    _swap_cols(v, t, j)
                    done = False
            if done:
                # divisibility of the remaining block
                bad = next(
                    ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % d[t][t]),
                    None,
                )
                if bad is not None:
                    i, _ = bad
                    d[t] = [x + y for x, y in zip(d[t], d[i])]
                    u[t] = [x + y for x, y in zip(u[t], u[i])]
                    done = False
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, d, v


def integer_kernel(a: Sequence[Sequence[int]], ncols: int) -> list[IntVec]:
    """Saturated Z-basis of ``{x in Z^n : A x = 0}``."""
    if not a:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    _, d, v = smith_normal_form(a, ncols)
    r = sum(1 for i in range(min(len(d), ncols)) if d[i][i] != 0)
    return [tuple(v[i][j] for i in range(ncols)) for j in range(r, ncols)]


def kernel_and_complement(a: Sequence[Sequence[int]], ncols: int):
    """Split Z^n as (complement, kernel) bases adapted to ``x -> A x``."""
    if not a:
        basis = [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
        return [], basis
    _, d, v = smith_normal_form(a, ncols)
    r = sum(1 for i in range(min(len(d), ncols)) if d[i][i] != 0)
    cols = [tuple(v[i][j] for i in range(ncols)) for j in range(ncols)]
    return cols[:r], cols[r:]


def gcd_of_maximal_minors(rows: Sequence[Sequence[int]]) -> int:
    """gcd of the k x k minors of a k x n integer matrix of rank k, else 0."""
    k = len(rows)
    if k == 0:
        return 1
    n = len(rows[0])
    _, d, _ = smith_normal_form(rows, n)
    out = 1
    for i in range(k):
        if i >= n or d[i][i] == 0:
            return 0
        out *= d[i][i]
    return out


def solve_integer_unique(columns: Sequence[Sequence[int]], target: Sequence[int]) -> Vec | None:
    """Rational coefficients expressing ``target`` in independent ``columns``."""
    rows = transpose(columns)
    return solve(rows, target)


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[IntVec]:
    """Row-style HNF of the lattice spanned by ``rows`` (zero rows dropped).

    Pivots are positive, entries above a pivot are reduced into ``[0, pivot)``.
    Two generating sets of the same lattice give the same output.
    """
    mat = [[int(x) for x in r] for r in rows]
    if not mat:
        return []
    ncols = len(mat[0])
    out: list[list[int]] = []
    r = 0
    for c in range(ncols):
        # euclid on column c among rows r..
        while True:
            nz = [i for i in range(r, len(mat)) if mat[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(mat[i][c]))
            mat[r], mat[piv] = mat[piv], mat[r]
            done = True
            for i in range(r + 1, len(mat)):
                if mat[i][c]:
                    q = mat[i][c] // mat[r][c]
                    mat[i] = [a - q * b for a, b in zip(mat[i], mat[r])]
                    if mat[i][c]:
                        done = False
            if done:
                break
        if r < len(mat) and mat[r][c] != 0:
            if mat[r][c] < 0:
                mat[r] = [-a for a in mat[r]]
            for i in range(r):
                q = mat[i][c] // mat[r][c]
                if q:
                    mat[i] = [a - q * b for a, b in zip(mat[i], mat[r])]
            r += 1
            if r == len(mat):
                break
    out = [tuple(row) for row in mat[:r] if any(row)]
    return out
