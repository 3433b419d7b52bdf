"""Dense exact linear algebra over any field type.

Matrices are lists of row lists.  Entries only need +, -, *, /, unary
minus and truth testing (nonzero), so the same routines serve both
fractions.Fraction (crystal-limit data) and qrat.ScalarQ (generic q).
Callers pass the field's zero explicitly; nothing here ever rounds.
"""

from __future__ import annotations


class InconsistentSystem(Exception):
    """Raised when an exact linear solve has no solution."""


def rref(rows, zero):
    """Reduced row echelon form.  Returns (rows, pivot column indices)."""
    rows = [list(r) for r in rows]
    m = len(rows)
    n = len(rows[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        pr = None
        for i in range(r, m):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return rows, pivots


def column_rank_profile(rows, zero):
    """Indices of the leading independent columns."""
    return rref(rows, zero)[1]


def rank(rows, zero):
    return len(rref(rows, zero)[1])


def solve(a_rows, b, zero):
    """Any exact solution x of A x = b, free variables set to zero."""
    m = len(a_rows)
    n = len(a_rows[0]) if m else 0
    aug = [list(r) + [b[i]] for i, r in enumerate(a_rows)]
    red, pivots = rref(aug, zero)
    if n in pivots:
        raise InconsistentSystem("no solution")
    x = [zero] * n
    for r, c in enumerate(pivots):
        x[c] = red[r][n]
    return x


def nullspace(a_rows, zero, one):
    """Basis of the kernel of A as a list of coordinate vectors."""
    m = len(a_rows)
    n = len(a_rows[0]) if m else 0
    if m == 0:
        return [[one if j == i else zero for j in range(n)] for i in range(n)]
    red, pivots = rref(a_rows, zero)
    basis = []
    pivot_set = set(pivots)
    for free in range(n):
        if free in pivot_set:
            continue
        v = [zero] * n
        v[free] = one
        for r, c in enumerate(pivots):
            v[c] = -red[r][free]
        basis.append(v)
    return basis


def express(vectors, target, zero):
    """Coefficients writing target as a combination of the given vectors.

    Returns None when target is outside their span.
    """
    if not vectors:
        return None if any(target) else []
    n = len(target)
    a_rows = [[vectors[j][i] for j in range(len(vectors))] for i in range(n)]
    try:
        return solve(a_rows, list(target), zero)
    except InconsistentSystem:
        return None


def matvec(rows, x, zero):
    out = []
    for r in rows:
        acc = zero
        for a, b in zip(r, x):
            if a and b:
                acc = acc + a * b
        out.append(acc)
    return out


def matmul(a_rows, b_rows, zero):
    if not a_rows or not b_rows:
        return []
    n = len(b_rows[0])
    out = []
    for r in a_rows:
        row = [zero] * n
        for k, c in enumerate(r):
            if not c:
                continue
            bk = b_rows[k]
            for j in range(n):
                if bk[j]:
                    row[j] = row[j] + c * bk[j]
        out.append(row)
    return out


def invert(square, zero, one):
    """Inverse of an exact square matrix; raises when singular."""
    n = len(square)
    aug = [list(r) + [(one if i == j else zero) for j in range(n)] for i, r in enumerate(square)]
    red, pivots = rref(aug, zero)
    if list(pivots) != list(range(n)):
        raise InconsistentSystem("matrix is singular")
    return [row[n:] for row in red]


def transpose(rows):
    if not rows:
        return []
    return [list(col) for col in zip(*rows)]


def identity(n, zero, one):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]
