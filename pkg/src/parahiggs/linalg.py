"""Dense exact linear algebra over an arbitrary field adapter.

Matrices are lists of row lists of field elements. Everything is plain
Gaussian elimination -- sizes here are tiny and exactness is the point.
Subspaces are handled as column-span matrices with reduced-echelon helpers.
"""

from __future__ import annotations

from .poly import UniPoly
from .qi import QQI


def mat_zeros(n, m, field=QQI):
    return [[field.zero for _ in range(m)] for _ in range(n)]


def mat_identity(n, field=QQI):
    out = mat_zeros(n, n, field)
    for k in range(n):
        out[k][k] = field.one
    return out


def mat_copy(a):
    return [list(row) for row in a]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]

def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, c):
    return [[x * c for x in row] for row in a]


def mat_mul(a, b):
    n, k = len(a), len(b)
    m = len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for t in range(k):
                term = a[i][t] * b[t][j]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out


def mat_vec(a, v):
    return [r[0] for r in mat_mul(a, [[x] for x in v])]


def mat_transpose(a):
    return [list(col) for col in zip(*a)]


def mat_map(a, fn):
    return [[fn(x) for x in row] for row in a]


def mat_eq(a, b):
    if len(a) != len(b) or (a and len(a[0]) != len(b[0])):
        return False
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def _find_pivot(rows, col, start):
    for r in range(start, len(rows)):
        if not rows[r][col].is_zero():
            return r
    return None


def row_echelon(a, field=QQI, reduced=True):
    """Return (echelon matrix, pivot column list, rank). Not in place."""
    m = mat_copy(a)
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        pr = _find_pivot(m, c, r)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = field.one / m[r][c]
        m[r] = [x * inv for x in m[r]]
        rng = range(rows) if reduced else range(r + 1, rows)
        for i in rng:
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots, r


def mat_rank(a, field=QQI) -> int:
    if not a or not a[0]:
        return 0
    return row_echelon(a, field)[2]


def mat_det(a, field=QQI):
    n = len(a)
    if n == 0:
        return field.one
    m = mat_copy(a)
    det = field.one
    for c in range(n):
        pr = _find_pivot(m, c, c)
        if pr is None:
            return field.zero
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            det = -det
        det = det * m[c][c]
        inv = field.one / m[c][c]
        for i in range(c + 1, n):
            if m[i][c].is_zero():
                continue
            f = m[i][c] * inv
            m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return det


def mat_inverse(a, field=QQI):
    n = len(a)
    m = [list(row) + list(idrow) for row, idrow in zip(mat_copy(a), mat_identity(n, field))]
    ech, pivots, rank = row_echelon(m, field)
    if rank < n or pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in ech]


def mat_solve(a, rhs, field=QQI):
    """One solution x of a x = rhs, or None if inconsistent (a need not be square)."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    aug = [list(a[i]) + [rhs[i]] for i in range(rows)]
    ech, pivots, rank = row_echelon(aug, field)
    for i in range(rank, rows):
        if not ech[i][cols].is_zero():
            return None
    pivots = [p for p in pivots if p < cols]
    if len(pivots) < rank:
        return None  # a pivot landed in the rhs column -> inconsistent
    x = [field.zero] * cols
    for i, p in enumerate(pivots):
        x[p] = ech[i][cols]
    return x


def kernel_basis(a, field=QQI):
    """Basis (list of vectors) of the right kernel of a."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if cols == 0:
        return []
    if rows == 0:
        return [[field.one if j == k else field.zero for j in range(cols)] for k in range(cols)]
    ech, pivots, rank = row_echelon(a, field)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [field.zero] * cols
        v[fc] = field.one
        for i, p in enumerate(pivots):
            v[p] = -ech[i][fc]
        basis.append(v)
    return basis


def charpoly(a, var, field=QQI) -> UniPoly:
    """Characteristic polynomial det(x*I - a) by Faddeev-LeVerrier."""
    n = len(a)
    coeffs = [field.zero] * (n + 1)
    coeffs[n] = field.one
    m = mat_zeros(n, n, field)
    c_prev = field.one
    for k in range(1, n + 1):
        shifted = mat_copy(m)
        for j in range(n):
            shifted[j][j] = shifted[j][j] + c_prev
        m = mat_mul(a, shifted)
        tr = field.zero
        for j in range(n):
            tr = tr + m[j][j]
        ck = -tr / _int_field(field, k)
        coeffs[n - k] = ck
        c_prev = ck
    return UniPoly(var, coeffs, field)


def _int_field(field, k):
    out = field.zero
    for _ in range(k):
        out = out + field.one
    return out


# -- subspaces (column-span form) ---------------------------------------------


def colspace_reduce(vectors, field=QQI):
    """Reduced basis of span(vectors); vectors are coordinate lists."""
    if not vectors:
        return []
    ech, pivots, rank = row_echelon([list(v) for v in vectors], field)
    return [ech[i] for i in range(rank)]


def in_span(vectors, v, field=QQI) -> bool:
    if not vectors:
        return all(x.is_zero() for x in v)
    a = mat_transpose([list(u) for u in vectors])
    return mat_solve(a, list(v), field) is not None


def span_dim(vectors, field=QQI) -> int:
    return len(colspace_reduce(vectors, field))


def span_contains(big, small, field=QQI) -> bool:
    return all(in_span(big, v, field) for v in small)


def span_equal(a, b, field=QQI) -> bool:
    return span_contains(a, b, field) and span_contains(b, a, field)


def intersect_spans(a, b, field=QQI):
    """Basis of span(a) & span(b) via the kernel of [A | -B]."""
    if not a or not b:
        return []
    n = len(a[0])
    cols = [list(v) for v in a] + [[-x for x in v] for v in b]
    m = mat_transpose(cols)
    basis = []
    for k in kernel_basis(m, field):
        coefs = k[: len(a)]
        vec = [field.zero] * n
        for c, v in zip(coefs, a):
            vec = [x + c * y for x, y in zip(vec, v)]
        basis.append(vec)
    return colspace_reduce(basis, field)


def extend_basis(inner, outer, field=QQI):
    """Vectors from `outer` extending a basis of span(inner) to span(inner+outer)."""
    cur = [list(v) for v in inner]
    picked = []
    for v in outer:
        if not in_span(cur, v, field):
            cur.append(list(v))
            picked.append(list(v))
    return picked
