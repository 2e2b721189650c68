"""Smith normal forms: local (over a discrete valuation ring of Q(i)(var)) and
global (over the PID K[var] for an exact coefficient field K).

The local form diagonalizes with entries uniformizer^v * unit using only
transformations invertible at the place; for a DVR the invariant data is just
the sorted valuation list. The PID form is the classical invariant-factor
decomposition with unimodular transforms (and their inverses) tracked.
"""

from __future__ import annotations

from .errors import SingularMatrix
from .linalg import mat_copy, mat_identity
from .points import PointOnLine
from .poly import UniPoly, poly_gcd
from .qi import QQI, GaussianRational
from .ratfunc import RatFuncField, RationalFunction


class Place:
    """A discrete valuation of Q(i)(var): finite point, infinity, or a prime."""

    def __init__(self, var, kind, data=None, base=QQI):
        self.var = var
        self.kind = kind  # "finite" | "infinity" | "prime"
        self.data = data
        self.base = base

    @classmethod
    def at_point(cls, var, c: PointOnLine | GaussianRational, base=QQI):
        if isinstance(c, PointOnLine):
            if c.is_infinite:
                return cls(var, "infinity", base=base)
            c = c.finite
        return cls(var, "finite", c, base=base)

    @classmethod
    def at_prime(cls, q: UniPoly):
        if q.degree < 1:
            raise ValueError("prime place needs a nonconstant polynomial")
        return cls(q.var, "prime", q.monic(), base=q.field)

    def val(self, f: RationalFunction):
        """Valuation of f, None for the zero function."""
        if f.is_zero():
            return None
        if self.kind == "finite":
            return f.valuation(self.data)
        if self.kind == "infinity":
            return f.valuation_infinity()
        return f.valuation_prime(self.data)

    def uniformizer(self) -> RationalFunction:
        one = self.base.one
        if self.kind == "finite":
            return RationalFunction(UniPoly(self.var, [-self.data, one], self.base))
        if self.kind == "prime":
            return RationalFunction(self.data)
        # at infinity: 1/var
        return RationalFunction(
            UniPoly.const(self.var, one, self.base), UniPoly.gen(self.var, self.base)
        )

    def residue(self, f: RationalFunction):
        """Value of a val>=0 function at the place (finite/infinity only)."""
        if self.kind == "finite":
            return f.eval(self.data)
        if self.kind == "infinity":
            return f.at_infinity().eval(self.base.zero)
        raise ValueError("no residue map implemented at a higher-degree prime")

    def __repr__(self):
        return f"Place({self.var}, {self.kind}, {self.data})"


class SmithResult:
    """U * M * V = diag; U, V invertible over the relevant ring; inverses kept."""

    __slots__ = ("diag", "vals", "U", "V", "U_inv", "V_inv")

    def __init__(self, diag, vals, U, V, U_inv, V_inv):
        self.diag = diag
        self.vals = vals
        self.U = U
        self.V = V
        self.U_inv = U_inv
        self.V_inv = V_inv


def _as_rf_matrix(m, field: RatFuncField):
    return [[field.coerce(x) for x in row] for row in m]


def smith_local(m, place: Place, check_square_regular=True):
    """Local Smith normal form of a matrix over the DVR at `place`.

    Returns a SmithResult whose `vals` are the sorted valuations of the
    nonzero diagonal entries (None entries mark zero rows/columns). For the
    spec-facing square case, det == 0 raises SingularMatrix.
    """
    field = RatFuncField(place.var, place.base)
    a = _as_rf_matrix(m, field)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    U = mat_identity(rows, field)
    U_inv = mat_identity(rows, field)
    V = mat_identity(cols, field)
    V_inv = mat_identity(cols, field)
    k = 0
    vals = []
    while k < min(rows, cols):
        best = None
        for i in range(k, rows):
            for j in range(k, cols):
                v = place.val(a[i][j])
                if v is None:
                    continue
                if best is None or v < best[0]:
                    best = (v, i, j)
        if best is None:
            break
        v, pi, pj = best
        if pi != k:
            a[k], a[pi] = a[pi], a[k]
            U[k], U[pi] = U[pi], U[k]
            for r in range(rows):
                U_inv[r][k], U_inv[r][pi] = U_inv[r][pi], U_inv[r][k]
        if pj != k:
            for r in range(rows):
                a[r][k], a[r][pj] = a[r][pj], a[r][k]
            for r in range(cols):
                V[r][k], V[r][pj] = V[r][pj], V[r][k]
            V_inv[k], V_inv[pj] = V_inv[pj], V_inv[k]
        pivot = a[k][k]
        for i in range(k + 1, rows):
            if a[i][k].is_zero():
                continue
            f = a[i][k] / pivot
            a[i] = [x - f * y for x, y in zip(a[i], a[k])]
            U[i] = [x - f * y for x, y in zip(U[i], U[k])]
            for r in range(rows):
                U_inv[r][k] = U_inv[r][k] + f * U_inv[r][i]
        for j in range(k + 1, cols):
            if a[k][j].is_zero():
                continue
            g = a[k][j] / pivot
            for r in range(rows):
                a[r][j] = a[r][j] - g * a[r][k]
            for r in range(cols):
                V[r][j] = V[r][j] - g * V[r][k]
            V_inv[k] = [x + g * y for x, y in zip(V_inv[k], V_inv[j])]
        vals.append(v)
        k += 1
    diag = [a[t][t] if t < k else field.zero for t in range(min(rows, cols))]
    all_vals = vals + [None] * (min(rows, cols) - k)
    if check_square_regular and rows == cols and k < rows:
        raise SingularMatrix(
            "matrix is singular over the local ring",
            {"place": repr(place), "rank": k, "size": rows},
        )
    return SmithResult(diag, all_vals, U, V, U_inv, V_inv)


def smith_local_valuations(m, c, var=None):
    """Spec-facing helper: sorted valuation list of a square matrix at a point."""
    if var is None:
        var = _matrix_var(m)
    place = Place.at_point(var, c)
    res = smith_local(m, place)
    return sorted(res.vals), (res.U, res.V)


def _matrix_var(m):
    for row in m:
        for x in row:
            if isinstance(x, RationalFunction):
                return x.var
            if isinstance(x, UniPoly):
                return x.var
    raise ValueError("cannot infer the variable of an empty matrix")


# -- Smith over the PID K[var] -------------------------------------------------


class _PolyMat:
    """Workspace for the PID Smith form with configurable transform tracking."""

    def __init__(self, m, var, field, track):
        self.var = var
        self.field = field
        self.track = track
        self.a = [[self._coerce(x) for x in row] for row in m]
        self.rows = len(self.a)
        self.cols = len(self.a[0]) if self.rows else 0
        self.U = _poly_identity(self.rows, var, field) if "U" in track else None
        self.U_inv = _poly_identity(self.rows, var, field) if "U_inv" in track else None
        self.V = _poly_identity(self.cols, var, field) if "V" in track else None
        self.V_inv = _poly_identity(self.cols, var, field) if "V_inv" in track else None

    def _coerce(self, x):
        if isinstance(x, UniPoly):
            if x.var != self.var:
                raise ValueError("variable mismatch in smith_pid")
            return x
        if isinstance(x, RationalFunction):
            return x.as_poly()
        return UniPoly.const(self.var, self.field.coerce(x), self.field)

    def swap_rows(self, i, j):
        if i == j:
            return
        self.a[i], self.a[j] = self.a[j], self.a[i]
        if self.U is not None:
            self.U[i], self.U[j] = self.U[j], self.U[i]
        if self.U_inv is not None:
            for r in range(self.rows):
                self.U_inv[r][i], self.U_inv[r][j] = self.U_inv[r][j], self.U_inv[r][i]

    def swap_cols(self, i, j):
        if i == j:
            return
        for r in range(self.rows):
            self.a[r][i], self.a[r][j] = self.a[r][j], self.a[r][i]
        if self.V is not None:
            for r in range(self.cols):
                self.V[r][i], self.V[r][j] = self.V[r][j], self.V[r][i]
        if self.V_inv is not None:
            self.V_inv[i], self.V_inv[j] = self.V_inv[j], self.V_inv[i]

    def addmul_row(self, dst, src, q):
        """row_dst -= q * row_src"""
        self.a[dst] = [x - q * y for x, y in zip(self.a[dst], self.a[src])]
        if self.U is not None:
            self.U[dst] = [x - q * y for x, y in zip(self.U[dst], self.U[src])]
        if self.U_inv is not None:
            for r in range(self.rows):
                self.U_inv[r][src] = self.U_inv[r][src] + q * self.U_inv[r][dst]

    def addmul_col(self, dst, src, q):
        for r in range(self.rows):
            self.a[r][dst] = self.a[r][dst] - q * self.a[r][src]
        if self.V is not None:
            for r in range(self.cols):
                self.V[r][dst] = self.V[r][dst] - q * self.V[r][src]
        if self.V_inv is not None:
            self.V_inv[src] = [x + q * y for x, y in zip(self.V_inv[src], self.V_inv[dst])]

    def scale_row(self, i, c):
        self.a[i] = [x.scale(c) for x in self.a[i]]
        if self.U is not None:
            self.U[i] = [x.scale(c) for x in self.U[i]]
        if self.U_inv is not None:
            inv = self.field.one / c
            for r in range(self.rows):
                self.U_inv[r][i] = self.U_inv[r][i].scale(inv)


def _poly_identity(n, var, field):
    one = UniPoly.const(var, field.one, field)
    zero = UniPoly.zero(var, field)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def smith_pid(m, var, field=QQI, track=("U", "U_inv", "V", "V_inv")) -> SmithResult:
    """Smith normal form over K[var]: U M V = diag(d_1 | d_2 | ...), d_k monic.

    `track` selects which transform matrices are maintained; untracked ones
    come back as None (cheaper for large inputs)."""
    ws = _PolyMat(m, var, field, track)
    n = min(ws.rows, ws.cols)
    k = 0
    while k < n:
        pos = _min_degree_entry(ws, k)
        if pos is None:
            break
        ws.swap_rows(k, pos[0])
        ws.swap_cols(k, pos[1])
        while True:
            dirty = False
            for i in range(k + 1, ws.rows):
                if ws.a[i][k].is_zero():
                    continue
                q, r = ws.a[i][k].divmod(ws.a[k][k])
                ws.addmul_row(i, k, q)
                if not r.is_zero():
                    ws.swap_rows(k, i)
                    dirty = True
            for j in range(k + 1, ws.cols):
                if ws.a[k][j].is_zero():
                    continue
                q, r = ws.a[k][j].divmod(ws.a[k][k])
                ws.addmul_col(j, k, q)
                if not r.is_zero():
                    ws.swap_cols(k, j)
                    dirty = True
            if not dirty:
                break
        # pivot must divide the rest of the submatrix
        offender = _indivisible_entry(ws, k)
        if offender is not None:
            ws.addmul_row(k, offender, -UniPoly.const(var, field.one, field))
            continue
        lead = ws.a[k][k].leading()
        if not (lead == field.one):
            ws.scale_row(k, field.one / lead)
        k += 1
    diag = [ws.a[t][t] if t < k else UniPoly.zero(var, field) for t in range(n)]
    vals = [d.degree if not d.is_zero() else None for d in diag]
    return SmithResult(diag, vals, ws.U, ws.V, ws.U_inv, ws.V_inv)


def _min_degree_entry(ws, k):
    best = None
    for i in range(k, ws.rows):
        for j in range(k, ws.cols):
            e = ws.a[i][j]
            if e.is_zero():
                continue
            if best is None or e.degree < best[0]:
                best = (e.degree, i, j)
                if e.degree == 0:
                    return (i, j)
    return None if best is None else (best[1], best[2])


def _indivisible_entry(ws, k):
    pivot = ws.a[k][k]
    for i in range(k + 1, ws.rows):
        for j in range(k + 1, ws.cols):
            if ws.a[i][j].is_zero():
                continue
            if not (ws.a[i][j] % pivot).is_zero():
                return i
    return None


def module_span_basis(generators, var, field=QQI):
    """Basis of the K[var]-span of vectors with UniPoly entries.

    Returns a list of basis vectors (UniPoly entries). The span is a free
    module (submodule of a free module over a PID).
    """
    if not generators:
        return []
    mat = [list(col) for col in zip(*generators)]  # n x m, columns = generators
    res = smith_pid(mat, var, field, track=("U_inv",))
    basis = []
    n = len(mat)
    for t, d in enumerate(res.diag):
        if d.is_zero():
            continue
        col = [res.U_inv[r][t] * d for r in range(n)]
        basis.append(col)
    return basis
