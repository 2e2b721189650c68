"""Finite two-chart model of the hypercohomology sheaf of theta_zeta: F -> G'.

Cover the line by U0 = {z finite} and U1 = {z != c0} for a non-puncture
center c0. Each lattice sheaf S restricts to a free module on both charts with
explicit polynomial frames T0(z) and T1(u), u = 1/(z - c0). Working in
T0-frame coordinates, overlap sections are Laurent vectors in t = z - c0:

  * U0 sections  = polynomial coordinate vectors (degrees >= 0),
  * U1 sections  = X * (polynomials in 1/t), X = T0^{-1} T1(1/t) * t^shift,
    a Laurent transition matrix (shift = n accounts for the K(D) generators
    dz/prod(z-z_i) on U0 versus dz (z-c0)^n/prod(z-z_i) on U1).

H^0 and H^1 are finite exact linear algebra inside a bounded degree window
(checked against Riemann-Roch), the twisted Higgs map is the polynomial
matrix pair from theta_matrix, and the stalk lattice of the transformed sheaf
at any place of the zeta-line comes from Smith normal forms over the
valuation ring through

    0 -> coker(H0 F -> H0 G') -> (transformed sheaf) -> ker(H1 F -> H1 G') -> 0.

Kernel elements are lifted through an explicit Cech split, so every lattice
element is returned as a polynomial representative over the affine frame of
G', ready for the generic-fiber coordinate map.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bundle import ParabolicHiggsBundle
from .errors import EngineError
from .lattice import SheafLattice, TwistedMapMatrix, finite_frame_product, theta_matrix
from .linalg import (
    kernel_basis,
    mat_det,
    mat_inverse,
    mat_mul,
    mat_solve,
    mat_transpose,
    row_echelon,
)
from .poly import UniPoly, VAR_Z, poly_lcm
from .qi import QQI, GaussianRational, qi
from .ratfunc import FIELD_RF_Z, RatFuncField, RationalFunction
from .smith import Place, smith_local

_RF_Z = FIELD_RF_Z
_RF_U = RatFuncField("u")
_RF_T = RatFuncField("t")

_CENTER_CANDIDATES = [0, 3, -3, 5, -5, 7, 2, -2, 11, 13]


def pick_chart_center(bundle: ParabolicHiggsBundle) -> GaussianRational:
    finite = bundle.finite_locations()
    for cand in _CENTER_CANDIDATES:
        c = qi(cand)
        if all(c != z for z in finite):
            return c
    raise EngineError("no chart center available", {})


# ---------------------------------------------------------------------------
# Laurent vectors and windows
# ---------------------------------------------------------------------------


class LaurentVec:
    """Sparse vector of Laurent polynomials in t: {degree: coefficient list}."""

    __slots__ = ("rank", "terms")

    def __init__(self, rank, terms=None):
        self.rank = rank
        self.terms = {}
        for k, vec in (terms or {}).items():
            if any(not x.is_zero() for x in vec):
                self.terms[k] = list(vec)

    @classmethod
    def unit(cls, rank, degree, component):
        vec = [QQI.zero] * rank
        vec[component] = QQI.one
        return cls(rank, {degree: vec})

    def shift(self, d):
        return LaurentVec(self.rank, {k + d: v for k, v in self.terms.items()})

    def add(self, other):
        out = {k: list(v) for k, v in self.terms.items()}
        for k, v in other.terms.items():
            if k in out:
                out[k] = [a + b for a, b in zip(out[k], v)]
            else:
                out[k] = list(v)
        return LaurentVec(self.rank, out)

    def scale(self, c):
        return LaurentVec(self.rank, {k: [x * c for x in v] for k, v in self.terms.items()})

    def support(self):
        if not self.terms:
            return (0, -1)
        ks = sorted(self.terms)
        return (ks[0], ks[-1])

    def apply_poly_matrix(self, m):
        out_terms = {}
        for k, vec in self.terms.items():
            for j, x in enumerate(vec):
                if x.is_zero():
                    continue
                for i in range(len(m)):
                    p = m[i][j]
                    if p.is_zero():
                        continue
                    for d, c in enumerate(p.coeffs):
                        if c.is_zero():
                            continue
                        key = k + d
                        cur = out_terms.get(key)
                        if cur is None:
                            cur = [QQI.zero] * self.rank
                            out_terms[key] = cur
                        cur[i] = cur[i] + c * x
        return LaurentVec(self.rank, out_terms)

    def to_zpoly_list(self, center):
        """Interpret nonnegative part as polynomial coordinates, shift t -> z."""
        top = max(self.terms, default=-1)
        if any(k < 0 for k in self.terms):
            raise EngineError("negative degrees in a chart-0 section", {})
        out = []
        for j in range(self.rank):
            coeffs = [self.terms.get(k, [QQI.zero] * self.rank)[j] for k in range(top + 1)]
            tpoly = UniPoly("t", coeffs)
            out.append(tpoly.taylor_shift(-center).map_coeffs(lambda x: x, var=VAR_Z))
        return out


@dataclass
class Window:
    lo: int
    hi: int
    rank: int

    @property
    def size(self):
        return (self.hi - self.lo + 1) * self.rank

    def coords(self, vec: LaurentVec):
        out = [QQI.zero] * self.size
        for k, v in vec.terms.items():
            if k < self.lo or k > self.hi:
                raise EngineError(
                    "Laurent vector escapes the window",
                    {"degree": k, "window": (self.lo, self.hi)},
                )
            base = (k - self.lo) * self.rank
            for j, x in enumerate(v):
                out[base + j] = x
        return out


class SpanReducer:
    """Echelonized span with quotient coordinates and combination tracking.

    Rows are augmented with the identity so that reducing a vector also hands
    back the generator combination expressing its span part (one pass per
    solve instead of a fresh elimination).
    """

    def __init__(self, gen_coords, size):
        self.size = size
        self.n_gens = len(gen_coords)
        rows = [
            list(v) + [QQI.one if t == k else QQI.zero for t in range(self.n_gens)]
            for k, v in enumerate(gen_coords)
        ]
        self.rows = []
        self.pivots = []
        r = 0
        for c in range(size):
            pr = None
            for i in range(r, len(rows)):
                if not rows[i][c].is_zero():
                    pr = i
                    break
            if pr is None:
                continue
            rows[r], rows[pr] = rows[pr], rows[r]
            inv = QQI.one / rows[r][c]
            rows[r] = [x * inv for x in rows[r]]
            for i in range(len(rows)):
                if i != r and not rows[i][c].is_zero():
                    f = rows[i][c]
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
            self.rows.append(rows[r])
            self.pivots.append(c)
            r += 1
            if r == len(rows):
                break
        pivot_set = set(self.pivots)
        self.free = [j for j in range(size) if j not in pivot_set]

    @property
    def rank(self):
        return len(self.rows)

    def _reduce_full(self, coords):
        x = list(coords) + [QQI.zero] * self.n_gens
        for row, p in zip(self.rows, self.pivots):
            c = x[p]
            if c.is_zero():
                continue
            x = [a - c * b for a, b in zip(x, row)]
        return x

    def reduce(self, coords):
        return self._reduce_full(coords)[: self.size]

    def quotient_coords(self, coords):
        x = self._reduce_full(coords)
        return [x[j] for j in self.free]

    def solve(self, coords):
        """Generator combination with span part == coords, or None."""
        x = self._reduce_full(coords)
        if any(not v.is_zero() for v in x[: self.size]):
            return None
        return [QQI.zero - v for v in x[self.size :]]


# ---------------------------------------------------------------------------
# chart frames and transitions
# ---------------------------------------------------------------------------


def u_chart_frame(bundle: ParabolicHiggsBundle, lat: SheafLattice, center):
    """Frame of the lattice over U1 = P1 minus the center, polynomial in u."""
    rank = bundle.rank
    one = UniPoly.const("u", QQI.one)
    total = [[one if i == j else UniPoly.zero("u") for j in range(rank)] for i in range(rank)]
    for i in range(1, len(bundle.punctures)):
        z_i = bundle.punctures[i].location.finite
        u_i = QQI.one / (z_i - center)
        frame = bundle.data[i].frame
        frame_inv = mat_inverse(frame)
        lin = UniPoly("u", [-u_i, QQI.one])
        diag = [
            [lin ** lat.twist(i, s) if s == t else UniPoly.zero("u") for t in range(rank)]
            for s in range(rank)
        ]
        factor = mat_mul(mat_mul(_const_poly(frame, "u"), diag), _const_poly(frame_inv, "u"))
        total = mat_mul(total, factor)
    frame_rf = bundle.frame_rf(0)
    z_of_u = RationalFunction(UniPoly("u", [center, QQI.one]), UniPoly.gen("u"))
    frame_u = [[f.substitute(z_of_u) for f in row] for row in frame_rf]
    gen_u = RationalFunction(UniPoly.gen("u"))
    diag_u = [
        [gen_u ** lat.twist(0, s) if s == t else _RF_U.zero for t in range(rank)]
        for s in range(rank)
    ]
    inv_u = mat_inverse(frame_u, _RF_U)
    factor_inf = mat_mul(mat_mul(frame_u, diag_u), inv_u)
    total_rf = [[_RF_U.coerce(p) for p in row] for row in total]
    out = mat_mul(total_rf, factor_inf)
    poly_out = []
    for r, row in enumerate(out):
        prow = []
        for c, entry in enumerate(row):
            if not entry.is_polynomial():
                raise EngineError(
                    "infinity lattice shape unsupported by the chart model",
                    {"entry": (r, c), "value": repr(entry)},
                )
            prow.append(entry.as_poly())
        poly_out.append(prow)
    _verify_u_frame(bundle, lat, center, poly_out)
    return poly_out


def _const_poly(m, var):
    return [[UniPoly.const(var, x) for x in row] for row in m]


def _verify_u_frame(bundle, lat, center, frame_u):
    det = mat_det([[_RF_U.coerce(p) for p in row] for row in frame_u], _RF_U)
    expected = sum(lat.twist(0, s) for s in range(bundle.rank)) + _e_infinity_order(bundle)
    v = det.valuation(QQI.zero)
    if v != expected:
        raise EngineError(
            "u-chart frame determinant has the wrong order at infinity",
            {"got": v, "expected": expected},
        )
    for i in range(1, len(bundle.punctures)):
        z_i = bundle.punctures[i].location.finite
        u_i = QQI.one / (z_i - center)
        v = det.valuation(u_i)
        expected = sum(lat.twist(i, s) for s in range(bundle.rank))
        if v != expected:
            raise EngineError(
                "u-chart frame determinant wrong at a puncture",
                {"puncture": i, "got": v, "expected": expected},
            )


def _e_infinity_order(bundle) -> int:
    det = mat_det(bundle.frame_rf(0), _RF_Z)
    v = det.valuation_infinity()
    return v if v is not None else 0


def _transition_matrix(bundle, lat: SheafLattice, center, shift):
    """X = T0(t)^{-1} T1(1/t) t^shift as Laurent columns (list of LaurentVec)."""
    rank = bundle.rank
    t0_rf = finite_frame_product(bundle, lat)
    t_of = RationalFunction(UniPoly("t", [center, QQI.one]))  # z = t + center
    t0_t = [[f.substitute(t_of) for f in row] for row in t0_rf]
    t0_inv = mat_inverse(t0_t, _RF_T)
    t1 = u_chart_frame(bundle, lat, center)
    inv_t = RationalFunction(UniPoly.const("t", QQI.one), UniPoly.gen("t"))  # u = 1/t
    t1_t = []
    for row in t1:
        new_row = []
        for p in row:
            rf_u = RationalFunction(p)
            new_row.append(rf_u.substitute(inv_t))
        t1_t.append(new_row)
    x = mat_mul(t0_inv, t1_t)
    cols = []
    tshift = RationalFunction(UniPoly.gen("t")) ** shift
    for j in range(rank):
        terms = {}
        for i in range(rank):
            entry = x[i][j] * tshift
            if entry.is_zero():
                continue
            num, den = entry.num, entry.den
            # Laurent form: den must be a monomial t^k
            k = 0
            while den.coeff(0).is_zero() and den.degree > 0:
                den = UniPoly("t", den.coeffs[1:])
                k += 1
            if den.degree != 0:
                raise EngineError(
                    "transition matrix is not Laurent; unsupported lattice data",
                    {"entry": (i, j), "value": repr(x[i][j])},
                )
            scale = QQI.one / den.constant()
            for d, c in enumerate(num.coeffs):
                if c.is_zero():
                    continue
                key = d - k
                if key not in terms:
                    terms[key] = [QQI.zero] * rank
                terms[key][i] = terms[key][i] + c * scale
        cols.append(LaurentVec(rank, terms))
    return cols


# ---------------------------------------------------------------------------
# sheaf model
# ---------------------------------------------------------------------------


class SheafModel:
    """H^0 and H^1 of one lattice sheaf in T0-frame coordinates."""

    def __init__(self, bundle, lat: SheafLattice, center, shift, window: Window, label):
        self.bundle = bundle
        self.lat = lat
        self.center = center
        self.shift = shift
        self.window = window
        self.label = label
        rank = bundle.rank

        self.x_cols = _transition_matrix(bundle, lat, center, shift)

        self.u0_gens = []  # LaurentVec: t^k e_j, k >= 0
        for k in range(0, window.hi + 1):
            for j in range(rank):
                self.u0_gens.append(LaurentVec.unit(rank, k, j))
        self.u1_gens = []
        for col in self.x_cols:
            lo, hi = col.support()
            k = 0
            while lo - k >= window.lo:
                self.u1_gens.append(col.shift(-k))
                k += 1

        gen_coords = [window.coords(v) for v in self.u0_gens]
        gen_coords += [window.coords(v) for v in self.u1_gens]
        self.reducer = SpanReducer(gen_coords, window.size)
        self.h1_dim = window.size - self.reducer.rank
        self._solve_h0()
        self._check_riemann_roch()

    def _solve_h0(self):
        rank = self.bundle.rank
        n0 = len(self.u0_gens)
        cols = [self.window.coords(v) for v in self.u0_gens]
        cols += [[-x for x in self.window.coords(v)] for v in self.u1_gens]
        self.h0_sections = []
        self.h0_affine = []
        if not cols:
            return
        combos = kernel_basis(mat_transpose(cols), QQI)
        for combo in combos:
            vec = LaurentVec(rank, {})
            for c, gen in zip(combo[:n0], self.u0_gens):
                if not c.is_zero():
                    vec = vec.add(gen.scale(c))
            if not vec.terms:
                continue  # guard against a spurious kernel combo
            self.h0_sections.append(vec)
            self.h0_affine.append(vec.to_zpoly_list(self.center))

    def h0_coords_of(self, vec: LaurentVec):
        target = self.window.coords(vec)
        if not self.h0_sections:
            if any(not x.is_zero() for x in target):
                raise EngineError("nonzero global section but h0 = 0", {"sheaf": self.label})
            return []
        cols = [self.window.coords(s) for s in self.h0_sections]
        sol = mat_solve(mat_transpose(cols), target, QQI)
        if sol is None:
            raise EngineError("section outside the H0 span", {"sheaf": self.label})
        return sol

    def h1_coords(self, vec: LaurentVec):
        return self.reducer.quotient_coords(self.window.coords(vec))

    def h1_basis_reps(self):
        reps = []
        for idx in self.reducer.free:
            k = idx // self.bundle.rank + self.window.lo
            j = idx % self.bundle.rank
            reps.append(LaurentVec.unit(self.bundle.rank, k, j))
        return reps

    def cech_split_u0(self, vec: LaurentVec):
        """Solve vec = g0 - g1 over the charts; return g0's z-coefficients."""
        n0 = len(self.u0_gens)
        sol = self.reducer.solve(self.window.coords(vec))
        if sol is None:
            raise EngineError("Cech split of a nonzero H1 class", {"sheaf": self.label})
        g0 = LaurentVec(self.bundle.rank, {})
        for c, gen in zip(sol[:n0], self.u0_gens):
            if not c.is_zero():
                g0 = g0.add(gen.scale(c))
        return g0.to_zpoly_list(self.center)

    def degree(self) -> int:
        total = 0
        for row in self.lat.twists:
            total += sum(row)
        return -total - _e_infinity_order(self.bundle) + self.shift * self.bundle.rank

    def _check_riemann_roch(self):
        chi = len(self.h0_sections) - self.h1_dim
        expected = self.degree() + self.bundle.rank
        if chi != expected:
            raise EngineError(
                "Cech model fails Riemann-Roch (window too small?)",
                {
                    "sheaf": self.label,
                    "h0": len(self.h0_sections),
                    "h1": self.h1_dim,
                    "chi": chi,
                    "expected": expected,
                    "window": (self.window.lo, self.window.hi),
                },
            )


# ---------------------------------------------------------------------------
# the complex model
# ---------------------------------------------------------------------------


class ComplexModel:
    """theta_zeta between the Cech models of F and G', zeta-linear maps."""

    def __init__(self, bundle: ParabolicHiggsBundle, f_lat, g_lat, tm: TwistedMapMatrix = None, center=None):
        self.bundle = bundle
        rank = bundle.rank
        n = bundle.n_finite
        self.center = pick_chart_center(bundle) if center is None else center
        center = self.center
        if tm is None:
            tm = theta_matrix(bundle, f_lat, g_lat)
        self.tm = tm

        shift_t = lambda p: p.taylor_shift(center).map_coeffs(lambda c: c, var="t")
        self.p0 = [[shift_t(p) for p in row] for row in tm.m0]
        self.p1 = [[shift_t(p) for p in row] for row in tm.m1]
        spread = max(
            (e.degree for row in (self.p0 + self.p1) for e in row if not e.is_zero()),
            default=0,
        )

        for attempt in range(3):
            margin = (attempt + 1) * (rank + 3)
            try:
                f_win = self._window_for(f_lat, 0, margin)
                g_raw = self._window_for(g_lat, n, margin)
                g_win = Window(
                    min(g_raw.lo, f_win.lo),
                    max(g_raw.hi, f_win.hi + spread),
                    rank,
                )
                self.f_model = SheafModel(bundle, f_lat, center, 0, f_win, "F")
                self.g_model = SheafModel(bundle, g_lat, center, n, g_win, "G'")
                break
            except EngineError as err:
                if attempt == 2 or "window" not in str(err):
                    raise
        self._build_maps()

    def _window_for(self, lat, shift, margin):
        rank = self.bundle.rank
        cols = _transition_matrix(self.bundle, lat, self.center, shift)
        los = [c.support()[0] for c in cols]
        his = [c.support()[1] for c in cols]
        lo = min(los + [0]) - margin
        hi = max(his + [0]) + margin
        return Window(lo, hi, rank)

    def _build_maps(self):
        fm, gm = self.f_model, self.g_model
        a0_cols, a1_cols = [], []
        for section in fm.h0_sections:
            a0_cols.append(gm.h0_coords_of(section.apply_poly_matrix(self.p0)))
            a1_cols.append(gm.h0_coords_of(section.apply_poly_matrix(self.p1)))
        h0g = len(gm.h0_sections)
        self.a0 = mat_transpose(a0_cols) if a0_cols else [[] for _ in range(h0g)]
        self.a1 = mat_transpose(a1_cols) if a1_cols else [[] for _ in range(h0g)]
        b0_cols, b1_cols = [], []
        self.f_h1_reps = fm.h1_basis_reps()
        for rep in self.f_h1_reps:
            b0_cols.append(gm.h1_coords(rep.apply_poly_matrix(self.p0)))
            b1_cols.append(gm.h1_coords(rep.apply_poly_matrix(self.p1)))
        self.b0 = mat_transpose(b0_cols) if b0_cols else [[] for _ in range(gm.h1_dim)]
        self.b1 = mat_transpose(b1_cols) if b1_cols else [[] for _ in range(gm.h1_dim)]

    # -- fiber dimensions --------------------------------------------------------

    def fiber_dims(self, zeta: GaussianRational):
        amat = [[a + zeta * b for a, b in zip(ra, rb)] for ra, rb in zip(self.a0, self.a1)]
        bmat = [[a + zeta * b for a, b in zip(ra, rb)] for ra, rb in zip(self.b0, self.b1)]
        return self._dims_from(amat, bmat)

    def fiber_dims_infinity(self):
        return self._dims_from(self.a1, self.b1)

    def _dims_from(self, amat, bmat):
        from .linalg import mat_rank

        h0f = len(self.f_model.h0_sections)
        h0g = len(self.g_model.h0_sections)
        h1f = len(self.f_h1_reps)
        h1g = self.g_model.h1_dim
        rank_a = mat_rank(amat, QQI) if (h0f and h0g) else 0
        rank_b = mat_rank(bmat, QQI) if (h1f and h1g) else 0
        h0 = h0f - rank_a
        h2 = h1g - rank_b
        h1 = (h0g - rank_a) + (h1f - rank_b)
        return h0, h1, h2

    # -- lattice bases -------------------------------------------------------------

    def global_sections(self):
        """Basis of the transformed sheaf over the affine zeta-line.

        The long exact sequence of sheaves is exact on global sections over
        the affine chart, so one Smith normal form over Q(i)[zeta] of each of
        the two zeta-linear matrices yields a global module basis: the
        saturated complement of im(H0-map) plus Cech lifts of a saturated
        kernel basis of the H1-map. Each element is a list (length rank) of
        {z-power: coefficient-in-Q(i)[zeta]} dicts over the affine G'-frame.
        """
        from .poly import VAR_ZETA
        from .smith import smith_pid

        var = VAR_ZETA
        fm, gm = self.f_model, self.g_model
        sections = []
        h0f, h0g = len(fm.h0_sections), len(gm.h0_sections)
        h1f, h1g = len(self.f_h1_reps), gm.h1_dim

        def lift(theta_part, id_part):
            return [
                [UniPoly(var, [a, b]) for a, b in zip(ra, rb)]
                for ra, rb in zip(theta_part, id_part)
            ]

        if h0g:
            if h0f:
                res = smith_pid(lift(self.a0, self.a1), var, QQI, track=("U_inv",))
                rank_a = sum(1 for d in res.diag if not d.is_zero())
                for d in res.diag:
                    if not d.is_zero() and d.degree != 0:
                        raise EngineError(
                            "torsion in coker(H0): transformed sheaf not locally free",
                            {"invariant_factor": repr(d)},
                        )
                cols = [[res.U_inv[r][k] for r in range(h0g)] for k in range(rank_a, h0g)]
            else:
                one = UniPoly.const(var, QQI.one)
                zero = UniPoly.zero(var)
                cols = [[one if r == k else zero for r in range(h0g)] for k in range(h0g)]
            for col in cols:
                col_rf = [_as_rf(RationalFunction(x) if isinstance(x, UniPoly) else x, var) for x in col]
                sections.append(self._coker_section(col_rf, var))

        if h1f:
            if h1g:
                res = smith_pid(lift(self.b0, self.b1), var, QQI, track=("V",))
                nz = sum(1 for d in res.diag if not d.is_zero())
                ker_cols = [[res.V[r][k] for r in range(h1f)] for k in range(nz, h1f)]
            else:
                one = UniPoly.const(var, QQI.one)
                zero = UniPoly.zero(var)
                ker_cols = [[one if r == k else zero for r in range(h1f)] for k in range(h1f)]
            for col in ker_cols:
                col_rf = [_as_rf(RationalFunction(x) if isinstance(x, UniPoly) else x, var) for x in col]
                sections.append(self._kernel_section(col_rf, var, at_infinity_hat=False))
        return sections

    def infinity_hat_sections(self, var="wt"):
        """Lattice basis of the transformed sheaf at zeta = infinity.

        Uses the rescaled complex w~ * theta-part + id-part over the valuation
        ring at w~ = 0; coefficients come back rational in w~ = 1/zeta.
        """
        place = Place(var, "finite", QQI.zero)
        fm, gm = self.f_model, self.g_model
        sections = []
        h0f, h0g = len(fm.h0_sections), len(gm.h0_sections)
        h1f, h1g = len(self.f_h1_reps), gm.h1_dim

        def lift(theta_part, id_part):
            return [
                [UniPoly(var, [b, a]) for a, b in zip(ra, rb)]
                for ra, rb in zip(theta_part, id_part)
            ]

        if h0g:
            if h0f:
                res = smith_local(lift(self.a0, self.a1), place, check_square_regular=False)
                rank_a = sum(1 for v in res.vals if v is not None)
                for v in res.vals:
                    if v is not None and v != 0:
                        raise EngineError(
                            "torsion in coker(H0) at infinity-hat",
                            {"vals": res.vals},
                        )
                cols = [[res.U_inv[r][k] for r in range(h0g)] for k in range(rank_a, h0g)]
            else:
                cols = [
                    [_RF_CONST(var, QQI.one if r == k else QQI.zero) for r in range(h0g)]
                    for k in range(h0g)
                ]
            for col in cols:
                sections.append(self._coker_section([_as_rf(x, var) for x in col], var))

        if h1f:
            if h1g:
                res = smith_local(lift(self.b0, self.b1), place, check_square_regular=False)
                nz = sum(1 for v in res.vals if v is not None)
                ker_cols = [[res.V[r][k] for r in range(h1f)] for k in range(nz, h1f)]
            else:
                ker_cols = [
                    [_RF_CONST(var, QQI.one if r == k else QQI.zero) for r in range(h1f)]
                    for k in range(h1f)
                ]
            for col in ker_cols:
                sections.append(
                    self._kernel_section([_as_rf(x, var) for x in col], var, at_infinity_hat=True)
                )
        return sections

    def _coker_section(self, col_rf, var):
        gm = self.g_model
        rank = self.bundle.rank
        coeffs = [{} for _ in range(rank)]
        for c, affine in zip(col_rf, gm.h0_affine):
            if c.is_zero():
                continue
            for j in range(rank):
                coeffs[j] = _rf_poly_add(coeffs[j], _scale_zpoly(affine[j], c))
        return {"coeffs": coeffs, "kind": "coker"}

    def _kernel_section(self, col_rf, var, at_infinity_hat):
        gm = self.g_model
        rank = self.bundle.rank
        den = UniPoly.const(var, QQI.one)
        for c in col_rf:
            if c.den.degree > 0:
                den = poly_lcm(den, c.den)
        col_poly = [(c * RationalFunction(den)).as_poly() for c in col_rf]
        deg = max((p.degree for p in col_poly), default=0)
        total = {}
        for m in range(deg + 1):
            f_m = LaurentVec(rank, {})
            for coeff_poly, rep in zip(col_poly, self.f_h1_reps):
                c = coeff_poly.coeff(m)
                if not c.is_zero():
                    f_m = f_m.add(rep.scale(c))
            if not f_m.terms:
                continue
            img_theta = f_m.apply_poly_matrix(self.p0)
            img_id = f_m.apply_poly_matrix(self.p1)
            if at_infinity_hat:
                _accumulate(total, m + 1, img_theta)
                _accumulate(total, m, img_id)
            else:
                _accumulate(total, m, img_theta)
                _accumulate(total, m + 1, img_id)
        coeffs = [{} for _ in range(rank)]
        den_rf = RationalFunction(den)
        for power, vec in sorted(total.items()):
            g0 = gm.cech_split_u0(vec)
            mono = RationalFunction(UniPoly.gen(var)) ** power / den_rf
            for j in range(rank):
                coeffs[j] = _rf_poly_add(coeffs[j], _scale_zpoly(g0[j], mono))
        return {"coeffs": coeffs, "kind": "kernel"}


def _accumulate(total, power, vec):
    if power in total:
        total[power] = total[power].add(vec)
    else:
        total[power] = vec


def _RF_CONST(var, c):
    return RationalFunction.const(var, c)


def _as_rf(x, var):
    if isinstance(x, RationalFunction):
        return x
    return RationalFunction.const(var, x)


def _rf_poly_add(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out[k] + v if k in out else v
    return {k: v for k, v in out.items() if not v.is_zero()}


def _scale_zpoly(zpoly: UniPoly, c):
    out = {}
    for k, coeff in enumerate(zpoly.coeffs):
        if coeff.is_zero():
            continue
        out[k] = c * coeff
    return out
