"""Elementary-modification lattices F, G and their alpha-families.

A lattice is stored as one integer twist exponent per canonical frame column
and puncture: the local frame is (frame column) * (z - z_i)^m, or * w^m at
infinity. All inclusion and equality questions reduce to comparing twists;
the twisted Higgs map is assembled into honest polynomial matrices (affine
chart) plus the w-chart matrices at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bundle import ParabolicHiggsBundle, ParabolicPoint, check_assumptions
from .errors import AssumptionViolated, AxiomViolation, NotAMorphism
from .linalg import mat_inverse, mat_mul, span_dim, in_span, mat_transpose
from .points import PointOnLine
from .poly import UniPoly, VAR_W, VAR_Z
from .qi import QQI, GaussianRational, qi
from .ratfunc import FIELD_RF_Z, RatFuncField, RationalFunction

_RF_Z = FIELD_RF_Z
_RF_W = RatFuncField(VAR_W)


@dataclass(frozen=True)
class SheafLattice:
    """Twist exponents per (puncture, frame column), relative to the bundle."""

    rank: int
    twists: tuple  # tuple over punctures of tuples over columns

    def twist(self, i: int, s: int) -> int:
        return self.twists[i][s]

    def includes(self, other: "SheafLattice") -> bool:
        """self >= other as subsheaves of the rational sections."""
        return all(
            ms <= mo
            for rows, rowo in zip(self.twists, other.twists)
            for ms, mo in zip(rows, rowo)
        )

    def colength(self, other: "SheafLattice") -> int:
        """Total torsion length of self/other when self >= other."""
        if not self.includes(other):
            raise ValueError("colength needs an inclusion")
        return sum(
            mo - ms
            for rows, rowo in zip(self.twists, other.twists)
            for ms, mo in zip(rows, rowo)
        )


def _case_g_finite(alpha: Fraction, k: int) -> int:
    if alpha == 0:
        return 0 if k < -1 else 1
    return 0


def _case_f_finite(alpha: Fraction, lam: GaussianRational, k: int) -> int:
    if alpha == 0:
        if lam.is_zero():
            return 0
        return 0 if k < -1 else 1
    return 0


def _case_g_infinity(alpha: Fraction, k: int) -> int:
    if alpha == 0:
        return 1 if k < -1 else 2
    return 1


def build_FG(bundle: ParabolicHiggsBundle):
    """The base lattices of the Dolbeault complex, by the local case table."""
    verdict = check_assumptions(bundle)
    if not verdict["ok"]:
        raise AssumptionViolated(
            "lattice construction refused: spectral assumption fails",
            {"failures": verdict["failures"], "blocked": verdict["blocked"]},
        )
    f_rows, g_rows = [], []
    for i, data in enumerate(bundle.data):
        f_row, g_row = [], []
        for s in range(bundle.rank):
            alpha = data.weight_of_column(s)
            k = data.k_of[s]
            lam = data.lam_of[s]
            if i == 0:
                g = _case_g_infinity(alpha, k)
                f = g
            else:
                g = _case_g_finite(alpha, k)
                f = _case_f_finite(alpha, lam, k)
            f_row.append(f)
            g_row.append(g)
        f_rows.append(tuple(f_row))
        g_rows.append(tuple(g_row))
    return (
        SheafLattice(bundle.rank, tuple(f_rows)),
        SheafLattice(bundle.rank, tuple(g_rows)),
    )


def alpha_twist(alpha_weight: Fraction, lam: GaussianRational, alpha: Fraction) -> int:
    """Extra twist exponent m of the alpha-family for one frame vector.

    Vectors with weight 0 and eigenvalue 0 are never twisted (the Deletion
    case); otherwise m is 0 or 1 according to alpha <= weight or not.
    """
    if alpha_weight == 0 and lam.is_zero():
        return 0
    return 0 if alpha <= alpha_weight else 1


def build_FG_alpha(bundle: ParabolicHiggsBundle, alpha: Fraction):
    """The alpha-parameterized lattices F_alpha, G_alpha for alpha in [0,1)."""
    if not (0 <= alpha < 1):
        raise ValueError("alpha must lie in [0,1)")
    f0, g0 = build_FG(bundle)
    f_rows, g_rows = [], []
    for i, data in enumerate(bundle.data):
        f_row, g_row = [], []
        for s in range(bundle.rank):
            weight = data.weight_of_column(s)
            lam = data.lam_of[s]
            m = alpha_twist(weight, lam, Fraction(alpha))
            if i == 0 and weight == 0 and lam.is_zero():
                raise AssertionError("deletion case at infinity contradicts assumption (1)")
            f_row.append(f0.twist(i, s) + m)
            g_row.append(g0.twist(i, s) + m)
        f_rows.append(tuple(f_row))
        g_rows.append(tuple(g_row))
    return (
        SheafLattice(bundle.rank, tuple(f_rows)),
        SheafLattice(bundle.rank, tuple(g_rows)),
    )


def jump_candidates(bundle: ParabolicHiggsBundle):
    """The exact set {0} union {alpha_i^j}: all possible jump locations."""
    out = {Fraction(0)}
    for p in bundle.punctures:
        out.update(Fraction(w) for w in p.weights)
    return sorted(out)


# ---------------------------------------------------------------------------
# the twisted map in honest frames
# ---------------------------------------------------------------------------


@dataclass
class TwistedMapMatrix:
    """Matrix pair of theta_zeta = theta - (zeta/2) dz between twisted frames.

    Affine chart: entries of m0 + zeta*m1 are polynomials in z relative to the
    global frame of F and of G (x) dz/prod(z - z_i). Infinity chart: inf0 +
    zeta*inf1 over the w-frames with target generator dz.
    """

    rank: int
    m0: list  # UniPoly in z
    m1: list
    inf0: list  # RationalFunction in w
    inf1: list
    source: SheafLattice
    target: SheafLattice

    def affine_at(self, zeta: GaussianRational):
        return [
            [a + b.scale(zeta) for a, b in zip(ra, rb)]
            for ra, rb in zip(self.m0, self.m1)
        ]

    def infinity_at(self, zeta: GaussianRational):
        return [
            [a + b * zeta for a, b in zip(ra, rb)]
            for ra, rb in zip(self.inf0, self.inf1)
        ]

    def affine_at_infinity_hat(self):
        """Fiber of the extended complex at zeta = infinity (rescaled by 1/zeta)."""
        return [list(row) for row in self.m1]

    def infinity_at_infinity_hat(self):
        return [list(row) for row in self.inf1]


def finite_frame_product(bundle: ParabolicHiggsBundle, lattice: SheafLattice):
    """Global affine frame matrix of the lattice: product of local twist factors."""
    rank = bundle.rank
    total = [
        [RationalFunction.const(VAR_Z, QQI.one if i == j else QQI.zero) for j in range(rank)]
        for i in range(rank)
    ]
    for i in range(1, len(bundle.punctures)):
        c = bundle.punctures[i].location.finite
        frame = bundle.frame_rf(i)
        frame_inv = mat_inverse(frame, _RF_Z)
        lin = RationalFunction(UniPoly(VAR_Z, [-c, QQI.one]))
        diag = [
            [
                (lin ** lattice.twist(i, s) if s == t else _RF_Z.zero)
                for t in range(rank)
            ]
            for s in range(rank)
        ]
        factor = mat_mul(mat_mul(frame, diag), frame_inv)
        total = mat_mul(total, factor)
    return total


def infinity_frame_w(bundle: ParabolicHiggsBundle, lattice: SheafLattice):
    """Local frame of the lattice at infinity as a matrix over Q(i)(w)."""
    rank = bundle.rank
    frame_z = bundle.frame_rf(0)
    w_inv = RationalFunction(
        UniPoly.const(VAR_W, QQI.one), UniPoly.gen(VAR_W)
    )  # 1/w, i.e. z
    frame_w = [[f.substitute(w_inv) for f in row] for row in frame_z]
    gen_w = RationalFunction(UniPoly.gen(VAR_W))
    diag = [
        [
            (gen_w ** lattice.twist(0, s) if s == t else _RF_W.zero)
            for t in range(rank)
        ]
        for s in range(rank)
    ]
    return mat_mul(frame_w, diag)


def theta_matrix(bundle: ParabolicHiggsBundle, f_lat: SheafLattice, g_lat: SheafLattice):
    """Matrices of theta - (zeta/2) Id: F -> G (x) K(2*inf + punctures).

    Raises NotAMorphism if theta does not map the source lattice into the
    twisted target; the zeta-part is checked too.
    """
    rank = bundle.rank
    t_f = finite_frame_product(bundle, f_lat)
    t_g = finite_frame_product(bundle, g_lat)
    t_g_inv = mat_inverse(t_g, _RF_Z)
    clear = RationalFunction(_punctures_poly(bundle))
    theta = bundle.higgs
    m0_rf = mat_mul(mat_mul(t_g_inv, theta), t_f)
    m1_rf = mat_mul(t_g_inv, t_f)
    m0 = [[(x * clear) for x in row] for row in m0_rf]
    m1 = [[x * clear * qi(Fraction(-1, 2)) for x in row] for row in m1_rf]
    for tag, mat in (("theta", m0), ("identity", m1)):
        for r, row in enumerate(mat):
            for c, entry in enumerate(row):
                if not entry.is_polynomial():
                    raise NotAMorphism(
                        "theta does not map F into G (x) K(D) on the affine chart",
                        {"part": tag, "entry": (r, c), "value": repr(entry)},
                    )
    m0_poly = [[e.as_poly() for e in row] for row in m0]
    m1_poly = [[e.as_poly() for e in row] for row in m1]

    f_w = infinity_frame_w(bundle, f_lat)
    g_w = infinity_frame_w(bundle, g_lat)
    g_w_inv = mat_inverse(g_w, _RF_W)
    w_inv = RationalFunction(UniPoly.const(VAR_W, QQI.one), UniPoly.gen(VAR_W))
    theta_w = [[f.substitute(w_inv) for f in row] for row in bundle.higgs]
    inf0 = mat_mul(mat_mul(g_w_inv, theta_w), f_w)
    inf1 = [[x * qi(Fraction(-1, 2)) for x in row] for row in mat_mul(g_w_inv, f_w)]
    for tag, mat in (("theta", inf0), ("identity", inf1)):
        for r, row in enumerate(mat):
            for c, entry in enumerate(row):
                v = entry.valuation(QQI.zero)
                if v is not None and v < 0:
                    raise NotAMorphism(
                        "theta does not map F into G (x) K(D) at infinity",
                        {"part": tag, "entry": (r, c), "w_valuation": v},
                    )
    return TwistedMapMatrix(rank, m0_poly, m1_poly, inf0, inf1, f_lat, g_lat)


def _punctures_poly(bundle) -> UniPoly:
    out = UniPoly.const(VAR_Z, QQI.one)
    for c in bundle.finite_locations():
        out = out * UniPoly(VAR_Z, [-c, QQI.one])
    return out


def check_theta_alpha(bundle: ParabolicHiggsBundle, alpha: Fraction):
    """Verdict that theta_alpha maps F_alpha into G_alpha (x) K(D), by valuations."""
    try:
        f_lat, g_lat = build_FG_alpha(bundle, alpha)
    except AssumptionViolated as err:
        return {"ok": False, "alpha": alpha, "blocked": err.witness}
    try:
        theta_matrix(bundle, f_lat, g_lat)
    except NotAMorphism as err:
        return {"ok": False, "alpha": alpha, "witness": err.witness}
    return {"ok": True, "alpha": alpha}


# ---------------------------------------------------------------------------
# R-parabolic correspondence at one puncture
# ---------------------------------------------------------------------------


@dataclass
class RParabolicFamily:
    """Left-continuous decreasing twist family at one puncture.

    segments[t] = (alpha_t, twists): the lattice on (alpha_{t-1}, alpha_t],
    with alpha_0 covering [0, alpha_0]. Beyond the last segment up to 1 the
    family is the base twisted once (period rule with the reduced divisor).
    """

    divisor: PointOnLine
    rank: int
    base: tuple
    segments: list  # [(Fraction, tuple of ints)]

    def twists_at(self, alpha: Fraction):
        if alpha < 0 or alpha >= 1:
            k = 0
            while alpha >= 1:
                alpha -= 1
                k += 1
            while alpha < 0:
                alpha += 1
                k -= 1
            inner = self.twists_at(alpha)
            return tuple(m + k for m in inner)
        for end, twists in self.segments:
            if alpha <= end:
                return twists
        return tuple(m + 1 for m in self.base)

    def jump_set(self):
        out = []
        prev = None
        for end, twists in self.segments + [(Fraction(1), tuple(m + 1 for m in self.base))]:
            if prev is not None and twists != prev[1]:
                out.append(prev[0])
            prev = (end, twists)
        return out


def parabolic_to_Rparabolic(point: ParabolicPoint, j_of: list) -> RParabolicFamily:
    """Family with jumps at the weights; on (a^{l-1}, a^l] the lattice is the
    kernel of evaluation followed by projection onto F^0/F^l."""
    rank = len(j_of)
    base = tuple([0] * rank)
    segments = []
    for level, weight in enumerate(point.weights):
        twists = tuple(0 if j_of[s] >= level else 1 for s in range(rank))
        segments.append((Fraction(weight), twists))
    return RParabolicFamily(point.location, rank, base, segments)


def puncture_family(bundle: ParabolicHiggsBundle, i: int) -> RParabolicFamily:
    data = bundle.data[i]
    return parabolic_to_Rparabolic(data.point, data.j_of)


def Rparabolic_to_parabolic(family: RParabolicFamily):
    """Recover (flag levels as column sets, weights) from a twist family.

    Validates the R-parabolic axioms: left-continuity is structural in the
    segment representation; monotone decrease, the period rule normalization
    (lattice at 0 equals the base) and single-step twists are checked.
    """
    rank = family.rank
    if family.twists_at(Fraction(0)) != family.base:
        raise AxiomViolation("family does not start at its base lattice", {})
    alphas = [end for end, _ in family.segments]
    if alphas != sorted(alphas) or len(set(alphas)) != len(alphas):
        raise AxiomViolation("segment ends must strictly increase", {"jumps": [str(a) for a in alphas]})
    if any(not (0 <= a < 1) for a in alphas):
        raise AxiomViolation("jump locations must lie in [0,1)", {"jumps": [str(a) for a in alphas]})
    prev = family.base
    for a in [Fraction(0)] + alphas:
        cur = family.twists_at(a)
        if any(c < p for c, p in zip(cur, prev)):
            raise AxiomViolation(
                "family is not decreasing",
                {"alpha": str(a), "twists": cur, "previous": prev},
            )
        prev = cur
    tail = tuple(m + 1 for m in family.base)
    if any(t < p for t, p in zip(tail, prev)):
        raise AxiomViolation("period rule conflicts with the last segment", {"tail": tail})
    # recover: flag level l = columns still untwisted on the l-th segment
    weights = []
    flags = []
    seen = None
    for end, twists in family.segments:
        columns = tuple(s for s in range(rank) if twists[s] == family.base[s])
        if seen is not None and columns == seen:
            raise AxiomViolation(
                "segment does not jump at its weight",
                {"alpha": str(end)},
            )
        weights.append(end)
        flags.append(columns)
        seen = columns
    return {"weights": weights, "flag_columns": flags}


def lattice_fiber_columns(family: RParabolicFamily, alpha: Fraction):
    """Columns whose image survives in the fiber of the base at this alpha."""
    tw = family.twists_at(alpha)
    return tuple(s for s in range(family.rank) if tw[s] == family.base[s])
