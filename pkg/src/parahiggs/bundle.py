"""Parabolic Higgs bundle input model: parsing, validation, normalization.

The bundle is presented Birkhoff-style: a global affine frame over C plus an
invertible change of frame at infinity (`infinity_lattice`, default identity).
Parsing normalizes each puncture to a canonical local frame that is
* adapted to the flag (the first dim F^j columns span F^j),
* made of eigenvectors of the leading term A at infinity,
* diagonalizing for the semisimple part of each graded residue action, and
* adapted to the weight filtration of the nilpotent part,
so the frame table (j(s), k(s), lambda_i^s) reads off column by column.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    CentralizerError,
    EngineError,
    NonSemisimpleLeading,
    NonSplitSpectrum,
    NotNilpotent,
    ParseError,
    PoleOrderError,
)
from .exprparse import parse_ratfunc, parse_scalar
from .linalg import (
    colspace_reduce,
    extend_basis,
    in_span,
    intersect_spans,
    charpoly,
    kernel_basis,
    mat_copy,
    mat_det,
    mat_identity,
    mat_inverse,
    mat_mul,
    mat_solve,
    mat_transpose,
    mat_vec,
    span_dim,
)
from .points import INFINITY, PointOnLine
from .poly import UniPoly, VAR_Z, poly_xgcd, squarefree_part
from .qi import QQI, GaussianRational, format_qi, qi, sort_key
from .ratfunc import FIELD_RF_Z, RatFuncField, RationalFunction, laurent_coeffs
from .roots import poly_gaussian_roots, split_eigenvalues

_RF_Z = FIELD_RF_Z


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass
class ParabolicPoint:
    """One puncture: location, flag F^1 > F^2 > ... (bases), weights a^0 < ... """

    location: PointOnLine
    flag: list  # list of levels; level j-1 is a basis (list of vectors) of F^j
    weights: list  # list of Fraction, length len(flag) + 1

    @property
    def levels(self) -> int:
        return len(self.weights)


@dataclass
class WeightFiltration:
    """Increasing filtration W_k attached to a nilpotent operator."""

    dim: int
    levels: dict  # k -> basis (list of vectors); monotone, W_k = all for k >= top
    top: int  # smallest k with W_k = everything

    def basis_at(self, k: int):
        if k >= self.top:
            return self.levels[self.top]
        if k < min(self.levels):
            return []
        while k not in self.levels:
            k -= 1
            if k < min(self.levels):
                return []
        return self.levels[k]

    def level_of(self, vector) -> int:
        """Smallest k with vector in W_k."""
        k_lo = min(self.levels) - 1
        for k in range(k_lo, self.top + 1):
            if in_span(self.basis_at(k), vector):
                return k
        raise AssertionError("vector not in the total space")

    def graded_dims(self) -> dict:
        out = {}
        prev = 0
        for k in range(min(self.levels) - 1, self.top + 1):
            cur = span_dim(self.basis_at(k))
            if cur != prev:
                out[k] = cur - prev
            prev = cur
        return out


@dataclass
class GradedBlock:
    """Same-eigenvalue block of one graded residue action."""

    level: int
    eigenvalue: GaussianRational
    columns: list  # frame column indices (global, 0-based)
    nilpotent: list  # matrix of N on the block, in the block frame coords
    weight_levels: list  # k(s) per block column


@dataclass
class LevelData:
    """One flag level of one puncture, with its graded residue split."""

    level: int
    weight: Fraction
    dim: int
    induced: list  # graded residue action on Gr^j, frame coords
    semisimple: list
    nilpotent: list
    eigenvalues: list  # with multiplicity, sorted
    blocks: list  # list of GradedBlock


@dataclass
class ResidueSplit:
    puncture: int
    levels: list  # list of LevelData


@dataclass
class FrameIndexRow:
    puncture: int
    column: int
    level: int  # j(s)
    weight_index: int  # k(s)
    eigenvalue: GaussianRational  # lambda_i^s
    a_eigenvalue: GaussianRational | None = None  # at infinity only


@dataclass
class PunctureData:
    """Analysis attached to one puncture after normalization."""

    index: int
    point: ParabolicPoint
    residue: list | None = None  # finite: residue matrix in the affine frame
    a_matrix: list | None = None  # infinity only
    b_matrix: list | None = None  # infinity only (canonical frame coords)
    frame: list | None = None  # canonical constant frame (fiber coords)
    j_of: list = field(default_factory=list)
    k_of: list = field(default_factory=list)
    lam_of: list = field(default_factory=list)
    a_of: list = field(default_factory=list)  # infinity only
    split: ResidueSplit | None = None
    compat_ok: bool = True
    compat_witness: dict | None = None
    claim21_ok: bool = True
    claim21_witness: dict | None = None
    coupling_ok: bool = True
    coupling_witness: dict | None = None

    def weight_of_column(self, s: int) -> Fraction:
        return self.point.weights[self.j_of[s]]


class ParabolicHiggsBundle:
    """Validated bundle plus its per-puncture analysis."""

    def __init__(self, rank, punctures, higgs, infinity_lattice, document):
        self.rank = rank
        self.punctures = punctures  # index 0 is the infinity puncture
        self.higgs = higgs  # rank x rank matrix of RationalFunction in z
        self.infinity_lattice = infinity_lattice
        self.document = document  # normalized input echo
        self.data: list[PunctureData] = []
        self.theta_infinity_frame = None  # matrix over RF(w), canonical frame

    # convenience -----------------------------------------------------------

    @property
    def n_finite(self) -> int:
        return len(self.punctures) - 1

    def finite_locations(self):
        return [p.location.finite for p in self.punctures[1:]]

    def puncture_data(self, i: int) -> PunctureData:
        return self.data[i]

    def frame_rf(self, i: int):
        """Local frame as a matrix over Q(i)(z) in affine coordinates."""
        d = self.data[i]
        const = [[RationalFunction.const(VAR_Z, x) for x in row] for row in d.frame]
        if i == 0:
            return mat_mul(self.infinity_lattice, const)
        return const

    def analysis_ready(self, i: int) -> bool:
        return self.data[i].frame is not None


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def parse_bundle(document: dict) -> ParabolicHiggsBundle:
    """Parse, validate and normalize a bundle document.

    Shape invariants (pole orders, semisimple split leading term, centralizer
    condition) raise; flag-compatibility findings are recorded as verdicts so
    the check operations can report them with witnesses.
    """
    if not isinstance(document, dict):
        raise ParseError("bundle document must be a mapping")
    try:
        rank = int(document["rank"])
    except (KeyError, TypeError, ValueError):
        raise ParseError("missing or malformed 'rank'") from None
    if rank < 2:
        raise ParseError(f"rank must be at least 2, got {rank}")

    punctures = _parse_punctures(document, rank)
    higgs = _parse_matrix(document, "higgs", rank, required=True)
    lattice = _parse_matrix(document, "infinity_lattice", rank, required=False)
    if lattice is None:
        lattice = [
            [RationalFunction.const(VAR_Z, QQI.one if i == j else QQI.zero) for j in range(rank)]
            for i in range(rank)
        ]
    if mat_det(lattice, _RF_Z).is_zero():
        raise ParseError("infinity_lattice is singular")

    bundle = ParabolicHiggsBundle(rank, punctures, higgs, lattice, _echo_document(rank, punctures, document))
    _validate_pole_pattern(bundle)
    _analyze(bundle)
    return bundle


def _parse_punctures(document, rank):
    raw = document.get("punctures")
    if not isinstance(raw, list) or not raw:
        raise ParseError("missing 'punctures' list")
    infinity = None
    finite = []
    seen = set()
    for entry in raw:
        if not isinstance(entry, dict):
            raise ParseError("puncture entries must be mappings")
        loc_text = entry.get("location")
        if loc_text in ("inf", "infinity", "oo"):
            loc = PointOnLine(INFINITY)
        else:
            loc = PointOnLine(parse_scalar(loc_text))
        if loc in seen:
            raise ParseError(f"duplicate puncture at {loc}")
        seen.add(loc)
        point = _parse_point(entry, loc, rank)
        if loc.is_infinite:
            infinity = point
        else:
            finite.append(point)
    if infinity is None:
        raise ParseError("the point at infinity must be a puncture")
    if not finite:
        raise ParseError("at least one finite puncture is required")
    return [infinity] + finite


def _parse_point(entry, loc, rank):
    weights_raw = entry.get("weights", [])
    weights = []
    for w in weights_raw:
        val = parse_scalar(w) if not isinstance(w, int) else qi(w)
        if not val.is_real():
            raise ParseError(f"weight {w!r} is not real")
        weights.append(Fraction(val.re))
    if not weights:
        raise ParseError(f"puncture {loc}: empty weight list")
    for w in weights:
        if not (0 <= w < 1):
            raise ParseError(f"puncture {loc}: weight {w} outside [0,1)")
    if any(b <= a for a, b in zip(weights, weights[1:])):
        raise ParseError(f"puncture {loc}: weights must strictly increase")

    flag_raw = entry.get("flag", [])
    flag = []
    for level in flag_raw:
        vectors = []
        for vec in level:
            if len(vec) != rank:
                raise ParseError(f"puncture {loc}: flag vector of wrong length")
            vectors.append([parse_scalar(x) for x in vec])
        flag.append(vectors)
    if len(weights) != len(flag) + 1:
        raise ParseError(
            f"puncture {loc}: {len(weights)} weights need {len(weights) - 1} flag levels, got {len(flag)}"
        )
    dims = [rank] + [span_dim(level) for level in flag]
    for lvl, vectors in enumerate(flag):
        if span_dim(vectors) != len(vectors):
            raise ParseError(f"puncture {loc}: flag level {lvl + 1} basis is dependent")
    if any(b >= a for a, b in zip(dims, dims[1:])):
        raise ParseError(f"puncture {loc}: flag dimensions must strictly decrease")
    if dims[-1] < 1:
        raise ParseError(f"puncture {loc}: the last flag step must be nonzero")
    for deeper, shallower in zip(flag[1:], flag[:-1]):
        for v in deeper:
            if not in_span(shallower, v):
                raise ParseError(f"puncture {loc}: flag levels are not nested")
    return ParabolicPoint(loc, flag, weights)


def _parse_matrix(document, key, rank, required):
    raw = document.get(key)
    if raw is None:
        if required:
            raise ParseError(f"missing '{key}'")
        return None
    if len(raw) != rank or any(len(row) != rank for row in raw):
        raise ParseError(f"'{key}' must be a {rank}x{rank} matrix")
    return [[parse_ratfunc(x) if isinstance(x, str) else parse_ratfunc(str(x)) for x in row] for row in raw]


def _echo_document(rank, punctures, document):
    """Canonical re-serialization of the input (exact strings, fixed order)."""
    def point_doc(p: ParabolicPoint):
        return {
            "location": "inf" if p.location.is_infinite else format_qi(p.location.finite),
            "weights": [str(w) for w in p.weights],
            "flag": [[[format_qi(x) for x in v] for v in level] for level in p.flag],
        }

    out = {
        "rank": rank,
        "punctures": [point_doc(p) for p in punctures],
        "higgs": document["higgs"],
    }
    if "infinity_lattice" in document and document["infinity_lattice"] is not None:
        out["infinity_lattice"] = document["infinity_lattice"]
    return out


# ---------------------------------------------------------------------------
# shape validation
# ---------------------------------------------------------------------------


def _validate_pole_pattern(bundle: ParabolicHiggsBundle):
    finite = bundle.finite_locations()
    for r, row in enumerate(bundle.higgs):
        for c, entry in enumerate(row):
            if entry.is_zero():
                continue
            den = entry.den
            if den.degree == 0:
                continue
            roots, cof = poly_gaussian_roots(den)
            if cof.degree > 0:
                raise PoleOrderError(
                    "higgs entry has a pole outside Q(i)",
                    {"entry": (r, c), "denominator": repr(den)},
                )
            for root, mult in roots:
                if all(root != z for z in finite):
                    raise PoleOrderError(
                        "higgs entry has a pole away from the punctures",
                        {"entry": (r, c), "pole": format_qi(root)},
                    )
                if mult > 1:
                    raise PoleOrderError(
                        "higgs entry has a pole of order > 1 at a finite puncture",
                        {"entry": (r, c), "pole": format_qi(root), "order": mult},
                    )
    theta_inf = _theta_infinity_raw(bundle)
    for r, row in enumerate(theta_inf):
        for c, entry in enumerate(row):
            v = entry.valuation_infinity()
            if v is not None and v < 0:
                raise PoleOrderError(
                    "higgs field exceeds a second-order pole at infinity",
                    {"entry": (r, c), "w_valuation": v},
                )


def _theta_infinity_raw(bundle):
    """theta in the infinity_lattice frame, still as functions of z."""
    l_inv = mat_inverse(bundle.infinity_lattice, _RF_Z)
    return mat_mul(mat_mul(l_inv, bundle.higgs), bundle.infinity_lattice)


# ---------------------------------------------------------------------------
# weight filtration
# ---------------------------------------------------------------------------


def weight_filtration(n_matrix) -> WeightFiltration:
    """The unique increasing filtration with N W_k <= W_{k-2} and
    N^k : Gr_k -> Gr_{-k} an isomorphism, by the inductive kernel/image
    construction. Both properties are asserted exactly on the result."""
    dim = len(n_matrix)
    if dim == 0:
        return WeightFiltration(0, {0: []}, 0)
    power = mat_identity(dim)
    nil_index = 0
    for k in range(dim + 1):
        if all(x.is_zero() for row in power for x in row):
            break
        nil_index = k + 1
        power = mat_mul(power, n_matrix)
    else:
        raise NotNilpotent("matrix is not nilpotent", {"dim": dim})
    full = [[QQI.one if i == j else QQI.zero for j in range(dim)] for i in range(dim)]
    levels = _weight_levels(n_matrix, full, nil_index - 1)
    w = WeightFiltration(dim, levels, max(levels))
    _assert_weight_axioms(n_matrix, w)
    return w


def _weight_levels(n_matrix, space_basis, m):
    """Weight levels of N acting on span(space_basis), nilpotency exponent m."""
    if m <= 0:
        return {0: colspace_reduce(space_basis), -1: []}
    nm = mat_identity(len(n_matrix))
    for _ in range(m):
        nm = mat_mul(nm, n_matrix)
    # inside the subspace: kernel and image of N^m restricted to it
    coords = mat_transpose(space_basis)
    ker = []
    img = []
    sol_matrix = [[nm[i][j] for j in range(len(n_matrix))] for i in range(len(n_matrix))]
    for combo in kernel_basis(mat_mul(sol_matrix, coords)):
        vec = [QQI.zero] * len(n_matrix)
        for c, b in zip(combo, space_basis):
            vec = [x + c * y for x, y in zip(vec, b)]
        ker.append(vec)
    for b in space_basis:
        img.append(mat_vec(nm, b))
    ker = colspace_reduce(ker)
    img = colspace_reduce(img)
    # quotient Q = ker/img: complement representatives
    reps = extend_basis(img, ker)
    if reps:
        induced = _induced_matrix(n_matrix, img, reps)
        sub = _weight_levels_on_quotient(induced)
    else:
        sub = {0: [], -1: []}
    levels = {}
    levels[m] = colspace_reduce(space_basis)
    levels[m - 1] = ker
    for k in range(-m, m - 1):
        sub_basis = _quotient_level(sub, k)
        lifted = list(img)
        for combo in sub_basis:
            vec = [QQI.zero] * len(n_matrix)
            for c, rep in zip(combo, reps):
                vec = [x + c * y for x, y in zip(vec, rep)]
            lifted.append(vec)
        levels[k] = colspace_reduce(lifted)
    levels[-m - 1] = []
    return levels


def _quotient_level(sub_levels, k):
    keys = sorted(sub_levels)
    best = []
    for kk in keys:
        if kk <= k:
            best = sub_levels[kk]
    return best


def _weight_levels_on_quotient(induced):
    dim = len(induced)
    if dim == 0:
        return {0: [], -1: []}
    # nilpotency exponent of the induced matrix
    power = mat_identity(dim)
    m = 0
    for k in range(dim + 1):
        if all(x.is_zero() for row in power for x in row):
            break
        m = k + 1
        power = mat_mul(power, induced)
    full = [[QQI.one if i == j else QQI.zero for j in range(dim)] for i in range(dim)]
    return _weight_levels(induced, full, m - 1)


def _induced_matrix(n_matrix, kill_basis, reps):
    """Matrix of N on span(kill_basis + reps) / span(kill_basis) in rep coords."""
    cols = []
    basis = list(kill_basis) + list(reps)
    a = mat_transpose(basis) if basis else []
    for rep in reps:
        image = mat_vec(n_matrix, rep)
        sol = mat_solve(a, image)
        if sol is None:
            raise AssertionError("induced nilpotent map leaves the subspace")
        cols.append(sol[len(kill_basis):])
    return mat_transpose(cols) if cols else []


def _assert_weight_axioms(n_matrix, w: WeightFiltration):
    lo = min(w.levels)
    for k in range(lo, w.top + 1):
        for v in w.basis_at(k):
            img = mat_vec(n_matrix, v)
            if not in_span(w.basis_at(k - 2), img) and any(not x.is_zero() for x in img):
                raise AssertionError(f"weight filtration: N W_{k} not inside W_{k-2}")
    for k in range(0, w.top + 1):
        upper = w.basis_at(k)
        lower = w.basis_at(k - 1)
        reps = extend_basis(lower, upper)
        dim_k = len(reps)
        lower_neg = w.basis_at(-k - 1)
        upper_neg = w.basis_at(-k)
        dim_neg = span_dim(upper_neg) - span_dim(lower_neg)
        if dim_k != dim_neg:
            raise AssertionError(f"weight filtration: graded dims differ at +-{k}")
        if k == 0 or dim_k == 0:
            continue
        power = mat_identity(len(n_matrix))
        for _ in range(k):
            power = mat_mul(power, n_matrix)
        mapped = list(lower_neg)
        rank_before = span_dim(mapped)
        for rep in reps:
            mapped.append(mat_vec(power, rep))
        if span_dim(mapped) - rank_before != dim_k:
            raise AssertionError(f"weight filtration: N^{k} not injective on Gr_{k}")
        for rep in reps:
            if not in_span(w.basis_at(-k), mat_vec(power, rep)):
                raise AssertionError(f"weight filtration: N^{k} Gr_{k} escapes W_{-k}")


# ---------------------------------------------------------------------------
# canonical frame construction
# ---------------------------------------------------------------------------


def _jordan_chevalley(m):
    """Exact S + N decomposition via CRT projectors; needs a split spectrum."""
    dim = len(m)
    if dim == 0:
        return [], [], []
    cp = charpoly(m, "x")
    eigs = split_eigenvalues(cp)
    if eigs is None:
        raise NonSplitSpectrum(
            "graded residue action has eigenvalues outside Q(i)",
            {"charpoly": repr(cp)},
        )
    distinct = []
    for e in eigs:
        if all(e != d for d, _ in distinct):
            distinct.append((e, eigs.count(e)))
    distinct.sort(key=lambda em: sort_key(em[0]))
    s_mat = [[QQI.zero] * dim for _ in range(dim)]
    projectors = []
    for lam, mult in distinct:
        lin = UniPoly("x", [-lam, QQI.one]) ** mult
        rest = cp.exact_div(lin)
        g, a, b = poly_xgcd(rest, lin)
        if g.degree != 0:
            raise AssertionError("projector construction failed")
        h = (a * rest).scale(QQI.one / g.constant())
        proj = _poly_of_matrix(h, m)
        projectors.append((lam, mult, proj))
        s_mat = [[x + lam * y for x, y in zip(rs, rp)] for rs, rp in zip(s_mat, proj)]
    n_mat = [[x - y for x, y in zip(rm, rs)] for rm, rs in zip(m, s_mat)]
    _assert_split(m, s_mat, n_mat)
    return s_mat, n_mat, projectors


def _poly_of_matrix(p: UniPoly, m):
    dim = len(m)
    acc = [[QQI.zero] * dim for _ in range(dim)]
    for c in reversed(p.coeffs):
        acc = mat_mul(acc, m)
        for i in range(dim):
            acc[i][i] = acc[i][i] + c
    return acc


def _assert_split(m, s, n):
    dim = len(m)
    if mat_mul(s, n) != mat_mul(n, s):
        raise AssertionError("S and N do not commute")
    power = mat_copy(n)
    for _ in range(dim):
        power = mat_mul(power, n)
    if any(not x.is_zero() for row in power for x in row):
        raise AssertionError("nilpotent part is not nilpotent")
    for i in range(dim):
        for j in range(dim):
            if s[i][j] + n[i][j] != m[i][j]:
                raise AssertionError("S + N does not reassemble the action")


def _flag_subspaces(point: ParabolicPoint, rank):
    """Bases of F^0 > F^1 > ... > F^{l-1} in fiber coordinates."""
    full = [[QQI.one if i == j else QQI.zero for j in range(rank)] for i in range(rank)]
    return [full] + [list(level) for level in point.flag]


def _check_flag_invariance(subspaces, action):
    """First (level, vector) where action(vector) leaves its flag level."""
    for j, basis in enumerate(subspaces):
        for v in basis:
            img = mat_vec(action, v)
            if not in_span(basis, img):
                return {"level": j, "vector": [format_qi(x) for x in v]}
    return None


def _build_finite_frame(data: PunctureData, rank):
    point = data.point
    res = data.residue
    subspaces = _flag_subspaces(point, rank)
    witness = _check_flag_invariance(subspaces, res)
    if witness is not None:
        data.compat_ok = False
        data.compat_witness = witness
        return
    _assemble_frame(data, rank, subspaces, res, a_split=None)


def _build_infinity_frame(data: PunctureData, rank, a_matrix, b_matrix):
    point = data.point
    subspaces = _flag_subspaces(point, rank)
    for name, action in (("A", a_matrix), ("B", b_matrix)):
        witness = _check_flag_invariance(subspaces, action)
        if witness is not None:
            data.compat_ok = False
            data.compat_witness = dict(witness, operator=name)
    if not data.compat_ok:
        # Claim 2.1: A preserves the flag iff each level splits into eigenspace
        # intersections; record the splitting witness too.
        split = eigenspace_filtration_split(a_matrix, point.flag)
        data.claim21_ok = split["ok"]
        data.claim21_witness = split.get("witness")
        return
    split = eigenspace_filtration_split(a_matrix, point.flag)
    data.claim21_ok = split["ok"]
    data.claim21_witness = split.get("witness")
    if not split["ok"]:
        data.compat_ok = False
        data.compat_witness = {"operator": "A", "claim21": split.get("witness")}
        return
    _assemble_frame(data, rank, subspaces, b_matrix, a_split=split["eigenspaces"])


def _assemble_frame(data: PunctureData, rank, subspaces, graded_action, a_split):
    """Build the canonical frame column by column, deepest flag level first."""
    levels = len(subspaces)
    columns = []
    col_j, col_lam, col_k, col_a = [], [], [], []
    for j in range(levels - 1, -1, -1):
        upper = subspaces[j]
        lower = subspaces[j + 1] if j + 1 < levels else []
        if a_split is None:
            groups = [(None, upper, lower)]
        else:
            groups = []
            for a_val, eigbasis in a_split:
                up = intersect_spans(upper, eigbasis)
                lo = intersect_spans(lower, eigbasis) if lower else []
                groups.append((a_val, up, lo))
        level_cols = []
        for a_val, up, lo in groups:
            reps = extend_basis(lo, up)
            if not reps:
                continue
            induced = _induced_action(graded_action, lower, lo, reps, a_split is not None)
            s_mat, n_mat, projectors = _jordan_chevalley(induced)
            for lam, mult, proj in projectors:
                block_cols = colspace_reduce([list(col) for col in mat_transpose(proj)])
                # block_cols: basis of the projector image in rep coordinates
                n_block = _restrict_matrix(n_mat, block_cols)
                wf = weight_filtration(n_block)
                ordered = _weight_adapted_basis(wf, n_block)
                for combo, k_val in ordered:
                    block_vec = [QQI.zero] * len(reps)
                    for c, bc in zip(combo, block_cols):
                        block_vec = [x + c * y for x, y in zip(block_vec, bc)]
                    vec = [QQI.zero] * rank
                    for c, rep in zip(block_vec, reps):
                        vec = [x + c * y for x, y in zip(vec, rep)]
                    level_cols.append((vec, j, lam, k_val, a_val))
        for vec, jj, lam, k_val, a_val in level_cols:
            columns.append(vec)
            col_j.append(jj)
            col_lam.append(lam)
            col_k.append(k_val)
            col_a.append(a_val)
    if len(columns) != rank:
        raise AssertionError("canonical frame construction lost columns")
    data.frame = mat_transpose(columns)
    data.j_of = col_j
    data.lam_of = col_lam
    data.k_of = col_k
    data.a_of = col_a
    data.split = _record_split(data, rank, subspaces, graded_action, a_split)


def _induced_action(action, lower_full, lower_group, reps, grouped):
    """Graded action on span(lower + reps)/span(lower) in rep coordinates.

    When grouped by A-eigenspaces the action still preserves each group, so
    coordinates relative to (lower_group + reps) suffice.
    """
    kill = lower_group if grouped else lower_full
    basis = list(kill) + list(reps)
    a = mat_transpose(basis) if basis else []
    cols = []
    for rep in reps:
        img = mat_vec(action, rep)
        sol = mat_solve(a, img)
        if sol is None:
            raise AssertionError("graded action escapes the flag piece")
        cols.append(sol[len(kill):])
    return mat_transpose(cols) if cols else []


def _restrict_matrix(m, basis_combos):
    """Matrix of m restricted to span(basis_combos), in that basis."""
    if not basis_combos:
        return []
    a = mat_transpose(basis_combos)
    cols = []
    for b in basis_combos:
        img = mat_vec(m, b)
        sol = mat_solve(a, img)
        if sol is None:
            raise AssertionError("restriction leaves the span")
        cols.append(sol)
    return mat_transpose(cols)


def _weight_adapted_basis(wf: WeightFiltration, n_block):
    """Basis combos of the block ordered by ascending weight level k."""
    out = []
    prev_basis = []
    lo = min(wf.levels) - 1
    for k in range(lo, wf.top + 1):
        cur = wf.basis_at(k)
        reps = extend_basis(prev_basis, cur)
        for rep in reps:
            out.append((rep, k))
        prev_basis = cur
    return out


def _record_split(data, rank, subspaces, graded_action, a_split) -> ResidueSplit:
    """Re-express the per-level splits in the final frame coordinates."""
    levels = []
    frame_cols = mat_transpose(data.frame)
    for j, weight in enumerate(data.point.weights):
        cols = [s for s in range(rank) if data.j_of[s] == j]
        if not cols:
            levels.append(LevelData(j, weight, 0, [], [], [], [], []))
            continue
        lower = subspaces[j + 1] if j + 1 < len(subspaces) else []
        reps = [frame_cols[s] for s in cols]
        induced = _induced_action(graded_action, lower, lower, reps, False)
        s_mat = [[QQI.zero] * len(cols) for _ in cols]
        for a, s in enumerate(cols):
            s_mat[a][a] = data.lam_of[s]
        n_mat = [[x - y for x, y in zip(ri, rs)] for ri, rs in zip(induced, s_mat)]
        _assert_split(induced, s_mat, n_mat)
        eigs = sorted((data.lam_of[s] for s in cols), key=sort_key)
        blocks = []
        for lam in sorted(set((e.re, e.im) for e in eigs)):
            lam_val = GaussianRational(lam[0], lam[1])
            bcols = [s for s in cols if data.lam_of[s] == lam_val]
            idx = [cols.index(s) for s in bcols]
            nb = [[n_mat[a][b] for b in idx] for a in idx]
            blocks.append(
                GradedBlock(j, lam_val, bcols, nb, [data.k_of[s] for s in bcols])
            )
        levels.append(LevelData(j, weight, len(cols), induced, s_mat, n_mat, eigs, blocks))
    return ResidueSplit(data.index, levels)


# ---------------------------------------------------------------------------
# the analysis pass
# ---------------------------------------------------------------------------


def _analyze(bundle: ParabolicHiggsBundle):
    rank = bundle.rank
    bundle.data = []
    # infinity puncture first
    theta_inf = _theta_infinity_raw(bundle)
    a_matrix = [[f.at_infinity().eval(QQI.zero) * qi(2) for f in row] for row in theta_inf]
    cp = charpoly(a_matrix, "x")
    if split_eigenvalues(cp) is None:
        raise NonSplitSpectrum("leading term at infinity has eigenvalues outside Q(i)", {"charpoly": repr(cp)})
    if not _is_semisimple(a_matrix, cp):
        raise NonSemisimpleLeading("leading term at infinity is not semisimple", {"matrix": _mat_str(a_matrix)})
    b_matrix = [[_w_coeff(f, 1) for f in row] for row in theta_inf]
    comm = [
        [x - y for x, y in zip(ra, rb)]
        for ra, rb in zip(mat_mul(a_matrix, b_matrix), mat_mul(b_matrix, a_matrix))
    ]
    if any(not x.is_zero() for row in comm for x in row):
        raise CentralizerError(
            "order-one coefficient does not commute with the leading term",
            {"A": _mat_str(a_matrix), "B": _mat_str(b_matrix)},
        )

    inf_data = PunctureData(0, bundle.punctures[0])
    inf_data.a_matrix = a_matrix
    inf_data.b_matrix = b_matrix
    _build_infinity_frame(inf_data, rank, a_matrix, b_matrix)
    bundle.data.append(inf_data)

    for i, point in enumerate(bundle.punctures[1:], start=1):
        p_data = PunctureData(i, point)
        c = point.location.finite
        p_data.residue = [[_laurent_at(f, c, -1) for f in row] for row in bundle.higgs]
        _build_finite_frame(p_data, rank)
        bundle.data.append(p_data)

    # express A, B in the canonical infinity frame, keep theta there too
    if inf_data.frame is not None:
        frame = inf_data.frame
        frame_inv = mat_inverse(frame)
        inf_data.a_matrix = mat_mul(mat_mul(frame_inv, a_matrix), frame)
        inf_data.b_matrix = mat_mul(mat_mul(frame_inv, b_matrix), frame)
        frame_rf = [[RationalFunction.const(VAR_Z, x) for x in row] for row in frame]
        frame_rf_inv = [[RationalFunction.const(VAR_Z, x) for x in row] for row in frame_inv]
        theta_frame = mat_mul(mat_mul(frame_rf_inv, theta_inf), frame_rf)
        bundle.theta_infinity_frame = [[f.at_infinity() for f in row] for row in theta_frame]
        _check_couplings_infinity(bundle, inf_data)

    for i in range(1, len(bundle.punctures)):
        if bundle.data[i].frame is not None:
            _check_couplings_finite(bundle, bundle.data[i])


def _is_semisimple(m, cp) -> bool:
    radical = squarefree_part(cp)
    test = _poly_of_matrix(radical, m)
    return all(x.is_zero() for row in test for x in row)


def _w_coeff(f: RationalFunction, k: int):
    return laurent_coeffs(f, PointOnLine(INFINITY), k, k)[0]


def _laurent_at(f: RationalFunction, c, k: int):
    return f.laurent(c, k, k)[0]


def _mat_str(m):
    return [[format_qi(x) for x in row] for row in m]


def _check_couplings_finite(bundle, data: PunctureData):
    """Entries joining distinct residue-eigenvalue blocks must stay regular."""
    c = data.point.location.finite
    frame = bundle.frame_rf(data.index)
    frame_inv = mat_inverse(frame, _RF_Z)
    theta_frame = mat_mul(mat_mul(frame_inv, bundle.higgs), frame)
    r = bundle.rank
    for s in range(r):
        for t in range(r):
            if data.lam_of[s] == data.lam_of[t]:
                continue
            entry = theta_frame[t][s]
            v = entry.valuation(c)
            if v is not None and v < 0:
                data.coupling_ok = False
                data.coupling_witness = {
                    "puncture": data.index,
                    "from_column": s,
                    "to_column": t,
                    "valuation": v,
                }
                return


def _check_couplings_infinity(bundle, data: PunctureData):
    """Within an A-block, different S-eigenvalue columns may not couple in B."""
    theta_w = bundle.theta_infinity_frame  # entries already live in the w chart
    r = bundle.rank
    for s in range(r):
        for t in range(r):
            if s == t:
                continue
            if data.a_of[s] != data.a_of[t]:
                continue  # A-block separation is automatic (B centralizes A)
            if data.lam_of[s] == data.lam_of[t]:
                continue
            coeff = theta_w[t][s].laurent(QQI.zero, 1, 1)[0]
            if not coeff.is_zero():
                data.coupling_ok = False
                data.coupling_witness = {
                    "puncture": 0,
                    "from_column": s,
                    "to_column": t,
                    "b_entry": format_qi(coeff),
                }
                return


# ---------------------------------------------------------------------------
# spec operations
# ---------------------------------------------------------------------------


def residue(bundle: ParabolicHiggsBundle, i: int):
    """Residue matrix at puncture i; at i=0 the dz/z-coefficient B at infinity."""
    if i == 0:
        return mat_copy(bundle.data[0].b_matrix)
    c = bundle.punctures[i].location.finite
    return [[_laurent_at(f, c, -1) for f in row] for row in bundle.higgs]


def check_residue_compatibility(bundle: ParabolicHiggsBundle):
    """Per-puncture verdicts that the residue preserves every flag level."""
    out = {}
    for i, data in enumerate(bundle.data):
        out[i] = {"ok": data.compat_ok}
        if not data.compat_ok:
            out[i]["witness"] = data.compat_witness
    return out


def eigenspace_filtration_split(a_matrix, flag):
    """Split every flag level into eigenspace intersections, or find a witness."""
    rank = len(a_matrix)
    cp = charpoly(a_matrix, "x")
    eigs = split_eigenvalues(cp)
    if eigs is None:
        raise NonSplitSpectrum("cannot split the spectrum over Q(i)", {"charpoly": repr(cp)})
    distinct = sorted(set((e.re, e.im) for e in eigs))
    eigenspaces = []
    for re, im in distinct:
        lam = GaussianRational(re, im)
        shifted = [[a_matrix[r][c] - (lam if r == c else QQI.zero) for c in range(rank)] for r in range(rank)]
        eigenspaces.append((lam, kernel_basis(shifted)))
    result = {"ok": True, "eigenspaces": eigenspaces, "levels": []}
    for level_index, basis in enumerate(flag):
        pieces = [intersect_spans(basis, eig) for _, eig in eigenspaces]
        union = [v for piece in pieces for v in piece]
        if span_dim(union) != span_dim(basis):
            witness = next(v for v in basis if not in_span(union, v))
            result["ok"] = False
            result["witness"] = {
                "level": level_index + 1,
                "vector": [format_qi(x) for x in witness],
            }
            break
        result["levels"].append(
            {
                "level": level_index + 1,
                "pieces": [(lam, piece) for (lam, _), piece in zip(eigenspaces, pieces)],
            }
        )
    return result


def graded_residue_split(bundle: ParabolicHiggsBundle, i: int) -> ResidueSplit:
    data = bundle.data[i]
    if data.frame is None:
        raise EngineError(
            "graded split unavailable: residue incompatible with the flag",
            {"puncture": i, "witness": data.compat_witness},
        )
    return data.split


def frame_indices(bundle: ParabolicHiggsBundle):
    """Table of (j(s), k(s), lambda_i^s) for every puncture and frame column."""
    rows = []
    for i, data in enumerate(bundle.data):
        if data.frame is None:
            continue
        for s in range(bundle.rank):
            rows.append(
                FrameIndexRow(
                    i,
                    s,
                    data.j_of[s],
                    data.k_of[s],
                    data.lam_of[s],
                    data.a_of[s] if i == 0 else None,
                )
            )
    return rows


def check_assumptions(bundle: ParabolicHiggsBundle):
    """Items (1)-(3) of the spectral assumption, with witnesses."""
    failures = []
    blocked = []
    for i, data in enumerate(bundle.data):
        if data.frame is None:
            blocked.append({"puncture": i, "reason": "residue incompatible with flag"})
            continue
        for level in data.split.levels:
            zeros = [s for b in level.blocks if b.eigenvalue.is_zero() for s in b.columns]
            if i == 0:
                if zeros:
                    failures.append(
                        {
                            "item": 1,
                            "puncture": 0,
                            "level": level.level,
                            "columns": zeros,
                        }
                    )
                continue
            if level.weight == 0:
                for block in level.blocks:
                    if not block.eigenvalue.is_zero():
                        continue
                    if any(not x.is_zero() for row in block.nilpotent for x in row):
                        vec = _nilpotent_witness(block)
                        failures.append(
                            {
                                "item": 2,
                                "puncture": i,
                                "level": level.level,
                                "nilpotent": _mat_str(block.nilpotent),
                                "vector": vec,
                            }
                        )
            else:
                if zeros:
                    failures.append(
                        {
                            "item": 3,
                            "puncture": i,
                            "level": level.level,
                            "columns": zeros,
                        }
                    )
    return {"ok": not failures and not blocked, "failures": failures, "blocked": blocked}


def _nilpotent_witness(block: GradedBlock):
    for col in range(len(block.columns)):
        column = [block.nilpotent[r][col] for r in range(len(block.columns))]
        if any(not x.is_zero() for x in column):
            return {"column": block.columns[col]}
    return None


def connection_side_data(bundle: ParabolicHiggsBundle):
    """Per frame vector: beta weight, residue eigenvalue of the connection, and A."""
    rows = []
    for i, data in enumerate(bundle.data):
        if data.frame is None:
            continue
        for s in range(bundle.rank):
            alpha = data.weight_of_column(s)
            lam = data.lam_of[s]
            beta = Fraction(alpha) - 2 * lam.re
            res_conn = lam * qi(2) + qi(beta)
            rows.append(
                {
                    "puncture": i,
                    "column": s,
                    "alpha": alpha,
                    "lambda": lam,
                    "beta": beta,
                    "residue_connection": res_conn,
                }
            )
    return {"table": rows, "A": mat_copy(bundle.data[0].a_matrix)}
