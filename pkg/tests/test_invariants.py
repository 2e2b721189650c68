"""Cross-module property tests from the invariants lists."""

import random
from fractions import Fraction

from parahiggs.bundle import (
    check_residue_compatibility,
    eigenspace_filtration_split,
    frame_indices,
    parse_bundle,
)
from parahiggs.corpus import ex1_document, random_corpus
from parahiggs.lattice import build_FG
from parahiggs.linalg import in_span, mat_inverse, mat_mul, mat_vec
from parahiggs.qi import GaussianRational, format_qi, qi


def _random_invertible(rng, size):
    while True:
        m = [
            [GaussianRational(rng.randint(-2, 2), rng.randint(-1, 1)) for _ in range(size)]
            for _ in range(size)
        ]
        try:
            mat_inverse(m)
            return m
        except ZeroDivisionError:
            continue


class TestClaim21Equivalence:
    def test_split_iff_flag_preserved(self):
        """A preserves a flag level iff the level splits into eigenspace
        intersections, over random diagonalizable A and random flags."""
        rng = random.Random(23)
        for _ in range(60):
            size = rng.choice([2, 3, 4])
            eigs = [qi(rng.choice([-2, -1, 1, 2, 3])) for _ in range(size)]
            q = _random_invertible(rng, size)
            q_inv = mat_inverse(q)
            diag = [[eigs[i] if i == j else qi(0) for j in range(size)] for i in range(size)]
            a = mat_mul(mat_mul(q, diag), q_inv)
            dim = rng.randint(1, size - 1)
            basis = []
            while len(basis) < dim:
                v = [GaussianRational(rng.randint(-2, 2)) for _ in range(size)]
                if any(not x.is_zero() for x in v) and not in_span(basis, v):
                    basis.append(v)
            preserved = all(in_span(basis, mat_vec(a, v)) for v in basis)
            split = eigenspace_filtration_split(a, [basis])
            assert split["ok"] == preserved


class TestFrameIndexInvariance:
    def test_constant_conjugation(self):
        """The (j, k, lambda) multisets per puncture are invariant under a
        global constant change of the affine frame."""
        rng = random.Random(31)
        docs = [ex1_document()] + random_corpus(4, base_seed=555)
        for doc in docs:
            bundle = parse_bundle(doc)
            rank = bundle.rank
            q = _random_invertible(rng, rank)
            conjugated = _conjugate_document(doc, q)
            other = parse_bundle(conjugated)
            for i in range(len(bundle.punctures)):
                table_a = sorted(
                    (r.level, r.weight_index, format_qi(r.eigenvalue))
                    for r in frame_indices(bundle)
                    if r.puncture == i
                )
                table_b = sorted(
                    (r.level, r.weight_index, format_qi(r.eigenvalue))
                    for r in frame_indices(other)
                    if r.puncture == i
                )
                assert table_a == table_b, (i, table_a, table_b)


def _conjugate_document(doc, q):
    """Rewrite the document for the frame change e -> Q e."""
    from parahiggs.exprparse import parse_ratfunc
    from parahiggs.linalg import mat_inverse as mi, mat_mul as mm, mat_vec
    from parahiggs.ratfunc import RationalFunction, FIELD_RF_Z
    from parahiggs.poly import VAR_Z

    rank = doc["rank"]
    theta = [[parse_ratfunc(e) for e in row] for row in doc["higgs"]]
    q_rf = [[RationalFunction.const(VAR_Z, x) for x in row] for row in q]
    q_inv = mi(q_rf, FIELD_RF_Z)
    new_theta = mm(mm(q_inv, theta), q_rf)
    q_inv_const = mi(q)
    new_doc = {"rank": rank, "punctures": [], "higgs": [[_rf_expr(e) for e in row] for row in new_theta]}
    for p in doc["punctures"]:
        from parahiggs.exprparse import parse_scalar

        flag = []
        for level in p.get("flag", []):
            vectors = []
            for vec in level:
                coords = [parse_scalar(x) for x in vec]
                vectors.append([format_qi(x) for x in mat_vec(q_inv_const, coords)])
            flag.append(vectors)
        new_doc["punctures"].append(
            {"location": p["location"], "weights": list(p["weights"]), "flag": flag}
        )
    return new_doc


def _rf_expr(f):
    """Render a rational function as a parseable expression string."""
    num = _poly_expr(f.num)
    if f.den.degree == 0 and format_qi(f.den.constant()) == "1":
        return num
    return f"({num})/({_poly_expr(f.den)})"


def _poly_expr(p):
    if p.is_zero():
        return "0"
    parts = []
    for k, c in enumerate(p.coeffs):
        if c.is_zero():
            continue
        if k == 0:
            parts.append(f"({format_qi(c)})")
        elif k == 1:
            parts.append(f"({format_qi(c)})*z")
        else:
            parts.append(f"({format_qi(c)})*z^{k}")
    return " + ".join(parts)


class TestLatticeInclusions:
    def test_f_inside_g_twisted(self):
        """F is a subsheaf of G(z_1 + ... + z_n): twist comparison."""
        for doc in [ex1_document()] + random_corpus(6, base_seed=901):
            bundle = parse_bundle(doc)
            f_lat, g_lat = build_FG(bundle)
            # at infinity: F = G; at finite punctures: m_F >= m_G - 1
            assert f_lat.twists[0] == g_lat.twists[0]
            for i in range(1, len(bundle.punctures)):
                for s in range(bundle.rank):
                    assert f_lat.twist(i, s) >= g_lat.twist(i, s) - 1
