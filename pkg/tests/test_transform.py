"""Transform engine: spectral curve, hypercohomology, theta-hat, parabolic."""

from fractions import Fraction

import pytest

from parahiggs.bipoly import BiPoly
from parahiggs.bundle import parse_bundle
from parahiggs.errors import DegenerateTransform
from parahiggs.lattice import build_FG, theta_matrix
from parahiggs.linalg import charpoly, mat_det, mat_inverse, mat_mul
from parahiggs.points import INFINITY, PointOnLine
from parahiggs.poly import UniPoly, VAR_ETA, VAR_Z, VAR_ZETA
from parahiggs.qi import qi, format_qi
from parahiggs.ratfunc import FIELD_RF_ZETA, RationalFunction
from parahiggs.transform import (
    GenericFiber,
    _fiber_mult_matrix,
    _interpolate_fallback,
    charpoly_identity_at_fiber,
    gamma_sections,
    hypercoh_dims,
    spectral_curve,
    transform,
    transformed_parabolic,
    transformed_rank,
    transformed_residues,
)

from test_bundle import ex1_document


def ex1():
    return parse_bundle(ex1_document())


def two_puncture_diagonal_document():
    """Distinct eigenvalues at two punctures; theta stays diagonal."""
    return {
        "rank": 2,
        "punctures": [
            {"location": "1", "weights": ["0"], "flag": []},
            {"location": "-1", "weights": ["0"], "flag": []},
            {"location": "inf", "weights": ["0"], "flag": []},
        ],
        "higgs": [
            ["1/2 + 1/(z-1) + 2/(z+1)", "0"],
            ["0", "-1/2 - 1/(z-1) - 3/(z+1)"],
        ],
    }


class TestSpectralCurve:
    def test_ex1_polynomial(self):
        curve = spectral_curve(ex1())
        # ((zeta-1)(z-1) - 2)((zeta+1)(z-1) + 2) up to normalization:
        # expands to (z+1)^2 - zeta^2 (z-1)^2, constant coefficient 1
        expected = BiPoly(
            VAR_Z,
            VAR_ZETA,
            {
                (0, 0): qi(1),
                (1, 0): qi(2),
                (2, 0): qi(1),
                (0, 2): qi(-1),
                (1, 2): qi(2),
                (2, 2): qi(-1),
            },
        )
        assert curve.p == expected
        assert all(curve.checks.values())

    def test_ex1_branches(self):
        curve = spectral_curve(ex1())
        table = {format_qi(b.eigenvalue): b for b in curve.branch_table}
        assert set(table) == {"1", "-1"}
        # zeta - 1 ~ 2/(z-1): leading 2, subleading 1
        assert format_qi(table["1"].leading) == "2"
        assert format_qi(table["1"].subleading) == "1"
        assert format_qi(table["-1"].leading) == "-2"
        assert format_qi(table["-1"].subleading) == "-1"

    def test_constant_higgs_flags_vertical(self):
        doc = ex1_document()
        doc["higgs"] = [["1", "0"], ["0", "2"]]
        curve = spectral_curve(parse_bundle(doc))
        assert not curve.checks["no_vertical_zeta"]


class TestHypercohDims:
    def test_ex1_fibers(self):
        b = ex1()
        for zeta in (qi(0), qi(1), qi(-1), qi(5), qi(0, 1)):
            assert hypercoh_dims(b, zeta).as_tuple() == (0, 2, 0)
        assert hypercoh_dims(b, PointOnLine(INFINITY)).as_tuple() == (0, 2, 0)

    def test_cech_model_agrees(self):
        from parahiggs.cech import ComplexModel

        b = ex1()
        f, g = build_FG(b)
        cm = ComplexModel(b, f, g)
        for zeta in (qi(0), qi(1), qi(3, 2)):
            assert cm.fiber_dims(zeta) == hypercoh_dims(b, zeta).as_tuple()
        assert cm.fiber_dims_infinity() == (0, 2, 0)

    def test_flat_factor_reports_singular(self):
        doc = ex1_document()
        doc["higgs"] = [["1", "0"], ["0", "2"]]
        b = parse_bundle(doc)
        from parahiggs.lattice import SheafLattice

        triv = SheafLattice(2, ((0, 0), (0, 0)))
        tm = theta_matrix(b, triv, triv)
        out = hypercoh_dims(b, qi(2), lattices=(triv, triv), tm=tm)
        assert out.singular and out.h0 >= 1


class TestTransformedRank:
    def test_ex1(self):
        assert transformed_rank(ex1()) == 2

    def test_zero_residue_degenerate(self):
        doc = ex1_document()
        doc["higgs"] = [["1/2", "0"], ["0", "-1/2"]]
        b = parse_bundle(doc)
        with pytest.raises(DegenerateTransform):
            transformed_rank(b)

    def test_additivity_over_punctures(self):
        b = parse_bundle(two_puncture_diagonal_document())
        assert transformed_rank(b) == 4

    def test_kernel_deduction(self):
        doc = {
            "rank": 2,
            "punctures": [
                {"location": "1", "weights": ["0"], "flag": []},
                {"location": "2", "weights": ["0"], "flag": []},
                {"location": "inf", "weights": ["0"], "flag": []},
            ],
            "higgs": [
                ["1/2 + 3/(z-2)", "0"],
                ["0", "-1/2 + 1/(z-1) + 5/(z-2)"],
            ],
        }
        b = parse_bundle(doc)
        # z=1 has residue diag(0, 1): one kernel direction at weight zero
        assert transformed_rank(b) == (2 - 1) + 2


class TestTransformEx1:
    def test_closed_form(self):
        b = ex1()
        t = transform(b)
        assert t.rank == 2
        assert [format_qi(p) for p in t.p_points] == ["-1", "1"]
        assert t.provenance == "generic-spectral"
        assert t.checks["charpoly_identity"]
        # theta-hat is conjugate to diag(-1/2 - 1/(zeta-1), -1/2 + 1/(zeta+1));
        # trace and determinant pin the conjugacy class exactly
        K = FIELD_RF_ZETA
        zeta = RationalFunction(UniPoly.gen(VAR_ZETA))
        one = K.one
        d1 = -one / qi(2) - one / (zeta - 1)
        d2 = -one / qi(2) + one / (zeta + 1)
        trace = t.theta_hat[0][0] + t.theta_hat[1][1]
        det = mat_det(t.theta_hat, K)
        assert trace == d1 + d2
        assert det == d1 * d2

    def test_residue_data(self):
        t = transform(ex1())
        res = transformed_residues(t)
        eigs_at = {
            label: sorted((format_qi(v), m) for v, m in data["eigenvalues"])
            for label, data in res.residues.items()
        }
        assert eigs_at["1"] == [("-1", 1), ("0", 1)]
        assert eigs_at["-1"] == [("0", 1), ("1", 1)]
        # A~ = (1/2) Id exactly; B~ eigenvalues {1, -1}
        assert res.a_tilde == [[qi(Fraction(1, 2)), qi(0)], [qi(0), qi(Fraction(1, 2))]]
        b_cp = charpoly(res.b_tilde, VAR_ETA)
        assert b_cp == UniPoly(VAR_ETA, [qi(-1), qi(0), qi(1)])
        assert res.a_tilde_semisimple
        assert res.a_tilde_eigenvalues_expected

    def test_charpoly_identity_direct_at_fibers(self):
        t = transform(ex1())
        for zeta0 in (qi(2), qi(3, 1), qi(0)):
            assert charpoly_identity_at_fiber(t, zeta0)

    def test_regular_away_from_divisor(self):
        t = transform(ex1())
        for row in t.theta_hat:
            for e in row:
                v = e.valuation(qi(5))
                assert v is None or v >= 0


def repeated_entry_document():
    """Both diagonal entries equal: non-squarefree spectral polynomial, so the
    generic cokernel is not cyclic and the interpolation fallback engages."""
    return {
        "rank": 2,
        "punctures": [
            {"location": "1", "weights": ["0"], "flag": []},
            {"location": "inf", "weights": ["0"], "flag": []},
        ],
        "higgs": [
            ["1/2 + 1/(z-1)", "0"],
            ["0", "1/2 + 1/(z-1)"],
        ],
    }


class TestTwoPathAgreement:
    def test_fallback_engages_and_crosschecks(self):
        b = parse_bundle(repeated_entry_document())
        t = transform(b)
        assert t.provenance == "interpolated"
        assert t.checks["fallback_crosschecked"]
        assert t.checks["charpoly_identity"]
        res = transformed_residues(t)
        assert res.a_tilde_semisimple

    def test_smith_oracle_agrees_with_companion(self):
        # fiberwise multiplication matrix from the Smith oracle has the same
        # characteristic polynomial as the companion-path theta_hat fiber
        b = parse_bundle(two_puncture_diagonal_document())
        t = transform(b)
        assert t.provenance == "generic-spectral"
        f_lat, g_lat = t.lattices
        tm = theta_matrix(b, f_lat, g_lat)
        from parahiggs.smith import smith_pid
        from parahiggs.qi import QQI

        for zeta0 in (qi(2, 1), qi(3)):
            m = tm.affine_at(zeta0)
            res = smith_pid(m, VAR_Z, QQI, track=())
            oracle_cp = UniPoly.const(VAR_ETA, qi(1))
            for d in res.diag:
                if d.degree > 0:
                    # char poly of mult-by-(-z/2) on Q(i)[z]/(d)
                    block = UniPoly(
                        VAR_ETA,
                        [c * qi(-2) ** k for k, c in enumerate(d.coeffs)],
                    ).scale(qi(Fraction(-1, 2)) ** d.degree)
                    oracle_cp = oracle_cp * block
            theta_fiber = [[e.eval(zeta0) for e in row] for row in t.theta_hat]
            assert charpoly(theta_fiber, VAR_ETA) == oracle_cp.monic()

    def test_block_structure(self):
        b = parse_bundle(two_puncture_diagonal_document())
        t = transform(b)
        assert t.rank == 4
        assert t.checks["charpoly_identity"]
        # char poly factors as the product of the per-entry spectral factors
        res = transformed_residues(t)
        assert res.a_tilde_semisimple and res.a_tilde_eigenvalues_expected
        cp = charpoly(res.a_tilde, VAR_ETA)
        from parahiggs.roots import split_eigenvalues

        eigs = sorted(format_qi(e) for e in split_eigenvalues(cp))
        assert eigs == ["-1/2", "-1/2", "1/2", "1/2"]


def t_points(bundle):
    from parahiggs.transform import _a_eigenvalues

    return _a_eigenvalues(bundle)


class TestTransformedParabolic:
    def test_ex1_sweep(self):
        b = ex1()
        t = transform(b)
        tp = transformed_parabolic(b, t)
        assert tp.divisor == ["-1", "1", "inf"]
        assert tp.jump_candidates == [Fraction(0)]
        for label, pt in tp.points.items():
            assert pt.weights == [Fraction(0)]
            assert pt.residue_preserves
        assert all(tp.checks.values())
        # at the finite transformed punctures one direction survives on (0,1)
        assert tp.points["1"].flag_dims == [2, 1]
        assert tp.points["inf"].flag_dims == [2, 0]

    def test_positive_weight_moves_jump_to_infinity(self):
        doc = ex1_document()
        doc["punctures"][0]["weights"] = ["1/3"]
        b = parse_bundle(doc)
        t = transform(b)
        tp = transformed_parabolic(b, t)
        assert tp.points["inf"].weights == [Fraction(1, 3)]
        assert tp.points["inf"].flag_dims == [2, 2, 0]
        assert all(tp.checks.values())

    def test_degenerate_refused_upstream(self):
        doc = ex1_document()
        doc["higgs"] = [["1/2", "0"], ["0", "-1/2"]]
        b = parse_bundle(doc)
        with pytest.raises(DegenerateTransform):
            transformed_rank(b)
