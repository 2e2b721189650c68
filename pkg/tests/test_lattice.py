"""Lattice layer: case tables, alpha families, twisted map, correspondence."""

from fractions import Fraction

import pytest

from parahiggs.bundle import parse_bundle
from parahiggs.errors import AssumptionViolated, AxiomViolation, NotAMorphism
from parahiggs.lattice import (
    RParabolicFamily,
    Rparabolic_to_parabolic,
    build_FG,
    build_FG_alpha,
    check_theta_alpha,
    jump_candidates,
    parabolic_to_Rparabolic,
    puncture_family,
    theta_matrix,
)
from parahiggs.poly import UniPoly, VAR_Z
from parahiggs.qi import qi

from test_bundle import ex1_document, exn_document


def ex1():
    return parse_bundle(ex1_document())


def jordan3_document():
    """Rank 3, one finite puncture with a full nilpotent coupling, lambda = 2."""
    return {
        "rank": 3,
        "punctures": [
            {"location": "0", "weights": ["0"], "flag": []},
            {"location": "inf", "weights": ["0"], "flag": []},
        ],
        "higgs": [
            ["1 + 2/z", "1/z", "0"],
            ["0", "1 + 2/z", "1/z"],
            ["0", "0", "1 + 2/z"],
        ],
    }


class TestBuildFG:
    def test_ex1_twists(self):
        b = ex1()
        f, g = build_FG(b)
        # finite puncture (index 1): alpha=0, lambda != 0, k=0 >= -1: twist both
        assert f.twists[1] == (1, 1)
        assert g.twists[1] == (1, 1)
        # infinity: alpha=0, k=0 >= -1: g twist w^2, f = g
        assert g.twists[0] == (2, 2)
        assert f.twists[0] == (2, 2)

    def test_positive_weight_untwisted(self):
        doc = ex1_document()
        doc["punctures"][0]["weights"] = ["1/3"]
        b = parse_bundle(doc)
        f, g = build_FG(b)
        assert f.twists[1] == (0, 0)
        assert g.twists[1] == (0, 0)
        # infinity weight 0: w-twists stay (2,2)
        assert g.twists[0] == (2, 2)

    def test_lambda_zero_case(self):
        # two punctures so that B stays invertible while z=1 has a zero eigenvalue
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
        f, g = build_FG(b)
        d1 = b.puncture_data(1)
        zero_col = next(s for s in range(2) if d1.lam_of[s].is_zero())
        other = 1 - zero_col
        # lambda = 0 (N trivial): f = e, g = (z-z_i) e since k = 0 >= -1
        assert f.twists[1][zero_col] == 0
        assert g.twists[1][zero_col] == 1
        assert f.twists[1][other] == 1
        assert g.twists[1][other] == 1

    def test_deep_weight_vector_untwisted_in_g(self):
        b = parse_bundle(jordan3_document())
        d = b.puncture_data(1)
        f, g = build_FG(b)
        deep = next(s for s in range(3) if d.k_of[s] == -2)
        top = next(s for s in range(3) if d.k_of[s] == 2)
        assert g.twists[1][deep] == 0  # k < -1 keeps the frame vector
        assert g.twists[1][top] == 1
        assert f.twists[1][deep] == 0
        assert f.twists[1][top] == 1

    def test_refuses_on_assumption_failure(self):
        b = parse_bundle(exn_document())
        with pytest.raises(AssumptionViolated):
            build_FG(b)


class TestAlphaFamilies:
    def test_alpha_zero_is_base(self):
        b = ex1()
        f0, g0 = build_FG(b)
        fa, ga = build_FG_alpha(b, Fraction(0))
        assert fa == f0 and ga == g0

    def test_ex1_alpha_half_twists_everything(self):
        b = ex1()
        f0, g0 = build_FG(b)
        fa, ga = build_FG_alpha(b, Fraction(1, 2))
        assert fa.twists[1] == (2, 2)  # one more (z-1)
        assert fa.twists[0] == (3, 3)  # one more w at infinity
        assert f0.includes(fa) and g0.includes(ga)

    def test_deletion_case_never_twists(self):
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
        d1 = b.puncture_data(1)
        zero_col = next(s for s in range(2) if d1.lam_of[s].is_zero())
        f0, _ = build_FG(b)
        fa, _ = build_FG_alpha(b, Fraction(2, 3))
        assert fa.twists[1][zero_col] == f0.twists[1][zero_col]
        assert fa.twists[1][1 - zero_col] == f0.twists[1][1 - zero_col] + 1

    def test_left_continuity_at_weights(self):
        doc = ex1_document()
        doc["punctures"][0]["weights"] = ["1/3"]
        b = parse_bundle(doc)
        f_at, _ = build_FG_alpha(b, Fraction(1, 3))
        f_before, _ = build_FG_alpha(b, Fraction(1, 4))
        f_after, _ = build_FG_alpha(b, Fraction(1, 2))
        assert f_at == f_before
        assert f_after != f_at
        assert f_at.includes(f_after)

    def test_candidates(self):
        doc = ex1_document()
        doc["punctures"][0]["weights"] = ["1/3"]
        b = parse_bundle(doc)
        assert jump_candidates(b) == [Fraction(0), Fraction(1, 3)]


class TestThetaMatrix:
    def test_ex1_symbolic(self):
        b = ex1()
        f, g = build_FG(b)
        tm = theta_matrix(b, f, g)
        z = UniPoly.gen(VAR_Z)
        half = qi(Fraction(1, 2))
        # m0 = diag((z-1)/2 + 1, -(z-1)/2 - 1), m1 = -(1/2)(z-1) Id
        assert tm.m0[0][0] == (z - 1).scale(half) + 1
        assert tm.m0[1][1] == ((z - 1).scale(half) + 1).scale(qi(-1))
        assert tm.m0[0][1].is_zero() and tm.m0[1][0].is_zero()
        assert tm.m1[0][0] == (z - 1).scale(-half)
        assert tm.m1[1][1] == (z - 1).scale(-half)

    def test_ex1_specialization(self):
        b = ex1()
        f, g = build_FG(b)
        tm = theta_matrix(b, f, g)
        at0 = tm.affine_at(qi(0))
        z = UniPoly.gen(VAR_Z)
        assert at0[0][0] == (z + 1).scale(qi(Fraction(1, 2)))

    def test_zero_higgs_trivial_lattices(self):
        from parahiggs.lattice import SheafLattice

        doc = ex1_document()
        doc["higgs"] = [["0", "0"], ["0", "0"]]
        b = parse_bundle(doc)
        triv = SheafLattice(2, ((0, 0), (0, 0)))
        tm = theta_matrix(b, triv, triv)
        # m0 = 0; m1 = -(1/2) Id * (z-1): the zeta part carries the twist factor
        assert all(e.is_zero() for row in tm.m0 for e in row)
        assert tm.m1[0][1].is_zero() and tm.m1[1][0].is_zero()
        z = UniPoly.gen(VAR_Z)
        assert tm.m1[0][0] == (z - 1).scale(qi(Fraction(-1, 2)))

    def test_not_a_morphism_detected(self):
        b = ex1()
        f, g = build_FG(b)
        # shrink G at the finite puncture: theta no longer lands inside
        bad = type(g)(g.rank, (g.twists[0], (3, 3)))
        with pytest.raises(NotAMorphism):
            theta_matrix(b, f, bad)

    def test_infinity_chart_regular(self):
        b = ex1()
        f, g = build_FG(b)
        tm = theta_matrix(b, f, g)
        for row in tm.inf0 + tm.inf1:
            for e in row:
                v = e.valuation(qi(0))
                assert v is None or v >= 0


class TestCheckThetaAlpha:
    def test_ex1_all_candidates(self):
        b = ex1()
        for a in jump_candidates(b):
            assert check_theta_alpha(b, a)["ok"]

    def test_jordan3_all_candidates(self):
        b = parse_bundle(jordan3_document())
        for a in jump_candidates(b) + [Fraction(1, 2)]:
            assert check_theta_alpha(b, a)["ok"]

    def test_zero_higgs_morphism(self):
        from parahiggs.lattice import SheafLattice

        doc = ex1_document()
        doc["higgs"] = [["0", "0"], ["0", "0"]]
        b = parse_bundle(doc)
        triv = SheafLattice(2, ((0, 0), (0, 0)))
        theta_matrix(b, triv, triv)  # no NotAMorphism

    def test_blocked_on_assumption_failure(self):
        b = parse_bundle(exn_document())
        out = check_theta_alpha(b, Fraction(0))
        assert not out["ok"] and "blocked" in out


class TestRParabolic:
    def test_trivial_flag(self):
        b = ex1()
        fam = puncture_family(b, 1)
        assert fam.segments == [(Fraction(0), (0, 0))]
        assert fam.jump_set() == [Fraction(0)]
        out = Rparabolic_to_parabolic(fam)
        assert out["weights"] == [Fraction(0)]
        assert out["flag_columns"] == [(0, 1)]

    def test_two_step_flag(self):
        doc = {
            "rank": 2,
            "punctures": [
                {
                    "location": "1",
                    "weights": ["0", "1/2"],
                    "flag": [[["1", "0"]]],
                },
                {"location": "inf", "weights": ["0"], "flag": []},
            ],
            "higgs": [
                ["1/2 + 1/(z-1)", "0"],
                ["0", "-1/2 - 1/(z-1)"],
            ],
        }
        b = parse_bundle(doc)
        fam = puncture_family(b, 1)
        # deepest-first frame ordering: column 0 spans F^1
        assert fam.segments[0] == (Fraction(0), (0, 0))
        assert fam.segments[1] == (Fraction(1, 2), (0, 1))
        out = Rparabolic_to_parabolic(fam)
        assert out["weights"] == [Fraction(0), Fraction(1, 2)]
        assert out["flag_columns"] == [(0, 1), (0,)]

    def test_period_rule(self):
        b = ex1()
        fam = puncture_family(b, 1)
        # weight-0 jump: just above 0 the lattice is already once-twisted
        assert fam.twists_at(Fraction(1, 2)) == (1, 1)
        assert fam.twists_at(Fraction(1)) == (1, 1)
        assert fam.twists_at(Fraction(3, 2)) == (2, 2)
        assert fam.twists_at(Fraction(-1, 2)) == (0, 0)
        assert fam.twists_at(Fraction(-1)) == (-1, -1)

    def test_roundtrip_random(self):
        import random

        from parahiggs.bundle import ParabolicPoint
        from parahiggs.points import PointOnLine

        rng = random.Random(5)
        pool = sorted({Fraction(a, b) for b in (2, 3, 4, 5, 6, 7) for a in range(b)})
        for _ in range(100):
            rank = rng.choice([2, 3, 4])
            levels = rng.randint(1, min(3, rank))
            # strict flags: every level must carry at least one column
            j_of = list(range(levels)) + [rng.randint(0, levels - 1) for _ in range(rank - levels)]
            rng.shuffle(j_of)
            weights = sorted(rng.sample(pool, levels))
            point = ParabolicPoint(PointOnLine(qi(1)), [None] * (levels - 1), weights)
            fam = parabolic_to_Rparabolic(point, j_of)
            out = Rparabolic_to_parabolic(fam)
            assert out["weights"] == weights
            for level, cols in enumerate(out["flag_columns"]):
                assert set(cols) == {s for s in range(rank) if j_of[s] >= level}

    def test_axiom_violations(self):
        base = (0, 0)
        bad_increasing = RParabolicFamily(None, 2, base, [(Fraction(0), (0, 0)), (Fraction(1, 2), (-1, 0))])
        with pytest.raises(AxiomViolation):
            Rparabolic_to_parabolic(bad_increasing)
        bad_jump = RParabolicFamily(None, 2, base, [(Fraction(3, 2), (0, 0))])
        with pytest.raises(AxiomViolation):
            Rparabolic_to_parabolic(bad_jump)
        not_jumping = RParabolicFamily(
            None, 2, base, [(Fraction(0), (0, 0)), (Fraction(1, 2), (0, 0))]
        )
        with pytest.raises(AxiomViolation):
            Rparabolic_to_parabolic(not_jumping)
