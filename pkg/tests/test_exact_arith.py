"""Exact arithmetic layer: Gaussian rationals, polynomials, roots, Laurent, Smith."""

from fractions import Fraction
import random

import pytest
from hypothesis import given, settings, strategies as st

from parahiggs.linalg import mat_det, mat_identity, mat_inverse, mat_mul, charpoly
from parahiggs.points import INFINITY, PointOnLine
from parahiggs.poly import UniPoly, VAR_Z, poly_gcd, lagrange_interpolate
from parahiggs.qi import QQI, GaussianRational, qi
from parahiggs.ratfunc import RationalFunction, laurent_coeffs
from parahiggs.roots import poly_gaussian_roots
from parahiggs.smith import Place, smith_local, smith_pid, module_span_basis
from parahiggs.exprparse import parse_ratfunc, parse_scalar


def P(*coeffs):
    return UniPoly(VAR_Z, [qi(c) if isinstance(c, (int, Fraction)) else c for c in coeffs])


def RF(num, den=None):
    return RationalFunction(num, den)


small_rationals = st.fractions(
    min_value=-4, max_value=4, max_denominator=3
)
small_qi = st.builds(GaussianRational, small_rationals, small_rationals)


class TestGaussianRational:
    def test_field_axioms_spotcheck(self):
        a = qi(Fraction(1, 2), Fraction(-3, 4))
        b = qi(2, 1)
        assert (a + b) - b == a
        assert (a * b) / b == a
        assert a * (QQI.one / a) == QQI.one

    def test_canonical_and_hash(self):
        assert qi(Fraction(2, 4)) == qi(Fraction(1, 2))
        assert hash(qi(1, 1)) == hash(qi(Fraction(2, 2), Fraction(3, 3)))

    def test_norm_conjugate(self):
        a = qi(3, 4)
        assert a.norm() == 25
        assert a * a.conjugate() == qi(25)

    @given(small_qi, small_qi)
    def test_mul_norm_multiplicative(self, a, b):
        assert (a * b).norm() == a.norm() * b.norm()

    def test_format_parse_roundtrip(self):
        for val in [qi(0), qi(1), qi(-1, 1), qi(Fraction(1, 2), Fraction(-3, 4)), qi(0, 5)]:
            assert parse_scalar(str(val)) == val


class TestUniPoly:
    def test_divmod_exact(self):
        p = P(-1, 0, 1)  # z^2 - 1
        d = P(-1, 1)  # z - 1
        q, r = p.divmod(d)
        assert r.is_zero()
        assert q == P(1, 1)

    def test_gcd_monic(self):
        a = P(-1, 0, 1) * P(2, 1)
        b = P(-1, 1) * P(2, 1)
        g = poly_gcd(a, b)
        assert g == (P(2, 1) * P(-1, 1)).monic()

    def test_taylor_shift(self):
        p = P(0, 0, 1)  # z^2
        q = p.taylor_shift(qi(1))  # (z+1)^2
        assert q == P(1, 2, 1)

    def test_lagrange(self):
        pts = [(qi(k), qi(k * k)) for k in range(3)]
        p = lagrange_interpolate(VAR_Z, pts)
        assert p == P(0, 0, 1)


class TestGaussianRoots:
    def test_z2_plus_1(self):
        roots, cof = poly_gaussian_roots(P(1, 0, 1))
        assert roots == [(qi(0, -1), 1), (qi(0, 1), 1)]
        assert cof.degree == 0

    def test_z2_minus_2(self):
        roots, cof = poly_gaussian_roots(P(-2, 0, 1))
        assert roots == []
        assert cof == P(-2, 0, 1)

    def test_derived_product(self):
        # (z-1)^2 (z+i): expand, then re-factor by divisor enumeration
        p = P(-1, 1) * P(-1, 1) * P(qi(0, 1), qi(1))
        roots, cof = poly_gaussian_roots(p)
        assert dict((str(r), m) for r, m in roots) == {"1": 2, "-i": 1}
        assert cof.degree == 0

    def test_rational_and_scaled_roots(self):
        # roots 1/2 and -3i/2 with a leading coefficient
        p = P(Fraction(-1, 2), 1) * P(qi(0, Fraction(3, 2)), qi(1)) * P(qi(7))
        roots, _ = poly_gaussian_roots(p)
        got = {str(r) for r, _ in roots}
        assert got == {"1/2", "-3/2*i"}

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.sampled_from([0, 1, -1, 2]), min_size=0, max_size=3), st.booleans())
    def test_multiset_union_property(self, root_ints, with_irreducible):
        # roots(p*q) equals the multiset union of roots of the factors
        p = P(1)
        expected = {}
        for r in root_ints:
            p = p * P(qi(-r), qi(1))
            expected[str(qi(r))] = expected.get(str(qi(r)), 0) + 1
        if with_irreducible:
            p = p * P(-2, 0, 1)
        roots, cof = poly_gaussian_roots(p)
        assert {str(r): m for r, m in roots} == expected
        assert cof.degree == (2 if with_irreducible else 0)


class TestLaurent:
    def test_simple_pole(self):
        f = RF(P(1), P(-1, 1))  # 1/(z-1)
        assert f.laurent(qi(1), -2, 0) == [qi(0), qi(1), qi(0)]

    def test_expansion_at_infinity(self):
        # 1/2 + 1/(z-1) at infinity in w = 1/z: [1/2, 1, 1]
        f = RF(P(Fraction(1, 2))) + RF(P(1), P(-1, 1))
        assert laurent_coeffs(f, PointOnLine(INFINITY), 0, 2) == [
            qi(Fraction(1, 2)),
            qi(1),
            qi(1),
        ]

    def test_zero_function(self):
        f = RationalFunction.zero_fn(VAR_Z)
        assert laurent_coeffs(f, PointOnLine(qi(5)), -3, 3) == [qi(0)] * 7

    @settings(max_examples=20, deadline=None)
    @given(small_qi, small_qi)
    def test_additivity(self, a, b):
        f = RF(P(a), P(-1, 1))
        g = RF(P(b, b), P(-1, 0, 1))
        c = PointOnLine(qi(2))
        la = laurent_coeffs(f, c, -2, 3)
        lb = laurent_coeffs(g, c, -2, 3)
        ls = laurent_coeffs(f + g, c, -2, 3)
        assert ls == [x + y for x, y in zip(la, lb)]

    def test_cauchy_product_window(self):
        f = RF(P(1), P(-1, 1))
        g = RF(P(0, 1), P(1, 1))
        c = PointOnLine(qi(3))
        lf = laurent_coeffs(f, c, 0, 6)
        lg = laurent_coeffs(g, c, 0, 6)
        lp = laurent_coeffs(f * g, c, 0, 6)
        for k in range(7):
            acc = qi(0)
            for a in range(k + 1):
                acc = acc + lf[a] * lg[k - a]
            assert lp[k] == acc


def _rf_matrix(entries):
    return [[RF(P(*e)) if isinstance(e, tuple) else e for e in row] for row in entries]


class TestSmithLocal:
    def test_diag_example(self):
        m = [[RF(P(-1, 1)), RF(P(0))], [RF(P(0)), RF(P(1))]]
        vals, (U, V) = __import__("parahiggs.smith", fromlist=["smith_local_valuations"]).smith_local_valuations(m, PointOnLine(qi(1)))
        assert vals == [0, 1]

    def test_nontrivial_column_op(self):
        # [[z, 1], [0, z]] at 0: valuations [0, 2]
        m = _rf_matrix([[(0, 1), (1,)], [(0,), (0, 1)]])
        place = Place.at_point(VAR_Z, qi(0))
        res = smith_local(m, place)
        assert sorted(res.vals) == [0, 2]

    def test_identity(self):
        m = _rf_matrix([[(1,), (0,)], [(0,), (1,)]])
        res = smith_local(m, Place.at_point(VAR_Z, qi(7)))
        assert sorted(res.vals) == [0, 0]

    def test_transforms_are_unit_and_diagonalize(self):
        m = _rf_matrix([[(0, 1), (1,)], [(0,), (0, 1)]])
        place = Place.at_point(VAR_Z, qi(0))
        res = smith_local(m, place)
        d = mat_mul(mat_mul(res.U, m), res.V)
        for i in range(2):
            for j in range(2):
                if i != j:
                    assert d[i][j].is_zero()
                else:
                    assert place.val(d[i][j]) == res.vals[i]
        for t in (res.U, res.V):
            assert place.val(mat_det(t, __import__("parahiggs.ratfunc", fromlist=["RatFuncField"]).RatFuncField(VAR_Z))) == 0
        assert mat_det(mat_mul(res.U, res.U_inv), __import__("parahiggs.ratfunc", fromlist=["RatFuncField"]).RatFuncField(VAR_Z)) == RF(P(1))

    def test_valuation_sum_is_det_order(self):
        rng = random.Random(7)
        from parahiggs.ratfunc import RatFuncField

        fld = RatFuncField(VAR_Z)
        for _ in range(10):
            m = [
                [RF(P(*[rng.randint(-2, 2) for _ in range(3)])) for _ in range(3)]
                for _ in range(3)
            ]
            det = mat_det(m, fld)
            if det.is_zero():
                continue
            for c in (qi(0), qi(1), qi(0, 1)):
                place = Place.at_point(VAR_Z, c)
                ordc = place.val(det)
                res = smith_local(m, place)
                assert sum(res.vals) == ordc

    def test_infinity_place(self):
        m = [[RF(P(0, 1)), RF(P(0))], [RF(P(0)), RF(P(1), P(0, 1))]]
        res = smith_local(m, Place.at_point(VAR_Z, PointOnLine(INFINITY)))
        assert sorted(res.vals) == [-1, 1]


class TestSmithPID:
    def test_invariant_factors(self):
        z = UniPoly.gen(VAR_Z)
        zero = UniPoly.zero(VAR_Z)
        m = [[z * z, zero], [zero, z]]
        res = smith_pid(m, VAR_Z)
        assert [d.degree for d in res.diag] == [1, 2]
        assert (res.diag[1] % res.diag[0]).is_zero()

    def test_transforms(self):
        rng = random.Random(3)
        for _ in range(8):
            m = [
                [P(*[rng.randint(-2, 2) for _ in range(2)]) for _ in range(3)]
                for _ in range(3)
            ]
            res = smith_pid(m, VAR_Z)
            prod = mat_mul(mat_mul(res.U, m), res.V)
            for i in range(3):
                for j in range(3):
                    expect = res.diag[i] if i == j else UniPoly.zero(VAR_Z)
                    assert prod[i][j] == expect
            checkU = mat_mul(res.U, res.U_inv)
            checkV = mat_mul(res.V, res.V_inv)
            for chk in (checkU, checkV):
                for i in range(3):
                    for j in range(3):
                        want = P(1) if i == j else UniPoly.zero(VAR_Z)
                        assert chk[i][j] == want

    def test_module_span_basis(self):
        z = UniPoly.gen(VAR_Z)
        one = P(1)
        zero = UniPoly.zero(VAR_Z)
        gens = [[z, zero], [z * z, zero], [zero, one]]
        basis = module_span_basis(gens, VAR_Z)
        assert len(basis) == 2
        degs = sorted((b[0].degree, b[1].degree) for b in basis)
        assert degs == [(-1, 0), (1, -1)]


class TestLinalg:
    def test_inverse_and_det(self):
        m = [[qi(1), qi(2)], [qi(3), qi(4)]]
        inv = mat_inverse(m)
        assert mat_mul(m, inv) == mat_identity(2)
        assert mat_det(m) == qi(-2)

    def test_charpoly(self):
        m = [[qi(2), qi(1)], [qi(0), qi(3)]]
        cp = charpoly(m, "x")
        assert cp == UniPoly("x", [qi(6), qi(-5), qi(1)])


class TestExprParse:
    def test_entry(self):
        f = parse_ratfunc("1/2 + 1/(z-1)")
        assert f.eval(qi(2)) == qi(Fraction(3, 2))

    def test_powers_and_i(self):
        f = parse_ratfunc("(z - i)^2 * 3/4")
        assert f.eval(qi(0, 1)) == qi(0)
        assert f.eval(qi(0)) == qi(Fraction(-3, 4))

    def test_negative_power(self):
        f = parse_ratfunc("z^-2")
        assert f == RF(P(1), P(0, 0, 1))

    def test_errors(self):
        from parahiggs.errors import ParseError

        for bad in ["z +", "q", "1/(", "z^i", "2 ** 3"]:
            with pytest.raises(ParseError):
                parse_ratfunc(bad)

    def test_scalar_rejects_variable(self):
        from parahiggs.errors import ParseError

        with pytest.raises(ParseError):
            parse_scalar("z+1")


class TestGcdFastPath:
    def test_modular_certificate_agrees_with_exact(self):
        # the one-prime coprimality shortcut must never contradict Euclid
        rng = random.Random(77)
        from parahiggs.poly import _certified_coprime

        for _ in range(120):
            deg_a = rng.randint(1, 5)
            deg_b = rng.randint(1, 5)
            a = P(*[Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(deg_a)], 1)
            b = P(*[Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(deg_b)], 1)
            if rng.random() < 0.4:
                common = P(rng.randint(-3, 3), 1)
                a = a * common
                b = b * common
            g = poly_gcd(a, b)
            if _certified_coprime(a, b):
                assert g.degree == 0

    def test_shared_factors_still_found(self):
        a = P(-1, 1) * P(2, 1) * P(0, 0, 1)
        b = P(-1, 1) * P(5, 1)
        assert poly_gcd(a, b) == P(-1, 1)
