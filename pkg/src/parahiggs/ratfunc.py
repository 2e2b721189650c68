"""Rational functions num/den over an exact field, with canonical reduced form.

Canonical form: gcd(num, den) = 1 and den monic, so equal functions compare
equal and hash equal. A RatFuncField adapter turns these into coefficients for
the generic polynomial and matrix code (giving Q(i)(zeta), Q(i)(z), ...).
"""

from __future__ import annotations

from .poly import UniPoly, poly_gcd
from .points import PointOnLine
from .qi import QQI


class RationalFunction:
    __slots__ = ("num", "den")

    def __init__(self, num: UniPoly, den: UniPoly = None, reduce=True):
        if den is None:
            den = UniPoly.const(num.var, num.field.one, num.field)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.var != den.var:
            raise ValueError("numerator/denominator variable mismatch")
        if reduce:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_poly(cls, p: UniPoly):
        return cls(p)

    @classmethod
    def const(cls, var, c, field=QQI):
        return cls(UniPoly.const(var, c, field))

    @classmethod
    def gen(cls, var, field=QQI):
        return cls(UniPoly.gen(var, field))

    @classmethod
    def zero_fn(cls, var, field=QQI):
        return cls(UniPoly.zero(var, field))

    # -- structure -----------------------------------------------------------

    @property
    def var(self):
        return self.num.var

    @property
    def field(self):
        return self.num.field

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def as_poly(self) -> UniPoly:
        if not self.is_polynomial():
            raise ValueError(f"not a polynomial: {self!r}")
        return self.num.scale(self.field.one / self.den.constant())

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, UniPoly):
            return RationalFunction(other)
        try:
            c = self.field.coerce(other)
        except TypeError:
            return None
        return RationalFunction.const(self.var, c, self.field)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero():
            return o
        if o.is_zero():
            return self
        # Henrici: reduce through gcd of the denominators, keeping gcds small
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        if self.den.degree == 0:
            num = self.num.scale(self.field.one / self.den.constant()) * o.den + o.num
            return RationalFunction(num, o.den, reduce=False)
        if o.den.degree == 0:
            num = o.num.scale(self.field.one / o.den.constant()) * self.den + self.num
            return RationalFunction(num, self.den, reduce=False)
        g = poly_gcd(self.den, o.den)
        if g.degree == 0:
            num = self.num * o.den + o.num * self.den
            den = self.den * o.den
            return RationalFunction(num, den, reduce=False)._monic_normalized()
        d1 = self.den.exact_div(g)
        d2 = o.den.exact_div(g)
        num = self.num * d2 + o.num * d1
        if num.is_zero():
            return RationalFunction.zero_fn(self.var, self.field)
        h = poly_gcd(num, g)
        if h.degree > 0:
            num = num.exact_div(h)
            g = g.exact_div(h)
        return RationalFunction(num, g * d1 * d2, reduce=False)._monic_normalized()

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return RationalFunction.zero_fn(self.var, self.field)
        # cross-cancel before multiplying
        n1, d2 = _cross_cancel(self.num, o.den)
        n2, d1 = _cross_cancel(o.num, self.den)
        return RationalFunction(n1 * n2, d1 * d2, reduce=False)._monic_normalized()

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by the zero function")
        if self.is_zero():
            return self
        n1, on = _cross_cancel(self.num, o.num)
        od, d1 = _cross_cancel(o.den, self.den)
        return RationalFunction(n1 * od, d1 * on, reduce=False)._monic_normalized()

    def _monic_normalized(self):
        lead = self.den.leading()
        if lead == self.field.one:
            return self
        inv = self.field.one / lead
        return RationalFunction(self.num.scale(inv), self.den.scale(inv), reduce=False)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return (RationalFunction.const(self.var, self.field.one, self.field) / self) ** (-k)
        return RationalFunction(self.num**k, self.den**k)

    # -- evaluation & expansion ----------------------------------------------

    def eval(self, x):
        d = self.den.eval(x)
        if d.is_zero():
            raise ZeroDivisionError(f"pole at {x}")
        return self.num.eval(x) / d

    def eval_point(self, c: PointOnLine):
        """Value at a point of P^1 (at infinity: constant term of the w-expansion)."""
        if c.is_infinite:
            return self.at_infinity().eval(self.field.zero)
        return self.eval(c.finite)

    def valuation(self, c) -> int | None:
        """ord_c, None for the zero function. c is a field element."""
        if self.is_zero():
            return None
        lin = UniPoly(self.var, [-c, self.field.one], self.field)
        return _ord_at(self.num, lin) - _ord_at(self.den, lin)

    def valuation_prime(self, q: UniPoly) -> int | None:
        """ord at the prime (q) for monic nonconstant q."""
        if self.is_zero():
            return None
        return _ord_at(self.num, q) - _ord_at(self.den, q)

    def valuation_infinity(self) -> int | None:
        """Order in w = 1/var at infinity (deg den - deg num)."""
        if self.is_zero():
            return None
        return self.den.degree - self.num.degree

    def substitute(self, other: "RationalFunction") -> "RationalFunction":
        """self(other(t)) as a rational function in other's variable."""
        var, field = other.var, other.field
        num = RationalFunction.zero_fn(var, field)
        for c in reversed(self.num.coeffs):
            num = num * other + RationalFunction.const(var, c, field)
        den = RationalFunction.zero_fn(var, field)
        for c in reversed(self.den.coeffs):
            den = den * other + RationalFunction.const(var, c, field)
        return num / den

    def at_infinity(self, var_w: str = "w") -> "RationalFunction":
        """Expansion variable change f(1/w) as a rational function of w."""
        n, d = self.num, self.den
        k = max(n.degree, d.degree)
        nw = UniPoly(var_w, list(reversed([n.coeff(j) for j in range(k + 1)])), self.field)
        dw = UniPoly(var_w, list(reversed([d.coeff(j) for j in range(k + 1)])), self.field)
        return RationalFunction(nw, dw)

    def laurent(self, c, k_min: int, k_max: int):
        """Laurent coefficients of (var-c)^k for k in [k_min, k_max] at finite c."""
        t_num = self.num.taylor_shift(c)
        t_den = self.den.taylor_shift(c)
        return _laurent_of_quotient(t_num, t_den, k_min, k_max, self.field)

    def __repr__(self):
        if self.den.degree == 0 and self.den.constant() == self.field.one:
            return f"({self.num!r})"
        return f"({self.num!r})/({self.den!r})"


def _cross_cancel(num: UniPoly, den: UniPoly):
    """Divide out gcd(num, den); both inputs nonzero."""
    if num.degree == 0 or den.degree == 0:
        return num, den
    g = poly_gcd(num, den)
    if g.degree > 0:
        return num.exact_div(g), den.exact_div(g)
    return num, den


def _reduce(num: UniPoly, den: UniPoly):
    if num.is_zero():
        one = UniPoly.const(den.var, den.field.one, den.field)
        return num, one
    if num.degree > 0 and den.degree > 0:
        g = poly_gcd(num, den)
        if g.degree > 0:
            num = num.exact_div(g)
            den = den.exact_div(g)
    lead = den.leading()
    if not (lead == den.field.one):
        inv = den.field.one / lead
        num = num.scale(inv)
        den = den.scale(inv)
    return num, den


def _ord_at(p: UniPoly, q: UniPoly) -> int:
    """Multiplicity of the monic factor q in p (p nonzero)."""
    count = 0
    while True:
        quo, rem = p.divmod(q)
        if not rem.is_zero():
            return count
        count += 1
        p = quo
        if p.is_zero():
            raise AssertionError("zero polynomial in _ord_at")


def _laurent_of_quotient(num: UniPoly, den: UniPoly, k_min, k_max, field):
    """Laurent coefficients of num/den at 0 for exponent range [k_min, k_max]."""
    if num.is_zero():
        return [field.zero] * (k_max - k_min + 1)
    vn = _low_order(num)
    vd = _low_order(den)
    lead = vn - vd
    nhat = UniPoly(num.var, num.coeffs[vn:], field)
    dhat = UniPoly(den.var, den.coeffs[vd:], field)
    need = k_max - lead + 1
    if need <= 0:
        return [field.zero] * (k_max - k_min + 1)
    inv = _series_inverse(dhat, need, field)
    series = []  # coefficient of t^(lead + j)
    for j in range(need):
        acc = field.zero
        for a in range(j + 1):
            acc = acc + nhat.coeff(a) * inv[j - a]
        series.append(acc)
    out = []
    for k in range(k_min, k_max + 1):
        j = k - lead
        out.append(series[j] if 0 <= j < len(series) else field.zero)
    return out


def _low_order(p: UniPoly) -> int:
    for k, c in enumerate(p.coeffs):
        if not c.is_zero():
            return k
    raise AssertionError("zero polynomial has no low order")


def _series_inverse(d: UniPoly, n: int, field):
    """First n coefficients of 1/d as a power series; d(0) != 0."""
    d0 = d.coeff(0)
    if d0.is_zero():
        raise ZeroDivisionError("series inverse of a function vanishing at 0")
    inv0 = field.one / d0
    out = [inv0]
    for j in range(1, n):
        acc = field.zero
        for a in range(1, j + 1):
            acc = acc + d.coeff(a) * out[j - a]
        out.append(-acc * inv0)
    return out


def laurent_coeffs(f: RationalFunction, c: PointOnLine, k_min: int, k_max: int):
    """Laurent expansion data of f at a point of P^1.

    At a finite point c the k-th entry is the coefficient of (var-c)^k; at
    infinity it is the coefficient of w^k for w = 1/var.
    """
    if k_min > k_max:
        raise ValueError("empty expansion range")
    if c.is_infinite:
        g = f.at_infinity()
        return _laurent_of_quotient(g.num, g.den, k_min, k_max, f.field)
    return f.laurent(c.finite, k_min, k_max)


class RatFuncField:
    """Field adapter whose elements are RationalFunction in a fixed variable."""

    def __init__(self, var, base=QQI):
        self.var = var
        self.base = base
        self.name = f"{base.name}({var})"
        self.zero = RationalFunction.zero_fn(var, base)
        self.one = RationalFunction.const(var, base.one, base)

    def coerce(self, x):
        if isinstance(x, RationalFunction):
            if x.var != self.var:
                raise TypeError(f"rational function in {x.var}, expected {self.var}")
            return x
        if isinstance(x, UniPoly):
            if x.var != self.var:
                raise TypeError(f"polynomial in {x.var}, expected {self.var}")
            return RationalFunction(x)
        return RationalFunction.const(self.var, self.base.coerce(x), self.base)


FIELD_RF_Z = RatFuncField("z")
FIELD_RF_W = RatFuncField("w")
FIELD_RF_ZETA = RatFuncField("zeta")
