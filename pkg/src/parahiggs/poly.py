"""Dense univariate polynomials over an arbitrary exact field.

The coefficient field is a small adapter object with ``zero``, ``one`` and
``coerce``; elements themselves carry the arithmetic through operators. This
lets the same code serve Q(i)[z], Q(i)[w], Q(i)[zeta] and, by nesting with
rational functions, Q(i)(zeta)[z].
"""

from __future__ import annotations

from .qi import QQI

# Conventional variable tags used across the engine.
VAR_Z = "z"
VAR_W = "w"
VAR_ZETA = "zeta"
VAR_ETA = "eta"
VAR_T = "t"


class UniPoly:
    """coeffs[k] is the coefficient of var**k; trailing zeros are stripped."""

    __slots__ = ("var", "coeffs", "field")

    def __init__(self, var, coeffs, field=QQI):
        cs = [field.coerce(c) if not _same_kind(c, field) else c for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.var = var
        self.coeffs = tuple(cs)
        self.field = field

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, var, field=QQI):
        return cls(var, [], field)

    @classmethod
    def const(cls, var, c, field=QQI):
        return cls(var, [c], field)

    @classmethod
    def gen(cls, var, field=QQI):
        return cls(var, [field.zero, field.one], field)

    # -- structure -----------------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def leading(self):
        if not self.coeffs:
            return self.field.zero
        return self.coeffs[-1]

    def constant(self):
        if not self.coeffs:
            return self.field.zero
        return self.coeffs[0]

    def coeff(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self.field.zero

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.var == other.var and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.var, self.coeffs))

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other):
        if self.var != other.var:
            raise ValueError(f"variable mismatch: {self.var} vs {other.var}")

    def __add__(self, other):
        if not isinstance(other, UniPoly):
            other = UniPoly.const(self.var, self.field.coerce(other), self.field)
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(
            self.var, [self.coeff(k) + other.coeff(k) for k in range(n)], self.field
        )

    __radd__ = __add__

    def __neg__(self):
        return UniPoly(self.var, [-c for c in self.coeffs], self.field)

    def __sub__(self, other):
        if not isinstance(other, UniPoly):
            other = UniPoly.const(self.var, self.field.coerce(other), self.field)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, UniPoly):
            return self.scale(self.field.coerce(other))
        self._check(other)
        if self.is_zero() or other.is_zero():
            return UniPoly.zero(self.var, self.field)
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return UniPoly(self.var, out, self.field)

    __rmul__ = __mul__

    def scale(self, c):
        return UniPoly(self.var, [a * c for a in self.coeffs], self.field)

    def shift_up(self, k: int):
        """Multiply by var**k."""
        if self.is_zero() or k == 0:
            return self if k >= 0 else self
        return UniPoly(self.var, [self.field.zero] * k + list(self.coeffs), self.field)

    def __pow__(self, k: int):
        out = UniPoly.const(self.var, self.field.one, self.field)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def divmod(self, other):
        """Exact field divmod; other must be nonzero."""
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = [self.field.zero] * max(0, len(self.coeffs) - len(other.coeffs) + 1)
        rem = list(self.coeffs)
        dlead = other.leading()
        dn = other.degree
        while len(rem) - 1 >= dn and rem:
            k = len(rem) - 1 - dn
            c = rem[-1] / dlead
            q[k] = c
            for j, b in enumerate(other.coeffs):
                rem[k + j] = rem[k + j] - c * b
            while rem and rem[-1].is_zero():
                rem.pop()
        return (
            UniPoly(self.var, q, self.field),
            UniPoly(self.var, rem, self.field),
        )

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other):
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ValueError("division is not exact")
        return q

    def monic(self):
        if self.is_zero():
            return self
        lead = self.leading()
        return UniPoly(self.var, [c / lead for c in self.coeffs], self.field)

    def derivative(self):
        if self.degree < 1:
            return UniPoly.zero(self.var, self.field)
        out = []
        for k in range(1, len(self.coeffs)):
            c = self.coeffs[k]
            # k * c via repeated addition is wasteful; coerce k into the field
            out.append(c * _int_in_field(self.field, k))
        return UniPoly(self.var, out, self.field)

    def eval(self, x):
        """Horner evaluation at a field element."""
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, other):
        """self(other) where other is a UniPoly (possibly in another variable)."""
        acc = UniPoly.zero(other.var, other.field)
        for c in reversed(self.coeffs):
            acc = acc * other + UniPoly.const(other.var, c, other.field)
        return acc

    def taylor_shift(self, a):
        """Return p(var + a) in the same variable."""
        shifted = UniPoly(self.var, [a, self.field.one], self.field)
        return self.compose(shifted)

    def reversed_coeffs(self):
        """var**deg * p(1/var), i.e. the coefficient list reversed."""
        return UniPoly(self.var, list(reversed(self.coeffs)), self.field)

    def map_coeffs(self, fn, field=None, var=None):
        return UniPoly(var or self.var, [fn(c) for c in self.coeffs], field or self.field)

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            if k == 0:
                parts.append(f"({c})")
            elif k == 1:
                parts.append(f"({c})*{self.var}")
            else:
                parts.append(f"({c})*{self.var}^{k}")
        return " + ".join(parts)


def _same_kind(c, field):
    return isinstance(c, type(field.zero))


def _int_in_field(field, k: int):
    out = field.zero
    one = field.one
    neg = k < 0
    for _ in range(abs(k)):
        out = out + one
    return -out if neg else out


def _content_normalized(p: UniPoly) -> UniPoly:
    """Rescale by a nonzero constant to curb coefficient swell in gcd loops.

    Over Q(i) the polynomial is scaled to have coprime Gaussian-integer-like
    coefficients (primitive remainder sequence); over other fields it is made
    monic. Scaling never changes the monic gcd.
    """
    if p.is_zero():
        return p
    first = p.coeffs[0]
    if isinstance(first, _GAUSSIAN_TYPE):
        from math import gcd as _igcd

        den_lcm = 1
        for c in p.coeffs:
            for part in (c.re, c.im):
                d = part.denominator
                den_lcm = den_lcm * d // _igcd(den_lcm, d)
        num_gcd = 0
        for c in p.coeffs:
            num_gcd = _igcd(num_gcd, abs(c.re.numerator * (den_lcm // c.re.denominator)))
            num_gcd = _igcd(num_gcd, abs(c.im.numerator * (den_lcm // c.im.denominator)))
        if num_gcd:
            from fractions import Fraction

            scale = p.field.coerce(Fraction(den_lcm, num_gcd))
            return p.scale(scale)
        return p
    return p.monic()


from .qi import GaussianRational as _GAUSSIAN_TYPE  # noqa: E402

# Modular coprimality certificate: gcd computed over F_p[i] (p = 3 mod 4, so
# x^2+1 stays irreducible and F_p[i] is a field). For primes that keep the
# leading coefficients alive and the denominators invertible, the reduction
# of the rational gcd divides the modular gcd, so modular degree 0 proves
# coprimality over Q(i). Anything else falls back to the exact algorithm.
_GCD_PRIME = 2**31 - 1


def _coeff_mod_p(c, p):
    out = []
    for part in (c.re, c.im):
        den = part.denominator % p
        if den == 0:
            return None
        out.append(part.numerator % p * pow(den, p - 2, p) % p)
    return (out[0], out[1])


def _poly_mod_p(poly, p):
    coeffs = []
    for c in poly.coeffs:
        m = _coeff_mod_p(c, p)
        if m is None:
            return None
        coeffs.append(m)
    while coeffs and coeffs[-1] == (0, 0):
        coeffs.pop()
    return coeffs


def _modp_inv(c, p):
    a, b = c
    n = (a * a + b * b) % p
    inv = pow(n, p - 2, p)
    return (a * inv % p, (-b) * inv % p)


def _modp_coprime(pa, pb, p) -> bool:
    """Euclid over F_p[i]; True iff the modular gcd is a unit."""
    fa, fb = list(pa), list(pb)
    while fb:
        lead = _modp_inv(fb[-1], p)
        db = len(fb) - 1
        while len(fa) - 1 >= db and fa:
            shift = len(fa) - 1 - db
            fr, fi = fa[-1]
            lr, li = lead
            qr, qi_ = (fr * lr - fi * li) % p, (fr * li + fi * lr) % p
            for k in range(len(fb)):
                br, bi = fb[k]
                tr = (qr * br - qi_ * bi) % p
                ti = (qr * bi + qi_ * br) % p
                ar, ai = fa[shift + k]
                fa[shift + k] = ((ar - tr) % p, (ai - ti) % p)
            while fa and fa[-1] == (0, 0):
                fa.pop()
        fa, fb = fb, fa
    return len(fa) == 1


def _certified_coprime(a: UniPoly, b: UniPoly) -> bool:
    if not isinstance(a.leading(), _GAUSSIAN_TYPE):
        return False
    pa = _poly_mod_p(a, _GCD_PRIME)
    pb = _poly_mod_p(b, _GCD_PRIME)
    if pa is None or pb is None or not pa or not pb:
        return False
    # degrees must survive the reduction for the certificate to apply
    if len(pa) - 1 != a.degree or len(pb) - 1 != b.degree:
        return False
    return _modp_coprime(pa, pb, _GCD_PRIME)


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd by the Euclidean algorithm with content-normalized remainders
    and a one-prime modular coprimality shortcut."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.degree > 0 and b.degree > 0 and _certified_coprime(a, b):
        return UniPoly.const(a.var, a.field.one, a.field)
    a = _content_normalized(a)
    b = _content_normalized(b)
    while not b.is_zero():
        a, b = b, _content_normalized(a % b)
    return a.monic() if not a.is_zero() else a


def poly_xgcd(a: UniPoly, b: UniPoly):
    """(g, s, t) with s*a + t*b = g, g monic (or zero)."""
    var, field = a.var, a.field
    r0, r1 = a, b
    s0 = UniPoly.const(var, field.one, field)
    s1 = UniPoly.zero(var, field)
    t0 = UniPoly.zero(var, field)
    t1 = UniPoly.const(var, field.one, field)
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    lead = r0.leading()
    inv = field.one / lead
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


def poly_lcm(a: UniPoly, b: UniPoly) -> UniPoly:
    if a.is_zero() or b.is_zero():
        return UniPoly.zero(a.var, a.field)
    g = poly_gcd(a, b)
    return (a * b).exact_div(g).monic()


def squarefree_part(p: UniPoly) -> UniPoly:
    """p / gcd(p, p') -- the radical for characteristic zero."""
    if p.is_zero():
        return p
    g = poly_gcd(p, p.derivative())
    if g.degree <= 0:
        return p.monic()
    return p.exact_div(g.scale(p.field.one)).monic()


def is_squarefree(p: UniPoly) -> bool:
    return poly_gcd(p, p.derivative()).degree <= 0


def lagrange_interpolate(var, points, field=QQI):
    """Polynomial through (x_k, y_k); the x_k are distinct field elements."""
    n = len(points)
    out = UniPoly.zero(var, field)
    for k in range(n):
        xk, yk = points[k]
        num = UniPoly.const(var, field.one, field)
        den = field.one
        for j in range(n):
            if j == k:
                continue
            xj = points[j][0]
            num = num * UniPoly(var, [-xj, field.one], field)
            den = den * (xk - xj)
        out = out + num.scale(yk / den)
    return out
