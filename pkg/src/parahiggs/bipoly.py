"""Sparse bivariate polynomials over Q(i), used for spectral curves.

Keys are (deg_first, deg_second) exponent pairs; zero coefficients are never
stored. Variable names are carried along so printed forms stay readable.
"""

from __future__ import annotations

from .poly import UniPoly, poly_gcd
from .qi import QQI, GaussianRational


class BiPoly:
    __slots__ = ("var1", "var2", "terms")

    def __init__(self, var1, var2, terms=None):
        self.var1 = var1
        self.var2 = var2
        clean = {}
        for key, c in (terms or {}).items():
            c = QQI.coerce(c) if not isinstance(c, GaussianRational) else c
            if not c.is_zero():
                clean[key] = c
        self.terms = clean

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, var1, var2):
        return cls(var1, var2, {})

    @classmethod
    def const(cls, var1, var2, c):
        return cls(var1, var2, {(0, 0): c})

    @classmethod
    def from_unipoly_first(cls, p: UniPoly, var2):
        return cls(p.var, var2, {(k, 0): c for k, c in enumerate(p.coeffs)})

    # -- structure -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree1(self) -> int:
        return max((a for a, _ in self.terms), default=-1)

    @property
    def degree2(self) -> int:
        return max((b for _, b in self.terms), default=-1)

    def coeff(self, a, b) -> GaussianRational:
        return self.terms.get((a, b), QQI.zero)

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return (self.var1, self.var2) == (other.var1, other.var2) and self.terms == other.terms

    def __hash__(self):
        return hash((self.var1, self.var2, tuple(sorted(self.terms.items(), key=lambda kv: kv[0]))))

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, QQI.zero) + c
        return BiPoly(self.var1, self.var2, out)

    def __neg__(self):
        return BiPoly(self.var1, self.var2, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return self.scale(other)
        out = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (a1 + a2, b1 + b2)
                out[key] = out.get(key, QQI.zero) + c1 * c2
        return BiPoly(self.var1, self.var2, out)

    def scale(self, c):
        return BiPoly(self.var1, self.var2, {k: v * c for k, v in self.terms.items()})

    # -- slices and substitution ----------------------------------------------

    def coeff_of_second(self, b: int) -> UniPoly:
        """Coefficient of var2**b as a polynomial in var1."""
        top = max((a for a, bb in self.terms if bb == b), default=-1)
        cs = [self.coeff(a, b) for a in range(top + 1)]
        return UniPoly(self.var1, cs)

    def coeff_of_first(self, a: int) -> UniPoly:
        top = max((bb for aa, bb in self.terms if aa == a), default=-1)
        cs = [self.coeff(a, b) for b in range(top + 1)]
        return UniPoly(self.var2, cs)

    def eval_first(self, x) -> UniPoly:
        """Substitute var1 = x, leaving a polynomial in var2."""
        out = {}
        for (a, b), c in self.terms.items():
            out[b] = out.get(b, QQI.zero) + c * (x**a)
        top = max(out, default=-1)
        return UniPoly(self.var2, [out.get(b, QQI.zero) for b in range(top + 1)])

    def eval_second(self, y) -> UniPoly:
        out = {}
        for (a, b), c in self.terms.items():
            out[a] = out.get(a, QQI.zero) + c * (y**b)
        top = max(out, default=-1)
        return UniPoly(self.var1, [out.get(a, QQI.zero) for a in range(top + 1)])

    def subst_first_scaled(self, scalar, new_var) -> "BiPoly":
        """var1 -> scalar * new_var (used for P(-2*eta, zeta))."""
        out = {}
        for (a, b), c in self.terms.items():
            out[(a, b)] = c * (scalar**a)
        return BiPoly(new_var, self.var2, out)

    def shift_first(self, a0) -> "BiPoly":
        """var1 -> var1 + a0."""
        out = BiPoly.zero(self.var1, self.var2)
        shifted = {}
        for (a, b), c in self.terms.items():
            p = UniPoly(self.var1, [a0, QQI.one]) ** a
            for k, ck in enumerate(p.coeffs):
                key = (k, b)
                shifted[key] = shifted.get(key, QQI.zero) + ck * c
        return BiPoly(self.var1, self.var2, shifted)

    def content_in_first(self) -> UniPoly:
        """gcd over Q(i)[var1] of the var2-slice polynomials."""
        g = UniPoly.zero(self.var1)
        for b in range(self.degree2 + 1):
            s = self.coeff_of_second(b)
            if s.is_zero():
                continue
            g = s.monic() if g.is_zero() else poly_gcd(g, s)
            if g.degree == 0:
                break
        return g

    def content_in_second(self) -> UniPoly:
        g = UniPoly.zero(self.var2)
        for a in range(self.degree1 + 1):
            s = self.coeff_of_first(a)
            if s.is_zero():
                continue
            g = s.monic() if g.is_zero() else poly_gcd(g, s)
            if g.degree == 0:
                break
        return g

    def lex_normalized(self) -> "BiPoly":
        """Divide by the coefficient of the lexicographically first monomial."""
        if self.is_zero():
            return self
        first = min(self.terms)
        return self.scale(QQI.one / self.terms[first])

    def __repr__(self):
        if self.is_zero():
            return "0"
        bits = []
        for (a, b) in sorted(self.terms):
            c = self.terms[(a, b)]
            mono = []
            if a:
                mono.append(f"{self.var1}^{a}" if a > 1 else self.var1)
            if b:
                mono.append(f"{self.var2}^{b}" if b > 1 else self.var2)
            body = "*".join(mono)
            bits.append(f"({c})" + (f"*{body}" if body else ""))
        return " + ".join(bits)
