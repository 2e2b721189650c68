"""Root extraction over Q(i) by Gaussian-integer divisor enumeration.

Only linear factors are split off; whatever has no roots in Q(i) is returned
untouched as the cofactor. Candidate roots a/b are found from divisors of the
scaled constant and leading coefficients (rational root theorem in the
Euclidean domain Z[i]), enumerated through the factorization of their norms.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from .poly import UniPoly
from .qi import QQI, GaussianRational, sort_key

# Gaussian integers are (a, b) pairs meaning a + b*i.

_UNITS = ((1, 0), (0, 1), (-1, 0), (0, -1))


def _zi_norm(g):
    return g[0] * g[0] + g[1] * g[1]


def _zi_mul(g, h):
    return (g[0] * h[0] - g[1] * h[1], g[0] * h[1] + g[1] * h[0])


def _zi_divmod(g, h):
    """Euclidean division in Z[i]: nearest-integer quotient."""
    n = _zi_norm(h)
    # g * conj(h) / n with rounded components
    re = g[0] * h[0] + g[1] * h[1]
    im = g[1] * h[0] - g[0] * h[1]
    q = (_round_div(re, n), _round_div(im, n))
    r = (g[0] - (q[0] * h[0] - q[1] * h[1]), g[1] - (q[0] * h[1] + q[1] * h[0]))
    return q, r


def _round_div(a, b):
    # round to nearest, ties toward +inf; any tie rule keeps |r| < |b|
    return (2 * a + b) // (2 * b)


def _zi_gcd(g, h):
    while h != (0, 0):
        _, r = _zi_divmod(g, h)
        g, h = h, r
    return g


def _factor_int(n: int):
    """Trial-division factorization, fine at desk scale."""
    out = {}
    n = abs(n)
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _sqrt_minus_one_mod(p: int) -> int:
    """x with x*x = -1 mod p, for prime p = 1 mod 4."""
    for a in range(2, p):
        x = pow(a, (p - 1) // 4, p)
        if (x * x) % p == p - 1:
            return x
    raise AssertionError(f"no sqrt of -1 mod {p}")


def _gaussian_primes_over(p: int):
    """Gaussian primes dividing the rational prime p."""
    if p == 2:
        return [(1, 1)]
    if p % 4 == 3:
        return [(p, 0)]
    x = _sqrt_minus_one_mod(p)
    pi = _zi_gcd((p, 0), (x, 1))
    return [pi, (pi[0], -pi[1])]


def zi_factor(g):
    """Factor a nonzero Gaussian integer into (unit, [(prime, exponent), ...])."""
    if g == (0, 0):
        raise ValueError("cannot factor zero")
    factors = []
    for p, _ in sorted(_factor_int(_zi_norm(g)).items()):
        for pi in _gaussian_primes_over(p):
            e = 0
            while True:
                q, r = _zi_divmod(g, pi)
                if r != (0, 0):
                    break
                g = q
                e += 1
            if e:
                factors.append((pi, e))
    # g is now a unit
    if _zi_norm(g) != 1:
        raise AssertionError("nonunit remainder after factoring")
    return g, factors


def zi_divisors(g):
    """All divisors of g up to units (one representative per associate class)."""
    _, factors = zi_factor(g)
    divs = [(1, 0)]
    for pi, e in factors:
        new = []
        for d in divs:
            cur = d
            for _ in range(e + 1):
                new.append(cur)
                cur = _zi_mul(cur, pi)
        divs = new
    # distinct associate classes only
    seen = set()
    out = []
    for d in divs:
        cls = min((_zi_mul(d, u) for u in _UNITS))
        if cls not in seen:
            seen.add(cls)
            out.append(d)
    return out


def _to_gaussian_integers(p: UniPoly):
    """Scale coefficients of p by a positive integer so they land in Z[i]."""
    denom = 1
    for c in p.coeffs:
        for part in (c.re, c.im):
            d = part.denominator
            denom = denom * d // _gcd_int(denom, d)
    out = []
    for c in p.coeffs:
        re = c.re * denom
        im = c.im * denom
        out.append((int(re), int(im)))
    return out


def _gcd_int(a, b):
    while b:
        a, b = b, a % b
    return a


def poly_gaussian_roots(p: UniPoly):
    """All roots of p in Q(i) with multiplicities, plus the rootless cofactor.

    Returns (roots, cofactor): roots is a list of (GaussianRational, int)
    sorted canonically, and p == cofactor * prod (x - root)^mult with cofactor
    having no roots in Q(i).
    """
    if p.is_zero():
        raise ValueError("root extraction needs a nonzero polynomial")
    var, field = p.var, p.field
    roots = []
    remaining = p
    # strip powers of the variable
    k0 = 0
    while remaining.coeff(0).is_zero() and remaining.degree > 0:
        remaining = UniPoly(var, remaining.coeffs[1:], field)
        k0 += 1
    if k0:
        roots.append((GaussianRational(0), k0))
    if remaining.degree >= 1:
        ints = _to_gaussian_integers(remaining)
        const, lead = ints[0], ints[-1]
        num_divs = zi_divisors(const)
        den_divs = zi_divisors(lead)
        candidates = set()
        for a in num_divs:
            ga = GaussianRational(a[0], a[1])
            for b in den_divs:
                gb = GaussianRational(b[0], b[1])
                base = ga / gb
                for u in _UNITS:
                    candidates.add(base * GaussianRational(u[0], u[1]))
        for cand in sorted(candidates, key=sort_key):
            if remaining.degree < 1:
                break
            mult = 0
            while True:
                if not remaining.eval(cand).is_zero():
                    break
                lin = UniPoly(var, [-cand, field.one], field)
                remaining = remaining.exact_div(lin)
                mult += 1
            if mult:
                roots.append((cand, mult))
    roots.sort(key=lambda rm: sort_key(rm[0]))
    return roots, remaining


def split_eigenvalues(charpoly: UniPoly):
    """Roots of a characteristic polynomial that must split over Q(i).

    Returns the multiset of eigenvalues, or None if a rootless cofactor of
    positive degree remains.
    """
    roots, cof = poly_gaussian_roots(charpoly)
    if cof.degree > 0:
        return None
    out = []
    for val, mult in roots:
        out.extend([val] * mult)
    return out
