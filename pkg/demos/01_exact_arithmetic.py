"""Tour of the exact arithmetic layer: Q(i), polynomial roots, Laurent
expansions, and local Smith normal forms.

Everything in this package is computed over the Gaussian rationals; there is
no floating point anywhere. This script walks the primitives the rest of the
engine is built from.
"""

from fractions import Fraction

from parahiggs import qi, laurent_coeffs, poly_gaussian_roots, smith_local_valuations
from parahiggs.points import INFINITY, PointOnLine
from parahiggs.poly import UniPoly, VAR_Z
from parahiggs.ratfunc import RationalFunction

print("== Gaussian rationals ==")
a = qi(Fraction(1, 2), Fraction(-3, 4))  # 1/2 - 3/4 i
b = qi(2, 1)
print(f"a = {a},  b = {b}")
print(f"a*b = {a * b},  a/b = {a / b},  norm(b) = {b.norm()}")

print("\n== Root extraction over Q(i) ==")
# z^2 + 1 splits; z^2 - 2 does not (sqrt(2) is not Gaussian rational)
for coeffs in ([1, 0, 1], [-2, 0, 1]):
    p = UniPoly(VAR_Z, [qi(c) for c in coeffs])
    roots, cofactor = poly_gaussian_roots(p)
    print(f"{p!r}: roots {[(str(r), m) for r, m in roots]}, cofactor {cofactor!r}")

# multiplicities are found exactly: (z-1)^2 (z+i)
p = UniPoly(VAR_Z, [qi(-1), qi(1)]) ** 2 * UniPoly(VAR_Z, [qi(0, 1), qi(1)])
roots, _ = poly_gaussian_roots(p)
print(f"(z-1)^2 (z+i): {[(str(r), m) for r, m in roots]}")

print("\n== Laurent expansions ==")
one = UniPoly(VAR_Z, [qi(1)])
f = RationalFunction(one, UniPoly(VAR_Z, [qi(-1), qi(1)]))  # 1/(z-1)
print("1/(z-1) at z=1, coefficients of (z-1)^k for k=-2..0:",
      [str(c) for c in laurent_coeffs(f, PointOnLine(qi(1)), -2, 0)])
g = RationalFunction(UniPoly(VAR_Z, [qi(Fraction(1, 2))])) + f
print("1/2 + 1/(z-1) at infinity, coefficients of w^k for k=0..2:",
      [str(c) for c in laurent_coeffs(g, PointOnLine(INFINITY), 0, 2)])

print("\n== Local Smith normal form ==")
# [[z, 1], [0, z]] at z=0: a column operation reveals valuations [0, 2]
z = RationalFunction(UniPoly.gen(VAR_Z))
zero = RationalFunction(UniPoly.zero(VAR_Z))
onef = RationalFunction(one)
m = [[z, onef], [zero, z]]
vals, _ = smith_local_valuations(m, PointOnLine(qi(0)))
print("smith([[z,1],[0,z]]) at 0:", vals)
print("(the sum equals ord_0 det = 2: the torsion length of the cokernel)")
