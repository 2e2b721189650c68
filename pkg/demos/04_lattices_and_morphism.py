"""The elementary-modification lattices F and G, their alpha-families, and
the twisted map between them.

The local case table twists each canonical frame vector by the local
coordinate according to (weight, eigenvalue, weight-filtration index); the
twisted Higgs field theta - (zeta/2) dz then becomes an honest polynomial
matrix between the twisted frames. The correspondence between parabolic
points and R-parabolic twist families is exercised at the end.
"""

from fractions import Fraction

from parahiggs import build_FG, build_FG_alpha, check_theta_alpha, parse_bundle, theta_matrix
from parahiggs.corpus import ex1_document
from parahiggs.lattice import Rparabolic_to_parabolic, jump_candidates, puncture_family

bundle = parse_bundle(ex1_document())

print("== base lattices ==")
f_lat, g_lat = build_FG(bundle)
print("F twists (per puncture, per frame column):", f_lat.twists)
print("G twists:", g_lat.twists)
print("(index 0 is infinity: powers of w = 1/z; index 1 is z=1: powers of z-1)")

print("\n== the twisted map in the lattice frames ==")
tm = theta_matrix(bundle, f_lat, g_lat)
print("theta part:")
for row in tm.m0:
    print("  ", [repr(p) for p in row])
print("-(1/2) identity part (the zeta coefficient):")
for row in tm.m1:
    print("  ", [repr(p) for p in row])

print("\n== alpha families ==")
for alpha in (Fraction(0), Fraction(1, 2)):
    fa, ga = build_FG_alpha(bundle, alpha)
    print(f"alpha={alpha}: F twists {fa.twists}")
print("morphism verdicts on the jump set:",
      [(str(a), check_theta_alpha(bundle, a)["ok"]) for a in jump_candidates(bundle)])

print("\n== parabolic <-> R-parabolic at the finite puncture ==")
family = puncture_family(bundle, 1)
print("segments (interval end, twists):", family.segments)
print("jump set:", family.jump_set())
print("period rule: twists at 3/2 =", family.twists_at(Fraction(3, 2)))
print("recovered:", Rparabolic_to_parabolic(family))
