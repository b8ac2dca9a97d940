"""
The degree-2 plane system
=========================

Build the universal quadratic map with identity affine part, read off the
Keller equations, and watch the obvious characteristic-2 example get
rejected by an integer generator that the raw equations miss.
"""

from keller import GF, KellerSystem, PolyRing, parse_map, strong_keller_check
from keller.system import builtin_radical_generators, nd_bound

S = KellerSystem(2, 2)
print("universal map:", S.universal_map)

# det Jac(F) - 1, one coefficient per x-monomial
for alpha, E in S.E_items:
    print(f"  {S.x_label(alpha):4s} {S.format(E)}")

# Mod 2 the linear equations collapse and the map (x + x^2, y) satisfies
# every one of them, although it is not injective on F_2^2.
R2 = PolyRing("x,y", GF(2))
F = parse_map("[x+x^2; y]", R2)
print("\ndet Jac over F_2:", F.det_jac())

# Integer generators with their denominators: N*g is an integer
# combination of the E's, so g survives reduction mod any p.
print("\ncertified integer generators:")
for c in builtin_radical_generators(2, 2, S):
    print(f"  den {c.denominator!s:>4}  {S.format(c.g)}")
print("lcm of denominators:", nd_bound(S))

v = strong_keller_check(F, S)
print("\nverdict:", v.outcome.value, "| witness", v.witness_text, "=", v.value)
