"""
Randomized trials over prime fields
===================================

Seeded experiments: compositions of maps that pass the strong check,
bounded integer lifts, and point-injectivity scans.
"""

from keller import PolyRing, ZZ, parse_map
from keller.experiments import conjecture_composition, conjecture_lift, injectivity_scan

rep = conjecture_composition(p=7, n=2, d=2, trials=50, seed=0)
print("composition:", rep.counts, rep.info)

rep = conjecture_lift(p=5, n=2, d=2, C=2, trials=30, seed=0)
print("lift:", rep.counts)
for w in rep.witnesses:
    print("   no lift with |c| <= 2; the sampled source has norm", w["source_norm"])

R = PolyRing("x,y", ZZ)
for text in ["[x+y^2; y]", "[x+x^2; y]"]:
    rep = injectivity_scan(parse_map(text, R), [2, 3, 5, 7])
    print(text, [(w["p"], w["injective"]) for w in rep.witnesses])
