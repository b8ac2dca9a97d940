"""Exact algebra for Keller-equation ideals and strong Keller checks over prime fields."""

from .arith import GF, QQ, ZZ, Ring, parse_ring
from .groebner import BasisCache, GroebnerBasis, Ideal, groebner_basis, ideal_member, normal_form, radical_member
from .poly import MonomialOrder, Polynomial, PolyRing, format_polynomial, parse_polynomial
from .polymap import PolyMap, TameRecipe, compose, determinant, formal_inverse, is_invertible, jacobian, parse_map, sample_tame
from .skeller import Outcome, Verdict, bounded_lift, keller_check, strong_keller_check
from .system import CertKind, GeneratorCertificate, KellerSystem, builtin_radical_generators, integer_keller_candidates

__version__ = "0.1.0"
