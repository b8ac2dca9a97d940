import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from keller.arith import GF, QQ, ZZ, RingError
from keller.poly import PolyRing
from keller.polymap import PolyMap, parse_map, reduce_map_mod_p, sample_tame
from keller.skeller import (
    BudgetExceeded,
    Outcome,
    bounded_lift,
    keller_check,
    normalize_affine,
    strong_keller_check,
)
from keller.system import (
    DegreeExceeded,
    KellerSystem,
    coefficient_vector,
    default_certificates,
    evaluate_at,
    map_from_vector,
)

S2 = KellerSystem(2, 2)
S3 = KellerSystem(2, 3)


def R(p=None):
    return PolyRing("x,y", GF(p) if p else QQ)


def test_keller_check_examples():
    assert keller_check(parse_map("[x+y^2; y]", R()))
    assert keller_check(parse_map("[x+x^2; y]", R(2)))
    assert not keller_check(parse_map("[x+x^2; y]", PolyRing("x,y", ZZ)))


def test_obvious_example_fails():
    v = strong_keller_check(parse_map("[x+x^2; y]", R(2)), S2)
    assert v.outcome is Outcome.FAILS and v.value == 1
    assert v.witness_text == "a1^2 - b1*b3"
    # re-evaluating the witness reproduces the value
    vec = coefficient_vector(parse_map("[x+x^2; y]", R(2)), S2)
    assert int(evaluate_at(v.witness, vec)) == v.value


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_identity_is_certified(p):
    v = strong_keller_check(PolyMap.identity(R(p)), S2)
    assert v.outcome is Outcome.CERTIFIED and v.passes


def test_affine_normalization():
    F = parse_map("[x + y + 1; y + 2]", R(5))
    v = strong_keller_check(F, S2)
    assert v.normalized and v.passes
    G = parse_map("[2*x + 2*x^2; y]", R(3))
    assert normalize_affine(G) == parse_map("[x + x^2; y]", R(3))


def test_errors():
    with pytest.raises(RingError):
        strong_keller_check(parse_map("[x; y]", R()), S2)
    with pytest.raises(DegreeExceeded):
        strong_keller_check(parse_map("[x + y^3; y]", R(5)), S2)


def test_reduced_tame_map_passes_mod5():
    F, _ = sample_tame(2, 2, 4, seed=21)
    v = strong_keller_check(reduce_map_mod_p(F, 5), S2)
    assert v.passes


def test_monotone_in_generator_set():
    certs = default_certificates(S2)
    rng = random.Random(3)
    for _ in range(60):
        vals = [rng.randrange(3) for _ in range(6)]
        F = map_from_vector(vals, S2, R(3))
        small = strong_keller_check(F, S2, certs[:3])
        full = strong_keller_check(F, S2, certs)
        if small.fails:
            assert full.fails


def test_char0_equivalence():
    """Over Q: det Jac = 1 iff every E vanishes iff every certified generator vanishes."""
    rng = random.Random(7)
    for S in (S2, S3):
        certs = default_certificates(S)
        keller = 0
        for seed in range(100):
            F, _ = sample_tame(2, S.d, 4, seed)
            G = normalize_affine(F.change_ring(R()))
            v = coefficient_vector(G, S)
            assert all(not evaluate_at(g, v) for g in S.E)
            assert all(not evaluate_at(c.g, v) for c in certs)
            keller += 1
        for _ in range(100):
            vals = [Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(S.coeff_dimension)]
            G = map_from_vector(vals, S, R())
            v = coefficient_vector(G, S)
            is_k = G.det_jac() == R().one
            assert is_k == all(not evaluate_at(g, v) for g in S.E)
            assert is_k == all(not evaluate_at(c.g, v) for c in certs)
        assert keller == 100


class Fq:
    """GF(p^2) as GF(p)[t]/(t^2 - r) for a non-residue r; a test-side oracle only."""

    def __init__(self, a, b, p, r):
        self.a, self.b, self.p, self.r = a % p, b % p, p, r

    def _lift(self, o):
        return o if isinstance(o, Fq) else Fq(int(o), 0, self.p, self.r)

    def __add__(self, o):
        o = self._lift(o)
        return Fq(self.a + o.a, self.b + o.b, self.p, self.r)

    __radd__ = __add__

    def __mul__(self, o):
        o = self._lift(o)
        return Fq(self.a * o.a + self.r * self.b * o.b, self.a * o.b + self.b * o.a, self.p, self.r)

    __rmul__ = __mul__

    def __eq__(self, o):
        o = self._lift(o)
        return (self.a, self.b) == (o.a, o.b)

    def __hash__(self):
        return hash((self.a, self.b))


def _non_residue(p):
    return next(r for r in range(2, p) if pow(r, (p - 1) // 2, p) == p - 1)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_field_extension_gives_same_outcome(p):
    """Generators have GF(p) coefficients, so evaluating in GF(p^2) changes nothing."""
    r = _non_residue(p)
    one = Fq(1, 0, p, r)
    certs = default_certificates(S2)
    gens = S2.E + [c.g for c in certs]
    rng = random.Random(p)
    for _ in range(40):
        vals = [rng.randrange(p) for _ in range(6)]
        F = map_from_vector(vals, S2, R(p))
        v = coefficient_vector(F, S2)
        base = strong_keller_check(F, S2, certs).fails
        ext_vals = [g.change_ring(S2.integer_ring).evaluate_generic([one * int(x) for x in vals], one) for g in gens]
        assert base == any(e != 0 for e in ext_vals)
        for g, e in zip(gens, ext_vals):
            assert e == int(evaluate_at(g, v))


def test_bounded_lift_examples():
    f = parse_map("[x + 2*y^2; y]", R(3))
    assert bounded_lift(f, 1) == parse_map("[x - y^2; y]", PolyRing("x,y", ZZ))
    I = PolyMap.identity(R(5))
    assert bounded_lift(I, 0) == PolyMap.identity(PolyRing("x,y", ZZ))
    assert bounded_lift(f, 0) is None
    with pytest.raises(BudgetExceeded):
        bounded_lift(f, 3, budget=10)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([3, 5, 7]))
def test_lift_of_reduced_tame_map(seed, p):
    F, _ = sample_tame(2, 2, 2, seed, coeff_range=1)
    G = normalize_affine(F.change_ring(R()))
    G = G.change_ring(PolyRing("x,y", ZZ))
    C = max(abs(c) for comp, x in zip(G, G.ring.gens) for c in (comp - x).terms.values()) if G != PolyMap.identity(G.ring) else 0
    if C > 2:
        return
    lift = bounded_lift(reduce_map_mod_p(G, p), C)
    assert lift is not None
    assert keller_check(lift) and reduce_map_mod_p(lift, p) == reduce_map_mod_p(G, p)


def test_verdict_json():
    d = strong_keller_check(parse_map("[x+x^2; y]", R(2)), S2).to_json()
    assert d["outcome"] == "Fails" and d["certified"] is False and d["value"] == 1
