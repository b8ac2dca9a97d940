import json
import random
from fractions import Fraction

import pytest
import sympy as sp
from helpers import to_sympy
from sympy.matrices.normalforms import hermite_normal_form

from keller.arith import GF, QQ, ZZ
from keller.poly import PolyRing
from keller.polymap import PolyMap, compose, degree, parse_map, reduce_map_mod_p, sample_tame
from keller.skeller import normalize_affine
from keller.system import (
    CertKind,
    CoeffIndex,
    DegreeExceeded,
    KellerSystem,
    UnsupportedSystem,
    builtin_radical_generators,
    coefficient_vector,
    default_certificates,
    embed_vector,
    evaluate_at,
    integer_keller_candidates,
    map_from_vector,
    nd_bound,
    system_to_json,
)


@pytest.fixture(scope="module")
def S2():
    return KellerSystem(2, 2)


@pytest.fixture(scope="module")
def S3():
    return KellerSystem(2, 3)


def test_coefficient_layout(S2, S3):
    assert S2.coeff_dimension == 6 and S3.coeff_dimension == 14
    assert KellerSystem(3, 2).coeff_dimension == 18
    assert S2.display_names() == ["a1", "a2", "a3", "b1", "b2", "b3"]
    assert S3.display_names()[:7] == ["A", "C", "B", "D", "F", "G", "E"]
    assert S3.display_names()[7:] == ["A1", "C1", "B1", "D1", "F1", "G1", "E1"]
    assert CoeffIndex(1, (2, 0)).name == "c1_2_0"


def test_universal_degree2_generators(S2):
    got = {S2.x_label(a): S2.format(g) for a, g in S2.E_items}
    assert got == {
        "x": "2*a1 + b2",
        "y": "a2 + 2*b3",
        "x^2": "-2*a2*b1 + 2*a1*b2",
        "x*y": "-4*a3*b1 + 4*a1*b3",
        "y^2": "-2*a3*b2 + 2*a2*b3",
    }


def test_generators_match_sympy_determinant(S3):
    U = S3.universal_map
    J = sp.Matrix([[to_sympy(U[i].diff(j)) for j in U.variables] for i in range(2)])
    det = sp.Poly(sp.expand(J.det() - 1), *sp.symbols("x y"))
    want = {m: c for m, c in det.terms()}
    got = {a: to_sympy(g) for a, g in S3.E_items}
    assert set(got) == set(want)
    for a in got:
        assert sp.expand(got[a] - want[a]) == 0


def test_coefficient_vector_roundtrip(S2):
    F = parse_map("[x + 3*x^2 - y^2; y + x*y]", PolyRing("x,y", QQ))
    v = coefficient_vector(F, S2)
    assert v.values == (3, 0, -1, 0, 1, 0)
    assert map_from_vector(v, S2) == F
    with pytest.raises(DegreeExceeded):
        coefficient_vector(parse_map("[x + x^3; y]", F.ring), S2)


def test_generators_vanish_iff_keller_over_q(S2):
    rng = random.Random(0)
    R = PolyRing("x,y", QQ)
    for _ in range(30):
        vals = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(6)]
        F = map_from_vector(vals, S2, R)
        v = coefficient_vector(F, S2)
        keller = F.det_jac() == R.one
        assert keller == all(not evaluate_at(g, v) for g in S2.E)


def test_embedding_preserves_shared_generators(S2, S3):
    F, _ = sample_tame(2, 2, 3, seed=4)
    G = normalize_affine(F.change_ring(PolyRing(F.ring.names, QQ)))
    v2 = coefficient_vector(G, S2)
    v3 = embed_vector(v2, S2, S3)
    e2 = dict(S2.E_items)
    for a, g in S3.E_items:
        val3 = evaluate_at(g, v3)
        if a in e2:
            assert val3 == evaluate_at(e2[a], v2)


def _lattice_min_denominator(S, g, mults=(1, 2, 3, 4, 6, 8, 12)):
    """Smallest N with N*g an integer combination of E_k and c_j*E_k (sympy HNF)."""
    syms = sp.symbols(S.coeff_ring.names)
    E = [to_sympy(e) for e in S.E]
    gens = E + [s * e for s in syms for e in E]
    tgt = to_sympy(g)
    mons = sorted({m for e in gens + [tgt] for m in sp.Poly(e, *syms).monoms()})

    def vec(e):
        d = dict(sp.Poly(e, *syms).terms())
        return [int(d.get(m, 0)) for m in mons]

    M = sp.Matrix([vec(e) for e in gens]).T
    H = hermite_normal_form(M)
    for N in mults:
        if hermite_normal_form(M.row_join(sp.Matrix(vec(sp.expand(N * tgt))))) == H:
            return N
    return None


def test_degree2_denominators_match_lattice_oracle(S2):
    certs = {S2.format(c.g): c for c in builtin_radical_generators(2, 2, S2)}
    frozen = {"-a2*b1 + a1*b2": 2, "-a3*b1 + a1*b3": 4, "a1^2 - b1*b3": 4}
    for text, den in frozen.items():
        c = certs.get(text) or certs[S2.format(-S2.parse(text))]
        assert c.denominator == den
        assert _lattice_min_denominator(S2, S2.parse(text)) == den
    assert nd_bound(S2) == 4


def test_degree2_certificates(S2, gb_cache):
    certs = builtin_radical_generators(2, 2, S2)
    texts = {S2.format(c.g) for c in certs}
    assert {"a1^2 - b1*b3", "2*a1 + b2", "a2 + 2*b3", "a2^2 - 4*a1*a3"} <= texts
    for c in certs:
        assert c.kind is CertKind.IN_IDEAL
        if c.denominator is not None:
            assert c.check_identity(S2)
        assert c.verify(S2, cache=gb_cache)


def test_degree3_certificates(S3, gb_cache):
    certs = builtin_radical_generators(2, 3, S3)
    assert nd_bound(S3) == 6
    for c in certs:
        assert c.verify(S3, cache=gb_cache), S3.format(c.g)
    radical_only = [c for c in certs if c.not_in_ideal]
    assert len(radical_only) == 2


def test_search_on_other_systems():
    S = KellerSystem(3, 2)
    certs = integer_keller_candidates(S)
    assert certs and all(c.check_identity(S) for c in certs)
    assert nd_bound(S) == 2
    with pytest.raises(UnsupportedSystem):
        builtin_radical_generators(3, 2)


def test_certified_generators_vanish_on_tame_samples(S2, S3):
    for S in (S2, S3):
        certs = default_certificates(S)
        for seed in range(15):
            F, _ = sample_tame(2, S.d, 4, seed)
            G = normalize_affine(F.change_ring(PolyRing(F.ring.names, QQ)))
            v = coefficient_vector(G, S)
            for c in certs:
                assert not evaluate_at(c.g, v)


def test_system_json(S2):
    doc = system_to_json(S2)
    assert doc["format"] == "keller-system" and doc["version"] == 1
    assert len(doc["generators"]) == 5
    assert json.loads(json.dumps(doc)) == doc
