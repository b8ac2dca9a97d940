"""Acceptance checks, one test per criterion; each prints a PASS/FAIL line."""

import itertools
import random
import time

import pytest
from helpers import random_map

from keller.arith import GF, QQ, ZZ
from keller.experiments import REFERENCE_DEGREE2, REFERENCE_DEGREE3, check_part1, repro_degree2, repro_degree3
from keller.groebner import BasisCache, groebner_basis, ideal_member, normal_form, radical_member
from keller.poly import PolyRing
from keller.polymap import PolyMap, compose, is_invertible, parse_map, reduce_map_mod_p, sample_tame
from keller.skeller import Outcome, normalize_affine, strong_keller_check
from keller.system import CertKind, KellerSystem, default_certificates


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail=""):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title}"
        if detail:
            line += f" [{detail}]"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return emit


@pytest.fixture(scope="module")
def cold_cache(tmp_path_factory):
    return BasisCache(tmp_path_factory.mktemp("acceptance-cache"))


def test_criterion_01_degree2_generators(verdict):
    t0 = time.perf_counter()
    rep = repro_degree2()
    dt = time.perf_counter() - t0
    S = KellerSystem(2, 2)
    emitted = [line.split(": ", 1) for line in rep.info["generators"]]
    labels = [label for label, _ in emitted]
    exact = labels == list(REFERENCE_DEGREE2) and all(
        S.parse(text) == S.parse(REFERENCE_DEGREE2[label]) for label, text in emitted
    )
    verdict(1, "repro degree2 emits the five displayed coefficient polynomials", exact and dt < 1.0,
            f"exact={exact}, {dt:.2f}s")  # fmt: skip


def test_criterion_02_degree3_generators(verdict):
    t0 = time.perf_counter()
    rep = repro_degree3(sections=("generators",))
    dt = time.perf_counter() - t0
    S = KellerSystem(2, 3)
    emitted = dict(line.split(": ", 1) for line in rep.info["generators"])
    shown = [k for k in REFERENCE_DEGREE3 if k != "1"]
    match = all(S.parse(emitted[k]) == S.parse(REFERENCE_DEGREE3[k]) for k in shown)
    x2y = S.parse(emitted["x^2*y"]) == S.parse("6*D*B1-6*D1*B+4*A*G1-4*A1*G+F*C1-F1*C")
    ok = match and x2y and rep.check("displayed coefficients match").ok and dt < 5.0
    verdict(2, "repro degree3 emits the eight displayed coefficients", ok, f"{len(REFERENCE_DEGREE3)} incl. constant, {dt:.2f}s")


def test_criterion_03_ideal_membership(verdict, cold_cache):
    S = KellerSystem(2, 3)
    t0 = time.perf_counter()
    gb = groebner_basis(S.E, cache=cold_cache)
    cold = time.perf_counter() - t0
    zero = all(not normal_form(S.parse(t), gb) for t in ("C1+2*A", "C+2*B1", "G*E1-E*G1"))
    t0 = time.perf_counter()
    again = groebner_basis(S.E, cache=cold_cache)
    warm = time.perf_counter() - t0
    ok = zero and cold <= 600 and again.polys == gb.polys and cold_cache.hits >= 1
    verdict(3, "C1+2A, C+2B1, GE1-EG1 reduce to 0 against GB(I_Q^3)", ok, f"basis cold {cold:.1f}s, cached {warm:.2f}s")


def test_criterion_04_radical_only_members(verdict, cold_cache):
    S = KellerSystem(2, 3)
    t0 = time.perf_counter()
    rows = []
    for text in ("A^3*E1^2-B^3*D1^2", "A^3*E^2-B^3*D^2"):
        g = S.parse(text)
        rows.append((radical_member(g, S.E, cache=cold_cache), ideal_member(g, S.ideal(cold_cache))))
    dt = time.perf_counter() - t0
    ok = all(r and not i for r, i in rows) and dt <= 3600
    verdict(4, "radical-only members in rad(I_Q^3) and not in I_Q^3", ok, f"{dt:.1f}s")


def test_criterion_05_part1_factorization(verdict):
    t0 = time.perf_counter()
    res = check_part1(specializations=5, points=5, seed=0)
    dt = time.perf_counter() - t0
    ok = res["points"] == 25 and res["mismatches"] == 0 and dt < 10
    verdict(5, "composed triple equals closed-form T at 25 points", ok, f"{res['mismatches']}/{res['points']} mismatches, {dt:.2f}s")


def test_criterion_06_obvious_example(verdict):
    S = KellerSystem(2, 2)
    certs = default_certificates(S)
    R2 = PolyRing("x,y", GF(2))
    t0 = time.perf_counter()
    v = strong_keller_check(parse_map("[x+x^2; y]", R2), S, certs)
    dt = time.perf_counter() - t0
    backing = next((c for c in certs if c.g == v.witness), None)
    derived = S.parse("a1^2+b1*b3", ZZ).reduce_mod_p(2)
    ok = (
        v.outcome is Outcome.FAILS
        and v.value == 1
        and backing is not None
        and backing.kind is CertKind.IN_IDEAL
        and backing.check_identity(S)
        and v.witness.reduce_mod_p(2) == derived
        and dt < 1.0
    )
    verdict(6, "(x+x^2, y) at p=2 fails with a certified witness", ok, f"witness {v.witness_text} = {v.value}, {dt:.3f}s")


def test_criterion_07_chain_rule(verdict):
    rng = random.Random(7)
    t0 = time.perf_counter()
    failures = 0
    combos = list(itertools.product([2, 3], [ZZ, GF(2), GF(3), GF(5)]))
    for k in range(100):
        n, ring = combos[k % len(combos)]
        R = PolyRing(["x", "y", "z"][:n], ring)
        F, G = random_map(rng, R, 2, density=0.4), random_map(rng, R, 2, density=0.4)
        lhs = compose(F, G).det_jac()
        rhs = F.det_jac().substitute(list(G.components)) * G.det_jac()
        failures += lhs != rhs
    dt = time.perf_counter() - t0
    verdict(7, "chain rule on 100 random pairs", failures == 0 and dt < 60, f"{failures} failures, {dt:.1f}s")


def test_criterion_08_reduction_commutes(verdict):
    rng = random.Random(8)
    t0 = time.perf_counter()
    failures = 0
    for p in (2, 3, 5):
        for k in range(200):
            R = PolyRing(["x", "y", "z"][: 2 + k % 2], ZZ)
            F, G = random_map(rng, R, 2, density=0.4), random_map(rng, R, 2, density=0.4)
            Fp, Gp = reduce_map_mod_p(F, p), reduce_map_mod_p(G, p)
            failures += F.det_jac().reduce_mod_p(p) != Fp.det_jac()
            failures += reduce_map_mod_p(compose(F, G), p) != compose(Fp, Gp)
    dt = time.perf_counter() - t0
    verdict(8, "mod-p reduction commutes with det Jac and composition", failures == 0 and dt < 60, f"{failures} failures, {dt:.1f}s")


def test_criterion_09_inverse_roundtrip(verdict):
    t0 = time.perf_counter()
    failures = 0
    for n in (2, 3):
        for seed in range(50):
            F, _ = sample_tame(n, 3, 4, seed=1000 * n + seed)
            F = F.change_ring(PolyRing(F.ring.names, QQ))
            G = is_invertible(F)
            I = PolyMap.identity(F.ring)
            failures += G is None or compose(F, G) != I or compose(G, F) != I
    dt = time.perf_counter() - t0
    verdict(9, "is_invertible round-trips 50 tame maps per n in {2,3}", failures == 0 and dt < 300, f"{failures} failures, {dt:.1f}s")


def test_criterion_10_keller_reductions_pass(verdict):
    S = KellerSystem(2, 2)
    certs = default_certificates(S)
    failures = 0
    checked = 0
    for seed in range(50):
        F, _ = sample_tame(2, 2, 4, seed=seed)
        assert F.det_jac() == F.ring.one
        for p in (2, 3, 5, 7):
            checked += 1
            failures += strong_keller_check(reduce_map_mod_p(F, p), S, certs).fails
    verdict(10, "reductions of integer Keller maps pass the strong check", failures == 0, f"{failures}/{checked} fail")


def _divisible(m, g):
    return all(a >= b for a, b in zip(m, g))


def test_criterion_11_groebner_oracles(verdict):
    rng = random.Random(11)
    disagreements = 0
    # monomial ideals against the divisibility oracle
    for _ in range(100):
        n = rng.randint(1, 3)
        R = PolyRing(["x", "y", "z"][:n], QQ)
        monos = lambda: [tuple(rng.randint(0, 4) for _ in range(n)) for _ in range(rng.randint(1, 3))]  # noqa: E731
        gens = [m for m in monos() if 0 < sum(m) <= 4] or [tuple([1] + [0] * (n - 1))]
        f = R.zero
        terms = [m for m in monos() if sum(m) <= 6]
        for m in terms:
            f = f + R.monomial(m, rng.randint(1, 5))
        oracle = all(any(_divisible(m, g) for g in gens) for m in f.terms)
        disagreements += ideal_member(f, [R.monomial(g) for g in gens]) != oracle
    # radical membership against explicit powers and common zeros
    cases = _radical_cases(rng)
    assert len(cases) == 30
    for f, gens, expected in cases:
        disagreements += radical_member(f, gens) != expected
    verdict(11, "Groebner membership agrees with brute-force oracles", disagreements == 0, f"{disagreements} disagreements")


def _radical_cases(rng):
    """30 cases whose answer is known without the Rabinowitsch route."""
    out = []
    # monomial ideals: a monomial is in the radical iff f^k is divisible by a generator
    R = PolyRing("x,y,z", QQ)
    while len(out) < 15:
        gens = [tuple(rng.randint(0, 3) for _ in range(3)) for _ in range(2)]
        gens = [g for g in gens if any(g)]
        if not gens:
            continue
        m = tuple(rng.randint(0, 2) for _ in range(3))
        expected = any(any(_divisible(tuple(k * a for a in m), g) for g in gens) for k in range(1, 4))
        out.append((R.monomial(m), [R.monomial(g) for g in gens], expected))
    # crafted binomial cases: positives via an explicit power in the ideal, negatives via a common zero
    Q = PolyRing("x,y", QQ)
    P = Q.parse
    crafted = [
        ("x", ["x^2 - y", "y^2"], 4, None),
        ("y", ["x^2 - y", "y^2"], 2, None),
        ("x*y", ["x^3", "y^3"], 3, None),
        ("x + y", ["x^2", "y^2"], 3, None),
        ("x - 1", ["x^2 - 2*x + 1", "y"], 2, None),
        ("y - x", ["y^2 - 2*x*y + x^2"], 2, None),
        ("x*y - 1", ["x^2*y^2 - 2*x*y + 1"], 2, None),
        ("x", ["x^2", "y"], 2, None),
        ("x", ["x^2 - 1", "y"], None, (1, 0)),
        ("y", ["x^2 - y", "x - 1"], None, (1, 1)),
        ("x + y", ["x - 1", "y - 1"], None, (1, 1)),
        ("x*y", ["x^2 - 4", "y - 1"], None, (2, 1)),
        ("x - y", ["x - 2", "y^2 - 1"], None, (2, 1)),
        ("x", ["y^3"], None, (1, 0)),
        ("x - 1", ["x*y - x", "x^2 - 1"], None, (-1, 1)),
    ]
    for f, gens, k, zero in crafted:
        fp, gp = P(f), [P(g) for g in gens]
        if k is not None:
            assert ideal_member(fp**k, gp)
            out.append((fp, gp, True))
        else:
            assert all(g.evaluate(list(zero)) == 0 for g in gp) and fp.evaluate(list(zero)) != 0
            out.append((fp, gp, False))
    return out
