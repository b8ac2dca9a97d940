"""Reproduction runs for the plane systems and seeded randomized trials.

Every function returns a plain report object whose ``to_json`` output is
deterministic for fixed inputs (wall time is reported separately).
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .arith import GF, QQ, ZZ
from .groebner import BasisCache, GroebnerBasis, groebner_basis, normal_form, radical_member
from .poly import Polynomial, PolyRing
from .polymap import (
    EnumerationCapExceeded,
    PolyMap,
    compose,
    degree,
    is_injective_on_points,
    parse_map,
    reduce_map_mod_p,
    sample_tame,
)
from .skeller import BudgetExceeded, Outcome, bounded_lift, keller_check, normalize_affine, strong_keller_check
from .system import CertKind, KellerSystem, builtin_radical_generators, nd_bound

# Reference coefficient lists as displayed, keyed by x-monomial.
REFERENCE_DEGREE2 = {
    "x": "2*a1+b2",
    "y": "a2+2*b3",
    "x^2": "2*a1*b2+2*a2*b1",
    "x*y": "2*b2*a2+4*a1*b3+4*a3*b1",
    "y^2": "2*a2*b3+2*a3*b2",
}
REFERENCE_DEGREE3 = {
    "1": "1",
    "x": "C1+2*A",
    "y": "2*B1+C",
    "x^2": "F1+3*D+2*A*C1-2*A1*C",
    "x*y": "2*G1+2*F+4*A*B1-4*A1*B",
    "y^2": "3*E1+G+2*C*B1-2*B*C1",
    "x*y^2": "6*A*E1-6*A1*E+4*B1*F-4*B*F1+C*G1-C1*G",
    "x^2*y": "6*D*B1-6*D1*B+4*A*G1-4*A1*G+F*C1-F1*C",
}
TWO_TERM_MEMBERS = [
    "F1+3*D", "A*C1-A1*C", "G1+F", "A*B1-A1*B", "3*E1+G", "C*B1-B*C1", "A*E1-A1*E",
    "B1*F-B*F1", "C*G1-C1*G", "D*B1-D1*B", "A*G1-A1*G", "F*C1-F1*C", "D*E1-D1*E",
    "F*G1-F1*G", "F*A1-F1*A", "D*C1-D1*C", "C*E1-C1*E", "B1*G-B*G1", "D*G1-G*D1",
    "F*E1-E*F1", "D*F1-D1*F",
]  # fmt: skip
IDEAL_CLAIMS = ["C1+2*A", "C+2*B1", "G*E1-E*G1"]
RADICAL_ONLY_CLAIMS = ["A^3*E1^2-B^3*D1^2", "A^3*E^2-B^3*D^2"]


@dataclass
class Check:
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, **({"detail": self.detail} if self.detail else {})}


@dataclass
class ReproReport:
    experiment: str
    checks: list[Check] = field(default_factory=list)
    info: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, ok: bool, **detail) -> Check:
        c = Check(name, bool(ok), detail)
        self.checks.append(c)
        return c

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def to_json(self, *, timing: bool = False) -> dict:
        out = {"experiment": self.experiment, "ok": self.ok, "checks": [c.to_json() for c in self.checks], "info": self.info}
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out


def _compare_generators(system: KellerSystem, reference: dict[str, str]) -> tuple[bool, list]:
    computed = {system.x_label(a): g for a, g in system.E_items}
    rows = []
    ok = True
    for label, text in reference.items():
        want = system.parse(text)
        if label == "1":
            got = system.coeff_ring.one  # the constant term of det Jac
        else:
            got = computed.get(label, system.coeff_ring.zero)
        same = got == want
        ok &= same
        rows.append({"monomial": label, "reference": system.format(want), "computed": system.format(got), "match": same})
    return ok, rows


def _permanent_coefficients(system: KellerSystem) -> dict[str, Polynomial]:
    """Coefficients of ``perm Jac(F[d]) - 1``, used to explain a mismatch."""
    J = system.universal_map.jacobian()
    if system.n != 2:
        raise ValueError("permanent diagnostic is only wired up for n = 2")
    perm = J[0][0] * J[1][1] + J[0][1] * J[1][0] - system.ring.one
    return {system.x_label(a): f.change_ring(system.coeff_ring) for a, f in perm.collect(system.x_indices).items() if any(a)}


# -- degree 2 ----------------------------------------------------------------------------


def degree2_generators() -> list[str]:
    S = KellerSystem(2, 2)
    return [f"{S.x_label(a)}: {S.format(g)}" for a, g in S.E_items]


def repro_degree2(*, cache: BasisCache | bool | None = None) -> ReproReport:
    t0 = time.perf_counter()
    rep = ReproReport("degree2")
    S = KellerSystem(2, 2)
    ok, rows = _compare_generators(S, REFERENCE_DEGREE2)
    perm = _permanent_coefficients(S)
    perm_match = all(perm.get(label) == S.parse(text) for label, text in REFERENCE_DEGREE2.items())
    rep.add("generators match reference", ok, rows=rows, reference_equals_permanent_coefficients=perm_match)
    rep.add("generator count is 5", len(S.E) == 5, count=len(S.E))
    certs = builtin_radical_generators(2, 2, S)
    gb = S.groebner(cache)
    for text in ("a1*b2+a2*b1", "a1^2+b1*b3"):
        g = S.parse(text)
        rep.add(f"{text} in ideal (reference claim)", not normal_form(g, gb))
    for text in ("a1*b2-a2*b1", "a1^2-b1*b3"):
        g = S.parse(text)
        cert = next((c for c in certs if c.g.change_ring(S.coeff_ring) in (g, -g)), None)
        rep.add(
            f"{text} certified in ideal",
            cert is not None and cert.kind is CertKind.IN_IDEAL and cert.check_identity(S) and not normal_form(g, gb),
            denominator=cert.denominator if cert else None,
        )
    R2 = PolyRing("x y", GF(2))
    v = strong_keller_check(parse_map("[x+x^2; y]", R2), S, certs)
    rep.add("(x+x^2, y) fails at p=2", v.outcome is Outcome.FAILS, verdict=v.to_json())
    rep.info["generators"] = [f"{S.x_label(a)}: {S.format(g)}" for a, g in S.E_items]
    rep.info["nd_lcm_lower_bound"] = nd_bound(S)
    rep.info["certificates"] = [c.to_json(S) for c in certs]
    rep.wall_time = time.perf_counter() - t0
    return rep


# -- degree 3 ----------------------------------------------------------------------------


def part1_closed_form(R: PolyRing, A, A1, E) -> PolyMap:
    """The degree-3 plane map solved in terms of ``A, A1, E`` (all nonzero)."""
    A, A1, E = Fraction(A), Fraction(A1), Fraction(E)
    x, y = R.gens
    T1 = (
        x + (x**2).scale(A) + (y**2).scale(A**3 / A1**2) - (x * y).scale(2 * A**2 / A1)
        - (x**3).scale(A1**3 * E / A**3) + (y**3).scale(E) + (x**2 * y).scale(3 * A1**2 * E / A**2)
        - (x * y**2).scale(3 * A1 * E / A)
    )  # fmt: skip
    T2 = (
        y + (x**2).scale(A1) + (y**2).scale(A**2 / A1) - (x * y).scale(2 * A)
        - (x**3).scale(A1**4 * E / A**4) + (y**3).scale(A1 * E / A) + (x**2 * y).scale(3 * A1**3 * E / A**3)
        - (x * y**2).scale(3 * A1**2 * E / A**2)
    )  # fmt: skip
    return PolyMap([T1, T2])


def part1_triple(R: PolyRing, A, A1, E, cubic_coefficient: Fraction | None = None) -> PolyMap:
    """``(x + s y, y) o (x, y + A1 x^2 - k x^3) o (x - s y, y)`` with ``s = A/A1``.

    ``k`` defaults to ``E A1^3 / A^3``, the coefficient as printed.
    """
    A, A1, E = Fraction(A), Fraction(A1), Fraction(E)
    s = A / A1
    k = E * A1**3 / A**3 if cubic_coefficient is None else Fraction(cubic_coefficient)
    x, y = R.gens
    outer = PolyMap([x + y.scale(s), y])
    middle = PolyMap([x, y + (x**2).scale(A1) - (x**3).scale(k)])
    inner = PolyMap([x - y.scale(s), y])
    return compose(outer, compose(middle, inner))


def _nonzero_fraction(rng: random.Random) -> Fraction:
    while True:
        v = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        if v:
            return v


def check_part1(*, specializations: int = 5, points: int = 5, seed: int = 0, corrected: bool = False) -> dict:
    """Compare the factorization with the closed form at random rational points.

    With ``corrected`` the cubic coefficient is ``E A1^4 / A^4``.
    """
    rng = random.Random(seed)
    R = PolyRing("x y", QQ)
    mismatches = 0
    identical = 0
    det_ok = 0
    total = 0
    for _ in range(specializations):
        A, A1, E = _nonzero_fraction(rng), _nonzero_fraction(rng), _nonzero_fraction(rng)
        k = E * A1**4 / A**4 if corrected else None
        T = part1_closed_form(R, A, A1, E)
        P = part1_triple(R, A, A1, E, k)
        det_ok += keller_check(T)
        identical += T == P
        for _ in range(points):
            pt = (Fraction(rng.randint(-20, 20), rng.randint(1, 7)), Fraction(rng.randint(-20, 20), rng.randint(1, 7)))
            total += 1
            if T.evaluate(pt) != P.evaluate(pt):
                mismatches += 1
    return {
        "points": total,
        "mismatches": mismatches,
        "identical_specializations": identical,
        "specializations": specializations,
        "closed_form_keller": det_ok == specializations,
    }


def part2_generic_map() -> tuple[PolyMap, PolyRing, Polynomial]:
    """``alpha o (x, y + f(x)) o beta`` with identity affine part, symbolically.

    ``beta = (a x + b y + c, y)`` and ``f = f2 x^2 + f3 x^3``.  The affine part
    of ``(x, y + f(x)) o beta`` has linear determinant ``a``; the parameter
    ``ai`` stands for ``1/a`` and the relation ``a*ai - 1`` is returned too.
    """
    R = PolyRing("a b c f2 f3 ai x y", QQ)
    a, b, c, f2, f3, ai, x, y = R.gens
    u = a * x + b * y + c
    N1 = u
    N2 = y + f2 * u**2 + f3 * u**3
    xs = (6, 7)
    N = PolyMap([N1, N2], xs)
    # affine part N0 + L (x, y) with L = [[a, b], [fp*a, 1 + fp*b]], fp = f'(c)
    fp = f2 * c * 2 + f3 * c**2 * 3
    N0 = [N1.truncate(0, xs), N2.truncate(0, xs)]
    # L^{-1} = ai * [[1 + fp*b, -b], [-fp*a, a]]
    d1, d2 = N1 - N0[0], N2 - N0[1]
    T1 = ai * ((R.one + fp * b) * d1 - b * d2)
    T2 = ai * (-(fp * a) * d1 + a * d2)
    return PolyMap([T1, T2], xs), R, a * ai - R.one


def check_part2(certs=None, system: KellerSystem | None = None) -> dict:
    S = system or KellerSystem(2, 3)
    certs = builtin_radical_generators(2, 3, S) if certs is None else certs
    T, R, rel = part2_generic_map()
    relation_basis = groebner_basis([rel])
    # coefficient vector with polynomial entries in the parameters
    xs = T.variables
    values = []
    for ci in S.coeff_vars:
        comp = T.components[ci.i - 1]
        values.append(_coefficient_in(comp, xs, ci.alpha, R))
    affine_ok = all(
        normal_form(_coefficient_in(T.components[i], xs, e, R) - (R.one if e[i] == 1 and sum(e) == 1 else R.zero), relation_basis) == R.zero
        for i in range(2)
        for e in [(0, 0), (1, 0), (0, 1)]
    )
    degree_ok = degree(T) <= 3
    failures = []
    for g in list(S.E) + [c.g for c in certs]:
        val = g.change_ring(S.coeff_ring).substitute(values)
        if normal_form(val, relation_basis):
            failures.append(S.format(g))
    return {
        "generators_checked": len(S.E) + len(certs),
        "failures": failures,
        "identity_affine_part": affine_ok,
        "degree_at_most_3": degree_ok,
    }


def _coefficient_in(f: Polynomial, xs, alpha, R: PolyRing) -> Polynomial:
    out = {}
    for m, c in f.terms.items():
        if tuple(m[i] for i in xs) == tuple(alpha):
            mm = list(m)
            for i in xs:
                mm[i] = 0
            out[tuple(mm)] = c
    return R.from_dict(out)


def degenerate_families(system: KellerSystem, certs, *, cache=None) -> dict:
    """For ``A = 0``, ``A1 = 0`` and ``E = 0``: coefficient variables forced to vanish."""
    out = {}
    base = [c.g.change_ring(system.coeff_ring) for c in certs]
    names = system.display_names()
    for var in ("A", "A1", "E"):
        g0 = system.parse(var)
        gens = list(system.E) + base + [g0]
        forced = [names[k] for k in range(system.coeff_dimension) if radical_member(system.coeff_ring.gen(k), gens, cache=cache)]
        out[var] = {"forced_zero": forced}
    return out


def degree3_generators() -> list[str]:
    S = KellerSystem(2, 3)
    return [f"{S.x_label(a)}: {S.format(g)}" for a, g in S.E_items]


def repro_degree3(
    *,
    cache: BasisCache | bool | None = None,
    sections: Sequence[str] = ("generators", "members", "ideal", "radical", "part1", "part2", "degenerate"),
    progress: Callable[[str], None] | None = None,
) -> ReproReport:
    t0 = time.perf_counter()
    say = progress or (lambda s: None)
    rep = ReproReport("degree3")
    S = KellerSystem(2, 3)
    rep.info["generators"] = [f"{S.x_label(a)}: {S.format(g)}" for a, g in S.E_items]
    if "generators" in sections:
        ok, rows = _compare_generators(S, REFERENCE_DEGREE3)
        rep.add("displayed coefficients match", ok, rows=rows)
    gb: GroebnerBasis | None = None
    if {"members", "ideal", "radical"} & set(sections):
        say("groebner basis of the degree-3 ideal")
        gb = S.groebner(cache)
        rep.info["groebner_basis_size"] = len(gb)
    if "members" in sections:
        say("listed two-term members")
        rows = []
        for text in TWO_TERM_MEMBERS:
            g = S.parse(text)
            in_ideal = not normal_form(g, gb)
            in_rad = in_ideal or radical_member(g, S.E, cache=cache)
            rows.append({"g": text, "in_ideal": in_ideal, "in_radical": in_rad})
        rep.add("listed members in ideal (reference claim)", all(r["in_ideal"] for r in rows), rows=rows)
        rep.add("listed members in radical", all(r["in_radical"] for r in rows))
    if "ideal" in sections:
        rows = [{"g": t, "in_ideal": not normal_form(S.parse(t), gb)} for t in IDEAL_CLAIMS]
        rep.add("claimed ideal members in ideal", all(r["in_ideal"] for r in rows), rows=rows)
    if "radical" in sections:
        say("radical membership of the two quintics")
        rows = []
        for text in RADICAL_ONLY_CLAIMS:
            g = S.parse(text)
            rows.append({"g": text, "in_ideal": not normal_form(g, gb), "in_radical": radical_member(g, S.E, cache=cache)})
        rep.add("radical-only members in radical, not in ideal", all(r["in_radical"] and not r["in_ideal"] for r in rows), rows=rows)
    if "part1" in sections:
        say("tame factorization")
        literal = check_part1()
        corrected = check_part1(corrected=True)
        rep.add("factorization as printed matches closed form", literal["mismatches"] == 0, **literal)
        rep.add("factorization with cubic coefficient E*A1^4/A^4 matches closed form", corrected["mismatches"] == 0, **corrected)
    certs = builtin_radical_generators(2, 3, S)
    if "part2" in sections:
        say("generic tame map")
        res = check_part2(certs, S)
        rep.add("generic tame map satisfies all generators", not res["failures"] and res["identity_affine_part"], **res)
    if "degenerate" in sections:
        say("degenerate families")
        rep.info["degenerate_families"] = degenerate_families(S, certs, cache=cache)
    rep.info["nd_lcm_lower_bound"] = nd_bound(S)
    rep.wall_time = time.perf_counter() - t0
    return rep


# -- randomized trials -----------------------------------------------------------------

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(seed: int, index: int, stream: int = 0) -> int:
    """Per-trial seed: splitmix64 applied to the base seed, stream and index."""
    return splitmix64(splitmix64(splitmix64(seed & MASK64) ^ stream) ^ index)


@dataclass
class TrialReport:
    experiment: str
    seed: int
    params: dict
    counts: dict
    witnesses: list = field(default_factory=list)
    info: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def to_json(self, *, timing: bool = False) -> dict:
        out = {
            "experiment": self.experiment,
            "seed": self.seed,
            "params": self.params,
            "counts": self.counts,
            "witnesses": self.witnesses,
            "info": self.info,
        }
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out


def _sample_ske(p: int, n: int, d: int, seed: int, C: int, factors: int = 3) -> tuple[PolyMap, PolyMap]:
    """A tame integer map of degree <= d with identity affine part, and its reduction."""
    F, _ = sample_tame(n, d, factors, seed, coeff_range=C)
    G = normalize_affine(F.change_ring(PolyRing(F.ring.names, QQ)))
    G = G.change_ring(PolyRing(F.ring.names, ZZ))
    return G, reduce_map_mod_p(G, p)


def conjecture_composition(p: int, n: int, d: int, trials: int, seed: int, C: int = 2) -> TrialReport:
    """Compose pairs that pass the degree-d check; check the result at degree d^2."""
    t0 = time.perf_counter()
    counts = {"pass": 0, "fail": 0, "error": 0, "skipped": 0}
    witnesses = []
    info: dict = {}
    if trials > 0:
        small = KellerSystem(n, d)
        big = KellerSystem(n, d * d)
        nd_big = nd_bound(big)
        info["nd_lcm_lower_bound_d2"] = nd_big
        info["p_exceeds_bound"] = p > nd_big
        for t in range(trials):
            try:
                _, f = _sample_ske(p, n, d, trial_seed(seed, t, 1), C)
                _, g = _sample_ske(p, n, d, trial_seed(seed, t, 2), C)
                if strong_keller_check(f, small).fails or strong_keller_check(g, small).fails:
                    counts["skipped"] += 1
                    continue
                h = compose(f, g)
                v = strong_keller_check(h, big)
            except (BudgetExceeded, ValueError, ArithmeticError) as exc:
                counts["error"] += 1
                witnesses.append({"trial": t, "error": str(exc)})
                continue
            if v.fails:
                counts["fail"] += 1
                witnesses.append({"trial": t, "f": str(f), "g": str(g), "witness": v.witness_text, "value": v.value})
            else:
                counts["pass"] += 1
    params = {"p": p, "n": n, "d": d, "trials": trials, "C": C}
    return TrialReport("conjecture-composition", seed, params, counts, witnesses, info, time.perf_counter() - t0)


def conjecture_lift(p: int, n: int, d: int, C: int, trials: int, seed: int, *, budget: int | None = None) -> TrialReport:
    """Try to lift maps that pass the strong check to integer Keller maps."""
    t0 = time.perf_counter()
    counts = {"found": 0, "not_found": 0, "budget": 0, "fail_check": 0}
    witnesses = []
    system = KellerSystem(n, d) if trials > 0 else None
    kw = {} if budget is None else {"budget": budget}
    for t in range(trials):
        Fz, f = _sample_ske(p, n, d, trial_seed(seed, t, 3), 1)
        if strong_keller_check(f, system).fails:
            counts["fail_check"] += 1
            continue
        try:
            lift = bounded_lift(f, C, **kw)
        except BudgetExceeded:
            counts["budget"] += 1
            continue
        if lift is None:
            counts["not_found"] += 1
            # the sampled integer map is itself a lift of this norm
            norm = max((abs(c) for g, x in zip(Fz, Fz.ring.gens) for c in (g - x).terms.values()), default=0)
            witnesses.append({"trial": t, "map": str(f), "source_norm": norm})
        else:
            counts["found"] += 1
    params = {"p": p, "n": n, "d": d, "trials": trials, "C": C}
    return TrialReport("conjecture-lift", seed, params, counts, witnesses, {}, time.perf_counter() - t0)


def injectivity_scan(F: PolyMap, primes: Sequence[int], *, cap: int = 10**6) -> TrialReport:
    t0 = time.perf_counter()
    rows = []
    counts = {"injective": 0, "not_injective": 0, "cap_exceeded": 0}
    for p in primes:
        try:
            ok = is_injective_on_points(reduce_map_mod_p(F, p), cap)
        except EnumerationCapExceeded:
            counts["cap_exceeded"] += 1
            rows.append({"p": p, "injective": None, "error": "cap exceeded"})
            continue
        counts["injective" if ok else "not_injective"] += 1
        rows.append({"p": p, "injective": ok})
    params = {"map": str(F), "primes": list(primes), "cap": cap}
    return TrialReport("scan-injectivity", 0, params, counts, rows, {}, time.perf_counter() - t0)


__all__ = [
    "REFERENCE_DEGREE2",
    "REFERENCE_DEGREE3",
    "ReproReport",
    "TrialReport",
    "check_part1",
    "check_part2",
    "conjecture_composition",
    "conjecture_lift",
    "degree2_generators",
    "degree3_generators",
    "injectivity_scan",
    "part1_closed_form",
    "part1_triple",
    "part2_generic_map",
    "repro_degree2",
    "repro_degree3",
    "splitmix64",
    "trial_seed",
]
