"""Keller and strong-Keller predicates, and bounded integer lifts.

The strong check evaluates integer generators of the radical at the
coefficient vector of a map over ``GF(p)``.  A generator set that is not
known to be complete can refute the property but cannot establish it, so
the verdict has three values:

* ``Fails``: some generator is nonzero at ``v(F)`` (the witness is kept);
* ``PassesKnownGenerators``: every generator vanishes;
* ``Certified``: additionally ``F`` is the reduction of an integer map with
  Jacobian determinant 1, and such reductions satisfy every integer
  generator, known or not.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .arith import ZZ, RingError
from .poly import Polynomial, PolyRing
from .polymap import (
    PolyMap,
    affine_inverse,
    compose,
    degree,
    determinant,
    has_identity_affine_part,
    jacobian,
    lift_symmetric,
)
from .system import (
    DegreeExceeded,
    GeneratorCertificate,
    KellerSystem,
    coefficient_vector,
    default_certificates,
    evaluate_at,
    generator_set_hash,
)


class BudgetExceeded(RuntimeError):
    pass


class Outcome(str, enum.Enum):
    FAILS = "Fails"
    PASSES = "PassesKnownGenerators"
    CERTIFIED = "Certified"


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    p: int
    n: int
    d: int
    generator_hash: str
    generators_used: int
    witness: Polynomial | None = None
    witness_text: str | None = None
    value: int | None = None
    certified_by: str | None = None
    normalized: bool = False
    lift: PolyMap | None = field(default=None, compare=False)

    @property
    def fails(self) -> bool:
        return self.outcome is Outcome.FAILS

    @property
    def passes(self) -> bool:
        return not self.fails

    def to_json(self) -> dict:
        out = {
            "outcome": self.outcome.value,
            "p": self.p,
            "n": self.n,
            "d": self.d,
            "generators_used": self.generators_used,
            "generator_hash": self.generator_hash,
            "certified": self.outcome is Outcome.CERTIFIED,
            "affine_normalized": self.normalized,
        }
        if self.witness is not None:
            out["witness"] = self.witness_text
            out["value"] = self.value
        if self.certified_by:
            out["certified_by"] = self.certified_by
        if self.lift is not None:
            out["lift"] = str(self.lift)
        return out


def keller_check(F: PolyMap) -> bool:
    """``det Jac(F) == 1`` exactly in the coefficient ring of ``F``."""
    return determinant(jacobian(F)) == F.ring.one


def normalize_affine(F: PolyMap) -> PolyMap:
    """``A^{-1} o F`` where ``A`` is the affine part of ``F``."""
    if has_identity_affine_part(F):
        return F
    return compose(affine_inverse(F), F)


def strong_keller_check(
    F: PolyMap,
    system: KellerSystem | None = None,
    certs: Sequence[GeneratorCertificate] | None = None,
    *,
    lift_bound: int | None = None,
) -> Verdict:
    """Check a map over ``GF(p)`` against ``E_a`` and the certified generators.

    Maps whose affine part is not the identity are replaced by
    ``A^{-1} o F`` first.  ``lift_bound`` enables a :func:`bounded_lift`
    search when the symmetric-representative lift is not Keller.
    """
    R = F.ring.coeffs
    if R.kind != "GF":
        raise RingError("strong_keller_check needs a map over a prime field")
    p = R.p
    if system is None:
        system = KellerSystem(F.n, max(2, degree(F)))
    if degree(F) > system.d:
        raise DegreeExceeded(f"map degree {degree(F)} exceeds d={system.d}")
    G = normalize_affine(F)
    v = coefficient_vector(G, system)
    certs = default_certificates(system) if certs is None else list(certs)
    ghash = generator_set_hash(system, certs)
    gens = [(g, f"E[{system.x_label(a)}]") for a, g in system.E_items]
    gens += [(c.g, system.format(c.g)) for c in certs]
    common = dict(p=p, n=system.n, d=system.d, generator_hash=ghash, generators_used=len(gens), normalized=G is not F)
    for g, text in gens:
        val = evaluate_at(g, v)
        if val:
            return Verdict(Outcome.FAILS, witness=g, witness_text=text, value=int(val), **common)
    lift = lift_symmetric(G)
    if keller_check(lift):
        return Verdict(Outcome.CERTIFIED, certified_by="integer Keller lift", lift=lift, **common)
    if lift_bound is not None:
        try:
            found = bounded_lift(G, lift_bound)
        except BudgetExceeded:
            found = None
        if found is not None:
            return Verdict(Outcome.CERTIFIED, certified_by="integer Keller lift", lift=found, **common)
    if system.nd_exact and p > system.nd_lcm_lower_bound:
        return Verdict(Outcome.CERTIFIED, certified_by="large characteristic", **common)
    return Verdict(Outcome.PASSES, **common)


# -- bounded lifts -------------------------------------------------------------------------

DEFAULT_LIFT_BUDGET = 200_000


def _det_int(M) -> int:
    n = len(M)
    if n == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * _det_int([row[:j] + row[j + 1 :] for row in M[1:]]) for j in range(n))


def bounded_lift(f: PolyMap, C: int, *, budget: int = DEFAULT_LIFT_BUDGET) -> PolyMap | None:
    """Integer map ``F`` with ``F mod p == f`` and ``det Jac(F) == 1``, or None.

    The bound applies to ``F - x``: every coefficient of ``F`` minus the
    identity lies in ``[-C, C]``.  Monomials range over degrees up to
    ``deg(f)``.  Candidates are tried in order of increasing max-norm; linear
    parts are filtered by ``det == 1`` before the nonlinear coefficients are
    enumerated.  None means nothing was found, not that no lift exists.
    """
    R = f.ring.coeffs
    if R.kind != "GF":
        raise RingError("bounded_lift expects a map over a prime field")
    if C < 0:
        raise ValueError("C must be >= 0")
    p, n = R.p, f.n
    dmax = max(degree(f), 1)
    nv = f.ring.nvars
    pos = {v: k for k, v in enumerate(f.variables)}
    monos = [e for e in itertools.product(range(dmax + 1), repeat=n) if sum(e) <= dmax]
    slots = []  # (component, exponent tuple in f.ring, identity offset, candidates)
    for i, comp in enumerate(f.components):
        for e in monos:
            m = [0] * nv
            for v, k in pos.items():
                m[v] = e[k]
            m = tuple(m)
            ident = 1 if sum(e) == 1 and e[i] == 1 else 0
            target = comp.terms.get(m, 0)
            cands = [c for c in range(-C, C + 1) if (c + ident - target) % p == 0]
            if not cands:
                return None
            cands.sort(key=lambda c: (abs(c), c < 0))
            slots.append((i, m, ident, cands, sum(e)))
    total = 1
    for s in slots:
        total *= len(s[3])
    if total > budget:
        raise BudgetExceeded(f"{total} candidate lifts exceed the budget {budget}")
    Z = PolyRing(f.ring.names, ZZ)
    lin = [k for k, s in enumerate(slots) if s[4] == 1]
    rest = [k for k, s in enumerate(slots) if s[4] != 1]

    def build(choice: dict) -> PolyMap:
        comps = [Z.zero] * n
        for k, (i, m, ident, _, _) in enumerate(slots):
            c = choice[k] + ident
            if c:
                comps[i] = comps[i] + Z.monomial(m, c)
        return PolyMap(comps, f.variables)

    def linear_det(choice) -> int:
        M = [[0] * n for _ in range(n)]
        for k in lin:
            i, m, ident, _, _ = slots[k]
            j = next(pos[v] for v, e in enumerate(m) if e)
            M[i][j] = choice[k] + ident
        return _det_int(M)

    def level(k_list, r):
        # assignments with max-norm exactly r over the slots in k_list
        opts = [[c for c in slots[k][3] if abs(c) <= r] for k in k_list]
        for combo in itertools.product(*opts):
            if not combo or max(abs(c) for c in combo) == r:
                yield dict(zip(k_list, combo))

    for r in range(C + 1):
        for rl in range(r + 1):
            for lc in level(lin, rl):
                if linear_det(lc) != 1:
                    continue
                for rc in itertools.chain.from_iterable(level(rest, s) for s in range(r + 1)):
                    if max([abs(c) for c in list(lc.values()) + list(rc.values())], default=0) != r:
                        continue
                    choice = {**lc, **rc}
                    F = build(choice)
                    if keller_check(F):
                        return F
    return None


__all__ = [
    "BudgetExceeded",
    "Outcome",
    "Verdict",
    "bounded_lift",
    "keller_check",
    "normalize_affine",
    "strong_keller_check",
]
