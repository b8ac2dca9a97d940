"""The universal Keller system ``F[d]`` and its integer generator certificates.

``F[d]`` is the map ``x_i + sum c_{i,a} x^a`` over all monomials of degree
``2 <= |a| <= d`` with symbolic coefficients.  The coefficients ``E_a`` of
``det Jac(F[d]) - 1`` (as a polynomial in ``x``) generate the ideal ``I_Q``.
Integer polynomials that vanish wherever the ``E_a`` vanish are collected as
:class:`GeneratorCertificate` objects, each carrying the evidence for its
membership.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import QQ, ZZ, Ring, lcm
from .groebner import GREVLEX, BasisCache, Ideal, normal_form, radical_member
from .poly import Polynomial, PolyRing, format_polynomial, parse_polynomial
from .polymap import PolyMap, default_names, degree, determinant, has_identity_affine_part, jacobian

SCHEMA_VERSION = 1


class SystemError_(ValueError):
    pass


class DegreeExceeded(SystemError_):
    pass


class UnsupportedSystem(SystemError_):
    pass


# -- coefficient indexing ------------------------------------------------------------


@dataclass(frozen=True, order=True)
class CoeffIndex:
    i: int  # component, 1-based
    alpha: tuple

    @property
    def name(self) -> str:
        return f"c{self.i}_" + "_".join(str(a) for a in self.alpha)


def monomials_of_degree(n: int, k: int) -> list[tuple]:
    """Exponent vectors of total degree ``k``, lex-descending (x^k first)."""
    out = [e for e in itertools.product(range(k, -1, -1), repeat=n) if sum(e) == k]
    return out


def coeff_indices(n: int, d: int) -> list[CoeffIndex]:
    """Component-major, then degree ascending, then lex-descending exponents."""
    return [CoeffIndex(i, a) for i in range(1, n + 1) for k in range(2, d + 1) for a in monomials_of_degree(n, k)]


_LETTERS3 = {(2, 0): "A", (0, 2): "B", (1, 1): "C", (3, 0): "D", (0, 3): "E", (2, 1): "F", (1, 2): "G"}


def short_names(n: int, d: int) -> dict[str, str]:
    """Conventional short names for the two hand-sized systems, else empty."""
    if (n, d) == (2, 2):
        out = {}
        for i, stem in ((1, "a"), (2, "b")):
            for k, a in enumerate(monomials_of_degree(2, 2), start=1):
                out[CoeffIndex(i, a).name] = f"{stem}{k}"
        return out
    if (n, d) == (2, 3):
        return {
            CoeffIndex(i, a).name: letter + ("" if i == 1 else "1")
            for i in (1, 2)
            for a, letter in _LETTERS3.items()
        }
    return {}


@dataclass(frozen=True)
class CoefficientVector:
    """Values of the coefficient variables, in system order."""

    values: tuple
    coeffs: Ring

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


# -- the system ----------------------------------------------------------------------


class KellerSystem:
    """Universal degree-``d`` map in ``n`` variables with identity affine part."""

    def __init__(self, n: int, d: int):
        if n < 1 or d < 2:
            raise SystemError_("need n >= 1 and d >= 2")
        self.n, self.d = n, d
        self.coeff_vars = coeff_indices(n, d)
        cnames = [c.name for c in self.coeff_vars]
        self.coeff_ring = PolyRing(cnames, QQ)
        self.x_names = default_names(n)
        self.ring = PolyRing(cnames + self.x_names, QQ)
        N = len(cnames)
        self.x_indices = tuple(range(N, N + n))
        self.aliases = short_names(n, d)
        self._position = {c: k for k, c in enumerate(self.coeff_vars)}
        comps = []
        for i in range(1, n + 1):
            f = self.ring.gen(self.x_indices[i - 1])
            for k, c in enumerate(self.coeff_vars):
                if c.i != i:
                    continue
                e = [0] * self.ring.nvars
                e[k] = 1
                for j, a in zip(self.x_indices, c.alpha):
                    e[j] = a
                f = f + self.ring.monomial(e)
            comps.append(f)
        self.universal_map = PolyMap(comps, self.x_indices)
        self._E: list[tuple[tuple, Polynomial]] | None = None
        self._ideal: Ideal | None = None
        self.certificates: list[GeneratorCertificate] = []
        self.search_done = False
        # The lcm below is only a lower bound: the full integer part of the
        # radical is never computed, so the large-p route stays closed.
        self.nd_exact = False

    def __repr__(self):
        return f"KellerSystem(n={self.n}, d={self.d})"

    @property
    def coeff_dimension(self) -> int:
        return len(self.coeff_vars)

    @property
    def integer_ring(self) -> PolyRing:
        return self.coeff_ring.with_coeffs(ZZ)

    def display_names(self) -> list[str]:
        return [self.aliases.get(c.name, c.name) for c in self.coeff_vars]

    def format(self, f: Polynomial) -> str:
        if f.ring.names != self.coeff_ring.names:
            return str(f)
        return format_polynomial(f, self.display_names())

    def parse(self, text: str, coeffs: Ring = QQ) -> Polynomial:
        """Parse a polynomial in the coefficient variables (short names allowed)."""
        inverse = {v: k for k, v in self.aliases.items()}
        return parse_polynomial(text, self.coeff_ring.with_coeffs(coeffs), aliases=inverse)

    def x_label(self, alpha: tuple) -> str:
        parts = []
        for name, e in zip(self.x_names, alpha):
            if e == 1:
                parts.append(name)
            elif e:
                parts.append(f"{name}^{e}")
        return "*".join(parts) or "1"

    @property
    def E_items(self) -> list[tuple[tuple, Polynomial]]:
        if self._E is None:
            self._E = _compute_generators(self)
        return self._E

    @property
    def E(self) -> list[Polynomial]:
        return [g for _, g in self.E_items]

    def ideal(self, cache: BasisCache | bool | None = None) -> Ideal:
        if self._ideal is None:
            self._ideal = Ideal(self.E, self.coeff_ring, cache=cache)
        return self._ideal

    def groebner(self, cache: BasisCache | bool | None = None, **kw):
        return self.ideal(cache).groebner(GREVLEX, **kw)

    @property
    def nd_lcm_lower_bound(self) -> int:
        return nd_bound(self)


def universal_map(n: int, d: int) -> KellerSystem:
    return KellerSystem(n, d)


def _x_key(alpha: tuple) -> tuple:
    return (sum(alpha), tuple(-a for a in alpha))


def _compute_generators(system: KellerSystem) -> list[tuple[tuple, Polynomial]]:
    det = determinant(jacobian(system.universal_map)) - system.ring.one
    parts = det.collect(system.x_indices)
    out = []
    for alpha in sorted(parts, key=_x_key):
        if not any(alpha):
            # the constant coefficient is zero because the affine part is fixed
            continue
        out.append((alpha, parts[alpha].change_ring(system.coeff_ring)))
    return out


def keller_generators(system: KellerSystem) -> list[Polynomial]:
    """The ``E_a``, ordered by their x-monomial (degree, then lex descending)."""
    return system.E


# -- coefficient vectors ------------------------------------------------------------


def coefficient_vector(F: PolyMap, system: KellerSystem) -> CoefficientVector:
    """Read ``v(F)``; ``F`` must have identity affine part and degree <= d."""
    if F.n != system.n:
        raise SystemError_(f"map has {F.n} components, system has n={system.n}")
    if len(F.variables) != F.ring.nvars:
        raise SystemError_("map must not carry parameter variables")
    if degree(F) > system.d:
        raise DegreeExceeded(f"map degree {degree(F)} exceeds d={system.d}")
    if not has_identity_affine_part(F):
        raise SystemError_("map must have identity affine part")
    R = F.ring.coeffs
    values = []
    for c in system.coeff_vars:
        e = [0] * F.ring.nvars
        for j, a in zip(F.variables, c.alpha):
            e[j] = a
        values.append(F.components[c.i - 1].terms.get(tuple(e), R.zero))
    return CoefficientVector(tuple(values), R)


def map_from_vector(v: CoefficientVector | Sequence, system: KellerSystem, ring: PolyRing | None = None) -> PolyMap:
    """Inverse of :func:`coefficient_vector`."""
    values = list(v)
    coeffs = v.coeffs if isinstance(v, CoefficientVector) else QQ
    R = ring or PolyRing(system.x_names, coeffs)
    comps = [R.gen(k) for k in range(system.n)]
    for c, val in zip(system.coeff_vars, values):
        if val:
            comps[c.i - 1] = comps[c.i - 1] + R.monomial(c.alpha, val)
    return PolyMap(comps)


def evaluate_at(g: Polynomial, v: CoefficientVector):
    """``g(v)`` with ``g`` mapped into the coefficient ring of ``v``."""
    target = g.ring.with_coeffs(v.coeffs)
    return g.change_ring(target).evaluate(list(v.values))


def embed_vector(v: CoefficientVector, small: KellerSystem, big: KellerSystem) -> CoefficientVector:
    """Zero-extend a degree-``d'`` vector into a degree-``d`` system (d' <= d)."""
    if small.n != big.n or small.d > big.d:
        raise SystemError_("can only embed into a system of the same n and larger d")
    zero = v.coeffs.zero
    by_index = dict(zip(small.coeff_vars, v.values))
    return CoefficientVector(tuple(by_index.get(c, zero) for c in big.coeff_vars), v.coeffs)


# -- certificates -------------------------------------------------------------------------


class CertKind(str, enum.Enum):
    IN_IDEAL = "InIdeal"
    IN_RADICAL = "InRadical"
    ASSERTED = "Asserted"


@dataclass
class GeneratorCertificate:
    """An integer polynomial ``g`` in the coefficient variables plus evidence.

    For ``InIdeal`` certificates with ``cofactors``, the identity
    ``denominator * g == sum(m * E[k] for k, m in cofactors)`` holds exactly
    with integer multipliers ``m``.  ``not_in_ideal`` records a companion
    claim that ``g`` is outside ``I_Q`` (checked by a nonzero normal form).
    """

    g: Polynomial
    kind: CertKind
    denominator: int | None = 1
    origin: str = ""
    cofactors: tuple = ()
    not_in_ideal: bool = False
    citation: str = ""

    def check_identity(self, system: KellerSystem) -> bool:
        if not self.cofactors:
            return False
        R = system.coeff_ring
        total = R.zero
        for k, m in self.cofactors:
            total = total + m.change_ring(R) * system.E[k]
        return total == self.g.change_ring(R).scale(self.denominator)

    def verify(self, system: KellerSystem, *, cache: BasisCache | bool | None = None) -> bool:
        """Re-check the claim from scratch (Groebner normal form / Rabinowitsch)."""
        g = self.g.change_ring(system.coeff_ring)
        if self.kind is CertKind.IN_IDEAL:
            if self.cofactors and not self.check_identity(system):
                return False
            return not normal_form(g, system.groebner(cache))
        if self.kind is CertKind.IN_RADICAL:
            if self.not_in_ideal and not normal_form(g, system.groebner(cache)):
                return False
            return radical_member(g, system.E, cache=cache)
        return False

    def to_json(self, system: KellerSystem) -> dict:
        out = {
            "g": system.format(self.g),
            "kind": self.kind.value,
            "denominator": self.denominator,
            "origin": self.origin,
        }
        if self.not_in_ideal:
            out["not_in_ideal"] = True
        if self.citation:
            out["citation"] = self.citation
        return out


def _sign_normal(f: Polynomial) -> Polynomial:
    return -f if f.leading_coefficient() < 0 else f


def _primitive_of(f: Polynomial) -> tuple[Polynomial, Fraction]:
    """``(prim, r)`` with ``prim == r * f`` over QQ and ``prim`` primitive over ZZ."""
    den, cont, prim = f.integer_normalize()
    r = Fraction(den, cont)
    if prim.leading_coefficient() < 0:
        prim, r = -prim, -r
    return prim, r


def _generator_certificates(system: KellerSystem) -> list[GeneratorCertificate]:
    out = []
    ZR = system.integer_ring
    for k, (alpha, E) in enumerate(system.E_items):
        prim, r = _primitive_of(E)
        N = r.denominator
        out.append(
            GeneratorCertificate(
                prim,
                CertKind.IN_IDEAL,
                N,
                origin=f"E[{system.x_label(alpha)}]",
                cofactors=((k, ZR.const(int(r * N))),),
            )
        )
    return out


SEARCH_PRIMES = (2, 3, 5)


def integer_keller_candidates(system: KellerSystem, *, max_size: int = 3, primes: Sequence[int] = SEARCH_PRIMES) -> list[GeneratorCertificate]:
    """Primitive integer members of ``I_Q`` found by a bounded combination search.

    The pool holds the primitive parts of the ``E_a`` and the primitive parts
    of linear ``E_a`` times a single coefficient variable.  For every set of
    at most ``max_size`` pool items an integer relation that vanishes modulo
    a small prime ``q`` is lifted; dividing the combination by its content
    yields a new primitive generator whose denominator is recorded.  Every
    result carries an exact cofactor identity, checked before it is kept.
    """
    certs = _generator_certificates(system)
    ZR = system.integer_ring
    pool = []  # (poly over ZZ, [(E index, multiplier over ZZ, Fraction)])
    for k, c in enumerate(certs):
        r = Fraction(int(c.cofactors[0][1].constant_term()), c.denominator)
        pool.append((c.g, [(k, ZR.one, r)], c.origin))
    for k, c in enumerate(list(certs)):
        if c.g.degree() != 1:
            continue
        r = Fraction(int(c.cofactors[0][1].constant_term()), c.denominator)
        for j, name in enumerate(system.display_names()):
            v = ZR.gen(j)
            pool.append((v * c.g, [(k, v, r)], f"{name}*{c.origin}"))

    best: dict[Polynomial, GeneratorCertificate] = {c.g: c for c in certs}
    order = list(best)
    supports = [set(p.terms) for p, _, _ in pool]

    def connected(idx):
        if len(idx) == 1:
            return False
        return all(any(supports[a] & supports[b] for b in idx if b != a) for a in idx)

    for size in range(2, max_size + 1):
        for idx in itertools.combinations(range(len(pool)), size):
            if not connected(idx):
                continue
            mons = sorted(set().union(*(supports[a] for a in idx)))
            vecs = [[pool[a][0].terms.get(m, 0) for m in mons] for a in idx]
            for q in primes:
                for z in itertools.product(range(1, q), repeat=size - 1):
                    z = (1,) + z
                    if any(sum(zi * v[t] for zi, v in zip(z, vecs)) % q for t in range(len(mons))):
                        continue
                    lifts = itertools.product(*[(zi, zi - q) for zi in z])
                    cands = [c for c in (_combine(system, pool, idx, zs) for zs in lifts) if c is not None]
                    if cands:
                        _keep(system, min(cands, key=_cert_cost), best, order)
    result = [best[g] for g in order]
    system.certificates = result
    system.search_done = True
    return result


def _cert_cost(c: GeneratorCertificate) -> tuple:
    return (len(c.g), c.denominator, max(abs(v) for v in c.g.terms.values()))


def _combine(system, pool, idx, zs) -> GeneratorCertificate | None:
    ZR = system.integer_ring
    f = ZR.zero
    for zi, a in zip(zs, idx):
        f = f + pool[a][0].scale(zi)
    if not f:
        return None
    prim, r = _primitive_of(f)  # prim == r * f
    coeffs: dict[int, list] = {}
    for zi, a in zip(zs, idx):
        for k, mult, ra in pool[a][1]:
            coeffs.setdefault(k, []).append((mult, r * zi * ra))
    N = lcm(c.denominator for terms in coeffs.values() for _, c in terms)
    cof = []
    for k in sorted(coeffs):
        m = ZR.zero
        for mult, c in coeffs[k]:
            m = m + mult.scale(int(c * N))
        if m:
            cof.append((k, m))
    combo = " ".join(f"{'+' if zi > 0 else '-'} {abs(zi)}*({pool[a][2]})" for zi, a in zip(zs, idx))
    return GeneratorCertificate(prim, CertKind.IN_IDEAL, N, origin=f"({combo.lstrip('+ ')})/{abs(r.denominator)}", cofactors=tuple(cof))


def _keep(system, cert, best, order):
    prev = best.get(cert.g)
    if prev is not None and (prev.denominator or 0) <= cert.denominator:
        return
    if not cert.check_identity(system):
        raise AssertionError(f"combination identity failed for {system.format(cert.g)}")
    if prev is None:
        order.append(cert.g)
    best[cert.g] = cert


def nd_bound(system: KellerSystem) -> int:
    """lcm of the denominators recorded by the certified integer generators.

    Only a lower bound for the true constant, since the full integer part of
    the radical is never computed.
    """
    certs = system.certificates or default_certificates(system)
    return lcm(c.denominator for c in certs if c.kind is CertKind.IN_IDEAL and c.denominator)


# -- curated generator lists -------------------------------------------------------------

# Two-term members for the degree-3 plane system.  Each entry is
# (polynomial, in I_Q?); the kinds were established by normal forms and
# Rabinowitsch checks and are re-verified by the test suite.
_DEG3_MEMBERS = [
    ("F1+3*D", False),
    ("A*C1-A1*C", False),
    ("G1+F", False),
    ("A*B1-A1*B", False),
    ("3*E1+G", False),
    ("C*B1-B*C1", False),
    ("A*E1-A1*E", False),
    ("B1*F-B*F1", False),
    ("C*G1-C1*G", False),
    ("D*B1-D1*B", False),
    ("A*G1-A1*G", False),
    ("F*C1-F1*C", False),
    ("D*E1-D1*E", False),
    ("F*G1-F1*G", False),
    ("F*A1-F1*A", False),
    ("D*C1-D1*C", False),
    ("C*E1-C1*E", False),
    ("B1*G-B*G1", False),
    ("D*G1-G*D1", True),
    ("F*E1-E*F1", True),
    ("D*F1-D1*F", True),
]
_DEG3_LINEAR_AND_EQ1 = ["C1+2*A", "C+2*B1", "G*E1-E*G1"]
_DEG3_RADICAL = ["A^3*E1^2-B^3*D1^2", "A^3*E^2-B^3*D^2"]

# Derived degree-2 members found by combining the generators.
_DEG2_DERIVED = ["a1^2-b1*b3", "b3^2-a1*a3", "a2^2-4*a1*a3"]


def _match_generator(system: KellerSystem, g: Polynomial, base: list[GeneratorCertificate]):
    for c in base:
        if c.g == g or c.g == -g:
            return c
    return None


def builtin_radical_generators(n: int, d: int, system: KellerSystem | None = None) -> list[GeneratorCertificate]:
    """Curated certificate-backed generator lists for ``(2, 2)`` and ``(2, 3)``."""
    if (n, d) not in ((2, 2), (2, 3)):
        raise UnsupportedSystem(f"no curated generators for (n, d) = ({n}, {d})")
    system = system or KellerSystem(n, d)
    if (n, d) == (2, 2):
        found = integer_keller_candidates(system)
        out = list(found)
        for text in _DEG2_DERIVED:
            g = _sign_normal(system.parse(text, ZZ))
            if _match_generator(system, g, out) is None:
                out.append(GeneratorCertificate(g, CertKind.IN_IDEAL, None, origin="curated"))
        system.certificates = out
        return out
    base = _generator_certificates(system)
    out = list(base)
    for text in _DEG3_LINEAR_AND_EQ1:
        g = system.parse(text, ZZ)
        c = _match_generator(system, g, out)
        if c is None:
            raise AssertionError(f"{text} is expected among the generator primitives")
    for text, in_ideal in _DEG3_MEMBERS:
        g = system.parse(text, ZZ)
        if _match_generator(system, g, out) is not None:
            continue
        if in_ideal:
            out.append(GeneratorCertificate(g, CertKind.IN_IDEAL, None, origin="listed two-term member"))
        else:
            out.append(GeneratorCertificate(g, CertKind.IN_RADICAL, None, origin="listed two-term member"))
    for text in _DEG3_RADICAL:
        g = system.parse(text, ZZ)
        out.append(GeneratorCertificate(g, CertKind.IN_RADICAL, None, origin="radical member", not_in_ideal=True))
    system.certificates = out
    return out


def default_certificates(system: KellerSystem) -> list[GeneratorCertificate]:
    """Curated list when one exists, otherwise the combination search."""
    if system.certificates:
        return system.certificates
    if (system.n, system.d) in ((2, 2), (2, 3)):
        return builtin_radical_generators(system.n, system.d, system)
    return integer_keller_candidates(system)


def generator_set_hash(system: KellerSystem, certs: Sequence[GeneratorCertificate]) -> str:
    h = hashlib.sha256()
    h.update(f"{system.n},{system.d}\n".encode())
    for g in system.E:
        h.update(str(g).encode() + b"\n")
    for c in certs:
        h.update(f"{c.kind.value}:{c.g}\n".encode())
    return h.hexdigest()[:16]


def system_to_json(system: KellerSystem, certs: Sequence[GeneratorCertificate] | None = None) -> dict:
    certs = default_certificates(system) if certs is None else certs
    return {
        "format": "keller-system",
        "version": SCHEMA_VERSION,
        "n": system.n,
        "d": system.d,
        "coeff_dimension": system.coeff_dimension,
        "variables": [
            {"name": c.name, "alias": system.aliases.get(c.name), "component": c.i, "alpha": list(c.alpha)}
            for c in system.coeff_vars
        ],
        "generators": [{"monomial": system.x_label(a), "E": system.format(g)} for a, g in system.E_items],
        "certificates": [c.to_json(system) for c in certs],
        "nd_lcm_lower_bound": nd_bound(system),
    }


def dumps_system(system: KellerSystem, certs=None) -> str:
    return json.dumps(system_to_json(system, certs), indent=2, sort_keys=False)


__all__ = [
    "CertKind",
    "CoeffIndex",
    "CoefficientVector",
    "DegreeExceeded",
    "GeneratorCertificate",
    "KellerSystem",
    "UnsupportedSystem",
    "builtin_radical_generators",
    "coeff_indices",
    "coefficient_vector",
    "default_certificates",
    "dumps_system",
    "embed_vector",
    "evaluate_at",
    "generator_set_hash",
    "integer_keller_candidates",
    "keller_generators",
    "map_from_vector",
    "nd_bound",
    "short_names",
    "system_to_json",
    "universal_map",
]
