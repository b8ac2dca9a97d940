"""Sparse multivariate polynomials over ZZ, QQ or GF(p).

A :class:`PolyRing` fixes an ordered tuple of variable names and a coefficient
ring; its :class:`Polynomial` values map exponent tuples to nonzero raw
coefficients.  Polynomials are immutable.

Text form follows a small grammar::

    poly   := ["+"|"-"] term (("+"|"-") term)*
    term   := coeff ("*"? varpow)* | varpow ("*" varpow)*
    varpow := ident ("^" nat)?
    coeff  := int ("/" nat)?

Whitespace is insignificant.  Output lists terms in descending graded
reverse lexicographic order, so formatting is deterministic.
"""

from __future__ import annotations

import enum
import math
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .arith import GF, QQ, ZZ, DenominatorVanishesModP, Ring, RingError, RingMismatch, content, lcm

Monomial = tuple  # tuple[int, ...]


class MonomialOrder(enum.Enum):
    GREVLEX = "grevlex"
    LEX = "lex"
    GRLEX = "grlex"

    def rank(self, m: Monomial) -> tuple:
        """Sort key that is *ascending* when the monomials are *descending*."""
        if self is MonomialOrder.GREVLEX:
            return (-sum(m),) + m[::-1]
        if self is MonomialOrder.LEX:
            return tuple(-e for e in m)
        return (-sum(m),) + tuple(-e for e in m)

    def greater(self, a: Monomial, b: Monomial) -> bool:
        return self.rank(a) < self.rank(b)

    @classmethod
    def parse(cls, value) -> MonomialOrder:
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


GREVLEX = MonomialOrder.GREVLEX
LEX = MonomialOrder.LEX
GRLEX = MonomialOrder.GRLEX

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class PolySyntaxError(ValueError):
    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class PolyRing:
    """Polynomial ring ``coeffs[names...]``."""

    def __init__(self, names: Iterable[str] | str, coeffs: Ring = QQ):
        if isinstance(names, str):
            names = [s for s in re.split(r"[\s,]+", names) if s]
        names = tuple(names)
        for name in names:
            if not _IDENT.match(name):
                raise ValueError(f"invalid variable name {name!r}")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        self.names = names
        self.coeffs = coeffs
        self.nvars = len(names)
        self._index = {n: i for i, n in enumerate(names)}
        self.zero = Polynomial(self, {})
        self.one = self.const(1)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.names == other.names and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.names, self.coeffs))

    def __repr__(self):
        return f"PolyRing({','.join(self.names)}; {self.coeffs})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    @property
    def gens(self) -> tuple[Polynomial, ...]:
        return tuple(self.gen(i) for i in range(self.nvars))

    def gen(self, which) -> Polynomial:
        i = self.index(which) if isinstance(which, str) else which
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): self.coeffs.one})

    def const(self, c) -> Polynomial:
        c = self.coeffs.convert(c)
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    def monomial(self, exps: Sequence[int], c=1) -> Polynomial:
        exps = tuple(exps)
        if len(exps) != self.nvars or min(exps, default=0) < 0:
            raise ValueError(f"bad exponent vector {exps} for {self}")
        c = self.coeffs.convert(c)
        return Polynomial(self, {exps: c} if c else {})

    def from_dict(self, terms: Mapping) -> Polynomial:
        conv = self.coeffs.convert
        out = {}
        for m, c in terms.items():
            m = tuple(m)
            if len(m) != self.nvars:
                raise ValueError(f"exponent vector {m} has wrong length")
            c = conv(c)
            if c:
                out[m] = c
        return Polynomial(self, out)

    def __call__(self, value) -> Polynomial:
        if isinstance(value, Polynomial):
            if value.ring == self:
                return value
            return value.change_ring(self)
        if isinstance(value, str):
            return self.parse(value)
        return self.const(value)

    def with_coeffs(self, coeffs: Ring) -> PolyRing:
        return PolyRing(self.names, coeffs)

    def extend(self, names: Iterable[str]) -> PolyRing:
        return PolyRing(self.names + tuple(names), self.coeffs)

    def parse(self, text: str) -> Polynomial:
        return parse_polynomial(text, self)


class Polynomial:
    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: dict):
        # terms must already be canonical: raw coefficients, no zeros
        self.ring = ring
        self.terms = terms
        self._hash = None

    # -- basic protocol ---------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            try:
                return self == self.ring.const(other)
            except RingError:
                return False
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r}, {self.ring.coeffs})"

    def __str__(self):
        return format_polynomial(self)

    # -- arithmetic -------------------------------------------------------------

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        R = self.ring.coeffs
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = R.add(out.get(m, R.zero), c)
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        R = self.ring.coeffs
        return Polynomial(self.ring, {m: R.neg(c) for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        other = self._coerce(other)
        return _mul(self, other)

    __rmul__ = __mul__

    def scale(self, c) -> Polynomial:
        R = self.ring.coeffs
        c = R.convert(c)
        if not c:
            return self.ring.zero
        out = {}
        for m, v in self.terms.items():
            w = R.mul(v, c)
            if w:
                out[m] = w
        return Polynomial(self.ring, out)

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("polynomial powers need a nonnegative integer exponent")
        result, base = self.ring.one, self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- structure --------------------------------------------------------------

    def degree(self, indices: Sequence[int] | None = None) -> int:
        """Total degree (in the variables ``indices``, default all); -1 for zero."""
        if not self.terms:
            return -1
        if indices is None:
            return max(sum(m) for m in self.terms)
        return max(sum(m[i] for i in indices) for m in self.terms)

    @property
    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.ring.nvars, self.ring.coeffs.zero)

    def coefficient(self, exps: Sequence[int]):
        return self.terms.get(tuple(exps), self.ring.coeffs.zero)

    def sorted_terms(self, order: MonomialOrder = GREVLEX) -> list:
        return sorted(self.terms.items(), key=lambda t: order.rank(t[0]))

    def leading_monomial(self, order: MonomialOrder = GREVLEX) -> Monomial:
        return min(self.terms, key=order.rank)

    def leading_coefficient(self, order: MonomialOrder = GREVLEX):
        return self.terms[self.leading_monomial(order)]

    def variables_used(self) -> set[int]:
        return {i for m in self.terms for i, e in enumerate(m) if e}

    def homogeneous_part(self, k: int, indices: Sequence[int] | None = None) -> Polynomial:
        idx = range(self.ring.nvars) if indices is None else indices
        return Polynomial(self.ring, {m: c for m, c in self.terms.items() if sum(m[i] for i in idx) == k})

    def truncate(self, k: int, indices: Sequence[int] | None = None) -> Polynomial:
        """Drop the terms of degree above ``k`` (in ``indices``)."""
        idx = range(self.ring.nvars) if indices is None else indices
        return Polynomial(self.ring, {m: c for m, c in self.terms.items() if sum(m[i] for i in idx) <= k})

    def collect(self, indices: Sequence[int]) -> dict:
        """Group by the exponents of ``indices``; the values drop those variables to 0."""
        out: dict = {}
        for m, c in self.terms.items():
            key = tuple(m[i] for i in indices)
            rest = list(m)
            for i in indices:
                rest[i] = 0
            out.setdefault(key, {})[tuple(rest)] = c
        return {k: Polynomial(self.ring, v) for k, v in out.items()}

    # -- calculus and evaluation -----------------------------------------------

    def diff(self, i) -> Polynomial:
        """Formal partial derivative in variable ``i`` (index or name)."""
        if isinstance(i, str):
            i = self.ring.index(i)
        if not 0 <= i < self.ring.nvars:
            raise IndexError(f"variable index {i} out of range")
        R = self.ring.coeffs
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                v = R.mul(c, R.convert(e))
                if v:
                    out[m[:i] + (e - 1,) + m[i + 1 :]] = v
        return Polynomial(self.ring, out)

    def evaluate(self, point: Sequence):
        """Exact value at ``point`` (one coefficient-ring value per variable)."""
        R = self.ring.coeffs
        if len(point) != self.ring.nvars:
            raise ValueError(f"expected {self.ring.nvars} values, got {len(point)}")
        vals = [R.convert(v) for v in point]
        total = R.zero
        for m, c in self.terms.items():
            t = c
            for v, e in zip(vals, m):
                if e:
                    t = R.mul(t, R.pow(v, e))
            total = R.add(total, t)
        return R.element(total)

    def evaluate_generic(self, point: Sequence, one):
        """Evaluate with values from any commutative ring containing the coefficients.

        ``one`` is the multiplicative identity of the target; coefficients
        enter through ``coeff * one``.
        """
        if len(point) != self.ring.nvars:
            raise ValueError(f"expected {self.ring.nvars} values, got {len(point)}")
        total = one * 0
        for m, c in self.terms.items():
            t = one * c
            for v, e in zip(point, m):
                for _ in range(e):
                    t = t * v
            total = total + t
        return total

    def substitute(self, images: Sequence | Mapping, *, truncate: int | None = None, degree_indices=None) -> Polynomial:
        """Ring homomorphism sending variable ``i`` to ``images[i]``.

        ``images`` may be a full sequence or a mapping from names/indices to
        images (unmapped variables stay put).  All images share one target
        ring; coefficients are mapped into it.  With ``truncate`` the result
        (and intermediate products) keep only terms of degree ≤ ``truncate``
        in ``degree_indices`` of the target ring.
        """
        if isinstance(images, Mapping):
            target = next(
                (v.ring for v in images.values() if isinstance(v, Polynomial)), self.ring
            )
            full = []
            for i, name in enumerate(self.ring.names):
                img = images.get(name, images.get(i))
                if img is None:
                    img = target.gen(name) if name in target._index else None
                    if img is None:
                        raise ValueError(f"no image for variable {name!r}")
                full.append(img)
            images = full
        if len(images) != self.ring.nvars:
            raise ValueError(f"expected {self.ring.nvars} images, got {len(images)}")
        target = next((v.ring for v in images if isinstance(v, Polynomial)), self.ring)
        imgs = [v if isinstance(v, Polynomial) else target.const(v) for v in images]
        for v in imgs:
            if v.ring != target:
                raise RingMismatch("substitution images live in different rings")
        conv = _coeff_map(self.ring.coeffs, target.coeffs)
        powers: list[dict[int, Polynomial]] = [{1: v} for v in imgs]

        def power(i, e):
            cache = powers[i]
            if e not in cache:
                half = power(i, e // 2)
                sq = _mul(half, half, truncate, degree_indices)
                cache[e] = _mul(sq, imgs[i], truncate, degree_indices) if e % 2 else sq
            return cache[e]

        acc: dict = {}
        TR = target.coeffs
        for m, c in self.terms.items():
            cc = conv(c)
            if not cc:
                continue
            term = None
            for i, e in enumerate(m):
                if e:
                    p = power(i, e)
                    term = p if term is None else _mul(term, p, truncate, degree_indices)
            if term is None:
                term = target.one
            for tm, tc in term.terms.items():
                v = TR.add(acc.get(tm, TR.zero), TR.mul(tc, cc))
                if v:
                    acc[tm] = v
                else:
                    acc.pop(tm, None)
        out = Polynomial(target, acc)
        return out if truncate is None else out.truncate(truncate, degree_indices)

    # -- coefficient-ring changes -------------------------------------------

    def change_ring(self, ring: PolyRing) -> Polynomial:
        """Same terms in ``ring``: variables matched by name, coefficients mapped."""
        if ring.names == self.ring.names:
            perm = None
        else:
            # variables missing from ``ring`` are allowed if they never occur
            used = self.variables_used()
            perm = [ring._index.get(n) for n in self.ring.names]
            for i, j in enumerate(perm):
                if j is None and i in used:
                    raise RingMismatch(f"variable {self.ring.names[i]!r} not in {ring!r}")
        conv = _coeff_map(self.ring.coeffs, ring.coeffs)
        out = {}
        for m, c in self.terms.items():
            if perm is not None:
                mm = [0] * ring.nvars
                for i, e in zip(perm, m):
                    if e:
                        mm[i] = e
                m = tuple(mm)
            v = conv(c)
            if v:
                out[m] = v
        return Polynomial(ring, out)

    def reduce_mod_p(self, p: int) -> Polynomial:
        if self.ring.coeffs.kind == "GF" and self.ring.coeffs.p != p:
            raise RingMismatch(f"cannot reduce a {self.ring.coeffs} polynomial mod {p}")
        return self.change_ring(self.ring.with_coeffs(GF(p)))

    def integer_normalize(self) -> tuple[int, int, Polynomial]:
        """Return ``(den, cont, prim)`` with ``self == cont/den * prim`` and
        ``prim`` a primitive polynomial over ZZ."""
        if not self.terms:
            raise ValueError("integer_normalize of the zero polynomial")
        if self.ring.coeffs.kind == "GF":
            raise RingMismatch("integer_normalize needs ZZ or QQ coefficients")
        coeffs = [Fraction(c) for c in self.terms.values()]
        den = lcm(c.denominator for c in coeffs)
        nums = {m: int(Fraction(c) * den) for m, c in self.terms.items()}
        cont = content(nums.values())
        prim = {m: v // cont for m, v in nums.items()}
        return den, cont, Polynomial(self.ring.with_coeffs(ZZ), prim)

    def primitive(self) -> Polynomial:
        """Primitive integer associate with positive leading coefficient (grevlex)."""
        _, _, prim = self.integer_normalize()
        if prim.leading_coefficient() < 0:
            prim = -prim
        return prim

    def monic(self, order: MonomialOrder = GREVLEX) -> Polynomial:
        R = self.ring.coeffs
        if not self.terms:
            return self
        return self.scale(R.inv(self.leading_coefficient(order)))


def _mul(a: Polynomial, b: Polynomial, truncate=None, indices=None) -> Polynomial:
    R = a.ring.coeffs
    p = R.p
    out: dict = {}
    get = out.get
    if truncate is not None:
        idx = range(a.ring.nvars) if indices is None else indices
        bt = [(m, c, sum(m[i] for i in idx)) for m, c in b.terms.items()]
        for m1, c1 in a.terms.items():
            d1 = sum(m1[i] for i in idx)
            if d1 > truncate:
                continue
            for m2, c2, d2 in bt:
                if d1 + d2 > truncate:
                    continue
                m = tuple([x + y for x, y in zip(m1, m2)])
                out[m] = get(m, 0) + c1 * c2
    else:
        bt = list(b.terms.items())
        for m1, c1 in a.terms.items():
            for m2, c2 in bt:
                m = tuple([x + y for x, y in zip(m1, m2)])
                out[m] = get(m, 0) + c1 * c2
    if p:
        out = {m: c % p for m, c in out.items() if c % p}
    else:
        out = {m: c for m, c in out.items() if c}
    return Polynomial(a.ring, out)


def _coeff_map(src: Ring, dst: Ring):
    if src == dst:
        return lambda c: c
    if src.kind == "GF":
        raise RingMismatch(f"no coefficient map {src} -> {dst}")
    return dst.convert  # QQ -> ZZ raises on non-integers


# -- text format ------------------------------------------------------------


def _format_coeff(c, ring: Ring) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return str(c)


def format_polynomial(f: Polynomial, names: Sequence[str] | None = None, order: MonomialOrder = GREVLEX) -> str:
    """Deterministic text form; ``names`` overrides the ring's variable names."""
    names = names or f.ring.names
    if not f.terms:
        return "0"
    R = f.ring.coeffs
    parts = []
    for m, c in f.sorted_terms(order):
        neg = False
        if R.kind != "GF" and c < 0:
            neg, c = True, -c
        mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e)
        cs = _format_coeff(c, R)
        if not mono:
            body = cs
        elif cs == "1":
            body = mono
        else:
            body = f"{cs}*{mono}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str):
    pos = 0
    toks = []
    n = len(text)
    while pos < n:
        mt = _TOKEN.match(text, pos)
        if mt is None or mt.end() == pos:
            break
        num, ident, other = mt.groups()
        start = mt.start(mt.lastindex) if mt.lastindex else pos
        if num is not None:
            toks.append(("num", num, start))
        elif ident is not None:
            toks.append(("id", ident, start))
        elif other is not None and not other.isspace():
            toks.append(("op", other, start))
        pos = mt.end()
    toks.append(("end", "", len(text)))
    return toks


def parse_polynomial(text: str, ring: PolyRing, aliases: Mapping[str, str] | None = None) -> Polynomial:
    """Parse ``text`` into ``ring``; ``aliases`` maps alternative names to ring names."""
    toks = _tokenize(text)
    pos = 0
    R = ring.coeffs

    def peek():
        return toks[pos]

    def take():
        nonlocal pos
        t = toks[pos]
        pos += 1
        return t

    def fail(msg, tok=None):
        tok = tok or peek()
        raise PolySyntaxError(msg, tok[2], text)

    def varpow(exps):
        kind, val, off = take()
        name = aliases.get(val, val) if aliases else val
        if name not in ring._index:
            raise PolySyntaxError(f"unknown variable {val!r}", off, text)
        e = 1
        if peek()[:2] == ("op", "^"):
            take()
            if peek()[0] != "num":
                fail("expected exponent")
            e = int(take()[1])
        exps[ring._index[name]] += e

    def term():
        exps = [0] * ring.nvars
        coeff = Fraction(1)
        kind = peek()[0]
        if kind == "num":
            numtok = take()
            num = int(numtok[1])
            den = 1
            if peek()[:2] == ("op", "/"):
                take()
                if peek()[0] != "num":
                    fail("expected denominator")
                den = int(take()[1])
                if den == 0:
                    fail("zero denominator", numtok)
            coeff = Fraction(num, den)
            while True:
                t = peek()
                if t[:2] == ("op", "*"):
                    take()
                    if peek()[0] != "id":
                        fail("expected variable")
                    varpow(exps)
                elif t[0] == "id":
                    varpow(exps)
                else:
                    break
        elif kind == "id":
            varpow(exps)
            while peek()[:2] == ("op", "*"):
                take()
                if peek()[0] != "id":
                    fail("expected variable")
                varpow(exps)
        else:
            fail("expected term")
        return tuple(exps), coeff

    terms: dict = {}
    sign = 1
    if peek()[:2] in (("op", "-"), ("op", "+")):
        sign = -1 if take()[1] == "-" else 1
    while True:
        start = peek()
        m, c = term()
        try:
            cc = R.convert(c * sign)
        except DenominatorVanishesModP as exc:
            raise PolySyntaxError(f"coefficient {c} not in {R}", start[2], text) from exc
        except RingMismatch as exc:
            raise PolySyntaxError(f"coefficient {c} not in {R}", start[2], text) from exc
        v = R.add(terms.get(m, R.zero), cc)
        if v:
            terms[m] = v
        else:
            terms.pop(m, None)
        t = peek()
        if t[:2] in (("op", "+"), ("op", "-")):
            take()
            sign = -1 if t[1] == "-" else 1
            continue
        if t[0] != "end":
            fail(f"unexpected {t[1]!r}")
        break
    return Polynomial(ring, terms)


def exact_quotient(f: Polynomial, g: Polynomial) -> Polynomial:
    """``f / g`` when ``g`` divides ``f`` exactly; raises NonExactDivision otherwise."""
    from .arith import NonExactDivision

    if f.ring != g.ring:
        raise RingMismatch(f"{f.ring} vs {g.ring}")
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    R = f.ring.coeffs
    glm = g.leading_monomial()
    glc = g.terms[glm]
    rem = f
    q: dict = {}
    while rem:
        m = rem.leading_monomial()
        d = tuple(a - b for a, b in zip(m, glm))
        if min(d) < 0:
            raise NonExactDivision("polynomial division leaves a remainder")
        c = R.div(rem.terms[m], glc)
        q[d] = c
        rem = rem - _mul(Polynomial(f.ring, {d: c}), g)
    return Polynomial(f.ring, q)
