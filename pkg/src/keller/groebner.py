"""Gröbner bases over QQ and GF(p): Buchberger's algorithm, normal forms,
ideal membership and radical membership (Rabinowitsch).

Internally polynomials are plain dicts ``{exponent tuple: coeff}`` kept monic;
QQ coefficients use ``gmpy2.mpq``, GF(p) coefficients are residues.  Pairs are
chosen by the normal strategy (smallest lcm, ties by index).  By default the
product criterion and the chain criterion prune pairs; ``gebauer_moeller=True``
switches to the Gebauer–Möller update instead.  Either way the reduced basis
is unique, so results do not depend on the flag.

Computed bases are written to a small text cache (see :class:`BasisCache`)
keyed by a hash of the ring, the order and the generators.
"""

from __future__ import annotations

import hashlib
import heapq
import logging
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from operator import ge
from pathlib import Path
from typing import Callable, Iterable, Sequence

import gmpy2

from .arith import RingError
from .poly import GREVLEX, MonomialOrder, PolyRing, Polynomial, format_polynomial

log = logging.getLogger(__name__)

CACHE_VERSION = 1


class OrderMismatch(ValueError):
    pass


# -- internal representation -------------------------------------------------


class _Field:
    """Coefficient arithmetic for the internal engine (p == 0 means QQ)."""

    def __init__(self, p: int):
        self.p = p

    def to_internal(self, c):
        if self.p:
            return c
        return gmpy2.mpq(c.numerator, c.denominator)

    def to_external(self, c):
        if self.p:
            return int(c)
        return Fraction(int(c.numerator), int(c.denominator))

    def inv(self, c):
        return pow(c, -1, self.p) if self.p else 1 / c


def _mask(m) -> int:
    b = 0
    for i, e in enumerate(m):
        if e:
            b |= 1 << i
    return b


class _Poly:
    __slots__ = ("terms", "lm", "mask", "tail", "deg")

    def __init__(self, terms: dict, lm):
        self.terms = terms
        self.lm = lm
        self.mask = _mask(lm)
        self.deg = sum(lm)
        self.tail = [(m, c) for m, c in terms.items() if m != lm]


class _Engine:
    def __init__(self, nvars: int, order: MonomialOrder, p: int):
        self.n = nvars
        self.order = order
        self.F = _Field(p)
        self.p = p
        self._ranks: dict = {}
        rank = order.rank
        ranks = self._ranks

        def r(m):
            v = ranks.get(m)
            if v is None:
                v = ranks[m] = rank(m)
            return v

        self.rank = r

    def ascending(self, m) -> tuple:
        return tuple([-v for v in self.rank(m)])

    def make(self, terms: dict) -> _Poly | None:
        if not terms:
            return None
        lm = min(terms, key=self.rank)
        lc = terms[lm]
        if lc != 1:
            inv = self.F.inv(lc)
            p = self.p
            if p:
                terms = {m: c * inv % p for m, c in terms.items()}
            else:
                terms = {m: c * inv for m, c in terms.items()}
        return _Poly(terms, lm)

    @staticmethod
    def _find_divisor(m, mmask, mdeg, polys):
        for g in polys:
            if g.deg <= mdeg and not (g.mask & ~mmask) and all(map(ge, m, g.lm)):
                return g
        return None

    def reduce(self, f: dict, polys: Sequence[_Poly], full: bool = True) -> dict:
        """Remainder of ``f`` on division by ``polys`` (monic)."""
        if not f or not polys:
            return dict(f)
        p = self.p
        rank = self.rank
        f = dict(f)
        heap = [(rank(m), m) for m in f]
        heapq.heapify(heap)
        rem: dict = {}
        find = self._find_divisor
        while heap:
            _, m = heapq.heappop(heap)
            c = f.pop(m, None)
            if c is None:
                continue
            g = find(m, _mask(m), sum(m), polys)
            if g is None:
                rem[m] = c
                if not full:
                    rem.update(f)
                    return rem
                continue
            q = tuple([a - b for a, b in zip(m, g.lm)])
            for tm, tc in g.tail:
                mm = tuple([a + b for a, b in zip(q, tm)])
                v = f.get(mm)
                if v is None:
                    v = -c * tc
                    if p:
                        v %= p
                    f[mm] = v
                    heapq.heappush(heap, (rank(mm), mm))
                else:
                    v = v - c * tc
                    if p:
                        v %= p
                    if v:
                        f[mm] = v
                    else:
                        del f[mm]
        return rem

    def spoly(self, f: _Poly, g: _Poly) -> dict:
        lcm = tuple(map(max, f.lm, g.lm))
        uf = tuple([a - b for a, b in zip(lcm, f.lm)])
        ug = tuple([a - b for a, b in zip(lcm, g.lm)])
        p = self.p
        out: dict = {}
        for m, c in f.tail:
            out[tuple([a + b for a, b in zip(uf, m)])] = c
        for m, c in g.tail:
            mm = tuple([a + b for a, b in zip(ug, m)])
            v = out.get(mm, 0) - c
            if p:
                v %= p
            if v:
                out[mm] = v
            else:
                out.pop(mm, None)
        return out

    # -- Buchberger ----------------------------------------------------------

    def buchberger(
        self,
        gens: list[dict],
        *,
        gebauer_moeller: bool = False,
        progress: Callable[[dict], None] | None = None,
    ) -> list[_Poly]:
        """Unreduced Gröbner basis; returns ``[unit]`` as soon as a constant appears."""
        polys: list[_Poly] = []
        active: list[int] = []
        heap: list = []  # (ascending key of lcm, i, j): smallest lcm first
        live: set = set()  # pairs still waiting (chain criterion bookkeeping)
        rank = self.rank
        stats = {"pairs": 0, "reductions_to_zero": 0, "basis": 0}

        def lcm_of(i, j):
            return tuple(map(max, polys[i].lm, polys[j].lm))

        def add_pair(i, j):
            heapq.heappush(heap, (self.ascending(lcm_of(i, j)), i, j))
            live.add((i, j))

        def insert(h: _Poly) -> bool:
            polys.append(h)
            k = len(polys) - 1
            if h.deg == 0:
                return True
            if gebauer_moeller:
                self._gm_update(polys, active, heap, live, k)
            else:
                for i in active:
                    add_pair(i, k)
                active.append(k)
            return False

        for g in gens:
            h = self.make(self.reduce(g, [polys[i] for i in active]) if active else dict(g))
            if h is None:
                continue
            if insert(h):
                return [h]

        while heap:
            _, i, j = heapq.heappop(heap)
            if (i, j) not in live:
                continue
            live.discard((i, j))
            f, g = polys[i], polys[j]
            if not gebauer_moeller:
                # product criterion
                if not (f.mask & g.mask) or all(a == 0 or b == 0 for a, b in zip(f.lm, g.lm)):
                    continue
                # chain criterion
                lcm = lcm_of(i, j)
                if self._chain(i, j, lcm, polys, active, live):
                    continue
            stats["pairs"] += 1
            s = self.spoly(f, g)
            r = self.reduce(s, [polys[k] for k in active])
            h = self.make(r)
            if h is None:
                stats["reductions_to_zero"] += 1
            elif insert(h):
                return [h]
            if progress is not None and stats["pairs"] % 50 == 0:
                stats["basis"] = len(active)
                stats["queue"] = len(live)
                progress(dict(stats))
        return [polys[k] for k in active]

    @staticmethod
    def _chain(i, j, lcm, polys, active, live) -> bool:
        for k in active:
            if k in (i, j):
                continue
            if not all(map(ge, lcm, polys[k].lm)):
                continue
            a = (i, k) if i < k else (k, i)
            b = (j, k) if j < k else (k, j)
            if a not in live and b not in live:
                return True
        return False

    def _gm_update(self, polys, active, heap, live, k):
        h = polys[k]
        rank = self.rank
        hl = h.lm

        def lcm2(a, b):
            return tuple(map(max, a, b))

        def divides(a, b):
            return all(map(ge, b, a))

        def coprime(a, b):
            return all(x == 0 or y == 0 for x, y in zip(a, b))

        C = [(i, lcm2(polys[i].lm, hl)) for i in active]
        D = []
        while C:
            i, l = C.pop(0)
            if coprime(polys[i].lm, hl) or not any(divides(l2, l) for _, l2 in C + D):
                D.append((i, l))
        E = [(i, l) for i, l in D if not coprime(polys[i].lm, hl)]
        # prune old pairs
        for pair in list(live):
            a, b = pair
            l = lcm2(polys[a].lm, polys[b].lm)
            if divides(hl, l) and lcm2(polys[a].lm, hl) != l and lcm2(polys[b].lm, hl) != l:
                live.discard(pair)
        for i, l in E:
            heapq.heappush(heap, (self.ascending(l), i, k))
            live.add((i, k))
        active[:] = [i for i in active if not divides(hl, polys[i].lm)] + [k]

    def reduced(self, basis: list[_Poly]) -> list[_Poly]:
        """Minimalize and interreduce a Gröbner basis; sorted by descending LM."""
        basis = sorted(basis, key=lambda g: self.rank(g.lm), reverse=True)
        minimal: list[_Poly] = []
        for g in basis:
            if any(all(map(ge, g.lm, h.lm)) for h in minimal):
                continue
            minimal = [h for h in minimal if not all(map(ge, h.lm, g.lm))]
            minimal.append(g)
        out = []
        for g in minimal:
            others = [h for h in minimal if h is not g]
            tail = self.reduce(dict(g.tail), others)
            terms = dict(tail)
            terms[g.lm] = 1
            out.append(_Poly(terms, g.lm))
        out.sort(key=lambda g: self.rank(g.lm))
        return out


# -- public API -----------------------------------------------------------------


@dataclass
class GroebnerBasis:
    """A reduced Gröbner basis together with the order it was computed for."""

    polys: list[Polynomial]
    order: MonomialOrder
    ring: PolyRing

    def __iter__(self):
        return iter(self.polys)

    def __len__(self):
        return len(self.polys)

    @property
    def is_unit(self) -> bool:
        return len(self.polys) == 1 and self.polys[0].is_constant and bool(self.polys[0])


def _check_field(ring: PolyRing):
    if not ring.coeffs.is_field:
        raise RingError(f"Gröbner computations need field coefficients, not {ring.coeffs}")


def _to_internal(polys: Iterable[Polynomial], F: _Field) -> list[dict]:
    out = []
    for f in polys:
        d = {m: F.to_internal(c) for m, c in f.terms.items()}
        if d:
            out.append(d)
    return out


def _to_external(g: _Poly | dict, ring: PolyRing, F: _Field) -> Polynomial:
    terms = g.terms if isinstance(g, _Poly) else g
    return Polynomial(ring, {m: F.to_external(c) for m, c in terms.items()})


def groebner_basis(
    generators: Sequence[Polynomial],
    order: MonomialOrder | str = GREVLEX,
    *,
    ring: PolyRing | None = None,
    gebauer_moeller: bool = False,
    progress: Callable[[dict], None] | None = None,
    cache: BasisCache | bool | None = None,
) -> GroebnerBasis:
    """Reduced Gröbner basis of the ideal generated by ``generators``.

    The computation stops early with ``[1]`` once a nonzero constant shows
    up, which keeps radical-membership checks cheap.  ``cache`` is a :class:`BasisCache`, ``True``
    for the default cache, or falsy to skip the disk cache.
    """
    order = MonomialOrder.parse(order)
    gens = [g for g in generators if g]
    if ring is None:
        if not gens:
            raise ValueError("need a ring for an empty generator list")
        ring = gens[0].ring
    _check_field(ring)
    for g in gens:
        if g.ring != ring:
            raise RingError("generators live in different rings")
    if cache is True:
        cache = BasisCache.default()
    key = None
    if cache:
        key = cache_key(gens, order, ring)
        hit = cache.load(key, ring)
        if hit is not None:
            return GroebnerBasis(hit, order, ring)
    if not gens:
        return GroebnerBasis([], order, ring)
    F = _Field(ring.coeffs.p)
    eng = _Engine(ring.nvars, order, ring.coeffs.p)
    raw = eng.buchberger(
        _to_internal(gens, F), gebauer_moeller=gebauer_moeller, progress=progress
    )
    if any(g.deg == 0 for g in raw):
        basis = [ring.one]
    else:
        basis = [_to_external(g, ring, F) for g in eng.reduced(raw)]
    if cache:
        cache.store(key, order, ring, basis)
    return GroebnerBasis(basis, order, ring)


def normal_form(f: Polynomial, basis: GroebnerBasis | Sequence[Polynomial], order: MonomialOrder | str | None = None) -> Polynomial:
    """Remainder of ``f`` under full multivariate division by ``basis``.

    For a :class:`GroebnerBasis` the order defaults to the basis order and
    a different explicit order raises :class:`OrderMismatch`.
    """
    if isinstance(basis, GroebnerBasis):
        if order is not None and MonomialOrder.parse(order) is not basis.order:
            raise OrderMismatch(f"basis computed for {basis.order.value}, not {MonomialOrder.parse(order).value}")
        order = basis.order
        polys = basis.polys
    else:
        polys = list(basis)
        order = MonomialOrder.parse(order or GREVLEX)
    ring = f.ring
    _check_field(ring)
    F = _Field(ring.coeffs.p)
    eng = _Engine(ring.nvars, order, ring.coeffs.p)
    internal = [eng.make(d) for d in _to_internal(polys, F)]
    internal = [g for g in internal if g is not None]
    rem = eng.reduce({m: F.to_internal(c) for m, c in f.terms.items()}, internal)
    return _to_external(rem, ring, F)


def s_polynomial(f: Polynomial, g: Polynomial, order: MonomialOrder | str = GREVLEX) -> Polynomial:
    order = MonomialOrder.parse(order)
    ring = f.ring
    F = _Field(ring.coeffs.p)
    eng = _Engine(ring.nvars, order, ring.coeffs.p)
    a, b = (eng.make({m: F.to_internal(c) for m, c in h.terms.items()}) for h in (f, g))
    return _to_external(eng.spoly(a, b), ring, F)


def is_groebner(basis: GroebnerBasis | Sequence[Polynomial], order: MonomialOrder | str | None = None) -> bool:
    """Check Buchberger's criterion directly: every S-polynomial reduces to 0."""
    if isinstance(basis, GroebnerBasis):
        order, polys = basis.order, basis.polys
    else:
        polys = list(basis)
        order = MonomialOrder.parse(order or GREVLEX)
    polys = [g for g in polys if g]
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            if normal_form(s_polynomial(polys[i], polys[j], order), polys, order):
                return False
    return True


class Ideal:
    """An ideal given by generators, with Gröbner bases cached per order."""

    def __init__(self, generators: Iterable[Polynomial], ring: PolyRing | None = None, *, cache: BasisCache | bool | None = None):
        self.generators = [g for g in generators if g]
        if ring is None:
            if not self.generators:
                raise ValueError("need a ring for an empty ideal")
            ring = self.generators[0].ring
        self.ring = ring
        self.cache = cache
        self._bases: dict[MonomialOrder, GroebnerBasis] = {}

    def __repr__(self):
        return f"Ideal({len(self.generators)} generators in {self.ring})"

    def groebner(self, order: MonomialOrder | str = GREVLEX, **kw) -> GroebnerBasis:
        order = MonomialOrder.parse(order)
        if order not in self._bases:
            kw.setdefault("cache", self.cache)
            self._bases[order] = groebner_basis(self.generators, order, ring=self.ring, **kw)
        return self._bases[order]

    def normal_form(self, f: Polynomial, order: MonomialOrder | str = GREVLEX) -> Polynomial:
        return normal_form(f, self.groebner(order))

    def contains(self, f: Polynomial, order: MonomialOrder | str = GREVLEX) -> bool:
        return not self.normal_form(f, order)

    __contains__ = contains

    def radical_contains(self, f: Polynomial, **kw) -> bool:
        return radical_member(f, self, **kw)


def ideal_member(f: Polynomial, ideal: Ideal | Sequence[Polynomial], order: MonomialOrder | str = GREVLEX) -> bool:
    if not isinstance(ideal, Ideal):
        ideal = Ideal(ideal, f.ring)
    return ideal.contains(f, order)


def _fresh_name(ring: PolyRing, stem: str = "t") -> str:
    name = stem
    while name in ring.names:
        name += "_"
    return name


def radical_member(
    f: Polynomial,
    ideal: Ideal | Sequence[Polynomial],
    *,
    order: MonomialOrder | str = GREVLEX,
    cache: BasisCache | bool | None = None,
    progress: Callable[[dict], None] | None = None,
) -> bool:
    """Decide ``f ∈ rad(I)`` via ``1 ∈ I + (1 - t f)`` with a fresh variable ``t``."""
    if not isinstance(ideal, Ideal):
        ideal = Ideal(ideal, f.ring)
    ring = ideal.ring
    if f.ring != ring:
        raise RingError("polynomial and ideal live in different rings")
    _check_field(ring)
    if not f:
        return True
    big = ring.extend([_fresh_name(ring)])
    t = big.gen(ring.nvars)
    lift = [g.change_ring(big) for g in ideal.generators]
    gens = lift + [big.one - t * f.change_ring(big)]
    if cache is None:
        cache = ideal.cache
    gb = groebner_basis(gens, order, ring=big, cache=cache, progress=progress)
    return gb.is_unit


# -- disk cache -------------------------------------------------------------------


def cache_key(gens: Sequence[Polynomial], order: MonomialOrder, ring: PolyRing) -> str:
    h = hashlib.sha256()
    h.update(f"v{CACHE_VERSION}\n{order.value}\n{ring.coeffs}\n{','.join(ring.names)}\n".encode())
    for g in gens:
        h.update(format_polynomial(g).encode())
        h.update(b"\n")
    return h.hexdigest()


@dataclass
class BasisCache:
    """Versioned text files, one per (generators, order) hash.

    Layout::

        keller-groebner-cache 1
        hash <sha256>
        order grevlex
        coeffs QQ
        vars a,b,c
        count 3
        <one basis polynomial per line>
    """

    directory: Path
    enabled: bool = True
    hits: int = field(default=0, compare=False)

    @classmethod
    def default(cls) -> BasisCache:
        env = os.environ.get("KELLER_CACHE_DIR")
        if env:
            return cls(Path(env))
        base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
        return cls(Path(base) / "keller")

    def __bool__(self):
        return self.enabled

    def path(self, key: str) -> Path:
        return self.directory / f"{key}.gb"

    def load(self, key: str, ring: PolyRing) -> list[Polynomial] | None:
        path = self.path(key)
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except OSError:
            return None
        try:
            head = dict(line.split(" ", 1) for line in lines[1:6])
            if lines[0] != f"keller-groebner-cache {CACHE_VERSION}" or head["hash"] != key:
                return None
            if head["vars"] != ",".join(ring.names) or head["coeffs"] != str(ring.coeffs):
                return None
            count = int(head["count"])
            polys = [ring.parse(line) for line in lines[6 : 6 + count]]
        except (ValueError, KeyError, IndexError):
            log.warning("ignoring malformed cache file %s", path)
            return None
        if len(polys) != count:
            return None
        self.hits += 1
        return polys

    def store(self, key: str, order: MonomialOrder, ring: PolyRing, basis: Sequence[Polynomial]) -> None:
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            text = "\n".join(
                [
                    f"keller-groebner-cache {CACHE_VERSION}",
                    f"hash {key}",
                    f"order {order.value}",
                    f"coeffs {ring.coeffs}",
                    f"vars {','.join(ring.names)}",
                    f"count {len(basis)}",
                    *(format_polynomial(g) for g in basis),
                ]
            )
            fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
            os.replace(tmp, self.path(key))
        except OSError as exc:
            log.warning("could not write Gröbner cache: %s", exc)
