"""Shared hypothesis strategies and sympy bridges for the tests."""

from fractions import Fraction

import sympy as sp
from hypothesis import strategies as st

from keller.arith import GF, QQ, ZZ
from keller.poly import PolyRing

RINGS = [ZZ, QQ, GF(2), GF(3), GF(5)]


def coeffs_for(R, bound=5):
    if R.kind == "QQ":
        return st.fractions(min_value=-bound, max_value=bound, max_denominator=4)
    if R.kind == "GF":
        return st.integers(0, R.p - 1)
    return st.integers(-bound, bound)


@st.composite
def polys(draw, ring: PolyRing, max_deg=3, max_terms=5, bound=5):
    n = ring.nvars
    terms = draw(
        st.lists(
            st.tuples(st.lists(st.integers(0, max_deg), min_size=n, max_size=n), coeffs_for(ring.coeffs, bound)),
            max_size=max_terms,
        )
    )
    f = ring.zero
    for e, c in terms:
        if sum(e) <= max_deg:
            f = f + ring.monomial(e, c)
    return f


def to_sympy(f):
    syms = sp.symbols(f.ring.names)
    expr = sp.Integer(0)
    for m, c in f.terms.items():
        c = sp.Rational(Fraction(c).numerator, Fraction(c).denominator) if f.ring.coeffs.kind == "QQ" else sp.Integer(int(c))
        t = c
        for s, e in zip(syms, m):
            t = t * s**e
        expr += t
    return sp.expand(expr)


def from_sympy(expr, ring: PolyRing):
    syms = sp.symbols(ring.names)
    P = sp.Poly(sp.expand(expr), *syms)
    f = ring.zero
    for m, c in P.terms():
        c = Fraction(int(c.p), int(c.q))
        f = f + ring.monomial(m, c if ring.coeffs.kind == "QQ" else int(c))
    return f


def random_poly(rng, R: PolyRing, deg: int, density=0.5, bound=3):
    """Random polynomial of total degree <= deg with small integer coefficients."""
    import itertools

    f = R.zero
    for e in itertools.product(range(deg + 1), repeat=R.nvars):
        if sum(e) <= deg and rng.random() < density:
            f = f + R.monomial(e, rng.randint(-bound, bound))
    return f


def random_map(rng, R: PolyRing, deg: int, **kw):
    from keller.polymap import PolyMap

    return PolyMap([random_poly(rng, R, deg, **kw) for _ in range(R.nvars)])
