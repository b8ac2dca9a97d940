"""Polynomial endomorphisms: Jacobians, composition, inverses and tame samples.

A :class:`PolyMap` is an ``n``-tuple of polynomials in ``n`` distinguished
variables of a :class:`~keller.poly.PolyRing`.  Other variables of the ring
(coefficient symbols, say) are parameters: they are left alone by
composition and differentiation.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence, Union

from .arith import GF, QQ, ZZ, Ring, RingError, RingMismatch
from .poly import Polynomial, PolyRing, exact_quotient, parse_polynomial

PolyMatrix = list  # list[list[Polynomial]]


class MapError(ValueError):
    pass


class NonInvertibleAffinePart(MapError):
    pass


class EnumerationCapExceeded(MapError):
    pass


class PolyMap:
    """An endomorphism ``x -> (F_1(x), ..., F_n(x))``.

    ``variables`` lists the ring indices of ``x_1 .. x_n``; by default they are
    all variables of the ring.
    """

    __slots__ = ("ring", "components", "variables")

    def __init__(self, components: Sequence[Polynomial], variables: Sequence[int] | None = None):
        components = tuple(components)
        if not components:
            raise MapError("a map needs at least one component")
        ring = components[0].ring
        for c in components:
            if c.ring != ring:
                raise RingMismatch("map components live in different rings")
        if variables is None:
            variables = range(ring.nvars)
        variables = tuple(variables)
        if len(variables) != len(components):
            raise MapError(f"{len(components)} components for {len(variables)} variables")
        self.ring = ring
        self.components = components
        self.variables = variables

    @classmethod
    def identity(cls, ring: PolyRing, variables: Sequence[int] | None = None) -> PolyMap:
        if variables is None:
            variables = range(ring.nvars)
        return cls([ring.gen(i) for i in variables], variables)

    @property
    def n(self) -> int:
        return len(self.components)

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i) -> Polynomial:
        return self.components[i]

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.variables == other.variables and self.components == other.components

    def __hash__(self):
        return hash((self.variables, self.components))

    def __repr__(self):
        return f"PolyMap({format_map(self)})"

    def __str__(self):
        return format_map(self)

    def __matmul__(self, other: PolyMap) -> PolyMap:
        return compose(self, other)

    def _like(self, components) -> PolyMap:
        return PolyMap(components, self.variables)

    def degree(self) -> int:
        return degree(self)

    def jacobian(self) -> PolyMatrix:
        return jacobian(self)

    def det_jac(self) -> Polynomial:
        return determinant(jacobian(self))

    def evaluate(self, point: Sequence) -> tuple:
        """Value at a point given in map coordinates (requires no parameters)."""
        if len(point) != self.n:
            raise MapError("point has the wrong length")
        full = [self.ring.coeffs.zero] * self.ring.nvars
        for i, v in zip(self.variables, point):
            full[i] = v
        return tuple(c.evaluate(full) for c in self.components)

    def reduce_mod_p(self, p: int) -> PolyMap:
        return reduce_map_mod_p(self, p)

    def change_ring(self, ring: PolyRing) -> PolyMap:
        names = [self.ring.names[i] for i in self.variables]
        return PolyMap([c.change_ring(ring) for c in self.components], [ring.index(s) for s in names])


# -- construction and text format --------------------------------------------------


def parse_map(text: str, ring: PolyRing, variables: Sequence[int] | None = None) -> PolyMap:
    """Parse ``[p1; p2; ...]``; brackets are optional."""
    t = text.strip()
    if t.startswith("[") and t.endswith("]"):
        t = t[1:-1]
    parts = [s for s in t.split(";")]
    if any(not s.strip() for s in parts):
        raise MapError(f"empty component in {text!r}")
    return PolyMap([parse_polynomial(s, ring) for s in parts], variables)


def format_map(F: PolyMap) -> str:
    return "[" + "; ".join(str(c) for c in F.components) + "]"


# -- Jacobians and determinants ------------------------------------------------------


def jacobian(F: PolyMap) -> PolyMatrix:
    return [[f.diff(j) for j in F.variables] for f in F.components]


def determinant(M: PolyMatrix) -> Polynomial:
    """Exact determinant: cofactor expansion up to 4x4, Bareiss beyond."""
    n = len(M)
    if n == 0 or any(len(row) != n for row in M):
        raise MapError("determinant of a non-square matrix")
    if n <= 4:
        return _cofactor_det(M, list(range(n)), 0)
    return bareiss_determinant(M)


def _cofactor_det(M, cols: list[int], row: int) -> Polynomial:
    if len(cols) == 1:
        return M[row][cols[0]]
    if len(cols) == 2:
        a, b = cols
        return M[row][a] * M[row + 1][b] - M[row][b] * M[row + 1][a]
    total = None
    for k, c in enumerate(cols):
        entry = M[row][c]
        if not entry:
            continue
        minor = _cofactor_det(M, cols[:k] + cols[k + 1 :], row + 1)
        term = entry * minor
        if k % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return M[row][cols[0]].ring.zero
    return total


def bareiss_determinant(M: PolyMatrix) -> Polynomial:
    """Fraction-free elimination; every division is exact in the polynomial ring."""
    n = len(M)
    A = [list(row) for row in M]
    ring = A[0][0].ring
    sign = 1
    prev = ring.one
    for k in range(n - 1):
        if not A[k][k]:
            for r in range(k + 1, n):
                if A[r][k]:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return ring.zero
        pivot = A[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = pivot * A[i][j] - A[i][k] * A[k][j]
                A[i][j] = num if prev == ring.one else exact_quotient(num, prev)
            A[i][k] = ring.zero
        prev = pivot
    det = A[n - 1][n - 1]
    return det if sign > 0 else -det


# -- composition and simple invariants ------------------------------------------------


def compose(F: PolyMap, G: PolyMap) -> PolyMap:
    """``F o G``: substitute ``G`` into the variables of ``F``."""
    if F.ring != G.ring:
        raise RingMismatch("cannot compose maps over different rings")
    if F.variables != G.variables:
        raise MapError("maps act on different variables")
    images: dict[int, Polynomial] = dict(zip(F.variables, G.components))
    return F._like([f.substitute(images) for f in F.components])


def degree(F: PolyMap) -> int:
    return max(f.degree(F.variables) for f in F.components)


def affine_part(F: PolyMap) -> PolyMap:
    return F._like([f.truncate(1, F.variables) for f in F.components])


def has_identity_affine_part(F: PolyMap) -> bool:
    return affine_part(F) == PolyMap.identity(F.ring, F.variables)


def linear_matrix(F: PolyMap) -> list[list]:
    """Coefficients of the linear part as raw ring values (requires no parameters)."""
    R = F.ring
    rows = []
    for f in F.components:
        row = []
        for j in F.variables:
            e = [0] * R.nvars
            e[j] = 1
            row.append(f.terms.get(tuple(e), R.coeffs.zero))
        rows.append(row)
    return rows


def translation(F: PolyMap) -> list:
    return [f.constant_term() for f in F.components]


def _require_no_parameters(F: PolyMap):
    if len(F.variables) != F.ring.nvars:
        raise MapError("operation needs a map without parameter variables")


def matrix_inverse(L: Sequence[Sequence], coeffs: Ring) -> list[list]:
    """Inverse of a square matrix of raw ring values (Gauss-Jordan over the fraction field)."""
    n = len(L)
    work = QQ if coeffs.kind == "ZZ" else coeffs
    A = [[work.convert(v) for v in row] + [work.one if i == j else work.zero for j in range(n)] for i, row in enumerate(L)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c]), None)
        if piv is None:
            raise NonInvertibleAffinePart("singular linear part")
        A[c], A[piv] = A[piv], A[c]
        inv = work.inv(A[c][c])
        A[c] = [work.mul(v, inv) for v in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [work.sub(a, work.mul(f, b)) for a, b in zip(A[r], A[c])]
    out = [row[n:] for row in A]
    if coeffs.kind == "ZZ":
        return [[coeffs.convert(v) for v in row] for row in out]
    return out


def affine_map(ring: PolyRing, variables: Sequence[int], L, c) -> PolyMap:
    """The map ``x -> L x + c`` on the given variables."""
    gens = [ring.gen(i) for i in variables]
    comps = []
    for row, ci in zip(L, c):
        f = ring.const(ci)
        for a, g in zip(row, gens):
            if a:
                f = f + g.scale(a)
        comps.append(f)
    return PolyMap(comps, variables)


def affine_inverse(F: PolyMap) -> PolyMap:
    """Inverse of the affine part of ``F``."""
    R = F.ring.coeffs
    L = linear_matrix(F)
    Li = matrix_inverse(L, R)
    c = translation(F)
    ci = [R.neg(sum_(R, (R.mul(a, b) for a, b in zip(row, c)))) for row in Li]
    return affine_map(F.ring, F.variables, Li, ci)


def sum_(R: Ring, values):
    acc = R.zero
    for v in values:
        acc = R.add(acc, v)
    return acc


# -- inverses ---------------------------------------------------------------------------


def formal_inverse(F: PolyMap, degree_bound: int) -> PolyMap | None:
    """Polynomial inverse of ``F`` of degree at most ``degree_bound``, or None.

    ``F`` is first normalized to ``x + H`` with ``H`` of order >= 2.  The
    inverse ``x + K`` then satisfies ``K_k = -[H(x + K_<k)]_k`` for every
    degree ``k``, which pins it down one homogeneous layer at a time.  Any
    candidate is accepted only after both compositions are checked.
    """
    _require_no_parameters(F)
    if not F.ring.coeffs.is_field:
        raise RingError("formal_inverse needs field coefficients")
    A_inv = affine_inverse(F)
    Ft = compose(A_inv, F)
    ring, vs = F.ring, F.variables
    ident = PolyMap.identity(ring, vs)
    H = [f - x for f, x in zip(Ft.components, ident.components)]
    K = [ring.zero] * F.n

    def attempt():
        G = ident._like([x + k for x, k in zip(ident.components, K)])
        if compose(Ft, G) == ident and compose(G, Ft) == ident:
            return compose(G, A_inv)
        return None

    if not any(H):
        return compose(ident, A_inv)
    for k in range(2, max(degree_bound, 1) + 1):
        G = {v: x + kk for v, x, kk in zip(vs, ident.components, K)}
        layer = [-(h.substitute(G, truncate=k, degree_indices=vs).homogeneous_part(k, vs)) for h in H]
        if not any(layer):
            got = attempt()
            if got is not None:
                return got
            continue
        K = [a + b for a, b in zip(K, layer)]
    got = attempt()
    return got if got is not None and degree(got) <= degree_bound else None


def inverse_degree_bound(F: PolyMap) -> int:
    return degree(F) ** (F.n - 1)


def is_invertible(F: PolyMap) -> PolyMap | None:
    """Inverse with the classical bound ``deg(F)^(n-1)``, or None."""
    return formal_inverse(F, inverse_degree_bound(F))


# -- tame maps ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineFactor:
    matrix: tuple  # rows of ints, determinant 1
    shift: tuple

    def to_map(self, ring: PolyRing, variables) -> PolyMap:
        return affine_map(ring, variables, self.matrix, self.shift)

    def inverse(self) -> AffineFactor:
        Li = matrix_inverse(self.matrix, ZZ)
        c = tuple(-sum(a * b for a, b in zip(row, self.shift)) for row in Li)
        return AffineFactor(tuple(tuple(r) for r in Li), c)


@dataclass(frozen=True)
class TriangularFactor:
    """``x_i -> x_i + f(x_{i+1}, ..., x_n)``, other coordinates fixed."""

    index: int
    poly: Polynomial

    def to_map(self, ring: PolyRing, variables) -> PolyMap:
        comps = [ring.gen(v) for v in variables]
        comps[self.index] = comps[self.index] + self.poly.change_ring(ring)
        return PolyMap(comps, variables)

    def inverse(self) -> TriangularFactor:
        return TriangularFactor(self.index, -self.poly)


Factor = Union[AffineFactor, TriangularFactor]


@dataclass(frozen=True)
class TameRecipe:
    """Factors in application order: ``factors[0]`` acts first."""

    n: int
    factors: tuple

    def to_map(self, ring: PolyRing, variables: Sequence[int] | None = None) -> PolyMap:
        M = PolyMap.identity(ring, variables)
        for f in self.factors:
            M = compose(f.to_map(ring, M.variables), M)
        return M

    def inverse(self) -> TameRecipe:
        return TameRecipe(self.n, tuple(f.inverse() for f in reversed(self.factors)))

    def inverse_map(self, ring: PolyRing, variables: Sequence[int] | None = None) -> PolyMap:
        return self.inverse().to_map(ring, variables)


def default_names(n: int) -> list[str]:
    if n <= 3:
        return ["x", "y", "z"][:n]
    return [f"x{i + 1}" for i in range(n)]


def _random_sl(n: int, rng: random.Random, c: int) -> list[list[int]]:
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(2 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            break
        t = rng.randint(-c, c)
        M[i] = [a + t * b for a, b in zip(M[i], M[j])]
    if n > 1 and rng.random() < 0.5:
        # a signed swap keeps the determinant 1
        M[0], M[1] = M[1], [-v for v in M[0]]
    return M


def _random_triangular(ring: PolyRing, n: int, i: int, deg: int, rng: random.Random, c: int) -> Polynomial:
    later = list(range(i + 1, n))
    terms: dict = {}
    monos = [e for e in itertools.product(range(deg + 1), repeat=len(later)) if 1 <= sum(e) <= deg]
    top = [e for e in monos if sum(e) == deg]
    for e in monos:
        if rng.random() < 0.5:
            v = rng.randint(-c, c)
            if v:
                terms[e] = v
    if top and not any(sum(e) == deg for e in terms):
        terms[rng.choice(top)] = rng.choice([v for v in range(-c, c + 1) if v])
    out = ring.zero
    for e, v in terms.items():
        full = [0] * n
        for k, ek in zip(later, e):
            full[k] = ek
        out = out + ring.monomial(full, v)
    return out


def sample_tame(
    n: int,
    budget: int,
    factors: int,
    seed: int,
    *,
    coeff_range: int = 3,
    ring: Ring = ZZ,
    names: Sequence[str] | None = None,
) -> tuple[PolyMap, TameRecipe]:
    """Random composition of SL affine and triangular factors with degree <= budget.

    The result has Jacobian determinant exactly 1.  Triangular degrees are
    chosen so that ``deg(factor) * deg(current) <= budget``.
    """
    if budget < 1:
        raise MapError("degree budget must be >= 1")
    rng = random.Random(seed)
    R = PolyRing(names or default_names(n), ring)
    Rz = PolyRing(R.names, ZZ)
    M = PolyMap.identity(R)
    current = 1
    recipe: list = []
    for _ in range(factors):
        cap = budget // current
        if n == 1 or cap < 2 or rng.random() < 0.35:
            L = _random_sl(n, rng, coeff_range)
            shift = tuple(rng.randint(-coeff_range, coeff_range) for _ in range(n))
            fac: Factor = AffineFactor(tuple(tuple(r) for r in L), shift)
        else:
            i = rng.randrange(n - 1)
            deg = rng.randint(2, cap)
            fac = TriangularFactor(i, _random_triangular(Rz, n, i, deg, rng, coeff_range))
        recipe.append(fac)
        M = compose(fac.to_map(R, M.variables), M)
        current = degree(M)
    return M, TameRecipe(n, tuple(recipe))


# -- finite fields --------------------------------------------------------------------------


def reduce_map_mod_p(F: PolyMap, p: int) -> PolyMap:
    target = F.ring.with_coeffs(GF(p))
    return PolyMap([f.change_ring(target) for f in F.components], F.variables)


DEFAULT_POINT_CAP = 10**6


def is_injective_on_points(F: PolyMap, cap: int = DEFAULT_POINT_CAP) -> bool:
    """Brute-force injectivity on all ``p^n`` points of ``F_p^n``."""
    _require_no_parameters(F)
    R = F.ring.coeffs
    if R.kind != "GF":
        raise RingError("point enumeration needs a prime field")
    p, n = R.p, F.n
    if p**n > cap:
        raise EnumerationCapExceeded(f"{p}^{n} points exceed the cap {cap}")
    pos = {v: k for k, v in enumerate(F.variables)}
    compiled = []
    for f in F.components:
        compiled.append([(c, [(pos[i], e) for i, e in enumerate(m) if e]) for m, c in f.terms.items()])
    seen = set()
    for pt in itertools.product(range(p), repeat=n):
        val = []
        for terms in compiled:
            acc = 0
            for c, factors in terms:
                t = c
                for k, e in factors:
                    t = t * pow(pt[k], e, p)
                acc += t
            val.append(acc % p)
        key = tuple(val)
        if key in seen:
            return False
        seen.add(key)
    return True


def lift_symmetric(F: PolyMap, ring: PolyRing | None = None) -> PolyMap:
    """Integer map using representatives in ``(-p/2, p/2]`` for each coefficient."""
    R = F.ring.coeffs
    if R.kind != "GF":
        raise RingError("lift_symmetric expects a map over a prime field")
    target = ring or F.ring.with_coeffs(ZZ)
    comps = [target.from_dict({m: R.to_int_symmetric(c) for m, c in f.terms.items()}) for f in F.components]
    return PolyMap(comps, F.variables)


__all__ = [
    "AffineFactor",
    "EnumerationCapExceeded",
    "MapError",
    "NonInvertibleAffinePart",
    "PolyMap",
    "PolyMatrix",
    "TameRecipe",
    "TriangularFactor",
    "affine_inverse",
    "affine_map",
    "affine_part",
    "bareiss_determinant",
    "compose",
    "default_names",
    "degree",
    "determinant",
    "format_map",
    "formal_inverse",
    "has_identity_affine_part",
    "inverse_degree_bound",
    "is_injective_on_points",
    "is_invertible",
    "jacobian",
    "lift_symmetric",
    "linear_matrix",
    "matrix_inverse",
    "parse_map",
    "reduce_map_mod_p",
    "sample_tame",
    "translation",
]
