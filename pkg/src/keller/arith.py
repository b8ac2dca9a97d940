"""Exact coefficient rings: the integers, the rationals and prime fields.

Ring elements are kept as plain Python values so that the polynomial layer
can do arithmetic without wrapper overhead:

* ``ZZ`` stores ``int``
* ``QQ`` stores ``fractions.Fraction`` (always reduced, positive denominator)
* ``GF(p)`` stores the residue as an ``int`` in ``[0, p)``

:class:`PrimeFieldElement` is the user-facing value type for prime fields;
``GF(p).element(3)`` builds one, and ``ring.convert`` accepts it back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce


class RingError(ValueError):
    """Base class for coefficient-ring errors."""


class RingMismatch(RingError):
    pass


class NonExactDivision(RingError, ArithmeticError):
    pass


class DenominatorVanishesModP(RingError, ZeroDivisionError):
    """A rational coefficient has a denominator divisible by ``p``."""

    def __init__(self, value, p: int):
        self.value = value
        self.p = p
        super().__init__(f"denominator of {value} vanishes mod {p}")


def is_prime(n: int) -> bool:
    """Deterministic trial division; only meant for desk-scale moduli."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


@dataclass(frozen=True)
class Ring:
    """Descriptor for one of the three coefficient rings.

    ``kind`` is ``"ZZ"``, ``"QQ"`` or ``"GF"``; ``p`` is set only for ``"GF"``.
    Use the module constants :data:`ZZ`, :data:`QQ` and the factory :func:`GF`
    rather than constructing this directly.
    """

    kind: str
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("ZZ", "QQ", "GF"):
            raise RingError(f"unknown ring kind {self.kind!r}")
        if self.kind == "GF":
            if not is_prime(self.p):
                raise RingError(f"GF({self.p}): modulus is not prime")
        elif self.p:
            raise RingError(f"{self.kind} takes no modulus")

    def __repr__(self):
        return f"GF({self.p})" if self.kind == "GF" else self.kind

    __str__ = __repr__

    @property
    def is_field(self) -> bool:
        return self.kind != "ZZ"

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def zero(self):
        return Fraction(0) if self.kind == "QQ" else 0

    @property
    def one(self):
        return Fraction(1) if self.kind == "QQ" else 1

    # -- conversion ---------------------------------------------------------

    def convert(self, value):
        """Coerce ``value`` into the canonical raw representation of this ring."""
        if isinstance(value, PrimeFieldElement):
            if self.kind != "GF" or value.p != self.p:
                raise RingMismatch(f"{value!r} is not an element of {self}")
            return value.residue
        if isinstance(value, bool):
            value = int(value)
        if self.kind == "ZZ":
            if isinstance(value, int):
                return value
            if isinstance(value, Fraction) and value.denominator == 1:
                return value.numerator
            raise RingMismatch(f"{value!r} is not an integer")
        if self.kind == "QQ":
            if isinstance(value, (int, Fraction)):
                return Fraction(value)
            raise RingMismatch(f"{value!r} is not rational")
        if isinstance(value, int):
            return value % self.p
        if isinstance(value, Fraction):
            return project_mod_p(value, self.p).residue
        raise RingMismatch(f"{value!r} cannot be mapped into {self}")

    def element(self, value):
        """Like :meth:`convert` but returns a :class:`PrimeFieldElement` for GF(p)."""
        raw = self.convert(value)
        if self.kind == "GF":
            return PrimeFieldElement(raw, self.p)
        return raw

    # -- arithmetic on raw values ----------------------------------------------

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p else a - b

    def neg(self, a):
        return -a % self.p if self.p else -a

    def mul(self, a, b):
        return a * b % self.p if self.p else a * b

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        return pow(a, e, self.p) if self.p else a**e

    def inv(self, a):
        if self.kind == "ZZ":
            if a in (1, -1):
                return a
            raise NonExactDivision(f"{a} is not a unit in ZZ")
        if not a:
            raise ZeroDivisionError(f"inverse of zero in {self}")
        if self.kind == "QQ":
            return 1 / a
        return pow(a, -1, self.p)

    def div(self, a, b):
        """Field division, or exact division in ZZ."""
        if self.kind == "ZZ":
            return exact_div(a, b)
        return self.mul(a, self.inv(b))

    def from_int(self, n: int):
        return self.convert(n)

    def to_int_symmetric(self, a) -> int:
        """Representative in ``(-p/2, p/2]`` for GF(p); identity on ZZ."""
        if self.kind == "GF":
            return a - self.p if a > self.p // 2 else a
        if self.kind == "ZZ":
            return a
        raise RingError("rationals have no integer representative")


ZZ = Ring("ZZ")
QQ = Ring("QQ")


def GF(p: int) -> Ring:
    return Ring("GF", p)


def parse_ring(text: str) -> Ring:
    """Parse ``ZZ``, ``QQ``, ``GF(p)`` or a bare prime ``p``."""
    t = text.strip().upper()
    if t in ("ZZ", "Z"):
        return ZZ
    if t in ("QQ", "Q"):
        return QQ
    if t.startswith("GF(") and t.endswith(")"):
        t = t[3:-1]
    if t.startswith("F") and t[1:].isdigit():
        t = t[1:]
    if t.isdigit():
        return GF(int(t))
    raise RingError(f"cannot parse ring {text!r}")


@dataclass(frozen=True)
class PrimeFieldElement:
    residue: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "residue", self.residue % self.p)

    def _coerce(self, other):
        if isinstance(other, PrimeFieldElement):
            if other.p != self.p:
                raise RingMismatch(f"GF({self.p}) vs GF({other.p})")
            return other.residue
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PrimeFieldElement(self.residue + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PrimeFieldElement(self.residue - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PrimeFieldElement(o - self.residue, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PrimeFieldElement(self.residue * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return PrimeFieldElement(-self.residue, self.p)

    def inverse(self) -> PrimeFieldElement:
        if not self.residue:
            raise ZeroDivisionError(f"inverse of 0 in GF({self.p})")
        return PrimeFieldElement(pow(self.residue, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * PrimeFieldElement(o, self.p).inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeFieldElement(o, self.p) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return PrimeFieldElement(pow(self.residue, e, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, PrimeFieldElement):
            return self.p == other.p and self.residue == other.residue
        if isinstance(other, int):
            return self.residue == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.p))

    def __bool__(self):
        return bool(self.residue)

    def __int__(self):
        return self.residue

    def __repr__(self):
        return f"{self.residue} (mod {self.p})"


def exact_div(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("exact division by zero")
    q, r = divmod(a, b)
    if r:
        raise NonExactDivision(f"{a} is not divisible by {b}")
    return q


def content(values) -> int:
    """Non-negative gcd of a nonempty list of integers (0 only if all are 0)."""
    values = list(values)
    if not values:
        raise ValueError("content of an empty list")
    return reduce(math.gcd, (abs(int(v)) for v in values), 0)


def project_mod_p(q, p: int) -> PrimeFieldElement:
    q = Fraction(q)
    if q.denominator % p == 0:
        raise DenominatorVanishesModP(q, p)
    return PrimeFieldElement(q.numerator * pow(q.denominator, -1, p), p)


def lcm(values) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), (abs(v) for v in values), 1)
