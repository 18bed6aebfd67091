"""Finite field arithmetic for small prime powers.

Fields form a tower: a prime field GF(p0), extensions of it of degree k, and
extensions of those (the Singer construction needs GF(q^3) built over GF(q)).
Every field works on integer codes in ``[0, order)``; an element of an
extension of degree k over a base of size b has code ``sum(c_i * b**i)`` where
``c_i`` are the base-field codes of its polynomial coefficients, low order first.
:class:`FieldElement` wraps a code for operator-style use.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence, Union

__all__ = [
    "PrimePowerFactorization",
    "Field",
    "FieldElement",
    "factor_prime_power",
    "is_prime",
    "is_prime_power",
    "prime_factors",
    "smallest_prime_power_geq",
    "field_make",
    "extension_field",
    "field_add",
    "field_mul",
    "field_pow",
    "find_irreducible_polynomial",
    "find_primitive_polynomial",
]

# full multiplication tables are built for fields up to this order
_TABLE_LIMIT = 256


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` by trial division, ascending."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class PrimePowerFactorization:
    n: int
    base: int
    exponent: int

    def __post_init__(self):
        if not is_prime(self.base) or self.exponent < 1 or self.base**self.exponent != self.n:
            raise ValueError(f"{self.base}^{self.exponent} is not a prime-power factorization of {self.n}")


def factor_prime_power(n: int) -> Optional[PrimePowerFactorization]:
    """Return ``(p0, k)`` with ``p0**k == n``, or None if ``n`` is not a prime power."""
    if n < 2:
        return None
    fs = prime_factors(n)
    if len(fs) != 1:
        return None
    p0 = fs[0]
    k = 0
    r = n
    while r > 1:
        r //= p0
        k += 1
    return PrimePowerFactorization(n, p0, k)


def is_prime_power(n: int) -> bool:
    return factor_prime_power(n) is not None


def smallest_prime_power_geq(n: int) -> int:
    m = max(n, 2)
    while not is_prime_power(m):
        m += 1
    return m


class Field:
    """GF(order), either a prime field or a polynomial extension of ``base``.

    ``modulus`` is the monic defining polynomial as a tuple of base-field codes,
    low order first (length ``degree + 1``). For a prime field it is the
    placeholder ``(0, 1)``, i.e. ``x - 0``.
    """

    def __init__(self, characteristic: int, base: Optional["Field"] = None, modulus: Sequence[int] = (0, 1), tabulate: bool = True):
        if not is_prime(characteristic):
            raise ValueError(f"characteristic {characteristic} is not prime")
        modulus = tuple(int(c) for c in modulus)
        if base is not None and base.characteristic != characteristic:
            raise ValueError("base field has a different characteristic")
        if modulus[-1] != 1 or len(modulus) < 2:
            raise ValueError("modulus must be monic of degree >= 1")
        self.characteristic = characteristic
        self.base = base
        self.modulus = modulus
        self.degree = len(modulus) - 1  # over the immediate base
        if base is None:
            if self.degree != 1:
                raise ValueError("prime field takes no modulus")
            self.base_order = characteristic
            self.order = characteristic
            self.absolute_degree = 1
        else:
            self.base_order = base.order
            self.order = base.order**self.degree
            self.absolute_degree = base.absolute_degree * self.degree
        self._mul_table: Optional[list[list[int]]] = None
        if tabulate and base is not None and self.order <= _TABLE_LIMIT:
            self._mul_table = [[self._poly_mul(a, b) for b in range(self.order)] for a in range(self.order)]

    # -- identity / display -------------------------------------------------

    def _key(self):
        return (self.characteristic, self.modulus, self.base._key() if self.base else None)

    def __eq__(self, other):
        return isinstance(other, Field) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.base is None:
            return f"GF({self.order})"
        return f"GF({self.order}) over GF({self.base.order}) mod {list(self.modulus)}"

    # -- code <-> coefficients ----------------------------------------------

    def coefficients(self, a: int) -> tuple[int, ...]:
        """Base-field codes of ``a``'s polynomial coefficients, low order first."""
        if self.base is None:
            return (a,)
        b = self.base_order
        out = []
        for _ in range(self.degree):
            a, r = divmod(a, b)
            out.append(r)
        return tuple(out)

    def from_coefficients(self, coeffs: Sequence[int]) -> int:
        if self.base is None:
            (c,) = coeffs
            return c % self.order
        if len(coeffs) != self.degree:
            raise ValueError(f"expected {self.degree} coefficients")
        code = 0
        for c in reversed(coeffs):
            if not 0 <= c < self.base_order:
                raise ValueError(f"coefficient {c} outside base field")
            code = code * self.base_order + c
        return code

    def __call__(self, value: Union[int, Sequence[int]]) -> "FieldElement":
        if isinstance(value, int):
            if not 0 <= value < self.order:
                raise ValueError(f"code {value} outside GF({self.order})")
            return FieldElement(self, value)
        return FieldElement(self, self.from_coefficients(value))

    def elements(self) -> Iterator["FieldElement"]:
        for a in range(self.order):
            yield FieldElement(self, a)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    @property
    def x(self) -> "FieldElement":
        """The class of the indeterminate (the root of the modulus)."""
        if self.base is None or self.degree < 2:
            raise ValueError("field has no adjoined root of degree >= 2")
        return FieldElement(self, self.base_order)

    # -- arithmetic on codes --------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.base is None:
            return (a + b) % self.order
        ca, cb = self.coefficients(a), self.coefficients(b)
        return self.from_coefficients([self.base.add(u, v) for u, v in zip(ca, cb)])

    def neg(self, a: int) -> int:
        if self.base is None:
            return -a % self.order
        return self.from_coefficients([self.base.neg(u) for u in self.coefficients(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.base is None:
            return a * b % self.order
        if self._mul_table is not None:
            return self._mul_table[a][b]
        return self._poly_mul(a, b)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self.pow(a, self.order - 2)

    def _reduce(self, prod: list[int]) -> list[int]:
        B = self.base
        k = self.degree
        for i in range(len(prod) - 1, k - 1, -1):
            c = prod[i]
            if c:
                # subtract c * x^(i-k) * modulus
                for j in range(k):
                    mj = self.modulus[j]
                    if mj:
                        prod[i - k + j] = B.sub(prod[i - k + j], B.mul(c, mj))
                prod[i] = 0
        return prod[:k]

    def _poly_mul(self, a: int, b: int) -> int:
        B = self.base
        ca, cb = self.coefficients(a), self.coefficients(b)
        prod = [0] * (2 * self.degree - 1)
        for i, u in enumerate(ca):
            if u:
                for j, v in enumerate(cb):
                    if v:
                        prod[i + j] = B.add(prod[i + j], B.mul(u, v))
        return self.from_coefficients(self._reduce(prod))

    # -- group structure -------------------------------------------------------

    def multiplicative_order(self, a: int) -> int:
        if a == 0:
            raise ValueError("zero has no multiplicative order")
        n = self.order - 1
        order = n
        for r in prime_factors(n):
            while order % r == 0 and self.pow(a, order // r) == 1:
                order //= r
        return order

    def is_primitive_element(self, a: int) -> bool:
        return a != 0 and self.multiplicative_order(a) == self.order - 1


@dataclass(frozen=True)
class FieldElement:
    field: Field
    value: int

    @property
    def coefficients(self) -> tuple[int, ...]:
        return self.field.coefficients(self.value)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise TypeError(f"cannot mix elements of {self.field!r} and {other.field!r}")
            return other.value
        if isinstance(other, int):
            # integers embed through the prime subfield
            return _embed_int(self.field, other)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else FieldElement(self.field, self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else FieldElement(self.field, self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else FieldElement(self.field, self.field.sub(o, self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else FieldElement(self.field, self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.mul(self.value, self.field.inv(o)))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.field.order}:{list(self.coefficients)}"


def _embed_int(field: Field, n: int) -> int:
    # n * 1 in the prime subfield; code of the prime-subfield element c is c
    return n % field.characteristic


def field_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def field_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def field_pow(a: FieldElement, e: int) -> FieldElement:
    return a**e


def _has_root(base: Field, poly: Sequence[int]) -> bool:
    for r in range(base.order):
        acc = 0
        for c in reversed(poly):
            acc = base.add(base.mul(acc, r), c)
        if acc == 0:
            return True
    return False


def _poly_divmod(base: Field, num: list[int], den: Sequence[int]) -> list[int]:
    # remainder only; den monic
    num = list(num)
    dd = len(den) - 1
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            for j in range(dd + 1):
                num[i - dd + j] = base.sub(num[i - dd + j], base.mul(c, den[j]))
    return num[:dd]


def _monic_polys(base: Field, degree: int) -> Iterator[tuple[int, ...]]:
    # ordered by integer code of the coefficient vector (low-order digit least significant)
    q = base.order
    for code in range(q**degree):
        coeffs = []
        for _ in range(degree):
            code, r = divmod(code, q)
            coeffs.append(r)
        yield tuple(coeffs) + (1,)


def is_irreducible(base: Field, poly: Sequence[int]) -> bool:
    """Exhaustive check: no monic factor of degree <= deg/2 divides ``poly``."""
    deg = len(poly) - 1
    if deg <= 1:
        return deg == 1
    if poly[0] == 0:
        return False
    if deg <= 3:
        return not _has_root(base, poly)
    for d in range(1, deg // 2 + 1):
        for f in _monic_polys(base, d):
            if not any(_poly_divmod(base, list(poly), f)):
                return False
    return True


def _as_field(base: Union[int, Field]) -> Field:
    if isinstance(base, Field):
        return base
    if not is_prime(base):
        raise ValueError(f"{base} is not prime")
    return _prime_field(base)


@lru_cache(maxsize=None)
def _prime_field(p0: int) -> Field:
    return Field(p0)


def find_irreducible_polynomial(base: Union[int, Field], k: int) -> tuple[int, ...]:
    """Smallest monic irreducible polynomial of degree ``k`` over ``base``."""
    B = _as_field(base)
    for f in _monic_polys(B, k):
        if is_irreducible(B, f):
            return f
    raise ArithmeticError(f"no irreducible polynomial of degree {k} over GF({B.order})")


def find_primitive_polynomial(base: Union[int, Field], k: int) -> tuple[int, ...]:
    """Smallest monic irreducible degree-``k`` polynomial whose root generates the multiplicative group.

    Candidates are ordered by the integer code of their coefficient vector, which
    compares the highest non-leading coefficient first; over GF(2) this picks
    x^3 + x + 1 ahead of x^3 + x^2 + 1.
    """
    B = _as_field(base)
    if k < 2:
        raise ValueError("degree must be at least 2")
    for f in _monic_polys(B, k):
        if not is_irreducible(B, f):
            continue
        F = Field(B.characteristic, B, f, tabulate=False)
        if F.is_primitive_element(F.x.value):
            return f
    raise ArithmeticError(f"no primitive polynomial of degree {k} over GF({B.order})")


@lru_cache(maxsize=None)
def field_make(q: int) -> Field:
    """GF(q) over its prime field, on the smallest monic irreducible modulus."""
    fac = factor_prime_power(q)
    if fac is None:
        raise ValueError(f"{q} is not a prime power")
    prime = _prime_field(fac.base)
    if fac.exponent == 1:
        return prime
    return Field(fac.base, prime, find_irreducible_polynomial(prime, fac.exponent))


def extension_field(base: Field, k: int, primitive: bool = True) -> Field:
    """Degree-``k`` extension of ``base``; with ``primitive`` the adjoined root generates the group."""
    f = find_primitive_polynomial(base, k) if primitive else find_irreducible_polynomial(base, k)
    return Field(base.characteristic, base, f)
