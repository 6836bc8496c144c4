"""Arithmetic in finite chain rings.

Three families are supported:

* ``field``  -- the finite field F_q (precision 1, uniformizer 0),
* ``padic``  -- the truncated p-adic integers Z/p^N,
* ``series`` -- truncated power series F_q[t]/(t^N).

Elements are encoded as plain non-negative integers so that vectors of them
are cheap to store and hash.  For ``padic`` the code is the least residue.
For ``series`` the code is ``sum c_i * q**i`` where ``c_i`` is the code of the
coefficient of ``t**i`` in F_q.  In both cases multiplying by the uniformizer
is a shift in base ``p`` resp. ``q``, which makes valuation, division by
``pi**v`` and reduction modulo ``pi**v`` simple digit operations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional


class ChainRingError(ValueError):
    pass


class InvalidCharacteristic(ChainRingError):
    pass


class InvalidPrecision(ChainRingError):
    pass


class NotAUnit(ChainRingError):
    pass


class RingMismatch(ChainRingError):
    pass


# Sentinel valuation of zero.
INF = math.inf

_TABLE_LIMIT = 256


def _is_prime(n: int) -> bool:
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


def _prime_power(q: int) -> Optional[tuple[int, int]]:
    """Return (p, d) with q = p**d, or None."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            if not _is_prime(p):
                return None
            d = 0
            while q % p == 0:
                q //= p
                d += 1
            return (p, d) if q == 1 else None
    return None


def _poly_mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    d = len(mod) - 1
    out = [0] * (2 * d)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    # mod is monic of degree d
    for k in range(len(out) - 1, d - 1, -1):
        c = out[k]
        if c:
            for j in range(d + 1):
                out[k - d + j] = (out[k - d + j] - c * mod[j]) % p
    return out[:d]


def _irreducible(p: int, d: int) -> list[int]:
    """Lexicographically first monic irreducible polynomial of degree d over F_p.

    Coefficients are listed from the constant term upward.
    """
    if d == 1:
        return [0, 1]
    for code in range(p ** d):
        low = [(code // p ** i) % p for i in range(d)]
        poly = low + [1]
        if poly[0] == 0:
            continue
        # no factor of degree <= d // 2: check x^(p^k) != x mod poly for gcd test
        # by brute force over monic factors (d is tiny here)
        if all(_poly_mod_nonzero(poly, f, p) for f in _monic_polys(p, d // 2)):
            return poly
    raise InvalidCharacteristic(f"no irreducible polynomial of degree {d} over F_{p}")


def _monic_polys(p: int, max_deg: int) -> Iterator[list[int]]:
    for deg in range(1, max_deg + 1):
        for code in range(p ** deg):
            yield [(code // p ** i) % p for i in range(deg)] + [1]


def _poly_mod_nonzero(a: list[int], m: list[int], p: int) -> bool:
    r = list(a)
    dm = len(m) - 1
    for k in range(len(r) - 1, dm - 1, -1):
        c = r[k]
        if c:
            for j in range(dm + 1):
                r[k - dm + j] = (r[k - dm + j] - c * m[j]) % p
    return any(r[:dm])


class _ResidueField:
    """F_q with elements coded as integers 0..q-1 (base-p digit vectors)."""

    def __init__(self, q: int):
        pd = _prime_power(q)
        if pd is None:
            raise InvalidCharacteristic(f"q={q} is not a prime power")
        self.q = q
        self.p, self.d = pd
        if self.d == 1:
            self.modulus = [0, 1]
            self._add = None
            self._mul = None
            self._inv = [0] + [pow(x, -1, q) for x in range(1, q)]
        else:
            self.modulus = _irreducible(self.p, self.d)
            self._build_tables()

    def _digits(self, x: int) -> list[int]:
        return [(x // self.p ** i) % self.p for i in range(self.d)]

    def _code(self, ds: list[int]) -> int:
        return sum(c * self.p ** i for i, c in enumerate(ds))

    def _build_tables(self) -> None:
        q, p = self.q, self.p
        digs = [self._digits(x) for x in range(q)]
        self._add = [[self._code([(a + b) % p for a, b in zip(digs[x], digs[y])])
                      for y in range(q)] for x in range(q)]
        self._mul = [[self._code(_poly_mulmod(digs[x], digs[y], self.modulus, p))
                      for y in range(q)] for x in range(q)]
        self._inv = [0] * q
        for x in range(1, q):
            for y in range(1, q):
                if self._mul[x][y] == 1:
                    self._inv[x] = y
                    break

    def add(self, x: int, y: int) -> int:
        if self._add is None:
            return (x + y) % self.q
        return self._add[x][y]

    def neg(self, x: int) -> int:
        if self._add is None:
            return (-x) % self.q
        return self._code([(-c) % self.p for c in self._digits(x)])

    def mul(self, x: int, y: int) -> int:
        if self._mul is None:
            return (x * y) % self.q
        return self._mul[x][y]

    def inv(self, x: int) -> int:
        return self._inv[x]

    def from_int(self, n: int) -> int:
        return n % self.p


@dataclass(frozen=True)
class ChainRing:
    """A finite chain ring R/pi^N.

    Attributes:
        kind: ``"field"``, ``"padic"`` or ``"series"``.
        char: p for ``padic``; q for ``field`` and ``series``.
        precision: N, the nilpotency index of the maximal ideal.
    """

    kind: str
    char: int
    precision: int
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("field", "padic", "series"):
            raise ChainRingError(f"unknown ring kind {self.kind!r}")
        if not isinstance(self.precision, int) or self.precision < 1:
            raise InvalidPrecision(f"precision must be a positive integer, got {self.precision!r}")
        if self.kind == "padic":
            if not _is_prime(self.char):
                raise InvalidCharacteristic(f"p={self.char} is not prime")
        else:
            if _prime_power(self.char) is None:
                raise InvalidCharacteristic(f"q={self.char} is not a prime power")
        if self.kind == "field" and self.precision != 1:
            raise InvalidPrecision("a finite field has precision 1")

    # -- descriptors -------------------------------------------------------

    @property
    def N(self) -> int:
        return self.precision

    @cached_property
    def residue(self) -> _ResidueField:
        return _ResidueField(self.char)

    @property
    def base(self) -> int:
        """Multiplying by pi shifts codes by one digit in this base."""
        return self.char

    @cached_property
    def size(self) -> int:
        return self.base ** self.precision

    @property
    def residue_char(self) -> int:
        return self.residue.p

    @property
    def residue_size(self) -> int:
        return self.char

    def describe(self) -> str:
        if self.kind == "field":
            return f"F_{self.char}"
        if self.kind == "padic":
            return f"Z/{self.char}^{self.precision}"
        return f"F_{self.char}[t]/(t^{self.precision})"

    def with_precision(self, n: int) -> "ChainRing":
        if self.kind == "field":
            return self
        return ChainRing(self.kind, self.char, n)

    @cached_property
    def _tables(self):
        if self.kind == "padic" or self.size > _TABLE_LIMIT:
            return None
        n = self.size
        add = [[self._slow_add(x, y) for y in range(n)] for x in range(n)]
        mul = [[self._slow_mul(x, y) for y in range(n)] for x in range(n)]
        neg = [self._slow_neg(x) for x in range(n)]
        return add, mul, neg

    # -- digit helpers for series/field ----------------------------------------

    def _digits(self, x: int) -> list[int]:
        q = self.base
        return [(x // q ** i) % q for i in range(self.precision)]

    def _code(self, ds) -> int:
        q = self.base
        return sum(c * q ** i for i, c in enumerate(ds))

    def _slow_add(self, x: int, y: int) -> int:
        F = self.residue
        return self._code([F.add(a, b) for a, b in zip(self._digits(x), self._digits(y))])

    def _slow_neg(self, x: int) -> int:
        F = self.residue
        return self._code([F.neg(a) for a in self._digits(x)])

    def _slow_mul(self, x: int, y: int) -> int:
        F = self.residue
        a, b = self._digits(x), self._digits(y)
        N = self.precision
        out = [0] * N
        for i in range(N):
            if a[i]:
                for j in range(N - i):
                    if b[j]:
                        out[i + j] = F.add(out[i + j], F.mul(a[i], b[j]))
        return self._code(out)

    # -- raw arithmetic on codes -------------------------------------------------

    zero = 0
    one = 1

    def add(self, x: int, y: int) -> int:
        if self.kind == "padic":
            return (x + y) % self.size
        t = self._tables
        return t[0][x][y] if t else self._slow_add(x, y)

    def neg(self, x: int) -> int:
        if self.kind == "padic":
            return (-x) % self.size
        t = self._tables
        return t[2][x] if t else self._slow_neg(x)

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        if self.kind == "padic":
            return (x * y) % self.size
        t = self._tables
        return t[1][x][y] if t else self._slow_mul(x, y)

    def from_int(self, n: int) -> int:
        if self.kind == "padic":
            return n % self.size
        return self.residue.from_int(n)

    def pi_power(self, k: int) -> int:
        """Code of pi**k (zero once k >= N, and pi = 0 in a field)."""
        if k < 0:
            raise ValueError("negative power of pi")
        if k >= self.precision:
            return 0
        return self.base ** k

    @property
    def pi(self) -> int:
        return self.pi_power(1)

    def valuation(self, x: int) -> float:
        if x == 0:
            return INF
        v, b = 0, self.base
        while x % b == 0:
            x //= b
            v += 1
        return v

    def shift_down(self, x: int, v: int) -> int:
        """Canonical y with y * pi**v == x; requires valuation(x) >= v."""
        return x // self.base ** v

    def mod_pi_power(self, x: int, v: int) -> int:
        """Canonical representative of x modulo pi**v."""
        return x % self.base ** v

    def times_pi_power(self, x: int, v: int) -> int:
        if v >= self.precision:
            return 0
        return (x * self.base ** v) % self.size

    def inv(self, x: int) -> int:
        if x % self.base == 0:
            raise NotAUnit(f"{self.render(x)} is not a unit in {self.describe()}")
        key = ("inv", x)
        c = self._cache.get(key)
        if c is not None:
            return c
        if self.kind == "padic":
            c = pow(x, -1, self.size)
        else:
            # Newton lifting from the residue field inverse.
            y = self.residue.inv(x % self.base)
            for _ in range(self.precision.bit_length() + 1):
                y = self._newton_step(x, y)
            c = y
        self._cache[key] = c
        return c

    def _newton_step(self, x: int, y: int) -> int:
        # y <- y * (2 - x*y), written without the constant 2 so it works in char 2
        e = self.sub(self.one, self.mul(x, y))  # error term, lies in (pi)
        return self.add(y, self.mul(y, e))

    def unit_part(self, x: int) -> int:
        """Unit u with x = u * pi**valuation(x), canonical modulo pi**(N - v)."""
        v = self.valuation(x)
        if v == INF:
            raise NotAUnit("zero has no unit part")
        return self.shift_down(x, int(v))

    def elements(self) -> range:
        return range(self.size)

    def residue_code(self, x: int) -> int:
        """The image of x in the residue field."""
        return x % self.base

    # -- rendering ---------------------------------------------------------------

    def render(self, x: int) -> str:
        """Render a code using integers and ``pi`` (parseable by the element grammar)."""
        if x == 0:
            return "0"
        if self.kind == "padic":
            return str(x)
        if self.kind == "series" and self.residue.d == 1:
            terms = []
            for i, c in enumerate(self._digits(x)):
                if c:
                    terms.append(_coeff_term(c, i))
            return " + ".join(terms)
        if self.kind == "field" and self.residue.d == 1:
            return str(x)
        # extension-field coefficients: show the residue code in brackets
        terms = []
        for i, c in enumerate(self._digits(x)):
            if c:
                terms.append(f"[{c}]" + ("" if i == 0 else "*" + _pi_token(i)))
        return " + ".join(terms)

    def elem(self, value) -> "ChainElem":
        if isinstance(value, ChainElem):
            if value.ring != self:
                raise RingMismatch("element from another ring")
            return value
        return ChainElem(self, self.from_int(int(value)))


def _pi_token(i: int) -> str:
    return "pi" if i == 1 else f"pi^{i}"


def _coeff_term(c: int, i: int) -> str:
    if i == 0:
        return str(c)
    if c == 1:
        return _pi_token(i)
    return f"{c}*{_pi_token(i)}"


def make_ring(kind: str, p: Optional[int] = None, q: Optional[int] = None,
              precision: int = 1) -> ChainRing:
    """Validate parameters and return a ring descriptor.

    ``kind`` accepts the aliases ``finite-field``, ``padic-trunc`` and
    ``series-trunc``.
    """
    kind = {"finite-field": "field", "padic-trunc": "padic",
            "series-trunc": "series"}.get(kind, kind)
    if kind == "padic":
        char = p if p is not None else q
    else:
        char = q if q is not None else p
    if char is None:
        raise InvalidCharacteristic("missing characteristic")
    if kind == "field":
        if precision not in (None, 1):
            raise InvalidPrecision("a finite field has precision 1")
        precision = 1
    return ChainRing(kind, int(char), int(precision))


@dataclass(frozen=True)
class ChainElem:
    """An element of a chain ring with operator overloading."""

    ring: ChainRing
    value: int

    def _other(self, y) -> int:
        if isinstance(y, ChainElem):
            if y.ring != self.ring:
                raise RingMismatch(f"{self.ring.describe()} vs {y.ring.describe()}")
            return y.value
        if isinstance(y, int):
            return self.ring.from_int(y)
        return NotImplemented

    def __add__(self, y):
        return ChainElem(self.ring, self.ring.add(self.value, self._other(y)))

    __radd__ = __add__

    def __sub__(self, y):
        return ChainElem(self.ring, self.ring.sub(self.value, self._other(y)))

    def __rsub__(self, y):
        return ChainElem(self.ring, self.ring.sub(self._other(y), self.value))

    def __mul__(self, y):
        return ChainElem(self.ring, self.ring.mul(self.value, self._other(y)))

    __rmul__ = __mul__

    def __neg__(self):
        return ChainElem(self.ring, self.ring.neg(self.value))

    def valuation(self) -> float:
        return self.ring.valuation(self.value)

    def inverse(self) -> "ChainElem":
        return ChainElem(self.ring, self.ring.inv(self.value))

    def is_zero(self) -> bool:
        return self.value == 0

    def __str__(self) -> str:
        return self.ring.render(self.value)


def arith(op: str, x: ChainElem, y: ChainElem) -> ChainElem:
    if x.ring != y.ring:
        raise RingMismatch(f"{x.ring.describe()} vs {y.ring.describe()}")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "neg":
        return -x
    raise ValueError(f"unknown operation {op!r}")


def valuation(x: ChainElem) -> float:
    return x.valuation()


def invert_unit(x: ChainElem) -> ChainElem:
    return x.inverse()
