"""Exact arithmetic in GF(p^k) and small polynomial helpers over it.

Prime fields use residues directly.  For k > 1 an element is stored as a
Zech-logarithm code (0 for zero, ``i + 1`` for ``g^i`` with ``g`` a fixed
generator of the multiplicative group), so multiplication and addition are
both table lookups.  Tables are built once per field and are limited by the
scan guard.
"""

from __future__ import annotations

import functools
import os
from typing import Sequence

from covercalc.errors import CoverError
from covercalc.ramification import FieldSpec, is_prime

DEFAULT_GUARD = 10**6


def scan_guard() -> int:
    """Largest exhaustive scan allowed; ``COVERCALC_SCAN_GUARD`` overrides the default."""
    try:
        return int(os.environ.get("COVERCALC_SCAN_GUARD", DEFAULT_GUARD))
    except ValueError:
        return DEFAULT_GUARD


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    ds = [1]
    for q, e in factorize(n).items():
        ds = [d * q**i for d in ds for i in range(e + 1)]
    return sorted(ds)


# -- integer polynomials mod p (low degree first), used to set up extensions --

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], f: list[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    inv = pow(f[-1], -1, p)
    while len(a) >= len(f):
        c = a[-1] * inv % p
        shift = len(a) - len(f)
        for i, fi in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fi) % p
        _trim(a)
    return a


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _ppowmod(a: list[int], e: int, f: list[int], p: int) -> list[int]:
    result, base = [1], _pmod(a, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Irreducibility of ``f`` over GF(p) via ``gcd(x^(p^i) - x, f) = 1`` for ``i <= deg/2``."""
    f = _trim([x % p for x in f])
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    xp = [0, 1]
    for _ in range(k // 2):
        xp = _ppowmod(xp, p, f, p)
        diff = list(xp) + [0] * (2 - len(xp)) if len(xp) < 2 else list(xp)
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(f, _trim(diff), p)) > 1:
            return False
    return True


def _conway_like(p: int, k: int) -> list[int]:
    """First monic irreducible polynomial of degree k in lexicographic order of its coefficients."""
    for n in range(p**k):
        coeffs = [(n // p**i) % p for i in range(k)] + [1]
        if coeffs[0] and is_irreducible(coeffs, p):
            return coeffs
    raise CoverError("BAD_FIELD", f"no irreducible polynomial of degree {k} over GF({p})")


class GF:
    """The finite field GF(p^k) with a fixed irreducible modulus."""

    def __init__(self, p: int, k: int = 1, modulus: Sequence[int] | None = None):
        if not is_prime(p):
            raise CoverError("BAD_FIELD", f"{p} is not prime")
        if k < 1:
            raise CoverError("BAD_FIELD", "extension degree must be positive")
        self.p, self.k, self.q = p, k, p**k
        if modulus is None:
            modulus = [0, 1] if k == 1 else _conway_like(p, k)
        modulus = _trim([int(c) % p for c in modulus])
        if len(modulus) != k + 1 or not is_irreducible(modulus, p):
            raise CoverError("BAD_FIELD", f"modulus {modulus} is not irreducible of degree {k}")
        inv = pow(modulus[-1], -1, p)
        self.modulus = tuple(c * inv % p for c in modulus)
        self.spec = FieldSpec(p, k)
        if k > 1:
            self._build_tables()

    def _build_tables(self):
        p, k, q = self.p, self.k, self.q
        if q > scan_guard():
            raise CoverError("FIELD_TOO_LARGE", f"GF({p}^{k}) exceeds the scan guard")
        f = list(self.modulus)
        order = q - 1
        primes = list(factorize(order))
        for n in range(p, q):
            g = _trim([(n // p**i) % p for i in range(k)])
            if all(_ppowmod(g, order // r, f, p) != [1] for r in primes):
                break
        vec_of = [None] * order
        log_of: dict[tuple, int] = {}
        cur = [1]
        for i in range(order):
            v = tuple(cur + [0] * (k - len(cur)))
            vec_of[i] = v
            log_of[v] = i
            cur = _pmod(_pmul(cur, g, p), f, p)
        zech = [0] * order
        for n in range(order):
            v = list(vec_of[n])
            v[0] = (v[0] + 1) % p
            t = tuple(v)
            zech[n] = -1 if not any(t) else log_of[t]
        self._vec, self._log, self._zech = vec_of, log_of, zech
        self._half = order // 2 if p != 2 else 0

    # element construction ----------------------------------------------------

    def __call__(self, value) -> "GFElement":
        if isinstance(value, GFElement):
            if value.field is self:
                return value
            if value.field.p == self.p and value.field.k == 1:
                return self(value.code)
            if (value.field.p, value.field.modulus) == (self.p, self.modulus):
                return self.from_vector(value.field.vector(value))
            raise CoverError("FIELD_MISMATCH", "element from a different field")
        if isinstance(value, (list, tuple)):
            return self.from_vector(value)
        if isinstance(value, str):
            return self.parse(value)
        n = int(value) % self.p
        if self.k == 1:
            return GFElement(self, n)
        return self.from_vector([n])

    def from_vector(self, coeffs: Sequence[int]) -> "GFElement":
        coeffs = [int(c) % self.p for c in coeffs]
        if self.k == 1:
            return GFElement(self, sum(coeffs[:1]))
        coeffs = _pmod(coeffs, list(self.modulus), self.p)
        if not coeffs:
            return GFElement(self, 0)
        v = tuple(coeffs + [0] * (self.k - len(coeffs)))
        return GFElement(self, self._log[v] + 1)

    def vector(self, a: "GFElement") -> tuple[int, ...]:
        if self.k == 1:
            return (a.code,)
        if a.code == 0:
            return (0,) * self.k
        return self._vec[a.code - 1]

    def parse(self, text: str) -> "GFElement":
        text = text.strip().strip("[]")
        try:
            return self.from_vector([int(t) for t in text.split(",")])
        except ValueError as exc:
            raise CoverError("PARSE_ERROR", f"bad field element {text!r}") from exc

    def format(self, a: "GFElement") -> str:
        if self.k == 1:
            return str(a.code)
        return ",".join(str(c) for c in self.vector(a))

    def label(self, a: "GFElement") -> str:
        """Point-name text: a plain residue for prime-field values, ``[c0,...]`` otherwise."""
        vec = self.vector(a)
        if not any(vec[1:]):
            return str(vec[0])
        return "[" + ",".join(map(str, vec)) + "]"

    @property
    def zero(self) -> "GFElement":
        return GFElement(self, 0)

    @property
    def one(self) -> "GFElement":
        return GFElement(self, 1)

    def generator(self) -> "GFElement":
        if self.k > 1:
            return GFElement(self, 2)
        order = self.p - 1
        for g in range(2, self.p):
            if all(pow(g, order // r, self.p) != 1 for r in factorize(order)):
                return GFElement(self, g)
        return self.one

    def elements(self):
        if self.q > scan_guard():
            raise CoverError("FIELD_TOO_LARGE", f"{self} exceeds the scan guard")
        for c in range(self.q):
            yield GFElement(self, c)

    def __iter__(self):
        return self.elements()

    def __len__(self):
        return self.q

    def __repr__(self):
        return f"GF({self.p}^{self.k})" if self.k > 1 else f"GF({self.p})"

    def describe(self) -> str:
        return f"GF({self.p}^{self.k})/modulus={list(self.modulus)}"

    # raw operations on codes -------------------------------------------------

    def _add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        if a == 0:
            return b
        if b == 0:
            return a
        order = self.q - 1
        z = self._zech[(b - a) % order]
        return 0 if z < 0 else (a - 1 + z) % order + 1

    def _neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        if a == 0 or self.p == 2:
            return a
        return (a - 1 + self._half) % (self.q - 1) + 1

    def _mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return (a + b - 2) % (self.q - 1) + 1

    def _inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.k == 1:
            return pow(a, -1, self.p)
        return -(a - 1) % (self.q - 1) + 1

    # structure ---------------------------------------------------------------

    def sqrt(self, a: "GFElement") -> "GFElement | None":
        """A square root of ``a`` or ``None``; found by search in small prime
        fields, by halving the discrete log otherwise."""
        a = self(a)
        if a.code == 0:
            return a
        if self.k == 1:
            if pow(a.code, (self.p - 1) // 2, self.p) != 1:
                return None
            for r in range(self.p):
                if r * r % self.p == a.code:
                    return GFElement(self, r)
        lg = a.code - 1
        if lg % 2:
            return None
        return GFElement(self, lg // 2 + 1)

    def is_square(self, a: "GFElement") -> bool:
        a = self(a)
        if a.code == 0:
            return True
        if self.k == 1:
            return pow(a.code, (self.p - 1) // 2, self.p) == 1
        return (a.code - 1) % 2 == 0

    def roots_of_unity(self, n: int) -> list["GFElement"]:
        return [x for x in self.elements() if x.code and x**n == self.one]

    def embedding(self, other: "GF"):
        """Field homomorphism ``self -> other`` (``other`` must contain ``self``)."""
        if other.p != self.p or other.k % self.k:
            raise CoverError("FIELD_MISMATCH", f"{self} does not embed in {other}")
        if self.k == 1:
            return lambda a: other(self(a).code)
        f = [other(c) for c in self.modulus]
        alpha = next((x for x in other.elements() if poly_eval(f, x) == other.zero), None)
        if alpha is None:
            raise CoverError("FIELD_MISMATCH", f"modulus of {self} has no root in {other}")
        powers = [other.one]
        for _ in range(1, self.k):
            powers.append(powers[-1] * alpha)

        def embed(a):
            vec = self.vector(self(a))
            out = other.zero
            for c, pw in zip(vec, powers):
                out = out + pw * c
            return out

        return embed


@functools.lru_cache(maxsize=None)
def field(p: int, k: int = 1) -> GF:
    """Shared GF(p^k) instance with the default modulus."""
    return GF(p, k)


class GFElement:
    __slots__ = ("field", "code")

    def __init__(self, field: GF, code: int):
        self.field = field
        self.code = code

    def _other(self, b) -> int:
        if isinstance(b, GFElement):
            if b.field is not self.field:
                return self.field(b).code
            return b.code
        return self.field(b).code

    def __add__(self, b):
        return GFElement(self.field, self.field._add(self.code, self._other(b)))

    __radd__ = __add__

    def __neg__(self):
        return GFElement(self.field, self.field._neg(self.code))

    def __sub__(self, b):
        return GFElement(self.field, self.field._add(self.code, self.field._neg(self._other(b))))

    def __rsub__(self, b):
        return GFElement(self.field, self.field._add(self._other(b), self.field._neg(self.code)))

    def __mul__(self, b):
        return GFElement(self.field, self.field._mul(self.code, self._other(b)))

    __rmul__ = __mul__

    def inverse(self) -> "GFElement":
        return GFElement(self.field, self.field._inv(self.code))

    def __truediv__(self, b):
        return GFElement(self.field, self.field._mul(self.code, self.field._inv(self._other(b))))

    def __rtruediv__(self, b):
        return GFElement(self.field, self.field._mul(self._other(b), self.field._inv(self.code)))

    def __pow__(self, e: int):
        f = self.field
        if e < 0:
            return self.inverse() ** (-e)
        if self.code == 0:
            return f.one if e == 0 else self
        if f.k > 1:
            return GFElement(f, (self.code - 1) * e % (f.q - 1) + 1)
        return GFElement(f, pow(self.code, e, f.p))

    def __eq__(self, b):
        if isinstance(b, GFElement):
            if self.field is b.field:
                return self.code == b.code
            fa, fb = self.field, b.field
            return (fa.p, fa.modulus) == (fb.p, fb.modulus) and fa.vector(self) == fb.vector(b)
        if isinstance(b, int):
            return self == self.field(b)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.code))

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        return self.field.format(self)

    __str__ = __repr__

    def frobenius(self, times: int = 1) -> "GFElement":
        return self ** (self.field.p ** times)


# -- polynomials with GFElement coefficients, low degree first ---------------

def poly_trim(a: list) -> list:
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def poly_eval(a: Sequence, x):
    acc = x.field.zero if isinstance(x, GFElement) else 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def poly_add(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    zero = (a or b)[0] * 0 if (a or b) else 0
    return poly_trim([(a[i] if i < len(a) else zero) + (b[i] if i < len(b) else zero) for i in range(n)])


def poly_scale(a: Sequence, c) -> list:
    return poly_trim([x * c for x in a])


def poly_sub(a: Sequence, b: Sequence) -> list:
    return poly_add(a, [-x for x in b])


def poly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    zero = a[0] * 0
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
    return poly_trim(out)


def poly_deriv(a: Sequence) -> list:
    return poly_trim([a[i] * i for i in range(1, len(a))])


def poly_divmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    a, b = poly_trim(a), poly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    zero = b[0] * 0
    q = [zero] * max(len(a) - len(b) + 1, 0)
    inv = b[-1].inverse() if isinstance(b[-1], GFElement) else 1 / b[-1]
    while len(a) >= len(b):
        c = a[-1] * inv
        shift = len(a) - len(b)
        q[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = a[shift + i] - c * bi
        a = poly_trim(a)
    return poly_trim(q), a


def root_multiplicity(a: Sequence, x) -> int:
    """Order of vanishing of a nonzero polynomial at ``x``."""
    a = poly_trim(a)
    if not a:
        raise ValueError("zero polynomial has no finite root multiplicity")
    lin = [-x, x * 0 + 1]
    m = 0
    while True:
        q, r = poly_divmod(a, lin)
        if r:
            return m
        a, m = q, m + 1


def poly_gcd(a: Sequence, b: Sequence) -> list:
    """Monic gcd (empty list when both inputs vanish)."""
    a, b = poly_trim(a), poly_trim(b)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if not a:
        return []
    return poly_scale(a, 1 / a[-1])


def distinct_root_count(a: Sequence) -> int:
    """Distinct roots over the algebraic closure; exact while every multiplicity is below p."""
    a = poly_trim(a)
    if len(a) <= 1:
        return 0
    d = poly_deriv(a)
    if not d:
        raise CoverError("INSEPARABLE", "polynomial is a p-th power")
    return len(a) - len(poly_gcd(a, d))


def roots_in(a: Sequence, F: "GF") -> list:
    """Roots of ``a`` lying in ``F`` (exhaustive)."""
    a = poly_trim(a)
    return [x for x in F.elements() if not poly_eval(a, x)]
