"""Elliptic curves over GF(p^k): group law, point enumeration, orders and invariants.

Two models are supported, both as plane cubics with a flex as origin:

* short Weierstrass ``y^2 z = x^3 + a x z^2 + b z^3``, origin ``(0:1:0)``;
* Hesse ``x^3 + y^3 + z^3 + lam x y z = 0``, origin an inflection point,
  ``(1:-1:0)`` by default.

The group law on a general plane cubic is the chord-tangent rule
``P + Q = O * (P * Q)`` where ``X * Y`` is the third intersection of the line
``XY`` with the curve.  Weierstrass curves also get the usual affine formulas,
which the chord-tangent rule cross-checks in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from covercalc.errors import CoverError
from covercalc.gf import GF, GFElement, divisors, field, scan_guard

Coords = tuple[GFElement, GFElement, GFElement]


def _normalize(coords, F: GF) -> Coords:
    x, y, z = (F(c) for c in coords)
    for c in (z, y, x):
        if c:
            inv = c.inverse()
            return (x * inv, y * inv, z * inv)
    raise CoverError("BAD_POINT", "(0:0:0) is not a projective point")


def _check_char(F: GF) -> None:
    if F.p in (2, 3):
        raise CoverError("BAD_CHARACTERISTIC", "characteristic 2 and 3 are not supported")


class ECPoint:
    __slots__ = ("curve", "coords")

    def __init__(self, curve: "PlaneCubic", coords, check: bool = True):
        self.curve = curve
        self.coords = _normalize(coords, curve.F)
        if check and curve.evaluate(self.coords):
            raise CoverError("NOT_ON_CURVE", f"{self.text} is not on {curve}")

    @property
    def x(self):
        return self.coords[0]

    @property
    def y(self):
        return self.coords[1]

    @property
    def z(self):
        return self.coords[2]

    def is_zero(self) -> bool:
        return self == self.curve.origin

    def __eq__(self, other):
        return isinstance(other, ECPoint) and self.coords == other.coords

    def __hash__(self):
        return hash(tuple(c.code for c in self.coords))

    def __add__(self, other: "ECPoint") -> "ECPoint":
        return self.curve.add(self, other)

    def __neg__(self) -> "ECPoint":
        return self.curve.negate(self)

    def __sub__(self, other: "ECPoint") -> "ECPoint":
        return self.curve.add(self, self.curve.negate(other))

    def __mul__(self, n: int) -> "ECPoint":
        return scalar_mul(self, n)

    __rmul__ = __mul__

    @property
    def text(self) -> str:
        F = self.curve.F
        return "pt:" + ":".join(F.label(c) for c in self.coords)

    def __repr__(self):
        return self.text


class PlaneCubic:
    """A smooth plane cubic with a chosen flex as group origin."""

    F: GF
    origin: ECPoint

    def evaluate(self, P: Coords) -> GFElement:
        raise NotImplementedError

    def gradient(self, P: Coords) -> Coords:
        raise NotImplementedError

    def point(self, x, y, z=1) -> ECPoint:
        return ECPoint(self, (x, y, z))

    def third_point(self, P: ECPoint, Q: ECPoint) -> ECPoint:
        """Third intersection of the line PQ (tangent if P == Q) with the curve."""
        F = self.F
        p, q = P.coords, Q.coords
        if P != Q:
            gp, gq = self.gradient(p), self.gradient(q)
            alpha = sum((a * b for a, b in zip(gp, q)), F.zero)
            beta = sum((a * b for a, b in zip(gq, p)), F.zero)
            return ECPoint(self, tuple(beta * a - alpha * b for a, b in zip(p, q)), check=False)
        g = self.gradient(p)
        other = None
        for e in ((F.one, F.zero, F.zero), (F.zero, F.one, F.zero), (F.zero, F.zero, F.one)):
            cand = _cross(g, e)
            if any(cand) and _cross(cand, p) != (F.zero,) * 3:
                other = cand
                break
        # F(sP + tQ) = s t^2 gamma + t^3 delta along the tangent line
        delta = self.evaluate(other)
        gamma = self.evaluate(tuple(a + b for a, b in zip(p, other))) - delta
        return ECPoint(self, tuple(delta * a - gamma * b for a, b in zip(p, other)), check=False)

    def add(self, P: ECPoint, Q: ECPoint) -> ECPoint:
        return self.third_point(self.origin, self.third_point(P, Q))

    def negate(self, P: ECPoint) -> ECPoint:
        return self.third_point(self.origin, P)

    def projective_points(self) -> Iterator[ECPoint]:
        F = self.F
        if F.q**2 > scan_guard():
            raise CoverError("FIELD_TOO_LARGE", f"scanning {F} exceeds the guard")
        for x in F:
            for y in F:
                if not self.evaluate((x, y, F.one)):
                    yield ECPoint(self, (x, y, F.one), check=False)
        for x in F:
            if not self.evaluate((x, F.one, F.zero)):
                yield ECPoint(self, (x, F.one, F.zero), check=False)
        if not self.evaluate((F.one, F.zero, F.zero)):
            yield ECPoint(self, (F.one, F.zero, F.zero), check=False)

    def points(self) -> Iterator[ECPoint]:
        return self.projective_points()

    def count(self) -> int:
        return sum(1 for _ in self.points())

    def base_change(self, F2: GF) -> "PlaneCubic":
        raise NotImplementedError


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


class WeierstrassCurve(PlaneCubic):
    """``y^2 = x^3 + a x + b`` over GF(p^k), p >= 5."""

    def __init__(self, F: GF, a, b):
        _check_char(F)
        self.F = F
        self.a, self.b = F(a), F(b)
        if not (4 * self.a**3 + 27 * self.b**2):
            raise CoverError("SINGULAR", f"4a^3 + 27b^2 = 0 for a={self.a}, b={self.b}")
        self.origin = ECPoint(self, (0, 1, 0), check=False)

    @property
    def form(self) -> str:
        return "weierstrass"

    def evaluate(self, P):
        x, y, z = P
        return y * y * z - x * x * x - self.a * x * z * z - self.b * z * z * z

    def gradient(self, P):
        x, y, z = P
        return (-3 * x * x - self.a * z * z, 2 * y * z, y * y - 2 * self.a * x * z - 3 * self.b * z * z)

    def rhs(self, x):
        return x * x * x + self.a * x + self.b

    def add(self, P: ECPoint, Q: ECPoint) -> ECPoint:
        if P.z.code == 0:
            return Q
        if Q.z.code == 0:
            return P
        x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
        if x1 == x2:
            if not (y1 + y2):
                return self.origin
            lam = (3 * x1 * x1 + self.a) / (2 * y1)
        else:
            lam = (y2 - y1) / (x2 - x1)
        x3 = lam * lam - x1 - x2
        return ECPoint(self, (x3, lam * (x1 - x3) - y1, self.F.one), check=False)

    def negate(self, P: ECPoint) -> ECPoint:
        if P.z.code == 0:
            return P
        return ECPoint(self, (P.x, -P.y, P.z), check=False)

    def points(self) -> Iterator[ECPoint]:
        F = self.F
        if F.q > scan_guard():
            raise CoverError("FIELD_TOO_LARGE", f"scanning {F} exceeds the guard")
        yield self.origin
        for x in F:
            r = self.rhs(x)
            if not r:
                yield ECPoint(self, (x, F.zero, F.one), check=False)
            else:
                s = F.sqrt(r)
                if s is not None:
                    yield ECPoint(self, (x, s, F.one), check=False)
                    yield ECPoint(self, (x, -s, F.one), check=False)

    def count(self) -> int:
        F = self.F
        if F.q > scan_guard():
            raise CoverError("FIELD_TOO_LARGE", f"scanning {F} exceeds the guard")
        n = 1
        for x in F:
            r = self.rhs(x)
            n += 1 if not r else (2 if F.is_square(r) else 0)
        return n

    def lift_x(self, x) -> list[ECPoint]:
        F = self.F
        x = F(x)
        r = self.rhs(x)
        s = F.sqrt(r)
        if s is None:
            return []
        pts = [ECPoint(self, (x, s, F.one), check=False)]
        if s:
            pts.append(ECPoint(self, (x, -s, F.one), check=False))
        return pts

    def j_invariant(self) -> GFElement:
        a3 = 4 * self.a**3
        return 1728 * a3 / (a3 + 27 * self.b**2)

    def base_change(self, F2: GF) -> "WeierstrassCurve":
        emb = self.F.embedding(F2)
        return WeierstrassCurve(F2, emb(self.a), emb(self.b))

    def isomorphism_to(self, other: "WeierstrassCurve"):
        """``u`` with ``(x, y) -> (u^2 x, u^3 y)`` mapping self onto other, or ``None``."""
        if other.F is not self.F:
            return None
        for u in self.F:
            if u and u**4 * self.a == other.a and u**6 * self.b == other.b:
                return u
        return None

    def describe(self) -> str:
        return f"weierstrass:{self.F.label(self.a)},{self.F.label(self.b)}"

    def __eq__(self, other):
        return isinstance(other, WeierstrassCurve) and other.F is self.F and (self.a, self.b) == (other.a, other.b)

    def __hash__(self):
        return hash((self.F.q, self.a.code, self.b.code))

    def __repr__(self):
        return f"y^2 = x^3 + {self.a} x + {self.b} over {self.F!r}"


class HesseCurve(PlaneCubic):
    """``x^3 + y^3 + z^3 + lam x y z = 0`` with a flex of the base locus as origin."""

    def __init__(self, F: GF, lam, origin=None):
        _check_char(F)
        self.F = F
        self.lam = F(lam)
        if self.lam**3 == F(-27):
            raise CoverError("SINGULAR_MEMBER", f"lambda^3 = -27 for lambda = {self.lam}")
        self.origin = ECPoint(self, origin or (1, -1, 0))

    @property
    def form(self) -> str:
        return "hesse"

    def evaluate(self, P):
        x, y, z = P
        return x * x * x + y * y * y + z * z * z + self.lam * x * y * z

    def gradient(self, P):
        x, y, z = P
        lam = self.lam
        return (3 * x * x + lam * y * z, 3 * y * y + lam * x * z, 3 * z * z + lam * x * y)

    def base_change(self, F2: GF) -> "HesseCurve":
        emb = self.F.embedding(F2)
        return HesseCurve(F2, emb(self.lam), tuple(emb(c) for c in self.origin.coords))

    def j_invariant(self) -> GFElement:
        return to_weierstrass(self).curve.j_invariant()

    def describe(self) -> str:
        return f"hesse:{self.F.label(self.lam)}"

    def __repr__(self):
        return f"x^3 + y^3 + z^3 + {self.lam} xyz = 0 over {self.F!r}"


def parse_curve(text: str, F: GF) -> PlaneCubic:
    """``"weierstrass:a,b"`` or ``"hesse:lam"``; field elements of an extension use ``[c0,c1]``."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "weierstrass":
            parts = _split_top(rest)
            return WeierstrassCurve(F, F.parse(parts[0]), F.parse(parts[1]))
        if kind == "hesse":
            return HesseCurve(F, F.parse(rest))
    except (IndexError, ValueError) as exc:
        raise CoverError("PARSE_ERROR", f"bad curve {text!r}") from exc
    raise CoverError("PARSE_ERROR", f"unknown curve form {kind!r}")


def _split_top(text: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return out


def parse_field(text: str) -> GF:
    """``"GF(p^k)/modulus=[c0,...,ck]"``, ``"GF(p^k)"`` or ``"GF(p)"``."""
    head, _, mod = text.partition("/modulus=")
    inner = head.strip()
    if not (inner.startswith("GF(") and inner.endswith(")")):
        raise CoverError("PARSE_ERROR", f"bad field {text!r}")
    body = inner[3:-1]
    p, _, k = body.partition("^")
    try:
        p, k = int(p), int(k or 1)
        if mod:
            return GF(p, k, [int(c) for c in mod.strip("[] ").split(",")])
    except ValueError as exc:
        raise CoverError("PARSE_ERROR", f"bad field {text!r}") from exc
    return field(p, k)


def parse_point(text: str, E: PlaneCubic) -> ECPoint:
    body = text[3:] if text.startswith("pt:") else text
    coords = body.split(":")
    if len(coords) == 2:
        coords.append("1")
    if len(coords) != 3:
        raise CoverError("PARSE_ERROR", f"bad point {text!r}")
    return ECPoint(E, tuple(E.F.parse(c) for c in coords))


# -- operations --------------------------------------------------------------

def scalar_mul(P: ECPoint, n: int) -> ECPoint:
    E = P.curve
    if n < 0:
        return E.negate(scalar_mul(P, -n))
    result, base = E.origin, P
    while n:
        if n & 1:
            result = E.add(result, base)
        base = E.add(base, base)
        n >>= 1
    return result


def curve_point_count(E: PlaneCubic, k: int | None = None) -> int:
    """Number of points of ``E`` over GF(p^k) (its own field when ``k`` is omitted)."""
    if k is not None and k != E.F.k:
        E = E.base_change(field(E.F.p, k))
    return E.count()


def point_order(P: ECPoint, group_order: int | None = None) -> int:
    n = group_order if group_order is not None else P.curve.count()
    for d in divisors(n):
        if scalar_mul(P, d).is_zero():
            return d
    raise CoverError("GROUP_LAW", f"order of {P} does not divide {n}")


@dataclass(frozen=True)
class CurveInvariants:
    j_invariant: GFElement
    supersingular: bool
    trace: int
    count: int


def curve_invariants(E: PlaneCubic) -> CurveInvariants:
    """j-invariant, Frobenius trace over the field of definition, and supersingularity
    (trace divisible by p, valid for p >= 5)."""
    n = E.count()
    t = E.F.q + 1 - n
    return CurveInvariants(E.j_invariant(), t % E.F.p == 0, t, n)


# -- plane cubic with a flex -> short Weierstrass ------------------------------

def _lin(coeffs):
    return {(1, 0, 0): coeffs[0], (0, 1, 0): coeffs[1], (0, 0, 1): coeffs[2]}


def _pmul3(a, b):
    out = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = (ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2])
            out[m] = out.get(m, 0) + ca * cb
    return out


def _cubic_terms(E: PlaneCubic) -> dict:
    F = E.F
    if isinstance(E, WeierstrassCurve):
        return {(0, 2, 1): F.one, (3, 0, 0): -F.one, (1, 0, 2): -E.a, (0, 0, 3): -E.b}
    return {(3, 0, 0): F.one, (0, 3, 0): F.one, (0, 0, 3): F.one, (1, 1, 1): E.lam}


@dataclass
class WeierstrassModel:
    curve: WeierstrassCurve
    forward: Callable[[ECPoint], ECPoint]
    backward: Callable[[ECPoint], ECPoint]


def to_weierstrass(E: PlaneCubic) -> WeierstrassModel:
    """Isomorphism onto a short Weierstrass curve sending the origin to ``(0:1:0)``.

    The flex ``O`` goes to ``(0:1:0)`` and its tangent line to the line at
    infinity by a projective change of coordinates; the resulting long
    Weierstrass equation is completed to short form with the usual
    ``b2, b4, b6, c4, c6`` substitutions.
    """
    if isinstance(E, WeierstrassCurve):
        return WeierstrassModel(E, lambda P: P, lambda P: P)
    F = E.F
    O = E.origin.coords
    tangent = E.gradient(O)
    units = ((F.one, F.zero, F.zero), (F.zero, F.one, F.zero), (F.zero, F.zero, F.one))
    A = next(c for c in (_cross(tangent, e) for e in units)
             if any(c) and any(_cross(c, O)))
    B = next(e for e in units if sum((t * c for t, c in zip(tangent, e)), F.zero))
    cols = (A, O, B)
    M = [[cols[j][i] for j in range(3)] for i in range(3)]

    forms = [_lin(M[i]) for i in range(3)]
    G: dict = {}
    for mono, coef in _cubic_terms(E).items():
        term = {(0, 0, 0): coef}
        for var, power in enumerate(mono):
            for _ in range(power):
                term = _pmul3(term, forms[var])
        for m, c in term.items():
            G[m] = G.get(m, F.zero) + c
    get = lambda i, j, k: F(G.get((i, j, k), F.zero))  # noqa: E731
    c, beta = get(3, 0, 0), get(0, 2, 1)
    if not c or not beta or get(0, 3, 0) or get(2, 1, 0) or get(1, 2, 0):
        raise CoverError("NOT_A_FLEX", f"{E.origin} is not a flex of {E}")
    mu, mu2 = -beta / c, beta / c
    # affine w = 1, u = mu X, v = mu2 Y, divided by -beta * mu2^2 / ... normalized below
    # coefficients of Y^2, XY, Y and X^3, X^2, X, 1 after substitution
    y2 = beta * mu2 * mu2
    xy = get(1, 1, 1) * mu * mu2
    y1 = get(0, 1, 2) * mu2
    x3 = c * mu**3
    x2 = get(2, 0, 1) * mu * mu
    x1 = get(1, 0, 2) * mu
    x0 = get(0, 0, 3)
    # y2 Y^2 + xy XY + y1 Y + x3 X^3 + x2 X^2 + x1 X + x0 = 0, with x3 = -y2
    a1, a3 = xy / y2, y1 / y2
    a2, a4, a6 = -x2 / y2, -x1 / y2, -x0 / y2
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    c4 = b2 * b2 - 24 * b4
    c6 = -b2**3 + 36 * b2 * b4 - 216 * b6
    W = WeierstrassCurve(F, -27 * c4, -54 * c6)
    Minv = _inverse3(M, F)

    def forward(P: ECPoint) -> ECPoint:
        u, v, w = (sum((Minv[i][j] * P.coords[j] for j in range(3)), F.zero) for i in range(3))
        if not w:
            return W.origin
        X, Y = u / (w * mu), v / (w * mu2)
        return ECPoint(W, (36 * X + 3 * b2, 108 * (2 * Y + a1 * X + a3), F.one))

    def backward(P: ECPoint) -> ECPoint:
        if P.is_zero():
            return E.origin
        X = (P.x - 3 * b2) / 36
        Y = (P.y / 108 - a1 * X - a3) / 2
        u, v = mu * X, mu2 * Y
        return ECPoint(E, tuple(M[i][0] * u + M[i][1] * v + M[i][2] for i in range(3)))

    return WeierstrassModel(W, forward, backward)


def _inverse3(M, F: GF):
    (a, b, c), (d, e, f), (g, h, i) = M
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    if not det:
        raise CoverError("SINGULAR", "degenerate coordinate change")
    inv = det.inverse()
    adj = [
        [e * i - f * h, c * h - b * i, b * f - c * e],
        [f * g - d * i, a * i - c * g, c * d - a * f],
        [d * h - e * g, b * g - a * h, a * e - b * d],
    ]
    return [[x * inv for x in row] for row in adj]
