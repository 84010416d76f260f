"""Separable isogenies from explicit kernels, and étale self-covers of elliptic curves.

Every finite set of points of an elliptic curve over a finite field lies in a
finite subgroup, so some separable isogeny kills all of it.  The self-cover
routine realizes this with Vélu quotients and then identifies the codomain
with the starting curve, which yields an unramified map ``E -> E`` sending a
prescribed point set to the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

from covercalc.ec import (
    ECPoint,
    PlaneCubic,
    WeierstrassCurve,
    curve_invariants,
    parse_curve,
    parse_point,
    point_order,
    scalar_mul,
    to_weierstrass,
)
from covercalc.errors import CoverError
from covercalc.gf import factorize


class VeluIsogeny:
    """Quotient of a short Weierstrass curve by a finite reduced subgroup."""

    def __init__(self, domain: WeierstrassCurve, kernel: list[ECPoint]):
        self.domain = domain
        self.kernel = tuple(kernel)
        F, a, b = domain.F, domain.a, domain.b
        terms = []
        seen = set()
        v = w = F.zero
        for Q in self.kernel:
            if Q.is_zero() or Q in seen:
                continue
            seen.add(Q)
            seen.add(-Q)
            gx = 3 * Q.x * Q.x + a
            gy = -2 * Q.y
            vq = gx if not Q.y else 2 * gx
            uq = gy * gy
            v, w = v + vq, w + uq + Q.x * vq
            terms.append((Q.x, Q.y, gx, gy, vq, uq))
        self._terms = terms
        self.codomain = WeierstrassCurve(F, a - 5 * v, b - 7 * w)

    @property
    def degree(self) -> int:
        return len(self.kernel)

    def __call__(self, P: ECPoint) -> ECPoint:
        if P.is_zero() or P in self.kernel:
            return self.codomain.origin
        x, y = P.x, P.y
        X, Y = x, y
        for xq, yq, gx, gy, vq, uq in self._terms:
            d = (x - xq).inverse()
            d2 = d * d
            X = X + vq * d + uq * d2
            Y = Y - (uq * 2 * y * d2 * d + vq * (y - yq) * d2 - gx * gy * d2)
        return ECPoint(self.codomain, (X, Y, P.curve.F.one), check=False)

    def describe(self) -> dict:
        return {"kind": "velu", "degree": self.degree, "codomain": self.codomain.describe(),
                "kernel": [Q.text for Q in self.kernel]}


@dataclass
class Isomorphism:
    """``(x, y) -> (u^2 x, u^3 y)`` between short Weierstrass models."""

    domain: WeierstrassCurve
    codomain: WeierstrassCurve
    u: object
    degree: int = 1

    def __call__(self, P: ECPoint) -> ECPoint:
        if P.is_zero():
            return self.codomain.origin
        u = self.u
        return ECPoint(self.codomain, (u * u * P.x, u * u * u * P.y, P.z))

    def describe(self) -> dict:
        return {"kind": "isomorphism", "u": self.domain.F.label(self.u), "codomain": self.codomain.describe()}


@dataclass
class ModelChange:
    domain: PlaneCubic
    codomain: PlaneCubic
    forward: object
    degree: int = 1

    def __call__(self, P: ECPoint) -> ECPoint:
        return self.forward(P)

    def describe(self) -> dict:
        return {"kind": "model-change", "codomain": self.codomain.describe()}


@dataclass
class Translation:
    """``P -> P + T``: an automorphism of the curve as a variety (not a homomorphism)."""

    domain: PlaneCubic
    shift: ECPoint
    degree: int = 1

    @property
    def codomain(self) -> PlaneCubic:
        return self.domain

    def __call__(self, P: ECPoint) -> ECPoint:
        return P + self.shift

    def describe(self) -> dict:
        return {"kind": "translation", "by": self.shift.text}


@dataclass
class IsogenyChain:
    steps: list = field(default_factory=list)

    @property
    def total_degree(self) -> int:
        return reduce(lambda acc, s: acc * s.degree, self.steps, 1)

    def __call__(self, P: ECPoint) -> ECPoint:
        for step in self.steps:
            P = step(P)
        return P

    def describe(self) -> list[dict]:
        return [s.describe() for s in self.steps]


def subgroup_generated(points, E: PlaneCubic) -> list[ECPoint]:
    group = {E.origin}
    for s in points:
        if s in group:
            continue
        multiples = [E.origin]
        cur = s
        while not cur.is_zero():
            multiples.append(cur)
            cur = cur + s
        group = {g + m for g in group for m in multiples}
    return sorted(group, key=lambda P: tuple(c.code for c in P.coords))


def _is_subgroup(kernel: list[ECPoint], E: PlaneCubic) -> bool:
    ks = set(kernel)
    if E.origin not in ks:
        return False
    return all(-P in ks for P in ks) and all(P + Q in ks for P in ks for Q in ks)


def velu_quotient(E: PlaneCubic, kernel: list[ECPoint]) -> IsogenyChain:
    """Separable isogeny with the given kernel, as a chain (a Hesse curve first
    passes through its Weierstrass model)."""
    if len(set(kernel)) != len(kernel):
        raise CoverError("INSEPARABLE_REQUEST", "repeated kernel points describe a non-reduced group scheme")
    kernel = list(kernel)
    if not kernel or any(P.curve is not E for P in kernel):
        raise CoverError("NOT_A_SUBGROUP", "kernel points must lie on the curve")
    if E.origin not in kernel:
        kernel.append(E.origin)
    if not _is_subgroup(kernel, E):
        raise CoverError("NOT_A_SUBGROUP", "kernel is not closed under the group law")
    steps = []
    if not isinstance(E, WeierstrassCurve):
        model = to_weierstrass(E)
        steps.append(ModelChange(E, model.curve, model.forward))
        kernel = [model.forward(P) for P in kernel]
        E = model.curve
    if len(kernel) == 1:
        return IsogenyChain(steps)
    steps.append(VeluIsogeny(E, kernel))
    return IsogenyChain(steps)


@dataclass
class SelfCover:
    m: int
    chain: IsogenyChain
    endpoint_isomorphism: object
    strategy: str
    orders: list[int]
    j_cycle_length: int

    @property
    def degree(self) -> int:
        return self.chain.total_degree


def j_cycle_length(j) -> int:
    """Least s >= 1 with ``j^(p^s) = j``."""
    s, cur = 1, j.frobenius()
    while cur != j:
        cur = cur.frobenius()
        s += 1
    return s


def _close_up(E: WeierstrassCurve, chain: IsogenyChain) -> Isomorphism | None:
    end = chain.steps[-1].codomain if chain.steps else E
    u = end.isomorphism_to(E)
    return None if u is None else Isomorphism(end, E, u)


def _p_torsion_point(E: WeierstrassCurve) -> ECPoint | None:
    p = E.F.p
    n = E.count()
    if n % p:
        return None
    cof = n
    while cof % p == 0:
        cof //= p
    for P in E.points():
        Q = scalar_mul(P, cof)
        if Q.is_zero():
            continue
        while not scalar_mul(Q, p).is_zero():
            Q = scalar_mul(Q, p)
        return Q
    return None


def etale_self_cover(E: PlaneCubic, S: list[ECPoint]) -> SelfCover:
    """Unramified ``phi: E -> E`` (up to the returned model identification) with ``phi(S) = {O}``.

    Tried in order:

    1. quotient by the subgroup generated by ``S``, if the codomain is
       isomorphic to ``E`` over the field;
    2. for a p-group on an ordinary curve, keep quotienting by the rational
       p-subgroup until the j-invariant comes back around its Frobenius orbit;
    3. quotient by the full group ``E(GF(q))``, the kernel of the separable
       endomorphism ``1 - Frobenius``, whose codomain is always ``E`` again.
    """
    start = E
    prefix = []
    if not isinstance(E, WeierstrassCurve):
        model = to_weierstrass(E)
        prefix = [ModelChange(E, model.curve, model.forward)]
        S = [model.forward(P) for P in S]
        E = model.curve
    n = E.count()
    orders = [point_order(P, n) for P in S]
    m0 = reduce(lambda a, b: a * b // math.gcd(a, b), orders, 1)
    j = E.j_invariant()
    s = j_cycle_length(j)
    inv = curve_invariants(E)
    p = E.F.p
    if m0 % p == 0 and inv.supersingular:
        raise CoverError("SUPERSINGULAR_P_PART", "a supersingular curve has no points of order p")

    if isinstance(start, WeierstrassCurve):
        back_map = None
    else:
        back_map = model.backward

    def finish(steps, strategy, m):
        chain = IsogenyChain(prefix + steps)
        if back_map is not None:
            chain.steps.append(ModelChange(E, start, back_map))
        return SelfCover(m, chain, steps[-1] if steps else None, strategy, orders, s)

    if m0 == 1:
        return finish([], "trivial", 1)

    G = subgroup_generated(S, E)
    first = velu_quotient(E, G)
    iso = _close_up(E, first)
    if iso is not None:
        return finish(first.steps + [iso], "generated-subgroup", m0)

    if set(factorize(len(G))) == {p} and not inv.supersingular:
        steps = list(first.steps)
        for _ in range(2 * s * E.F.k):
            cur = steps[-1].codomain
            T = _p_torsion_point(cur)
            if T is None:
                break
            steps.append(VeluIsogeny(cur, subgroup_generated([T], cur)))
            iso = _close_up(E, IsogenyChain(steps))
            if iso is not None:
                return finish(steps + [iso], "p-cycle", m0 * p ** (len(steps) - 1))

    full = list(E.points())
    whole = velu_quotient(E, full)
    iso = _close_up(E, whole)
    if iso is None:
        raise CoverError("SELF_COVER_FAILED", "quotient by E(F_q) is not isomorphic to E")
    exponent = reduce(lambda a, b: a * b // math.gcd(a, b), (point_order(P, n) for P in full), 1)
    return finish(whole.steps + [iso], "full-rational-group", exponent)


def chain_from_description(E: WeierstrassCurve, steps: list[dict]) -> IsogenyChain:
    """Rebuild a chain from :meth:`IsogenyChain.describe` output, recomputing
    every Vélu codomain from its kernel instead of trusting the record."""
    cur = E
    out = []
    for st in steps:
        kind = st.get("kind")
        if kind == "translation":
            step = Translation(cur, parse_point(st["by"], cur))
        elif kind == "velu":
            kernel = [parse_point(t, cur) for t in st["kernel"]]
            if len(set(kernel)) != len(kernel) or not _is_subgroup(kernel, cur):
                raise CoverError("NOT_A_SUBGROUP", "recorded kernel is not a reduced subgroup")
            step = VeluIsogeny(cur, kernel)
        elif kind == "isomorphism":
            target = parse_curve(st["codomain"], cur.F)
            u = cur.F.parse(st["u"])
            if not u or u**4 * cur.a != target.a or u**6 * cur.b != target.b:
                raise CoverError("BAD_ISOMORPHISM", f"u = {st['u']} does not map {cur.describe()} to {st['codomain']}")
            step = Isomorphism(cur, target, u)
        else:
            raise CoverError("PARSE_ERROR", f"unknown chain step {kind!r}")
        if "codomain" in st and step.codomain.describe() != st["codomain"]:
            raise CoverError("CHAIN_MISMATCH", f"recomputed codomain {step.codomain.describe()} != {st['codomain']}")
        out.append(step)
        cur = step.codomain
    return IsogenyChain(out)
