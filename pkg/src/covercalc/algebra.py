"""Composition, tame fiber products and branch-locus pushforward of covers.

The local rule for fiber products is Abhyankar's lemma: above a base point
where the two factors have local indices ``a`` and ``c``, the normalized
product has ``gcd(a, c)`` points, each of index ``lcm(a, c)`` over the base.
Such a point has index ``lcm/a`` over the left factor and ``lcm/c`` over the
right one, so matching ramification on the two sides cancels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from covercalc.errors import CoverError
from covercalc.ramification import (
    CoverDescriptor,
    CurveNode,
    PointRef,
    RamProfile,
    check_valid,
    is_prime,
    lcm,
    riemann_hurwitz_genus,
)


@dataclass(frozen=True)
class FiberPoint:
    over: PointRef
    left: tuple[int, int]    # (slot in the left fiber, local index a)
    right: tuple[int, int]   # (slot in the right fiber, local index c)
    count: int
    index_over_base: int

    @property
    def index_over_left(self) -> int:
        return self.index_over_base // self.left[1]

    @property
    def index_over_right(self) -> int:
        return self.index_over_base // self.right[1]


def abhyankar(a: int, c: int) -> tuple[int, int]:
    """``(number of points, index over the base)`` above a pair of local indices."""
    g = math.gcd(a, c)
    return g, a * c // g


@dataclass(frozen=True)
class FiberProductResult:
    product: CurveNode
    product_degree: int
    points: tuple[FiberPoint, ...]
    left_projection: CoverDescriptor
    right_projection: CoverDescriptor
    irreducible: str

    def points_over(self, base: PointRef) -> list[FiberPoint]:
        return [fp for fp in self.points if fp.over == base]


def _shared_target(left: CoverDescriptor, right: CoverDescriptor) -> None:
    if left.target.id != right.target.id:
        raise CoverError("BASE_MISMATCH", f"{left.target.id} != {right.target.id}")


def fiber_product(left: CoverDescriptor, right: CoverDescriptor,
                  pairing: Mapping[PointRef, PointRef] | None = None,
                  product_id: str | None = None) -> FiberProductResult:
    """Normalized fiber product of ``left: C -> B`` and ``right: D -> B``.

    Points with the same name on ``B`` are the same point.  ``pairing`` maps a
    left branch point to a differently named right branch point that should
    be identified with it.  Branch points of the projections are named as
    fiber slots of the opposite factor, e.g. ``"@q#1"`` on ``C`` is the second
    point of ``left`` over ``@q``.
    """
    _shared_target(left, right)
    check_valid(left)
    check_valid(right)
    p = left.characteristic
    if not (left.tame and right.tame):
        raise CoverError("WILD_RAMIFICATION", "fiber product of wild covers")

    to_left = {}
    for lp, rp in (pairing or {}).items():
        to_left[PointRef(str(rp))] = PointRef(str(lp))
    to_right = {v: k for k, v in to_left.items()}

    bases = {q for q in left.branch_points}
    bases |= {to_left.get(q, q) for q in right.branch_points}

    points = []
    left_branch, right_branch = [], []
    for b in sorted(bases):
        rb = to_right.get(b, b)
        a_parts = left.profile_at(b).parts
        c_parts = right.profile_at(rb).parts
        over_left = [[] for _ in a_parts]
        over_right = [[] for _ in c_parts]
        for i, a in enumerate(a_parts):
            for j, c in enumerate(c_parts):
                g, e = abhyankar(a, c)
                if p and e % p == 0:
                    raise CoverError("WILD_RAMIFICATION", f"index {e} over {b} in characteristic {p}")
                points.append(FiberPoint(b, (i, a), (j, c), g, e))
                over_left[i] += [e // a] * g
                over_right[j] += [e // c] * g
        left_branch += [(PointRef.slot(b, i), RamProfile(tuple(ps))) for i, ps in enumerate(over_left)]
        right_branch += [(PointRef.slot(rb, j), RamProfile(tuple(ps))) for j, ps in enumerate(over_right)]

    pid = product_id or f"({left.source.id}x{right.source.id})"
    product = CurveNode(pid, None, left.target.field)
    lproj = CoverDescriptor.build(product, left.source, right.degree, left_branch)
    rproj = CoverDescriptor.build(product, right.source, left.degree, right_branch)
    witness = irreducibility_witness_either(left, right, pairing)
    if witness == "witnessed":
        g = _genus_if_known(lproj)
        if g is None:
            g = _genus_if_known(rproj)
        if g is not None:
            product = CurveNode(pid, g, left.target.field)
            lproj = CoverDescriptor(product, left.source, lproj.degree, lproj.branch)
            rproj = CoverDescriptor(product, right.source, rproj.degree, rproj.branch)
    return FiberProductResult(product, left.degree * right.degree, tuple(points), lproj, rproj, witness)


def _genus_if_known(d: CoverDescriptor) -> int | None:
    if d.target.genus is None:
        return None
    return riemann_hurwitz_genus(d)


def irreducibility_witness(left: CoverDescriptor, right: CoverDescriptor,
                           pairing: Mapping[PointRef, PointRef] | None = None) -> str:
    """One-sided test that ``left x_B right`` is irreducible.

    ``right`` must have prime degree l.  If over some point where ``right`` is
    totally ramified a local index of ``left`` is prime to l, the degree-l
    extension cannot sit inside the function field of the left source, so the
    product is irreducible.  For l = 2 this is the odd-index criterion.
    Returns ``"witnessed"`` or ``"unknown"``; reducibility is never claimed.
    """
    _shared_target(left, right)
    ell = right.degree
    if not is_prime(ell):
        raise CoverError("UNSUPPORTED_DEGREE", f"right factor has degree {ell}")
    to_left = {PointRef(str(r)): PointRef(str(l)) for l, r in (pairing or {}).items()}
    for q, prof in right.branch:
        if prof.parts != (ell,):
            continue
        if any(a % ell for a in left.profile_at(to_left.get(q, q))):
            return "witnessed"
    return "unknown"


def irreducibility_witness_either(left: CoverDescriptor, right: CoverDescriptor,
                                  pairing: Mapping[PointRef, PointRef] | None = None) -> str:
    """Irreducibility is symmetric, so try the criterion with both factors in the prime-degree role."""
    inverse = {v: k for k, v in (pairing or {}).items()}
    for lt, rt, pr in ((left, right, pairing), (right, left, inverse)):
        if is_prime(rt.degree) and irreducibility_witness(lt, rt, pr) == "witnessed":
            return "witnessed"
    return "unknown"


def default_alignment(inner: CoverDescriptor) -> dict[PointRef, tuple[PointRef, int]]:
    """Place slot-named branch points ``"b#i"`` at slot ``i`` over ``b``; other
    abstract points go to fresh unbranched base points."""
    out = {}
    for q in inner.branch_points:
        if q.is_slot:
            out[q] = q.split_slot()
        elif q.kind == "abstract-label":
            out[q] = (PointRef.label(f"img({q.text.lstrip('@')})"), 0)
    return out


def compose_covers(inner: CoverDescriptor, outer: CoverDescriptor,
                   alignment: Mapping[PointRef, tuple[PointRef, int]] | None = None) -> CoverDescriptor:
    """``outer o inner`` for ``inner: C -> D`` and ``outer: D -> B``.

    ``alignment`` sends every branch point of ``inner`` to ``(b, j)``: the
    ``j``-th point of the fiber of ``outer`` over ``b``.  Local indices
    multiply along the chain.
    """
    if inner.target.id != outer.source.id:
        raise CoverError("MISALIGNED", f"{inner.target.id} is not the source of {outer.target.id}")
    check_valid(inner)
    check_valid(outer)
    placed = dict(default_alignment(inner))
    for q, (b, j) in (alignment or {}).items():
        placed[PointRef(str(q))] = (PointRef(str(b)), int(j))
    used = {}
    for q in inner.branch_points:
        if q not in placed:
            raise CoverError("MISALIGNED", f"branch point {q} of the inner cover has no position")
        b, j = placed[q]
        if not 0 <= j < len(outer.profile_at(b)):
            raise CoverError("MISALIGNED", f"slot {j} over {b} does not exist")
        if (b, j) in used:
            raise CoverError("MISALIGNED", f"{q} and {used[(b, j)]} both placed at {b}#{j}")
        used[(b, j)] = q

    p = outer.characteristic
    bases = set(outer.branch_points) | {b for b, _ in used}
    entries = []
    for b in sorted(bases):
        parts = []
        for j, e in enumerate(outer.profile_at(b).parts):
            q = used.get((b, j))
            sub = inner.profile_at(q).parts if q is not None else (1,) * inner.degree
            parts += [e * a for a in sub]
        if p and any(x % p == 0 for x in parts):
            raise CoverError("WILD_RAMIFICATION", f"composed index divisible by {p} over {b}")
        entries.append((b, RamProfile(tuple(parts))))
    return CoverDescriptor.build(inner.source, outer.target, inner.degree * outer.degree, entries)


def pushforward_branch_locus(d: CoverDescriptor, relabel: Mapping[PointRef, PointRef],
                             etale_degree: int | None = None) -> CoverDescriptor:
    """Compose ``d: C -> E`` with an unramified self-map of ``E`` of degree
    ``etale_degree`` that sends each branch point ``q`` to ``relabel[q]``.

    The profile over an image point is the union of the profiles merged
    there, padded with unramified sheets from the rest of the fiber.  When
    ``etale_degree`` is omitted the smallest degree compatible with the
    merging is used.
    """
    check_valid(d)
    relabel = {PointRef(str(k)): PointRef(str(v)) for k, v in relabel.items()}
    missing = [q for q in d.branch_points if q not in relabel]
    if missing:
        raise CoverError("PARTIAL_RELABEL", f"no image for {', '.join(map(str, missing))}")
    groups: dict[PointRef, list[PointRef]] = {}
    for q in d.branch_points:
        groups.setdefault(relabel[q], []).append(q)
    needed = max((len(g) for g in groups.values()), default=1)
    m = needed if etale_degree is None else int(etale_degree)
    if m < needed:
        raise CoverError("BAD_ETALE_DEGREE", f"{needed} branch points merge but the map has degree {m}")
    entries = []
    for img, srcs in groups.items():
        parts = [e for q in srcs for e in d.profile_at(q)]
        parts += [1] * (d.degree * (m - len(srcs)))
        entries.append((img, RamProfile(tuple(parts))))
    return CoverDescriptor.build(d.source, d.target, d.degree * m, entries)
