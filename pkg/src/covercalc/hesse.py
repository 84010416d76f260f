"""The Hesse pencil ``x^3 + y^3 + z^3 + lam xyz = 0`` and its projection to the line.

The nine base points of the pencil have ``xyz = 0``, so they lie on every
member.  With a base point as origin they are the 3-torsion, because every
base point is a flex.

The projection ``(x:y:z) -> (x+z : y)`` is the pencil of lines through the
base point ``C = (1:0:-1)``.  In coordinates ``a = x+z``, ``b = x-z`` the
residual intersection of the line ``(u t : v t : b)`` with the cubic is

    A t^2 + B b^2 = 0,   A = u^3 + lam u^2 v + 4 v^3,   B = 3u - lam v,

so the branch locus is the binary quartic ``A B``.  Over ``B = 0``, i.e. at
``(lam:3)``, the fiber is ``C`` doubled.  That is also the image of ``C``
itself, read off from the tangent direction.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from covercalc.ec import ECPoint, HesseCurve, scalar_mul
from covercalc.errors import CoverError
from covercalc.gf import GF, distinct_root_count, roots_in


def primitive_cube_root(F: GF):
    roots = [z for z in F.roots_of_unity(3) if z != F.one]
    if not roots:
        raise CoverError("NO_CUBE_ROOT", f"{F.describe()} has no primitive cube root of unity")
    return min(roots, key=lambda z: z.code)


def base_points(F: GF) -> list[tuple]:
    """The nine base points ``(1:-z^i:0), (0:1:-z^i), (1:0:-z^i)``."""
    zeta = primitive_cube_root(F)
    one, zero = F.one, F.zero
    pts = []
    for i in range(3):
        w = -(zeta**i)
        pts += [(one, w, zero), (zero, one, w), (one, zero, w)]
    return pts


@dataclass
class HesseTorsion:
    curve: HesseCurve
    T: list[ECPoint]
    checks: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return all(self.checks.values())


def hesse_torsion_check(F: GF, lam) -> HesseTorsion:
    E = HesseCurve(F, lam)
    raw = base_points(F)
    fermat = HesseCurve(F, 0)
    on_member = all(not E.evaluate(P) for P in raw)
    on_fermat = all(not fermat.evaluate(P) for P in raw)
    T = [ECPoint(E, P) for P in raw]
    torsion = all(scalar_mul(P, 3).is_zero() for P in T)
    # T must be all of E[3], not a piece of it
    closed = len(set(T)) == 9 and all(P + Q in set(T) for P in T for Q in T)
    checks = {"on_member": on_member, "on_fermat": on_fermat,
              "three_torsion": torsion, "subgroup_of_order_9": closed,
              "origin_in_T": E.origin in set(T)}
    return HesseTorsion(E, T, checks)


def _p1_point(F: GF, u, v) -> str:
    """``(u:v)`` as the text of a line point, ``inf`` when ``v = 0``."""
    if not v:
        return "inf"
    return F.label(u / v)


def project(E: HesseCurve, P: ECPoint) -> tuple:
    """``(x+z : y)``, with the tangent direction ``(lam:3)`` at the center."""
    x, y, z = P.coords
    if not (x + z) and not y:
        return (E.lam, E.F(3))
    return (x + z, y)


@dataclass
class HesseProjection:
    curve: HesseCurve
    degree: int
    branch_quartic: list
    branch_count: int
    branch_locus_rational: list[str]
    image_of_T: list[str]
    S_lambda: list[str]
    printed_image: list[str]

    @property
    def matches_printed(self) -> bool:
        return sorted(self.image_of_T) == sorted(self.printed_image)

    def difference(self) -> dict:
        got, want = set(self.image_of_T), set(self.printed_image)
        return {"computed_only": sorted(got - want), "printed_only": sorted(want - got)}


def hesse_projection(F: GF, lam) -> HesseProjection:
    tors = hesse_torsion_check(F, lam)
    if not tors.verified:
        raise CoverError("TORSION_CHECK_FAILED", f"base points fail on {tors.curve!r}")
    E = tors.curve
    lam = E.lam
    # dehomogenized at v = 1; the leading coefficient 3 keeps infinity off the locus
    cubic = [F(4), F.zero, lam, F.one]
    linear = [-lam, F(3)]
    quartic = [F.zero] * 5
    for i, a in enumerate(cubic):
        for j, b in enumerate(linear):
            quartic[i + j] = quartic[i + j] + a * b
    count = distinct_root_count(quartic)
    rational = [_p1_point(F, r, F.one) for r in roots_in(quartic, F)]

    images = Counter()
    for P in E.projective_points():
        u, v = project(E, P)
        images[_p1_point(F, u, v)] += 1
    center = _p1_point(F, lam, F(3))
    # the center is a single point but lies over (lam:3) with multiplicity 2
    degree = max(n + (1 if t == center else 0) for t, n in images.items())

    T_images = [_p1_point(F, *project(E, P)) for P in tors.T]
    Tset = set(tors.T)
    S = []
    for r in roots_in(quartic, F):
        fiber = [P for P in E.projective_points() if _p1_point(F, *project(E, P)) == _p1_point(F, r, F.one)]
        if fiber and all(P in Tset for P in fiber):
            S.append(_p1_point(F, r, F.one))

    zeta = primitive_cube_root(F)
    printed = [_p1_point(F, F.zero, F.one), _p1_point(F, F.one, -zeta), _p1_point(F, F.one, -zeta * zeta),
               _p1_point(F, F.one, -F.one), _p1_point(F, F.one, F.zero)]
    return HesseProjection(E, degree, quartic, count, sorted(rational), sorted(set(T_images)),
                           sorted(S), sorted(set(printed)))

