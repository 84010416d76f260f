"""Invariants checked on generated inputs."""

import math

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from covercalc.algebra import abhyankar, compose_covers, fiber_product
from covercalc.ec import WeierstrassCurve, point_order, scalar_mul
from covercalc.errors import CoverError
from covercalc.gf import field
from covercalc.hesse import base_points
from covercalc.maps import (
    LattesData,
    RationalMapData,
    SuperellipticData,
    lattes_descriptor,
    rational_map_profile,
    superelliptic_descriptor,
)
from covercalc.ramification import (
    CoverDescriptor,
    PointRef,
    RamProfile,
    classify_cover,
    is_etale,
    normalize,
    riemann_hurwitz_genus,
    validate_descriptor,
)
from conftest import cover, node


@st.composite
def partitions(draw, n):
    parts, left = [], n
    while left:
        k = draw(st.integers(1, left))
        parts.append(k)
        left -= k
    return parts


@st.composite
def descriptors(draw, max_degree=6, names=("@a", "@b", "@c", "@d", "@e"), tgt="P1", tgt_genus=0):
    n = draw(st.integers(1, max_degree))
    pts = draw(st.lists(st.sampled_from(names), unique=True, max_size=len(names)))
    return cover("X", tgt, n, {q: draw(partitions(n)) for q in pts}, tgt_genus=tgt_genus)


def rh_ok(d):
    try:
        riemann_hurwitz_genus(d)
        return True
    except CoverError:
        return False


@given(descriptors())
def test_profiles_sum_to_degree(d):
    assert validate_descriptor(d) == []
    assert all(sum(pr.parts) == d.degree for _, pr in d.branch)


@given(descriptors())
def test_rh_parity(d):
    total = d.degree * -2 + sum(e - 1 for _, pr in d.branch for e in pr)
    if total % 2 == 0 and total >= -2:
        assert riemann_hurwitz_genus(d) == total // 2 + 1
    else:
        assert not rh_ok(d)


@given(st.integers(1, 8), st.integers(0, 5))
def test_etale_rh(n, g):
    assume(g >= 1 or n == 1)  # the line has no connected étale covers
    d = cover("X", "B", n, {}, tgt_genus=g)
    assert is_etale(d)
    assert 2 * riemann_hurwitz_genus(d) - 2 == n * (2 * g - 2)


@given(descriptors())
def test_generic_implies_simple(d):
    c = classify_cover(d)
    assert not c.generic or c.simple


@given(descriptors())
def test_normalize_idempotent(d):
    assert normalize(normalize(d)) == normalize(d)


@settings(max_examples=10_000, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12))
def test_abhyankar_conservation(a, c):
    g, e = abhyankar(a, c)
    assert g * e == a * c
    # ramification cancels ramification: the index over a factor is 1 exactly when the other index divides it
    assert (e // a == 1) == (a % c == 0)
    assert (e // c == 1) == (c % a == 0)


@given(descriptors(max_degree=4), descriptors(max_degree=4))
def test_fiber_product_degree_and_symmetry(left, right):
    right = CoverDescriptor(node("Y"), right.target, right.degree, right.branch)
    res = fiber_product(left, right)
    for b in {fp.over for fp in res.points}:
        pts = res.points_over(b)
        assert sum(fp.count * fp.index_over_base for fp in pts) == left.degree * right.degree
    for fp in res.points:
        a, c = fp.left[1], fp.right[1]
        if a % c == 0:
            assert fp.index_over_left == 1
        if c % a == 0:
            assert fp.index_over_right == 1
    swapped = fiber_product(right, left)
    assert sorted((fp.over, fp.right, fp.left, fp.count) for fp in res.points) == \
        sorted((fp.over, fp.left, fp.right, fp.count) for fp in swapped.points)
    assert res.left_projection.branch == swapped.right_projection.branch


@st.composite
def chains(draw):
    """``f: A -> B``, ``g: B -> C``, ``h: C -> D`` with f branched at slots of g's fibers."""
    h = draw(descriptors(max_degree=3, names=("@h1", "@h2")))
    h = CoverDescriptor(node("C"), h.target, h.degree, h.branch)
    g = draw(descriptors(max_degree=3, names=("@g1", "@g2"), tgt="C", tgt_genus=None))
    g = CoverDescriptor(node("B"), g.target, g.degree, g.branch)
    nf = draw(st.integers(1, 3))
    slots = [PointRef.slot(q, j) for q, pr in g.branch for j in range(len(pr))]
    chosen = draw(st.lists(st.sampled_from(slots), unique=True)) if slots else []
    f = CoverDescriptor.build(node("A"), node("B"), nf,
                              [(q, RamProfile(tuple(draw(partitions(nf))))) for q in chosen])
    return f, g, h


@given(chains())
def test_compose_associative(fgh):
    f, g, h = fgh
    # h is unramified at img(q), so slot j of g over q is slot j of h o g over img(q)
    align = {}
    for q in f.branch_points:
        base, j = q.split_slot()
        align[q] = (PointRef.label(f"img({base.text.lstrip('@')})"), j)
    left = compose_covers(f, compose_covers(g, h), align)
    right = compose_covers(compose_covers(f, g), h)
    assert left.degree == right.degree
    assert left.branch == right.branch


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([5, 7, 11, 13]), st.integers(0, 12), st.integers(0, 12))
def test_lagrange_and_torsion(p, a, b):
    F = field(p)
    assume((4 * a**3 + 27 * b * b) % p)
    E = WeierstrassCurve(F, F(a), F(b))
    n = E.count()
    for P in E.points():
        assert n % point_order(P, n) == 0
        assert scalar_mul(P, n).is_zero()


def test_associativity_exhaustive():
    for p, a, b in [(5, 0, 1), (7, 0, 1), (11, 1, 1), (13, 2, 3)]:
        E = WeierstrassCurve(field(p), field(p)(a), field(p)(b))
        pts = list(E.points())
        if len(pts) > 30:
            continue
        assert all((P + Q) + R == P + (Q + R) for P in pts for Q in pts for R in pts)


@given(st.sampled_from([7, 13, 19]), st.integers(0, 18))
def test_hesse_base_points_on_every_member(p, lam):
    F = field(p)
    assume(F(lam) ** 3 != F(-27))
    for x, y, z in base_points(F):
        assert x**3 + y**3 + z**3 + F(lam) * x * y * z == F.zero


@given(st.integers(1, 12), st.lists(st.integers(1, 5), min_size=1, max_size=4))
def test_superelliptic_degree(m, mults):
    roots = tuple((f"@r{i}", a) for i, a in enumerate(mults))
    d = superelliptic_descriptor(SuperellipticData(m, roots=roots))
    for q, a in roots:
        g = math.gcd(m, a)
        assert d.profile_at(q).parts == (m // g,) * g


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 12), min_size=2, max_size=4), st.lists(st.integers(0, 12), min_size=1, max_size=3))
def test_rational_map_rh(num, den):
    F = field(13)
    try:
        d = rational_map_profile(RationalMapData(tuple(F(c) for c in num), tuple(F(c) for c in den), F),
                                 max_extension=3)
    except CoverError:
        return
    assert sum(e - 1 for _, pr in d.branch for e in pr) == 2 * d.degree - 2


@given(st.sampled_from([2, 3]), st.integers(2, 15))
def test_lattes_genus_zero(flavor, n):
    assume(math.gcd(n, flavor) == 1)
    assert riemann_hurwitz_genus(lattes_descriptor(LattesData(n, flavor))) == 0
