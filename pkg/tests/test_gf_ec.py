import pytest

from covercalc.ec import (
    WeierstrassCurve,
    curve_invariants,
    parse_curve,
    parse_field,
    parse_point,
    point_order,
    scalar_mul,
)
from covercalc.errors import CoverError
from covercalc.gf import GF, factorize, field, is_irreducible
from covercalc.hesse import hesse_torsion_check
from covercalc.isogeny import chain_from_description, etale_self_cover, subgroup_generated, velu_quotient


def brute_count(p, a, b):
    """Affine solutions of y^2 = x^3 + a x + b over GF(p) by double loop, plus infinity."""
    return 1 + sum(1 for x in range(p) for y in range(p) if (y * y - x**3 - a * x - b) % p == 0)


def curve(p, a, b, k=1):
    F = field(p, k)
    return WeierstrassCurve(F, F(a), F(b))


class TestField:
    @pytest.mark.parametrize("p,k", [(5, 1), (7, 2), (3, 3), (2, 4)])
    def test_group_axioms(self, p, k):
        F = field(p, k)
        els = list(F.elements())
        assert len(els) == p**k
        nz = [x for x in els if x]
        assert all(x * x.inverse() == F.one for x in nz)
        assert all(x ** (p**k) == x for x in els)

    def test_modulus_irreducible(self):
        for p, k in [(5, 2), (7, 3), (11, 2)]:
            assert is_irreducible(field(p, k).modulus, p)

    def test_labels_parse_back(self):
        F = field(7, 2)
        for x in F.elements():
            assert F.parse(F.label(x)) == x

    def test_factorize(self):
        assert factorize(360) == {2: 3, 3: 2, 5: 1}

    def test_parse_field(self):
        assert parse_field("GF(7)").q == 7
        assert parse_field("GF(5^2)").q == 25
        with pytest.raises(CoverError):
            parse_field("F7")


class TestCounting:
    @pytest.mark.parametrize("p,a,b", [(5, 0, 1), (7, 0, 1), (11, 3, 7), (13, 1, 0)])
    def test_count_matches_scan(self, p, a, b):
        assert curve(p, a, b).count() == brute_count(p, a, b)

    def test_invariants(self):
        i5 = curve_invariants(curve(5, 0, 1))
        assert (i5.count, i5.trace, i5.supersingular) == (6, 0, True)
        i7 = curve_invariants(curve(7, 0, 1))
        assert (i7.count, i7.trace, i7.supersingular) == (12, -4, False)
        assert i7.j_invariant == field(7).zero

    def test_fermat_cubic_has_nine_torsion(self):
        tors = hesse_torsion_check(field(7), 0)
        assert tors.curve.count() % 9 == 0

    def test_singular_curve(self):
        with pytest.raises(CoverError):
            curve(7, 0, 0)


class TestGroupLaw:
    def test_orders(self):
        E = curve(7, 0, 1)
        P = parse_point("2:3", E)
        n = point_order(P, 12)
        assert scalar_mul(P, n).is_zero() and n == 6
        assert scalar_mul(P, 2) == P + P
        assert point_order(parse_point("3:0", E)) == 2
        assert point_order(E.origin) == 1
        assert scalar_mul(E.origin, 5).is_zero()

    def test_lagrange_over_f5(self):
        E = curve(5, 0, 1)
        assert all(6 % point_order(P, 6) == 0 for P in E.points())

    def test_point_off_curve(self):
        with pytest.raises(CoverError):
            parse_point("1:1", curve(7, 0, 1))


class TestVelu:
    def test_two_isogeny(self):
        E = curve(7, 0, 1)
        K = subgroup_generated([parse_point("3:0", E)], E)
        chain = velu_quotient(E, K)
        E2 = chain.steps[-1].codomain
        assert chain.total_degree == 2
        assert E2.count() == E.count() == 12
        F49 = field(7, 2)
        assert E2.base_change(F49).count() == E.base_change(F49).count() == 48
        assert all(chain(P).is_zero() for P in K)

    def test_homomorphism(self):
        E = curve(7, 0, 1)
        chain = velu_quotient(E, subgroup_generated([parse_point("3:0", E)], E))
        pts = list(E.points())
        assert all(chain(P + Q) == chain(P) + chain(Q) for P in pts for Q in pts)

    def test_trivial_kernel(self):
        E = curve(7, 0, 1)
        chain = velu_quotient(E, [E.origin])
        assert chain.total_degree == 1 and chain.steps == []

    def test_full_three_torsion(self):
        # nine rational 3-torsion points: the base points of the Hesse pencil
        tors = hesse_torsion_check(field(13), 2)
        chain = velu_quotient(tors.curve, tors.T)
        assert chain.total_degree == 9
        assert all(chain(P).is_zero() for P in tors.T)
        # the quotient by E[3] is E again
        assert chain.steps[-1].codomain.j_invariant() == tors.curve.j_invariant()

    def test_not_a_subgroup(self):
        E = curve(7, 0, 1)
        with pytest.raises(CoverError) as e:
            velu_quotient(E, [parse_point("2:3", E)])
        assert e.value.code == "NOT_A_SUBGROUP"

    def test_chain_rebuild_rejects_tampering(self):
        E = curve(7, 0, 1)
        chain = velu_quotient(E, subgroup_generated([parse_point("3:0", E)], E))
        rec = chain.describe()
        assert chain_from_description(E, rec).steps[-1].codomain.describe() == rec[-1]["codomain"]
        rec[-1]["codomain"] = "weierstrass:1,1"
        with pytest.raises(CoverError):
            chain_from_description(E, rec)


class TestSelfCover:
    def test_origin(self):
        E = curve(5, 0, 1)
        sc = etale_self_cover(E, [E.origin])
        assert sc.m == 1 and sc.chain.steps == []

    def test_order_six(self):
        E = curve(5, 0, 1)
        P = next(P for P in E.points() if point_order(P, 6) == 6)
        sc = etale_self_cover(E, [P])
        assert (sc.m, sc.degree) == (6, 6)
        assert sc.chain(P).is_zero()
        assert sc.chain.steps[-1].codomain.describe() == E.describe()

    @pytest.mark.parametrize("k,expected_s", [(2, 2), (3, 3)])
    def test_p_cycle(self, k, expected_s):
        F = field(5, k)
        E = parse_curve("weierstrass:[4,2],[1,1]" if k == 2 else "weierstrass:[4,1,0],1", F)
        P = next(P for P in E.points() if point_order(P, E.count()) == 5)
        sc = etale_self_cover(E, [P])
        assert sc.strategy == "p-cycle"
        assert sc.j_cycle_length == expected_s
        assert sc.m == 5**expected_s
        assert sc.chain(P).is_zero()
        assert sc.chain.steps[-1].codomain.j_invariant() == E.j_invariant()

    def test_m_multiple_of_orders(self):
        E = curve(7, 0, 1)
        S = list(E.points())[:5]
        sc = etale_self_cover(E, S)
        assert all(sc.chain(P).is_zero() for P in S)
        assert all(sc.m % o == 0 for o in sc.orders)


def test_gf_rejects_composite_modulus():
    with pytest.raises(CoverError):
        GF(5, 2, [1, 0, 4])  # x^2 - 1 splits
