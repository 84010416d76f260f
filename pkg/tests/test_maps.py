import pytest

from covercalc.errors import CoverError
from covercalc.gf import field, poly_mul, poly_scale, poly_sub
from covercalc.maps import (
    LattesData,
    RationalMapData,
    lattes_descriptor,
    parse_superelliptic,
    rational_map_profile,
    superelliptic_descriptor,
)
from covercalc.ramification import PointRef, max_ram_index, riemann_hurwitz_genus


def profiles(d):
    return {q.text: list(prof.parts) for q, prof in d.branch}


class TestSuperelliptic:
    def test_c0(self):
        d = superelliptic_descriptor(parse_superelliptic("6; [0,-1,1]"), "C0")
        assert profiles(d) == {"0": [6], "1": [6], "inf": [3, 3]}
        assert d.source.genus == 2

    def test_e0(self):
        d = superelliptic_descriptor(parse_superelliptic("3; [0,-1,1]"), "E0")
        assert profiles(d) == {"0": [3], "1": [3], "inf": [3]}
        assert d.source.genus == 1

    def test_squaring(self):
        d = superelliptic_descriptor(parse_superelliptic("2; [0,1]"))
        assert profiles(d) == {"0": [2], "inf": [2]} and d.source.genus == 0

    def test_over_a_finite_field(self):
        d = superelliptic_descriptor(parse_superelliptic("6; [0,-1,1]", field(7)))
        assert d.source.genus == 2

    def test_repeated_root(self):
        # w^2 = z^2 (z - 1): gcd(2, 2) = 2 unramified points over 0
        d = superelliptic_descriptor(parse_superelliptic("2; [0,0,-1,1]"))
        assert profiles(d) == {"1": [2], "inf": [2]}

    def test_wild(self):
        with pytest.raises(CoverError) as e:
            superelliptic_descriptor(parse_superelliptic("5; [0,1]", field(5)))
        assert e.value.code == "WILD"

    @pytest.mark.parametrize("text", ["6 [0,1]", "x; [0,1]", "2; 0,1", "2; [a]"])
    def test_parse_errors(self, text):
        with pytest.raises(CoverError) as e:
            parse_superelliptic(text)
        assert e.value.code == "PARSE_ERROR"


class TestRationalMaps:
    def test_square(self):
        d = rational_map_profile(RationalMapData((0, 0, 1), (1,)))
        assert profiles(d) == {"0": [2], "inf": [2]}

    def test_chebyshev(self):
        d = rational_map_profile(RationalMapData((0, -3, 0, 1), (1,)))
        assert profiles(d) == {"-2": [2, 1], "2": [2, 1], "inf": [3]}

    def test_chebyshev_mod_7(self):
        F = field(7)
        d = rational_map_profile(RationalMapData((0, -3, 0, 1), (1,), F))
        assert profiles(d) == {"2": [2, 1], "5": [2, 1], "inf": [3]}

    def test_frobenius_is_inseparable(self):
        F = field(5)
        with pytest.raises(CoverError) as e:
            rational_map_profile(RationalMapData((0, 0, 0, 0, 0, 1), (1,), F))
        assert e.value.code == "INSEPARABLE"


def lattes_x3(p, a, b):
    """``x(3P)`` on ``y^2 = x^3 + a x + b`` as a rational function of ``x``,
    from the division polynomials ``psi_3`` and ``psi_2 psi_4 / (4 y^2)``."""
    F = field(p)
    A, B = F(a), F(b)
    f = [B, A, F.zero, F.one]
    psi3 = [-A * A, 12 * B, 6 * A, F.zero, F(3)]
    q4 = [-2 * A**3 - 16 * B * B, -8 * A * B, -10 * A * A, 40 * B, 10 * A, F.zero, F(2)]
    den = poly_mul(psi3, psi3)
    num = poly_sub(poly_mul([F.zero, F.one], den), poly_scale(poly_mul(f, q4), F(4)))
    return RationalMapData(tuple(num), tuple(den), F)


def lattes_y2(p):
    """``y(2P)`` on ``y^2 = x^3 + 1``, a function of ``y`` because ``x^3 = y^2 - 1``."""
    F = field(p)
    return RationalMapData((F(-27), F.zero, F(18), F.zero, F.one), (F.zero,) * 3 + (F(8),), F)


class TestLattes:
    @pytest.mark.parametrize("n", [3, 5, 7, 9])
    def test_flavor_two_closes(self, n):
        d = lattes_descriptor(LattesData(n))
        assert d.degree == n * n
        assert riemann_hurwitz_genus(d) == 0 and max_ram_index(d) == 2
        assert all(prof.parts.count(1) == 1 for _, prof in d.branch)

    @pytest.mark.parametrize("n", [2, 4, 5])
    def test_flavor_three_closes(self, n):
        d = lattes_descriptor(LattesData(n, 3))
        assert riemann_hurwitz_genus(d) == 0 and max_ram_index(d) == 3

    @pytest.mark.parametrize("p,a,b", [(7, -1, 0), (13, 1, 0), (11, 1, 1)])
    def test_flavor_two_against_division_polynomials(self, p, a, b):
        explicit = rational_map_profile(lattes_x3(p, a, b))
        model = lattes_descriptor(LattesData(3))
        assert sorted(list(pr.parts) for _, pr in explicit.branch) == sorted(list(pr.parts) for _, pr in model.branch)
        assert PointRef("inf") in explicit.branch_points

    @pytest.mark.parametrize("p", [5, 7, 13])
    def test_flavor_three_against_doubling(self, p):
        explicit = rational_map_profile(lattes_y2(p))
        model = lattes_descriptor(LattesData(2, 3))
        assert sorted(list(pr.parts) for _, pr in explicit.branch) == sorted(list(pr.parts) for _, pr in model.branch)

    @pytest.mark.parametrize("n,flavor", [(1, 2), (4, 2), (3, 3), (6, 3)])
    def test_parity(self, n, flavor):
        with pytest.raises(CoverError) as e:
            lattes_descriptor(LattesData(n, flavor))
        assert e.value.code == "PARITY"
