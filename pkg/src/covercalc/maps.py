"""Covers of the line read off from explicit equations.

Three sources of descriptors live here: superelliptic curves ``w^m = f(z)``,
rational functions ``N/D`` of the line, and the profile-level description of
the maps induced on ``E/Aut`` by multiplication by ``n`` (Lattès maps).

Polynomials are coefficient lists, lowest degree first.  Coefficients are
:class:`~fractions.Fraction` in characteristic 0 and field elements otherwise.
The valuation of ``f`` at infinity is ``-deg f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

from covercalc.errors import CoverError
from covercalc.gf import (
    GF,
    field,
    poly_deriv,
    poly_divmod,
    poly_eval,
    poly_gcd,
    poly_mul,
    poly_scale,
    poly_sub,
    poly_trim,
    root_multiplicity,
    scan_guard,
)
from covercalc.ramification import (
    P1,
    CoverDescriptor,
    CurveNode,
    FieldSpec,
    PointRef,
    RamProfile,
    riemann_hurwitz_genus,
)


# -- coefficients and roots -------------------------------------------------

def coerce_poly(coeffs: Sequence, F: GF | None) -> list:
    if F is None:
        return poly_trim([Fraction(c) for c in coeffs])
    return poly_trim([c if hasattr(c, "field") and c.field is F else F(c) for c in coeffs])


def format_coeff(c, F: GF | None) -> str:
    if F is None:
        return str(c)
    return F.label(c)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    return [d for d in range(1, n + 1) if n % d == 0]


def rational_roots(f: list) -> list:
    """Roots in Q of a polynomial with rational coefficients."""
    f = poly_trim(f)
    scale = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in f), 1)
    ints = [int(c * scale) for c in f]
    out = []
    while ints and ints[0] == 0:
        ints = ints[1:]
        if Fraction(0) not in out:
            out.append(Fraction(0))
    if len(ints) <= 1:
        return out
    cands = {Fraction(s * a, b) for a in _divisors(ints[0]) for b in _divisors(ints[-1]) for s in (1, -1)}
    g = [Fraction(c) for c in ints]
    out += sorted(r for r in cands if poly_eval(g, r) == 0)
    return out


def roots_over(f: list, F: GF | None) -> list:
    if F is None:
        return rational_roots(f)
    return [x for x in F.elements() if not poly_eval(f, x)]


def squarefree_parts(f: list) -> list[tuple[int, list]]:
    """Yun's decomposition ``f = c * prod g_k^k``, returned as ``[(k, g_k)]`` with nonconstant ``g_k``.

    Exact when every multiplicity is below the characteristic.
    """
    f = poly_trim(f)
    if len(f) <= 1:
        return []
    d = poly_deriv(f)
    if not d:
        raise CoverError("INSEPARABLE", "polynomial is a p-th power")
    a = poly_gcd(f, d)
    b = poly_divmod(f, a)[0]
    c = poly_divmod(d, a)[0]
    dd = poly_sub(c, poly_deriv(b))
    out, k = [], 1
    while len(b) > 1:
        g = poly_gcd(b, dd)
        if len(g) > 1:
            out.append((k, g))
        b = poly_divmod(b, g)[0]
        c = poly_divmod(dd, g)[0]
        dd = poly_sub(c, poly_deriv(b))
        k += 1
    return out


@dataclass(frozen=True)
class RootData:
    point: PointRef
    multiplicity: int


def factor_roots(f: list, F: GF | None, prefix: str = "r") -> list[RootData]:
    """Roots of ``f`` with multiplicities.

    Roots in the coefficient field are named by coordinate; the others get
    labels ``@<prefix><k>.<i>`` (``k`` the multiplicity) since only their
    multiplicity enters a ramification profile.
    """
    f = poly_trim(f)
    out = []
    rest = f
    for r in roots_over(f, F):
        e = root_multiplicity(rest, r)
        if e == 0:
            continue
        for _ in range(e):
            rest = poly_divmod(rest, [-r, r * 0 + 1])[0]
        out.append(RootData(PointRef(format_coeff(r, F)), e))
    found = 0
    for k, g in squarefree_parts(rest):
        for i in range(len(g) - 1):
            out.append(RootData(PointRef.label(f"{prefix}{k}.{i}"), k))
        found += k * (len(g) - 1)
    if found != len(rest) - 1:
        raise CoverError("UNFACTORED", "multiplicities reach the characteristic")
    return out


# -- superelliptic curves ---------------------------------------------------

@dataclass(frozen=True)
class SuperellipticData:
    """``w^m = f(z)``.  Give either coefficients ``f`` (over ``F`` or Q) or symbolic ``roots``."""

    m: int
    f: tuple = ()
    F: GF | None = None
    roots: tuple[tuple[str, int], ...] = ()
    characteristic: int = 0

    @property
    def field_spec(self) -> FieldSpec:
        if self.F is not None:
            return self.F.spec
        return FieldSpec(self.characteristic)


def parse_superelliptic(text: str, F: GF | None = None) -> SuperellipticData:
    """``"m; [c0,c1,...]"``."""
    head, sep, tail = text.partition(";")
    try:
        m = int(head)
        body = tail.strip()
        if not sep or not (body.startswith("[") and body.endswith("]")):
            raise ValueError(text)
        items = [t.strip() for t in body[1:-1].split(",") if t.strip()]
        coeffs = [Fraction(t) for t in items] if F is None else [F(int(t)) for t in items]
    except ValueError as exc:
        raise CoverError("PARSE_ERROR", f"expected 'm; [c0,c1,...]', got {text!r}") from exc
    return SuperellipticData(m, tuple(coeffs), F)


def superelliptic_descriptor(s: SuperellipticData, source_id: str | None = None,
                             target: CurveNode | None = None) -> CoverDescriptor:
    m = s.m
    spec = s.field_spec
    p = spec.characteristic
    if m < 1:
        raise CoverError("BAD_DEGREE", f"m = {m}")
    if p and m % p == 0:
        raise CoverError("WILD", f"characteristic {p} divides m = {m}")
    if s.roots:
        roots = [RootData(PointRef(q), int(a)) for q, a in s.roots]
    else:
        f = coerce_poly(s.f, s.F)
        if not f:
            raise CoverError("ZERO_POLYNOMIAL", "f must be nonzero")
        roots = factor_roots(f, s.F)
    deg = sum(r.multiplicity for r in roots)
    entries = []
    for r in roots:
        g = math.gcd(m, r.multiplicity)
        entries.append((r.point, RamProfile((m // g,) * g)))
    inf = PointRef("inf")
    if any(r.point == inf for r in roots):
        raise CoverError("BAD_ROOT", "infinity cannot be a root of f")
    g_inf = math.gcd(m, deg)
    entries.append((inf, RamProfile((m // g_inf,) * g_inf)))

    target = target or P1(spec)
    src = CurveNode(source_id or f"C[w^{m}=f]", None, spec, "superelliptic curve")
    d = CoverDescriptor.build(src, target, m, entries)
    # w^m - f is geometrically irreducible iff the valuations have no common factor with m
    if math.gcd(m, *(r.multiplicity for r in roots)) == 1 and target.genus is not None:
        genus = riemann_hurwitz_genus(d)
        d = CoverDescriptor(CurveNode(src.id, genus, spec, src.description), target, d.degree, d.branch)
    return d


# -- rational functions of the line -----------------------------------------

@dataclass(frozen=True)
class RationalMapData:
    numerator: tuple
    denominator: tuple
    F: GF | None = None


def _degree(f: list) -> int:
    return len(poly_trim(f)) - 1


def rational_map_profile(r: RationalMapData, source_id: str = "P1_src",
                         target_id: str = "P1", max_extension: int = 6) -> CoverDescriptor:
    """Exact branch data of ``z -> N(z)/D(z)``.

    Critical points are the zeros of ``N'D - ND'`` together with infinity.
    Their images are collected, and the profile over each image is the list
    of root multiplicities of ``N - cD`` (of ``D`` over infinity), padded by
    the index at infinity.  Over a finite field the search moves to larger
    extensions until the ramification divisor has its full degree ``2d - 2``.
    """
    F = base = r.F
    N0 = coerce_poly(r.numerator, base)
    D0 = coerce_poly(r.denominator, base)
    N, D = N0, D0
    level = 1
    while True:
        desc, total = _profile_at_level(N, D, F, source_id, target_id)
        if total == 2 * desc.degree - 2 or F is None:
            break
        level += 1
        if level > max_extension or base.p ** (base.k * level) > scan_guard():
            raise CoverError("FIELD_TOO_LARGE", "critical points not found within the extension guard")
        F = field(base.p, base.k * level)
        emb = base.embedding(F)
        N, D = [emb(c) for c in N0], [emb(c) for c in D0]
    if total != 2 * desc.degree - 2:
        if F is None:
            raise CoverError("UNFACTORED", "critical points are not all rational")
        raise CoverError("WILD", f"ramification divisor has degree {total}, not {2 * desc.degree - 2}")
    return desc


def _profile_at_level(N: list, D: list, F: GF | None, source_id: str, target_id: str):
    if not N or not D:
        raise CoverError("DEGENERATE_MAP", "numerator and denominator must be nonzero")
    if len(poly_gcd(N, D)) > 1:
        raise CoverError("NOT_COPRIME", "numerator and denominator share a root")
    d = max(_degree(N), _degree(D))
    if d < 1:
        raise CoverError("DEGENERATE_MAP", "constant map")
    W = poly_sub(poly_mul(poly_deriv(N), D), poly_mul(N, poly_deriv(D)))
    if not W:
        raise CoverError("INSEPARABLE", "the Wronskian N'D - ND' vanishes identically")
    inf = "inf"

    def image(x):
        den = poly_eval(D, x)
        return inf if not den else poly_eval(N, x) / den

    def image_inf():
        dn, dd = _degree(N), _degree(D)
        if dn > dd:
            return inf
        if dn < dd:
            return N[0] * 0
        return N[-1] / D[-1]

    values = {}
    for x in roots_over(W, F):
        c = image(x)
        values[format_coeff(c, F) if c != inf else inf] = c
    c = image_inf()
    values[format_coeff(c, F) if c != inf else inf] = c

    entries = []
    for name, c in values.items():
        G = D if c == inf else poly_sub(N, poly_scale(D, c))
        parts = []
        rest = G
        for x in roots_over(G, F):
            e = root_multiplicity(rest, x)
            parts.append(e)
        e_inf = d - _degree(G)
        if e_inf:
            parts.append(e_inf)
        parts += [1] * (d - sum(parts))
        entries.append((PointRef(name), RamProfile(tuple(parts))))
    spec = F.spec if F is not None else FieldSpec(0)
    desc = CoverDescriptor.build(CurveNode(source_id, 0, spec), P1(spec, target_id), d, entries)
    total = sum(e - 1 for _, prof in desc.branch for e in prof)
    return desc, total


# -- Lattes profiles ----------------------------------------------------------

@dataclass(frozen=True)
class LattesData:
    n: int
    flavor: int = 2
    labels: tuple[str, ...] | None = None

    def branch_labels(self) -> tuple[str, ...]:
        if self.labels is not None:
            return self.labels
        return ("0", "1", "inf", "@lambda") if self.flavor == 2 else ("0", "1", "inf")


def lattes_descriptor(L: LattesData, source_id: str = "P1_2", target_id: str = "P1_1",
                      spec: FieldSpec = FieldSpec()) -> CoverDescriptor:
    """Profile of the map ``E/G -> E/G`` induced by multiplication by ``n``, ``|G| = 2`` or 3.

    Over each branch point of ``E -> E/G`` the fiber of multiplication by
    ``n`` consists of ``n^2`` points; the one fixed by ``G`` is unramified and
    the rest fall into ``G``-orbits of full size.
    """
    n, fl = L.n, L.flavor
    if fl not in (2, 3):
        raise CoverError("BAD_FLAVOR", f"flavor {fl} is neither 2 nor 3")
    if n < 2:
        raise CoverError("PARITY", f"n = {n} must be at least 2")
    if math.gcd(n, fl) != 1:
        raise CoverError("PARITY", f"n = {n} is not prime to {fl}")
    labels = L.branch_labels()
    if len(labels) != (4 if fl == 2 else 3):
        raise CoverError("BAD_LABELS", f"flavor {fl} needs {4 if fl == 2 else 3} branch labels")
    deg = n * n
    prof = RamProfile((fl,) * ((deg - 1) // fl) + (1,))
    src = CurveNode(source_id, 0, spec, "projective line")
    d = CoverDescriptor.build(src, P1(spec, target_id), deg, [(q, prof) for q in labels])
    if riemann_hurwitz_genus(d) != 0:
        raise CoverError("RH_INCONSISTENT", "Lattes profile does not close up on a genus-0 source")
    return d
