"""Constructions replayed as towers of covers.

Each ``run_*`` function assembles a :class:`~covercalc.towers.Tower` from the
cover calculus (fiber products, compositions, pushforwards) and attaches the
claims the construction is meant to establish.  Claims get their status from
the executor's own computation; :func:`~covercalc.towers.verify_tower`
rechecks them independently from the stored provenance.

Fixed curves shared by several constructions:

* ``E0 -> P1``: ``w^3 = z(z-1)``, degree 3, totally ramified over 0, 1, inf.
  Its points over 0 and 1 are ``0#0`` and ``1#0``; ``0#0`` is the origin.
* ``C0 -> E0``: the double cover branched at ``0#0`` and ``1#0``, so that
  ``C0 -> E0 -> P1`` is ``w^6 = z(z-1)``.

In concrete mode ``E0`` is the model ``y^2 = x^3 + 1/4`` (``x = w``,
``y = z - 1/2``) over an explicit field, branch points get coordinates, and
the consolidation step is an explicit étale self-cover.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from covercalc.algebra import FiberProductResult, compose_covers, fiber_product, pushforward_branch_locus
from covercalc.ec import ECPoint, WeierstrassCurve, parse_curve, parse_field, parse_point
from covercalc.errors import CoverError
from covercalc.gf import GF, field
from covercalc.isogeny import Translation, chain_from_description, etale_self_cover
from covercalc.maps import LattesData, SuperellipticData, lattes_descriptor, superelliptic_descriptor
from covercalc.ramification import (
    INF,
    ONE,
    ZERO,
    CoverDescriptor,
    CurveNode,
    FieldSpec,
    PointRef,
    RamProfile,
    classify_cover,
    is_etale,
    is_prime,
    max_ram_index,
    riemann_hurwitz_genus,
)
from covercalc.towers import Tower, compose_index_bound, double_cover, same_descriptor

O_E0 = PointRef("0#0")
ONE_E0 = PointRef("1#0")


def _status(ok: bool) -> str:
    return "verified" if ok else "failed"


def check_characteristic(p: int) -> FieldSpec:
    if p != 0 and not is_prime(p):
        raise CoverError("BAD_FIELD", f"{p} is not prime")
    if 0 < p < 5:
        raise CoverError("WILD_RAMIFICATION", f"p = {p}: the indices 2, 3 and 6 of the base covers are wild")
    return FieldSpec(p)


class Builder:
    """Tower under construction, with one helper per provenance kind."""

    def __init__(self, construction: str, p: int, **params):
        self.spec = check_characteristic(p)
        self.t = Tower(construction, {"p": p, **params})

    # nodes ---------------------------------------------------------------
    def node(self, nid: str, genus: int | None = None, description: str = "") -> CurveNode:
        old = self.t.nodes.get(nid)
        if old is not None and genus is None:
            return old
        n = CurveNode(nid, genus, self.spec, description or (old.description if old else ""))
        self.t.nodes[nid] = n
        return n

    def line(self, nid: str = "P1") -> CurveNode:
        return self.node(nid, 0, "projective line")

    def _bind(self, d: CoverDescriptor) -> CoverDescriptor:
        return CoverDescriptor(self.t.nodes[d.source.id], self.t.nodes[d.target.id], d.degree, d.branch)

    def _with_genus(self, d: CoverDescriptor) -> CoverDescriptor:
        """Fill in the source genus by Riemann-Hurwitz if it is unknown."""
        if d.source.genus is None and d.target.genus is not None:
            self.node(d.source.id, riemann_hurwitz_genus(d), d.source.description)
        return self._bind(d)

    # edges ---------------------------------------------------------------
    def edge(self, eid: str, d: CoverDescriptor, provenance: dict) -> CoverDescriptor:
        for n in (d.source, d.target):
            self.node(n.id, n.genus, n.description)
        d = self._bind(d)
        self.t.add_edge(eid, d, provenance)
        return d

    def input(self, eid: str, d: CoverDescriptor) -> CoverDescriptor:
        return self.edge(eid, self._with_genus_raw(d), {"op": "input"})

    def _with_genus_raw(self, d: CoverDescriptor) -> CoverDescriptor:
        """Rebase ``d`` onto the tower's field and fill in the source genus."""
        old = self.t.nodes.get(d.target.id, d.target)
        src = CurveNode(d.source.id, d.source.genus, self.spec, d.source.description)
        tgt = CurveNode(old.id, old.genus, self.spec, old.description)
        if src.genus is None and tgt.genus is not None:
            g = riemann_hurwitz_genus(CoverDescriptor(src, tgt, d.degree, d.branch))
            src = CurveNode(src.id, g, self.spec, src.description)
        return CoverDescriptor(src, tgt, d.degree, d.branch)

    def double(self, eid: str, source: str, target: str, points) -> CoverDescriptor:
        pts = [str(q) for q in points]
        d = double_cover(self.node(source), self.t.nodes[target], pts)
        d = self._with_genus(d)
        return self.edge(eid, d, {"op": "double_cover", "points": pts})

    def superelliptic(self, eid: str, source: str, target: str, m: int, roots) -> CoverDescriptor:
        data = SuperellipticData(m, roots=tuple((str(q), int(a)) for q, a in roots),
                                 characteristic=self.spec.characteristic)
        d = superelliptic_descriptor(data, source, self.t.nodes[target])
        return self.edge(eid, d, {"op": "superelliptic", "m": m, "roots": [[str(q), int(a)] for q, a in roots]})

    def lattes(self, eid: str, source: str, target: str, n: int, flavor: int, labels) -> CoverDescriptor:
        d = lattes_descriptor(LattesData(n, flavor, tuple(labels)), source, target, self.spec)
        return self.edge(eid, d, {"op": "lattes", "n": n, "flavor": flavor, "labels": list(labels)})

    def product(self, left: str, right: str, product_id: str, left_eid: str, right_eid: str,
                pairing: dict | None = None) -> FiberProductResult:
        L, R = self.t.descriptor(left), self.t.descriptor(right)
        pr = {PointRef(k): PointRef(v) for k, v in (pairing or {}).items()}
        res = fiber_product(L, R, pr, product_id=product_id)
        self.node(product_id, res.product.genus, "fiber product")
        base = {"op": "fiber_product", "left": left, "right": right,
                "pairing": {str(k): str(v) for k, v in pr.items()}}
        self.edge(left_eid, res.left_projection, {**base, "side": "left"})
        self.edge(right_eid, res.right_projection, {**base, "side": "right"})
        return res

    def compose(self, eid: str, inner: str, outer: str, alignment: dict | None = None) -> CoverDescriptor:
        align = {str(k): [str(b), int(j)] for k, (b, j) in (alignment or {}).items()}
        d = compose_covers(self.t.descriptor(inner), self.t.descriptor(outer),
                           {PointRef(k): (PointRef(b), j) for k, (b, j) in align.items()})
        return self.edge(eid, d, {"op": "compose", "inner": inner, "outer": outer, "alignment": align})

    def push(self, eid: str, of: str, relabel: dict, etale_degree: int | None = None, **extra) -> CoverDescriptor:
        rl = {str(k): str(v) for k, v in relabel.items()}
        d = pushforward_branch_locus(self.t.descriptor(of), rl, etale_degree)
        m = d.degree // self.t.descriptor(of).degree
        return self.edge(eid, d, {"op": "pushforward", "of": of, "relabel": rl, "etale_degree": m, **extra})

    def translate(self, eid: str, of: str, q, target) -> CoverDescriptor:
        """Pushforward along the translation taking ``q`` to ``target``; the
        other branch points move to fresh ``@shift(...)`` labels."""
        q, target = PointRef(str(q)), PointRef(str(target))
        relabel = {}
        for b in self.t.descriptor(of).branch_points:
            relabel[b] = target if b == q else PointRef.label(f"shift({b.text})")
        return self.push(eid, of, relabel, 1, translation={"from": q.text, "to": target.text})

    # claims --------------------------------------------------------------
    def claim(self, kind: str, ok_or_status, note: str = "", **refs):
        status = ok_or_status if isinstance(ok_or_status, str) else _status(ok_or_status)
        return self.t.claim(kind, status, note, **refs)

    def claim_etale(self, eid: str):
        return self.claim("etale", is_etale(self.t.descriptor(eid)), edge=eid)

    def claim_even(self, eid: str, point):
        parts = self.t.descriptor(eid).profile_at(point).parts
        return self.claim("even_indices_over", all(e % 2 == 0 for e in parts), edge=eid, point=str(point))

    def claim_irreducible(self, eid: str, res: FiberProductResult):
        return self.claim("irreducible", res.irreducible == "witnessed", edge=eid)

    def claim_genus(self, nid: str, edges: list[str]):
        node = self.t.nodes[nid]
        vals = {riemann_hurwitz_genus(self.t.descriptor(e)) for e in edges}
        return self.claim("genus", node.genus is not None and vals == {node.genus}, node=nid, edges=list(edges))

    def claim_surjects(self, path: list[str]):
        ds = [self.t.descriptor(e) for e in path]
        ok = all(x.target.id == y.source.id for x, y in zip(ds, ds[1:]))
        return self.claim("surjects", ok, path=list(path))

    def claim_index_bound(self, path: list[str], bound: int):
        b = compose_index_bound([max_ram_index(self.t.descriptor(e)) for e in path])
        return self.claim("index_bound", b <= bound, path=list(path), bound=int(bound))

    def note(self, text: str):
        self.t.notes.append(text)


# -- base curves ------------------------------------------------------------------

def add_base_curves(b: Builder, with_c0: bool = True, line: str = "P1") -> None:
    b.line(line)
    b.node("E0", 1, "w^3 = z(z-1)")
    b.superelliptic("pi0", "E0", line, 3, [(ZERO, 1), (ONE, 1)])
    if with_c0:
        b.node("C0", None, "w^6 = z(z-1)")
        b.double("iota0", "C0", "E0", [O_E0, ONE_E0])


def iota0_consistency(p: int = 0) -> tuple[bool, CoverDescriptor, CoverDescriptor]:
    """``C0 -> E0 -> P1`` agrees with ``w^6 = z(z-1)`` up to the curve names."""
    b = Builder("iota0", p)
    add_base_curves(b)
    comp = compose_covers(b.t.descriptor("iota0"), b.t.descriptor("pi0"))
    direct = superelliptic_descriptor(SuperellipticData(6, roots=(("0", 1), ("1", 1)), characteristic=p),
                                      "C0", b.t.nodes["P1"])
    return same_descriptor(comp, direct) and b.t.nodes["C0"].genus == direct.source.genus, comp, direct


def generic_sigma(degree: int, genus: int, p: int = 0, prefix: str = "b", source: str = "C'") -> CoverDescriptor:
    """A generic cover of the line: ``2g - 2 + 2d`` simple branch points ``@<prefix>1, ...``."""
    if degree < 1 or genus < 0:
        raise CoverError("BAD_INPUT", "degree must be positive and genus nonnegative")
    spec = FieldSpec(p)
    count = 2 * genus - 2 + 2 * degree if degree > 1 else 0
    if degree == 1 and genus != 0:
        raise CoverError("BAD_INPUT", "a degree-1 cover of the line has genus 0")
    prof = RamProfile((2,) + (1,) * (degree - 2)) if degree > 1 else None
    entries = [(PointRef.label(f"{prefix}{i}"), prof) for i in range(1, count + 1)]
    return CoverDescriptor.build(CurveNode(source, genus, spec), CurveNode("P1", 0, spec), degree, entries)


# -- concrete E0 --------------------------------------------------------------------

@dataclass
class ConcreteE0:
    F: GF
    E: WeierstrassCurve
    T0: ECPoint
    cubes: dict

    def fiber(self, b) -> list[ECPoint]:
        """Points over ``z = b``, ordered by the vector of their ``x``-coordinate."""
        F = self.F
        half = F(2).inverse()
        y = b - half
        xs = self.cubes.get((b * b - b).code, [])
        pts = [ECPoint(self.E, (x, y, F.one)) for x in xs]
        return sorted(pts, key=lambda P: F.vector(P.x))


def concrete_e0(F: GF) -> ConcreteE0:
    E = WeierstrassCurve(F, 0, F(4).inverse())
    cubes: dict[int, list] = {}
    for x in F.elements():
        cubes.setdefault((x * x * x).code, []).append(x)
    T0 = ECPoint(E, (F.zero, -F(2).inverse(), F.one))
    return ConcreteE0(F, E, T0, cubes)


def choose_coordinates(p: int, count: int, max_k: int = 4, fixed: dict | None = None):
    """Smallest GF(p^k), k <= max_k, with ``count`` values ``b != 0, 1`` whose
    fibers on ``E0`` are fully rational."""
    from covercalc.gf import scan_guard
    for k in range(1, max_k + 1):
        if p**k > scan_guard():
            break
        F = field(p, k)
        model = concrete_e0(F)
        if fixed:
            vals = [F.parse(str(v)) for v in fixed.values()]
            if all(len(model.fiber(v)) == 3 for v in vals):
                return model, vals
            continue
        good = [b for b in F.elements() if b not in (F.zero, F.one) and len(model.fiber(b)) == 3]
        if len(good) >= count:
            return model, good[:count]
    raise CoverError("FIELD_TOO_LARGE", f"no GF({p}^k), k <= {max_k}, carries {count} split fibers")


def verify_self_cover_record(prov: dict) -> tuple[bool, str]:
    """Recheck a concrete consolidation: the recorded points lie in the named
    fibers of ``E0 -> P1``, the rebuilt isogeny chain closes up on ``E0`` and
    sends each point where the relabeling says."""
    rec = prov["self_cover"]
    F = parse_field(rec["field"])
    E = parse_curve(rec["curve"], F)
    if not isinstance(E, WeierstrassCurve) or E.a or E.b != F(4).inverse():
        return False, "curve is not the model y^2 = x^3 + 1/4 of w^3 = z(z-1)"
    model = concrete_e0(F)
    model.E = E
    model.T0 = ECPoint(E, model.T0.coords)

    def fiber_point(slot: PointRef) -> ECPoint:
        base, j = slot.split_slot()
        fib = model.fiber(F.parse(base.text))
        if not 0 <= j < len(fib):
            raise CoverError("MISALIGNED", f"no point {slot} on E0")
        return fib[j]

    chain = chain_from_description(E, rec["chain"])
    if chain.steps and chain.steps[-1].codomain.describe() != E.describe():
        return False, "chain does not return to E0"
    degree = 1
    for st in chain.steps:
        degree *= st.degree
    if degree != int(prov["etale_degree"]):
        return False, f"chain degree {degree} != recorded {prov['etale_degree']}"
    for src, tgt in prov["relabel"].items():
        P = parse_point(rec["slot_points"][src], E)
        if P != fiber_point(PointRef(src)):
            return False, f"{rec['slot_points'][src]} is not the point {src}"
        if chain(P) != fiber_point(PointRef(tgt)):
            return False, f"{src} is not sent to {tgt}"
    return True, ""


# -- Theorem main: the universal tower ---------------------------------------------

def run_universal_tower(p: int, sigma: CoverDescriptor, concrete: bool = False,
                        coordinates: dict | None = None, max_k: int = 4) -> Tower:
    b = Builder("universal_tower", p, concrete=concrete)
    cls = classify_cover(sigma)
    if not cls.generic:
        raise CoverError("NOT_GENERIC", "sigma must be generic")
    hit = set(sigma.branch_points) & {ZERO, ONE, INF}
    if hit:
        raise CoverError("BRANCH_COLLISION", f"branch points {sorted(map(str, hit))} meet {{0, 1, inf}}")
    if sigma.source.id in ("P1", "E0", "C0", "C1", "C2"):
        raise CoverError("BAD_INPUT", f"curve name {sigma.source.id} is reserved")
    add_base_curves(b)

    model = None
    if concrete:
        labels = list(sigma.branch_points)
        fixed = {str(q): coordinates[str(q)] for q in labels} if coordinates else None
        model, vals = choose_coordinates(p, len(labels), max_k, fixed)
        names = {q: PointRef(model.F.label(v)) for q, v in zip(labels, vals)}
        sigma = CoverDescriptor.build(sigma.source, sigma.target, sigma.degree,
                                      [(names[q], prof) for q, prof in sigma.branch])
        b.t.params["field"] = model.F.describe()
        b.t.params["coordinates"] = {q.text: names[q].text for q in labels}

    b.input("sigma", CoverDescriptor(sigma.source, b.t.nodes["P1"], sigma.degree, sigma.branch))
    res1 = b.product("sigma", "pi0", "C1", "tau1", "rho1")
    b.claim_irreducible("rho1", res1)
    b.claim_genus("C1", ["tau1", "rho1"])

    rho1 = b.t.descriptor("rho1")
    relabel = {q: O_E0 for q in rho1.branch_points}
    if concrete:
        F, E, T0 = model.F, model.E, model.T0
        slot_points = {}
        for q in rho1.branch_points:
            base, j = q.split_slot()
            slot_points[q.text] = model.fiber(F.parse(base.text))[j]
        shifted = [P - T0 for P in slot_points.values()]
        sc = etale_self_cover(E, shifted)
        steps = [Translation(E, -T0)] + list(sc.chain.steps) + [Translation(E, T0)]
        from covercalc.isogeny import IsogenyChain
        full = IsogenyChain(steps)
        killed = all(full(P) == T0 for P in slot_points.values())
        lcm_orders = math.lcm(*sc.orders) if sc.orders else 1
        record = {"field": F.describe(), "curve": E.describe(), "base_point": T0.text,
                  "slot_points": {k: P.text for k, P in slot_points.items()},
                  "chain": full.describe(), "strategy": sc.strategy, "m": sc.m, "orders": sc.orders}
        b.push("push", "rho1", relabel, full.total_degree, self_cover=record)
        b.claim("relabel", killed, edge="push")
        b.t.params["self_cover"] = {"m": sc.m, "degree": full.total_degree, "strategy": sc.strategy,
                                    "lcm_of_orders": lcm_orders, "annihilated": killed,
                                    "m_multiple_of_lcm": sc.m % lcm_orders == 0}
    else:
        b.push("push", "rho1", relabel)
        b.claim("relabel", "asserted", "torsion points go to the origin under an etale self-map", edge="push")
    b.claim_index_bound(["push"], 2)

    res2 = b.product("iota0", "push", "C2", "tau2", "rho2")
    b.claim_etale("tau2")
    b.claim_irreducible("rho2", res2)
    b.claim_surjects(["rho2", "tau1"])
    b.note("C2 -> C0 is etale and C2 dominates the input curve through C1")
    return b.t


# -- Lemma ee and Corollary ce --------------------------------------------------------

def _lemma_ee_into(b: Builder, sigma_eid: str, e_branch, origin: str = "@O") -> None:
    sigma = b.t.descriptor(sigma_eid)
    if max_ram_index(sigma) > 2:
        raise CoverError("NOT_SIMPLE", "sigma has a local index above 2")
    e_branch = [PointRef(str(q)) for q in e_branch]
    if set(e_branch) & set(sigma.branch_points):
        raise CoverError("OVERLAPPING_BRANCH", "the double cover E -> P1 must branch away from sigma")
    if "pi" not in b.t.edges:
        b.node("E", 1, "elliptic curve")
        b.double("pi", "E", "P1", e_branch)
    res = b.product(sigma_eid, "pi", "C1", "tau1", "rho1")
    b.claim_irreducible("rho1", res)
    b.claim_index_bound(["rho1"], 2)
    b.claim_genus("C1", ["tau1", "rho1"])
    relabel = {q: PointRef(origin) for q in b.t.descriptor("rho1").branch_points}
    b.push("push", "rho1", relabel)
    b.claim("relabel", "asserted", "torsion points go to the origin under an etale self-map", edge="push")
    b.t.params["origin"] = origin


def run_lemma_ee(sigma: CoverDescriptor, p: int = 0, e_branch=None) -> Tower:
    b = Builder("lemma_ee", p)
    b.line("P1")
    if e_branch is None:
        e_branch = [f"@e{i}" for i in range(1, 5)]
    b.input("sigma", CoverDescriptor(sigma.source, b.t.nodes["P1"], sigma.degree, sigma.branch))
    _lemma_ee_into(b, "sigma", e_branch)
    return b.t


def _corollary_ce_into(b: Builder, iota_eid: str, q) -> None:
    q = PointRef(str(q))
    parts = b.t.descriptor(iota_eid).profile_at(q).parts
    if any(e % 2 for e in parts):
        raise CoverError("ODD_INDEX_AT_Q", f"profile {list(parts)} over {q} has an odd index")
    origin = b.t.params.get("origin", "@O")
    b.translate("push_q", "push", origin, q)
    b.claim("relabel", True, "translation on E", edge="push_q")
    b.product(iota_eid, "push_q", "Cu", "tau_u", "rho_u")
    b.claim_etale("tau_u")
    b.claim_surjects(["rho_u", "tau1"])
    b.note(f"{b.t.descriptor(iota_eid).source.id} is universal: its etale cover Cu dominates "
           f"{b.t.descriptor('tau1').target.id}")


def run_corollary_ce(iota: CoverDescriptor, q, lemma_output: Tower) -> Tower:
    lemma = lemma_output
    b = Builder("corollary_ce", lemma.params.get("p", 0), origin=lemma.params.get("origin", "@O"))
    b.t.nodes.update(lemma.nodes)
    b.t.edges.update(lemma.edges)
    b.t.assertions.extend(lemma.assertions)
    b.input("iota", CoverDescriptor(iota.source, b.t.nodes.get(iota.target.id, iota.target),
                                    iota.degree, iota.branch))
    _corollary_ce_into(b, "iota", q)
    return b.t


def run_hyperelliptic_universal(g: int, p: int, target: CoverDescriptor | None = None) -> Tower:
    if g < 2:
        raise CoverError("GENUS_TOO_SMALL", f"genus {g} < 2")
    b = Builder("hyperelliptic_universal", p, genus=g)
    b.line("P1")
    bpts = [f"@b{i}" for i in range(1, 2 * g + 3)]
    b.node("C", g, "hyperelliptic curve")
    b.double("sigma", "C", "P1", bpts)
    b.node("E", 1, "elliptic curve")
    b.double("pi", "E", "P1", bpts[:4])
    res = b.product("sigma", "pi", "Ct", "tau", "rho")
    b.claim_etale("tau")
    b.claim_irreducible("rho", res)
    b.claim_genus("Ct", ["tau", "rho"])

    # the dominated curve: generic, branched away from everything above
    target = target or generic_sigma(2, 2, p, prefix="c", source="D")
    b.input("sigma_D", CoverDescriptor(target.source, b.t.nodes["P1"], target.degree, target.branch))
    _lemma_ee_into(b, "sigma_D", bpts[:4])
    _corollary_ce_into(b, "rho", PointRef.slot(PointRef(bpts[4]), 0))
    b.t.params["ct_genus"] = b.t.nodes["Ct"].genus
    return b.t


# -- Prop tree ---------------------------------------------------------------------------

def run_prop_tree(iota: CoverDescriptor, n: int = 3, r=None, q0="@w0#0", p: int = 0) -> Tower:
    """Replay the 3x3 diagram over the Lattès map of degree ``n^2``.

    ``E -> P1_1`` is the double cover branched at ``@w0..@w3`` and ``q0`` a
    point over one of them.  ``phi: E2 -> E`` is multiplication by ``n``,
    ``P1_2`` the quotient of ``E2`` by -1, and ``L: P1_2 -> P1_1`` the induced
    Lattès map.  The fiber of ``L`` over ``@w0`` is ``@w0#0..@w0#k`` with
    ``k = (n^2-1)/2``; the last of these is where ``E2 -> P1_2`` ramifies.
    """
    if n % 2 == 0:
        raise CoverError("EVEN_N", f"n = {n} must be odd")
    if n < 3:
        raise CoverError("PARITY", "n must be at least 3")
    q0 = PointRef(str(q0))
    prof = iota.profile_at(q0).parts
    if not all(e == 1 for e in prof) and any(e % 2 for e in prof):
        raise CoverError("ODD_INDEX_AT_Q0", f"profile {list(prof)} over {q0}")
    base, _ = q0.split_slot()
    w = [base] + [PointRef.label(f"w{i}") for i in range(1, 4) if PointRef.label(f"w{i}") != base][:3]
    b = Builder("prop_tree", p, n=n)
    b.line("P1_1")
    b.node("E", 1, "elliptic curve")
    b.double("pi1", "E", "P1_1", w)
    b.input("iota", CoverDescriptor(iota.source, b.t.nodes["E"], iota.degree, iota.branch))

    deg = n * n
    k = (deg - 1) // 2
    b.node("E2", 1, "elliptic curve")
    b.input("phi", CoverDescriptor.build(b.t.nodes["E2"], b.t.nodes["E"], deg, []))
    b.line("P1_2")
    b.lattes("L", "P1_2", "P1_1", n, 2, [q.text for q in w])
    b.double("pi2", "E2", "P1_2", [PointRef.slot(q, k) for q in w])
    b.claim_index_bound(["pi2", "L"], 2 * 2)

    res = b.product("iota", "phi", "C2", "tau2", "rho2")
    b.claim_etale("tau2")

    align = {}
    for q in b.t.descriptor("rho2").branch_points:
        src, j = q.split_slot()
        if src == q0:
            align[q] = (PointRef.slot(base, j // 2), j % 2) if j < 2 * k else (PointRef.slot(base, k), 0)
        else:
            align[q] = (PointRef.label(f"u[{src.text}]{j}"), 0)
    b.compose("c2_line", "rho2", "pi2", align)

    fiber = [PointRef.slot(base, i) for i in range(k + 1)]
    r = [PointRef(str(x)) for x in r] if r is not None else fiber[1:5]
    rest = [x for x in fiber if x not in r]
    if len(r) != 4 or len(set(r)) != 4 or not set(r) <= set(fiber) or not rest:
        raise CoverError("BAD_INPUT", "r must be 4 distinct points of the fiber, leaving one out")
    b.node("Er", 1, "elliptic curve")
    b.double("pir", "Er", "P1_2", r)
    b.product("c2_line", "pir", "Cr", "tau_r", "rho_r")
    b.claim_etale("tau_r")
    b.compose("cr_c", "tau_r", "tau2")
    b.claim_etale("cr_c")
    q_r = PointRef.slot(rest[0], 0)
    b.claim_even("rho_r", q_r)
    b.t.params.update({"r": [x.text for x in r], "q_r": q_r.text})
    return b.t


# -- Lemma e and Prop ccc ----------------------------------------------------------------

def _even_branch_point(d: CoverDescriptor) -> PointRef | None:
    for q, prof in d.branch:
        if all(e % 2 == 0 for e in prof):
            return q
    return None


def _pi_T_labels(b: Builder, lam=None, F: GF | None = None):
    """Names for the five points of pi(T) (the first one ramified) and the
    other three branch points of the projection."""
    if lam is None:
        return [PointRef.label(f"u{i}") for i in range(5)], [PointRef.label(f"v{i}") for i in range(1, 4)]
    from covercalc.hesse import hesse_projection
    hp = hesse_projection(F, lam)
    ram = F.label(hp.curve.lam / F(3))
    others = sorted(x for x in hp.image_of_T if x != ram)
    b.t.params["hesse"] = {"field": F.describe(), "lambda": F.label(hp.curve.lam),
                           "image_of_T": hp.image_of_T, "printed_image": hp.printed_image,
                           "difference": hp.difference(), "branch_count": hp.branch_count}
    if len(hp.image_of_T) != 5:
        b.note(f"pi(T) has {len(hp.image_of_T)} points instead of 5; continuing with the computed ones")
    if not hp.matches_printed:
        b.note(f"computed pi(T) differs from the printed list: {hp.difference()}")
    extra = [x for x in hp.branch_locus_rational if x != ram]
    labels = [PointRef(x) for x in extra] + [PointRef.label(f"v{i}") for i in range(1, 4 - len(extra))]
    return [PointRef(ram)] + [PointRef(x) for x in others], labels[:3]


def _lemma_e_into(b: Builder, iota_eid: str, u, v, chosen=None) -> PointRef:
    """Translate, pull back along multiplication by 3, project, take the double
    cover ``E0'`` through four points of pi(T).  Returns the fifth point."""
    iota = b.t.descriptor(iota_eid)
    q = _even_branch_point(iota)
    if q is None:
        raise CoverError("NO_EVEN_BRANCH", "no branch point with all indices even")
    E = iota.target.id
    b.translate("iota_t", iota_eid, q, "@T0")
    b.claim("relabel", True, "translation on the elliptic target", edge="iota_t")
    b.node("E3", 1, "elliptic curve")
    b.input("phi3", CoverDescriptor.build(b.t.nodes["E3"], b.t.nodes[E], 9, []))
    b.product("iota_t", "phi3", "C2", "tau2", "rho2")
    b.claim_etale("tau2")

    b.line("P1_l")
    b.double("pil", "E3", "P1_l", [u[0]] + list(v))
    align = {}
    T0 = PointRef("@T0")
    for x in b.t.descriptor("rho2").branch_points:
        src, j = x.split_slot()
        if src == T0:
            align[x] = (u[0], 0) if j == 0 else (u[(j + 1) // 2], (j + 1) % 2)
        else:
            align[x] = (PointRef.label(f"u[{src.text}]{j}"), 0)
    b.compose("c2_line", "rho2", "pil", align)
    for x in u:
        b.claim_even("c2_line", x)

    chosen = [PointRef(str(x)) for x in chosen] if chosen is not None else list(u[:4])
    fifth = [x for x in u if x not in chosen]
    if len(chosen) != 4 or len(fifth) != 1:
        raise CoverError("BAD_INPUT", "choose exactly 4 of the 5 points of pi(T)")
    b.node("E0'", 1, "elliptic curve")
    b.double("pi0p", "E0'", "P1_l", chosen)
    b.product("c2_line", "pi0p", "C3", "tau3", "rho3")
    b.claim_etale("tau3")
    q5 = PointRef.slot(fifth[0], 0)
    b.claim_even("rho3", q5)
    return fifth[0]


def run_lemma_e(iota: CoverDescriptor, lam=None, p: int = 0, F: GF | None = None, chosen=None) -> Tower:
    if iota.degree != 2:
        raise CoverError("NOT_DOUBLE", f"degree {iota.degree} != 2")
    if _even_branch_point(iota) is None:
        raise CoverError("NO_EVEN_BRANCH", "iota is unramified")
    if lam is not None:
        F = F or field(p)
        p = F.p
    b = Builder("lemma_e", p)
    b.node(iota.target.id, 1, "elliptic curve")
    b.input("iota", iota)
    u, v = _pi_T_labels(b, lam, F)
    _lemma_e_into(b, "iota", u, v, chosen)
    return b.t


def in_class_c(d: CoverDescriptor) -> bool:
    return d.target.genus == 1 and _even_branch_point(d) is not None


def run_ccc_tower(iota1: CoverDescriptor, p: int = 0, prefix: Builder | None = None,
                  iota_eid: str = "iota1") -> Tower:
    """Five-step tower from a cover ``C -> E`` in class C down to an étale
    cover of ``C`` dominating ``C0``."""
    if not in_class_c(iota1):
        raise CoverError("NOT_IN_CLASS_C", "no branch point over which every index is even")
    b = prefix or Builder("ccc_tower", p)
    if prefix is None:
        b.node(iota1.target.id, 1, "elliptic curve")
        b.input(iota_eid, iota1)
    b.t.construction = "ccc_tower"
    u, v = _pi_T_labels(b)
    q5 = _lemma_e_into(b, iota_eid, u, v)
    add_base_curves(b, with_c0=False, line="P1_z")

    # C4: pull back along multiplication by 3 on E0'
    b.node("E0''", 1, "elliptic curve")
    b.input("phi3p", CoverDescriptor.build(b.t.nodes["E0''"], b.t.nodes["E0'"], 9, []))
    b.product("rho3", "phi3p", "C4", "tau4", "rho4")
    b.claim_etale("tau4")
    # identify E0'' with E0 so that two points of one E[3]-coset over q5 land on 0#0 and 1#0
    b.input("iso", CoverDescriptor.build(b.t.nodes["E0''"], b.t.nodes["E0"], 1, []))
    coset = PointRef.slot(PointRef.slot(q5, 0), 0)
    align = {}
    for x in b.t.descriptor("rho4").branch_points:
        if x == coset:
            align[x] = (O_E0, 0)
        elif x == PointRef.slot(PointRef.slot(q5, 0), 1):
            align[x] = (ONE_E0, 0)
        else:
            align[x] = (PointRef.label(f"t[{x.text}]"), 0)
    b.compose("c4_e0", "rho4", "iso", align)
    b.claim("relabel", "asserted", "a translation of E0 moves a coset pair onto 0#0 and 1#0", edge="c4_e0")
    b.node("C0", None, "w^6 = z(z-1)")
    b.double("iota0", "C0", "E0", [O_E0, ONE_E0])
    b.product("c4_e0", "iota0", "C5", "tau5", "rho5")
    b.claim_etale("tau5")
    b.claim_surjects(["rho5"])
    # the whole chain C5 -> C4 -> C3 -> C2 -> C
    b.compose("c5_c3", "tau5", "tau4")
    b.compose("c5_c2", "c5_c3", "tau3")
    b.compose("c5_c", "c5_c2", "tau2")
    b.claim_etale("c5_c")
    b.note("C5 -> C is etale and C5 dominates C0")
    return b.t


def preprocess_hyperelliptic(g: int, p: int = 0) -> Builder:
    """Hyperelliptic input: ``Ct -> E`` has index 2 over the leftover branch points."""
    if g < 2:
        raise CoverError("GENUS_TOO_SMALL", f"genus {g} < 2")
    b = Builder("ccc_tower", p, genus=g, preprocessing="hyperelliptic")
    b.line("P1")
    bpts = [f"@b{i}" for i in range(1, 2 * g + 3)]
    b.node("C", g, "hyperelliptic curve")
    b.double("sigma", "C", "P1", bpts)
    b.node("E", 1, "elliptic curve")
    b.double("pi", "E", "P1", bpts[:4])
    res = b.product("sigma", "pi", "Ct", "tau", "rho")
    b.claim_etale("tau")
    b.claim_irreducible("rho", res)
    return b


def preprocess_five_points(sigma: CoverDescriptor, p: int = 0) -> Builder:
    """Cover of the line with even indices over at least five points: pull
    back a double cover through four of them."""
    even = [q for q, prof in sigma.branch if all(e % 2 == 0 for e in prof)]
    if len(even) < 5:
        raise CoverError("NOT_IN_CLASS_C", f"only {len(even)} points with all indices even")
    b = Builder("ccc_tower", p, preprocessing="five_points")
    b.line("P1")
    b.input("sigma", CoverDescriptor(sigma.source, b.t.nodes["P1"], sigma.degree, sigma.branch))
    b.node("E", 1, "elliptic curve")
    b.double("pi", "E", "P1", even[:4])
    b.product("sigma", "pi", "Ct", "tau", "rho")
    b.claim_etale("tau")
    return b


def run_prop_hypo(g: int, p: int = 0) -> Tower:
    b = preprocess_hyperelliptic(g, p)
    return run_ccc_tower(b.t.descriptor("rho"), p, prefix=b, iota_eid="rho")


def run_ccc_five_points(sigma: CoverDescriptor, p: int = 0) -> Tower:
    b = preprocess_five_points(sigma, p)
    return run_ccc_tower(b.t.descriptor("rho"), p, prefix=b, iota_eid="rho")


__all__ = [
    "run_universal_tower", "run_lemma_ee", "run_corollary_ce", "run_hyperelliptic_universal",
    "run_prop_tree", "run_lemma_e", "run_ccc_tower", "run_prop_hypo", "run_ccc_five_points",
    "generic_sigma", "iota0_consistency", "verify_self_cover_record", "concrete_e0", "in_class_c",
]
