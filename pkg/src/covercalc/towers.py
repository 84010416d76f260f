"""Tower certificates and their verifier.

A tower is a DAG of curves and covers.  Each edge stores the descriptor the
executor computed together with its provenance: how it arises from other
edges (fiber product projection, composition, pushforward along an étale
self-map) or from explicit data (superelliptic equation, double cover,
Lattès profile).  Only ``input`` edges are taken on trust.

The verifier recomputes every edge from its provenance.  An assertion about
an edge holds when the stored descriptor equals the recomputed one and has
the claimed property.  Assertions about paths use recomputed descriptors
only, so a tampered edge is caught by exactly the assertions that name it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce

from covercalc.algebra import compose_covers, fiber_product, pushforward_branch_locus
from covercalc.errors import CoverError
from covercalc.ramification import (
    CoverDescriptor,
    CurveNode,
    PointRef,
    RamProfile,
    check_valid,
    descriptor_from_dict,
    descriptor_to_dict,
    is_etale,
    max_ram_index,
    node_from_dict,
    node_to_dict,
    riemann_hurwitz_genus,
)

SCHEMA_VERSION = 1

KINDS = ("etale", "surjects", "even_indices_over", "index_bound", "irreducible", "relabel", "genus")
STATUSES = ("verified", "asserted", "failed")


@dataclass
class Edge:
    id: str
    descriptor: CoverDescriptor
    provenance: dict


@dataclass
class Assertion:
    kind: str
    refs: dict
    status: str
    note: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CoverError("BAD_ASSERTION", f"unknown assertion kind {self.kind!r}")
        if self.status not in STATUSES:
            raise CoverError("BAD_ASSERTION", f"unknown status {self.status!r}")


@dataclass
class Tower:
    construction: str
    params: dict = field(default_factory=dict)
    nodes: dict[str, CurveNode] = field(default_factory=dict)
    edges: dict[str, Edge] = field(default_factory=dict)
    assertions: list[Assertion] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add_node(self, node: CurveNode) -> CurveNode:
        old = self.nodes.get(node.id)
        if old is not None and old.genus is not None and node.genus is None:
            return old
        self.nodes[node.id] = node
        return node

    def add_edge(self, eid: str, d: CoverDescriptor, provenance: dict) -> CoverDescriptor:
        if eid in self.edges:
            raise CoverError("DUPLICATE_EDGE", eid)
        self.add_node(d.source)
        self.add_node(d.target)
        self.edges[eid] = Edge(eid, d, provenance)
        return d

    def claim(self, kind: str, status: str, note: str = "", **refs) -> Assertion:
        a = Assertion(kind, refs, status, note)
        self.assertions.append(a)
        return a

    def descriptor(self, eid: str) -> CoverDescriptor:
        return self.edges[eid].descriptor


# -- JSON -----------------------------------------------------------------------

def tower_to_dict(t: Tower) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "construction": t.construction,
        "params": t.params,
        "nodes": [node_to_dict(n) for n in t.nodes.values()],
        "edges": [{"id": e.id, "descriptor": descriptor_to_dict(e.descriptor), "provenance": e.provenance}
                  for e in t.edges.values()],
        "assertions": [{"kind": a.kind, "refs": a.refs, "status": a.status, "note": a.note}
                       for a in t.assertions],
        "notes": list(t.notes),
    }


def tower_from_dict(obj: dict) -> Tower:
    try:
        if obj.get("schema_version") != SCHEMA_VERSION:
            raise CoverError("PARSE_ERROR", f"unsupported schema_version {obj.get('schema_version')!r}")
        t = Tower(obj.get("construction", ""), dict(obj.get("params", {})))
        for n in obj["nodes"]:
            node = node_from_dict(n)
            t.nodes[node.id] = node
        for e in obj["edges"]:
            d = descriptor_from_dict(e["descriptor"], t.nodes, normalized=False)
            t.edges[e["id"]] = Edge(e["id"], d, dict(e["provenance"]))
        for a in obj["assertions"]:
            t.assertions.append(Assertion(a["kind"], dict(a["refs"]), a["status"], a.get("note", "")))
        t.notes = list(obj.get("notes", []))
    except (KeyError, TypeError, AttributeError) as exc:
        raise CoverError("PARSE_ERROR", f"bad tower document: {exc}") from exc
    return t


def tower_dumps(t: Tower) -> str:
    return json.dumps(tower_to_dict(t), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def tower_loads(text: str) -> Tower:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CoverError("PARSE_ERROR", f"not JSON: {exc}") from exc
    return tower_from_dict(obj)


# -- index bookkeeping ----------------------------------------------------------

def compose_index_bound(chain) -> int:
    """Product of the entries: local indices multiply along a composition, so
    the maximal index of a composite never exceeds this."""
    chain = list(chain)
    if not chain or any(int(c) < 1 for c in chain):
        raise CoverError("BAD_CHAIN", "entries must be positive and the chain nonempty")
    return reduce(lambda a, b: a * int(b), chain, 1)


# -- derivation -------------------------------------------------------------------

def double_cover(source: CurveNode, target: CurveNode, points) -> CoverDescriptor:
    """Degree-2 cover simply branched at ``points``."""
    pts = [PointRef(str(q)) for q in points]
    if len(pts) % 2:
        raise CoverError("ODD_BRANCH_COUNT", f"a double cover has an even number of branch points, not {len(pts)}")
    return CoverDescriptor.build(source, target, 2, [(q, RamProfile((2,))) for q in pts])


def same_descriptor(a: CoverDescriptor, b: CoverDescriptor) -> bool:
    return (a.source.id, a.target.id, a.degree, a.branch) == (b.source.id, b.target.id, b.degree, b.branch)


class Deriver:
    """Recompute edges from provenance, memoized per tower."""

    def __init__(self, t: Tower):
        self.t = t
        self.memo: dict[str, CoverDescriptor] = {}
        self.witness: dict[str, str] = {}
        self.active: set[str] = set()

    def bind(self, d: CoverDescriptor) -> CoverDescriptor:
        nodes = self.t.nodes
        src = nodes.get(d.source.id, d.source)
        tgt = nodes.get(d.target.id, d.target)
        return CoverDescriptor(src, tgt, d.degree, d.branch)

    def __call__(self, eid: str) -> CoverDescriptor:
        if eid in self.memo:
            return self.memo[eid]
        if eid not in self.t.edges:
            raise CoverError("MISSING_EDGE", eid)
        if eid in self.active:
            raise CoverError("CYCLE", f"provenance of {eid} refers back to itself")
        self.active.add(eid)
        try:
            d = self.bind(self._derive(self.t.edges[eid]))
        finally:
            self.active.discard(eid)
        check_valid(d)
        self.memo[eid] = d
        return d

    def _derive(self, e: Edge) -> CoverDescriptor:
        pv = e.provenance
        op = pv.get("op")
        stored = e.descriptor
        if op == "input":
            return stored
        if op == "double_cover":
            return double_cover(stored.source, stored.target, pv["points"])
        if op == "superelliptic":
            from covercalc.maps import SuperellipticData, superelliptic_descriptor
            data = SuperellipticData(int(pv["m"]), roots=tuple((q, int(a)) for q, a in pv["roots"]),
                                     characteristic=stored.characteristic)
            return superelliptic_descriptor(data, stored.source.id, stored.target)
        if op == "lattes":
            from covercalc.maps import LattesData, lattes_descriptor
            L = LattesData(int(pv["n"]), int(pv["flavor"]), tuple(pv["labels"]))
            return lattes_descriptor(L, stored.source.id, stored.target.id, stored.target.field)
        if op == "fiber_product":
            left, right = self(pv["left"]), self(pv["right"])
            pairing = {PointRef(k): PointRef(v) for k, v in pv.get("pairing", {}).items()}
            res = fiber_product(left, right, pairing, product_id=stored.source.id)
            self.witness[e.id] = res.irreducible
            return res.left_projection if pv["side"] == "left" else res.right_projection
        if op == "compose":
            align = {PointRef(k): (PointRef(b), int(j)) for k, (b, j) in pv.get("alignment", {}).items()}
            return compose_covers(self(pv["inner"]), self(pv["outer"]), align)
        if op == "pushforward":
            return pushforward_branch_locus(self(pv["of"]), pv["relabel"], pv.get("etale_degree"))
        raise CoverError("BAD_PROVENANCE", f"edge {e.id} has unknown provenance {op!r}")


# -- verification -------------------------------------------------------------------

@dataclass
class Verdict:
    kind: str
    refs: dict
    claimed: str
    verdict: str
    reason: str = ""


@dataclass
class VerificationReport:
    structure: list[str]
    verdicts: list[Verdict]

    @property
    def accepted(self) -> bool:
        return not self.structure and all(v.verdict in ("verified", "asserted") for v in self.verdicts)

    @property
    def status(self) -> str:
        return "ACCEPTED" if self.accepted else "REJECTED"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "structure": list(self.structure),
            "assertions": [{"kind": v.kind, "refs": v.refs, "claimed": v.claimed,
                            "verdict": v.verdict, "reason": v.reason} for v in self.verdicts],
        }


def _structure(t: Tower) -> list[str]:
    out = []
    for e in t.edges.values():
        for nid in (e.descriptor.source.id, e.descriptor.target.id):
            if nid not in t.nodes:
                out.append(f"edge {e.id} refers to unknown node {nid}")
    # curves form a DAG: repeatedly strip nodes without outgoing edges
    out_edges = {n: set() for n in t.nodes}
    for e in t.edges.values():
        out_edges.setdefault(e.descriptor.source.id, set()).add(e.descriptor.target.id)
    remaining = dict(out_edges)
    while remaining:
        sinks = [n for n, tgts in remaining.items() if not (tgts & remaining.keys())]
        if not sinks:
            out.append("edges contain a cycle")
            break
        for n in sinks:
            del remaining[n]
    return out


class Verifier:
    def __init__(self, t: Tower):
        self.t = t
        self.derive = Deriver(t)

    def _edge_ok(self, eid: str) -> CoverDescriptor:
        """The stored descriptor, provided it agrees with the recomputed one."""
        derived = self.derive(eid)
        stored = self.t.edges[eid].descriptor
        check_valid(stored)
        if not same_descriptor(stored, derived):
            raise CoverError("MISMATCH", f"stored descriptor of {eid} differs from its recomputation")
        return stored

    def check(self, a: Assertion) -> tuple[str, str]:
        r = a.refs
        k = a.kind
        if k == "etale":
            d = self._edge_ok(r["edge"])
            return self._bool(is_etale(d), f"branch points {[str(q) for q in d.branch_points]}")
        if k == "irreducible":
            self._edge_ok(r["edge"])
            w = self.derive.witness.get(r["edge"])
            if w is None:
                return "failed", "edge is not a fiber product projection"
            return self._bool(w == "witnessed", "no irreducibility witness")
        if k == "even_indices_over":
            # only the profile at the named point is compared, so a fault elsewhere on the edge does not leak here
            stored = self.t.edges[r["edge"]].descriptor
            derived = self.derive(r["edge"])
            parts = stored.profile_at(r["point"]).parts
            if stored.degree != derived.degree or parts != derived.profile_at(r["point"]).parts:
                return "failed", f"stored profile over {r['point']} differs from its recomputation"
            return self._bool(all(e % 2 == 0 for e in parts), f"profile {list(parts)} over {r['point']}")
        if k == "relabel":
            self._edge_ok(r["edge"])
            pv = self.t.edges[r["edge"]].provenance
            if "self_cover" in pv:
                from covercalc.executors import verify_self_cover_record
                return self._bool(*verify_self_cover_record(pv))
            if "translation" in pv:
                return self._bool(*_translation_ok(pv))
            if a.status == "asserted":
                return "asserted", "existence of the moving map is not checked"
            return "failed", "no record justifies the relabeling"
        if k == "surjects":
            path = list(r["path"])
            ds = [self.derive(eid) for eid in path]
            for x, y in zip(ds, ds[1:]):
                if x.target.id != y.source.id:
                    return "failed", f"{x.target.id} does not feed {y.source.id}"
            return "verified", ""
        if k == "index_bound":
            ds = [self.derive(eid) for eid in r["path"]]
            bound = compose_index_bound([max_ram_index(d) for d in ds])
            return self._bool(bound <= int(r["bound"]), f"index product {bound} exceeds {r['bound']}")
        if k == "genus":
            node = self.t.nodes[r["node"]]
            values = set()
            for eid in r["edges"]:
                d = self.derive(eid)
                if d.source.id != node.id:
                    return "failed", f"{eid} does not start at {node.id}"
                values.add(riemann_hurwitz_genus(d))
            return self._bool(values == {node.genus}, f"RH gives {sorted(values)}, node says {node.genus}")
        return "failed", f"unknown kind {k}"

    @staticmethod
    def _bool(ok: bool, why: str = "") -> tuple[str, str]:
        return ("verified", "") if ok else ("failed", why)


def _translation_ok(pv: dict) -> tuple[bool, str]:
    """A translation moves one named point anywhere; the others must go to
    the fresh names ``@shift(<point>)`` so that nothing else is claimed."""
    if pv.get("op") != "pushforward" or int(pv.get("etale_degree", 0)) != 1:
        return False, "a translation is a pushforward of degree 1"
    src, dst = PointRef(pv["translation"]["from"]), PointRef(pv["translation"]["to"])
    for k, v in pv["relabel"].items():
        k, v = PointRef(k), PointRef(v)
        want = dst if k == src else PointRef.label(f"shift({k.text})")
        if v != want:
            return False, f"{k} is sent to {v}, expected {want}"
    return True, ""


def verify_tower(t: Tower) -> VerificationReport:
    """Re-derive every assertion from the descriptors alone."""
    v = Verifier(t)
    verdicts = []
    for a in t.assertions:
        try:
            verdict, why = v.check(a)
        except (CoverError, KeyError, ValueError, TypeError) as exc:
            verdict, why = "failed", str(exc)
        verdicts.append(Verdict(a.kind, a.refs, a.status, verdict, why))
    return VerificationReport(_structure(t), verdicts)


__all__ = [
    "Tower", "Edge", "Assertion", "VerificationReport", "Verdict", "verify_tower",
    "tower_to_dict", "tower_from_dict", "tower_dumps", "tower_loads", "compose_index_bound",
    "double_cover", "same_descriptor", "SCHEMA_VERSION",
]
