"""Command-line front end.

Every verb writes one JSON document with a top-level ``schema_version``
(or a short table with ``--format=summary``).  Exit status is 0 on success,
1 on a domain error and 2 when the input does not parse; errors are
reported as ``{"error": CODE, "message": ...}`` on stdout.

Inline polynomials are written low degree first: ``"6; [0,-1,1]"`` is
``w^6 = -z + z^2``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from covercalc import executors as X
from covercalc.algebra import compose_covers, default_alignment, fiber_product
from covercalc.ec import curve_invariants, parse_curve, parse_field, parse_point, point_order, scalar_mul
from covercalc.errors import CoverError
from covercalc.gf import field
from covercalc.hesse import hesse_projection, hesse_torsion_check
from covercalc.isogeny import etale_self_cover, subgroup_generated, velu_quotient
from covercalc.maps import LattesData, lattes_descriptor, parse_superelliptic, superelliptic_descriptor
from covercalc.ramification import (
    FieldSpec,
    PointRef,
    classify_cover,
    descriptor_from_dict,
    descriptor_to_dict,
    dumps,
    max_ram_index,
    riemann_hurwitz_genus,
)
from covercalc.towers import SCHEMA_VERSION, compose_index_bound, tower_loads, tower_to_dict, verify_tower

PARSE_CODES = {"PARSE_ERROR", "BAD_POINT"}

_EPILOG = """\
polynomials are low degree first: "6; [0,-1,1]" means w^6 = -z + z^2.
curves: "weierstrass:a,b" or "hesse:lam"; fields: "GF(7)", "GF(7^2)".
extension-field elements are coefficient vectors such as "[3,1]".
COVERCALC_SCAN_GUARD caps exhaustive scans (default 10^6 elements)."""


# -- input helpers -------------------------------------------------------------

def _read_json(path: str) -> dict:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CoverError("PARSE_ERROR", f"{path}: not JSON ({exc})") from exc


def _descriptor(path: str):
    return descriptor_from_dict(_read_json(path))


def _curve(args):
    F = parse_field(args.field)
    return F, parse_curve(args.curve, F)


def _points(texts, E):
    return [parse_point(t, E) for t in texts]


def _summary_rows(doc: dict, prefix: str = "") -> list[tuple[str, str]]:
    rows = []
    for k in sorted(doc):
        v = doc[k]
        if isinstance(v, dict) and len(v) <= 12:
            rows += _summary_rows(v, f"{prefix}{k}.")
        elif isinstance(v, list) and len(v) <= 10 and all(not isinstance(x, (list, dict)) for x in v):
            rows.append((prefix + k, ", ".join(map(str, v))))
        elif isinstance(v, (list, dict)):
            rows.append((prefix + k, f"<{len(v)} entries>"))
        else:
            rows.append((prefix + k, str(v)))
    return rows


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(doc)
    rows = _summary_rows(doc)
    width = max((len(k) for k, _ in rows), default=0)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


# -- verbs ---------------------------------------------------------------------

def cmd_genus(args) -> dict:
    if args.superelliptic:
        F = field(args.p) if args.p else None
        d = superelliptic_descriptor(parse_superelliptic(args.superelliptic, F), "C")
    elif args.descriptor:
        d = _descriptor(args.descriptor)
    else:
        raise CoverError("PARSE_ERROR", "give --superelliptic or --descriptor")
    return {"genus": riemann_hurwitz_genus(d), "descriptor": descriptor_to_dict(d, standalone=True)}


def cmd_classify(args) -> dict:
    d = _descriptor(args.descriptor)
    c = classify_cover(d, args.n)
    return {"simple": c.simple, "generic": c.generic, "in_CN_n": c.in_CN_n,
            "over_three_points": c.over_three_points, "max_index": max_ram_index(d)}


def cmd_fiber(args) -> dict:
    left, right = _descriptor(args.left), _descriptor(args.right)
    pairing = {PointRef(k): PointRef(v) for k, v in json.loads(args.pairing or "{}").items()}
    res = fiber_product(left, right, pairing, product_id=args.product_id)
    return {
        "product": {"id": res.product.id, "genus": res.product.genus, "degree": res.product_degree},
        "irreducible": res.irreducible,
        "points": [{"over": fp.over.text, "left": list(fp.left), "right": list(fp.right),
                    "count": fp.count, "index_over_base": fp.index_over_base} for fp in res.points],
        "left_projection": descriptor_to_dict(res.left_projection, standalone=True),
        "right_projection": descriptor_to_dict(res.right_projection, standalone=True),
    }


def cmd_compose(args) -> dict:
    inner, outer = _descriptor(args.inner), _descriptor(args.outer)
    if args.alignment:
        raw = json.loads(args.alignment)
        align = {PointRef(k): (PointRef(b), int(j)) for k, (b, j) in raw.items()}
    else:
        align = default_alignment(inner)
    return {"composite": descriptor_to_dict(compose_covers(inner, outer, align), standalone=True)}


def cmd_lattes(args) -> dict:
    labels = tuple(args.labels) if args.labels else None
    d = lattes_descriptor(LattesData(args.n, args.flavor, labels), spec=FieldSpec(args.p))
    return {"max_index": max_ram_index(d), "source_genus": riemann_hurwitz_genus(d),
            "descriptor": descriptor_to_dict(d, standalone=True)}


def cmd_ec_count(args) -> dict:
    F, E = _curve(args)
    inv = curve_invariants(E)
    out = {"curve": E.describe(), "field": F.describe(), "count": inv.count, "trace": inv.trace,
           "supersingular": inv.supersingular, "j_invariant": F.label(inv.j_invariant)}
    if args.check_torsion:
        out["annihilated_by_count"] = all(scalar_mul(P, inv.count).is_zero() for P in E.points())
    return out


def cmd_ec_order(args) -> dict:
    F, E = _curve(args)
    P = parse_point(args.point, E)
    return {"curve": E.describe(), "point": P.text, "order": point_order(P, E.count())}


def cmd_velu(args) -> dict:
    F, E = _curve(args)
    kernel = subgroup_generated(_points(args.kernel, E), E)
    chain = velu_quotient(E, kernel)
    end = chain.steps[-1].codomain if chain.steps else E
    out = {"domain": E.describe(), "degree": chain.total_degree, "codomain": end.describe(),
           "kernel": [P.text for P in kernel], "chain": chain.describe(),
           "domain_count": E.count(), "codomain_count": end.count(),
           "kernel_to_origin": all(chain(P).is_zero() for P in kernel)}
    if args.extension:
        F2 = field(F.p, F.k * args.extension)
        out["domain_count_ext"] = E.base_change(F2).count()
        out["codomain_count_ext"] = end.base_change(F2).count()
    return out


def cmd_self_cover(args) -> dict:
    F, E = _curve(args)
    S = _points(args.points, E)
    sc = etale_self_cover(E, S)
    return {"curve": E.describe(), "m": sc.m, "degree": sc.degree, "strategy": sc.strategy,
            "orders": sc.orders, "j_cycle_length": sc.j_cycle_length, "chain": sc.chain.describe(),
            "annihilated": all(sc.chain(P).is_zero() for P in S)}


def cmd_hesse(args) -> dict:
    F = parse_field(args.field)
    lam = F.parse(args.lam)
    tors = hesse_torsion_check(F, lam)
    hp = hesse_projection(F, lam)
    return {"curve": hp.curve.describe(), "torsion_checks": tors.checks, "T": [P.text for P in tors.T],
            "degree": hp.degree, "branch_count": hp.branch_count,
            "branch_locus_rational": hp.branch_locus_rational, "image_of_T": hp.image_of_T,
            "S_lambda": hp.S_lambda, "printed_image": hp.printed_image,
            "matches_printed": hp.matches_printed, "difference": hp.difference()}


CONSTRUCTIONS = ("main", "hyperelliptic-universal", "lemma-ee", "prop-tree", "lemma-e", "ccc-hypo", "ccc-five-points")


def _build_tower(args):
    c, p = args.construction, args.p
    X.check_characteristic(p)
    if c == "main":
        sigma = _descriptor(args.sigma) if args.sigma else X.generic_sigma(args.degree, args.sigma_genus, p)
        return X.run_universal_tower(p, sigma, concrete=args.concrete, max_k=args.max_k)
    if c == "hyperelliptic-universal":
        return X.run_hyperelliptic_universal(args.genus, p)
    if c == "lemma-ee":
        sigma = _descriptor(args.sigma) if args.sigma else X.generic_sigma(args.degree, args.sigma_genus, p)
        return X.run_lemma_ee(sigma, p)
    if c == "ccc-hypo":
        return X.run_prop_hypo(args.genus, p)
    iota = _descriptor(args.iota) if args.iota else None
    if c == "prop-tree":
        iota = iota or _canonical_iota("@w0#0", p)
        return X.run_prop_tree(iota, args.n, p=p)
    if c == "lemma-e":
        iota = iota or _canonical_iota("@q", p)
        F = field(p) if args.lam is not None else None
        return X.run_lemma_e(iota, args.lam, p, F)
    if c == "ccc-five-points":
        if args.sigma is None:
            raise CoverError("PARSE_ERROR", "ccc-five-points needs --sigma")
        return X.run_ccc_five_points(_descriptor(args.sigma), p)
    raise CoverError("PARSE_ERROR", f"unknown construction {c!r}")


def _canonical_iota(q: str, p: int):
    """Double cover of an elliptic curve branched at ``q`` and one other point."""
    from covercalc.ramification import CoverDescriptor, CurveNode, RamProfile
    spec = FieldSpec(p)
    return CoverDescriptor.build(CurveNode("C", None, spec), CurveNode("E", 1, spec), 2,
                                 [(PointRef(q), RamProfile((2,))), (PointRef("@x"), RamProfile((2,)))])


def cmd_tower(args) -> dict:
    t = _build_tower(args)
    doc = tower_to_dict(t)
    if args.verify:
        doc["verification"] = verify_tower(t).to_dict()
    return doc


def cmd_verify(args) -> dict:
    text = sys.stdin.read() if args.tower == "-" else Path(args.tower).read_text(encoding="utf-8")
    return verify_tower(tower_loads(text)).to_dict()


def cmd_bound(args) -> dict:
    return {"chain": list(args.chain), "bound": compose_index_bound(args.chain)}


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="covercalc", description="Ramified covers of curves and their towers.",
                                 epilog=_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--format", choices=("json", "summary"), default="json")
    ap.add_argument("--out", help="write the document here instead of stdout")
    # the same flags after the verb; SUPPRESS keeps them from clobbering the top-level values
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "summary"), default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="verb", required=True)
    _add = sub.add_parser
    sub.add_parser = lambda *a, **k: _add(*a, parents=[common], **k)

    s = sub.add_parser("genus", help="genus of a superelliptic curve or a descriptor's source")
    s.add_argument("--superelliptic", metavar="'m; [c0,c1,...]'")
    s.add_argument("--descriptor", metavar="FILE")
    s.add_argument("--p", type=int, default=0, help="characteristic (0 for the rationals)")
    s.set_defaults(func=cmd_genus)

    s = sub.add_parser("classify", help="simple / generic / CN_n flags")
    s.add_argument("--descriptor", metavar="FILE", required=True)
    s.add_argument("--n", type=int)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("fiber", help="normalized fiber product of two covers")
    s.add_argument("--left", required=True)
    s.add_argument("--right", required=True)
    s.add_argument("--pairing", help="JSON map from left branch points to right ones")
    s.add_argument("--product-id", default="C12")
    s.set_defaults(func=cmd_fiber)

    s = sub.add_parser("compose", help="branch data of a composite cover")
    s.add_argument("--inner", required=True)
    s.add_argument("--outer", required=True)
    s.add_argument("--alignment", help='JSON map {"point": ["base", slot]}')
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("lattes", help="profile of a Lattes map")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--flavor", type=int, default=2, choices=(2, 3))
    s.add_argument("--labels", nargs="+")
    s.add_argument("--p", type=int, default=0)
    s.set_defaults(func=cmd_lattes)

    for verb, func, extra in (("ec-count", cmd_ec_count, None), ("ec-order", cmd_ec_order, "point"),
                              ("velu", cmd_velu, "kernel"), ("self-cover", cmd_self_cover, "points")):
        s = sub.add_parser(verb)
        s.add_argument("--curve", required=True, help='"weierstrass:a,b" or "hesse:lam"')
        s.add_argument("--field", required=True, help='"GF(p)" or "GF(p^k)"')
        if extra == "point":
            s.add_argument("--point", required=True, help='"x:y" or "x:y:z"')
        elif extra:
            s.add_argument(f"--{extra}", nargs="+", required=True)
        if verb == "ec-count":
            s.add_argument("--check-torsion", action="store_true")
        if verb == "velu":
            s.add_argument("--extension", type=int, help="also count points over GF(q^k)")
        s.set_defaults(func=func)

    s = sub.add_parser("hesse", help="torsion and projection of a Hesse pencil member")
    s.add_argument("--field", required=True)
    s.add_argument("--lam", required=True)
    s.set_defaults(func=cmd_hesse)

    s = sub.add_parser("tower", help="run a construction and emit its certificate")
    s.add_argument("--construction", choices=CONSTRUCTIONS, required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--genus", type=int, default=2)
    s.add_argument("--degree", type=int, default=2, help="degree of the generic input cover")
    s.add_argument("--sigma-genus", type=int, default=1)
    s.add_argument("--sigma", metavar="FILE")
    s.add_argument("--iota", metavar="FILE")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--lam", type=int)
    s.add_argument("--concrete", action="store_true")
    s.add_argument("--max-k", type=int, default=4)
    s.add_argument("--verify", action="store_true")
    s.set_defaults(func=cmd_tower)

    s = sub.add_parser("verify", help="re-check a tower certificate")
    s.add_argument("--tower", required=True, metavar="FILE")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("bound", help="index bound of a chain of covers")
    s.add_argument("--chain", type=int, nargs="+", required=True)
    s.set_defaults(func=cmd_bound)
    return ap


def run(argv=None) -> tuple[int, str, str | None]:
    """Exit status, rendered document and the ``--out`` path (if any)."""
    args = build_parser().parse_args(argv)
    try:
        doc = {"schema_version": SCHEMA_VERSION, **args.func(args)}
        status = 0
    except CoverError as exc:
        doc = {"schema_version": SCHEMA_VERSION, "error": exc.code, "message": exc.message}
        status = 2 if exc.code in PARSE_CODES else 1
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        doc = {"schema_version": SCHEMA_VERSION, "error": "PARSE_ERROR", "message": str(exc)}
        status = 2
    return status, render(doc, args.format), args.out


def main(argv=None) -> int:
    status, text, out = run(argv)
    if out and status == 0:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
