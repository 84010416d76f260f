"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) for the eleven lines, or
through pytest where each criterion is its own test.
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from covercalc import executors as X  # noqa: E402
from covercalc.algebra import abhyankar, fiber_product  # noqa: E402
from covercalc.ec import WeierstrassCurve, curve_invariants, parse_point, scalar_mul  # noqa: E402
from covercalc.errors import CoverError  # noqa: E402
from covercalc.gf import field  # noqa: E402
from covercalc.hesse import hesse_projection, hesse_torsion_check  # noqa: E402
from covercalc.isogeny import subgroup_generated, velu_quotient  # noqa: E402
from covercalc.maps import LattesData, lattes_descriptor, parse_superelliptic, superelliptic_descriptor  # noqa: E402
from covercalc.ramification import PointRef, RamProfile, is_etale, max_ram_index, riemann_hurwitz_genus  # noqa: E402
from covercalc.towers import compose_index_bound, tower_dumps, tower_loads, verify_tower  # noqa: E402

from conftest import cover  # noqa: E402
from test_algebra import monodromy_orbits  # noqa: E402
from test_gf_ec import brute_count  # noqa: E402


def c1_genus():
    c0 = superelliptic_descriptor(parse_superelliptic("6; [0,-1,1]"), "C0")
    e0 = superelliptic_descriptor(parse_superelliptic("3; [0,-1,1]"), "E0")
    g = (riemann_hurwitz_genus(c0), riemann_hurwitz_genus(e0))
    return g == (2, 1), f"g(C0), g(E0) = {g}"


def c2_iota0():
    ok, comp, direct = X.iota0_consistency()
    b = X.Builder("iota0", 0)
    X.add_base_curves(b)
    iota0 = b.t.descriptor("iota0")
    # decompose: over each base point pi0 has one point of index 3, so iota0's
    # indices are the parts of sigma0 divided by 3
    derived = {PointRef.slot(q, 0): RamProfile(tuple(e // 3 for e in pr)) for q, pr in direct.branch}
    derived = {q: pr for q, pr in derived.items() if not pr.trivial}
    ok &= dict(iota0.branch) == derived
    ok &= sorted(q.text for q in iota0.branch_points) == ["0#0", "1#0"]
    ok &= all(pr.parts == (2,) for _, pr in iota0.branch)
    ok &= PointRef("inf#0") not in iota0.branch_points
    g = riemann_hurwitz_genus(iota0)
    ok &= 2 * g - 2 == 2 * 0 + 2 == 2 * 2 - 2
    return ok, f"branch {[(q.text, list(p.parts)) for q, p in iota0.branch]}, g(C0) = {g}"


def c3_abhyankar():
    rng = random.Random(20261015)
    for _ in range(10_000):
        a, c = rng.randint(1, 12), rng.randint(1, 12)
        g, e = abhyankar(a, c)
        if g * e != a * c:
            return False, f"gcd*lcm fails at {(a, c)}"
        if (e // a == 1) != (a % c == 0):
            return False, f"etale cancellation fails at {(a, c)}"
    details = []
    for a, c in [(2, 2), (2, 3), (1, 2)]:
        count, lengths = monodromy_orbits(a, c, 7)
        L = cover("A", "P1", a, {"0": [a]} if a > 1 else {})
        R = cover("B", "P1", c, {"0": [c]})
        (fp,) = fiber_product(L, R).points_over(PointRef("0"))
        if (fp.count, fp.index_over_base) != (count, lengths[0]) or len(lengths) != 1:
            return False, f"F7 oracle disagrees at {(a, c)}"
        details.append(f"{(a, c)}->{count}x{lengths[0]}")
    return True, "10^4 pairs; F7 oracle " + ", ".join(details)


def c4_lattes():
    out = []
    for flavor, ns, top in ((2, (3, 5, 7, 9), 2), (3, (2, 4, 5), 3)):
        for n in ns:
            d = lattes_descriptor(LattesData(n, flavor))
            if riemann_hurwitz_genus(d) != 0 or max_ram_index(d) != top:
                return False, f"flavor {flavor}, n = {n}"
            out.append(n)
    bound = compose_index_bound([3, 2])
    return bound == 6, f"{len(out)} maps close up; bound 3*2 = {bound}"


def c5_corollary():
    seen = []
    for g in (2, 3, 4):
        for p in (5, 7, 11):
            t = X.run_hyperelliptic_universal(g, p)
            if not verify_tower(t).accepted:
                return False, f"g = {g}, p = {p} rejected"
            via_c = riemann_hurwitz_genus(t.descriptor("tau"))
            via_e = riemann_hurwitz_genus(t.descriptor("rho"))
            if via_c != via_e or via_c != 2 * g - 1:
                return False, f"RH sides {via_c} vs {via_e} at g = {g}"
            seen.append(via_c)
    return seen[0] == 3, f"9 towers accepted; genus of the product for g = 2 is {seen[0]}"


def c6_universal():
    notes = []
    for degree, genus in ((2, 1), (3, 1)):
        for p in (5, 7, 11):
            t = X.run_universal_tower(p, X.generic_sigma(degree, genus, p), concrete=True, max_k=4)
            report = verify_tower(t)
            sc = t.params["self_cover"]
            etale = next(v for v in report.verdicts if v.kind == "etale" and v.refs.get("edge") == "tau2")
            if not (report.accepted and etale.verdict == "verified" and sc["annihilated"] and sc["m_multiple_of_lcm"]):
                return False, f"degree {degree}, p = {p}: {report.status}, {sc}"
            notes.append(f"d{degree}/p{p}:{t.params['field']}:m={sc['m']}")
    return True, "; ".join(notes)


def c7_torsion():
    out = []
    for p, n_expected, trace, ss in ((5, 6, 0, True), (7, 12, -4, False)):
        F = field(p)
        E = WeierstrassCurve(F, F.zero, F.one)
        inv = curve_invariants(E)
        scan = brute_count(p, 0, 1)
        if (inv.count, inv.trace, inv.supersingular, scan) != (n_expected, trace, ss, n_expected):
            return False, f"p = {p}: {inv}"
        if not all(scalar_mul(P, inv.count).is_zero() for P in E.points()):
            return False, f"p = {p}: a point is not killed by the count"
        out.append(f"#E(F{p}) = {inv.count}")
    return True, ", ".join(out)


def c8_velu():
    F = field(7)
    E = WeierstrassCurve(F, F.zero, F.one)
    K = subgroup_generated([parse_point("3:0", E)], E)
    chain = velu_quotient(E, K)
    E2 = chain.steps[-1].codomain
    F49 = field(7, 2)
    counts = (E.count(), E2.count(), E.base_change(F49).count(), E2.base_change(F49).count())
    ok = chain.total_degree == 2 and counts[0] == counts[1] and counts[2] == counts[3]
    ok &= all(chain(P).is_zero() for P in K)
    return ok, f"codomain {E2.describe()}, counts {counts}"


def c9_hesse():
    lines, ok = [], True
    for p in (7, 13):
        F = field(p)
        for lam in (0, 1, 2):
            try:
                tors = hesse_torsion_check(F, lam)
                hp = hesse_projection(F, lam)
            except CoverError as exc:
                ok = False
                lines.append(f"F{p} lam={lam}: {exc.code}")
                continue
            good = tors.verified and hp.degree == 2 and hp.branch_count == 4
            ok &= good
            lines.append(f"F{p} lam={lam}: {'ok' if good else 'bad'}, pi(T) vs printed {hp.difference()}")
    return ok, "; ".join(lines)


def _ccc_input():
    return cover("S", "P1", 2, {f"@e{i}": [2] for i in range(6)})


def c10_trees():
    iota_tree = cover("C", "E", 2, {"@w0#0": [2], "@x": [2]}, tgt_genus=1)
    iota_e = cover("C", "E", 2, {"@q": [2], "@x": [2]}, tgt_genus=1)
    builds = {
        "prop_tree": (lambda: X.run_prop_tree(iota_tree, 3), "tau_r"),
        "lemma_e": (lambda: X.run_lemma_e(iota_e), "tau3"),
        "ccc_hypo": (lambda: X.run_prop_hypo(2), "tau5"),
        "ccc_five": (lambda: X.run_ccc_five_points(_ccc_input()), "tau4"),
    }
    from test_towers import failed, tamper
    for name, (build, eid) in builds.items():
        t = build()
        if not verify_tower(tower_loads(tower_dumps(t))).accepted:
            return False, f"{name} rejected"
        if not is_etale(t.descriptor(eid)):
            return False, f"{name}: {eid} is not etale"
        flipped = failed(verify_tower(tamper(t, eid)))
        if flipped != [("etale", {"edge": eid})]:
            return False, f"{name}: tampering {eid} flipped {flipped}"
    return True, "4 constructions accepted; each fault flips exactly its claim"


def c11_bound():
    # e <= 2 e(sigma) e(beta); with e(sigma) = 1 and e(beta) = 3 the Lattes chain gives 6
    general = all(compose_index_bound([2, s, b]) == 2 * s * b for s in range(1, 5) for b in range(1, 5))
    example = compose_index_bound([2, 3])
    return general and example == 6, f"2*e(sigma)*e(beta) reproduced; example bound {example}"


CRITERIA = [
    (1, "genus facts", c1_genus),
    (2, "iota0 ramification", c2_iota0),
    (3, "Abhyankar conservation", c3_abhyankar),
    (4, "Lattes RH closure", c4_lattes),
    (5, "Corollary c towers", c5_corollary),
    (6, "Theorem main towers (concrete)", c6_universal),
    (7, "torsion universality", c7_torsion),
    (8, "Velu correctness", c8_velu),
    (9, "Hesse suite", c9_hesse),
    (10, "Prop tree / Lemma e / Prop ccc", c10_trees),
    (11, "index bound bookkeeping", c11_bound),
]


def evaluate(fn):
    try:
        return fn()
    except CoverError as exc:
        return False, f"{exc.code}: {exc.message}"


@pytest.mark.parametrize("num,name,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(num, name, fn, capsys):
    ok, detail = evaluate(fn)
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num}: {name} -- {detail}")
    assert ok, detail


def main() -> int:
    failures = 0
    for num, name, fn in CRITERIA:
        ok, detail = evaluate(fn)
        failures += not ok
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {name} -- {detail}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
