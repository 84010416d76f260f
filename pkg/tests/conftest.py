import pytest

from covercalc.ramification import CoverDescriptor, CurveNode, FieldSpec, PointRef, RamProfile


def node(nid, genus=None, p=0):
    return CurveNode(nid, genus, FieldSpec(p))


def cover(src, tgt, degree, branch, p=0, src_genus=None, tgt_genus=0):
    """Descriptor from ``{point: parts}``; the target defaults to a genus-0 curve."""
    return CoverDescriptor.build(node(src, src_genus, p), node(tgt, tgt_genus, p), degree,
                                 [(PointRef(q), RamProfile(tuple(parts))) for q, parts in branch.items()])


def double_of_elliptic(points, p=0, src="C"):
    """Double cover of an elliptic curve ``E`` simply branched at ``points``."""
    return cover(src, "E", 2, {q: [2] for q in points}, p=p, tgt_genus=1)


@pytest.fixture
def sigma0():
    """``w^6 = z(z-1)``."""
    return cover("C0", "P1", 6, {"0": [6], "1": [6], "inf": [3, 3]})
