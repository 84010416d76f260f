"""Curves, points and branched covers described by their ramification data.

A cover ``tau: C -> B`` of degree ``d`` is recorded by the list of its branch
points on ``B`` together with a complete partition of ``d`` over each of them
(the local indices ``e_q(tau)`` of the points ``q`` in the fiber, unramified
points included as 1's).  Everything here is an immutable value.

Point naming
------------
Points serialize to normalized strings:

* ``"@name"``: an abstract label,
* ``"0"``, ``"1"``, ``"inf"``, ``"a/b"``: coordinates on the projective line,
  reduced fractions in characteristic 0, field elements otherwise,
* ``"pt:x:y:z"``: a point of an explicit elliptic curve,
* ``"<base>#<i>"``: the ``i``-th point in the fiber over ``<base>`` of some
  cover, counting points in the order of the (descending) profile parts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Mapping

from covercalc.errors import CoverError

UNKNOWN = None


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Ground field: characteristic plus either the algebraic closure (``extension=None``)
    or an explicit extension GF(p^k)."""

    characteristic: int = 0
    extension: int | None = None

    def __post_init__(self):
        p = self.characteristic
        if p != 0 and not is_prime(p):
            raise CoverError("BAD_FIELD", f"characteristic {p} is neither 0 nor prime")
        if self.extension is not None:
            if p == 0:
                raise CoverError("BAD_FIELD", "explicit extensions need a positive characteristic")
            if self.extension < 1:
                raise CoverError("BAD_FIELD", "extension degree must be positive")

    @property
    def symbolic(self) -> bool:
        return self.extension is None


@dataclass(frozen=True)
class CurveNode:
    id: str
    genus: int | None = UNKNOWN
    field: FieldSpec = FieldSpec()
    description: str = ""

    def __post_init__(self):
        if self.genus is not None and self.genus < 0:
            raise CoverError("BAD_GENUS", f"negative genus for {self.id}")


def P1(field: FieldSpec = FieldSpec(), id: str = "P1") -> CurveNode:
    return CurveNode(id, 0, field, "projective line")


@dataclass(frozen=True, order=True)
class PointRef:
    """A point identified by its normalized string form (see module docstring)."""

    text: str

    def __post_init__(self):
        object.__setattr__(self, "text", _normalize_point_text(self.text))

    @classmethod
    def label(cls, name: str) -> "PointRef":
        return cls("@" + name.lstrip("@"))

    @classmethod
    def coordinate(cls, value) -> "PointRef":
        """A point of the projective line; ``None`` or ``"inf"`` is infinity."""
        if value is None:
            return cls("inf")
        return cls(str(value))

    @classmethod
    def slot(cls, base: "PointRef", index: int) -> "PointRef":
        return cls(f"{base.text}#{index}")

    @property
    def kind(self) -> str:
        if self.is_slot or self.text.startswith("@"):
            return "abstract-label"
        if self.text.startswith("pt:"):
            return "curve-point"
        return "p1-coordinate"

    @property
    def is_slot(self) -> bool:
        return _slot_parts(self.text) is not None

    def split_slot(self) -> tuple["PointRef", int]:
        parts = _slot_parts(self.text)
        if parts is None:
            raise ValueError(f"{self.text} is not a fiber slot")
        return PointRef(parts[0]), parts[1]

    def __str__(self) -> str:
        return self.text


def _slot_parts(text: str):
    # a '#' inside a bracketed label such as "@shift(q#1)" is part of the name
    base, sep, idx = text.rpartition("#")
    if not sep or not base or not idx.strip().isdigit():
        return None
    return base, int(idx)


def _normalize_point_text(text: str) -> str:
    text = str(text).strip()
    if not text:
        raise CoverError("BAD_POINT", "empty point")
    parts = _slot_parts(text)
    if parts is not None:
        return f"{_normalize_point_text(parts[0])}#{parts[1]}"
    if text.startswith("@") or text.startswith("pt:"):
        return text
    if text.lower() in ("inf", "infinity", "oo", "(1:0)"):
        return "inf"
    try:
        return str(Fraction(text))
    except (ValueError, ZeroDivisionError):
        return text


ZERO, ONE, INF = PointRef("0"), PointRef("1"), PointRef("inf")


@dataclass(frozen=True)
class RamProfile:
    """Local indices over one branch point, stored in descending order."""

    parts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(sorted((int(p) for p in self.parts), reverse=True)))

    @property
    def degree(self) -> int:
        return sum(self.parts)

    @property
    def trivial(self) -> bool:
        return all(p == 1 for p in self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass(frozen=True)
class CoverDescriptor:
    """A finite map ``source -> target`` of the given degree.

    Use :meth:`build` for a normalized descriptor; the raw constructor keeps
    whatever it is given so that :func:`validate_descriptor` can report on it.
    """

    source: CurveNode
    target: CurveNode
    degree: int
    branch: tuple[tuple[PointRef, RamProfile], ...] = ()

    @classmethod
    def build(cls, source: CurveNode, target: CurveNode, degree: int,
              branch: Mapping | Iterable = ()) -> "CoverDescriptor":
        items = branch.items() if isinstance(branch, Mapping) else branch
        entries = tuple(
            (p if isinstance(p, PointRef) else PointRef(p),
             prof if isinstance(prof, RamProfile) else RamProfile(tuple(prof)))
            for p, prof in items
        )
        return normalize(cls(source, target, degree, entries))

    @property
    def characteristic(self) -> int:
        return self.target.field.characteristic

    @property
    def tame(self) -> bool:
        p = self.characteristic
        return p == 0 or all(e % p for _, prof in self.branch for e in prof)

    def profile_at(self, point: PointRef | str) -> RamProfile:
        """Profile over ``point``; unlisted points are unramified."""
        point = point if isinstance(point, PointRef) else PointRef(point)
        for q, prof in self.branch:
            if q == point:
                return prof
        return RamProfile((1,) * self.degree)

    @property
    def branch_points(self) -> tuple[PointRef, ...]:
        return tuple(q for q, _ in self.branch)

    def with_branch(self, branch) -> "CoverDescriptor":
        return CoverDescriptor.build(self.source, self.target, self.degree, branch)


def normalize(d: CoverDescriptor) -> CoverDescriptor:
    entries = [(q, prof) for q, prof in d.branch if not prof.trivial]
    entries.sort(key=lambda e: e[0].text)
    return replace(d, branch=tuple(entries))


def validate_descriptor(d: CoverDescriptor) -> list[Violation]:
    out = []
    if d.degree < 1:
        out.append(Violation("BAD_DEGREE", f"degree {d.degree} is not positive"))
    seen = set()
    for q, prof in d.branch:
        if q in seen:
            out.append(Violation("DUPLICATE_BRANCH_POINT", f"{q} listed twice"))
        seen.add(q)
        if any(e < 1 for e in prof.parts):
            out.append(Violation("NONPOSITIVE_PART", f"profile {list(prof.parts)} at {q}"))
        if prof.degree != d.degree:
            out.append(Violation("PROFILE_SUM", f"profile at {q} sums to {prof.degree} != {d.degree}"))
    if d.source.field.characteristic != d.target.field.characteristic:
        out.append(Violation("FIELD_MISMATCH", "source and target characteristics differ"))
    return out


def check_valid(d: CoverDescriptor) -> None:
    bad = validate_descriptor(d)
    if bad:
        raise CoverError("INVALID_DESCRIPTOR", "; ".join(f"{v.code}: {v.message}" for v in bad))


def ramification_total(d: CoverDescriptor) -> int:
    """Degree of the ramification divisor, sum of ``e_q - 1``."""
    return sum(e - 1 for _, prof in d.branch for e in prof)


def riemann_hurwitz_genus(d: CoverDescriptor, irreducible: bool = True,
                          target_genus: int | None = None) -> int:
    """Genus of the source by the tame Riemann-Hurwitz formula.

    With ``irreducible=False`` the total Euler characteristic of the source
    ``sum(2 - 2 g_i)`` is returned instead.
    """
    check_valid(d)
    if not d.tame:
        raise CoverError("WILD_RAMIFICATION",
                         f"characteristic {d.characteristic} divides a local index")
    gb = d.target.genus if target_genus is None else target_genus
    if gb is None:
        raise CoverError("UNKNOWN_TARGET_GENUS", f"genus of {d.target.id} is unknown")
    two_g_minus_2 = d.degree * (2 * gb - 2) + ramification_total(d)
    if not irreducible:
        return -two_g_minus_2
    if two_g_minus_2 % 2:
        raise CoverError("RH_INCONSISTENT", f"2g - 2 = {two_g_minus_2} is odd")
    g = two_g_minus_2 // 2 + 1
    if g < 0:
        raise CoverError("RH_INCONSISTENT", f"negative genus {g}")
    return g


def max_ram_index(d: CoverDescriptor) -> int:
    return max((e for _, prof in d.branch for e in prof), default=1)


def is_etale(d: CoverDescriptor) -> bool:
    return not normalize(d).branch


@dataclass(frozen=True)
class CoverClass:
    simple: bool
    generic: bool
    in_CN_n: bool | None = None
    over_three_points: bool = False


def classify_cover(d: CoverDescriptor, n: int | None = None, check_cn: bool = False) -> CoverClass:
    """Flags from the ramification vocabulary.

    ``generic`` means simple with a single ramification point over each
    branch point.  ``in_CN_n`` (the target is taken to be the line) asks that
    all indices over 0 are divisible by 3, over 1 by 2 and over infinity by n.
    """
    d = normalize(d)
    simple = max_ram_index(d) <= 2
    generic = simple and all(sum(1 for e in prof if e >= 2) == 1 for _, prof in d.branch)
    three = set(d.branch_points) <= {ZERO, ONE, INF}
    if check_cn and n is None:
        raise CoverError("MISSING_N", "in_CN_n requested without n")
    cn = None
    if n is not None:
        cn = three and all(
            all(e % m == 0 for e in d.profile_at(pt))
            for pt, m in ((ZERO, 3), (ONE, 2), (INF, n))
        )
    return CoverClass(simple, generic, cn, three)


# -- JSON ------------------------------------------------------------------

def descriptor_to_dict(d: CoverDescriptor, standalone: bool = False) -> dict:
    out = {
        "source": d.source.id,
        "target": d.target.id,
        "degree": d.degree,
        "branch": [{"point": q.text, "profile": list(prof.parts)} for q, prof in d.branch],
    }
    if standalone:
        out["characteristic"] = d.characteristic
        out["source_genus"] = d.source.genus
        out["target_genus"] = d.target.genus
    return out


def node_to_dict(c: CurveNode) -> dict:
    return {
        "id": c.id,
        "genus": c.genus,
        "characteristic": c.field.characteristic,
        "extension": c.field.extension,
        "description": c.description,
    }


def node_from_dict(obj: dict) -> CurveNode:
    f = FieldSpec(obj.get("characteristic", 0), obj.get("extension"))
    return CurveNode(obj["id"], obj.get("genus"), f, obj.get("description", ""))


def descriptor_from_dict(obj: dict, nodes: Mapping[str, CurveNode] | None = None,
                         normalized: bool = True) -> CoverDescriptor:
    try:
        f = FieldSpec(obj.get("characteristic", 0))
        if nodes is not None and obj["source"] in nodes:
            src = nodes[obj["source"]]
        else:
            src = CurveNode(obj["source"], obj.get("source_genus"), f)
        if nodes is not None and obj["target"] in nodes:
            tgt = nodes[obj["target"]]
        else:
            tgt = CurveNode(obj["target"], obj.get("target_genus", 0 if obj["target"].startswith("P1") else None), f)
        entries = tuple((PointRef(e["point"]), RamProfile(tuple(e["profile"]))) for e in obj["branch"])
        d = CoverDescriptor(src, tgt, int(obj["degree"]), entries)
    except (KeyError, TypeError, ValueError) as exc:
        raise CoverError("PARSE_ERROR", f"bad descriptor document: {exc}") from exc
    return normalize(d) if normalized else d


def dumps(obj) -> str:
    """Deterministic JSON text used for every document covercalc writes."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


__all__ = [
    "FieldSpec", "CurveNode", "PointRef", "RamProfile", "CoverDescriptor", "Violation",
    "CoverClass", "P1", "ZERO", "ONE", "INF", "validate_descriptor", "normalize",
    "riemann_hurwitz_genus", "max_ram_index", "is_etale", "classify_cover",
    "descriptor_to_dict", "descriptor_from_dict", "node_to_dict", "node_from_dict",
    "check_valid", "dumps", "is_prime", "lcm",
]
