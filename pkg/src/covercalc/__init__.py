"""Ramification calculus for covers of curves, with certified towers.

Submodules:

* :mod:`covercalc.ramification` descriptors, Riemann-Hurwitz, classification
* :mod:`covercalc.algebra` fiber products, composition, pushforward
* :mod:`covercalc.gf`, :mod:`covercalc.ec`, :mod:`covercalc.isogeny`,
  :mod:`covercalc.hesse` finite fields and elliptic curves
* :mod:`covercalc.maps` superelliptic, rational and Lattès maps
* :mod:`covercalc.towers`, :mod:`covercalc.executors` certificates
* :mod:`covercalc.cli` the ``covercalc`` command
"""

from covercalc.algebra import abhyankar, compose_covers, fiber_product, pushforward_branch_locus
from covercalc.errors import CoverError
from covercalc.ramification import (
    CoverDescriptor,
    CurveNode,
    FieldSpec,
    PointRef,
    RamProfile,
    classify_cover,
    riemann_hurwitz_genus,
)
from covercalc.towers import Tower, compose_index_bound, verify_tower

__version__ = "0.1.0"

__all__ = [
    "CoverDescriptor", "CoverError", "CurveNode", "FieldSpec", "PointRef", "RamProfile", "Tower",
    "abhyankar", "classify_cover", "compose_covers", "compose_index_bound", "fiber_product",
    "pushforward_branch_locus", "riemann_hurwitz_genus", "verify_tower",
]
