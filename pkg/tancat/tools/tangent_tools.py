"""
Tangent-structure commands.

1. tangent: the presentation of T(R) on either side
2. tangent-space: the tangent space of R at a rational point
3. axioms: every tangent-structure diagram at R
"""

from typing import Any, Dict

from tancat.engine.bundles import Side, structure_for
from tancat.engine.dual import check_tangent_axioms
from tancat.engine.kahler import check_costructure_axioms, tangent_space_at
from tancat.engine.rings import FPRing, Point
from tancat.tools.payloads import failure, from_report, ring_payload, success


def tangent_tool(ring: FPRing, side: Side) -> Dict[str, Any]:
    """
    Computes the tangent bundle of a ring.

    Args:
        ring: The ring R
        side: Side.RING for the dual numbers, Side.AFFINE for Kaehler differentials

    Returns:
        A status dictionary whose result is {"vars", "relations"} of T(R)
    """
    try:
        tangent = structure_for(side).tangent(ring)
        return success(ring_payload(tangent), f"T({ring}) on the {Side(side).value} side")
    except Exception as e:
        return failure(e, "Failed to compute the tangent bundle")


def tangent_space_tool(ring: FPRing, point: Point) -> Dict[str, Any]:
    try:
        space = tangent_space_at(ring, point)
        return success(ring_payload(space.ring), f"tangent space of {ring} at {point}")
    except Exception as e:
        return failure(e, "Failed to compute the tangent space")


def axioms_tool(ring: FPRing, side: Side) -> Dict[str, Any]:
    """Runs the axiom checker; status is "axiom-failure" when any diagram fails."""
    try:
        if Side(side) is Side.RING:
            report = check_tangent_axioms(ring)
        else:
            report = check_costructure_axioms(ring)
        return from_report(report, f"tangent structure axioms at {ring}")
    except Exception as e:
        return failure(e, "Failed to check the tangent axioms")
