"""
Vector-field and transpose commands.

Declared morphisms arrive raw: a vector field is a morphism R -> T(R)
(ring side) or T(R) -> R (scheme side), a derivation is a morphism
R -> R whose images are read as the values D(x).
"""

from typing import Any, Dict

from tancat.engine.bundles import Side
from tancat.engine.derivations import Derivation, lie_bracket
from tancat.engine.dual import VectorFieldDual, derivation_to_vf, vf_to_derivation
from tancat.engine.errors import DomainMismatchError
from tancat.engine.kahler import flat, sharp
from tancat.script import MorphismDecl
from tancat.tools.payloads import derivation_payload, failure, morphism_payload, success


def _derivation(decl: MorphismDecl) -> Derivation:
    if decl.domain != decl.codomain:
        raise DomainMismatchError(f"a derivation of {decl.domain} must map it to itself")
    return Derivation(decl.domain, decl.images)


def vf_to_derivation_tool(field: MorphismDecl, side: Side) -> Dict[str, Any]:
    """
    Reads the derivation of a vector field.

    Args:
        field: A section R -> T(R), or on the scheme side a retraction T(R) -> R
        side: Which tangent bundle the field is a section of

    Returns:
        A status dictionary whose result is {"domain", "images"} of D
    """
    try:
        section = field.as_morphism()
        if Side(side) is Side.AFFINE:
            section = flat(section)
        D = vf_to_derivation(VectorFieldDual(section.domain, section))
        return success(derivation_payload(D), f"derivation of {D.ring}")
    except Exception as e:
        return failure(e, "Failed to read the derivation")


def vf_from_derivation_tool(derivation: MorphismDecl, side: Side) -> Dict[str, Any]:
    """The vector field x |-> x + D(x) eps, or its transpose on the scheme side."""
    try:
        section = derivation_to_vf(_derivation(derivation)).section
        if Side(side) is Side.AFFINE:
            section = sharp(section)
        return success(morphism_payload(section), f"vector field on {derivation.domain}")
    except Exception as e:
        return failure(e, "Failed to build the vector field")


def vf_bracket_tool(first: MorphismDecl, second: MorphismDecl) -> Dict[str, Any]:
    try:
        D = lie_bracket(_derivation(first), _derivation(second))
        return success(derivation_payload(D), f"bracket on {D.ring}")
    except Exception as e:
        return failure(e, "Failed to compute the bracket")


def transpose_sharp_tool(f: MorphismDecl) -> Dict[str, Any]:
    """f: R -> T(R') to f#: T(R) -> R'."""
    try:
        result = sharp(f.as_morphism())
        return success(morphism_payload(result), f"sharp of a map out of {f.domain}")
    except Exception as e:
        return failure(e, "Failed to transpose")


def transpose_flat_tool(g: MorphismDecl) -> Dict[str, Any]:
    """g: T(R) -> R' to g_flat: R -> T(R')."""
    try:
        result = flat(g.as_morphism())
        return success(morphism_payload(result), f"flat of a map out of {g.domain}")
    except Exception as e:
        return failure(e, "Failed to transpose")
