"""
Differential-bundle commands.

A bundle is named either by a module (its bundle on the chosen side) or by
a ring (its tangent bundle).
"""

import logging
from typing import Any, Dict, Union

from tancat.engine.bundles import (
    DiffBundle,
    Side,
    bundle_to_mod,
    derive_sum_and_negative_via_rosicky,
    mod_to_bundle,
    tangent_bundle,
)
from tancat.engine.errors import BundleAxiomError
from tancat.engine.modules import FPModule
from tancat.engine.rings import FPRing, morphism_difference
from tancat.engine.structure import AxiomEntry, AxiomReport
from tancat.tools.payloads import failure, from_report, module_payload, morphism_payload, ring_payload, success

logger = logging.getLogger(__name__)

BundleSource = Union[FPRing, FPModule]


def _bundle(obj: BundleSource, side: Side) -> DiffBundle:
    if isinstance(obj, FPModule):
        return mod_to_bundle(obj, side)
    return tangent_bundle(obj, side)


def _maps(bundle: DiffBundle) -> Dict[str, Any]:
    return {name: morphism_payload(getattr(bundle, name)) for name in ("q", "sigma", "z", "lam", "iota")}


def bundle_from_module_tool(module: FPModule, side: Side) -> Dict[str, Any]:
    """
    Builds the differential bundle of a module.

    Args:
        module: A finitely presented module over a ring A
        side: Side.RING for M[eps] over A, Side.AFFINE for Sym(M) over A

    Returns:
        A status dictionary whose result carries the total ring, the
        structure maps and the bundle's diagram report
    """
    try:
        bundle = _bundle(module, side)
        extra = ring_payload(bundle.total)
        extra["maps"] = _maps(bundle)
        return from_report(bundle.report, f"{Side(side).value} bundle of {', '.join(module.gens) or 'the zero module'}", extra)
    except BundleAxiomError as e:
        return from_report(e.report, "Bundle fails its diagrams")
    except Exception as e:
        return failure(e, "Failed to build the bundle")


def bundle_check_tool(obj: BundleSource, side: Side) -> Dict[str, Any]:
    """Runs every differential-bundle diagram; status is "axiom-failure" when one fails."""
    try:
        bundle = _bundle(obj, side)
        return from_report(bundle.report, f"bundle diagrams on {bundle.total}")
    except BundleAxiomError as e:
        return from_report(e.report, "Bundle fails its diagrams")
    except Exception as e:
        return failure(e, "Failed to check the bundle")


def bundle_to_module_tool(obj: BundleSource, side: Side) -> Dict[str, Any]:
    """Extracts the module of a bundle: ker(q) on the ring side, the image of D on the scheme side."""
    try:
        module = bundle_to_mod(_bundle(obj, side))
        return success(module_payload(module), f"module of rank {module.rank} over {module.base}")
    except BundleAxiomError as e:
        return from_report(e.report, "Bundle fails its diagrams")
    except Exception as e:
        return failure(e, "Failed to extract the module")


def bundle_derive_sum_tool(obj: BundleSource, side: Side) -> Dict[str, Any]:
    """
    Rebuilds sigma and iota from (q, z, lam) and compares them with the
    bundle's own maps.

    The comparison is reported as the diagrams RS.sigma and RS.iota.
    """
    try:
        bundle = _bundle(obj, side)
        sigma, iota = derive_sum_and_negative_via_rosicky(bundle.pre())
        entries = []
        for name, derived, expected in (("RS.iota", iota, bundle.iota), ("RS.sigma", sigma, bundle.sigma)):
            difference = morphism_difference(derived, expected)
            if difference is None:
                entries.append(AxiomEntry(name, True))
            else:
                witness, lhs, rhs = difference
                logger.warning("reconstructed %s differs at %s", name, witness)
                entries.append(AxiomEntry(name, False, witness=witness, lhs=str(lhs), rhs=str(rhs)))
        report = AxiomReport(f"reconstruction on {bundle.total}", tuple(entries))
        extra = {"sigma": morphism_payload(sigma), "iota": morphism_payload(iota), "matches": report.ok}
        return from_report(report, f"sigma and iota rebuilt on {bundle.total}", extra)
    except BundleAxiomError as e:
        return from_report(e.report, "Bundle fails its diagrams")
    except Exception as e:
        return failure(e, "Failed to derive sigma and iota")
