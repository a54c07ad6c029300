"""
Status dictionaries shared by the command tools.

Every tool returns {"status": ..., "result": ..., "message": ...}; failures
carry "error_kind" ("input" or "budget") and "error_message".
"""

import logging
from typing import Any, Dict, Optional

from tancat.engine.derivations import Derivation
from tancat.engine.errors import ResourceBudgetError, TancatError
from tancat.engine.modules import FPModule
from tancat.engine.rings import FPRing, RingMorphism
from tancat.engine.structure import AxiomReport

logger = logging.getLogger(__name__)


def ring_payload(ring: FPRing) -> Dict[str, Any]:
    return {"vars": list(ring.vars), "relations": [str(g) for g in ring.basis]}


def module_payload(module: FPModule) -> Dict[str, Any]:
    return {
        "base": ring_payload(module.base),
        "gens": list(module.gens),
        "relations": [[str(c) for c in row] for row in module.relations],
    }


def morphism_payload(f: RingMorphism) -> Dict[str, Any]:
    return {"domain": list(f.domain.vars), "images": f.as_dict()}


def derivation_payload(D: Derivation) -> Dict[str, Any]:
    return {"domain": list(D.ring.vars), "images": {v: str(i) for v, i in zip(D.ring.vars, D.images)}}


def success(result: Dict[str, Any], message: str) -> Dict[str, Any]:
    return {"status": "ok", "result": result, "message": message}


def from_report(report: AxiomReport, message: str, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    result = dict(extra or {})
    result.update(report.to_dict())
    status = "ok" if report.ok else "axiom-failure"
    if not report.ok:
        message = f"{message}: {len(report.failures)} diagram(s) fail ({', '.join(report.failed_ids())})"
    return {"status": status, "result": result, "message": message}


def failure(e: Exception, message: str) -> Dict[str, Any]:
    kind = "budget" if isinstance(e, ResourceBudgetError) else "input"
    if not isinstance(e, TancatError):
        logger.exception("unexpected error: %s", message)
    return {
        "status": "error",
        "result": {"error_kind": kind, "error_message": str(e)},
        "error_kind": kind,
        "error_message": str(e),
        "message": f"{message}: {e}",
    }
