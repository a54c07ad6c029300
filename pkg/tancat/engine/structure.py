"""
Tangent structures as an interface, and the diagram checker built on it.

Both tangent categories of the engine live on finitely presented rings:
the dual-numbers structure on CRING, and the Kaehler structure on CRING^op.
An arrow of the tangent category is always stored as a RingMorphism; on the
opposite side the stored ring map points the other way, so `compose`,
`source` and `target` are side specific. Everything else here (fibre
products, pairings, axiom diagrams, reports) is written once against this
interface.
"""

import logging
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from tancat.config import CHECKER_WORKERS
from tancat.engine.errors import DomainMismatchError, IllDefinedMorphismError, PairingError, TancatError
from tancat.engine.rings import FPRing, RingMorphism, compose, compose_all, identity, morphism_difference

logger = logging.getLogger(__name__)

STRUCTURE_MAPS = ("proj", "sum", "zero", "neg", "lift", "flip")


@dataclass(frozen=True)
class FibreProduct:
    """
    The n-fold fibre product E_n of q: E -> A, materialized as a ring.

    projections are the categorical arrows E_n -> E. injections are ring maps
    E -> E_n, one per copy; on the opposite side they coincide with the
    projections. collapse is the ring map E -> E_n through the base, used by
    the pullback side to separate the shared part of a cone.
    """

    ring: FPRing
    n: int
    fibre: FPRing
    base: FPRing
    projections: Tuple[RingMorphism, ...]
    injections: Tuple[RingMorphism, ...]
    collapse: Optional[RingMorphism] = None


@dataclass(frozen=True)
class AxiomEntry:
    id: str
    passed: bool
    witness: Optional[str] = None
    lhs: Optional[str] = None
    rhs: Optional[str] = None
    message: Optional[str] = None

    def to_dict(self) -> Dict[str, object]:
        entry: Dict[str, object] = {"id": self.id, "pass": self.passed}
        if not self.passed:
            if self.witness is not None:
                entry["witness"] = f"{self.witness}: {self.lhs} != {self.rhs}"
            else:
                entry["witness"] = self.message
        return entry


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of a batch of diagram checks, ordered by diagram id."""

    subject: str
    entries: Tuple[AxiomEntry, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def failures(self) -> Tuple[AxiomEntry, ...]:
        return tuple(e for e in self.entries if not e.passed)

    def failed_ids(self) -> Tuple[str, ...]:
        return tuple(e.id for e in self.failures)

    def ids(self) -> Tuple[str, ...]:
        return tuple(e.id for e in self.entries)

    def get(self, diagram_id: str) -> AxiomEntry:
        for e in self.entries:
            if e.id == diagram_id:
                return e
        raise KeyError(diagram_id)

    def merged(self, other: "AxiomReport") -> "AxiomReport":
        return AxiomReport(self.subject, tuple(sorted(self.entries + other.entries, key=lambda e: e.id)))

    def to_dict(self) -> Dict[str, object]:
        return {"axioms": [e.to_dict() for e in self.entries]}


@dataclass(frozen=True)
class Diagram:
    """Two composites that must agree, built lazily."""

    id: str
    lhs: Callable[[], RingMorphism]
    rhs: Callable[[], RingMorphism]


def _evaluate(diagram: Diagram) -> AxiomEntry:
    try:
        left = diagram.lhs()
        right = diagram.rhs()
        difference = morphism_difference(left, right)
    except TancatError as e:
        logger.warning("diagram %s could not be evaluated: %s", diagram.id, e)
        return AxiomEntry(diagram.id, False, message=f"{type(e).__name__}: {e}")
    if difference is None:
        return AxiomEntry(diagram.id, True)
    name, a, b = difference
    logger.debug("diagram %s fails at %s", diagram.id, name)
    return AxiomEntry(diagram.id, False, witness=name, lhs=str(a), rhs=str(b))


def run_diagrams(subject: str, diagrams: Sequence[Diagram]) -> AxiomReport:
    """Evaluates every diagram, in parallel when configured; the report is sorted by id."""
    if CHECKER_WORKERS > 1:
        with ThreadPoolExecutor(max_workers=CHECKER_WORKERS) as pool:
            entries = list(pool.map(_evaluate, diagrams))
    else:
        entries = [_evaluate(d) for d in diagrams]
    entries.sort(key=lambda e: e.id)
    return AxiomReport(subject, tuple(entries))


class TangentStructure(ABC):
    """
    A tangent structure on finitely presented rings.

    Subclasses supply the functor, the width objects and the six structure
    maps at an arbitrary object; overrides replace a structure map at one
    object only, leaving every other component canonical.
    """

    name: str = ""

    def __init__(self, overrides: Optional[Dict[str, Tuple[FPRing, RingMorphism]]] = None):
        self._overrides = dict(overrides or {})

    def with_override(self, map_name: str, obj: FPRing, arrow: RingMorphism) -> "TangentStructure":
        if map_name not in STRUCTURE_MAPS:
            raise ValueError(f"unknown structure map {map_name!r}")
        overrides = dict(self._overrides)
        overrides[map_name] = (obj, arrow)
        return type(self)(overrides)

    def _lookup(self, map_name: str, obj: FPRing) -> Optional[RingMorphism]:
        entry = self._overrides.get(map_name)
        if entry is not None and entry[0] == obj:
            return entry[1]
        return None

    # Category

    @abstractmethod
    def compose(self, *arrows: RingMorphism) -> RingMorphism:
        """compose(h, g, f) = h after g after f, in the tangent category."""

    @abstractmethod
    def source(self, arrow: RingMorphism) -> FPRing:
        ...

    @abstractmethod
    def target(self, arrow: RingMorphism) -> FPRing:
        ...

    def identity(self, obj: FPRing) -> RingMorphism:
        return identity(obj)

    # Functor

    @abstractmethod
    def tangent(self, obj: FPRing) -> FPRing:
        ...

    @abstractmethod
    def apply(self, arrow: RingMorphism) -> RingMorphism:
        ...

    def tangent_power(self, obj: FPRing, m: int) -> FPRing:
        for _ in range(m):
            obj = self.tangent(obj)
        return obj

    def apply_power(self, arrow: RingMorphism, m: int) -> RingMorphism:
        for _ in range(m):
            arrow = self.apply(arrow)
        return arrow

    @abstractmethod
    def width(self, obj: FPRing, n: int) -> FibreProduct:
        ...

    @abstractmethod
    def pair(self, product: FibreProduct, arrows: Sequence[RingMorphism], outer: int = 0) -> RingMorphism:
        """The unique arrow X -> T^outer(E_n) whose T^outer(pi_j) components are arrows[j]."""

    # Structure maps

    def proj(self, obj: FPRing) -> RingMorphism:
        return self._lookup("proj", obj) or self._proj(obj)

    def sum(self, obj: FPRing) -> RingMorphism:
        return self._lookup("sum", obj) or self._sum(obj)

    def zero(self, obj: FPRing) -> RingMorphism:
        return self._lookup("zero", obj) or self._zero(obj)

    def neg(self, obj: FPRing) -> RingMorphism:
        return self._lookup("neg", obj) or self._neg(obj)

    def lift(self, obj: FPRing) -> RingMorphism:
        return self._lookup("lift", obj) or self._lift(obj)

    def flip(self, obj: FPRing) -> RingMorphism:
        return self._lookup("flip", obj) or self._flip(obj)

    @abstractmethod
    def _proj(self, obj: FPRing) -> RingMorphism: ...

    @abstractmethod
    def _sum(self, obj: FPRing) -> RingMorphism: ...

    @abstractmethod
    def _zero(self, obj: FPRing) -> RingMorphism: ...

    @abstractmethod
    def _neg(self, obj: FPRing) -> RingMorphism: ...

    @abstractmethod
    def _lift(self, obj: FPRing) -> RingMorphism: ...

    @abstractmethod
    def _flip(self, obj: FPRing) -> RingMorphism: ...

    def nu(self, obj: FPRing) -> RingMorphism:
        """T(+) after <lift pi_1, 0_T pi_2>: T_2(A) -> T^2(A)."""
        w2 = self.width(obj, 2)
        pi1, pi2 = w2.projections
        cone = self.pair(
            w2,
            [self.compose(self.lift(obj), pi1), self.compose(self.zero(self.tangent(obj)), pi2)],
            outer=1,
        )
        return self.compose(self.apply(self.sum(obj)), cone)

    def _check_cone(self, product: FibreProduct, arrows: Sequence[RingMorphism], outer: int) -> FPRing:
        if len(arrows) != product.n:
            raise PairingError(f"{len(arrows)} arrows for a {product.n}-fold fibre product")
        expected = self.tangent_power(product.fibre, outer)
        sources = {self.source(a) for a in arrows}
        if len(sources) != 1:
            raise PairingError("cone arrows start at different objects")
        for a in arrows:
            if self.target(a) != expected:
                raise PairingError(f"cone arrow ends at {self.target(a)}, expected {expected}")
        return sources.pop()

    def _verify_cone(self, product: FibreProduct, arrows: Sequence[RingMorphism], outer: int, result: RingMorphism) -> RingMorphism:
        for j, arrow in enumerate(arrows):
            leg = self.compose(self.apply_power(product.projections[j], outer), result)
            if morphism_difference(leg, arrow) is not None:
                raise PairingError(f"cone leg {j + 1} does not agree over the base")
        return result


class PullbackStructure(TangentStructure):
    """Arrows are ring maps in their own direction; fibre products are pullbacks."""

    def compose(self, *arrows: RingMorphism) -> RingMorphism:
        return compose_all(*arrows)

    def source(self, arrow: RingMorphism) -> FPRing:
        return arrow.domain

    def target(self, arrow: RingMorphism) -> FPRing:
        return arrow.codomain

    def pair(self, product: FibreProduct, arrows: Sequence[RingMorphism], outer: int = 0) -> RingMorphism:
        domain = self._check_cone(product, arrows, outer)
        codomain = self.tangent_power(product.ring, outer)
        injections = [self.apply_power(i, outer) for i in product.injections]
        collapse = self.apply_power(product.collapse, outer)
        images = []
        for k in range(len(domain.vars)):
            value = collapse.apply(arrows[0].images[k]).scale(1 - product.n)
            for injection, arrow in zip(injections, arrows):
                value = value + injection.apply(arrow.images[k])
            images.append(value)
        try:
            result = RingMorphism(domain, codomain, tuple(images))
        except IllDefinedMorphismError as e:
            raise PairingError(f"cone does not factor through the pullback: {e}") from e
        return self._verify_cone(product, arrows, outer, result)


class PushoutStructure(TangentStructure):
    """Arrows are ring maps pointing backwards; fibre products are tensor products."""

    def compose(self, *arrows: RingMorphism) -> RingMorphism:
        return compose_all(*reversed(arrows))

    def source(self, arrow: RingMorphism) -> FPRing:
        return arrow.codomain

    def target(self, arrow: RingMorphism) -> FPRing:
        return arrow.domain

    def pair(self, product: FibreProduct, arrows: Sequence[RingMorphism], outer: int = 0) -> RingMorphism:
        codomain = self._check_cone(product, arrows, outer)
        domain = self.tangent_power(product.ring, outer)
        injections = [self.apply_power(i, outer) for i in product.injections]
        assignment = {}
        for injection, arrow in zip(injections, arrows):
            for name, image in zip(injection.domain.vars, injection.images):
                target = image.as_variable()
                if target is not None and target not in assignment:
                    assignment[target] = arrow.image(name)
        missing = [v for v in domain.vars if v not in assignment]
        if missing:
            raise PairingError(f"copairing leaves {', '.join(missing)} unassigned")
        try:
            result = RingMorphism.from_images(domain, codomain, assignment)
        except IllDefinedMorphismError as e:
            raise PairingError(f"cone does not factor through the pushout: {e}") from e
        return self._verify_cone(product, arrows, outer, result)


def tangent_diagrams(S: TangentStructure, A: FPRing) -> List[Diagram]:
    """Every equation of the tangent-structure axioms (with negatives) at the object A."""
    c = S.compose
    TA = S.tangent(A)
    TTA = S.tangent(TA)
    w2 = S.width(A, 2)
    w3 = S.width(A, 3)
    pi1, pi2 = w2.projections
    rho1, rho2, rho3 = w3.projections
    p, add, z, neg = S.proj(A), S.sum(A), S.zero(A), S.neg(A)
    lift, flip = S.lift(A), S.flip(A)
    one_T = S.identity(TA)

    def pair2(first, second, outer=0):
        return S.pair(w2, [first, second], outer)

    def nu():
        return c(S.apply(add), pair2(c(lift, pi1), c(S.zero(TA), pi2), outer=1))

    def flip_sum_lhs():
        wt = S.width(TA, 2)
        cone = S.pair(wt, [c(flip, S.apply(pi1)), c(flip, S.apply(pi2))])
        return c(S.sum(TA), cone)

    return [
        Diagram("T1.sum-proj.1", lambda: c(p, add), lambda: c(p, pi1)),
        Diagram("T1.sum-proj.2", lambda: c(p, add), lambda: c(p, pi2)),
        Diagram("T1.zero-proj", lambda: c(p, z), lambda: S.identity(A)),
        Diagram(
            "T1.sum-assoc",
            lambda: c(add, pair2(c(add, S.pair(w2, [rho1, rho2])), rho3)),
            lambda: c(add, pair2(rho1, c(add, S.pair(w2, [rho2, rho3])))),
        ),
        Diagram("T1.sum-unit.left", lambda: c(add, pair2(c(z, p), one_T)), lambda: one_T),
        Diagram("T1.sum-unit.right", lambda: c(add, pair2(one_T, c(z, p))), lambda: one_T),
        Diagram("T1.sum-comm", lambda: c(add, pair2(pi2, pi1)), lambda: add),
        Diagram("T2.lift-proj", lambda: c(S.apply(p), lift), lambda: c(z, p)),
        Diagram(
            "T2.lift-sum",
            lambda: c(S.apply(add), pair2(c(lift, pi1), c(lift, pi2), outer=1)),
            lambda: c(lift, add),
        ),
        Diagram("T2.lift-zero", lambda: c(lift, z), lambda: c(S.apply(z), z)),
        Diagram("T3.flip-proj", lambda: c(S.proj(TA), flip), lambda: S.apply(p)),
        Diagram("T3.flip-sum", flip_sum_lhs, lambda: c(flip, S.apply(add))),
        Diagram("T3.flip-zero", lambda: c(flip, S.apply(z)), lambda: S.zero(TA)),
        Diagram("T4.involution", lambda: c(flip, flip), lambda: S.identity(TTA)),
        Diagram(
            "T4.yang-baxter",
            lambda: c(S.flip(TA), S.apply(flip), S.flip(TA)),
            lambda: c(S.apply(flip), S.flip(TA), S.apply(flip)),
        ),
        Diagram("T5.lift-lift", lambda: c(S.lift(TA), lift), lambda: c(S.apply(lift), lift)),
        Diagram("T5.flip-lift", lambda: c(flip, lift), lambda: lift),
        Diagram(
            "T5.lift-flip",
            lambda: c(S.flip(TA), S.apply(flip), S.lift(TA)),
            lambda: c(S.apply(lift), flip),
        ),
        Diagram("T6.square.1", lambda: c(S.apply(p), nu()), lambda: c(z, p, pi1)),
        Diagram("T6.square.2", lambda: c(S.apply(p), nu()), lambda: c(z, p, pi2)),
        Diagram("TN.neg-proj", lambda: c(p, neg), lambda: p),
        Diagram("TN.inverse.right", lambda: c(add, pair2(one_T, neg)), lambda: c(z, p)),
        Diagram("TN.inverse.left", lambda: c(add, pair2(neg, one_T)), lambda: c(z, p)),
    ]


def check_axioms(S: TangentStructure, A: FPRing) -> AxiomReport:
    report = run_diagrams(f"{S.name} tangent structure on {A}", tangent_diagrams(S, A))
    logger.info("checked %d diagrams on %s: %d failures", len(report.entries), A, len(report.failures))
    return report


def naturality_diagrams(S: TangentStructure, f: RingMorphism) -> List[Diagram]:
    """Naturality squares of the six structure maps along an arrow f: A -> B."""
    c = S.compose
    A, B = S.source(f), S.target(f)
    Tf = S.apply(f)

    def width_map():
        wa, wb = S.width(A, 2), S.width(B, 2)
        return S.pair(wb, [c(Tf, wa.projections[0]), c(Tf, wa.projections[1])])

    return [
        Diagram("nat.proj", lambda: c(S.proj(B), Tf), lambda: c(f, S.proj(A))),
        Diagram("nat.zero", lambda: c(S.zero(B), f), lambda: c(Tf, S.zero(A))),
        Diagram("nat.sum", lambda: c(S.sum(B), width_map()), lambda: c(Tf, S.sum(A))),
        Diagram("nat.neg", lambda: c(S.neg(B), Tf), lambda: c(Tf, S.neg(A))),
        Diagram("nat.lift", lambda: c(S.lift(B), Tf), lambda: c(S.apply(Tf), S.lift(A))),
        Diagram("nat.flip", lambda: c(S.flip(B), S.apply(Tf)), lambda: c(S.apply(Tf), S.flip(A))),
    ]


def check_naturality(S: TangentStructure, f: RingMorphism) -> AxiomReport:
    return run_diagrams(f"naturality along {f}", naturality_diagrams(S, f))
