"""
Finitely presented commutative rings over QQ and their morphisms.

An FPRing is an ordered variable list together with an ideal whose reduced
Groebner basis is computed when the ring is built. Two rings are equal when
they have the same variables and the same reduced basis, which is how every
"same object" question in the engine is answered.

A RingMorphism is given by one image per domain variable and refuses to be
built unless the images kill every domain relation.
"""

import functools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from tancat.config import COLLISION_SEPARATOR, MONOMIAL_ORDER
from tancat.engine.errors import (
    DomainMismatchError,
    IllDefinedMorphismError,
    InvalidPointError,
    VariableMismatchError,
)
from tancat.engine.groebner import buchberger
from tancat.engine.groebner import normal_form as reduce_by
from tancat.engine.polynomial import Poly, Scalar, format_rational

logger = logging.getLogger(__name__)


def fresh_name(name: str, taken: Iterable[str]) -> str:
    """Returns name, or name__2, name__3, ... whichever is first not taken."""
    taken = set(taken)
    if name not in taken:
        return name
    k = 2
    while f"{name}{COLLISION_SEPARATOR}{k}" in taken:
        k += 1
    return f"{name}{COLLISION_SEPARATOR}{k}"


@functools.lru_cache(maxsize=4096)
def _reduced_basis(variables: Tuple[str, ...], relations: Tuple[Poly, ...]) -> Tuple[Poly, ...]:
    return buchberger(relations, variables)


@dataclass(frozen=True)
class Ideal:
    """Generators together with their reduced Groebner basis."""

    generators: Tuple[Poly, ...]
    groebner: Tuple[Poly, ...]
    order: str = MONOMIAL_ORDER


class FPRing:
    """QQ[vars] / <relations>, immutable."""

    __slots__ = ("vars", "relations", "basis", "_hash")

    def __init__(self, variables: Iterable[str], relations: Iterable[Poly] = ()):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise VariableMismatchError(f"duplicate variable names in {variables}")
        relations = tuple(relations)
        for r in relations:
            if r.vars != variables:
                raise VariableMismatchError(f"relation {r} is over {r.vars}, ring is over {variables}")
        object.__setattr__(self, "vars", variables)
        object.__setattr__(self, "relations", tuple(r for r in relations if not r.is_zero()))
        object.__setattr__(self, "basis", _reduced_basis(variables, self.relations))
        object.__setattr__(self, "_hash", hash((variables, self.basis)))

    def __setattr__(self, name, value):
        raise AttributeError("FPRing is immutable")

    @classmethod
    def free(cls, variables: Iterable[str]) -> "FPRing":
        return cls(variables)

    @property
    def ideal(self) -> Ideal:
        return Ideal(self.relations, self.basis)

    @property
    def order(self) -> str:
        return MONOMIAL_ORDER

    def __eq__(self, other) -> bool:
        if not isinstance(other, FPRing):
            return NotImplemented
        return self.vars == other.vars and self.basis == other.basis

    def __hash__(self) -> int:
        return self._hash

    # Elements

    def var(self, name: str) -> Poly:
        return Poly.variable(self.vars, name)

    def gens(self) -> Tuple[Poly, ...]:
        return tuple(Poly.variable(self.vars, v) for v in self.vars)

    def constant(self, value: Scalar) -> Poly:
        return Poly.constant(self.vars, value)

    def zero(self) -> Poly:
        return Poly.zero(self.vars)

    def one(self) -> Poly:
        return Poly.constant(self.vars, 1)

    def normal_form(self, p: Poly) -> Poly:
        if p.vars != self.vars:
            raise VariableMismatchError(f"{p} is over {p.vars}, ring is over {self.vars}")
        return reduce_by(p, self.basis)

    def contains(self, p: Poly) -> bool:
        """Ideal membership."""
        return self.normal_form(p).is_zero()

    def is_free(self) -> bool:
        return not self.basis

    def with_relations(self, extra: Iterable[Poly]) -> "FPRing":
        return FPRing(self.vars, self.relations + tuple(extra))

    def __str__(self) -> str:
        head = f"QQ[{', '.join(self.vars)}]"
        if not self.basis:
            return head
        return f"{head} / ({', '.join(str(g) for g in self.basis)})"

    def __repr__(self) -> str:
        return f"FPRing({self})"


def normal_form(p: Poly, ring: FPRing) -> Poly:
    return ring.normal_form(p)


def ideal_equal(a: FPRing, b: FPRing) -> bool:
    """Compares two presentations over the same variables by their reduced bases."""
    if a.vars != b.vars:
        raise VariableMismatchError(f"cannot compare ideals over {a.vars} and {b.vars}")
    return a.basis == b.basis


@dataclass(frozen=True)
class RingMorphism:
    """A ring map given by generator images, checked for well-definedness."""

    domain: FPRing
    codomain: FPRing
    images: Tuple[Poly, ...]
    checked: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if len(self.images) != len(self.domain.vars):
            raise VariableMismatchError(
                f"{len(self.images)} images for {len(self.domain.vars)} domain variables"
            )
        object.__setattr__(self, "images", tuple(self.codomain.normal_form(i) for i in self.images))
        if self.checked:
            for relation in self.domain.relations:
                image = self.codomain.normal_form(relation.substitute(self.images, self.codomain.vars))
                if not image.is_zero():
                    raise IllDefinedMorphismError(
                        f"relation {relation} maps to {image}, not 0, in {self.codomain}"
                    )

    @classmethod
    def from_images(
        cls, domain: FPRing, codomain: FPRing, images: Mapping[str, Poly], checked: bool = True
    ) -> "RingMorphism":
        """Builds a morphism from a name -> image map covering every domain variable."""
        missing = [v for v in domain.vars if v not in images]
        if missing:
            raise VariableMismatchError(f"no image given for {', '.join(missing)}")
        extra = [v for v in images if v not in domain.vars]
        if extra:
            raise VariableMismatchError(f"images given for unknown variables {', '.join(extra)}")
        return cls(domain, codomain, tuple(images[v] for v in domain.vars), checked)

    def image(self, name: str) -> Poly:
        if name not in self.domain.vars:
            raise VariableMismatchError(f"{name!r} is not a domain variable")
        return self.images[self.domain.vars.index(name)]

    def apply(self, p: Poly) -> Poly:
        if p.vars != self.domain.vars:
            raise VariableMismatchError(f"{p} is not over the domain variables {self.domain.vars}")
        return self.codomain.normal_form(p.substitute(self.images, self.codomain.vars))

    __call__ = apply

    def as_dict(self) -> Dict[str, str]:
        return {v: str(i) for v, i in zip(self.domain.vars, self.images)}

    def __str__(self) -> str:
        return "{" + ", ".join(f"{v} |-> {i}" for v, i in zip(self.domain.vars, self.images)) + "}"


def identity(ring: FPRing) -> RingMorphism:
    return RingMorphism(ring, ring, ring.gens(), checked=False)


def inclusion(source: FPRing, target: FPRing, renaming: Optional[Mapping[str, str]] = None) -> RingMorphism:
    """Sends each source variable to the (renamed) variable of the same name in target."""
    renaming = renaming or {}
    images = tuple(target.var(renaming.get(v, v)) for v in source.vars)
    return RingMorphism(source, target, images)


def compose(g: RingMorphism, f: RingMorphism) -> RingMorphism:
    """g after f."""
    if f.codomain != g.domain:
        raise DomainMismatchError(f"cannot compose: {f.codomain} is not {g.domain}")
    return RingMorphism(f.domain, g.codomain, tuple(g.apply(i) for i in f.images), checked=False)


def compose_all(*maps: RingMorphism) -> RingMorphism:
    """compose_all(h, g, f) = h after g after f."""
    result = maps[-1]
    for m in reversed(maps[:-1]):
        result = compose(m, result)
    return result


def morphism_difference(f: RingMorphism, g: RingMorphism) -> Optional[Tuple[str, Poly, Poly]]:
    """The first domain variable on which f and g differ, with both normal forms."""
    if f.domain != g.domain or f.codomain != g.codomain:
        raise DomainMismatchError("morphisms have different signatures")
    for name, a, b in zip(f.domain.vars, f.images, g.images):
        if a != b:
            return name, a, b
    return None


def morphisms_equal(f: RingMorphism, g: RingMorphism) -> bool:
    return morphism_difference(f, g) is None


@dataclass(frozen=True)
class Tensor:
    """A pushout e1 (x)_base e2 with its two injections."""

    ring: FPRing
    left: RingMorphism
    right: RingMorphism


def tensor_over(base: FPRing, e1: FPRing, e2: FPRing, q1: RingMorphism, q2: RingMorphism) -> Tensor:
    """
    Presents the pushout of q1: base -> e1 and q2: base -> e2.

    Variables of e2 are renamed on collision (name__2, ...). When q2 sends a
    base variable b to a bare variable v of e2, v is not copied but replaced
    by q1(b); every other base variable contributes the glue relation
    q1(b) - q2(b).

    Args:
        base: The ring both factors are algebras over
        e1: The left factor
        e2: The right factor
        q1: Structure map base -> e1
        q2: Structure map base -> e2

    Returns:
        A Tensor with the presentation and the injections e1 -> ring, e2 -> ring
    """
    if q1.domain != base or q2.domain != base:
        raise DomainMismatchError("structure maps must start at the base ring")
    if q1.codomain != e1 or q2.codomain != e2:
        raise DomainMismatchError("structure maps must end at the factors")

    eliminated: Dict[str, str] = {}
    for b in base.vars:
        target = q2.image(b).as_variable()
        if target is not None and target not in eliminated:
            eliminated[target] = b

    names: List[str] = list(e1.vars)
    renamed: Dict[str, str] = {}
    for v in e2.vars:
        if v not in eliminated:
            renamed[v] = fresh_name(v, names)
            names.append(renamed[v])
    variables = tuple(names)

    left_images = tuple(Poly.variable(variables, v) for v in e1.vars)
    right_images = []
    for v in e2.vars:
        if v in eliminated:
            right_images.append(q1.image(eliminated[v]).embed(variables))
        else:
            right_images.append(Poly.variable(variables, renamed[v]))
    right_images = tuple(right_images)

    relations = [r.embed(variables) for r in e1.relations]
    relations += [r.substitute(right_images, variables) for r in e2.relations]
    used = set(eliminated.values())
    for b in base.vars:
        if b not in used:
            glue = q1.image(b).embed(variables) - q2.image(b).substitute(right_images, variables)
            relations.append(glue)

    ring = FPRing(variables, relations)
    logger.debug("tensor product over %s has variables %s", base, variables)
    return Tensor(ring, RingMorphism(e1, ring, left_images), RingMorphism(e2, ring, right_images))


@dataclass(frozen=True)
class Point:
    """A rational point of a ring, i.e. a morphism to QQ."""

    ring: FPRing
    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        coords = tuple(Fraction(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) != len(self.ring.vars):
            raise InvalidPointError(f"{len(coords)} coordinates for {len(self.ring.vars)} variables")
        for relation in self.ring.relations:
            value = relation.evaluate(coords)
            if value:
                raise InvalidPointError(f"relation {relation} is {format_rational(value)} at {self}")

    def __str__(self) -> str:
        return "(" + ", ".join(format_rational(c) for c in self.coords) + ")"


def evaluate(p: Poly, pt: Point) -> Fraction:
    if p.vars != pt.ring.vars:
        raise VariableMismatchError(f"{p} is not over {pt.ring.vars}")
    return p.evaluate(pt.coords)
