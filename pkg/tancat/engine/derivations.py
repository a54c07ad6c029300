"""Derivations of finitely presented rings and their Lie bracket."""

from dataclasses import dataclass
from typing import Mapping, Tuple

from tancat.engine.errors import DomainMismatchError, IllDefinedMorphismError, VariableMismatchError
from tancat.engine.polynomial import Poly
from tancat.engine.rings import FPRing


def _leibniz(images: Tuple[Poly, ...], p: Poly) -> Poly:
    total = Poly.zero(p.vars)
    for name, image in zip(p.vars, images):
        partial = p.derivative(name)
        if not partial.is_zero():
            total = total + partial * image
    return total


@dataclass(frozen=True)
class Derivation:
    """A derivation D of ring, stored as the values D(x_i)."""

    ring: FPRing
    images: Tuple[Poly, ...]

    def __post_init__(self):
        if len(self.images) != len(self.ring.vars):
            raise VariableMismatchError(f"{len(self.images)} values for {len(self.ring.vars)} variables")
        object.__setattr__(self, "images", tuple(self.ring.normal_form(i) for i in self.images))
        for relation in self.ring.relations:
            value = self.ring.normal_form(_leibniz(self.images, relation))
            if not value.is_zero():
                raise IllDefinedMorphismError(f"D({relation}) = {value} is not in the ideal")

    @classmethod
    def from_images(cls, ring: FPRing, images: Mapping[str, Poly]) -> "Derivation":
        return cls(ring, tuple(images.get(v, ring.zero()) for v in ring.vars))

    @classmethod
    def zero(cls, ring: FPRing) -> "Derivation":
        return cls(ring, tuple(ring.zero() for _ in ring.vars))

    def __call__(self, p: Poly) -> Poly:
        return leibniz_extend(self, p)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{v} |-> {i}" for v, i in zip(self.ring.vars, self.images)) + "}"


def leibniz_extend(D: Derivation, p: Poly) -> Poly:
    """D(p) = sum_i dp/dx_i * D(x_i), in normal form."""
    if p.vars != D.ring.vars:
        raise VariableMismatchError(f"{p} is not over {D.ring.vars}")
    return D.ring.normal_form(_leibniz(D.images, p))


def lie_bracket(D1: Derivation, D2: Derivation) -> Derivation:
    """[D1, D2] = D1 D2 - D2 D1."""
    if D1.ring != D2.ring:
        raise DomainMismatchError("derivations live on different rings")
    images = tuple(
        leibniz_extend(D1, b) - leibniz_extend(D2, a) for a, b in zip(D1.images, D2.images)
    )
    return Derivation(D1.ring, images)
