"""
The dual-numbers tangent structure on commutative rings.

T(R) = R[eps]/(eps^2). Iterating adds one fresh nilpotent per level with no
mixed relation, so T^2(R) = R[eps][eps__2]. The n-fold pullback T_n(R) adds
eps_1..eps_n with eps_i eps_j = 0 for all i, j.

Provides:
1. dual_numbers, dual_tower, dual_width and apply_T
2. the six structure maps proj, add, zero, neg, lift, flip and nu
3. check_tangent_axioms
4. the correspondence between vector fields and derivations
"""

import functools
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

from tancat.config import DUAL_VAR, WIDTH_VAR
from tancat.engine.derivations import Derivation
from tancat.engine.errors import DomainMismatchError, VariableMismatchError
from tancat.engine.polynomial import Poly
from tancat.engine.rings import FPRing, RingMorphism, compose, fresh_name, identity
from tancat.engine.structure import AxiomReport, FibreProduct, PullbackStructure, check_axioms

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DualTower:
    """T^height(base) with the nilpotent added at each level, innermost first."""

    base: FPRing
    height: int
    ring: FPRing
    eps_names: Tuple[str, ...]


@dataclass(frozen=True)
class DualWidth:
    """T_n(base) with its nilpotents eps_1..eps_n."""

    base: FPRing
    n: int
    ring: FPRing
    eps_names: Tuple[str, ...]


def tangent_var(ring: FPRing) -> str:
    """Name of the nilpotent that T adds to ring."""
    return fresh_name(DUAL_VAR, ring.vars)


@functools.lru_cache(maxsize=1024)
def dual_numbers(R: FPRing) -> DualTower:
    t = tangent_var(R)
    variables = R.vars + (t,)
    relations = [r.embed(variables) for r in R.relations]
    relations.append(Poly.variable(variables, t) ** 2)
    return DualTower(R, 1, FPRing(variables, relations), (t,))


def dual_tower(R: FPRing, height: int) -> DualTower:
    ring, names = R, ()
    for _ in range(height):
        tower = dual_numbers(ring)
        names += tower.eps_names
        ring = tower.ring
    return DualTower(R, height, ring, names)


@functools.lru_cache(maxsize=1024)
def dual_width(R: FPRing, n: int) -> DualWidth:
    if n < 1:
        raise ValueError("width must be positive")
    names = []
    taken = list(R.vars)
    for j in range(1, n + 1):
        names.append(fresh_name(WIDTH_VAR.format(j=j), taken))
        taken.append(names[-1])
    variables = R.vars + tuple(names)
    relations = [r.embed(variables) for r in R.relations]
    for i in range(n):
        for j in range(i, n):
            relations.append(Poly.variable(variables, names[i]) * Poly.variable(variables, names[j]))
    return DualWidth(R, n, FPRing(variables, relations), tuple(names))


def split_dual(p: Poly, R: FPRing) -> Tuple[Poly, Poly]:
    """Writes p in T(R) as a + b*eps with a, b over R.vars."""
    T = dual_numbers(R).ring
    p = T.normal_form(p)
    t = len(R.vars)
    parts: Dict[int, Dict[tuple, object]] = {0: {}, 1: {}}
    for m, c in p.terms.items():
        if m[t] > 1:
            raise VariableMismatchError(f"{p} is not reduced in {T}")
        parts[m[t]][m[:t]] = c
    return Poly(R.vars, parts[0]), Poly(R.vars, parts[1])


def _tower_images(source: FPRing, target: FPRing, images: Dict[str, Poly]) -> RingMorphism:
    full = {v: images.get(v, Poly.variable(target.vars, v)) for v in source.vars}
    return RingMorphism.from_images(source, target, full)


def apply_T(f: RingMorphism) -> RingMorphism:
    """T(f)(a + b eps) = f(a) + f(b) eps."""
    source = dual_numbers(f.domain).ring
    target = dual_numbers(f.codomain).ring
    images = [i.embed(target.vars) for i in f.images]
    images.append(Poly.variable(target.vars, tangent_var(f.codomain)))
    return RingMorphism(source, target, tuple(images))


def proj(R: FPRing) -> RingMorphism:
    T = dual_numbers(R).ring
    images = {v: Poly.variable(R.vars, v) for v in R.vars}
    images[tangent_var(R)] = R.zero()
    return RingMorphism.from_images(T, R, images)


def zero(R: FPRing) -> RingMorphism:
    T = dual_numbers(R).ring
    return RingMorphism(R, T, tuple(Poly.variable(T.vars, v) for v in R.vars))


def add(R: FPRing) -> RingMorphism:
    width = dual_width(R, 2)
    T = dual_numbers(R).ring
    eps = T.var(tangent_var(R))
    return _tower_images(width.ring, T, {name: eps for name in width.eps_names})


def neg(R: FPRing) -> RingMorphism:
    T = dual_numbers(R).ring
    t = tangent_var(R)
    return _tower_images(T, T, {t: -T.var(t)})


def lift(R: FPRing) -> RingMorphism:
    T = dual_numbers(R).ring
    TT = dual_numbers(T).ring
    inner, outer = tangent_var(R), tangent_var(T)
    return _tower_images(T, TT, {inner: TT.var(inner) * TT.var(outer)})


def flip(R: FPRing) -> RingMorphism:
    T = dual_numbers(R).ring
    TT = dual_numbers(T).ring
    inner, outer = tangent_var(R), tangent_var(T)
    return _tower_images(TT, TT, {inner: TT.var(outer), outer: TT.var(inner)})


def width_projection(R: FPRing, n: int, j: int) -> RingMorphism:
    """pi_j: T_n(R) -> T(R), eps_j |-> eps and every other eps_i |-> 0 (j is 1-based)."""
    width = dual_width(R, n)
    T = dual_numbers(R).ring
    images = {name: (T.var(tangent_var(R)) if k == j - 1 else T.zero()) for k, name in enumerate(width.eps_names)}
    return _tower_images(width.ring, T, images)


def width_injection(R: FPRing, n: int, j: int) -> RingMorphism:
    """The ring map T(R) -> T_n(R), eps |-> eps_j."""
    width = dual_width(R, n)
    T = dual_numbers(R).ring
    return _tower_images(T, width.ring, {tangent_var(R): width.ring.var(width.eps_names[j - 1])})


class DualNumbers(PullbackStructure):
    """The tangent structure of dual numbers on CRING."""

    name = "ring"

    def tangent(self, obj: FPRing) -> FPRing:
        return dual_numbers(obj).ring

    def apply(self, arrow: RingMorphism) -> RingMorphism:
        return apply_T(arrow)

    def width(self, obj: FPRing, n: int) -> FibreProduct:
        return _width_product(obj, n)

    def _proj(self, obj):
        return proj(obj)

    def _sum(self, obj):
        return add(obj)

    def _zero(self, obj):
        return zero(obj)

    def _neg(self, obj):
        return neg(obj)

    def _lift(self, obj):
        return lift(obj)

    def _flip(self, obj):
        return flip(obj)


@functools.lru_cache(maxsize=1024)
def _width_product(R: FPRing, n: int) -> FibreProduct:
    width = dual_width(R, n)
    T = dual_numbers(R).ring
    return FibreProduct(
        ring=width.ring,
        n=n,
        fibre=T,
        base=R,
        projections=tuple(width_projection(R, n, j) for j in range(1, n + 1)),
        injections=tuple(width_injection(R, n, j) for j in range(1, n + 1)),
        collapse=_tower_images(T, width.ring, {tangent_var(R): width.ring.zero()}),
    )


DUAL = DualNumbers()


def nu(R: FPRing) -> RingMorphism:
    """T(+) after <lift pi_1, 0_T pi_2>, the map T_2(R) -> T^2(R)."""
    return DUAL.nu(R)


def check_tangent_axioms(R: FPRing, overrides: Optional[Dict[str, RingMorphism]] = None) -> AxiomReport:
    """
    Checks every tangent-structure equation of the dual numbers at R.

    Args:
        R: The object to check at
        overrides: Optional replacement structure maps at R only, keyed by
            "proj", "sum", "zero", "neg", "lift" or "flip"

    Returns:
        An AxiomReport with one entry per diagram
    """
    structure: PullbackStructure = DUAL
    for name, arrow in (overrides or {}).items():
        structure = structure.with_override(name, R, arrow)
    return check_axioms(structure, R)


@dataclass(frozen=True)
class VectorFieldDual:
    """A section v: R -> T(R) of the projection."""

    ring: FPRing
    section: RingMorphism

    def __post_init__(self):
        if self.section.domain != self.ring or self.section.codomain != dual_numbers(self.ring).ring:
            raise DomainMismatchError("a vector field is a map R -> T(R)")
        if compose(proj(self.ring), self.section) != identity(self.ring):
            raise DomainMismatchError("p after the section is not the identity")


def vf_to_derivation(v: VectorFieldDual) -> Derivation:
    """D_v(x) is the eps-coefficient of v(x)."""
    return Derivation(v.ring, tuple(split_dual(i, v.ring)[1] for i in v.section.images))


def derivation_to_vf(D: Derivation) -> VectorFieldDual:
    """v_D(x) = x + D(x) eps."""
    T = dual_numbers(D.ring).ring
    eps = T.var(tangent_var(D.ring))
    images = tuple(T.var(x) + image.embed(T.vars) * eps for x, image in zip(D.ring.vars, D.images))
    return VectorFieldDual(D.ring, RingMorphism(D.ring, T, images))


def dual_base(ring: FPRing) -> FPRing:
    """Recovers R from a ring presented exactly as T(R)."""
    if not ring.vars:
        raise DomainMismatchError(f"{ring} is not a ring of dual numbers")
    names = ring.vars[:-1]
    t = len(names)
    relations = []
    for g in ring.basis:
        if all(m[t] == 0 for m in g.terms):
            relations.append(Poly(names, {m[:t]: c for m, c in g.terms.items()}))
    base = FPRing(names, relations)
    if ring.vars[-1] != tangent_var(base) or dual_numbers(base).ring != ring:
        raise DomainMismatchError(f"{ring} is not presented as dual numbers over a ring")
    return base
