"""
The Kaehler-differentials tangent structure on affine schemes (CRING^op).

T(R) adjoins one differential d_x per variable and the total differentials
of the relations. Applying T again uses the next free prefix, so
T^2(R) has variables x, d_x, dp_x, dpd_x. Fibre products are tensor
products over R, and every structure map is a ring map in the direction
opposite to the tangent-category arrow it represents.
"""

import functools
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from tancat.config import KAHLER_PREFIX
from tancat.engine.dual import dual_base, dual_numbers, split_dual, tangent_var
from tancat.engine.errors import DomainMismatchError, VariableMismatchError
from tancat.engine.polynomial import Poly
from tancat.engine.rings import (
    FPRing,
    Point,
    RingMorphism,
    compose,
    evaluate,
    fresh_name,
    identity,
    tensor_over,
)
from tancat.engine.structure import AxiomReport, FibreProduct, PushoutStructure, check_axioms

logger = logging.getLogger(__name__)


def _prefixes():
    for k in itertools.count():
        yield KAHLER_PREFIX[:-1] + "p" * k + "_"


@functools.lru_cache(maxsize=1024)
def differential_names(variables: Tuple[str, ...]) -> Tuple[str, ...]:
    """
    Names of the differentials T adds for the given variables.

    The first prefix ("d_", "dp_", "dpp_", ...) no variable already starts
    with is used; a variable that is itself a first-level differential d_x
    gets the contracted name dp + d_x = dpd_x.
    """
    prefix = next(p for p in _prefixes() if not any(v.startswith(p) for v in variables))
    taken = list(variables)
    names = []
    for v in variables:
        if prefix != KAHLER_PREFIX and v.startswith(KAHLER_PREFIX):
            candidate = prefix[:-1] + v
        else:
            candidate = prefix + v
        names.append(fresh_name(candidate, taken))
        taken.append(names[-1])
    return tuple(names)


@dataclass(frozen=True)
class KahlerTangent:
    """T(base): the base relations and their total differentials."""

    base: FPRing
    ring: FPRing
    dvars: Tuple[str, ...]

    def d(self, name: str) -> str:
        return self.dvars[self.base.vars.index(name)]


@dataclass(frozen=True)
class KahlerSquare:
    """T^2(base) = T(T(base)) with the names of each kind of variable."""

    base: FPRing
    ring: FPRing
    dvars: Tuple[str, ...]
    dpvars: Tuple[str, ...]
    dpdvars: Tuple[str, ...]


@dataclass(frozen=True)
class TangentSpace:
    base: FPRing
    point: Point
    ring: FPRing


def total_differential(p: Poly, base: FPRing) -> Poly:
    """d(p) = sum_i dp/dx_i d_x_i, over the variables of T(base)."""
    if p.vars != base.vars:
        raise VariableMismatchError(f"{p} is not over {base.vars}")
    names = differential_names(base.vars)
    variables = base.vars + names
    total = Poly.zero(variables)
    for x, dx in zip(base.vars, names):
        partial = p.derivative(x)
        if not partial.is_zero():
            total = total + partial.embed(variables) * Poly.variable(variables, dx)
    return total


@functools.lru_cache(maxsize=1024)
def kahler_tangent(R: FPRing) -> KahlerTangent:
    names = differential_names(R.vars)
    variables = R.vars + names
    relations = [r.embed(variables) for r in R.relations]
    relations += [total_differential(r, R) for r in R.relations]
    return KahlerTangent(R, FPRing(variables, relations), names)


def kahler_square(R: FPRing) -> KahlerSquare:
    inner = kahler_tangent(R)
    outer = kahler_tangent(inner.ring)
    n = len(R.vars)
    return KahlerSquare(R, outer.ring, inner.dvars, outer.dvars[:n], outer.dvars[n:])


def second_differential(p: Poly, base: FPRing) -> Poly:
    """d'd(p) over the variables of T^2(base)."""
    inner = kahler_tangent(base)
    return total_differential(total_differential(p, base), inner.ring)


def kahler_apply(f: RingMorphism) -> RingMorphism:
    """T(f): x |-> f(x), d_x |-> d(f(x))."""
    source = kahler_tangent(f.domain)
    target = kahler_tangent(f.codomain)
    images = [i.embed(target.ring.vars) for i in f.images]
    images += [total_differential(i, f.codomain) for i in f.images]
    return RingMorphism(source.ring, target.ring, tuple(images))


def tensor_power(base: FPRing, fibre: FPRing, q: RingMorphism, n: int) -> Tuple[FPRing, Tuple[RingMorphism, ...]]:
    """fibre (x)_base ... (x)_base fibre, n factors, with the n injections."""
    ring, injections, structure = fibre, [identity(fibre)], q
    for _ in range(1, n):
        t = tensor_over(base, ring, fibre, structure, q)
        injections = [compose(t.left, i) for i in injections] + [t.right]
        structure = compose(t.left, structure)
        ring = t.ring
    return ring, tuple(injections)


def _images(source: FPRing, target: FPRing, images: Dict[str, Poly]) -> RingMorphism:
    full = {v: images.get(v, Poly.variable(target.vars, v)) for v in source.vars}
    return RingMorphism.from_images(source, target, full)


def _proj(R: FPRing) -> RingMorphism:
    T = kahler_tangent(R).ring
    return RingMorphism(R, T, tuple(T.var(v) for v in R.vars))


def _zero(R: FPRing) -> RingMorphism:
    kt = kahler_tangent(R)
    return _images(kt.ring, R, {d: R.zero() for d in kt.dvars})


def _sum(R: FPRing) -> RingMorphism:
    kt = kahler_tangent(R)
    product = _width_product(R, 2)
    left, right = product.injections
    images = {d: left.image(d) + right.image(d) for d in kt.dvars}
    images.update({v: left.image(v) for v in R.vars})
    return RingMorphism.from_images(kt.ring, product.ring, images)


def _neg(R: FPRing) -> RingMorphism:
    kt = kahler_tangent(R)
    return _images(kt.ring, kt.ring, {d: -kt.ring.var(d) for d in kt.dvars})


def _lift(R: FPRing) -> RingMorphism:
    kt = kahler_tangent(R)
    sq = kahler_square(R)
    T = kt.ring
    images = {v: T.var(v) for v in R.vars}
    images.update({d: T.zero() for d in sq.dvars})
    images.update({d: T.zero() for d in sq.dpvars})
    images.update({dd: T.var(d) for dd, d in zip(sq.dpdvars, sq.dvars)})
    return RingMorphism.from_images(sq.ring, T, images)


def _flip(R: FPRing) -> RingMorphism:
    sq = kahler_square(R)
    T2 = sq.ring
    images = {}
    for d, dp in zip(sq.dvars, sq.dpvars):
        images[d] = T2.var(dp)
        images[dp] = T2.var(d)
    return _images(T2, T2, images)


@functools.lru_cache(maxsize=1024)
def _width_product(R: FPRing, n: int) -> FibreProduct:
    T = kahler_tangent(R).ring
    ring, injections = tensor_power(R, T, _proj(R), n)
    return FibreProduct(ring=ring, n=n, fibre=T, base=R, projections=injections, injections=injections)


@dataclass(frozen=True)
class CoStructure:
    """The structure maps of T at R, as ring maps."""

    proj: RingMorphism
    sum: RingMorphism
    zero: RingMorphism
    neg: RingMorphism
    lift: RingMorphism
    flip: RingMorphism


def co_structure(R: FPRing) -> CoStructure:
    return CoStructure(_proj(R), _sum(R), _zero(R), _neg(R), _lift(R), _flip(R))


class KahlerDifferentials(PushoutStructure):
    """The tangent structure of Kaehler differentials on CRING^op."""

    name = "scheme"

    def tangent(self, obj: FPRing) -> FPRing:
        return kahler_tangent(obj).ring

    def apply(self, arrow: RingMorphism) -> RingMorphism:
        return kahler_apply(arrow)

    def width(self, obj: FPRing, n: int) -> FibreProduct:
        return _width_product(obj, n)

    def _proj(self, obj):
        return _proj(obj)

    def _sum(self, obj):
        return _sum(obj)

    def _zero(self, obj):
        return _zero(obj)

    def _neg(self, obj):
        return _neg(obj)

    def _lift(self, obj):
        return _lift(obj)

    def _flip(self, obj):
        return _flip(obj)


KAHLER = KahlerDifferentials()


def check_costructure_axioms(R: FPRing, overrides: Optional[Dict[str, RingMorphism]] = None) -> AxiomReport:
    """Every tangent-structure equation of T at R, read in CRING^op."""
    structure: PushoutStructure = KAHLER
    for name, arrow in (overrides or {}).items():
        structure = structure.with_override(name, R, arrow)
    return check_axioms(structure, R)


def tangent_space_at(R: FPRing, pt: Point) -> TangentSpace:
    """The linear relations sum_i dp_j/dx_i(pt) d_x_i over the differentials only."""
    if pt.ring != R:
        raise DomainMismatchError("the point lives on another ring")
    names = differential_names(R.vars)
    relations = []
    for p in R.relations:
        terms = {}
        for k, x in enumerate(R.vars):
            value = evaluate(p.derivative(x), pt)
            if value:
                terms[tuple(1 if i == k else 0 for i in range(len(names)))] = value
        relations.append(Poly(names, terms))
    return TangentSpace(R, pt, FPRing(names, relations))


def kahler_base(ring: FPRing) -> FPRing:
    """Recovers R from a ring presented exactly as T(R)."""
    if len(ring.vars) % 2:
        raise DomainMismatchError(f"{ring} is not a Kaehler tangent presentation")
    names = ring.vars[: len(ring.vars) // 2]
    n = len(names)
    relations = []
    for g in ring.basis:
        if all(not any(m[n:]) for m in g.terms):
            relations.append(Poly(names, {m[:n]: c for m, c in g.terms.items()}))
    base = FPRing(names, relations)
    if kahler_tangent(base).ring != ring:
        raise DomainMismatchError(f"{ring} is not presented as T(R) for any R")
    return base


def sharp(f: RingMorphism, target: Optional[FPRing] = None) -> RingMorphism:
    """
    Transposes f: R -> T(R') (dual numbers) to f#: T(R) -> R' (Kaehler).

    f#(x) = f_1(x) and f#(d_x) = f_2(x) where f(x) = f_1(x) + f_2(x) eps.
    """
    target = target if target is not None else dual_base(f.codomain)
    if f.codomain != dual_numbers(target).ring:
        raise DomainMismatchError(f"{f.codomain} is not T({target})")
    R = f.domain
    kt = kahler_tangent(R)
    base_parts, eps_parts = [], []
    for image in f.images:
        a, b = split_dual(image, target)
        base_parts.append(a)
        eps_parts.append(b)
    return RingMorphism(kt.ring, target, tuple(base_parts + eps_parts))


def flat(g: RingMorphism, base: Optional[FPRing] = None) -> RingMorphism:
    """Transposes g: T(R) -> R' to g_flat: R -> T(R'), x |-> g(x) + g(d_x) eps."""
    R = base if base is not None else kahler_base(g.domain)
    kt = kahler_tangent(R)
    if g.domain != kt.ring:
        raise DomainMismatchError(f"{g.domain} is not T({R})")
    T = dual_numbers(g.codomain).ring
    eps = T.var(tangent_var(g.codomain))
    images = tuple(
        g.image(x).embed(T.vars) + g.image(dx).embed(T.vars) * eps for x, dx in zip(R.vars, kt.dvars)
    )
    return RingMorphism(R, T, images)


def kahler_module_rows(R: FPRing) -> List[Tuple[Poly, ...]]:
    """Jacobian rows of the relations: d(p_j) = sum_i dp_j/dx_i d_x_i."""
    return [tuple(p.derivative(x) for x in R.vars) for p in R.relations]
