"""
Finitely presented modules over FPRings.

A module is a list of generator names and relation rows; a row
(r_1, ..., r_k) means sum_k r_k m_k = 0. Elements are tuples of
coefficients, one per generator.

Element equality is decided by Gauss-Jordan elimination on rows with a
constant entry, after which every remaining row must involve a single
generator; the coefficient of such a generator is then reduced modulo the
base ideal plus that row's entries. Presentations outside this fragment
raise UndecidedError when an element normal form is requested.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from tancat.config import MODULE_VAR
from tancat.engine.errors import DomainMismatchError, IllDefinedMorphismError, UndecidedError, VariableMismatchError
from tancat.engine.polynomial import Poly
from tancat.engine.rings import FPRing, RingMorphism, compose, fresh_name, identity

logger = logging.getLogger(__name__)

Element = Tuple[Poly, ...]


@dataclass(frozen=True)
class _Echelon:
    pivots: Tuple[Tuple[int, Element], ...]
    annihilators: Tuple[Tuple[int, FPRing], ...]
    undecided: Tuple[Element, ...]


@dataclass(frozen=True)
class FPModule:
    """coker of the relation rows over base."""

    base: FPRing
    gens: Tuple[str, ...]
    relations: Tuple[Element, ...] = ()

    def __post_init__(self):
        gens = tuple(self.gens)
        if len(set(gens)) != len(gens):
            raise VariableMismatchError(f"duplicate generator names in {gens}")
        rows = []
        for row in self.relations:
            row = tuple(row)
            if len(row) != len(gens):
                raise VariableMismatchError(f"relation row of length {len(row)} for {len(gens)} generators")
            row = tuple(self.base.normal_form(c) for c in row)
            if any(not c.is_zero() for c in row):
                rows.append(row)
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "relations", tuple(rows))

    @classmethod
    def free(cls, base: FPRing, rank: int, names: Optional[Sequence[str]] = None) -> "FPModule":
        return cls(base, _default_names(rank, names))

    @classmethod
    def cokernel(cls, base: FPRing, rows: Sequence[Sequence[Poly]], names: Optional[Sequence[str]] = None) -> "FPModule":
        rank = len(rows[0]) if rows else len(names or ())
        return cls(base, _default_names(rank, names), tuple(tuple(r) for r in rows))

    @property
    def rank(self) -> int:
        return len(self.gens)

    # Elements

    def zero(self) -> Element:
        return tuple(self.base.zero() for _ in self.gens)

    def generator(self, k: int) -> Element:
        return tuple(self.base.one() if i == k else self.base.zero() for i in range(len(self.gens)))

    def element(self, coefficients: Dict[str, Poly]) -> Element:
        return tuple(coefficients.get(g, self.base.zero()) for g in self.gens)

    @cached_property
    def _echelon(self) -> _Echelon:
        base = self.base
        rows: List[Element] = list(self.relations)
        pivots: List[Tuple[int, Element]] = []

        def eliminate(row: Element, k: int, pivot: Element) -> Element:
            factor = row[k]
            if factor.is_zero():
                return row
            return tuple(base.normal_form(a - factor * b) for a, b in zip(row, pivot))

        while True:
            found = next(
                ((i, k) for i, row in enumerate(rows) for k, c in enumerate(row) if not c.is_zero() and c.is_constant()),
                None,
            )
            if found is None:
                break
            i, k = found
            row = rows.pop(i)
            scale = 1 / row[k].constant_value()
            row = tuple(base.normal_form(c.scale(scale)) for c in row)
            rows = [r for r in (eliminate(r, k, row) for r in rows) if any(not c.is_zero() for c in r)]
            pivots = [(pk, eliminate(pr, k, row)) for pk, pr in pivots]
            pivots.append((k, row))

        extra: Dict[int, List[Poly]] = {}
        undecided = []
        for row in rows:
            support = [k for k, c in enumerate(row) if not c.is_zero()]
            if len(support) == 1:
                extra.setdefault(support[0], []).append(row[support[0]])
            else:
                undecided.append(row)
        annihilators = tuple((k, base.with_relations(polys)) for k, polys in sorted(extra.items()))
        return _Echelon(tuple(pivots), annihilators, tuple(undecided))

    def normal_form(self, elem: Element) -> Element:
        if len(elem) != len(self.gens):
            raise VariableMismatchError(f"element of length {len(elem)} for {len(self.gens)} generators")
        echelon = self._echelon
        if echelon.undecided:
            raise UndecidedError(f"module equality is undecided for relation rows {echelon.undecided}")
        result = [self.base.normal_form(c) for c in elem]
        for k, row in echelon.pivots:
            factor = result[k]
            if not factor.is_zero():
                result = [self.base.normal_form(a - factor * b) for a, b in zip(result, row)]
        for k, ring in echelon.annihilators:
            result[k] = ring.normal_form(result[k])
        return tuple(result)

    def is_zero(self, elem: Element) -> bool:
        return all(c.is_zero() for c in self.normal_form(elem))

    def equal(self, a: Element, b: Element) -> bool:
        return self.is_zero(tuple(x - y for x, y in zip(a, b)))

    def format(self, elem: Element) -> str:
        parts = [f"({c})*{g}" for c, g in zip(elem, self.gens) if not c.is_zero()]
        return " + ".join(parts) if parts else "0"


def _default_names(rank: int, names: Optional[Sequence[str]]) -> Tuple[str, ...]:
    if names is not None:
        if len(names) != rank:
            raise VariableMismatchError(f"{len(names)} names for rank {rank}")
        return tuple(names)
    return tuple(MODULE_VAR.format(k=k) for k in range(1, rank + 1))


def module_action(a: Poly, m: Element, module: FPModule) -> Element:
    """a . m"""
    if a.vars != module.base.vars:
        raise VariableMismatchError(f"{a} is not over {module.base.vars}")
    return module.normal_form(tuple(a * c for c in m))


def modules_equal(M: FPModule, N: FPModule) -> bool:
    """Same base and generators, and each module's rows vanish in the other."""
    if M.base != N.base or M.gens != N.gens:
        return False
    return all(N.is_zero(row) for row in M.relations) and all(M.is_zero(row) for row in N.relations)


@dataclass(frozen=True)
class ModuleMorphism:
    """
    A linear map given by the images of the domain generators.

    With a base_map g: domain.base -> codomain.base the map satisfies
    f(a.m) = g(a).f(m); without one the two bases must coincide.
    """

    domain: FPModule
    codomain: FPModule
    images: Tuple[Element, ...]
    base_map: Optional[RingMorphism] = None

    def __post_init__(self):
        if self.base_map is None:
            if self.domain.base != self.codomain.base:
                raise DomainMismatchError("modules over different rings need a base map")
        elif self.base_map.domain != self.domain.base or self.base_map.codomain != self.codomain.base:
            raise DomainMismatchError("base map does not connect the two base rings")
        if len(self.images) != len(self.domain.gens):
            raise VariableMismatchError(f"{len(self.images)} images for {len(self.domain.gens)} generators")
        images = tuple(self.codomain.normal_form(tuple(i)) for i in self.images)
        object.__setattr__(self, "images", images)
        for row in self.domain.relations:
            if not self.codomain.is_zero(self._combine(row)):
                raise IllDefinedMorphismError(f"relation row {tuple(str(c) for c in row)} does not map to 0")

    def _scalar(self, a: Poly) -> Poly:
        return a if self.base_map is None else self.base_map.apply(a)

    def _combine(self, coefficients: Element) -> Element:
        total = [self.codomain.base.zero() for _ in self.codomain.gens]
        for c, image in zip(coefficients, self.images):
            if c.is_zero():
                continue
            scalar = self._scalar(c)
            total = [t + scalar * i for t, i in zip(total, image)]
        return tuple(total)

    def apply(self, elem: Element) -> Element:
        if len(elem) != len(self.domain.gens):
            raise VariableMismatchError("element does not belong to the domain")
        return self.codomain.normal_form(self._combine(elem))

    __call__ = apply


def apply_module_morphism(f: ModuleMorphism, elem: Element) -> Element:
    return f.apply(elem)


def module_identity(M: FPModule) -> ModuleMorphism:
    return ModuleMorphism(M, M, tuple(M.generator(k) for k in range(M.rank)))


def compose_modules(g: ModuleMorphism, f: ModuleMorphism) -> ModuleMorphism:
    """g after f."""
    if f.codomain != g.domain:
        raise DomainMismatchError("cannot compose module morphisms: codomain and domain differ")
    if f.base_map is None and g.base_map is None:
        base_map = None
    else:
        first = f.base_map or identity(f.domain.base)
        second = g.base_map or identity(g.domain.base)
        base_map = compose(second, first)
    return ModuleMorphism(f.domain, g.codomain, tuple(g.apply(i) for i in f.images), base_map)


def module_morphisms_equal(f: ModuleMorphism, g: ModuleMorphism) -> bool:
    if not (modules_equal(f.domain, g.domain) and modules_equal(f.codomain, g.codomain)):
        raise DomainMismatchError("module morphisms have different signatures")
    if (f.base_map or identity(f.domain.base)) != (g.base_map or identity(g.domain.base)):
        return False
    return all(f.codomain.equal(a, b) for a, b in zip(f.images, g.images))


@dataclass(frozen=True)
class Extension:
    """A ring built from a module, with the ring variable of each generator."""

    module: FPModule
    ring: FPRing
    gen_vars: Tuple[str, ...]

    def element_to_ring(self, elem: Element) -> Poly:
        """sum_k c_k u_k as a polynomial of the ring."""
        total = self.ring.zero()
        for c, name in zip(elem, self.gen_vars):
            total = total + c.embed(self.ring.vars) * self.ring.var(name)
        return self.ring.normal_form(total)


def _generator_vars(M: FPModule) -> Tuple[str, ...]:
    taken = list(M.base.vars)
    names = []
    for g in M.gens:
        names.append(fresh_name(g, taken))
        taken.append(names[-1])
    return tuple(names)


def _linear_rows(M: FPModule, variables: Tuple[str, ...], gen_vars: Tuple[str, ...]) -> List[Poly]:
    rows = []
    for row in M.relations:
        total = Poly.zero(variables)
        for c, name in zip(row, gen_vars):
            total = total + c.embed(variables) * Poly.variable(variables, name)
        rows.append(total)
    return rows


def square_zero_extension(M: FPModule) -> Extension:
    """M[eps] = base (+) M with u_i u_j = 0."""
    gen_vars = _generator_vars(M)
    variables = M.base.vars + gen_vars
    relations = [r.embed(variables) for r in M.base.relations]
    for i in range(len(gen_vars)):
        for j in range(i, len(gen_vars)):
            relations.append(Poly.variable(variables, gen_vars[i]) * Poly.variable(variables, gen_vars[j]))
    relations += _linear_rows(M, variables, gen_vars)
    return Extension(M, FPRing(variables, relations), gen_vars)


def symmetric_algebra(M: FPModule) -> Extension:
    """Sym(M): the base relations and the linear relation rows, nothing else."""
    gen_vars = _generator_vars(M)
    variables = M.base.vars + gen_vars
    relations = [r.embed(variables) for r in M.base.relations]
    relations += _linear_rows(M, variables, gen_vars)
    return Extension(M, FPRing(variables, relations), gen_vars)


def kahler_module(R: FPRing) -> FPModule:
    """The module of Kaehler differentials: generators d_x, one Jacobian row per relation."""
    from tancat.engine.kahler import differential_names, kahler_module_rows

    return FPModule(R, differential_names(R.vars), tuple(kahler_module_rows(R)))
