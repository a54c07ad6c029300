"""
Groebner bases under graded reverse lexicographic order.

Provides:
1. normal_form: full reduction of a polynomial against a basis
2. divide: the classical multivariate division algorithm (quotients and remainder)
3. buchberger: reduced Groebner basis with sugar pair selection, the
   product and chain criteria, and a step budget
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

from tancat.config import step_budget
from tancat.engine.errors import ResourceBudgetError, VariableMismatchError
from tancat.engine.polynomial import Monomial, Poly, divides, grevlex_key, lcm, quotient

logger = logging.getLogger(__name__)


def normal_form(p: Poly, basis: Sequence[Poly]) -> Poly:
    """
    Reduces every term of p by the leading monomials of basis.

    Args:
        p: The polynomial to reduce
        basis: Polynomials over the same variables; a Groebner basis makes the
            result canonical

    Returns:
        The remainder, no term of which is divisible by a leading monomial
    """
    for g in basis:
        if g.vars != p.vars:
            raise VariableMismatchError(f"basis over {g.vars}, polynomial over {p.vars}")
    heads = [(g.leading_monomial(), g.leading_coefficient(), g) for g in basis if not g.is_zero()]
    if not heads:
        return p
    remainder: Dict[Monomial, Fraction] = {}
    current = p
    while not current.is_zero():
        m = current.leading_monomial()
        c = current.terms[m]
        for head, head_coefficient, g in heads:
            if divides(head, m):
                current = current - g.shift(quotient(m, head), c / head_coefficient)
                break
        else:
            remainder[m] = c
            terms = dict(current.terms)
            del terms[m]
            current = Poly._raw(current.vars, terms)
    return Poly._raw(p.vars, remainder)


def divide(p: Poly, divisors: Sequence[Poly]) -> Tuple[List[Poly], Poly]:
    """
    Classical division: p = sum(q_i * f_i) + r with no term of r divisible by any LM(f_i).

    Always divides by the first divisor whose leading monomial fits, so the
    remainder depends on divisor order unless the divisors form a Groebner basis.
    """
    quotients = [Poly.zero(p.vars) for _ in divisors]
    remainder = Poly.zero(p.vars)
    current = p
    while not current.is_zero():
        m = current.leading_monomial()
        c = current.terms[m]
        for i, f in enumerate(divisors):
            if f.is_zero():
                continue
            head = f.leading_monomial()
            if divides(head, m):
                factor = c / f.leading_coefficient()
                shift = quotient(m, head)
                quotients[i] = quotients[i] + Poly.monomial(p.vars, shift, factor)
                current = current - f.shift(shift, factor)
                break
        else:
            remainder = remainder + Poly.monomial(p.vars, m, c)
            current = current - Poly.monomial(p.vars, m, c)
    return quotients, remainder


@dataclass
class _Pairs:
    """Critical pairs keyed by generator indices, with their sugar degrees."""

    entries: Dict[Tuple[int, int], int] = field(default_factory=dict)

    def add(self, i: int, j: int, sugar: int) -> None:
        self.entries[(min(i, j), max(i, j))] = sugar

    def __contains__(self, pair: Tuple[int, int]) -> bool:
        return (min(pair), max(pair)) in self.entries

    def pop_lowest(self, heads: List[Monomial]) -> Tuple[int, int]:
        def key(pair):
            i, j = pair
            return (self.entries[pair], grevlex_key(lcm(heads[i], heads[j])), pair)

        pair = min(self.entries, key=key)
        del self.entries[pair]
        return pair

    def __bool__(self) -> bool:
        return bool(self.entries)


def _pair_sugar(i: int, j: int, heads: List[Monomial], sugars: List[int]) -> int:
    common = sum(lcm(heads[i], heads[j]))
    return max(sugars[i] + common - sum(heads[i]), sugars[j] + common - sum(heads[j]))


def _s_polynomial(f: Poly, g: Poly) -> Poly:
    head = lcm(f.leading_monomial(), g.leading_monomial())
    left = f.shift(quotient(head, f.leading_monomial()), 1 / f.leading_coefficient())
    right = g.shift(quotient(head, g.leading_monomial()), 1 / g.leading_coefficient())
    return left - right


def _interreduce(basis: List[Poly]) -> List[Poly]:
    """Minimalizes, then fully reduces each element against the others."""
    minimal: List[Poly] = []
    for i, g in enumerate(basis):
        head = g.leading_monomial()
        redundant = False
        for j, h in enumerate(basis):
            if i == j:
                continue
            other = h.leading_monomial()
            if divides(other, head) and (other != head or j < i):
                redundant = True
                break
        if not redundant:
            minimal.append(g.monic())
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        head = g.leading_monomial()
        tail_terms = {m: c for m, c in g.terms.items() if m != head}
        tail = normal_form(Poly._raw(g.vars, tail_terms), others)
        reduced.append(Poly.monomial(g.vars, head) + tail)
    reduced.sort(key=lambda g: grevlex_key(g.leading_monomial()), reverse=True)
    return reduced


def buchberger(gens: Sequence[Poly], variables: Sequence[str] = (), budget: Optional[int] = None) -> Tuple[Poly, ...]:
    """
    Computes the reduced Groebner basis of the ideal generated by gens.

    Args:
        gens: Generators over one common variable list
        variables: The variable list, used only to validate an empty generator set
        budget: Maximum number of S-polynomial reductions; defaults to the
            configured step budget

    Returns:
        The reduced basis, monic, sorted by leading monomial descending. The
        unit ideal is returned as (1,).
    """
    if budget is None:
        budget = step_budget()
    names = tuple(gens[0].vars) if gens else tuple(variables)
    for g in gens:
        if g.vars != names:
            raise VariableMismatchError(f"generator over {g.vars}, expected {names}")

    basis: List[Poly] = []
    sugars: List[int] = []
    for g in gens:
        if not g.is_zero():
            basis.append(g.monic())
            sugars.append(g.degree())
    if not basis:
        return ()
    if any(g.is_constant() for g in basis):
        return (Poly.constant(names, 1),)

    heads = [g.leading_monomial() for g in basis]
    pairs = _Pairs()
    for j in range(len(basis)):
        for i in range(j):
            pairs.add(i, j, _pair_sugar(i, j, heads, sugars))

    steps = 0
    while pairs:
        i, j = pairs.pop_lowest(heads)
        # product criterion
        if all(a == 0 or b == 0 for a, b in zip(heads[i], heads[j])):
            continue
        # chain criterion
        common = lcm(heads[i], heads[j])
        if any(
            k not in (i, j)
            and divides(heads[k], common)
            and (i, k) not in pairs
            and (j, k) not in pairs
            for k in range(len(basis))
        ):
            continue
        steps += 1
        if steps > budget:
            raise ResourceBudgetError(f"Buchberger exceeded {budget} reduction steps")
        sugar = _pair_sugar(i, j, heads, sugars)
        remainder = normal_form(_s_polynomial(basis[i], basis[j]), basis)
        if remainder.is_zero():
            continue
        if remainder.is_constant():
            logger.debug("unit ideal reached after %d steps", steps)
            return (Poly.constant(names, 1),)
        basis.append(remainder.monic())
        sugars.append(max(sugar, remainder.degree()))
        heads.append(remainder.leading_monomial())
        new = len(basis) - 1
        for k in range(new):
            pairs.add(k, new, _pair_sugar(k, new, heads, sugars))

    result = tuple(_interreduce(basis))
    logger.debug("groebner basis of %d generators: %d elements, %d steps", len(gens), len(result), steps)
    return result


def is_reduced(basis: Sequence[Poly]) -> bool:
    """True when every element is monic and no leading monomial divides a term of another element."""
    for i, g in enumerate(basis):
        if g.leading_coefficient() != 1:
            return False
        for j, h in enumerate(basis):
            if i != j and any(divides(h.leading_monomial(), m) for m in g.terms):
                return False
    return True
