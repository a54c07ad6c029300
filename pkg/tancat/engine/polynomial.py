"""
Sparse multivariate polynomials with exact rational coefficients.

A Poly is a finite map from exponent tuples to Fractions over a fixed,
ordered variable list. Every operation keeps the map free of zero
coefficients, so structural equality is polynomial equality.

Monomials are ordered by graded reverse lexicographic order with the
first variable largest.
"""

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from tancat.engine.errors import VariableMismatchError

Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]


def grevlex_key(m: Monomial) -> Tuple[int, Tuple[int, ...]]:
    """Sort key for graded reverse lexicographic order (larger key = larger monomial)."""
    return (sum(m), tuple(-e for e in reversed(m)))


def divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def quotient(b: Monomial, a: Monomial) -> Monomial:
    return tuple(y - x for x, y in zip(a, b))


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class Poly:
    """An immutable polynomial over an ordered variable list."""

    __slots__ = ("vars", "terms", "_lead", "_hash")

    def __init__(self, variables: Iterable[str], terms: Optional[Mapping[Monomial, Scalar]] = None):
        self.vars: Tuple[str, ...] = tuple(variables)
        width = len(self.vars)
        clean: Dict[Monomial, Fraction] = {}
        for monomial, coefficient in (terms or {}).items():
            monomial = tuple(monomial)
            if len(monomial) != width:
                raise VariableMismatchError(
                    f"monomial {monomial} does not fit variables {self.vars}"
                )
            coefficient = Fraction(coefficient)
            if coefficient:
                clean[monomial] = clean.get(monomial, Fraction(0)) + coefficient
                if not clean[monomial]:
                    del clean[monomial]
        self.terms: Dict[Monomial, Fraction] = clean
        self._lead: Optional[Monomial] = None
        self._hash: Optional[int] = None

    @classmethod
    def _raw(cls, variables: Tuple[str, ...], terms: Dict[Monomial, Fraction]) -> "Poly":
        poly = cls.__new__(cls)
        poly.vars = variables
        poly.terms = terms
        poly._lead = None
        poly._hash = None
        return poly

    # Constructors

    @classmethod
    def zero(cls, variables: Iterable[str]) -> "Poly":
        return cls._raw(tuple(variables), {})

    @classmethod
    def constant(cls, variables: Iterable[str], value: Scalar) -> "Poly":
        variables = tuple(variables)
        value = Fraction(value)
        if not value:
            return cls._raw(variables, {})
        return cls._raw(variables, {(0,) * len(variables): value})

    @classmethod
    def variable(cls, variables: Iterable[str], name: str) -> "Poly":
        variables = tuple(variables)
        if name not in variables:
            raise VariableMismatchError(f"unknown variable {name!r} in {variables}")
        exponents = tuple(1 if v == name else 0 for v in variables)
        return cls._raw(variables, {exponents: Fraction(1)})

    @classmethod
    def monomial(cls, variables: Iterable[str], exponents: Monomial, coefficient: Scalar = 1) -> "Poly":
        return cls(variables, {tuple(exponents): coefficient})

    # Inspection

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def degree_in(self, indices: Iterable[int]) -> Tuple[int, ...]:
        """Distinct total degrees of the terms restricted to the given variable slots."""
        indices = list(indices)
        return tuple(sorted({sum(m[i] for i in indices) for m in self.terms}))

    def leading_monomial(self) -> Monomial:
        if self._lead is None:
            if not self.terms:
                raise ValueError("the zero polynomial has no leading monomial")
            self._lead = max(self.terms, key=grevlex_key)
        return self._lead

    def leading_coefficient(self) -> Fraction:
        return self.terms[self.leading_monomial()]

    def sorted_terms(self) -> List[Tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda item: grevlex_key(item[0]), reverse=True)

    def used_variables(self) -> Tuple[str, ...]:
        used = set()
        for m in self.terms:
            used.update(i for i, e in enumerate(m) if e)
        return tuple(v for i, v in enumerate(self.vars) if i in used)

    def as_variable(self) -> Optional[str]:
        """The variable name if this polynomial is exactly one variable, else None."""
        if len(self.terms) != 1:
            return None
        (monomial, coefficient), = self.terms.items()
        if coefficient != 1 or sum(monomial) != 1:
            return None
        return self.vars[monomial.index(1)]

    # Arithmetic

    def _check(self, other: "Poly") -> None:
        if self.vars != other.vars:
            raise VariableMismatchError(f"variables {self.vars} and {other.vars} differ")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(self.vars, other)
        return NotImplemented

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for m, c in other.terms.items():
            value = terms.get(m, 0) + c
            if value:
                terms[m] = value
            else:
                terms.pop(m, None)
        return Poly._raw(self.vars, terms)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.vars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def scale(self, factor: Scalar) -> "Poly":
        factor = Fraction(factor)
        if not factor:
            return Poly.zero(self.vars)
        return Poly._raw(self.vars, {m: c * factor for m, c in self.terms.items()})

    def shift(self, monomial: Monomial, factor: Scalar = 1) -> "Poly":
        """Multiplies by factor times the given monomial."""
        factor = Fraction(factor)
        if not factor:
            return Poly.zero(self.vars)
        return Poly._raw(
            self.vars,
            {tuple(a + b for a, b in zip(m, monomial)): c * factor for m, c in self.terms.items()},
        )

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check(other)
        terms: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                value = terms.get(m, 0) + c1 * c2
                if value:
                    terms[m] = value
                else:
                    terms.pop(m, None)
        return Poly._raw(self.vars, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise ValueError("negative exponent")
        result = Poly.constant(self.vars, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        return self.scale(1 / self.leading_coefficient())

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.vars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    # Calculus and substitution

    def derivative(self, name: str) -> "Poly":
        if name not in self.vars:
            raise VariableMismatchError(f"unknown variable {name!r}")
        i = self.vars.index(name)
        terms: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            if m[i]:
                lowered = m[:i] + (m[i] - 1,) + m[i + 1:]
                terms[lowered] = c * m[i]
        return Poly._raw(self.vars, terms)

    def substitute(self, images: Sequence["Poly"], target: Optional[Sequence[str]] = None) -> "Poly":
        """Replaces variable i by images[i]; all images share the target variable list."""
        if len(images) != len(self.vars):
            raise VariableMismatchError(
                f"{len(images)} images supplied for {len(self.vars)} variables"
            )
        target = tuple(target) if target is not None else (images[0].vars if images else ())
        for image in images:
            if image.vars != target:
                raise VariableMismatchError(f"image over {image.vars}, expected {target}")
        powers: Dict[Tuple[int, int], Poly] = {}
        result = Poly.zero(target)
        for m, c in self.terms.items():
            term = Poly.constant(target, c)
            for i, e in enumerate(m):
                if e:
                    if (i, e) not in powers:
                        powers[(i, e)] = images[i] ** e
                    term = term * powers[(i, e)]
            result = result + term
        return result

    def embed(self, target: Sequence[str], renaming: Optional[Mapping[str, str]] = None) -> "Poly":
        """Re-expresses the polynomial over a variable list that contains (renamed) its variables."""
        target = tuple(target)
        renaming = renaming or {}
        slots = []
        for v in self.vars:
            name = renaming.get(v, v)
            if name not in target:
                raise VariableMismatchError(f"variable {name!r} missing from {target}")
            slots.append(target.index(name))
        terms: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            exponents = [0] * len(target)
            for slot, e in zip(slots, m):
                exponents[slot] += e
            key = tuple(exponents)
            terms[key] = terms.get(key, 0) + c
        return Poly(target, terms)

    def evaluate(self, coords: Sequence[Scalar]) -> Fraction:
        if len(coords) != len(self.vars):
            raise VariableMismatchError(f"{len(coords)} coordinates for {len(self.vars)} variables")
        coords = [Fraction(c) for c in coords]
        total = Fraction(0)
        for m, c in self.terms.items():
            value = c
            for x, e in zip(coords, m):
                if e:
                    value *= x ** e
            total += value
        return total

    # Rendering

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces: List[str] = []
        for index, (m, c) in enumerate(self.sorted_terms()):
            factors = [v if e == 1 else f"{v}^{e}" for v, e in zip(self.vars, m) if e]
            magnitude = abs(c)
            if not factors:
                body = format_rational(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = format_rational(magnitude) + "*" + "*".join(factors)
            if index == 0:
                pieces.append(("-" if c < 0 else "") + body)
            else:
                pieces.append((" - " if c < 0 else " + ") + body)
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"Poly({str(self)!r} over {list(self.vars)})"


def variables_of(names: Sequence[str]) -> List[Poly]:
    """The generator polynomials of a variable list, in order."""
    return [Poly.variable(names, v) for v in names]
