from hypothesis import strategies as st

from tancat.engine import Derivation, ModuleMorphism, Poly, RingMorphism
from tancat.engine.dual import dual_numbers
from tests.corpus import AXES, QQ_X

VARIABLES = ("x", "y", "z")


def coefficients():
    return st.fractions(min_value=-4, max_value=4, max_denominator=3).filter(bool)


@st.composite
def polynomials(draw, variables=VARIABLES, max_degree=3, max_terms=3):
    n = len(variables)
    monomial = st.tuples(*[st.integers(0, max_degree)] * n).filter(lambda m: sum(m) <= max_degree)
    terms = draw(st.dictionaries(monomial, coefficients(), max_size=max_terms))
    return Poly(variables, terms)


def generator_lists(variables=VARIABLES):
    """At most three generators of degree at most three."""
    return st.lists(polynomials(variables), min_size=1, max_size=3).filter(
        lambda gens: any(not g.is_zero() for g in gens)
    )


@st.composite
def ring_maps(draw, domain, codomain):
    """Morphisms out of a free domain: any images will do."""
    assert domain.is_free()
    images = tuple(draw(polynomials(codomain.vars, max_degree=2, max_terms=2)) for _ in domain.vars)
    return RingMorphism(domain, codomain, images)


@st.composite
def axes_derivations(draw):
    """D(x) = a x, D(y) = b y always respects xy = 0."""
    x, y = AXES.var("x"), AXES.var("y")
    a = draw(polynomials(AXES.vars, max_degree=2, max_terms=2))
    b = draw(polynomials(AXES.vars, max_degree=2, max_terms=2))
    return Derivation(AXES, (a * x, b * y))


@st.composite
def free_derivations(draw, ring):
    return Derivation(ring, tuple(draw(polynomials(ring.vars, max_degree=2, max_terms=2)) for _ in ring.vars))


@st.composite
def dual_sections(draw, domain, target):
    """f: domain -> T(target) with a free domain, images a + b eps."""
    T = dual_numbers(target).ring
    eps = T.var(dual_numbers(target).eps_names[0])
    images = []
    for _ in domain.vars:
        a = draw(polynomials(target.vars, max_degree=2, max_terms=2)).embed(T.vars)
        b = draw(polynomials(target.vars, max_degree=2, max_terms=2)).embed(T.vars)
        images.append(a + b * eps)
    return RingMorphism(domain, T, tuple(images))


@st.composite
def module_maps(draw, domain, codomain):
    """Module morphisms out of a free module over QQ[x]."""
    entries = polynomials(QQ_X.vars, max_degree=2, max_terms=2)
    images = tuple(tuple(draw(entries) for _ in codomain.gens) for _ in domain.gens)
    return ModuleMorphism(domain, codomain, images)
