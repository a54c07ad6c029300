"""
Differential bundles with negatives, on both sides.

A bundle over A is a total object E with q: E -> A, sigma: E_2 -> E,
z: A -> E, lam: E -> T(E) and iota: E -> E, all stored as categorical
arrows of the side's tangent structure (ring maps on the ring side,
reversed ring maps on the scheme side). The diagram checker, the
pre-bundle checker and mu are written against that structure.

Module bundles are built in split form: the total ring has the base
variables first, followed by one variable per module generator. The
extractors, the Rosicky reconstruction of sigma and iota, and the
isomorphisms alpha, beta and psi work on presentations of that shape.
"""

import enum
import functools
import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Dict, List, Optional, Tuple

from tancat.engine.dual import DUAL, dual_numbers, split_dual, tangent_var
from tancat.engine.errors import (
    BundleAxiomError,
    DomainMismatchError,
    IllDefinedMorphismError,
    NotSplitFormError,
    PreBundleError,
)
from tancat.engine.kahler import KAHLER, kahler_tangent, tensor_power
from tancat.engine.modules import (
    Element,
    Extension,
    FPModule,
    ModuleMorphism,
    compose_modules,
    module_identity,
    module_morphisms_equal,
    square_zero_extension,
    symmetric_algebra,
)
from tancat.engine.polynomial import Poly
from tancat.engine.rings import FPRing, RingMorphism, fresh_name, identity, morphisms_equal
from tancat.engine.structure import AxiomReport, Diagram, FibreProduct, TangentStructure, run_diagrams

logger = logging.getLogger(__name__)


class Side(str, enum.Enum):
    RING = "ring"
    AFFINE = "scheme"


def structure_for(side: Side) -> TangentStructure:
    return DUAL if Side(side) is Side.RING else KAHLER


# Widths


@functools.lru_cache(maxsize=256)
def split_width(side: Side, module: FPModule, n: int) -> FibreProduct:
    """
    The n-fold fibre product of a split-form total ring over module.base.

    The module generators must be named like the total ring's module
    variables. On the ring side copy 1 keeps the names and later copies get
    fresh ones; on the scheme side the width is a tensor power.
    """
    total = _extension(side, module).ring
    base = module.base
    if Side(side) is Side.AFFINE:
        q = RingMorphism(base, total, tuple(total.var(v) for v in base.vars))
        ring, injections = tensor_power(base, total, q, n)
        return FibreProduct(ring=ring, n=n, fibre=total, base=base, projections=injections, injections=injections)

    copies: List[Tuple[str, ...]] = [module.gens]
    taken = list(total.vars)
    for _ in range(1, n):
        names = []
        for g in module.gens:
            names.append(fresh_name(g, taken))
            taken.append(names[-1])
        copies.append(tuple(names))
    variables = tuple(taken)

    relations = [r.embed(variables) for r in base.relations]
    flat = [Poly.variable(variables, v) for names in copies for v in names]
    for i in range(len(flat)):
        for j in range(i, len(flat)):
            relations.append(flat[i] * flat[j])
    for names in copies:
        for row in module.relations:
            linear = Poly.zero(variables)
            for c, v in zip(row, names):
                linear = linear + c.embed(variables) * Poly.variable(variables, v)
            relations.append(linear)
    ring = FPRing(variables, relations)

    def to_total(j: int) -> RingMorphism:
        images = {v: total.var(v) for v in base.vars}
        for k, names in enumerate(copies):
            for g, v in zip(module.gens, names):
                images[v] = total.var(g) if k == j else total.zero()
        return RingMorphism.from_images(ring, total, images)

    def from_total(names: Optional[Tuple[str, ...]]) -> RingMorphism:
        images = {v: ring.var(v) for v in base.vars}
        for k, g in enumerate(module.gens):
            images[g] = ring.var(names[k]) if names is not None else ring.zero()
        return RingMorphism.from_images(total, ring, images)

    return FibreProduct(
        ring=ring,
        n=n,
        fibre=total,
        base=base,
        projections=tuple(to_total(j) for j in range(n)),
        injections=tuple(from_total(names) for names in copies),
        collapse=from_total(None),
    )


def _extension(side: Side, module: FPModule) -> Extension:
    return square_zero_extension(module) if Side(side) is Side.RING else symmetric_algebra(module)


# Bundles


@dataclass(frozen=True)
class PreDiffBundle:
    """The (q, z, lam) part of a bundle, optionally with the width to build sigma on."""

    side: Side
    base: FPRing
    total: FPRing
    q: RingMorphism
    z: RingMorphism
    lam: RingMorphism
    width2: Optional[FibreProduct] = field(default=None, compare=False, repr=False)

    @property
    def structure(self) -> TangentStructure:
        return structure_for(self.side)


@dataclass(frozen=True)
class DiffBundle:
    """
    A differential bundle with negatives.

    widths builds the n-fold fibre product of q; the bundle checks its own
    diagrams on construction unless checked is False.
    """

    side: Side
    base: FPRing
    total: FPRing
    q: RingMorphism
    sigma: RingMorphism
    z: RingMorphism
    lam: RingMorphism
    iota: RingMorphism
    widths: Callable[[int], FibreProduct] = field(compare=False, repr=False)
    checked: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "side", Side(self.side))
        self._check_signatures()
        if self.checked:
            report = self.report
            if not report.ok:
                raise BundleAxiomError(
                    f"bundle over {self.base} fails {', '.join(report.failed_ids())}", report
                )

    @property
    def structure(self) -> TangentStructure:
        return structure_for(self.side)

    @cached_property
    def width2(self) -> FibreProduct:
        return self.widths(2)

    def width(self, n: int) -> FibreProduct:
        return self.width2 if n == 2 else self.widths(n)

    @cached_property
    def report(self) -> AxiomReport:
        return check_diff_bundle(self)

    def pre(self) -> PreDiffBundle:
        return PreDiffBundle(self.side, self.base, self.total, self.q, self.z, self.lam, self.width2)

    def unchecked(self, **changes) -> "DiffBundle":
        """A copy with some maps replaced and no validation, for negative controls."""
        return replace(self, checked=False, **changes)

    def _check_signatures(self) -> None:
        S = self.structure
        E, A = self.total, self.base
        expected = {
            "q": (E, A),
            "sigma": (self.width2.ring, E),
            "z": (A, E),
            "lam": (E, S.tangent(E)),
            "iota": (E, E),
        }
        for name, (source, target) in expected.items():
            arrow = getattr(self, name)
            if S.source(arrow) != source or S.target(arrow) != target:
                raise DomainMismatchError(f"{name} does not go from {source} to {target}")


def tangent_bundle(A: FPRing, side: Side = Side.RING) -> DiffBundle:
    """T(A) over A with (p, +, 0, lift, -)."""
    S = structure_for(side)
    return DiffBundle(
        side=Side(side),
        base=A,
        total=S.tangent(A),
        q=S.proj(A),
        sigma=S.sum(A),
        z=S.zero(A),
        lam=S.lift(A),
        iota=S.neg(A),
        widths=functools.partial(S.width, A),
    )


def _ring_lift(total: FPRing, module_vars: Tuple[str, ...]) -> RingMorphism:
    """x |-> x, u |-> u eps' into the dual numbers over total."""
    T = dual_numbers(total).ring
    eps = T.var(tangent_var(total))
    images = {v: T.var(v) * eps if v in module_vars else T.var(v) for v in total.vars}
    return RingMorphism.from_images(total, T, images)


def _affine_lift(total: FPRing, module_vars: Tuple[str, ...]) -> RingMorphism:
    """T(total) -> total: x |-> x, u |-> 0, d_x |-> 0, d_u |-> u."""
    kt = kahler_tangent(total)
    images = {}
    for v, dv in zip(total.vars, kt.dvars):
        module = v in module_vars
        images[v] = total.zero() if module else total.var(v)
        images[dv] = total.var(v) if module else total.zero()
    return RingMorphism.from_images(kt.ring, total, images)


def mod_to_bundle_ring(M: FPModule) -> DiffBundle:
    """M[eps] over M.base, with sigma adding the module parts of the two copies."""
    ext = square_zero_extension(M)
    module = FPModule(M.base, ext.gen_vars, M.relations)
    E, A = ext.ring, M.base
    widths = functools.partial(split_width, Side.RING, module)
    w2 = widths(2)

    q = RingMorphism.from_images(E, A, {v: A.zero() if v in ext.gen_vars else A.var(v) for v in E.vars})
    z = RingMorphism(A, E, tuple(E.var(v) for v in A.vars))
    sigma_images = {v: E.var(v) for v in A.vars}
    for injection in w2.injections:
        for u in ext.gen_vars:
            sigma_images[injection.image(u).as_variable()] = E.var(u)
    sigma = RingMorphism.from_images(w2.ring, E, sigma_images)
    iota = RingMorphism.from_images(E, E, {v: -E.var(v) if v in ext.gen_vars else E.var(v) for v in E.vars})
    logger.debug("ring bundle of %s on %s", M.gens, E)
    return DiffBundle(Side.RING, A, E, q, sigma, z, _ring_lift(E, ext.gen_vars), iota, widths)


def mod_to_bundle_affine(M: FPModule) -> DiffBundle:
    """Spec Sym(M) over Spec M.base; sigma(u) = u (x) 1 + 1 (x) u."""
    ext = symmetric_algebra(M)
    module = FPModule(M.base, ext.gen_vars, M.relations)
    E, A = ext.ring, M.base
    widths = functools.partial(split_width, Side.AFFINE, module)
    w2 = widths(2)
    first, second = w2.injections

    q = RingMorphism(A, E, tuple(E.var(v) for v in A.vars))
    z = RingMorphism.from_images(E, A, {v: A.zero() if v in ext.gen_vars else A.var(v) for v in E.vars})
    sigma_images = {v: first.image(v) for v in E.vars}
    for u in ext.gen_vars:
        sigma_images[u] = first.image(u) + second.image(u)
    sigma = RingMorphism.from_images(E, w2.ring, sigma_images)
    iota = RingMorphism.from_images(E, E, {v: -E.var(v) if v in ext.gen_vars else E.var(v) for v in E.vars})
    logger.debug("affine bundle of %s on %s", M.gens, E)
    return DiffBundle(Side.AFFINE, A, E, q, sigma, z, _affine_lift(E, ext.gen_vars), iota, widths)


def mod_to_bundle(M: FPModule, side: Side) -> DiffBundle:
    return mod_to_bundle_ring(M) if Side(side) is Side.RING else mod_to_bundle_affine(M)


# Checkers


def mu(bundle: DiffBundle) -> RingMorphism:
    """T(sigma) after <lam pi_1, 0_E pi_2>: E_2 -> T(E)."""
    S, E = bundle.structure, bundle.total
    pi1, pi2 = bundle.width2.projections
    cone = S.pair(bundle.width2, [S.compose(bundle.lam, pi1), S.compose(S.zero(E), pi2)], outer=1)
    return S.compose(S.apply(bundle.sigma), cone)


def bundle_diagrams(bundle: DiffBundle) -> List[Diagram]:
    S = bundle.structure
    c = S.compose
    A, E = bundle.base, bundle.total
    q, sigma, z, lam, iota = bundle.q, bundle.sigma, bundle.z, bundle.lam, bundle.iota
    w2, w3 = bundle.width2, bundle.width(3)
    pi1, pi2 = w2.projections
    rho1, rho2, rho3 = w3.projections
    one_E = S.identity(E)

    def pair2(first, second, outer=0):
        return S.pair(w2, [first, second], outer)

    def lift_sum_into_tangent():
        return c(S.sum(E), S.pair(S.width(E, 2), [c(lam, pi1), c(lam, pi2)]))

    return [
        Diagram("DB1.sum-proj.1", lambda: c(q, sigma), lambda: c(q, pi1)),
        Diagram("DB1.sum-proj.2", lambda: c(q, sigma), lambda: c(q, pi2)),
        Diagram("DB1.zero-proj", lambda: c(q, z), lambda: S.identity(A)),
        Diagram(
            "DB1.sum-assoc",
            lambda: c(sigma, pair2(c(sigma, S.pair(w2, [rho1, rho2])), rho3)),
            lambda: c(sigma, pair2(rho1, c(sigma, S.pair(w2, [rho2, rho3])))),
        ),
        Diagram("DB1.sum-unit.left", lambda: c(sigma, pair2(c(z, q), one_E)), lambda: one_E),
        Diagram("DB1.sum-unit.right", lambda: c(sigma, pair2(one_E, c(z, q))), lambda: one_E),
        Diagram("DB1.sum-comm", lambda: c(sigma, pair2(pi2, pi1)), lambda: sigma),
        Diagram("DB2.lift-proj", lambda: c(S.apply(q), lam), lambda: c(S.zero(A), q)),
        Diagram(
            "DB2.lift-sum",
            lambda: c(S.apply(sigma), pair2(c(lam, pi1), c(lam, pi2), outer=1)),
            lambda: c(lam, sigma),
        ),
        Diagram("DB2.lift-zero", lambda: c(S.apply(z), S.zero(A)), lambda: c(lam, z)),
        Diagram("DB3.proj", lambda: c(S.proj(E), lam), lambda: c(z, q)),
        Diagram("DB3.sum", lift_sum_into_tangent, lambda: c(lam, sigma)),
        Diagram("DB3.zero", lambda: c(S.zero(E), z), lambda: c(lam, z)),
        Diagram("DB4.lift-lift", lambda: c(S.apply(lam), lam), lambda: c(S.lift(E), lam)),
        Diagram("DB5.square.1", lambda: c(S.apply(q), mu(bundle)), lambda: c(S.zero(A), q, pi1)),
        Diagram("DB5.square.2", lambda: c(S.apply(q), mu(bundle)), lambda: c(S.zero(A), q, pi2)),
        Diagram("DB5.mu-proj", lambda: c(S.proj(E), mu(bundle)), lambda: pi2),
        Diagram("DN.neg-proj", lambda: c(q, iota), lambda: q),
        Diagram("DN.inverse.right", lambda: c(sigma, pair2(one_E, iota)), lambda: c(z, q)),
        Diagram("DN.inverse.left", lambda: c(sigma, pair2(iota, one_E)), lambda: c(z, q)),
    ]


def check_diff_bundle(bundle: DiffBundle) -> AxiomReport:
    report = run_diagrams(f"{bundle.side.value} bundle on {bundle.total}", bundle_diagrams(bundle))
    logger.info("bundle on %s: %d diagrams, %d failures", bundle.total, len(report.entries), len(report.failures))
    return report


def check_pre_bundle(pre: PreDiffBundle) -> AxiomReport:
    S = pre.structure
    c = S.compose
    A, E = pre.base, pre.total
    q, z, lam = pre.q, pre.z, pre.lam
    diagrams = [
        Diagram("PB.zero-proj", lambda: c(q, z), lambda: S.identity(A)),
        Diagram("PB.lift-proj", lambda: c(S.proj(E), lam), lambda: c(z, q)),
        Diagram("PB.lift-zero", lambda: c(lam, z), lambda: c(S.zero(E), z)),
        Diagram("PB.lift-lift", lambda: c(S.apply(lam), lam), lambda: c(S.lift(E), lam)),
    ]
    return run_diagrams(f"pre-bundle on {E}", diagrams)


# Split form


@dataclass(frozen=True)
class SplitForm:
    """A bundle whose total ring is M[eps] (ring side) or Sym(M) (scheme side) for witness M."""

    bundle: object
    ring_vars: Tuple[str, ...]
    module_vars: Tuple[str, ...]
    witness: FPModule

    def to_element(self, p: Poly) -> Element:
        """Coefficients of a total-ring element that is linear in the module variables."""
        E = self.bundle.total
        p = E.normal_form(p)
        n = len(self.ring_vars)
        coefficients: List[Dict[tuple, object]] = [{} for _ in self.module_vars]
        for m, c in p.terms.items():
            module_part = m[n:]
            if sum(module_part) != 1:
                raise NotSplitFormError(f"{p} is not linear in {', '.join(self.module_vars)}")
            coefficients[module_part.index(1)][m[:n]] = c
        return tuple(Poly(self.ring_vars, terms) for terms in coefficients)


def _rows_of_degree_one(E: FPRing, n: int) -> List[Element]:
    rows = []
    for g in E.basis:
        degrees = {sum(m[n:]) for m in g.terms}
        if degrees == {1}:
            row: List[Dict[tuple, object]] = [{} for _ in E.vars[n:]]
            for m, c in g.terms.items():
                row[m[n:].index(1)][m[:n]] = c
            rows.append(tuple(Poly(E.vars[:n], terms) for terms in row))
        elif len(degrees) > 1:
            raise NotSplitFormError(f"relation {g} mixes module degrees")
    return rows


def split_form(bundle) -> SplitForm:
    """
    Recognizes a bundle (or pre-bundle) in split form.

    The total ring must list the base variables first; the remaining
    variables are the module generators. q, z and lam must be the
    canonical maps of that presentation.
    """
    side, A, E = Side(bundle.side), bundle.base, bundle.total
    n = len(A.vars)
    if E.vars[:n] != A.vars:
        raise NotSplitFormError(f"{E} does not start with the variables of {A}")
    module_vars = E.vars[n:]
    witness = FPModule(A, module_vars, tuple(_rows_of_degree_one(E, n)))
    if _extension(side, witness).ring != E:
        raise NotSplitFormError(f"{E} is not the {'square-zero extension' if side is Side.RING else 'symmetric algebra'} of a module over {A}")

    kills = {v: A.zero() if v in module_vars else A.var(v) for v in E.vars}
    keeps = {v: E.var(v) for v in A.vars}
    if side is Side.RING:
        q_ok = bundle.q == RingMorphism.from_images(E, A, kills, checked=False)
        z_ok = bundle.z == RingMorphism.from_images(A, E, keeps, checked=False)
        lam_ok = bundle.lam == _ring_lift(E, module_vars)
    else:
        q_ok = bundle.q == RingMorphism.from_images(A, E, keeps, checked=False)
        z_ok = bundle.z == RingMorphism.from_images(E, A, kills, checked=False)
        lam_ok = bundle.lam == _affine_lift(E, module_vars)
    if not (q_ok and z_ok and lam_ok):
        raise NotSplitFormError("q, z and lam are not the canonical maps of the presentation")
    return SplitForm(bundle, A.vars, module_vars, witness)


def bundle_to_mod_ring(bundle: DiffBundle) -> FPModule:
    """ker(q) as a module over the base, with a.x = z(a) x."""
    if bundle.side is not Side.RING:
        raise DomainMismatchError("bundle_to_mod_ring needs a ring-side bundle")
    return split_form(bundle).witness


def bundle_to_mod_affine(bundle: DiffBundle) -> FPModule:
    """The image of D(x) = lam(d x), generated by the module variables."""
    if bundle.side is not Side.AFFINE:
        raise DomainMismatchError("bundle_to_mod_affine needs a scheme-side bundle")
    return split_form(bundle).witness


def bundle_to_mod(bundle: DiffBundle) -> FPModule:
    return bundle_to_mod_ring(bundle) if bundle.side is Side.RING else bundle_to_mod_affine(bundle)


def derive_sum_and_negative_via_rosicky(pre: PreDiffBundle) -> Tuple[RingMorphism, RingMorphism]:
    """
    Builds sigma and iota from (q, z, lam) as the mediating maps of the
    universality square.

    Ring side: lam sigma = + <lam pi_1, lam pi_2> and lam iota = - lam, so
    sigma and iota are read off by dropping the outer nilpotent.
    Scheme side: sigma(v) = q z(v) (x) 1 + [lam pi_1, lam pi_2](+(d v)) and
    iota(v) = q z(v) - lam(d v).

    Raises:
        PreBundleError: If one of the four pre-bundle equations fails
        NotSplitFormError: If the presentation is not in split form
    """
    report = check_pre_bundle(pre)
    if not report.ok:
        raise PreBundleError(f"pre-bundle equations fail: {', '.join(report.failed_ids())}")
    split = split_form(pre)
    S, E = pre.structure, pre.total
    w2 = pre.width2 if pre.width2 is not None else split_width(pre.side, split.witness, 2)
    pi1, pi2 = w2.projections
    added = S.compose(S.sum(E), S.pair(S.width(E, 2), [S.compose(pre.lam, pi1), S.compose(pre.lam, pi2)]))

    if Side(pre.side) is Side.RING:
        negated = S.compose(S.neg(E), pre.lam)
        sigma = RingMorphism(w2.ring, E, tuple(_strip_outer(i, E) for i in added.images))
        iota = RingMorphism(E, E, tuple(_strip_outer(i, E) for i in negated.images))
    else:
        kt = kahler_tangent(E)
        first = w2.injections[0]
        shared = {v: pre.q.apply(pre.z.image(v)) for v in E.vars}
        sigma = RingMorphism(
            E, w2.ring, tuple(first.apply(shared[v]) + added.image(kt.d(v)) for v in E.vars)
        )
        iota = RingMorphism(E, E, tuple(shared[v] - pre.lam.image(kt.d(v)) for v in E.vars))
    logger.debug("reconstructed sigma and iota on %s", E)
    return sigma, iota


def _strip_outer(p: Poly, E: FPRing) -> Poly:
    a, b = split_dual(p, E)
    return a + b


def bundle_from_pre(pre: PreDiffBundle) -> DiffBundle:
    """The full bundle with sigma and iota reconstructed."""
    sigma, iota = derive_sum_and_negative_via_rosicky(pre)
    generic = functools.partial(split_width, Side(pre.side), split_form(pre).witness)
    known = pre.width2
    if known is None:
        widths = generic
    else:
        def widths(n: int) -> FibreProduct:
            return known if n == 2 else generic(n)
    return DiffBundle(pre.side, pre.base, pre.total, pre.q, sigma, pre.z, pre.lam, iota, widths)


# Morphisms


@dataclass(frozen=True)
class BundleMorphism:
    """(f, g): f between the totals over g between the bases, both categorical arrows."""

    source: DiffBundle
    target: DiffBundle
    f: RingMorphism
    g: RingMorphism

    def __post_init__(self):
        if self.source.side is not self.target.side:
            raise DomainMismatchError("bundle morphisms stay on one side")
        S = self.source.structure
        if (S.source(self.f), S.target(self.f)) != (self.source.total, self.target.total):
            raise DomainMismatchError("f does not connect the total objects")
        if (S.source(self.g), S.target(self.g)) != (self.source.base, self.target.base):
            raise DomainMismatchError("g does not connect the base objects")


def bundle_morphism_diagrams(h: BundleMorphism) -> List[Diagram]:
    S = h.source.structure
    c = S.compose
    src, tgt, f, g = h.source, h.target, h.f, h.g

    def pushed_pair():
        pi1, pi2 = src.width2.projections
        return S.pair(tgt.width2, [c(f, pi1), c(f, pi2)])

    return [
        Diagram("BM.proj-square", lambda: c(tgt.q, f), lambda: c(g, src.q)),
        Diagram("BM.lambda-square", lambda: c(S.apply(f), src.lam), lambda: c(tgt.lam, f)),
        Diagram("BM.zero", lambda: c(f, src.z), lambda: c(tgt.z, g)),
        Diagram("BM.sum", lambda: c(f, src.sigma), lambda: c(tgt.sigma, pushed_pair())),
        Diagram("BM.neg", lambda: c(f, src.iota), lambda: c(tgt.iota, f)),
    ]


def check_bundle_morphism(f: RingMorphism, g: RingMorphism, source: DiffBundle, target: DiffBundle) -> AxiomReport:
    """The two defining squares, then the sum, zero and negative squares they imply."""
    h = BundleMorphism(source, target, f, g)
    return run_diagrams(f"bundle morphism {f}", bundle_morphism_diagrams(h))


def identity_morphism(bundle: DiffBundle) -> BundleMorphism:
    return BundleMorphism(bundle, bundle, identity(bundle.total), identity(bundle.base))


def compose_bundle_morphisms(k: BundleMorphism, h: BundleMorphism) -> BundleMorphism:
    """k after h."""
    if h.target != k.source:
        raise DomainMismatchError("cannot compose bundle morphisms: target and source differ")
    S = h.source.structure
    return BundleMorphism(h.source, k.target, S.compose(k.f, h.f), S.compose(k.g, h.g))


def bundle_morphisms_equal(h: BundleMorphism, k: BundleMorphism) -> bool:
    return morphisms_equal(h.f, k.f) and morphisms_equal(h.g, k.g)


def _require_inverse(forward: BundleMorphism, backward: BundleMorphism) -> None:
    for h in (forward, backward):
        report = check_bundle_morphism(h.f, h.g, h.source, h.target)
        if not report.ok:
            raise IllDefinedMorphismError(f"not a bundle morphism: {', '.join(report.failed_ids())}")
    if not bundle_morphisms_equal(compose_bundle_morphisms(backward, forward), identity_morphism(forward.source)):
        raise IllDefinedMorphismError("the two maps are not mutually inverse")
    if not bundle_morphisms_equal(compose_bundle_morphisms(forward, backward), identity_morphism(forward.target)):
        raise IllDefinedMorphismError("the two maps are not mutually inverse")


def alpha_iso(M: FPModule) -> Tuple[ModuleMorphism, ModuleMorphism]:
    """alpha(m) = m eps: M -> ker(q) of the ring bundle of M, and its inverse."""
    K = bundle_to_mod_ring(mod_to_bundle_ring(M))
    forward = ModuleMorphism(M, K, tuple(K.generator(k) for k in range(M.rank)))
    backward = ModuleMorphism(K, M, tuple(M.generator(k) for k in range(M.rank)))
    if not module_morphisms_equal(compose_modules(backward, forward), module_identity(M)):
        raise IllDefinedMorphismError("alpha is not invertible")
    if not module_morphisms_equal(compose_modules(forward, backward), module_identity(K)):
        raise IllDefinedMorphismError("alpha is not invertible")
    return forward, backward


def beta_iso(bundle: DiffBundle) -> Tuple[BundleMorphism, BundleMorphism]:
    """
    beta(x) = q(x) + D(x) eps from E to the ring bundle of ker(q), and
    beta^-1(a + x eps) = z(a) + x.
    """
    if bundle.side is not Side.RING:
        raise DomainMismatchError("beta_iso needs a ring-side bundle")
    split = split_form(bundle)
    rebuilt = mod_to_bundle_ring(split.witness)
    E, F = bundle.total, rebuilt.total
    lam = bundle.lam

    forward_images = []
    for v in E.vars:
        a = rebuilt.z.apply(bundle.q.image(v))
        derivative = split_dual(lam.image(v), E)[1]
        forward_images.append(a + derivative.embed(F.vars))
    forward = RingMorphism(E, F, tuple(forward_images))

    backward_images = []
    for v in F.vars:
        if v in split.module_vars:
            backward_images.append(E.var(v))
        else:
            backward_images.append(bundle.z.apply(rebuilt.q.image(v)))
    backward = RingMorphism(F, E, tuple(backward_images))

    base = identity(bundle.base)
    pair = BundleMorphism(bundle, rebuilt, forward, base), BundleMorphism(rebuilt, bundle, backward, base)
    _require_inverse(*pair)
    return pair


def psi_iso(bundle: DiffBundle) -> Tuple[BundleMorphism, BundleMorphism]:
    """
    psi(a) = q(a), psi(D(x)) = D(x), the ring map Sym(M) -> E for M the
    image of D, stored as the arrow E -> Sym bundle; and its inverse.
    """
    if bundle.side is not Side.AFFINE:
        raise DomainMismatchError("psi_iso needs a scheme-side bundle")
    split = split_form(bundle)
    rebuilt = mod_to_bundle_affine(split.witness)
    E, F = bundle.total, rebuilt.total
    kt = kahler_tangent(E)

    forward_images = []
    for v in F.vars:
        if v in split.module_vars:
            forward_images.append(bundle.lam.image(kt.d(v)))
        else:
            forward_images.append(bundle.q.apply(rebuilt.z.image(v)))
    forward = RingMorphism(F, E, tuple(forward_images))

    backward_images = []
    for v in E.vars:
        if v in split.module_vars:
            backward_images.append(F.var(v))
        else:
            backward_images.append(rebuilt.q.apply(bundle.z.image(v)))
    backward = RingMorphism(E, F, tuple(backward_images))

    base = identity(bundle.base)
    pair = BundleMorphism(bundle, rebuilt, forward, base), BundleMorphism(rebuilt, bundle, backward, base)
    _require_inverse(*pair)
    return pair


# Functors between modules and bundles


def _linear_map(f: ModuleMorphism, source: DiffBundle, target: DiffBundle) -> RingMorphism:
    """The ring map x |-> g(x), u_k |-> f(u_k) from the source total to the target total."""
    g = f.base_map or identity(f.domain.base)
    src_split, tgt_split = split_form(source), split_form(target)
    E, F = source.total, target.total
    images = {x: g.image(x).embed(F.vars) for x in src_split.ring_vars}
    for u, image in zip(src_split.module_vars, f.images):
        total = F.zero()
        for c, w in zip(image, tgt_split.module_vars):
            total = total + c.embed(F.vars) * F.var(w)
        images[u] = total
    return RingMorphism.from_images(E, F, images)


def bundle_map_ring(f: ModuleMorphism) -> BundleMorphism:
    """The ring-side functor: (a + m eps) |-> g(a) + f(m) eps."""
    source, target = mod_to_bundle_ring(f.domain), mod_to_bundle_ring(f.codomain)
    g = f.base_map or identity(f.domain.base)
    return BundleMorphism(source, target, _linear_map(f, source, target), g)


def bundle_map_affine(f: ModuleMorphism) -> BundleMorphism:
    """The scheme-side functor, contravariant: the arrow Spec Sym(M') -> Spec Sym(M) of f: M -> M'."""
    source, target = mod_to_bundle_affine(f.codomain), mod_to_bundle_affine(f.domain)
    g = f.base_map or identity(f.domain.base)
    return BundleMorphism(source, target, _linear_map(f, target, source), g)


def _module_map(h: BundleMorphism, ring_source: DiffBundle, ring_target: DiffBundle) -> ModuleMorphism:
    """Reads f back off a ring map that is linear in the module variables."""
    src_split, tgt_split = split_form(ring_source), split_form(ring_target)
    images = tuple(tgt_split.to_element(h.f.image(u)) for u in src_split.module_vars)
    g = h.g
    domain, codomain = src_split.witness, tgt_split.witness
    base_map = None if g.domain == g.codomain and g == identity(g.domain) else g
    return ModuleMorphism(domain, codomain, images, base_map)


def module_map_ring(h: BundleMorphism) -> ModuleMorphism:
    """ker(q) -> ker(q'), the restriction of f."""
    if h.source.side is not Side.RING:
        raise DomainMismatchError("module_map_ring needs ring-side bundles")
    return _module_map(h, h.source, h.target)


def module_map_affine(h: BundleMorphism) -> ModuleMorphism:
    """D(x) |-> D(f(x)) between the images of D, reversing the arrow."""
    if h.source.side is not Side.AFFINE:
        raise DomainMismatchError("module_map_affine needs scheme-side bundles")
    return _module_map(h, h.target, h.source)
