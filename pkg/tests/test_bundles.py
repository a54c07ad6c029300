from dataclasses import replace

import pytest
from hypothesis import given, settings

from tancat.engine.bundles import (
    PreDiffBundle,
    Side,
    alpha_iso,
    beta_iso,
    bundle_from_pre,
    bundle_map_affine,
    bundle_map_ring,
    bundle_morphisms_equal,
    bundle_to_mod,
    bundle_to_mod_affine,
    bundle_to_mod_ring,
    check_bundle_morphism,
    check_diff_bundle,
    check_pre_bundle,
    compose_bundle_morphisms,
    derive_sum_and_negative_via_rosicky,
    identity_morphism,
    mod_to_bundle,
    mod_to_bundle_affine,
    mod_to_bundle_ring,
    module_map_affine,
    module_map_ring,
    mu,
    psi_iso,
    split_form,
    structure_for,
    tangent_bundle,
)
from tancat.engine.dual import dual_numbers, nu
from tancat.engine.errors import BundleAxiomError, DomainMismatchError, NotSplitFormError, PreBundleError
from tancat.engine.kahler import kahler_tangent
from tancat.engine.modules import (
    FPModule,
    compose_modules,
    kahler_module,
    module_identity,
    module_morphisms_equal,
    modules_equal,
)
from tancat.engine.rings import identity, morphisms_equal
from tests.corpus import DUAL_X, MODULES, RINGS, coker_x, ring
from tests.strategies import module_maps

SIDES = [Side.RING, Side.AFFINE]
FREE2 = MODULES["free2 over QQ[x]"]


def bundles():
    for name, M in MODULES.items():
        for side in SIDES:
            yield pytest.param(M, side, id=f"{side.value}: {name}")


def tangent_bundles():
    for name, R in RINGS.items():
        for side in SIDES:
            yield pytest.param(R, side, id=f"{side.value}: T({name})")


def assert_mutually_inverse(forward, backward):
    for h in (forward, backward):
        report = check_bundle_morphism(h.f, h.g, h.source, h.target)
        assert report.ok, report.failed_ids()
    assert bundle_morphisms_equal(compose_bundle_morphisms(backward, forward), identity_morphism(forward.source))
    assert bundle_morphisms_equal(compose_bundle_morphisms(forward, backward), identity_morphism(backward.source))


class TestModuleBundles:
    @pytest.mark.parametrize("M, side", bundles())
    def test_passes_every_diagram(self, M, side):
        report = check_diff_bundle(mod_to_bundle(M, side))
        assert report.ok, report.failed_ids()

    @pytest.mark.parametrize("M, side", bundles())
    def test_module_round_trip(self, M, side):
        assert modules_equal(bundle_to_mod(mod_to_bundle(M, side)), M)

    def test_ring_side_total_object(self, qx):
        bundle = mod_to_bundle(coker_x(qx), Side.RING)
        assert bundle.total.vars == ("x", "u")
        assert bundle.q.as_dict() == {"x": "x", "u": "0"}
        assert bundle.iota.as_dict() == {"x": "x", "u": "-u"}

    def test_ring_maps_point_opposite_ways(self, qx):
        ring_side = mod_to_bundle_ring(coker_x(qx))
        scheme_side = mod_to_bundle_affine(coker_x(qx))
        assert (ring_side.q.domain, ring_side.q.codomain) == (ring_side.total, qx)
        assert (scheme_side.q.domain, scheme_side.q.codomain) == (qx, scheme_side.total)
        assert ring_side.total == ring(("x", "u"), lambda x, u: [u**2, x * u])
        assert scheme_side.total == ring(("x", "u"), lambda x, u: [x * u])

    def test_scheme_side_sum(self, qx):
        bundle = mod_to_bundle(FPModule.free(qx, 1), Side.AFFINE)
        assert bundle.sigma.as_dict() == {"x": "x", "u_1": "u_1 + u_1__2"}

    def test_extractors_check_the_side(self, qx):
        with pytest.raises(DomainMismatchError):
            bundle_to_mod_ring(mod_to_bundle(coker_x(qx), Side.AFFINE))
        with pytest.raises(DomainMismatchError):
            bundle_to_mod_affine(mod_to_bundle(coker_x(qx), Side.RING))


class TestTangentBundles:
    @pytest.mark.parametrize("R, side", tangent_bundles())
    def test_passes_every_diagram(self, R, side):
        assert tangent_bundle(R, side).report.ok

    @pytest.mark.parametrize("R", list(RINGS.values()), ids=list(RINGS))
    def test_free_rank_one_is_the_dual_numbers(self, R):
        S = structure_for(Side.RING)
        bundle = mod_to_bundle(FPModule.free(R, 1, ("eps",)), Side.RING)
        assert bundle.total == dual_numbers(R).ring
        for name, expected in [("q", S.proj(R)), ("z", S.zero(R)), ("lam", S.lift(R)), ("iota", S.neg(R))]:
            assert morphisms_equal(getattr(bundle, name), expected), name

    def test_free_rank_one_is_the_kahler_tangent(self, qx):
        S = structure_for(Side.AFFINE)
        bundle = mod_to_bundle(FPModule.free(qx, 1, ("d_x",)), Side.AFFINE)
        assert bundle.total == kahler_tangent(qx).ring
        for name, expected in [("q", S.proj(qx)), ("z", S.zero(qx)), ("lam", S.lift(qx)), ("iota", S.neg(qx))]:
            assert morphisms_equal(getattr(bundle, name), expected), name

    def test_differentials_of_a_nilpotent(self):
        assert modules_equal(bundle_to_mod_affine(tangent_bundle(DUAL_X, Side.AFFINE)), kahler_module(DUAL_X))

    def test_mu_of_the_tangent_bundle(self, qx):
        assert morphisms_equal(mu(tangent_bundle(qx)), nu(qx))


class TestNegativeControls:
    @pytest.mark.parametrize("side", SIDES, ids=lambda s: s.value)
    def test_identity_is_not_a_negative(self, qx, side):
        bundle = mod_to_bundle(FPModule.free(qx, 1), side)
        broken = bundle.unchecked(iota=identity(bundle.total))
        assert set(check_diff_bundle(broken).failed_ids()) == {"DN.inverse.left", "DN.inverse.right"}

    def test_checked_construction_raises_with_the_report(self, qx):
        bundle = mod_to_bundle(FPModule.free(qx, 1), Side.RING)
        with pytest.raises(BundleAxiomError) as excinfo:
            replace(bundle, iota=identity(bundle.total))
        assert "DN.inverse.left" in excinfo.value.report.failed_ids()

    @pytest.mark.parametrize("side", SIDES, ids=lambda s: s.value)
    def test_zero_lift_breaks_only_the_lift_square(self, qx, side):
        bundle = mod_to_bundle(FPModule.free(qx, 1), side)
        target = bundle.unchecked(lam=bundle.structure.zero(bundle.total))
        report = check_bundle_morphism(identity(bundle.total), identity(qx), bundle, target)
        assert report.failed_ids() == ("BM.lambda-square",)

    def test_zero_lift_is_not_a_pre_bundle(self, qx):
        bundle = mod_to_bundle(FPModule.free(qx, 1), Side.RING)
        pre = replace(bundle.pre(), lam=bundle.structure.zero(bundle.total))
        assert "PB.lift-proj" in check_pre_bundle(pre).failed_ids()
        with pytest.raises(PreBundleError):
            derive_sum_and_negative_via_rosicky(pre)


class TestRosicky:
    @pytest.mark.parametrize("M, side", bundles())
    def test_rebuilds_sum_and_negative(self, M, side):
        bundle = mod_to_bundle(M, side)
        sigma, iota = derive_sum_and_negative_via_rosicky(bundle.pre())
        assert morphisms_equal(sigma, bundle.sigma)
        assert morphisms_equal(iota, bundle.iota)

    @pytest.mark.parametrize("R, side", tangent_bundles())
    def test_rebuilds_the_tangent_bundle(self, R, side):
        bundle = tangent_bundle(R, side)
        sigma, iota = derive_sum_and_negative_via_rosicky(bundle.pre())
        assert morphisms_equal(sigma, bundle.sigma)
        assert morphisms_equal(iota, bundle.iota)

    def test_without_a_known_width(self, qx):
        bundle = mod_to_bundle(coker_x(qx), Side.AFFINE)
        pre = PreDiffBundle(bundle.side, bundle.base, bundle.total, bundle.q, bundle.z, bundle.lam)
        assert bundle_from_pre(pre).report.ok

    def test_pre_bundle_of_a_module_bundle(self, qx):
        assert check_pre_bundle(mod_to_bundle(coker_x(qx), Side.RING).pre()).ok


class TestSplitForm:
    def test_witness_of_a_cokernel(self, qx):
        split = split_form(mod_to_bundle(coker_x(qx), Side.RING))
        assert split.ring_vars == ("x",)
        assert split.module_vars == ("u",)

    def test_element_must_be_linear(self, qx):
        bundle = mod_to_bundle(FPModule.free(qx, 1), Side.RING)
        split = split_form(bundle)
        assert split.to_element(qx.var("x").embed(bundle.total.vars) * bundle.total.var("u_1")) == (qx.var("x"),)
        with pytest.raises(NotSplitFormError):
            split.to_element(bundle.total.var("x"))


class TestIsomorphisms:
    @pytest.mark.parametrize("M", list(MODULES.values()), ids=list(MODULES))
    def test_alpha(self, M):
        forward, backward = alpha_iso(M)
        assert module_morphisms_equal(compose_modules(backward, forward), module_identity(M))
        assert forward.images == tuple(forward.codomain.generator(k) for k in range(M.rank))

    @pytest.mark.parametrize("M", list(MODULES.values()), ids=list(MODULES))
    def test_beta_on_module_bundles(self, M):
        assert_mutually_inverse(*beta_iso(mod_to_bundle_ring(M)))

    @pytest.mark.parametrize("R", list(RINGS.values()), ids=list(RINGS))
    def test_beta_on_tangent_bundles(self, R):
        assert_mutually_inverse(*beta_iso(tangent_bundle(R)))

    @pytest.mark.parametrize("M", list(MODULES.values()), ids=list(MODULES))
    def test_psi_on_module_bundles(self, M):
        assert_mutually_inverse(*psi_iso(mod_to_bundle_affine(M)))

    @pytest.mark.parametrize("R", list(RINGS.values()), ids=list(RINGS))
    def test_psi_on_tangent_bundles(self, R):
        assert_mutually_inverse(*psi_iso(tangent_bundle(R, Side.AFFINE)))

    def test_beta_needs_the_ring_side(self, qx):
        with pytest.raises(DomainMismatchError):
            beta_iso(mod_to_bundle(coker_x(qx), Side.AFFINE))


class TestFunctors:
    @settings(max_examples=20)
    @given(module_maps(FREE2, FREE2), module_maps(FREE2, coker_x()))
    def test_ring_side_composition(self, f, g):
        composite = bundle_map_ring(compose_modules(g, f))
        assert bundle_morphisms_equal(composite, compose_bundle_morphisms(bundle_map_ring(g), bundle_map_ring(f)))

    @settings(max_examples=20)
    @given(module_maps(FREE2, FREE2), module_maps(FREE2, coker_x()))
    def test_scheme_side_is_contravariant(self, f, g):
        composite = bundle_map_affine(compose_modules(g, f))
        assert bundle_morphisms_equal(composite, compose_bundle_morphisms(bundle_map_affine(f), bundle_map_affine(g)))

    @settings(max_examples=20)
    @given(module_maps(FREE2, coker_x()))
    def test_round_trip_ring_side(self, f):
        h = bundle_map_ring(f)
        assert check_bundle_morphism(h.f, h.g, h.source, h.target).ok
        assert module_morphisms_equal(module_map_ring(h), f)

    @settings(max_examples=20)
    @given(module_maps(FREE2, coker_x()))
    def test_round_trip_scheme_side(self, f):
        h = bundle_map_affine(f)
        assert check_bundle_morphism(h.f, h.g, h.source, h.target).ok
        assert module_morphisms_equal(module_map_affine(h), f)

    def test_identity(self):
        M = MODULES["coker [x] over QQ[x]"]
        h = bundle_map_ring(module_identity(M))
        assert bundle_morphisms_equal(h, identity_morphism(h.source))
