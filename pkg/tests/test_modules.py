import pytest
from hypothesis import given

from tancat.engine.errors import DomainMismatchError, IllDefinedMorphismError, UndecidedError
from tancat.engine.modules import (
    FPModule,
    ModuleMorphism,
    apply_module_morphism,
    compose_modules,
    module_action,
    module_identity,
    module_morphisms_equal,
    modules_equal,
    square_zero_extension,
    symmetric_algebra,
)
from tancat.engine.rings import FPRing, RingMorphism
from tests.corpus import MODULES, QQ, coker_x, ring
from tests.strategies import module_maps


class TestElements:
    def test_action_kills_the_annihilated_generator(self, qx):
        M = coker_x(qx)
        assert module_action(qx.var("x"), (qx.one(),), M) == (qx.zero(),)

    def test_action_of_a_unit(self, qx):
        M = coker_x(qx)
        assert module_action(qx.var("x") + 1, (qx.one(),), M) == (qx.one(),)

    def test_constant_row_identifies_generators(self):
        M = MODULES["coker [1, 1] over QQ"]
        assert M.equal(M.generator(0), tuple(-c for c in M.generator(1)))

    def test_row_with_a_unit_makes_the_module_free(self, qx):
        M = MODULES["coker [x, 1] over QQ[x]"]
        x = qx.var("x")
        assert M.equal((x, qx.zero()), (qx.zero(), -qx.one()))
        assert not M.is_zero(M.generator(0))

    def test_relations_of_the_base_apply(self):
        M = MODULES["coker [x] over QQ[x]/(x^2)"]
        x = M.base.var("x")
        assert M.is_zero((x,))
        assert not M.is_zero((M.base.one(),))

    def test_axes_module(self, axes):
        M = MODULES["coker [y, 0; 0, x] over QQ[x,y]/(xy)"]
        x, y = axes.gens()
        assert M.is_zero((y, x))
        assert not M.is_zero((x, y))

    def test_undecided_presentation(self):
        plane = FPRing(("x", "y"))
        x, y = plane.gens()
        M = FPModule(plane, ("u_1", "u_2"), ((x, y),))
        with pytest.raises(UndecidedError):
            M.is_zero(M.generator(0))

    def test_default_generator_names(self, qx):
        assert FPModule.free(qx, 3).gens == ("u_1", "u_2", "u_3")


class TestModuleEquality:
    def test_redundant_row(self, qx):
        x = qx.var("x")
        assert modules_equal(coker_x(qx), FPModule(qx, ("u",), ((x,), (x**2,))))

    def test_smaller_annihilator(self, qx):
        x = qx.var("x")
        assert not modules_equal(coker_x(qx), FPModule(qx, ("u",), ((x**2,),)))

    def test_different_generators(self, qx):
        assert not modules_equal(FPModule.free(qx, 1), FPModule.free(qx, 1, ("v",)))


class TestExtensions:
    def test_square_zero_extension_of_a_cokernel(self, qx):
        ext = square_zero_extension(coker_x(qx))
        assert ext.ring == ring(("x", "u"), lambda x, u: [u**2, x * u])

    def test_symmetric_algebra_of_a_cokernel(self, qx):
        ext = symmetric_algebra(coker_x(qx))
        assert ext.ring == ring(("x", "u"), lambda x, u: [x * u])

    def test_free_module_over_the_rationals(self):
        M = FPModule.free(QQ, 2)
        square = square_zero_extension(M).ring
        assert square == ring(("u_1", "u_2"), lambda a, b: [a**2, a * b, b**2])
        assert symmetric_algebra(M).ring.is_free()

    def test_generator_names_avoid_the_base(self, qx):
        ext = square_zero_extension(FPModule.free(qx, 1, ("x",)))
        assert ext.gen_vars == ("x__2",)

    def test_element_to_ring(self, qx):
        ext = square_zero_extension(FPModule.free(qx, 2))
        x, u1, u2 = ext.ring.gens()
        assert ext.element_to_ring((qx.var("x"), qx.constant(3))) == x * u1 + 3 * u2


class TestMorphisms:
    def test_onto_a_cokernel(self, qx):
        f = ModuleMorphism(FPModule.free(qx, 1), coker_x(qx), ((qx.one(),),))
        assert apply_module_morphism(f, (qx.var("x"),)) == (qx.zero(),)
        assert f((qx.var("x") + 2,)) == (qx.constant(2),)

    def test_must_respect_the_relations(self, qx):
        with pytest.raises(IllDefinedMorphismError):
            ModuleMorphism(coker_x(qx), FPModule.free(qx, 1), ((qx.one(),),))

    def test_composition(self, qx):
        x = qx.var("x")
        free1, free2 = FPModule.free(qx, 1), FPModule.free(qx, 2)
        f = ModuleMorphism(free1, free2, ((qx.one(), x),))
        g = ModuleMorphism(free2, free1, ((qx.one(),), (qx.one(),)))
        assert compose_modules(g, f).images == ((x + 1,),)

    def test_different_bases_need_a_base_map(self, qx):
        with pytest.raises(DomainMismatchError):
            ModuleMorphism(coker_x(qx), FPModule.free(QQ, 1), ((QQ.one(),),))

    def test_base_map_changes_the_scalars(self, qx):
        evaluation = RingMorphism(qx, QQ, (QQ.zero(),))
        f = ModuleMorphism(coker_x(qx), FPModule.free(QQ, 1), ((QQ.one(),),), base_map=evaluation)
        assert f((qx.var("x") + 5,)) == (QQ.constant(5),)

    @given(
        module_maps(MODULES["free2 over QQ[x]"], MODULES["free2 over QQ[x]"]),
        module_maps(MODULES["free2 over QQ[x]"], MODULES["free1 over QQ[x]"]),
    )
    def test_identity_laws(self, f, g):
        assert module_morphisms_equal(compose_modules(g, module_identity(g.domain)), g)
        assert module_morphisms_equal(compose_modules(module_identity(f.codomain), f), f)

    @given(
        module_maps(MODULES["free1 over QQ[x]"], MODULES["free2 over QQ[x]"]),
        module_maps(MODULES["free2 over QQ[x]"], MODULES["free2 over QQ[x]"]),
        module_maps(MODULES["free2 over QQ[x]"], MODULES["free1 over QQ[x]"]),
    )
    def test_associativity(self, f, g, h):
        left = compose_modules(h, compose_modules(g, f))
        right = compose_modules(compose_modules(h, g), f)
        assert module_morphisms_equal(left, right)
