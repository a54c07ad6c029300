import pytest
from hypothesis import given

from tancat.engine import KAHLER, check_naturality
from tancat.engine.dual import DUAL, dual_numbers
from tancat.engine.kahler import (
    check_costructure_axioms,
    co_structure,
    flat,
    kahler_apply,
    kahler_square,
    kahler_tangent,
    second_differential,
    sharp,
    tangent_space_at,
    total_differential,
)
from tancat.engine.modules import kahler_module, symmetric_algebra
from tancat.engine.rings import FPRing, Point, RingMorphism, compose, identity, morphisms_equal
from tests.corpus import AXES, CUSP, QQ, QQ_X, RINGS, ring
from tests.strategies import dual_sections, ring_maps

PLANE = FPRing(("x", "y"))


class TestDifferentials:
    def test_cusp_relation(self):
        x, y = CUSP.gens()
        T = kahler_tangent(CUSP).ring
        tx, ty, dx, dy = T.gens()
        assert total_differential(x**2 - x * y**2, CUSP) == 2 * tx * dx - ty**2 * dx - 2 * tx * ty * dy

    def test_constants_and_products(self):
        x, y = PLANE.gens()
        tx, ty, dx, dy = kahler_tangent(PLANE).ring.gens()
        assert total_differential(PLANE.one(), PLANE).is_zero()
        assert total_differential(x * y, PLANE) == tx * dy + ty * dx

    def test_second_differential(self):
        x = QQ_X.var("x")
        sq = kahler_square(QQ_X)
        assert sq.ring.vars == ("x", "d_x", "dp_x", "dpd_x")
        X, dx, dpx, dpdx = sq.ring.gens()
        assert second_differential(x**2, QQ_X) == 2 * dx * dpx + 2 * X * dpdx
        assert second_differential(QQ_X.constant(5), QQ_X).is_zero()

    def test_second_differential_is_additive(self):
        x, y = PLANE.gens()
        sq = kahler_square(PLANE)
        assert second_differential(x + y, PLANE) == sq.ring.var("dpd_x") + sq.ring.var("dpd_y")


class TestTangentBundle:
    def test_free_ring_doubles(self):
        R = FPRing(("x_1", "x_2", "x_3", "x_4"))
        T = kahler_tangent(R).ring
        assert len(T.vars) == 8
        assert T.is_free()

    def test_rationals(self):
        assert kahler_tangent(QQ).ring == QQ

    def test_cusp(self):
        expected = ring(
            ("x", "y", "d_x", "d_y"),
            lambda x, y, dx, dy: [x**2 - x * y**2, 2 * x * dx - y**2 * dx - 2 * x * y * dy],
        )
        assert kahler_tangent(CUSP).ring == expected

    def test_is_the_symmetric_algebra_of_the_differentials(self):
        for R in (CUSP, AXES, RINGS["sphere"]):
            assert symmetric_algebra(kahler_module(R)).ring == kahler_tangent(R).ring

    def test_differential_module_rows(self):
        M = kahler_module(CUSP)
        x, y = CUSP.gens()
        assert M.gens == ("d_x", "d_y")
        assert M.relations == ((2 * x - y**2, -2 * x * y),)


class TestStructureMaps:
    def test_zero(self):
        assert co_structure(QQ_X).zero.as_dict() == {"x": "x", "d_x": "0"}

    def test_lift(self):
        assert co_structure(QQ_X).lift.as_dict() == {"x": "x", "d_x": "0", "dp_x": "0", "dpd_x": "d_x"}

    def test_sum(self):
        assert co_structure(QQ_X).sum.as_dict() == {"x": "x", "d_x": "d_x + d_x__2"}

    def test_functor_identity(self):
        assert morphisms_equal(kahler_apply(identity(AXES)), identity(kahler_tangent(AXES).ring))

    @given(ring_maps(QQ_X, PLANE), ring_maps(PLANE, AXES))
    def test_functor_composition(self, f, g):
        assert morphisms_equal(kahler_apply(compose(g, f)), compose(kahler_apply(g), kahler_apply(f)))


class TestAxioms:
    @pytest.mark.parametrize("R", list(RINGS.values()) + [CUSP], ids=list(RINGS) + ["cusp"])
    def test_corpus_passes(self, R):
        report = check_costructure_axioms(R)
        assert report.ok, report.failed_ids()

    def test_corrupted_flip(self):
        T2 = kahler_square(QQ_X).ring
        images = {"x": T2.var("x"), "d_x": T2.var("dp_x"), "dp_x": T2.var("d_x"), "dpd_x": -T2.var("dpd_x")}
        bad = RingMorphism.from_images(T2, T2, images)
        report = check_costructure_axioms(QQ_X, overrides={"flip": bad})
        assert set(report.failed_ids()) == {"T4.yang-baxter", "T5.flip-lift"}
        assert report.get("T5.flip-lift").witness == "dpd_x"

    @given(ring_maps(QQ_X, AXES))
    def test_naturality(self, f):
        assert check_naturality(KAHLER, f).ok


class TestTangentSpaces:
    def test_smooth_point_of_the_axes(self):
        space = tangent_space_at(AXES, Point(AXES, (1, 0)))
        assert space.ring == ring(("d_x", "d_y"), lambda dx, dy: [dy])

    def test_crossing_point(self):
        assert tangent_space_at(AXES, Point(AXES, (0, 0))).ring == FPRing(("d_x", "d_y"))

    def test_point_of_the_hyperbola(self):
        hyperbola = ring(("x", "y"), lambda x, y: [x * y - 1])
        space = tangent_space_at(hyperbola, Point(hyperbola, (1, 1)))
        assert space.ring == ring(("d_x", "d_y"), lambda dx, dy: [dx + dy])

    def test_affine_space(self):
        space = tangent_space_at(PLANE, Point(PLANE, (3, -2)))
        assert space.ring == FPRing(("d_x", "d_y"))


class TestTranspose:
    def test_zero_transposes_to_the_zero_field(self):
        assert morphisms_equal(flat(co_structure(AXES).zero), DUAL.zero(AXES))

    def test_vector_field_transposes_to_a_retraction(self):
        T = dual_numbers(AXES).ring
        x, y, eps = T.gens()
        v = RingMorphism(AXES, T, (x + x * eps, y - y * eps))
        retraction = sharp(v)
        assert morphisms_equal(compose(retraction, co_structure(AXES).proj), identity(AXES))

    @given(dual_sections(PLANE, AXES))
    def test_flat_after_sharp(self, f):
        assert morphisms_equal(flat(sharp(f)), f)

    @given(ring_maps(kahler_tangent(PLANE).ring, AXES))
    def test_sharp_after_flat(self, g):
        assert morphisms_equal(sharp(flat(g)), g)
