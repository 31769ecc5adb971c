import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from equiaffine.connection import connection_data, shape_operators_of
from equiaffine.curvature import (ShapeData, flat_normal_check, normal_curvature, normal_curvature_direct,
                                  semiumbilic_test, shape_operator)
from equiaffine.errors import ZeroVector
from equiaffine.frames import build_frame_point
from equiaffine.linalg import HomPair
from equiaffine.surface import catalog

mats = arrays(float, (2, 2), elements=st.floats(-3, 3))


def test_shape_operator_combinations(rng):
    sd = ShapeData(*rng.normal(size=(2, 2, 2)))
    assert np.array_equal(shape_operator(1, 0, sd), sd.S1)
    assert np.allclose(shape_operator(2, -1, sd), 2 * sd.S1 - sd.S2)
    with pytest.raises(ZeroVector):
        shape_operator(0, 0, sd)


def test_radial_field_of_a_central_quadric():
    frame = build_frame_point(catalog("ellipsoid-graph", g="u*v+0.2*u^2"), 0.1, -0.2)
    S = shape_operators_of(frame, [frame.X.truncate(frame.order)])[0]
    assert np.allclose(S, -np.eye(2), atol=1e-12)


def test_product_parabolas_are_flat(product_parabolas):
    cd = connection_data(build_frame_point(product_parabolas, 0.3, -0.1))
    R1, R2 = normal_curvature(ShapeData.from_connection(cd), cd.b, cd.c)
    assert np.abs(R1).max() <= 1e-12 and np.abs(R2).max() <= 1e-12
    rep = flat_normal_check(ShapeData.from_connection(cd), cd.b, cd.c)
    assert rep.flat and rep.criterion


def test_umbilic_shape_operators_are_flat():
    R1, R2 = normal_curvature(ShapeData(np.eye(2), np.eye(2)), 0.8, -0.4)
    assert np.allclose(R1, 0) and np.allclose(R2, 0)


@settings(max_examples=500, deadline=None)
@given(mats, mats, st.floats(-2, 2), st.floats(-2, 2))
def test_expansion_matches_direct_formula(S1, S2, b, c):
    h1, h2 = np.array([[0.0, b], [b, c]]), np.eye(2)
    R1, R2 = normal_curvature(ShapeData(S1, S2), b, c)
    assert np.allclose(R1, normal_curvature_direct(S1, h1, h2), atol=1e-10)
    assert np.allclose(R2, normal_curvature_direct(S2, h1, h2), atol=1e-10)
    assert np.allclose(normal_curvature_direct(S1, h1, h2, 1, 0), -normal_curvature_direct(S1, h1, h2), atol=1e-12)


def test_semiumbilic_examples():
    both = semiumbilic_test(ShapeData(np.zeros((2, 2)), np.eye(2)))
    assert both.semiumbilic
    assert HomPair.of(0, 1) in both.directions and HomPair.of(1, 0) in both.directions
    not_semi = semiumbilic_test(ShapeData([[0, 1], [0, 0]], [[0, 0], [1, 0]]))
    assert not not_semi.semiumbilic
    assert not_semi.minors[0] == pytest.approx(1.0)
    one = semiumbilic_test(ShapeData([[1, 2], [2, 0]], [[3, 0], [0, 3]]))
    assert one.semiumbilic and one.directions == [HomPair.of(0, 1)]


def test_flat_normal_examples(rng):
    rep = flat_normal_check(ShapeData([[1, 0], [0.5, 2]], np.eye(2)), 0.3, 0.2)
    assert not rep.flat and not rep.criterion
    for _ in range(50):
        b, c = rng.uniform(-2, 2, 2)
        l1, l2 = rng.normal(size=2)
        l4 = l1 + l2 * c / b
        rep = flat_normal_check(ShapeData([[l1, l2], [l2, l4]], np.eye(2)), b, c)
        assert rep.flat and rep.criterion and rep.agree
