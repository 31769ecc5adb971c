import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from equiaffine.connection import (connection_data, frame_decompose, nabla_g_direct, nabla_g_from_tensor,
                                   nabla_g_quantities, nabla_g_tensor_from_coefficients, shape_operators_of,
                                   torsion_residual)
from equiaffine.frames import build_frame_point
from equiaffine.jets import Jet
from equiaffine.surface import catalog
from equiaffine.verification import random_convex_quartic


def test_frame_decompose_examples(rng):
    X1, X2, x1, x2 = rng.normal(size=(4, 4))
    assert np.allclose(frame_decompose(X1, X1, X2, x1, x2), [1, 0, 0, 0])
    assert np.allclose(frame_decompose(x2, X1, X2, x1, x2), [0, 0, 0, 1])
    e = np.eye(4)
    coords = frame_decompose(e[3], e[0], e[2], [0, -1, 0, 1], [0, 1, 0, 0])
    assert np.allclose(coords, [0, 0, 1, 1])


def test_product_parabolas_connection(product_parabolas):
    frame = build_frame_point(product_parabolas, 0.0, 0.0, sigma0="second-derivatives")
    cd = connection_data(frame)
    assert np.abs(cd.a).max() <= 1e-12
    assert (cd.b, cd.c) == pytest.approx((0.0, 1.0))
    assert np.abs(cd.tau).max() <= 1e-12
    assert np.abs(cd.S1).max() <= 1e-12 and np.abs(cd.S2).max() <= 1e-12
    assert np.abs(nabla_g_quantities(cd).as_array()).max() <= 1e-12


def test_constant_transversal_field_has_no_shape_operator():
    frame = build_frame_point(catalog("paraboloid-graph", g="0"), 0.0, 0.0)
    S = shape_operators_of(frame, [Jet.constant(np.array([0.0, 0.0, 0.0, 1.0]), frame.order)])[0]
    assert np.allclose(S, 0.0)


def test_nabla_g_closed_form_examples():
    assert np.allclose(nabla_g_quantities(np.zeros(8)).as_array(), 0.0)
    a = np.zeros(8)
    a[0] = 1.0
    nab = nabla_g_quantities(a)
    assert nab.B1 == -2.0
    assert np.allclose(nab.as_array()[1:], 0.0)
    assert np.allclose(nabla_g_from_tensor(nabla_g_tensor_from_coefficients(a)).as_array(), nab.as_array())


@settings(max_examples=200, deadline=None)
@given(arrays(float, 8, elements=st.floats(-5, 5)))
def test_closed_form_matches_tensor_definition(a):
    direct = nabla_g_from_tensor(nabla_g_tensor_from_coefficients(a)).as_array()
    assert np.allclose(nabla_g_quantities(a).as_array(), direct, atol=1e-9)


def test_closed_form_matches_jet_evaluation(rng):
    for _ in range(20):
        spec, u, v = random_convex_quartic(rng)
        frame = build_frame_point(spec, u, v)
        cd = connection_data(frame)
        assert np.allclose(nabla_g_quantities(cd).as_array(), nabla_g_direct(frame, cd).as_array(), atol=1e-9)
        assert torsion_residual(frame, cd) <= 1e-8


def test_connection_coefficients_by_finite_differences(rng):
    spec, u, v = random_convex_quartic(rng)
    frame = build_frame_point(spec, u, v)
    cd = connection_data(frame)
    X1, X2, x1, x2 = frame.vectors()
    C = np.asarray(frame.coeffs.value)
    h = 1e-4

    def tangent(du, dv):
        f = build_frame_point(spec, u + du, v + dv, xi=frame.metric_field)
        return f.X1.value, f.X2.value

    plus_u, minus_u = tangent(h, 0), tangent(-h, 0)
    plus_v, minus_v = tangent(0, h), tangent(0, -h)
    estimate = []
    for a in range(2):
        for b in range(2):
            d_u = (plus_u[b] - minus_u[b]) / (2 * h)
            d_v = (plus_v[b] - minus_v[b]) / (2 * h)
            D = C[a, 0] * d_u + C[a, 1] * d_v
            estimate += list(frame_decompose(D, X1, X2, x1, x2)[:2])
    assert np.allclose(estimate, cd.a, rtol=1e-5, atol=1e-5 * np.abs(cd.a).max())
