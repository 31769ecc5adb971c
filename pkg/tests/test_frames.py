import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equiaffine.connection import connection_data, frame_conditions, frame_decompose
from equiaffine.errors import NotLocallyConvex, NotPositiveDefinite
from equiaffine.frames import (build_frame_point, euclidean_normal_basis, gperp, metric_G, normalize_metric,
                               orthonormal_frame, select_metric_field, theorem_frame)
from equiaffine.linalg import det4
from equiaffine.surface import catalog, eval_jet3, parse_immersion
from equiaffine.verification import random_convex_quartic

FLAT_XI = np.array([0.0, 0.0, -1.0, 0.0])


@pytest.fixture(scope="module")
def flat_jet():
    return eval_jet3(catalog("paraboloid-graph", g="0"), 0.0, 0.0)


def test_metric_of_flat_paraboloid_is_identity(flat_jet):
    assert np.allclose(metric_G(flat_jet, xi=FLAT_XI), np.eye(2))


def test_metric_in_scaled_frame(flat_jet):
    m = np.diag([2.0, 1.0])
    G = metric_G(flat_jet, m, FLAT_XI)
    # the bracket picks up det(m) on top of the change of frame
    assert np.allclose(G, 2.0 * m @ np.eye(2) @ m.T)


def test_tangent_metric_field_gives_zero(flat_jet):
    assert np.allclose(metric_G(flat_jet, xi=flat_jet.X_u), 0.0)


def test_normalize_metric_examples():
    assert np.allclose(normalize_metric(np.diag([4.0, 4.0])), np.diag([2.0, 2.0]))
    assert np.allclose(normalize_metric(np.eye(2)), np.eye(2))
    with pytest.raises(NotPositiveDefinite):
        normalize_metric(np.diag([1.0, -1.0]))


def test_paraboloid_metric_at_1_2(paraboloid_uv):
    frame = build_frame_point(paraboloid_uv, 1.0, 2.0)
    assert np.allclose(frame.g, [[5, 2], [2, 2]], atol=1e-12)


def test_orthonormal_frame_example(paraboloid_uv):
    jet = eval_jet3(paraboloid_uv, 1.0, 2.0)
    X1, X2 = orthonormal_frame(jet, np.array([[5.0, 2.0], [2.0, 2.0]]))
    assert np.allclose(X1, jet.X_u / math.sqrt(5))
    assert np.allclose(X2, (jet.X_v - 0.4 * jet.X_u) / math.sqrt(1.2))


def test_auto_metric_field(flat_jet):
    xi = select_metric_field(flat_jet).value
    assert np.allclose(xi / np.linalg.norm(xi), FLAT_XI)
    saddle = eval_jet3(parse_immersion(("u", "v", "u^2-v^2", "0")), 0.0, 0.0)
    with pytest.raises(NotLocallyConvex):
        select_metric_field(saddle)


def test_auto_metric_field_is_positive_definite(rng):
    for _ in range(20):
        spec, u, v = random_convex_quartic(rng)
        jet = eval_jet3(spec, u, v)
        G = metric_G(jet, xi=select_metric_field(jet).value)
        assert np.all(np.linalg.eigvalsh(G) > 0)


def test_euclidean_normal_basis_is_oriented(rng):
    for _ in range(20):
        Xu, Xv = rng.normal(size=(2, 4))
        n1, n2 = euclidean_normal_basis(Xu, Xv)
        assert np.allclose([n1 @ Xu, n1 @ Xv, n2 @ Xu, n2 @ Xv, n1 @ n2], 0, atol=1e-12)
        assert det4([Xu, Xv, n1, n2]) > 0


def test_theorem_frame_product_parabolas(product_parabolas):
    jet = eval_jet3(product_parabolas, 0.0, 0.0)
    xi1, xi2 = theorem_frame(jet, jet.X_u, jet.X_v, [0, 1, 0, -1], (jet.X_uu, jet.X_vv))
    assert np.allclose(xi1, [0, -1, 0, 1])
    assert np.allclose(xi2, [0, 1, 0, 0])


def test_frame_conditions_on_random_surfaces(rng):
    for _ in range(100):
        spec, u, v = random_convex_quartic(rng)
        frame = build_frame_point(spec, u, v)
        res = frame_conditions(frame, connection_data(frame))
        assert max(res.values()) <= 1e-10, res


def test_changing_start_plane_moves_frame_by_tangent_vectors(rng):
    for _ in range(10):
        spec, u, v = random_convex_quartic(rng)
        a = build_frame_point(spec, u, v)
        b = build_frame_point(spec, u, v, sigma0="second-derivatives")
        X1, X2, x1, x2 = a.vectors()
        for old, new in ((x1, b.xi1.value), (x2, b.xi2.value)):
            assert np.abs(frame_decompose(new - old, X1, X2, x1, x2)[2:]).max() <= 1e-10


def test_gperp_examples():
    assert np.array_equal(gperp(0, 0).matrix, [[1, 0], [0, 0]])
    assert np.allclose(gperp(1, 2).matrix, [[1, -1], [-1, 9]])


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 3), st.floats(-2, 2), st.floats(-0.3, 0.3), st.floats(0.1, 3),
       st.floats(-3, 3), st.floats(-3, 3))
def test_metric_is_frame_independent(a, b, c, d, z1, z2):
    jet = eval_jet3(catalog("paraboloid-graph", g="u*v-u^2/3"), 0.2, -0.3)
    xi = np.array([0.0, 0.0, -1.0, -0.1])
    m = np.array([[a, b], [c, d]])
    if np.linalg.det(m) < 1e-3:
        return
    g = normalize_metric(metric_G(jet, xi=xi))
    gm = normalize_metric(metric_G(jet, m, xi))
    # compare as bilinear forms on the coordinate vectors
    minv = np.linalg.inv(m)
    assert np.allclose(minv @ gm @ minv.T, g, atol=1e-9)
    # adding a tangent vector to xi does not change the metric
    shifted = xi + z1 * jet.X_u + z2 * jet.X_v
    assert np.allclose(normalize_metric(metric_G(jet, xi=shifted)), g, atol=1e-10)


def test_orientation_reversing_frame_flips_the_sign(paraboloid_uv):
    jet = eval_jet3(paraboloid_uv, 0.2, 0.1)
    xi = np.array([0.0, 0.0, -1.0, -0.02])
    G = metric_G(jet, xi=xi)
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(metric_G(jet, swap, xi), -swap @ G @ swap.T)
    with pytest.raises(NotPositiveDefinite):
        normalize_metric(metric_G(jet, swap, xi))


def test_rotated_frame_invariants(rng):
    spec, u, v = random_convex_quartic(rng)
    frame = build_frame_point(spec, u, v)
    jet = eval_jet3(spec, u, v)
    C = np.asarray(frame.coeffs.value)
    X1, X2, x1, x2 = frame.vectors()
    cd = connection_data(frame)
    b, c = cd.b, cd.c
    sigma0 = [s.value for s in frame.sigma0]
    second = [[jet.X_uu, jet.X_uv], [jet.X_uv, jet.X_vv]]
    for theta in (0.3, 1.1, 2.5):
        ct, st_ = math.cos(theta), math.sin(theta)
        CY = np.array([[ct, st_], [-st_, ct]]) @ C
        Y1 = CY[0, 0] * jet.X_u + CY[0, 1] * jet.X_v
        Y2 = CY[1, 0] * jet.X_u + CY[1, 1] * jet.X_v
        e1, e2 = theorem_frame(jet, Y1, Y2, frame.metric_field.value, sigma0)

        def h1(i, j):
            D = sum(CY[i, k] * CY[j, l] * second[k][l] for k in range(2) for l in range(2))
            return frame_decompose(D, Y1, Y2, e1, e2)[2]

        assert 4 * h1(0, 1) ** 2 + h1(1, 1) ** 2 == pytest.approx(4 * b * b + c * c, abs=1e-9)
        shift = frame_decompose(e2 - x2, X1, X2, x1, x2)
        assert shift[3] == pytest.approx(0.0, abs=1e-9)
        assert shift[2] == pytest.approx(math.sin(2 * theta) * b + st_ * st_ * c, abs=1e-9)
