import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from equiaffine.connection import connection_data, nabla_g_quantities
from equiaffine.equiaffine import (antisymmetric_corrections, antisymmetric_plane, contains_direction,
                                   corrected_coefficients, equiaffine_plane, plane_compare, plane_residuals,
                                   sequential_corrections, symmetric_corrections, symmetric_plane)
from equiaffine.errors import InflectionPoint, ZeroVector
from equiaffine.frames import build_frame_point
from equiaffine.surface import affine_image, catalog, parse_immersion
from equiaffine.verification import random_convex_quartic


def planes(spec, u, v, **kw):
    frame = build_frame_point(spec, u, v, order=4, **kw)
    cd = connection_data(frame)
    return antisymmetric_plane(cd, frame), symmetric_plane(cd, frame)


def test_product_parabolas_plane_is_unchanged(product_parabolas):
    anti, sym = planes(product_parabolas, 0.0, 0.0, sigma0="second-derivatives")
    printed = [[0, -1, 0, 1], [0, 1, 0, 0]]
    assert plane_compare(anti, printed) <= 1e-12
    assert plane_compare(sym, printed) <= 1e-12
    assert np.allclose(anti.corrections, 0.0)


def test_corrections_for_a2_example():
    a = np.zeros(8)
    a[1] = 1.0
    p, q, r, s = antisymmetric_corrections(a, 1.0, 0.0)
    assert (p, q) == pytest.approx((-0.5, 0.0))
    nab = nabla_g_quantities(corrected_coefficients(a, 1.0, 0.0, (p, q, r, s)))
    assert np.allclose([nab.B1, nab.B2, nab.C1, nab.C2], 0.0, atol=1e-15)


@settings(max_examples=200, deadline=None)
@given(arrays(float, 8, elements=st.floats(-3, 3)), st.floats(-2, 2), st.floats(-2, 2))
def test_single_pass_matches_sequential_oracle(a, b, c):
    if 4 * b * b + c * c < 1e-2:
        return
    for kind, rule, zero in (("antisymmetric", antisymmetric_corrections, ("C1", "C2")),
                             ("symmetric", symmetric_corrections, ("D1", "D2"))):
        corr = rule(a, b, c)
        assert np.allclose(corr, sequential_corrections(a, b, c, kind), atol=1e-8)
        nab = nabla_g_quantities(corrected_coefficients(a, b, c, corr))
        assert max(abs(nab.B1), abs(nab.B2), *(abs(getattr(nab, k)) for k in zero)) <= 1e-9


def test_inflection_is_rejected():
    spec = parse_immersion(("u", "v", "u^3", "u^2+v^2"))
    frame = build_frame_point(spec, 0.0, 0.0, order=4)
    cd = connection_data(frame)
    with pytest.raises(InflectionPoint):
        antisymmetric_plane(cd, frame)
    with pytest.raises(ValueError):
        equiaffine_plane(cd, frame, "diagonal")


def test_residuals_after_construction(rng):
    for _ in range(15):
        spec, u, v = random_convex_quartic(rng)
        anti, sym = planes(spec, u, v)
        ra, rs = plane_residuals(anti), plane_residuals(sym)
        assert max(abs(ra[k]) for k in ("B1", "B2", "C1", "C2")) <= 1e-7
        assert max(abs(rs[k]) for k in ("B1", "B2", "D1", "D2")) <= 1e-7
        assert abs(ra["h1_11"]) <= 1e-9 and ra["h2_identity"] <= 1e-9


def test_symmetric_and_antisymmetric_differ_on_generic_surfaces(rng):
    angles = []
    for _ in range(10):
        spec, u, v = random_convex_quartic(rng)
        anti, sym = planes(spec, u, v)
        angles.append(plane_compare(anti, sym))
    assert sum(a > 1e-3 for a in angles) >= 8


def test_planes_agree_on_paraboloid_graphs():
    spec = catalog("paraboloid-graph", g="0.7*u*v+0.3*u^3-0.2*v^3+0.1*u^2*v")
    for u, v in ((0.2, 0.1), (-0.3, 0.4), (0.5, -0.5)):
        anti, sym = planes(spec, u, v)
        assert plane_compare(anti, sym) <= 1e-7


def test_start_plane_does_not_matter(rng):
    for _ in range(10):
        spec, u, v = random_convex_quartic(rng)
        a1, s1 = planes(spec, u, v)
        a2, s2 = planes(spec, u, v, sigma0="second-derivatives")
        assert plane_compare(a1, a2) <= 1e-7
        assert plane_compare(s1, s2) <= 1e-7


def test_affine_equivariance(rng):
    spec, u, v = random_convex_quartic(rng)
    xi = build_frame_point(spec, u, v).metric_field.value
    spec = spec.with_xi([repr(float(x)) for x in xi])
    A = rng.normal(size=(4, 4))
    if np.linalg.det(A) < 0:
        A[:, 0] *= -1
    A /= np.linalg.det(A) ** 0.25
    assert np.linalg.det(A) == pytest.approx(1.0)
    image = affine_image(spec, A, rng.normal(size=4))
    for P, Q in zip(planes(spec, u, v), planes(image, u, v)):
        assert plane_compare([A @ P.xi1, A @ P.xi2], Q) <= 1e-6


def test_plane_compare_and_containment():
    e = np.eye(4)
    assert plane_compare([e[2], e[3]], [e[2], e[3]]) == 0.0
    assert plane_compare([e[2], e[3]], [e[2], (e[3] + e[0]) / math.sqrt(2)]) == pytest.approx(math.pi / 4)
    assert plane_compare([e[2], e[3]], [2 * e[2] + e[3], e[3] - e[2]]) <= 1e-12
    assert contains_direction([e[2], e[3]], e[2] + 3 * e[3]) <= 1e-15
    assert contains_direction([e[2], e[3]], e[0]) == pytest.approx(1.0)
    assert contains_direction([e[2], e[3]], e[2] + e[0]) == pytest.approx(math.sqrt(2) / 2)
    with pytest.raises(ZeroVector):
        contains_direction([e[2], e[3]], np.zeros(4))
