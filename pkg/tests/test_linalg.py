import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from equiaffine.errors import SingularSystem
from equiaffine.linalg import ALL_PAIRS, HomPair, det4, max_principal_angle, pencil_roots, solve_small
from equiaffine.verification import _sweep_roots


def test_det4_examples():
    I = np.eye(4)
    assert det4(list(I.T)) == 1.0
    assert det4([I[1], I[0], I[2], I[3]]) == -1.0
    rows = np.array([[1, 0, 0, 0.7], [0, 1, 0, -0.3], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=float)
    assert det4(list(rows)) == pytest.approx(1.0)


@settings(max_examples=100, deadline=None)
@given(arrays(float, (4, 4), elements=st.floats(-3, 3)), st.floats(-5, 5), st.integers(0, 3))
def test_det4_multilinear(M, t, k):
    cols = list(M.T)
    scaled = [c * t if i == k else c for i, c in enumerate(cols)]
    assert abs(det4(scaled) - t * det4(cols)) <= 1e-12 * max(1.0, abs(t) * np.prod(np.abs(M).max(axis=0) * 2 + 1))


def test_solve_small_identity_and_singular():
    b = np.array([1.0, -2.0, 3.5, 0.25])
    assert np.allclose(solve_small(np.eye(4), b), b)
    with pytest.raises(SingularSystem):
        solve_small(np.ones((3, 3)), np.ones(3))


def test_solve_small_antisymmetric_correction_system():
    # b = 1, c = 0, right side (0, 0, 3, 3); the exact solution is (3/2, 3/2, -3/2, -3/2)
    A = np.array([[0, 1, 1, 0], [1, 0, 0, 1], [3, 0, 0, 1], [0, 3, 1, 0]], dtype=float)
    rhs = np.array([0.0, 0.0, 3.0, 3.0])
    x = solve_small(A, rhs)
    assert np.allclose(x, [1.5, 1.5, -1.5, -1.5])
    assert np.linalg.norm(A @ x - rhs) <= 1e-12 * np.linalg.norm(rhs)
    assert np.linalg.norm(A @ np.array([1, 1, -1, -1.0]) - rhs) > 1.0


def test_pencil_roots_examples():
    A = np.array([[0.0, 2.0], [2.0, 3.0]])
    roots = pencil_roots(A, np.eye(2))
    assert roots == [HomPair.of(1, 1), HomPair.of(1, -4)]
    single = pencil_roots(np.zeros((2, 2)), np.eye(2))
    assert single == [HomPair.of(1, 0)]
    assert pencil_roots(np.zeros((2, 2)), np.zeros((2, 2))) is ALL_PAIRS
    assert pencil_roots(np.eye(2), np.eye(2) * 0.5)[0] == HomPair.of(1, -2)
    assert pencil_roots(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == [HomPair.of(0, 1), HomPair.of(1, 0)]
    assert pencil_roots(np.diag([1.0, -1.0]), np.array([[0, 1.0], [1, 0]])) == []


def test_hompair_normalization():
    p = HomPair.of(-2.0, 2.0)
    assert p.r > 0 and math.isclose(math.hypot(p.r, p.s), 1.0)
    assert HomPair.of(0.0, -3.0) == HomPair.of(0.0, 1.0)
    with pytest.raises(ValueError):
        HomPair.of(0.0, 0.0)


sym = st.tuples(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2)).map(
    lambda t: np.array([[t[0], t[1]], [t[1], t[2]]]))


@settings(max_examples=150, deadline=None)
@given(sym, sym)
def test_pencil_roots_agree_with_sign_sweep(A, B):
    roots = pencil_roots(A, B)
    if roots is ALL_PAIRS:
        return
    # only transversal sign changes are visible to the sweep; tangential double roots are skipped
    simple = [r for r in roots if len(roots) == 2]
    swept = _sweep_roots(A, B)
    angles = [math.atan2(r.s, r.r) % math.pi for r in simple]
    for t in swept:
        assert min((min(abs(t - a), math.pi - abs(t - a)) for a in angles), default=0.0) <= 1e-6 or not simple
    for r in roots:
        M = r.r * A + r.s * B
        assert abs(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]) <= 1e-9 * (np.abs(A).max() + np.abs(B).max() + 1) ** 2


def test_principal_angle_examples():
    e = np.eye(4)
    assert max_principal_angle([e[2], e[3]], [e[3], e[2] + e[3]]) == pytest.approx(0.0, abs=1e-12)
    tilted = (e[3] + e[0]) / math.sqrt(2)
    assert max_principal_angle([e[2], e[3]], [e[2], tilted]) == pytest.approx(math.pi / 4)
