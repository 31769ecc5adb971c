import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equiaffine import jets
from equiaffine.errors import DomainError
from equiaffine.jets import Jet


def uv(u, v, order=3):
    return Jet.variable(u, 0, order), Jet.variable(v, 1, order)


def test_product_of_coordinates():
    u, v = uv(2.0, 3.0)
    p = u * v
    assert p.value == 6.0
    assert p.partial(1, 0) == 3.0
    assert p.partial(0, 1) == 2.0
    assert p.partial(1, 1) == 1.0
    for ij in ((3, 0), (2, 1), (1, 2), (0, 3)):
        assert p.partial(*ij) == 0.0


def test_sqrt_of_constant():
    r = jets.sqrt(Jet.constant(4.0))
    assert r.value == 2.0
    assert all(r.partial(i, j) == 0.0 for (i, j) in r.partials() if i + j > 0)


def test_sine_taylor_coefficients():
    u, _ = uv(0.0, 0.0)
    s = jets.sin(u)
    assert s.value == 0.0
    assert s.partial(1, 0) == pytest.approx(1.0)
    assert s.partial(2, 0) == pytest.approx(0.0, abs=1e-15)
    assert s.partial(3, 0) == pytest.approx(-1.0)


def test_domain_errors():
    u, _ = uv(0.0, 1.0)
    with pytest.raises(DomainError):
        1.0 / u
    with pytest.raises(DomainError):
        jets.sqrt(u - 1.0)
    with pytest.raises(DomainError):
        jets.log(u)


def test_higher_order_jets_keep_fourth_partials():
    u, v = uv(1.0, 2.0, order=4)
    f = u ** 4 * v
    assert f.partial(4, 0) == pytest.approx(24 * 2.0)
    assert f.partial(3, 1) == pytest.approx(24 * 1.0)
    assert f.truncate(3).order == 3


def test_vector_jets_and_indexing():
    u, v = uv(0.5, -0.5)
    X = jets.stack([u, v, u * v, u * u + v * v])
    assert X.shape == (4,)
    assert np.allclose(X.partial(1, 0), [1, 0, -0.5, 1.0])
    assert X[2].partial(1, 1) == 1.0


coef = st.floats(-2, 2, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(coef, min_size=6, max_size=6), st.floats(-1, 1), st.floats(-1, 1))
def test_leibniz_rule(c, a, b):
    u, v = uv(a, b)
    f = c[0] + c[1] * u + c[2] * v * v
    g = c[3] * u * v + c[4] * u ** 3 + c[5]
    fg = f * g
    expected = (f.partial(2, 1) * g.value + 2 * f.partial(1, 1) * g.partial(1, 0)
                + f.partial(2, 0) * g.partial(0, 1) + f.value * g.partial(2, 1)
                + 2 * f.partial(1, 0) * g.partial(1, 1) + f.partial(0, 1) * g.partial(2, 0))
    assert fg.partial(2, 1) == pytest.approx(expected, abs=1e-9)


def _central(fun, a, b, h=1e-5):
    du = (fun(a + h, b) - fun(a - h, b)) / (2 * h)
    dv = (fun(a, b + h) - fun(a, b - h)) / (2 * h)
    return du, dv


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=5, max_size=5), st.floats(-0.8, 0.8), st.floats(-0.8, 0.8))
def test_chain_rule_matches_finite_differences(c, a, b):
    def f(x, y):
        p = c[0] + c[1] * x + c[2] * y + c[3] * x * y + c[4] * x * x * y
        return p

    def composed(x, y):
        return math.sin(f(x, y)) * math.exp(0.3 * f(x, y))

    u, v = uv(a, b)
    J = jets.sin(f(u, v)) * jets.exp(0.3 * f(u, v))
    du, dv = _central(composed, a, b)
    scale = max(1.0, abs(du), abs(dv))
    assert abs(J.partial(1, 0) - du) <= 1e-6 * scale
    assert abs(J.partial(0, 1) - dv) <= 1e-6 * scale
