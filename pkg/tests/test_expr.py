import math

import pytest
from hypothesis import given, settings, strategies as st

from equiaffine import expr
from equiaffine.errors import DomainError, ParseError, UnknownIdentifier
from equiaffine.jets import Jet


def test_parse_and_evaluate():
    tree = expr.parse("(u^2+v^2+u^2*v^2)/2")
    assert expr.evaluate(tree, {"u": 1.0, "v": 2.0}) == pytest.approx(4.5)
    assert expr.variables(tree) == {"u", "v"}


def test_parse_error_reports_offset():
    with pytest.raises(ParseError) as info:
        expr.parse("u+*v")
    assert info.value.offset == 2
    assert info.value.expected


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier) as info:
        expr.parse("w")
    assert info.value.name == "w"
    with pytest.raises(UnknownIdentifier):
        expr.parse("tan(u)")


def test_space_variables_for_hypersurfaces():
    tree = expr.parse("1/(x*y*z)", variables=expr.SPACE_VARIABLES)
    assert expr.evaluate(tree, {"x": 1.0, "y": 2.0, "z": 0.5}) == pytest.approx(1.0)


def test_evaluation_faults_are_domain_errors():
    with pytest.raises(DomainError):
        expr.evaluate(expr.parse("log(u)"), {"u": -1.0, "v": 0.0})
    with pytest.raises(DomainError):
        expr.evaluate(expr.parse("1/(u-v)"), {"u": 1.0, "v": 1.0})


def test_symbolic_derivative_matches_jet():
    tree = expr.parse("sin(u*v)+sqrt(1+u^2)*exp(v)")
    env = {"u": Jet.variable(0.3, 0, 3), "v": Jet.variable(-0.7, 1, 3)}
    J = expr.evaluate(tree, env)
    du = expr.evaluate(expr.diff(tree, "u"), {"u": 0.3, "v": -0.7})
    dudv = expr.evaluate(expr.diff(expr.diff(tree, "u"), "v"), {"u": 0.3, "v": -0.7})
    assert J.partial(1, 0) == pytest.approx(du, rel=1e-13)
    assert J.partial(1, 1) == pytest.approx(dudv, rel=1e-13)


def _trees():
    # parsed trees never hold negative literals; a leading minus is a Neg node
    leaves = st.one_of(st.sampled_from([expr.Var("u"), expr.Var("v")]),
                       st.floats(0, 50, allow_nan=False).map(lambda x: expr.Num(round(x, 3))))

    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from("+-*/"), children, children).map(lambda t: expr.BinOp(*t)),
            children.map(expr.Neg),
            st.tuples(children, st.integers(0, 4)).map(lambda t: expr.Pow(*t)),
            st.tuples(st.sampled_from(expr.FUNCTIONS), children).map(lambda t: expr.Call(t[0], t[1])),
        )
    return st.recursive(leaves, extend, max_leaves=12)


@settings(max_examples=200, deadline=None)
@given(_trees())
def test_printer_round_trips(tree):
    assert expr.parse(expr.to_text(tree)) == tree


def test_substitute():
    tree = expr.substitute(expr.parse("t^2/2", variables=("t",)), {"t": expr.Var("u")})
    assert expr.evaluate(tree, {"u": 3.0}) == pytest.approx(4.5)
    assert math.isclose(expr.evaluate(expr.parse("2^3"), {}), 8.0)
