"""Symmetric and antisymmetric equiaffine plane bundles and plane comparison.

Starting from the unique transversal frame (xi1, xi2) of any transversal plane,
the equiaffine planes are spanned by xi1 - (p X1 + q X2) and xi2 - (r X1 + s X2).
The corrections are computed from a1..a8, b = h1(X1, X2) and c = h1(X2, X2);
when those are jets the corrected fields are jets too, so the connection of
the new bundle can be formed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .connection import ConnectionData, connection_data, nabla_g_quantities
from .errors import InflectionPoint, ZeroVector
from .frames import FramePoint
from .linalg import max_principal_angle, orthonormal_basis, outside_component, solve_small

INFLECTION_TOL = 1e-10

KINDS = ("antisymmetric", "symmetric")


@dataclass(frozen=True)
class PlaneAtPoint:
    """A transversal plane with basis (xi1, xi2) normalized by [X1, X2, xi1, xi2] = 1."""

    xi1: np.ndarray
    xi2: np.ndarray
    corrections: tuple = (0.0, 0.0, 0.0, 0.0)
    frame: FramePoint | None = None
    kind: str = "plane"

    @property
    def basis(self) -> tuple[np.ndarray, np.ndarray]:
        return self.xi1, self.xi2


def is_inflection(b: float, c: float) -> bool:
    return 4.0 * b * b + c * c <= INFLECTION_TOL


def antisymmetric_corrections(a, b, c):
    """(p, q, r, s) killing B1, B2, C1, C2; works on floats and jets."""
    a1, a2, a3, a4, a5, a6, a7, a8 = a
    P = a2 + a3 + a5 - a8
    Q = a4 + a6 + a7 - a1
    den = 4.0 * b * b + c * c
    p = (-2.0 * P * b - Q * c) / den
    q = (-2.0 * Q * b + P * c) / den
    r = -(a1 + a4 + q * b)
    s = -(a5 + a8 + p * b + q * c)
    return p, q, r, s


def symmetric_corrections(a, b, c):
    """(p, q, r, s) killing B1, B2, D1, D2; works on floats and jets."""
    a1, a2, a3, a4, a5, a6, a7, a8 = a
    P = a2 + a3 - 3.0 * a5 - a8
    Q = a6 + a7 - a1 - 3.0 * a4
    den = 4.0 * b * b + c * c
    p = (2.0 * P * b - Q * c) / den
    q = (2.0 * Q * b + P * c) / den
    r = -(a1 + a4 + q * b)
    s = -(a5 + a8 + p * b + q * c)
    return p, q, r, s


def corrected_coefficients(a, b, c, corrections) -> np.ndarray:
    """a1..a8 of the bundle xi_k - Z_k, with Z1 = p X1 + q X2 and Z2 = r X1 + s X2."""
    p, q, r, s = corrections
    a1, a2, a3, a4, a5, a6, a7, a8 = a
    return np.array([a1 + r, a2 + s, a3 + b * p, a4 + b * q,
                     a5 + b * p, a6 + b * q, a7 + c * p + r, a8 + c * q + s])


def sequential_corrections(a, b: float, c: float, kind: str = "antisymmetric"):
    """Oracle path: first make the bundle equiaffine, then solve the 4x4 system for C (or D)."""
    a = np.asarray(a, dtype=float)
    nab = nabla_g_quantities(a)
    first = (0.0, 0.0, nab.B1 / 2.0, nab.B2 / 2.0)
    a_eq = corrected_coefficients(a, b, c, first)
    nab = nabla_g_quantities(a_eq)
    if kind == "antisymmetric":
        A = [[0.0, b, 1.0, 0.0], [b, c, 0.0, 1.0], [3.0 * b, 0.0, 0.0, 1.0], [c, 3.0 * b, 1.0, 0.0]]
        rhs = [0.0, 0.0, nab.C1, nab.C2]
    elif kind == "symmetric":
        A = [[0.0, b, 1.0, 0.0], [b, c, 0.0, 1.0], [b, 0.0, 0.0, -1.0], [-c, b, -1.0, 0.0]]
        rhs = [0.0, 0.0, nab.D1, nab.D2]
    else:
        raise ValueError(f"unknown plane kind {kind!r}")
    second = solve_small(np.array(A), np.array(rhs))
    return tuple(float(x + y) for x, y in zip(first, second))


def _equiaffine_plane(cd: ConnectionData, frame: FramePoint, kind: str) -> PlaneAtPoint:
    b, c = cd.b, cd.c
    if is_inflection(b, c):
        raise InflectionPoint(f"inflection point (4b^2 + c^2 = {4 * b * b + c * c:.3e})")
    rule = antisymmetric_corrections if kind == "antisymmetric" else symmetric_corrections
    if cd.jet_a is not None:
        a_j = [cd.jet_a[i] for i in range(8)]
        p, q, r, s = rule(a_j, cd.jet_h1[0, 1], cd.jet_h1[1, 1])
        X1, X2 = frame.X1, frame.X2
        xi1 = frame.xi1 - (p * X1 + q * X2)
        xi2 = frame.xi2 - (r * X1 + s * X2)
        new_frame = frame.with_transversal(xi1, xi2)
        corr = tuple(float(jets.value_of(x)) for x in (p, q, r, s))
    else:
        corr = rule(cd.a, b, c)
        new_frame = None
    X1, X2, x1, x2 = frame.vectors()
    p, q, r, s = corr
    return PlaneAtPoint(x1 - p * X1 - q * X2, x2 - r * X1 - s * X2, corr, new_frame, kind)


def antisymmetric_plane(cd: ConnectionData, frame: FramePoint) -> PlaneAtPoint:
    return _equiaffine_plane(cd, frame, "antisymmetric")


def symmetric_plane(cd: ConnectionData, frame: FramePoint) -> PlaneAtPoint:
    return _equiaffine_plane(cd, frame, "symmetric")


def equiaffine_plane(cd: ConnectionData, frame: FramePoint, kind: str) -> PlaneAtPoint:
    if kind not in KINDS:
        raise ValueError(f"unknown plane kind {kind!r}")
    return _equiaffine_plane(cd, frame, kind)


def plane_residuals(plane: PlaneAtPoint) -> dict:
    """Recompute the connection of the corrected bundle and report B, C, D."""
    if plane.frame is None or plane.frame.order < 1:
        raise ValueError("plane has no jet frame; build the frame with jet order >= 3")
    cd = connection_data(plane.frame)
    nab = nabla_g_quantities(cd)
    return {"B1": nab.B1, "B2": nab.B2, "C1": nab.C1, "C2": nab.C2, "D1": nab.D1, "D2": nab.D2,
            "h1_11": float(cd.h1[0, 0]), "h2_identity": float(np.abs(cd.h2 - np.eye(2)).max())}


def _span(P):
    if isinstance(P, PlaneAtPoint):
        return [P.xi1, P.xi2]
    return [np.asarray(v, dtype=float) for v in P]


def plane_compare(P, Q) -> float:
    """Largest principal angle between two 2-planes (radians)."""
    return max_principal_angle(_span(P), _span(Q))


def contains_direction(P, Y) -> float:
    """Norm of the component of Y/|Y| orthogonal to the plane."""
    Y = np.asarray(Y, dtype=float)
    n = float(np.linalg.norm(Y))
    if n == 0.0:
        raise ZeroVector("direction vector is zero")
    q = orthonormal_basis(_span(P))
    return float(np.linalg.norm(outside_component(q, Y / n)))
