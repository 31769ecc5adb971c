"""Induced connection, fundamental forms, shape operators and the nabla-g combinations.

The ambient derivative along a frame vector is D_{X_a} W = sum_i coeffs[a, i] dW/dx_i,
decomposed in the moving frame (X1, X2, xi1, xi2):

    D_{X_a} X_b  = nabla_{X_a} X_b + h1(X_a, X_b) xi1 + h2(X_a, X_b) xi2
    D_{X_a} xi_k = -S_k X_a + tau_k^1(X_a) xi1 + tau_k^2(X_a) xi2
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import jets
from .frames import FramePoint, _columns
from .jets import Jet
from .linalg import det, inv, matvec, solve_small


@dataclass(frozen=True)
class ConnectionData:
    """Connection data of a frame at one point (values only).

    ``a`` holds a1..a8 with nabla_{X1}X1 = a1 X1 + a2 X2, nabla_{X1}X2 = a3 X1 + a4 X2,
    nabla_{X2}X1 = a5 X1 + a6 X2, nabla_{X2}X2 = a7 X1 + a8 X2.
    ``S1``/``S2`` rows are the images of X1, X2: S_k X1 = S[0, 0] X1 + S[0, 1] X2.
    ``tau[k, l, a]`` is tau_k^{l+1}(X_{a+1}).
    """

    a: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    tau: np.ndarray
    S1: np.ndarray
    S2: np.ndarray
    jet_a: Jet | None = field(default=None, repr=False, compare=False)
    jet_h1: Jet | None = field(default=None, repr=False, compare=False)
    jet_h2: Jet | None = field(default=None, repr=False, compare=False)

    @property
    def b(self) -> float:
        return float(self.h1[0, 1])

    @property
    def c(self) -> float:
        return float(self.h1[1, 1])


@dataclass(frozen=True)
class NablaGQuantities:
    B1: float
    B2: float
    C1: float
    C2: float
    D1: float
    D2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.B1, self.B2, self.C1, self.C2, self.D1, self.D2])


def frame_decompose(w, X1, X2, xi1, xi2) -> np.ndarray:
    """Coordinates (t1, t2, n1, n2) of w in the frame (X1, X2, xi1, xi2)."""
    basis = np.column_stack([np.asarray(x, dtype=float) for x in (X1, X2, xi1, xi2)])
    return solve_small(basis, np.asarray(w, dtype=float))


def directional(frame: FramePoint, W: Jet, a: int) -> Jet:
    """D_{X_a} W for a jet field W."""
    C = frame.coeffs
    return C[a, 0] * W.d(0) + C[a, 1] * W.d(1)


def _frame_inverse(frame: FramePoint, xi1: Jet, xi2: Jet) -> Jet:
    F = jets.stack([frame.X1, frame.X2, xi1, xi2], axis=-1)
    Finv, _ = inv(F)
    return Finv


def connection_data(frame: FramePoint, xi1: Jet | None = None, xi2: Jet | None = None) -> ConnectionData:
    """Differentiate the frame fields and decompose; optionally with another transversal pair."""
    xi1 = frame.xi1 if xi1 is None else xi1
    xi2 = frame.xi2 if xi2 is None else xi2
    if min(frame.X1.order, xi1.order, xi2.order) < 1:
        raise ValueError("connection data needs frame fields of jet order at least 1")
    Finv = _frame_inverse(frame, xi1, xi2)
    tangent = (frame.X1, frame.X2)
    coords = {}
    for a in range(2):
        for b in range(2):
            coords[a, b] = matvec(Finv, directional(frame, tangent[b], a))
    a_list = []
    for a, b in ((0, 0), (0, 1), (1, 0), (1, 1)):
        a_list += [coords[a, b][0], coords[a, b][1]]
    jet_a = jets.stack(a_list)
    jet_h1 = jets.stack([jets.stack([coords[a, b][2] for b in range(2)]) for a in range(2)])
    jet_h2 = jets.stack([jets.stack([coords[a, b][3] for b in range(2)]) for a in range(2)])

    S = np.zeros((2, 2, 2))
    tau = np.zeros((2, 2, 2))
    for k, xi in enumerate((xi1, xi2)):
        for a in range(2):
            cvec = np.asarray(matvec(Finv, directional(frame, xi, a)).value)
            S[k, a] = -cvec[:2]
            tau[k, :, a] = cvec[2:]
    return ConnectionData(np.asarray(jet_a.value), np.asarray(jet_h1.value), np.asarray(jet_h2.value),
                          tau, S[0], S[1], jet_a, jet_h1, jet_h2)


def shape_operators_of(frame: FramePoint, fields) -> list[np.ndarray]:
    """Shape operator (row layout) of each transversal jet field, in the frame's own basis."""
    Finv = _frame_inverse(frame, frame.xi1, frame.xi2)
    out = []
    for W in fields:
        S = np.zeros((2, 2))
        for a in range(2):
            S[a] = -np.asarray(matvec(Finv, directional(frame, W, a)).value)[:2]
        out.append(S)
    return out


def nabla_g_quantities(cd) -> NablaGQuantities:
    """B, C and D combinations of nabla g in a g-orthonormal frame."""
    a1, a2, a3, a4, a5, a6, a7, a8 = (cd.a if isinstance(cd, ConnectionData) else cd)
    return NablaGQuantities(
        B1=-2.0 * (a1 + a4),
        B2=-2.0 * (a5 + a8),
        C1=-2.0 * a5 - a2 - a3,
        C2=-2.0 * a4 - a6 - a7,
        D1=-2.0 * a5 + a2 + a3,
        D2=-2.0 * a4 + a6 + a7,
    )


def nabla_g_tensor(frame: FramePoint, cd: ConnectionData) -> np.ndarray:
    """(nabla g)(X_a, X_b, X_c) = X_a(g(X_b, X_c)) - g(nabla_a X_b, X_c) - g(X_b, nabla_a X_c).

    The metric along the frame is differentiated as a jet, so this does not
    assume the frame is orthonormal away from the base point.
    """
    C = frame.coeffs
    g_coord = _metric_jet(frame)
    gf = [[sum(C[b, i] * C[c, j] * g_coord[i][j] for i in range(2) for j in range(2))
           for c in range(2)] for b in range(2)]
    g0 = np.array([[jets.value_of(gf[b][c]) for c in range(2)] for b in range(2)], dtype=float)
    nab = np.asarray(cd.a).reshape(2, 2, 2)  # nab[a, b] = coordinates of nabla_{X_a} X_b
    out = np.zeros((2, 2, 2))
    for a in range(2):
        for b in range(2):
            for c in range(2):
                deriv = C[a, 0] * gf[b][c].d(0) + C[a, 1] * gf[b][c].d(1)
                out[a, b, c] = (float(deriv.value)
                                - nab[a, b] @ g0[:, c]
                                - g0[b, :] @ nab[a, c])
    return out


def _metric_jet(frame: FramePoint):
    """The coordinate-frame metric g as 2x2 nested jets (recomputed at frame order)."""
    X_u, X_v = frame.X_u, frame.X_v
    M = frame.order
    second = [[X_u.d(0), X_u.d(1)], [X_u.d(1), X_v.d(1)]]
    xi = frame.metric_field.at_order(M)
    Tu, Tv = X_u.truncate(M), X_v.truncate(M)
    G = [[det(_columns(Tu, Tv, second[i][j], xi)) for j in range(2)] for i in range(2)]
    dG = G[0][0] * G[1][1] - G[0][1] * G[1][0]
    scale = jets.powf(dG, -0.25)
    return [[G[i][j] * scale for j in range(2)] for i in range(2)]


def nabla_g_direct(frame: FramePoint, cd: ConnectionData) -> NablaGQuantities:
    """B, C, D from the full nabla g tensor (independent of the closed forms)."""
    T = nabla_g_tensor(frame, cd)
    return nabla_g_from_tensor(T)


def nabla_g_from_tensor(T) -> NablaGQuantities:
    return NablaGQuantities(
        B1=T[0, 0, 0] + T[0, 1, 1],
        B2=T[1, 0, 0] + T[1, 1, 1],
        C1=T[1, 0, 0] + T[0, 1, 0],
        C2=T[0, 1, 1] + T[1, 0, 1],
        D1=T[1, 0, 0] - T[0, 1, 0],
        D2=T[0, 1, 1] - T[1, 0, 1],
    )


def nabla_g_tensor_from_coefficients(a, g=None) -> np.ndarray:
    """nabla g of a frame with constant metric matrix ``g`` (identity by default)."""
    g = np.eye(2) if g is None else np.asarray(g, dtype=float)
    nab = np.asarray(a, dtype=float).reshape(2, 2, 2)
    out = np.zeros((2, 2, 2))
    for a_ in range(2):
        for b in range(2):
            for c in range(2):
                out[a_, b, c] = -nab[a_, b] @ g[:, c] - g[b, :] @ nab[a_, c]
    return out


def torsion_residual(frame: FramePoint, cd: ConnectionData) -> float:
    """| nabla_{X1}X2 - nabla_{X2}X1 - [X1, X2] | with the bracket taken from the coefficient jets."""
    C = frame.coeffs
    bracket = []
    for j in range(2):
        x1_of = C[0, 0] * C[1, j].d(0) + C[0, 1] * C[1, j].d(1)
        x2_of = C[1, 0] * C[0, j].d(0) + C[1, 1] * C[0, j].d(1)
        bracket.append(float((x1_of - x2_of).value))
    Xu, Xv = frame.X_u.value, frame.X_v.value
    lie = bracket[0] * Xu + bracket[1] * Xv
    a = cd.a
    X1, X2 = frame.X1.value, frame.X2.value
    torsion_free = (a[2] - a[4]) * X1 + (a[3] - a[5]) * X2
    scale = max(1.0, float(np.linalg.norm(lie)))
    return float(np.linalg.norm(torsion_free - lie)) / scale


def frame_conditions(frame: FramePoint, cd: ConnectionData) -> dict:
    """Residuals of the normalized-frame conditions."""
    X1, X2, x1, x2 = frame.vectors()
    C = np.asarray(frame.coeffs.value)
    g_frame = C @ frame.g @ C.T
    return {
        "g_orthonormal": float(np.abs(g_frame - np.eye(2)).max()),
        "volume": abs(float(det(np.column_stack([X1, X2, x1, x2]))) - 1.0),
        "h1_11": abs(float(cd.h1[0, 0])),
        "h2_identity": float(np.abs(cd.h2 - np.eye(2)).max()),
        "xi_class": xi_class_residual(frame),
    }


def xi_class_residual(frame: FramePoint) -> float:
    """Distance of -xi1 from the metric field modulo the tangent plane (relative)."""
    X1, X2, x1, x2 = frame.vectors()
    xi = frame.metric_field.value
    t = frame_decompose(xi + x1, X1, X2, x1, x2)
    return float(np.abs(t[2:]).max()) / max(1.0, float(np.linalg.norm(frame_decompose(xi, X1, X2, x1, x2)[2:])))
