"""Shape operators, normal curvature and semiumbilic tests in a normalized frame.

Shape operators are stored row-wise as images of the frame vectors:
S1 X1 = l1 X1 + l2 X2, S1 X2 = l3 X1 + l4 X2 (and m1..m4 for S2).
The normalized frame has h1 = [[0, b], [b, c]] and h2 = identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroVector
from .linalg import HomPair

SEMIUMBILIC_RTOL = 1e-9
ZERO_TOL = 1e-12
FLAT_TOL = 1e-9
CONFIG_TOL = 1e-8
INFLECTION_TOL = 1e-10


@dataclass(frozen=True)
class ShapeData:
    S1: np.ndarray
    S2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "S1", np.asarray(self.S1, dtype=float).reshape(2, 2))
        object.__setattr__(self, "S2", np.asarray(self.S2, dtype=float).reshape(2, 2))

    @classmethod
    def from_connection(cls, cd) -> "ShapeData":
        return cls(cd.S1, cd.S2)

    @property
    def lam(self) -> np.ndarray:
        """(l1, l2, l3, l4)."""
        return self.S1.ravel()

    @property
    def mu(self) -> np.ndarray:
        return self.S2.ravel()


@dataclass(frozen=True)
class SemiumbilicResult:
    semiumbilic: bool
    directions: list = field(default_factory=list)
    minors: tuple = (0.0, 0.0, 0.0)
    scale: float = 0.0

    @property
    def minor_norm(self) -> float:
        return float(np.linalg.norm(self.minors))

    @property
    def relative_minor_norm(self) -> float:
        return self.minor_norm / self.scale if self.scale > 0 else 0.0


@dataclass(frozen=True)
class FlatNormalReport:
    flat: bool
    criterion: bool
    self_adjoint: bool
    inflection: bool
    semiumbilic: bool
    configurations_agree: bool
    residuals: dict

    @property
    def agree(self) -> bool:
        return self.flat == self.criterion


def shape_operator(alpha: float, beta: float, sd: ShapeData) -> np.ndarray:
    if alpha == 0.0 and beta == 0.0:
        raise ZeroVector("transversal direction (alpha, beta) is zero")
    return alpha * sd.S1 + beta * sd.S2


def normal_curvature(sd: ShapeData, b: float, c: float) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates in (xi1, xi2) of R(X1, X2) xi1 and R(X1, X2) xi2."""
    l1, l2, l3, l4 = sd.lam
    m1, m2, m3, m4 = sd.mu
    return (np.array([(l4 - l1) * b - l2 * c, l3 - l2]),
            np.array([(m4 - m1) * b - m2 * c, m3 - m2]))


def normal_curvature_direct(S: np.ndarray, h1: np.ndarray, h2: np.ndarray, x: int = 0, y: int = 1) -> np.ndarray:
    """R(X_x, X_y) nu = h(X_x, S X_y) - h(X_y, S X_x) for general forms h1, h2."""
    S = np.asarray(S, dtype=float)
    forms = (np.asarray(h1, dtype=float), np.asarray(h2, dtype=float))
    return np.array([h[x] @ S[y] - h[y] @ S[x] for h in forms])


def semiumbilic_test(sd: ShapeData) -> SemiumbilicResult:
    """Is some alpha S1 + beta S2 a multiple of the identity?"""
    l1, l2, l3, l4 = sd.lam
    m1, m2, m3, m4 = sd.mu
    rows = np.array([[l2, m2], [l3, m3], [l1 - l4, m1 - m4]])
    minors = (rows[0, 0] * rows[1, 1] - rows[0, 1] * rows[1, 0],
              rows[0, 0] * rows[2, 1] - rows[0, 1] * rows[2, 0],
              rows[1, 0] * rows[2, 1] - rows[1, 1] * rows[2, 0])
    col_norms = np.linalg.norm(rows, axis=0)
    scale = float(col_norms.max()) ** 2
    if col_norms.max() <= ZERO_TOL:
        return SemiumbilicResult(True, [HomPair.of(1.0, 0.0), HomPair.of(0.0, 1.0)], minors, scale)
    if max(abs(m) for m in minors) > SEMIUMBILIC_RTOL * scale:
        return SemiumbilicResult(False, [], minors, scale)
    k = int(np.argmax(np.linalg.norm(rows, axis=1)))
    m_1, m_2 = rows[k]
    return SemiumbilicResult(True, [HomPair.of(m_2, -m_1)], minors, scale)


def principal_form(S: np.ndarray) -> np.ndarray:
    """Coefficients (x^2, xy, y^2) of the binary form whose roots are eigen-directions of S."""
    l1, l2, l3, l4 = np.asarray(S, dtype=float).ravel()
    return np.array([l2, l4 - l1, -l3])


def asymptotic_form(b: float, c: float) -> np.ndarray:
    """Coefficients (x^2, xy, y^2) of the asymptotic binary form in a normalized frame."""
    return np.array([b, c, -b])


def flat_normal_check(sd: ShapeData, b: float, c: float) -> FlatNormalReport:
    """Evaluate both sides of: R = 0 iff S self-adjoint and (inflection or
    (semiumbilic and every nu-principal configuration agrees with the asymptotic one))."""
    R1, R2 = normal_curvature(sd, b, c)
    r_norm = float(max(np.abs(R1).max(), np.abs(R2).max()))
    flat = r_norm <= FLAT_TOL
    l1, l2, l3, l4 = sd.lam
    m1, m2, m3, m4 = sd.mu
    sym_resid = max(abs(l2 - l3), abs(m2 - m3))
    self_adjoint = sym_resid <= FLAT_TOL
    inflection = 4.0 * b * b + c * c <= INFLECTION_TOL
    semi = semiumbilic_test(sd)
    asym = asymptotic_form(b, c)
    cross = max(float(np.linalg.norm(np.cross(principal_form(S), asym))) for S in (sd.S1, sd.S2))
    agree = cross <= CONFIG_TOL
    criterion = self_adjoint and (inflection or (semi.semiumbilic and agree))
    residuals = {"curvature": r_norm, "self_adjoint": sym_resid, "configuration": cross,
                 "inflection": 4.0 * b * b + c * c, "semiumbilic_minors": semi.minor_norm}
    return FlatNormalReport(flat, criterion, self_adjoint, inflection, semi.semiumbilic, agree, residuals)
