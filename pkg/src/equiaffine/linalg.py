"""Closed-form linear algebra for matrices of size at most 4.

Determinants use the Leibniz expansion and inverses the adjugate, so the same
code runs on plain ndarrays and on :class:`~equiaffine.jets.Jet` matrices
(which is how determinants and solves get differentiated).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SingularSystem
from .jets import Jet

__all__ = [
    "det", "inv", "matmul", "matvec", "det4", "solve_small", "HomPair",
    "ALL_PAIRS", "pencil_roots", "pencil_coefficients", "sym2",
    "orthonormal_basis", "max_principal_angle", "outside_component",
]


@lru_cache(maxsize=None)
def _perms(n: int):
    perms, signs = [], []
    for p in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        perms.append(p)
        signs.append(-1.0 if inversions % 2 else 1.0)
    return np.array(perms), np.array(signs)


def det(M):
    """Determinant over the last two axes (n <= 4) of an ndarray or Jet."""
    n = M.shape[-1]
    if n == 1:
        return M[..., 0, 0]
    perms, signs = _perms(n)
    rows = np.broadcast_to(np.arange(n), perms.shape)
    entries = M[..., rows, perms]          # (..., n!, n)
    term = entries[..., 0]
    for k in range(1, n):
        term = term * entries[..., k]
    return (term * signs).sum(axis=-1)


@lru_cache(maxsize=None)
def _minor_index(n: int):
    rows = np.empty((n, n, n - 1), dtype=int)
    cols = np.empty((n, n, n - 1), dtype=int)
    for i in range(n):
        for j in range(n):
            rows[i, j] = [r for r in range(n) if r != i]
            cols[i, j] = [c for c in range(n) if c != j]
    signs = np.array([[(-1.0) ** (i + j) for j in range(n)] for i in range(n)])
    return rows[..., :, None], cols[..., None, :], signs


def inv(M):
    """Inverse over the last two axes via the adjugate; returns (inverse, det)."""
    n = M.shape[-1]
    d = det(M)
    if n == 1:
        return 1.0 / M, d
    rows, cols, signs = _minor_index(n)
    cof = det(M[..., rows, cols]) * signs
    adj = cof.swapaxes(-1, -2)
    if isinstance(d, Jet):
        return adj * (1.0 / d)[..., None, None], d
    with np.errstate(divide="ignore", invalid="ignore"):
        return adj / np.asarray(d)[..., None, None], d


def matmul(A, B):
    return (A[..., :, :, None] * B[..., None, :, :]).sum(axis=-2)


def matvec(A, x):
    return (A * x[..., None, :]).sum(axis=-1)


def det4(cols) -> float:
    """The bracket [c1, c2, c3, c4]: determinant of four column 4-vectors."""
    M = np.column_stack([np.asarray(c, dtype=float) for c in cols])
    if M.shape != (4, 4):
        raise ValueError("det4 needs four 4-vectors")
    return float(det(M))


def solve_small(A, b, rtol: float = 1e-13):
    """Solve A x = b for n <= 4 by the adjugate formula."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or n > 4:
        raise ValueError("solve_small handles square systems up to 4x4")
    Ainv, d = inv(A)
    scale = float(np.prod(np.linalg.norm(A, axis=1)))
    if scale == 0.0 or abs(float(d)) < rtol * scale:
        raise SingularSystem(f"singular {n}x{n} system (det={float(d):.3e}, scale={scale:.3e})")
    return Ainv @ b


def sym2(m11: float, m12: float, m22: float) -> np.ndarray:
    return np.array([[m11, m12], [m12, m22]], dtype=float)


@dataclass(frozen=True)
class HomPair:
    """Homogeneous pair (r, s), unit length, first nonzero entry positive."""

    r: float
    s: float

    @classmethod
    def of(cls, r: float, s: float) -> "HomPair":
        n = math.hypot(r, s)
        if n == 0.0:
            raise ValueError("HomPair cannot be (0, 0)")
        r, s = r / n, s / n
        if r < 0 or (r == 0 and s < 0):
            r, s = -r, -s
        return cls(r + 0.0, s + 0.0)

    def __iter__(self):
        yield self.r
        yield self.s

    def slope(self) -> float:
        """s/r, +inf for (0, 1); used for deterministic ordering."""
        return math.inf if self.r == 0 else self.s / self.r

    def angle_to(self, other: "HomPair") -> float:
        """Angle between the two lines, in [0, pi/2]."""
        cross = abs(self.r * other.s - self.s * other.r)
        dot = abs(self.r * other.r + self.s * other.s)
        return math.atan2(cross, dot)


class _AllPairs:
    """Marker: the pencil determinant vanishes identically."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ALL_PAIRS"

    def __bool__(self):
        return True


ALL_PAIRS = _AllPairs()


def pencil_coefficients(A, B) -> tuple[float, float, float]:
    """(P, Q, R) with det(rA + sB) = P r^2 + Q r s + R s^2."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    P = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    R = B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]
    Q = A[0, 0] * B[1, 1] + A[1, 1] * B[0, 0] - A[0, 1] * B[1, 0] - A[1, 0] * B[0, 1]
    return float(P), float(Q), float(R)


def pencil_roots(A, B, rtol: float = 1e-13):
    """All homogeneous (r, s) with det(rA + sB) = 0.

    Returns a list of zero, one (double root) or two :class:`HomPair`, sorted
    by s/r descending, or :data:`ALL_PAIRS` when the determinant vanishes
    identically.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    P, Q, R = pencil_coefficients(A, B)
    scale = (np.abs(A).max() + np.abs(B).max()) ** 2
    m = max(abs(P), abs(Q), abs(R))
    if scale == 0.0 or m <= rtol * scale:
        return ALL_PAIRS
    # work with unit-size coefficients so tiny or huge inputs neither underflow nor overflow
    P, Q, R = P / m, Q / m, R / m
    if P == 0.0 and R == 0.0:
        return sorted([HomPair.of(1.0, 0.0), HomPair.of(0.0, 1.0)], key=lambda h: (-h.slope(), h.r))
    disc = Q * Q - 4.0 * P * R
    disc_tol = 1e2 * rtol * (Q * Q + 4.0 * abs(P * R) + rtol * (scale / m) ** 2)
    if disc < -disc_tol:
        return []
    double = abs(disc) <= disc_tol
    sq = math.sqrt(max(disc, 0.0))
    roots = []
    if abs(P) >= abs(R):
        # s != 0 at every root; t = r/s solves P t^2 + Q t + R = 0
        if double:
            roots.append((-Q / (2.0 * P), 1.0))
        else:
            q = -0.5 * (Q + math.copysign(sq, Q))
            roots.append((q / P, 1.0))
            roots.append((R / q, 1.0) if q != 0 else (0.0, 1.0))
    else:
        # r != 0; tau = s/r solves R tau^2 + Q tau + P = 0
        if double:
            roots.append((1.0, -Q / (2.0 * R)))
        else:
            q = -0.5 * (Q + math.copysign(sq, Q))
            roots.append((1.0, q / R))
            roots.append((1.0, P / q) if q != 0 else (1.0, 0.0))
    pairs = [HomPair.of(r, s) for r, s in roots]
    pairs.sort(key=lambda h: (-h.slope(), h.r))
    return pairs


# -- subspaces of R^4 ---------------------------------------------------------

def orthonormal_basis(vectors) -> np.ndarray:
    """Orthonormal columns spanning the given vectors (Euclidean)."""
    M = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
    q, r = np.linalg.qr(M)
    if np.min(np.abs(np.diag(r))) <= 1e-14 * max(np.abs(r).max(), 1e-300):
        raise SingularSystem("vectors do not span a subspace of full dimension")
    return q


def outside_component(basis_q: np.ndarray, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return y - basis_q @ (basis_q.T @ y)


def max_principal_angle(P, Q) -> float:
    """Largest principal angle between two equal-dimension subspaces."""
    qp = orthonormal_basis(P)
    qq = orthonormal_basis(Q)
    resid = qq - qp @ (qp.T @ qq)
    s = float(np.linalg.norm(resid, 2))
    if s < 0.7:
        return math.asin(s)
    cosines = np.linalg.svd(qp.T @ qq, compute_uv=False)
    return math.acos(min(1.0, float(cosines.min())))
