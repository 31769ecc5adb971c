"""Affine metric of a metric field, normalized tangent frames and the unique transversal frame.

Everything is carried as jets so the connection module can differentiate the
frame fields.  With X known to order N, the frame fields come out at order
N - 2 (two derivatives are spent on the second fundamental form).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import DegenerateData, NotLocallyConvex, NotPositiveDefinite
from .jets import Jet
from .linalg import det, inv, matvec, pencil_roots, ALL_PAIRS
from .surface import ImmersionSpec, SurfaceJet, evaluate_field, immersion_jet

PD_RTOL = 1e-12


@dataclass(frozen=True)
class MetricField:
    """A transversal vector field; ``xi`` is a jet field or a constant vector."""

    xi: object
    provenance: str = "user"

    def at_order(self, order: int) -> Jet:
        if isinstance(self.xi, Jet):
            return self.xi.truncate(min(order, self.xi.order))
        return Jet.constant(np.asarray(self.xi, dtype=float), order)

    @property
    def value(self) -> np.ndarray:
        return np.asarray(jets.value_of(self.xi), dtype=float)


@dataclass(frozen=True)
class FramePoint:
    """Normalized frame at a point, with jet fields of order ``order``.

    ``coeffs`` expresses the tangent frame in the coordinate frame:
    X_a = coeffs[a, 0] X_u + coeffs[a, 1] X_v.  ``h1`` and ``h2`` are the
    second fundamental forms relative to (xi1, xi2) in the (X1, X2) frame.
    """

    X: Jet
    X_u: Jet
    X_v: Jet
    X1: Jet
    X2: Jet
    xi1: Jet
    xi2: Jet
    coeffs: Jet
    G: np.ndarray
    g: np.ndarray
    det_G: float
    metric_field: MetricField
    sigma0: tuple
    order: int

    @property
    def point(self) -> np.ndarray:
        return self.X.value

    def vectors(self) -> tuple[np.ndarray, ...]:
        """Base-point values of (X1, X2, xi1, xi2)."""
        return self.X1.value, self.X2.value, self.xi1.value, self.xi2.value

    def with_transversal(self, xi1: Jet, xi2: Jet) -> "FramePoint":
        return FramePoint(self.X, self.X_u, self.X_v, self.X1, self.X2, xi1, xi2, self.coeffs,
                          self.G, self.g, self.det_G, self.metric_field, self.sigma0,
                          min(xi1.order, xi2.order))


@dataclass(frozen=True)
class TransversalMetric:
    matrix: np.ndarray


# -- metric --------------------------------------------------------------------

def _columns(*vectors):
    return jets.stack(list(vectors), axis=-1)


def metric_G(jet: SurfaceJet, frame=None, xi=None) -> np.ndarray:
    """Entries G(Y_i, Y_j) = [Y1, Y2, D_{Y_j} Y_i, xi] for Y_i = frame[i, 0] X_u + frame[i, 1] X_v.

    Constant frame coefficients are assumed; their derivatives would only add
    tangent terms, which the bracket ignores.
    """
    m = np.eye(2) if frame is None else np.asarray(frame, dtype=float)
    xi = np.asarray(xi, dtype=float)
    Y = m @ np.array([jet.X_u, jet.X_v])
    second = [[jet.X_uu, jet.X_uv], [jet.X_uv, jet.X_vv]]
    G = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            D = sum(m[i, k] * m[j, l] * second[k][l] for k in range(2) for l in range(2))
            G[i, j] = det(np.column_stack([Y[0], Y[1], D, xi]))
    return 0.5 * (G + G.T)


def check_positive_definite(G, what: str = "G"):
    G = np.asarray(jets.value_of(G), dtype=float)
    tr = G[0, 0] + G[1, 1]
    lo = 0.5 * tr - math.sqrt(0.25 * (G[0, 0] - G[1, 1]) ** 2 + G[0, 1] ** 2)
    if not (tr > 0 and lo > PD_RTOL * tr):
        raise NotPositiveDefinite(f"{what} is not positive definite (trace {tr:.3e}, min eigenvalue {lo:.3e})")


def normalize_metric(G):
    """g = G / (det G)^(1/4); works on arrays and jets."""
    check_positive_definite(G)
    d = G[0, 0] * G[1, 1] - G[0, 1] * G[1, 0]
    if isinstance(d, Jet):
        return G * jets.powf(d, -0.25)
    return np.asarray(G, dtype=float) / float(d) ** 0.25


def orthonormal_coefficients(g):
    """Gram-Schmidt on (X_u, X_v): rows of the result express X1, X2."""
    g11, g12, g22 = g[0, 0], g[0, 1], g[1, 1]
    c00 = 1.0 / jets.sqrt(g11) if isinstance(g11, Jet) else 1.0 / math.sqrt(g11)
    ratio = g12 / g11
    rest = g22 - g12 * ratio
    inv_norm = 1.0 / jets.sqrt(rest) if isinstance(rest, Jet) else 1.0 / math.sqrt(rest)
    zero = g11 * 0.0
    return jets.stack([jets.stack([c00, zero]), jets.stack([-ratio * inv_norm, inv_norm])])


def orthonormal_frame(jet: SurfaceJet, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values of (X1, X2) for a metric g given in the coordinate frame."""
    C = np.asarray(orthonormal_coefficients(np.asarray(g, dtype=float)))
    return C[0, 0] * jet.X_u, C[1, 0] * jet.X_u + C[1, 1] * jet.X_v


# -- transversal planes ----------------------------------------------------------

def euclidean_normal_basis(X_u, X_v) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal basis of the Euclidean normal plane.

    n1 is the standard basis vector with the largest residual off the tangent
    plane, projected and normalized; n2 is the standard basis vector with the
    largest residual off span(X_u, X_v, n1), treated the same way (ties go to
    the lower index).  n2 is negated if needed so that [X_u, X_v, n1, n2] > 0.
    """
    q, _ = np.linalg.qr(np.column_stack([X_u, X_v]))
    picked = []
    for _ in range(2):
        resid = np.eye(4) - q @ q.T
        norms = np.linalg.norm(resid, axis=0)
        k = min(range(4), key=lambda i: (-round(norms[i], 12), i))
        picked.append(resid[:, k] / norms[k])
        q = np.column_stack([q, picked[-1]])
    n1, n2 = picked
    if det(np.column_stack([X_u, X_v, n1, n2])) < 0:
        n2 = -n2
    return n1, n2


def _sigma0_fields(sigma0, X_u: Jet, X_v: Jet, order: int):
    if sigma0 is None or (isinstance(sigma0, str) and sigma0 == "euclidean"):
        nu1, nu2 = euclidean_normal_basis(X_u.value, X_v.value)
    elif isinstance(sigma0, str) and sigma0 == "second-derivatives":
        nu1, nu2 = X_u.d(0), X_v.d(1)
    else:
        nu1, nu2 = sigma0
    fields = []
    for nu in (nu1, nu2):
        fields.append(nu.truncate(order) if isinstance(nu, Jet) else Jet.constant(np.asarray(nu, float), order))
    nu1, nu2 = fields
    orient = det(np.column_stack([X_u.value, X_v.value, nu1.value, nu2.value]))
    if abs(orient) <= 1e-12 * np.linalg.norm(X_u.value) * np.linalg.norm(X_v.value) * \
            np.linalg.norm(nu1.value) * np.linalg.norm(nu2.value):
        raise DegenerateData("starting transversal plane is not transversal")
    if orient < 0:
        nu2 = -nu2
    return nu1, nu2


def euclidean_pencil(jet: SurfaceJet):
    """Euclidean second fundamental forms (h1, h2) w.r.t. the normal basis, coordinate frame."""
    n1, n2 = euclidean_normal_basis(jet.X_u, jet.X_v)
    second = [[jet.X_uu, jet.X_uv], [jet.X_uv, jet.X_vv]]
    h1 = np.array([[second[i][j] @ n1 for j in range(2)] for i in range(2)])
    h2 = np.array([[second[i][j] @ n2 for j in range(2)] for i in range(2)])
    return h1, h2, n1, n2


def _is_pd(M) -> bool:
    tr = M[0, 0] + M[1, 1]
    d = M[0, 0] * M[1, 1] - M[0, 1] ** 2
    return tr > 0 and d > PD_RTOL * tr * tr


def select_metric_field(jet: SurfaceJet) -> MetricField:
    """Metric field from the midpoint of the arc of definite Euclidean pencil directions."""
    h1, h2, n1, n2 = euclidean_pencil(jet)
    roots = pencil_roots(h1, h2)
    if roots is ALL_PAIRS or not roots:
        raise NotLocallyConvex("no positive definite combination of the second fundamental forms")
    bounds = sorted({math.atan2(p.s, p.r) % math.pi for p in roots})
    bounds = sorted(bounds + [b + math.pi for b in bounds])
    best = None
    for k, lo in enumerate(bounds):
        hi = bounds[k + 1] if k + 1 < len(bounds) else bounds[0] + 2 * math.pi
        mid = 0.5 * (lo + hi)
        if _is_pd(math.cos(mid) * h1 + math.sin(mid) * h2):
            best = mid
            break
    if best is None:
        raise NotLocallyConvex("no positive definite combination of the second fundamental forms")
    r, s = math.cos(best), math.sin(best)
    xi = -s * n1 + r * n2
    return MetricField(xi / np.linalg.norm(xi), "auto")


# -- the full frame ----------------------------------------------------------------

def build_frame(Xjet: Jet, metric_field: MetricField, sigma0=None) -> FramePoint:
    """Normalized tangent frame and unique transversal frame from an order-N jet of X."""
    N = Xjet.order
    M = N - 2
    if M < 0:
        raise ValueError("the immersion jet must have order at least 2")
    X_u, X_v = Xjet.d(0), Xjet.d(1)
    second = [[X_u.d(0), X_u.d(1)], [X_u.d(1), X_v.d(1)]]
    Tu, Tv = X_u.truncate(M), X_v.truncate(M)
    xi = metric_field.at_order(M)

    G = [[None, None], [None, None]]
    for i, j in ((0, 0), (0, 1), (1, 1)):
        G[i][j] = det(_columns(Tu, Tv, second[i][j], xi))
    G[1][0] = G[0][1]
    Gm = jets.stack([jets.stack(G[0]), jets.stack(G[1])])
    check_positive_definite(Gm.value)
    det_G = Gm[0, 0] * Gm[1, 1] - Gm[0, 1] * Gm[0, 1]
    g = Gm * jets.powf(det_G, -0.25)
    C = orthonormal_coefficients(g)
    X1 = C[0, 0] * Tu + C[0, 1] * Tv
    X2 = C[1, 0] * Tu + C[1, 1] * Tv

    nu1, nu2 = _sigma0_fields(sigma0, X_u, X_v, M)
    basis_inv, _ = inv(_columns(Tu, Tv, nu1, nu2))
    coord = [[matvec(basis_inv, second[i][j]) for j in range(2)] for i in range(2)]

    def form(k, a, b):
        return sum(C[a, i] * C[b, j] * coord[i][j][2 + k] for i in range(2) for j in range(2))

    a_ = form(0, 0, 0)
    e_ = form(1, 0, 0)
    xi_coord = matvec(basis_inv, xi)
    lam3, lam4 = xi_coord[2], xi_coord[3]
    K = det(_columns(X1, X2, nu1, nu2))
    denom = a_ * lam4 - e_ * lam3
    scale = (abs(a_.value) + abs(e_.value)) * (abs(lam3.value) + abs(lam4.value))
    if scale == 0.0 or abs(denom.value) <= 1e-12 * scale:
        raise DegenerateData("metric field and starting transversal plane are inconsistent")
    beta = lam4 / denom
    psi = -lam3 / denom
    alpha = K * e_
    phi = -K * a_
    invK = 1.0 / K
    xi1 = (nu1 * psi - nu2 * beta) * invK
    xi2 = (-(nu1 * phi) + nu2 * alpha) * invK
    return FramePoint(Xjet, X_u, X_v, X1, X2, xi1, xi2, C, Gm.value, g.value, float(det_G.value),
                      metric_field, (nu1, nu2), M)


def metric_field_for(spec: ImmersionSpec, u: float, v: float, order: int, xi=None) -> MetricField:
    """The metric field to use at (u, v): explicit, the immersion's own, or automatic."""
    if isinstance(xi, MetricField):
        return xi
    if xi == "auto" or (xi is None and spec.xi is None):
        from .surface import SurfaceJet
        return select_metric_field(SurfaceJet.from_jet(immersion_jet(spec, u, v, 3), (u, v)))
    if xi is None:
        return MetricField(evaluate_field(spec.xi, u, v, order), "user")
    return MetricField(np.asarray(xi, dtype=float), "user")


def build_frame_point(spec: ImmersionSpec, u: float, v: float, xi=None, sigma0=None, order: int = 3) -> FramePoint:
    """Frame at (u, v) with X known to ``order``.

    ``xi`` may be a MetricField, a constant 4-vector, ``"auto"`` or None (use
    the immersion's metric field, falling back to the automatic choice).
    """
    Xjet = immersion_jet(spec, u, v, order)
    return build_frame(Xjet, metric_field_for(spec, u, v, order, xi), sigma0)


def theorem_frame(jet: SurfaceJet, X1, X2, xi, sigma0) -> tuple[np.ndarray, np.ndarray]:
    """Values of (xi1, xi2) for a g-orthonormal frame (X1, X2) and starting plane sigma0."""
    X1, X2, xi = (np.asarray(w, dtype=float) for w in (X1, X2, xi))
    nu1, nu2 = (np.asarray(w, dtype=float) for w in sigma0)
    if det(np.column_stack([X1, X2, nu1, nu2])) < 0:
        nu2 = -nu2
    basis = np.column_stack([X1, X2, nu1, nu2])
    binv, _ = inv(basis)
    # X1, X2 are constant combinations of X_u, X_v here, so D_{X1} X1 is assembled from second partials
    cu = np.linalg.lstsq(np.column_stack([jet.X_u, jet.X_v]), X1, rcond=None)[0]
    D11 = cu[0] ** 2 * jet.X_uu + 2 * cu[0] * cu[1] * jet.X_uv + cu[1] ** 2 * jet.X_vv
    h = binv @ D11
    a_, e_ = h[2], h[3]
    lam = binv @ xi
    lam3, lam4 = lam[2], lam[3]
    K = det(basis)
    denom = a_ * lam4 - e_ * lam3
    scale = (abs(a_) + abs(e_)) * (abs(lam3) + abs(lam4))
    if scale == 0.0 or abs(denom) <= 1e-12 * scale:
        raise DegenerateData("metric field and starting transversal plane are inconsistent")
    beta, psi = lam4 / denom, -lam3 / denom
    alpha, phi = K * e_, -K * a_
    return (psi * nu1 - beta * nu2) / K, (-phi * nu1 + alpha * nu2) / K


def gperp(b: float, c: float) -> TransversalMetric:
    """Transversal metric in the (xi1, xi2) basis."""
    return TransversalMetric(np.array([[1.0, -c / 2.0], [-c / 2.0, 4.0 * b * b + 1.25 * c * c]]))
