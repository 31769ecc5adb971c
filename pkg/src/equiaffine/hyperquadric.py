"""Blaschke metric of graph hypersurfaces, the induced metric field on surfaces inside
them, quadric affine normals and the checks for surfaces lying in a quadric.

A hypersurface is the graph x4 = f(x, y, z).  Its graph frame is
e_k = (delta_k, f_k) for k = 1, 2, 3 and e4 = (0, 0, 0, 1) is transversal.
In the graph frame the Blaschke metric is Hess f / det(Hess f)^(1/5).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import expr, jets
from .connection import connection_data, shape_operators_of
from .curvature import ShapeData, semiumbilic_test
from .equiaffine import antisymmetric_plane, contains_direction, plane_compare, symmetric_plane
from .errors import NotConvexHypersurface, NotOnHypersurface, UnknownQuadric, UnknownSurface
from .frames import MetricField, _columns, build_frame
from .jets import Jet
from .linalg import HomPair, det, inv, matvec
from .surface import ImmersionSpec, immersion_jet

MEMBERSHIP_RTOL = 1e-10
# the completion vector is the last graph-frame vector at least this transversal relative to the best
COMPLETION_RATIO = 0.25

QUADRIC_KINDS = ("paraboloid", "ellipsoid", "hyperboloid")

_GRAPH_FUNCTIONS = {
    "paraboloid": "(x^2+y^2+z^2)/2",
    "hyperboloid": "sqrt(1+x^2+y^2+z^2)",
    "ellipsoid": "sqrt(1-x^2-y^2-z^2)",
    "q13": "1/(x*y*z)",
}


@dataclass(frozen=True)
class HypersurfaceSpec:
    """The graph x4 = f(x, y, z); ``kind`` names a known hypersurface or is "graph"."""

    f: expr.Node
    kind: str = "graph"

    @classmethod
    def named(cls, kind: str) -> "HypersurfaceSpec":
        if kind not in _GRAPH_FUNCTIONS:
            raise UnknownSurface(kind)
        return cls(expr.parse(_GRAPH_FUNCTIONS[kind], variables=expr.SPACE_VARIABLES), kind)

    @classmethod
    def graph(cls, text: str) -> "HypersurfaceSpec":
        return cls(expr.parse(text, variables=expr.SPACE_VARIABLES), "graph")

    def gradient_trees(self):
        return [expr.diff(self.f, v) for v in expr.SPACE_VARIABLES]

    def hessian_trees(self):
        grad = self.gradient_trees()
        return [[expr.diff(grad[i], v) for v in expr.SPACE_VARIABLES] for i in range(3)]

    def height(self, x) -> float:
        return float(expr.evaluate(self.f, _env(x)))


@dataclass(frozen=True)
class BlaschkeMetric:
    """Blaschke metric ``matrix`` in the tangent frame whose vectors are the rows of ``frame``."""

    matrix: np.ndarray
    frame: np.ndarray


@dataclass(frozen=True)
class HyperquadricReport:
    plane_angle: float
    containment: float
    shape_off_identity: float
    projection_residual: float
    orthogonality: float
    semiumbilic: bool
    semiumbilic_angle: float

    def residuals(self) -> dict:
        return {"plane_angle": self.plane_angle, "containment": self.containment,
                "shape_off_identity": self.shape_off_identity, "orthogonality": self.orthogonality}


def _env(x) -> dict:
    return dict(zip(expr.SPACE_VARIABLES, x))


def hypersurface_for(spec: ImmersionSpec) -> HypersurfaceSpec:
    if spec.ambient is None:
        raise UnknownSurface(f"{spec.name} is not declared to lie in a known hypersurface")
    return HypersurfaceSpec.named(spec.ambient)


def real_fifth_root(x):
    """Real fifth root of a float or jet, negative values included."""
    if isinstance(x, Jet):
        return jets.powf(x, 0.2) if x.value > 0 else -jets.powf(-x, 0.2)
    return math.copysign(abs(x) ** 0.2, x)


def _hessian(N: HypersurfaceSpec, x):
    env = _env(x)
    return [[expr.evaluate(t, env) for t in row] for row in N.hessian_trees()]


def graph_frame(N: HypersurfaceSpec, x) -> np.ndarray:
    """Rows e_k = (delta_k, f_k(x)) for k = 1, 2, 3."""
    env = _env(x)
    grad = [float(expr.evaluate(t, env)) for t in N.gradient_trees()]
    return np.column_stack([np.eye(3), grad])


def _check_definite(H: np.ndarray):
    w = np.linalg.eigvalsh(H)
    scale = float(np.abs(w).max())
    if scale == 0.0 or not (w.min() > 1e-12 * scale or w.max() < -1e-12 * scale):
        raise NotConvexHypersurface(f"Hessian is not definite (eigenvalues {w})")


def graph_blaschke(N: HypersurfaceSpec, x) -> np.ndarray:
    """Blaschke metric in the graph frame at (x, y, z)."""
    H = np.array(_hessian(N, [float(t) for t in x]), dtype=float)
    _check_definite(H)
    return H / real_fifth_root(float(np.linalg.det(H)))


def blaschke_graph_metric(N: HypersurfaceSpec, point) -> BlaschkeMetric:
    """Blaschke metric at a point (3 or 4 coordinates) in the documented frame.

    The frame is the graph frame, except for q13 where e_k is scaled by x_k.
    In a frame with coefficient matrix m over the graph frame the determinant
    form is det(m) m Hess m^T.
    """
    x = np.asarray(point, dtype=float)[:3]
    H = np.array(_hessian(N, x), dtype=float)
    _check_definite(H)
    m = np.diag(x) if N.kind == "q13" else np.eye(3)
    Hm = np.linalg.det(m) * m @ H @ m.T
    return BlaschkeMetric(Hm / real_fifth_root(float(np.linalg.det(Hm))), m @ graph_frame(N, x))


def check_membership(N: HypersurfaceSpec, X) -> None:
    X = np.asarray(X, dtype=float)
    gap = abs(X[3] - N.height(X[:3]))
    if not gap <= MEMBERSHIP_RTOL * (1.0 + abs(X[3])):
        raise NotOnHypersurface(f"point {X} is off the hypersurface by {gap:.3e}")


@dataclass(frozen=True)
class Restriction:
    """Blaschke metric restricted to T_pM (coordinate frame X_u, X_v) and the metric field realizing it."""

    metric: np.ndarray
    field: MetricField
    completion: int


def restrict_blaschke_xi(M: ImmersionSpec, N: HypersurfaceSpec | None, u: float, v: float,
                         order: int = 4) -> Restriction:
    """Metric field xi on M with g_xi equal to the Blaschke metric of N restricted to M.

    xi is a multiple of X3 = e_k, the last graph-frame vector whose angle with
    T_pM is comparable to the largest one (so graph surfaces (u, v, g, .)
    usually get e3).  Writing D = [X_u, X_v, e4, X3] and
    rho = det(Hess f)^(1/5), the multiple is sqrt(det G_M) / (rho D) where G_M is the restricted metric.
    """
    N = hypersurface_for(M) if N is None else N
    Xj = immersion_jet(M, u, v, order)
    check_membership(N, Xj.value)
    pos = [Xj[i] for i in range(3)]
    env = _env(pos)
    hess = [[expr.evaluate(t, env) for t in row] for row in N.hessian_trees()]
    Hval = np.array([[jets.value_of(h) for h in row] for row in hess], dtype=float)
    _check_definite(Hval)
    hess = [[h if isinstance(h, Jet) else Jet.constant(float(h), order) for h in row] for row in hess]
    Hjet = jets.stack([jets.stack(row) for row in hess])
    rho = real_fifth_root(det(Hjet))

    Xu, Xv = Xj.d(0), Xj.d(1)
    P = [jets.stack([Xu[i] for i in range(3)]), jets.stack([Xv[i] for i in range(3)])]
    HP = [matvec(Hjet, p) for p in P]
    GM = [[sum(P[i][k] * HP[j][k] for k in range(3)) / rho for j in range(2)] for i in range(2)]
    det_GM = GM[0][0] * GM[1][1] - GM[0][1] * GM[1][0]

    frame_val = graph_frame(N, Xj.value[:3])
    q, _ = np.linalg.qr(np.column_stack([Xu.value, Xv.value]))
    sines = [np.linalg.norm(e - q @ (q.T @ e)) / np.linalg.norm(e) for e in frame_val]
    k = max(i for i in range(3) if sines[i] >= COMPLETION_RATIO * max(sines))
    grad_k = expr.evaluate(N.gradient_trees()[k], env)
    grad_k = grad_k if isinstance(grad_k, Jet) else Jet.constant(float(grad_k), order)
    comps = [Jet.constant(float(i == k), grad_k.order) for i in range(3)] + [grad_k]
    X3 = jets.stack(comps)
    e4 = Jet.constant(np.array([0.0, 0.0, 0.0, 1.0]), X3.order)
    D = det(_columns(Xu, Xv, e4, X3))
    xi = X3 * (jets.sqrt(det_GM) / (rho * D))
    metric = np.array([[jets.value_of(GM[i][j]) for j in range(2)] for i in range(2)], dtype=float)
    return Restriction(metric, MetricField(xi, "blaschke"), k)


def quadric_affine_normal(kind: str, point) -> np.ndarray:
    """Affine normal direction of a quadric at a point on it."""
    p = np.asarray(point, dtype=float)
    if kind == "paraboloid":
        return np.array([0.0, 0.0, 0.0, 1.0])
    if kind in ("ellipsoid", "hyperboloid", "q13"):
        return p.copy()
    raise UnknownQuadric(kind)


def _quadric_normal_field(kind: str, Xjet: Jet) -> Jet:
    if kind == "paraboloid":
        return Jet.constant(np.array([0.0, 0.0, 0.0, 1.0]), Xjet.order)
    if kind in ("ellipsoid", "hyperboloid", "q13"):
        return Xjet
    raise UnknownQuadric(kind)


def hyperquadric_check(M: ImmersionSpec, u: float, v: float, N: HypersurfaceSpec | None = None,
                       order: int = 4) -> HyperquadricReport:
    """Residuals for a surface inside a quadric, using the Blaschke metric field.

    plane_angle: angle between the symmetric and antisymmetric planes.
    containment: distance of the quadric normal Y from the antisymmetric plane.
    shape_off_identity: |S_Y - (tr S_Y / 2) Id| for Y projected into the plane.
    orthogonality: max |G(xi_i, X_j)| with G extended by G(e_k, Y) = 0.
    """
    N = hypersurface_for(M) if N is None else N
    restriction = restrict_blaschke_xi(M, N, u, v, order)
    Xjet = immersion_jet(M, u, v, order)
    frame = build_frame(Xjet, restriction.field)
    cd = connection_data(frame)
    anti = antisymmetric_plane(cd, frame)
    sym = symmetric_plane(cd, frame)
    angle = plane_compare(anti, sym)

    Y = _quadric_normal_field(N.kind, Xjet)
    Yval = np.asarray(Y.value, dtype=float)
    containment = max(contains_direction(anti, Yval), contains_direction(sym, Yval))

    eq = anti.frame
    Finv, _ = inv(jets.stack([eq.X1, eq.X2, eq.xi1, eq.xi2], axis=-1))
    coords = matvec(Finv, Y.truncate(eq.order))
    Y_sigma = coords[2] * eq.xi1 + coords[3] * eq.xi2
    S = shape_operators_of(eq, [Y_sigma])[0]
    off = float(np.linalg.norm(S - 0.5 * np.trace(S) * np.eye(2)))

    cd_eq = connection_data(eq)
    semi = semiumbilic_test(ShapeData(cd_eq.S1, cd_eq.S2))
    target = HomPair.of(float(coords[2].value), float(coords[3].value))
    semi_angle = min((target.angle_to(d) for d in semi.directions), default=math.pi / 2)

    x = Xjet.value[:3]
    G_graph = graph_blaschke(N, x)
    basis = np.column_stack([*graph_frame(N, x), Yval])
    tangent = [eq.X1.value[:3], eq.X2.value[:3]]
    orth = 0.0
    for xi_ in (anti.xi1, anti.xi2):
        t = np.linalg.solve(basis, xi_)[:3]
        orth = max(orth, *(abs(float(t @ G_graph @ w)) for w in tangent))
    return HyperquadricReport(angle, containment, off, contains_direction(anti, Yval), orth,
                              semi.semiumbilic, semi_angle)


# -- the fixed counterexample surface (u, v, uv, (u^2 + v^2 + u^2 v^2) / 2) -----------

def nv_plane(u: float, v: float) -> tuple[np.ndarray, np.ndarray]:
    """The closed-form transversal pair (nu1, nu2) printed for the surface above."""
    a, b = 1.0 + u * u, 1.0 + v * v
    nu1 = np.array([u, v, 2 * u * v, 12 + 3 * v * v + u * u * (13 + 14 * v * v)], dtype=float)
    nu1 /= 12.0 * a ** (2.0 / 3.0) * b ** (2.0 / 3.0)
    nu2 = np.array([5 * v / b, 5 * u / a, (-12 - 7 * v * v - 7 * u * u - 2 * u * u * v * v) / (a * b),
                    -14 * u * v], dtype=float)
    nu2 /= 12.0 * (a * b) ** (1.0 / 6.0)
    return nu1, nu2


def nv_fixture_check(u: float, v: float) -> float:
    """Distance of the vertical direction from span(nu1, nu2)."""
    return contains_direction(nv_plane(u, v), np.array([0.0, 0.0, 0.0, 1.0]))
