"""Affine binormals, asymptotic directions and asymptotic-line integration."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .connection import connection_data
from .errors import GeometryError, SeedAtInflection, ZeroCovector
from .frames import build_frame_point, metric_field_for
from .linalg import ALL_PAIRS, HomPair, pencil_coefficients, pencil_roots
from .surface import ImmersionSpec, evaluate_point

INFLECTION_TOL = 1e-10
COALESCENCE_TOL = 1e-12
DEGENERATE_RTOL = 1e-9


@dataclass(frozen=True)
class AsymptoticData:
    """Binormals (r, s) with their asymptotic directions in (X1, X2) coordinates."""

    binormals: list
    directions: list
    all_directions: bool = False

    def __iter__(self):
        return iter(zip(self.binormals, self.directions))

    def __len__(self):
        return len(self.binormals)


def _kernel_direction(M: np.ndarray, scale: float):
    norms = np.linalg.norm(M, axis=1)
    k = int(np.argmax(norms))
    if norms[k] <= 1e-12 * max(scale, 1e-300):
        return None
    m1, m2 = M[k]
    d = HomPair.of(m2, -m1)
    return np.array([d.r, d.s])


def binormals(A, B) -> AsymptoticData:
    """Roots (r, s) of det(rA + sB) = 0 and a kernel vector of rA + sB for each."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    roots = pencil_roots(A, B)
    if roots is ALL_PAIRS:
        return AsymptoticData([], [], True)
    scale = float(np.abs(A).max() + np.abs(B).max())
    pairs, dirs, all_dirs = [], [], False
    for root in roots:
        d = _kernel_direction(root.r * A + root.s * B, scale)
        if d is None:
            all_dirs = True
            d = np.array([1.0, 0.0])
        pairs.append(root)
        dirs.append(d)
    return AsymptoticData(pairs, dirs, all_dirs)


def inflection_test(b: float, c: float) -> bool:
    return 4.0 * b * b + c * c <= INFLECTION_TOL


def height_hessian(r: float, s: float, A, B) -> np.ndarray:
    """Hessian r A + s B of the height function along the conormal (r, s)."""
    if r == 0.0 and s == 0.0:
        raise ZeroCovector("conormal (r, s) is zero")
    return r * np.asarray(A, dtype=float) + s * np.asarray(B, dtype=float)


def height_hessian_degenerate(r: float, s: float, A, B, rtol: float = DEGENERATE_RTOL) -> bool:
    H = height_hessian(r, s, A, B)
    n = math.hypot(r, s)
    scale = (np.abs(np.asarray(A)).max() + np.abs(np.asarray(B)).max()) ** 2
    return abs(H[0, 0] * H[1, 1] - H[0, 1] * H[1, 0]) / (n * n) <= rtol * scale


def asymptotic_ode_coeffs(A, B) -> tuple[float, float, float]:
    """(P, Q, R) with P dv^2 + Q du dv + R du^2 = 0 along asymptotic lines."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    a, b, c = A[0, 0], A[0, 1], A[1, 1]
    e, f, g = B[0, 0], B[0, 1], B[1, 1]
    return float(b * g - c * f), float(a * g - c * e), float(a * f - b * e)


def binary_form_value(coeffs, du: float, dv: float) -> float:
    P, Q, R = coeffs
    return P * dv * dv + Q * du * dv + R * du * du


def discriminant(A, B) -> float:
    """Scale-free discriminant of the pencil determinant (zero where branches coalesce)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    scale = np.abs(A).max() + np.abs(B).max()
    if scale == 0.0:
        return 0.0
    P, Q, R = pencil_coefficients(A / scale, B / scale)
    return Q * Q - 4.0 * P * R


# -- line integration ------------------------------------------------------------

@dataclass
class Polyline:
    points: list = field(default_factory=list)   # (u, v)
    positions: list = field(default_factory=list)  # X(u, v)
    branch: int = 0
    reason: str = "length"
    length: float = 0.0


class _Field:
    """Unit asymptotic direction field (parameter velocity for unit R^4 speed)."""

    def __init__(self, spec: ImmersionSpec, xi, sigma0):
        self.spec = spec
        self.xi = xi
        self.sigma0 = sigma0

    def directions(self, u: float, v: float):
        f = build_frame_point(self.spec, u, v, xi=metric_field_for(self.spec, u, v, 3, self.xi),
                              sigma0=self.sigma0, order=3)
        cd = connection_data(f)
        A, B = cd.h1, cd.h2
        if inflection_test(cd.b, cd.c):
            return "inflection", None
        if discriminant(A, B) < COALESCENCE_TOL:
            return "umbilic-like", None
        data = binormals(A, B)
        C = np.asarray(f.coeffs.value)
        Xu, Xv = f.X_u.value, f.X_v.value
        out = []
        for w in data.directions:
            duv = w @ C
            speed = float(np.linalg.norm(duv[0] * Xu + duv[1] * Xv))
            out.append((duv / speed, (duv[0] * Xu + duv[1] * Xv) / speed))
        return "ok", out


def integrate_asymptotic_line(spec: ImmersionSpec, seed, branch: int = 0, step: float = 0.01,
                              arclen: float = 1.0, xi=None, sigma0=None) -> Polyline:
    """Fixed-step RK4 along one branch of the asymptotic direction field.

    The curve is parametrized by Euclidean arc length in R^4.  Directions are
    continued by picking the branch closest to the previous direction and
    flipping its sign when needed.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if branch not in (0, 1):
        raise ValueError("branch must be 0 or 1")
    field_ = _Field(spec, xi, sigma0)
    u, v = map(float, seed)
    status, dirs = field_.directions(u, v)
    if status == "inflection":
        raise SeedAtInflection(f"seed {seed} is an inflection point")
    if status != "ok" or len(dirs) < 2:
        raise SeedAtInflection(f"seed {seed} has no two distinct asymptotic directions ({status})")
    prev = dirs[branch][1]
    line = Polyline([(u, v)], [evaluate_point(spec.components, u, v)], branch)

    def velocity(uu, vv, ref):
        if not spec.contains(uu, vv):
            raise _Stop("boundary")
        try:
            st, ds = field_.directions(uu, vv)
        except GeometryError as exc:
            raise _Stop(exc.status) from exc
        if st != "ok":
            raise _Stop(st)
        duv, tangent = max(ds, key=lambda d: abs(float(d[1] @ ref)))
        if tangent @ ref < 0:
            duv, tangent = -duv, -tangent
        return duv, tangent

    n_steps = int(math.ceil(arclen / step - 1e-12))
    for _ in range(n_steps):
        h = min(step, arclen - line.length)
        try:
            k1, t1 = velocity(u, v, prev)
            k2, _ = velocity(u + 0.5 * h * k1[0], v + 0.5 * h * k1[1], t1)
            k3, _ = velocity(u + 0.5 * h * k2[0], v + 0.5 * h * k2[1], t1)
            k4, _ = velocity(u + h * k3[0], v + h * k3[1], t1)
        except _Stop as stop:
            line.reason = stop.reason
            return line
        du = h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        if not spec.contains(u + du[0], v + du[1]):
            line.reason = "boundary"
            return line
        u, v = u + du[0], v + du[1]
        prev = t1
        line.points.append((u, v))
        line.positions.append(evaluate_point(spec.components, u, v))
        line.length += h
    line.reason = "length"
    return line


class _Stop(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


CSV_HEADER = ("u", "v", "x1", "x2", "x3", "x4", "branch")


def write_polyline_csv(line: Polyline, path_or_file) -> None:
    """CSV with header u,v,x1,x2,x3,x4,branch and 17 significant digits."""
    own = isinstance(path_or_file, str)
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for (u, v), X in zip(line.points, line.positions):
            writer.writerow([format(float(x), ".17g") for x in (u, v, *X)] + [line.branch])
    finally:
        if own:
            fh.close()
