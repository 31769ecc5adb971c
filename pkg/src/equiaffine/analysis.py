"""Per-point analysis records and grid evaluation."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .asymptotics import binormals
from .connection import connection_data, frame_conditions, nabla_g_quantities, torsion_residual
from .curvature import ShapeData, flat_normal_check, semiumbilic_test
from .equiaffine import antisymmetric_plane, is_inflection, plane_compare, plane_residuals, symmetric_plane
from .errors import DomainError, GeometryError, SingularSystem
from .frames import build_frame_point
from .surface import ImmersionSpec, grid_points

SCHEMA_VERSION = "equiaffine-report/1"

STATUSES = ("ok", "not-locally-convex", "inflection", "not-immersed", "domain-error",
            "degenerate", "not-positive-definite")


@dataclass
class PointReport:
    u: float
    v: float
    status: str = "ok"
    message: str | None = None
    X: list | None = None
    g: list | None = None
    frame: dict | None = None
    b: float | None = None
    c: float | None = None
    a: list | None = None
    antisymmetric_plane: list | None = None
    symmetric_plane: list | None = None
    plane_angle: float | None = None
    binormals: list | None = None
    all_directions: bool | None = None
    inflection: bool | None = None
    semiumbilic: dict | None = None
    residuals: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        """Plain dict; records with a non-ok status keep only u, v, status and message."""
        d = asdict(self)
        if self.status != "ok":
            d = {k: d[k] for k in ("u", "v", "status", "message", "schema_version")}
        return d


def _vec(x) -> list:
    return [float(t) for t in np.asarray(x, dtype=float).ravel()]


def _mat(m) -> list:
    return [[float(t) for t in row] for row in np.asarray(m, dtype=float)]


def analyze_point(spec: ImmersionSpec, u: float, v: float, xi=None, sigma0=None) -> PointReport:
    """Full pipeline at one point; pointwise failures become a status instead of an exception."""
    try:
        return _analyze(spec, u, v, xi, sigma0)
    except GeometryError as exc:
        return PointReport(u, v, exc.status, str(exc))
    except (DomainError, ZeroDivisionError, FloatingPointError) as exc:
        return PointReport(u, v, "domain-error", str(exc))
    except SingularSystem as exc:
        return PointReport(u, v, "degenerate", str(exc))


def _analyze(spec, u, v, xi, sigma0) -> PointReport:
    frame = build_frame_point(spec, u, v, xi=xi, sigma0=sigma0, order=4)
    cd = connection_data(frame)
    if is_inflection(cd.b, cd.c):
        return PointReport(u, v, "inflection", f"4b^2 + c^2 = {4 * cd.b ** 2 + cd.c ** 2:.3e}")
    anti = antisymmetric_plane(cd, frame)
    sym = symmetric_plane(cd, frame)
    res_anti = plane_residuals(anti)
    res_sym = plane_residuals(sym)

    data = binormals(cd.h1, cd.h2)
    bins = [{"r": p.r, "s": p.s, "direction": _vec(d)} for p, d in data]
    cd_anti = connection_data(anti.frame)
    semi = semiumbilic_test(ShapeData(cd_anti.S1, cd_anti.S2))
    flat = flat_normal_check(ShapeData(cd.S1, cd.S2), cd.b, cd.c)

    residuals = {f"frame_{k}": v_ for k, v_ in frame_conditions(frame, cd).items()}
    residuals["torsion"] = torsion_residual(frame, cd)
    residuals.update({f"antisymmetric_{k}": abs(res_anti[k]) for k in ("B1", "B2", "C1", "C2")})
    residuals.update({f"symmetric_{k}": abs(res_sym[k]) for k in ("B1", "B2", "D1", "D2")})
    residuals["normal_curvature"] = flat.residuals["curvature"]
    residuals["flat_normal_agrees"] = float(flat.agree is False)
    nab = nabla_g_quantities(cd)
    residuals["start_equiaffine_B"] = float(max(abs(nab.B1), abs(nab.B2)))

    X1, X2, x1, x2 = frame.vectors()
    return PointReport(
        u, v, "ok", None,
        X=_vec(frame.point),
        g=_mat(frame.g),
        frame={"X1": _vec(X1), "X2": _vec(X2), "xi1": _vec(x1), "xi2": _vec(x2)},
        b=cd.b, c=cd.c, a=_vec(cd.a),
        antisymmetric_plane=[_vec(anti.xi1), _vec(anti.xi2)],
        symmetric_plane=[_vec(sym.xi1), _vec(sym.xi2)],
        plane_angle=plane_compare(anti, sym),
        binormals=bins,
        all_directions=data.all_directions,
        inflection=False,
        semiumbilic={"semiumbilic": semi.semiumbilic,
                     "directions": [[d.r, d.s] for d in semi.directions],
                     "minor_norm": semi.minor_norm},
        residuals={k: float(v_) for k, v_ in residuals.items()},
    )


def thread_count() -> int:
    raw = os.environ.get("EQUIAFFINE_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def analyze_grid(spec: ImmersionSpec, nu: int, nv: int, xi=None, sigma0=None,
                 threads: int | None = None) -> list[PointReport]:
    """Reports for an nu x nv grid over the immersion's domain, in row-major grid order."""
    points = grid_points(spec.domain, nu, nv)
    threads = thread_count() if threads is None else threads
    if threads <= 1:
        return [analyze_point(spec, u, v, xi, sigma0) for u, v in points]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda p: analyze_point(spec, p[0], p[1], xi, sigma0), points))
