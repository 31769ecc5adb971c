"""Affine metrics, transversal frames and equiaffine plane bundles of surfaces in R^4."""
from .analysis import PointReport, analyze_grid, analyze_point
from .asymptotics import asymptotic_ode_coeffs, binormals, height_hessian, inflection_test, \
    integrate_asymptotic_line
from .connection import ConnectionData, connection_data, nabla_g_quantities
from .curvature import ShapeData, flat_normal_check, normal_curvature, semiumbilic_test, shape_operator
from .equiaffine import antisymmetric_plane, contains_direction, plane_compare, symmetric_plane
from .errors import *  # noqa: F401,F403
from .frames import FramePoint, MetricField, build_frame, build_frame_point, gperp, metric_G, \
    normalize_metric, select_metric_field, theorem_frame
from .hyperquadric import HypersurfaceSpec, blaschke_graph_metric, hyperquadric_check, nv_fixture_check, \
    quadric_affine_normal, restrict_blaschke_xi
from .jets import Jet, Jet3
from .surface import ImmersionSpec, catalog, eval_jet3, parse_immersion

__version__ = "0.1.0"
