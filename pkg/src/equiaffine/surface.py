"""Immersions X(u, v) into affine 4-space: the built-in catalog and jet evaluation."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from . import expr
from .errors import DomainError, NotImmersed, ParseError, UnknownSurface
from .jets import Jet

Domain = tuple[float, float, float, float]  # (u_min, u_max, v_min, v_max)
DEFAULT_DOMAIN: Domain = (-1.0, 1.0, -1.0, 1.0)
GRAPH_DOMAIN: Domain = (-2.0, 2.0, -2.0, 2.0)


@dataclass(frozen=True)
class ImmersionSpec:
    """A parametrized surface with optional metric field and ambient hypersurface.

    ``ambient`` names the quadric-like hypersurface containing the surface
    (``paraboloid``, ``ellipsoid``, ``hyperboloid``, ``q13``) when known.
    """

    components: tuple
    name: str = "user"
    xi: tuple | None = None
    domain: Domain = DEFAULT_DOMAIN
    ambient: str | None = None

    def __post_init__(self):
        if len(self.components) != 4:
            raise ValueError("an immersion needs four component expressions")
        if self.xi is not None and len(self.xi) != 4:
            raise ValueError("a metric field needs four component expressions")
        u0, u1, v0, v1 = self.domain
        if not (u0 < u1 and v0 < v1):
            raise ValueError(f"degenerate parameter domain {self.domain}")
        for tree in self.components + (self.xi or ()):
            extra = expr.variables(tree) - set(expr.SURFACE_VARIABLES)
            if extra:
                raise ValueError(f"expression uses non-parameter variables {sorted(extra)}")

    def texts(self) -> tuple[str, ...]:
        return tuple(expr.to_text(t) for t in self.components)

    def xi_texts(self) -> tuple[str, ...] | None:
        return None if self.xi is None else tuple(expr.to_text(t) for t in self.xi)

    def contains(self, u: float, v: float) -> bool:
        u0, u1, v0, v1 = self.domain
        return u0 <= u <= u1 and v0 <= v <= v1

    def with_xi(self, xi_texts) -> "ImmersionSpec":
        trees = tuple(expr.parse(t) if isinstance(t, str) else t for t in xi_texts)
        return ImmersionSpec(self.components, self.name, trees, self.domain, self.ambient)

    def with_domain(self, domain: Domain) -> "ImmersionSpec":
        return ImmersionSpec(self.components, self.name, self.xi, tuple(map(float, domain)), self.ambient)


@dataclass(frozen=True)
class SurfaceJet:
    """Value and all partials up to order three of X at one parameter point."""

    X: np.ndarray
    X_u: np.ndarray
    X_v: np.ndarray
    X_uu: np.ndarray
    X_uv: np.ndarray
    X_vv: np.ndarray
    X_uuu: np.ndarray
    X_uuv: np.ndarray
    X_uvv: np.ndarray
    X_vvv: np.ndarray
    point: tuple = field(default=(0.0, 0.0))

    @classmethod
    def from_jet(cls, jet: Jet, point=(0.0, 0.0)) -> "SurfaceJet":
        p = jet.partial
        return cls(p(0, 0), p(1, 0), p(0, 1), p(2, 0), p(1, 1), p(0, 2),
                   p(3, 0), p(2, 1), p(1, 2), p(0, 3), tuple(point))

    def second(self, i: int, j: int) -> np.ndarray:
        """D_{X_j} X_i in the coordinate frame (0 = u, 1 = v)."""
        return (self.X_uu, self.X_uv, self.X_vv)[i + j]


def parse_immersion(texts, xi=None, domain: Domain = DEFAULT_DOMAIN, name: str = "user") -> ImmersionSpec:
    """Parse four component strings (and optionally four metric-field strings)."""
    texts = tuple(texts)
    if len(texts) != 4:
        raise ValueError("an immersion needs four component expressions")
    trees = tuple(expr.parse(t) for t in texts)
    xi_trees = None if xi is None else tuple(expr.parse(t) for t in xi)
    return ImmersionSpec(trees, name, xi_trees, tuple(map(float, domain)))


def _parameter_env(u: float, v: float, order: int) -> dict:
    return {"u": Jet.variable(u, 0, order), "v": Jet.variable(v, 1, order)}


def evaluate_field(trees, u: float, v: float, order: int = 3) -> Jet:
    """Jet of shape (4,) of a 4-component expression field at (u, v)."""
    env = _parameter_env(u, v, order)
    comps = [expr.evaluate(t, env) for t in trees]
    comps = [c if isinstance(c, Jet) else Jet.constant(float(c), order) for c in comps]
    return Jet(np.stack([c.c for c in comps], axis=1), order)


def evaluate_point(trees, u: float, v: float) -> np.ndarray:
    env = {"u": float(u), "v": float(v)}
    return np.array([float(expr.evaluate(t, env)) for t in trees])


def _check_domain(spec: ImmersionSpec, u: float, v: float):
    if not spec.contains(u, v):
        raise DomainError(f"({u}, {v}) lies outside the parameter domain {spec.domain}")


def check_immersed(X_u, X_v):
    sv = np.linalg.svd(np.column_stack([X_u, X_v]), compute_uv=False)
    if sv[0] == 0.0 or sv[1] <= 1e-10 * sv[0]:
        raise NotImmersed(f"rank(X_u, X_v) < 2 (singular values {sv[0]:.3e}, {sv[1]:.3e})")


def immersion_jet(spec: ImmersionSpec, u: float, v: float, order: int = 3) -> Jet:
    """Jet of X at (u, v); checks the domain and the immersion condition."""
    _check_domain(spec, u, v)
    jet = evaluate_field(spec.components, u, v, order)
    check_immersed(jet.partial(1, 0), jet.partial(0, 1))
    return jet


def eval_jet3(spec: ImmersionSpec, u: float, v: float) -> SurfaceJet:
    return SurfaceJet.from_jet(immersion_jet(spec, u, v, 3), (u, v))


def affine_image(spec: ImmersionSpec, A, t=(0.0, 0.0, 0.0, 0.0), name: str | None = None) -> ImmersionSpec:
    """The surface A X + t (metric field mapped by A)."""
    A = np.asarray(A, dtype=float)
    t = np.asarray(t, dtype=float)

    def combine(trees, shift):
        out = []
        for i in range(4):
            node = expr.num(shift[i]) if shift is not None else expr.ZERO
            for j in range(4):
                if A[i, j] != 0.0:
                    node = expr.add(node, expr.mul(expr.num(A[i, j]), trees[j]))
            out.append(node)
        return tuple(out)

    xi = None if spec.xi is None else combine(spec.xi, None)
    return ImmersionSpec(combine(spec.components, t), name or f"affine({spec.name})", xi, spec.domain, None)


# -- catalog -------------------------------------------------------------------

def _p(text: str) -> expr.Node:
    return expr.parse(text)


def _t(node: expr.Node) -> str:
    return f"({expr.to_text(node)})"


def _graph_parts(g: str):
    tree = _p(g)
    return _t(tree), _t(expr.diff(tree, "u")), _t(expr.diff(tree, "v"))


def paraboloid_graph(g: str = "u*v", domain: Domain = GRAPH_DOMAIN) -> ImmersionSpec:
    G, gu, gv = _graph_parts(g)
    X = ("u", "v", G, f"(u^2+v^2+{G}^2)/2")
    scale = f"sqrt(1+{gu}^2+{gv}^2)"
    xi = ("0", "0", f"-{scale}", f"-{scale}*{G}")
    return _build(f"paraboloid-graph({g})", X, xi, domain, "paraboloid")


def hyperboloid_graph(g: str = "u*v", domain: Domain = GRAPH_DOMAIN) -> ImmersionSpec:
    G, gu, gv = _graph_parts(g)
    root = f"sqrt(1+u^2+v^2+{G}^2)"
    X = ("u", "v", G, root)
    lam = f"(-sqrt(1+{gu}^2+{gv}^2+(u*{gu}+v*{gv}-{G})^2))"
    xi = ("0", "0", lam, f"{lam}*{G}/{root}")
    return _build(f"hyperboloid-graph({g})", X, xi, domain, "hyperboloid")


def ellipsoid_graph(g: str = "u*v", domain: Domain = (-0.4, 0.4, -0.4, 0.4)) -> ImmersionSpec:
    G, _, _ = _graph_parts(g)
    X = ("u", "v", G, f"sqrt(1-u^2-v^2-{G}^2)")
    return _build(f"ellipsoid-graph({g})", X, None, domain, "ellipsoid")


def q13_graph(g: str = "u*v", domain: Domain = (0.5, 2.0, 0.5, 2.0)) -> ImmersionSpec:
    G, gu, gv = _graph_parts(g)
    X = ("u", "v", G, f"1/(u*v*{G})")
    coef = f"(-sqrt(2*{G}^2+2*(v*{gv}-u*{gu})^2+({G}+v*{gv}+u*{gu})^2)/({2 ** 0.8!r}*{G}))"
    xi = ("0", "0", f"{coef}*{G}", f"{coef}*(-1/(u*v*{G}))")
    return _build(f"q13-graph({g})", X, xi, domain, "q13")


def product_of_curves(alpha=("t", "t^2/2"), beta=("t", "t^2/2"), domain: Domain = DEFAULT_DOMAIN) -> ImmersionSpec:
    """X = (alpha(u), beta(v)) with metric field (0, 1/alpha_1', 0, -1/beta_1')."""
    a = [_p_t(s, "u") for s in alpha]
    b = [_p_t(s, "v") for s in beta]
    X = tuple(_t(n) for n in a + b)
    xi = ("0", f"1/{_t(expr.diff(a[0], 'u'))}", "0", f"-1/{_t(expr.diff(b[0], 'v'))}")
    name = f"product-of-curves({alpha[0]},{alpha[1]};{beta[0]},{beta[1]})"
    return _build(name, X, xi, domain, None)


def _p_t(text: str, var: str) -> expr.Node:
    tree = expr.parse(text, variables=("t",))
    return expr.substitute(tree, {"t": expr.Var(var)})


def _build(name, X, xi, domain, ambient) -> ImmersionSpec:
    trees = tuple(_p(t) for t in X)
    xi_trees = None if xi is None else tuple(_p(t) for t in xi)
    return ImmersionSpec(trees, name, xi_trees, tuple(map(float, domain)), ambient)


def nv_remark_surface(domain: Domain = GRAPH_DOMAIN) -> ImmersionSpec:
    spec = paraboloid_graph("u*v", domain)
    return ImmersionSpec(spec.components, "nv-remark", spec.xi, spec.domain, spec.ambient)


_GRAPH_BUILDERS = {
    "paraboloid-graph": paraboloid_graph,
    "hyperboloid-graph": hyperboloid_graph,
    "ellipsoid-graph": ellipsoid_graph,
    "q13-graph": q13_graph,
}

CATALOG_NAMES = tuple(_GRAPH_BUILDERS) + ("product-of-curves", "product-parabolas", "nv-remark")

_CALL = re.compile(r"^\s*([a-z0-9-]+)\s*(?:\((.*)\))?\s*$", re.DOTALL)


def catalog(name: str, g: str | None = None, domain: Domain | None = None, **curves) -> ImmersionSpec:
    """Look up a catalog surface, e.g. ``catalog("paraboloid-graph", g="u*v")``.

    The graph function may also be given inline as ``"paraboloid-graph(u*v)"``;
    ``product-of-curves`` accepts ``alpha`` and ``beta`` as pairs of
    expressions in ``t``.
    """
    m = _CALL.match(name)
    if m is None:
        raise UnknownSurface(name)
    base, inline = m.group(1), m.group(2)
    if inline is not None and base in _GRAPH_BUILDERS:
        if g is not None:
            raise ValueError("graph function given both inline and by keyword")
        g = inline
    kwargs = {} if domain is None else {"domain": domain}
    if base in _GRAPH_BUILDERS:
        return _GRAPH_BUILDERS[base](g if g is not None else "u*v", **kwargs)
    if base == "product-of-curves":
        alpha, beta = curves.get("alpha", ("t", "t^2/2")), curves.get("beta", ("t", "t^2/2"))
        if inline is not None:
            alpha, beta = _parse_curve_pairs(inline)
        return product_of_curves(alpha, beta, **kwargs)
    if base == "product-parabolas":
        spec = product_of_curves(**kwargs)
        return ImmersionSpec(spec.components, "product-parabolas", spec.xi, spec.domain, None)
    if base == "nv-remark":
        return nv_remark_surface(**kwargs)
    raise UnknownSurface(name)


def _parse_curve_pairs(text: str):
    parts = [p.strip() for p in re.split(r"[;,]", text)]
    if len(parts) != 4:
        raise ParseError("product-of-curves needs four curve components", 0, ("a1,a2;b1,b2",), text)
    return tuple(parts[:2]), tuple(parts[2:])


def finite_difference_partials(spec: ImmersionSpec, u: float, v: float, step: float = 1e-3,
                               richardson: bool = False) -> dict:
    """Central-difference partials up to order three (accuracy O(step^2)).

    With ``richardson`` the results for step and step/2 are combined, which
    removes the step^2 error term.
    """
    if richardson:
        coarse = finite_difference_partials(spec, u, v, step)
        fine = finite_difference_partials(spec, u, v, step / 2)
        return {k: (4.0 * fine[k] - coarse[k]) / 3.0 for k in fine}

    def X(a, b):
        return evaluate_point(spec.components, a, b)

    h = step
    out = {(0, 0): X(u, v)}
    out[(1, 0)] = (X(u + h, v) - X(u - h, v)) / (2 * h)
    out[(0, 1)] = (X(u, v + h) - X(u, v - h)) / (2 * h)
    out[(2, 0)] = (X(u + h, v) - 2 * X(u, v) + X(u - h, v)) / h ** 2
    out[(0, 2)] = (X(u, v + h) - 2 * X(u, v) + X(u, v - h)) / h ** 2
    out[(1, 1)] = (X(u + h, v + h) - X(u + h, v - h) - X(u - h, v + h) + X(u - h, v - h)) / (4 * h * h)
    out[(3, 0)] = (X(u + 2 * h, v) - 2 * X(u + h, v) + 2 * X(u - h, v) - X(u - 2 * h, v)) / (2 * h ** 3)
    out[(0, 3)] = (X(u, v + 2 * h) - 2 * X(u, v + h) + 2 * X(u, v - h) - X(u, v - 2 * h)) / (2 * h ** 3)
    out[(2, 1)] = ((X(u + h, v + h) - 2 * X(u, v + h) + X(u - h, v + h))
                   - (X(u + h, v - h) - 2 * X(u, v - h) + X(u - h, v - h))) / (2 * h ** 3)
    out[(1, 2)] = ((X(u + h, v + h) - 2 * X(u + h, v) + X(u + h, v - h))
                   - (X(u - h, v + h) - 2 * X(u - h, v) + X(u - h, v - h))) / (2 * h ** 3)
    return out


def grid_points(domain: Domain, nu: int, nv: int, inset: float = 0.0):
    """Row-major grid over the domain (optionally shrunk by ``inset`` on each side)."""
    u0, u1, v0, v1 = domain
    du, dv = (u1 - u0) * inset, (v1 - v0) * inset
    us = np.linspace(u0 + du, u1 - du, nu) if nu > 1 else np.array([0.5 * (u0 + u1)])
    vs = np.linspace(v0 + dv, v1 - dv, nv) if nv > 1 else np.array([0.5 * (v0 + v1)])
    return [(float(a), float(b)) for a in us for b in vs]


__all__ = [
    "ImmersionSpec", "SurfaceJet", "parse_immersion", "eval_jet3", "immersion_jet",
    "evaluate_field", "evaluate_point", "catalog", "CATALOG_NAMES", "affine_image",
    "finite_difference_partials", "grid_points", "check_immersed",
]
