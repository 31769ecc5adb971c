"""Bivariate truncated-Taylor jets.

A :class:`Jet` carries the value and every partial derivative up to a fixed
total order of a (possibly array-valued) function of two variables ``(u, v)``
at a base point.  Coefficients are the *raw* partial derivatives
``d^(i+j) f / du^i dv^j`` (not divided by factorials), stored along axis 0 of
``Jet.c`` in graded order::

    (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), (3,0), ...

Trailing axes of ``Jet.c`` are the value shape, so a 4-vector field is one
jet of shape ``(4,)`` and arithmetic broadcasts like numpy.

Arithmetic is exact truncation: products follow the bivariate Leibniz rule and
elementary functions are composed through their Taylor series, both cut at the
jet order.  Binary operations between jets of different order return the lower
order.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import DomainError

__all__ = [
    "Jet", "Jet3", "ncoef", "stack", "sqrt", "exp", "log", "sin", "cos",
    "powf", "reciprocal", "jet_arith", "value_of", "order_of",
]


def ncoef(order: int) -> int:
    return (order + 1) * (order + 2) // 2


@lru_cache(maxsize=None)
def _multi_indices(order: int) -> tuple[tuple[int, int], ...]:
    return tuple((d - j, j) for d in range(order + 1) for j in range(d + 1))


@lru_cache(maxsize=None)
def _position(order: int) -> dict:
    return {ij: k for k, ij in enumerate(_multi_indices(order))}


@lru_cache(maxsize=None)
def _mul_tables(order: int):
    """Index pairs and Leibniz weights: out[k] = sum_p W[k, p] a[I[p]] b[J[p]]."""
    idx = _multi_indices(order)
    pos = _position(order)
    I, J, K, w = [], [], [], []
    for k, (g1, g2) in enumerate(idx):
        for a1 in range(g1 + 1):
            for a2 in range(g2 + 1):
                I.append(pos[(a1, a2)])
                J.append(pos[(g1 - a1, g2 - a2)])
                K.append(k)
                w.append(math.comb(g1, a1) * math.comb(g2, a2))
    W = np.zeros((len(idx), len(I)))
    W[K, range(len(I))] = w
    return np.array(I), np.array(J), W


@lru_cache(maxsize=None)
def _deriv_index(order: int, axis: int) -> np.ndarray:
    pos = _position(order)
    shift = (1, 0) if axis == 0 else (0, 1)
    return np.array([pos[(i + shift[0], j + shift[1])]
                     for i, j in _multi_indices(order - 1)])


def _expand(c: np.ndarray, ndim: int) -> np.ndarray:
    """Insert unit axes after axis 0 so the value part has ``ndim`` axes."""
    extra = ndim - (c.ndim - 1)
    if extra <= 0:
        return c
    return c.reshape((c.shape[0],) + (1,) * extra + c.shape[1:])


class Jet:
    """Truncated bivariate Taylor jet of raw partial derivatives."""

    __slots__ = ("c", "order")
    __array_ufunc__ = None  # make numpy defer to the reflected operators

    def __init__(self, c, order: int | None = None):
        c = np.asarray(c, dtype=float)
        if order is None:
            n = c.shape[0]
            order = (math.isqrt(8 * n + 1) - 3) // 2
        if c.shape[0] != ncoef(order):
            raise ValueError(f"order {order} jet needs {ncoef(order)} coefficients, got {c.shape[0]}")
        self.c = c
        self.order = order

    # -- constructors --------------------------------------------------------
    @classmethod
    def constant(cls, value, order: int = 3) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros((ncoef(order),) + value.shape)
        c[0] = value
        return cls(c, order)

    @classmethod
    def variable(cls, value: float, axis: int, order: int = 3) -> "Jet":
        """The coordinate function u (axis 0) or v (axis 1) based at ``value``."""
        c = np.zeros(ncoef(order))
        c[0] = value
        if order >= 1:
            c[1 + axis] = 1.0
        return cls(c, order)

    @classmethod
    def from_partials(cls, partials: dict, order: int = 3) -> "Jet":
        pos = _position(order)
        first = np.asarray(next(iter(partials.values())), dtype=float)
        c = np.zeros((ncoef(order),) + first.shape)
        for ij, val in partials.items():
            c[pos[tuple(ij)]] = val
        return cls(c, order)

    # -- inspection ----------------------------------------------------------
    @property
    def value(self):
        v = self.c[0]
        return float(v) if v.ndim == 0 else v

    @property
    def shape(self) -> tuple:
        return self.c.shape[1:]

    @property
    def ndim(self) -> int:
        return self.c.ndim - 1

    def partial(self, i: int, j: int):
        v = self.c[_position(self.order)[(i, j)]]
        return float(v) if v.ndim == 0 else v

    def partials(self) -> dict:
        return {ij: self.partial(*ij) for ij in _multi_indices(self.order)}

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError("cannot raise the order of a jet")
        if order == self.order:
            return self
        return Jet(self.c[:ncoef(order)], order)

    def d(self, axis: int) -> "Jet":
        """Partial derivative along u (0) or v (1); the order drops by one."""
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        return Jet(self.c[_deriv_index(self.order, axis)], self.order - 1)

    def __repr__(self):
        return f"Jet(order={self.order}, shape={self.shape}, value={self.value!r})"

    # -- array-like plumbing -------------------------------------------------
    def __getitem__(self, key) -> "Jet":
        if not isinstance(key, tuple):
            key = (key,)
        return Jet(self.c[(slice(None),) + key], self.order)

    def __len__(self):
        return self.shape[0]

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]

    def sum(self, axis=None) -> "Jet":
        if axis is None:
            return Jet(self.c.reshape(self.c.shape[0], -1).sum(axis=1), self.order)
        if axis >= 0:
            axis += 1
        return Jet(self.c.sum(axis=axis), self.order)

    def swapaxes(self, a: int, b: int) -> "Jet":
        a = a + 1 if a >= 0 else a
        b = b + 1 if b >= 0 else b
        return Jet(np.swapaxes(self.c, a, b), self.order)

    def reshape(self, *shape) -> "Jet":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return Jet(self.c.reshape((self.c.shape[0],) + tuple(shape)), self.order)

    # -- arithmetic ----------------------------------------------------------
    def _coerce_pair(self, other):
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            a = self.c[:ncoef(order)]
            b = other.c[:ncoef(order)]
            nd = max(a.ndim, b.ndim) - 1
            return _expand(a, nd), _expand(b, nd), order
        return None

    def __add__(self, other):
        pair = self._coerce_pair(other)
        if pair is not None:
            a, b, order = pair
            return Jet(a + b, order)
        other = np.asarray(other, dtype=float)
        c = _expand(self.c, other.ndim)
        shape = np.broadcast_shapes(c.shape[1:], other.shape)
        c = np.array(np.broadcast_to(c, (c.shape[0],) + shape))
        c[0] = c[0] + other
        return Jet(c, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.order)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._coerce_pair(other)
        if pair is not None:
            a, b, order = pair
            I, J, W = _mul_tables(order)
            prod = a[I] * b[J]
            out = np.tensordot(W, prod, axes=1)
            return Jet(out, order)
        other = np.asarray(other, dtype=float)
        return Jet(_expand(self.c, other.ndim) * other, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * reciprocal(other)
        other = np.asarray(other, dtype=float)
        if np.any(other == 0):
            raise DomainError("division by zero")
        return Jet(_expand(self.c, other.ndim) / other, self.order)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, n):
        if isinstance(n, (int, np.integer)):
            return _pow_int(self, int(n))
        return powf(self, float(n))


Jet3 = Jet  # order-3 jets are plain Jet instances with order=3


def _pow_int(x: Jet, n: int) -> Jet:
    if n < 0:
        return reciprocal(_pow_int(x, -n))
    result = Jet.constant(np.ones(x.shape), x.order)
    base = x
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def _compose(x: Jet, derivs) -> Jet:
    """phi(x) from phi^(k)(x0), k = 0..order, via sum_k phi^(k)(x0)/k! (x - x0)^k."""
    delta = Jet(x.c.copy(), x.order)
    delta.c[0] = 0.0
    out = Jet.constant(derivs[0], x.order)
    power = None
    for k in range(1, x.order + 1):
        power = delta if power is None else power * delta
        out = out + power * (np.asarray(derivs[k]) / math.factorial(k))
    return out


def _check_positive(x0, what):
    if np.any(np.asarray(x0) <= 0):
        raise DomainError(f"{what} of a non-positive value")


def reciprocal(x):
    if not isinstance(x, Jet):
        x = np.asarray(x, dtype=float)
        if np.any(x == 0):
            raise DomainError("division by zero")
        return 1.0 / x
    x0 = x.c[0]
    if np.any(x0 == 0):
        raise DomainError("division by a jet with zero value")
    derivs = [(-1) ** k * math.factorial(k) / x0 ** (k + 1) for k in range(x.order + 1)]
    return _compose(x, derivs)


def powf(x, p: float):
    """x**p for real p; the value of x must be positive."""
    if not isinstance(x, Jet):
        x = np.asarray(x, dtype=float)
        _check_positive(x, "real power")
        return x ** p
    x0 = x.c[0]
    _check_positive(x0, "real power")
    derivs = []
    coef = 1.0
    for k in range(x.order + 1):
        derivs.append(coef * x0 ** (p - k))
        coef *= p - k
    return _compose(x, derivs)


def sqrt(x):
    if not isinstance(x, Jet):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("sqrt of a negative value")
        return np.sqrt(x)
    _check_positive(x.c[0], "sqrt")
    return powf(x, 0.5)


def exp(x):
    if not isinstance(x, Jet):
        return np.exp(x)
    e = np.exp(x.c[0])
    return _compose(x, [e] * (x.order + 1))


def log(x):
    if not isinstance(x, Jet):
        x = np.asarray(x, dtype=float)
        _check_positive(x, "log")
        return np.log(x)
    x0 = x.c[0]
    _check_positive(x0, "log")
    derivs = [np.log(x0)] + [(-1) ** (k - 1) * math.factorial(k - 1) / x0 ** k
                             for k in range(1, x.order + 1)]
    return _compose(x, derivs)


def sin(x):
    if not isinstance(x, Jet):
        return np.sin(x)
    s, c = np.sin(x.c[0]), np.cos(x.c[0])
    cycle = [s, c, -s, -c]
    return _compose(x, [cycle[k % 4] for k in range(x.order + 1)])


def cos(x):
    if not isinstance(x, Jet):
        return np.cos(x)
    s, c = np.sin(x.c[0]), np.cos(x.c[0])
    cycle = [c, -s, -c, s]
    return _compose(x, [cycle[k % 4] for k in range(x.order + 1)])


def stack(items, axis: int = 0):
    """Stack jets (or constants) along a new value axis."""
    jets = [it for it in items if isinstance(it, Jet)]
    if not jets:
        return np.stack([np.asarray(it, dtype=float) for it in items], axis=axis)
    order = min(j.order for j in jets)
    cs = [(it.truncate(order).c if isinstance(it, Jet) else Jet.constant(it, order).c)
          for it in items]
    nd = max(c.ndim for c in cs)
    shape = np.broadcast_shapes(*[_expand(c, nd - 1).shape[1:] for c in cs])
    cs = [np.broadcast_to(_expand(c, nd - 1), (c.shape[0],) + shape) for c in cs]
    if axis >= 0:
        axis += 1
    return Jet(np.stack(cs, axis=axis), order)


def value_of(x):
    """Base-point value of a jet, or the argument itself as an array."""
    return x.c[0] if isinstance(x, Jet) else np.asarray(x, dtype=float)


def order_of(*xs) -> int | None:
    orders = [x.order for x in xs if isinstance(x, Jet)]
    return min(orders) if orders else None


_BINARY = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}
_UNARY = {"sqrt": sqrt, "sin": sin, "cos": cos, "exp": exp, "log": log}


def jet_arith(a: Jet, b=None, op: str = "add") -> Jet:
    """Dispatch one arithmetic operation by name.

    ``pow_int`` takes the integer exponent as ``b``.
    """
    if op in _BINARY:
        return _BINARY[op](a, b)
    if op in _UNARY:
        return _UNARY[op](a)
    if op == "pow_int":
        return _pow_int(a, int(b))
    raise ValueError(f"unknown jet operation {op!r}")
