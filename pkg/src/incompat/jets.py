"""Truncated Taylor jets: values plus partial derivatives up to a fixed order.

A `Jet` holds coefficients c[alpha] = d^alpha f / alpha! at a batch of
evaluation points; `coef` has shape (ncoeff, *trailing) where the trailing
axes are free (point batch, tensor components, ...).  Arithmetic propagates
derivatives exactly: products are coefficient convolutions, elementary
functions compose a univariate series with the nilpotent part of the argument.

All derivative extraction in the package goes through `deriv` / `partial`;
finite differences appear only in tests, as independent oracles.
"""

from __future__ import annotations

import numpy as np

from . import backend
from ._multiindex import tables

_SERIES_FUNCS = {}


def _series(name):
    def reg(fn):
        _SERIES_FUNCS[name] = fn
        return fn

    return reg


# Univariate Taylor coefficients s_k = f^(k)(a0) / k! for k = 0..order.


@_series("exp")
def _exp_series(a0, order):
    e = np.exp(a0)
    fact = 1.0
    out = []
    for k in range(order + 1):
        out.append(e / fact)
        fact *= k + 1
    return out


@_series("sin")
def _sin_series(a0, order):
    s, c = np.sin(a0), np.cos(a0)
    cycle = [s, c, -s, -c]
    fact = 1.0
    out = []
    for k in range(order + 1):
        out.append(cycle[k % 4] / fact)
        fact *= k + 1
    return out


@_series("cos")
def _cos_series(a0, order):
    s, c = np.sin(a0), np.cos(a0)
    cycle = [c, -s, -c, s]
    fact = 1.0
    out = []
    for k in range(order + 1):
        out.append(cycle[k % 4] / fact)
        fact *= k + 1
    return out


@_series("tanh")
def _tanh_series(a0, order):
    t = np.tanh(a0)
    g = 1.0 - t * t
    # f' = g, f'' = -2 t g, f''' = -2 g^2 + 4 t^2 g, f'''' = 16 t g^2 - 8 t^3 g
    derivs = [t, g, -2.0 * t * g, -2.0 * g * g + 4.0 * t * t * g,
              16.0 * t * g * g - 8.0 * t ** 3 * g]
    fact = 1.0
    out = []
    for k in range(order + 1):
        out.append(derivs[k] / fact)
        fact *= k + 1
    return out


@_series("recip")
def _recip_series(a0, order):
    r = 1.0 / a0
    out = []
    p = r
    for k in range(order + 1):
        out.append(p if k % 2 == 0 else -p)
        p = p * r
    return out


@_series("sqrt")
def _sqrt_series(a0, order):
    r = np.sqrt(a0)
    out = [r]
    # binomial series: s_k = C(1/2, k) a0^(1/2 - k)
    coef = 1.0
    for k in range(1, order + 1):
        coef *= (0.5 - (k - 1)) / k
        out.append(coef * r / a0 ** k)
    return out


@_series("log")
def _log_series(a0, order):
    out = [np.log(a0)]
    for k in range(1, order + 1):
        out.append((-1.0) ** (k - 1) / (k * a0 ** k))
    return out


class Jet:
    __slots__ = ("coef", "nvars", "order")

    def __init__(self, coef: np.ndarray, nvars: int, order: int):
        self.coef = coef
        self.nvars = nvars
        self.order = order

    # -- constructors ------------------------------------------------------

    @classmethod
    def const(cls, value, nvars: int, order: int, shape=()) -> "Jet":
        nc = tables(nvars, order).ncoeff
        value = np.asarray(value, dtype=np.float64)
        shape = np.broadcast_shapes(shape, value.shape)
        coef = np.zeros((nc, *shape), dtype=np.float64)
        coef[0] = value
        return cls(coef, nvars, order)

    @classmethod
    def variable(cls, values, index: int, nvars: int, order: int) -> "Jet":
        tb = tables(nvars, order)
        values = np.asarray(values, dtype=np.float64)
        coef = np.zeros((tb.ncoeff, *values.shape), dtype=np.float64)
        coef[0] = values
        if order >= 1:
            coef[tb.var_pos[index]] = 1.0
        return cls(coef, nvars, order)

    # -- basic access ------------------------------------------------------

    @property
    def value(self) -> np.ndarray:
        return self.coef[0]

    @property
    def shape(self):
        return self.coef.shape[1:]

    def truncate(self, order: int) -> "Jet":
        if order == self.order:
            return self
        if order > self.order:
            raise ValueError(f"cannot raise jet order {self.order} -> {order}")
        nc = tables(self.nvars, order).ncoeff
        return Jet(self.coef[:nc], self.nvars, order)

    def deriv(self, var: int) -> "Jet":
        """d/dx_var as a jet of order-1."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        tb = tables(self.nvars, self.order)
        src, fac = tb.deriv[var]
        coef = self.coef[src] * fac.reshape((-1,) + (1,) * (self.coef.ndim - 1))
        return Jet(np.ascontiguousarray(coef), self.nvars, self.order - 1)

    def partial(self, alpha: tuple[int, ...]) -> np.ndarray:
        """Plain derivative value d^alpha f (not divided by alpha!)."""
        tb = tables(self.nvars, self.order)
        fact = 1.0
        for a in alpha:
            for m in range(1, a + 1):
                fact *= m
        return self.coef[tb.position[tuple(alpha)]] * fact

    # -- arithmetic --------------------------------------------------------

    def _wrap(self, other):
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise ValueError("jet variable-count mismatch")
            if other.order != self.order:
                o = min(self.order, other.order)
                return self.truncate(o), other.truncate(o)
            return self, other
        return self, None  # scalar/array path

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b = self._wrap(other)
            return Jet(a.coef + b.coef, self.nvars, a.order)
        other = np.asarray(other, dtype=np.float64)
        trail = np.broadcast_shapes(self.shape, other.shape)
        coef = np.broadcast_to(self.coef, (self.coef.shape[0], *trail)).copy()
        coef[0] += other
        return Jet(coef, self.nvars, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coef, self.nvars, self.order)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._wrap(other)
        if b is None:
            return Jet(a.coef * np.asarray(other, dtype=np.float64), self.nvars, a.order)
        tb = tables(self.nvars, a.order)
        trail = np.broadcast_shapes(a.coef.shape[1:], b.coef.shape[1:])
        ca = np.ascontiguousarray(
            np.broadcast_to(a.coef, (tb.ncoeff, *trail)).reshape(tb.ncoeff, -1)
        )
        cb = np.ascontiguousarray(
            np.broadcast_to(b.coef, (tb.ncoeff, *trail)).reshape(tb.ncoeff, -1)
        )
        out = backend.mul_coeffs(ca, cb, tb.mul_i, tb.mul_j, tb.mul_k, tb.mul_starts, tb.ncoeff)
        return Jet(np.asarray(out).reshape(tb.ncoeff, *trail), self.nvars, a.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other._compose("recip")
        return self * (1.0 / np.asarray(other, dtype=np.float64))

    def __rtruediv__(self, other):
        return self._compose("recip") * other

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            raise TypeError("jet powers must be integers")
        n = int(n)
        if n < 0:
            return (self ** (-n))._compose("recip")
        if n == 0:
            return Jet.const(1.0, self.nvars, self.order, self.shape)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- elementary functions ----------------------------------------------

    def _compose(self, name: str) -> "Jet":
        """f(self) via the univariate series of f around the point value."""
        series = _SERIES_FUNCS[name](self.coef[0], self.order)
        w = Jet(self.coef.copy(), self.nvars, self.order)
        w.coef[0] = 0.0
        out = Jet.const(series[self.order], self.nvars, self.order, self.shape)
        for k in range(self.order - 1, -1, -1):
            out = out * w
            out.coef[0] = out.coef[0] + series[k]
        return out

    def exp(self):
        return self._compose("exp")

    def sin(self):
        return self._compose("sin")

    def cos(self):
        return self._compose("cos")

    def tanh(self):
        return self._compose("tanh")

    def sqrt(self):
        return self._compose("sqrt")

    def log(self):
        return self._compose("log")

    def __repr__(self):
        return f"Jet(nvars={self.nvars}, order={self.order}, shape={self.shape})"


def seed_points(points: np.ndarray, order: int) -> list[Jet]:
    """Coordinate jets for a batch of points, shape (nvars, N) -> one Jet per axis."""
    points = np.asarray(points, dtype=np.float64)
    nvars = points.shape[0]
    return [Jet.variable(points[v], v, nvars, order) for v in range(nvars)]
