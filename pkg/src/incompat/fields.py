"""Bulk fields on the domain box: expression-backed leaves, lazy derivative
operators, piecewise fields split by an interface, and smooth bump test
functions.

A bulk field evaluates to a jet at a batch of points:

    field.eval_jets(points, order)  # points (3, N) -> Jet, trailing (comps..., N)

Derivative operators are lazy wrappers that request one order more from their
input, so arbitrary chains (curl of sym of grad of ...) stay exact up to the
jet order budget (3 for bulk fields).
"""

from __future__ import annotations

import numpy as np

from . import jetalg as ja
from .fieldexpr import (
    BULK_VARS,
    Node,
    compile_tape,
    eval_tape,
    parse_field,
)
from .jets import Jet, seed_points

RANK_SHAPE = {0: (), 1: (3,), 2: (3, 3)}


def _seed(points, order):
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    return seed_points(points, order), points


class BulkField:
    """Expression-backed field; components are parsed scalar expressions."""

    def __init__(self, components, variables=BULK_VARS, max_order: int = 3):
        comps = np.asarray(components, dtype=object)
        self.rank = comps.ndim
        if comps.shape != RANK_SHAPE[self.rank]:
            raise ValueError(f"component array must have shape {RANK_SHAPE}, got {comps.shape}")
        self.variables = variables
        self.max_order = max_order

        def to_tape(c):
            node = parse_field(c, variables) if isinstance(c, str) else (
                c if isinstance(c, Node) else parse_field(repr(float(c)), variables)
            )
            return compile_tape(node, variables)

        self.tapes = np.frompyfunc(to_tape, 1, 1)(comps)

    def eval_jets(self, points, order: int) -> Jet:
        var_jets, points = _seed(points, order)
        return self.eval_with(var_jets)

    def eval_with(self, var_jets: list[Jet]) -> Jet:
        """Evaluate with arbitrary coordinate jets (used for restrictions)."""
        if self.rank == 0:
            return eval_tape(self.tapes[()], var_jets)
        if self.rank == 1:
            return ja.stack([eval_tape(self.tapes[i], var_jets) for i in range(3)])
        return ja.stack(
            [ja.stack([eval_tape(self.tapes[i, j], var_jets) for j in range(3)]) for i in range(3)]
        )


class ConstantField:
    def __init__(self, value):
        self.value = np.asarray(value, dtype=np.float64)
        self.rank = self.value.ndim
        self.max_order = 99

    def eval_jets(self, points, order: int) -> Jet:
        _, points = _seed(points, order)
        n = points.shape[1]
        val = self.value.reshape(self.value.shape + (1,)) * np.ones(n)
        return Jet.const(val, 3, order)


class ZeroField(ConstantField):
    def __init__(self, rank: int):
        super().__init__(np.zeros(RANK_SHAPE[rank]))


class LinearCombination:
    def __init__(self, terms: list[tuple[float, object]]):
        self.terms = terms
        self.rank = terms[0][1].rank
        if any(f.rank != self.rank for _, f in terms):
            raise ValueError("rank mismatch in linear combination")
        self.max_order = min(f.max_order for _, f in terms)

    def eval_jets(self, points, order: int) -> Jet:
        out = None
        for c, f in self.terms:
            j = f.eval_jets(points, order) * c
            out = j if out is None else out + j
        return out


class _Derived:
    """Lazy wrapper base: consumes `uses` extra derivative orders."""

    uses = 1

    def __init__(self, field):
        self.field = field
        self.max_order = field.max_order - self.uses

    def eval_jets(self, points, order: int) -> Jet:
        if order > self.max_order:
            raise ValueError(
                f"{type(self).__name__}: requested jet order {order} exceeds budget "
                f"{self.max_order}"
            )
        inner = self.field.eval_jets(points, order + self.uses)
        return self._apply(inner)


class Grad(_Derived):
    def __init__(self, field):
        super().__init__(field)
        if field.rank > 1:
            raise ValueError("grad supports scalar and vector fields")
        self.rank = field.rank + 1

    def _apply(self, f: Jet) -> Jet:
        ders = [f.deriv(v) for v in range(3)]
        if self.rank == 1:
            return ja.stack(ders)
        # (grad v)_ij = d_j v_i
        return ja.stack([ja.stack([ja.comp(ders[j], i) for j in range(3)]) for i in range(3)])


class Div(_Derived):
    def __init__(self, field):
        super().__init__(field)
        if field.rank == 0:
            raise ValueError("div needs a vector or tensor field")
        self.rank = field.rank - 1

    def _apply(self, f: Jet) -> Jet:
        ders = [f.deriv(v) for v in range(3)]
        if self.rank == 0:
            return ja.comp(ders[0], 0) + ja.comp(ders[1], 1) + ja.comp(ders[2], 2)
        # (div a)_i = d_j a_ij
        return ja.stack(
            [ja.comp(ders[0], i, 0) + ja.comp(ders[1], i, 1) + ja.comp(ders[2], i, 2)
             for i in range(3)]
        )


class Curl(_Derived):
    def __init__(self, field):
        super().__init__(field)
        if field.rank not in (1, 2):
            raise ValueError("curl needs a vector or tensor field")
        self.rank = field.rank

    def _apply(self, f: Jet) -> Jet:
        d = [f.deriv(v) for v in range(3)]
        if self.rank == 1:
            # (curl v)_i = eps_ijk d_j v_k
            return ja.stack([
                ja.comp(d[1], 2) - ja.comp(d[2], 1),
                ja.comp(d[2], 0) - ja.comp(d[0], 2),
                ja.comp(d[0], 1) - ja.comp(d[1], 0),
            ])
        # (curl a)_ij = eps_ilk d_l a_jk
        rows = []
        for j in range(3):
            rows.append(ja.stack([
                ja.comp(d[1], j, 2) - ja.comp(d[2], j, 1),
                ja.comp(d[2], j, 0) - ja.comp(d[0], j, 2),
                ja.comp(d[0], j, 1) - ja.comp(d[1], j, 0),
            ]))
        # rows[j] holds (curl a)_{. j}: stack as columns
        return ja.stack(rows, axis=1)


class Transpose(_Derived):
    uses = 0

    def __init__(self, field):
        super().__init__(field)
        self.rank = 2

    def _apply(self, f: Jet) -> Jet:
        return ja.transpose(f)


class Sym(_Derived):
    uses = 0

    def __init__(self, field):
        super().__init__(field)
        self.rank = field.rank

    def _apply(self, f: Jet) -> Jet:
        return ja.sym(f)


def sym_grad(displacement) -> Sym:
    return Sym(Grad(displacement))


def curl_curl(field):
    """(curl curl a)_ij = eps_ilk eps_jmn d2_lm a_kn, as a lazy chain."""
    return Curl(Curl(field))


def bulk_operator(kind: str, field):
    ops = {"grad": Grad, "div": Div, "curl": Curl, "curl_curl": curl_curl, "sym": Sym,
           "transpose": Transpose}
    if kind not in ops:
        raise ValueError(f"unknown operator {kind!r} (have {sorted(ops)})")
    return ops[kind](field)


class PiecewiseField:
    """Field with one smooth branch per side of a dividing interface.

    Side convention: the interface's level function psi is positive on the
    plus side; the unit normal points into the minus side.  jump = plus - minus.
    """

    def __init__(self, plus, minus, interface):
        if plus.rank != minus.rank:
            raise ValueError("side ranks differ")
        self.plus = plus
        self.minus = minus
        self.interface = interface
        self.rank = plus.rank
        self.max_order = min(plus.max_order, minus.max_order)

    def side_limit(self, side: str):
        if side == "plus":
            return self.plus
        if side == "minus":
            return self.minus
        raise ValueError("side must be 'plus' or 'minus'")

    def eval_values(self, points) -> np.ndarray:
        """Pointwise values, classifying each point by the signed level."""
        points = np.asarray(points, dtype=np.float64)
        psi = self.interface.side_values(points)
        mask = psi >= 0.0
        out = np.zeros(RANK_SHAPE[self.rank] + (points.shape[1],))
        for m, f in ((mask, self.plus), (~mask, self.minus)):
            if m.any():
                out[..., m] = f.eval_jets(points[:, m], 0).value
        return out

    def jump_values(self, points, order: int = 0) -> Jet:
        """plus-trace minus minus-trace, as jets at the given points."""
        return self.plus.eval_jets(points, order) - self.minus.eval_jets(points, order)


def jump(field: PiecewiseField, points, interface=None, tol: float = 1e-9):
    """Jump of a piecewise field at points on its interface."""
    surf = interface if interface is not None else field.interface
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    psi = surf.side_values(pts)
    if np.max(np.abs(psi)) > tol:
        raise ValueError(
            f"jump: points are not on the interface (max |level| {np.max(np.abs(psi)):.2e})"
        )
    return field.jump_values(pts, 0).value


def side_limit(field: PiecewiseField, side: str):
    return field.side_limit(side)


class TestFunction:
    """C-infinity bump supported on an axis-aligned ellipsoid.

    phi(x) = amplitude(x) * exp(1 - 1/(1 - rho^2)) inside rho < 1, zero
    outside, with rho^2 = sum_i ((x_i - c_i)/r_i)^2.  The bump factor equals 1
    at the center, so the center value is the amplitude there.
    """

    GUARD = 1e-12

    def __init__(self, center, radii, amplitude, variables=BULK_VARS):
        self.center = np.asarray(center, dtype=np.float64)
        self.radii = np.asarray(radii, dtype=np.float64)
        if np.any(self.radii <= 0):
            raise ValueError("bump radii must be positive")
        amp = np.asarray(amplitude, dtype=object)
        self.rank = amp.ndim
        self.amplitude = BulkField(amp if amp.ndim else amp[()], variables) \
            if _has_strings(amp) else ConstantField(amp.astype(np.float64))
        self.max_order = 3

    @property
    def support_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.center - self.radii, self.center + self.radii

    def eval_jets(self, points, order: int) -> Jet:
        var_jets, points = _seed(points, order)
        n = points.shape[1]
        rho2 = ((points - self.center[:, None]) / self.radii[:, None]) ** 2
        inside = rho2.sum(axis=0) < 1.0 - self.GUARD
        shape = RANK_SHAPE[self.rank] + (n,)
        out = Jet.const(np.zeros(shape), 3, order)
        if inside.any():
            sub = points[:, inside]
            sub_jets = seed_points(sub, order)
            r2 = None
            for v in range(3):
                t = ((sub_jets[v] - self.center[v]) * (1.0 / self.radii[v])) ** 2
                r2 = t if r2 is None else r2 + t
            w = 1.0 - r2
            bump = (1.0 - 1.0 / w).exp()
            amp = self.amplitude.eval_with(sub_jets) if isinstance(self.amplitude, BulkField) \
                else self.amplitude.eval_jets(sub, order)
            val = amp * bump  # trailing shapes (comps..., n) x (n,) broadcast
            out.coef[(slice(None), *([slice(None)] * self.rank), inside)] = val.coef
        return out


def _has_strings(arr) -> bool:
    return any(isinstance(x, (str, Node)) for x in np.atleast_1d(arr).ravel())


def bump_test_function(center, radii, amplitude) -> TestFunction:
    return TestFunction(center, radii, amplitude)
