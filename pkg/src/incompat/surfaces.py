"""Oriented surfaces, curves, surface fields and intrinsic surface calculus.

Orientation conventions (pinned here for the whole package):

  * the unit normal n points into the minus side of the interface; the level
    function psi returned by `side_values` is positive on the plus side, so
    <n, grad psi> < 0;
  * jump = plus-trace minus minus-trace;
  * nu is the in-plane outward normal of a surface patch along its boundary;
  * curve endpoint evaluations carry + at the end, - at the start of the
    parameter interval.

Surface operators are computed intrinsically from the parametrization using
the extension that is constant along the normal: with (g1, g2) the tangential
reciprocal basis of [sigma_u, sigma_v, n],

  grad_S f = f_u o g1 + f_v o g2,     div_S / curl_S by contraction,

which is extension-independent (tested against a linear-in-normal extension).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jetalg as ja
from .fieldexpr import SURFACE_VARS, CURVE_VARS, compile_tape, eval_tape, parse_field
from .jets import Jet
from .tensor_core import vec_cross as np_cross

GEOM_TOL = 1e-9


def _as_uv(uv) -> np.ndarray:
    uv = np.asarray(uv, dtype=np.float64)
    if uv.ndim == 1:
        uv = uv[:, None]
    return uv


@dataclass
class Frames:
    """First-order geometry at a batch of surface points (jet-valued)."""

    sigma: Jet
    su: Jet
    sv: Jet
    n: Jet
    g1: Jet
    g2: Jet
    area: Jet  # |sigma_u x sigma_v|


class Surface:
    """Parametrized surface patch, one of the supported analytic kinds.

    Kinds 'plane', 'sphere', 'cylinder' and 'graph' can divide the domain and
    provide a signed level function; 'parametric' hosts surface densities only.
    """

    def __init__(self, kind: str, window, orient: float, u_closed=False, v_closed=False,
                 **params):
        self.kind = kind
        self.window = tuple(float(w) for w in window)  # (u0, u1, v0, v1)
        self.orient = float(orient)
        self.u_closed = u_closed
        self.v_closed = v_closed
        self.params = params

    # -- constructors --------------------------------------------------------

    @staticmethod
    def plane(point, normal, window=(-1.0, 1.0, -1.0, 1.0), tangents=None) -> "Surface":
        point = np.asarray(point, dtype=np.float64)
        m = np.asarray(normal, dtype=np.float64)
        m = m / np.linalg.norm(m)
        if tangents is None:
            e = np.zeros(3)
            e[int(np.argmin(np.abs(m)))] = 1.0
            t1 = np_cross(m, e)
            t1 = t1 / np.linalg.norm(t1)
            t2 = np_cross(m, t1)
        else:
            t1, t2 = (np.asarray(t, dtype=np.float64) for t in tangents)
        # sigma_u x sigma_v = t1 x t2; orient so that n = m
        orient = 1.0 if np.dot(np_cross(t1, t2), m) > 0 else -1.0
        return Surface("plane", window, orient, point=point, normal=m, t1=t1, t2=t2)

    @staticmethod
    def sphere(center, radius, orientation="outward", window=None) -> "Surface":
        closed = window is None
        if closed:
            window = (0.0, 2.0 * np.pi, 0.0, np.pi)
        orient = -1.0 if orientation == "outward" else 1.0
        return Surface("sphere", window, orient, u_closed=closed,
                       center=np.asarray(center, dtype=np.float64), radius=float(radius),
                       orientation=orientation)

    @staticmethod
    def cylinder(point, axis, radius, orientation="outward", window=(0.0, 2.0 * np.pi, -1.0, 1.0),
                 full_angle=None) -> "Surface":
        axis = np.asarray(axis, dtype=np.float64)
        d3 = axis / np.linalg.norm(axis)
        e = np.zeros(3)
        e[int(np.argmin(np.abs(d3)))] = 1.0
        d1 = np_cross(d3, e)
        d1 = d1 / np.linalg.norm(d1)
        d2 = np_cross(d3, d1)
        if full_angle is None:
            full_angle = abs((window[1] - window[0]) - 2.0 * np.pi) < 1e-12
        orient = 1.0 if orientation == "outward" else -1.0
        return Surface("cylinder", window, orient, u_closed=full_angle,
                       point=np.asarray(point, dtype=np.float64), radius=float(radius),
                       d1=d1, d2=d2, d3=d3, orientation=orientation)

    @staticmethod
    def graph(height, window=(-1.0, 1.0, -1.0, 1.0), orientation="up") -> "Surface":
        node = parse_field(height, SURFACE_VARS) if isinstance(height, str) else height
        tape = compile_tape(node, SURFACE_VARS)
        orient = 1.0 if orientation == "up" else -1.0
        return Surface("graph", window, orient, tape=tape, orientation=orientation)

    @staticmethod
    def parametric(components, window, orient: float = 1.0) -> "Surface":
        tapes = [compile_tape(parse_field(c, SURFACE_VARS) if isinstance(c, str) else c,
                              SURFACE_VARS) for c in components]
        return Surface("parametric", window, orient, tapes=tapes)

    # -- parametrization -----------------------------------------------------

    def sigma_from_jets(self, u: Jet, v: Jet) -> Jet:
        p = self.params
        if self.kind == "plane":
            comps = [p["point"][i] + u * p["t1"][i] + v * p["t2"][i] for i in range(3)]
            return ja.stack(comps)
        if self.kind == "sphere":
            su_, cu = u.sin(), u.cos()
            sv_, cv = v.sin(), v.cos()
            R, c = p["radius"], p["center"]
            return ja.stack([c[0] + R * (sv_ * cu), c[1] + R * (sv_ * su_), c[2] + R * cv])
        if self.kind == "cylinder":
            cu, su_ = u.cos(), u.sin()
            R, a = p["radius"], p["point"]
            comps = []
            for i in range(3):
                comps.append(a[i] + R * (cu * p["d1"][i] + su_ * p["d2"][i]) + v * p["d3"][i])
            return ja.stack(comps)
        if self.kind == "graph":
            h = eval_tape(p["tape"], [u, v])
            return ja.stack([u, v, h])
        if self.kind == "parametric":
            return ja.stack([eval_tape(t, [u, v]) for t in p["tapes"]])
        raise ValueError(f"unknown surface kind {self.kind!r}")

    def sigma_jets(self, uv, order: int) -> Jet:
        uv = _as_uv(uv)
        u = Jet.variable(uv[0], 0, 2, order)
        v = Jet.variable(uv[1], 1, 2, order)
        return self.sigma_from_jets(u, v)

    def points(self, uv) -> np.ndarray:
        return self.sigma_jets(uv, 0).value

    def frames(self, uv, order: int) -> Frames:
        sig = self.sigma_jets(uv, order + 1)
        su = sig.deriv(0)
        sv = sig.deriv(1)
        cr = ja.vec_cross(su, sv)
        area = ja.vnorm(cr)
        n = cr * (self.orient / area)
        det = ja.inner_vec(cr, n)  # = orient * area
        g1 = ja.vec_cross(sv, n) / det
        g2 = ja.vec_cross(n, su) / det
        return Frames(sigma=sig.truncate(order), su=su, sv=sv, n=n, g1=g1, g2=g2, area=area)

    # -- sides ---------------------------------------------------------------

    @property
    def divides(self) -> bool:
        return self.kind in ("plane", "sphere", "cylinder", "graph")

    def side_values(self, points) -> np.ndarray:
        """Signed level psi: positive on the plus side, n points into minus."""
        j = self.level_jets(np.asarray(points, dtype=np.float64), 0)
        return j.value

    def level_jets(self, points, order: int) -> Jet:
        from .jets import seed_points

        p = self.params
        points = np.asarray(points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]
        x = seed_points(points, order)
        if self.kind == "plane":
            m, q = p["normal"], p["point"]
            return -((x[0] - q[0]) * m[0] + (x[1] - q[1]) * m[1] + (x[2] - q[2]) * m[2])
        if self.kind == "sphere":
            c, R = p["center"], p["radius"]
            r2 = (x[0] - c[0]) ** 2 + (x[1] - c[1]) ** 2 + (x[2] - c[2]) ** 2
            sgn = 1.0 if p["orientation"] == "outward" else -1.0
            return (R * R - r2) * sgn
        if self.kind == "cylinder":
            a, R = p["point"], p["radius"]
            d3 = p["d3"]
            w = [x[i] - a[i] for i in range(3)]
            axial = w[0] * d3[0] + w[1] * d3[1] + w[2] * d3[2]
            rho2 = w[0] ** 2 + w[1] ** 2 + w[2] ** 2 - axial ** 2
            sgn = 1.0 if p["orientation"] == "outward" else -1.0
            return (R * R - rho2) * sgn
        if self.kind == "graph":
            h = eval_tape(p["tape"], [x[0], x[1]])
            sgn = 1.0 if p["orientation"] == "up" else -1.0
            return (h - x[2]) * sgn
        raise ValueError(f"surface kind {self.kind!r} does not divide the domain")

    def level_field(self):
        """The smooth level function as a lazy bulk field (for manufactured fields)."""
        surf = self

        class _Level:
            rank = 0
            max_order = 3

            def eval_jets(self, points, order):
                return surf.level_jets(points, order)

        return _Level()

    # -- boundary ------------------------------------------------------------

    def boundary_edges(self) -> list["SurfaceEdge"]:
        u0, u1, v0, v1 = self.window
        edges = []
        if not self.v_closed:
            edges.append(SurfaceEdge(self, "vmin", (u0, u1)))
            edges.append(SurfaceEdge(self, "vmax", (u0, u1)))
        if not self.u_closed:
            edges.append(SurfaceEdge(self, "umin", (v0, v1)))
            edges.append(SurfaceEdge(self, "umax", (v0, v1)))
        # drop degenerate edges (e.g. sphere poles where the edge maps to a point)
        keep = []
        for e in edges:
            s = np.linspace(e.range[0], e.range[1], 7)
            g = e.gamma_jets(s, 1)
            speed = np.linalg.norm(g.deriv(0).value, axis=0)
            if np.max(speed) > GEOM_TOL:
                keep.append(e)
        return keep


class SurfaceEdge:
    """One boundary edge of a patch, parametrized by the free coordinate."""

    def __init__(self, surface: Surface, which: str, srange):
        self.surface = surface
        self.which = which
        self.range = (float(srange[0]), float(srange[1]))
        u0, u1, v0, v1 = surface.window
        # affine map s -> (u, v) and outward parameter direction
        table = {
            "umin": ((u0, 0.0), (0.0, 1.0), (-1.0, 0.0)),
            "umax": ((u1, 0.0), (0.0, 1.0), (1.0, 0.0)),
            "vmin": ((0.0, v0), (1.0, 0.0), (0.0, -1.0)),
            "vmax": ((0.0, v1), (1.0, 0.0), (0.0, 1.0)),
        }
        self.uv_origin, self.uv_dir, self.out_dir = table[which]

    def uv_values(self, svals) -> np.ndarray:
        svals = np.atleast_1d(np.asarray(svals, dtype=np.float64))
        u = self.uv_origin[0] + self.uv_dir[0] * svals
        v = self.uv_origin[1] + self.uv_dir[1] * svals
        return np.stack([u, v])

    def uv_jets(self, svals, order: int) -> tuple[Jet, Jet]:
        svals = np.atleast_1d(np.asarray(svals, dtype=np.float64))
        s = Jet.variable(svals, 0, 1, order)
        u = s * self.uv_dir[0] + self.uv_origin[0]
        v = s * self.uv_dir[1] + self.uv_origin[1]
        return u, v

    def gamma_jets(self, svals, order: int) -> Jet:
        u, v = self.uv_jets(svals, order)
        return self.surface.sigma_from_jets(u, v)

    def restrict(self, sfield, svals, order: int) -> Jet:
        """Surface field along the edge, as s-jets (exact composition)."""
        svals = np.atleast_1d(np.asarray(svals, dtype=np.float64))
        base = self.uv_values(svals)
        f = sfield.eval(base, order)
        u, v = self.uv_jets(svals, order)
        wu = u - base[0]
        wv = v - base[1]
        return ja.taylor_eval(f, [wu, wv])

    def frame(self, svals, order: int = 0):
        """(nu, tangent, n) jets along the edge; nu is tangential and outward."""
        svals = np.atleast_1d(np.asarray(svals, dtype=np.float64))
        fr_field = _FramesField(self.surface)
        su = self.restrict(_FrameComponent(self.surface, "su"), svals, order)
        sv = self.restrict(_FrameComponent(self.surface, "sv"), svals, order)
        n = self.restrict(_FrameComponent(self.surface, "n"), svals, order)
        g = self.gamma_jets(svals, order + 1)
        tangent = ja.unit(g.deriv(0))
        w = su * self.out_dir[0] + sv * self.out_dir[1]
        nu = w - tangent * ja.inner_vec(w, tangent)
        return ja.unit(nu), tangent, n


class _FrameComponent:
    """Frames quantity exposed with the surface-field eval protocol."""

    def __init__(self, surface: Surface, name: str):
        self.surface = surface
        self.name = name
        self.rank = 0 if name == "area" else 1

    def eval(self, uv, order: int) -> Jet:
        fr = self.surface.frames(uv, order)
        return getattr(fr, self.name)


_FramesField = _FrameComponent  # historical alias used above


# -- surface fields ----------------------------------------------------------


class SurfaceExprField:
    """Expression components in the surface parameters (u, v)."""

    def __init__(self, components):
        comps = np.asarray(components, dtype=object)
        self.rank = comps.ndim

        def to_tape(c):
            node = parse_field(c, SURFACE_VARS) if isinstance(c, str) else (
                c if not isinstance(c, (int, float)) else parse_field(repr(float(c)), SURFACE_VARS)
            )
            return compile_tape(node, SURFACE_VARS)

        self.tapes = np.frompyfunc(to_tape, 1, 1)(comps)

    def eval(self, uv, order: int) -> Jet:
        uv = _as_uv(uv)
        u = Jet.variable(uv[0], 0, 2, order)
        v = Jet.variable(uv[1], 1, 2, order)
        var_jets = [u, v]
        if self.rank == 0:
            return eval_tape(self.tapes[()], var_jets)
        if self.rank == 1:
            return ja.stack([eval_tape(self.tapes[i], var_jets) for i in range(3)])
        return ja.stack(
            [ja.stack([eval_tape(self.tapes[i, j], var_jets) for j in range(3)])
             for i in range(3)]
        )


class FormulaField:
    """Surface field defined by a closure (uv, order) -> Jet."""

    def __init__(self, rank: int, fn):
        self.rank = rank
        self.fn = fn

    def eval(self, uv, order: int) -> Jet:
        return self.fn(_as_uv(uv), order)


def normal_field(surface: Surface) -> FormulaField:
    return FormulaField(1, lambda uv, order: surface.frames(uv, order).n)


def restrict_bulk(bulk_field, surface: Surface) -> FormulaField:
    """Bulk field composed with the parametrization, as a surface field."""

    def ev(uv, order):
        sig = surface.sigma_jets(uv, order)
        base = sig.value
        from .jets import seed_points

        f = bulk_field.eval_jets(base, order)
        ws = [ja.comp(sig, i) - base[i] for i in range(3)]
        return ja.taylor_eval(f, ws)

    return FormulaField(bulk_field.rank, ev)


def restrict_jump(piecewise, surface: Surface) -> FormulaField:
    plus = restrict_bulk(piecewise.plus, surface)
    minus = restrict_bulk(piecewise.minus, surface)
    return FormulaField(piecewise.rank,
                        lambda uv, order: plus.eval(uv, order) - minus.eval(uv, order))


def s_combine(rank: int, fn, *fields) -> FormulaField:
    """Pointwise algebraic combination of surface fields (no extra derivatives)."""
    return FormulaField(rank, lambda uv, order: fn(*[f.eval(uv, order) for f in fields],
                                                   uv=uv, order=order))


# -- surface operators -------------------------------------------------------


def s_grad(field, surface: Surface) -> FormulaField:
    """Tangential gradient: appends a (tangential) index."""
    if field.rank > 1:
        raise ValueError("surface gradient supports scalar and vector fields")

    def ev(uv, order):
        f = field.eval(uv, order + 1)
        fr = surface.frames(uv, order)
        return ja.outer(f.deriv(0), fr.g1) + ja.outer(f.deriv(1), fr.g2)

    return FormulaField(field.rank + 1, ev)


def s_div(field, surface: Surface) -> FormulaField:
    """Surface divergence: vector -> scalar, second-order -> vector,
    third-order -> second-order ((div_S T) d = div_S(T d))."""

    def ev(uv, order):
        f = field.eval(uv, order + 1)
        fr = surface.frames(uv, order)
        fu, fv = f.deriv(0), f.deriv(1)
        if field.rank == 1:
            return ja.inner_vec(fu, fr.g1) + ja.inner_vec(fv, fr.g2)
        if field.rank == 2:
            return ja.mat_vec(fu, fr.g1) + ja.mat_vec(fv, fr.g2)
        if field.rank == 3:
            # (div_S T)_ij = (T_u)_ikj g1_k + (T_v)_ikj g2_k
            rows = []
            for i in range(3):
                row = []
                for j in range(3):
                    t = None
                    for k in range(3):
                        p = ja.comp(fu, i, k, j) * ja.comp(fr.g1, k) \
                            + ja.comp(fv, i, k, j) * ja.comp(fr.g2, k)
                        t = p if t is None else t + p
                    row.append(t)
                rows.append(ja.stack(row))
            return ja.stack(rows)
        raise ValueError("surface divergence needs rank 1, 2 or 3")

    return FormulaField(field.rank - 1, ev)


def s_curl(field, surface: Surface) -> FormulaField:
    """Surface curl: <curl_S v, d> = div_S(v x d); (curl_S a)^T d = div_S(a x d)."""

    def ev(uv, order):
        f = field.eval(uv, order + 1)
        fr = surface.frames(uv, order)
        fu, fv = f.deriv(0), f.deriv(1)
        if field.rank == 1:
            return ja.vec_cross(fr.g1, fu) + ja.vec_cross(fr.g2, fv)
        if field.rank == 2:
            rows = [ja.vec_cross(fr.g1, ja.row(fu, j)) + ja.vec_cross(fr.g2, ja.row(fv, j))
                    for j in range(3)]
            return ja.stack(rows, axis=1)
        raise ValueError("surface curl needs rank 1 or 2")

    return FormulaField(field.rank, ev)


def shape_operator(surface: Surface) -> FormulaField:
    return s_grad(normal_field(surface), surface)


def total_curvature(surface: Surface) -> FormulaField:
    """kappa = -div_S n (twice the mean curvature)."""
    dvn = s_div(normal_field(surface), surface)
    return FormulaField(0, lambda uv, order: -dvn.eval(uv, order))


def surface_operator(kind: str, field, surface: Surface) -> FormulaField:
    ops = {"grad_S": s_grad, "div_S": s_div, "curl_S": s_curl}
    if kind not in ops:
        raise ValueError(f"unknown surface operator {kind!r} (have {sorted(ops)})")
    return ops[kind](field, surface)


def normal_and_shape(surface: Surface, uv):
    """(n, grad_S n, kappa) values at parameter points."""
    uv = _as_uv(uv)
    n = surface.frames(uv, 0).n.value
    shp = shape_operator(surface).eval(uv, 0).value
    kappa = -(shp[0, 0] + shp[1, 1] + shp[2, 2])
    return n, shp, kappa


def boundary_frame(surface: Surface, point, tol: float = 1e-7):
    """(nu, tangent, n) at a point on the patch boundary.

    The point is located by minimizing the distance to each boundary edge;
    raises if the best match is farther than `tol`.
    """
    point = np.asarray(point, dtype=np.float64).reshape(3)
    best = None
    for edge in surface.boundary_edges():
        s = np.linspace(edge.range[0], edge.range[1], 65)
        g = edge.gamma_jets(s, 0).value
        d = np.linalg.norm(g - point[:, None], axis=0)
        k = int(np.argmin(d))
        s0 = s[k]
        for _ in range(40):  # Newton on d/ds |gamma - point|^2
            gj = edge.gamma_jets(np.array([s0]), 2)
            diff = gj.value[:, 0] - point
            g1 = gj.partial((1,))[:, 0]
            g2 = gj.partial((2,))[:, 0]
            grad = 2.0 * diff @ g1
            hess = 2.0 * (g1 @ g1 + diff @ g2)
            if abs(hess) < 1e-14:
                break
            step = grad / hess
            s0 = float(np.clip(s0 - step, edge.range[0], edge.range[1]))
            if abs(step) < 1e-14:
                break
        dist = float(np.linalg.norm(edge.gamma_jets(np.array([s0]), 0).value[:, 0] - point))
        if best is None or dist < best[0]:
            best = (dist, edge, s0)
    if best is None or best[0] > tol:
        raise ValueError(f"point is not on the patch boundary (distance {best[0]:.2e})"
                         if best else "surface has no boundary")
    _, edge, s0 = best
    nu, tangent, n = edge.frame(np.array([s0]), 0)
    return nu.value[:, 0], tangent.value[:, 0], n.value[:, 0]


# -- curves -----------------------------------------------------------------


class Curve:
    """Parametrized curve, expression components in s."""

    def __init__(self, components, srange, closed: bool | None = None):
        self.tapes = [compile_tape(parse_field(c, CURVE_VARS) if isinstance(c, str) else c,
                                   CURVE_VARS) for c in components]
        self.range = (float(srange[0]), float(srange[1]))
        if closed is None:
            a = self.gamma_jets(np.array([self.range[0]]), 0).value[:, 0]
            b = self.gamma_jets(np.array([self.range[1]]), 0).value[:, 0]
            closed = bool(np.linalg.norm(a - b) < GEOM_TOL)
        self.closed = closed

    def gamma_jets(self, svals, order: int) -> Jet:
        svals = np.atleast_1d(np.asarray(svals, dtype=np.float64))
        s = Jet.variable(svals, 0, 1, order)
        return ja.stack([eval_tape(t, [s]) for t in self.tapes])

    def frame(self, svals, order: int):
        """(tangent t, speed |gamma'|) as s-jets."""
        g = self.gamma_jets(svals, order + 1)
        gp = g.deriv(0)
        speed = ja.vnorm(gp)
        return gp / speed, speed

    def endpoints(self):
        """((point, tangent, sign)) with sign +1 at the end, -1 at the start."""
        if self.closed:
            return []
        out = []
        for sval, sign in ((self.range[1], 1.0), (self.range[0], -1.0)):
            t, _ = self.frame(np.array([sval]), 0)
            x = self.gamma_jets(np.array([sval]), 0).value[:, 0]
            out.append((x, t.value[:, 0], sign))
        return out


class EdgeCurve:
    """Adapter: a patch boundary edge with the Curve interface plus surface data."""

    def __init__(self, edge: SurfaceEdge):
        self.edge = edge
        self.range = edge.range
        self.closed = False

    def gamma_jets(self, svals, order: int) -> Jet:
        return self.edge.gamma_jets(svals, order)

    def frame(self, svals, order: int):
        g = self.edge.gamma_jets(svals, order + 1)
        gp = g.deriv(0)
        speed = ja.vnorm(gp)
        return gp / speed, speed

    def surface_frame(self, svals, order: int = 0):
        return self.edge.frame(svals, order)


def curl_t(bulk_field, curve, svals) -> np.ndarray:
    """curl_t v = (dv/dt x t) + curl v along a curve (t = unit tangent).

    Independent of any auxiliary surface containing the curve.
    """
    from .fields import Curl

    svals = np.atleast_1d(np.asarray(svals, dtype=np.float64))
    g = curve.gamma_jets(svals, 1)
    base = g.value
    t, speed = curve.frame(svals, 0)
    # dv/dt = arclength derivative of v along the curve
    f = bulk_field.eval_jets(base, 1)
    ws = [ja.comp(g, i) - base[i] for i in range(3)]
    v_on = ja.taylor_eval(f, ws)  # s-jet, order 1
    dv_dt = v_on.deriv(0) / speed
    cv = Curl(bulk_field).eval_jets(base, 0)
    return (ja.vec_cross(dv_dt, t.truncate(0)) + cv).value
