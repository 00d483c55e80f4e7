"""Tensor algebra over jet-valued components.

Mirrors `tensor_core` (same index conventions) but every scalar entry is a
truncated Taylor jet, so products run through the jet multiplication kernel.
A jet-valued vector field at N points is a Jet whose coefficient array has
trailing shape (3, N); a second-order tensor (3, 3, N); third-order
(3, 3, 3, N).  Component access `jet[i, j]` slices the trailing axes.

Also hosts `taylor_eval`, the composition used to restrict bulk fields (and
their derivative chains) to surfaces and curves.
"""

from __future__ import annotations

import numpy as np

from ._multiindex import tables
from .jets import Jet


def comp(jet: Jet, *idx) -> Jet:
    return Jet(jet.coef[(slice(None), *idx)], jet.nvars, jet.order)


def stack(jets: list[Jet], axis: int = 0) -> Jet:
    trail = np.broadcast_shapes(*[j.shape for j in jets])
    order = min(j.order for j in jets)
    nvars = jets[0].nvars
    nc = tables(nvars, order).ncoeff
    coef = np.stack(
        [np.broadcast_to(j.truncate(order).coef, (nc, *trail)) for j in jets],
        axis=1 + axis,
    )
    return Jet(np.ascontiguousarray(coef), nvars, order)


def jconst(value, ref: Jet) -> Jet:
    """Constant jet with the batch shape of `ref`'s trailing axis."""
    value = np.asarray(value, dtype=np.float64)
    batch = ref.shape[-1:] if ref.shape else ()
    return Jet.const(value.reshape(value.shape + (1,) * len(batch)), ref.nvars, ref.order)


def vec_cross(u: Jet, v: Jet) -> Jet:
    def c(j, k):
        return comp(u, j) * comp(v, k) - comp(u, k) * comp(v, j)

    return stack([c(1, 2), c(2, 0), c(0, 1)])


def dyad(u: Jet, v: Jet) -> Jet:
    return stack([stack([comp(u, i) * comp(v, j) for j in range(3)]) for i in range(3)])


def outer(f: Jet, g: Jet) -> Jet:
    """f o g where f may be scalar, vector or second-order; appends g's index."""
    rank = len(f.shape) - 1
    if rank == 0:
        return stack([f * comp(g, j) for j in range(3)])
    if rank == 1:
        return dyad(f, g)
    if rank == 2:
        return stack(
            [stack([stack([comp(f, i, j) * comp(g, k) for k in range(3)])
                    for j in range(3)]) for i in range(3)]
        )
    raise ValueError("outer: rank > 2 not supported")


def transpose(a: Jet) -> Jet:
    return Jet(np.ascontiguousarray(np.swapaxes(a.coef, 1, 2)), a.nvars, a.order)


def trace(a: Jet) -> Jet:
    return comp(a, 0, 0) + comp(a, 1, 1) + comp(a, 2, 2)


def sym(a: Jet) -> Jet:
    return Jet(0.5 * (a.coef + np.swapaxes(a.coef, 1, 2)), a.nvars, a.order)


def inner_vec(u: Jet, v: Jet) -> Jet:
    return comp(u, 0) * comp(v, 0) + comp(u, 1) * comp(v, 1) + comp(u, 2) * comp(v, 2)


def inner_mat(a: Jet, b: Jet) -> Jet:
    out = None
    for i in range(3):
        for j in range(3):
            t = comp(a, i, j) * comp(b, i, j)
            out = t if out is None else out + t
    return out


def mat_vec(a: Jet, v: Jet) -> Jet:
    rows = []
    for i in range(3):
        t = comp(a, i, 0) * comp(v, 0) + comp(a, i, 1) * comp(v, 1) + comp(a, i, 2) * comp(v, 2)
        rows.append(t)
    return stack(rows)


def mat_mat(a: Jet, b: Jet) -> Jet:
    rows = []
    for i in range(3):
        row = []
        for j in range(3):
            t = None
            for k in range(3):
                p = comp(a, i, k) * comp(b, k, j)
                t = p if t is None else t + p
            row.append(t)
        rows.append(stack(row))
    return stack(rows)


def row(a: Jet, j: int) -> Jet:
    return comp(a, j)


def cross_mat_vec(a: Jet, v: Jet) -> Jet:
    """(a x v)_ji = -eps_ilk a_jk v_l; row j of the result is (row_j a) x v."""
    return stack([vec_cross(row(a, j), v) for j in range(3)])


def cross_mat_mat(a: Jet, b: Jet) -> Jet:
    """Third-order (a x b)_ijm with fibers (a x b)[:, j, m] = (row_j a) x (row_m b)."""
    fibers = [[vec_cross(row(a, j), row(b, m)) for m in range(3)] for j in range(3)]
    return stack([stack([stack([comp(fibers[j][m], i) for m in range(3)])
                         for j in range(3)]) for i in range(3)])


def third_apply(T: Jet, v: Jet) -> Jet:
    out_rows = []
    for i in range(3):
        row_ = []
        for j in range(3):
            t = None
            for k in range(3):
                p = comp(T, i, j, k) * comp(v, k)
                t = p if t is None else t + p
            row_.append(t)
        out_rows.append(stack(row_))
    return stack(out_rows)


def axial(W: Jet) -> Jet:
    return 0.5 * stack([
        comp(W, 2, 1) - comp(W, 1, 2),
        comp(W, 0, 2) - comp(W, 2, 0),
        comp(W, 1, 0) - comp(W, 0, 1),
    ])


def hat(w: Jet) -> Jet:
    z = comp(w, 0) * 0.0
    return stack([
        stack([z, -comp(w, 2), comp(w, 1)]),
        stack([comp(w, 2), z, -comp(w, 0)]),
        stack([-comp(w, 1), comp(w, 0), z]),
    ])


def vnorm(v: Jet) -> Jet:
    return inner_vec(v, v).sqrt()


def unit(v: Jet) -> Jet:
    return v * (1.0 / vnorm(v))


def identity_like(ref: Jet) -> Jet:
    """Constant identity tensor broadcast against ref's batch shape."""
    batch = ref.shape[-1:] if ref.shape else ()
    eye = np.eye(3).reshape(3, 3, *([1] * len(batch)))
    return Jet.const(eye, ref.nvars, ref.order)


def taylor_eval(fjet: Jet, ws: list[Jet]) -> Jet:
    """Compose a bulk jet with parameter jets: sum_alpha c_alpha w^alpha.

    `fjet` is an x-jet (nvars = len(ws)) whose coefficients are Taylor
    coefficients at base points; each `ws[v]` is a parameter-space jet with
    zero constant term (the nilpotent offset of coordinate v).  The result is
    the parameter-space jet of the composition, exact up to the smaller of
    the two orders.
    """
    tb = tables(fjet.nvars, fjet.order)
    out_order = min(w.order for w in ws)
    # powers of each offset up to the needed degree
    pows: list[list[Jet | None]] = []
    for w in ws:
        p: list[Jet | None] = [None, w.truncate(out_order)]
        for d in range(2, fjet.order + 1):
            p.append(p[-1] * p[1])
        pows.append(p)
    out = None
    for k, alpha in enumerate(tb.indices):
        coef_k = fjet.coef[k]
        term: Jet | None = None
        for v, a in enumerate(alpha):
            if a == 0:
                continue
            term = pows[v][a] if term is None else term * pows[v][a]
        if term is None:  # alpha == 0
            contrib = Jet.const(coef_k, ws[0].nvars, out_order)
        else:
            # scale the parameter jet by the (array-valued) Taylor coefficient
            contrib = _scale_with_components(term, coef_k)
        out = contrib if out is None else out + contrib
    return out


def _scale_with_components(jet: Jet, coef_k: np.ndarray) -> Jet:
    """jet (trailing (N,)) times an array (comps..., N) -> trailing (comps..., N)."""
    extra = coef_k.ndim - 1
    if extra <= 0:
        return jet * coef_k
    c = jet.coef.reshape(jet.coef.shape[0], *([1] * extra), jet.coef.shape[-1])
    return Jet(np.ascontiguousarray(c * coef_k), jet.nvars, jet.order)
