"""Small 3D tensor algebra with the cross-product conventions used throughout.

Layout: component axes lead, batch axes trail.  A vector field sampled at N
points is an array of shape (3, N), a second-order tensor (3, 3, N), a
third-order tensor (3, 3, 3, N).  All operations broadcast over trailing axes.

Conventions (pinned here, used by every module):

  (a x v)_ji = -eps_ilk a_jk v_l          second-order x vector -> second-order
  (a x b) v  = (a x (b^T v))^T            second-order x second-order -> third-order,
                                          stored so that (T v)_ij = T_ijk v_k
  hat(w) u   = w x u,  axial(hat(w)) = w  (hat(e3) = e2 o e1 - e1 o e2)
"""

from __future__ import annotations

import numpy as np

# Levi-Civita symbol as a lookup table plus its six nonzero entries.
EPS = np.zeros((3, 3, 3))
LEVI = [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0),
        (0, 2, 1, -1.0), (2, 1, 0, -1.0), (1, 0, 2, -1.0)]
for _i, _j, _k, _s in LEVI:
    EPS[_i, _j, _k] = _s

IDENTITY = np.eye(3)

SKEW_TOL = 1e-12


def identity(batch_shape=()) -> np.ndarray:
    out = np.zeros((3, 3, *batch_shape))
    for i in range(3):
        out[i, i] = 1.0
    return out


def vec_cross(u, v) -> np.ndarray:
    """(u x v)_i = eps_ijk u_j v_k."""
    u, v = np.asarray(u), np.asarray(v)
    return np.stack([
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ])


def dyad(u, v) -> np.ndarray:
    """(u o v)_ij = u_i v_j."""
    return np.einsum("i...,j...->ij...", np.asarray(u), np.asarray(v))


def transpose(a) -> np.ndarray:
    return np.swapaxes(np.asarray(a), 0, 1)


def trace(a) -> np.ndarray:
    a = np.asarray(a)
    return a[0, 0] + a[1, 1] + a[2, 2]


def sym(a) -> np.ndarray:
    return 0.5 * (np.asarray(a) + transpose(a))


def skw(a) -> np.ndarray:
    return 0.5 * (np.asarray(a) - transpose(a))


def _rank_of(a) -> int:
    r = 0
    for d in a.shape:
        if d == 3 and r < 3:
            r += 1
        else:
            break
    return r


def inner(a, b, rank: int | None = None) -> np.ndarray:
    """Full contraction over the leading component axes.

    Pass `rank` explicitly when a trailing batch axis could itself be 3.
    """
    a, b = np.asarray(a), np.asarray(b)
    comp = min(_rank_of(a), _rank_of(b)) if rank is None else rank
    idx = "ijk"[:comp]
    return np.einsum(f"{idx}...,{idx}...->...", a, b)


def norm(a, rank: int | None = None) -> np.ndarray:
    """Frobenius norm over the leading component axes."""
    a = np.asarray(a)
    r = _rank_of(a) if rank is None else rank
    axes = tuple(range(r))
    return np.sqrt((a * a).sum(axis=axes))


def mat_vec(a, v) -> np.ndarray:
    return np.einsum("ij...,j...->i...", np.asarray(a), np.asarray(v))


def mat_mat(a, b) -> np.ndarray:
    return np.einsum("ij...,jk...->ik...", np.asarray(a), np.asarray(b))


def hat(w) -> np.ndarray:
    """Skew tensor with axial vector w: hat(w) u = w x u."""
    w = np.asarray(w)
    return np.einsum("ikj,k...->ij...", EPS, w)


def axial(W, tol: float = SKEW_TOL) -> np.ndarray:
    """Axial vector of a skew tensor; errors if W is not skew-symmetric."""
    W = np.asarray(W)
    scale = max(float(np.max(np.abs(W))), 1.0)
    defect = float(np.max(np.abs(W + transpose(W))))
    if defect > tol * scale:
        raise ValueError(
            f"axial: tensor is not skew-symmetric (defect {defect:.3e}, tol {tol * scale:.3e})"
        )
    return 0.5 * np.stack([W[2, 1] - W[1, 2], W[0, 2] - W[2, 0], W[1, 0] - W[0, 1]])


def cross_mat_vec(a, v) -> np.ndarray:
    """(a x v)_ji = -eps_ilk a_jk v_l  (second-order a, vector v)."""
    return -np.einsum("ilk,jk...,l...->ji...", EPS, np.asarray(a), np.asarray(v))


def cross_mat_mat(a, b) -> np.ndarray:
    """Third-order T = a x b defined by T v = (a x (b^T v))^T.

    Stored with (T v)_ij = T_ijk v_k, i.e. T_ijm = -eps_ilk a_jk b_ml.
    """
    return -np.einsum("ilk,jk...,ml...->ijm...", EPS, np.asarray(a), np.asarray(b))


def third_apply(T, v) -> np.ndarray:
    """(T v)_ij = T_ijk v_k."""
    return np.einsum("ijk...,k...->ij...", np.asarray(T), np.asarray(v))
