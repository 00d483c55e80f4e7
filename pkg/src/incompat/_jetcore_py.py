"""Pure-numpy jet kernels (fallback backend).

Same contract as the Cython module `_jetcore`: truncated-product of Taylor
coefficient blocks.  Accumulation order over the multiplication table matches
the compiled kernel (table sorted by output index, then input indices), so the
two backends agree bit for bit.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def mul_coeffs(a, b, mul_i, mul_j, mul_k, mul_starts, nc_out):
    """c[k] = sum over table of a[i] * b[j].

    a : (nca, M) float64, b : (ncb, M) float64 -> (nc_out, M)
    """
    prod = a[mul_i] * b[mul_j]
    out = np.add.reduceat(prod, mul_starts, axis=0)
    if out.shape[0] != nc_out:  # only if some k had no pairs; cannot happen
        full = np.zeros((nc_out, a.shape[1]), dtype=np.float64)
        full[mul_k[mul_starts]] = out
        return full
    return np.ascontiguousarray(out)
