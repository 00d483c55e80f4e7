"""Multi-index bookkeeping for truncated Taylor jets.

A jet stores Taylor coefficients c[alpha] = d^alpha f / alpha! for all
multi-indices with |alpha| <= order.  The enumeration is graded (all indices of
total degree m come before degree m+1), so the coefficient list of a lower
order is a prefix of the higher-order list and truncation is a slice.

Tables are built once per (nvars, order) pair and cached:
  - the index list and its position map,
  - the multiplication table (i, j, k) with alpha_i + alpha_j = alpha_k,
    sorted by k so both backends accumulate in the same order,
  - per-variable differentiation shifts (src, dst, factor).
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

# 1-variable jets go one order higher: arclength derivatives of curve
# quantities (curvature rate terms) need gamma'''' while surface/bulk
# chains stop at third derivatives.
MAX_ORDER = {1: 4, 2: 3, 3: 3}


def _graded_indices(nvars: int, order: int) -> list[tuple[int, ...]]:
    out = []
    for deg in range(order + 1):
        block = [a for a in itertools.product(range(deg + 1), repeat=nvars) if sum(a) == deg]
        block.sort(reverse=True)  # any fixed order works; keep it deterministic
        out.extend(block)
    return out


class JetTables:
    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        self.indices = _graded_indices(nvars, order)
        self.ncoeff = len(self.indices)
        self.position = {a: k for k, a in enumerate(self.indices)}
        self.degree = np.array([sum(a) for a in self.indices], dtype=np.intp)

        pairs = []
        for i, ai in enumerate(self.indices):
            for j, aj in enumerate(self.indices):
                s = tuple(x + y for x, y in zip(ai, aj))
                if sum(s) <= order:
                    pairs.append((i, j, self.position[s]))
        pairs.sort(key=lambda t: (t[2], t[0], t[1]))
        self.mul_i = np.array([p[0] for p in pairs], dtype=np.intp)
        self.mul_j = np.array([p[1] for p in pairs], dtype=np.intp)
        self.mul_k = np.array([p[2] for p in pairs], dtype=np.intp)
        # first table row of each k-group, for segmented reduction
        starts = [0]
        for r in range(1, len(pairs)):
            if pairs[r][2] != pairs[r - 1][2]:
                starts.append(r)
        self.mul_starts = np.array(starts, dtype=np.intp)

        # d/dx_v: coefficient of beta in the derivative is (beta_v + 1) * c[beta + e_v]
        self.deriv = []
        lower = _graded_indices(nvars, order - 1) if order > 0 else []
        for v in range(nvars):
            src, dst, fac = [], [], []
            for beta in lower:
                shifted = tuple(b + (1 if w == v else 0) for w, b in enumerate(beta))
                src.append(self.position[shifted])
                dst.append(len(dst))
                fac.append(beta[v] + 1)
            self.deriv.append(
                (np.array(src, dtype=np.intp), np.array(fac, dtype=np.float64))
            )

        # unit multi-index positions, for seeding variables
        self.var_pos = []
        for v in range(nvars):
            e = tuple(1 if w == v else 0 for w in range(nvars))
            self.var_pos.append(self.position[e] if order >= 1 else -1)


@lru_cache(maxsize=None)
def tables(nvars: int, order: int) -> JetTables:
    if nvars not in MAX_ORDER:
        raise ValueError(f"jets support 1-3 variables, got {nvars}")
    if not 0 <= order <= MAX_ORDER[nvars]:
        raise ValueError(
            f"order {order} out of range for {nvars} variables (max {MAX_ORDER[nvars]})"
        )
    return JetTables(nvars, order)


def ncoeff(nvars: int, order: int) -> int:
    return tables(nvars, order).ncoeff
