"""Compiled cell-tree walk for Cauchy integrals of self-similar measures.

The vectorised walk in :mod:`nevlab.measures` is general; this one does the
same traversal point by point with an explicit stack, which is much cheaper
when the evaluation points sit very close to the support.
"""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def cauchy_walk(zr, zi, ratios, offsets, probs, lo, hi, total, nodes, weights, kappa):
    n = zr.size
    k = ratios.size
    out_r = np.zeros(n)
    out_i = np.zeros(n)
    # depth is at most log(width / y) / log(1/ratio), below 2000 for y > 1e-300
    cap = 2000 * k
    s_shift = np.empty(cap)
    s_scale = np.empty(cap)
    s_mass = np.empty(cap)
    width = hi - lo
    for p in range(n):
        x = zr[p]
        y = zi[p]
        acc_r = 0.0
        acc_i = 0.0
        top = 0
        s_shift[0] = 0.0
        s_scale[0] = 1.0
        s_mass[0] = total
        top = 1
        while top > 0:
            top -= 1
            a = s_shift[top]
            s = s_scale[top]
            m = s_mass[top]
            half = 0.5 * s * width
            centre = a + s * lo + half
            dx = centre - x
            if dx * dx + y * y >= (kappa * half) ** 2:
                for j in range(nodes.size):
                    t = a + s * nodes[j]
                    u = t - x
                    d = u * u + y * y
                    w = m * weights[j]
                    acc_r += w * u / d
                    acc_i += w * y / d
            else:
                if top + k > cap:
                    raise RuntimeError("cell stack overflow")
                for j in range(k):
                    s_shift[top] = a + s * offsets[j]
                    s_scale[top] = s * ratios[j]
                    s_mass[top] = m * probs[j]
                    top += 1
        out_r[p] = acc_r
        out_i[p] = acc_i
    return out_r, out_i
