"""Ghost-series multiplicities and p-adic valuations of ghost coefficients.

Only valuations at integer weight points ``w_k'`` are computed.  The
coefficient ``g_n`` is a product of ``(w - w_l)^{m_n(l)}`` over in-class
weights ``l``; as a function of ``n`` each multiplicity ``m_n(l)`` is a tent
that rises from 0 at ``n = d_ur(l)`` to ``d_new(l)/2`` at ``n = d_iw(l)/2``
and falls back to 0 at ``n = d_iw(l) - d_ur(l)``.  Valuation vectors over a
whole index range are accumulated through second differences of those
tents, so one evaluation costs ``O(#weights + n_max)``.

The module-level caches only memoize pure functions of their arguments;
concurrent callers at worst compute an entry twice.
"""

from __future__ import annotations

from bisect import bisect_left
from functools import lru_cache

from .arith import INFINITY, wdiff_val
from .dims import GhostParams, check_char, dim_iw, dim_ur, in_class, k_eps

__all__ = [
    "multiplicity",
    "support_bound",
    "class_weights",
    "ghost_valuations",
    "ghost_val",
    "ghost_val_hat",
]


def multiplicity(params: GhostParams, s_eps: int, n: int, k: int) -> int:
    """Order of vanishing of ``g_n`` at ``w_k``; zero off-class."""
    if k < 2 or not in_class(params, s_eps, k):
        return 0
    ur, iw = dim_ur(params, s_eps, k), dim_iw(params, s_eps, k)
    if ur < n < iw - ur:
        return min(n - ur, iw - ur - n)
    return 0


def support_bound(params: GhostParams, s_eps: int, n: int) -> int:
    """First in-class weight ``K`` with ``d_ur(l) >= n`` for every in-class ``l >= K``.

    ``d_ur`` is nondecreasing along the class, so ``m_n`` vanishes from ``K`` on.
    """
    k = k_eps(params, s_eps)
    while dim_ur(params, s_eps, k) < n:
        k += params.p - 1
    return k


def _core(params):
    # Nothing on the ghost side depends on b; share caches across it.
    return params if params.b == 0 else GhostParams(params.p, params.a)


def class_weights(params: GhostParams, s_eps: int, n_max: int):
    """``(l, d_ur(l), d_iw(l))`` for in-class ``l`` below ``support_bound(n_max)``.

    These are exactly the weights that can contribute to ``g_n`` for ``n <= n_max``.
    """
    return _class_weights(_core(params), s_eps, n_max)


_WEIGHT_LISTS = {}


def _class_weights(params, s_eps, n_max):
    # one growing list per (params, s_eps); d_ur is nondecreasing along the class
    key = (params, s_eps)
    rows = _WEIGHT_LISTS.get(key)
    if rows is None:
        check_char(params, s_eps)
        rows = _WEIGHT_LISTS[key] = []
    step = params.p - 1
    l = rows[-1][0] + step if rows else k_eps(params, s_eps)
    while not rows or rows[-1][1] < n_max:
        rows.append((l, dim_ur(params, s_eps, l), dim_iw(params, s_eps, l)))
        l += step
    end = bisect_left(rows, n_max, key=lambda r: r[1])
    return tuple(rows[:end])


def ghost_valuations(params: GhostParams, s_eps: int, eval_weight: int, n_max: int, hat: bool = False):
    """``v_p(g_n(w_k'))`` for ``n = 0..n_max`` as a tuple.

    With ``hat=True`` the factor at ``l = eval_weight`` is dropped, so every
    entry is finite; otherwise indices where ``g_n`` vanishes at ``w_k'`` get
    ``INFINITY``.
    """
    return _ghost_valuations(_core(params), s_eps, eval_weight, n_max, hat)


@lru_cache(maxsize=65536)
def _ghost_valuations(params, s_eps, eval_weight, n_max, hat):
    if n_max < 0:
        return ()
    p = params.p
    second = [0] * (n_max + 3)
    for l, ur, iw in class_weights(params, s_eps, n_max):
        if l == eval_weight:
            continue
        lo, hi = ur + 1, iw - ur - 1
        if lo > hi:
            continue
        w = wdiff_val(eval_weight, l, p)
        second[lo] += w
        second[min(iw // 2 + 1, n_max + 2)] -= 2 * w
        second[min(iw - ur + 1, n_max + 2)] += w
    vals = []
    slope = level = 0
    for n in range(n_max + 1):
        slope += second[n]
        level += slope
        vals.append(level)
    if not hat and eval_weight >= 2 and in_class(params, s_eps, eval_weight):
        ur = dim_ur(params, s_eps, eval_weight)
        iw = dim_iw(params, s_eps, eval_weight)
        for n in range(ur + 1, min(iw - ur - 1, n_max) + 1):
            vals[n] = INFINITY
    return tuple(vals)


def ghost_val(params: GhostParams, s_eps: int, n: int, eval_weight: int):
    """``v_p(g_n(w_k'))``; ``INFINITY`` exactly when ``m_n(k') > 0``."""
    if n < 0:
        raise ValueError(f"index must be >= 0, got {n}")
    return ghost_valuations(params, s_eps, eval_weight, n)[n]


def ghost_val_hat(params: GhostParams, s_eps: int, n: int, k: int) -> int:
    """Valuation of ``g_n / (w - w_k)^{m_n(k)}`` at ``w_k``."""
    if n < 0:
        raise ValueError(f"index must be >= 0, got {n}")
    return ghost_valuations(params, s_eps, k, n, hat=True)[n]
