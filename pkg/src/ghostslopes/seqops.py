"""Finite-sequence combinators used by the slope recursions.

Sequences are tuples of exact numbers, indexed from 1 in the docstrings (as
in ``v[1]`` for the first slope); Python-side indexing stays 0-based.
"""

from __future__ import annotations

from .errors import DomainError

__all__ = ["kappa", "concat", "pointwise_min", "add_scalar", "reflect", "truncate", "cut"]


def kappa(n, r):
    """Constant sequence of length ``n`` with value ``r``."""
    if n < 0:
        raise DomainError(f"length must be >= 0, got {n}")
    return (r,) * n


def concat(*seqs):
    out = ()
    for s in seqs:
        out += tuple(s)
    return out


def pointwise_min(a, b):
    if len(a) != len(b):
        raise DomainError(f"pointwise min of sequences of lengths {len(a)} and {len(b)}")
    return tuple(min(x, y) for x, y in zip(a, b))


def add_scalar(v, e):
    return tuple(x + e for x in v)


def reflect(e, v):
    """``e - v``: entry ``i`` is ``e - v[len(v) - i + 1]``."""
    return tuple(e - x for x in reversed(v))


def truncate(v, d):
    """First ``d`` entries; ``d`` may not exceed ``len(v)``."""
    if not 0 <= d <= len(v):
        raise DomainError(f"cannot truncate a length-{len(v)} sequence to {d}")
    return tuple(v[:d])


def cut(v, d1, d2):
    """Entries ``d1..d2`` inclusive (1-indexed).

    ``d1 == d2 + 1`` gives the empty sequence; other out-of-range requests raise.
    """
    if d1 == d2 + 1 and 1 <= d1 <= len(v) + 1:
        return ()
    if not (1 <= d1 <= len(v) and 1 <= d2 <= len(v)) or d1 > d2:
        raise DomainError(f"cannot cut [{d1}, {d2}] from a length-{len(v)} sequence")
    return tuple(v[d1 - 1 : d2])
