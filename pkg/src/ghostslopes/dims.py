"""Relevant characters and closed-form dimensions of abstract form spaces.

A relevant character is carried around as its integer parameter ``s_eps`` in
``[0, p-2]``; together with a :class:`GhostParams` it determines everything.
All dimension functions take ``(params, s_eps, k)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import is_prime, residue
from .errors import DomainError, ParameterError

__all__ = [
    "GhostParams",
    "DimTriple",
    "check_char",
    "k_eps",
    "delta_eps",
    "in_class",
    "k_bullet",
    "dim_iw",
    "dim_ur",
    "dim_ur_raw",
    "dim_new",
    "dims",
    "relevant_chars",
]


@dataclass(frozen=True)
class GhostParams:
    """The residual type ``(p, a, b)``; ``1 <= a <= p-4``, ``0 <= b <= p-2``."""

    p: int
    a: int
    b: int = 0

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p) or self.p < 5:
            raise ParameterError(f"p must be a prime >= 5, got {self.p!r}")
        if not 1 <= self.a <= self.p - 4:
            raise ParameterError(f"a must lie in [1, p-4] = [1, {self.p - 4}], got {self.a}")
        if not 0 <= self.b <= self.p - 2:
            raise ParameterError(f"b must lie in [0, p-2] = [0, {self.p - 2}], got {self.b}")

    @property
    def strict(self) -> bool:
        """Whether ``p >= 11`` and ``2 <= a <= p-5`` (the main theorem's range)."""
        return self.p >= 11 and 2 <= self.a <= self.p - 5

    @property
    def theorem_range(self) -> bool:
        """``strict`` plus ``a`` even."""
        return self.strict and self.a % 2 == 0

    def as_tuple(self):
        return (self.p, self.a, self.b)


@dataclass(frozen=True)
class DimTriple:
    d_ur: int
    d_iw: int
    d_new: int


def check_char(params: GhostParams, s_eps: int) -> int:
    if not isinstance(s_eps, int) or not 0 <= s_eps <= params.p - 2:
        raise ParameterError(f"s_eps must lie in [0, p-2] = [0, {params.p - 2}], got {s_eps!r}")
    return s_eps


def relevant_chars(params: GhostParams):
    return range(params.p - 1)


def k_eps(params: GhostParams, s_eps: int) -> int:
    """Smallest weight ``2 + {a + 2 s_eps}`` of the congruence class attached to the character."""
    check_char(params, s_eps)
    return 2 + residue(params.a + 2 * s_eps, params.p - 1)


def delta_eps(params: GhostParams, s_eps: int) -> int:
    check_char(params, s_eps)
    p = params.p
    return (s_eps + residue(params.a + s_eps, p - 1)) // (p - 1)


def in_class(params: GhostParams, s_eps: int, k: int) -> bool:
    return (k - k_eps(params, s_eps)) % (params.p - 1) == 0


def k_bullet(params: GhostParams, s_eps: int, k: int) -> int:
    """``(k - k_eps) / (p-1)`` for in-class ``k``."""
    if not in_class(params, s_eps, k):
        raise DomainError(f"weight {k} is not congruent to k_eps={k_eps(params, s_eps)} mod {params.p - 1}")
    return (k - k_eps(params, s_eps)) // (params.p - 1)


def _check_weight(k):
    if k < 2:
        raise DomainError(f"weight must be >= 2, got {k}")


def dim_iw(params: GhostParams, s_eps: int, k: int) -> int:
    """Iwahori-level dimension for the character ``eps * (1 x omega^(2-k))``.

    Evaluated for every integer ``k >= 2``, in class or not.
    """
    check_char(params, s_eps)
    _check_weight(k)
    p, a = params.p, params.a
    raw = (k - 2 - s_eps) // (p - 1) + (k - 2 - residue(a + s_eps, p - 1)) // (p - 1) + 2
    return max(raw, 0)


def _t_pair(params, s_eps):
    p, a = params.p, params.a
    d = delta_eps(params, s_eps)
    if a + s_eps < p - 1:
        return s_eps + d, a + s_eps + d + 2
    return residue(a + s_eps, p - 1) + d + 1, s_eps + d + 1


def dim_ur_raw(params: GhostParams, s_eps: int, k: int) -> int:
    """The spherical-level formula before clamping; 0 off-class.

    Kept separate so sweeps can report the (so far never observed) weights
    where the formula would go negative.
    """
    _check_weight(k)
    if not in_class(params, s_eps, k):
        return 0
    kb = k_bullet(params, s_eps, k)
    t1, t2 = _t_pair(params, s_eps)
    p = params.p
    return (kb - t1) // (p + 1) + (kb - t2) // (p + 1) + 2


def dim_ur(params: GhostParams, s_eps: int, k: int) -> int:
    return max(dim_ur_raw(params, s_eps, k), 0)


def dim_new(params: GhostParams, s_eps: int, k: int) -> int:
    if not in_class(params, s_eps, k):
        raise DomainError(f"d_new is only defined in class; k={k}, k_eps={k_eps(params, s_eps)}")
    return dim_iw(params, s_eps, k) - 2 * dim_ur(params, s_eps, k)


def dims(params: GhostParams, s_eps: int, k: int) -> DimTriple:
    """All three dimensions at once; ``d_new`` is 0 off-class."""
    ur, iw = dim_ur(params, s_eps, k), dim_iw(params, s_eps, k)
    new = iw - 2 * ur if in_class(params, s_eps, k) else 0
    return DimTriple(ur, iw, new)
