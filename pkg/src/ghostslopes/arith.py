"""Exact integer primitives: p-adic valuations, residues, weight-point distances."""

from __future__ import annotations

from functools import lru_cache
from typing import Union

from .errors import ParameterError

__all__ = ["INFINITY", "Valuation", "is_prime", "padic_val", "residue", "wdiff_val"]


class _Infinity:
    """The valuation of zero.  Absorbs addition, compares above every number."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("INFINITY")

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, other):
        if other == 0:
            raise ValueError("0 * INFINITY is undefined")
        return self

    __rmul__ = __mul__


INFINITY = _Infinity()

# A finite valuation is a plain int.
Valuation = Union[int, _Infinity]


@lru_cache(maxsize=256)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _check_prime(p):
    if not isinstance(p, int) or not is_prime(p):
        raise ParameterError(f"p must be a prime >= 2, got {p!r}")


def padic_val(n: int, p: int):
    """Largest ``e`` with ``p**e | n``; ``INFINITY`` for ``n == 0``."""
    _check_prime(p)
    if n == 0:
        return INFINITY
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def residue(x: int, m: int) -> int:
    """Representative of ``x`` modulo ``m`` in ``[0, m-1]``."""
    if m <= 0:
        raise ParameterError(f"modulus must be positive, got {m}")
    return x % m


def wdiff_val(k: int, l: int, p: int):
    """Valuation of ``w_k - w_l``, i.e. ``1 + v_p(k - l)``.

    With ``w_k = exp(p(k-2)) - 1`` we get ``w_k - w_l = exp(p(l-2))(exp(p(k-l)) - 1)``
    and the first factor is a unit.
    """
    return 1 + padic_val(k - l, p)
