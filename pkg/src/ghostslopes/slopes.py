"""Recursive slope algorithms.

``SlopeRecursion`` is the character-indexed variant of Buzzard's algorithm:
the slopes at weight ``k`` are assembled from three strictly smaller weights
``k1, k2, k3`` (the last two possibly under twisted characters).
``BuzzardRecursion`` is the original algorithm over externally supplied
dimension tables, and ``classical_slopes`` is the twist-tracking wrapper for
classical forms.

Readings of the printed recursion that had to be fixed are collected in
:class:`Readings` so sweeps can compare them against the Newton polygon.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .arith import residue
from .dims import GhostParams, check_char, dim_iw, dim_ur, in_class
from .errors import DomainError, MissingDimension, ParameterError, RecursionInvariantError
from .seqops import add_scalar, concat, cut, kappa, pointwise_min, reflect, truncate

__all__ = [
    "XYZ",
    "Readings",
    "DEFAULT_READINGS",
    "PRINTED_CASE3_B",
    "CaseParams",
    "xyz_decompose",
    "case_params",
    "SlopeRecursion",
    "variant_slopes",
    "DimProvider",
    "BuzzardRecursion",
    "buzzard_original",
    "classical_slopes",
]


@dataclass(frozen=True)
class XYZ:
    x: int
    y: int
    z: int


def xyz_decompose(p: int, k: int) -> XYZ:
    """``p^x < k-1 <= p^(x+1)``, ``p^x y < k-1 <= p^x (y+1)``, ``z = 1 + floor((k-2-p^x y)/p^(x-1))``."""
    if k < p + 3:
        raise DomainError(f"weight {k} is below k_min = p+3 = {p + 3}; use the base cases")
    x, px = 1, p
    while not k - 1 <= px * p:
        x += 1
        px *= p
    y = (k - 2) // px
    z = 1 + (k - 2 - px * y) // (px // p)
    assert px * y < k - 1 <= px * (y + 1) and 1 <= z <= p
    return XYZ(x, y, z)


@dataclass(frozen=True)
class Readings:
    """How to read the two places where the printed case 3 is inconsistent.

    ``case3_b_plus_one``: use ``B = p^x(p-1) + 1`` (so that ``e + 1 = k1``)
    instead of the printed ``B = p^x(p-1)``.
    ``case3_branch_a_printed``: use the printed ``V = sigma(v1, s-1-l(v1))``
    instead of ``sigma(v1, s-1)`` in the first branch of case 3.
    """

    case3_b_plus_one: bool = True
    case3_branch_a_printed: bool = False

    @property
    def label(self):
        parts = []
        if not self.case3_b_plus_one:
            parts.append("printed-case3-b")
        if self.case3_branch_a_printed:
            parts.append("printed-case3-branch-a")
        return "+".join(parts) or "default"


DEFAULT_READINGS = Readings()
PRINTED_CASE3_B = Readings(case3_b_plus_one=False)


@dataclass(frozen=True)
class CaseParams:
    case_id: int
    xyz: XYZ
    t: int
    k1: int
    k2: int
    k3: int
    B: int
    e: int
    s: int
    s2: int | None
    e2: int | None
    char1: int
    char2: int
    char3: int


def case_params(params: GhostParams, s_eps: int, k: int, readings: Readings = DEFAULT_READINGS) -> CaseParams:
    """Recursion data for weight ``k >= p+3``."""
    check_char(params, s_eps)
    p, a = params.p, params.a
    xyz = xyz_decompose(p, k)
    x, y, z = xyz.x, xyz.y, xyz.z
    q = p ** (x - 1)
    t = k - 1 - y * p**x - (z - 1) * q
    s2 = e2 = None
    if y + z <= p - 1:
        case_id = 1
        k1 = k - y * (p - 1) * q
        k2 = k - (y - 1) * (p - 1) * q - 2 * (y + z - 1) * q
        if k2 != (p - y - z) * q + t + 1:
            raise RecursionInvariantError(f"two forms of k2 disagree at k={k}: {k2} vs {(p - y - z) * q + t + 1}")
        B = p**x * y + q * (z - 1) + 1
        e = k - B
        char2 = residue(e - 1 - a - s_eps, p - 1)
    else:
        if y < p - 1:
            case_id = 2
            k1 = k - (y + 1) * q * (p - 1)
            B = (y + 1) * q * (p - 1) + 1
        else:
            case_id = 3
            k1 = k - p**x * (p - 1)
            B = p**x * (p - 1) + (1 if readings.case3_b_plus_one else 0)
        k2 = k - q * (p - 1)
        e = k - B
        char2 = s_eps
    s = 1 + dim_iw(params, s_eps, e + 1)
    if case_id != 1:
        s2, e2 = (s - 1) // 2, e // 2
    k3 = 2 * B - k
    for name, w in (("k1", k1), ("k2", k2), ("k3", k3)):
        if not 2 <= w < k:
            raise RecursionInvariantError(f"derived weight {name}={w} outside [2, {k}) at k={k}")
    return CaseParams(case_id, xyz, t, k1, k2, k3, B, e, s, s2, e2, s_eps, char2, residue(s_eps - e, p - 1))


class SlopeRecursion:
    """Memoized evaluation of the variant slope recursion for one ``(p, a)``.

    ``t(s_eps, k)`` is the internal sequence (``t_2`` has the Iwahori length);
    ``slopes(s_eps, k)`` is the published one.  Entries are integers.
    """

    def __init__(self, params: GhostParams, readings: Readings = DEFAULT_READINGS, memo: bool = True, allow_odd: bool = False):
        self.params = params
        self.readings = readings
        self.allow_odd = allow_odd
        self.memo = {} if memo else None

    def t(self, s_eps, k, _path=()):
        if self.memo is not None:
            hit = self.memo.get((s_eps, k))
            if hit is not None:
                return hit
        out = self._compute(s_eps, k, _path + ((s_eps, k),))[0]
        if self.memo is not None:
            self.memo.setdefault((s_eps, k), out)
        return out

    def _compute(self, s_eps, k, path):
        params, p = self.params, self.params.p
        if k < 2:
            raise RecursionInvariantError(f"weight {k} < 2 reached", path)
        if k % 2 and not self.allow_odd:
            raise RecursionInvariantError(f"odd weight {k} reached", path)
        if not in_class(params, s_eps, k):
            return (), None
        if k == 2:
            return kappa(dim_iw(params, s_eps, 2) - dim_ur(params, s_eps, 2), 0), None
        if k < p + 3:
            return kappa(dim_ur(params, s_eps, k), 0), None
        try:
            cp = case_params(params, s_eps, k, self.readings)
        except RecursionInvariantError as exc:
            raise RecursionInvariantError(str(exc), path) from None
        v1 = self.t(cp.char1, cp.k1, path)
        v2 = self.t(cp.char2, cp.k2, path)
        e, s = cp.e, cp.s
        try:
            if cp.case_id == 1:
                if len(v1) >= s - 1:
                    V = truncate(v1, s - 1)
                else:
                    V = concat(v1, reflect(e, truncate(v2, s - 1 - len(v1))))
            else:
                V = self._ladder(cp, v1, v2)
            v3 = self.t(cp.char3, cp.k3, path)
            full = concat(V, add_scalar(v3, e))
            d = dim_ur(params, s_eps, k)
            if len(full) < d:
                raise RecursionInvariantError(f"assembled length {len(full)} < d_ur = {d}", path)
            out = truncate(full, d)
        except DomainError as exc:
            raise RecursionInvariantError(f"sequence operation failed: {exc}", path) from None
        return out, {"case": cp, "v1": v1, "v2": v2, "V": V, "v3": v3, "output": out}

    def _ladder(self, cp, v1, v2):
        e, s, s2, e2 = cp.e, cp.s, cp.s2, cp.e2
        l1 = len(v1)
        if l1 >= s - 1:
            if cp.case_id == 3 and self.readings.case3_branch_a_printed:
                return truncate(v1, s - 1 - l1)
            return truncate(v1, s - 1)
        if s - 1 <= 2 * l1 < 2 * (s - 1):
            return concat(v1, reflect(e, truncate(v1, s - 1 - l1)))
        w0 = cut(v2, l1 + 1, s2)
        if cp.case_id == 2:
            w = pointwise_min(w0, kappa(len(w0), e2))
        else:
            w = pointwise_min(add_scalar(w0, 1), kappa(len(w0), e2))
        middle = (e2,) if s % 2 == 0 else ()
        return concat(v1, w, middle, reflect(e - 1, w), reflect(e, v1))

    def slopes(self, s_eps, k):
        """The slope sequence at weight ``k`` as ``Fraction`` entries."""
        check_char(self.params, s_eps)
        if k < 2:
            raise DomainError(f"weight must be >= 2, got {k}")
        if k % 2 and not self.allow_odd:
            raise DomainError(f"weight must be even, got {k}")
        if k == 2:
            return tuple(Fraction(0) for _ in range(dim_ur(self.params, s_eps, 2)))
        return tuple(Fraction(v) for v in self.t(s_eps, k))

    def trace(self, s_eps, k):
        """Top-level intermediates for weight ``k`` (``None`` in base cases)."""
        return self._compute(s_eps, k, ((s_eps, k),))[1]

    # memo persistence -------------------------------------------------------

    def export_memo(self):
        return sorted([s, k, list(v)] for (s, k), v in (self.memo or {}).items())

    def load_memo(self, entries):
        if self.memo is None:
            return
        for s, k, v in entries:
            self.memo.setdefault((s, k), tuple(v))


@lru_cache(maxsize=64)
def _engine(params, readings, allow_odd):
    return SlopeRecursion(params, readings, allow_odd=allow_odd)


def variant_slopes(params: GhostParams, s_eps: int, k: int, readings: Readings = DEFAULT_READINGS, allow_odd: bool = False):
    """Slopes of weight ``k`` for the character ``s_eps`` from the variant recursion."""
    return _engine(GhostParams(params.p, params.a), readings, allow_odd).slopes(s_eps, k)


def classical_slopes(p: int, a: int, b: int, k: int):
    """Slopes on the classical ``r``-component: the character ``1 x omega^(a+2b)``, i.e. ``s_eps = b``."""
    params = GhostParams(p, a, b)
    if (k - (a + 2 * b + 2)) % (p - 1):
        raise DomainError(f"k={k} is not congruent to a+2b+2={a + 2 * b + 2} mod {p - 1}")
    return variant_slopes(params, residue(b, p - 1), k)


# --- Buzzard's original recursion ---------------------------------------------


@dataclass
class DimProvider:
    """Dimension data for the original recursion.

    ``d(k)``, ``dp(k)`` are the level ``N`` and ``Np`` cusp form dimensions,
    ``dpeps(k, j)`` the dimension with nebentypus ``chi^j``; ``m`` is the
    number of cusps.  Missing entries raise :class:`MissingDimension`.
    """

    d: Callable[[int], int]
    dp: Callable[[int], int]
    dpeps: Callable[[int, int], int]
    m: int = 0
    source: str = field(default="", repr=False)

    @classmethod
    def from_tables(cls, d, dp, dpeps=None, m=0, source="table"):
        dpeps = dict(dpeps or {})

        def look(table, key, what):
            try:
                return table[key]
            except KeyError:
                raise MissingDimension(f"no {what} entry for {key}") from None

        return cls(
            lambda k: look(d, k, "d(k)"),
            lambda k: look(dp, k, "d_p(k)"),
            lambda k, j: look(dpeps, (k, j), "d_p,eps(k)"),
            m,
            source,
        )

    @classmethod
    def parse(cls, text, source="<text>"):
        """Read the comma-separated table format.

        ``m=<int>`` sets the cusp count; ``k,d,dp`` rows give dimensions; rows
        after a ``[eps]`` line are ``k,j,dpeps`` with ``j`` the exponent of
        the nebentypus.  ``#`` starts a comment.
        """
        d, dp, dpeps, m = {}, {}, {}, 0
        section = "dims"
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.lower() in ("[eps]", "[dims]"):
                section = line.lower()[1:-1]
                continue
            mm = re.fullmatch(r"m\s*=\s*(-?\d+)", line)
            if mm:
                m = int(mm.group(1))
                continue
            fields = [f.strip() for f in line.split(",")]
            if len(fields) != 3 or not all(re.fullmatch(r"-?\d+", f) for f in fields):
                raise ParameterError(f"{source}:{lineno}: expected three comma-separated integers, got {raw!r}")
            k, u, v = map(int, fields)
            if section == "dims":
                d[k], dp[k] = u, v
            else:
                dpeps[(k, u)] = v
        if m < 0:
            raise ParameterError(f"{source}: cusp count must be >= 0")
        return cls.from_tables(d, dp, dpeps, m, source)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.parse(fh.read(), source=str(path))

    @classmethod
    def from_ghost(cls, params: GhostParams, s_eps: int):
        """Abstract dimensions of a single character, no cusps."""
        return cls(
            lambda k: dim_ur(params, s_eps, k),
            lambda k: dim_iw(params, s_eps, k),
            lambda k, j: dim_iw(params, s_eps, k),
            0,
            f"ghost(p={params.p}, a={params.a}, s_eps={s_eps})",
        )


class BuzzardRecursion:
    """The original recursion, reproduced with its cusp paddings.

    Case 3 keeps the printed ``B = p^x (p-1)``; its first branch uses
    ``sigma(v1, s-1)``.  ``v3`` is ``t_{2B-k}``.
    """

    def __init__(self, dims: DimProvider, p: int):
        self.dims, self.p = dims, p
        self.memo = {}

    def t(self, k):
        if k in self.memo:
            return self.memo[k]
        try:
            out = self._compute(k)
        except DomainError as exc:
            raise RecursionInvariantError(f"sequence operation failed at k={k}: {exc}") from None
        self.memo[k] = out
        return out

    def _compute(self, k):
        p, D = self.p, self.dims
        if k < 2 or k % 2:
            raise RecursionInvariantError(f"weight {k} reached in the original recursion")
        if k == 2:
            return kappa(D.dp(2) - D.d(2), 0)
        if k < p + 3:
            return kappa(D.d(k), 0)
        xyz = xyz_decompose(p, k)
        x, y, z = xyz.x, xyz.y, xyz.z
        q = p ** (x - 1)
        m = D.m
        if y + z <= p - 1:
            k1 = k - y * (p - 1) * q
            k2 = k - (y - 1) * (p - 1) * q - 2 * (y + z - 1) * q
            B = p**x * y + q * (z - 1) + 1
            e = k - B
            s = 1 + D.dpeps(1 + e, residue(1 - B, p - 1))
            v1, v2 = self.t(k1), self.t(k2)
            if len(v1) >= s - 1:
                V1 = truncate(v1, s - 1)
            else:
                V1 = concat(v1, reflect(e, truncate(v2, s - 1 - len(v1))))
            V = concat(V1, kappa(m, e))
        else:
            if y < p - 1:
                k1 = k - (y + 1) * q * (p - 1)
                B = (y + 1) * q * (p - 1) + 1
            else:
                k1 = k - p**x * (p - 1)
                B = p**x * (p - 1)
            k2 = k - q * (p - 1)
            e = k - B
            s = 1 + D.dp(1 + e)
            s2, e2 = (s - 1) // 2, e // 2
            v1, v2 = self.t(k1), self.t(k2)
            l1 = len(v1)
            if l1 >= s - 1:
                V1 = truncate(v1, s - 1)
            elif s - 1 <= 2 * l1 < 2 * (s - 1):
                V1 = concat(v1, reflect(e, truncate(v1, s - 1 - l1)))
            else:
                w = cut(v2, l1 + 1, s2)
                if y == p - 1:
                    w = pointwise_min(add_scalar(w, 1), kappa(len(w), e2))
                middle = (e2,) if s % 2 == 0 else ()
                V1 = concat(v1, w, middle, reflect(e - 1, w), reflect(e, v1))
            V = concat(V1, kappa(max(m - 1, 0), 1)) if e == 1 else concat(V1, kappa(m, e))
        v3 = self.t(2 * B - k)
        full = concat(V, add_scalar(v3, e))
        if len(full) < D.d(k):
            raise RecursionInvariantError(f"assembled length {len(full)} < d(k) = {D.d(k)} at k={k}")
        return truncate(full, D.d(k))

    def slopes(self, k):
        if k == 2:
            return kappa(self.dims.d(2), Fraction(0))
        return tuple(Fraction(v) for v in self.t(k))


def buzzard_original(dims: DimProvider, p: int, k: int):
    if k < 2 or k % 2:
        raise DomainError(f"weight must be even and >= 2, got {k}")
    return BuzzardRecursion(dims, p).slopes(k)
