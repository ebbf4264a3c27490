"""Newton polygons of ghost series and the near-Steinberg vertex criterion.

Everything here is exact: ordinates are ``int`` or ``Fraction``, infinite
valuations are skipped, and the only comparisons are integer cross products.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .arith import INFINITY, wdiff_val
from .dims import GhostParams, dim_iw, dim_new, dim_ur, in_class, k_eps
from .errors import DomainError, ParameterError, UncertifiedTruncation
from .ghost import ghost_valuations

__all__ = [
    "NewtonPolygon",
    "DeltaProfile",
    "NSRange",
    "lower_chain",
    "lower_hull",
    "stretch",
    "ghost_polygon",
    "np_slopes",
    "certified_polygon",
    "delta_profile",
    "ns_range",
    "ns_candidates",
    "ns_ranges",
    "vertices_via_ns",
    "DEFAULT_CAP",
]

DEFAULT_CAP = 1 << 13


def _turns_up(o, a, b):
    """True when ``a`` lies strictly below the chord from ``o`` to ``b``."""
    return (a[1] - o[1]) * (b[0] - o[0]) < (b[1] - o[1]) * (a[0] - o[0])


def lower_chain(points):
    """Vertices of the lower convex hull of finite ``(x, y)`` points with distinct ``x``.

    Collinear interior points are dropped, so consecutive slopes strictly increase.
    """
    pts = sorted((x, Fraction(y)) for x, y in points)
    chain = []
    for pt in pts:
        while len(chain) >= 2 and not _turns_up(chain[-2], chain[-1], pt):
            chain.pop()
        chain.append(pt)
    return chain


@dataclass(frozen=True)
class NewtonPolygon:
    vertices: tuple

    def slopes(self):
        """Segment slopes repeated by segment width (the 1-indexed slope sequence)."""
        out = []
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            out.extend([(y1 - y0) / (x1 - x0)] * (x1 - x0))
        return tuple(out)

    @property
    def xs(self):
        return tuple(x for x, _ in self.vertices)

    @property
    def length(self):
        return self.vertices[-1][0]

    def __iter__(self):
        return iter(self.vertices)


def lower_hull(points) -> NewtonPolygon:
    """Newton polygon of ``(n, valuation)`` points; ``INFINITY`` points are ignored."""
    points = list(points)
    if not points:
        raise DomainError("lower_hull needs at least one point")
    xs = [x for x, _ in points]
    if len(set(xs)) != len(xs):
        raise DomainError("x coordinates must be distinct")
    if any(x < 0 for x in xs):
        raise DomainError("x coordinates must be nonnegative")
    finite = [(x, y) for x, y in points if y is not INFINITY]
    if not any(x == 0 for x, _ in finite):
        raise DomainError("a finite point at x = 0 is required")
    return NewtonPolygon(tuple(lower_chain(finite)))


def stretch(polygon: NewtonPolygon, m: int) -> NewtonPolygon:
    if not isinstance(m, int) or m < 1:
        raise ParameterError(f"stretch factor must be a positive integer, got {m!r}")
    return NewtonPolygon(tuple((m * x, m * y) for x, y in polygon.vertices))


def ghost_polygon(params: GhostParams, s_eps: int, eval_weight: int, n_max: int) -> NewtonPolygon:
    """Hull of the ghost points over ``[0, n_max]`` (no finality guarantee)."""
    vals = ghost_valuations(params, s_eps, eval_weight, n_max)
    return lower_hull(enumerate(vals))


# --- Delta profiles and near-Steinberg ranges --------------------------------


@dataclass(frozen=True)
class DeltaProfile:
    """``raw[l]`` is Delta'_{k,l}; ``hull[l]`` its lower convex envelope, for ``|l| <= d_new/2``."""

    k: int
    half_new: int
    raw: dict
    hull: dict
    gaps: tuple = ()

    def gap(self, l):
        """``hull[l] - hull[l-1]``."""
        return self.hull[l] - self.hull[l - 1]

    def raw_gap(self, l):
        return self.raw[l] - self.raw[l - 1]


def _interpolate(chain, xs):
    out = {}
    j = 0
    for x in xs:
        while j + 1 < len(chain) and chain[j + 1][0] < x:
            j += 1
        (x0, y0) = chain[j]
        if x0 == x:
            out[x] = y0
            continue
        (x1, y1) = chain[j + 1]
        out[x] = y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    return out


def delta_profile(params: GhostParams, s_eps: int, k: int) -> DeltaProfile:
    """Valuations of the hatted coefficients around ``d_iw(k)/2``, tilted by ``(k-2)/2`` per step."""
    return _delta_profile(GhostParams(params.p, params.a), s_eps, k)


@lru_cache(maxsize=16384)
def _delta_profile(params, s_eps, k):
    if k < 2 or not in_class(params, s_eps, k):
        raise DomainError(f"delta profile needs an in-class weight >= 2, got k={k}")
    iw = dim_iw(params, s_eps, k)
    half_new = dim_new(params, s_eps, k) // 2
    mid = iw // 2
    hat = ghost_valuations(params, s_eps, k, mid + half_new, hat=True)
    tilt = Fraction(k - 2, 2)
    raw = {l: hat[mid + l] - tilt * l for l in range(-half_new, half_new + 1)}
    chain = lower_chain(raw.items())
    hull = _interpolate(chain, range(-half_new, half_new + 1))
    # nondecreasing, since the hull is convex
    gaps = tuple(hull[l] - hull[l - 1] for l in range(1, half_new + 1))
    return DeltaProfile(k, half_new, raw, hull, gaps)


@dataclass(frozen=True)
class NSRange:
    """Open interval ``(d_iw/2 - L, d_iw/2 + L)``; ``L is None`` means empty."""

    k: int
    center: int
    L: int | None

    @property
    def empty(self):
        return self.L is None

    @property
    def bounds(self):
        if self.L is None:
            return None
        return (self.center - self.L, self.center + self.L)

    def __contains__(self, n):
        return self.L is not None and self.center - self.L < n < self.center + self.L

    def members(self):
        if self.L is None:
            return range(0)
        return range(self.center - self.L + 1, self.center + self.L)


def ns_range(params: GhostParams, s_eps: int, eval_weight: int, k: int) -> NSRange:
    """Near-Steinberg range of the pair ``(w_k', k)``."""
    prof = delta_profile(params, s_eps, k)
    center = dim_iw(params, s_eps, k) // 2
    if eval_weight == k:
        L = prof.half_new
    else:
        L = bisect_right(prof.gaps, wdiff_val(eval_weight, k, params.p))
    return NSRange(k, center, L or None)


def _ilog_ceil(x, p):
    """Smallest ``e >= 0`` with ``p**e >= x``."""
    e, q = 0, 1
    while q < x:
        q *= p
        e += 1
    return e


def ns_candidates(params: GhostParams, s_eps: int, eval_weight: int, upto: int):
    """In-class weights whose near-Steinberg range can meet ``[0, upto]``.

    The hull gaps satisfy ``gap(L) >= L``, so ``L <= v_p(w_k' - w_k) <= 1 + log_p|k' - k|``;
    a range with centre ``d_iw(k)/2`` beyond ``upto + L`` cannot reach ``upto``.
    The weight ``k'`` itself (infinite distance) is included when in class.
    """
    p = params.p
    out = []
    k = k_eps(params, s_eps)
    while dim_iw(params, s_eps, k) // 2 <= upto + 2 + _ilog_ceil(k + abs(eval_weight) + 1, p):
        out.append(k)
        k += p - 1
    if eval_weight >= 2 and in_class(params, s_eps, eval_weight) and eval_weight not in out:
        out.append(eval_weight)
    return out


def ns_ranges(params: GhostParams, s_eps: int, eval_weight: int, upto: int):
    """Nonempty near-Steinberg ranges among the candidates for ``[0, upto]``."""
    out = []
    for k in ns_candidates(params, s_eps, eval_weight, upto):
        r = ns_range(params, s_eps, eval_weight, k)
        if not r.empty:
            out.append(r)
    return out


def vertices_via_ns(params: GhostParams, s_eps: int, eval_weight: int, upto: int):
    """Indices in ``[0, upto]`` outside every near-Steinberg range."""
    if upto < 0:
        return frozenset()
    covered = set()
    for r in ns_ranges(params, s_eps, eval_weight, upto):
        covered.update(n for n in r.members() if 0 <= n <= upto)
    return frozenset(n for n in range(upto + 1) if n not in covered)


def certified_polygon(params: GhostParams, s_eps: int, eval_weight: int, upto: int, cap: int = DEFAULT_CAP):
    """Exact prefix of NP(G(w_k', -)) reaching at least ``x = upto``.

    The hull of the points left of a true vertex ``V`` is the true polygon up
    to ``V``; ``V`` is taken from the near-Steinberg criterion.  The window
    grows until such a ``V >= upto`` exists, or ``cap`` is exceeded.
    """
    n = max(2 * upto, 16)
    while n <= cap:
        verts = vertices_via_ns(params, s_eps, eval_weight, n)
        good = [v for v in verts if v >= upto]
        if good:
            v = min(good)
            vals = ghost_valuations(params, s_eps, eval_weight, v)
            return lower_hull(enumerate(vals))
        n *= 2
    raise UncertifiedTruncation(
        f"no certified vertex >= {upto} within [0, {cap}] for p={params.p}, a={params.a}, "
        f"s_eps={s_eps}, eval weight {eval_weight}"
    )


def np_slopes(params: GhostParams, s_eps: int, eval_weight: int, count: int, cap: int = DEFAULT_CAP):
    """First ``count`` slopes of NP(G(w_k', -)) as a tuple of ``Fraction``."""
    if count < 0:
        raise ParameterError(f"count must be >= 0, got {count}")
    if count == 0:
        return ()
    return certified_polygon(params, s_eps, eval_weight, count, cap).slopes()[:count]
