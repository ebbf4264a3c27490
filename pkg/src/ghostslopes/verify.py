"""Executable checks of the structural identities, and the sweep driver.

Every check returns a :class:`CheckReport`; exceptions inside a check become
``fail`` reports carrying the error text.  Sweeps fan out over
``(suite, p, a, b, s_eps)`` tasks and return reports in task order, so the
output does not depend on the number of worker processes.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .arith import INFINITY, residue
from .dims import GhostParams, dim_iw, dim_ur, dim_ur_raw, in_class, k_eps
from .ghost import ghost_valuations, multiplicity
from .newton import certified_polygon, delta_profile, lower_chain, np_slopes, ns_ranges, vertices_via_ns
from .slopes import DEFAULT_READINGS, Readings, case_params, classical_slopes, variant_slopes

__all__ = [
    "CheckReport",
    "SweepConfig",
    "SUITES",
    "check_main",
    "check_base",
    "check_theta",
    "check_atkin_lehner",
    "check_pstab",
    "check_ghost_duality",
    "check_delta_gaps",
    "check_transfer_lemmas",
    "check_ns",
    "log_bound_holds",
    "sweep",
    "summarize",
    "reading_outcome",
]

STATUSES = ("pass", "fail", "skipped", "noted")


def _exact(v):
    if v is INFINITY:
        return "inf"
    if isinstance(v, (list, tuple)):
        return [_exact(x) for x in v]
    if isinstance(v, Fraction):
        return str(v)
    return v


@dataclass(frozen=True)
class CheckReport:
    """One verdict.  ``status`` is ``pass``, ``fail``, ``skipped`` or ``noted``.

    ``noted`` marks a mismatch outside the hypotheses of the statement being
    checked (odd ``a``): recorded, never counted as a failure.
    """

    suite: str
    params: dict
    status: str
    witness: dict | None = None
    detail: str = ""

    def to_json(self):
        rec = {
            "suite": self.suite,
            "params": self.params,
            "status": self.status,
            "witness": None if self.witness is None else {k: _exact(v) for k, v in self.witness.items()},
            "detail": self.detail,
        }
        return json.dumps(rec, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, line):
        rec = json.loads(line)
        return cls(rec["suite"], rec["params"], rec["status"], rec["witness"], rec["detail"])

    @property
    def ok(self):
        return self.status != "fail"


def _report(suite, params, s_eps, status, witness=None, detail="", **extra):
    tup = {"p": params.p, "a": params.a, "b": params.b, "s_eps": s_eps}
    tup.update(extra)
    if witness is not None:
        witness = {k: _exact(v) for k, v in witness.items()}
    return CheckReport(suite, tup, status, witness, detail)


def _first_diff(a, b):
    for i, (x, y) in enumerate(zip(a, b), 1):
        if x != y:
            return i
    return None if len(a) == len(b) else min(len(a), len(b)) + 1


# --- individual checks ----------------------------------------------------------


def check_main(params, s_eps, k, readings: Readings = DEFAULT_READINGS):
    """Recursive slopes against the first ``d_ur(k)`` Newton polygon slopes."""
    in_hyp = params.a % 2 == 0
    d = dim_ur(params, s_eps, k)
    extra = {"k": k}
    if readings != DEFAULT_READINGS:
        extra["reading"] = readings.label
    rec = variant_slopes(params, s_eps, k, readings=readings, allow_odd=not in_hyp)
    ghost = np_slopes(params, s_eps, k, d)
    notes = []
    if dim_ur_raw(params, s_eps, k) < 0:
        notes.append(f"d_ur clamped from {dim_ur_raw(params, s_eps, k)}")
    if s_eps == params.b and readings == DEFAULT_READINGS and in_hyp:
        if classical_slopes(params.p, params.a, params.b, k) != rec:
            return _report("main", params, s_eps, "fail", {"classical": classical_slopes(params.p, params.a, params.b, k), "recursive": rec},
                           "classical wrapper disagrees", **extra)
    i = _first_diff(rec, ghost)
    if i is None:
        return _report("main", params, s_eps, "pass", detail="; ".join(notes), **extra)
    witness = {"index": i, "recursive": rec, "np": ghost}
    return _report("main", params, s_eps, "fail" if in_hyp else "noted", witness,
                   "" if in_hyp else "a odd: outside the theorem's hypothesis", **extra)


def check_base(params, s_eps, k):
    """For in-class ``k <= p+1`` the first ``d_ur(k)`` slopes vanish."""
    d = dim_ur(params, s_eps, k)
    got = np_slopes(params, s_eps, k, d)
    if all(v == 0 for v in got) and len(got) == d:
        return _report("base", params, s_eps, "pass", k=k)
    return _report("base", params, s_eps, "fail", {"np": got, "d_ur": d}, k=k)


def check_theta(params, s_eps, k0, L=10):
    """``v_k0[d + l] = v'_{2-k0}[l] + k0 - 1`` for ``l = 1..L``, ``s' = {s + 1 - k0}``."""
    s_dual = residue(s_eps + 1 - k0, params.p - 1)
    if L <= 0:
        return _report("theta", params, s_eps, "pass", detail="vacuous", k0=k0, L=L)
    d = dim_iw(params, s_eps, k0)
    left = np_slopes(params, s_eps, k0, d + L)
    right = np_slopes(params, s_dual, 2 - k0, L)
    for l in range(1, L + 1):
        if left[d + l - 1] != right[l - 1] + k0 - 1:
            return _report("theta", params, s_eps, "fail",
                           {"l": l, "lhs": left[d + l - 1], "rhs": right[l - 1] + k0 - 1, "d": d}, k0=k0, L=L)
    return _report("theta", params, s_eps, "pass", k0=k0, L=L)


def check_atkin_lehner(params, s_eps, k0):
    """``v_k0[l] + v''_k0[d-l+1] = k0 - 1`` for off-class ``k0``, ``s'' = {k0 - 2 - a - s}``."""
    if in_class(params, s_eps, k0):
        return _report("atkin-lehner", params, s_eps, "skipped", detail="k0 is in class", k0=k0)
    s_al = residue(k0 - 2 - params.a - s_eps, params.p - 1)
    d = dim_iw(params, s_eps, k0)
    if d == 0:
        return _report("atkin-lehner", params, s_eps, "pass", detail="vacuous", k0=k0)
    v = np_slopes(params, s_eps, k0, d)
    w = np_slopes(params, s_al, k0, d)
    for l in range(1, d + 1):
        if v[l - 1] + w[d - l] != k0 - 1:
            return _report("atkin-lehner", params, s_eps, "fail",
                           {"l": l, "v": v[l - 1], "v_dual": w[d - l], "d": d}, k0=k0)
    return _report("atkin-lehner", params, s_eps, "pass", k0=k0)


def check_pstab(params, s_eps, k0):
    """``v_k0[l] + v_k0[d-l+1] = k0 - 1`` for in-class ``k0`` and ``l <= d_ur(k0)``."""
    if k0 < 2 or not in_class(params, s_eps, k0):
        return _report("pstab", params, s_eps, "skipped", detail="k0 is off class", k0=k0)
    d, ur = dim_iw(params, s_eps, k0), dim_ur(params, s_eps, k0)
    if ur == 0:
        return _report("pstab", params, s_eps, "pass", detail="vacuous", k0=k0)
    v = np_slopes(params, s_eps, k0, d)
    for l in range(1, ur + 1):
        if v[l - 1] + v[d - l] != k0 - 1:
            return _report("pstab", params, s_eps, "fail", {"l": l, "v_l": v[l - 1], "v_mirror": v[d - l], "d": d}, k0=k0)
    return _report("pstab", params, s_eps, "pass", k0=k0)


def check_ghost_duality(params, s_eps, k0):
    """Symmetry of the tilted hatted valuations about ``d_iw(k0)/2``."""
    if k0 < 2 or not in_class(params, s_eps, k0):
        return _report("duality", params, s_eps, "skipped", detail="k0 is off class", k0=k0)
    prof = delta_profile(params, s_eps, k0)
    mid = dim_iw(params, s_eps, k0) // 2
    hat = ghost_valuations(params, s_eps, k0, mid + prof.half_new, hat=True)
    for l in range(0, prof.half_new + 1):
        if prof.raw[l] != prof.raw[-l]:
            return _report("duality", params, s_eps, "fail", {"l": l, "raw_l": prof.raw[l], "raw_minus_l": prof.raw[-l]}, k0=k0)
        if hat[mid + l] - hat[mid - l] != (k0 - 2) * l:
            return _report("duality", params, s_eps, "fail",
                           {"l": l, "difference": hat[mid + l] - hat[mid - l], "expected": (k0 - 2) * l}, k0=k0)
    return _report("duality", params, s_eps, "pass", detail="vacuous" if prof.half_new == 0 else "", k0=k0)


def _ceil_sqrt(num, den):
    """Smallest integer ``u >= 0`` with ``u^2 den >= num``."""
    u = math.isqrt(num // den)
    while u * u * den < num:
        u += 1
    while u > 0 and (u - 1) * (u - 1) * den >= num:
        u -= 1
    return u


def _floor_sqrt(num, den):
    u = math.isqrt(num // den)
    while (u + 1) * (u + 1) * den <= num:
        u += 1
    return u


def log_bound_holds(diff, l, p, max_bits=12):
    """Exact test of ``diff <= 3 (log l / log p)^2``.

    Equivalent to ``p^sqrt(diff/3) <= l``.  ``sqrt(diff/3)`` is bracketed by
    dyadic rationals ``u / 2^j``, and ``p^(u/2^j) <= l`` is decided as
    ``p^u <= l^(2^j)``.  Returns ``None`` if undecided after ``max_bits``
    refinements (only possible when the two sides are within ``2^-max_bits``).
    """
    diff = Fraction(diff)
    if diff <= 0:
        return True
    if l <= 1:
        return False
    r = diff / 3
    for j in range(max_bits + 1):
        scale = 1 << j
        num, den = r.numerator * scale * scale, r.denominator
        hi, lo = _ceil_sqrt(num, den), _floor_sqrt(num, den)
        lpow = l**scale
        if p**hi <= lpow:
            return True
        if p**lo > lpow:
            return False
    return None


def check_delta_gaps(params, s_eps, k):
    """Lower bounds on raw and hull gaps, and the raw-minus-hull deviation bound."""
    if k < 2 or not in_class(params, s_eps, k):
        return _report("gaps", params, s_eps, "skipped", detail="k is off class", k=k)
    p = params.p
    prof = delta_profile(params, s_eps, k)
    for l in range(1, prof.half_new + 1):
        raw_gap = prof.raw_gap(l)
        bound = Fraction(3, 2) + Fraction(p - 1, 2) * (l - 1)
        if raw_gap < bound:
            return _report("gaps", params, s_eps, "fail", {"lemma": "raw-gap", "l": l, "gap": raw_gap, "bound": bound}, k=k)
        dev = prof.raw[l] - prof.hull[l]
        verdict = log_bound_holds(dev, l, p)
        if not verdict:
            return _report("gaps", params, s_eps, "fail",
                           {"lemma": "deviation", "l": l, "deviation": dev, "undecided": verdict is None}, k=k)
        if l < 2 * p:
            if (l != p and dev != 0) or (l == p and dev > 1):
                return _report("gaps", params, s_eps, "fail", {"lemma": "deviation-small-l", "l": l, "deviation": dev}, k=k)
        if prof.gap(l) < l:
            return _report("gaps", params, s_eps, "fail", {"lemma": "hull-gap", "l": l, "gap": prof.gap(l)}, k=k)
    return _report("gaps", params, s_eps, "pass", detail="vacuous" if prof.half_new == 0 else "", k=k)


def _is_vertex(params, s_eps, eval_weight, n):
    return n in certified_polygon(params, s_eps, eval_weight, n).xs


def _on_polygon(params, s_eps, eval_weight, n):
    """Whether the ghost point at ``n`` lies on the Newton polygon (vertex or not)."""
    poly = certified_polygon(params, s_eps, eval_weight, n)
    y = ghost_valuations(params, s_eps, eval_weight, n)[n]
    for (x0, y0), (x1, y1) in zip(poly.vertices, poly.vertices[1:]):
        if x0 <= n <= x1:
            return y == y0 + (y1 - y0) * (n - x0) / (x1 - x0)
    return n == 0


def _ghost_at(params, s_eps, eval_weight, n_max):
    return ghost_valuations(params, s_eps, eval_weight, n_max)


def check_transfer_lemmas(params, s_eps, k):
    """The valuation-transfer statements used in the inductive step at weight ``k``.

    Each sub-check is named by what it compares; the first failing one is
    returned as the witness.
    """
    p = params.p
    if k < p + 3 or not in_class(params, s_eps, k):
        return _report("transfer", params, s_eps, "skipped", detail="needs in-class k >= p+3", k=k)
    cp = case_params(params, s_eps, k)
    k1, k2, e = cp.k1, cp.k2, cp.e
    ur = lambda s, w: dim_ur(params, s, w)  # noqa: E731
    iw = lambda s, w: dim_iw(params, s, w)  # noqa: E731
    checks = []

    def fail(name, **w):
        return _report("transfer", params, s_eps, "fail", {"lemma": name, **w}, k=k, case=cp.case_id)

    skipped = 0

    def compare(name, ns, lhs, rhs, shift=lambda n: 0):
        # indices where g_n vanishes at either weight carry no slope information
        nonlocal skipped
        for n in ns:
            if lhs[n] is INFINITY or rhs[n] is INFINITY:
                skipped += 1
                continue
            if lhs[n] != rhs[n] + shift(n):
                return fail(name, n=n, lhs=lhs[n], rhs=rhs[n], shift=shift(n))
        checks.append(name)
        return None

    top = max(iw(s_eps, k1), iw(s_eps, e + 1), ur(s_eps, k2), ur(s_eps, k)) + 1
    at_k = _ghost_at(params, s_eps, k, top)
    at_k1 = _ghost_at(params, s_eps, k1, top)

    if cp.case_id == 1:
        s2 = cp.char2
        n2 = ur(s2, k2)
        bad = (
            compare("prefix-at-k1", range(ur(s_eps, k1) + 1), at_k, at_k1)
            or compare("prefix-at-e+1", range(iw(s_eps, e + 1) + 1), at_k, _ghost_at(params, s_eps, e + 1, top))
            or compare("twisted-prefix-k2", range(n2 + 1), _ghost_at(params, s2, k2, n2), _ghost_at(params, s2, e + 1, n2))
        )
    else:
        lo, hi = ur(s_eps, k1), iw(s_eps, k1) - ur(s_eps, k1)
        at_k2 = _ghost_at(params, s_eps, k2, top)
        outer = [n for n in range(iw(s_eps, k1) + 1) if not lo < n < hi]
        bad = compare("outer-points-at-k1", outer, at_k, at_k1)
        if not bad and cp.case_id == 2:
            bad = compare("middle-points-at-k2", range(lo, ur(s_eps, k2) + 1), at_k, at_k2)
        elif not bad:
            bad = compare("middle-points-shifted", range(lo, min(hi, ur(s_eps, k2)) + 1), at_k, at_k2,
                          lambda n: min(n - lo, hi - n))
    if bad:
        return bad

    x = cp.xyz.x
    for low, high in ((k1, k), (e + 1, k), (e + 1, k1)):
        if not (abs(low) <= p**x and abs(low) < high < p ** (x + 1) and (high - low) % p ** (x - 1) == 0):
            continue
        n = ur(s_eps, high)
        if multiplicity(params, s_eps, n, low) == 0 and not _on_polygon(params, s_eps, low, n):
            return fail("point-on-polygon", eval_weight=low, weight=high, n=n)
    checks.append("point-on-polygon")

    d = ur(s_eps, k)
    vk = np_slopes(params, s_eps, k, d)
    n1 = ur(s_eps, k1)
    if vk[:n1] != np_slopes(params, s_eps, k1, n1):
        return fail("prefix-stability", n=n1)
    checks.append("prefix-stability")

    s3, k3 = cp.char3, cp.k3
    head = iw(s_eps, e + 1)
    count = min(d - head, ur(s3, k3))
    if count > 0:
        tail = np_slopes(params, s3, k3, count)
        for i in range(1, count + 1):
            if vk[head + i - 1] != e + tail[i - 1]:
                return fail("final-segment", i=i, v_k=vk[head + i - 1], shifted=e + tail[i - 1])
    checks.append("final-segment")
    detail = ",".join(checks) + (f"; {skipped} infinite points skipped" if skipped else "")
    return _report("transfer", params, s_eps, "pass", detail=detail, k=k, case=cp.case_id)


def _finite_hull_vertices(params, s_eps, eval_weight, upto, cap):
    """Hull vertices in ``[0, upto]`` that are stable when the window doubles."""
    n = 2 * upto + 16
    prev = None
    while n <= cap:
        vals = ghost_valuations(params, s_eps, eval_weight, n)
        chain = lower_chain((x, y) for x, y in enumerate(vals) if y is not INFINITY)
        cur = frozenset(x for x, _ in chain if x <= upto)
        if cur == prev:
            return cur
        prev = cur
        n *= 2
    return None


def check_ns(params, s_eps, eval_weight, upto=None, cap=1 << 12):
    """Nestedness of near-Steinberg ranges and agreement of their complement with hull vertices."""
    if upto is None:
        upto = dim_iw(params, s_eps, eval_weight if eval_weight >= 2 else 2 - eval_weight)
    extra = {"eval_weight": eval_weight, "upto": upto}
    ranges = ns_ranges(params, s_eps, eval_weight, upto)
    for i, r in enumerate(ranges):
        for q in ranges[i + 1 :]:
            (a0, a1), (b0, b1) = r.bounds, q.bounds
            disjoint = a1 <= b0 + 1 or b1 <= a0 + 1
            nested = (a0 <= b0 and b1 <= a1) or (b0 <= a0 and a1 <= b1)
            # open integer intervals: compare member sets, not real endpoints
            ra, qa = set(r.members()), set(q.members())
            if not (ra.isdisjoint(qa) or ra <= qa or qa <= ra):
                return _report("ns", params, s_eps, "fail",
                               {"range_k": r.k, "bounds": list(r.bounds), "other_k": q.k, "other_bounds": list(q.bounds),
                                "disjoint": disjoint, "nested": nested}, **extra)
    via_ns = vertices_via_ns(params, s_eps, eval_weight, upto)
    hull = _finite_hull_vertices(params, s_eps, eval_weight, upto, cap)
    if hull is None:
        return _report("ns", params, s_eps, "skipped", detail="finite hull did not stabilize", **extra)
    if hull != via_ns:
        return _report("ns", params, s_eps, "fail",
                       {"hull_only": sorted(hull - via_ns), "ns_only": sorted(via_ns - hull)}, **extra)
    notes = []
    if eval_weight >= 2:
        d = dim_iw(params, s_eps, eval_weight)
        if not _is_vertex(params, s_eps, eval_weight, d):
            return _report("ns", params, s_eps, "fail", {"lemma": "iwahori-vertex", "n": d}, **extra)
        notes.append("iwahori-vertex")
    boundary = [r.k for r in ranges if delta_profile(params, s_eps, r.k).half_new > 0
                and (lambda pr: pr.raw[pr.half_new] != pr.hull[pr.half_new])(delta_profile(params, s_eps, r.k))]
    if boundary:
        notes.append("raw!=hull at boundary for k=" + ",".join(map(str, boundary)))
    return _report("ns", params, s_eps, "pass", detail="; ".join(notes), **extra)


# --- sweeps ---------------------------------------------------------------------

SUITES = ("main", "base", "theta", "atkin-lehner", "pstab", "duality", "gaps", "transfer", "ns")
DEFAULT_SUITES = ("main", "base", "theta", "atkin-lehner", "pstab", "duality", "gaps", "transfer", "ns")


@dataclass(frozen=True)
class SweepConfig:
    """Parameter grid.  ``None`` means "all admissible values".

    ``a_list=None`` takes the even ``a`` in ``[2, p-5]``.  ``ns_eval_max``
    caps the in-class evaluation weights of the ``ns`` suite, which also
    always evaluates at ``ns_negative``.
    """

    p_list: tuple = (11,)
    a_list: tuple | None = None
    b_list: tuple | None = None
    s_list: tuple | None = None
    k_max: int = 100
    theta_L: int = 10
    ns_eval_max: int = 200
    ns_negative: tuple = (4, -6, -16, -26, -36, -46)
    readings: Readings = field(default_factory=Readings)

    def grid(self):
        for p in self.p_list:
            a_vals = self.a_list if self.a_list is not None else tuple(range(2, p - 4, 2))
            for a in a_vals:
                if not 1 <= a <= p - 4:
                    continue
                b_vals = self.b_list if self.b_list is not None else tuple(range(p - 1))
                for b in b_vals:
                    if not 0 <= b <= p - 2:
                        continue
                    params = GhostParams(p, a, b)
                    s_vals = self.s_list if self.s_list is not None else tuple(range(p - 1))
                    for s in s_vals:
                        if 0 <= s <= p - 2:
                            yield params, s


def _suite_points(suite, cfg, params, s):
    p = params.p
    if suite in ("main", "transfer"):
        return [(k,) for k in range(p + 3, cfg.k_max + 1) if in_class(params, s, k) and (k % 2 == 0 or params.a % 2)]
    if suite == "base":
        return [(k,) for k in range(2, min(p + 1, cfg.k_max) + 1) if in_class(params, s, k)]
    if suite in ("theta", "atkin-lehner"):
        return [(k,) for k in range(2, cfg.k_max + 1)]
    if suite in ("pstab", "duality", "gaps"):
        return [(k,) for k in range(2, cfg.k_max + 1) if in_class(params, s, k)]
    if suite == "ns":
        ks = [k for k in range(2, min(cfg.k_max, cfg.ns_eval_max) + 1) if in_class(params, s, k)]
        if cfg.k_max >= 2:
            ks += [k for k in cfg.ns_negative if k not in ks]
        return [(k,) for k in ks]
    raise ValueError(f"unknown suite {suite!r}")


def _run_one(suite, cfg, params, s, point):
    (k,) = point
    if suite == "main":
        return check_main(params, s, k, cfg.readings)
    if suite == "base":
        return check_base(params, s, k)
    if suite == "theta":
        return check_theta(params, s, k, cfg.theta_L)
    if suite == "atkin-lehner":
        return check_atkin_lehner(params, s, k)
    if suite == "pstab":
        return check_pstab(params, s, k)
    if suite == "duality":
        return check_ghost_duality(params, s, k)
    if suite == "gaps":
        return check_delta_gaps(params, s, k)
    if suite == "transfer":
        return check_transfer_lemmas(params, s, k)
    if suite == "ns":
        return check_ns(params, s, k)
    raise ValueError(f"unknown suite {suite!r}")


_POINT_KEY = {"main": "k", "base": "k", "transfer": "k", "gaps": "k", "ns": "eval_weight"}


def _run_task(task):
    suite, cfg, params, s = task
    out = []
    for point in _suite_points(suite, cfg, params, s):
        try:
            out.append(_run_one(suite, cfg, params, s, point))
        except Exception as exc:  # a crashing check is a failing check
            key = _POINT_KEY.get(suite, "k0")
            out.append(_report(suite, params, s, "fail", {"error": f"{type(exc).__name__}: {exc}"}, **{key: point[0]}))
    return out


def sweep(cfg: SweepConfig, suites=("main",), jobs=1):
    """Run ``suites`` over ``cfg``'s grid; report order is independent of ``jobs``."""
    for name in suites:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    tasks = [(suite, cfg, params, s) for suite in suites for params, s in cfg.grid()]
    if jobs <= 1 or len(tasks) <= 1:
        chunks = map(_run_task, tasks)
        return [r for chunk in chunks for r in chunk]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return [r for chunk in pool.map(_run_task, tasks) for r in chunk]


def summarize(reports):
    """Counts per ``(suite, status)``."""
    out = {}
    for r in reports:
        out.setdefault(r.suite, dict.fromkeys(STATUSES, 0))[r.status] += 1
    return out


def reading_outcome(cfg: SweepConfig, readings: Readings, jobs=1):
    """Run the main suite under ``readings`` and classify the result.

    ``falsified``: at least one mismatch or recursion failure.
    ``equivalent-on-grid``: identical verdicts to the default reading everywhere.
    """
    reports = sweep(replace(cfg, readings=readings), ("main",), jobs)
    bad = [r for r in reports if r.status in ("fail", "noted")]
    return {
        "reading": readings.label,
        "tuples": len(reports),
        "mismatches": len(bad),
        "outcome": "falsified" if bad else "equivalent-on-grid",
        "first_mismatch": json.loads(bad[0].to_json()) if bad else None,
    }
