"""ghostslopes command line.

Every subcommand prints one structured record (or, for ``verify``, one
record per check) to stdout or ``--out``.  Slopes are ``[numerator,
denominator]`` pairs; infinite valuations are the string ``"inf"``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from xml.etree import ElementTree as ET

from .arith import INFINITY
from .dims import GhostParams, dim_iw, dim_ur, dims, in_class
from .errors import ParameterError
from .ghost import ghost_valuations
from .newton import certified_polygon, np_slopes, ns_ranges
from .slopes import DEFAULT_READINGS, DimProvider, Readings, SlopeRecursion, buzzard_original
from .verify import SUITES, SweepConfig, reading_outcome, summarize, sweep

CACHE_SCHEMA = 1


class UsageError(Exception):
    pass


READINGS = {
    "default": DEFAULT_READINGS,
    "printed-case3-b": Readings(case3_b_plus_one=False),
    "printed-case3-branch-a": Readings(case3_branch_a_printed=True),
}


# --- records -------------------------------------------------------------------


def _enc(v):
    if v is INFINITY:
        return "inf"
    if isinstance(v, Fraction):
        return [v.numerator, v.denominator]
    if isinstance(v, (list, tuple)):
        return [_enc(x) for x in v]
    if isinstance(v, dict):
        return {k: _enc(x) for k, x in v.items()}
    return v


def _dec_slopes(pairs):
    return tuple(Fraction(n, d) for n, d in pairs)


@dataclass(frozen=True)
class OutputRecord:
    params: dict
    query: dict
    payload: dict
    method: str = ""

    def to_json(self):
        rec = {"params": self.params, "query": self.query, "payload": _enc(self.payload), "method": self.method}
        return json.dumps(rec, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        """Inverse of :meth:`to_json`; slope lists come back as ``Fraction`` tuples."""
        rec = json.loads(text)
        payload = dict(rec["payload"])
        for key in ("slopes", "np", "recursive"):
            if key in payload:
                payload[key] = _dec_slopes(payload[key])
        if "vertices" in payload:
            payload["vertices"] = tuple((x, Fraction(n, d)) for x, (n, d) in payload["vertices"])
        if "valuations" in payload:
            payload["valuations"] = tuple(INFINITY if v == "inf" else v for v in payload["valuations"])
        return cls(rec["params"], rec["query"], payload, rec["method"])


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fr(v):
    return "inf" if v is INFINITY else (f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else str(v))


# --- config and argument handling ------------------------------------------------


def read_config(path):
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


_INT_KEYS = ("p", "a", "b", "s_eps", "k", "count", "jobs", "k_max", "theta_l")
_LIST_KEYS = ("p_list", "a_list", "b_list", "s_list")
_DEFAULTS = {"p": 11, "a": 2, "b": 0, "jobs": 1, "k_max": 100, "theta_l": 10}


def _int_list(text):
    return tuple(int(x) for x in str(text).split(",") if x.strip())


def _apply_config(args):
    conf = read_config(args.config) if getattr(args, "config", None) else {}
    for key, value in conf.items():
        if not hasattr(args, key) or getattr(args, key) is not None:
            continue  # flags win; unknown keys are ignored
        if key in _INT_KEYS:
            value = int(value)
        elif key in _LIST_KEYS:
            value = _int_list(value)
        setattr(args, key, value)
    for key, value in _DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    if getattr(args, "s_eps", "absent") is None:
        args.s_eps = args.b
    return args


def _params(args):
    try:
        return GhostParams(args.p, args.a, args.b)
    except ParameterError as exc:
        raise UsageError(f"{exc}") from None


def _param_echo(params):
    return {"p": params.p, "a": params.a, "b": params.b}


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- memo cache ---------------------------------------------------------------------


def load_cache(path, engine):
    """Load a memo file into ``engine``; a missing or mismatched file is ignored."""
    if not path or not os.path.exists(path):
        return False
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("schema") != CACHE_SCHEMA:
        print(f"warning: ignoring cache {path}: schema {data.get('schema')!r} != {CACHE_SCHEMA}", file=sys.stderr)
        return False
    if data.get("p") != engine.params.p or data.get("a") != engine.params.a or data.get("reading") != engine.readings.label:
        print(f"warning: ignoring cache {path}: built for other parameters", file=sys.stderr)
        return False
    engine.load_memo(data["memo"])
    return True


def save_cache(path, engine):
    data = {"schema": CACHE_SCHEMA, "p": engine.params.p, "a": engine.params.a,
            "reading": engine.readings.label, "memo": engine.export_memo()}
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(data, fh, sort_keys=True)
    os.replace(tmp, path)


# --- subcommands ------------------------------------------------------------------


def cmd_dims(args):
    params = _params(args)
    if args.k is None:
        raise UsageError("dims needs --k")
    t = dims(params, args.s_eps, args.k)
    payload = {"ur": t.d_ur, "iw": t.d_iw, "new": t.d_new, "in_class": in_class(params, args.s_eps, args.k)}
    rec = OutputRecord(_param_echo(params), {"s_eps": args.s_eps, "k": args.k}, payload)
    if args.format == "csv":
        return _csv_text(["p", "a", "b", "s_eps", "k", "ur", "iw", "new"],
                         [[params.p, params.a, params.b, args.s_eps, args.k, t.d_ur, t.d_iw, t.d_new]])
    return rec.to_json() + "\n"


def _count_or_iw(args, params):
    if args.count is not None:
        return args.count
    return dim_iw(params, args.s_eps, args.k if args.k >= 2 else 2 - args.k)


def cmd_ghost(args):
    params = _params(args)
    if args.k is None:
        raise UsageError("ghost needs --k (the evaluation weight)")
    n = _count_or_iw(args, params)
    vals = ghost_valuations(params, args.s_eps, args.k, n)
    if args.format == "csv":
        return _csv_text(["n", "valuation"], [[i, _fr(v)] for i, v in enumerate(vals)])
    return OutputRecord(_param_echo(params), {"s_eps": args.s_eps, "k": args.k, "count": n},
                        {"valuations": vals}).to_json() + "\n"


def cmd_np(args):
    params = _params(args)
    if args.k is None:
        raise UsageError("np needs --k (the evaluation weight)")
    n = _count_or_iw(args, params)
    poly = certified_polygon(params, args.s_eps, args.k, n)
    verts = [(x, y) for x, y in poly.vertices if x <= n] or [poly.vertices[0]]
    if verts[-1][0] < n:
        verts.append(next((x, y) for x, y in poly.vertices if x >= n))
    slopes = poly.slopes()[:n]
    if args.format == "csv":
        return _csv_text(["x", "y"], [[x, _fr(y)] for x, y in verts])
    return OutputRecord(_param_echo(params), {"s_eps": args.s_eps, "k": args.k, "count": n},
                        {"vertices": verts, "slopes": slopes}, "np").to_json() + "\n"


def cmd_slopes(args):
    params = _params(args)
    if args.k is None:
        raise UsageError("slopes needs --k")
    if args.k < 2 or args.k % 2 or not in_class(params, args.s_eps, args.k):
        raise UsageError(f"k={args.k} must be an even weight >= 2 congruent to k_eps mod p-1")
    readings = READINGS[args.reading]
    count = dim_ur(params, args.s_eps, args.k)
    payload = {}
    if args.method in ("recursive", "both"):
        engine = SlopeRecursion(GhostParams(params.p, params.a), readings)
        load_cache(args.cache, engine)
        payload["recursive"] = engine.slopes(args.s_eps, args.k)
        if args.cache:
            save_cache(args.cache, engine)
    if args.method in ("np", "both"):
        payload["np"] = np_slopes(params, args.s_eps, args.k, count)
    if args.method == "both":
        payload["match"] = payload["np"] == payload["recursive"]
    query = {"s_eps": args.s_eps, "k": args.k}
    if readings != DEFAULT_READINGS:
        query["reading"] = readings.label
    if args.format == "csv":
        cols = [m for m in ("np", "recursive") if m in payload]
        rows = [[i + 1] + [_fr(payload[m][i]) for m in cols] for i in range(count)]
        text = _csv_text(["index"] + cols, rows)
    else:
        text = OutputRecord(_param_echo(params), query, payload, args.method).to_json() + "\n"
    return text, (0 if payload.get("match", True) else 1)


def cmd_verify(args):
    args.reading = args.reading or "default"
    suites = SUITES if args.suite == "all" else (args.suite,)
    p_list = args.p_list if args.p_list else (args.p,)
    for p in p_list:
        try:
            GhostParams(p, 2 if p > 5 else 1)
        except ParameterError as exc:
            raise UsageError(f"{exc}") from None
    cfg = SweepConfig(p_list=tuple(p_list), a_list=args.a_list, b_list=args.b_list, s_list=args.s_list,
                      k_max=args.k_max, theta_L=args.theta_l, readings=READINGS[args.reading])
    reports = sweep(cfg, suites, jobs=args.jobs)
    counts = summarize(reports)
    if args.format == "csv":
        rows = [[r.suite, json.dumps(r.params, sort_keys=True), r.status,
                 "" if r.witness is None else json.dumps(r.witness, sort_keys=True), r.detail] for r in reports]
        text = _csv_text(["suite", "params", "status", "witness", "detail"], rows)
    else:
        text = "".join(r.to_json() + "\n" for r in reports)
    if cfg.readings != DEFAULT_READINGS and "main" in suites:
        bad = [r for r in reports if r.suite == "main" and r.status in ("fail", "noted")]
        outcome = {"reading": cfg.readings.label, "tuples": sum(r.suite == "main" for r in reports),
                   "mismatches": len(bad), "outcome": "falsified" if bad else "equivalent-on-grid"}
        print(json.dumps(outcome, sort_keys=True), file=sys.stderr)
        code = 0
    else:
        code = 1 if any(r.status == "fail" for r in reports) else 0
    for suite, c in counts.items():
        print(f"{suite}: " + " ".join(f"{k}={v}" for k, v in c.items()), file=sys.stderr)
    return text, code


def cmd_falsify(args):
    """Classify an alternative reading on the main-theorem grid."""
    cfg = SweepConfig(p_list=args.p_list or (args.p,), a_list=args.a_list, b_list=args.b_list, s_list=args.s_list,
                      k_max=args.k_max)
    res = reading_outcome(cfg, READINGS[args.reading or "printed-case3-b"], jobs=args.jobs)
    return json.dumps(res, sort_keys=True) + "\n"


# --- plotting -------------------------------------------------------------------------


def _plot_data(params, s_eps, k, n):
    vals = ghost_valuations(params, s_eps, k, n)
    poly = certified_polygon(params, s_eps, k, n)
    verts = [(x, y) for x, y in poly.vertices if x <= n]
    ranges = [r for r in ns_ranges(params, s_eps, k, n) if r.bounds[0] < n]
    return vals, verts, ranges


def render_svg(params, s_eps, k, n, width=640, height=420):
    vals, verts, ranges = _plot_data(params, s_eps, k, n)
    finite = [(i, v) for i, v in enumerate(vals) if v is not INFINITY]
    ymax = max(float(v) for _, v in finite) or 1.0
    pad = 40
    sx = lambda x: pad + (width - 2 * pad) * x / max(n, 1)  # noqa: E731
    sy = lambda y: height - pad - (height - 2 * pad) * float(y) / ymax  # noqa: E731
    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(width), height=str(height),
                     viewBox=f"0 0 {width} {height}")
    ET.SubElement(svg, "title").text = f"ghost Newton polygon p={params.p} a={params.a} s_eps={s_eps} k={k}"
    for r in ranges:
        lo, hi = max(r.bounds[0], 0), min(r.bounds[1], n)
        ET.SubElement(svg, "rect", x=f"{sx(lo):.2f}", y=str(pad), width=f"{sx(hi) - sx(lo):.2f}",
                      height=str(height - 2 * pad), fill="#f2d7a6", opacity="0.5",
                      **{"class": "ns-range", "data-k": str(r.k)})
    ET.SubElement(svg, "line", x1=str(pad), y1=str(height - pad), x2=str(width - pad), y2=str(height - pad), stroke="black")
    ET.SubElement(svg, "line", x1=str(pad), y1=str(pad), x2=str(pad), y2=str(height - pad), stroke="black")
    for i, v in finite:
        ET.SubElement(svg, "circle", cx=f"{sx(i):.2f}", cy=f"{sy(v):.2f}", r="2", fill="#555",
                      **{"class": "ghost-point", "data-n": str(i)})
    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in verts)
    ET.SubElement(svg, "polyline", points=pts, fill="none", stroke="#1f4e9c", **{"stroke-width": "1.5"})
    for x, y in verts:
        ET.SubElement(svg, "circle", cx=f"{sx(x):.2f}", cy=f"{sy(y):.2f}", r="4", fill="#1f4e9c",
                      **{"class": "vertex", "data-n": str(x)})
        label = ET.SubElement(svg, "text", x=f"{sx(x) + 5:.2f}", y=f"{sy(y) - 5:.2f}", **{"font-size": "10"})
        label.text = f"({x}, {_fr(y)})"
    return ET.tostring(svg, encoding="unicode") + "\n"


def render_text(params, s_eps, k, n, rows=20):
    """Character grid: ``*`` vertex, ``o`` other point, ``~`` column inside a near-Steinberg range."""
    vals, verts, ranges = _plot_data(params, s_eps, k, n)
    finite = [(i, v) for i, v in enumerate(vals) if v is not INFINITY]
    ymax = max(v for _, v in finite) or 1
    vx = {x for x, _ in verts}
    covered = {i for r in ranges for i in r.members() if 0 <= i <= n}
    grid = [[" "] * (n + 1) for _ in range(rows + 1)]
    for i in covered:
        for row in grid:
            row[i] = "~"
    for i, v in finite:
        r = rows - round(Fraction(v) * rows / ymax)
        grid[r][i] = "*" if i in vx else "o"
    lines = ["".join(row).rstrip() for row in grid]
    lines.append("vertices: " + " ".join(f"({x},{_fr(y)})" for x, y in verts))
    lines.append("ns ranges: " + " ".join(f"k={r.k}:{r.bounds}" for r in ranges))
    return "\n".join(lines) + "\n"


def cmd_plot(args):
    params = _params(args)
    if args.k is None:
        raise UsageError("plot needs --k (the evaluation weight)")
    n = _count_or_iw(args, params)
    if args.style == "svg":
        return render_svg(params, args.s_eps, args.k, n)
    return render_text(params, args.s_eps, args.k, n)


def cmd_buzzard(args):
    if not args.dims_file:
        raise UsageError("buzzard needs --dims-file")
    if args.k is None:
        raise UsageError("buzzard needs --k")
    provider = DimProvider.load(args.dims_file)
    out = buzzard_original(provider, args.p, args.k)
    if args.format == "csv":
        return _csv_text(["index", "slope"], [[i + 1, _fr(v)] for i, v in enumerate(out)])
    return OutputRecord({"p": args.p}, {"k": args.k, "dims_file": os.path.basename(args.dims_file)},
                        {"slopes": out}, "buzzard").to_json() + "\n"


# --- parser -------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int)
    common.add_argument("--a", type=int)
    common.add_argument("--b", type=int)
    common.add_argument("--s-eps", dest="s_eps", type=int, help="character index (default: b)")
    common.add_argument("--k", type=int)
    common.add_argument("--count", type=int)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out")
    common.add_argument("--config", help="key=value defaults; flags override")
    common.add_argument("--cache", help="slope memo file (created if missing)")
    common.add_argument("--jobs", type=int)

    ap = argparse.ArgumentParser(prog="ghostslopes", description="Ghost Newton polygons and slope recursions.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("dims", parents=[common], help="dimensions d_ur, d_iw, d_new")
    sub.add_parser("ghost", parents=[common], help="ghost coefficient valuations at w_k")
    sub.add_parser("np", parents=[common], help="certified Newton polygon prefix")
    sp = sub.add_parser("slopes", parents=[common], help="slope sequence at weight k")
    sp.add_argument("--method", choices=("np", "recursive", "both"), default="both")
    sp.add_argument("--reading", choices=tuple(READINGS), default="default")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--k-max", dest="k_max", type=int)
    grid.add_argument("--p-list", dest="p_list", type=_int_list)
    grid.add_argument("--a-list", dest="a_list", type=_int_list)
    grid.add_argument("--b-list", dest="b_list", type=_int_list)
    grid.add_argument("--s-list", dest="s_list", type=_int_list)
    grid.add_argument("--reading", choices=tuple(READINGS), help="verify: default; falsify: printed-case3-b")
    vp = sub.add_parser("verify", parents=[common, grid], help="run verification suites")
    vp.add_argument("--suite", choices=SUITES + ("all",), default="main")
    vp.add_argument("--theta-L", dest="theta_l", type=int)
    sub.add_parser("falsify", parents=[common, grid], help="classify a reading on the main grid")

    pp = sub.add_parser("plot", parents=[common], help="Newton polygon figure")
    pp.add_argument("--style", choices=("svg", "text"), default="svg")
    bp = sub.add_parser("buzzard", parents=[common], help="Buzzard's recursion from dimension tables")
    bp.add_argument("--dims-file", dest="dims_file")
    return ap


COMMANDS = {
    "dims": cmd_dims,
    "ghost": cmd_ghost,
    "np": cmd_np,
    "slopes": cmd_slopes,
    "verify": cmd_verify,
    "falsify": cmd_falsify,
    "plot": cmd_plot,
    "buzzard": cmd_buzzard,
}


def main(argv=None):
    args = _apply_config(build_parser().parse_args(argv))
    try:
        result = COMMANDS[args.command](args)
    except (UsageError, ParameterError, ValueError, KeyError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    text, code = result if isinstance(result, tuple) else (result, 0)
    _emit(args, text)
    return code


if __name__ == "__main__":
    sys.exit(main())
