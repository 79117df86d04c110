"""Batch front end: counting, verification and export jobs.

Every report is deterministic: canonical orderings throughout, no worker
count echoed, and wall time only with ``--timing``.

Exit codes: 0 when every requested check passes, 1 on a mismatch (the
first counterexample is printed), 2 on bad input or a job outside the
feasibility envelope without ``--force``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from collections import Counter
from typing import Any, Callable

from . import sl_local as SL
from . import sp_local as SPL
from .errors import LattBuildError
from .gfq import Subspace, complete_flag_count, gf_init, standard_form
from .lattice import (
    DEFAULT_PRECISION,
    HomothetyClass,
    KMatrix,
    LatticeRep,
    TruncRing,
    apply_matrix,
    diagonal_lattice,
    is_primitive,
    is_special_lattice,
    lattice_from_generators,
    standard_lattice,
    vertex_type,
)
from .parallel import default_workers
from .spherical import verify_simplicial_iso

SCHEMA_VERSION = 1
COMMANDS = (
    "count-chambers",
    "count-close",
    "multiplicity",
    "verify-relation",
    "verify-iso",
    "export-complex",
    "table",
    "thickness",
    "verify-types",
    "lift-gallery",
)

# (n, q) pairs per tier; anything else needs --force
ENVELOPE = {
    "sl": {"fast": {(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)}, "slow": {(5, 2), (4, 3), (3, 4), (3, 5)}},
    "sp": {"fast": {(2, 2), (2, 3)}, "slow": {(3, 2)}},
}
CHEAP_ENVELOPE = {"fast": {(n, q) for n in (2, 3) for q in (2, 3, 4, 5)}, "slow": {(4, 2), (4, 3)}}


class Infeasible(Exception):
    pass


# ------------------------------------------------------------- formatting


def format_poly(p) -> str:
    terms = []
    for k, c in enumerate(p):
        if not c:
            continue
        if k == 0:
            terms.append(str(c))
        else:
            mono = "t" if k == 1 else f"t^{k}"
            terms.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(terms) or "0"


def label(v) -> str:
    if isinstance(v, HomothetyClass):
        v = v.rep
    if isinstance(v, LatticeRep):
        rows = ",".join("[" + ",".join(format_poly(x) for x in row) + "]" for row in v.matrix())
        pre = f"t^{v.shift}*" if v.shift else ""
        return f"{pre}[{rows}]"
    if isinstance(v, Subspace):
        return "span(" + ",".join("".join(str(x) for x in b) for b in v.basis) + ")"
    return str(v)


def _report(args, **fields) -> dict:
    out: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "family": args.family,
        "command": args.command,
        "n": args.n,
        "q": args.q,
        "precision": args.precision,
    }
    out.update(fields)
    return out


def _emit_csv(rows: list[dict], header: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_csv_cell(r.get(h)) for h in header])
    return buf.getvalue()


def _csv_cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, (dict, list)):
        return json.dumps(x, separators=(",", ":"), ensure_ascii=False)
    return str(x)


def _emit(report: dict, fmt: str) -> str:
    if fmt == "csv":
        return _emit_csv([report], list(report))
    if fmt == "dot":
        raise LattBuildError("dot output is only available for export-complex")
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


# ------------------------------------------------------------- envelope


def check_feasible(family: str, command: str, n: int, q: int, slow: bool, force: bool) -> None:
    if force:
        return
    env = CHEAP_ENVELOPE if command in ("verify-types", "lift-gallery") else ENVELOPE[family]
    if (n, q) in env["fast"]:
        return
    if (n, q) in env["slow"]:
        if slow:
            return
        raise Infeasible(f"{family} {command} at n={n}, q={q} is in the slow tier; pass --slow")
    raise Infeasible(f"{family} {command} at n={n}, q={q} is outside the feasibility envelope; pass --force")


# ------------------------------------------------------------- commands


class Ctx:
    def __init__(self, args):
        self.args = args
        self.fault = bool(args.inject_fault)
        self.workers = args.workers if args.workers is not None else default_workers()

    def observe(self, x: int) -> int:
        """Test hook: perturb the first observed count."""
        if self.fault:
            self.fault = False
            return x + 1
        return x


def _formulas(family: str, n: int, q: int) -> tuple[int, int, int]:
    """(r, omega, m) for the family."""
    if family == "sl":
        return complete_flag_count(n, q), SL.omega_formula(n, q), complete_flag_count(n - 2, q)
    return SPL.r_delta(n, q), SPL.coset_count_sp(n, q), SPL.r_delta(n - 1, q)


def cmd_count_chambers(ctx: Ctx) -> tuple[dict, Any]:
    a = ctx.args
    if a.family == "sl":
        formula = complete_flag_count(a.n, a.q)
        enum = sum(1 for _ in SL.chambers_containing_vertex(a.n, a.q, precision=a.precision))
    else:
        formula = SPL.r_delta(a.n, a.q)
        enum = sum(1 for _ in SPL.sp_chambers_containing(a.n, a.q, precision=a.precision))
    enum = ctx.observe(enum)
    cex = None if enum == formula else {"formula": formula, "enumerated": enum}
    return _report(a, formula=formula, enumerated=enum, match=enum == formula), cex


def cmd_count_close(ctx: Ctx) -> tuple[dict, Any]:
    a = ctx.args
    details: dict[str, Any] = {}
    if a.family == "sl":
        formula = SL.omega_formula(a.n, a.q)
        enum = len(SL.close_vertices(a.n, a.q, precision=a.precision, workers=ctx.workers))
    else:
        formula = SPL.coset_count_sp(a.n, a.q)
        frame = SPL.sp_frame(SPL._sp_base(a.n, a.q, None, a.precision))
        scan = SPL.sp_close_scan(frame, ctx.workers)
        enum = len(scan.close)
        details = {
            "index_criterion_candidates": scan.candidates,
            "candidate_types": {str(k): v for k, v in scan.type_histogram.items()},
            "non_type0": scan.non_type0,
            "non_primitive": scan.non_primitive,
        }
    enum = ctx.observe(enum)
    ok = enum == formula
    cex = None if ok else {"formula": formula, "enumerated": enum}
    return _report(a, formula=formula, enumerated=enum, match=ok, details=details), cex


def cmd_verify_relation(ctx: Ctx) -> tuple[dict, Any]:
    a = ctx.args
    fn = SL.verify_sl_relation if a.family == "sl" else SPL.verify_sp_relation
    rep = fn(a.n, a.q, enumerate=True, workers=ctx.workers)
    om_enum = ctx.observe(rep.omega_enumerated)
    lhs = a.q * rep.r_n_enumerated
    rhs = rep.r_prev * om_enum
    holds = lhs == rhs and om_enum == rep.omega and rep.r_n_enumerated == rep.r_n
    report = _report(
        a,
        formula=rep.omega,
        enumerated=om_enum,
        relation_holds=holds,
        r_n=rep.r_n,
        r_n_enumerated=rep.r_n_enumerated,
        r_prev=rep.r_prev,
        q_times_r=lhs,
        r_prev_times_omega=rhs,
        match=holds,
    )
    cex = None if holds else {"q_times_r": lhs, "r_prev_times_omega": rhs, "omega": rep.omega, "omega_enumerated": om_enum}
    return report, cex


def _pairs(ctx: Ctx):
    a = ctx.args
    if a.family == "sl":
        return SL.close_pairs(a.n, a.q, precision=a.precision, workers=ctx.workers)
    return SPL.sp_close_pairs(a.n, a.q, precision=a.precision, workers=ctx.workers)


def _sample(pairs, count: int, seed: int):
    idx = sorted(random.Random(seed).sample(range(len(pairs)), min(count, len(pairs))))
    return [pairs[i] for i in idx]


def cmd_multiplicity(ctx: Ctx) -> tuple[dict, Any]:
    a = ctx.args
    r, _, m = _formulas(a.family, a.n, a.q)
    pairs = _pairs(ctx)
    mult = SL.gallery_multiplicity if a.family == "sl" else SPL.sp_gallery_multiplicity
    samples = []
    cex = None
    for p in _sample(pairs, a.samples, a.seed):
        got = ctx.observe(mult(p))
        samples.append({"vertex": label(p.t2), "multiplicity": got})
        if got != m and cex is None:
            cex = {"vertex": label(p.t2), "multiplicity": got, "expected": m}
    if a.family == "sl":
        g = SL.count_galleries_from(a.n, a.q, precision=a.precision, workers=ctx.workers)
    else:
        g = SPL.sp_count_galleries_from(a.n, a.q, precision=a.precision, workers=ctx.workers)
    per_class = sorted(set(g.histogram.values()))
    total_ok = g.total == r * a.q and g.classes == len(pairs) and per_class == [m]
    if cex is None and not total_ok:
        cex = {"gallery_total": g.total, "expected_total": r * a.q, "per_class_counts": per_class}
    report = _report(
        a,
        formula=m,
        enumerated=sorted({s["multiplicity"] for s in samples}),
        match=cex is None,
        samples=samples,
        gallery_total=g.total,
        r_times_q=r * a.q,
        gallery_classes=g.classes,
        per_class_counts=per_class,
    )
    return report, cex


def _complex_for(ctx: Ctx, pair):
    if ctx.args.family == "sl":
        return SL.close_complex(pair)
    return SPL.sp_close_complex(pair)


def cmd_verify_iso(ctx: Ctx) -> tuple[dict, Any]:
    a = ctx.args
    pairs = _pairs(ctx)
    samples = []
    cex = None
    for p in _sample(pairs, a.samples, a.seed):
        cx, vm = _complex_for(ctx, p)
        res = verify_simplicial_iso(vm)
        ok = bool(res)
        if ctx.fault:
            ctx.fault = False
            ok = False
        samples.append({"vertex": label(p.t2), "vertices": cx.num_vertices, "facets": cx.num_facets, "iso": ok})
        if not ok and cex is None:
            cex = {"vertex": label(p.t2), "reason": res.reason or "injected fault", "witness": _jsonable(res.witness)}
    target = f"A_{a.n - 3}" if a.family == "sl" else f"C_{a.n - 1}"
    return _report(a, target=target, match=cex is None, samples=samples), cex


def _jsonable(x):
    if x is None or isinstance(x, (int, str, bool)):
        return x
    if isinstance(x, (set, frozenset, list, tuple)):
        return sorted(_jsonable(y) for y in x) if isinstance(x, (set, frozenset)) else [_jsonable(y) for y in x]
    return label(x)


def cmd_export_complex(ctx: Ctx) -> tuple[Any, Any]:
    a = ctx.args
    pairs = _pairs(ctx)
    pair = _sample(pairs, 1, a.seed)[0]
    cx, vm = _complex_for(ctx, pair)
    res = verify_simplicial_iso(vm)
    labels = [label(v) for v in cx.vertices]
    images = [label(vm.mapping[v]) if v in vm.mapping else None for v in cx.vertices]
    facets = [list(f) for f in cx.facets]
    cex = None if res else {"reason": res.reason, "witness": _jsonable(res.witness)}
    if a.format == "dot":
        lines = [
            "graph close_complex {",
            f"  // schema_version {SCHEMA_VERSION}; family {a.family}; n {a.n}; q {a.q}",
            f"  // t = {label(pair.t)}; t2 = {label(pair.t2)}",
            f"  // vertices {cx.num_vertices}; facets {cx.num_facets}; iso {'true' if res else 'false'}",
        ]
        for i, s in enumerate(labels):
            lines.append(f'  v{i} [label="{s}", image="{images[i]}"];')
        edges = sorted({(f[i], f[j]) for f in cx.facets for i in range(len(f)) for j in range(i + 1, len(f))})
        for u, v in edges:
            lines.append(f"  v{u} -- v{v};")
        for f in facets:
            lines.append("  // facet: " + " ".join(f"v{i}" for i in f))
        lines.append("}")
        return "\n".join(lines) + "\n", cex
    report = _report(
        a,
        t=label(pair.t),
        t2=label(pair.t2),
        vertices=labels,
        images=images,
        facets=facets,
        iso=bool(res),
        match=bool(res),
    )
    return report, cex


def cmd_thickness(ctx: Ctx) -> tuple[dict, Any]:
    a = ctx.args
    if a.family == "sl":
        hist = SL.sl_thickness(a.n, a.q, precision=a.precision, workers=ctx.workers)
    else:
        hist = Counter(SPL.sp_count_galleries_from(a.n, a.q, precision=a.precision, workers=ctx.workers).thickness)
    hist = {k: v for k, v in sorted(hist.items())}
    if ctx.fault:
        ctx.fault = False
        k = next(iter(hist))
        hist = {k + 1: hist[k]} | {x: y for x, y in hist.items() if x != k}
    ok = set(hist) == {a.q + 1}
    cex = None if ok else {"chambers_per_face": sorted(hist), "expected": a.q + 1}
    return _report(a, formula=a.q + 1, enumerated={str(k): v for k, v in hist.items()}, faces=sum(hist.values()), match=ok), cex


# ---------------------------------------------------------- verify-types


def _fundamental_sp(n: int) -> list[SPL.ApartmentVertex]:
    out = [SPL.ApartmentVertex((0,) * n, (0,) * n)]
    for i in range(1, n + 1):
        out.append(SPL.ApartmentVertex((0,) * i + (1,) * (n - i), (1,) * n))
    return out


def _random_coords(n: int, rng: random.Random) -> SPL.ApartmentVertex:
    a = tuple(rng.randint(-2, 2) for _ in range(n))
    if rng.random() < 0.5:
        s = rng.randint(-2, 2)
        b = tuple(s - x for x in a)
    else:
        b = tuple(rng.randint(-2, 2) for _ in range(n))
    return SPL.ApartmentVertex(a, b)


def _types_sp(ctx: Ctx, rng: random.Random) -> tuple[dict, Any]:
    a = ctx.args
    n, q = a.n, a.q
    ring = TruncRing(q, max(a.precision, 16))
    F = ring.field
    J = standard_form(n, F)
    checked = 0
    cex = None
    verts = [(v, None) for v in _fundamental_sp(n)]
    for _ in range(a.samples):
        v = _random_coords(n, rng)
        g = SPL.random_gsp(n, F, rng, length=2) if rng.random() < 0.5 else None
        verts.append((v, g))
    fund_types = []
    for i, (v, g) in enumerate(verts):
        if g is not None:
            # same coordinates on the twisted basis B_g
            v = SPL.ApartmentVertex(v.a, v.b, g.twisted_basis(SPL.SymplecticBasis.standard(n), F))
        L = SPL.realize(v, ring)
        lt = vertex_type(L, 2 * n)
        got = (SPL.coords_type(v), SPL.coords_is_special(v), SPL.coords_is_primitive(v))
        want = (lt, is_special_lattice(L, J), is_primitive(L, J))
        if i == 0:
            got = (ctx.observe(got[0]),) + got[1:]
        if g is None and i <= n:
            fund_types.append(got[0])
        checked += 1
        if got != want and cex is None:
            cex = {"coords": list(v.coords), "coords_says": list(got), "lattice_says": list(want)}
    shifts = 0
    for _ in range(a.samples):
        g = SPL.random_gsp(n, F, rng, length=3)
        v = _random_coords(n, rng)
        L = SPL.realize(v, ring)
        gL = apply_matrix(g.g, L)
        od = g.g.ord_det(F)
        ok = od == n * g.m and vertex_type(gL, 2 * n) == (vertex_type(L, 2 * n) + od) % (2 * n)
        shifts += 1
        if not ok and cex is None:
            cex = {"coords": list(v.coords), "ord_det_g": od, "similitude_exponent": g.m}
    return {"vertices_checked": checked, "fundamental_types": fund_types, "group_elements_checked": shifts}, cex


def _types_sl(ctx: Ctx, rng: random.Random) -> tuple[dict, Any]:
    a = ctx.args
    n, q = a.n, a.q
    ring = TruncRing(q, max(a.precision, 16))
    F = ring.field
    checked = 0
    cex = None
    # fundamental chamber: diag(0, .., 0, 1, .., 1) with i ones has type i
    fund = [diagonal_lattice(ring, (0,) * (n - i) + (1,) * i) for i in range(n)]
    fund_types = []
    for i, L in enumerate(fund):
        got = ctx.observe(vertex_type(L)) if i == 0 else vertex_type(L)
        fund_types.append(got)
        checked += 1
        if got != i % n and cex is None:
            cex = {"lattice": label(L), "type": got, "expected": i % n}
    for _ in range(a.samples):
        g = SPL.random_gl(n, F, rng, length=4)
        L = apply_matrix(g, standard_lattice(ring, n))
        checked += 1
        if vertex_type(L) != g.ord_det(F) % n and cex is None:
            cex = {"lattice": label(L), "type": vertex_type(L), "ord_det_g": g.ord_det(F)}
    shifts = 0
    for _ in range(a.samples):
        L = apply_matrix(SPL.random_gl(n, F, rng, length=3), standard_lattice(ring, n))
        g = SPL.random_gl(n, F, rng, length=3)
        gL = apply_matrix(g, L)
        shifts += 1
        if vertex_type(gL) != (vertex_type(L) + g.ord_det(F)) % n and cex is None:
            cex = {"lattice": label(L), "ord_det_g": g.ord_det(F)}
    return {"vertices_checked": checked, "fundamental_types": fund_types, "group_elements_checked": shifts}, cex


def cmd_verify_types(ctx: Ctx) -> tuple[dict, Any]:
    rng = random.Random(ctx.args.seed)
    fn = _types_sl if ctx.args.family == "sl" else _types_sp
    details, cex = fn(ctx, rng)
    return _report(ctx.args, match=cex is None, **details), cex


def cmd_lift_gallery(ctx: Ctx) -> tuple[dict, Any]:
    a = ctx.args
    if a.family != "sp":
        raise LattBuildError("lift-gallery applies to the sp family")
    ring = TruncRing(a.q, max(a.precision, 6))
    cases: Counter = Counter()
    checked = 0
    cex = None
    for C in SPL.apartment_chambers_at_origin(a.n):
        for j, C2 in SPL.apartment_neighbours(C):
            lg = SPL.lift_gallery(C, C2)
            ok = lg.j == j and SPL.check_lift(C, C2, lg, ring)
            if ctx.fault:
                ctx.fault = False
                ok = False
            cases[j] += 1
            checked += 1
            if not ok and cex is None:
                cex = {"C": [list(x) for x in C.chain], "C2": [list(x) for x in C2.chain], "j": j}
    chambers = len(SPL.apartment_chambers_at_origin(a.n))
    return _report(a, chambers=chambers, pairs_checked=checked, j_cases={str(k): v for k, v in sorted(cases.items())}, match=cex is None), cex


# ------------------------------------------------------------------ table


def _parse_range(s: str) -> list[int]:
    if ".." in s:
        lo, hi = s.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in s.split(",") if x]


TABLE_HEADER = ["family", "n", "q", "r", "omega", "m", "q_r", "r_prev_omega", "relation_ok", "enumerated"]


def table_rows(family: str, ns: list[int], qs: list[int], enumerate: bool = False, slow: bool = False, workers: int = 1) -> list[dict]:
    rows = []
    for n in ns:
        for q in qs:
            r, om, m = _formulas(family, n, q)
            ok = q * r == m * om
            enumerated = False
            if enumerate:
                try:
                    check_feasible(family, "table", n, q, slow, False)
                except Infeasible:
                    pass
                else:
                    fn = SL.verify_sl_relation if family == "sl" else SPL.verify_sp_relation
                    ok = ok and fn(n, q, enumerate=True, workers=workers).holds
                    enumerated = True
            rows.append({"family": family, "n": n, "q": q, "r": r, "omega": om, "m": m, "q_r": q * r, "r_prev_omega": m * om, "relation_ok": ok, "enumerated": enumerated})
    return rows


# ------------------------------------------------------------------- main


HANDLERS: dict[str, Callable[[Ctx], tuple[Any, Any]]] = {
    "count-chambers": cmd_count_chambers,
    "count-close": cmd_count_close,
    "multiplicity": cmd_multiplicity,
    "verify-relation": cmd_verify_relation,
    "verify-iso": cmd_verify_iso,
    "export-complex": cmd_export_complex,
    "thickness": cmd_thickness,
    "verify-types": cmd_verify_types,
    "lift-gallery": cmd_lift_gallery,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lattbuild", description="Local structure of the SL_n and Sp_n buildings over F_q((t)).")
    p.add_argument("family", choices=("sl", "sp"))
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--n", default=None, help="rank; for table a range such as 3..5 or a list 3,4")
    p.add_argument("--q", default=None, help="field order (prime power up to 9); for table a list or range")
    p.add_argument("--format", choices=("json", "csv", "dot"), default=None)
    p.add_argument("--precision", type=int, default=DEFAULT_PRECISION, help="t-adic precision N")
    p.add_argument("--slow", action="store_true", help="allow the slow tier of the envelope")
    p.add_argument("--force", action="store_true", help="run outside the feasibility envelope")
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: THREADS or 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--enumerate", action="store_true", help="table: check relations by enumeration inside the envelope")
    p.add_argument("--timing", action="store_true", help="add wall_time_ms to the report")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return p


DEFAULT_SAMPLES = {"multiplicity": 20, "verify-iso": 3, "verify-types": 100}


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "table":
            return _run_table(args, out, err)
        if args.n is None or args.q is None:
            raise LattBuildError("--n and --q are required")
        args.n, args.q = int(args.n), int(args.q)
        gf_init(args.q)
        if args.samples is None:
            args.samples = DEFAULT_SAMPLES.get(args.command, 1)
        fmt = args.format or "json"
        if fmt == "dot" and args.command != "export-complex":
            raise LattBuildError("dot output is only available for export-complex")
        check_feasible(args.family, args.command, args.n, args.q, args.slow, args.force)
        ctx = Ctx(args)
        t0 = time.perf_counter_ns()
        report, cex = HANDLERS[args.command](ctx)
        if args.timing and isinstance(report, dict):
            report["wall_time_ms"] = (time.perf_counter_ns() - t0) // 1_000_000
    except Infeasible as e:
        print(f"infeasible: {e}", file=err)
        return 2
    except (LattBuildError, ValueError) as e:
        print(f"error: {e}", file=err)
        return 2
    if isinstance(report, dict):
        report["counterexample"] = cex
        out.write(_emit(report, fmt))
    else:
        out.write(report)
    if cex is not None:
        print("counterexample: " + json.dumps(cex, ensure_ascii=False), file=err)
        return 1
    return 0


def _run_table(args, out, err) -> int:
    ns = _parse_range(args.n or "")
    qs = _parse_range(args.q or "")
    fam_min = 3 if args.family == "sl" else 2
    for n in ns:
        if n < fam_min:
            raise LattBuildError(f"n must be at least {fam_min}")
    for q in qs:
        gf_init(q)
    workers = args.workers if args.workers is not None else default_workers()
    rows = table_rows(args.family, ns, qs, args.enumerate, args.slow, workers)
    if args.inject_fault and rows:
        rows[0]["q_r"] += 1
        rows[0]["relation_ok"] = False
    fmt = args.format or "csv"
    if fmt == "json":
        out.write(json.dumps({"schema_version": SCHEMA_VERSION, "rows": rows}, indent=2) + "\n")
    elif fmt == "csv":
        out.write(_emit_csv(rows, TABLE_HEADER))
    else:
        raise LattBuildError("table supports json and csv")
    bad = next((r for r in rows if not r["relation_ok"]), None)
    if bad is not None:
        print("counterexample: " + json.dumps(bad), file=err)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
