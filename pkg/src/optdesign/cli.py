"""Command-line front end.

Machine output is JSON lines on stdout, starting with a manifest record;
human-readable tables go to stderr.  Exit codes: 0 ok, 2 usage, 3 domain
precondition, 4 verification failure, 5 corrupt input.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from .criteria import DEFAULT_P_GRID, criteria_report, theorem_main_check
from .design import (Design, DesignError, GddParams, format_design, gdd_spectrum,
                     graph_as_design, is_connected, parse_design)
from .graphs import decode_graph6, verify_prop_te
from .graphs.enumerate import MAX_ENUM_ORDER, connected_codes, default_jobs
from .graphs.graph import Graph
from .inequality import (KktPoint, KktProblem, canonical_multipliers, check_samples,
                         kkt_residuals, sample_feasible)
from .manifest import RunManifest
from .search import CRITERIA, MAX_ITERATIONS, PATIENCE, SearchConfig, local_search
from .spectra import SpectrumError

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_FAIL, EXIT_CORRUPT = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code: int, message: str, record: dict | None = None):
        super().__init__(message)
        self.code = code
        self.record = record


def _table(rows, out=None) -> None:
    out = out or sys.stderr
    rows = [(str(a), str(b)) for a, b in rows]
    width = max((len(a) for a, _ in rows), default=0)
    for a, b in rows:
        print(f"{a.ljust(width)}  {b}", file=out)


def _p_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad p list {text!r}") from None
    if not vals or any(not (p > 0 and math.isfinite(p)) for p in vals):
        raise argparse.ArgumentTypeError("p values must be positive and finite")
    return vals


def _read_design(path, manifest: RunManifest) -> Design:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read {path}: {exc.strerror}") from None
    manifest.add_input(path)
    try:
        return parse_design(text)
    except DesignError as exc:
        raise CliError(EXIT_USAGE, f"{path}: {exc}") from None


def _read_graphs(path, manifest: RunManifest) -> tuple[list[Graph], list[dict]]:
    """Graphs plus a list of undecodable lines."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read {path}: {exc.strerror}") from None
    manifest.add_input(path)
    graphs, bad = [], []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        try:
            graphs.append(decode_graph6(line))
        except ValueError as exc:
            bad.append({"line": lineno, "text": line[:80], "error": str(exc)})
    return graphs, bad


def _jobs(args) -> int:
    jobs = args.jobs if args.jobs is not None else default_jobs()
    if jobs < 1:
        raise CliError(EXIT_USAGE, "--jobs must be at least 1")
    return jobs


# --- commands ------------------------------------------------------------------

def cmd_eval(args, manifest):
    d = _read_design(args.design, manifest)
    if not is_connected(d):
        raise CliError(EXIT_DOMAIN, "design is disconnected; the criteria are undefined")
    rep = criteria_report(d, args.p)
    rec = rep.to_record()
    _table([("v b k", f"{d.v} {d.b} {d.k}"), ("trace C", rec["trace_c_exact"]),
            ("trace C^2", rec["trace_c_sq_exact"]), ("E", f"{rep.e_value:.9g}"),
            ("D", f"{rep.d_value:.9g}"), ("A", f"{rep.a_value:.9g}"),
            ("distinct", rep.distinct_count), ("spectrum", rep.spectrum.notation())]
           + [(f"phi_{p:g}", f"{v:.9g}") for p, v in rep.phi_values.items()])
    return [{"record": "criteria", **rec}], EXIT_OK


def cmd_verify_petersen(args, manifest):
    jobs = _jobs(args)
    if args.graphs:
        graphs, bad = _read_graphs(args.graphs, manifest)
    else:
        graphs, bad = (Graph(10, c) for c in connected_codes(10, 15, jobs)), []
    rep = verify_prop_te(graphs, jobs)
    rec = rep.to_record()
    rec["corrupt_lines"] = bad
    _table([("connected graphs", rep.total_connected), ("regular", rep.regular_count),
            ("max mu9", f"{rep.max_mu9:.12g}"), ("max product", rep.max_product),
            ("violations", rep.violations), ("precondition errors", len(rep.precondition_errors) + len(bad)),
            ("witnesses are Petersen", rep.witnesses_are_petersen())])
    for item in rep.mu9_bound_violations + rep.product_bound_violations + rep.min_degree_violations:
        print(f"violation: {item['graph6']}", file=sys.stderr)
    if bad or rep.precondition_errors:
        return [{"record": "prop_te", **rec}], EXIT_CORRUPT
    return [{"record": "prop_te", **rec}], EXIT_OK if rep.verified else EXIT_FAIL


def _problem(args) -> KktProblem:
    try:
        return KktProblem(args.m1, args.m2, args.theta1, args.theta2, args.p)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None


def cmd_verify_ineq(args, manifest):
    problem = _problem(args)
    if args.samples < 1:
        raise CliError(EXIT_USAGE, "--samples must be at least 1")
    manifest.seed = args.seed
    summary = check_samples(problem, sample_feasible(problem, args.samples, seed=args.seed))
    rec = {"record": "ineq", "m1": problem.m1, "m2": problem.m2, "theta1": problem.theta1,
           "theta2": problem.theta2, "p": problem.p, "f_theta": problem.f_theta,
           **summary.to_record()}
    _table([("samples", summary.samples), ("acceptance rate", f"{summary.acceptance_rate:.4f}"),
            ("min f(x)-f(theta)", f"{summary.min_gap:.6g}"), ("violations", summary.violations),
            ("near-equal off theta", summary.near_equal_off_theta)])
    return [rec], EXIT_OK if summary.violations == 0 else EXIT_FAIL


def cmd_enum_graphs(args, manifest):
    if not 1 <= args.n <= MAX_ENUM_ORDER:
        raise CliError(EXIT_DOMAIN, f"enumeration supports 1 <= n <= {MAX_ENUM_ORDER}")
    if not 0 <= args.m <= args.n * (args.n - 1) // 2:
        raise CliError(EXIT_DOMAIN, "edge count out of range")
    codes = connected_codes(args.n, args.m, _jobs(args))
    lines = sorted(Graph(args.n, c).to_graph6() for c in codes)
    rec = {"record": "enumeration", "n": args.n, "m": args.m, "count": len(lines)}
    if args.out:
        Path(args.out).write_text("".join(line + "\n" for line in lines))
        rec["out"] = str(args.out)
    else:
        rec["graph6"] = lines
    _table([("n m", f"{args.n} {args.m}"), ("connected classes", len(lines))])
    return [rec], EXIT_OK


def cmd_search(args, manifest):
    try:
        cfg = SearchConfig(args.v, args.b, args.k, args.criterion, args.p, args.binary,
                           args.restarts, args.max_iterations, args.patience, args.seed)
        res = local_search(cfg)
    except ValueError as exc:
        raise CliError(EXIT_DOMAIN, str(exc)) from None
    manifest.seed = args.seed
    rec = {"record": "search", "v": cfg.v, "b": cfg.b, "k": cfg.k, "criterion": cfg.criterion,
           "p": cfg.p, "score": res.score, "restart": res.restart,
           "blocks": [list(b) for b in res.design.blocks], **res.exact}
    if args.out:
        Path(args.out).write_text(format_design(res.design, [manifest.header_line()]))
    _table([("criterion", cfg.criterion), ("score", f"{res.score:.12g}"),
            ("found in restart", res.restart)] + sorted(res.exact.items()))
    out = [rec]
    if args.trace:
        out += [{"record": "trace", **t} for t in res.trace]
    return out, EXIT_OK


def _point_from_json(path, manifest):
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_CORRUPT, f"{path}: not valid JSON ({exc.msg})") from None
    manifest.add_input(path)
    if not isinstance(data, dict):
        raise CliError(EXIT_CORRUPT, f"{path}: expected a JSON object")
    try:
        problem = KktProblem(int(data["m1"]), int(data["m2"]), float(data["theta1"]),
                             float(data["theta2"]), float(data["p"]), data.get("xi"))
        if data.get("multipliers") == "canonical":
            point = canonical_multipliers(problem)
        else:
            keys = ("nu", "lam", "rho", "eta1", "eta2", "alpha", "beta")
            point = KktPoint(tuple(data["e"]), **{k: data[k] for k in keys if k in data})
    except KeyError as exc:
        raise CliError(EXIT_USAGE, f"{path}: missing field {exc.args[0]}") from None
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_DOMAIN, f"{path}: {exc}") from None
    return problem, point


def cmd_kkt_check(args, manifest):
    problem, point = _point_from_json(args.point, manifest)
    try:
        rep = kkt_residuals(problem, point, args.tol)
    except ValueError as exc:
        raise CliError(EXIT_DOMAIN, str(exc)) from None
    rec = {"record": "kkt", "e": list(point.e), "nu": point.nu, "lam": point.lam,
           "clusters": point.cluster_counts(), **rep.to_record()}
    _table([("stationarity", f"{rep.stationarity:.3g}"), ("slackness", f"{rep.slackness:.3g}"),
            ("feasibility", f"{rep.feasibility:.3g}"), ("verdict", "PASS" if rep.passed else "FAIL")])
    return [rec], EXIT_OK if rep.passed else EXIT_FAIL


def cmd_gdd_spectrum(args, manifest):
    num = args.l1 * (args.n - 1) + args.l2 * args.n * (args.m - 1)
    r = args.r
    if r is None:
        if args.k < 2 or num % (args.k - 1):
            raise CliError(EXIT_DOMAIN, "no integer replication r satisfies r(k-1) = l1(n-1) + l2 n(m-1)")
        r = num // (args.k - 1)
    try:
        params = GddParams(args.m, args.n, args.k, args.l1, args.l2, r)
    except DesignError as exc:
        raise CliError(EXIT_DOMAIN, str(exc)) from None
    eig = params.eigenvalues()
    rec = {"record": "gdd_spectrum", "m": params.m, "n": params.n, "k": params.k,
           "lambda1": params.lambda1, "lambda2": params.lambda2, "r": params.r, "v": params.v,
           "b": params.b, "eigenvalues": [[str(val), mult] for val, mult in eig],
           "spectrum": gdd_spectrum(params).notation()}
    _table([("v b r", f"{params.v} {params.b} {params.r}")]
           + [(f"x{mult}", str(Fraction(val))) for val, mult in eig])
    return [rec], EXIT_OK


def _class_source(args, cand: Design, manifest, jobs):
    if args.enumerate:
        if cand.k != 2:
            raise CliError(EXIT_DOMAIN, "--enumerate builds graph classes; candidate needs k=2")
        if cand.v > MAX_ENUM_ORDER:
            raise CliError(EXIT_DOMAIN, f"enumeration supports v <= {MAX_ENUM_ORDER}")
        return (graph_as_design(Graph(cand.v, c)) for c in connected_codes(cand.v, cand.b, jobs))
    if args.graphs:
        graphs, bad = _read_graphs(args.graphs, manifest)
        if bad:
            raise CliError(EXIT_CORRUPT, f"{args.graphs}: {len(bad)} undecodable lines",
                           {"record": "error", "corrupt_lines": bad})
        return [graph_as_design(g) for g in graphs]
    directory = Path(args.class_dir)
    if not directory.is_dir():
        raise CliError(EXIT_USAGE, f"{directory} is not a directory")
    return [_read_design(f, manifest) for f in sorted(directory.iterdir()) if f.is_file()]


def cmd_theorem_main(args, manifest):
    jobs = _jobs(args)
    cand = _read_design(args.candidate, manifest)
    if not (cand.is_binary and is_connected(cand)):
        raise CliError(EXIT_DOMAIN, "candidate must be binary and connected")
    designs = _class_source(args, cand, manifest, jobs)
    try:
        rep = theorem_main_check(cand, designs, args.p, jobs)
    except (ValueError, SpectrumError) as exc:
        raise CliError(EXIT_DOMAIN, str(exc)) from None
    rec = rep.to_record()
    _table([("class size", rep.class_size), ("same as candidate", rep.same_as_candidate),
            ("two distinct eigenvalues", rep.h0), ("min trace C^2", rep.h1),
            ("E-optimal", rep.h2), ("D-optimal", rep.h3)]
           + [(f"phi_{p:g} optimal/unique", f"{rep.phi_optimal(p)}/{rep.phi_unique(p)}") for p in rep.phi]
           + [("conclusion holds", rep.conclusion)])
    return [{"record": "theorem_main", **rec}], EXIT_OK if rep.conclusion else EXIT_FAIL


# --- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optdesign", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def jobs_flag(p):
        p.add_argument("--jobs", type=int, default=None, help="worker processes (default $OPTDESIGN_JOBS or 1)")

    p = sub.add_parser("eval", help="criteria report for one design file")
    p.add_argument("--design", required=True)
    p.add_argument("--p", type=_p_list, default=DEFAULT_P_GRID, help="comma-separated p grid")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify-petersen", help="check the (10,15) extremal bounds")
    p.add_argument("--graphs", help="graph6 file to use instead of enumerating")
    jobs_flag(p)
    p.set_defaults(func=cmd_verify_petersen)

    p = sub.add_parser("verify-ineq", help="sample the two-valued minimisation property")
    p.add_argument("--m1", type=int, required=True)
    p.add_argument("--m2", type=int, required=True)
    p.add_argument("--theta1", type=float, required=True)
    p.add_argument("--theta2", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_ineq)

    p = sub.add_parser("enum-graphs", help="connected graphs up to isomorphism")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--out", help="write graph6 here (manifest goes to FILE.manifest.json)")
    jobs_flag(p)
    p.set_defaults(func=cmd_enum_graphs)

    p = sub.add_parser("search", help="exchange search for a good design")
    p.add_argument("v", type=int)
    p.add_argument("b", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--criterion", choices=CRITERIA, default="D")
    p.add_argument("--p", type=float, default=None, help="exponent for --criterion phi")
    p.add_argument("--binary", action="store_true")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--max-iterations", type=int, default=MAX_ITERATIONS)
    p.add_argument("--patience", type=int, default=PATIENCE)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the best design in the design file format")
    p.add_argument("--trace", action="store_true", help="emit the improvement trace")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("kkt-check", help="KKT residuals for a point given as JSON")
    p.add_argument("--point", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_kkt_check)

    p = sub.add_parser("gdd-spectrum", help="analytic spectrum from GDD parameters")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l1", type=int, required=True)
    p.add_argument("--l2", type=int, required=True)
    p.add_argument("--r", type=int, default=None, help="replication (derived when omitted)")
    p.set_defaults(func=cmd_gdd_spectrum)

    p = sub.add_parser("theorem-main", help="check the optimality theorem over a class")
    p.add_argument("--candidate", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--class-dir", help="directory of design files")
    src.add_argument("--enumerate", action="store_true", help="all connected graphs with the candidate's v, b")
    src.add_argument("--graphs", help="graph6 file of competitors")
    p.add_argument("--p", type=_p_list, default=DEFAULT_P_GRID)
    jobs_flag(p)
    p.set_defaults(func=cmd_theorem_main)
    return parser


def _flags(args) -> dict:
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(vars(args).items())
            if k not in ("func", "command")}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest = RunManifest(args.command, _flags(args), seed=getattr(args, "seed", None))
    try:
        records, code = args.func(args, manifest)
    except CliError as exc:
        print(f"optdesign {args.command}: {exc}", file=sys.stderr)
        records, code = ([exc.record] if exc.record else []), exc.code
        records.append({"record": "error", "exit": code, "message": str(exc)})
    manifest.finish()
    if getattr(args, "out", None) and code == EXIT_OK and args.command == "enum-graphs":
        manifest.write_sidecar(args.out)
    out = sys.stdout
    print(manifest.header_line(), file=out)
    for rec in records:
        print(json.dumps(rec, sort_keys=True, default=str), file=out)
    return code


if __name__ == "__main__":
    sys.exit(main())
