"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 unreadable or malformed topology,
3 topology that parses but violates an invariant.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import oracle, scheme as schemes, simulator
from .bounds import AnalysisOptions, BoundReport, analyze, report_to_json
from .cycles import CompletedCycle
from .graphs import GraphBundle, build_bundle
from .topology import (FIXTURE_NAMES, MalformedLine, NetworkTopology, TopologyInvalid, fixture_text,
                       parse_topology)

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_INVALID = 0, 1, 2, 3


class UsageError(Exception):
    pass


class UnknownFormat(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# DOT ----------------------------------------------------------------------

ALIGN_STYLE = "style=solid color=black"
CONFLICT_STYLE = "style=dashed color=red"


def _set_label(s) -> str:
    return "{" + ",".join(map(str, s)) + "}"


def emit_dot(obj, name: str | None = None) -> str:
    """DOT text for a GraphBundle (messages) or a CompletedCycle."""
    if isinstance(obj, GraphBundle):
        lines = [f"graph {name or 'interference'} {{"]
        lines += [f"  W{k};" for k in obj.topology.users]
        lines += [f"  W{i} -- W{j} [{ALIGN_STYLE}];" for i, j in sorted(obj.alignment_edges)]
        lines += [f"  W{i} -- W{j} [{CONFLICT_STYLE}];" for i, j in sorted(obj.conflict_edges)]
    elif isinstance(obj, CompletedCycle):
        lines = [f"graph {name or 'completed_cycle'} {{"]
        nodes = sorted({v for p in obj.internal_paths for v in p} | {v for e in obj.conflict_edges for v in e})
        lines += [f"  W{k};" for k in nodes]
        for path in obj.internal_paths:
            lines += [f"  W{u} -- W{v} [{ALIGN_STYLE}];" for u, v in zip(path, path[1:])]
        lines += [f"  W{a} -- W{b} [{CONFLICT_STYLE}];" for a, b in obj.conflict_edges]
    else:
        raise TypeError(f"cannot render {type(obj).__name__}")
    return "\n".join(lines) + "\n}\n"


def emit_reduced_dot(bundle: GraphBundle) -> str:
    lines = ["graph reduced {"]
    lines += [f'  A{i} [label="{_set_label(bundle.sets[i])}"];' for i in bundle.reduced_vertices]
    lines += [f"  A{i} -- A{j} [{CONFLICT_STYLE}];" for i, j in sorted(bundle.reduced_edges)]
    return "\n".join(lines) + "\n}\n"


# reports --------------------------------------------------------------------

def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def emit_report(report: BoundReport, fmt: str = "text") -> str:
    if fmt == "json":
        return _dumps(report_to_json(report))
    if fmt != "text":
        raise UnknownFormat(fmt)
    b = report.bundle
    edges = lambda es: " ".join(f"{{{i},{j}}}" for i, j in sorted(es)) or "-"  # noqa: E731
    rows = [
        ("users", str(b.K)),
        ("alignment edges", edges(b.alignment_edges)),
        ("conflict edges", edges(b.conflict_edges)),
        ("alignment sets", " ".join(_set_label(s) for s in b.sets)),
        ("internal conflicts", edges(b.internal_conflicts)),
        ("reduced graph", " ".join(_set_label(s) for s in b.reduced_sets()) or "-"),
        ("reduced bipartite", "yes" if b.reduced_bipartite.bipartite else "no"),
        ("C1 (no internal conflict)", "ok" if report.c1_ok else "violated"),
        ("C2 (no odd reduced cycle)", "ok" if report.c2_ok else "violated"),
        ("1/2 DoF feasible", "yes" if report.half_dof_feasible else "no"),
    ]
    if report.certificate is not None:
        p = report.certificate.params
        rows += [
            ("completed cycle", " ".join(f"{a}-{c}" for a, c in report.certificate.conflict_edges)),
            ("m, m2, l_sigma", f"{p.m}, {p.m2}, {p.l_sigma}"),
            ("DoF upper bound", f"{report.theorem1_bound.numerator}/{report.theorem1_bound.denominator}"),
            ("possibly not tightest", "yes" if report.possibly_not_tightest else "no"),
        ]
    width = max(len(k) for k, _ in rows)
    out = [f"{k.ljust(width)}  {v}" for k, v in rows]
    out += [f"note: {n}" for n in report.notes]
    return "\n".join(out) + "\n"


def _scheme_text(result) -> str:
    if isinstance(result, schemes.Infeasible):
        return f"infeasible: {result.reason}\n"
    nd = result.nominal_dof
    lines = [f"slots {result.slots}", f"nominal DoF per user {nd.numerator}/{nd.denominator}",
             f"commons {'on' if result.common_active else 'off'}"]
    for s, c in result.colors.items():
        lines.append(f"  {_set_label(s)} -> slot {c}")
    return "\n".join(lines) + "\n"


# commands -------------------------------------------------------------------

def _load(path: str) -> NetworkTopology:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedLine(0, f"cannot read {path}: {exc.strerror}") from exc
    return parse_topology(text)


def _options(args) -> AnalysisOptions:
    if args.exhaustive:
        return AnalysisOptions.exhaustive()
    return AnalysisOptions(max_cycle_len=args.max_cycle_len)


def cmd_analyze(args, out) -> int:
    report = analyze(_load(args.topology), _options(args))
    out.write(emit_report(report, "json" if args.json else "text"))
    if args.dot:
        d = Path(args.dot)
        d.mkdir(parents=True, exist_ok=True)
        (d / "graphs.dot").write_text(emit_dot(report.bundle), encoding="utf-8", newline="\n")
        (d / "reduced.dot").write_text(emit_reduced_dot(report.bundle), encoding="utf-8", newline="\n")
        if report.certificate is not None:
            (d / "cycle.dot").write_text(emit_dot(report.certificate), encoding="utf-8", newline="\n")
    return EXIT_OK


def _pick_scheme(bundle: GraphBundle, kind: str):
    if kind == "half":
        return schemes.build_half_scheme(bundle)
    if kind == "four-ninths":
        return schemes.build_four_ninths_scheme(bundle)
    half = schemes.build_half_scheme(bundle)
    return half if not isinstance(half, schemes.Infeasible) else schemes.build_four_ninths_scheme(bundle)


def cmd_scheme(args, out) -> int:
    topo = _load(args.topology)
    result = _pick_scheme(build_bundle(topo), args.kind)
    if args.json:
        if isinstance(result, schemes.Infeasible):
            payload = {"feasible": False, "reason": result.reason}
        else:
            check = schemes.validate_scheme_structure(result, topo)
            payload = {"feasible": True, "scheme": result.to_json(), "validation_ok": check.ok,
                       "failures": check.failures()}
        out.write(_dumps(payload))
    else:
        out.write(_scheme_text(result))
        if not isinstance(result, schemes.Infeasible):
            check = schemes.validate_scheme_structure(result, topo)
            out.write("structure: " + ("all checks pass" if check.ok else "; ".join(check.failures())) + "\n")
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    topo = _load(args.topology)
    result = _pick_scheme(build_bundle(topo), args.kind)
    if isinstance(result, schemes.Infeasible):
        sys.stderr.write(f"no scheme: {result.reason}\n")
        return EXIT_USAGE
    rows = []
    if args.awgn:
        if not args.snr_db:
            raise UsageError("--awgn needs --snr-db")
        for snr in args.snr_db:
            cfg = simulator.SimConfig(pbar=args.pbar[0], qc=args.qc, trials=args.trials, seed=args.seed,
                                      mode="awgn", snr_db=snr, qp=args.qp, threads=args.threads)
            rows.append(simulator.run_awgn_trials(result, topo, cfg))
    else:
        for pbar in args.pbar:
            cfg = simulator.SimConfig(pbar=pbar, qc=args.qc, trials=args.trials, seed=args.seed,
                                      delta_c=args.delta_c, threads=args.threads)
            rows.append(simulator.run_deterministic_trials(result, topo, cfg))
    text = simulator.summaries_to_csv(rows)
    if args.csv:
        Path(args.csv).write_text(text, encoding="utf-8", newline="\n")
    if args.json:
        out.write(_dumps([dict(s.csv_row(), snr_db=s.snr_db) for s in rows]))
    else:
        out.write(text)
    return EXIT_OK


def cmd_oracle(args, out) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []  # (check, params, measured, bound)

    if args.check in ("all", "submodularity"):
        worst = -np.inf
        for _ in range(args.triples):
            d = [oracle.random_distribution(rng) for _ in range(3)]
            r = oracle.check_submodularity(*d)
            worst = max(worst, r.joint_lhs - r.joint_rhs, r.independent_lhs - r.independent_rhs)
        rows.append(("submodularity", f"triples={args.triples}", worst, 1e-9))
    if args.check in ("all", "interval"):
        worst_ratio = 0.0
        for a in range(args.interval_max + 1):
            for a2 in range(args.interval_max + 1):
                if a != a2:
                    c = oracle.check_alignment_interval(a, a2, step=args.step)
                    worst_ratio = max(worst_ratio, c.extent / c.bound)
        rows.append(("interval", f"a,a' in 0..{args.interval_max}", worst_ratio, 1.0))
    if args.check in ("all", "image", "probability"):
        inst = oracle.AisInstance.random(args.m, args.pbar, rng)
        sup = oracle.build_support(inst)
        if args.check in ("all", "image"):
            nu = sup.z[int(rng.integers(len(sup)))]
            r = oracle.expected_image_size_check(inst, nu, args.samples, args.seed, sup, threads=args.threads)
            rows.append(("image_size", f"m={args.m} pbar={args.pbar}", r.mean + 3 * r.stderr, r.bound))
        if args.check in ("all", "probability"):
            worst = 0.0
            for _ in range(args.pairs):
                i, j = rng.choice(len(sup), size=2, replace=False)
                e = oracle.estimate_alignment_probability(inst, sup.z[i], sup.z[j], args.samples,
                                                          int(rng.integers(2 ** 32)), sup)
                worst = max(worst, (e.estimate - 3 * e.stderr) / e.bound)
            rows.append(("probability", f"pairs={args.pairs}", worst, 1.0))

    lines = [f"{'check':<14} {'params':<22} {'measured':>14} {'bound':>14} verdict"]
    csv_lines = ["check,params,measured,bound,margin"]
    ok = True
    for name, params, measured, bound in rows:
        passed = measured <= bound
        ok &= passed
        lines.append(f"{name:<14} {params:<22} {measured:>14.6g} {bound:>14.6g} {'pass' if passed else 'FAIL'}")
        csv_lines.append(f"{name},{params},{measured:.9g},{bound:.9g},{bound - measured:.9g}")
    out.write("\n".join(lines) + "\n")
    if args.csv:
        Path(args.csv).write_text("\n".join(csv_lines) + "\n", encoding="utf-8", newline="\n")
    return EXIT_OK if ok else EXIT_USAGE


def cmd_fixtures(args, out) -> int:
    names = [args.name] if args.name else list(FIXTURE_NAMES)
    if args.name and args.name not in FIXTURE_NAMES:
        raise UsageError(f"unknown fixture {args.name!r}; choose from {', '.join(FIXTURE_NAMES)}")
    if args.write:
        d = Path(args.write)
        d.mkdir(parents=True, exist_ok=True)
        for n in names:
            (d / f"{n}.tim").write_text(fixture_text(n), encoding="utf-8", newline="\n")
        out.write("".join(f"{d / (n + '.tim')}\n" for n in names))
    elif args.name:
        out.write(fixture_text(args.name))
    else:
        out.write("".join(f"{n}\n" for n in names))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="timdof", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="graphs, 1/2-DoF conditions and the odd-cycle bound")
    a.add_argument("topology")
    a.add_argument("--json", action="store_true")
    a.add_argument("--dot", metavar="DIR")
    a.add_argument("--max-cycle-len", type=int, default=9)
    a.add_argument("--exhaustive", action="store_true", help="lift the cycle enumeration caps")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("scheme", help="build and validate a slot scheme")
    s.add_argument("topology")
    s.add_argument("--kind", choices=("auto", "half", "four-ninths"), default="auto")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_scheme)

    m = sub.add_parser("simulate", help="run a scheme on the deterministic or AWGN channel")
    m.add_argument("topology")
    m.add_argument("--kind", choices=("auto", "half", "four-ninths"), default="auto")
    m.add_argument("--pbar", type=int, nargs="+", default=[10 ** 4])
    m.add_argument("--qc", type=int, default=4)
    m.add_argument("--qp", type=int, default=16, help="private PAM size for --awgn")
    m.add_argument("--delta-c", type=float, default=None,
                   help="common backoff: use floor(pbar**(1/3 - delta_c)) common levels")
    m.add_argument("--trials", type=int, default=500)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--threads", type=int, default=1)
    m.add_argument("--awgn", action="store_true")
    m.add_argument("--snr-db", type=float, nargs="+")
    m.add_argument("--csv", metavar="FILE")
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_simulate)

    o = sub.add_parser("oracle", help="numerical checks of the aligned-image-set bounds")
    o.add_argument("--check", choices=("all", "submodularity", "interval", "image", "probability"), default="all")
    o.add_argument("--m", type=int, default=3)
    o.add_argument("--pbar", type=int, default=4)
    o.add_argument("--samples", type=int, default=2000)
    o.add_argument("--pairs", type=int, default=50)
    o.add_argument("--triples", type=int, default=100)
    o.add_argument("--interval-max", type=int, default=12)
    o.add_argument("--step", type=float, default=1e-6)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--threads", type=int, default=1)
    o.add_argument("--csv", metavar="FILE")
    o.set_defaults(func=cmd_oracle)

    f = sub.add_parser("fixtures", help="list, print or write the bundled topologies")
    f.add_argument("name", nargs="?")
    f.add_argument("--write", metavar="DIR")
    f.set_defaults(func=cmd_fixtures)
    return p


def run_cli(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except MalformedLine as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except TopologyInvalid as exc:
        err.write(f"invalid topology: {exc}\n")
        return EXIT_INVALID


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
