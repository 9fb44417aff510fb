"""Command-line front end.

Subcommands: generate, analyze, project, equiv, wr-realize, simulate.
Exit codes: 0 success / affirmative verdict, 1 negative verdict, 2 usage
error, 3 precondition violation, 4 search exhausted. All randomized
procedures take --seed (fallback: the CRN_SEED environment variable,
default 0) and record it in their output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import families, geometry, io
from .dynamics import (
    MassActionSystem,
    VariableRate,
    dynamically_equivalent,
    relative_network,
    wr_realize_detailed,
)
from .network import (
    NetworkError,
    is_bimolecular_autocatalytic,
    is_reversible,
    is_strongly_connected,
    is_weakly_reversible,
    linkage_classes,
    pairwise_production_check,
    production_graph,
)
from .simulate import (
    BlowUp,
    IntegrateOptions,
    ProbeOptions,
    integrate,
    permanence_probe,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_EXHAUSTED = 4


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("CRN_SEED", "0"))


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_generate(args) -> int:
    maker = families.FAMILIES.get(args.family)
    if maker is None:
        print(f"unknown family {args.family!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        net = maker(args.n)
    except NetworkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys_ = MassActionSystem.with_unit_rates(net)
    if args.relative:
        try:
            sys_ = relative_network(sys_)
        except NetworkError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PRECONDITION
    _write(io.format_system(sys_), args.output)
    return EXIT_OK


def _analysis_report(sys_: MassActionSystem, seed: int, extra_directions: int) -> dict:
    net = sys_.network
    classes = linkage_classes(net)
    bimolecular = is_bimolecular_autocatalytic(net)
    pg = production_graph(net)
    report: dict = {
        "seed": seed,
        "network": {
            "species": [s.name for s in net.species],
            "n_reactions": len(net.reactions),
            "n_complexes": len(net.complexes),
            "linkage_classes": [[c.format(net.species) for c in cls] for cls in classes],
        },
        "flags": {
            "reversible": is_reversible(net),
            "weakly_reversible": is_weakly_reversible(net),
            "bimolecular_autocatalytic": bimolecular,
        },
        "production_graph": {
            "edges": sorted([i, j] for i, j in pg.edges),
            "strongly_connected": is_strongly_connected(pg),
        },
    }
    if bimolecular and net.n_species >= 1:
        holds, pair = pairwise_production_check(net)
        report["flags"]["pairwise_production"] = {
            "holds": holds,
            "failing_pair": list(pair) if pair else None,
        }
    else:
        report["flags"]["pairwise_production"] = None

    geo: dict = {}
    if net.reactions:
        contained = geometry.sources_contain_all_vertices(net)
        geo["sources_contain_all_vertices"] = contained
        if contained:
            result = geometry.strongly_endotactic_exact(net)
            geo["strongly_endotactic"] = {
                "decided": True,
                "value": result.strongly_endotactic,
                "witness_face": result.witness_face.to_json() if result.witness_face else None,
                "reason": None,
            }
        else:
            geo["strongly_endotactic"] = {
                "decided": False,
                "value": None,
                "witness_face": None,
                "reason": "vertices leave the source hull; only the sampled sweep applies",
            }
        directions = geometry.candidate_directions(net, extra=extra_directions, seed=seed)
        if directions:
            geo["parallel_sweep"] = geometry.parallel_sweep_sampled(net, directions).to_json()
            geo["endotactic_sweep"] = geometry.endotactic_sampled(net, directions).to_json()
        else:
            geo["parallel_sweep"] = None
            geo["endotactic_sweep"] = None
        geo["directions_tested"] = len(directions)
    else:
        geo = {
            "sources_contain_all_vertices": True,
            "strongly_endotactic": {
                "decided": False,
                "value": None,
                "witness_face": None,
                "reason": "empty network",
            },
            "parallel_sweep": None,
            "endotactic_sweep": None,
            "directions_tested": 0,
        }
    report["geometry"] = geo
    return report


def _format_text_report(report: dict) -> str:
    lines = []
    net = report["network"]
    lines.append(f"species: {', '.join(net['species'])}")
    lines.append(f"reactions: {net['n_reactions']}   complexes: {net['n_complexes']}")
    lines.append(f"linkage classes: {len(net['linkage_classes'])}")
    flags = report["flags"]
    lines.append(f"reversible: {flags['reversible']}   weakly reversible: {flags['weakly_reversible']}")
    lines.append(f"bimolecular autocatalytic: {flags['bimolecular_autocatalytic']}")
    pp = flags["pairwise_production"]
    if pp is not None:
        lines.append(
            "pairwise production: "
            + ("holds" if pp["holds"] else f"fails at pair {tuple(pp['failing_pair'])}")
        )
    pg = report["production_graph"]
    lines.append(
        f"production graph: {len(pg['edges'])} edges, strongly connected: {pg['strongly_connected']}"
    )
    geo = report["geometry"]
    lines.append(f"vertices inside source hull: {geo['sources_contain_all_vertices']}")
    se = geo["strongly_endotactic"]
    if se["decided"]:
        if se["value"]:
            lines.append("strongly endotactic: True (exact face criterion)")
        else:
            lines.append(
                f"strongly endotactic: False, witness face vertices {se['witness_face']['vertex_indices']}"
            )
    else:
        lines.append(f"strongly endotactic: not decided ({se['reason']})")
    for key, title in (("parallel_sweep", "parallel sweep"), ("endotactic_sweep", "endotactic sweep")):
        verdict = geo[key]
        if verdict is None:
            lines.append(f"{title}: not run")
        elif verdict["refuted"]:
            lines.append(f"{title}: refuted, witness direction {verdict['witness_direction']}")
        else:
            lines.append(f"{title}: no violation among {verdict['directions_tested']} directions")
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    sys_ = io.load_system(args.file)
    report = _analysis_report(sys_, _seed(args), args.extra_directions)
    if args.json:
        _write(json.dumps(report, indent=2) + "\n", args.output)
    else:
        _write(_format_text_report(report), args.output)
    return EXIT_OK


def cmd_project(args) -> int:
    sys_ = io.load_system(args.file)
    try:
        rel = relative_network(sys_)
    except NetworkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    _write(io.format_system(rel), args.output)
    return EXIT_OK


def cmd_equiv(args) -> int:
    a = io.load_system(args.file_a)
    b = io.load_system(args.file_b)
    try:
        report = dynamically_equivalent(a, b)
    except NetworkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    if args.json:
        _write(json.dumps(report.to_json(), indent=2) + "\n", args.output)
    else:
        _write(("equivalent\n" if report.equivalent else "not equivalent\n"), args.output)
    return EXIT_OK if report.equivalent else EXIT_NEGATIVE


def cmd_wr_realize(args) -> int:
    sys_ = io.load_system(args.file)
    found = wr_realize_detailed(sys_, max_splits=args.budget, node_limit=args.node_limit)
    if found is None:
        print("no weakly reversible single-linkage realization found within budget", file=sys.stderr)
        return EXIT_EXHAUSTED
    payload = found.to_json()
    payload["seed"] = _seed(args)
    _write(json.dumps(payload, indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    sys_ = io.load_system(args.file)
    seed = _seed(args)
    n = sys_.network.n_species
    if args.probe_permanence:
        opts = ProbeOptions(t_max=args.t_max, seed=seed, delta_floor=args.delta_floor)
        if args.variable_k is not None:
            profiles = [VariableRate(Fraction(args.variable_k), args.profile)]
        else:
            profiles = [None]
        try:
            report = permanence_probe(
                sys_, n_inits=args.simplex_random or 100, rate_profiles=profiles, opts=opts
            )
        except NetworkError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PRECONDITION
        _write(json.dumps(report.to_json(), indent=2) + "\n", args.report or args.output)
        return EXIT_OK if report.verdict == "consistent_with_permanence" else EXIT_NEGATIVE

    if args.variable_k is not None:
        sys_ = sys_.with_variable_rates(Fraction(args.variable_k), args.profile)
    if args.x0 is not None:
        x0 = [float(v) for v in args.x0.split(",")]
        if len(x0) != n:
            print(f"error: x0 has {len(x0)} entries, expected {n}", file=sys.stderr)
            return EXIT_USAGE
        inits = [np.asarray(x0)]
    elif args.simplex_random:
        rng = np.random.default_rng(seed)
        inits = list(rng.dirichlet(np.ones(n), size=args.simplex_random))
    else:
        inits = [np.ones(n)]
    opts = IntegrateOptions(t_max=args.t_max, rtol=args.rtol, seed=seed)
    summaries = []
    last_traj = None
    for idx, x0 in enumerate(inits):
        try:
            traj = integrate(sys_, x0, opts)
        except NetworkError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        last_traj = traj
        summaries.append(
            {
                "initial": [float(v) for v in x0],
                "outcome": traj.outcome.to_json(),
                "final_time": float(traj.times[-1]),
                "final_state": [float(v) for v in traj.states[-1]],
            }
        )
    if args.output:
        last_traj.to_csv(args.output)
    report = {"seed": seed, "t_max": args.t_max, "runs": summaries}
    _write(json.dumps(report, indent=2) + "\n", args.report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crnkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit a family network file")
    p.add_argument("--family", required=True, choices=sorted(families.FAMILIES))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--relative", action="store_true", help="emit the relative-population network")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", help="full structural analysis report")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--extra-directions", type=int, default=16)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("project", help="write the relative-population network")
    p.add_argument("file")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("equiv", help="decide dynamic equivalence of two systems")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("wr-realize", help="search for a weakly reversible single-linkage realization")
    p.add_argument("file")
    p.add_argument("--budget", type=int, default=None, help="max total splits")
    p.add_argument("--node-limit", type=int, default=20000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_wr_realize)

    p = sub.add_parser("simulate", help="integrate trajectories / probe permanence")
    p.add_argument("file")
    p.add_argument("--x0", default=None, help="comma-separated initial state")
    p.add_argument("--simplex-random", type=int, default=None, metavar="N")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--variable-k", default=None, metavar="EPS")
    p.add_argument("--profile", default="piecewise", choices=["piecewise", "sin"])
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--rtol", type=float, default=1e-8)
    p.add_argument("--probe-permanence", action="store_true")
    p.add_argument("--delta-floor", type=float, default=1e-3)
    p.add_argument("-o", "--output", default=None, help="trajectory CSV path")
    p.add_argument("--report", default=None, help="JSON report path (default stdout)")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except io.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
