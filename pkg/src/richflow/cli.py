"""Command-line front door: admissibility checks, synthesis, verification,
exact search, and batch reporting over a directory of graph files.

Exit codes: 0 success, 1 not admissible (or failed verification), 2 parse or
usage error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .errors import (
    AdmissibilityError,
    BudgetExhaustedError,
    GraphInputError,
    InternalDefectError,
    PreconditionError,
)
from .flowalg import GroupTag, read_flow_json, rich_report, verify_flow, write_flow_json
from .multigraph import (
    Multigraph,
    edge_connectivity_at_least,
    is_rich_flow_admissible,
    parse_multigraph,
)
from .oracle import SearchBudget, brute_force_flow, chromatic_index, exact_rich_flow_number
from .synthesis import synthesize_rich_flow

BATCH_COLUMNS = [
    "graph_path",
    "n",
    "m",
    "delta",
    "admissible",
    "chi_prime",
    "exact_R",
    "synth_bound",
    "synth_max_abs",
    "conj1_bound",
    "conj2_applicable",
    "conj2_bound",
    "status",
    "elapsed_ms",
]


def _time_limit() -> float:
    raw = os.environ.get("RICHFLOW_TIME_LIMIT_S", "60")
    try:
        value = float(raw)
    except ValueError:
        raise GraphInputError(f"RICHFLOW_TIME_LIMIT_S is not a number: {raw!r}")
    if value <= 0:
        raise GraphInputError("RICHFLOW_TIME_LIMIT_S must be positive")
    return value


def _load_graph(path: str) -> Multigraph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise GraphInputError(f"cannot read {path}: {exc}") from exc
    return parse_multigraph(text)


def _cmd_check(args) -> int:
    g = _load_graph(args.graph)
    verdict = is_rich_flow_admissible(g)
    print(verdict.describe())
    return 0 if verdict.admissible else 1


def _cmd_synth(args) -> int:
    g = _load_graph(args.graph)
    cert = synthesize_rich_flow(g)
    Path(args.out).write_text(write_flow_json(cert.flow))
    if args.trace:
        for entry in cert.traces:
            print(json.dumps(entry, sort_keys=True))
    print(f"bound = {cert.bound}")
    print(f"max_abs = {cert.max_abs}")
    return 0


def _cmd_verify(args) -> int:
    g = _load_graph(args.graph)
    try:
        text = Path(args.flow).read_text()
    except OSError as exc:
        raise GraphInputError(f"cannot read {args.flow}: {exc}") from exc
    flow = read_flow_json(text, g)
    results: list[tuple[str, bool]] = []
    if flow.group.kind == "int":
        checks = rich_report(g, flow)
        results.append(("conserved", checks.conserved))
        results.append(("nowhere_zero", checks.nowhere_zero))
        results.append(("bound_ok", checks.bound_ok))
        results.append(("adjacent_abs_distinct", checks.adjacent_abs_distinct))
    else:
        rep = verify_flow(g, flow)
        results.append(("conserved", rep.conserved))
        results.append(("nowhere_zero", rep.nowhere_zero))
    for name, ok in results:
        print(f"{name}: {'PASS' if ok else 'FAIL'}")
    return 0 if all(ok for _, ok in results) else 1


def _cmd_exact(args) -> int:
    g = _load_graph(args.graph)
    verdict = is_rich_flow_admissible(g)
    if not verdict.admissible:
        print(verdict.describe())
        print("R = none")
        return 1
    budget = SearchBudget(
        k_max=args.kmax, node_limit=args.node_limit, time_limit=_time_limit()
    )
    result = exact_rich_flow_number(g, budget)
    if result.value is None:
        print(f"R = unknown (budget exhausted up to k_max={args.kmax})")
        return 0
    print(f"R = {result.value}")
    return 0


def _parse_group(spec: str) -> GroupTag:
    if spec == "z2":
        return GroupTag.z2()
    if spec == "z6":
        return GroupTag.z6()
    if spec.startswith("zk:"):
        try:
            k = int(spec[3:])
        except ValueError as exc:
            raise GraphInputError(f"bad group spec {spec!r}") from exc
        try:
            return GroupTag.zk(k)
        except PreconditionError as exc:
            raise GraphInputError(str(exc)) from exc
    raise GraphInputError(f"unknown group {spec!r} (expected z2, z6 or zk:<k>)")


def _cmd_oracle_nz(args) -> int:
    g = _load_graph(args.graph)
    group = _parse_group(args.group)
    budget = SearchBudget(time_limit=_time_limit())
    try:
        flow = brute_force_flow(g, group, require_rich=False, budget=budget)
    except BudgetExhaustedError:
        print("search budget exhausted; existence undecided")
        return 0
    if flow is None:
        print("no nowhere-zero flow exists over this group")
        return 1
    print(write_flow_json(flow), end="")
    return 0


def _conj1_bound(delta: int) -> int:
    return (3 * delta) // 2 + 1


def _batch_row(path: Path) -> dict[str, str]:
    start = time.perf_counter()
    row = {col: "" for col in BATCH_COLUMNS}
    row["graph_path"] = path.name
    status: list[str] = []
    try:
        g = parse_multigraph(path.read_text())
    except (GraphInputError, OSError) as exc:
        row["status"] = f"parse_error: {exc}"
        row["elapsed_ms"] = str(int((time.perf_counter() - start) * 1000))
        return row
    delta = g.max_degree()
    row["n"] = str(g.vertex_count)
    row["m"] = str(g.edge_count)
    row["delta"] = str(delta)
    verdict = is_rich_flow_admissible(g)
    row["admissible"] = "true" if verdict.admissible else "false"
    budget = SearchBudget(k_max=8, node_limit=200_000, time_limit=_time_limit())
    chi = chromatic_index(g, budget)
    row["chi_prime"] = "" if chi.value is None else str(chi.value)
    if chi.value is None:
        status.append("chi_exhausted")
    exact_value: int | None = None
    if verdict.admissible:
        exact = exact_rich_flow_number(g, budget)
        exact_value = exact.value
        row["exact_R"] = "" if exact.value is None else str(exact.value)
        if exact.value is None:
            status.append("R_exhausted")
        cert = synthesize_rich_flow(g)
        row["synth_bound"] = str(cert.bound)
        row["synth_max_abs"] = str(cert.max_abs)
        if delta >= 5:
            row["conj1_bound"] = str(_conj1_bound(delta))
            if exact_value is not None and exact_value > _conj1_bound(delta):
                status.append("conj1_violated")
        three_connected = edge_connectivity_at_least(g, 3)
        row["conj2_applicable"] = "true" if three_connected else "false"
        if three_connected:
            row["conj2_bound"] = str(delta + 3)
            if exact_value is not None and exact_value > delta + 3:
                status.append("conj2_violated")
        status.insert(0, "ok")
    else:
        status.insert(0, "not_admissible")
    row["status"] = ";".join(status)
    row["elapsed_ms"] = str(int((time.perf_counter() - start) * 1000))
    return row


def _cmd_batch(args) -> int:
    directory = Path(args.directory)
    if not directory.is_dir():
        raise GraphInputError(f"not a directory: {directory}")
    paths = sorted(directory.glob("*.graph"))
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_batch_row, paths))
    else:
        rows = [_batch_row(p) for p in paths]
    rows.sort(key=lambda r: r["graph_path"])
    with open(args.report, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=BATCH_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {args.report}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="richflow",
        description="Rich nowhere-zero flows: synthesis, verification, exact search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="print the rich-flow-admissibility verdict")
    p.add_argument("graph")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("synth", help="synthesize and write a rich flow certificate")
    p.add_argument("graph")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--trace", action="store_true", help="dump tower and value choices as JSON lines")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("verify", help="re-check a flow certificate against a graph")
    p.add_argument("graph")
    p.add_argument("flow")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("exact", help="exact rich flow number by brute force")
    p.add_argument("graph")
    p.add_argument("--kmax", type=int, default=16)
    p.add_argument("--node-limit", type=int, default=5_000_000)
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("oracle-nz", help="exhaustive nowhere-zero flow search")
    p.add_argument("graph")
    p.add_argument("--group", required=True, help="z2 | z6 | zk:<odd k>")
    p.set_defaults(func=_cmd_oracle_nz)

    p = sub.add_parser("batch", help="process every *.graph file in a directory")
    p.add_argument("directory")
    p.add_argument("--report", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_batch)
    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if getattr(args, "jobs", 1) is not None and getattr(args, "jobs", 1) < 1:
            raise GraphInputError("--jobs must be at least 1")
        if getattr(args, "kmax", 2) < 2:
            raise GraphInputError("--kmax must be at least 2")
        return args.func(args)
    except AdmissibilityError as exc:
        print(exc.verdict.describe())
        return 1
    except (GraphInputError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InternalDefectError as exc:
        print(f"internal defect: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())
