"""Command-line entry point: ``torsorforge <command> <scenario> [options]``.

Exit codes: 0 success, 1 usage or scenario syntax/reference error,
2 capacity exceeded, 3 invariant violation, 4 oracle mismatch.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from typing import Any

from ._config import resolve_budget
from .bundles import frame_roundtrip, gauge_check, torsor_roundtrip, build_torsor
from .cech import GOOD_COVER_NOTE, cech_h1, compare_cech_group_cohomology
from .cohomology import (ClassificationResult, PiGroup, classify_group_coverings, h1_classes,
                         h1_via_semidirect, match_semidirect)
from .errors import CapacityError, InvariantError, OracleMismatch
from .groups import GroupMorphism, enumerate_automorphisms
from .scenario import INVARIANT, Scenario, ScenarioError, parse_scenario

SCHEMA = "torsorforge.report/1"

COMMANDS = {
    "classify-torsors": "torsors",
    "oracle": "torsors",
    "classify-coverings": "coverings",
    "cech": "cech",
    "compare": "cech",
    "holonomy-roundtrip": "bundle",
    "gauge": "bundle",
    "frame-roundtrip": "frame",
}

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY, EXIT_INVARIANT, EXIT_ORACLE = 0, 1, 2, 3, 4


@dataclass
class Report:
    scenario_hash: str
    command: str
    budget: int
    results: list[dict[str, Any]] = field(default_factory=list)
    failed: bool = False  # some computation reported a mismatch

    def as_dict(self) -> dict[str, Any]:
        return {"schema": SCHEMA, "scenario_sha256": self.scenario_hash, "command": self.command,
                "budget": self.budget, "results": self.results}


def _classes(result: ClassificationResult) -> dict[str, Any]:
    return {"class_count": result.class_count, "cocycle_count": len(result.cocycles),
            "search_size": result.search_size,
            "representatives": [list(v) for v in result.representative_values()]}


def _run_request(command: str, req, budget: int, workers: int) -> dict[str, Any]:
    out: dict[str, Any] = {"request": f"{req.kind} {' '.join(req.refs)}", "line": req.line}
    if command == "classify-torsors":
        out.update(_classes(h1_classes(req.target, budget, workers)))
    elif command == "oracle":
        coeffs: PiGroup = req.target
        direct = h1_classes(coeffs, budget, workers)
        auts = enumerate_automorphisms(coeffs.M)
        Q = auts.as_group
        images = tuple(auts.index(a) for a in coeffs.actions)
        identity = GroupMorphism(Q, Q, tuple(range(Q.order)))
        oracle = h1_via_semidirect(coeffs.pi, coeffs.M, Q, images, identity, auts, budget, workers)
        mapping = match_semidirect(direct, oracle)
        out.update(_classes(direct))
        out["semidirect_class_count"] = oracle.result.class_count
        out["semidirect_representatives"] = [list(v) for v in oracle.result.representative_values()]
        out["matching"] = [[k, mapping[k]] for k in sorted(mapping)]
        out["matched"] = True
    elif command == "classify-coverings":
        P, G = req.target
        out.update(_classes(classify_group_coverings(P, G, budget, workers)))
    elif command == "cech":
        nerve, G, twist = req.target
        result = cech_h1(nerve, G, twist, budget, workers)
        out.update(_classes(result.result))
        out["note"] = GOOD_COVER_NOTE
    elif command == "compare":
        nerve, G, twist = req.target
        rep = compare_cech_group_cohomology(nerve, G, twist, budget, workers)
        out["cech_class_count"], out["group_class_count"] = rep.counts
        out["cech_representatives"] = [list(v) for v in rep.cech.result.representative_values()]
        out["group_representatives"] = [list(v) for v in rep.group.representative_values()]
        out["matching"] = [[k, rep.mapping[k]] for k in sorted(rep.mapping)]
        out["matched"] = rep.matched
        out["problems"] = list(rep.problems)
        out["note"] = GOOD_COVER_NOTE
    elif command == "holonomy-roundtrip":
        rep = torsor_roundtrip(req.target, budget)
        out.update({"cocycle_count": rep.cocycles, "class_count": rep.classes,
                    "isomorphism_classes": rep.isomorphism_classes, "holonomy_ok": rep.holonomy_ok,
                    "partition_ok": rep.partition_ok, "problems": list(rep.problems),
                    "matched": rep.ok})
    elif command == "gauge":
        zeta = req.target
        coeffs = zeta.provenance.coefficients
        h1 = h1_classes(coeffs.coeffs, budget)
        rows = []
        for rep_values in h1.representative_values():
            g = gauge_check(build_torsor(zeta, coeffs.expand(rep_values)))
            rows.append({"representative": list(rep_values), "gauge_order": g.gauge_order,
                         "automorphism_order": g.automorphism_order, "isomorphism": g.isomorphism})
        out["torsors"] = rows
        out["matched"] = all(r["isomorphism"] for r in rows)
    elif command == "frame-roundtrip":
        E, E2 = req.target
        rep = frame_roundtrip(E, E2)
        out["torsor_roundtrip"] = rep.torsor_roundtrip
        out["bundle_roundtrip"] = rep.bundle_roundtrip
        out["matched"] = rep.torsor_roundtrip and rep.bundle_roundtrip
    else:
        raise InvariantError(f"unknown command {command!r}")
    return out


def run(scenario: Scenario, command: str, budget: int | None = None, workers: int = 1) -> Report:
    if command not in COMMANDS:
        raise InvariantError(f"unknown command {command!r}")
    budget = resolve_budget(budget)
    digest = hashlib.sha256(scenario.text.encode("utf-8")).hexdigest()
    report = Report(digest, command, budget)
    for req in scenario.requests:
        if req.kind != COMMANDS[command]:
            continue
        result = _run_request(command, req, budget, workers)
        report.results.append(result)
        if result.get("matched") is False:
            report.failed = True
    return report


def _text_line(command: str, r: dict[str, Any]) -> list[str]:
    head = f"[line {r['line']}] {r['request']}: "
    if command == "oracle":
        lines = [head + f"semidirect {r['semidirect_class_count']} = direct {r['class_count']}"
                 + (", matched" if r["matched"] else ", MISMATCH")]
    elif command == "compare":
        verdict = "matched" if r["matched"] else "MISMATCH"
        lines = [head + f"{r['cech_class_count']} = {r['group_class_count']}, {verdict}"
                 if r["cech_class_count"] == r["group_class_count"]
                 else head + f"{r['cech_class_count']} != {r['group_class_count']}, {verdict}"]
        lines += [f"    problem: {p}" for p in r["problems"]]
    elif command == "holonomy-roundtrip":
        lines = [head + f"{r['cocycle_count']} torsors, {r['class_count']} classes, "
                 f"{r['isomorphism_classes']} isomorphism classes, "
                 + ("round trip ok" if r["matched"] else "ROUND TRIP FAILED")]
        lines += [f"    problem: {p}" for p in r["problems"]]
    elif command == "gauge":
        lines = [head + f"{len(r['torsors'])} torsor classes"]
        for t in r["torsors"]:
            lines.append(f"    rho={t['representative']}: |gauge| = {t['gauge_order']}, "
                         f"|Aut| = {t['automorphism_order']}, "
                         + ("isomorphic" if t["isomorphism"] else "NOT ISOMORPHIC"))
    elif command == "frame-roundtrip":
        lines = [head + f"Fr(P[E]) = P: {'yes' if r['torsor_roundtrip'] else 'NO'}, "
                 f"Fr(E')[E] = E': {'yes' if r['bundle_roundtrip'] else 'NO'}"]
    else:
        lines = [head + f"{r['class_count']} classes ({r['cocycle_count']} cocycles, search {r['search_size']})"]
        lines += [f"    rep {k}: {rep}" for k, rep in enumerate(r["representatives"])]
    if "note" in r:
        lines.append(f"    note: {r['note']}")
    return lines


def emit_report(report: Report, fmt: str = "text") -> bytes:
    if fmt == "json":
        return (json.dumps(report.as_dict(), sort_keys=True, indent=2) + "\n").encode("utf-8")
    if fmt != "text":
        raise InvariantError(f"unknown report format {fmt!r}")
    lines = ["torsorforge report v1", f"scenario: {report.scenario_hash[:16]}",
             f"command: {report.command}", f"budget: {report.budget}"]
    if not report.results:
        lines.append("no computations")
    for r in report.results:
        lines += _text_line(report.command, r)
    return ("\n".join(lines) + "\n").encode("utf-8")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="torsorforge",
                                description="Classify torsors, group coverings and twisted local systems.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("scenario", help="scenario file ('-' for stdin)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--budget", type=int, default=None,
                   help="search budget in assignments (default: $TORSORFORGE_BUDGET or 10^7)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="print elapsed time to stderr")
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    start = time.perf_counter()
    try:
        if args.scenario == "-":
            text = sys.stdin.read()
        else:
            with open(args.scenario, encoding="utf-8") as fh:
                text = fh.read()
        scenario = parse_scenario(text)
        report = run(scenario, args.command, args.budget, max(1, args.workers))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT if exc.code == INVARIANT else EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except OracleMismatch as exc:
        print(f"oracle mismatch: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except InvariantError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    sys.stdout.buffer.write(emit_report(report, args.format))
    sys.stdout.flush()
    if args.timing:
        print(f"elapsed: {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return EXIT_ORACLE if report.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
