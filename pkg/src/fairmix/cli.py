"""Command-line front end: audit, mix, optimize, sample, figure, counterexample.

Every command is deterministic given its flags: JSON output goes
through the canonical emitter (sorted keys, fixed float precision), CSV
through the stdlib writer with fixed headers, and all randomness is
seeded. Exit codes: 0 success, 1 input or contract error, 2 infeasible,
3 not found.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import ensemble as ensemble_mod
from . import jsonio, metrics, optimizer
from .classifiers import load_prediction_matrix, save_prediction_matrix
from .dataset import Dataset, build_counterfactual_pairs, load_dataset, save_dataset
from .ensemble import Ensemble, ensemble_report
from .errors import FairmixError
from .metrics import LINEAR_KINDS, MetricKind
from .optimizer import Objective
from .scenarios import scenario_by_name, scenario_prediction_matrix, verify_scenario
from .simplex import SolveStatus

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_NOT_FOUND = 3

_LINEAR_KIND_NAMES = sorted(k.value for k in LINEAR_KINDS)


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; this artifact reserves 2 for infeasible."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--tol", type=float, default=metrics.DEFAULT_TOLERANCE,
        help="fairness tolerance (default 1e-9)",
    )
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument(
        "--out", default=None, help="output path (default: stdout)"
    )
    common.add_argument(
        "--format", choices=("json", "csv"), default="json", dest="fmt",
        help="output format (default json)",
    )
    return common


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="fairmix",
        description=(
            "Audit group fairness of classifiers and random ensembles, solve "
            "for fair mixture weights, and reproduce the built-in scenarios."
        ),
    )
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "audit", parents=[common],
        help="fairness report for classifiers or a weighted ensemble",
    )
    p.add_argument("dataset", help="dataset CSV (f_1..f_d,y,z)")
    p.add_argument("predictions", help="prediction matrix CSV (clf_1..clf_M)")
    p.add_argument(
        "--weights", default=None,
        help="weights JSON; when given, audit the ensemble instead of members",
    )
    p.set_defaults(func=cmd_audit)

    for name, objective, extra_help in (
        ("mix", Objective.FEASIBILITY_ONLY, "solve for any fair mixture"),
        ("optimize", Objective.MAX_ACCURACY, "maximize accuracy under fairness"),
    ):
        p = sub.add_parser(name, parents=[common], help=extra_help)
        p.add_argument("dataset")
        p.add_argument("predictions")
        p.add_argument(
            "--metric", action="append", choices=_LINEAR_KIND_NAMES, default=None,
            help="constrained metric kind, repeatable (default acceptance_rate)",
        )
        p.set_defaults(func=cmd_solve, default_objective=objective)
        if name == "optimize":
            p.add_argument(
                "--objective", choices=("accuracy", "feasibility"),
                default="accuracy",
            )
            p.add_argument(
                "--verify", action="store_true",
                help="cross-check against the exhaustive grid oracle",
            )
            p.add_argument("--oracle-resolution", type=int, default=200)

    p = sub.add_parser(
        "sample", parents=[common],
        help="Monte Carlo simulation of a weighted ensemble",
    )
    p.add_argument("dataset")
    p.add_argument("predictions")
    p.add_argument("weights")
    p.add_argument("--n", type=int, default=1000, help="number of draws")
    p.add_argument(
        "--per-instance", action="store_true",
        help="draw an independent member per instance instead of per decision",
    )
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser(
        "figure", parents=[common],
        help="emit a built-in scenario and run its self-test",
    )
    p.add_argument("number", choices=("1", "2", "3", "4"))
    p.add_argument(
        "--out-dir", default=None,
        help="write dataset.csv, predictions.csv, weights.json, expectations.json here",
    )
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser(
        "counterexample", parents=[common],
        help="search for a PPV non-closure witness",
    )
    p.add_argument("--max-trials", type=int, default=10000)
    p.add_argument(
        "--out-dir", default=None,
        help="write the witness dataset/predictions/weights here",
    )
    p.set_defaults(func=cmd_counterexample)
    return parser


def _write_text(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _dump_weights(path: str, weights) -> None:
    # data artifact, not a report: stdlib repr floats round-trip exactly
    doc = {"weights": [float(w) for w in weights]}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def _load_weights(path: str) -> list[float]:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FairmixError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("weights"), list):
        raise FairmixError(f'{path}: expected an object with a "weights" array')
    weights = doc["weights"]
    for w in weights:
        if isinstance(w, bool) or not isinstance(w, (int, float)):
            raise FairmixError(f"{path}: non-numeric weight {w!r}")
    return [float(w) for w in weights]


def _metric_rows(report_doc: dict, label: str) -> list[list]:
    def cell(v):
        return "" if v is None else v

    rows = []
    for entry in report_doc["metrics"]:
        rows.append(
            [
                label,
                entry["kind"],
                cell(entry["value_z0"]),
                cell(entry["value_z1"]),
                cell(entry["gap"]),
                cell(entry["pass"]),
            ]
        )
    return rows


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def cmd_audit(args) -> int:
    dataset = load_dataset(args.dataset)
    members = load_prediction_matrix(args.predictions, dataset)
    pairs = build_counterfactual_pairs(dataset)
    if args.weights is not None:
        ens = Ensemble(members, _load_weights(args.weights))
        report = ensemble_report(ens, dataset, pairs, args.tol)
        doc = report.to_json_dict()
        docs = [("ensemble", doc)]
        out_doc = doc
    else:
        reports = [
            metrics.classifier_report(m.predictions, dataset, pairs, args.tol)
            for m in members
        ]
        docs = [(f"clf_{j + 1}", r.to_json_dict()) for j, r in enumerate(reports)]
        out_doc = docs[0][1] if len(docs) == 1 else {"reports": [d for _, d in docs]}
    if args.fmt == "csv":
        rows = []
        for label, doc in docs:
            rows.extend(_metric_rows(doc, label))
        text = _csv_text(
            ["classifier", "kind", "value_z0", "value_z1", "gap", "pass"], rows
        )
    else:
        text = jsonio.dumps(out_doc)
    _write_text(text, args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    dataset = load_dataset(args.dataset)
    members = load_prediction_matrix(args.predictions, dataset)
    names = args.metric or [MetricKind.ACCEPTANCE_RATE.value]
    kinds = [MetricKind(name) for name in names]
    objective = args.default_objective
    if getattr(args, "objective", None) == "feasibility":
        objective = Objective.FEASIBILITY_ONLY
    solution = optimizer.solve_fair_mixture(
        members, dataset, kinds, args.tol, objective
    )
    doc = solution.to_json_dict()
    if getattr(args, "verify", False):
        oracle = optimizer.grid_oracle(
            members, dataset, kinds, args.tol, args.oracle_resolution
        )
        oracle_doc = oracle.to_json_dict()
        oracle_doc["consistent"] = _oracle_consistent(solution, oracle)
        doc["oracle"] = oracle_doc
    if args.fmt == "csv":
        if solution.weights is None:
            rows = []
        else:
            rows = [[j + 1, w] for j, w in enumerate(solution.weights)]
        text = _csv_text(["member", "weight"], rows)
    else:
        text = jsonio.dumps(doc)
    _write_text(text, args.out)
    if solution.status is SolveStatus.INFEASIBLE:
        return EXIT_INFEASIBLE
    if solution.status is not SolveStatus.OPTIMAL:
        return EXIT_ERROR
    return EXIT_OK


def _oracle_consistent(
    solution: optimizer.MixtureSolution, oracle: optimizer.GridOracleResult
) -> bool:
    if solution.status is not SolveStatus.OPTIMAL:
        # every lattice-feasible point is LP-feasible, so a feasible
        # oracle plus an infeasible LP is a contradiction
        return oracle.feasible_count == 0
    if oracle.accuracy is None:
        return True
    return oracle.accuracy <= solution.accuracy + 1e-9


def cmd_sample(args) -> int:
    dataset = load_dataset(args.dataset)
    members = load_prediction_matrix(args.predictions, dataset)
    ens = Ensemble(members, _load_weights(args.weights))
    result = ensemble_mod.sample(
        ens, dataset, args.n, args.seed, per_instance=args.per_instance
    )
    if args.fmt == "csv":
        rows = []
        for i in range(result.n_draws):
            member = "" if result.member_indices is None else int(
                result.member_indices[i]
            )
            cells = [i + 1, member]
            for z in (0, 1):
                rates = result.per_draw_rates[z]
                cells.append("" if rates is None else repr(float(rates[i])))
            rows.append(cells)
        text = _csv_text(["draw", "member_index", "rate_z0", "rate_z1"], rows)
    else:
        text = jsonio.dumps(result.to_json_dict())
    _write_text(text, args.out)
    return EXIT_OK


def cmd_figure(args) -> int:
    if args.fmt == "csv":
        raise FairmixError("figure emits files plus a JSON summary; use --format json")
    scenario = scenario_by_name(f"figure{args.number}")
    checks = verify_scenario(scenario)
    ok = all(c.ok for c in checks)
    if args.out_dir is not None:
        os.makedirs(args.out_dir, exist_ok=True)
        save_dataset(os.path.join(args.out_dir, "dataset.csv"), scenario.dataset)
        save_prediction_matrix(
            os.path.join(args.out_dir, "predictions.csv"),
            scenario_prediction_matrix(scenario),
        )
        _dump_weights(
            os.path.join(args.out_dir, "weights.json"), scenario.prescribed_weights
        )
        jsonio.dump_path(
            scenario.expectations, os.path.join(args.out_dir, "expectations.json")
        )
    doc = {
        "scenario": scenario.name,
        "description": scenario.description,
        "instances": len(scenario.dataset),
        "members": len(scenario.members),
        "weights": list(scenario.prescribed_weights),
        "checks": [c.to_json_dict() for c in checks],
        "ok": ok,
    }
    _write_text(jsonio.dumps(doc), args.out)
    return EXIT_OK if ok else EXIT_ERROR


def cmd_counterexample(args) -> int:
    if args.fmt == "csv":
        raise FairmixError("counterexample supports only JSON output")
    if args.max_trials < 0:
        raise FairmixError(f"--max-trials must be >= 0, got {args.max_trials}")
    witness = optimizer.ppv_counterexample_search(args.seed, args.max_trials)
    if witness is None:
        print(
            f"fairmix: no witness found within {args.max_trials} trials",
            file=sys.stderr,
        )
        return EXIT_NOT_FOUND
    ens = Ensemble(witness.members, np.asarray(witness.weights))
    verification = {
        "member_ppv": [],
        "ensemble_ppv_z0": ensemble_mod.ensemble_group_rate(
            ens, MetricKind.PPV, witness.dataset, 0
        ),
        "ensemble_ppv_z1": ensemble_mod.ensemble_group_rate(
            ens, MetricKind.PPV, witness.dataset, 1
        ),
        "ensemble_gap_recomputed": ensemble_mod.ensemble_gap(
            ens, MetricKind.PPV, witness.dataset
        ),
    }
    for member in witness.members:
        counts = {}
        for z in (0, 1):
            num, den = metrics.rate_counts(
                MetricKind.PPV, member.predictions, witness.dataset, z
            )
            counts[f"z{z}"] = {"hits": num, "size": den}
        verification["member_ppv"].append(counts)
    if args.out_dir is not None:
        os.makedirs(args.out_dir, exist_ok=True)
        save_dataset(os.path.join(args.out_dir, "dataset.csv"), witness.dataset)
        matrix = np.stack([m.predictions for m in witness.members])
        save_prediction_matrix(
            os.path.join(args.out_dir, "predictions.csv"), matrix
        )
        _dump_weights(os.path.join(args.out_dir, "weights.json"), witness.weights)
    doc = {
        "seed": witness.seed,
        "trial_index": witness.trial_index,
        "instances": len(witness.dataset),
        "weights": list(witness.weights),
        "member_gaps": list(witness.member_gaps),
        "ensemble_gap": witness.ensemble_gap,
        "verification": verification,
    }
    _write_text(jsonio.dumps(doc), args.out)
    return EXIT_OK


def entrypoint(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except FairmixError as exc:
        print(f"fairmix: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(f"fairmix: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:  # pragma: no cover - thin wrapper
    sys.exit(entrypoint())
