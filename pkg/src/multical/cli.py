"""Command line interface.

Exit codes: 0 success, 1 audit found a multicalibration violation,
2 usage / parse / configuration error, 3 brute-force limit exceeded.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import bounds
from .convergence import ConvergenceSetup, build_lower_bound_fixture, run_distinguishing
from .dataset import Dataset, DatasetError, RunConfig, load_config, load_dataset
from .dimensions import LimitExceeded, binarize_class, check_lemma_graph, check_lemma_phi, graph_dimension
from .metrics import audit_class
from .report import audit_csv, dumps

log = logging.getLogger("multical")

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3

_FLAG_KEYS = ("alpha", "gamma", "psi", "epsilon", "delta", "lam", "trials", "seed", "mode")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, help="key=value file; flags override it")
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--psi", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=("finite-Y", "continuous-Y"))
    p.add_argument("--output", type=Path, help="write the JSON report here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="multical", description="Multicalibration audits, bounds and convergence checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common()

    a = sub.add_parser("audit", parents=[common], help="audit every predictor in a dataset")
    a.add_argument("--data", type=Path, required=True)
    a.add_argument("--source", choices=("sample", "exact"), default="sample",
                   help="treat rows as a sample, or as the uniform distribution over rows")
    a.add_argument("--empty-policy", choices=("violation", "exclude"), default="violation")
    a.add_argument("--csv", type=Path, help="also write per-category entries as CSV")

    s = sub.add_parser("sample-size", parents=[common], help="print every applicable bound")
    s.add_argument("--data", type=Path, help="infer |Gamma|, |H|, |Y| and d from a dataset")
    s.add_argument("--card-gamma", type=int)
    s.add_argument("--card-h", type=int)
    s.add_argument("--card-y", type=int)
    s.add_argument("--dim", type=int, help="graph dimension bound d")

    v = sub.add_parser("verify", parents=[common], help="Monte Carlo failure rate on a dataset's distribution")
    v.add_argument("--data", type=Path, required=True)
    v.add_argument("--m", type=int, help="sample size (default: the finite-class bound)")

    d = sub.add_parser("dims", parents=[common], help="graph / VC dimension checks on a dataset")
    d.add_argument("--data", type=Path, required=True)

    lb = sub.add_parser("lower-bound-demo", parents=[common], help="two-distribution distinguishing experiment")
    lb.add_argument("--factors", default="0.0625,0.25,1,4,16,100",
                    help="comma separated multiples of the lower bound to test")
    return parser


def resolve_config(args) -> RunConfig:
    values = load_config(args.config) if args.config else {}
    for key in _FLAG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return RunConfig(**values)


def _card_y(ds: Dataset, cfg: RunConfig) -> int:
    return len(ds.prediction_values()) if cfg.mode == "finite-Y" else round(1 / cfg.lam)


def _finite_lambda(card_y: int, cfg: RunConfig) -> float:
    # a finite Y is partitioned into |Y| singletons, i.e. 1/lambda = |Y|
    return 1.0 / card_y if cfg.mode == "finite-Y" else cfg.lam


def _bound_params(cfg: RunConfig, card_gamma: int, card_h: int, card_y: int, d: int) -> bounds.BoundParams:
    return bounds.BoundParams(
        epsilon=cfg.epsilon, delta=cfg.delta, gamma=cfg.gamma, psi=cfg.psi,
        lam=_finite_lambda(card_y, cfg), card_gamma=card_gamma, card_h=card_h, card_y=card_y, d=d,
        c_graph=cfg.c_graph, c_fund=cfg.c_fund, c_lower=cfg.c_lower,
    )


def cmd_audit(args, cfg: RunConfig):
    ds = load_dataset(args.data)
    partition = ds.space(cfg.mode, cfg.lam).partition()
    source = ds.sample() if args.source == "sample" else ds.distribution()
    reports = audit_class(
        ds.predictors, ds.groups, partition, cfg.alpha, cfg.gamma, cfg.psi, source,
        empty_policy=args.empty_policy, lam=cfg.lam if cfg.mode == "continuous-Y" else None,
    )
    if args.csv:
        args.csv.write_text(audit_csv(reports), encoding="utf-8")
    verdict = all(r.verdict for r in reports)
    for r in reports:
        for e in r.violations:
            log.warning("violation: predictor %s category %s error %s (%s)",
                        r.predictor, e.category, e.calibration_error, e.reason)
    results = {"verdict": verdict, "predictors": reports}
    return {"data": str(args.data), "source": args.source, "rows": len(ds)}, results, (
        EXIT_OK if verdict else EXIT_VIOLATION
    )


def cmd_sample_size(args, cfg: RunConfig):
    card_gamma, card_h, card_y, d = args.card_gamma, args.card_h, args.card_y, args.dim
    inputs = {}
    if args.data:
        ds = load_dataset(args.data)
        inputs["data"] = str(args.data)
        card_gamma = card_gamma or len(ds.groups)
        card_h = card_h or len(ds.predictors)
        card_y = card_y or _card_y(ds, cfg)
        if d is None and cfg.mode == "finite-Y":
            try:
                d = graph_dimension(ds.predictors, ds.domain, ds.prediction_values(),
                                    cfg.max_domain_for_dims, cfg.max_y_for_dims)
            except LimitExceeded:
                d = None
    card_gamma = card_gamma or 1
    card_y = card_y or (round(1 / cfg.lam) if cfg.mode == "continuous-Y" else 2)
    p = _bound_params(cfg, card_gamma, card_h or 1, card_y, d or 0)
    inputs.update(card_gamma=card_gamma, card_h=card_h, card_y=card_y, d=d, lambda_used=p.lam)
    results = {
        "lower_bound": bounds.lower_bound(p),
        "subpopulation_coverage_bound": bounds.subpopulation_coverage_bound(cfg.gamma, cfg.delta, card_gamma),
    }
    if card_h is not None:
        results["finite_class_bound"] = bounds.finite_class_bound(p)
        results["occupancy_threshold"] = bounds.occupancy_threshold(p)
    if d is not None:
        results["graph_dim_bound"] = bounds.graph_dim_bound(p)
        results["binary_uc_bound"] = bounds.binary_uc_bound(d, cfg.epsilon, cfg.delta, cfg.c_fund)
    return inputs, results, EXIT_OK


def cmd_verify(args, cfg: RunConfig):
    ds = load_dataset(args.data)
    partition = ds.space(cfg.mode, cfg.lam).partition()
    card_y = _card_y(ds, cfg)
    p = _bound_params(cfg, len(ds.groups), len(ds.predictors), card_y, 0)
    m = args.m if args.m is not None else bounds.finite_class_bound(p)
    if not isinstance(m, int):
        raise ValueError("sample size is astronomical; pass --m")
    setup = ConvergenceSetup(ds.distribution(), ds.predictors, ds.groups, partition, cfg.gamma, cfg.psi)
    outcomes = setup.run(m, cfg.trials, cfg.seed)
    failures = sum(o.sup_deviation > cfg.epsilon for o in outcomes)
    rate = failures / cfg.trials
    slack = 3 * math.sqrt(cfg.delta * (1 - cfg.delta) / cfg.trials)
    results = {
        "m": m,
        "interesting_categories": setup.n_interesting,
        "failure_rate": rate,
        "failures": failures,
        "delta": cfg.delta,
        "ceiling": cfg.delta + slack,
        "within_ceiling": rate <= cfg.delta + slack,
        "occupancy_threshold": bounds.occupancy_threshold(p),
        "trials": [
            {"index": i, "seed": o.seed, "sup_deviation": o.sup_deviation,
             "empty_interesting_count": o.empty_interesting_count, "min_occupancy": o.min_occupancy,
             "worst_category": o.worst_category}
            for i, o in enumerate(outcomes)
        ],
    }
    return {"data": str(args.data), "rows": len(ds)}, results, EXIT_OK


def cmd_dims(args, cfg: RunConfig):
    ds = load_dataset(args.data)
    Y = ds.prediction_values()
    if len(ds.domain) > cfg.max_domain_for_dims or len(Y) > cfg.max_y_for_dims:
        raise LimitExceeded(
            f"dataset has {len(ds.domain)} points and {len(Y)} values; "
            f"limits are {cfg.max_domain_for_dims} and {cfg.max_y_for_dims}"
        )
    graph = check_lemma_graph(ds.predictors, ds.domain, Y)
    phi = {v: check_lemma_phi(binarize_class(ds.predictors, v), ds.domain) for v in Y}
    results = {
        "graph_dimension": graph.graph_dimension,
        "vc_binary": [{"value": v, "vc": d} for v, d in graph.vc_by_value.items()],
        "vc_true_positive": [{"value": v, "vc": r.vc_true_positive} for v, r in phi.items()],
        "lemma_graph_holds": graph.holds,
        "lemma_phi_holds": all(r.holds for r in phi.values()),
    }
    return {"data": str(args.data), "points": len(ds.domain), "values": len(Y)}, results, EXIT_OK


def cmd_lower_bound_demo(args, cfg: RunConfig):
    fixture = build_lower_bound_fixture(cfg.epsilon, cfg.gamma, cfg.psi)
    p = bounds.BoundParams(epsilon=cfg.epsilon, delta=cfg.delta, gamma=cfg.gamma, psi=cfg.psi, c_lower=cfg.c_lower)
    base = bounds.lower_bound(p)
    try:
        factors = [float(f) for f in args.factors.split(",") if f.strip()]
    except ValueError:
        raise ValueError(f"bad --factors {args.factors!r}") from None
    rows = []
    for f in factors:
        m = max(1, math.ceil(f * base))
        r = run_distinguishing(fixture, m, cfg.trials, cfg.seed)
        rows.append({"factor": f, "m": m, "accuracy": r.accuracy, "coin_flips": r.coin_flips})
    return {"fixture": {"epsilon": cfg.epsilon, "gamma": cfg.gamma, "psi": cfg.psi}}, {
        "lower_bound": base, "grid": rows}, EXIT_OK


COMMANDS = {
    "audit": cmd_audit,
    "sample-size": cmd_sample_size,
    "verify": cmd_verify,
    "dims": cmd_dims,
    "lower-bound-demo": cmd_lower_bound_demo,
}


def run_command(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        inputs, results, code = COMMANDS[args.command](args, cfg)
    except LimitExceeded as e:
        print(f"multical: limit exceeded: {e}", file=sys.stderr)
        return EXIT_LIMIT
    except (DatasetError, ValueError, OSError) as e:
        print(f"multical: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    text = dumps({"command": args.command, "config": cfg.as_dict(), "inputs": inputs, "results": results})
    if args.output:
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    try:
        return run_command(argv)
    except SystemExit as e:  # argparse
        return e.code if isinstance(e.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
