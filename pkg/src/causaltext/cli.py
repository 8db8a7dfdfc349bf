"""Command-line front end: generate, solve, eval, and score."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import metadata

from .dataset import (balanced_generate, dataset_digest, generate,
                      read_samples, write_samples)
from .engine import EngineOptions, FILTER_MODES, FILTER_PC_CORRECT
from .errors import (BackendError, BoundsError, CapacityError, CausaltextError,
                     ConfigError, ConsistencyError, CycleError, PdagError,
                     PremiseParseError, ResourceError, TransportError,
                     UnknownVariableError, UsageError)
from .fixtures import FIXTURES
from .harness import (EVAL_MODES, BackendConfig, EvalRecord, MODE_STEP_BY_STEP,
                      RecordingBackend, ScoreReport, StepResult, make_backend,
                      run_pipeline, score, validate_config)
from .hypotheses import (MODE_EXTENSION_QUANTIFIED, MODE_RULE_BASED,
                         HypothesisKind)
from .parsing import THEMES, parse_premise
from .pipeline import solve_doc

USAGE_ERRORS = (PremiseParseError, ConfigError, UsageError, BoundsError,
                ConsistencyError, UnknownVariableError, ResourceError,
                CycleError)

log = logging.getLogger("causaltext")


def _version() -> str:
    try:
        return metadata.version("causaltext")
    except metadata.PackageNotFoundError:
        return "0.0.0+local"


def _load_config_defaults(argv):
    if "--config" not in argv:
        return {}
    path = argv[argv.index("--config") + 1]
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("version") != 1:
        raise ConfigError(f"unsupported config file version: {data.get('version')!r}")
    defaults = data.get("defaults", {})
    if not isinstance(defaults, dict):
        raise ConfigError("config 'defaults' must be an object")
    return {k.replace("-", "_"): v for k, v in defaults.items()}


def build_parser(defaults: dict | None = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causaltext",
        description="Symbolic causal reasoning over verbalized premises: "
                    "benchmark generation, solving, and backend evaluation.")
    parser.add_argument("--config", help="JSON config file with flag defaults")
    parser.add_argument("--version", action="version", version=_version())
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="emit a labeled benchmark dataset")
    gen.add_argument("--n", type=int, required=True, help="variable count (2..6)")
    gen.add_argument("--kinds", help="comma list of hypothesis kinds")
    gen.add_argument("--style", choices=("symbolic", "story"), default="symbolic")
    gen.add_argument("--theme", choices=sorted(THEMES), default=None)
    gen.add_argument("--max-cond", type=int, default=None)
    gen.add_argument("--closure", action="store_true",
                     help="verbalize the full separation closure, not minimal sets")
    gen.add_argument("--balanced", type=int, metavar="PER_CELL", default=None,
                     help="draw PER_CELL samples per label instead of streaming all")
    gen.add_argument("--limit", type=int, default=None, help="cap emitted rows")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("-o", "--out", required=True)
    gen.add_argument("--gzip", action="store_true")
    gen.add_argument("--format", choices=("text", "json"), default="text")

    sol = sub.add_parser("solve", help="run the matrix pipeline on one premise")
    src = sol.add_mutually_exclusive_group(required=True)
    src.add_argument("--premise", help="premise file, or - for stdin")
    src.add_argument("--fixture", choices=sorted(FIXTURES))
    sol.add_argument("--hypothesis", help="claim to evaluate")
    sol.add_argument("--collider-filter", choices=FILTER_MODES,
                     default=FILTER_PC_CORRECT)
    sol.add_argument("--propagate", action="store_true")
    sol.add_argument("--eval-mode",
                     choices=(MODE_RULE_BASED, MODE_EXTENSION_QUANTIFIED),
                     default=MODE_EXTENSION_QUANTIFIED)
    sol.add_argument("--trace", help="write the step-keyed trace JSON here")
    sol.add_argument("--format", choices=("text", "json"), default="text")

    ev = sub.add_parser("eval", help="run a dataset against a backend")
    ev.add_argument("--dataset", required=True)
    backend = ev.add_mutually_exclusive_group(required=True)
    backend.add_argument("--backend", help="'mock' or an http(s) endpoint URL")
    backend.add_argument("--replay", help="transcript directory to replay")
    ev.add_argument("--mode", choices=EVAL_MODES, default=MODE_STEP_BY_STEP)
    ev.add_argument("--out", required=True, help="directory for records and reports")
    ev.add_argument("--record", action="store_true",
                    help="store transcripts under OUT/transcripts")
    ev.add_argument("--parallel", type=int, default=1)
    ev.add_argument("--model", default="oracle")
    ev.add_argument("--auth-env", default=None)
    ev.add_argument("--attempts", type=int, default=3)
    ev.add_argument("--collider-filter", choices=FILTER_MODES,
                    default=FILTER_PC_CORRECT)
    ev.add_argument("--propagate", action="store_true")
    ev.add_argument("--limit", type=int, default=None)
    ev.add_argument("--format", choices=("text", "json"), default="text")

    sc = sub.add_parser("score", help="recompute metrics from stored records")
    sc.add_argument("--records", required=True, help="records directory")
    sc.add_argument("--group-by", default="n_vars",
                    help="comma list from: n_vars, subtask")
    sc.add_argument("--format", choices=("text", "json"), default="text")

    if defaults:
        # config-file defaults; explicit flags still win at parse time
        for p in (parser, gen, sol, ev, sc):
            p.set_defaults(**defaults)
    return parser


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    from .graphs import mec_index

    if args.balanced is not None and args.seed is None:
        raise UsageError("--balanced sampling requires --seed")
    kinds = None
    if args.kinds:
        kinds = [HypothesisKind(k.strip()) for k in args.kinds.split(",") if k.strip()]
    if args.balanced is not None:
        samples = balanced_generate([args.n], args.balanced, args.seed,
                                    kinds=kinds, style=args.style,
                                    theme=args.theme, minimal=not args.closure)
    else:
        stream = generate(args.n, kinds=kinds, style=args.style, theme=args.theme,
                          max_cond=args.max_cond, minimal=not args.closure)
        if args.limit is not None:
            samples = []
            for s in stream:
                samples.append(s)
                if len(samples) >= args.limit:
                    break
        else:
            samples = list(stream)
    rows = write_samples(args.out, samples, gzip=args.gzip)
    idx = mec_index(args.n)
    summary = {
        "n_vars": args.n,
        "dags": idx.dag_count,
        "mecs": idx.group_count,
        "rows": rows,
        "yes": sum(1 for s in samples if s.label == "Yes"),
        "no": sum(1 for s in samples if s.label == "No"),
        "digest": dataset_digest(args.out),
    }
    if args.format == "json":
        print(json.dumps(summary, indent=2))
    else:
        print(f"{summary['dags']} DAGs on {args.n} variables, "
              f"{summary['mecs']} equivalence classes")
        print(f"wrote {rows} samples ({summary['yes']} Yes / {summary['no']} No), "
              f"digest {summary['digest']}")
    return 0


def _read_premise_input(args) -> tuple[str, str | None]:
    if args.fixture:
        doc_fn, default_hypothesis = FIXTURES[args.fixture]
        return doc_fn(), args.hypothesis or default_hypothesis
    if args.premise == "-":
        text = sys.stdin.read()
    else:
        with open(args.premise, encoding="utf-8") as fh:
            text = fh.read()
    hypothesis = args.hypothesis
    if "Hypothesis:" in text:
        text, _, tail = text.partition("Hypothesis:")
        hypothesis = hypothesis or tail.strip()
        text = text.replace("Premise:", "", 1).strip()
    return text, hypothesis


def _print_matrix(mapping: dict) -> None:
    names = list(mapping)
    width = max(len(n) for n in names)
    print("      " + " ".join(n.rjust(width) for n in names))
    for r in names:
        cells = " ".join(str(mapping[r][c]).rjust(width) for c in names)
        print(f"    {r.rjust(width)} {cells}")


def cmd_solve(args) -> int:
    source, hypothesis = _read_premise_input(args)
    options = EngineOptions(collider_filter=args.collider_filter,
                            propagate=args.propagate)
    doc = source if not isinstance(source, str) else parse_premise(source)
    result = solve_doc(doc, hypothesis, options, args.eval_mode)
    report = result.report()
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
    if args.format == "json":
        print(json.dumps(report, indent=2))
        return 0
    step1 = report["step_1"]
    print(f"Step 1  variables ({step1['count']}): {', '.join(step1['names'])}")
    rel = report["step_2"]

    def pairs(entries):
        return ", ".join("-".join(p) for p in entries) or "(none)"

    conds = ", ".join(
        f"{e['pair'][0]}-{e['pair'][1]} | {','.join(e['given'])}"
        for e in rel["conditional_independencies"]) or "(none)"
    print(f"Step 2  dependencies: {pairs(rel['dependencies'])}")
    print(f"        unconditional independencies: {pairs(rel['unconditional_independencies'])}")
    print(f"        conditional independencies: {conds}")
    print(f"        declared causes: {pairs(rel['declared_causes'])}")
    for k in (3, 4, 5):
        print(f"Step {k}  matrix:")
        _print_matrix(report[f"step_{k}"])
    print(f"Step 6  candidates: {json.dumps(report['step_6'])}")
    print(f"Step 7  filtered:   {json.dumps(report['step_7'])}")
    print("Step 8  matrix:")
    _print_matrix(report["step_8"])
    final = report["step_9"]
    if "answer" in final:
        witness = json.dumps(final.get("witness"))
        print(f"Step 9  answer: {final['answer']}   witness: {witness}")
    else:
        print("Step 9  matrix (no hypothesis given):")
        _print_matrix(final["matrix"])
    return 0


def cmd_eval(args) -> int:
    if args.replay:
        endpoint = f"replay://{args.replay}"
    elif args.backend == "mock":
        endpoint = "mock://engine"
    else:
        endpoint = args.backend
    config = BackendConfig(endpoint=endpoint, model=args.model,
                           auth_env=args.auth_env, attempts=args.attempts)
    validate_config(config)
    options = EngineOptions(collider_filter=args.collider_filter,
                            propagate=args.propagate)
    samples = read_samples(args.dataset)
    if args.limit is not None:
        samples = samples[:args.limit]
    if not samples:
        raise UsageError(f"dataset {args.dataset} holds no samples")
    os.makedirs(args.out, exist_ok=True)
    records_dir = os.path.join(args.out, "records")
    os.makedirs(records_dir, exist_ok=True)
    backend = make_backend(config, options)
    if args.record:
        backend = RecordingBackend(backend, os.path.join(args.out, "transcripts"))
    records = []
    if args.parallel > 1:
        from .harness import run_batch
        records = run_batch(samples, config, args.mode, options,
                            backend=backend, parallelism=args.parallel)
        for rec in records:
            _write_record(records_dir, rec)
    else:
        for sample in samples:
            rec = run_pipeline(sample, config, args.mode, options, backend=backend)
            _write_record(records_dir, rec)
            records.append(rec)
    report = score(records)
    manifest = {
        "version": _version(),
        "config_digest": config.digest(),
        "dataset_digest": dataset_digest(args.dataset),
        "mode": args.mode,
        "n_records": len(records),
    }
    with open(os.path.join(args.out, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
    with open(os.path.join(args.out, "metrics.json"), "w", encoding="utf-8") as fh:
        json.dump(report.as_dict(), fh, indent=2)
    _emit_report(report, args.format, ("n_vars", "subtask"))
    return 0


def _write_record(records_dir: str, rec: EvalRecord) -> None:
    path = os.path.join(records_dir, f"{rec.sample_id}.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(rec.as_dict(), fh, indent=1)


def _read_records(records_dir: str) -> list[EvalRecord]:
    if not os.path.isdir(records_dir):
        raise UsageError(f"records directory not found: {records_dir}")
    names = sorted(f for f in os.listdir(records_dir) if f.endswith(".json"))
    records = []
    for name in names:
        with open(os.path.join(records_dir, name), encoding="utf-8") as fh:
            data = json.load(fh)
        steps = {k: StepResult(v.get("raw"), v.get("parsed"), v.get("match", False),
                               v.get("error"))
                 for k, v in data.get("steps", {}).items()}
        records.append(EvalRecord(
            sample_id=data["sample_id"], n_vars=data["n_vars"],
            label=data["label"], kind=data.get("kind", ""),
            mode=data.get("mode", ""), steps=steps,
            verdict=data.get("verdict"), correct=data.get("correct", False),
            elapsed_ms=data.get("elapsed_ms", 0.0),
            parse_failures=data.get("parse_failures", 0),
            error=data.get("error")))
    if not records:
        raise UsageError(f"no records in {records_dir}")
    return records


def _emit_report(report: ScoreReport, fmt: str, group_by) -> None:
    if fmt == "json":
        print(json.dumps(report.as_dict(), indent=2))
        return
    m = report.overall
    print(f"records: {report.n_records}   parse-failure rate: "
          f"{report.parse_failure_rate:.4f}")
    print(f"overall  acc {m.accuracy:.4f}  f1 {m.f1:.4f}  precision {m.precision:.4f}"
          f"  recall {m.recall:.4f}  (tp {m.tp} fp {m.fp} tn {m.tn} fn {m.fn})")
    if "n_vars" in group_by:
        for n, gm in sorted(report.by_n_vars.items()):
            print(f"n={n}      acc {gm.accuracy:.4f}  f1 {gm.f1:.4f}  "
                  f"precision {gm.precision:.4f}  recall {gm.recall:.4f}")
    if report.step_accuracy:
        steps = "  ".join(f"{k.split('_')[1]}:{v:.2f}"
                          for k, v in report.step_accuracy.items())
        print(f"step accuracy   {steps}")
    if "subtask" in group_by and report.subtask_accuracy:
        subs = "  ".join(f"{k}:{v:.2f}" for k, v in sorted(report.subtask_accuracy.items()))
        print(f"subtask accuracy   {subs}")


def cmd_score(args) -> int:
    records = _read_records(os.path.join(args.records, "records")
                            if os.path.isdir(os.path.join(args.records, "records"))
                            else args.records)
    group_by = tuple(k.strip() for k in args.group_by.split(",") if k.strip())
    report = score(records, group_by)
    _emit_report(report, args.format, group_by)
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        defaults = _load_config_defaults(argv)
        parser = build_parser(defaults)
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2))
        handler = {"generate": cmd_generate, "solve": cmd_solve,
                   "eval": cmd_eval, "score": cmd_score}[args.command]
        return handler(args)
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CapacityError, TransportError, BackendError, PdagError,
            CausaltextError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
