"""Command-line front end: generate, discover, confidence, evaluate, rank.

Exit status is 0 on success, 2 for usage or configuration errors, 3 for
unreadable or inconsistent data and 4 for numerical failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .comptruthhyp import CompTruthHyp
from .data import Mode, load_claims, load_truth
from .evaluation import METRICS, coverage_sweep, parse_coverages
from .exceptions import ConfigError, ConsistencyError, ContractError, NumericalError, TruthHypError
from .generator import GeneratorConfig, generate, write_corpus
from .methods import METHOD_ORDER, MethodConfig, MethodId, MethodOutput, run_all
from .reports import build_rank_report, dumps, read_json, table_tsv

logger = logging.getLogger("truthhyp")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_USAGE
    if isinstance(exc, (NumericalError, ContractError)):
        return EXIT_NUMERIC
    return EXIT_DATA


def _emit(text: str, out: str | None):
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _selected_methods(spec: str) -> list[MethodId]:
    if spec.strip().lower() == "all":
        return list(METHOD_ORDER)
    picked = {MethodId.parse(name) for name in spec.split(",") if name.strip()}
    if not picked:
        raise ConfigError("no method selected")
    return [m for m in METHOD_ORDER if m in picked]


def _load_outputs(paths: list[str]) -> list[MethodOutput]:
    files: list[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            files.extend(sorted(p.glob("*.output.json")))
        else:
            files.append(p)
    if not files:
        raise ConsistencyError(f"no method outputs found in {', '.join(paths)}")
    outputs = [MethodOutput.load(f) for f in files]
    names = [o.method for o in outputs]
    if len(set(names)) != len(names):
        raise ConsistencyError(f"duplicate method outputs: {sorted(names)}")
    return outputs


def _check_output_modes(dataset, outputs):
    for o in outputs:
        if Mode(o.mode) is not dataset.mode:
            raise ConsistencyError(
                f"output {o.method!r} is {Mode(o.mode).value}-valued, data is {dataset.mode.value}-valued")


# -- subcommands --------------------------------------------------------------

def cmd_generate(args) -> int:
    base = read_json(args.config) if args.config else {}
    overrides = {
        "num_sources": args.num_sources, "num_objects": args.num_objects,
        "values_per_object": args.values_per_object, "coverage_dist": args.coverage_dist,
        "coverage_p": args.coverage_p, "gt_dist": args.gt_dist,
        "confusion_dist": args.confusion_dist, "seed": args.seed,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    config = GeneratorConfig.from_dict(base)
    out = Path(args.out)
    for k in range(args.groups):
        cfg = config.replace(seed=config.seed + k)
        target = out if args.groups == 1 else out / f"seed-{cfg.seed}"
        corpus = generate(cfg)
        write_corpus(corpus, target)
        stats = corpus.dataset.stats()
        print(f"{target}: {stats['claims']} claims, {stats['sources']} sources, "
              f"{stats['objects']} objects (seed {cfg.seed})")
    return EXIT_OK


def cmd_discover(args) -> int:
    methods = _selected_methods(args.method)
    dataset = load_claims(args.data, args.mode)
    try:
        cfg = MethodConfig(**read_json(args.config)) if args.config else MethodConfig()
    except TypeError as exc:
        raise ConfigError(f"bad method config: {exc}") from exc
    # every method must succeed before anything is written
    outputs = run_all(dataset, cfg, methods)
    out = Path(args.out)
    for o in outputs:
        o.save(out)
        state = "converged" if o.converged else "max-iter"
        print(f"{o.method}\t{o.iterations}\t{state}")
    return EXIT_OK


def cmd_confidence(args) -> int:
    dataset = load_claims(args.data, args.mode)
    outputs = _load_outputs(args.outputs)
    _check_output_modes(dataset, outputs)
    est = CompTruthHyp(beta=args.beta).fit(dataset, outputs)
    _emit(dumps(est.report(verbose=args.verbose)), args.out)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    dataset = load_claims(args.data, args.mode)
    truth = load_truth(args.truth, args.mode)
    outputs = _load_outputs(args.outputs)
    _check_output_modes(dataset, outputs)
    try:
        coverages = parse_coverages(args.coverage)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    sweep = coverage_sweep(outputs, truth, coverages, seed=args.seed, dataset=dataset, reps=args.reps)
    report = {"mode": dataset.mode.value, **sweep.to_dict()}
    _emit(dumps(report), args.out)
    if args.tsv:
        _emit(table_tsv(report, metric=args.metric), args.tsv)
    return EXIT_OK


def cmd_rank(args) -> int:
    evaluation = read_json(args.evaluation)
    confidence = read_json(args.confidence)
    report = build_rank_report(evaluation, confidence, args.metric, args.baseline_coverage)
    _emit(dumps(report), args.out)
    if args.tsv:
        _emit(table_tsv(evaluation, confidence, args.metric, args.baseline_coverage), args.tsv)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"seed must be >= 0, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="truthhyp", description=__doc__.splitlines()[0])
    p.add_argument("--verbose", "-v", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def data_args(sp, truth=False):
        sp.add_argument("--data", required=True, help="claims CSV (source,object,value)")
        sp.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.SINGLE.value)
        if truth:
            sp.add_argument("--truth", required=True, help="ground-truth CSV (object,value)")

    g = sub.add_parser("generate", help="write synthetic corpora")
    g.add_argument("--out", required=True, help="output directory")
    g.add_argument("--config", help="JSON file of generator settings")
    g.add_argument("--seed", type=_seed)
    g.add_argument("--groups", type=_positive_int, default=1,
                   help="number of corpora, seeded seed, seed+1, ...")
    g.add_argument("--num-sources", type=int)
    g.add_argument("--num-objects", type=int)
    g.add_argument("--values-per-object", type=int)
    g.add_argument("--gt-dist", help="U25, U75, 80P, 80O, FP, FO, R or Exp")
    g.add_argument("--coverage-dist", help="exponential or uniform")
    g.add_argument("--coverage-p", type=float)
    g.add_argument("--confusion-dist", help="exponential or uniform")
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("discover", help="run truth discovery methods")
    data_args(d)
    d.add_argument("--method", default="all",
                   help="'all' or a comma-separated list of: " + ", ".join(m.value for m in METHOD_ORDER))
    d.add_argument("--config", help="JSON file of method settings")
    d.add_argument("--out", required=True, help="directory for <method>.output.json files")
    d.set_defaults(func=cmd_discover)

    c = sub.add_parser("confidence", help="score method outputs without ground truth")
    data_args(c)
    c.add_argument("--outputs", nargs="+", required=True, help="output files or directories")
    c.add_argument("--beta", type=float, default=0.1, help="co-occurrence smoothing weight")
    c.add_argument("--out", help="report path (stdout if omitted)")
    c.add_argument("--verbose-trust", dest="verbose", action="store_true",
                   help="include per-source trust in the report")
    c.set_defaults(func=cmd_confidence)

    e = sub.add_parser("evaluate", help="metrics against (subsampled) ground truth")
    data_args(e, truth=True)
    e.add_argument("--outputs", nargs="+", required=True)
    e.add_argument("--coverage", default="1.0",
                   help="comma list of fractions or ranges, e.g. 0.01..0.1,0.2..1.0")
    e.add_argument("--reps", type=_positive_int, default=10, help="subsamples averaged per coverage")
    e.add_argument("--seed", type=_seed, default=0)
    e.add_argument("--metric", choices=METRICS, default="precision", help="metric shown in --tsv")
    e.add_argument("--out", help="report path (stdout if omitted)")
    e.add_argument("--tsv", help="also write a methods-by-coverage table")
    e.set_defaults(func=cmd_evaluate)

    r = sub.add_parser("rank", help="compare metric and confidence rankings")
    r.add_argument("--evaluation", required=True, help="report written by 'evaluate'")
    r.add_argument("--confidence", required=True, help="report written by 'confidence'")
    r.add_argument("--metric", choices=METRICS, default="precision")
    r.add_argument("--baseline-coverage", type=float, default=1.0)
    r.add_argument("--out", help="report path (stdout if omitted)")
    r.add_argument("--tsv", help="also write a table with Dist./Cos. rows")
    r.set_defaults(func=cmd_rank)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except TruthHypError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (FloatingPointError, OverflowError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
