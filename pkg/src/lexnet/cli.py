"""Command-line pipeline: extract-paths, train, evaluate, predict, analyze."""

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import datasets, evaluation, models, paths, synthetic
from .conllu import read_conllu
from .embeddings import read_embeddings

log = logging.getLogger("lexnet")

DEFAULT_SEED = 1


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _load(path, fn, *args):
    try:
        return fn(path, *args)
    except FileNotFoundError:
        raise DataError(f"{path}: file not found") from None
    except (ValueError, KeyError, OSError) as e:
        raise DataError(f"{path}: {e}") from None


def _corpus_files(specs):
    files = []
    for spec in specs:
        p = Path(spec)
        if p.is_dir():
            files.extend(sorted(str(f) for f in p.iterdir() if f.suffix in (".conllu", ".conll")))
        else:
            files.append(str(p))
    if not files:
        raise DataError("no corpus files found")
    return files


def _read_pairs(path):
    pairs = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) < 2:
                raise ValueError(f"line {line_no}: expected x<TAB>y, found {len(cols)} column(s)")
            if line_no == 1 and cols[:2] == ["x", "y"]:
                continue
            pairs.append((cols[0].strip().lower(), cols[1].strip().lower()))
    return pairs


def _resolved_config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "func", "verbose")}


def _load_dataset(args) -> datasets.Dataset:
    loaded = _load(args.dataset, datasets.read_dataset)
    if isinstance(loaded, datasets.Dataset):
        return loaded
    if getattr(args, "drop_relations", None):
        loaded, _ = datasets.filter_relations(loaded, args.drop_relations)
    try:
        return datasets.make_splits(loaded, tuple(args.ratios), seed=args.seed, name=Path(args.dataset).stem)
    except ValueError as e:
        raise DataError(f"{args.dataset}: {e}") from None


def cmd_extract(args):
    files = _corpus_files(args.corpus)
    pairs = _load(args.pairs, _read_pairs)
    cfg = paths.ExtractionConfig(max_path_len=args.max_path_len, max_sentence_len=args.max_sentence_len)

    def one(path):
        errors = []
        sentences = _load(path, read_conllu, errors)
        for e in errors:
            print(f"{path}: {e}", file=sys.stderr)
        stats = paths.ExtractionStats()
        return paths.extract_pair_paths(sentences, pairs, cfg, stats), stats

    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        results = list(pool.map(one, files))
    index, stats = paths.PathIndex(), paths.ExtractionStats()
    for shard, shard_stats in results:
        index = paths.merge_indexes(index, shard)
        stats.update(shard_stats)
    if args.min_path_count > 1 or args.max_paths_per_pair is not None:
        index = paths.prune_index(index, args.min_path_count, args.max_paths_per_pair)
    paths.write_index(index, args.out)
    print(f"{len(index)} pairs, {index.total_paths()} distinct paths from {stats.sentences} sentences "
          f"({stats.skipped_long} skipped as too long, {stats.too_long_paths} paths over the length cap)")


def _grid(args, variant):
    if variant == models.DS:
        return {"C": tuple(args.C)} if args.C else None
    grid = dict(models.DEFAULT_GRID)
    if args.lr:
        grid["lr"] = tuple(args.lr)
    if args.dropout:
        grid["dropout"] = tuple(args.dropout)
    return grid


def cmd_train(args):
    variant = models.resolve_variant(args.variant)
    if variant in models.USES_PATHS and not args.index:
        raise UsageError(f"--index is required for variant {variant}")
    ds = _load_dataset(args)
    emb = _load(args.embeddings, read_embeddings, args.dim)
    index = _load(args.index, paths.read_index) if args.index else None
    hyper = models.Hyper()
    if args.epochs is not None:
        hyper = replace(hyper, epochs=args.epochs)
    if args.hidden is not None:
        hyper = replace(hyper, hidden=args.hidden)
    try:
        model, report = models.train(variant, ds.train, ds.val, index, emb, _grid(args, variant),
                                     args.seed, hyper, ds.inventory, extra_pairs=ds.test)
    except ValueError as e:
        raise DataError(str(e)) from None
    os.makedirs(args.out, exist_ok=True)
    config = _resolved_config(args)
    models.save_model(model, os.path.join(args.out, "model.json"), {"config": config})
    with open(os.path.join(args.out, "tuning.tsv"), "w", encoding="utf-8", newline="\n") as f:
        f.write(report.to_tsv(config))
    with open(os.path.join(args.out, "dataset.tsv"), "w", encoding="utf-8", newline="\n") as f:
        datasets.save_dataset(ds, f)
    best = report.best_point
    print(f"{variant}: best validation F1 {best['f1']:.3f} at "
          + ", ".join(f"{k}={v}" for k, v in best.items() if k not in ("precision", "recall", "f1", "epochs")))


def _check_inventory(model, ds, path):
    if set(model.relations) != set(ds.inventory):
        raise DataError(f"{path}: checkpoint relations {sorted(model.relations)} do not match "
                        f"dataset relations {sorted(ds.inventory)}")


def _predict(model, pairs, index, emb):
    return [p.relation for p in models.predict_batch(model, pairs, index, emb)]


def _method_name(model, path, seen):
    name = model.variant
    return name if name not in seen else f"{name} ({path})"


def cmd_evaluate(args):
    ds = _load_dataset(args)
    emb = _load(args.embeddings, read_embeddings, args.dim)
    index = _load(args.index, paths.read_index) if args.index else None
    split = ds.split(args.split)
    if not split:
        raise DataError(f"{args.dataset}: split {args.split!r} is empty")
    gold = [p.relation for p in split]
    results = {}
    for path in args.model:
        model = _load(path, models.load_model)
        _check_inventory(model, ds, path)
        pred = _predict(model, split, index, emb)
        results[_method_name(model, path, results)] = evaluation.evaluate_labels(gold, pred, ds.inventory)
    config = _resolved_config(args)
    if args.json:
        text = json.dumps({"config": config, "split": args.split,
                           "methods": {k: m.to_dict() for k, m in results.items()}}, indent=2, sort_keys=True) + "\n"
    else:
        text = evaluation.results_table(results)
        for method, m in results.items():
            text += f"\n{method}\n" + evaluation.relation_table(m)
    sys.stdout.write(text)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        header = "# config: " + json.dumps(config, sort_keys=True) + "\n"
        with open(os.path.join(args.out, "metrics.tsv"), "w", encoding="utf-8", newline="\n") as f:
            f.write(header + evaluation.results_tsv(results))
        name = "metrics.json" if args.json else "metrics.txt"
        with open(os.path.join(args.out, name), "w", encoding="utf-8", newline="\n") as f:
            f.write(text if args.json else header + text)


def cmd_predict(args):
    model = _load(args.model, models.load_model)
    pairs = _load(args.pairs, _read_pairs)
    emb = _load(args.embeddings, read_embeddings, args.dim)
    index = _load(args.index, paths.read_index) if args.index else None
    preds = models.predict_batch(model, pairs, index, emb)
    lines = ["\t".join(["x", "y", "prediction", *model.relations])]
    for (x, y), p in zip(pairs, preds):
        lines.append("\t".join([x, y, p.relation, *(f"{v:.6f}" for v in p.distribution)]))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _read_predictions(path):
    preds = {}
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            cols = line.rstrip("\r\n").split("\t")
            if line_no == 1 and cols[:3] == ["x", "y", "prediction"]:
                continue
            if len(cols) < 3:
                raise ValueError(f"line {line_no}: expected x<TAB>y<TAB>prediction")
            preds[(cols[0], cols[1])] = cols[2]
    return preds


def cmd_analyze(args):
    sources = ((args.model_a, args.pred_a), (args.model_b, args.pred_b))
    for side, (model_path, pred_path) in zip("ab", sources):
        if (model_path is None) == (pred_path is None):
            raise UsageError(f"give exactly one of --model-{side} and --pred-{side}")
    if (args.model_a or args.model_b) and not args.embeddings:
        raise UsageError("--embeddings is required when analyzing checkpoints")
    ds = _load_dataset(args)
    split = ds.split(args.split)
    gold = [p.relation for p in split]
    emb = index = None
    if args.model_a or args.model_b:
        emb = _load(args.embeddings, read_embeddings, args.dim)
        index = _load(args.index, paths.read_index) if args.index else None
    sides = []
    for model_path, pred_path in sources:
        if model_path:
            model = _load(model_path, models.load_model)
            _check_inventory(model, ds, model_path)
            sides.append((model.variant, _predict(model, split, index, emb)))
        else:
            table = _load(pred_path, _read_predictions)
            missing = [(p.x, p.y) for p in split if (p.x, p.y) not in table]
            if missing:
                raise DataError(f"{pred_path}: no prediction for {len(missing)} pairs, e.g. {missing[0]}")
            pred = [table[(p.x, p.y)] for p in split]
            unknown = sorted(set(pred) - set(ds.inventory))
            if unknown:
                raise DataError(f"{pred_path}: predicted relations {unknown} are not in the dataset "
                                f"relations {sorted(ds.inventory)}")
            sides.append((Path(pred_path).stem, pred))
    (name_a, pred_a), (name_b, pred_b) = sides
    report = evaluation.disagreement_report(pred_a, pred_b, gold, split, ds.train)
    baseline = evaluation.memorization_baseline(ds.train, split, ds.inventory)
    results = {name_a: evaluation.evaluate_labels(gold, pred_a, ds.inventory),
               f"{name_b} (B)" if name_b == name_a else name_b: evaluation.evaluate_labels(gold, pred_b, ds.inventory),
               "memorization baseline": evaluation.evaluate_labels(gold, baseline, ds.inventory)}
    correct_a = np.array([p == g for p, g in zip(pred_a, gold)], dtype=float)
    correct_b = np.array([p == g for p, g in zip(pred_b, gold)], dtype=float)
    try:
        t, p = evaluation.paired_ttest(correct_a, correct_b)
        ttest = {"t": t, "p": p, "unit": "per-pair correctness"}
    except ValueError as e:
        ttest = {"error": str(e)}
    config = _resolved_config(args)
    if args.json:
        text = json.dumps({"config": config, "A": name_a, "B": name_b, "ttest": ttest,
                           "metrics": {k: m.to_dict() for k, m in results.items()},
                           "disagreements": report.to_dict()}, indent=2, sort_keys=True) + "\n"
    else:
        tt = (f"paired t-test on per-pair correctness: t = {ttest['t']:.4f}, p = {ttest['p']:.4g}"
              if "t" in ttest else f"paired t-test: {ttest['error']}")
        text = (f"A = {name_a}, B = {name_b}\n\n" + evaluation.results_table(results) + "\n" + tt + "\n\n"
                + report.to_text())
    sys.stdout.write(text)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        header = "# config: " + json.dumps(config, sort_keys=True) + "\n"
        with open(os.path.join(args.out, "disagreements.tsv"), "w", encoding="utf-8", newline="\n") as f:
            f.write(header + report.to_tsv())
        name = "analysis.json" if args.json else "analysis.txt"
        with open(os.path.join(args.out, name), "w", encoding="utf-8", newline="\n") as f:
            f.write(text if args.json else header + text)


FIXTURES = {
    "complementary": synthetic.complementary_benchmark,
    "memorization": synthetic.memorization_benchmark,
    "overfit": synthetic.overfit_benchmark,
}


def cmd_fixture(args):
    bm = FIXTURES[args.kind](args.seed)
    files = bm.write(args.out)
    for f in files.values():
        print(f)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lexnet", description="Multiclass lexical relation classification "
                                                "from dependency paths and word embeddings.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, seed=True):
        p.add_argument("--dim", type=int, help="expected embedding dimension")
        if seed:
            p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    def data_args(p):
        p.add_argument("--dataset", required=True, help="TSV x, y, relation[, split]")
        p.add_argument("--ratios", type=float, nargs=3, default=(0.7, 0.05, 0.25), metavar=("TRAIN", "VAL", "TEST"),
                       help="split ratios when the dataset has no split column")
        p.add_argument("--drop-relations", nargs="*", default=[])

    p = sub.add_parser("extract-paths", help="index dependency paths between term pairs")
    p.add_argument("--corpus", nargs="+", required=True, help="CoNLL-U files or directories of shards")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-path-len", type=int, default=4)
    p.add_argument("--max-sentence-len", type=int, default=80)
    p.add_argument("--max-paths-per-pair", type=int)
    p.add_argument("--min-path-count", type=int, default=1)
    p.add_argument("--workers", type=int, default=4)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train one variant with validation tuning")
    data_args(p)
    p.add_argument("--index")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--variant", required=True, choices=sorted(models.CLI_NAMES))
    p.add_argument("--out", required=True)
    p.add_argument("--lr", type=float, nargs="+")
    p.add_argument("--dropout", type=float, nargs="+")
    p.add_argument("--epochs", type=int)
    p.add_argument("--hidden", type=int)
    p.add_argument("--C", type=float, nargs="+", help="margin classifier C grid (ds)")
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="weighted P/R/F1 of one or more checkpoints")
    data_args(p)
    p.add_argument("--model", nargs="+", required=True)
    p.add_argument("--index")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--split", default="test", choices=datasets.SPLITS)
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="label term pairs")
    p.add_argument("--model", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--index")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out")
    common(p, seed=False)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("analyze", help="where A is right and B is wrong, with memorization diagnosis")
    data_args(p)
    p.add_argument("--model-a")
    p.add_argument("--model-b")
    p.add_argument("--pred-a")
    p.add_argument("--pred-b")
    p.add_argument("--index")
    p.add_argument("--embeddings")
    p.add_argument("--split", default="test", choices=datasets.SPLITS)
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("make-fixture", help="write a synthetic corpus, embeddings and dataset")
    p.add_argument("--kind", choices=sorted(FIXTURES), default="complementary")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_fixture)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        args.func(args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1
    except DataError as e:
        print(f"lexnet: error: {e}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
