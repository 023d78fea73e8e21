"""Command-line orchestration of the embedding pipeline.

Every subcommand can take its parameters from flags, from a `key = value`
config file (flags win), or both, and writes a manifest next to its primary
output recording the fully resolved parameters. Feeding a manifest back in
as ``--config`` reproduces the run. All randomness flows from the single
``seed`` value through named sub-seeds.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, augment, corpus, embed_io, eval_extrinsic, eval_intrinsic
from . import lexicon as lexicon_mod
from . import pairgen, sgns
from .seeds import derive_seed, derived_rng

SWEEP_PRESETS = {"standard": augment.RATIO_SWEEP}


def read_config(path: str | Path) -> dict[str, str]:
    """Parse `key = value` lines; `#` starts a comment."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            values[key.strip()] = value.strip()
    return values


def write_manifest(out_path: str | Path, command: str, params: dict) -> Path:
    """Record the resolved parameters of a run next to its primary output."""
    manifest = Path(str(out_path) + ".manifest")
    with open(manifest, "w", encoding="utf-8") as f:
        f.write(f"# synvec {__version__} run manifest\n")
        f.write(f"command = {command}\n")
        for key in sorted(params):
            value = params[key]
            if isinstance(value, (list, tuple)):
                value = " ".join(str(v) for v in value)
            f.write(f"{key} = {value}\n")
    return manifest


class _Resolver:
    """Layered parameter lookup: CLI flag, then config file, then default."""

    def __init__(self, parser: argparse.ArgumentParser, args: argparse.Namespace):
        self.parser = parser
        self.args = args
        self.config = read_config(args.config) if args.config else {}
        self.resolved: dict = {}

    def get(self, key, type=str, default=None, required=False):
        value = getattr(self.args, key, None)
        if value == []:  # empty nargs="*" counts as absent
            value = None
        if value is None:
            raw = self.config.get(key)
            if raw is not None:
                value = _coerce(raw, type)
        if value is None:
            value = default
        if value is None and required:
            self.parser.error(f"missing required parameter '{key}' (flag or config)")
        self.resolved[key] = value
        return value


def _coerce(raw: str, type):
    if type is bool:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"cannot interpret {raw!r} as a boolean")
    if type is list:
        return raw.split()
    return type(raw)


def _pseudo_vocab(words: list[str]) -> corpus.Vocabulary:
    """Positional vocabulary for a bare embedding file (unit counts)."""
    return corpus.Vocabulary(words=words, counts=np.ones(len(words), dtype=np.int64),
                             min_count=1)


def _load_model(path: str, binary: bool = False):
    words, matrix = (embed_io.read_binary if binary else embed_io.read_text)(path)
    matrix = matrix.astype(np.float64)
    model = sgns.EmbeddingModel(input=matrix, output=np.zeros_like(matrix))
    return model, _pseudo_vocab(words)


# --- subcommands ---------------------------------------------------------------


def cmd_tokenize(res: _Resolver) -> None:
    inputs = res.get("inputs", type=list, required=True)
    out = res.get("out", required=True)
    text = corpus.read_text_files(inputs)
    sentences = corpus.tokenize(text)
    corpus.write_tokens(out, sentences)
    write_manifest(out, "tokenize", res.resolved)
    print(f"tokenize: {len(sentences)} sentences, "
          f"{sum(len(s) for s in sentences)} tokens -> {out}")


def cmd_build_vocab(res: _Resolver) -> None:
    tokens_path = res.get("corpus", required=True)
    min_count = res.get("min_count", type=int, default=1)
    out = res.get("out", required=True)
    sentences = corpus.read_tokens(tokens_path)
    vocab = corpus.build_vocabulary(sentences, min_count=min_count)
    corpus.write_vocab(out, vocab)
    write_manifest(out, "build-vocab", res.resolved)
    print(f"build-vocab: {len(vocab)} words at min_count={min_count} -> {out}")


def cmd_gen_pairs(res: _Resolver) -> None:
    tokens_path = res.get("corpus", required=True)
    vocab_path = res.get("vocab", required=True)
    context_size = res.get("context_size", type=int, default=5)
    seed = res.get("seed", type=int, default=0)
    out = res.get("out", required=True)
    vocab = corpus.read_vocab(vocab_path)
    encoded = corpus.encode(corpus.read_tokens(tokens_path), vocab)
    pairs = pairgen.generate_pairs(encoded, context_size, derive_seed(seed, "pairgen"))
    pairgen.write_pairs(out, pairs, meta={"C": context_size, "seed": seed})
    write_manifest(out, "gen-pairs", res.resolved)
    print(f"gen-pairs: {len(pairs)} natural pairs (C={context_size}) -> {out}")


def cmd_augment(res: _Resolver) -> None:
    pairs_path = res.get("pairs", required=True)
    vocab_path = res.get("vocab", required=True)
    lexicon_path = res.get("lexicon", required=True)
    seed = res.get("seed", type=int, default=0)
    sweep = res.get("ratio_sweep")
    if sweep is None:
        ratios = [res.get("ratio", type=float, required=True)]
        outs = [res.get("out", required=True)]
        manifest_anchor = outs[0]
    else:
        ratios = list(SWEEP_PRESETS.get(sweep) or
                      [float(r) for r in sweep.split(",")])
        out_dir = Path(res.get("out_dir", required=True))
        out_dir.mkdir(parents=True, exist_ok=True)
        res.resolved["ratios"] = ratios
        outs = [out_dir / f"pairs_r{r:g}.txt" for r in ratios]
        manifest_anchor = out_dir / "augment"

    vocab = corpus.read_vocab(vocab_path)
    lex = lexicon_mod.load_lexicon(lexicon_path)
    natural, meta = pairgen.read_pairs(pairs_path)
    if natural.n_augmented:
        natural = natural.by_origin(pairgen.ORIGIN_NATURAL)
    pool, substitutions = augment.generate_augmented_pairs(
        natural, lex, vocab, derived_rng(seed, "augment.synonyms")
    )
    for ratio, out in zip(ratios, outs):
        plan = augment.AugmentationPlan(ratio=ratio, seed=derive_seed(seed, "augment.mix"))
        mixed = augment.mix(natural, pool, plan)
        pairgen.write_pairs(out, mixed, meta={"C": meta.get("C", "?"),
                                              "seed": seed, "ratio": ratio})
        augment.write_substitutions(str(out) + ".subs", substitutions,
                                    meta={"seed": seed})
        print(f"augment: ratio={ratio:g} -> {len(mixed)} pairs "
              f"({mixed.n_augmented} augmented) -> {out}")
    write_manifest(manifest_anchor, "augment", res.resolved)


def cmd_train(res: _Resolver) -> None:
    pairs_path = res.get("pairs", required=True)
    vocab_path = res.get("vocab", required=True)
    out = res.get("out", required=True)
    config = sgns.TrainConfig(
        dim=res.get("dim", type=int, default=300),
        negatives=res.get("negatives", type=int, default=5),
        epochs=res.get("epochs", type=int, default=10),
        learning_rate=res.get("lr", type=float, default=0.01),
        batch_size=res.get("batch", type=int, default=10),
        seed=derive_seed(res.get("seed", type=int, default=0), "sgns"),
        init_mode=res.get("init", default=sgns.INIT_RANDOM),
        noise_exponent=res.get("noise_exponent", type=float, default=0.75),
    )
    loss_csv = res.get("loss_csv", default=str(out) + ".loss.csv")
    checkpoint_every = res.get("checkpoint_every", type=int, default=0)
    vocab = corpus.read_vocab(vocab_path)
    dataset, _meta = pairgen.read_pairs(pairs_path)
    initial = None
    if config.init_mode == sgns.INIT_PRETRAINED:
        pretrained = res.get("pretrained_file", required=True)
        binary = res.get("binary", type=bool, default=False)
        initial, coverage = sgns.init_pretrained(
            vocab, pretrained, config.dim,
            derive_seed(config.seed, "sgns.init"), binary=binary,
        )
        print(f"train: pretrained coverage {coverage:.1%}")

    def checkpoint(epoch, model, mean_loss):
        if checkpoint_every and (epoch + 1) % checkpoint_every == 0:
            embed_io.write_text(f"{out}.epoch{epoch + 1}", vocab.words, model.input)

    model, losses = sgns.train(dataset, vocab, config, initial=initial,
                               on_epoch=checkpoint)
    embed_io.write_text(out, vocab.words, model.input)
    with open(loss_csv, "w", encoding="utf-8") as f:
        f.write("epoch,mean_loss\n")
        for epoch, loss in enumerate(losses):
            f.write(f"{epoch},{loss!r}\n")
    write_manifest(out, "train", res.resolved)
    print(f"train: {config.epochs} epochs over {len(dataset)} pairs, "
          f"final mean loss {losses[-1]:.6f} -> {out}")


def cmd_eval_sim(res: _Resolver) -> None:
    model_path = res.get("model", required=True)
    dataset_path = res.get("dataset", required=True)
    fmt = res.get("dataset_format", default="wordsim")
    name = res.get("name", default=Path(dataset_path).stem)
    metric = res.get("metric", default="cosine")
    common_path = res.get("common_vocab")
    out = res.get("out", required=True)
    model, vocab = _load_model(model_path)
    if fmt == "simlex":
        dataset = eval_intrinsic.load_simlex(dataset_path, name=name)
    elif fmt == "wordsim":
        dataset = eval_intrinsic.load_wordsim(dataset_path, name=name)
    else:
        raise ValueError(f"unknown dataset format {fmt!r}")
    common = corpus.read_vocab(common_path) if common_path else None
    rho, used = eval_intrinsic.similarity_correlation(
        model, vocab, dataset, common_vocab=common, metric=metric
    )
    with open(out, "w", encoding="utf-8") as f:
        f.write("dataset,pairs_used,rho\n")
        f.write(f"{dataset.name},{used},{rho!r}\n")
    write_manifest(out, "eval-sim", res.resolved)
    print(f"eval-sim: {dataset.name} rho={rho:.4f} over {used} pairs -> {out}")


def cmd_eval_pairsets(res: _Resolver) -> None:
    model_path = res.get("model", required=True)
    pairs_path = res.get("pairs", required=True)
    subs_path = res.get("subs", required=True)
    vocab_path = res.get("vocab", required=True)
    size_spec = res.get("size", default="1000")
    size = (tuple(int(s) for s in size_spec.split(","))
            if "," in size_spec else int(size_spec))
    seed = res.get("seed", type=int, default=0)
    out = res.get("out", required=True)
    model, _ = _load_model(model_path)
    vocab = corpus.read_vocab(vocab_path)
    dataset, _meta = pairgen.read_pairs(pairs_path)
    natural = dataset.by_origin(pairgen.ORIGIN_NATURAL)
    substitutions = augment.read_substitutions(subs_path)
    sets = eval_intrinsic.build_pairsets(
        substitutions, natural, vocab, size, derived_rng(seed, "pairsets")
    )
    with open(out, "w", encoding="utf-8") as f:
        f.write("set,pairs,mean,std\n")
        for pairset in sets:
            mean, std = eval_intrinsic.pairset_stats(model, pairset)
            f.write(f"{pairset.kind},{len(pairset)},{mean!r},{std!r}\n")
            print(f"eval-pairsets: {pairset.kind} mean={mean:.4f} std={std:.4f}")
    write_manifest(out, "eval-pairsets", res.resolved)


def cmd_eval_wmd(res: _Resolver) -> None:
    model_path = res.get("model", required=True)
    docs_root = res.get("docs", required=True)
    split_path = res.get("split")
    mode = res.get("mode", default="loo")
    k = res.get("k", type=int, default=10)
    prune = res.get("prune", type=bool, default=True)
    threads = res.get("threads", type=int, default=1)
    out = res.get("out", required=True)
    if mode not in ("loo", "split"):
        raise ValueError(f"unknown mode {mode!r}; expected 'loo' or 'split'")
    if mode == "split" and not split_path:
        raise ValueError("mode=split requires a split manifest")
    model, vocab = _load_model(model_path)
    split = eval_extrinsic.read_split_manifest(split_path) if split_path else None
    loaded = eval_extrinsic.load_classification_corpus(docs_root, vocab, split=split)
    if mode == "loo":
        test_docs, train_docs, loo = loaded.train, loaded.train, True
    else:
        test_docs, train_docs, loo = loaded.test, loaded.train, False
    predictions, _ = eval_extrinsic.knn_classify(
        model, test_docs, train_docs, k=k, prune=prune,
        leave_one_out=loo, workers=threads,
    )
    correct = sum(p == d.label for p, d in zip(predictions, test_docs))
    acc, half_width = eval_extrinsic.accuracy_ci(correct, len(test_docs))
    with open(out, "w", encoding="utf-8") as f:
        f.write("doc_id,true_label,predicted_label\n")
        for doc, pred in zip(test_docs, predictions):
            f.write(f"{doc.doc_id},{doc.label},{pred}\n")
        f.write("accuracy,half_width,n\n")
        f.write(f"{acc!r},{half_width!r},{len(test_docs)}\n")
    write_manifest(out, "eval-wmd", res.resolved)
    print(f"eval-wmd: accuracy {acc:.4f} (+/- {half_width:.4f}) over "
          f"{len(test_docs)} docs ({loaded.skipped} skipped) -> {out}")


def cmd_report(res: _Resolver) -> None:
    inputs = res.get("inputs", type=list, required=True)
    out = res.get("out", required=True)
    as_json = res.get("json", type=bool, default=False)
    rows = []
    for path in inputs:
        with open(path, encoding="utf-8", newline="") as f:
            header: list[str] | None = None
            for record in csv.reader(f):
                if not record:
                    continue
                if header is None or len(record) != len(header):
                    header = record
                    continue
                rows.append({"source": path, **dict(zip(header, record))})
    if as_json:
        with open(out, "w", encoding="utf-8") as f:
            json.dump(rows, f, indent=2)
    else:
        keys = ["source"]
        for row in rows:
            keys.extend(k for k in row if k not in keys)
        with open(out, "w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=keys, restval="")
            writer.writeheader()
            writer.writerows(rows)
    write_manifest(out, "report", res.resolved)
    print(f"report: merged {len(rows)} rows from {len(inputs)} files -> {out}")


# --- parser ---------------------------------------------------------------------

_COMMANDS = {
    "tokenize": cmd_tokenize,
    "build-vocab": cmd_build_vocab,
    "gen-pairs": cmd_gen_pairs,
    "augment": cmd_augment,
    "train": cmd_train,
    "eval-sim": cmd_eval_sim,
    "eval-pairsets": cmd_eval_pairsets,
    "eval-wmd": cmd_eval_wmd,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synvec",
        description="Train and evaluate skip-gram embeddings with synonym augmentation.",
    )
    parser.add_argument("--version", action="version", version=f"synvec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help, configure):
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", help="key = value file supplying defaults")
        configure(p)
        return p

    bool_opt = dict(action=argparse.BooleanOptionalAction, default=None)

    add("tokenize", "split raw text into sentences of word tokens", lambda p: (
        p.add_argument("inputs", nargs="*", default=None, help="input text files"),
        p.add_argument("--out"),
    ))
    add("build-vocab", "build a frequency-pruned vocabulary", lambda p: (
        p.add_argument("--corpus", help="tokenized corpus file"),
        p.add_argument("--min-count", type=int, dest="min_count"),
        p.add_argument("--out"),
    ))
    add("gen-pairs", "generate positional-sampled skip-gram pairs", lambda p: (
        p.add_argument("--corpus"),
        p.add_argument("--vocab"),
        p.add_argument("--context-size", "-C", type=int, dest="context_size"),
        p.add_argument("--seed", type=int),
        p.add_argument("--out"),
    ))
    add("augment", "mix synonym-augmented pairs into the dataset", lambda p: (
        p.add_argument("--pairs"),
        p.add_argument("--vocab"),
        p.add_argument("--lexicon"),
        p.add_argument("--ratio", type=float),
        p.add_argument("--ratio-sweep", dest="ratio_sweep",
                       help="'standard' or comma-separated ratios; writes to --out-dir"),
        p.add_argument("--out-dir", dest="out_dir"),
        p.add_argument("--seed", type=int),
        p.add_argument("--out"),
    ))
    add("train", "train skip-gram embeddings with negative sampling", lambda p: (
        p.add_argument("--pairs"),
        p.add_argument("--vocab"),
        p.add_argument("--dim", type=int),
        p.add_argument("--negatives", type=int),
        p.add_argument("--epochs", type=int),
        p.add_argument("--lr", type=float),
        p.add_argument("--batch", type=int),
        p.add_argument("--seed", type=int),
        p.add_argument("--init", choices=(sgns.INIT_RANDOM, sgns.INIT_PRETRAINED)),
        p.add_argument("--pretrained-file", dest="pretrained_file"),
        p.add_argument("--binary", **bool_opt),
        p.add_argument("--noise-exponent", type=float, dest="noise_exponent"),
        p.add_argument("--loss-csv", dest="loss_csv"),
        p.add_argument("--checkpoint-every", type=int, dest="checkpoint_every",
                       help="write model.epochN snapshots every N epochs"),
        p.add_argument("--out"),
    ))
    add("eval-sim", "similarity-distance rank correlation", lambda p: (
        p.add_argument("--model"),
        p.add_argument("--dataset"),
        p.add_argument("--dataset-format", dest="dataset_format",
                       choices=("simlex", "wordsim")),
        p.add_argument("--name"),
        p.add_argument("--metric", choices=("cosine", "euclidean")),
        p.add_argument("--common-vocab", dest="common_vocab"),
        p.add_argument("--out"),
    ))
    add("eval-pairsets", "distance stats over synonym/contextual/random pairs", lambda p: (
        p.add_argument("--model"),
        p.add_argument("--pairs"),
        p.add_argument("--subs", help="substitution records from augment"),
        p.add_argument("--vocab"),
        p.add_argument("--size", help="pairs per set: one value or syn,ctx,rand"),
        p.add_argument("--seed", type=int),
        p.add_argument("--out"),
    ))
    add("eval-wmd", "KNN document classification over Word Mover's Distance", lambda p: (
        p.add_argument("--model"),
        p.add_argument("--docs", help="root of <class>/<doc> text files"),
        p.add_argument("--split", help="manifest of <class>/<doc>\\t<train|test> lines"),
        p.add_argument("--mode", choices=("loo", "split")),
        p.add_argument("--k", type=int),
        p.add_argument("--prune", **bool_opt),
        p.add_argument("--threads", type=int),
        p.add_argument("--out"),
    ))
    add("report", "merge evaluation CSVs into one summary", lambda p: (
        p.add_argument("inputs", nargs="*", default=None),
        p.add_argument("--json", **bool_opt),
        p.add_argument("--out"),
    ))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _COMMANDS[args.command](_Resolver(parser, args))
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"synvec {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
