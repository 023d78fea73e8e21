"""Intrinsic embedding evaluation.

Two probes: rank correlation between embedding distances and human
similarity judgements, and the distance distributions of synonym /
contextual / random word-pair sets. All distances are computed over the
input embedding matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .augment import Substitution
from .corpus import Vocabulary
from .errors import ParseError
from .pairgen import PairDataset
from .sgns import EmbeddingModel

PAIRSET_KINDS = ("synonym", "contextual", "random")


@dataclass
class SimilarityDataset:
    """Human-scored word pairs; unordered duplicates are dropped on load."""

    pairs: list[tuple[str, str, float]]
    name: str = ""


@dataclass
class PairSet:
    """A named set of word-id pairs whose distance distribution we measure."""

    kind: str
    pairs: np.ndarray

    def __post_init__(self):
        if self.kind not in PAIRSET_KINDS:
            raise ValueError(f"unknown pair set kind {self.kind!r}")
        self.pairs = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        if len(self.pairs) and (self.pairs[:, 0] == self.pairs[:, 1]).any():
            raise ValueError("pair set contains self-pairs")

    def __len__(self) -> int:
        return len(self.pairs)


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    """1 - cos(u, v), in [0, 2]. Zero vectors have no direction and raise."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = np.sqrt(u @ u)
    nv = np.sqrt(v @ v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine distance is undefined for a zero vector")
    return float(1.0 - (u @ v) / (nu * nv))


def _average_ranks(x: np.ndarray) -> np.ndarray:
    """1-based ranks; ties share the average of the ranks they occupy."""
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x), dtype=np.float64)
    sorted_x = x[order]
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sorted_x[j + 1] == sorted_x[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_rho(xs, ys) -> float:
    """Rank correlation: Pearson correlation of average ranks."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("inputs must be 1-D sequences of equal length")
    if len(xs) < 2:
        raise ValueError("need at least 2 observations")
    if (xs == xs[0]).all() or (ys == ys[0]).all():
        raise ValueError("correlation is undefined for constant input")
    rx = _average_ranks(xs) - (len(xs) + 1) / 2.0
    ry = _average_ranks(ys) - (len(ys) + 1) / 2.0
    return float((rx @ ry) / np.sqrt((rx @ rx) * (ry @ ry)))


def similarity_correlation(
    model: EmbeddingModel,
    vocab: Vocabulary,
    dataset: SimilarityDataset,
    common_vocab: Vocabulary | None = None,
    metric: str = "cosine",
) -> tuple[float, int]:
    """Spearman's rho between embedding distances and human scores.

    Pairs are filtered to words present in both the model vocabulary and
    ``common_vocab`` (when given), so different models can be compared on
    one shared pair set. Returns (rho, number of pairs used). ``metric``
    may be "cosine" (default) or "euclidean".
    """
    if metric not in ("cosine", "euclidean"):
        raise ValueError(f"unknown metric {metric!r}")
    usable = [
        (w1, w2, score)
        for w1, w2, score in dataset.pairs
        if w1 in vocab and w2 in vocab
        and (common_vocab is None or (w1 in common_vocab and w2 in common_vocab))
    ]
    if len(usable) < 2:
        raise ValueError(
            f"only {len(usable)} dataset pairs are covered by the vocabulary"
        )
    distances = np.empty(len(usable))
    for idx, (w1, w2, _) in enumerate(usable):
        u = model.input[vocab.id(w1)]
        v = model.input[vocab.id(w2)]
        if metric == "cosine":
            distances[idx] = cosine_distance(u, v)
        else:
            distances[idx] = np.sqrt((u - v) @ (u - v))
    scores = np.array([score for _, _, score in usable])
    return spearman_rho(distances, scores), len(usable)


def pairset_stats(model: EmbeddingModel, pairset: PairSet) -> tuple[float, float]:
    """Population mean and standard deviation of pairwise cosine distances."""
    if len(pairset) == 0:
        raise ValueError("pair set is empty")
    a = model.input[pairset.pairs[:, 0]]
    b = model.input[pairset.pairs[:, 1]]
    na = np.sqrt((a * a).sum(1))
    nb = np.sqrt((b * b).sum(1))
    if (na == 0).any() or (nb == 0).any():
        raise ValueError("cosine distance is undefined for a zero vector")
    distances = 1.0 - (a * b).sum(1) / (na * nb)
    return float(distances.mean()), float(distances.std())


def build_pairsets(
    substitutions: Sequence[Substitution],
    natural: PairDataset,
    vocab: Vocabulary,
    sizes: int | tuple[int, int, int],
    rng: np.random.Generator,
) -> tuple[PairSet, PairSet, PairSet]:
    """Assemble the synonym / contextual / random pair sets.

    Synonym pairs are the distinct (original focus, sampled synonym)
    substitutions actually used during augmentation; contextual pairs are
    distinct co-occurring (focus, context) pairs from the natural data;
    random pairs are sampled uniformly from the vocabulary. Each set is
    subsampled to its requested size (one int for all three, or a
    (synonym, contextual, random) triple) of distinct unordered pairs.
    """
    if isinstance(sizes, int):
        sizes = (sizes, sizes, sizes)
    n_syn, n_ctx, n_rand = sizes
    if min(sizes) < 1:
        raise ValueError("pair set sizes must be >= 1")

    synonym_pool = _distinct_unordered(
        np.array([(f, s) for f, s in substitutions], dtype=np.int64).reshape(-1, 2)
    )
    contextual_pool = _distinct_unordered(
        np.stack([natural.focus, natural.context], axis=1)
    )
    synonym = PairSet("synonym", _subsample(synonym_pool, n_syn, rng, "synonym"))
    contextual = PairSet("contextual", _subsample(contextual_pool, n_ctx, rng, "contextual"))

    n_words = len(vocab)
    total_random = n_words * (n_words - 1) // 2
    if n_rand > total_random:
        raise ValueError(
            f"requested {n_rand} random pairs but only {total_random} distinct pairs exist"
        )
    chosen: dict[tuple[int, int], None] = {}
    while len(chosen) < n_rand:
        draw = rng.integers(0, n_words, size=2 * (n_rand - len(chosen)) + 8).reshape(-1, 2)
        for a, b in draw:
            if a != b:
                chosen.setdefault((min(a, b), max(a, b)), None)
                if len(chosen) == n_rand:
                    break
    random = PairSet("random", np.array(list(chosen), dtype=np.int64))
    return synonym, contextual, random


def _distinct_unordered(pairs: np.ndarray) -> np.ndarray:
    """Distinct unordered pairs, self-pairs removed, sorted for determinism."""
    if len(pairs) == 0:
        return pairs.reshape(0, 2)
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    keep = lo != hi
    return np.unique(np.stack([lo[keep], hi[keep]], axis=1), axis=0)


def _subsample(pool: np.ndarray, size: int, rng: np.random.Generator, kind: str) -> np.ndarray:
    if size > len(pool):
        raise ValueError(
            f"requested {size} {kind} pairs but only {len(pool)} distinct pairs are available"
        )
    idx = np.sort(rng.choice(len(pool), size=size, replace=False))
    return pool[idx]


# --- similarity dataset files -------------------------------------------------


def _dedup(pairs: list[tuple[str, str, float]], name: str) -> SimilarityDataset:
    seen: set[tuple[str, str]] = set()
    unique = []
    for w1, w2, score in pairs:
        key = (min(w1, w2), max(w1, w2))
        if key in seen:
            continue
        seen.add(key)
        unique.append((w1, w2, score))
    return SimilarityDataset(pairs=unique, name=name)


def load_simlex(path: str | Path, name: str = "simlex999") -> SimilarityDataset:
    """Read the SimLex-style TSV: a header naming word1, word2 and SimLex999."""
    with open(path, encoding="utf-8") as f:
        header = f.readline().rstrip("\n").split("\t")
        try:
            col1 = header.index("word1")
            col2 = header.index("word2")
            col_score = header.index("SimLex999")
        except ValueError:
            raise ParseError(path, 1, f"header must name word1, word2, SimLex999; got {header}")
        pairs = []
        for lineno, line in enumerate(f, start=2):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) <= max(col1, col2, col_score):
                raise ParseError(path, lineno, f"expected {len(header)} columns")
            try:
                score = float(fields[col_score])
            except ValueError:
                raise ParseError(path, lineno, f"non-numeric score {fields[col_score]!r}")
            if not np.isfinite(score):
                raise ParseError(path, lineno, f"non-finite score {fields[col_score]!r}")
            pairs.append((fields[col1].lower(), fields[col2].lower(), score))
    return _dedup(pairs, name)


def load_wordsim(path: str | Path, name: str = "wordsim353") -> SimilarityDataset:
    """Read `word1\\tword2\\tscore` rows; a leading header line is tolerated."""
    pairs = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t") if "\t" in line else line.split()
            if len(fields) < 3:
                raise ParseError(path, lineno, f"expected 3 columns, got {line!r}")
            try:
                score = float(fields[2])
            except ValueError:
                if lineno == 1:
                    continue  # header line
                raise ParseError(path, lineno, f"non-numeric score {fields[2]!r}")
            if not np.isfinite(score):
                raise ParseError(path, lineno, f"non-finite score {fields[2]!r}")
            pairs.append((fields[0].lower(), fields[1].lower(), score))
    return _dedup(pairs, name)
