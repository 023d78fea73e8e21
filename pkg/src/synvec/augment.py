"""Synonym augmentation: mirror natural pairs through sampled synonyms and mix.

For each occurrence of a candidate focus word, one synonym is sampled and
paired with every context that occurrence kept, so the synonym literally
appears in the same contexts as the original word. The mixed dataset hits a
target augmented fraction by subsampling the augmented pool, never by
duplicating natural data.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Vocabulary
from .errors import ParseError
from .lexicon import SynonymLexicon, is_candidate, sample_synonym
from .pairgen import ORIGIN_AUGMENTED, PairDataset
from .seeds import derived_rng

# Sweep values exposed by the CLI preset `--ratio-sweep standard`.
RATIO_SWEEP = (0.0, 0.02, 0.035, 0.06, 0.10, 0.16, 0.25, 0.37, 0.50, 0.64)

Substitution = tuple[int, int]  # (original focus id, sampled synonym id)


@dataclass(frozen=True)
class AugmentationPlan:
    """Target augmented fraction of the final dataset, plus the mixing seed."""

    ratio: float
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.ratio < 1.0:
            raise ValueError(f"augmentation ratio must be in [0, 1), got {self.ratio}")


def generate_augmented_pairs(
    natural: PairDataset,
    lexicon: SynonymLexicon,
    vocab: Vocabulary,
    rng: np.random.Generator,
) -> tuple[PairDataset, list[Substitution]]:
    """Build the augmented pair pool from surviving natural pairs.

    One synonym is drawn per candidate focus occurrence and substituted as
    the focus of all that occurrence's pairs; contexts and positions are
    inherited unchanged. Also returns the (focus, synonym) substitution
    records actually used, one per augmented occurrence.

    Occurrences are recovered as consecutive runs of the same focus id
    (pair records carry no token index, so directly repeated words merge).
    """
    if natural.n_augmented:
        raise ValueError("input to generate_augmented_pairs must be natural pairs only")
    n = len(natural)
    focus, context, position = [], [], []
    substitutions: list[Substitution] = []
    cuts = np.flatnonzero(natural.focus[1:] != natural.focus[:-1]) + 1
    starts = np.concatenate([[0], cuts]) if n else np.empty(0, dtype=np.int64)
    ends = np.concatenate([cuts, [n]]) if n else np.empty(0, dtype=np.int64)
    for start, end in zip(starts, ends):
        focus_id = int(natural.focus[start])
        word = vocab.words[focus_id]
        if not is_candidate(word, lexicon):
            continue
        synonym = sample_synonym(word, lexicon, vocab, rng)
        if synonym is None:
            continue
        focus.append(np.full(end - start, synonym, dtype=np.int64))
        context.append(natural.context[start:end])
        position.append(natural.position[start:end])
        substitutions.append((focus_id, synonym))
    if not focus:
        return PairDataset.empty(), []
    focus = np.concatenate(focus)
    augmented = PairDataset(
        focus,
        np.concatenate(context),
        np.concatenate(position),
        np.full(len(focus), ORIGIN_AUGMENTED, dtype="<U1"),
    )
    return augmented, substitutions


def augmented_count(n_natural: int, ratio: float) -> int:
    """Number of augmented pairs needed so they form ``ratio`` of the mix."""
    return round(ratio * n_natural / (1.0 - ratio))


def max_ratio(n_natural: int, n_augmented: int) -> float:
    """Largest achievable augmented fraction given the available pool."""
    return n_augmented / (n_natural + n_augmented)


def mix(natural: PairDataset, augmented: PairDataset, plan: AugmentationPlan) -> PairDataset:
    """Combine all natural pairs with a subsample of the augmented pool.

    The augmented pool is subsampled without replacement to exactly
    m = round(ratio * |natural| / (1 - ratio)) pairs and the result is
    shuffled, all driven by the plan seed.
    """
    if len(natural) == 0:
        raise ValueError("natural pair set must be non-empty")
    if natural.n_augmented:
        raise ValueError("natural input to mix contains augmented pairs")
    if augmented.n_natural:
        raise ValueError("augmented input to mix contains natural pairs")
    m = augmented_count(len(natural), plan.ratio)
    if len(augmented) < m:
        raise ValueError(
            f"ratio {plan.ratio} needs {m} augmented pairs but only "
            f"{len(augmented)} are available; maximum achievable ratio is "
            f"{max_ratio(len(natural), len(augmented)):.4f}"
        )
    rng = derived_rng(plan.seed, "augment.mix")
    if m:
        chosen = np.sort(rng.choice(len(augmented), size=m, replace=False))
    else:
        chosen = np.empty(0, dtype=np.int64)
    combined = PairDataset.concat([natural, augmented.subset(chosen)])
    return combined.subset(rng.permutation(len(combined)))


# --- substitution records file ------------------------------------------------


def write_substitutions(
    path: str | Path, substitutions: list[Substitution], meta: dict | None = None
) -> None:
    """Write `<focus_id>\\t<synonym_id>` lines under a `#subs v1` header."""
    fields = " ".join(f"{k}={v}" for k, v in (meta or {}).items())
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"#subs v1 {fields}".rstrip() + "\n")
        for focus_id, synonym_id in substitutions:
            f.write(f"{focus_id}\t{synonym_id}\n")


def read_substitutions(path: str | Path) -> list[Substitution]:
    substitutions = []
    with open(path, encoding="utf-8") as f:
        header = f.readline().rstrip("\n")
        if not header.startswith("#subs v1"):
            raise ParseError(path, 1, f"expected '#subs v1' header, got {header!r}")
        for lineno, line in enumerate(f, start=2):
            line = line.strip()
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ParseError(path, lineno, f"expected '<focus>\\t<synonym>', got {line!r}")
            try:
                substitutions.append((int(fields[0]), int(fields[1])))
            except ValueError:
                raise ParseError(path, lineno, f"non-integer id in {line!r}")
    return substitutions
