"""Synthetic corpus with planted synonym structure.

Each topic contributes one synonym pair (a, b). The two words never
co-occur and draw their topical context words from disjoint pools, so
nothing in the natural co-occurrence statistics ties them together; the
lexicon is the only source of the relationship. Shared filler words give
every sentence some common ground, standing in for function words.
"""

import numpy as np

from synvec.corpus import build_vocabulary
from synvec.lexicon import SynonymLexicon


def _letters(n: int) -> str:
    """Letter-only index encoding so words survive the tokenizer intact."""
    if n >= 26:
        raise ValueError("index too large for single-letter encoding")
    return chr(ord("a") + n)


def make_planted_corpus(n_sentences=500, n_topics=20, ctx_per_subtopic=6, seed=1234):
    """Returns (sentences, lexicon, synonym word pairs).

    Sentences are 10 tokens: the topic's content word at positions
    0/2/4/6, filler or subtopic context words elsewhere.
    """
    rng = np.random.default_rng(seed)
    fillers = [f"fill{_letters(i)}" for i in range(10)]
    filler_p = 1.0 / np.arange(1, len(fillers) + 1)
    filler_p /= filler_p.sum()

    synonym_pairs = []
    entries = {}
    for t in range(n_topics):
        a, b = f"syna{_letters(t)}", f"synb{_letters(t)}"
        synonym_pairs.append((a, b))
        entries[a] = {("noun", b)}
        entries[b] = {("noun", a)}
    lexicon = SynonymLexicon(entries=entries)

    sentences = []
    for s in range(n_sentences):
        t = s % n_topics
        side = "a" if (s // n_topics) % 2 == 0 else "b"
        content = f"syn{side}{_letters(t)}"
        ctx_pool = [f"ctx{side}{_letters(t)}{_letters(i)}" for i in range(ctx_per_subtopic)]
        tokens = []
        for pos in range(10):
            if pos in (0, 2, 4, 6):
                tokens.append(content)
            elif rng.random() < 0.5:
                tokens.append(str(rng.choice(fillers, p=filler_p)))
            else:
                tokens.append(ctx_pool[rng.integers(len(ctx_pool))])
        sentences.append(tokens)
    return sentences, lexicon, synonym_pairs


def planted_vocab(sentences):
    return build_vocabulary(sentences, min_count=1)
