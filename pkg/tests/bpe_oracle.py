"""Brute-force BPE reference, independent of the production trainer.

Works over the full, un-aggregated corpus and recomputes every pair count
from scratch each iteration. Slow by design; exists so the production
merge loop has something to be wrong against.
"""

from __future__ import annotations

from collections import Counter

from bokit.script import RunKind, segment_runs
from bokit.tokenizer.common import NUM_SPECIALS


def oracle_merges(corpus: list[str], target_vocab_size: int) -> list[tuple[str, str]]:
    sequences: list[list[str]] = []
    base: set[str] = set()
    for line in corpus:
        base.update(line)
        for run in segment_runs(line):
            if run.kind is RunKind.TIBETAN_SYLLABLE:
                sequences.append(list(run.text))

    merges: list[tuple[str, str]] = []
    vocab_size = NUM_SPECIALS + len(base)
    while vocab_size < target_vocab_size:
        counts: Counter[tuple[str, str]] = Counter()
        for seq in sequences:
            for i in range(len(seq) - 1):
                counts[(seq[i], seq[i + 1])] += 1
        if not counts:
            break
        top = max(counts.values())
        if top < 2:
            break
        best = min(pair for pair, c in counts.items() if c == top)
        merges.append(best)
        vocab_size += 1
        merged: list[list[str]] = []
        for seq in sequences:
            out: list[str] = []
            i = 0
            while i < len(seq):
                if i + 1 < len(seq) and (seq[i], seq[i + 1]) == best:
                    out.append(seq[i] + seq[i + 1])
                    i += 2
                else:
                    out.append(seq[i])
                    i += 1
            merged.append(out)
        sequences = merged
    return merges
