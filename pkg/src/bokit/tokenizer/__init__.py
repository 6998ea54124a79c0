"""Tibetan-adapted tokenization strategies behind one interface.

Two strategies: syllable-level units with explicit separators, and a
corpus-trained BPE whose merges never cross syllable boundaries. Trained
models serialize to versioned JSON files; :func:`load_model` dispatches
on the strategy recorded in the file.
"""

from __future__ import annotations

from pathlib import Path

from ..errors import ModelFormatError
from .bpe import BpeModel, bpe_decode, bpe_encode, bpe_train
from .common import (
    BOS_ID,
    EOS_ID,
    PAD_ID,
    SEP_ID,
    SPECIAL_TOKENS,
    UNK_ID,
    UNK_MARK,
    Strategy,
    TokenSequence,
    read_model_file,
)
from .stats import CODEPOINT_BASELINE, TokenStats, compute_token_stats
from .syllable import (
    SyllableVocab,
    syllable_decode,
    syllable_encode,
    syllable_vocab_build,
)

__all__ = [
    "BOS_ID", "EOS_ID", "PAD_ID", "SEP_ID", "UNK_ID", "UNK_MARK",
    "SPECIAL_TOKENS", "Strategy", "TokenSequence", "TokenStats",
    "CODEPOINT_BASELINE", "BpeModel", "SyllableVocab",
    "bpe_train", "bpe_encode", "bpe_decode",
    "syllable_vocab_build", "syllable_encode", "syllable_decode",
    "compute_token_stats", "load_model", "encode", "decode",
]


def load_model(path: str | Path) -> SyllableVocab | BpeModel:
    """Load a serialized tokenizer model of either strategy."""
    data = read_model_file(path)
    strategy = data.get("strategy")
    if strategy == Strategy.SYLLABLE.value:
        return SyllableVocab.load(path)
    if strategy == Strategy.BPE.value:
        return BpeModel.load(path)
    raise ModelFormatError(f"model file {path} has unknown strategy {strategy!r}")


def encode(model: SyllableVocab | BpeModel, text: str) -> TokenSequence:
    if isinstance(model, BpeModel):
        return bpe_encode(model, text)
    return syllable_encode(model, text)


def decode(model: SyllableVocab | BpeModel, tokens) -> str:
    if isinstance(model, BpeModel):
        return bpe_decode(model, tokens)
    return syllable_decode(model, tokens)
