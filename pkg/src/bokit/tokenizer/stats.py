"""Token statistics used to compare tokenization strategies.

Always includes a codepoint-level baseline (one token per codepoint plus
BOS/EOS framing) so sequence-length reduction can be demonstrated against
the finest-grained segmentation.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

from ..errors import EmptyCorpusError
from ..script import count_syllables, segment_syllables
from .bpe import BpeModel, bpe_encode
from .common import UNK_ID, TokenSequence
from .syllable import SyllableVocab, syllable_encode

CODEPOINT_BASELINE = "codepoint"


@dataclass(frozen=True)
class TokenStats:
    strategy: str
    utterances: int
    mean_tokens_per_utterance: float
    tokens_per_syllable: float
    oov_rate: float
    vocab_coverage: float

    def to_dict(self) -> dict:
        return asdict(self)


def _stats_from_sequences(
    name: str,
    texts: Sequence[str],
    sequences: Sequence[TokenSequence],
    covered: float,
) -> TokenStats:
    total_tokens = sum(len(seq) for seq in sequences)
    content = [i for seq in sequences for i in seq.content_ids]
    total_syllables = sum(count_syllables(t) for t in texts)
    return TokenStats(
        strategy=name,
        utterances=len(texts),
        mean_tokens_per_utterance=total_tokens / len(texts),
        tokens_per_syllable=(total_tokens / total_syllables) if total_syllables else 0.0,
        oov_rate=(sum(1 for i in content if i == UNK_ID) / len(content)) if content else 0.0,
        vocab_coverage=covered,
    )


def _coverage(types: set[str], known: set[str]) -> float:
    if not types:
        return 1.0
    return len(types & known) / len(types)


def compute_token_stats(
    texts: Sequence[str],
    models: Mapping[str, SyllableVocab | BpeModel],
) -> dict[str, TokenStats]:
    """Per-strategy statistics over one corpus, plus the codepoint baseline.

    ``models`` maps a report label to a trained model; each text is encoded
    under every model. Raises EmptyCorpusError when ``texts`` is empty.
    """
    texts = list(texts)
    if not texts:
        raise EmptyCorpusError("token statistics need at least one utterance")

    total_syllables = sum(count_syllables(t) for t in texts)
    baseline_tokens = sum(len(t) + 2 for t in texts)
    out: dict[str, TokenStats] = {
        CODEPOINT_BASELINE: TokenStats(
            strategy=CODEPOINT_BASELINE,
            utterances=len(texts),
            mean_tokens_per_utterance=baseline_tokens / len(texts),
            tokens_per_syllable=(
                baseline_tokens / total_syllables if total_syllables else 0.0
            ),
            oov_rate=0.0,
            vocab_coverage=1.0,
        )
    }

    for name, model in models.items():
        if isinstance(model, BpeModel):
            sequences = [bpe_encode(model, t) for t in texts]
            types = {ch for t in texts for ch in t}
            covered = _coverage(types, set(model.id_to_token))
        else:
            sequences = [syllable_encode(model, t) for t in texts]
            types = {s for t in texts for s in segment_syllables(t)}
            covered = _coverage(types, set(model.id_to_token))
        out[name] = _stats_from_sequences(name, texts, sequences, covered)
    return out
