"""Speech-text pairing verification via speaking-rate screening.

A record whose syllables-per-second rate sits far from its corpus (or its
speaker's) typical rate is a likely pairing mistake: wrong transcript,
truncated audio, or concatenated clips. Robust statistics (median and
MAD) keep the screen itself immune to the outliers it hunts.
"""

from __future__ import annotations

import enum
import statistics
from dataclasses import dataclass
from typing import Sequence

from .errors import ZeroDurationError, ZeroSyllablesError

#: 1/Phi^-1(3/4): scales MAD to estimate a standard deviation under normality.
MAD_SCALE = 1.4826

DEFAULT_ACCEPT_Z = 2.5
DEFAULT_REVIEW_Z = 4.0
DEFAULT_MIN_CORPUS = 8


class Decision(enum.Enum):
    ACCEPT = "accept"
    REVIEW = "review"
    REJECT = "reject"


@dataclass(frozen=True)
class ConsistencyThresholds:
    accept_z: float = DEFAULT_ACCEPT_Z
    review_z: float = DEFAULT_REVIEW_Z
    min_corpus: int = DEFAULT_MIN_CORPUS

    def __post_init__(self):
        if not 0 < self.accept_z <= self.review_z:
            raise ValueError(
                f"need 0 < accept_z <= review_z, got {self.accept_z}, {self.review_z}"
            )


@dataclass(frozen=True)
class ConsistencyVerdict:
    rate_syl_per_s: float
    corpus_median: float
    corpus_mad: float
    z_robust: float
    decision: Decision


def speaking_rate(duration_s: float, syllable_count: int) -> float:
    """Syllables per second for one record."""
    if duration_s <= 0:
        raise ZeroDurationError(f"duration must be positive, got {duration_s}")
    if syllable_count <= 0:
        raise ZeroSyllablesError("record has an empty transcript")
    return syllable_count / duration_s


def _verdict(rate: float, median: float, mad: float,
             thresholds: ConsistencyThresholds) -> ConsistencyVerdict:
    if mad == 0.0:
        # Degenerate spread: any off-median rate is suspicious, but never
        # auto-reject on a corpus with no measurable variation.
        decision = Decision.ACCEPT if rate == median else Decision.REVIEW
        z = 0.0
    else:
        z = (rate - median) / (MAD_SCALE * mad)
        if abs(z) <= thresholds.accept_z:
            decision = Decision.ACCEPT
        elif abs(z) <= thresholds.review_z:
            decision = Decision.REVIEW
        else:
            decision = Decision.REJECT
    return ConsistencyVerdict(
        rate_syl_per_s=rate,
        corpus_median=median,
        corpus_mad=mad,
        z_robust=z,
        decision=decision,
    )


def verify_rates(
    rates: Sequence[float],
    thresholds: ConsistencyThresholds | None = None,
) -> list[ConsistencyVerdict]:
    """Robust z-score screening of one group of speaking rates.

    Groups smaller than ``min_corpus`` yield Review for every record; the
    statistics are too thin to reject anything automatically.
    """
    thresholds = thresholds or ConsistencyThresholds()
    if not rates:
        return []
    median = statistics.median(rates)
    mad = statistics.median([abs(r - median) for r in rates])
    verdicts = [_verdict(r, median, mad, thresholds) for r in rates]
    if len(rates) < thresholds.min_corpus:
        # Too few records for the statistics to mean anything: keep the
        # measurements but route everything through human review.
        verdicts = [
            ConsistencyVerdict(
                rate_syl_per_s=v.rate_syl_per_s,
                corpus_median=v.corpus_median,
                corpus_mad=v.corpus_mad,
                z_robust=v.z_robust,
                decision=Decision.REVIEW,
            )
            for v in verdicts
        ]
    return verdicts


def verify_corpus(
    rates: Sequence[float],
    speakers: Sequence[str | None] | None = None,
    thresholds: ConsistencyThresholds | None = None,
) -> list[ConsistencyVerdict]:
    """Screen a corpus, grouping per speaker when speaker ids are present.

    Records without a speaker id fall into one shared group. Returns one
    verdict per input rate, in input order.
    """
    if speakers is None or all(s is None for s in speakers):
        return verify_rates(rates, thresholds)
    if len(speakers) != len(rates):
        raise ValueError("rates and speakers must align")
    groups: dict[str | None, list[int]] = {}
    for idx, spk in enumerate(speakers):
        groups.setdefault(spk, []).append(idx)
    out: list[ConsistencyVerdict | None] = [None] * len(rates)
    for indices in groups.values():
        verdicts = verify_rates([rates[i] for i in indices], thresholds)
        for i, v in zip(indices, verdicts):
            out[i] = v
    return out  # type: ignore[return-value]
