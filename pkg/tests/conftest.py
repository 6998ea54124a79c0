"""Shared test helpers: Tibetan text generators and speech-like signals."""

from __future__ import annotations

import random
from pathlib import Path

import numpy as np
import pytest

from bokit.audio import AudioBuffer
from bokit.script import TSHEG, unicode_normalize

# Assigned Tibetan letters/marks only (U+0F48 and U+0F98 are unassigned).
CONSONANTS = [chr(c) for c in (*range(0x0F40, 0x0F48), *range(0x0F49, 0x0F6B))]
VOWEL_SIGNS = [chr(c) for c in (0x0F71, 0x0F72, 0x0F74, 0x0F7A, 0x0F7B, 0x0F7C, 0x0F7D)]
SUBJOINED = [chr(c) for c in (*range(0x0F90, 0x0F98), *range(0x0F99, 0x0FBD))]
SHAD = "།"


def random_syllable(rng: random.Random, max_stack: int = 3) -> str:
    """A plausible Tibetan syllable: letters, optional subjoined, vowel."""
    parts = [rng.choice(CONSONANTS)]
    if rng.random() < 0.4:
        parts.append(rng.choice(SUBJOINED))
    if rng.random() < 0.7:
        parts.append(rng.choice(VOWEL_SIGNS))
    if rng.random() < 0.3:
        parts.append(rng.choice(CONSONANTS))
    return unicode_normalize("".join(parts[:max_stack + 2]))


def random_utterance(rng: random.Random, min_syllables: int = 1,
                     max_syllables: int = 10) -> str:
    n = rng.randint(min_syllables, max_syllables)
    text = TSHEG.join(random_syllable(rng) for _ in range(n))
    if rng.random() < 0.3:
        text += SHAD
    return unicode_normalize(text)


def random_corpus(rng: random.Random, n_lines: int, **kwargs) -> list[str]:
    return [random_utterance(rng, **kwargs) for _ in range(n_lines)]


def speechlike(
    duration_s: float,
    rate: int = 22050,
    freq: float = 220.0,
    amp: float = 0.3,
    pad_s: float = 0.3,
    seed: int = 0,
) -> AudioBuffer:
    """Amplitude-modulated tone with a noise floor: enough energy dynamic
    range to behave like speech under the frame-percentile SNR estimate.
    The first and last 40 ms run at full amplitude so the trim boundary is
    never threshold-borderline."""
    rng = np.random.default_rng(seed)
    n = int(duration_s * rate)
    t = np.arange(n) / rate
    envelope = 0.08 + 0.92 * 0.5 * (1 - np.cos(2 * np.pi * 3.1 * t))
    edge = min(int(0.04 * rate), n)
    envelope[:edge] = 1.0
    envelope[n - edge:] = 1.0
    x = amp * envelope * np.sin(2 * np.pi * freq * t)
    x = x + 1e-4 * rng.standard_normal(n)
    pad = 1e-5 * rng.standard_normal(int(pad_s * rate))
    return AudioBuffer(np.concatenate([pad, x, pad]), rate)


@pytest.fixture(scope="session")
def sample_corpus() -> list[str]:
    path = Path(__file__).resolve().parents[1] / "src/bokit/data/sample_corpus.txt"
    return [
        unicode_normalize(line)
        for line in path.read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]


def utterance_with_syllables(rng: random.Random, n: int) -> str:
    return TSHEG.join(random_syllable(rng) for _ in range(n))


def build_defect_corpus(root: Path, n_records: int = 50, seed: int = 123) -> Path:
    """Synthetic multi-source corpus with four injected defects.

    n_records - 4 well-formed records at ~4 syllables/s, plus one fully
    silent clip, one clipped clip, one empty transcript, and one rate
    outlier (~40 syl/s). Returns the transcript index path.
    """
    from bokit.audio import write_wav

    rng = random.Random(seed)
    audio_dir = root / "raw"
    audio_dir.mkdir(parents=True, exist_ok=True)
    lines = []

    def add(rid: str, buf: AudioBuffer, text: str) -> None:
        write_wav(audio_dir / f"{rid}.wav", buf)
        lines.append(f"{rid}\t{rid}.wav\t{text}")

    for i in range(n_records - 4):
        syllables = rng.randint(4, 12)
        # aim near 4 syl/s against the post-trim duration (content + 2 pads)
        content = syllables / 4.0 - 0.21
        content *= rng.uniform(0.96, 1.04)
        add(
            f"rec{i:03}",
            speechlike(content, freq=180.0 + 10 * (i % 9), seed=seed + i),
            utterance_with_syllables(rng, syllables),
        )

    add("defect-silent", AudioBuffer(np.zeros(22050), 22050),
        utterance_with_syllables(rng, 6))
    clipped = np.concatenate([
        np.zeros(2205),
        np.sign(np.sin(2 * np.pi * 150 * np.arange(44100) / 22050)),
        np.zeros(2205),
    ])
    add("defect-clipped", AudioBuffer(clipped, 22050),
        utterance_with_syllables(rng, 8))
    add("defect-empty-text", speechlike(1.4, seed=seed + 901), "")
    add("defect-rate-outlier", speechlike(0.4, seed=seed + 902),
        utterance_with_syllables(rng, 24))

    index = root / "index.tsv"
    index.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return index
