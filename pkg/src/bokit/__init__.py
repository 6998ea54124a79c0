"""bokit: corpus governance and text front-end toolkit for low-resource
Tibetan speech synthesis.

Turns raw multi-source audio+transcript data into a verified,
fine-tune-ready manifest, provides syllable-level and corpus-trained BPE
tokenization adapted to Tibetan script, and computes the evaluation
metrics (syllable accuracy, MOS aggregation) used to compare systems.
"""

from .errors import BokitError

__version__ = "0.1.0"

__all__ = ["BokitError", "__version__"]
