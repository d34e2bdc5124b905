"""
The adversarial insertion-deletion channel: transport T, adversarial fill F
and PAD. Works on any entry type, so the same channel carries registers for
the indexing schemes and wire qubits for the binary protocol.
"""

import itertools
import logging
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from config.settings import get_config
from schemas.errors import PatternMismatch, TooLarge
from schemas.noise import NoisePattern
from schemas.registers import BOTTOM, TOP, TransmittedSeq

logger = logging.getLogger(__name__)

MAX_ENUM_N = 12
MAX_ENUM_BUDGET = 3


def apply_channel(channel_input: TransmittedSeq, pattern: NoisePattern, fill: Sequence[object],
                  allow_top: Optional[bool] = None) -> TransmittedSeq:
    """
    Survivor i moves untouched to output slot f(i); the remaining slots in
    1..n-p+q receive the adversary's fill in order; ⊤ pads to n + floor(nδ).
    """
    entries = list(channel_input)
    if len(entries) != pattern.n:
        raise PatternMismatch(f"pattern is for n={pattern.n}, input has {len(entries)} entries")
    if channel_input.has_marks():
        raise PatternMismatch("channel input must not contain ⊤ or ⊥")

    fill = list(fill)
    if len(fill) != pattern.q:
        raise PatternMismatch(f"pattern inserts {pattern.q} entries but {len(fill)} fill entries were given")
    if allow_top is None:
        allow_top = bool(get_config("allow_top_insertion"))
    if any(entry is BOTTOM for entry in fill):
        raise PatternMismatch("the adversary cannot insert ⊥")
    if not allow_top and any(entry is TOP for entry in fill):
        raise PatternMismatch("⊤ insertion is disabled (set INSDEL_ALLOW_TOP to enable)")

    output: list = [None] * pattern.output_length
    for i, f in zip(pattern.survivors, pattern.landing):
        output[f - 1] = entries[i - 1]
    for slot, content in zip(pattern.fill_slots(), fill):
        output[slot - 1] = content
    output.extend([TOP] * (pattern.padded_length - pattern.output_length))

    logger.debug("channel n=%d p=%d q=%d -> %d entries", pattern.n, pattern.p, pattern.q, len(output))
    return TransmittedSeq.of(output)


def enumerate_patterns(n: int, budget: int) -> Iterator[NoisePattern]:
    """Every (S, f) with p + q <= budget, each exactly once"""
    if n > MAX_ENUM_N or budget > MAX_ENUM_BUDGET:
        raise TooLarge(f"exhaustive enumeration limited to n <= {MAX_ENUM_N}, budget <= {MAX_ENUM_BUDGET}")
    if n < 1 or budget < 0:
        raise ValueError(f"need n >= 1 and budget >= 0, got n={n}, budget={budget}")

    delta = Fraction(budget, n)
    positions = range(1, n + 1)
    for p in range(min(budget, n) + 1):
        for deleted in itertools.combinations(positions, p):
            gone = set(deleted)
            survivors = [i for i in positions if i not in gone]
            for q in range(budget - p + 1):
                length = n - p + q
                for fill_slots in itertools.combinations(range(1, length + 1), q):
                    yield NoisePattern.from_slots(n, delta, survivors, fill_slots)


def random_pattern(n: int, delta: Fraction, rng: np.random.Generator,
                   deletions: int, insertions: int) -> NoisePattern:
    """Uniformly placed deletions and insertions with the given counts"""
    deleted = set(int(i) for i in rng.choice(np.arange(1, n + 1), size=deletions, replace=False)) if deletions else set()
    survivors = [i for i in range(1, n + 1) if i not in deleted]
    length = len(survivors) + insertions
    slots = rng.choice(np.arange(1, length + 1), size=insertions, replace=False) if insertions else []
    return NoisePattern.from_slots(n, delta, survivors, [int(t) for t in slots])
