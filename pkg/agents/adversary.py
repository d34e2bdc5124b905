"""
Adversary strategies for the insdel channel.

A strategy looks at the channel input (classical headers are readable, quantum
payloads are only visible as token identities), spends at most floor(nδ)
insertions plus deletions, and supplies the content of every inserted slot.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from channel.insdel_channel import random_pattern
from schemas.noise import NoisePattern
from schemas.registers import ClassicalData, Register, TokenMint, TransmittedSeq
from utils.rational import floor_mul

logger = logging.getLogger(__name__)


class Attack(NamedTuple):
    pattern: NoisePattern
    fill: List[object]


Generator = Callable[[TransmittedSeq, Fraction, np.random.Generator, TokenMint], Attack]


@dataclass(frozen=True)
class AdversaryStrategy:
    name: str
    generator: Generator

    def attack(self, channel_input: TransmittedSeq, delta: Fraction, seed, mint: TokenMint) -> Attack:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        return self.generator(channel_input, delta, rng, mint)


class _Forger:
    """Inserted entries shaped like the traffic: registers with plausible headers, or bits"""

    def __init__(self, seq: TransmittedSeq, mint: TokenMint, rng: np.random.Generator):
        self.mint = mint
        self.rng = rng
        # one pass over the input per attack
        self.registers = any(isinstance(entry, Register) for entry in seq)
        self.headers = [entry.header for entry in seq
                        if isinstance(entry, Register) and entry.header is not None] if self.registers else []

    def __call__(self, header: Optional[str] = None, tag: str = "fill") -> object:
        if self.registers:
            if header is None:
                header = self.headers[int(self.rng.integers(0, len(self.headers)))] if self.headers else "1"
            return Register(payload=self.mint.adversarial(tag), header=header)
        return ClassicalData(int(self.rng.integers(0, 2)))


def pattern_from_edits(n: int, delta: Fraction, deleted: Sequence[int],
                       insert_after: Sequence[int]) -> NoisePattern:
    """
    Pattern that deletes the given input positions and inserts one entry
    right after each listed input position (0 = before everything).
    """
    gone = set(deleted)
    survivors = [i for i in range(1, n + 1) if i not in gone]
    slots = []
    for count, after in enumerate(sorted(insert_after)):
        kept_before = sum(1 for i in survivors if i <= after)
        slots.append(kept_before + count + 1)
    return NoisePattern.from_slots(n, delta, survivors, slots)


def _uniform(seq: TransmittedSeq, delta: Fraction, rng: np.random.Generator, mint: TokenMint) -> Attack:
    n = len(seq)
    budget = floor_mul(n, delta)
    p = int(rng.integers(0, min(budget, n) + 1))
    pattern = random_pattern(n, delta, rng, deletions=p, insertions=budget - p)
    forge = _Forger(seq, mint, rng)
    return Attack(pattern, [forge(tag="uniform") for _ in range(pattern.q)])


def _burst_delete(seq: TransmittedSeq, delta: Fraction, rng: np.random.Generator, mint: TokenMint) -> Attack:
    n = len(seq)
    width = min(floor_mul(n, delta), n)
    start = int(rng.integers(1, n - width + 2))
    return Attack(pattern_from_edits(n, delta, range(start, start + width), []), [])


def _burst_insert(seq: TransmittedSeq, delta: Fraction, rng: np.random.Generator, mint: TokenMint) -> Attack:
    n = len(seq)
    width = floor_mul(n, delta)
    after = int(rng.integers(0, n + 1))
    pattern = pattern_from_edits(n, delta, [], [after] * width)
    forge = _Forger(seq, mint, rng)
    return Attack(pattern, [forge(tag="burst") for _ in range(width)])


def _index_forging(seq: TransmittedSeq, delta: Fraction, rng: np.random.Generator, mint: TokenMint) -> Attack:
    """Delete registers and put forgeries carrying their headers in their place"""
    n = len(seq)
    budget = floor_mul(n, delta)
    pairs = min(budget // 2, n)
    targets = sorted(int(i) for i in rng.choice(np.arange(1, n + 1), size=pairs, replace=False)) if pairs else []
    # an odd leftover unit becomes one plain deletion
    spare = [i for i in range(1, n + 1) if i not in targets]
    extra = [int(rng.choice(spare))] if budget % 2 and spare else []

    survivors = [i for i in range(1, n + 1) if i not in targets and i not in extra]
    # forgery for target t sits exactly where t would have landed
    forge = _Forger(seq, mint, rng)
    slots, fill = [], []
    for t in targets:
        slots.append(sum(1 for i in survivors if i < t) + len(slots) + 1)
        original = seq[t - 1]
        if isinstance(original, Register):
            fill.append(forge(header=original.header, tag=f"forge:{original.header}"))
        elif isinstance(original, ClassicalData):
            fill.append(ClassicalData(1 - original.value))
        else:
            fill.append(forge())
    return Attack(NoisePattern.from_slots(n, delta, survivors, slots), fill)


def _barrier_starts(seq: TransmittedSeq, barrier: int) -> List[int]:
    """1-based positions of every '1' followed by at least `barrier` classical zeros"""
    entries = seq.entries
    starts = []
    for t, entry in enumerate(entries):
        if entry != ClassicalData(1):
            continue
        window = entries[t + 1:t + 1 + barrier]
        if len(window) == barrier and all(e == ClassicalData(0) for e in window):
            starts.append(t + 1)
    return starts


def _barrier_attacker(barrier: Optional[int]) -> Generator:
    def attack(seq: TransmittedSeq, delta: Fraction, rng: np.random.Generator, mint: TokenMint) -> Attack:
        starts = _barrier_starts(seq, barrier) if barrier else []
        if not starts:
            return _uniform(seq, delta, rng, mint)

        n = len(seq)
        budget = floor_mul(n, delta)
        chosen = sorted(int(t) for t in rng.choice(starts, size=min(budget, len(starts)), replace=False))
        deleted, insert_after = [], []
        for start in chosen:
            if rng.integers(0, 2):
                deleted.append(start)  # drop the leading 1
            else:
                insert_after.append(start + barrier // 2)  # split the zero run
        pattern = pattern_from_edits(n, delta, deleted, insert_after)
        return Attack(pattern, [ClassicalData(1) for _ in insert_after])

    return attack


def _noiseless(seq: TransmittedSeq, delta: Fraction, rng: np.random.Generator, mint: TokenMint) -> Attack:
    return Attack(NoisePattern.identity(len(seq), delta), [])


def builtin_adversaries(barrier: Optional[int] = None) -> List[AdversaryStrategy]:
    """`barrier` is the public protocol parameter s the barrier attacker aims at"""
    return [
        AdversaryStrategy("uniform-random-insdel", _uniform),
        AdversaryStrategy("burst-delete", _burst_delete),
        AdversaryStrategy("burst-insert", _burst_insert),
        AdversaryStrategy("index-forging", _index_forging),
        AdversaryStrategy("barrier-attacker", _barrier_attacker(barrier)),
        AdversaryStrategy("none", _noiseless),
    ]


def get_adversary(name: str, barrier: Optional[int] = None) -> AdversaryStrategy:
    strategies: Dict[str, AdversaryStrategy] = {a.name: a for a in builtin_adversaries(barrier)}
    if name not in strategies:
        raise KeyError(f"unknown adversary {name!r}; choose from {', '.join(strategies)}")
    return strategies[name]
