"""
ε-synchronization strings: exact verification and seeded construction.

A string S of length n is ε-synchronizing when for every 1 <= i < j < k <= n+1
the insdel distance between S[i..j) and S[j..k) exceeds (1 - ε)(k - i).
"""

import logging
import math
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config.settings import get_config
from metrics.edit_metrics import (SymbolString, adjacent_lcs_row, lcs_step,
                                  symbol_masks, zeros_below)
from schemas.errors import AlphabetMismatch, ConstructionFailed
from schemas.registers import Alphabet
from utils.fs import FileSystemUtils
from utils.rational import Rational, format_rational, parse_rational

logger = logging.getLogger(__name__)


class SyncString(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    content: Tuple[int, ...]
    alphabet_size: int = Field(ge=2)
    epsilon: Rational

    @model_validator(mode="after")
    def _check(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0,1), got {self.epsilon}")
        if any(not 0 <= c < self.alphabet_size for c in self.content):
            raise ValueError("symbol outside the alphabet")
        return self

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(size=self.alphabet_size)

    def __len__(self) -> int:
        return len(self.content)

    def symbol(self, index: int) -> int:
        """S_i for 1-based i"""
        return self.content[index - 1]

    def as_symbol_string(self) -> SymbolString:
        return SymbolString(self.content, self.alphabet)

    def to_text(self) -> str:
        return "\n".join([
            str(len(self.content)),
            format_rational(self.epsilon),
            " ".join(str(c) for c in self.content),
        ]) + "\n"

    @classmethod
    def from_text(cls, text: str, alphabet_size: Optional[int] = None) -> "SyncString":
        lines = text.strip("\n").split("\n")
        if len(lines) < 2:
            raise ValueError("sync string file needs a length line and an epsilon line")
        n = int(lines[0])
        epsilon = parse_rational(lines[1])
        content = tuple(int(tok) for tok in lines[2].split()) if len(lines) > 2 else ()
        if len(content) != n:
            raise ValueError(f"header says n={n} but {len(content)} symbols follow")
        size = alphabet_size or max(2, max(content, default=0) + 1)
        return cls(content=content, alphabet_size=size, epsilon=epsilon)


class SyncCheck(NamedTuple):
    ok: bool
    violation: Optional[Tuple[int, int, int]] = None


def default_alphabet_size(epsilon: Fraction) -> int:
    return 4 * math.ceil(1 / (epsilon * epsilon))


def _violates(ed: int, total: int, epsilon: Fraction) -> bool:
    # ed <= (1 - eps) * total, cross-multiplied
    p, q = epsilon.numerator, epsilon.denominator
    return ed * q <= (q - p) * total


def _partner_lengths(length: int, epsilon: Fraction) -> Tuple[int, int]:
    """
    Lengths an adjacent part can have and still violate next to a part of
    `length`. A violation needs 2 q LCS >= p (left + right) and LCS is at most
    the shorter part, so lopsided triples never violate.
    """
    p, q = epsilon.numerator, epsilon.denominator
    return -(-p * length // (2 * q - p)), (2 * q - p) * length // p


def verify_sync_property(s: Union[SymbolString, Sequence[int]], epsilon: Fraction) -> SyncCheck:
    """
    Exhaustive check of every (i, j, k) triple, in lexicographic order.
    Returns the first violating triple (1-based, half-open) when there is one.
    """
    symbols = list(s.symbols if isinstance(s, SymbolString) else s)
    epsilon = parse_rational(epsilon)
    n = len(symbols)
    masks = symbol_masks(symbols)

    for i0 in range(n):
        for j0 in range(i0 + 1, n):
            left = j0 - i0
            shortest, longest = _partner_lengths(left, epsilon)
            if shortest > n - j0:
                continue
            row = adjacent_lcs_row(symbols, masks, i0, j0, limit=longest)
            for t in range(shortest - 1, len(row)):
                lcs = row[t]
                right = t + 1
                total = left + right
                if _violates(total - 2 * lcs, total, epsilon):
                    return SyncCheck(False, (i0 + 1, j0 + 1, j0 + right + 1))
    return SyncCheck(True, None)


def _extends_cleanly(symbols: List[int], epsilon: Fraction) -> bool:
    """True when no triple ending at the last symbol violates the property"""
    k = len(symbols)
    reversed_masks = symbol_masks(symbols[::-1])

    for j0 in range(1, k):
        right = k - j0
        shortest, longest = _partner_lengths(right, epsilon)
        if shortest > j0:
            continue
        # pattern: reversed S[:j0] (prefix length t <-> i0 = j0 - t); text: reversed S[j0:k]
        width = min(j0, longest)
        shift = k - j0
        full = (1 << width) - 1
        v = full
        for c in reversed(symbols[j0:k]):
            v = lcs_step(v, (reversed_masks.get(c, 0) >> shift) & full, full)
        for left in range(shortest, width + 1):
            total = left + right
            if _violates(total - 2 * zeros_below(v, left), total, epsilon):
                return False
    return True


def _randomized_extension(n: int, epsilon: Fraction, size: int,
                          rng: np.random.Generator, budget: int) -> Optional[List[int]]:
    """Draw symbols uniformly one at a time, backtracking on violations"""
    symbols: List[int] = []
    options: List[List[int]] = []
    checks = 0

    while len(symbols) < n:
        if len(options) == len(symbols):
            options.append([int(c) for c in rng.permutation(size)])
        candidates = options[-1]

        placed = False
        while candidates:
            symbols.append(candidates.pop())
            checks += 1
            if _extends_cleanly(symbols, epsilon):
                placed = True
                break
            symbols.pop()
            if checks > budget:
                return None

        if not placed:
            options.pop()
            if not symbols:
                return None
            symbols.pop()
    return symbols


def sync_cache_path(n: int, epsilon: Fraction, size: int, seed: int) -> Optional[Path]:
    """Where a finished construction is kept, or None when INSDEL_SYNC_CACHE is unset"""
    directory = get_config("sync_cache_dir")
    if not directory:
        return None
    epsilon = parse_rational(epsilon)
    name = f"sync-n{n}-eps{epsilon.numerator}_{epsilon.denominator}-a{size}-seed{seed}.sync"
    return Path(directory) / name


def construct_sync_string(n: int, epsilon: Fraction, alphabet: Alphabet,
                          seed: int, max_attempts: int = 50) -> SyncString:
    """
    Seeded sample-and-verify construction. Attempts run in order and the first
    completed sample wins, so the result depends only on the arguments.
    Results are reused within the process and through the sync cache directory.
    """
    epsilon = parse_rational(epsilon)
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if max_attempts < 1:
        raise ValueError("max_attempts must be positive")
    return _construct(n, epsilon, alphabet.size, seed, max_attempts)


@lru_cache(maxsize=32)
def _construct(n: int, epsilon: Fraction, size: int, seed: int, max_attempts: int) -> SyncString:
    if n <= size:
        # all-distinct symbols: adjacent substrings share nothing
        return SyncString(content=tuple(range(n)), alphabet_size=size, epsilon=epsilon)

    cached = sync_cache_path(n, epsilon, size, seed)
    if cached is not None and cached.exists():
        logger.info("sync string n=%d eps=%s reused from %s", n, epsilon, cached)
        return load_sync_string(cached, size, verify=False)

    for attempt in range(max_attempts):
        rng = np.random.default_rng([seed, attempt])
        candidate = _randomized_extension(n, epsilon, size, rng, budget=64 * n)
        if candidate is None:
            logger.debug("attempt %d for n=%d eps=%s over %d symbols ran out of budget",
                         attempt, n, epsilon, size)
            continue
        # every symbol was kept only once all triples ending at it passed
        logger.info("sync string n=%d eps=%s found on attempt %d", n, epsilon, attempt)
        s = SyncString(content=tuple(candidate), alphabet_size=size, epsilon=epsilon)
        if cached is not None:
            save_sync_string(s, cached)
        return s

    raise ConstructionFailed(max_attempts)


def construct_with_growth(n: int, epsilon: Fraction, seed: int, max_attempts: int = 50,
                          alphabet_size: Optional[int] = None, cap: int = 1 << 16) -> SyncString:
    """Start from the default alphabet and double it on every failed construction"""
    epsilon = parse_rational(epsilon)
    size = alphabet_size or default_alphabet_size(epsilon)
    while True:
        try:
            return construct_sync_string(n, epsilon, Alphabet(size=size), seed, max_attempts)
        except ConstructionFailed:
            if size * 2 > cap:
                raise
            logger.warning("alphabet of %d symbols too small for n=%d eps=%s, doubling", size, n, epsilon)
            size *= 2


def save_sync_string(s: SyncString, path: Union[str, Path]) -> None:
    FileSystemUtils.write_file(Path(path), s.to_text())


def load_sync_string(path: Union[str, Path], alphabet_size: Optional[int] = None,
                     verify: bool = True) -> SyncString:
    s = SyncString.from_text(FileSystemUtils.read_file(Path(path)), alphabet_size)
    if verify:
        check = verify_sync_property(s.content, s.epsilon)
        if not check.ok:
            raise ValueError(f"{path}: not {format_rational(s.epsilon)}-synchronizing, violation at {check.violation}")
    return s


def require_same_alphabet(s: SyncString, received: Union[SymbolString, Sequence[int]]) -> List[int]:
    """Received symbols as a list, after checking they belong to S's alphabet"""
    if isinstance(received, SymbolString):
        if received.alphabet.size != s.alphabet_size:
            raise AlphabetMismatch(
                f"received over {received.alphabet.size} symbols, sync string over {s.alphabet_size}")
        return list(received.symbols)
    symbols = list(received)
    bad = [c for c in symbols if not 0 <= c < s.alphabet_size]
    if bad:
        raise AlphabetMismatch(f"received symbols {bad[:5]} outside alphabet of size {s.alphabet_size}")
    return symbols
