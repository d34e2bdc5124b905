"""
Streaming minimum relative-suffix-distance index decoding.

Received position i is decoded to the j in 1..n minimising
RSD(S[1..j], received[1..i]); ties go to the smallest j. Only the first i
received symbols are consulted, so the decoder can run as symbols arrive.

Candidates are visited outward from j = i. A candidate is skipped when the
whole-prefix term alone, |i - j| / (2 max(i, j)), already loses to the best
value found, and a suffix scan stops as soon as its running maximum does.
Both cuts are exact: the returned argmin is the global one.
"""

import logging
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from metrics.edit_metrics import PrefixSuffixIndex, SymbolString
from schemas.errors import LengthMismatch
from schemas.ledger import IndexDecoding, MisdecodingReport
from schemas.noise import NoisePattern
from sync.sync_string import SyncString, require_same_alphabet

logger = logging.getLogger(__name__)


def _outward(center: int, n: int) -> Iterator[int]:
    yield center
    for step in range(1, n):
        if center - step >= 1:
            yield center - step
        if center + step <= n:
            yield center + step
        if center - step < 1 and center + step > n:
            return


def _compare(a: Tuple[int, int], b: Tuple[int, int]) -> int:
    """sign(a - b) for unreduced fractions"""
    diff = a[0] * b[1] - b[0] * a[1]
    return (diff > 0) - (diff < 0)


class StreamingIndexDecoder:
    """Decodes one received symbol at a time against a fixed sync string"""

    def __init__(self, s: SyncString):
        self.s = s
        self.n = len(s)
        self._index = PrefixSuffixIndex(s.content)
        self._received: List[int] = []

    def push(self, symbol: int) -> int:
        self._received.append(symbol)
        return self._argmin(len(self._received))

    def _argmin(self, i: int) -> int:
        received = self._received
        best: Optional[Tuple[int, int]] = None
        best_j = 0

        for j in _outward(min(i, self.n), self.n):
            if best is not None:
                lower = (abs(i - j), 2 * max(i, j))
                c = _compare(lower, best)
                if c > 0 or (c == 0 and j > best_j):
                    continue
            value = self._index.bounded_rsd(j, received, i, best)
            if value is None:
                continue
            if best is None:
                best, best_j = value, j
                continue
            c = _compare(value, best)
            if c < 0 or (c == 0 and j < best_j):
                best, best_j = value, j
        return best_j


def decode_indices(s: SyncString, received: Union[SymbolString, Sequence[int]]) -> IndexDecoding:
    symbols = require_same_alphabet(s, received)
    decoder = StreamingIndexDecoder(s)
    entries = tuple(decoder.push(c) for c in symbols)
    logger.debug("decoded %d received symbols against n=%d", len(entries), len(s))
    return IndexDecoding(n=len(s), entries=entries)


def count_misdecodings(s: SyncString, pattern: NoisePattern, decoding: IndexDecoding) -> MisdecodingReport:
    """
    Successfully transmitted indices whose decoded index is wrong (or ⊥).

    The decoding may stop short of the pattern's output when trailing
    insertions are ⊤, but it must reach every survivor's landing position.
    """
    reach = pattern.landing[-1] if pattern.landing else 0
    if not reach <= len(decoding) <= pattern.output_length:
        raise LengthMismatch(
            f"decoding covers {len(decoding)} positions, pattern outputs {pattern.output_length}"
            f" with survivors up to position {reach}")
    if pattern.n != len(s):
        raise LengthMismatch(f"pattern is for n={pattern.n}, sync string has length {len(s)}")

    report = MisdecodingReport()
    for true_index, position in zip(pattern.survivors, pattern.landing):
        decoded = decoding[position]
        if decoded != true_index:
            report.count += 1
            report.details.append((position, true_index, decoded))
    return report
