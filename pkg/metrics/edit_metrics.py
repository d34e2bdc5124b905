"""
Insertion/deletion edit metrics.

The reference functions use the textbook LCS dynamic program with linear-space
rows. `PrefixSuffixIndex` answers the same questions with bit-parallel LCS
(one machine-word-style step per text symbol) so the decoder and the
synchronization-property verifier stay usable at a few thousand symbols.
All results are exact integers or Fractions.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence, Tuple, Union

from schemas.errors import AlphabetMismatch, BothEmpty
from schemas.registers import Alphabet


@dataclass(frozen=True)
class SymbolString:
    symbols: Tuple[int, ...]
    alphabet: Alphabet

    def __post_init__(self):
        bad = [s for s in self.symbols if not self.alphabet.contains(s)]
        if bad:
            raise AlphabetMismatch(f"symbols {bad[:5]} outside alphabet of size {self.alphabet.size}")

    @classmethod
    def of(cls, symbols: Sequence[int], alphabet_size: int) -> "SymbolString":
        return cls(tuple(symbols), Alphabet(size=alphabet_size))

    def __len__(self) -> int:
        return len(self.symbols)

    def __getitem__(self, index):
        return self.symbols[index]


Seq = Union[SymbolString, Sequence[Hashable]]


def _unwrap(a: Seq, b: Seq) -> Tuple[Sequence[Hashable], Sequence[Hashable]]:
    if isinstance(a, SymbolString) and isinstance(b, SymbolString) and a.alphabet != b.alphabet:
        raise AlphabetMismatch(f"alphabet sizes {a.alphabet.size} and {b.alphabet.size} differ")
    sa = a.symbols if isinstance(a, SymbolString) else a
    sb = b.symbols if isinstance(b, SymbolString) else b
    return sa, sb


def lcs_length(a: Sequence[Hashable], b: Sequence[Hashable]) -> int:
    """Longest common subsequence length, O(|a|*|b|) time, O(|b|) space"""
    if len(b) > len(a):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        row = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                row.append(prev[j - 1] + 1)
            else:
                row.append(row[j - 1] if row[j - 1] > prev[j] else prev[j])
        prev = row
    return prev[-1]


def insdel_distance(a: Seq, b: Seq) -> int:
    """Minimum number of single-symbol insertions and deletions turning a into b"""
    sa, sb = _unwrap(a, b)
    return len(sa) + len(sb) - 2 * lcs_length(sa, sb)


def relative_suffix_distance(a: Seq, b: Seq) -> Fraction:
    """
    max over k in 1..max(|a|,|b|) of ED(suffix_k(a), suffix_k(b)) / 2k,
    where suffix_k takes the whole string once k passes its length.
    """
    sa, sb = _unwrap(a, b)
    if not sa and not sb:
        raise BothEmpty("relative suffix distance of two empty strings")

    ra, rb = list(reversed(sa)), list(reversed(sb))
    la, lb = len(ra), len(rb)

    # row x of the reversed-prefix LCS table; diag[x] = L[x][min(x, lb)]
    diag = [0] * (la + 1)
    row = [0] * (lb + 1)
    for x in range(1, la + 1):
        prev, row = row, [0] * (lb + 1)
        sym = ra[x - 1]
        for y in range(1, lb + 1):
            if sym == rb[y - 1]:
                row[y] = prev[y - 1] + 1
            else:
                row[y] = row[y - 1] if row[y - 1] > prev[y] else prev[y]
        diag[x] = row[min(x, lb)]

    best = Fraction(0)
    for k in range(1, max(la, lb) + 1):
        ka, kb = min(k, la), min(k, lb)
        lcs = diag[k] if k <= la else row[kb]
        value = Fraction(ka + kb - 2 * lcs, 2 * k)
        if value > best:
            best = value
    return best


def symbol_masks(symbols: Sequence[int]) -> Dict[int, int]:
    """bit p of masks[c] is set iff symbols[p] == c"""
    masks: Dict[int, int] = {}
    for p, c in enumerate(symbols):
        masks[c] = masks.get(c, 0) | (1 << p)
    return masks


def lcs_step(v: int, match: int, full: int) -> int:
    """Advance the bit-parallel LCS column by one text symbol"""
    u = v & match
    return ((v + u) | (v & ~match)) & full


def zeros_below(v: int, width: int) -> int:
    """Zero bits among the low `width` bits: LCS against the first `width` pattern symbols"""
    return width - (v & ((1 << width) - 1)).bit_count()


class PrefixSuffixIndex:
    """
    Relative suffix distances between every prefix of a fixed string S and a
    received string, with optional early exit once a bound is exceeded.
    """

    def __init__(self, symbols: Sequence[int]):
        self.symbols = tuple(symbols)
        self.length = len(self.symbols)
        # reversed-string masks: a right shift by n - j yields the masks of reversed S[:j]
        self._reversed = symbol_masks(list(reversed(self.symbols)))

    def bounded_rsd(self, j: int, received: Sequence[int], i: int,
                    bound: Optional[Tuple[int, int]] = None) -> Optional[Tuple[int, int]]:
        """
        RSD(S[:j], received[:i]) as an unreduced (numerator, denominator) pair.

        Returns None as soon as a partial maximum strictly exceeds `bound`.
        """
        shift = self.length - j
        full = (1 << j) - 1
        v = full
        top_num, top_den = 0, 1

        for k in range(1, max(i, j) + 1):
            if k <= i:
                mask = self._reversed.get(received[i - k], 0)
                v = lcs_step(v, (mask >> shift) & full, full)
            kj = k if k < j else j
            ki = k if k < i else i
            lcs = zeros_below(v, kj)
            ed = ki + kj - 2 * lcs
            if ed * top_den > top_num * 2 * k:
                top_num, top_den = ed, 2 * k
                if bound is not None and top_num * bound[1] > bound[0] * top_den:
                    return None
        return top_num, top_den

    def rsd(self, j: int, received: Sequence[int], i: int) -> Fraction:
        num, den = self.bounded_rsd(j, received, i)
        return Fraction(num, den)


def adjacent_lcs_row(symbols: Sequence[int], masks: Dict[int, int], i: int, j: int,
                     limit: Optional[int] = None) -> List[int]:
    """
    LCS(symbols[i:j], symbols[j:k]) for every k in j+1..n (0-based, half-open),
    returned as a list indexed by k - j - 1. `limit` caps k - j.
    """
    n = len(symbols)
    width = n - j if limit is None else min(n - j, limit)
    full = (1 << width) - 1
    v = full
    for c in symbols[i:j]:
        v = lcs_step(v, (masks.get(c, 0) >> j) & full, full)

    row = []
    zeros = 0
    for t in range(width):
        if not (v >> t) & 1:
            zeros += 1
        row.append(zeros)
    return row
