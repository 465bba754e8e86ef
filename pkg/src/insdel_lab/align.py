"""Longest common subsequence, insert/delete edit distance, and matchings.

Words are arbitrary Python sequences over a comparable alphabet (field
residues, characters, test symbols).  All index sequences produced here are
1-based, matching the convention used throughout the matrix and chain layers:
an increasing subsequence of a length-n word lives in {1, ..., n}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParameterError

Word = Sequence


@dataclass(frozen=True)
class IncreasingSubsequence:
    """Strictly increasing positions into an ambient word of length n."""

    indices: tuple[int, ...]
    n: int

    def __post_init__(self) -> None:
        prev = 0
        for idx in self.indices:
            if not prev < idx <= self.n:
                raise ParameterError(
                    f"indices must be strictly increasing within [1, {self.n}], "
                    f"got {self.indices}"
                )
            prev = idx

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class MatchingPair:
    """Two equal-length increasing index sequences, one per word.

    When both sides share the same ambient length n (the codeword setting),
    the pair addresses the two subsequences whose symbols coincide.
    """

    first: IncreasingSubsequence
    second: IncreasingSubsequence

    def __post_init__(self) -> None:
        if len(self.first) != len(self.second):
            raise ParameterError(
                f"matching sides differ in length: {len(self.first)} vs {len(self.second)}"
            )

    @property
    def length(self) -> int:
        return len(self.first)

    @property
    def first_indices(self) -> tuple[int, ...]:
        return self.first.indices

    @property
    def second_indices(self) -> tuple[int, ...]:
        return self.second.indices


def matching_pair(
    first: Iterable[int], second: Iterable[int], n: int, n_second: int | None = None
) -> MatchingPair:
    """Build a validated MatchingPair from raw 1-based index tuples."""
    return MatchingPair(
        IncreasingSubsequence(tuple(first), n),
        IncreasingSubsequence(tuple(second), n if n_second is None else n_second),
    )


def lcs_length(s: Word, t: Word) -> int:
    """Length of a longest common subsequence (bit-parallel row kernel)."""
    if not s or not t:
        return 0
    masks: dict = {}
    bit = 1
    for c in s:
        masks[c] = masks.get(c, 0) | bit
        bit <<= 1
    row = 0
    for c in t:
        x = masks.get(c, 0) | row
        row = x & ~(x - ((row << 1) | 1))
    return row.bit_count()


def _lcs_table(s: Word, t: Word) -> list[list[int]]:
    rows, cols = len(s), len(t)
    table = [[0] * (cols + 1) for _ in range(rows + 1)]
    for i in range(1, rows + 1):
        si = s[i - 1]
        above = table[i - 1]
        cur = table[i]
        for j in range(1, cols + 1):
            if si == t[j - 1]:
                cur[j] = above[j - 1] + 1
            else:
                a, b = above[j], cur[j - 1]
                cur[j] = a if a >= b else b
    return table

def lcs(s: Word, t: Word) -> tuple[int, MatchingPair]:
    """LCS length plus one canonical witness matching.

    The witness backtracks from the bottom-right table cell preferring a
    symbol match, then a step up (shorter first word), then a step left, so
    repeated runs yield identical matchings.
    """
    table = _lcs_table(s, t)
    i, j = len(s), len(t)
    first: list[int] = []
    second: list[int] = []
    while i > 0 and j > 0:
        if s[i - 1] == t[j - 1]:
            first.append(i)
            second.append(j)
            i -= 1
            j -= 1
        elif table[i - 1][j] >= table[i][j - 1]:
            i -= 1
        else:
            j -= 1
    first.reverse()
    second.reverse()
    pair = matching_pair(first, second, len(s), len(t))
    return table[len(s)][len(t)], pair


def edit_distance(s: Word, t: Word) -> int:
    """Minimal number of insertions and deletions turning s into t.

    Computed by its own dynamic program (no substitutions, matches are free)
    so it can serve as a genuine cross-check of the LCS identity
    ed = |s| + |t| - 2*lcs rather than restating it.
    """
    cols = len(t)
    prev = list(range(cols + 1))
    for i, a in enumerate(s, 1):
        cur = [i]
        append = cur.append
        for j in range(1, cols + 1):
            if a == t[j - 1]:
                append(prev[j - 1])
            else:
                x, y = prev[j], cur[j - 1]
                append((x if x <= y else y) + 1)
        prev = cur
    return prev[cols]


def restrict(indices: Sequence[int], positions: Iterable[int]) -> tuple[int, ...]:
    """Select the members of an increasing sequence named by 1-based positions.

    ``positions`` is a subset of {1, ..., len(indices)}; the selection keeps
    increasing order regardless of the iteration order of ``positions``.
    """
    length = len(indices)
    out = []
    for p in sorted(set(positions)):
        if not 1 <= p <= length:
            raise ParameterError(f"position {p} outside [1, {length}]")
        out.append(indices[p - 1])
    return tuple(out)


def restrict_subsequence(
    seq: IncreasingSubsequence, positions: Iterable[int]
) -> IncreasingSubsequence:
    return IncreasingSubsequence(restrict(seq.indices, positions), seq.n)


def agreement_count(pair: MatchingPair) -> int:
    """Number of coordinates where the two index sequences coincide."""
    return sum(a == b for a, b in zip(pair.first_indices, pair.second_indices))


def extract_matching(s: Word, t: Word, length: int) -> MatchingPair | None:
    """First ``length`` matches of the canonical LCS witness, or None.

    Returns None when the two words have no common subsequence that long.
    """
    if length < 0:
        raise ParameterError(f"requested matching length {length} is negative")
    best, pair = lcs(s, t)
    if best < length:
        return None
    return matching_pair(
        pair.first_indices[:length], pair.second_indices[:length], len(s), len(t)
    )
