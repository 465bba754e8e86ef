"""Chain structure of matching pairs: detection, decomposition, splitting.

A chain is a pair of equal-length increasing index sequences whose entries
interleave — the value at position i of one side recurs at position i+1 of
the other — so consecutive rows of the paired-power matrix share variables.
Singleton pairs with equal values are their own degenerate kind.  Positions
here are 1-based, indexing into the ambient pair of length l.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .align import restrict
from .errors import ParameterError


class ChainVariant(Enum):
    TYPE_I = "type-1"
    TYPE_II = "type-2"


class Orientation(Enum):
    # FIRST_LEADS: first[i] == second[i+1]; SECOND_LEADS: first[i+1] == second[i].
    FIRST_LEADS = "first-leads"
    SECOND_LEADS = "second-leads"


@dataclass(frozen=True)
class ChainKind:
    variant: ChainVariant
    orientation: Orientation | None = None

    def __post_init__(self) -> None:
        if self.variant is ChainVariant.TYPE_I and self.orientation is not None:
            raise ParameterError("singleton-match chains carry no orientation")
        if self.variant is ChainVariant.TYPE_II and self.orientation is None:
            raise ParameterError("interleaved chains need an orientation")


@dataclass(frozen=True)
class Chain:
    """One part of a decomposition: positions within [l], plus its kind."""

    members: tuple[int, ...]
    kind: ChainKind

    def __post_init__(self) -> None:
        if not self.members:
            raise ParameterError("chain parts must be nonempty")
        if list(self.members) != sorted(set(self.members)):
            raise ParameterError(f"chain members must be strictly increasing, got {self.members}")

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class ChainDecomposition:
    first: tuple[int, ...]
    second: tuple[int, ...]
    ground: frozenset[int]
    parts: tuple[Chain, ...]

    def __post_init__(self) -> None:
        covered: set[int] = set()
        for part in self.parts:
            overlap = covered.intersection(part.members)
            if overlap:
                raise ParameterError(f"parts overlap at positions {sorted(overlap)}")
            covered.update(part.members)
        if covered != set(self.ground):
            raise ParameterError("parts do not partition the ground set")

    def part_sets(self) -> tuple[tuple[int, ...], ...]:
        return tuple(part.members for part in self.parts)


def _validate_pair(first: Sequence[int], second: Sequence[int]) -> int:
    if len(first) != len(second):
        raise ParameterError(
            f"index sequences differ in length: {len(first)} vs {len(second)}"
        )
    for seq in (first, second):
        for a, b in zip(seq, seq[1:]):
            if a >= b:
                raise ParameterError(f"index sequence {tuple(seq)} is not increasing")
    return len(first)


def is_chain(first: Sequence[int], second: Sequence[int]) -> ChainKind | None:
    """Classify a pair as a chain, or return None.

    A single position with equal values is the degenerate kind; a single
    position with distinct values satisfies both interleaving identities
    vacuously and is recorded as FIRST_LEADS by convention.
    """
    length = _validate_pair(first, second)
    if length == 0:
        raise ParameterError("chains have length >= 1")
    if length == 1:
        if first[0] == second[0]:
            return ChainKind(ChainVariant.TYPE_I)
        return ChainKind(ChainVariant.TYPE_II, Orientation.FIRST_LEADS)
    if all(first[i] == second[i + 1] for i in range(length - 1)):
        return ChainKind(ChainVariant.TYPE_II, Orientation.FIRST_LEADS)
    if all(first[i + 1] == second[i] for i in range(length - 1)):
        return ChainKind(ChainVariant.TYPE_II, Orientation.SECOND_LEADS)
    return None


def var_set(
    first: Sequence[int], second: Sequence[int], positions: Iterable[int]
) -> frozenset[int]:
    """Union of the variable indices both sides select at the given positions."""
    _validate_pair(first, second)
    pos = sorted(set(positions))
    return frozenset(restrict(first, pos)) | frozenset(restrict(second, pos))


def is_maximal(
    first: Sequence[int],
    second: Sequence[int],
    ambient: Iterable[int],
    sub: Iterable[int],
) -> bool:
    """Can the sub-chain not be extended inside the ambient position set?

    Degenerate chains are always maximal; an interleaved chain is maximal
    when each of its two endpoint variables appears in exactly one of the
    ambient value sets.
    """
    _validate_pair(first, second)
    ambient_set = set(ambient)
    sub_set = set(sub)
    if not sub_set <= ambient_set:
        raise ParameterError("sub positions must lie inside the ambient set")
    f_sub = restrict(first, sub_set)
    s_sub = restrict(second, sub_set)
    kind = is_chain(f_sub, s_sub)
    if kind is None:
        raise ParameterError(f"positions {sorted(sub_set)} do not form a chain")
    if kind.variant is ChainVariant.TYPE_I:
        return True
    low = min(f_sub[0], s_sub[0])
    high = max(f_sub[-1], s_sub[-1])
    f_amb = set(restrict(first, ambient_set))
    s_amb = set(restrict(second, ambient_set))
    return all((v in f_amb) != (v in s_amb) for v in (low, high))


def decompose(
    first: Sequence[int], second: Sequence[int], ground: Iterable[int]
) -> ChainDecomposition:
    """Partition a position set into maximal chains.

    Constructive process: take the smallest remaining position; if the two
    values there are equal, emit a degenerate part; otherwise grow the chain
    by repeatedly absorbing the unique position whose smaller-side value
    equals the current endpoint, then recurse on the remainder.  Strict
    monotonicity of both sequences makes every absorb step unique, so the
    output is deterministic.
    """
    length = _validate_pair(first, second)
    ground_set = set(ground)
    for p in ground_set:
        if not 1 <= p <= length:
            raise ParameterError(f"ground position {p} outside [1, {length}]")
    pos_of_first = {v: p for p, v in enumerate(first, 1)}
    pos_of_second = {v: p for p, v in enumerate(second, 1)}
    remaining = set(ground_set)
    parts: list[Chain] = []
    while remaining:
        start = min(remaining)
        members = [start]
        if first[start - 1] != second[start - 1]:
            if first[start - 1] < second[start - 1]:
                # follow second-side values into the first side
                while True:
                    nxt = pos_of_first.get(second[members[-1] - 1])
                    if nxt is None or nxt not in remaining:
                        break
                    members.append(nxt)
            else:
                while True:
                    nxt = pos_of_second.get(first[members[-1] - 1])
                    if nxt is None or nxt not in remaining:
                        break
                    members.append(nxt)
        members.sort()
        kind = is_chain(restrict(first, members), restrict(second, members))
        if kind is None:  # pragma: no cover - the process builds chains by construction
            raise ParameterError(f"positions {members} do not form a chain")
        parts.append(Chain(tuple(members), kind))
        remaining.difference_update(members)
    return ChainDecomposition(
        tuple(first), tuple(second), frozenset(ground_set), tuple(parts)
    )


def split_long_chains(
    first: Sequence[int], second: Sequence[int], epsilon: Fraction | float | str
) -> tuple[frozenset[int], ChainDecomposition]:
    """Decompose [l] and cut every long chain into pieces of size <= 1/epsilon.

    From each oversized chain, every t-th smallest member is dropped
    (t = floor(1/eps) + 1), which severs the shared variables between the
    surviving consecutive runs and keeps all parts mutually variable-disjoint.
    Returns the surviving ground set (size at least (1-eps)*l) and the
    refined decomposition.
    """
    eps = Fraction(epsilon)
    if not 0 < eps < 1:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    length = _validate_pair(first, second)
    base = decompose(first, second, range(1, length + 1))
    limit = int(1 / eps)  # floor; part sizes are integers so <= 1/eps iff <= floor
    t = limit + 1
    parts: list[Chain] = []
    surviving: set[int] = set()
    for part in base.parts:
        members = part.members
        if len(members) <= limit:
            parts.append(part)
            surviving.update(members)
            continue
        removed_ranks = set(range(t, (len(members) // t) * t + 1, t))
        block: list[int] = []
        blocks: list[list[int]] = []
        for rank, p in enumerate(members, 1):
            if rank in removed_ranks:
                if block:
                    blocks.append(block)
                    block = []
            else:
                block.append(p)
        if block:
            blocks.append(block)
        for b in blocks:
            kind = is_chain(restrict(first, b), restrict(second, b))
            if kind is None:  # pragma: no cover - consecutive runs of a chain stay chains
                raise ParameterError(f"split block {b} is not a chain")
            parts.append(Chain(tuple(b), kind))
            surviving.update(b)
    ground = frozenset(surviving)
    if Fraction(len(ground)) < (1 - eps) * length:  # pragma: no cover - guaranteed by the removal rate
        raise ParameterError("splitting removed more positions than allowed")
    return ground, ChainDecomposition(tuple(first), tuple(second), ground, tuple(parts))


def order_parts(dec: ChainDecomposition) -> ChainDecomposition:
    """Stable-sort parts so degenerate chains come first, then by size.

    Degenerate parts have size one, so the result is nondecreasing in size
    with all degenerate parts leading — the layout the bank-based certificate
    algorithm assumes.
    """
    ordered = sorted(
        dec.parts,
        key=lambda part: (part.kind.variant is ChainVariant.TYPE_II, len(part)),
    )
    return ChainDecomposition(dec.first, dec.second, dec.ground, tuple(ordered))


def mutually_disjoint(
    first: Sequence[int], second: Sequence[int], parts: Sequence[Sequence[int]]
) -> bool:
    """Do the parts select pairwise non-overlapping variable sets?"""
    seen: set[int] = set()
    for part in parts:
        vs = var_set(first, second, part)
        if seen & vs:
            return False
        seen |= vs
    return True
