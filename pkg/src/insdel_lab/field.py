"""Exact arithmetic in a prime field and reproducible sampling of distinct tuples.

Field elements are canonical residues in ``[0, q)``.  Hot paths elsewhere in
the package work on plain ints modulo ``q``; the :class:`FieldElement` wrapper
provides the operator suite for code that wants algebraic notation.

Randomness is organised around ``(seed, stream_id)`` pairs: the same pair
always yields the same generator, and distinct streams derived from one seed
are safe to hand to concurrent workers.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from .errors import ParameterError

_U64 = 1 << 64

# Deterministic Miller-Rabin witness set, sufficient for all inputs < 2^64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality check for integers below 2**64."""
    if n < 2:
        return False
    if n >= _U64:
        raise ParameterError(f"primality check supports moduli below 2**64, got {n}")
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeModulus:
    """The order q of the code alphabet; verified prime at construction."""

    q: int

    def __post_init__(self) -> None:
        if not isinstance(self.q, int) or self.q < 2:
            raise ParameterError(f"modulus must be an integer >= 2, got {self.q!r}")
        if not is_prime(self.q):
            raise ParameterError(f"modulus {self.q} is not prime")

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value % self.q, self)

    def __repr__(self) -> str:
        return f"PrimeModulus({self.q})"


@dataclass(frozen=True)
class FieldElement:
    """A residue in [0, q) with exact field arithmetic.

    Mixing elements of different moduli is rejected rather than coerced.
    """

    value: int
    modulus: PrimeModulus

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.modulus.q:
            raise ParameterError(
                f"value {self.value} outside [0, {self.modulus.q})"
            )

    def _check(self, other: "FieldElement") -> int:
        if not isinstance(other, FieldElement):
            raise ParameterError(f"expected FieldElement, got {type(other).__name__}")
        if other.modulus.q != self.modulus.q:
            raise ParameterError(
                f"modulus mismatch: {self.modulus.q} vs {other.modulus.q}"
            )
        return self.modulus.q

    def __add__(self, other: "FieldElement") -> "FieldElement":
        q = self._check(other)
        return FieldElement((self.value + other.value) % q, self.modulus)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        q = self._check(other)
        return FieldElement((self.value - other.value) % q, self.modulus)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        q = self._check(other)
        return FieldElement(self.value * other.value % q, self.modulus)

    def __neg__(self) -> "FieldElement":
        return FieldElement(-self.value % self.modulus.q, self.modulus)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError(f"zero has no inverse in F_{self.modulus.q}")
        return FieldElement(pow(self.value, -1, self.modulus.q), self.modulus)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return self * other.inverse()

    def __pow__(self, exponent: int) -> "FieldElement":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return FieldElement(pow(self.value, exponent, self.modulus.q), self.modulus)

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.modulus.q})"


def derive_stream(seed: int, stream_id: int) -> int:
    """Collapse a (seed, stream) pair into one 64-bit generator seed.

    Uses a keyed hash so that neighbouring stream ids do not produce
    correlated Mersenne-Twister states.
    """
    for name, v in (("seed", seed), ("stream_id", stream_id)):
        if not 0 <= v < _U64:
            raise ParameterError(f"{name} must fit in 64 bits, got {v}")
    digest = hashlib.blake2b(
        seed.to_bytes(8, "little") + stream_id.to_bytes(8, "little"),
        digest_size=8,
    ).digest()
    return int.from_bytes(digest, "little")


def stream_rng(seed: int, stream_id: int = 0) -> random.Random:
    """A deterministic generator for the given (seed, stream) pair."""
    return random.Random(derive_stream(seed, stream_id))


@dataclass(frozen=True)
class RandomSeed:
    """Root of a reproducible randomness tree.

    Identical (seed, stream_id) pairs reproduce identical draws bit for bit;
    each worker or trial takes its own stream so generator state is never
    shared.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        derive_stream(self.seed, self.stream_id)  # validates the 64-bit range

    def rng(self) -> random.Random:
        return stream_rng(self.seed, self.stream_id)

    def child(self, stream_id: int) -> "RandomSeed":
        return RandomSeed(derive_stream(self.seed, self.stream_id), stream_id)


def sample_distinct_tuple(
    count: int, modulus: PrimeModulus, rng: random.Random
) -> tuple[int, ...]:
    """Draw ``count`` pairwise-distinct residues, uniform over all such tuples.

    Dense case (count/q above 1/8) runs a partial Fisher-Yates shuffle over an
    implicit [0, q) array held sparsely in a dict; sparse case rejection-samples
    against a hash set.  Both keep memory at O(count) for huge q.
    """
    q = modulus.q
    if count < 0:
        raise ParameterError(f"count must be nonnegative, got {count}")
    if count > q:
        raise ParameterError(f"cannot draw {count} distinct values from F_{q}")
    if count * 8 > q:
        perm: dict[int, int] = {}
        out = []
        for i in range(count):
            j = rng.randrange(i, q)
            vi = perm.get(i, i)
            vj = perm.get(j, j)
            perm[i] = vj
            perm[j] = vi
            out.append(vj)
        return tuple(out)
    seen: set[int] = set()
    out = []
    while len(out) < count:
        v = rng.randrange(q)
        if v not in seen:
            seen.add(v)
            out.append(v)
    return tuple(out)
