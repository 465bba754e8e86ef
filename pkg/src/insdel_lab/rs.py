"""Reed-Solomon encoding over a prime field and random-code sampling.

A code is determined by (n, k, q) and an evaluation tuple of n distinct field
residues; codewords are the evaluations of all polynomials of degree < k.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import BudgetError, ParameterError
from .field import PrimeModulus, sample_distinct_tuple

DEFAULT_ENUMERATION_BUDGET = 1 << 22


@dataclass(frozen=True)
class Polynomial:
    """Message polynomial, coefficients low-to-high degree, length exactly k."""

    coefficients: tuple[int, ...]
    modulus: PrimeModulus

    def __post_init__(self) -> None:
        q = self.modulus.q
        if not self.coefficients:
            raise ParameterError("polynomial needs at least one coefficient")
        for c in self.coefficients:
            if not 0 <= c < q:
                raise ParameterError(f"coefficient {c} outside [0, {q})")

    def evaluate(self, x: int) -> int:
        q = self.modulus.q
        acc = 0
        for c in reversed(self.coefficients):
            acc = (acc * x + c) % q
        return acc


@dataclass(frozen=True)
class Codeword:
    symbols: tuple[int, ...]
    modulus: PrimeModulus


@dataclass(frozen=True)
class RsCode:
    """The code RS_{n,k}(alpha): all degree-<k evaluations on a distinct tuple."""

    n: int
    k: int
    modulus: PrimeModulus
    alpha: tuple[int, ...]

    def __post_init__(self) -> None:
        q = self.modulus.q
        if not 1 <= self.k < self.n:
            raise ParameterError(f"need 1 <= k < n, got k={self.k}, n={self.n}")
        if self.n > q:
            raise ParameterError(f"need n <= q, got n={self.n}, q={q}")
        if len(self.alpha) != self.n:
            raise ParameterError(
                f"evaluation tuple has {len(self.alpha)} points, expected {self.n}"
            )
        seen = set()
        for a in self.alpha:
            if not 0 <= a < q:
                raise ParameterError(f"evaluation point {a} outside [0, {q})")
            if a in seen:
                raise ParameterError(f"evaluation point {a} repeats")
            seen.add(a)

    @property
    def q(self) -> int:
        return self.modulus.q


def encode(code: RsCode, f: Polynomial) -> Codeword:
    """Evaluate the message polynomial at each point (Horner, exact)."""
    if f.modulus.q != code.q:
        raise ParameterError(f"polynomial modulus {f.modulus.q} != code modulus {code.q}")
    if len(f.coefficients) != code.k:
        raise ParameterError(
            f"polynomial has {len(f.coefficients)} coefficients, code dimension is {code.k}"
        )
    return Codeword(tuple(f.evaluate(a) for a in code.alpha), code.modulus)


def sample_random_code(
    n: int, k: int, modulus: PrimeModulus, rng: random.Random
) -> RsCode:
    """A code on an evaluation tuple uniform over all n-tuples of distinct points."""
    if not 1 <= k < n:
        raise ParameterError(f"need 1 <= k < n, got k={k}, n={n}")
    if n > modulus.q:
        raise ParameterError(f"need n <= q, got n={n}, q={modulus.q}")
    return RsCode(n, k, modulus, sample_distinct_tuple(n, modulus, rng))


def enumerate_codewords(
    code: RsCode, budget: int = DEFAULT_ENUMERATION_BUDGET
) -> Iterator[tuple[Polynomial, Codeword]]:
    """All q**k message polynomials in lexicographic coefficient order.

    Order is lexicographic on (f_0, ..., f_{k-1}), so the zero codeword comes
    first and witness reports are reproducible.
    """
    total = code.q**code.k
    if total > budget:
        raise BudgetError(
            f"enumerating q^k = {total} codewords exceeds budget {budget}"
        )
    # Incremental evaluation: codeword(f + e_j * delta) differs from codeword(f)
    # by delta * alpha^j coordinatewise, but plain re-encoding is clear and the
    # budget keeps this desk-scale.
    q = code.q
    coeffs = [0] * code.k
    while True:
        poly = Polynomial(tuple(coeffs), code.modulus)
        yield poly, encode(code, poly)
        j = code.k - 1
        while j >= 0 and coeffs[j] == q - 1:
            coeffs[j] = 0
            j -= 1
        if j < 0:
            return
        coeffs[j] += 1


def add_codewords(a: Codeword, b: Codeword) -> Codeword:
    if a.modulus.q != b.modulus.q or len(a.symbols) != len(b.symbols):
        raise ParameterError("codewords come from different codes")
    q = a.modulus.q
    return Codeword(tuple((x + y) % q for x, y in zip(a.symbols, b.symbols)), a.modulus)


def add_polynomials(f: Polynomial, g: Polynomial) -> Polynomial:
    if f.modulus.q != g.modulus.q or len(f.coefficients) != len(g.coefficients):
        raise ParameterError("polynomials live in different spaces")
    q = f.modulus.q
    return Polynomial(
        tuple((x + y) % q for x, y in zip(f.coefficients, g.coefficients)), f.modulus
    )


def codeword_sequence(code: RsCode, coefficients: Sequence[int]) -> Codeword:
    """Convenience: encode raw coefficients (reduced mod q) as a codeword."""
    q = code.q
    return encode(code, Polynomial(tuple(c % q for c in coefficients), code.modulus))
