"""Paired-power matrices over F_q: construction, rank, and identity testing.

A matching pair (I, J) of length l and a dimension k define an l x (2k-1)
matrix whose row i is (1, X_{I_i}, ..., X_{I_i}^{k-1}, X_{J_i}, ..., X_{J_i}^{k-1}).
Full column rank of every admissible assigned instance is the algebraic
certificate that a Reed-Solomon code survives a given number of insertions
and deletions, so this module provides:

* exact construction/assignment and rank over F_q,
* row deletion by variable index and block stacking over position parts,
* the zero-polynomial test for partially assigned square submatrices,
  exact (sparse permutation expansion) for small dimensions and randomized
  with a quantified one-sided error otherwise.

Variable indices are 1-based; an assignment maps index v to the residue
substituted for X_v, and a plain sequence is read as a prefix assignment
of X_1, X_2, ...
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .align import MatchingPair, matching_pair, restrict
from .errors import ParameterError
from .field import PrimeModulus
from .rs import RsCode

EXACT_EXPANSION_LIMIT = 7  # side length; 7! permutation terms is still cheap
PIT_ERROR_BITS = 40

RowPair = tuple[int, int]
Monomial = tuple[tuple[int, int], ...]  # ((variable, exponent), ...) sorted
SparsePolynomial = dict[Monomial, int]


@dataclass(frozen=True)
class VMatrixSpec:
    """Symbolic description of the paired-power matrix for (k, I, J)."""

    k: int
    pair: MatchingPair

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ParameterError(f"dimension k must be >= 1, got {self.k}")
        if self.pair.first.n != self.pair.second.n:
            raise ParameterError(
                "both index sequences must share one ambient length, got "
                f"{self.pair.first.n} and {self.pair.second.n}"
            )

    @property
    def n(self) -> int:
        return self.pair.first.n

    @property
    def rows(self) -> int:
        return self.pair.length

    @property
    def cols(self) -> int:
        return 2 * self.k - 1

    def row_pairs(self) -> tuple[RowPair, ...]:
        return tuple(zip(self.pair.first_indices, self.pair.second_indices))

    def variables(self) -> frozenset[int]:
        return frozenset(self.pair.first_indices) | frozenset(self.pair.second_indices)

    def delete_rows(self, banned: Iterable[int]) -> "VMatrixSpec":
        """Drop every row whose I- or J-index lies in the banned variable set."""
        b = frozenset(banned)
        for v in b:
            if not 1 <= v <= self.n:
                raise ParameterError(f"banned index {v} outside [1, {self.n}]")
        keep = [
            p
            for p, (i, j) in enumerate(self.row_pairs(), 1)
            if i not in b and j not in b
        ]
        return VMatrixSpec(
            self.k,
            matching_pair(
                restrict(self.pair.first_indices, keep),
                restrict(self.pair.second_indices, keep),
                self.n,
            ),
        )

    def top_square(self) -> "VMatrixSpec":
        side = self.cols
        if self.rows < side:
            raise ParameterError(
                f"matrix has {self.rows} rows, cannot take a {side}x{side} top block"
            )
        keep = range(1, side + 1)
        return VMatrixSpec(
            self.k,
            matching_pair(
                restrict(self.pair.first_indices, keep),
                restrict(self.pair.second_indices, keep),
                self.n,
            ),
        )


@dataclass(frozen=True)
class BlockSpec:
    """Vertical stack of the restricted matrices over an ordered part list."""

    k: int
    pair: MatchingPair
    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ParameterError(f"dimension k must be >= 1, got {self.k}")
        for part in self.parts:
            if not part:
                raise ParameterError("block parts must be nonempty")

    def row_pairs(self) -> tuple[RowPair, ...]:
        first = self.pair.first_indices
        second = self.pair.second_indices
        out: list[RowPair] = []
        for part in self.parts:
            fs = restrict(first, part)
            ss = restrict(second, part)
            out.extend(zip(fs, ss))
        return tuple(out)


@dataclass(frozen=True)
class AssignedMatrix:
    """A fully assigned matrix over F_q, entries as canonical residues."""

    entries: tuple[tuple[int, ...], ...]
    modulus: PrimeModulus
    provenance: str = field(default="", compare=False)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0


def _power_row(i_var: int, j_var: int, k: int, alpha: Sequence[int], q: int) -> tuple[int, ...]:
    row = [1]
    x = 1
    a = alpha[i_var - 1] % q
    for _ in range(k - 1):
        x = x * a % q
        row.append(x)
    x = 1
    a = alpha[j_var - 1] % q
    for _ in range(k - 1):
        x = x * a % q
        row.append(x)
    return tuple(row)


def build_rows(
    row_pairs: Sequence[RowPair],
    k: int,
    alpha: Sequence[int],
    modulus: PrimeModulus,
    provenance: str = "",
) -> AssignedMatrix:
    q = modulus.q
    entries = tuple(_power_row(i, j, k, alpha, q) for i, j in row_pairs)
    return AssignedMatrix(entries, modulus, provenance)


def build(spec: VMatrixSpec, alpha: Sequence[int], modulus: PrimeModulus) -> AssignedMatrix:
    """Substitute a full evaluation tuple into the symbolic matrix."""
    if len(alpha) != spec.n:
        raise ParameterError(
            f"assignment has {len(alpha)} values, ambient length is {spec.n}"
        )
    return build_rows(
        spec.row_pairs(), spec.k, alpha, modulus,
        provenance=f"pair-power k={spec.k} rows={spec.rows}",
    )


def block_matrix(
    bspec: BlockSpec, alpha: Sequence[int], modulus: PrimeModulus
) -> AssignedMatrix:
    if len(alpha) != bspec.pair.first.n:
        raise ParameterError(
            f"assignment has {len(alpha)} values, ambient length is {bspec.pair.first.n}"
        )
    return build_rows(
        bspec.row_pairs(), bspec.k, alpha, modulus,
        provenance=f"block-stack k={bspec.k} parts={len(bspec.parts)}",
    )


def build_for_code(code: RsCode, pair: MatchingPair) -> AssignedMatrix:
    """Assign a code's evaluation tuple into the matrix for (code.k, pair)."""
    spec = VMatrixSpec(code.k, pair)
    if spec.n != code.n:
        raise ParameterError(
            f"pair ambient length {spec.n} != code length {code.n}"
        )
    return build(spec, code.alpha, code.modulus)


def _rank_kernel(entries: Sequence[Sequence[int]], q: int) -> int:
    # Fraction-free elimination: rows below the pivot are replaced by
    # pivot*row - entry*pivot_row, so no inverses are needed.  The pivot is
    # the first nonzero entry in column order, which keeps runs deterministic.
    mat = [list(r) for r in entries]
    m = len(mat)
    ncols = len(mat[0]) if m else 0
    r = 0
    for c in range(ncols):
        piv_row = None
        for i in range(r, m):
            if mat[i][c] % q:
                piv_row = i
                break
        if piv_row is None:
            continue
        mat[r], mat[piv_row] = mat[piv_row], mat[r]
        prow = mat[r]
        p = prow[c] % q
        for i in range(r + 1, m):
            f = mat[i][c] % q
            if f:
                row = mat[i]
                mat[i] = [(p * a - f * b) % q for a, b in zip(row, prow)]
        r += 1
        if r == m:
            break
    return r


def _det_kernel(entries: Sequence[Sequence[int]], q: int) -> int:
    mat = [list(r) for r in entries]
    m = len(mat)
    det = 1
    for c in range(m):
        piv_row = None
        for i in range(c, m):
            if mat[i][c] % q:
                piv_row = i
                break
        if piv_row is None:
            return 0
        if piv_row != c:
            mat[c], mat[piv_row] = mat[piv_row], mat[c]
            det = -det
        prow = mat[c]
        p = prow[c] % q
        det = det * p % q
        inv = pow(p, -1, q)
        for i in range(c + 1, m):
            f = mat[i][c] % q
            if f:
                f = f * inv % q
                row = mat[i]
                mat[i] = [(a - f * b) % q for a, b in zip(row, prow)]
    return det % q


def rank(matrix: AssignedMatrix) -> int:
    """Exact rank over F_q."""
    return _rank_kernel(matrix.entries, matrix.modulus.q)


def is_full_column_rank(matrix: AssignedMatrix) -> bool:
    return rank(matrix) == matrix.cols


def determinant(matrix: AssignedMatrix) -> int:
    if matrix.rows != matrix.cols:
        raise ParameterError(
            f"determinant needs a square matrix, got {matrix.rows}x{matrix.cols}"
        )
    return _det_kernel(matrix.entries, matrix.modulus.q)


def _normalize_assignment(
    assignment: Mapping[int, int] | Sequence[int] | None, q: int
) -> dict[int, int]:
    if assignment is None:
        return {}
    if isinstance(assignment, Mapping):
        items = assignment.items()
    else:
        items = enumerate(assignment, 1)
    out = {}
    for v, value in items:
        if v < 1:
            raise ParameterError(f"variable index {v} must be >= 1")
        out[v] = value % q
    return out


def _row_entries(row_pairs: Sequence[RowPair], k: int) -> list[list[tuple[int, int]]]:
    rows = []
    for i, j in row_pairs:
        entries = [(i, 0)]
        entries.extend((i, d) for d in range(1, k))
        entries.extend((j, d) for d in range(1, k))
        rows.append(entries)
    return rows


def symbolic_determinant(
    row_pairs: Sequence[RowPair],
    k: int,
    assignment: Mapping[int, int] | Sequence[int] | None,
    modulus: PrimeModulus,
) -> SparsePolynomial:
    """Exact determinant of the partially assigned square matrix.

    Returns a sparse polynomial in the unassigned variables; the empty dict
    is the zero polynomial.  Permutation expansion, so the side length is
    capped at EXACT_EXPANSION_LIMIT.
    """
    side = 2 * k - 1
    if len(row_pairs) != side:
        raise ParameterError(
            f"exact expansion needs a {side}x{side} matrix, got {len(row_pairs)} rows"
        )
    if side > EXACT_EXPANSION_LIMIT:
        raise ParameterError(
            f"side {side} exceeds the exact-expansion limit {EXACT_EXPANSION_LIMIT}"
        )
    q = modulus.q
    assigned = _normalize_assignment(assignment, q)
    rows = _row_entries(row_pairs, k)
    acc: SparsePolynomial = {}
    import itertools

    for perm in itertools.permutations(range(side)):
        # permutation sign by counting inversions (side <= 7 keeps this cheap)
        inversions = 0
        for a in range(side):
            pa = perm[a]
            for b in range(a + 1, side):
                if perm[b] < pa:
                    inversions += 1
        coeff = 1 if inversions % 2 == 0 else q - 1
        exps: dict[int, int] = {}
        for r in range(side):
            var, d = rows[r][perm[r]]
            if d == 0:
                continue
            if var in assigned:
                coeff = coeff * pow(assigned[var], d, q) % q
                if coeff == 0:
                    break
            else:
                exps[var] = exps.get(var, 0) + d
        if coeff == 0:
            continue
        key: Monomial = tuple(sorted(exps.items()))
        total = (acc.get(key, 0) + coeff) % q
        if total:
            acc[key] = total
        else:
            acc.pop(key, None)
    return acc


def polynomial_degrees(poly: SparsePolynomial) -> dict[int, int]:
    """Per-variable degree of a sparse polynomial (missing variables: 0)."""
    degrees: dict[int, int] = {}
    for mono in poly:
        for var, exp in mono:
            if exp > degrees.get(var, 0):
                degrees[var] = exp
    return degrees


def _pit_zero(
    row_pairs: Sequence[RowPair],
    k: int,
    assigned: dict[int, int],
    free_vars: list[int],
    modulus: PrimeModulus,
    rng: random.Random,
    error_bits: int,
) -> bool:
    # One-sided randomized test: evaluate the free variables at fresh points
    # distinct from every assigned value and from each other, as in the
    # distinct-tuple sampling model the probability bound assumes.
    q = modulus.q
    degree = 2 * (k - 1)
    used_values = set(assigned.values())
    n_free = len(free_vars)
    t_size = q - len(used_values)
    denom = t_size - n_free + 1
    if denom <= 0:
        raise ParameterError(
            f"field of order {q} too small for randomized testing with "
            f"{n_free} free and {len(used_values)} assigned values; use exact mode"
        )
    p_single = Fraction(n_free * degree, denom)
    if p_single >= 1:
        raise ParameterError(
            f"per-round error bound {p_single} is vacuous for q={q}; "
            "use exact mode or a larger field"
        )
    if p_single == 0:
        repeats = 1  # determinant is constant in the free variables
    else:
        repeats = max(1, math.ceil(error_bits / -math.log2(float(p_single))))
    base = dict(assigned)
    for _ in range(repeats):
        fresh: dict[int, int] = {}
        taken = set(used_values)
        for v in free_vars:
            while True:
                val = rng.randrange(q)
                if val not in taken:
                    taken.add(val)
                    fresh[v] = val
                    break
        full = dict(base)
        full.update(fresh)
        entries = []
        for i, j in row_pairs:
            row = [1]
            x = 1
            for _ in range(k - 1):
                x = x * full[i] % q
                row.append(x)
            x = 1
            for _ in range(k - 1):
                x = x * full[j] % q
                row.append(x)
            entries.append(row)
        if _det_kernel(entries, q) != 0:
            return False
    return True


def symbolically_zero(
    row_pairs: Sequence[RowPair],
    k: int,
    assignment: Mapping[int, int] | Sequence[int] | None,
    modulus: PrimeModulus,
    *,
    mode: str = "auto",
    rng: random.Random | None = None,
    error_bits: int = PIT_ERROR_BITS,
) -> bool:
    """Is the determinant of the partially assigned square matrix the zero polynomial?

    ``assignment`` is a mapping {variable: value} or a prefix sequence for
    X_1, X_2, ...  With every variable assigned this is a plain determinant
    test.  Mode "exact" expands the determinant symbolically (side <= 7);
    mode "random" evaluates at fresh distinct points often enough to push the
    one-sided error below 2**-error_bits; "auto" picks by matrix side.
    """
    side = 2 * k - 1
    if len(row_pairs) != side:
        raise ParameterError(
            f"zero test needs a square {side}x{side} matrix, got {len(row_pairs)} rows"
        )
    q = modulus.q
    assigned = _normalize_assignment(assignment, q)
    variables = {v for ij in row_pairs for v in ij}
    free_vars = sorted(variables - assigned.keys())
    if not free_vars:
        entries = []
        for i, j in row_pairs:
            missing = [v for v in (i, j) if v not in assigned]
            if missing:
                raise ParameterError(f"variables {missing} have no assigned value")
        matrix = build_rows(
            row_pairs, k, _assignment_vector(assigned, q), modulus
        )
        return determinant(matrix) == 0
    if mode not in ("auto", "exact", "random"):
        raise ParameterError(f"unknown mode {mode!r}")
    if mode == "exact" or (mode == "auto" and side <= EXACT_EXPANSION_LIMIT):
        return not symbolic_determinant(row_pairs, k, assigned, modulus)
    if rng is None:
        rng = random.Random(0x5A17)
    return _pit_zero(row_pairs, k, assigned, free_vars, modulus, rng, error_bits)


def _assignment_vector(assigned: dict[int, int], q: int) -> list[int]:
    top = max(assigned)
    vec = [0] * top
    for v, value in assigned.items():
        vec[v - 1] = value % q
    return vec


def spec_symbolically_zero(
    spec: VMatrixSpec,
    assignment: Mapping[int, int] | Sequence[int] | None,
    modulus: PrimeModulus,
    **kwargs,
) -> bool:
    """Zero test for the top square submatrix of a spec (which must be square)."""
    if spec.rows != spec.cols:
        raise ParameterError(
            f"spec is {spec.rows}x{spec.cols}; take top_square() first"
        )
    return symbolically_zero(spec.row_pairs(), spec.k, assignment, modulus, **kwargs)
