"""Certificate algorithms for full column rank, plus the closed-form bounds.

Both algorithms take an assigned paired-power matrix that is symbolically of
full column rank and either certify that the assignment kept it that way
(SUCCESS) or emit a short sequence of indices recording where singularity
appeared.  Bounding the number of possible certificates and the probability
of each yields the failure-probability bounds exposed at the bottom of the
module.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .align import MatchingPair, agreement_count
from .chains import ChainDecomposition, ChainVariant, is_chain, mutually_disjoint, var_set
from .errors import InvariantViolation, ParameterError
from .field import PrimeModulus
from .vmatrix import (
    RowPair,
    VMatrixSpec,
    build,
    build_rows,
    determinant,
    symbolically_zero,
)
from .align import restrict


class OutcomeKind(Enum):
    SUCCESS = "success"
    FAIL = "fail"
    CERTIFICATE = "certificate"


@dataclass(frozen=True)
class CertifyOutcome:
    kind: OutcomeKind
    indices: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if (self.kind is OutcomeKind.CERTIFICATE) != (self.indices is not None):
            raise ParameterError("exactly certificate outcomes carry indices")

    @property
    def is_success(self) -> bool:
        return self.kind is OutcomeKind.SUCCESS


@dataclass(frozen=True)
class BankCheckpoint:
    """State snapshot taken at every matrix-formation step of the bank algorithm."""

    working_parts: tuple[tuple[int, ...], ...]
    chain_cursor: int
    bank_cursor: int
    assigned_rows: int
    replacements: int


@dataclass(frozen=True)
class CertifyRun:
    outcome: CertifyOutcome
    checkpoints: tuple[BankCheckpoint, ...]
    bank_size: int


def _validate_common(
    n: int,
    k: int,
    pair: MatchingPair,
    alpha: Sequence[int],
    modulus: PrimeModulus,
) -> None:
    if k < 1:
        raise ParameterError(f"dimension k must be >= 1, got {k}")
    if pair.first.n != n or pair.second.n != n:
        raise ParameterError(
            f"pair ambient length {pair.first.n} does not match n={n}"
        )
    if len(alpha) != n:
        raise ParameterError(f"assignment has {len(alpha)} values, expected {n}")
    q = modulus.q
    for v in alpha:
        if not 0 <= v < q:
            raise ParameterError(f"assignment value {v} outside [0, {q})")
    if agreement_count(pair) > k - 1:
        raise ParameterError(
            f"index sequences agree on {agreement_count(pair)} coordinates, "
            f"more than k-1 = {k - 1}"
        )


def faulty_index(
    spec: VMatrixSpec,
    alpha: Sequence[int],
    modulus: PrimeModulus,
    *,
    mode: str = "auto",
    rng: random.Random | None = None,
) -> int | None:
    """The unique variable index where the top square block's determinant dies.

    Scanning prefix assignments X_1..X_v in index order, the determinant is a
    nonzero polynomial until some variable makes it vanish identically; that
    variable is returned.  Returns None when the fully assigned determinant
    is nonzero (no such transition exists).
    """
    top = spec.top_square()
    if determinant(build(top, alpha, modulus)) != 0:
        return None
    rows = top.row_pairs()
    assigned: dict[int, int] = {}
    for v in sorted(top.variables()):
        assigned[v] = alpha[v - 1]
        if symbolically_zero(rows, top.k, assigned, modulus, mode=mode, rng=rng):
            return v
    raise InvariantViolation(
        "determinant vanished at the full assignment but at no prefix; "
        "the matrix must have been symbolically singular"
    )


def certify_v1(
    n: int,
    k: int,
    r: int,
    pair: MatchingPair,
    alpha: Sequence[int],
    modulus: PrimeModulus,
    *,
    mode: str = "auto",
    rng: random.Random | None = None,
) -> CertifyOutcome:
    """Row-deletion certificate algorithm.

    Repeatedly finds the faulty variable index of the matrix with all rows
    touching previously recorded indices removed.  SUCCESS guarantees the
    assigned matrix has full column rank; otherwise r distinct faulty indices
    are returned.  The slack precondition 2(r-1) <= l-(2k-1) keeps at least
    2k-1 rows alive in every round, which makes the FAIL branch of the
    pseudocode unreachable; hitting it raises InvariantViolation instead of
    returning, so a logic bug cannot hide as a legitimate outcome.
    """
    _validate_common(n, k, pair, alpha, modulus)
    length = pair.length
    side = 2 * k - 1
    slack = length - side
    if slack < 0:
        raise ParameterError(f"need at least 2k-1 = {side} rows, got {length}")
    if r < 1:
        raise ParameterError(f"certificate length r must be >= 1, got {r}")
    if 2 * (r - 1) > slack:
        raise ParameterError(
            f"r={r} exceeds the admissible certificate length for row slack "
            f"{slack}: need 2(r-1) <= {slack}"
        )
    spec = VMatrixSpec(k, pair)
    banned: list[int] = []
    for _ in range(r):
        sub = spec.delete_rows(banned)
        if sub.rows < side:
            raise InvariantViolation(
                f"truncated matrix kept {sub.rows} < {side} rows; "
                "unreachable under the validated preconditions"
            )
        top = sub.top_square()
        if determinant(build(top, alpha, modulus)) != 0:
            # Fully assigned determinant is nonzero: the symbolic rank check
            # passes a fortiori and no faulty index exists.
            return CertifyOutcome(OutcomeKind.SUCCESS)
        if symbolically_zero(top.row_pairs(), k, None, modulus, mode=mode, rng=rng):
            raise InvariantViolation(
                "truncated matrix lost symbolic full column rank (FAIL branch); "
                "unreachable when the index sequences agree on at most k-1 coordinates"
            )
        idx = faulty_index(sub, alpha, modulus, mode=mode, rng=rng)
        if idx is None:  # pragma: no cover - excluded by the zero determinant above
            return CertifyOutcome(OutcomeKind.SUCCESS)
        banned.append(idx)
    return CertifyOutcome(OutcomeKind.CERTIFICATE, tuple(banned))


def _bank_feasibility_error(k: int, r: int, eps0: Fraction, length: int) -> ParameterError:
    need = Fraction(2 * k - 1) + Fraction(r + 1) / eps0
    have = (1 - eps0) * length
    return ParameterError(
        "bank selection is infeasible for these parameters: the guarantee "
        f"(1-eps0)*l >= 2k-1+(r+1)/eps0 needs {need}, but (1-eps0)*l = {have}"
    )


def certify_v2(
    k: int,
    r: int,
    epsilon0: Fraction | float | str,
    pair: MatchingPair,
    decomposition: ChainDecomposition,
    alpha: Sequence[int],
    modulus: PrimeModulus,
    *,
    mode: str = "auto",
    rng: random.Random | None = None,
) -> CertifyRun:
    """Bank-based certificate algorithm over an ordered chain decomposition.

    The largest chains are reserved as a bank; the rest are assigned chain by
    chain while the top square block of the stacked matrix stays nonsingular.
    When an assignment breaks nonsingularity the offending chain is replaced
    by a same-size prefix of the next bank chain (fresh variables), and the
    current count of assigned rows is recorded as a certificate entry.
    Certificates are therefore nondecreasing with entries in [0, 2k-2].

    Every documented loop invariant is asserted at each checkpoint and every
    checkpoint is recorded, so runs can be replayed and compared.
    """
    eps0 = Fraction(epsilon0)
    if not 0 < eps0 < 1:
        raise ParameterError(f"epsilon0 must lie in (0, 1), got {epsilon0}")
    if r < 1:
        raise ParameterError(f"certificate length r must be >= 1, got {r}")
    n = pair.first.n
    _validate_common(n, k, pair, alpha, modulus)
    first = pair.first_indices
    second = pair.second_indices
    length = pair.length
    if decomposition.first != tuple(first) or decomposition.second != tuple(second):
        raise ParameterError("decomposition was built for a different pair")

    parts = decomposition.parts
    s = len(parts)
    if s == 0:
        raise ParameterError("decomposition has no parts")
    sizes = [len(p) for p in parts]
    for part in parts:
        if Fraction(len(part)) > 1 / eps0:
            raise ParameterError(
                f"part {part.members} has size {len(part)} > 1/eps0 = {1 / eps0}"
            )
        restricted = (restrict(first, part.members), restrict(second, part.members))
        if is_chain(*restricted) is None:
            raise ParameterError(f"part {part.members} is not a chain")
    if Fraction(len(decomposition.ground)) < (1 - eps0) * length:
        raise ParameterError(
            f"parts cover {len(decomposition.ground)} positions, fewer than "
            f"(1-eps0)*l = {(1 - eps0) * length}"
        )
    if sizes != sorted(sizes):
        raise ParameterError("parts must be ordered by nondecreasing size")
    seen_type_two = False
    for part in parts:
        if part.kind.variant is ChainVariant.TYPE_II:
            seen_type_two = True
        elif seen_type_two:
            raise ParameterError("degenerate (equal-value) parts must precede all others")
    if not mutually_disjoint(first, second, [p.members for p in parts]):
        raise ParameterError("parts are not mutually variable-disjoint")

    side = 2 * k - 1
    low = Fraction(r) / eps0
    high = Fraction(r + 1) / eps0
    acc = 0
    bank_size = None
    for m_candidate in range(1, s + 1):
        acc += sizes[s - m_candidate]
        if acc >= low:
            bank_size = m_candidate
            break
    if bank_size is None or acc > high:
        raise _bank_feasibility_error(k, r, eps0, length)
    if sum(sizes[: s - bank_size]) < side:
        raise _bank_feasibility_error(k, r, eps0, length)
    if bank_size < r:
        raise InvariantViolation(
            f"bank holds {bank_size} chains but up to {r} replacements may occur"
        )

    q = modulus.q
    working: list[tuple[int, ...]] = [p.members for p in parts]
    assigned_vars: set[int] = set()
    assigned_rows = 0
    cursor = 1  # next chain to assign (1-based)
    bank_cursor = s - bank_size + 1
    certificate: list[int] = []
    checkpoints: list[BankCheckpoint] = []

    def _symbolic_zero_under(rows: Sequence[RowPair], var_subset: set[int]) -> bool:
        sub_assignment = {v: alpha[v - 1] for v in var_subset}
        return symbolically_zero(rows, k, sub_assignment, modulus, mode=mode, rng=rng)

    def _assert_disjoint() -> None:
        live = [w for w in working if w]
        if not mutually_disjoint(first, second, live):
            raise InvariantViolation("working chains lost mutual variable-disjointness")

    while assigned_rows < side:
        # matrix-formation step: all documented invariants must hold here
        for i in range(s - bank_size):
            if len(working[i]) != sizes[i]:
                raise InvariantViolation("a non-bank chain changed size")
        front_rows = sum(len(working[i]) for i in range(s - bank_size))
        if front_rows < side:
            raise InvariantViolation("non-bank chains no longer cover the square block")
        if not 1 <= cursor <= s - bank_size:
            raise InvariantViolation(f"chain cursor {cursor} left the non-bank range")
        if not s - bank_size + 1 <= bank_cursor <= s:
            raise InvariantViolation(f"bank cursor {bank_cursor} left the bank range")
        if len(working[bank_cursor - 1]) < len(working[cursor - 1]):
            raise InvariantViolation("bank chain is smaller than the chain it must replace")
        _assert_disjoint()

        m_rows: list[RowPair] = []
        for i in range(s - bank_size):
            for p in working[i]:
                m_rows.append((first[p - 1], second[p - 1]))
            if len(m_rows) >= side:
                break
        m_rows = m_rows[:side]

        checkpoints.append(
            BankCheckpoint(
                working_parts=tuple(working),
                chain_cursor=cursor,
                bank_cursor=bank_cursor,
                assigned_rows=assigned_rows,
                replacements=len(certificate),
            )
        )

        part_vars = set(var_set(first, second, working[cursor - 1]))
        if part_vars & assigned_vars:
            raise InvariantViolation("a variable was assigned twice")

        # Nonzero at the full assignment certifies a nonzero polynomial, so
        # the symbolic tests only run when the numeric determinant vanishes.
        full_det_nonzero = (
            determinant(build_rows(m_rows, k, alpha, modulus)) != 0
        )
        if not full_det_nonzero and _symbolic_zero_under(m_rows, assigned_vars):
            raise InvariantViolation(
                "square block became singular under the already-assigned variables"
            )
        nonsingular = full_det_nonzero or not _symbolic_zero_under(
            m_rows, assigned_vars | part_vars
        )
        if nonsingular:
            assigned_vars |= part_vars
            assigned_rows += len(working[cursor - 1])
            cursor += 1
        else:
            take = len(working[cursor - 1])
            working[cursor - 1] = working[bank_cursor - 1][:take]
            working[bank_cursor - 1] = ()
            bank_cursor += 1
            certificate.append(assigned_rows)
            _assert_disjoint()
            if len(certificate) == r:
                return CertifyRun(
                    CertifyOutcome(OutcomeKind.CERTIFICATE, tuple(certificate)),
                    tuple(checkpoints),
                    bank_size,
                )
    return CertifyRun(
        CertifyOutcome(OutcomeKind.SUCCESS), tuple(checkpoints), bank_size
    )


def certificate_count_bound(k: int, r: int) -> tuple[int, int]:
    """Exact count of nondecreasing certificates and its power-of-two bound."""
    if k < 1 or r < 1:
        raise ParameterError(f"need k, r >= 1, got k={k}, r={r}")
    exact = math.comb(2 * k - 2 + r, r)
    bound = 1 << (2 * k + r - 2)
    return exact, bound


@dataclass(frozen=True)
class BoundReport:
    """A probability bound as an exact rational, flagged when it exceeds one."""

    exact: Fraction

    @property
    def value(self) -> float:
        return float(self.exact)

    @property
    def vacuous(self) -> bool:
        return self.exact >= 1


def failure_prob_bound_quadratic(
    n: int, k: int, q: int, epsilon: Fraction | float | str
) -> BoundReport:
    """Probability that the slack-row matrix loses full column rank.

    Evaluates (2n(k-1)/(q-n+1)) ** ceil(eps*n/2) exactly.  Zero when k = 1;
    flagged vacuous when it is >= 1.
    """
    eps = Fraction(epsilon)
    if q < n:
        raise ParameterError(f"need q >= n, got q={q}, n={n}")
    if eps < 0:
        raise ParameterError(f"epsilon must be >= 0, got {epsilon}")
    r = math.ceil(eps * n / 2)
    if k == 1:
        return BoundReport(Fraction(0))
    if r == 0:
        return BoundReport(Fraction(1))
    return BoundReport(Fraction(2 * n * (k - 1), q - n + 1) ** r)


def failure_prob_bound_linear(
    n: int, k: int, q: int, epsilon0: Fraction | float | str, r: int
) -> BoundReport:
    """Bank-algorithm failure bound 2**(2k+r-2) * p**r.

    p is the per-replacement probability ((1/eps0)+1)*2(k-1)/(q-n+1).
    """
    eps0 = Fraction(epsilon0)
    if q < n:
        raise ParameterError(f"need q >= n, got q={q}, n={n}")
    if not 0 < eps0 < 1:
        raise ParameterError(f"epsilon0 must lie in (0, 1), got {epsilon0}")
    if r < 1:
        raise ParameterError(f"need r >= 1, got {r}")
    if k == 1:
        return BoundReport(Fraction(0))
    p = (1 / eps0 + 1) * Fraction(2 * (k - 1), q - n + 1)
    return BoundReport((1 << (2 * k + r - 2)) * p**r)


def schwartz_zippel_bound(n: int, d: int, t_size: int) -> Fraction:
    """Zero-probability bound n*d/(|T|-n+1) for distinct-tuple sampling."""
    if t_size < n:
        raise ParameterError(f"need |T| >= n, got |T|={t_size}, n={n}")
    if n < 0 or d < 0:
        raise ParameterError("n and d must be nonnegative")
    return Fraction(n * d, t_size - n + 1)
