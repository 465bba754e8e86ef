"""Experiment orchestration: oracles, verifiers, and Monte Carlo estimation.

Two routes decide whether a code survives a given number of insertions and
deletions: exhaustive pairwise LCS over all codewords (ground truth at desk
scale) and the matrix verifier that checks full column rank of every
admissible paired-power matrix (sound, possibly conservative: a failed rank
check does not by itself exhibit two colliding codewords, so false verdicts
are reported as inconclusive).

Monte Carlo trials are embarrassingly parallel; each trial derives its own
generator from (seed, trial index), and records are sorted by trial index
before persistence, so output is independent of worker scheduling.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .align import MatchingPair, extract_matching, matching_pair
from .certify import (
    OutcomeKind,
    certify_v1,
    certify_v2,
    failure_prob_bound_linear,
    failure_prob_bound_quadratic,
    schwartz_zippel_bound,
)
from .chains import ChainDecomposition, order_parts, split_long_chains
from .errors import BudgetError, ParameterError
from .field import PrimeModulus, derive_stream, sample_distinct_tuple, stream_rng
from .reporting import Summary, TrialRecord, make_summary
from .rs import (
    DEFAULT_ENUMERATION_BUDGET,
    Codeword,
    Polynomial,
    RsCode,
    enumerate_codewords,
    sample_random_code,
)
from .vmatrix import build_rows, rank

MODES = ("rank", "certify1", "certify2", "zeropoly")
DEFAULT_PAIR_BUDGET = 1 << 26


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated bundle of experiment parameters.

    epsilon drives the derived matrix height l = 2k-1 + floor(eps*n); pass
    epsilon and epsilon0 as Fractions (or exact strings like "1/3") so floor
    and ceiling arithmetic stays exact.
    """

    mode: str
    trials: int
    seed: int
    q: int
    n: int = 0
    k: int = 0
    epsilon: Fraction | None = None
    epsilon0: Fraction | None = None
    r: int | None = None
    budget: int = DEFAULT_ENUMERATION_BUDGET
    workers: int = 1
    timing: bool = False
    sample_pair: bool = False
    pair_first: tuple[int, ...] | None = None
    pair_second: tuple[int, ...] | None = None
    poly: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ParameterError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.trials < 1:
            raise ParameterError(f"need at least one trial, got {self.trials}")
        if self.workers < 1:
            raise ParameterError(f"workers must be >= 1, got {self.workers}")


def derived_length(n: int, k: int, epsilon: Fraction) -> int:
    """Matrix height 2k-1 + floor(eps*n); exact Fraction arithmetic."""
    if epsilon < 0:
        raise ParameterError(f"epsilon must be >= 0, got {epsilon}")
    return 2 * k - 1 + math.floor(Fraction(epsilon) * n)


def default_certificate_length(n: int, epsilon: Fraction) -> int:
    return math.ceil(Fraction(epsilon) * n / 2)


def canonical_pair(n: int, length: int) -> MatchingPair:
    """The deterministic default pair: a prefix window against a suffix window.

    The two windows never agree coordinatewise when length < n.
    """
    if length >= n:
        raise ParameterError(
            f"canonical pair needs l < n (got l={length}, n={n}); "
            "pass an explicit pair instead"
        )
    return matching_pair(
        range(1, length + 1), range(n - length + 1, n + 1), n
    )


def sample_pair(
    n: int, length: int, k: int, rng, max_tries: int = 10_000
) -> MatchingPair:
    """Uniformly sample index-sequence pairs until one agrees on <= k-1 coordinates."""
    if length > n:
        raise ParameterError(f"pair length {length} exceeds ambient {n}")
    population = range(1, n + 1)
    for _ in range(max_tries):
        first = sorted(rng.sample(population, length))
        second = sorted(rng.sample(population, length))
        if sum(a == b for a, b in zip(first, second)) <= k - 1:
            return matching_pair(first, second, n)
    raise ParameterError(
        f"could not sample a pair agreeing on <= {k - 1} coordinates "
        f"(n={n}, l={length}); the constraint is too tight"
    )


@dataclass(frozen=True)
class BruteForceReport:
    max_lcs: int
    first: Codeword
    second: Codeword
    first_poly: Polynomial
    second_poly: Polynomial
    matching: MatchingPair


def _bit_masks(word: Sequence[int]) -> dict[int, int]:
    masks: dict[int, int] = {}
    bit = 1
    for c in word:
        masks[c] = masks.get(c, 0) | bit
        bit <<= 1
    return masks


def _lcs_len_masked(masks: dict[int, int], t: Sequence[int]) -> int:
    row = 0
    for c in t:
        x = masks.get(c, 0) | row
        row = x & ~(x - ((row << 1) | 1))
    return row.bit_count()


def brute_force_max_lcs(
    code: RsCode, budget: int = DEFAULT_ENUMERATION_BUDGET
) -> BruteForceReport:
    """Maximum LCS over all unordered pairs of distinct codewords, with witness.

    The witness is the first pair (in lexicographic enumeration order)
    attaining the maximum, so repeated runs report identical pairs.
    """
    entries = list(enumerate_codewords(code, budget))
    if len(entries) < 2:
        raise ParameterError("code must contain at least two codewords")
    words = [cw.symbols for _, cw in entries]
    masks = [_bit_masks(w) for w in words]
    best = -1
    best_pair = (0, 1)
    for i in range(len(words)):
        mi = masks[i]
        for j in range(i + 1, len(words)):
            val = _lcs_len_masked(mi, words[j])
            if val > best:
                best = val
                best_pair = (i, j)
                if best == code.n:  # cannot grow further
                    break
        if best == code.n:
            break
    i, j = best_pair
    witness = extract_matching(words[i], words[j], best)
    assert witness is not None  # extract_matching succeeds at the attained length
    return BruteForceReport(
        max_lcs=best,
        first=entries[i][1],
        second=entries[j][1],
        first_poly=entries[i][0],
        second_poly=entries[j][0],
        matching=witness,
    )


def corrects_insdel_bruteforce(
    code: RsCode, t: int, budget: int = DEFAULT_ENUMERATION_BUDGET
) -> bool:
    """Ground truth: the code corrects t insertions/deletions iff every
    distinct codeword pair has LCS at most n - t - 1."""
    if t < 0:
        raise ParameterError(f"error count must be >= 0, got {t}")
    report = brute_force_max_lcs(code, budget)
    return report.max_lcs <= code.n - t - 1


@dataclass(frozen=True)
class VerifierReport:
    ok: bool
    witness: MatchingPair | None
    witness_rank: int | None
    pairs_checked: int
    pairs_skipped: int


def corrects_insdel_vmatrix(
    code: RsCode, length: int, pair_budget: int = DEFAULT_PAIR_BUDGET
) -> VerifierReport:
    """Rank-based verifier: sound for "corrects n - length insdels", never
    claims failure.

    Checks full column rank of the assigned matrix for every unordered pair
    of length-`length` index sequences agreeing on at most k-1 coordinates
    (swapping the two sequences permutes columns, so orientation does not
    affect rank).  A False verdict is inconclusive: rank deficiency alone
    does not exhibit two colliding codewords.
    """
    n, k, q = code.n, code.k, code.q
    if not 2 * k - 1 <= length <= n:
        raise ParameterError(f"need 2k-1 <= length <= n, got length={length}")
    total = math.comb(n, length) ** 2
    if total > pair_budget:
        raise BudgetError(
            f"checking C({n},{length})^2 = {total} ordered pairs exceeds budget {pair_budget}"
        )
    combos = sorted(
        itertools.combinations(range(1, n + 1), length), key=lambda c: c[::-1]
    )
    alpha = code.alpha
    target = 2 * k - 1
    max_agree = k - 1
    checked = 0
    skipped = 0
    for j_idx in range(len(combos)):
        second = combos[j_idx]
        for i_idx in range(j_idx + 1):
            first = combos[i_idx]
            agree = sum(a == b for a, b in zip(first, second))
            if agree > max_agree:
                skipped += 1
                continue
            checked += 1
            matrix = build_rows(tuple(zip(first, second)), k, alpha, code.modulus)
            got = rank(matrix)
            if got < target:
                return VerifierReport(
                    ok=False,
                    witness=matching_pair(first, second, n),
                    witness_rank=got,
                    pairs_checked=checked,
                    pairs_skipped=skipped,
                )
    return VerifierReport(
        ok=True, witness=None, witness_rank=None,
        pairs_checked=checked, pairs_skipped=skipped,
    )


def evaluate_poly(coefficients: Sequence[int], x: int, q: int) -> int:
    acc = 0
    for c in reversed(coefficients):
        acc = (acc * x + c) % q
    return acc


def count_roots(coefficients: Sequence[int], q: int) -> int:
    """Exact number of roots in F_q by brute scan (the zero-test oracle)."""
    return sum(1 for x in range(q) if evaluate_poly(coefficients, x, q) == 0)


@dataclass(frozen=True)
class _Plan:
    """Per-run derived objects shared by all trials."""

    config: ExperimentConfig
    modulus: PrimeModulus
    pair: MatchingPair | None
    length: int | None
    r: int | None
    decomposition: ChainDecomposition | None
    bound_exact: Fraction
    poly_degree: int | None


def _poly_degree(coefficients: Sequence[int], q: int) -> int:
    degree = -1
    for i, c in enumerate(coefficients):
        if c % q:
            degree = i
    if degree < 0:
        raise ParameterError("the zero polynomial is not a valid test subject")
    return degree


def build_plan(config: ExperimentConfig) -> _Plan:
    modulus = PrimeModulus(config.q)
    mode = config.mode
    if mode == "zeropoly":
        if not config.poly:
            raise ParameterError("zeropoly mode needs polynomial coefficients")
        degree = _poly_degree(config.poly, config.q)
        bound = schwartz_zippel_bound(1, degree, config.q)
        return _Plan(config, modulus, None, None, None, None, bound, degree)

    n, k = config.n, config.k
    if n < 1 or k < 1:
        raise ParameterError(f"need n, k >= 1, got n={n}, k={k}")
    if config.epsilon is None:
        raise ParameterError(f"mode {mode} needs epsilon to derive the matrix height")
    length = derived_length(n, k, config.epsilon)
    if length > n:
        raise ParameterError(
            f"derived height {length} exceeds n={n}; shrink epsilon or k"
        )
    pair: MatchingPair | None = None
    if config.pair_first is not None or config.pair_second is not None:
        if config.pair_first is None or config.pair_second is None:
            raise ParameterError("pass both index sequences or neither")
        pair = matching_pair(config.pair_first, config.pair_second, n)
        if pair.length != length:
            raise ParameterError(
                f"explicit pair has length {pair.length}, derived height is {length}"
            )
    elif not config.sample_pair:
        pair = canonical_pair(n, length)

    if mode == "rank":
        r = config.r if config.r is not None else default_certificate_length(n, config.epsilon)
        bound = failure_prob_bound_quadratic(n, k, config.q, config.epsilon)
        return _Plan(config, modulus, pair, length, r, None, bound.exact, None)
    if mode == "certify1":
        r = config.r if config.r is not None else default_certificate_length(n, config.epsilon)
        if r < 1:
            raise ParameterError(
                "certify1 needs r >= 1; epsilon is too small for this n"
            )
        bound = failure_prob_bound_quadratic(n, k, config.q, config.epsilon)
        return _Plan(config, modulus, pair, length, r, None, bound.exact, None)
    if mode == "certify2":
        if config.epsilon0 is None or config.r is None:
            raise ParameterError("certify2 mode needs epsilon0 and r")
        if config.sample_pair or pair is None:
            raise ParameterError("certify2 mode runs on a fixed pair")
        _, dec = split_long_chains(
            pair.first_indices, pair.second_indices, config.epsilon0
        )
        dec = order_parts(dec)
        bound = failure_prob_bound_linear(n, k, config.q, config.epsilon0, config.r)
        return _Plan(config, modulus, pair, length, config.r, dec, bound.exact, None)
    raise ParameterError(f"unknown mode {mode!r}")


def _run_trial(plan: _Plan, index: int) -> TrialRecord:
    config = plan.config
    child = derive_stream(config.seed, index)
    rng = stream_rng(config.seed, index)
    started = time.perf_counter_ns() if config.timing else 0

    mode = config.mode
    witness: dict | None = None
    if mode == "zeropoly":
        point = rng.randrange(config.q)
        value = evaluate_poly(config.poly, point, config.q)
        outcome = "violation" if value == 0 else "ok"
        if value == 0:
            witness = {"point": point}
    else:
        alpha = sample_distinct_tuple(config.n, plan.modulus, rng)
        pair = plan.pair
        if pair is None:
            pair = sample_pair(config.n, plan.length, config.k, rng)
        if mode == "rank":
            matrix = build_rows(
                tuple(zip(pair.first_indices, pair.second_indices)),
                config.k, alpha, plan.modulus,
            )
            got = rank(matrix)
            if got < 2 * config.k - 1:
                outcome = "violation"
                witness = {
                    "first": list(pair.first_indices),
                    "second": list(pair.second_indices),
                    "rank": got,
                    "alpha": list(alpha),
                }
            else:
                outcome = "ok"
        elif mode == "certify1":
            result = certify_v1(
                config.n, config.k, plan.r, pair, alpha, plan.modulus
            )
            if result.kind is OutcomeKind.SUCCESS:
                outcome = "success"
            else:
                outcome = "certificate"
                witness = {"indices": list(result.indices), "alpha": list(alpha)}
        elif mode == "certify2":
            run = certify_v2(
                config.k, plan.r, config.epsilon0, pair,
                plan.decomposition, alpha, plan.modulus,
            )
            if run.outcome.kind is OutcomeKind.SUCCESS:
                outcome = "success"
            else:
                outcome = "certificate"
                witness = {"indices": list(run.outcome.indices), "alpha": list(alpha)}
        else:  # pragma: no cover - rejected by build_plan
            raise ParameterError(f"unknown mode {mode!r}")

    nanos = (time.perf_counter_ns() - started) if config.timing else 0
    return TrialRecord(
        trial=index, seed=child, mode=mode, outcome=outcome,
        witness=witness, nanos=nanos,
    )


FAILURE_OUTCOMES = frozenset({"violation", "certificate"})


def replay_trial(config: ExperimentConfig, index: int) -> TrialRecord:
    """Regenerate one trial in isolation; equals the batch-produced record."""
    if not 0 <= index < config.trials:
        raise ParameterError(f"trial index {index} outside [0, {config.trials})")
    return _run_trial(build_plan(config), index)


def _worker_chunk(config: ExperimentConfig, lo: int, hi: int) -> list[TrialRecord]:
    plan = build_plan(config)
    return [_run_trial(plan, i) for i in range(lo, hi)]


@dataclass(frozen=True)
class MonteCarloResult:
    summary: Summary
    records: tuple[TrialRecord, ...]
    bound_exact: Fraction


def monte_carlo(config: ExperimentConfig) -> MonteCarloResult:
    """Run all trials of the configured checker and aggregate failures.

    The theoretical bound for the configured mode rides along in the summary;
    aggregation is associative counting, so results do not depend on worker
    scheduling.
    """
    plan = build_plan(config)
    trials = config.trials
    if config.workers == 1:
        records = [_run_trial(plan, i) for i in range(trials)]
    else:
        chunk = max(1, math.ceil(trials / config.workers))
        spans = [
            (lo, min(lo + chunk, trials)) for lo in range(0, trials, chunk)
        ]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [
                pool.submit(_worker_chunk, config, lo, hi) for lo, hi in spans
            ]
            records = [rec for fut in futures for rec in fut.result()]
        records.sort(key=lambda rec: rec.trial)
    failures = sum(rec.outcome in FAILURE_OUTCOMES for rec in records)
    summary = make_summary(
        trials, failures, float(plan.bound_exact), plan.bound_exact >= 1
    )
    return MonteCarloResult(summary, tuple(records), plan.bound_exact)


def threshold_quadratic(n: int, k: int, epsilon: Fraction) -> Fraction | float:
    """Field-size threshold (1 + 2*2^(6/eps)*k)*n; exact when 6/eps is integral."""
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ParameterError(f"epsilon must be > 0, got {epsilon}")
    exponent = 6 / eps
    if exponent.denominator == 1:
        return Fraction((1 + 2 * 2**exponent.numerator * k) * n)
    try:
        return (1 + 2 * 2.0 ** float(exponent) * k) * n
    except OverflowError:
        return math.inf


def threshold_linear(n: int, k: int, epsilon: Fraction, c: int = 64) -> Fraction | float:
    """Field-size threshold n + 2^(c/eps^2)*k with the constant exposed.

    The analysis fixes no concrete constant; c defaults to 64 and no
    sufficiency claim is attached to it.
    """
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ParameterError(f"epsilon must be > 0, got {epsilon}")
    exponent = Fraction(c) / eps**2
    if exponent.denominator == 1:
        return Fraction(n + 2**exponent.numerator * k)
    try:
        return n + 2.0 ** float(exponent) * k
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class TheoremResult:
    which: str
    summary: Summary
    records: tuple[TrialRecord, ...]
    length: int
    per_pair_bound: Fraction
    union_bound: Fraction
    threshold: Fraction | float
    threshold_ok: bool


def run_theorem_experiment(
    which: str, config: ExperimentConfig, c: int = 64,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
) -> TheoremResult:
    """Sample codes and verify each corrects n - l insdels via the rank verifier.

    Reports the observed failure fraction next to the union-bound prediction
    (pair count squared times the per-pair bound) and whether q clears the
    theorem-level field-size threshold.
    """
    if which not in ("m1", "main"):
        raise ParameterError(f"unknown theorem regime {which!r}; expected m1 or main")
    n, k = config.n, config.k
    if n < 1 or k < 1 or config.epsilon is None:
        raise ParameterError("theorem experiments need n, k, and epsilon")
    if config.epsilon <= 0:
        raise ParameterError("theorem experiments need epsilon > 0")
    modulus = PrimeModulus(config.q)
    length = derived_length(n, k, config.epsilon)
    if length > n:
        raise ParameterError(f"derived height {length} exceeds n={n}")
    if k >= length:
        raise ParameterError(f"need k < derived height, got k={k}, height={length}")
    if which == "m1":
        per_pair = failure_prob_bound_quadratic(n, k, config.q, config.epsilon).exact
        threshold = threshold_quadratic(n, k, config.epsilon)
    else:
        eps0 = config.epsilon0 if config.epsilon0 is not None else config.epsilon / 4
        r = config.r if config.r is not None else max(
            1, math.ceil(config.epsilon**2 * n / 16)
        )
        per_pair = failure_prob_bound_linear(n, k, config.q, eps0, r).exact
        threshold = threshold_linear(n, k, config.epsilon, c)
    union_bound = math.comb(n, length) ** 2 * per_pair
    mode = f"theorem-{which}"

    records: list[TrialRecord] = []
    for index in range(config.trials):
        child = derive_stream(config.seed, index)
        rng = stream_rng(config.seed, index)
        started = time.perf_counter_ns() if config.timing else 0
        code = sample_random_code(n, k, modulus, rng)
        report = corrects_insdel_vmatrix(code, length, pair_budget)
        witness = None
        if not report.ok:
            witness = {
                "alpha": list(code.alpha),
                "first": list(report.witness.first_indices),
                "second": list(report.witness.second_indices),
                "rank": report.witness_rank,
            }
        nanos = (time.perf_counter_ns() - started) if config.timing else 0
        records.append(
            TrialRecord(
                trial=index, seed=child, mode=mode,
                outcome="ok" if report.ok else "violation",
                witness=witness, nanos=nanos,
            )
        )
    failures = sum(rec.outcome == "violation" for rec in records)
    summary = make_summary(
        config.trials, failures, float(union_bound), union_bound >= 1
    )
    return TheoremResult(
        which=which,
        summary=summary,
        records=tuple(records),
        length=length,
        per_pair_bound=per_pair,
        union_bound=union_bound,
        threshold=threshold,
        threshold_ok=Fraction(config.q) >= threshold,
    )
