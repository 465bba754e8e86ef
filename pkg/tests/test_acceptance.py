"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines as they complete.  Expected values are either restatements of exact
arithmetic, outputs of the independent oracles in tests/oracles.py, or the
closed-form bounds evaluated as exact rationals.
"""

import functools
import math
import random
from fractions import Fraction

from insdel_lab.align import (
    agreement_count,
    edit_distance,
    extract_matching,
    lcs,
    lcs_length,
    matching_pair,
    restrict,
)
from insdel_lab.certify import (
    OutcomeKind,
    certificate_count_bound,
    certify_v1,
    certify_v2,
    failure_prob_bound_quadratic,
    schwartz_zippel_bound,
)
from insdel_lab.chains import (
    decompose,
    is_chain,
    is_maximal,
    mutually_disjoint,
    order_parts,
    split_long_chains,
)
from insdel_lab.errors import InvariantViolation
from insdel_lab.field import PrimeModulus, sample_distinct_tuple, stream_rng
from insdel_lab.harness import (
    ExperimentConfig,
    brute_force_max_lcs,
    count_roots,
    monte_carlo,
    run_theorem_experiment,
)
from insdel_lab.rs import enumerate_codewords, sample_random_code
from insdel_lab.vmatrix import (
    AssignedMatrix,
    VMatrixSpec,
    build,
    build_rows,
    polynomial_degrees,
    rank,
    symbolic_determinant,
)

from .oracles import rank_rref


def criterion(label):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE {label}: FAIL")
                raise
            print(f"ACCEPTANCE {label}: PASS")
        return wrapper
    return deco


@criterion("01 ed-lcs identity")
def test_c01_ed_lcs_identity():
    rng = random.Random(101)
    alphabets = (2, 5, 17)
    for i in range(10_000):
        sigma = alphabets[i % 3]
        s = tuple(rng.randrange(sigma) for _ in range(rng.randrange(0, 31)))
        t = tuple(rng.randrange(sigma) for _ in range(rng.randrange(0, 31)))
        assert edit_distance(s, t) == len(s) + len(t) - 2 * lcs(s, t)[0]


@criterion("02 rank-oracle equivalence")
def test_c02_rank_oracle_equivalence():
    for q, count in ((2, 3400), (13, 3300), (10007, 3300)):
        modulus = PrimeModulus(q)
        rng = random.Random(q)
        for _ in range(count):
            rows = rng.randrange(1, 8)
            cols = rng.randrange(1, 8)
            entries = tuple(
                tuple(rng.randrange(q) for _ in range(cols)) for _ in range(rows)
            )
            assert rank(AssignedMatrix(entries, modulus)) == rank_rref(entries, q)


@criterion("03 collision implies rank deficiency")
def test_c03_collisions_give_rank_deficit():
    grid = (
        [(13, 5, 3)] * 30 + [(13, 6, 3)] * 30 + [(13, 5, 4)] * 8 + [(13, 6, 4)] * 8
        + [(31, 5, 3)] * 6 + [(31, 6, 3)] * 6 + [(31, 5, 4)] * 7 + [(31, 6, 4)] * 7
    )
    assert len(grid) >= 100
    k = 2
    collisions = 0
    for seed, (q, n, length) in enumerate(grid):
        modulus = PrimeModulus(q)
        code = sample_random_code(n, k, modulus, stream_rng(seed, q))
        words = [cw.symbols for _, cw in enumerate_codewords(code)]
        for i in range(len(words)):
            wi = words[i]
            for j in range(i + 1, len(words)):
                if lcs_length(wi, words[j]) < length:
                    continue
                collisions += 1
                pair = extract_matching(wi, words[j], length)
                assert pair is not None
                assert agreement_count(pair) <= k - 1
                matrix = build_rows(
                    tuple(zip(pair.first_indices, pair.second_indices)),
                    k, code.alpha, modulus,
                )
                assert rank(matrix) < 2 * k - 1
    assert collisions > 0


@criterion("04 symbolic nonvanishing and degree bound")
def test_c04_symbolic_nonvanishing():
    modulus = PrimeModulus(10007)
    rng = random.Random(404)
    done = 0
    while done < 1000:
        k = rng.choice((2, 3))
        side = 2 * k - 1
        n = rng.randrange(side, 13)
        f = sorted(rng.sample(range(1, n + 1), side))
        s = sorted(rng.sample(range(1, n + 1), side))
        if sum(a == b for a, b in zip(f, s)) > k - 1:
            continue
        done += 1
        rows = VMatrixSpec(k, matching_pair(f, s, n)).row_pairs()
        poly = symbolic_determinant(rows, k, None, modulus)
        assert poly, "determinant is the zero polynomial"
        assert all(d <= 2 * (k - 1) for d in polynomial_degrees(poly).values())


@criterion("05 certificate algorithm 1 contract")
def test_c05_certify_v1_contract():
    rng = random.Random(505)
    primes = (17, 17, 31, 101, 1009, 10007)
    successes = certificates = 0
    for _ in range(10_000):
        k = rng.choice((2, 2, 2, 3))
        side = 2 * k - 1
        n = rng.randrange(side + 2, 15)
        q = rng.choice(primes)
        while q < n:
            q = rng.choice(primes)
        modulus = PrimeModulus(q)
        slack = rng.randrange(1, n - side)
        length = side + slack
        r = math.ceil(Fraction(slack, n) * n / 2)  # ceil(eps*n/2) for eps = slack/n
        while True:
            f = sorted(rng.sample(range(1, n + 1), length))
            s = sorted(rng.sample(range(1, n + 1), length))
            if sum(a == b for a, b in zip(f, s)) <= k - 1:
                break
        pair = matching_pair(f, s, n)
        alpha = sample_distinct_tuple(n, modulus, random.Random(rng.getrandbits(48)))
        try:
            out = certify_v1(n, k, r, pair, alpha, modulus)
        except InvariantViolation:
            raise AssertionError("FAIL branch reached under valid preconditions")
        if out.kind is OutcomeKind.SUCCESS:
            successes += 1
            assert rank(build(VMatrixSpec(k, pair), alpha, modulus)) == side
        else:
            certificates += 1
            assert len(set(out.indices)) == r
            assert all(1 <= v <= n for v in out.indices)
    assert successes > 0 and certificates > 0


@criterion("06 rank failure probability under the quadratic bound")
def test_c06_rank_failure_probability():
    config = ExperimentConfig(
        mode="rank", trials=100_000, seed=606, q=4099, n=12, k=2,
        epsilon=Fraction(1, 2), r=3,
    )
    result = monte_carlo(config)
    bound = failure_prob_bound_quadratic(12, 2, 4099, Fraction(1, 2))
    assert bound.exact == Fraction(24, 4088) ** 3
    assert result.summary.bound == float(bound.exact)
    # operationally: at this bound (~2e-7), 1e5 trials must show zero failures
    assert result.summary.failures == 0
    assert result.summary.freq <= result.summary.bound
    assert result.summary.ci95[0] == 0.0


@criterion("07 chain decomposition and splitting")
def test_c07_chain_decomposition():
    fig_first, fig_second = (3, 4, 6, 7, 8, 9), (1, 2, 3, 4, 6, 8)
    dec = decompose(fig_first, fig_second, range(1, 7))
    assert dec.part_sets() == ((1, 3, 5, 6), (2, 4))

    rng = random.Random(707)
    for _ in range(10_000):
        n = rng.randrange(2, 41)
        length = rng.randrange(1, min(n, 20) + 1)
        f = sorted(rng.sample(range(1, n + 1), length))
        s = sorted(rng.sample(range(1, n + 1), length))
        ground = [p for p in range(1, length + 1) if rng.random() < 0.75]
        dec = decompose(f, s, ground)
        covered: set[int] = set()
        for part in dec.parts:
            assert not covered & set(part.members)
            covered |= set(part.members)
            assert is_maximal(f, s, ground, part.members)
        assert covered == set(ground)
        assert mutually_disjoint(f, s, dec.part_sets())

        eps = Fraction(rng.randrange(1, 10), 10)
        kept, split = split_long_chains(f, s, eps)
        assert Fraction(len(kept)) >= (1 - eps) * length
        limit = int(1 / eps)
        assert all(len(part) <= limit for part in split.parts)
        assert mutually_disjoint(f, s, split.part_sets())


@criterion("08 certificate algorithm 2 contract")
def test_c08_certify_v2_contract():
    rng = random.Random(808)
    small = (23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
             97, 101, 103, 107, 109, 113, 127)

    def prime_at_least(floor):
        for p in small:
            if p >= floor:
                return p
        return 10007

    successes = certificates = 0
    for _ in range(10_000):
        k = rng.choice((2, 2, 2, 2, 3))
        eps0 = rng.choice((Fraction(1, 2), Fraction(1, 3)))
        r = rng.choice((1, 1, 2))
        side = 2 * k - 1
        need = (side + (r + 1) / eps0) / (1 - eps0)
        length = int(need) + 1 + rng.randrange(0, 2)
        n = length + rng.randrange(5, 13)
        q = rng.choice((10007, 10007, prime_at_least(n + 1), prime_at_least(n + 4)))
        modulus = PrimeModulus(q)
        while True:
            f = sorted(rng.sample(range(1, n + 1), length))
            s = sorted(rng.sample(range(1, n + 1), length))
            if sum(a == b for a, b in zip(f, s)) <= k - 1:
                break
        pair = matching_pair(f, s, n)
        _, dec = split_long_chains(f, s, eps0)
        dec = order_parts(dec)
        alpha = sample_distinct_tuple(n, modulus, random.Random(rng.getrandbits(48)))
        run = certify_v2(k, r, eps0, pair, dec, alpha, modulus)  # asserts the lemma clauses
        if run.outcome.kind is OutcomeKind.SUCCESS:
            successes += 1
            assert rank(build(VMatrixSpec(k, pair), alpha, modulus)) == side
        else:
            certificates += 1
            indices = run.outcome.indices
            assert len(indices) == r
            assert list(indices) == sorted(indices)
            assert all(0 <= v <= 2 * k - 2 for v in indices)
        rerun = certify_v2(k, r, eps0, pair, dec, alpha, modulus)
        assert rerun.checkpoints == run.checkpoints and rerun.outcome == run.outcome
    assert successes > 0 and certificates > 0


@criterion("09 certificate counting bound")
def test_c09_certificate_counting():
    for k in range(1, 5):
        for r in range(1, 7):
            exact, cap = certificate_count_bound(k, r)
            assert exact == math.comb(2 * k - 2 + r, r)
            assert exact <= cap == 2 ** (2 * k + r - 2)

    # empirical distinct certificates never exceed the exact count
    rng = random.Random(909)
    k, r, eps0 = 2, 2, Fraction(1, 3)
    length = 19  # satisfies (1-eps0)*l >= 2k-1 + (r+1)/eps0
    n = 26
    modulus = PrimeModulus(29)
    seen: set[tuple[int, ...]] = set()
    for _ in range(600):
        while True:
            f = sorted(rng.sample(range(1, n + 1), length))
            s = sorted(rng.sample(range(1, n + 1), length))
            if sum(a == b for a, b in zip(f, s)) <= k - 1:
                break
        pair = matching_pair(f, s, n)
        _, dec = split_long_chains(f, s, eps0)
        dec = order_parts(dec)
        alpha = sample_distinct_tuple(n, modulus, random.Random(rng.getrandbits(48)))
        run = certify_v2(k, r, eps0, pair, dec, alpha, modulus)
        if run.outcome.kind is OutcomeKind.CERTIFICATE:
            seen.add(run.outcome.indices)
    exact, _ = certificate_count_bound(k, r)
    assert 0 < len(seen) <= exact


@criterion("10 theorem-scale experiment")
def test_c10_theorem_experiment():
    config = ExperimentConfig(
        mode="rank", trials=200, seed=1010, q=10007, n=10, k=2,
        epsilon=Fraction("0.3"), timing=True,
    )
    result = run_theorem_experiment("m1", config)
    assert result.length == 6
    assert result.summary.failures == 0
    # stated tolerance for the observed fraction
    assert result.summary.freq <= 44_100 * Fraction(20, 9998) ** 3
    # union-bound prediction, evaluated honestly at r = ceil(eps*n/2) = 2
    assert result.union_bound == 44_100 * Fraction(20, 9998) ** 2
    assert result.union_bound < 1
    slowest = max(rec.nanos for rec in result.records)
    assert slowest < 2_000_000_000, f"slowest code took {slowest} ns"


@criterion("11 half-singleton sanity")
def test_c11_half_singleton_sanity():
    modulus = PrimeModulus(31)
    for seed in range(50):
        code = sample_random_code(6, 2, modulus, stream_rng(seed, 11))
        assert brute_force_max_lcs(code).max_lcs >= 2  # 2k-2 with k=2


@criterion("12 schwartz-zippel frequency")
def test_c12_schwartz_zippel():
    q = 101
    coeffs = (0, q - 1, 1)  # X(X-1) = X^2 - X
    config = ExperimentConfig(
        mode="zeropoly", trials=100_000, seed=1212, q=q, poly=coeffs,
    )
    result = monte_carlo(config)
    exact = Fraction(count_roots(coeffs, q), q)
    assert exact == Fraction(2, 101)
    bound = schwartz_zippel_bound(1, 2, q)
    assert exact <= bound
    assert result.summary.bound == float(bound)
    p = float(exact)
    sigma = math.sqrt(p * (1 - p) / config.trials)
    assert abs(result.summary.freq - p) <= 3 * sigma
