from fractions import Fraction

import pytest

from insdel_lab.align import agreement_count, lcs_length
from insdel_lab.errors import BudgetError, ParameterError
from insdel_lab.field import PrimeModulus, stream_rng
from insdel_lab.harness import (
    ExperimentConfig,
    brute_force_max_lcs,
    canonical_pair,
    corrects_insdel_bruteforce,
    corrects_insdel_vmatrix,
    count_roots,
    default_certificate_length,
    derived_length,
    monte_carlo,
    replay_trial,
    run_theorem_experiment,
    sample_pair,
    threshold_quadratic,
)
from insdel_lab.reporting import serialize
from insdel_lab.rs import RsCode, sample_random_code
from insdel_lab.vmatrix import build_for_code, rank


def test_derived_length_is_exact():
    assert derived_length(10, 2, Fraction("0.3")) == 6  # floor(3.0) really is 3
    assert derived_length(10, 2, Fraction(0)) == 3
    assert default_certificate_length(12, Fraction("0.5")) == 3


def test_canonical_pair_properties():
    pair = canonical_pair(12, 9)
    assert pair.first_indices == tuple(range(1, 10))
    assert pair.second_indices == tuple(range(4, 13))
    assert agreement_count(pair) == 0
    with pytest.raises(ParameterError):
        canonical_pair(9, 9)


def test_sample_pair_respects_agreement():
    rng = stream_rng(1)
    for _ in range(50):
        pair = sample_pair(14, 7, 2, rng)
        assert agreement_count(pair) <= 1


def test_brute_force_constant_code_has_lcs_zero():
    # dimension-one codewords are constant vectors over distinct constants
    code = RsCode(4, 1, PrimeModulus(5), (0, 1, 2, 3))
    report = brute_force_max_lcs(code)
    assert report.max_lcs == 0
    assert report.matching.length == 0


def test_brute_force_stable_witness():
    code = sample_random_code(5, 2, PrimeModulus(13), stream_rng(3))
    a = brute_force_max_lcs(code)
    b = brute_force_max_lcs(code)
    assert (a.max_lcs, a.first_poly, a.second_poly) == (b.max_lcs, b.first_poly, b.second_poly)
    # witness matching really matches the two codewords
    for i, j in zip(a.matching.first_indices, a.matching.second_indices):
        assert a.first.symbols[i - 1] == a.second.symbols[j - 1]
    assert a.max_lcs == lcs_length(a.first.symbols, a.second.symbols)


def test_brute_force_budget():
    code = sample_random_code(5, 2, PrimeModulus(13), stream_rng(3))
    with pytest.raises(BudgetError):
        brute_force_max_lcs(code, budget=10)


def test_half_singleton_floor_small_codes():
    # a linear [n, k] code cannot correct n-2k+2 insdels, so some codeword
    # pair keeps an LCS of at least 2k-2
    for seed in range(3):
        code = sample_random_code(6, 2, PrimeModulus(31), stream_rng(seed))
        assert brute_force_max_lcs(code).max_lcs >= 2


def test_corrects_bruteforce_restatements():
    code = sample_random_code(5, 2, PrimeModulus(13), stream_rng(3))
    report = brute_force_max_lcs(code)
    assert corrects_insdel_bruteforce(code, 0) == (report.max_lcs <= code.n - 1)
    assert corrects_insdel_bruteforce(code, code.n) is False


def test_corrects_bruteforce_is_max_lcs_restatement():
    # corrects t insdels iff the maximum pairwise LCS stays below n - t
    code = sample_random_code(6, 2, PrimeModulus(31), stream_rng(4))
    top = brute_force_max_lcs(code).max_lcs
    for t in range(code.n + 1):
        assert corrects_insdel_bruteforce(code, t) == (top <= code.n - t - 1)


def test_verifier_filters_full_agreement_pair():
    code = sample_random_code(5, 2, PrimeModulus(31), stream_rng(1))
    report = corrects_insdel_vmatrix(code, 5)
    # the single length-n pair is the identity pair, which the agreement
    # filter must exclude; nothing remains to check
    assert report.pairs_checked == 0
    assert report.pairs_skipped == 1
    assert report.ok


def test_verifier_accepts_generic_code():
    code = sample_random_code(10, 2, PrimeModulus(10007), stream_rng(7))
    report = corrects_insdel_vmatrix(code, 6)
    assert report.ok
    assert report.pairs_checked > 0


def test_verifier_rejects_engineered_collision():
    # f(x)=x and g(x)=x-1 on 0..4 over F_5 produce codewords sharing 0,1,2,3
    code = RsCode(5, 2, PrimeModulus(5), (0, 1, 2, 3, 4))
    report = corrects_insdel_vmatrix(code, 4)
    assert not report.ok
    assert report.witness_rank < 3
    matrix = build_for_code(code, report.witness)
    assert rank(matrix) == report.witness_rank


def test_verifier_budget_and_bounds():
    code = sample_random_code(10, 2, PrimeModulus(10007), stream_rng(7))
    with pytest.raises(BudgetError):
        corrects_insdel_vmatrix(code, 6, pair_budget=10)
    with pytest.raises(ParameterError):
        corrects_insdel_vmatrix(code, 2)  # below 2k-1


def _rank_config(trials=50, **kw):
    base = dict(
        mode="rank", trials=trials, seed=42, q=4099, n=12, k=2,
        epsilon=Fraction(1, 2),
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_monte_carlo_rank_mode_zero_failures():
    result = monte_carlo(_rank_config())
    assert result.summary.failures == 0
    assert result.summary.trials == 50
    assert not result.summary.vacuous
    assert result.summary.bound == float(Fraction(24, 4088) ** 3)
    assert all(rec.outcome == "ok" for rec in result.records)


def test_monte_carlo_rejects_zero_trials():
    with pytest.raises(ParameterError):
        _rank_config(trials=0)


def test_monte_carlo_replay_and_determinism():
    config = _rank_config()
    a = monte_carlo(config)
    b = monte_carlo(config)
    assert serialize(a.records, a.summary, "jsonl") == serialize(b.records, b.summary, "jsonl")
    rec = replay_trial(config, 17)
    assert rec == a.records[17]


def test_monte_carlo_workers_match_serial():
    config = _rank_config(trials=40)
    serial = monte_carlo(config)
    parallel = monte_carlo(_rank_config(trials=40, workers=2))
    assert serialize(serial.records, serial.summary, "jsonl") == serialize(
        parallel.records, parallel.summary, "jsonl"
    )


def test_monte_carlo_certify1_mode():
    config = ExperimentConfig(
        mode="certify1", trials=30, seed=5, q=31, n=12, k=2,
        epsilon=Fraction(1, 3),
    )
    result = monte_carlo(config)
    assert all(rec.outcome in ("success", "certificate") for rec in result.records)


def test_monte_carlo_certify2_mode():
    config = ExperimentConfig(
        mode="certify2", trials=20, seed=5, q=10007, n=40, k=2,
        epsilon=Fraction("0.45"), epsilon0=Fraction(1, 3), r=1,
    )
    result = monte_carlo(config)
    assert all(rec.outcome in ("success", "certificate") for rec in result.records)
    assert result.summary.bound == float(
        Fraction(1 << 3) * (4 * Fraction(2, 10007 - 40 + 1)) ** 1
    )


def test_monte_carlo_zeropoly_matches_root_count():
    config = ExperimentConfig(
        mode="zeropoly", trials=4000, seed=1, q=101, poly=(0, 100, 1),
    )
    result = monte_carlo(config)
    exact = Fraction(count_roots((0, 100, 1), 101), 101)
    assert exact == Fraction(2, 101)
    # crude 4-sigma envelope around the exact zero probability
    sigma = (float(exact) * (1 - float(exact)) / 4000) ** 0.5
    assert abs(result.summary.freq - float(exact)) <= 4 * sigma
    assert result.summary.bound == float(Fraction(2, 101))


def test_monte_carlo_sampled_pairs():
    config = _rank_config(trials=25, sample_pair=True)
    result = monte_carlo(config)
    assert result.summary.trials == 25


def test_explicit_pair_must_match_derived_length():
    with pytest.raises(ParameterError):
        monte_carlo(_rank_config(pair_first=(1, 2, 3), pair_second=(2, 3, 4)))


def test_theorem_threshold_m1_example():
    assert threshold_quadratic(6, 2, Fraction(1)) == 1542


def test_theorem_m1_small_run():
    config = ExperimentConfig(
        mode="rank", trials=20, seed=2, q=10007, n=8, k=2,
        epsilon=Fraction(1, 2),
    )
    result = run_theorem_experiment("m1", config)
    assert result.length == 7
    assert result.summary.failures == 0
    assert result.per_pair_bound == Fraction(16, 10000) ** 2
    assert result.union_bound == 64 * Fraction(16, 10000) ** 2
    assert result.union_bound < 1
    assert not result.threshold_ok  # 10007 is far below (1 + 2*2^12*2)*8
    assert all(rec.mode == "theorem-m1" for rec in result.records)


def test_theorem_k1_never_fails():
    config = ExperimentConfig(
        mode="rank", trials=10, seed=3, q=101, n=6, k=1,
        epsilon=Fraction(1, 2),
    )
    result = run_theorem_experiment("m1", config)
    assert result.summary.failures == 0
    assert result.per_pair_bound == 0


def test_theorem_main_reports_threshold():
    config = ExperimentConfig(
        mode="rank", trials=5, seed=4, q=10007, n=8, k=2,
        epsilon=Fraction(1, 2),
    )
    result = run_theorem_experiment("main", config)
    assert result.summary.failures == 0
    assert result.threshold == 8 + 2**256 * 2  # exact integer exponent
    assert not result.threshold_ok
