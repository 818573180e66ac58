import csv
import io
import json
import math
import random

import pytest
import sympy

from dhrsieve.empirical import (
    AdmissibilityWarning,
    build_sequence,
    element_rows,
    factorizations,
    omega_statistics,
    report_json,
    rows_csv,
    sifted_count,
    verify_Pr_deduction,
    weighted_sum,
)
from dhrsieve import empirical
from dhrsieve.exceptions import InvalidParameters
from dhrsieve.localdensity import IntPolynomial
from oracles import naive_weighted_sum

QUAD = IntPolynomial((1, 1, 1))
LINEAR = IntPolynomial((2, 1))
CUBIC = IntPolynomial((1, 1, 0, 1))


@pytest.fixture(scope="module")
def quad_seq():
    return build_sequence(QUAD, 10_000)


def test_sequence_basics(quad_seq):
    assert quad_seq.X == 1033
    assert quad_seq.primes[0] == 10007 and quad_seq.primes[-1] == 19997
    assert quad_seq.N == QUAD(19997)
    assert quad_seq.elements[0] == (10007, QUAD(10007))


def test_factorizations_match_sympy():
    for f, x in ((QUAD, 3000), (LINEAR, 5000), (CUBIC, 2000)):
        seq = build_sequence(f, x)
        for (p, v), fac in zip(seq.elements, factorizations(seq)):
            assert fac == sympy.factorint(v), p


def test_factorizations_cached_and_threads_agree():
    seq = build_sequence(CUBIC, 20_000)
    serial = factorizations(seq)
    assert factorizations(seq) is serial
    again = build_sequence(CUBIC, 20_000)
    assert factorizations(again, threads=2) == serial


def test_weighted_sum_matches_naive():
    rng = random.Random(2024)
    polys = [QUAD, LINEAR, CUBIC]
    for _ in range(20):
        f = rng.choice(polys)
        x = rng.randint(100, 3000)
        k = max(f.degree, 1)
        beta = rng.uniform(0.2, 0.95) / k
        alpha = rng.uniform(0.05, 0.9) * beta
        r = math.floor(1 / beta) + rng.randint(0, 3)
        rep = weighted_sum(build_sequence(f, x), r, alpha, beta)
        W, survivors, positive = naive_weighted_sum(f, x, r, alpha, beta)
        assert rep.W == pytest.approx(W, abs=1e-9)
        assert (rep.survivors, rep.positive_weight) == (survivors, positive)
        assert rep.pr_violations is None


def test_sifted_count_matches_definition(quad_seq):
    for z in (2, 3, 10, 100):
        direct = sum(1 for fac in factorizations(quad_seq) if min(fac) >= z)
        assert sifted_count(quad_seq, z) == direct
    assert sifted_count(quad_seq, 2) == quad_seq.X
    with pytest.raises(ValueError):
        sifted_count(quad_seq, 1.5)


def test_reference_run(quad_seq):
    rep = verify_Pr_deduction(quad_seq, 4, 0.0417, 0.3066)
    assert rep.pr_violations == 0
    assert rep.flagged > 0 and rep.max_omega_flagged <= 4


@pytest.mark.parametrize("f,x,r,alpha,beta", [
    (QUAD, 50_000, 4, 1 / 24, 0.6131 / 2),
    (LINEAR, 50_000, 3, 0.05, 0.4),
    (CUBIC, 20_000, 6, 1 / 36, 0.6969 / 3),
])
def test_positive_weight_implies_few_factors(f, x, r, alpha, beta):
    rep = verify_Pr_deduction(build_sequence(f, x), r, alpha, beta)
    assert rep.pr_violations == 0


def test_omega_statistics(quad_seq):
    stats = omega_statistics(quad_seq)
    assert stats.r == 4
    assert sum(stats.histogram.values()) == quad_seq.X
    assert stats.count_at_most_r == sum(c for om, c in stats.histogram.items() if om <= 4)
    assert omega_statistics(build_sequence(IntPolynomial((1, 1) + (0,) * 9 + (1,)), 100)).r == 2 * 11 + 1


def test_quadratic_has_almost_primes_at_1e5():
    stats = omega_statistics(build_sequence(QUAD, 100_000))
    assert stats.count_at_most_r > 0


def test_invalid_parameters(quad_seq):
    with pytest.raises(InvalidParameters):
        weighted_sum(quad_seq, 4, 0.3, 0.2)
    with pytest.raises(InvalidParameters):
        weighted_sum(quad_seq, 4, 0.1, 0.6)
    with pytest.raises(InvalidParameters):
        weighted_sum(quad_seq, 1, 0.01, 0.3)


def test_build_sequence_guards():
    with pytest.raises(ValueError):
        build_sequence(QUAD, 50)
    with pytest.raises(OverflowError):
        build_sequence(IntPolynomial((1,) * 10 + (10 ** 30,)), 10 ** 6)
    with pytest.warns(AdmissibilityWarning):
        build_sequence(IntPolynomial((1, 0, 1)), 200)


def test_exact_weight_check():
    N = 10 ** 12
    beta, eta = 0.5, 1.0
    # q = N^(beta/2) contributes exactly 1/2; two such primes give weight 0.
    assert not empirical._exact_weight_positive([10 ** 3, 10 ** 3], eta, beta, N)
    assert empirical._exact_weight_positive([10 ** 3 + 1, 10 ** 3], eta, beta, N)


def test_json_and_csv(quad_seq):
    rep = verify_Pr_deduction(quad_seq, 4, 0.0417, 0.3066)
    stats = omega_statistics(quad_seq, 4)
    payload = json.loads(report_json(rep, stats, timestamp=False))
    assert payload["schema"] == 1 and payload["Pr_violations"] == 0
    assert "timestamp" not in payload
    assert {"W", "survivors", "histogram", "N"} <= set(payload)
    assert "timestamp" in json.loads(report_json(rep, stats))
    rows = element_rows(quad_seq, 4, 0.0417, 0.3066)
    parsed = list(csv.reader(io.StringIO(rows_csv(rows))))
    assert parsed[0] == ["p", "f_p", "omega", "weight"]
    assert len(parsed) == quad_seq.X + 1
    assert int(parsed[1][1]) == QUAD(int(parsed[1][0]))
