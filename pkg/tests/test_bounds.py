"""
Forward differences, the lower-bound search and its closed-form corollaries,
and the oscillation counts.
"""

import math

import numpy as np
import pytest

import oracles
from ssmsep.bounds import (
    BoundQuery,
    Parity,
    alternating_witness,
    count_alternations,
    difference_table,
    forward_difference,
    lower_bound_copy,
    lower_bound_general,
    lower_bound_oscillatory,
    lower_bound_random,
    oscillation_separation,
    random_real_stable,
    restrict_parity,
    sign_changes,
)
from ssmsep.errors import ValidationError
from ssmsep.ssm import DiagonalSSM, ScalarSeries, approximation_error, cb_inf_norm, impulse_response
from ssmsep.targets import TargetSpec, generate


def test_forward_difference_small_examples():
    s = ScalarSeries([1.0, 2.0, 4.0, 8.0])
    assert forward_difference(s, 1).to_list() == [1.0, 2.0, 4.0]
    assert forward_difference(s, 2).to_list() == [1.0, 2.0]


def test_forward_difference_geometric_closed_form():
    s = ScalarSeries([0.5 ** k for k in range(1, 10)])
    assert forward_difference(s, 3)[0] == -0.0625


def test_forward_difference_rejects_order_at_length():
    with pytest.raises(ValidationError):
        forward_difference(ScalarSeries([1.0, 2.0]), 2)


def test_forward_difference_matches_iterated(rng):
    for _ in range(30):
        length = int(rng.integers(2, 41))
        values = rng.uniform(-1, 1, size=length)
        s = ScalarSeries(values)
        for order in range(1, min(21, length)):
            tol = 1e-9 * np.max(np.abs(values)) * 2 ** order
            expected = oracles.iterated_difference(values.tolist(), order)
            np.testing.assert_allclose(forward_difference(s, order).values, expected, atol=tol)


def test_forward_difference_beyond_closed_form_order(rng):
    ints = [int(v) for v in rng.integers(-3, 4, size=90)]
    # entries reach past 2^53, so the reference stays in Python ints and rounds once
    expected = [float(k) for k in oracles.iterated_difference(ints, 80)]
    values = np.array(ints, dtype=float)
    np.testing.assert_array_equal(forward_difference(ScalarSeries(values), 80).values, expected)


def test_forward_difference_is_linear(rng):
    s = ScalarSeries(rng.standard_normal(30))
    s_bar = ScalarSeries(rng.standard_normal(30))
    for order in (1, 4, 9):
        lhs = forward_difference(s.scaled(0.3) + s_bar, order)
        rhs = forward_difference(s, order).scaled(0.3) + forward_difference(s_bar, order)
        np.testing.assert_allclose(lhs.values, rhs.values, atol=1e-10 * 2 ** order)


def test_difference_table_orders():
    table = difference_table(ScalarSeries([1.0, 2.0, 4.0, 8.0]))
    assert sorted(table) == [1, 2, 3]
    assert table[3] == [1.0]


def test_restrict_parity():
    s = ScalarSeries([10.0, 20.0, 30.0, 40.0])
    assert restrict_parity(s, Parity.ODD).to_list() == [10.0, 30.0]
    assert restrict_parity(s, Parity.EVEN).to_list() == [20.0, 40.0]
    assert restrict_parity(generate(TargetSpec.oscillatory(8)), Parity.ODD).to_list() == [1.0, -1.0, 1.0, -1.0]
    assert restrict_parity(ScalarSeries([1.0]), Parity.EVEN).length == 0


def test_copy_difference_pin():
    for t in (8, 12, 16, 24, 32, 40):
        k = (t - 1) // 2
        if k % 2 == 0:
            continue
        even = restrict_parity(generate(TargetSpec.copy(t)), Parity.EVEN)
        d = (k + 1) // 2
        m = (k + 1) // 4
        assert abs(forward_difference(even, d)[m - 1]) == math.comb(d, m)


def test_oscillatory_difference_pin():
    odd = restrict_parity(generate(TargetSpec.oscillatory(64)), Parity.ODD)
    for d in range(1, 12):
        diffs = forward_difference(odd, d)
        for m in range(1, 10):
            assert diffs[m - 1] == (-1) ** (m + d - 1) * 2 ** d


def test_query_validation():
    with pytest.raises(ValidationError):
        BoundQuery(ScalarSeries([1.0]), 0.1)
    with pytest.raises(ValidationError):
        BoundQuery(ScalarSeries([1.0, 0.0]), -0.1)
    with pytest.raises(ValidationError):
        lower_bound_general(BoundQuery(ScalarSeries([1.0, 0.0, 0.0]), 0.1))


def test_general_bound_oscillatory_pin():
    report = lower_bound_general(BoundQuery(generate(TargetSpec.oscillatory(32)), 0.5))
    # odd differences are +-2^d, the even restriction is identically zero
    assert report.bound == 2 ** 21
    assert (report.best_d, report.best_m, report.best_parity) == (8, 7, Parity.ODD)
    assert report.best_d + report.best_m <= 16
    assert report.bound >= lower_bound_oscillatory(32)
    assert not report.saturated


def test_general_bound_uses_zero_based_difference_index():
    ssm = DiagonalSSM.real([0.372], [1.0], [1.0])
    report = lower_bound_general(BoundQuery(impulse_response(ssm, 46), 0.071))
    assert report.bound <= ssm.dim * cb_inf_norm(ssm)
    assert report.vacuous


def test_general_bound_zero_target_is_vacuous():
    report = lower_bound_general(BoundQuery(ScalarSeries(np.zeros(16)), 0.1))
    assert report.bound <= 0
    assert report.vacuous
    # ties resolve to the smallest d, then m, then Odd
    assert (report.best_d, report.best_m, report.best_parity) == (1, 1, Parity.ODD)


def test_general_bound_dominates_copy_closed_form():
    eps = 1.0 / (8.0 * math.sqrt(32))
    report = lower_bound_general(BoundQuery(generate(TargetSpec.copy(32)), eps))
    assert report.bound >= 2 ** 16 / (32 * math.sqrt(32))


def test_general_bound_saturates_on_overflow():
    report = lower_bound_general(BoundQuery(generate(TargetSpec.oscillatory(1500)), 0.5))
    assert report.saturated
    assert report.bound == math.inf


def test_general_bound_is_sound():
    for case in range(120):
        g = np.random.default_rng(case)
        n = int(g.integers(1, 65))
        t = int(g.integers(5, 65))
        ssm = random_real_stable(g, n)
        ir = impulse_response(ssm, t)
        noise = g.standard_normal(t)
        eps = float(g.uniform(1e-3, 0.5))
        # true l1 error stays strictly below eps
        noise *= 0.999 * eps / np.sum(np.abs(noise))
        target = ScalarSeries(ir.values + noise)
        assert approximation_error(ir, target) <= eps + 1e-12
        report = lower_bound_general(BoundQuery(target, eps))
        assert report.bound <= n * cb_inf_norm(ssm) + 1e-6


@pytest.mark.slow
def test_general_bound_is_sound_full_sweep():
    for case in range(500):
        g = np.random.default_rng(10_000 + case)
        n = int(g.integers(1, 65))
        t = int(g.integers(5, 65))
        ssm = random_real_stable(g, n)
        ir = impulse_response(ssm, t)
        noise = g.standard_normal(t)
        eps = float(g.uniform(1e-3, 1.0))
        noise *= 0.999 * eps / np.sum(np.abs(noise))
        report = lower_bound_general(BoundQuery(ScalarSeries(ir.values + noise), eps))
        assert report.bound <= n * cb_inf_norm(ssm) + 1e-6


def test_copy_closed_form():
    assert lower_bound_copy(32, 1 / (8 * math.sqrt(32))) == pytest.approx(2 ** 16 / (32 * math.sqrt(32)), rel=1e-9)
    assert lower_bound_copy(32, 0.0) == pytest.approx(362.038671968, rel=1e-9)
    assert lower_bound_copy(9, 0.0) == pytest.approx(2 ** 4.5 / 96, rel=1e-9)
    assert lower_bound_copy(32, 1.0) is None
    with pytest.raises(ValidationError):
        lower_bound_copy(8, 0.0)


def test_random_closed_form():
    assert lower_bound_random(32, 1.0, 0.25) == pytest.approx(2 ** 16 * 0.5 / (8 * math.sqrt(32)), rel=1e-9)
    assert lower_bound_random(32, 0.0, 0.25) == 0.0
    assert lower_bound_random(8, 1.0, 1.0) == pytest.approx(16 / (8 * math.sqrt(8)), rel=1e-12)


def test_oscillatory_closed_form():
    assert lower_bound_oscillatory(32) == 1048576.0
    assert lower_bound_oscillatory(8) == 4.0
    values = [lower_bound_oscillatory(t) for t in range(1, 60)]
    assert values == sorted(values)


def test_count_alternations():
    assert count_alternations(ScalarSeries([0.5, 0.1, -0.5, 0.5]), 0.25) == 2
    assert count_alternations(ScalarSeries([0.2, -0.24, 0.1, 0.0]), 0.25) == 0
    with pytest.raises(ValidationError):
        count_alternations(ScalarSeries([1.0]), 0.0)


def test_sign_changes():
    assert sign_changes(ScalarSeries([1.0, -1.0, 1.0]), 1e-12) == 2
    assert sign_changes(ScalarSeries([1.0, 0.0, 1.0]), 1e-12) == 0
    assert sign_changes(ScalarSeries([1.0, 1e-13, -1.0]), 1e-12) == 1


def test_complex_system_alternates():
    ssm = DiagonalSSM.complex([0.999 * np.exp(1j * np.pi / 2)], [1.0], [1.0])
    odd = restrict_parity(impulse_response(ssm, 100), Parity.ODD)
    assert count_alternations(odd, 0.25) >= 100 // 9 - 1


def test_real_stable_sign_change_ceiling():
    for seed in range(200):
        ssm = random_real_stable(np.random.default_rng(seed), 4)
        odd = restrict_parity(impulse_response(ssm, 200), Parity.ODD)
        assert sign_changes(odd) <= 3


def test_sign_change_ceiling_over_dimensions(real_corpus):
    for ssm in real_corpus:
        odd = restrict_parity(impulse_response(ssm, 120), Parity.ODD)
        assert sign_changes(odd) <= ssm.dim - 1


def test_oscillation_separation_summary():
    ssm = DiagonalSSM.complex([0.999j], [1.0], [1.0])
    result = oscillation_separation(ssm, 100, 0.25, 4, list(range(200)))
    assert result["complex_alternations"] >= 10
    assert result["real_max_sign_changes"] <= result["real_ceiling"] == 3
    assert result["real_corpus_size"] == 200


def test_alternating_witness_approximates_target():
    t, eps = 64, 0.1
    ssm = alternating_witness(t, eps)
    target = generate(TargetSpec.alternating(t))
    assert ssm.dim == 1
    assert approximation_error(impulse_response(ssm, t), target) <= eps
