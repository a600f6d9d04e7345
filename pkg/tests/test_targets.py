import numpy as np
import pytest

from ssmsep.bounds import Parity, restrict_parity
from ssmsep.errors import ValidationError
from ssmsep.ssm import ScalarSeries
from ssmsep.targets import TargetKind, TargetSpec, copy_delay, generate, normalized_error


def test_delay_target():
    assert generate(TargetSpec.delay(3, 6)).to_list() == [0, 0, 0, 1, 0, 0]


def test_oscillatory_target():
    assert generate(TargetSpec.oscillatory(8)).to_list() == [1, 0, -1, 0, 1, 0, -1, 0]


def test_alternating_target():
    assert generate(TargetSpec.alternating(4)).to_list() == [1, -1, 1, -1]


def test_custom_target_passthrough():
    spec = TargetSpec.custom([0.25, -3.0, 7.5])
    assert generate(spec).to_list() == [0.25, -3.0, 7.5]


def test_copy_defaults_to_middle_delay():
    assert copy_delay(32) == 15
    spec = TargetSpec.copy(32)
    assert spec.kind is TargetKind.DELAY and spec.k == 15
    assert TargetSpec(TargetKind.DELAY, 32).k == 15


def test_zero_horizon_rejected():
    with pytest.raises(ValidationError):
        generate(TargetSpec.oscillatory(0))


def test_delay_past_horizon_is_flagged_and_zero():
    spec = TargetSpec.delay(6, 6)
    assert spec.flagged
    assert generate(spec).to_list() == [0.0] * 6
    assert not TargetSpec.delay(5, 6).flagged


def test_delay_target_has_unit_l1_norm():
    for t in (1, 2, 9, 32):
        for k in range(t):
            assert generate(TargetSpec.delay(k, t)).l1() == 1.0


def test_random_uniform_is_reproducible_and_bounded():
    spec = TargetSpec.random_uniform(alpha=0.5, seed=7, horizon=64)
    first, second = generate(spec), generate(spec)
    assert first == second
    assert np.all(np.abs(first.values) <= 0.5)
    np.testing.assert_array_equal(first.values, np.random.default_rng(7).uniform(-0.5, 0.5, size=64))
    assert generate(spec.with_seed(8)) != first


def test_oscillatory_odd_entries_alternate():
    odd = restrict_parity(generate(TargetSpec.oscillatory(40)), Parity.ODD)
    assert odd.to_list() == [1.0, -1.0] * 10


def test_normalized_error_anchors():
    target = ScalarSeries([0.5, -1.0, 2.0])
    assert normalized_error(target, target) == 0.0
    assert normalized_error(ScalarSeries([0.0, 0.0, 0.0]), target) == 1.0
    assert normalized_error(target.scaled(2.0), target) == 1.0


def test_normalized_error_rejects_zero_target():
    with pytest.raises(ValidationError):
        normalized_error(ScalarSeries([1.0, 1.0]), ScalarSeries([0.0, 0.0]))


def test_target_spec_dict_round_trip():
    specs = [
        TargetSpec.copy(32),
        TargetSpec.delay(3, 10),
        TargetSpec.random_uniform(1.0, 4, 16),
        TargetSpec.oscillatory(12),
        TargetSpec.alternating(5),
        TargetSpec.custom([1.0, 2.0]),
    ]
    for spec in specs:
        assert TargetSpec.from_dict(spec.to_dict()) == spec


def test_target_spec_from_dict_rejects_unknown_kind():
    with pytest.raises(ValidationError):
        TargetSpec.from_dict({"kind": "sawtooth", "horizon": 4})


def test_target_spec_from_dict_rejects_unknown_keys():
    with pytest.raises(ValidationError):
        TargetSpec.from_dict({"kind": "oscillatory", "horizn": 16})
    with pytest.raises(ValidationError):
        TargetSpec.from_dict({"kind": "random_uniform", "horizon": 8, "alfa": 2.0})
