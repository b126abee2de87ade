import numpy as np
import pytest

from bfeopt.core import grad_check
from bfeopt.problems import (
    BatchStream,
    Dataset,
    LinRegSpec,
    gen_linear_data,
    linreg_objective,
    load_dataset_csv,
    normalize,
    quadratic_objective,
    save_dataset_csv,
)


def test_noise_free_line():
    data = gen_linear_data(LinRegSpec(noise_std=0.0, n=50, seed=1))
    np.testing.assert_allclose(data.y, 5.0 * data.x + 9.0, rtol=0, atol=1e-12)


def test_generation_is_deterministic():
    a = gen_linear_data(LinRegSpec(n=100, seed=3))
    b = gen_linear_data(LinRegSpec(n=100, seed=3))
    np.testing.assert_array_equal(a.x, b.x)
    np.testing.assert_array_equal(a.y, b.y)


def test_true_params_zero_loss_on_noise_free_data():
    data = gen_linear_data(LinRegSpec(noise_std=0.0, n=200, seed=2))
    obj = linreg_objective(data)
    theta = np.array([5.0, 9.0])
    assert obj.loss(theta) <= 1e-12
    np.testing.assert_allclose(obj.grad(theta), [0.0, 0.0], atol=1e-10)


def test_single_point_hand_arithmetic():
    data = Dataset(x=np.array([1.0]), y=np.array([14.0]))
    obj = linreg_objective(data)
    theta = np.array([6.0, 9.0])
    assert obj.loss(theta) == pytest.approx(1.0, rel=1e-15)
    np.testing.assert_allclose(obj.grad(theta), [2.0, 2.0], rtol=1e-15)


def test_linreg_grad_check_random_points():
    data = gen_linear_data(LinRegSpec(n=500, seed=5))
    obj = linreg_objective(data)
    rng = np.random.default_rng(6)
    for _ in range(20):
        theta = rng.normal(0, 5, size=2)
        assert grad_check(obj, theta) <= 1e-6


def test_noise_floor():
    sigma = 1.0
    data = gen_linear_data(LinRegSpec(noise_std=sigma, n=100000, seed=8))
    obj = linreg_objective(data)
    loss = obj.loss(np.array([5.0, 9.0]))
    assert abs(loss - sigma ** 2) < 5 * sigma ** 2 / np.sqrt(100000)


def test_quadratic_values():
    obj = quadratic_objective([1.0])
    assert obj.loss(np.array([2.0])) == 2.0
    assert obj.grad(np.array([2.0]))[0] == 2.0
    obj2 = quadratic_objective([1.0, 100.0])
    assert obj2.loss(np.array([1.0, 1.0])) == 50.5
    np.testing.assert_array_equal(obj2.grad(np.array([1.0, 1.0])),
                                  [1.0, 100.0])
    assert obj2.loss(np.zeros(2)) == 0.0


def test_normalize_symmetric_pair():
    data = Dataset(x=np.array([0.0, 2.0]), y=np.array([9.0, 19.0]))
    norm = normalize(data)
    assert norm.norm_params[0] == 1.0
    np.testing.assert_allclose(norm.x, [-norm.x[1], norm.x[1]])
    np.testing.assert_array_equal(norm.y, data.y)


def test_normalize_idempotent():
    data = gen_linear_data(LinRegSpec(n=1000, seed=9))
    once = normalize(data)
    twice = normalize(once)
    assert abs(twice.norm_params[0]) < 1e-12
    assert abs(twice.norm_params[1] - 1.0) < 1e-12


def test_normalize_constant_features_rejected():
    data = Dataset(x=np.ones(5), y=np.arange(5.0))
    with pytest.raises(ValueError):
        normalize(data)


def test_dataset_csv_round_trip(tmp_path):
    data = gen_linear_data(LinRegSpec(n=64, seed=10))
    path = tmp_path / "data.csv"
    save_dataset_csv(data, str(path))
    loaded = load_dataset_csv(str(path))
    np.testing.assert_array_equal(loaded.x, data.x)
    np.testing.assert_array_equal(loaded.y, data.y)


def test_batch_stream_covers_epoch_without_replacement():
    stream = BatchStream(n=100, batch_size=32, seed=0)
    it = iter(stream)
    seen = np.concatenate([next(it) for _ in range(4)])
    assert len(seen) == 100
    assert sorted(seen) == list(range(100))
    assert len(next(it)) == 32  # next epoch starts
    assert stream.epoch == 1


def test_batch_stream_keeps_partial_final_batch():
    it = iter(BatchStream(n=10, batch_size=4, seed=0))
    sizes = [len(next(it)) for _ in range(3)]
    assert sizes == [4, 4, 2]


def test_batch_stream_deterministic():
    a = iter(BatchStream(n=50, batch_size=16, seed=4))
    b = iter(BatchStream(n=50, batch_size=16, seed=4))
    for _ in range(10):
        np.testing.assert_array_equal(next(a), next(b))
