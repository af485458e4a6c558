import numpy as np
import pytest

from ridgexmse.data import (build_regression_matrix, export_dataset_csv, generate_collection, generate_noisy_outputs,
                            generate_scaled_input, generate_true_system, input_scale, rng_stream, sample_snr,
                            scale_to_norm, InputSignal)
from ridgexmse.errors import ConfigError, DegenerateSignalError


def test_regression_matrix_convention_a():
    phi = build_regression_matrix([1.0, 2.0, 3.0], 2, "a")
    np.testing.assert_array_equal(phi, [[1, 0], [2, 1], [3, 2]])


def test_regression_matrix_convention_b_has_one_more_delay():
    phi = build_regression_matrix([1.0, 2.0, 3.0], 2, "b")
    np.testing.assert_array_equal(phi, [[0, 0], [1, 0], [2, 1]])


def test_regression_matrix_is_lower_triangular_toeplitz(rng):
    u = rng.standard_normal(30)
    phi = build_regression_matrix(u, 7)
    for t in range(30):
        for k in range(7):
            assert phi[t, k] == (u[t - k] if t >= k else 0.0)


def test_regression_matrix_rejects_bad_sizes():
    with pytest.raises(ConfigError):
        build_regression_matrix([1.0, 2.0], 3)
    with pytest.raises(ConfigError):
        build_regression_matrix([1.0, 2.0], 1, "c")


def test_input_signal_rejects_nonfinite():
    with pytest.raises(ConfigError):
        InputSignal(np.array([1.0, np.nan]))
    with pytest.raises(ConfigError):
        InputSignal(np.array([]))


def test_true_system_has_unit_norm():
    for n in (1, 5, 80):
        sys_ = generate_true_system(n, rng_stream(0, n))
        assert abs(np.linalg.norm(sys_.theta0) - 1.0) <= 1e-12
    assert abs(np.linalg.norm(scale_to_norm([3.0, 4.0], 2.5).theta0) - 2.5) <= 1e-12 * 2.5


def test_scaled_input_hits_the_requested_snr():
    system = generate_true_system(5, rng_stream(1, 0))
    u = generate_scaled_input(200, 5, system, 5.0, 0.7, rng_stream(1, 1))
    z = build_regression_matrix(u, 5) @ system.theta0
    assert sample_snr(z, 0.7) == pytest.approx(5.0, rel=1e-12)


def test_zero_output_is_degenerate():
    with pytest.raises(DegenerateSignalError):
        input_scale(np.zeros(10), 5.0, 1.0)


def test_same_seed_reproduces_everything_bitwise():
    a = generate_collection(7, 3, 5, 50, 5.0, 1.0)
    b = generate_collection(7, 3, 5, 50, 5.0, 1.0)
    assert np.array_equal(a.system.theta0, b.system.theta0)
    assert np.array_equal(a.input.samples, b.input.samples)
    assert np.array_equal(a.output(7, 11, 1.0), b.output(7, 11, 1.0))
    c = generate_collection(8, 3, 5, 50, 5.0, 1.0)
    assert not np.array_equal(a.input.samples, c.input.samples)


def test_noisy_outputs_are_independent_per_rep():
    ys = generate_noisy_outputs(np.zeros(20), 1.0, 3, seed=0)
    assert len(ys) == 3 and not np.array_equal(ys[0], ys[1])
    with pytest.raises(ConfigError):
        generate_noisy_outputs(np.zeros(20), 1.0, 0, seed=0)


def test_gram_approaches_identity_as_N_grows():
    n = 5
    med = []
    for N in (100, 400, 1600):
        errs = []
        for seed in range(20):
            phi = build_regression_matrix(rng_stream(seed, N).standard_normal(N), n)
            errs.append(np.linalg.norm(phi.T @ phi / N - np.eye(n), 2))
        med.append(np.median(errs))
    assert med[0] > med[1] > med[2]


def test_dataset_csv(tmp_path):
    path = tmp_path / "d.csv"
    export_dataset_csv(path, np.array([1.0, 2.0]), np.array([0.5, -0.5]))
    lines = path.read_text().splitlines()
    assert lines == ["t,u,y", "1,1.0,0.5", "2,2.0,-0.5"]
