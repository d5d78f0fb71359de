"""Fidelity-kernel values, Gram assembly, shot sampling, and the RBF baseline."""
import numpy as np
import pytest

from qkstage.errors import ConfigError
from qkstage.featuremap import FeatureMapSpec
from qkstage.kernel import (
    CrossBlock,
    GramMatrix,
    RbfKernel,
    default_rbf_gamma,
    gram,
    gram_cross,
    kernel_id_of,
    quantum_kernel_exact,
    quantum_kernel_shots,
    rbf_kernel,
)

from oracles import kernel_value

rng = np.random.default_rng(20240903)


def test_exact_kernel_matches_statevector_oracle():
    spec = FeatureMapSpec(num_qubits=2)
    for _ in range(10):
        x = rng.uniform(0, np.pi, 2)
        y = rng.uniform(0, np.pi, 2)
        assert quantum_kernel_exact(spec, x, y) == pytest.approx(
            kernel_value(spec, x, y), abs=1e-12
        )


def test_single_qubit_single_rep_kernel_is_cos_squared():
    spec = FeatureMapSpec(num_qubits=1, repetitions=1)
    for x, y in [(0.0, 0.0), (0.4, 1.7), (np.pi, 0.0), (2.2, 0.9)]:
        got = quantum_kernel_exact(spec, np.array([x]), np.array([y]))
        assert got == pytest.approx(np.cos(x - y) ** 2, abs=1e-12)


def test_kernel_of_a_point_with_itself_is_one():
    spec = FeatureMapSpec(num_qubits=3)
    x = rng.uniform(0, np.pi, 3)
    assert quantum_kernel_exact(spec, x, x) == pytest.approx(1.0, abs=1e-12)


def test_exact_gram_is_bit_symmetric_with_unit_diagonal():
    spec = FeatureMapSpec(num_qubits=2)
    rows = rng.uniform(0, np.pi, (7, 2))
    g = gram(spec, rows)
    assert isinstance(g, GramMatrix)
    assert g.mode == "exact"
    assert g.size == 7
    np.testing.assert_array_equal(g.values, g.values.T)
    np.testing.assert_array_equal(np.diag(g.values), np.ones(7))
    assert np.all(g.values >= 0) and np.all(g.values <= 1 + 1e-12)


def test_exact_gram_entries_match_pairwise_kernel_calls():
    spec = FeatureMapSpec(num_qubits=2)
    rows = rng.uniform(0, np.pi, (4, 2))
    g = gram(spec, rows)
    for i in range(4):
        for j in range(i + 1, 4):
            assert g.values[i, j] == pytest.approx(
                quantum_kernel_exact(spec, rows[i], rows[j]), abs=1e-12
            )


def test_exact_gram_is_positive_semidefinite():
    spec = FeatureMapSpec(num_qubits=3)
    rows = rng.uniform(0, np.pi, (10, 3))
    eigs = np.linalg.eigvalsh(gram(spec, rows).values)
    assert eigs.min() >= -1e-10


def test_shot_estimate_is_a_deterministic_frequency():
    spec = FeatureMapSpec(num_qubits=2)
    x = np.array([0.3, 1.1])
    y = np.array([2.0, 0.7])
    est = quantum_kernel_shots(spec, x, y, shots=1000, seed=7)
    assert est == 0.305  # frozen: multiples of 1/shots only
    assert quantum_kernel_shots(spec, x, y, shots=1000, seed=7) == est
    assert quantum_kernel_shots(spec, x, y, shots=1000, seed=8) != est


def test_shot_estimate_of_identical_points_is_exactly_one():
    spec = FeatureMapSpec(num_qubits=2)
    x = np.array([0.9, 2.2])
    assert quantum_kernel_shots(spec, x, x, shots=64, seed=0) == 1.0


def test_shot_estimate_converges_to_the_exact_value():
    spec = FeatureMapSpec(num_qubits=2)
    x = np.array([0.3, 1.1])
    y = np.array([2.0, 0.7])
    exact = quantum_kernel_exact(spec, x, y)
    ests = [quantum_kernel_shots(spec, x, y, shots=4096, seed=s) for s in range(20)]
    assert abs(np.mean(ests) - exact) < 0.01


def test_shot_gram_is_symmetric_reproducible_and_thread_invariant():
    spec = FeatureMapSpec(num_qubits=2)
    rows = rng.uniform(0, np.pi, (5, 2))
    a = gram(spec, rows, mode="shots", shots=256, seed=11)
    b = gram(spec, rows, mode="shots", shots=256, seed=11)
    c = gram(spec, rows, mode="shots", shots=256, seed=11, threads=4)
    np.testing.assert_array_equal(a.values, b.values)
    np.testing.assert_array_equal(a.values, c.values)
    np.testing.assert_array_equal(a.values, a.values.T)
    np.testing.assert_array_equal(np.diag(a.values), np.ones(5))
    assert a.mode == "shots" and a.shots == 256 and a.seed == 11


def test_shot_gram_differs_from_exact_but_not_far():
    spec = FeatureMapSpec(num_qubits=2)
    rows = rng.uniform(0, np.pi, (5, 2))
    exact = gram(spec, rows).values
    sampled = gram(spec, rows, mode="shots", shots=4096, seed=3).values
    assert not np.array_equal(exact, sampled)
    assert np.max(np.abs(exact - sampled)) < 0.05


def test_gram_argument_validation():
    spec = FeatureMapSpec(num_qubits=2)
    rows = rng.uniform(0, np.pi, (3, 2))
    with pytest.raises(ConfigError):
        gram(spec, rows, mode="sampled")
    with pytest.raises(ValueError):
        gram(spec, rows, mode="shots", shots=0, seed=1)
    with pytest.raises(ValueError):
        gram(spec, rows, mode="shots", shots=128)
    with pytest.raises(ValueError):
        gram(spec, np.empty((0, 2)))


def test_rbf_kernel_closed_form_and_gram():
    x = np.array([1.0, 2.0])
    y = np.array([2.0, 0.0])
    assert rbf_kernel(0.5, x, y) == pytest.approx(np.exp(-2.5))
    rows = rng.standard_normal((6, 2))
    g = gram(RbfKernel(gamma=0.5), rows)
    np.testing.assert_array_equal(g.values, g.values.T)
    np.testing.assert_array_equal(np.diag(g.values), np.ones(6))
    assert g.values[0, 1] == pytest.approx(
        rbf_kernel(0.5, rows[0], rows[1]), abs=1e-12
    )


def test_rbf_has_no_shot_mode():
    rows = rng.standard_normal((3, 2))
    with pytest.raises(ConfigError, match="no shot mode"):
        gram(RbfKernel(gamma=1.0), rows, mode="shots", shots=16, seed=0)
    with pytest.raises(ConfigError, match="no shot mode"):
        gram_cross(RbfKernel(gamma=1.0), rows, rows, mode="shots", shots=16, seed=0)


def test_rbf_gamma_validation_and_default():
    with pytest.raises(ConfigError):
        RbfKernel(gamma=0.0)
    with pytest.raises(ConfigError):
        RbfKernel(gamma=-1.0)
    rows = np.array([[0.0, 0.0], [2.0, 2.0]])
    assert default_rbf_gamma(rows) == pytest.approx(1.0 / (2 * rows.var()))
    with pytest.raises(ConfigError):
        default_rbf_gamma(np.ones((3, 2)))


def test_kernel_ids_are_stable_and_distinguish_kernels():
    assert kernel_id_of(FeatureMapSpec(num_qubits=2)) == "qfm-6136e995ef94"
    assert kernel_id_of(RbfKernel(gamma=0.5)) == "rbf-gamma=0.5"
    a = kernel_id_of(FeatureMapSpec(num_qubits=2))
    b = kernel_id_of(FeatureMapSpec(num_qubits=2, repetitions=3))
    assert a != b
    with pytest.raises(TypeError):
        kernel_id_of(object())


def test_cross_block_matches_pairwise_values_and_shape():
    spec = FeatureMapSpec(num_qubits=2)
    train = rng.uniform(0, np.pi, (5, 2))
    test = rng.uniform(0, np.pi, (3, 2))
    block = gram_cross(spec, train, test)
    assert isinstance(block, CrossBlock)
    assert block.values.shape == (3, 5)
    for i in range(3):
        for j in range(5):
            assert block.values[i, j] == pytest.approx(
                quantum_kernel_exact(spec, test[i], train[j]), abs=1e-12
            )


def test_cross_block_shot_mode_is_reproducible():
    spec = FeatureMapSpec(num_qubits=2)
    train = rng.uniform(0, np.pi, (4, 2))
    test = rng.uniform(0, np.pi, (2, 2))
    a = gram_cross(spec, train, test, mode="shots", shots=128, seed=5)
    b = gram_cross(spec, train, test, mode="shots", shots=128, seed=5, threads=3)
    np.testing.assert_array_equal(a.values, b.values)
    assert a.values.shape == (2, 4)
