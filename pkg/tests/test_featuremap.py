"""Encoding-circuit checks against the matrix-exponential oracle."""
import math

import numpy as np
import pytest

from qkstage.errors import ConfigError
from qkstage.featuremap import (
    FeatureMapSpec,
    apply_encode_inverse,
    default_spec,
    encode,
    fit_bounds,
    register_phi_family,
    rescale,
)

from oracles import encoded_state

rng = np.random.default_rng(20240902)


def test_encode_matches_expm_oracle_for_default_specs():
    for n in (1, 2, 3):
        spec = default_spec(n)
        for _ in range(5):
            x = rng.uniform(0, np.pi, n)
            np.testing.assert_allclose(
                encode(spec, x).amplitudes, encoded_state(spec, x), atol=1e-12
            )


def test_encode_matches_expm_oracle_full_entanglement_three_reps():
    spec = FeatureMapSpec(num_qubits=3, repetitions=3, entanglement="full")
    for _ in range(5):
        x = rng.uniform(0, np.pi, 3)
        np.testing.assert_allclose(
            encode(spec, x).amplitudes, encoded_state(spec, x), atol=1e-12
        )


def test_single_repetition_single_qubit_closed_form():
    # H then exp(i x Z): amplitudes (e^{ix}, e^{-ix}) / sqrt(2)
    spec = FeatureMapSpec(num_qubits=1, repetitions=1)
    x = 0.8
    amp = encode(spec, np.array([x])).amplitudes
    np.testing.assert_allclose(
        amp, np.array([np.exp(1j * x), np.exp(-1j * x)]) / np.sqrt(2), atol=1e-15
    )


def test_encoding_depends_on_the_entanglement_layout():
    x = rng.uniform(0, np.pi, 3)
    a = encode(FeatureMapSpec(num_qubits=3, entanglement="linear"), x)
    b = encode(FeatureMapSpec(num_qubits=3, entanglement="full"), x)
    assert not np.allclose(a.amplitudes, b.amplitudes)


def test_encode_inverse_returns_to_the_all_zeros_state():
    spec = default_spec(3)
    x = rng.uniform(0, np.pi, 3)
    state = apply_encode_inverse(spec, x, encode(spec, x))
    probs = np.abs(state.amplitudes) ** 2
    assert probs[0] == pytest.approx(1.0, abs=1e-12)


def test_encode_inverse_composition_matches_oracle_overlap():
    spec = default_spec(2)
    x = rng.uniform(0, np.pi, 2)
    y = rng.uniform(0, np.pi, 2)
    composed = apply_encode_inverse(spec, x, encode(spec, y))
    overlap = np.vdot(encoded_state(spec, x), encoded_state(spec, y))
    assert abs(composed.amplitudes[0] - overlap) < 1e-12


def test_entanglement_pairs_layouts():
    assert FeatureMapSpec(num_qubits=4).entanglement_pairs() == [(0, 1), (1, 2), (2, 3)]
    assert FeatureMapSpec(num_qubits=3, entanglement="full").entanglement_pairs() == [
        (0, 1),
        (0, 2),
        (1, 2),
    ]
    assert FeatureMapSpec(num_qubits=1).entanglement_pairs() == []


def test_spec_validation():
    with pytest.raises(ConfigError):
        FeatureMapSpec(num_qubits=0)
    with pytest.raises(ConfigError):
        FeatureMapSpec(num_qubits=2, repetitions=0)
    with pytest.raises(ConfigError):
        FeatureMapSpec(num_qubits=2, entanglement="ring")
    with pytest.raises(ConfigError):
        FeatureMapSpec(num_qubits=2, phi="nope")
    with pytest.raises(ConfigError):
        FeatureMapSpec(num_qubits=2, feature_range=(1.0, 1.0))
    with pytest.raises(ConfigError):
        FeatureMapSpec(num_qubits=2, feature_range=(0.0, math.inf))


def test_spec_dict_round_trip():
    spec = FeatureMapSpec(
        num_qubits=4, repetitions=3, entanglement="full", feature_range=(0.5, 2.5)
    )
    assert FeatureMapSpec.from_dict(spec.to_dict()) == spec


def test_encode_rejects_bad_vectors():
    spec = default_spec(2)
    with pytest.raises(ValueError):
        encode(spec, np.zeros(3))
    with pytest.raises(ValueError):
        encode(spec, np.array([0.1, np.nan]))


def test_default_phi_families():
    spec = default_spec(3)
    x = np.array([0.2, 1.0, 2.0])
    assert spec.phi_single(x, 1) == 1.0
    assert spec.phi_pair(x, 0, 2) == pytest.approx((math.pi - 0.2) * (math.pi - 2.0))


def test_register_phi_family_is_usable_in_a_spec():
    register_phi_family(
        "plain-product",
        lambda x, k: float(x[k]),
        lambda x, j, k: float(x[j] * x[k]),
    )
    spec = FeatureMapSpec(num_qubits=2, phi="plain-product")
    x = np.array([0.5, 1.5])
    assert spec.phi_pair(x, 0, 1) == 0.75
    np.testing.assert_allclose(
        encode(spec, x).amplitudes, encoded_state(spec, x), atol=1e-12
    )


def test_fit_bounds_per_dimension():
    rows = np.array([[0.0, 5.0], [2.0, -1.0], [1.0, 3.0]])
    mins, maxs = fit_bounds(rows)
    np.testing.assert_array_equal(mins, [0.0, -1.0])
    np.testing.assert_array_equal(maxs, [2.0, 5.0])
    with pytest.raises(ValueError):
        fit_bounds(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        fit_bounds(np.array([[1.0, np.nan]]))


def test_rescale_maps_bounds_to_the_feature_range():
    spec = FeatureMapSpec(num_qubits=2, feature_range=(0.0, math.pi))
    bounds = (np.array([0.0, -1.0]), np.array([2.0, 5.0]))
    out = rescale(np.array([[0.0, -1.0], [2.0, 5.0], [1.0, 2.0]]), bounds, spec)
    np.testing.assert_allclose(out[0], [0.0, 0.0])
    np.testing.assert_allclose(out[1], [math.pi, math.pi])
    np.testing.assert_allclose(out[2], [math.pi / 2, math.pi / 2])


def test_rescale_accepts_a_bare_range_and_a_single_vector():
    bounds = (np.array([0.0]), np.array([10.0]))
    out = rescale(np.array([2.5]), bounds, (0.0, 4.0))
    assert out.shape == (1,)
    assert out[0] == pytest.approx(1.0)


def test_rescale_degenerate_dimension_maps_to_midpoint():
    bounds = (np.array([3.0, 0.0]), np.array([3.0, 1.0]))
    out = rescale(np.array([[3.0, 0.5]]), bounds, (0.0, 2.0))
    np.testing.assert_allclose(out, [[1.0, 1.0]])


def test_rescale_validates_bounds():
    with pytest.raises(ValueError):
        rescale(np.array([[1.0]]), (np.array([2.0]), np.array([1.0])), (0.0, 1.0))
    with pytest.raises(ValueError):
        rescale(np.array([[1.0, 2.0]]), (np.array([0.0]), np.array([1.0])), (0.0, 1.0))


def test_qubit_permutation_consistency():
    """Permuting the features of a full-entanglement map permutes the qubits:
    fidelities between encoded states are permutation invariant."""
    spec = FeatureMapSpec(num_qubits=3, entanglement="full")
    x = rng.uniform(0, np.pi, 3)
    y = rng.uniform(0, np.pi, 3)
    perm = np.array([2, 0, 1])
    before = abs(np.vdot(encode(spec, x).amplitudes, encode(spec, y).amplitudes))
    after = abs(
        np.vdot(encode(spec, x[perm]).amplitudes, encode(spec, y[perm]).amplitudes)
    )
    assert before == pytest.approx(after, abs=1e-12)
