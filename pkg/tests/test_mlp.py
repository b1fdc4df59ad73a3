"""MLP plumbing: seeded init, forward pass, spectral norms.

numpy's exact SVD is the oracle for the power iteration.
"""

import numpy as np
import pytest

from spectral_aug.errors import ValidationError
from spectral_aug.mlp import (apply_mlp, derive_seed, init_mlp, mlp_lipschitz,
                              power_spectral_norm)


def test_derive_seed_is_stable_and_mixes():
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
    assert derive_seed(1, 2, 3) != derive_seed(1, 3, 2)
    assert derive_seed(0) != derive_seed(1)
    assert 0 <= derive_seed(7, 7) < 2**64


def test_init_mlp_shapes_and_bounds():
    layers = init_mlp([3, 5, 2], np.random.default_rng(0))
    assert [(w.shape, b.shape) for w, b in layers] == [((3, 5), (5,)), ((5, 2), (2,))]
    for w, b in layers:
        a = w.shape[0] ** -0.5
        assert np.abs(w).max() <= a and np.abs(b).max() <= a


def test_init_mlp_validation():
    rng = np.random.default_rng(0)
    with pytest.raises(ValidationError):
        init_mlp([3], rng)
    with pytest.raises(ValidationError):
        init_mlp([3, 0], rng)


def test_apply_mlp_single_layer_is_affine():
    layers = ((np.array([[2.0]]), np.array([3.0])),)
    x = np.array([[1.0], [10.0]])
    assert np.array_equal(apply_mlp(layers, x), [[5.0], [23.0]])


def test_apply_mlp_tanh_between_layers_only():
    # identity weights expose the activation placement: tanh after the
    # first layer, nothing after the last
    layers = ((np.eye(1), np.zeros(1)), (np.eye(1), np.zeros(1)))
    x = np.array([[0.5], [-2.0]])
    assert np.allclose(apply_mlp(layers, x), np.tanh(x), atol=0)


def test_apply_mlp_row_locality():
    rng = np.random.default_rng(3)
    layers = init_mlp([4, 8, 2], rng)
    x = rng.normal(size=(5, 4))
    y = apply_mlp(layers, x)
    x2 = x.copy()
    x2[2] += 1.0
    y2 = apply_mlp(layers, x2)
    changed = np.abs(y2 - y).max(axis=1) > 0
    assert changed.tolist() == [False, False, True, False, False]


def test_power_spectral_norm_matches_svd_oracle():
    rng = np.random.default_rng(9)
    for _ in range(300):
        shape = (int(rng.integers(1, 9)), int(rng.integers(1, 9)))
        w = rng.normal(size=shape) * float(rng.uniform(0.1, 10.0))
        mine = power_spectral_norm(w)
        oracle = float(np.linalg.svd(w, compute_uv=False)[0])
        assert mine == pytest.approx(oracle, rel=1e-6, abs=1e-9)


def test_power_spectral_norm_scaled_identity():
    assert power_spectral_norm(2.0 * np.eye(4)) == pytest.approx(2.0, abs=1e-6)


def test_power_spectral_norm_edge_cases():
    assert power_spectral_norm(np.zeros((3, 2))) == 0.0
    assert power_spectral_norm([[3.0, 0.0], [0.0, 4.0], [0.0, 0.0]]) == pytest.approx(4.0, rel=1e-9)
    with pytest.raises(ValidationError):
        power_spectral_norm(np.zeros(3))


def test_mlp_lipschitz_is_product_of_layer_norms():
    layers = ((2.0 * np.eye(3), np.zeros(3)), (np.diag([1.0, 0.5, 3.0]), np.zeros(3)))
    assert mlp_lipschitz(layers) == pytest.approx(6.0, rel=1e-9)


def test_mlp_lipschitz_bounds_observed_ratios():
    rng = np.random.default_rng(4)
    layers = init_mlp([6, 32, 32, 3], rng)
    j = mlp_lipschitz(layers)
    for _ in range(500):
        x = rng.normal(size=(1, 6))
        y = x + rng.normal(size=(1, 6)) * float(rng.uniform(1e-4, 1.0))
        num = np.linalg.norm(apply_mlp(layers, x) - apply_mlp(layers, y))
        den = np.linalg.norm(x - y)
        assert num <= j * den * (1.0 + 1e-9)
