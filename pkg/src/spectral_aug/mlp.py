"""Dense MLP plumbing: seeded init, forward pass, spectral norms, seed mixing.

Every learned map in this package is a plain tanh MLP whose weights are
drawn once from a seeded generator and never trained.  Weight entries are
uniform(-a, a) with a = fan_in ** -0.5, biases included.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError


def derive_seed(*parts):
    """Mix integer parts into a fresh 64-bit seed, stably across runs."""
    ss = np.random.SeedSequence([int(p) for p in parts])
    return int(ss.generate_state(1, np.uint64)[0])


def init_mlp(dims, rng):
    """Seeded (W, b) pairs for a chain of linear layers sized by ``dims``."""
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise ValidationError(f"MLP dims {dims} must be >= 2 positive sizes")
    layers = []
    for din, dout in zip(dims[:-1], dims[1:]):
        a = float(din) ** -0.5
        w = rng.uniform(-a, a, size=(din, dout))
        b = rng.uniform(-a, a, size=(dout,))
        layers.append((w, b))
    return tuple(layers)


def apply_mlp(layers, x):
    """Forward pass: tanh between layers, final layer linear.

    ``x`` has shape (..., din); output has shape (..., dout).  Changing one
    row of a 2-D input changes only that row of the output.
    """
    h = np.asarray(x, dtype=np.float64)
    last = len(layers) - 1
    for k, (w, b) in enumerate(layers):
        h = h @ w + b
        if k < last:
            h = np.tanh(h)
    return h


def mlp_lipschitz(layers, iters=100, tol=1e-10):
    """Product of per-layer spectral norms (tanh contributes a factor of 1)."""
    out = 1.0
    for w, _ in layers:
        out *= power_spectral_norm(w, iters=iters, tol=tol)
    return out


def power_spectral_norm(w, iters=100, tol=1e-10, seed=0):
    """Largest singular value of ``w`` by alternating power iteration.

    Deterministic (seeded start vector).  Returns 0.0 for an all-zero
    matrix.  The exact-SVD value is the test oracle for this routine.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2:
        raise ValidationError(f"spectral norm needs a 2-D array, got ndim {w.ndim}")
    if not w.any():
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.normal(size=w.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(iters):
        u = w @ v
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return 0.0
        u /= nu
        v = w.T @ u
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return 0.0
        v /= nv
        if abs(nv - sigma) <= tol * max(1.0, nv):
            return float(nv)
        sigma = nv
    return float(sigma)
