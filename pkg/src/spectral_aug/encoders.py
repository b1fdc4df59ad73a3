"""Node encoders invariant to orthogonal changes of eigenvector basis.

Both encoders map an (n, p) matrix ``v`` to (n, out_dim) node features and
satisfy, by construction rather than by training:

* right-invariance   encode(params, v @ q) == encode(params, v)  for q in O(p)
* row-equivariance   encode(params, P v)   == P @ encode(params, v)

``gram-deepset`` sees ``v`` only through its Gram matrix G = v v^T: row i
maps to MLP_out(G_ii, mean_j MLP_in(G_ij)).  ``cartesian-tensor-2`` carries
per-node scalar, vector, and rank-2 tensor channels, mixes them with
p-independent weights, and reads out full contractions only (traces, squared
norms, pairwise inner products), so no choice of basis can leak through.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EstimationError, ValidationError
from .linalg import procrustes_align
from .mlp import apply_mlp, init_mlp

KINDS = ("gram-deepset", "cartesian-tensor-2")

# Fixed channel counts for cartesian-tensor-2: two vector channels (row,
# node mean) and three rank-2 channels (row outer square, global second
# moment, row/mean cross term).
_C1 = 2
_C2 = 3
_N_INV = _C1 + _C1 * (_C1 - 1) // 2 + 2 * _C2


@dataclass(frozen=True, eq=False)
class EncoderParams:
    """Seeded weights for one encoder; same fields -> bit-identical arrays."""

    kind: str
    width: int
    depth: int
    out_dim: int
    seed: int
    weights: dict


@dataclass(frozen=True)
class LipschitzEstimate:
    j_f: float
    probes: int
    seed: int
    max_ratio_input: str


def make_encoder_params(kind, width, depth, out_dim, seed):
    if kind not in KINDS:
        raise ValidationError(f"encoder kind {kind!r} not one of {KINDS}")
    for name, val in (("width", width), ("depth", depth), ("out_dim", out_dim)):
        if isinstance(val, bool) or not isinstance(val, int) or val < 1:
            raise ValidationError(f"encoder {name} must be a positive int, got {val!r}")
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ValidationError(f"encoder seed must be a non-negative int, got {seed!r}")
    rng = np.random.default_rng(
        np.random.SeedSequence([KINDS.index(kind), width, depth, out_dim, seed])
    )
    if kind == "gram-deepset":
        weights = {
            "inner": init_mlp([1] + [width] * depth, rng),
            "outer": init_mlp([1 + width] + [width] * (depth - 1) + [out_dim], rng),
        }
    else:
        weights = {"layers": tuple(_ct2_layer(width, rng) for _ in range(depth))}
        weights["head"] = init_mlp([width + _N_INV, width, out_dim], rng)
        weights["s0"] = init_mlp([_N_INV, width], rng)
    return EncoderParams(kind, width, depth, out_dim, seed, weights)


def _ct2_layer(width, rng):
    z = width + _N_INV
    return {
        "w_s": init_mlp([z, width], rng),
        "w_g1": init_mlp([z, _C1], rng),
        "w_g2": init_mlp([z, _C2], rng),
        "m1": rng.uniform(-(_C1**-0.5), _C1**-0.5, size=(_C1, _C1)),
        "m2": rng.uniform(
            -((_C2 * _C1) ** -0.5), (_C2 * _C1) ** -0.5, size=(_C1, _C2 * _C1)
        ),
        "m3": rng.uniform(-(_C2**-0.5), _C2**-0.5, size=(_C2, _C2)),
        "m4": rng.uniform(
            -((_C1 * _C1) ** -0.5), (_C1 * _C1) ** -0.5, size=(_C2, _C1 * _C1)
        ),
    }


def encode(params, v):
    """Per-node features, shape (n, out_dim).  See the module docstring."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
        raise ValidationError(f"encoder input must be 2-D non-empty, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise ValidationError("encoder input contains non-finite entries")
    if params.kind == "gram-deepset":
        return _encode_gram(params, v)
    return _encode_ct2(params, v)


def _encode_gram(params, v):
    n = v.shape[0]
    g = v @ v.T
    feat = apply_mlp(params.weights["inner"], g.reshape(n * n, 1))
    pooled = feat.reshape(n, n, -1).mean(axis=1)
    head_in = np.concatenate([np.diag(g)[:, None], pooled], axis=1)
    return apply_mlp(params.weights["outer"], head_in)


def _invariants(t, tt):
    """Full contractions of the channel state; the only readout allowed."""
    cols = []
    for a in range(_C1):
        cols.append((t[:, a] * t[:, a]).sum(axis=1))
    for a in range(_C1):
        for b in range(a + 1, _C1):
            cols.append((t[:, a] * t[:, b]).sum(axis=1))
    for c in range(_C2):
        cols.append(np.trace(tt[:, c], axis1=1, axis2=2))
        cols.append((tt[:, c] ** 2).sum(axis=(1, 2)))
    return np.stack(cols, axis=1)


def _encode_ct2(params, v):
    n = v.shape[0]
    mean = v.mean(axis=0)
    t = np.stack([v, np.broadcast_to(mean, v.shape)], axis=1)
    outer = v[:, :, None] * v[:, None, :]
    second = np.broadcast_to(outer.mean(axis=0), outer.shape)
    cross = (v[:, :, None] * mean[None, None, :] + mean[None, :, None] * v[:, None, :]) / 2.0
    tt = np.stack([outer, second, cross], axis=1)

    s = np.tanh(apply_mlp(params.weights["s0"], _invariants(t, tt)))
    for layer in params.weights["layers"]:
        z = np.concatenate([s, _invariants(t, tt)], axis=1)
        s = np.tanh(apply_mlp(layer["w_s"], z))
        g1 = np.tanh(apply_mlp(layer["w_g1"], z))
        g2 = np.tanh(apply_mlp(layer["w_g2"], z))
        mixed_t = np.einsum("ab,nbp->nap", layer["m1"], t)
        prod = np.einsum("ncpq,nbq->ncbp", tt, t).reshape(n, _C2 * _C1, -1)
        new_t = g1[:, :, None] * (mixed_t + np.einsum("am,nmp->nap", layer["m2"], prod))
        mixed_tt = np.einsum("cd,ndpq->ncpq", layer["m3"], tt)
        pairs = t[:, :, None, :, None] * t[:, None, :, None, :]
        pairs = (pairs + pairs.transpose(0, 1, 2, 4, 3)) / 2.0
        pairs = pairs.reshape(n, _C1 * _C1, v.shape[1], v.shape[1])
        new_tt = g2[:, :, None, None] * (
            mixed_tt + np.einsum("cm,nmpq->ncpq", layer["m4"], pairs)
        )
        t, tt = new_t, new_tt
    z = np.concatenate([s, _invariants(t, tt)], axis=1)
    return apply_mlp(params.weights["head"], z)


def estimate_lipschitz(params, n, p, probes, seed):
    """Empirical Lipschitz ratio of ``encode`` against alignment distance.

    Draws ``probes`` seeded pairs (X, X + eps * D) with eps log-spaced in
    [1e-4, 1e-1] and returns the largest ratio

        ||f(X) - f(X')||_F / min_Q ||X - X' Q||_F.

    Pairs whose alignment distance falls below 1e-12 are skipped; if every
    pair is skipped the estimate is undefined and raises
    :class:`EstimationError`.
    """
    if not isinstance(probes, int) or probes < 1:
        raise ValidationError(f"probes must be a positive int, got {probes!r}")
    if n < 1 or p < 1:
        raise ValidationError(f"probe shape ({n}, {p}) must be positive")
    rng = np.random.default_rng(np.random.SeedSequence([seed, n, p, probes]))
    if probes == 1:
        eps = np.array([1e-4])
    else:
        eps = np.logspace(-4.0, -1.0, probes)
    pairs = []
    for k in range(probes):
        x = rng.normal(size=(n, p))
        x2 = x + eps[k] * rng.normal(size=(n, p))
        pairs.append((f"probe {k}: eps={eps[k]:.3e}", x, x2))
    return _lipschitz_from_pairs(params, pairs, probes, seed)


def _lipschitz_from_pairs(params, pairs, probes, seed):
    best = None
    best_desc = ""
    for desc, x, x2 in pairs:
        denom = procrustes_align(x, x2).dist
        if denom < 1e-12:
            continue
        num = float(np.linalg.norm(encode(params, x) - encode(params, x2), "fro"))
        ratio = num / denom
        if best is None or ratio > best:
            best = ratio
            best_desc = desc
    if best is None:
        raise EstimationError("all probe pairs degenerate (alignment distance < 1e-12)")
    return LipschitzEstimate(float(best), probes, seed, best_desc)
