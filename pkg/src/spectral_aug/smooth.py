"""The smooth spectral augmentation and its stability bounds.

The augmentation aggregates one term per eigenvalue (or per eigenvalue
group), where each term sees the full eigenvector matrix with columns
damped by how far their eigenvalue sits from the current one:

    repeated path   Z = psi( sum_i  phi([lam_i * 1_n, f(V ~rho_i)]) )
    grouped  path   Z = psi( sum_j  mu_j * phi([lam_j * 1_n, f(V ~rho_j)]) )

with rho a compactly supported bump (rho(0) = 1) and f an orthogonal-basis-
invariant encoder.  The damping makes the map continuous across eigenvalue
crossings: inside a degenerate cluster the damping weights agree, so a basis
rotation of that cluster right-multiplies f's input by an orthogonal block
that f cannot see.  The repeated path never consults multiplicities, which
is what the stability bounds assume; the grouped path is the cheaper
K-term form, equivalent when groups are exact and gaps clear the support.

Summation runs in ascending eigenvalue index order, part of the contract so
reruns are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .augment import Augmentation
from .encoders import make_encoder_params, encode
from .errors import ValidationError
from .graphs import build_laplacian
from .linalg import GroupedSpectrum, Spectrum, default_group_tau, eig_sym, group_eigenspaces
from .mlp import derive_seed
from .setfuncs import make_set_params, phi_apply, psi_apply

_FAMILIES = ("hat", "cosine")
_PATHS = ("repeated", "grouped")
_F_TAG = 21
_SET_TAG = 23


@dataclass(frozen=True)
class SmoothingFn:
    """Compactly supported damping profile: rho(0) = 1, rho(x) = 0 for x >= delta.

    hat:    rho(x) = max(0, 1 - x/delta),            Lipschitz 1/delta
    cosine: rho(x) = (1 + cos(pi x / delta)) / 2,    Lipschitz pi/(2 delta)
    """

    family: str = "hat"
    delta: float = 0.1

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValidationError(f"smoothing family {self.family!r} not one of {_FAMILIES}")
        if not (isinstance(self.delta, (int, float)) and math.isfinite(self.delta) and self.delta > 0):
            raise ValidationError(f"smoothing delta must be > 0, got {self.delta!r}")

    def __call__(self, x):
        return rho_eval(self, x)

    def lipschitz(self):
        if self.family == "hat":
            return 1.0 / self.delta
        return math.pi / (2.0 * self.delta)


def rho_eval(fn, x):
    """Evaluate the damping profile elementwise on ``abs(x)``."""
    x = np.abs(np.asarray(x, dtype=np.float64))
    if fn.family == "hat":
        return np.maximum(0.0, 1.0 - x / fn.delta)
    out = np.where(x < fn.delta, (1.0 + np.cos(np.pi * np.minimum(x, fn.delta) / fn.delta)) / 2.0, 0.0)
    return out


@dataclass(frozen=True)
class OgeConfig:
    """Everything needed to evaluate the smooth augmentation deterministically."""

    path: str = "repeated"
    smoothing: SmoothingFn = SmoothingFn("hat", 0.1)
    tau_group: float | None = None
    encoder_kind: str = "gram-deepset"
    encoder_width: int = 64
    encoder_depth: int = 3
    encoder_out: int = 8
    set_m: int = 16
    set_d_out: int = 4
    set_hidden: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.path not in _PATHS:
            raise ValidationError(f"path {self.path!r} not one of {_PATHS}")
        if self.tau_group is not None and not (
            isinstance(self.tau_group, (int, float)) and self.tau_group > 0
        ):
            raise ValidationError(f"tau_group must be > 0 or None, got {self.tau_group!r}")


@lru_cache(maxsize=64)
def _f_params(cfg):
    return make_encoder_params(
        cfg.encoder_kind, cfg.encoder_width, cfg.encoder_depth, cfg.encoder_out,
        derive_seed(cfg.seed, _F_TAG),
    )


@lru_cache(maxsize=64)
def _set_params(cfg):
    return make_set_params(
        derive_seed(cfg.seed, _SET_TAG),
        m_f=cfg.encoder_out, m=cfg.set_m, d_out=cfg.set_d_out, hidden=cfg.set_hidden,
    )


def f_params(cfg):
    """The encoder parameters ``cfg`` induces (cached, deterministic)."""
    return _f_params(cfg)


def set_params(cfg):
    """The phi/psi/set parameters ``cfg`` induces (cached, deterministic)."""
    return _set_params(cfg)


def smooth_basis(s, j, smoothing):
    """Damped eigenvector matrix for index (or group) ``j``.

    For a :class:`Spectrum`, column k of the result is ``v_k`` scaled by
    ``rho(|lam_k - lam_j|)``; for a :class:`GroupedSpectrum`, whole blocks
    are scaled by the distance between group means.  Shape is (n, n) either
    way.  When every gap clears the support, only block j survives.
    """
    if isinstance(s, Spectrum):
        vals = s.eigenvalues
        if not 0 <= j < len(vals):
            raise ValidationError(f"index {j} out of range for n = {len(vals)}")
        return s.vectors * rho_eval(smoothing, vals - vals[j])[None, :]
    if isinstance(s, GroupedSpectrum):
        if not 0 <= j < s.k:
            raise ValidationError(f"group index {j} out of range for k = {s.k}")
        col_vals = np.repeat(s.values, s.multiplicities)
        scale = rho_eval(smoothing, col_vals - s.values[j])
        return np.concatenate(s.blocks, axis=1) * scale[None, :]
    raise ValidationError(f"expected Spectrum or GroupedSpectrum, got {type(s).__name__}")


def smooth_aug_from_spectrum(s, cfg):
    """Evaluate the augmentation on an existing decomposition."""
    n = s.n
    f = _f_params(cfg)
    sp = _set_params(cfg)
    ones = np.ones((n, 1))
    acc = np.zeros((n, cfg.set_m))
    if cfg.path == "repeated":
        tau_used = None
        for i in range(n):
            fv = encode(f, smooth_basis(s, i, cfg.smoothing))
            acc += phi_apply(sp, np.concatenate([s.eigenvalues[i] * ones, fv], axis=1))
    else:
        tau_used = cfg.tau_group if cfg.tau_group is not None else default_group_tau(s)
        gs = group_eigenspaces(s, tau_used)
        for j in range(gs.k):
            fv = encode(f, smooth_basis(gs, j, cfg.smoothing))
            term = phi_apply(sp, np.concatenate([gs.values[j] * ones, fv], axis=1))
            acc += gs.multiplicities[j] * term
    z = psi_apply(sp, acc)
    meta = {
        "method": "oge",
        "path": cfg.path,
        "seed": cfg.seed,
        "tau_group": tau_used,
        "smoothing": {"family": cfg.smoothing.family, "delta": cfg.smoothing.delta},
        "encoder": {
            "kind": cfg.encoder_kind, "width": cfg.encoder_width,
            "depth": cfg.encoder_depth, "out_dim": cfg.encoder_out,
        },
        "set": {"m": cfg.set_m, "d_out": cfg.set_d_out, "hidden": cfg.set_hidden},
    }
    return Augmentation(z, meta)


def smooth_aug_matrix(l, cfg):
    return smooth_aug_from_spectrum(eig_sym(l), cfg)


def smooth_aug(g, cfg):
    return smooth_aug_matrix(build_laplacian(g), cfg)


def _check_bound_args(n, consts, dls):
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"n must be a positive int, got {n!r}")
    for name, val in consts + dls:
        if not (isinstance(val, (int, float)) and math.isfinite(val) and val >= 0):
            raise ValidationError(f"{name} must be finite and >= 0, got {val!r}")


def stability_bound(n, j_psi, j_phi, j_rho, j_f, dl_spec, dl_fro):
    """Output-distance bound at the analysis-optimal damping width.

    n * j_psi * j_phi * [ (sqrt(n) + 2 n j_rho j_f) dl_spec
                          + 4 * 2**(1/4) * j_f * sqrt(j_rho) * n * sqrt(dl_fro) ]
    """
    _check_bound_args(
        n,
        [("j_psi", j_psi), ("j_phi", j_phi), ("j_rho", j_rho), ("j_f", j_f)],
        [("dl_spec", dl_spec), ("dl_fro", dl_fro)],
    )
    term = (math.sqrt(n) + 2.0 * n * j_rho * j_f) * dl_spec
    term += 4.0 * 2.0**0.25 * j_f * math.sqrt(j_rho) * n * math.sqrt(dl_fro)
    return n * j_psi * j_phi * term


def pre_bound(n, j_psi, j_phi, j_rho, j_f, delta, dl_spec, dl_fro):
    """Output-distance bound at an explicit damping width ``delta``.

    n * j_psi * j_phi * [ (sqrt(n) + 2 n j_rho j_f) dl_spec
                          + j_f (2 n^2 delta j_rho + sqrt(8) dl_fro / delta) ]

    Minimizing over delta at fixed j_rho recovers :func:`stability_bound`
    exactly (the minimizer is :func:`optimal_delta`).
    """
    _check_bound_args(
        n,
        [("j_psi", j_psi), ("j_phi", j_phi), ("j_rho", j_rho), ("j_f", j_f)],
        [("dl_spec", dl_spec), ("dl_fro", dl_fro)],
    )
    if not (isinstance(delta, (int, float)) and math.isfinite(delta) and delta > 0):
        raise ValidationError(f"delta must be > 0, got {delta!r}")
    term = (math.sqrt(n) + 2.0 * n * j_rho * j_f) * dl_spec
    term += j_f * (2.0 * n * n * delta * j_rho + math.sqrt(8.0) * dl_fro / delta)
    return n * j_psi * j_phi * term


def optimal_delta(n, j_rho, dl_fro):
    """argmin over delta of :func:`pre_bound` at fixed j_rho."""
    if j_rho <= 0 or dl_fro <= 0:
        raise ValidationError("optimal_delta needs j_rho > 0 and dl_fro > 0")
    return math.sqrt(math.sqrt(8.0) * dl_fro / (2.0 * n * n * j_rho))
