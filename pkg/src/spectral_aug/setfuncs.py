"""Set aggregation networks shared by both augmentations.

``g_apply`` is a deep-set over a multiset of (n, w) items: an inner MLP per
item row, a sum over the multiset, an outer MLP on the pooled state.  Its
output cannot depend on item order.

``phi_apply`` / ``psi_apply`` are the row-wise maps around the eigenvalue
sum of the smooth augmentation: phi lifts one item's rows before summation,
psi reads the summed state out.  Both are plain tanh MLPs applied row by
row, so changing input row i changes only output row i, and a product of
layer spectral norms bounds their Lipschitz constants (tanh contributes 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .mlp import apply_mlp, init_mlp, mlp_lipschitz

_G_INNER, _G_OUTER, _PHI, _PSI = 11, 12, 13, 14


@dataclass(frozen=True, eq=False)
class SetEncoderParams:
    """Seeded weights for g's inner/outer MLPs and for phi, psi."""

    item_width: int
    g_latent: int
    g_out: int
    m_f: int
    m: int
    d_out: int
    hidden: int
    seed: int
    g_inner: tuple
    g_outer: tuple
    phi: tuple
    psi: tuple


@dataclass(frozen=True)
class LipschitzLedger:
    """Constants entering the stability bounds, with how each was obtained."""

    j_phi: float
    j_psi: float
    j_rho: float
    j_f: float
    notes: dict

    def as_dict(self):
        return {
            "j_phi": self.j_phi,
            "j_psi": self.j_psi,
            "j_rho": self.j_rho,
            "j_f": self.j_f,
            "notes": dict(self.notes),
        }


def make_set_params(seed, item_width=3, g_latent=16, g_out=1, m_f=8, m=16, d_out=4, hidden=64):
    """Build all four MLP weight sets from one seed.

    Each MLP has two hidden layers of width ``hidden`` and a linear head.
    """
    sizes = {
        "item_width": item_width, "g_latent": g_latent, "g_out": g_out,
        "m_f": m_f, "m": m, "d_out": d_out, "hidden": hidden,
    }
    for name, val in sizes.items():
        if not isinstance(val, int) or val < 1:
            raise ValidationError(f"set encoder {name} must be a positive int, got {val!r}")
    if not isinstance(seed, int) or seed < 0:
        raise ValidationError(f"set encoder seed must be a non-negative int, got {seed!r}")

    def rng(tag):
        return np.random.default_rng(np.random.SeedSequence([tag, seed]))

    return SetEncoderParams(
        item_width=item_width, g_latent=g_latent, g_out=g_out, m_f=m_f, m=m,
        d_out=d_out, hidden=hidden, seed=seed,
        g_inner=init_mlp([item_width, hidden, hidden, g_latent], rng(_G_INNER)),
        g_outer=init_mlp([g_latent, hidden, hidden, g_out], rng(_G_OUTER)),
        phi=init_mlp([1 + m_f, hidden, hidden, m], rng(_PHI)),
        psi=init_mlp([m, hidden, hidden, d_out], rng(_PSI)),
    )


def g_apply(params, items):
    """Deep-set readout: outer-MLP( sum over items of inner-MLP(rows) ).

    ``items`` is a non-empty sequence of (n, item_width) arrays sharing n.
    Returns (n, g_out); component i depends on the items only through their
    multiset, never their order.
    """
    items = [np.asarray(it, dtype=np.float64) for it in items]
    if not items:
        raise ValidationError("g_apply needs at least one item")
    n = items[0].shape[0]
    for k, it in enumerate(items):
        if it.ndim != 2 or it.shape != (n, params.item_width):
            raise ValidationError(
                f"item {k} has shape {it.shape}, expected ({n}, {params.item_width})"
            )
    acc = np.zeros((n, params.g_latent))
    for it in items:
        acc += apply_mlp(params.g_inner, it)
    return apply_mlp(params.g_outer, acc)


def phi_apply(params, x):
    """Row-wise lift applied to one item before the eigenvalue sum."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != 1 + params.m_f:
        raise ValidationError(f"phi input must be (n, {1 + params.m_f}), got {x.shape}")
    return apply_mlp(params.phi, x)


def psi_apply(params, x):
    """Row-wise readout applied after the eigenvalue sum."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != params.m:
        raise ValidationError(f"psi input must be (n, {params.m}), got {x.shape}")
    return apply_mlp(params.psi, x)


def compute_ledger(set_params, smoothing, encoder_estimate, safety=1.0):
    """Assemble the Lipschitz ledger for the stability bounds.

    j_phi and j_psi are products of power-iteration layer spectral norms
    (exact SVD is the test oracle); j_rho is the smoothing family's closed
    form; j_f is the sampled encoder estimate scaled by ``safety``.
    """
    if not (np.isfinite(safety) and safety >= 1.0):
        raise ValidationError(f"safety factor must be >= 1, got {safety!r}")
    j_phi = mlp_lipschitz(set_params.phi)
    j_psi = mlp_lipschitz(set_params.psi)
    j_rho = smoothing.lipschitz()
    j_f = safety * encoder_estimate.j_f
    notes = {
        "j_phi": "product of power-iteration layer spectral norms, tanh factor 1",
        "j_psi": "product of power-iteration layer spectral norms, tanh factor 1",
        "j_rho": f"closed form for {smoothing.family} (delta={smoothing.delta!r})",
        "j_f": (
            f"sampled over {encoder_estimate.probes} probes "
            f"(raw {encoder_estimate.j_f!r}) x safety {safety!r}"
        ),
    }
    return LipschitzLedger(float(j_phi), float(j_psi), float(j_rho), float(j_f), notes)
