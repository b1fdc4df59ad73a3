"""Perturbation experiments: do output distances respect the bounds?

One experiment takes a graph, applies a seeded perturbation, aligns the
perturbed Laplacian back over the node matching that minimizes the
Frobenius residual, and compares the smooth augmentation's output distance
against the two bounds (configured-width and optimal-width).  Alongside,
each experiment evaluates the three inequalities the bound proof leans on
(eigenvalue shift, damped-subspace alignment, product-norm splitting) on
the same matrices, recording worst slacks.

Slack conventions: a check never skips silently; degenerate denominators
record a reason.  Violation thresholds are relative where the right side
sets the natural scale, with an absolute floor of 1e-12 * scale so that
identical inputs (RHS = 0, LHS at machine noise) do not read as
violations.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError
from .graphs import Graph, PerturbSpec, Permutation, build_laplacian, component_count, make_graph, perturb
from .linalg import eig_sym, fro_norm, match_permutation, procrustes_align, spectral_norm
from .encoders import estimate_lipschitz
from .mlp import derive_seed
from .setfuncs import compute_ledger
from .smooth import f_params, pre_bound, set_params, smooth_aug_matrix, stability_bound
from .vanilla import vanilla_aug_matrix

_LEDGER_TAG = 41
_GRID_GRAPH_TAG = 101
_GRID_FLIP_TAG = 102


@dataclass(frozen=True)
class LemmaCheck:
    name: str
    slack: float | None
    lhs: float | None
    rhs: float | None
    skipped: str | None = None

    def as_dict(self):
        return {"slack": self.slack, "lhs": self.lhs, "rhs": self.rhs, "skipped": self.skipped}


def violates(check):
    """Apply the per-inequality tolerance; skipped checks never violate."""
    if check.skipped is not None:
        return False
    if check.name == "weyl":
        return check.slack < -1e-9
    rel = 1e-8 if check.name == "davis_kahan" else 1e-9
    floor = 1e-12 * max(1.0, abs(check.lhs), abs(check.rhs))
    return check.slack < -(rel * max(check.rhs, 0.0) + floor)


def check_weyl(l, l2):
    """Eigenvalue shift vs spectral norm: max_i |lam_i - lam'_i| <= ||l - l2||_2."""
    vals1 = eig_sym(l).eigenvalues
    vals2 = eig_sym(l2).eigenvalues
    lhs = float(np.abs(vals1 - vals2).max())
    rhs = spectral_norm(np.asarray(l, dtype=np.float64) - np.asarray(l2, dtype=np.float64))
    return LemmaCheck("weyl", rhs - lhs, lhs, rhs)


def largest_gap_interval(vals):
    """(0, i*) with i* the interior index of the widest gap; None for n = 1."""
    if len(vals) < 2:
        return None
    gaps = np.diff(vals)
    return (0, int(np.argmax(gaps)))


def check_davis_kahan(l, l2, interval=None):
    """Subspace alignment vs perturbation size over an eigenvalue interval.

    For the index interval J = {s..t} (0-based, inclusive) of ``l``'s
    spectrum, checks

        min_Q ||V_J - V'_J Q||_F
            <= sqrt(8) * min(sqrt(|J|) ||dl||_2, ||dl||_F) / gap

    where gap = min(lam_s - lam_{s-1}, lam_{t+1} - lam_t), reading gaps at
    the spectrum's ends as +inf.  With ``interval=None`` the interval runs
    from the bottom up to the widest interior gap.  The check is recorded
    as skipped when the gap is unbounded (interval spans everything) or
    below 1e-8 (denominator too degenerate to mean anything).
    """
    s1 = eig_sym(l)
    s2 = eig_sym(l2)
    n = s1.n
    if interval is None:
        interval = largest_gap_interval(s1.eigenvalues)
        if interval is None:
            return LemmaCheck("davis_kahan", None, None, None, "n = 1: no interior gap")
    lo, hi = interval
    if not (isinstance(lo, int) and isinstance(hi, int) and 0 <= lo <= hi < n):
        raise ValidationError(f"interval {interval!r} invalid for n = {n}")
    vals = s1.eigenvalues
    left = vals[lo] - vals[lo - 1] if lo >= 1 else math.inf
    right = vals[hi + 1] - vals[hi] if hi + 1 <= n - 1 else math.inf
    gap = min(left, right)
    if math.isinf(gap):
        return LemmaCheck("davis_kahan", None, None, None, "unbounded gap: interval spans the whole spectrum")
    if gap <= 1e-8:
        return LemmaCheck("davis_kahan", None, None, None, f"gap {gap:.3e} <= 1e-08")
    dl = np.asarray(l, dtype=np.float64) - np.asarray(l2, dtype=np.float64)
    size = hi - lo + 1
    lhs = procrustes_align(s1.vectors[:, lo : hi + 1], s2.vectors[:, lo : hi + 1]).dist
    rhs = math.sqrt(8.0) * min(math.sqrt(size) * spectral_norm(dl), fro_norm(dl)) / gap
    return LemmaCheck("davis_kahan", rhs - lhs, lhs, rhs)


def check_product_norm(mats, pivot):
    """Frobenius norm of a product vs one Frobenius pivot among spectral norms."""
    mats = [np.asarray(m, dtype=np.float64) for m in mats]
    if not mats:
        raise ValidationError("product-norm check needs at least one matrix")
    if not isinstance(pivot, int) or not 0 <= pivot < len(mats):
        raise ValidationError(f"pivot {pivot!r} out of range for {len(mats)} matrices")
    for a, b in zip(mats[:-1], mats[1:]):
        if a.shape[1] != b.shape[0]:
            raise ValidationError(f"chain not composable: {a.shape} then {b.shape}")
    prod = mats[0]
    for m in mats[1:]:
        prod = prod @ m
    lhs = fro_norm(prod)
    rhs = fro_norm(mats[pivot])
    for k, m in enumerate(mats):
        if k < pivot:
            rhs *= spectral_norm(m)
        elif k > pivot:
            rhs *= spectral_norm(m.T)
    return LemmaCheck("product_norm", rhs - lhs, lhs, rhs)


@dataclass(frozen=True)
class StabilityReport:
    graph_id: str
    seed: int
    n: int
    perturbation: dict
    p_mode: str
    p_star: tuple | None
    dl_spec: float
    dl_fro: float
    z_dist: float
    bound_delta: float
    bound_opt: float
    satisfied_delta: bool
    satisfied_opt: bool
    ledger: dict
    lemma_margins: dict
    diagnosis: dict | None

    def as_dict(self):
        out = {
            "graph_id": self.graph_id,
            "seed": self.seed,
            "n": self.n,
            "perturbation": self.perturbation,
            "p_mode": self.p_mode,
            "p_star": list(self.p_star) if self.p_star is not None else None,
            "dl_spec": self.dl_spec,
            "dl_fro": self.dl_fro,
            "z_dist": self.z_dist,
            "bound_delta": self.bound_delta,
            "bound_opt": self.bound_opt,
            "satisfied_delta": self.satisfied_delta,
            "satisfied_opt": self.satisfied_opt,
            "ledger": self.ledger,
            "lemma_margins": self.lemma_margins,
            "diagnosis": self.diagnosis,
        }
        return out


def build_ledger(cfg, n, probes=256, safety=2.0):
    """Ledger for graphs of size n under ``cfg`` (f consumes (n, n) inputs)."""
    est = estimate_lipschitz(
        f_params(cfg), n, n, probes, derive_seed(cfg.seed, _LEDGER_TAG, n, probes)
    )
    return compute_ledger(set_params(cfg), cfg.smoothing, est, safety=safety)


def run_experiment(g, pspec, cfg, p_mode="bruteforce", graph_id="g0", ledger=None,
                   probes=256, safety=2.0):
    """One perturbation experiment; see the module docstring.

    ``cfg`` is the smooth augmentation's config (the bounds are stated for
    its repeated path).  ``ledger=None`` builds the Lipschitz ledger in
    place; grids should share one ledger per size.  A report whose bounds
    came out unsatisfied carries a diagnosis block with the encoder
    Lipschitz constant re-estimated at 4096 probes.
    """
    if p_mode not in ("bruteforce", "identity"):
        raise ValidationError(f"p_mode {p_mode!r} not one of 'bruteforce', 'identity'")
    l = build_laplacian(g)
    n = g.num_nodes
    perturbed = perturb(g, pspec)
    l2 = build_laplacian(perturbed) if isinstance(perturbed, Graph) else perturbed
    if p_mode == "bruteforce":
        mr = match_permutation(l, l2)
        pm = mr.perm
        p_star = pm.mapping
    else:
        pm = Permutation.identity(n)
        p_star = None
    pmat = pm.matrix()
    l2m = pmat @ l2 @ pmat.T
    dl = l - l2m
    dl_spec = spectral_norm(dl)
    dl_fro = fro_norm(dl)

    z1 = smooth_aug_matrix(l, cfg).z
    z2 = smooth_aug_matrix(l2, cfg).z
    z_dist = float(np.linalg.norm(z1 - pmat @ z2, "fro"))

    if ledger is None:
        ledger = build_ledger(cfg, n, probes=probes, safety=safety)
    bound_delta = pre_bound(n, ledger.j_psi, ledger.j_phi, ledger.j_rho, ledger.j_f,
                            cfg.smoothing.delta, dl_spec, dl_fro)
    bound_opt = stability_bound(n, ledger.j_psi, ledger.j_phi, ledger.j_rho, ledger.j_f,
                                dl_spec, dl_fro)
    satisfied_delta = z_dist <= bound_delta
    satisfied_opt = z_dist <= bound_opt

    s1 = eig_sym(l)
    margins = {
        "weyl": check_weyl(l, l2m).as_dict(),
        "davis_kahan": check_davis_kahan(l, l2m).as_dict(),
        "product_norm": check_product_norm(
            [s1.vectors, np.diag(s1.eigenvalues), s1.vectors.T], 1
        ).as_dict(),
    }

    diagnosis = None
    if not (satisfied_delta and satisfied_opt):
        est = estimate_lipschitz(
            f_params(cfg), n, n, 4096, derive_seed(cfg.seed, _LEDGER_TAG, n, 4096)
        )
        redone = compute_ledger(set_params(cfg), cfg.smoothing, est, safety=safety)
        rb_delta = pre_bound(n, redone.j_psi, redone.j_phi, redone.j_rho, redone.j_f,
                             cfg.smoothing.delta, dl_spec, dl_fro)
        rb_opt = stability_bound(n, redone.j_psi, redone.j_phi, redone.j_rho, redone.j_f,
                                 dl_spec, dl_fro)
        diagnosis = {
            "reestimated_probes": 4096,
            "j_f": redone.j_f,
            "bound_delta": rb_delta,
            "bound_opt": rb_opt,
            "satisfied_delta": bool(z_dist <= rb_delta),
            "satisfied_opt": bool(z_dist <= rb_opt),
        }

    return StabilityReport(
        graph_id=graph_id, seed=pspec.seed, n=n,
        perturbation={"mode": pspec.mode, "count": pspec.count, "sigma": pspec.sigma,
                      "seed": pspec.seed},
        p_mode=p_mode, p_star=p_star,
        dl_spec=dl_spec, dl_fro=dl_fro, z_dist=z_dist,
        bound_delta=float(bound_delta), bound_opt=float(bound_opt),
        satisfied_delta=bool(satisfied_delta), satisfied_opt=bool(satisfied_opt),
        ledger=ledger.as_dict(), lemma_margins=margins, diagnosis=diagnosis,
    )


def random_connected_graph(n, seed, edge_prob=0.5):
    """Seeded G(n, p) conditioned on connectivity (resample until connected)."""
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"n must be a positive int, got {n!r}")
    rng = np.random.default_rng(np.random.SeedSequence([47, seed]))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    for _ in range(10000):
        edges = [p for p in pairs if rng.random() < edge_prob]
        g = make_graph(n, edges)
        if component_count(g) == 1:
            return g
    raise RuntimeError(f"no connected sample for n = {n} (edge_prob {edge_prob})")


def run_grid(cfg, n_values=(4, 5, 6, 7, 8), experiments=200, flip_count=1,
             p_mode="bruteforce", probes=256, safety=2.0, seed=0, jobs=1):
    """Seeded stability grid; one report per experiment, order deterministic."""
    if not n_values:
        raise ValidationError("n_values must be non-empty")
    ledgers = {n: build_ledger(cfg, n, probes=probes, safety=safety) for n in sorted(set(n_values))}

    def one(k):
        n = n_values[k % len(n_values)]
        g = random_connected_graph(n, derive_seed(seed, _GRID_GRAPH_TAG, k))
        pspec = PerturbSpec("edge-flip", count=flip_count,
                            seed=derive_seed(seed, _GRID_FLIP_TAG, k))
        return run_experiment(g, pspec, cfg, p_mode=p_mode,
                              graph_id=f"exp{k:04d}-n{n}", ledger=ledgers[n])

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, range(experiments)))
    return [one(k) for k in range(experiments)]


def degeneracy_contrast(g, sigmas, oge_cfg, van_cfg, noise_seed=0):
    """Output shifts under shrinking symmetric noise, per pipeline.

    The same seeded noise direction is scaled by each sigma, so the rows
    trace one ray toward the unperturbed graph.  Rows report the repeated
    path (bounded, should shrink with sigma), the grouped path at the
    configured tau_group, and the per-eigenspace augmentation (no bound
    claimed for either of the latter two).
    """
    l = build_laplacian(g)
    grouped_cfg = replace(oge_cfg, path="grouped")
    z_rep = smooth_aug_matrix(l, oge_cfg).z
    z_grp = smooth_aug_matrix(l, grouped_cfg).z
    z_van = vanilla_aug_matrix(l, van_cfg).z
    rows = []
    for sigma in sigmas:
        l2 = perturb(g, PerturbSpec("noise", sigma=float(sigma), seed=noise_seed))
        rows.append({
            "sigma": float(sigma),
            "dl_fro": fro_norm(l - l2),
            "dz_repeated": float(np.linalg.norm(smooth_aug_matrix(l2, oge_cfg).z - z_rep, "fro")),
            "dz_grouped": float(np.linalg.norm(smooth_aug_matrix(l2, grouped_cfg).z - z_grp, "fro")),
            "dz_vanilla": float(np.linalg.norm(vanilla_aug_matrix(l2, van_cfg).z - z_van, "fro")),
        })
    return rows


def scaling_exponent(g, cfg, sigmas, noise_seed=0):
    """Log-log slope of output shift against Laplacian shift (diagnostic)."""
    l = build_laplacian(g)
    z0 = smooth_aug_matrix(l, cfg).z
    xs, ys, rows = [], [], []
    for sigma in sigmas:
        l2 = perturb(g, PerturbSpec("noise", sigma=float(sigma), seed=noise_seed))
        dl = fro_norm(l - l2)
        dz = float(np.linalg.norm(smooth_aug_matrix(l2, cfg).z - z0, "fro"))
        rows.append({"sigma": float(sigma), "dl_fro": dl, "dz": dz})
        if dl > 0 and dz > 0:
            xs.append(math.log(dl))
            ys.append(math.log(dz))
    if len(xs) < 2:
        raise ValidationError("scaling probe needs at least two non-degenerate sigmas")
    slope = float(np.polyfit(xs, ys, 1)[0])
    return slope, rows


def _sweep_summary(checks):
    ran = [c for c in checks if not c.skipped]
    return {
        "checked": len(ran),
        "skipped": len(checks) - len(ran),
        "violations": sum(1 for c in ran if violates(c)),
        "min_slack": min((c.slack for c in ran), default=None),
    }


def lemma_sweeps(weyl_pairs=500, dk_pairs=200, product_chains=200, n=8, seed=0):
    """Hammer the three matrix inequalities with random inputs.

    Each inequality is a theorem, so the expected violation count is zero
    for any input whatsoever; the sweep exists to catch implementation
    drift, not to test mathematics.  Returns one summary block per
    inequality with counts and the tightest observed slack.
    """
    rng = np.random.default_rng(derive_seed(seed, 53))

    def sym(size, scale=1.0):
        m = rng.normal(0.0, scale, (size, size))
        return (m + m.T) / 2

    weyl = []
    for _ in range(weyl_pairs):
        a = sym(n)
        weyl.append(check_weyl(a, a + sym(n, float(rng.uniform(1e-4, 2.0)))))

    dk = []
    for _ in range(dk_pairs):
        a = sym(n)
        dk.append(check_davis_kahan(a, a + sym(n, float(rng.uniform(1e-4, 0.5)))))

    prod = []
    for _ in range(product_chains):
        length = int(rng.integers(2, 5))
        sizes = [int(rng.integers(2, n + 1)) for _ in range(length + 1)]
        mats = [rng.normal(0.0, 1.0, (sizes[i], sizes[i + 1])) for i in range(length)]
        prod.append(check_product_norm(mats, pivot=int(rng.integers(0, length))))

    return {
        "seed": seed, "n": n,
        "weyl": _sweep_summary(weyl),
        "davis_kahan": _sweep_summary(dk),
        "product_norm": _sweep_summary(prod),
    }


_CSV_COLUMNS = ("graph_id", "seed", "dl_spec", "dl_fro", "z_dist",
                "bound_delta", "bound_opt", "satisfied_delta", "satisfied_opt")


def reports_ndjson(reports):
    from .serialize import canonical_json

    return "".join(canonical_json(r.as_dict()) + "\n" for r in reports)


def reports_csv(reports):
    def cell(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        return repr(v) if isinstance(v, float) else str(v)

    lines = [",".join(_CSV_COLUMNS)]
    for r in reports:
        d = r.as_dict()
        lines.append(",".join(cell(d[c]) for c in _CSV_COLUMNS))
    return "\n".join(lines) + "\n"
