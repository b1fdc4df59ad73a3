"""Acceptance gate: the package's headline claims, one verdict line each.

Every test prints a single [PASS]/[FAIL] line on the real stdout (bypassing
capture) with the measured numbers and the budget it was held to, then
asserts.  Criterion 6's n = 7 leg is expensive and report-only, so it runs
only when SPECTRAL_AUG_ACCEPT_N7=1; criterion 9 needs the optional bindings
package and skips cleanly when it is absent.
"""

import json
import math
import os
import sys
import time
from dataclasses import replace

import numpy as np
import pytest

from spectral_aug.cli import main
from spectral_aug.config import RunConfig, oge_config, vanilla_config
from spectral_aug.graphs import (Permutation, apply_permutation,
                                 build_laplacian, graph_to_json)
from spectral_aug.isomorphism import distinguishing_study
from spectral_aug.linalg import (Spectrum, default_group_tau, eig_sym,
                                 group_eigenspaces)
from spectral_aug.smooth import smooth_aug, smooth_aug_from_spectrum, smooth_aug_matrix
from spectral_aug.stability import (degeneracy_contrast, lemma_sweeps,
                                    random_connected_graph, run_grid)
from spectral_aug.vanilla import (universal_readout, vanilla_aug,
                                  vanilla_aug_from_spectrum)
from spectral_aug.wl import plain_fingerprint

from helpers import complete, cycle, random_orthogonal, star, two_triangles


def _verdict(cap, ok, num, name, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num} ({name}): {detail}"
    with cap.disabled():
        print(line, flush=True)
    return ok, line


def _info(cap, text):
    with cap.disabled():
        print(f"[INFO] {text}", flush=True)


_DEFAULTS = RunConfig()


def test_criterion_1_relabeling_equivariance(capfd):
    budget = 60.0
    t0 = time.perf_counter()
    van, oge = vanilla_config(_DEFAULTS), oge_config(_DEFAULTS)
    rng = np.random.default_rng(12345)
    worst = 0.0
    for k in range(50):
        n = 4 + k % 7
        g = random_connected_graph(n, 1000 + k)
        zv = vanilla_aug(g, van).z
        zo = smooth_aug(g, oge).z
        for _ in range(10):
            perm = Permutation(tuple(int(x) for x in rng.permutation(n)))
            g2 = apply_permutation(g, perm)
            pm = perm.matrix()
            worst = max(worst,
                        float(np.abs(vanilla_aug(g2, van).z - pm @ zv).max()),
                        float(np.abs(smooth_aug(g2, oge).z - pm @ zo).max()))
    dt = time.perf_counter() - t0
    ok, line = _verdict(
        capfd,
        worst <= 1e-6 and dt < budget, 1, "relabeling equivariance",
        f"max row-aligned error {worst:.3e} <= 1e-06 over 50 graphs x 10 "
        f"relabelings, both methods ({dt:.1f}s < {budget:.0f}s)")
    assert ok, line


def test_criterion_2_eigenbasis_invariance(capfd):
    budget = 30.0
    t0 = time.perf_counter()
    van, oge = vanilla_config(_DEFAULTS), oge_config(_DEFAULTS)
    rng = np.random.default_rng(77)
    worst = 0.0
    rotations = 0
    for g in [cycle(4), cycle(6), complete(4), star(5)]:
        s = eig_sym(build_laplacian(g))
        gs = group_eigenspaces(s, default_group_tau(s))
        zv = vanilla_aug_from_spectrum(s, van).z
        zo = smooth_aug_from_spectrum(s, oge).z
        col = 0
        for j in range(gs.k):
            m = gs.multiplicities[j]
            for _ in range(20):
                q = random_orthogonal(m, rng)
                v = s.vectors.copy()
                v[:, col : col + m] = v[:, col : col + m] @ q
                s2 = Spectrum(s.eigenvalues, v)
                worst = max(worst,
                            float(np.abs(vanilla_aug_from_spectrum(s2, van).z - zv).max()),
                            float(np.abs(smooth_aug_from_spectrum(s2, oge).z - zo).max()))
                rotations += 1
            col += m
    dt = time.perf_counter() - t0
    ok, line = _verdict(
        capfd,
        worst <= 1e-7 and dt < budget, 2, "eigenbasis invariance",
        f"max output change {worst:.3e} <= 1e-07 over {rotations} orthogonal "
        f"rotations on C4/C6/K4/S5 eigenspaces, both methods ({dt:.1f}s < {budget:.0f}s)")
    assert ok, line


def test_criterion_3_stability_bound_gate(capfd):
    budget = 600.0
    t0 = time.perf_counter()
    s = _DEFAULTS.stability
    reports = run_grid(oge_config(_DEFAULTS), n_values=s.n_values,
                       experiments=s.experiments, flip_count=s.flip_count,
                       p_mode=s.p_mode, probes=s.probes, safety=s.safety,
                       seed=_DEFAULTS.seed, jobs=4)
    rate = sum(r.satisfied_delta for r in reports) / len(reports)
    undiagnosed = [r.graph_id for r in reports
                   if not r.satisfied_delta and r.diagnosis is None]
    dt = time.perf_counter() - t0
    ok, line = _verdict(
        capfd,
        rate >= 0.99 and not undiagnosed and dt < budget, 3, "stability bound gate",
        f"configured-width bound satisfied in {rate:.2%} of {len(reports)} "
        f"edge-flip experiments (>= 99%), every miss diagnosed "
        f"({len(undiagnosed)} undiagnosed) ({dt:.1f}s < {budget:.0f}s)")
    assert ok, line


def test_criterion_4_lemma_sweeps(capfd):
    budget = 120.0
    t0 = time.perf_counter()
    le = _DEFAULTS.lemmas
    res = lemma_sweeps(weyl_pairs=le.weyl_pairs, dk_pairs=le.dk_pairs,
                       product_chains=le.product_chains, n=le.n, seed=_DEFAULTS.seed)
    names = ("weyl", "davis_kahan", "product_norm")
    violations = sum(res[k]["violations"] for k in names)
    min_slack = min(res[k]["min_slack"] for k in names if res[k]["min_slack"] is not None)
    dt = time.perf_counter() - t0
    ok, line = _verdict(
        capfd,
        violations == 0 and min_slack > -1e-8 and dt < budget, 4, "lemma sweeps",
        f"{violations} violations over "
        f"{'/'.join(str(res[k]['checked']) for k in names)} checks, "
        f"min slack {min_slack:.3e} > -1e-08 ({dt:.1f}s < {budget:.0f}s)")
    assert ok, line


def test_criterion_5_smooth_vs_hard_contrast(capfd):
    budget = 60.0
    t0 = time.perf_counter()
    sigmas = [1e-2, 1e-3, 1e-4, 1e-5]
    rows = degeneracy_contrast(cycle(6), sigmas, oge_config(_DEFAULTS),
                               vanilla_config(_DEFAULTS))
    rep = [r["dz_repeated"] for r in rows]
    decreasing = all(rep[k + 1] <= 1.05 * rep[k] for k in range(len(rep) - 1))
    van_jump = max(r["dz_vanilla"] for r in rows)
    grp_jump = max(r["dz_grouped"] for r in rows)
    dt = time.perf_counter() - t0
    ok, line = _verdict(
        capfd,
        decreasing and dt < budget, 5, "smooth vs hard contrast",
        f"repeated-path shift on C6 decreases with sigma "
        f"({', '.join(f'{x:.2e}' for x in rep)}; each <= 1.05x predecessor); "
        f"reported jumps: grouped {grp_jump:.2e}, per-eigenspace {van_jump:.2e} "
        f"(no bound asserted) ({dt:.1f}s < {budget:.0f}s)")
    assert ok, line


def test_criterion_6_distinguishing_study(capfd):
    budget = 300.0
    t0 = time.perf_counter()
    van = distinguishing_study(6, "vanilla", vanilla_cfg=vanilla_config(_DEFAULTS),
                               oge_cfg=oge_config(_DEFAULTS))
    base = distinguishing_study(6, "baseline-wl")
    g1, g2 = cycle(6), two_triangles()
    baseline_collides = plain_fingerprint(g1) == plain_fingerprint(g2)
    cfg = vanilla_config(_DEFAULTS)
    pipeline_separates = (universal_readout(g1, vanilla_aug(g1, cfg)).digest
                          != universal_readout(g2, vanilla_aug(g2, cfg)).digest)
    dt = time.perf_counter() - t0
    ok, line = _verdict(
        capfd,
        van["total_false_separations"] == 0
        and van["total_collisions"] <= base["total_collisions"]
        and baseline_collides and pipeline_separates and dt < budget,
        6, "distinguishing study",
        f"n <= 6: per-eigenspace pipeline false separations "
        f"{van['total_false_separations']} (= 0), collisions "
        f"{van['total_collisions']} <= baseline {base['total_collisions']}; "
        f"C6 vs 2xC3 collides under baseline ({baseline_collides}) and "
        f"separates under the pipeline ({pipeline_separates}) "
        f"({dt:.1f}s < {budget:.0f}s)")
    assert ok, line


def test_criterion_6_n7_report_only(capfd):
    if os.environ.get("SPECTRAL_AUG_ACCEPT_N7") != "1":
        _info(capfd, "criterion 6 n=7 report: skipped (set SPECTRAL_AUG_ACCEPT_N7=1 "
              "to enumerate the 853 classes; several minutes)")
        pytest.skip("n=7 leg is opt-in")
    t0 = time.perf_counter()
    van = distinguishing_study(7, "vanilla", vanilla_cfg=vanilla_config(_DEFAULTS),
                               oge_cfg=oge_config(_DEFAULTS))
    n7 = van["per_n"][6]
    _info(capfd, f"criterion 6 n=7 report (non-gating): classes={n7['classes']} "
          f"collisions={n7['collisions']} false_separations={n7['false_separations']} "
          f"({time.perf_counter() - t0:.1f}s)")


def test_criterion_7_path_equivalence(capfd):
    budget = 60.0
    t0 = time.perf_counter()
    cfg = oge_config(_DEFAULTS)
    delta = cfg.smoothing.delta
    accepted = 0
    tried = 0
    worst = 0.0
    while accepted < 50 and tried < 600:
        g = random_connected_graph(4 + tried % 5, 5000 + tried)
        tried += 1
        l = build_laplacian(g)
        s = eig_sym(l)
        tau = default_group_tau(s)
        gs = group_eigenspaces(s, tau)
        if gs.k < 2 or np.diff(gs.values).min() <= max(10.0 * tau, delta):
            continue  # criterion applies to graphs whose gaps clear the support
        accepted += 1
        a = smooth_aug_matrix(l, replace(cfg, path="repeated")).z
        b = smooth_aug_matrix(l, replace(cfg, path="grouped")).z
        worst = max(worst, float(np.abs(a - b).max()))
    dt = time.perf_counter() - t0
    ok, line = _verdict(
        capfd,
        accepted == 50 and worst <= 1e-7 and dt < budget, 7, "path equivalence",
        f"grouped vs repeated max difference {worst:.3e} <= 1e-07 on "
        f"{accepted} graphs with gaps > max(10*tau, delta) "
        f"({tried} candidates scanned) ({dt:.1f}s < {budget:.0f}s)")
    assert ok, line


_DET_CONFIG = """
seed = 3

[augment]
encoder_width = 8
encoder_depth = 2
encoder_out = 3
set_m = 4
set_d_out = 2
set_hidden = 8
g_latent = 4

[stability]
experiments = 6
n_values = [4, 5]
probes = 8

[iso]
n_max = 4

[lemmas]
weyl_pairs = 20
dk_pairs = 10
product_chains = 10
n = 5
"""


def test_criterion_8_cli_determinism(tmp_path, capsys):
    budget = 120.0
    t0 = time.perf_counter()
    cfg = tmp_path / "cfg.toml"
    cfg.write_text(_DET_CONFIG)
    gdir = tmp_path / "graphs"
    gdir.mkdir()
    for name, g in [("c4", cycle(4)), ("s5", star(5)), ("k4", complete(4))]:
        (gdir / f"{name}.json").write_text(graph_to_json(g))

    def run_all(out):
        stdouts = {}
        for cmd, extra in [("augment", [str(gdir)]), ("stability", []),
                           ("iso", []), ("lemmas", [])]:
            rc = main([cmd, "--config", str(cfg), "--out", str(out / cmd)] + extra)
            assert rc == 0
            text = capsys.readouterr().out
            if cmd == "augment":
                text = "\n".join(os.path.basename(x) for x in text.splitlines())
            stdouts[cmd] = text
        artifacts = {}
        for f in sorted(out.rglob("*")):
            if f.is_file():
                artifacts[str(f.relative_to(out))] = f.read_bytes()
        return stdouts, artifacts

    got1 = run_all(tmp_path / "run1")
    got2 = run_all(tmp_path / "run2")
    identical = got1 == got2
    dt = time.perf_counter() - t0
    ok, line = _verdict(
        capsys,
        identical and dt < budget, 8, "CLI determinism",
        f"two runs, all four commands: {len(got1[1])} artifacts plus verdict "
        f"lines byte-identical ({dt:.1f}s < {budget:.0f}s)")
    assert ok, line


def test_criterion_9_binding_fidelity(tmp_path, capsys):
    bindings = pytest.importorskip(
        "spectral_aug_bindings", reason="secondary bindings package not installed")
    budget = 120.0
    t0 = time.perf_counter()
    cfg_toml = tmp_path / "cfg.toml"
    cfg_toml.write_text(_DET_CONFIG)
    config_json = json.dumps({
        "seed": 3,
        "augment": {"encoder_width": 8, "encoder_depth": 2, "encoder_out": 3,
                    "set_m": 4, "set_d_out": 2, "set_hidden": 8, "g_latent": 4},
    })
    gdir = tmp_path / "graphs"
    gdir.mkdir()
    texts = {}
    for k in range(50):
        g = random_connected_graph(4 + k % 6, 9000 + k)
        texts[f"g{k:02d}"] = graph_to_json(g)
        (gdir / f"g{k:02d}.json").write_text(texts[f"g{k:02d}"])
    out = tmp_path / "out"
    assert main(["augment", "--config", str(cfg_toml), "--out", str(out), str(gdir)]) == 0
    capsys.readouterr()
    mismatches = 0
    for stem, gtext in texts.items():
        from_cli = (out / f"{stem}.aug.json").read_text()
        from_binding = json.dumps(bindings.augment(gtext, config_json),
                                  sort_keys=True, separators=(",", ":"))
        if from_binding != from_cli:
            mismatches += 1
    dt = time.perf_counter() - t0
    ok, line = _verdict(
        capsys,
        mismatches == 0 and dt < budget, 9, "binding fidelity",
        f"binding output equals CLI artifact byte-for-byte on 50 graphs "
        f"({mismatches} mismatches) ({dt:.1f}s < {budget:.0f}s)")
    assert ok, line
