"""Command line front door: augment graphs, run the three studies.

Commands: ``augment`` (graph files or directories in, one ``<stem>.aug.json``
per graph out), ``stability`` (perturbation grid, NDJSON + CSV), ``iso``
(distinguishing study, summary JSON plus exemplar graph dumps), ``lemmas``
(random sweeps of the three matrix inequalities).

Every command is a deterministic function of (inputs, config, seed); output
files are written atomically.  Exit codes: 0 success, 1 validation,
2 capability cap, 3 internal.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import traceback
from dataclasses import replace
from pathlib import Path

from .config import load_config, oge_config, vanilla_config
from .errors import (CapabilityError, EXIT_INTERNAL, EXIT_OK, SpectralAugError,
                     ValidationError)
from .graphs import graph_to_json, parse_graph
from .isomorphism import class_graph, distinguishing_study
from .serialize import canonical_json, write_atomic
from .smooth import smooth_aug
from .stability import lemma_sweeps, reports_csv, reports_ndjson, run_grid
from .vanilla import vanilla_aug

_JOBS_ENV = "SPECTRAL_AUG_JOBS"


class _Parser(argparse.ArgumentParser):
    # usage mistakes are validation errors (exit 1), not argparse's exit 2
    def error(self, message):
        raise ValidationError(message)


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="TOML config file")
    common.add_argument("--seed", type=int, help="global seed (overrides config)")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides config)")
    common.add_argument("--jobs", type=int,
                        help=f"parallel jobs (overrides config and ${_JOBS_ENV})")
    common.add_argument("--strict", action="store_true",
                        help="augment: isolate per-file failures instead of "
                             "aborting the whole batch")
    parser = _Parser(prog="spectral-aug",
                     description="Spectral node augmentations and their checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_aug = sub.add_parser("augment", parents=[common],
                           help="augment graph JSON files")
    p_aug.add_argument("--method", choices=("vanilla", "oge"),
                       help="augmentation method (overrides config)")
    p_aug.add_argument("graphs", nargs="+", metavar="GRAPH",
                       help="graph JSON file or directory of .json files")
    sub.add_parser("stability", parents=[common],
                   help="run the perturbation-bound experiment grid")
    sub.add_parser("iso", parents=[common],
                   help="run the distinguishing study over small graphs")
    sub.add_parser("lemmas", parents=[common],
                   help="sweep the three matrix inequalities on random inputs")
    return parser


def _apply_overrides(cfg, args):
    if args.seed is not None:
        if args.seed < 0:
            raise ValidationError(f"--seed must be >= 0, got {args.seed}")
        cfg = replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, out=args.out)
    jobs = args.jobs
    if jobs is None and _JOBS_ENV in os.environ:
        raw = os.environ[_JOBS_ENV]
        try:
            jobs = int(raw)
        except ValueError:
            raise ValidationError(f"{_JOBS_ENV} must be an integer, got {raw!r}") from None
    if jobs is not None:
        if jobs < 1:
            raise ValidationError(f"jobs must be >= 1, got {jobs}")
        cfg = replace(cfg, jobs=jobs)
    if getattr(args, "method", None) is not None:
        cfg = replace(cfg, augment=replace(cfg.augment, method=args.method))
    return cfg


def _outdir(cfg):
    path = Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _gather_graph_files(paths):
    files = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            entries = sorted(x for x in path.iterdir()
                             if x.suffix == ".json" and not x.name.endswith(".aug.json"))
            if not entries:
                raise ValidationError(f"no graph files in directory {path}")
            files.extend(entries)
        elif path.is_file():
            files.append(path)
        else:
            raise ValidationError(f"input not found: {path}")
    return files


def cmd_augment(cfg, args):
    files = _gather_graph_files(args.graphs)
    method = cfg.augment.method
    acfg = vanilla_config(cfg) if method == "vanilla" else oge_config(cfg)
    run = vanilla_aug if method == "vanilla" else smooth_aug
    written, failures = [], []
    for f in files:
        try:
            aug = run(parse_graph(f.read_text()), acfg)
        except (ValidationError, CapabilityError) as exc:
            failures.append((f, exc))
            continue
        written.append((f.stem + ".aug.json", aug))
    for f, exc in failures:
        print(f"error: {f}: {exc}", file=sys.stderr)
    # default batch semantics: one bad input voids the whole batch
    if failures and not args.strict:
        return failures[0][1].exit_code
    outdir = _outdir(cfg)
    for name, aug in written:
        dest = outdir / name
        write_atomic(dest, aug.to_json())
        print(dest)
    return failures[0][1].exit_code if failures else EXIT_OK


def cmd_stability(cfg, args):
    s = cfg.stability
    if s.experiments < 1 or not s.n_values:
        raise ValidationError("empty experiment grid")
    reports = run_grid(oge_config(cfg), n_values=s.n_values, experiments=s.experiments,
                       flip_count=s.flip_count, p_mode=s.p_mode, probes=s.probes,
                       safety=s.safety, seed=cfg.seed, jobs=cfg.jobs)
    outdir = _outdir(cfg)
    write_atomic(outdir / "stability.ndjson", reports_ndjson(reports))
    write_atomic(outdir / "stability.csv", reports_csv(reports))
    k = len(reports)
    rate_d = sum(r.satisfied_delta for r in reports) / k
    rate_o = sum(r.satisfied_opt for r in reports) / k
    print(f"experiments={k} satisfied_delta={rate_d:.4f} satisfied_opt={rate_o:.4f}")
    return EXIT_OK


_CLASS_ID = re.compile(r"n(\d+)-c(\d+)\Z")


def cmd_iso(cfg, args):
    i = cfg.iso
    study = distinguishing_study(
        i.n_max, i.pipeline, vanilla_cfg=vanilla_config(cfg), oge_cfg=oge_config(cfg),
        seed=cfg.seed, rounds=i.rounds, decimals=i.decimals)
    outdir = _outdir(cfg)
    write_atomic(outdir / "iso.json", canonical_json(study))
    ids = set()
    for block in study["per_n"]:
        ids.update(gid for pair in block["collision_exemplars"] for gid in pair)
        ids.update(block["false_separation_ids"])
    if ids:
        (outdir / "exemplars").mkdir(exist_ok=True)
    for gid in sorted(ids):
        n, idx = map(int, _CLASS_ID.fullmatch(gid).groups())
        write_atomic(outdir / "exemplars" / f"{gid}.json", graph_to_json(class_graph(n, idx)))
    print(f"pipeline={study['pipeline']} n_max={study['n_max']} "
          f"collisions={study['total_collisions']} "
          f"false_separations={study['total_false_separations']}")
    return EXIT_OK


def cmd_lemmas(cfg, args):
    le = cfg.lemmas
    res = lemma_sweeps(weyl_pairs=le.weyl_pairs, dk_pairs=le.dk_pairs,
                       product_chains=le.product_chains, n=le.n, seed=cfg.seed)
    outdir = _outdir(cfg)
    if cfg.format == "csv":
        lines = ["lemma,checked,skipped,violations,min_slack"]
        for name in ("weyl", "davis_kahan", "product_norm"):
            row = res[name]
            slack = "" if row["min_slack"] is None else repr(row["min_slack"])
            lines.append(f"{name},{row['checked']},{row['skipped']},"
                         f"{row['violations']},{slack}")
        write_atomic(outdir / "lemmas.csv", "\n".join(lines) + "\n")
    else:
        write_atomic(outdir / "lemmas.json", canonical_json(res))
    total = sum(res[k]["violations"] for k in ("weyl", "davis_kahan", "product_norm"))
    slacks = [res[k]["min_slack"] for k in ("weyl", "davis_kahan", "product_norm")
              if res[k]["min_slack"] is not None]
    print(f"violations={total} min_slack={min(slacks):.3e}" if slacks
          else f"violations={total}")
    return EXIT_OK


_COMMANDS = {"augment": cmd_augment, "stability": cmd_stability,
             "iso": cmd_iso, "lemmas": cmd_lemmas}


def main(argv=None):
    try:
        args = _build_parser().parse_args(argv)
        cfg = _apply_overrides(load_config(args.config), args)
        return _COMMANDS[args.command](cfg, args)
    except SpectralAugError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
