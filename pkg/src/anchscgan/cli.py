"""Command-line entry point: ``anchscgan <command> [options]``.

Commands: oversample, benchmark, anchors, filter, dirac-demo.
Exit codes: 0 ok, 1 other failure, 2 usage, 3 data, 4 I/O, 5 divergence, 6 model file.
"""

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import config as cfgmod
from .anchors import anchor_table
from .baselines import OversamplerConfig
from .data import load_csv, write_csv
from .dirac import simulate_trajectory, write_trajectory
from .errors import AnchError
from .evaluation import benchmark
from .model_io import save_model
from .pipeline import oversample_anchscgan, prepare

EXIT_OK, EXIT_OTHER, EXIT_USAGE, EXIT_IO = 0, 1, 2, 4


def _common(p):
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="root random seed")
    p.add_argument("--config", default=None, help="flat key=value config file")
    p.add_argument("--out", required=True, help="primary output path")
    p.add_argument("-v", "--verbose", action="store_true")


def _data_args(p):
    p.add_argument("--input", required=True, help="input CSV")
    p.add_argument("--label-column", required=True)
    p.add_argument("--minority-value", required=True)


def _pipeline_args(p):
    S = argparse.SUPPRESS
    p.add_argument("--k", type=int, default=S)
    p.add_argument("--noise-removal", dest="noise_removal", type=cfgmod.parse_noise_removal,
                   default=S, metavar="auto|on|off")
    p.add_argument("--prior-epochs", type=int, default=S)
    p.add_argument("--prior-lr", type=float, default=S)
    p.add_argument("--no-filter-safeguard", dest="filter_safeguard", action="store_false", default=S)


def _gan_args(p):
    S = argparse.SUPPRESS
    p.add_argument("--noise-dim", type=int, default=S)
    p.add_argument("--epochs-main", type=int, default=S)
    p.add_argument("--epochs-finetune", type=int, default=S)
    p.add_argument("--no-finetune", dest="epochs_finetune", action="store_const", const=0, default=S)
    p.add_argument("--batches-per-epoch", type=int, default=S)
    p.add_argument("--batch-size", type=int, default=S)
    p.add_argument("--lr-main", type=float, default=S)
    p.add_argument("--lr-finetune", type=float, default=S)
    p.add_argument("--lambda1", type=float, default=S)
    p.add_argument("--lambda2", type=float, default=S)
    p.add_argument("--clusters", type=int, default=S)
    p.add_argument("--score", dest="use_score_stabilization", action="store_true", default=S)
    p.add_argument("--no-score", dest="use_score_stabilization", action="store_false", default=S)
    p.add_argument("--nonsaturating", dest="nonsaturating_generator", action="store_true", default=S)
    p.add_argument("--hidden", type=cfgmod.parse_ints, default=S, help="e.g. 512,128,32")
    p.add_argument("--positive-candidates", type=int, default=S)


def build_parser():
    parser = argparse.ArgumentParser(prog="anchscgan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oversample", help="balance a CSV with Anch-SCGAN")
    _common(p)
    _data_args(p)
    _pipeline_args(p)
    _gan_args(p)
    p.add_argument("--model", default=None, help="model file to write")
    p.add_argument("--manifest", default=None, help="write the run manifest JSON here")
    p.set_defaults(func=cmd_oversample)

    p = sub.add_parser("benchmark", help="compare oversamplers with an SVM")
    _common(p)
    p.add_argument("--datasets", required=True,
                   help="manifest CSV with columns name,path,label_column,minority_value")
    p.add_argument("--methods", type=cfgmod.parse_list, default=argparse.SUPPRESS)
    p.add_argument("--repeats", type=int, default=argparse.SUPPRESS)
    p.add_argument("--test-fraction", type=float, default=argparse.SUPPRESS)
    p.add_argument("--seeds", type=cfgmod.parse_ints, default=argparse.SUPPRESS)
    p.add_argument("--k-neighbors", type=int, default=argparse.SUPPRESS)
    p.add_argument("--borderline-m", type=int, default=argparse.SUPPRESS)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--roc-auc", action="store_true", help="also report rank-based ROC AUC")
    _pipeline_args(p)
    _gan_args(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("anchors", help="emit the anchor selection as CSV")
    _common(p)
    _data_args(p)
    _pipeline_args(p)
    p.set_defaults(func=cmd_anchors)

    p = sub.add_parser("filter", help="emit prior-filtered training rows and anchors")
    _common(p)
    _data_args(p)
    _pipeline_args(p)
    p.add_argument("--anchors-out", default=None, help="cleaned anchors CSV (default <out>.anchors.csv)")
    p.add_argument("--clusters", type=int, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("dirac-demo", help="simulate the Dirac-GAN toy dynamics")
    _common(p)
    p.add_argument("--init", type=_pair, default=(1.0, 1.0), help="psi,theta")
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--steps", type=int, default=10000)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--score", dest="use_score", action="store_true", default=False)
    g.add_argument("--no-score", dest="use_score", action="store_false")
    p.add_argument("--differentiate-score", action="store_true",
                   help="also back-propagate through the score coefficient")
    p.set_defaults(func=cmd_dirac_demo)
    return parser


def _values(args):
    given = {k: v for k, v in vars(args).items() if k in cfgmod.OPTIONS}
    return cfgmod.resolve(given, args.config)


def _pair(text):
    v = cfgmod.parse_floats(text)
    if len(v) != 2:
        raise argparse.ArgumentTypeError("expected psi,theta")
    return v


def _load(args):
    return load_csv(args.input, args.label_column, args.minority_value)


def _jsonable(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, tuple):
        return list(obj)
    return str(obj)


def _print_manifest(manifest, path=None):
    text = json.dumps(manifest, indent=1, sort_keys=True, default=_jsonable)
    print(text)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def cmd_oversample(args):
    out = args.out
    values = _values(args)
    data = _load(args)
    pcfg = cfgmod.pipeline_config(values)
    balanced, res = oversample_anchscgan(data, pcfg)
    write_csv(balanced, out)
    if args.model:
        save_model(res.model, args.model)
    manifest = {"command": "oversample", "input": args.input, "output": out, "model": args.model,
                "config": values, "counts": res.manifest,
                "output_rows": balanced.n, "output_minority": balanced.n_minority,
                "output_majority": balanced.n_majority}
    _print_manifest(manifest, args.manifest)
    return EXIT_OK


def _read_dataset_manifest(path):
    base = os.path.dirname(os.path.abspath(path))
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            p = rec["path"]
            if not os.path.isabs(p):
                p = os.path.join(base, p)
            out.append((rec["name"], load_csv(p, rec["label_column"], rec["minority_value"])))
    if not out:
        raise AnchError(f"{path}: no datasets listed")
    return out


def cmd_benchmark(args):
    out = args.out
    values = _values(args)
    datasets = _read_dataset_manifest(args.datasets)
    report = benchmark(
        datasets, values["methods"], repeats=values["repeats"], test_fraction=values["test_fraction"],
        seeds=values["seeds"] or [values["seed"] + r for r in range(values["repeats"])],
        anchscgan_config=cfgmod.pipeline_config(values),
        baseline_config=OversamplerConfig(values["k_neighbors"], values["borderline_m"], values["seed"]),
        n_jobs=args.jobs, with_roc_auc=args.roc_auc,
    )
    report.write(out)
    failed = [c for c in report.cells if c.error]
    for c in failed:
        print(f"cell failed: {c.dataset}/{c.method}/{c.repeat}: {c.error}", file=sys.stderr)
    print(json.dumps({"cells": len(report.cells), "failed": len(failed), "friedman": report.friedman},
                     indent=1, sort_keys=True, default=_jsonable))
    return EXIT_OK


def cmd_anchors(args):
    out = args.out
    values = _values(args)
    data = _load(args)
    pcfg = cfgmod.pipeline_config(values)
    from .anchors import default_noise_removal, select_anchors
    from .data import apply_scaler, fit_scaler
    from .pipeline import stage_seed
    norm = data.with_features(apply_scaler(fit_scaler(data), data.features))
    nr = pcfg.noise_removal if pcfg.noise_removal is not None else bool(default_noise_removal(norm.labels))
    anchors, _ = select_anchors(norm, pcfg.k, nr, stage_seed(pcfg.seed, "anchors"))
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row_index", "class", "is_anchor", "is_noise", "is_overlap_discard"])
        w.writerows(anchor_table(norm, anchors))
    _print_manifest({"command": "anchors", "k": pcfg.k, "noise_removal": nr,
                     "anchors_minority": len(anchors.minority_indices),
                     "anchors_majority": len(anchors.majority_indices),
                     "k_used_minority": anchors.k_used_minority,
                     "k_used_majority": anchors.k_used_majority,
                     "exhausted": anchors.exhausted,
                     "noise": len(anchors.discarded_noise), "overlap": len(anchors.overlap_discard)})
    return EXIT_OK


def cmd_filter(args):
    out = args.out
    values = _values(args)
    data = _load(args)
    pcfg = cfgmod.pipeline_config(values)
    parts = prepare(data, pcfg)
    anchors_out = args.anchors_out or os.path.splitext(out)[0] + ".anchors.csv"
    # emit rows in original units, selected by provenance
    pos = {int(r): i for i, r in enumerate(data.row_ids)}
    clean = data.subset([pos[int(r)] for r in parts["clean"].row_ids])
    anch = data.subset([pos[int(r)] for r in parts["anchors_clean"].row_ids])
    write_csv(clean, out)
    write_csv(anch, anchors_out)
    _print_manifest({"command": "filter", "input_rows": data.n, "pruned_rows": parts["pruned"].n,
                     "clean_rows": clean.n, "anchor_rows": parts["anchor_data"].n,
                     "anchors_clean_rows": anch.n, "clean_output": out, "anchors_output": anchors_out})
    return EXIT_OK


def cmd_dirac_demo(args):
    out = args.out
    traj = simulate_trajectory(args.init, args.lr, args.steps, args.use_score, args.differentiate_score)
    write_trajectory(traj, out)
    r0 = float(np.hypot(*traj[0]))
    r1 = float(np.hypot(*traj[-1]))
    _print_manifest({"command": "dirac-demo", "init": list(args.init), "lr": args.lr, "steps": args.steps,
                     "score": args.use_score, "differentiate_score": args.differentiate_score,
                     "initial_distance": r0, "final_distance": r1})
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except AnchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
