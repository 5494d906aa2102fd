#!/usr/bin/env python3
"""Optional full-scale run: 311030 records at 70/15/15, default training.

Draws a stratified 311030-record sample of the public KDD99 10% file (by
label, so the class mix is preserved), then runs the standard pipeline:
prep -> train -> eval -> quantize -> compare. Expected test-partition
success rate lands around 0.93-0.97. This is a long-running check, not a
CI gate; budget tens of minutes.

Usage:
    python scripts/full_scale_run.py --data /path/to/kddcup.data_10_percent \
        --out runs/full_scale [--seed 42]
"""

import argparse
import collections
import os
import sys

import numpy as np

from idpskit.cli import main as idpskit_main
from idpskit.ingest import iter_lines

TARGET_RECORDS = 311030


def stratified_line_sample(path, n, seed):
    """Pick n line numbers preserving the label mix, then re-read in order."""
    labels = []
    for _, line in iter_lines(path):
        labels.append(line.rsplit(",", 1)[-1])
    total = len(labels)
    if total < n:
        raise SystemExit(f"{path} has {total} records, need at least {n}")
    counts = collections.Counter(labels)
    rng = np.random.default_rng(seed)
    exact = {lbl: c * n / total for lbl, c in counts.items()}
    take = {lbl: int(v) for lbl, v in exact.items()}
    short = n - sum(take.values())
    for lbl, _ in sorted(exact.items(),
                         key=lambda kv: kv[1] - int(kv[1]), reverse=True)[:short]:
        take[lbl] += 1
    by_label = collections.defaultdict(list)
    for i, lbl in enumerate(labels):
        by_label[lbl].append(i)
    chosen = []
    for lbl, idxs in by_label.items():
        k = min(take.get(lbl, 0), len(idxs))
        chosen.extend(rng.choice(idxs, size=k, replace=False))
    return set(int(i) for i in chosen)


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", required=True,
                    help="public KDD99 10%% file (plain or .gz)")
    ap.add_argument("--out", required=True)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args(argv)

    os.makedirs(args.out, exist_ok=True)
    sample_path = os.path.join(args.out, "sample_311030.txt")
    print(f"sampling {TARGET_RECORDS} records from {args.data} ...")
    chosen = stratified_line_sample(args.data, TARGET_RECORDS, args.seed)
    with open(sample_path, "w", encoding="utf-8") as fh:
        for i, (_, line) in enumerate(iter_lines(args.data)):
            if i in chosen:
                fh.write(line + "\n")

    prep_dir = os.path.join(args.out, "prep")
    model = os.path.join(args.out, "model.txt")
    steps = [
        ["prep", "--data", sample_path, "--out", prep_dir,
         "--split", "0.70,0.15,0.15", "--seed", str(args.seed)],
        ["train", "--data", prep_dir, "--model", model,
         "--out", os.path.join(args.out, "train"), "--seed", str(args.seed)],
        ["eval", "--data", prep_dir, "--model", model,
         "--out", os.path.join(args.out, "eval")],
        ["quantize", "--model", model,
         "--out", os.path.join(args.out, "quantize")],
        ["compare", "--data", prep_dir, "--model", model,
         "--qmodel", os.path.join(args.out, "quantize", "qmodel.txt"),
         "--out", os.path.join(args.out, "compare")],
    ]
    for step in steps:
        print(f"\n== idpskit {' '.join(step[:1])} ==")
        rc = idpskit_main(step)
        if rc != 0:
            return rc

    with open(os.path.join(args.out, "eval", "summary.csv")) as fh:
        for row in fh.read().splitlines()[1:]:
            parts = row.split(",")
            if parts[0] == "test":
                success = float(parts[2])
                print(f"\ntest success rate: {success:.4f} "
                      f"(expected band 0.93-0.97)")
    return 0


if __name__ == "__main__":
    sys.exit(run())
