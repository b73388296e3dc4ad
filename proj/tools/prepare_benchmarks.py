#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Builds the train/test split files under data/benchmarks/.

banana and thyroid come from the KEEL repository copies bundled in the
`keel_ds` wheel on PyPI:

  banana        5300 x 2, two classes (the same point cloud as the classic
                400/4900 benchmark; values already standardized)
  new-thyroid   215 x 5, hyperthyroid (35) vs. the rest (180), z-scored over
                all rows. The KEEL packaging ships the hyperthyroid labeling
                under both of its one-vs-rest file names, so the
                normal-vs-abnormal grouping of the 140/75 benchmark cannot be
                rebuilt from it.
  iris          taken from scikit-learn's bundled copy (the UCI-corrected
                150 x 4 table); the second copy of its one exact duplicate
                row is dropped, leaving 149 rows

Splits are stratified and seeded, so re-running this script reproduces the
committed files byte for byte.
"""

import argparse
import collections
import json
import pathlib
import random
import subprocess
import sys
import tempfile
import zipfile

WHEEL = "keel_ds==0.2.5"


def fetch_wheel(workdir):
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "-q", WHEEL, "-d", workdir],
        check=True,
    )
    return next(pathlib.Path(workdir).glob("keel_ds-*.whl"))


def read_rows(zf, member):
    rows = []
    for line in zf.read(member).decode().splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        rows.append([c.strip() for c in line.split(",")])
    return rows


def standardize(features):
    cols = list(zip(*features))
    stats = []
    for col in cols:
        mean = sum(col) / len(col)
        var = sum((v - mean) ** 2 for v in col) / len(col)
        stats.append((mean, var ** 0.5 if var > 0 else 1.0))
    return [[(v - m) / s for v, (m, s) in zip(row, stats)] for row in features]


def load_banana(zf):
    rows = read_rows(zf, "keel_ds/data/balanced/raw/banana.dat")
    feats = [[float(v) for v in r[:-1]] for r in rows]
    labels = ["pos" if float(r[-1]) > 0 else "neg" for r in rows]
    return feats, labels


def load_thyroid(zf):
    rows = read_rows(zf, "keel_ds/data/imbalanced/raw/new-thyroid1.dat")
    feats = [[float(v) for v in r[:-1]] for r in rows]
    labels = ["hyper" if r[-1] == "positive" else "other" for r in rows]
    return standardize(feats), labels


def load_iris():
    from sklearn.datasets import load_iris as sk_iris

    bunch = sk_iris()
    seen, feats, labels = set(), [], []
    for row, target in zip(bunch.data.tolist(), bunch.target.tolist()):
        key = tuple(row) + (target,)
        if key in seen:
            continue
        seen.add(key)
        feats.append(row)
        labels.append(str(bunch.target_names[target]))
    return feats, labels


def stratified_split(labels, test_count, seed):
    rng = random.Random(seed)
    by_class = collections.defaultdict(list)
    for i, lab in enumerate(labels):
        by_class[lab].append(i)
    n = len(labels)
    test = []
    for lab in sorted(by_class):
        idx = by_class[lab][:]
        rng.shuffle(idx)
        take = round(len(idx) * test_count / n)
        test.extend(idx[:take])
    test_set = set(test)
    train = [i for i in range(n) if i not in test_set]
    return train, sorted(test_set)


def write_csv(path, feats, labels, rows):
    width = len(feats[0])
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join([f"x{j + 1}" for j in range(width)] + ["label"]) + "\n")
        for i in rows:
            fh.write(",".join(repr(v) for v in feats[i]) + "," + labels[i] + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--wheel", help="path to a downloaded keel_ds wheel")
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "benchmarks"))
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        wheel = pathlib.Path(args.wheel) if args.wheel else fetch_wheel(tmp)
        with zipfile.ZipFile(wheel) as zf:
            sets = {
                "banana": (load_banana(zf), 4900, 5),
                "thyroid": (load_thyroid(zf), 75, 10),
                "iris": (load_iris(), 45, 5),
            }

    out = pathlib.Path(args.out)
    manifests = {}
    for name, ((feats, labels), test_count, n_splits) in sets.items():
        target = out / name
        target.mkdir(parents=True, exist_ok=True)
        splits = []
        for s in range(n_splits):
            train, test = stratified_split(labels, test_count, seed=1000 * (s + 1) + len(name))
            tr = f"{name}_train_{s + 1:02d}.csv"
            te = f"{name}_test_{s + 1:02d}.csv"
            write_csv(target / tr, feats, labels, train)
            write_csv(target / te, feats, labels, test)
            splits.append({"train": f"{name}/{tr}", "test": f"{name}/{te}"})
        manifests[name] = splits
        counts = collections.Counter(labels)
        print(f"{name}: n={len(labels)} d={len(feats[0])} classes={dict(counts)} splits={n_splits}")

    for name, splits in manifests.items():
        doc = {"datasets": [{"name": name, "splits": splits}]}
        (out / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")
    doc = {"datasets": [{"name": k, "splits": v} for k, v in manifests.items()]}
    (out / "manifest.json").write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
