#!/usr/bin/env python3
"""Convert the public UCI distributions of ISOLET and UCIHAR into the
canonical CSV layout read by `cosime hdc` (header row, one sample per row,
0-based integer label in the last column).

ISOLET:  isolet1+2+3+4.data and isolet5.data (comma separated, label 1..26
         in the last column).
UCIHAR:  the "Smartphone-Based Recognition of Human Activities and Postural
         Transitions" archive: Train/X_train.txt, Train/y_train.txt,
         Test/X_test.txt, Test/y_test.txt (whitespace separated, labels 1..12).

Example:
    python3 scripts/prepare_uci.py isolet --src ~/Downloads/isolet --out data/uci
    cosime hdc eval -c config/hdc.json \
        --dataset data/uci/isolet_train.csv --test data/uci/isolet_test.csv
"""
import argparse
import pathlib
import sys

import numpy as np


def write_csv(path: pathlib.Path, x: np.ndarray, y: np.ndarray) -> None:
    header = ",".join([f"f{i}" for i in range(x.shape[1])] + ["label"])
    data = np.column_stack([x, y.astype(np.int64)])
    fmt = ["%.9g"] * x.shape[1] + ["%d"]
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt=fmt)


def load_isolet(src: pathlib.Path):
    def one(name):
        raw = np.loadtxt(src / name, delimiter=",")
        return raw[:, :-1], raw[:, -1].astype(np.int64) - 1
    return one("isolet1+2+3+4.data"), one("isolet5.data")


def load_ucihar(src: pathlib.Path):
    def one(split):
        x = np.loadtxt(src / split.capitalize() / f"X_{split}.txt")
        y = np.loadtxt(src / split.capitalize() / f"y_{split}.txt").astype(np.int64) - 1
        return x, y
    return one("train"), one("test")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("dataset", choices=["isolet", "ucihar"])
    ap.add_argument("--src", required=True, type=pathlib.Path, help="directory with the raw files")
    ap.add_argument("--out", required=True, type=pathlib.Path, help="output directory")
    args = ap.parse_args()

    loader = load_isolet if args.dataset == "isolet" else load_ucihar
    try:
        (xtr, ytr), (xte, yte) = loader(args.src)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if xtr.shape[1] != xte.shape[1]:
        print("error: train and test feature counts differ", file=sys.stderr)
        return 2
    if ytr.min() < 0 or yte.min() < 0:
        print("error: labels must start at 1 in the raw files", file=sys.stderr)
        return 2

    args.out.mkdir(parents=True, exist_ok=True)
    write_csv(args.out / f"{args.dataset}_train.csv", xtr, ytr)
    write_csv(args.out / f"{args.dataset}_test.csv", xte, yte)
    print(f"{args.dataset}: {xtr.shape[0]} train / {xte.shape[0]} test, "
          f"{xtr.shape[1]} features, {int(max(ytr.max(), yte.max())) + 1} classes")
    return 0


if __name__ == "__main__":
    sys.exit(main())
