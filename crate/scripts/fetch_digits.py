#!/usr/bin/env python3
"""Export the UCI optical-recognition handwritten digits set (8x8, 1797 items)
to CSV.

The data ships with scikit-learn (sklearn.datasets.load_digits), which is the
copy of the UCI "Optical Recognition of Handwritten Digits" test split:
https://archive.ics.uci.edu/dataset/80/optical+recognition+of+handwritten+digits

Writes:
  data/digits.csv       all 1797 rows, columns pixel_0..pixel_63,class
  data/digits_200.csv   first 200 rows (small fixture)
"""
import csv
import os
import sys

from sklearn.datasets import load_digits


def write(path, X, y):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow([f"pixel_{i}" for i in range(X.shape[1])] + ["class"])
        for row, label in zip(X, y):
            w.writerow([int(v) for v in row] + [int(label)])


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "data")
    os.makedirs(out_dir, exist_ok=True)
    X, y = load_digits(return_X_y=True)
    write(os.path.join(out_dir, "digits.csv"), X, y)
    write(os.path.join(out_dir, "digits_200.csv"), X[:200], y[:200])
    print(f"wrote {X.shape[0]} rows x {X.shape[1]} features to {out_dir}")


if __name__ == "__main__":
    main()
