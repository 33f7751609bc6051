#!/usr/bin/env python3
"""Standalone oracle for the toy entity-matching set.

Applies the Jaccard rule directly to the CSV files, with no dependency on
the C++ implementation: serialize each entry over (name, manufacturer,
price), lowercase, tokenize on non-alphanumeric characters, and predict a
match iff the Jaccard similarity of the token sets is >= the threshold.

Prints the confusion counts and F1 so they can be frozen into the
acceptance suite.
"""

import csv
import re
import sys
from pathlib import Path

THRESHOLD = 0.5
ATTRS = ["name", "manufacturer", "price"]


def load(path):
    with open(path, newline="", encoding="utf-8") as f:
        return {row["id"]: row for row in csv.DictReader(f)}


def serialize(row):
    return ". ".join(f"{a}: {row.get(a) or ''}" for a in ATTRS)


def tokens(text):
    return set(t for t in re.split(r"[^0-9a-z]+", text.lower()) if t)


def jaccard(a, b):
    if not a and not b:
        return 1.0
    union = a | b
    return len(a & b) / len(union)


def main():
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[2]
    d = root / "data" / "toy_em"
    left = load(d / "products_a.csv")
    right = load(d / "products_b.csv")

    tp = fp = fn = tn = 0
    with open(d / "pairs.csv", newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            sim = jaccard(tokens(serialize(left[row["ltable_id"]])),
                          tokens(serialize(right[row["rtable_id"]])))
            pred = sim >= THRESHOLD
            gold = row["label"] == "1"
            if pred and gold:
                tp += 1
            elif pred and not gold:
                fp += 1
            elif not pred and gold:
                fn += 1
            else:
                tn += 1

    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    print(f"tp={tp} fp={fp} fn={fn} tn={tn}")
    print(f"f1={f1!r}")


if __name__ == "__main__":
    main()
