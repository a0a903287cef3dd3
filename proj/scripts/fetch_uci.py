#!/usr/bin/env python3
# Apache License, Version 2.0, refer to LICENSE.txt
#
# Downloads the five UCI benchmark datasets used by `pmgp bench` and converts
# them into the header-row CSV layout the loader expects (feature columns
# plus a `label` column holding the raw class value). Tests and the library
# never fetch anything themselves; run this once and point --data at the
# files it writes.
#
#   python3 scripts/fetch_uci.py [--out data/]
#
# Datasets and their bench invocations:
#   glass.csv     n=214  d=9   pmgp bench --data data/glass.csv --glass
#   thyroid.csv   n=215  d=5   pmgp bench --data data/thyroid.csv --positive-labels 1
#   breast.csv    n~683  d=9   pmgp bench --data data/breast.csv --positive-labels 4
#   pima.csv      n=768  d=8   pmgp bench --data data/pima.csv --positive-labels 1
#   banknote.csv  n=1372 d=4   pmgp bench --data data/banknote.csv --positive-labels 1

import argparse
import csv
import io
import sys
import urllib.request

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

SOURCES = {
    "glass": {
        "url": f"{UCI}/glass/glass.data",
        # Id, RI, Na, Mg, Al, Si, K, Ca, Ba, Fe, Type
        "drop": [0],
        "label": 10,
    },
    "thyroid": {
        "url": f"{UCI}/thyroid-disease/new-thyroid.data",
        # class, T3resin, thyroxin, triiodothyronine, TSH, TSH-diff
        "drop": [],
        "label": 0,
    },
    "breast": {
        "url": f"{UCI}/breast-cancer-wisconsin/breast-cancer-wisconsin.data",
        # id, 9 features with '?' for missing, class (2 benign / 4 malignant)
        "drop": [0],
        "label": 10,
    },
    "pima": {
        # The Pima Indians Diabetes dataset was withdrawn from the UCI
        # listing; this is the widely used mirror of the original file.
        "url": "https://raw.githubusercontent.com/jbrownlee/Datasets/master/"
               "pima-indians-diabetes.data.csv",
        "drop": [],
        "label": 8,
    },
    "banknote": {
        "url": f"{UCI}/00267/data_banknote_authentication.txt",
        "drop": [],
        "label": 4,
    },
}


def fetch(url: str) -> str:
    print(f"  fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as response:
        return response.read().decode("utf-8", errors="replace")


def convert(name: str, spec: dict, out_dir: str) -> None:
    raw = fetch(spec["url"])
    rows = [r for r in csv.reader(io.StringIO(raw)) if r and any(r)]
    label_idx = spec["label"]
    drop = set(spec["drop"])
    feature_idx = [
        i for i in range(len(rows[0])) if i != label_idx and i not in drop
    ]

    out_path = f"{out_dir}/{name}.csv"
    with open(out_path, "w", newline="") as out:
        writer = csv.writer(out)
        writer.writerow([f"x{j + 1}" for j in range(len(feature_idx))] + ["label"])
        for row in rows:
            if len(row) <= max(label_idx, *feature_idx):
                continue
            writer.writerow([row[i].strip() for i in feature_idx]
                            + [row[label_idx].strip()])
    print(f"  wrote {out_path} ({len(rows)} rows)")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data", help="output directory")
    parser.add_argument("--only", nargs="*", help="subset of dataset names")
    args = parser.parse_args()

    names = args.only or list(SOURCES)
    failures = 0
    for name in names:
        if name not in SOURCES:
            print(f"unknown dataset: {name}", file=sys.stderr)
            return 2
        print(f"{name}:")
        try:
            convert(name, SOURCES[name], args.out)
        except Exception as exc:  # noqa: BLE001 - report and continue
            print(f"  failed: {exc}", file=sys.stderr)
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
