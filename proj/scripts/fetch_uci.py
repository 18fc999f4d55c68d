#!/usr/bin/env python3
"""Fetch and prepare the benchmark datasets used by the acceptance suite.

Writes CSV files with a header row and the class label in the last column,
the layout the `bdt` tools expect:

  data/wisconsin.csv  breast cancer Wisconsin (original): the id column is
                      dropped and the 16 rows with missing cells are removed,
                      leaving 683 rows x 9 features.
  data/votes.csv      1984 congressional voting records: 435 rows x 16
                      features; abstentions ('?') are kept as their own
                      category 'a' so no row is lost.

Without network access, --offline (or a failed download) falls back to the
Wisconsin *diagnostic* variant bundled with scikit-learn (569 rows x 30
features). That keeps the Wisconsin ordering experiment runnable offline; the
voting data has no offline source and is skipped.
"""

import argparse
import csv
import io
import sys
import urllib.request
from pathlib import Path

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"
WISCONSIN_URL = f"{UCI}/breast-cancer-wisconsin/breast-cancer-wisconsin.data"
VOTES_URL = f"{UCI}/voting-records/house-votes-84.data"


def download(url: str, timeout: float = 30.0) -> str:
    with urllib.request.urlopen(url, timeout=timeout) as response:
        return response.read().decode("utf-8")


def write_rows(path: Path, header: list[str], rows: list[list[str]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows, {len(header) - 1} features)")


def prepare_wisconsin(out: Path) -> None:
    text = download(WISCONSIN_URL)
    rows = []
    for line in text.splitlines():
        cells = line.strip().split(",")
        if len(cells) != 11 or "?" in cells:
            continue
        rows.append(cells[1:])  # drop the sample id
    if len(rows) != 683:
        print(f"warning: expected 683 complete rows, got {len(rows)}", file=sys.stderr)
    header = [f"x{i}" for i in range(1, 10)] + ["class"]
    write_rows(out, header, rows)


def prepare_wisconsin_offline(out: Path) -> None:
    from sklearn.datasets import load_breast_cancer

    data = load_breast_cancer()
    rows = []
    for features, target in zip(data.data, data.target):
        rows.append([repr(float(v)) for v in features] + [data.target_names[target]])
    header = [f"x{i}" for i in range(1, data.data.shape[1] + 1)] + ["class"]
    write_rows(out, header, rows)
    print("note: offline fallback uses the diagnostic Wisconsin variant (wdbc)")


def prepare_votes(out: Path) -> None:
    text = download(VOTES_URL)
    rows = []
    for line in text.splitlines():
        cells = line.strip().split(",")
        if len(cells) != 17:
            continue
        votes = ["a" if c == "?" else c for c in cells[1:]]
        rows.append(votes + [cells[0]])  # party label goes last
    if len(rows) != 435:
        print(f"warning: expected 435 rows, got {len(rows)}", file=sys.stderr)
    header = [f"v{i}" for i in range(1, 17)] + ["party"]
    write_rows(out, header, rows)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="data", type=Path)
    parser.add_argument("--offline", action="store_true",
                        help="skip downloads and use bundled fallbacks only")
    args = parser.parse_args()

    status = 0
    if args.offline:
        prepare_wisconsin_offline(args.out_dir / "wisconsin.csv")
        print("votes: no offline source, skipped", file=sys.stderr)
        return 0

    try:
        prepare_wisconsin(args.out_dir / "wisconsin.csv")
    except Exception as error:  # noqa: BLE001 - report and fall back
        print(f"wisconsin download failed ({error}); using offline fallback",
              file=sys.stderr)
        prepare_wisconsin_offline(args.out_dir / "wisconsin.csv")
    try:
        prepare_votes(args.out_dir / "votes.csv")
    except Exception as error:  # noqa: BLE001
        print(f"votes download failed ({error}); no offline source", file=sys.stderr)
        status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
